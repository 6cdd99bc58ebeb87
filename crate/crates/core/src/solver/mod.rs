//! Mild solutions `u(t) = S(t)u₀ + ∫_0^t S(t-r) G(u(r)) dω(r)` by Picard iteration.
//!
//! `G` is diagonal in the eigenbasis, so one application of the fixed-point map
//! splits into independent scalar problems per mode. For mode `i` and node `t_k`
//! the integrand is `z(r) = e^{-λ_i(t_k - r)} g(r)`; its left derivative at `t_m`
//! is `e^{-λ_i(t_k - t_m)}` times a quantity that does not depend on `k`, and the
//! right derivative of `ω` on `[0, t_k]` is accumulated as `k` grows. One
//! application costs `O(n²)` per mode and `O(n)` memory.

pub mod certify;
pub mod kfun;

use std::sync::Arc;

use crate::coefficients::DiagonalNemytskii;
use crate::error::{domain, Error, Result};
use crate::fbm::{HilbertPath, ScalarPath};
use crate::fraccalc::{right_sing_coeff, Kernels};
use crate::holder::{self, HolderParams, NormReport, Window};
use crate::par;
use crate::semigroup::{vdelta_norm, SpectralOperator};

pub use kfun::{kfun, KFunction, KParams};

/// Default Picard tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;
/// Consecutive non-contracting steps that abort the iteration.
pub const DIVERGENCE_STEPS: usize = 3;

/// Optional Lipschitz drift `F: V → V`.
pub type Drift = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Data of the mild equation on `[0, T]`.
#[derive(Clone)]
pub struct MildProblem {
    pub op: SpectralOperator,
    pub g: DiagonalNemytskii,
    driver: HilbertPath,
    pub u0: Vec<f64>,
    pub params: HolderParams,
    pub drift: Option<Drift>,
    pub tol: f64,
    pub max_iter: usize,
    /// When set, ρ is chosen from this constant instead of `params.rho`.
    pub c_t: Option<f64>,
}

impl std::fmt::Debug for MildProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MildProblem")
            .field("op", &self.op)
            .field("g", &self.g)
            .field("steps", &self.steps())
            .field("horizon", &self.horizon())
            .field("u0", &self.u0)
            .field("params", &self.params)
            .field("drift", &self.drift.is_some())
            .field("tol", &self.tol)
            .field("max_iter", &self.max_iter)
            .field("c_t", &self.c_t)
            .finish()
    }
}

fn rebase(path: &HilbertPath) -> Result<HilbertPath> {
    HilbertPath::new(path.modes().iter().map(|m| m.with_t0(0.0)).collect())
}

impl MildProblem {
    /// `omega` must contain the nodes `0` and `horizon`; it is restricted to `[0, T]`.
    pub fn new(
        op: SpectralOperator,
        g: DiagonalNemytskii,
        omega: &HilbertPath,
        u0: Vec<f64>,
        params: HolderParams,
        horizon: f64,
    ) -> Result<Self> {
        params.validate()?;
        let n = op.n_modes();
        if g.n_modes() != n || omega.n_modes() != n || u0.len() != n {
            return domain(format!(
                "mode counts differ: operator {n}, G {}, driver {}, u0 {}",
                g.n_modes(),
                omega.n_modes(),
                u0.len()
            ));
        }
        if !(horizon > 0.0) {
            return domain(format!("horizon must be positive, got {horizon}"));
        }
        let a = omega.node_of(0.0)?;
        let b = omega.node_of(horizon)?;
        let driver = rebase(&omega.slice(a, b)?)?;
        Ok(Self {
            op,
            g,
            driver,
            u0,
            params,
            drift: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            c_t: None,
        })
    }

    pub fn driver(&self) -> &HilbertPath {
        &self.driver
    }

    pub fn steps(&self) -> usize {
        self.driver.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.driver.dt()
    }

    pub fn horizon(&self) -> f64 {
        self.driver.time(self.steps())
    }

    pub fn n_modes(&self) -> usize {
        self.op.n_modes()
    }

    pub fn window(&self) -> Window {
        Window {
            start: 0,
            end: self.steps(),
        }
    }

    pub fn with_u0(&self, u0: Vec<f64>) -> Result<Self> {
        if u0.len() != self.n_modes() {
            return domain("initial value has the wrong number of modes");
        }
        Ok(Self { u0, ..self.clone() })
    }

    /// Same problem with another driver, restricted to `[0, T]`.
    pub fn with_driver(&self, omega: &HilbertPath) -> Result<Self> {
        let mut p = Self::new(
            self.op.clone(),
            self.g.clone(),
            omega,
            self.u0.clone(),
            self.params,
            self.horizon(),
        )?;
        p.drift = self.drift.clone();
        p.tol = self.tol;
        p.max_iter = self.max_iter;
        p.c_t = self.c_t;
        Ok(p)
    }

    /// Restrict to `[0, T']`.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let b = self.driver.node_of(horizon)?;
        if b == 0 {
            return domain("horizon must be at least one step");
        }
        Ok(Self {
            driver: self.driver.slice(0, b)?,
            ..self.clone()
        })
    }

    pub fn with_params(&self, params: HolderParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, ..self.clone() })
    }

    /// `|||ω|||_{β', 0, T}`.
    pub fn driver_seminorm(&self) -> Result<f64> {
        holder::holder_seminorm(&self.driver, self.params.beta_prime, self.window())
    }

    pub fn kparams(&self) -> Result<KParams> {
        KParams::from_holder(&self.params, self.horizon())
    }

    /// `t ↦ S(t)u₀` on the grid.
    pub fn semigroup_path(&self) -> HilbertPath {
        let n = self.steps();
        let modes = (0..self.n_modes())
            .map(|i| {
                let l = self.op.lambdas()[i];
                let x = self.u0[i];
                let v = (0..=n).map(|k| (-l * self.driver.time(k)).exp() * x).collect();
                ScalarPath::new(0.0, self.dt(), v).expect("grid validated")
            })
            .collect();
        HilbertPath::new(modes).expect("modes share the grid")
    }

    /// Constant path `t ↦ u₀`.
    pub fn constant_path(&self) -> HilbertPath {
        let n = self.steps();
        HilbertPath::from_series(0.0, self.dt(), self.u0.iter().map(|&x| vec![x; n + 1]).collect())
            .expect("grid validated")
    }
}

/// Precomputed kernels and exponential tables for one problem grid.
pub struct FixedPointMap<'a> {
    problem: &'a MildProblem,
    kernels: Kernels,
    // e^{-λ_i d h}, d = 0..=n
    decay: Vec<Vec<f64>>,
}

impl<'a> FixedPointMap<'a> {
    pub fn new(problem: &'a MildProblem) -> Result<Self> {
        let n = problem.steps();
        let h = problem.dt();
        let kernels = Kernels::new(problem.params.alpha, h, n)?;
        let decay = problem
            .op
            .lambdas()
            .iter()
            .map(|l| (0..=n).map(|d| (-l * (d as f64 * h)).exp()).collect())
            .collect();
        Ok(Self {
            problem,
            kernels,
            decay,
        })
    }

    pub fn problem(&self) -> &MildProblem {
        self.problem
    }

    /// `T(u)` on the problem grid.
    pub fn apply(&self, u: &HilbertPath) -> Result<HilbertPath> {
        let p = self.problem;
        if u.n_modes() != p.n_modes() || u.len() != p.driver.len() {
            return domain(format!(
                "iterate has {} modes and {} nodes, problem has {} and {}",
                u.n_modes(),
                u.len(),
                p.n_modes(),
                p.driver.len()
            ));
        }
        let n = p.steps();
        let drift = match &p.drift {
            Some(f) => Some(self.drift_terms(f, u)),
            None => None,
        };
        let modes = par::map_range(p.n_modes(), |i| {
            let ui = u.mode(i).values();
            let gi: Vec<f64> = ui.iter().map(|&x| p.g.entry(i, x)).collect();
            let integral = if p.g.mus()[i] == 0.0 {
                vec![0.0; n + 1]
            } else {
                mode_integral(&self.kernels, &self.decay[i], &gi, p.driver.mode(i).values())
            };
            let l = p.op.lambdas()[i];
            let mut v: Vec<f64> = (0..=n)
                .map(|k| (-l * p.driver.time(k)).exp() * p.u0[i] + integral[k])
                .collect();
            if let Some(d) = &drift {
                for (vk, dk) in v.iter_mut().zip(&d[i]) {
                    *vk += dk;
                }
            }
            v[0] = p.u0[i];
            ScalarPath::new(0.0, p.dt(), v).expect("grid validated")
        });
        HilbertPath::new(modes)
    }

    // ∫_0^{t_k} e^{-λ(t_k - r)} F(u(r))_i dr with F piecewise linear between nodes
    fn drift_terms(&self, f: &Drift, u: &HilbertPath) -> Vec<Vec<f64>> {
        let p = self.problem;
        let n = p.steps();
        let h = p.dt();
        let values: Vec<Vec<f64>> = (0..=n).map(|k| f(&u.at(k))).collect();
        (0..p.n_modes())
            .map(|i| {
                let c = p.op.lambdas()[i] * h;
                let (a0, a1) = exp_moments(c);
                let damp = (-c).exp();
                let mut acc = 0.0;
                let mut out = vec![0.0; n + 1];
                for k in 1..=n {
                    acc = damp * acc + h * (a1 * values[k - 1][i] + (a0 - a1) * values[k][i]);
                    out[k] = acc;
                }
                out
            })
            .collect()
    }
}

// (∫_0^1 e^{-cv} dv, ∫_0^1 v e^{-cv} dv)
fn exp_moments(c: f64) -> (f64, f64) {
    if c < 1e-4 {
        (1.0 - c / 2.0 + c * c / 6.0, 0.5 - c / 3.0 + c * c / 8.0)
    } else {
        let e = (-c).exp();
        (-(-c).exp_m1() / c, (1.0 - e * (1.0 + c)) / (c * c))
    }
}

/// `∫_0^{t_k} e^{-λ(t_k - r)} g(r) dω(r)` for every node `k` (entry 0 is 0).
/// `decay[d] = e^{-λ d h}`.
pub(crate) fn mode_integral(k: &Kernels, decay: &[f64], g: &[f64], w: &[f64]) -> Vec<f64> {
    let n = g.len() - 1;
    let h = k.h;
    // left remainder at node m for the window ending at m; scaled by decay[k-m] later
    let wt: Vec<f64> = par::map_range(n + 1, |m| {
        if m == 0 {
            0.0
        } else {
            k.inv_g1ma * ((g[m] - decay[m] * g[0]) * k.xpow[m] + k.left_sum(m, |j| decay[m - j] * g[j]))
        }
    });
    let mut prefix = vec![0.0; n];
    let mut rt = vec![0.0; n];
    let mut out = vec![0.0; n + 1];
    // corrections of the nodal rule for the window ending at kk: interior cells
    // over cells b ≤ kk-2, constant part over the same cells, then the last cell
    let mut inner = 0.0;
    let mut konst = 0.0;
    for kk in 1..=n {
        if kk >= 2 {
            let b = kk - 2;
            let mut s = 0.0;
            for (d, e) in k.inner.iter().enumerate().take(b + 1) {
                let a = b - d;
                s += e * (decay[d] * g[a + 1] - decay[d + 1] * g[a]);
            }
            inner = decay[1] * (inner + s * (w[b + 1] - w[b]));
            konst += k.fconst[b] * (w[b + 1] - w[b]);
        }
        let dw = w[kk] - w[kk - 1];
        let mut last = 0.0;
        for (d, e) in k.elast.iter().enumerate().take(kk) {
            last += e * (decay[d] * g[kk - d] - decay[d + 1] * g[kk - 1 - d]);
        }
        let corr = inner + dw * last + decay[kk] * g[0] * (konst + k.flast[kk] * dw);
        let (wk1, wk) = (w[kk - 1], w[kk]);
        for m in 0..kk {
            prefix[m] += k.right_cell(w[m], wk1, wk, kk - 1 - m);
        }
        let c_l = decay[kk] * g[0] * k.inv_g1ma;
        let c_r = right_sing_coeff(k, wk1, wk);
        for m in 0..kk - 1 {
            rt[m] = k.inv_ga * (k.right_boundary(w[m], wk, kk - m) + prefix[m]) - c_r * k.ysing[kk - m];
        }
        rt[kk - 1] = 0.0;
        let mut s_x = 0.0;
        let mut s_p = 0.0;
        for m in 0..kk - 1 {
            s_x += k.wx[m] * rt[m];
        }
        for m in 1..kk - 1 {
            s_p += decay[kk - m] * wt[m] * rt[m];
        }
        let mut s_y = 0.0;
        for m in 1..=kk {
            s_y += k.wy[kk - m] * decay[kk - m] * wt[m];
        }
        let x_end = kk as f64 * h;
        let acc = c_l * c_r * x_end * k.beta_sing + c_l * s_x + c_r * s_y + h * s_p;
        out[kk] = -acc - corr;
    }
    out
}

/// `T(u)`.
pub fn fixed_point_map(problem: &MildProblem, u: &HilbertPath) -> Result<HilbertPath> {
    FixedPointMap::new(problem)?.apply(u)
}

/// Smallest `ρ` on `{1, 2, 4, …, 2⁶⁴}` with `c_T |||ω||| K(ρ) < 1/2`; returns `(ρ, K(ρ))`.
pub fn choose_rho(problem: &MildProblem, c_t: f64) -> Result<(f64, f64)> {
    if !(c_t > 0.0) {
        return domain(format!("c_T must be positive, got {c_t}"));
    }
    let scale = c_t * problem.driver_seminorm()?;
    choose_rho_for(&KFunction::new(problem.kparams()?), scale)
}

/// Smallest `ρ` on the doubling grid with `scale · K(ρ) < 1/2`.
pub fn choose_rho_for(kf: &KFunction, scale: f64) -> Result<(f64, f64)> {
    let mut last = f64::NAN;
    for e in 0..=64 {
        let rho = 2f64.powi(e);
        let k = kf.eval(rho)?;
        last = scale * k;
        if last < 0.5 {
            return Ok((rho, k));
        }
    }
    Err(Error::RhoSearch { product: last })
}

/// Per-run record of a Picard solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub rho: f64,
    pub k_rho: f64,
    pub c_t: Option<f64>,
    pub iterations: usize,
    /// Ratios of successive weighted distances `‖u^{k+1} - u^k‖_{β,ρ,∼}`.
    pub contraction_ratios: Vec<f64>,
    /// `ln ‖u^{k+1} - u^k‖_{β,ρ,∼}` per iteration.
    pub log_distances: Vec<f64>,
    /// `‖u^{k+1} - u^k‖_{β,∼}` per iteration.
    pub distances: Vec<f64>,
    /// `‖u - T(u)‖_{β,ρ,∼}` of the returned path.
    pub residual_weighted: f64,
    pub log_residual_weighted: f64,
    /// `‖u - T(u)‖_{β,∼}` of the returned path.
    pub residual_modified: f64,
    pub norm_report: NormReport,
    /// `|u(t_k)|_{V_β}` per node.
    pub regularity: Vec<f64>,
}

impl SolveDiagnostics {
    /// Slope of the log weighted distance against the iteration index.
    pub fn log_distance_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .log_distances
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_finite())
            .map(|(i, d)| (i as f64, *d))
            .collect();
        if pts.len() < 2 {
            return f64::NEG_INFINITY;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        crate::stats::slope(&x, &y)
    }

    pub const CSV_HEADER: &'static str = "iteration,distance,log_weighted_distance,ratio";

    pub fn write_csv<W: std::io::Write>(&self, w: &mut W, sep: char) -> std::io::Result<()> {
        writeln!(w, "iteration{sep}distance{sep}log_weighted_distance{sep}ratio")?;
        for (i, (d, l)) in self.distances.iter().zip(&self.log_distances).enumerate() {
            let r = if i == 0 { f64::NAN } else { self.contraction_ratios[i - 1] };
            writeln!(w, "{}{sep}{}", i + 1, crate::io::join_row(&[*d, *l, r], sep))?;
        }
        Ok(())
    }

    /// Flat `key = value` block.
    pub fn key_values(&self) -> String {
        let f = crate::io::fmt_f64;
        let max_ratio = self.contraction_ratios.iter().copied().fold(0.0, f64::max);
        let mut s = String::new();
        s.push_str(&format!("rho = {}\n", f(self.rho)));
        s.push_str(&format!("k_rho = {}\n", f(self.k_rho)));
        if let Some(c) = self.c_t {
            s.push_str(&format!("c_t = {}\n", f(c)));
        }
        s.push_str(&format!("iterations = {}\n", self.iterations));
        s.push_str(&format!("max_contraction_ratio = {}\n", f(max_ratio)));
        s.push_str(&format!("residual_weighted = {}\n", f(self.residual_weighted)));
        s.push_str(&format!("log_residual_weighted = {}\n", f(self.log_residual_weighted)));
        s.push_str(&format!("residual_modified = {}\n", f(self.residual_modified)));
        s.push_str(&format!("sup_norm = {}\n", f(self.norm_report.sup_norm)));
        s.push_str(&format!("holder_seminorm = {}\n", f(self.norm_report.holder_seminorm)));
        s.push_str(&format!("modified_seminorm = {}\n", f(self.norm_report.modified_seminorm)));
        s.push_str(&format!("weighted_norm = {}\n", f(self.norm_report.weighted_norm)));
        s
    }
}

/// Which path starts the Picard iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// `u⁰(t) = S(t)u₀`.
    #[default]
    Semigroup,
    /// `u⁰(t) = u₀`.
    Constant,
}

/// Picard iteration from `u⁰(t) = S(t)u₀`.
pub fn solve_mild(problem: &MildProblem) -> Result<(HilbertPath, SolveDiagnostics)> {
    solve_mild_from(problem, Init::Semigroup)
}

/// Picard iteration from the given initial iterate.
pub fn solve_mild_from(problem: &MildProblem, init: Init) -> Result<(HilbertPath, SolveDiagnostics)> {
    let map = FixedPointMap::new(problem)?;
    let kf = KFunction::new(problem.kparams()?);
    let (rho, k_rho) = match problem.c_t {
        Some(c) => choose_rho_for(&kf, c * problem.driver_seminorm()?)?,
        None => (problem.params.rho, kf.eval(problem.params.rho)?),
    };
    let weighted = problem.params.with_rho(rho);
    let plain = problem.params.with_rho(0.0);
    let w = problem.window();
    let mut u = match init {
        Init::Semigroup => problem.semigroup_path(),
        Init::Constant => problem.constant_path(),
    };
    let mut ratios = Vec::new();
    let mut log_d: Vec<f64> = Vec::new();
    let mut dists = Vec::new();
    let mut streak = 0;
    let mut next = map.apply(&u)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let diff = next.sub(&u)?;
        let d = holder::weighted_norm(&diff, &plain, w)?;
        let ld = holder::log_weighted_norm(&diff, &weighted, w)?;
        if let Some(prev) = log_d.last() {
            let r = if ld == f64::NEG_INFINITY { 0.0 } else { (ld - prev).exp() };
            ratios.push(r);
            streak = if r >= 1.0 { streak + 1 } else { 0 };
        }
        log_d.push(ld);
        dists.push(d);
        u = next;
        if d < problem.tol {
            break;
        }
        if streak >= DIVERGENCE_STEPS || iterations >= problem.max_iter {
            return Err(Error::Divergence {
                iterations,
                last_ratios: ratios.iter().rev().take(DIVERGENCE_STEPS).rev().copied().collect(),
            });
        }
        next = map.apply(&u)?;
    }
    let res = map.apply(&u)?.sub(&u)?;
    let log_res = holder::log_weighted_norm(&res, &weighted, w)?;
    let mut report = NormReport::compute(&u, &plain, w)?;
    report.rho = rho;
    report.weighted_norm = holder::log_weighted_norm(&u, &weighted, w)?.exp();
    let regularity = (0..u.len())
        .map(|k| vdelta_norm(&u.at(k), problem.params.beta, &problem.op))
        .collect::<Result<_>>()?;
    let diag = SolveDiagnostics {
        rho,
        k_rho,
        c_t: problem.c_t,
        iterations,
        contraction_ratios: ratios,
        log_distances: log_d,
        distances: dists,
        residual_weighted: log_res.exp(),
        log_residual_weighted: log_res,
        residual_modified: holder::weighted_norm(&res, &plain, w)?,
        norm_report: report,
        regularity,
    };
    Ok((u, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Profile;
    use crate::fbm::FbmConfig;
    use crate::fraccalc::zahle_integral_scalar;
    use approx::assert_relative_eq;

    fn params() -> HolderParams {
        HolderParams::new(0.55, 0.7, 0.4, 0.0).unwrap()
    }

    fn scalar_problem(lambda: f64, sigma: f64, profile: Profile, steps: usize, seed: u64) -> MildProblem {
        let cfg = FbmConfig::new(0.75, 1.0, steps, seed).unwrap();
        let w = crate::fbm::sample_fbm_1d(&cfg).unwrap();
        let omega = HilbertPath::new(vec![w]).unwrap();
        MildProblem::new(
            SpectralOperator::new(vec![lambda]).unwrap(),
            DiagonalNemytskii::scalar(sigma, profile).unwrap(),
            &omega,
            vec![1.0],
            params(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn mode_integral_matches_generic_integral() {
        let p = scalar_problem(2.0, 0.7, Profile::Tanh, 128, 3);
        let map = FixedPointMap::new(&p).unwrap();
        let u = p.semigroup_path();
        let tu = map.apply(&u).unwrap();
        let w = p.driver().mode(0);
        let g = u.mode(0).map(|x| 0.7 * x.tanh());
        for k in [1usize, 2, 3, 17, 64, 128] {
            let z = ScalarPath::new(
                0.0,
                p.dt(),
                (0..=128).map(|j| if j <= k { (-2.0 * (k - j) as f64 * p.dt()).exp() * g.values()[j] } else { 0.0 }).collect(),
            )
            .unwrap();
            let direct = zahle_integral_scalar(&z, w, 0.4, Window::new(0, k).unwrap()).unwrap();
            let semi = (-2.0 * p.driver().time(k)).exp();
            assert_relative_eq!(tu.mode(0).values()[k] - semi, direct, epsilon = 1e-12, max_relative = 1e-10);
        }
    }

    #[test]
    fn zero_noise_is_semigroup() {
        let mut p = scalar_problem(1.5, 0.0, Profile::Identity, 64, 1);
        p.u0 = vec![2.0];
        let (u, d) = solve_mild(&p).unwrap();
        assert_eq!(u, p.semigroup_path());
        assert_eq!(d.iterations, 1);
    }

    #[test]
    fn additive_unit_noise_without_damping() {
        let p = scalar_problem(0.0, 1.0, Profile::Constant, 64, 2);
        let u = p.semigroup_path();
        let tu = fixed_point_map(&p, &u).unwrap();
        let w = p.driver().mode(0).values();
        for k in 0..=64 {
            assert!((tu.mode(0).values()[k] - (1.0 + w[k] - w[0])).abs() < 0.05);
        }
        assert_eq!(tu.mode(0).values()[0], 1.0);
    }

    #[test]
    fn drift_hook_integrates_constant_forcing() {
        let mut p = scalar_problem(1.0, 0.0, Profile::Constant, 200, 2);
        p.u0 = vec![0.0];
        p.drift = Some(Arc::new(|_: &[f64]| vec![1.0]));
        let tu = fixed_point_map(&p, &p.semigroup_path()).unwrap();
        let t = p.horizon();
        assert_relative_eq!(tu.mode(0).values()[200], 1.0 - (-t).exp(), max_relative = 1e-12);
    }

    #[test]
    fn choose_rho_zero_path() {
        let cfg = FbmConfig::new(0.75, 1.0, 32, 1).unwrap();
        let w = crate::fbm::sample_fbm_1d(&cfg).unwrap().map(|_| 0.0);
        let p = MildProblem::new(
            SpectralOperator::new(vec![1.0]).unwrap(),
            DiagonalNemytskii::scalar(0.5, Profile::Identity).unwrap(),
            &HilbertPath::new(vec![w]).unwrap(),
            vec![1.0],
            params(),
            1.0,
        )
        .unwrap();
        assert_eq!(choose_rho(&p, 3.0).unwrap().0, 1.0);
    }

    #[test]
    fn mode_mismatch_rejected() {
        let cfg = FbmConfig::new(0.75, 1.0, 32, 1).unwrap();
        let w = crate::fbm::sample_fbm_1d(&cfg).unwrap();
        let r = MildProblem::new(
            SpectralOperator::dirichlet_laplacian(2).unwrap(),
            DiagonalNemytskii::scalar(0.5, Profile::Identity).unwrap(),
            &HilbertPath::new(vec![w]).unwrap(),
            vec![1.0],
            params(),
            1.0,
        );
        assert!(r.is_err());
    }
}
