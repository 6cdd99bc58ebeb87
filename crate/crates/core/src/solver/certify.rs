//! Certification of the solver estimates: calibrated growth and contraction
//! bounds of the fixed-point map, the left-derivative envelope of the
//! integrand, smoothing of rough initial data, the cocycle identity, and
//! closed-form oracles for linear instances.
//!
//! All norm comparisons run in log space because the weight `e^{-ρ t}` at the
//! chosen `ρ` underflows everywhere but the first few nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{choose_rho_for, solve_mild, solve_mild_from, FixedPointMap, Init, KFunction, MildProblem};
use crate::coefficients::{DiagonalNemytskii, Profile};
use crate::error::{domain, Error, Result};
use crate::fbm::{mode_seed, sample_fbm_1d, sample_fbm_hilbert, FbmConfig, HilbertPath, ScalarPath, TraceWeights, WienerShift};
use crate::fraccalc::weyl_left;
use crate::holder::{self, log_add, HolderParams, Window};
use crate::semigroup::{vdelta_norm, SpectralOperator};
use crate::stats;

/// Weights at which each calibration draw is evaluated; a draw contributes its largest ratio.
pub const CALIBRATION_RHOS: [f64; 4] = [0.0, 1.0, 10.0, 100.0];
/// Safety factor on the median observed ratio.
pub const CALIBRATION_FACTOR: f64 = 1.5;
/// Hurst index of the random perturbations used as test iterates.
const ITERATE_HURST: f64 = 0.8;

/// `c = 1 + (β/e)^β`, so that `‖S(·)u₀‖_{β,∼} ≤ c |u₀|`.
pub fn initial_constant(beta: f64) -> f64 {
    1.0 + (beta / std::f64::consts::E).powf(beta)
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `S(·)u₀ + a Σ_i (i+1)^{-1} b_i e_i` with independent fBm modes `b_i`.
pub fn random_iterate(problem: &MildProblem, amplitude: f64, seed: u64) -> Result<HilbertPath> {
    let base = problem.semigroup_path();
    let cfg = FbmConfig::new(ITERATE_HURST, problem.horizon(), problem.steps(), seed)?;
    let modes = (0..problem.n_modes())
        .map(|i| {
            let b = sample_fbm_1d(&cfg.with_seed(mode_seed(seed, i)))?;
            base.mode(i).combine(1.0, &b.with_t0(0.0), amplitude / (i + 1) as f64)
        })
        .collect::<Result<_>>()?;
    HilbertPath::new(modes)
}

/// `count` random iterates with amplitudes log-uniform in `[0.1, 1]`.
pub fn random_iterates(problem: &MildProblem, count: usize, seed: u64) -> Result<Vec<HilbertPath>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let amp = 10f64.powf(rng.random_range(-1.0..0.0));
            let s = rng.random::<u64>();
            random_iterate(problem, amp, s)
        })
        .collect()
}

/// Calibrated `c_T` with the sample it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub c_t: f64,
    pub median: f64,
    /// Per-draw observed ratio (largest over [`CALIBRATION_RHOS`] and both bounds).
    pub ratios: Vec<f64>,
}

/// Contraction certification on held-out pairs at a fixed `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub rho: f64,
    pub k_rho: f64,
    pub c_t: f64,
    pub ratios: Vec<f64>,
}

impl ContractionReport {
    pub fn max_ratio(&self) -> f64 {
        stats::max(&self.ratios)
    }

    pub fn passed(&self) -> bool {
        self.ratios.iter().all(|r| *r <= 1.0)
    }

    pub fn check(&self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::Certification {
                check: "contraction bound".into(),
                detail: format!(
                    "max ratio {:e} > 1 at rho {:e} with c_T {:e}",
                    self.max_ratio(),
                    self.rho,
                    self.c_t
                ),
            })
        }
    }
}

/// Left-derivative envelope of `r ↦ S(t-r)G(u(r))` on `[0, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma5Report {
    pub t: f64,
    pub r: Vec<f64>,
    pub lhs: Vec<f64>,
    /// `(1 + ‖u‖_{β,∼}) r^{-α} (1 + r^β (t-r)^{-β})`
    pub envelope: Vec<f64>,
    /// Largest `lhs / envelope`.
    pub constant: f64,
    /// Log-log slope of `lhs` against `r` near 0.
    pub slope_origin: f64,
    /// Log-log slope of `lhs` against `t - r` near `t`.
    pub slope_end: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Lemma5Report {
    pub fn passed(&self) -> bool {
        self.constant.is_finite() && self.slope_origin >= -self.alpha - 0.1 && self.slope_end >= -self.beta - 0.1
    }
}

/// `|u(t)|_{V_β}` along a solution and its `t^{-β}` envelope constant.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub t: Vec<f64>,
    pub norms: Vec<f64>,
    /// `C` in `|u(t)|_{V_β} ≈ C t^{-β} |u₀|`, fitted on `dt ≤ t ≤ T/16`
    pub constant: f64,
    /// fitted exponent of `|u(t)|_{V_β}` on the same range
    pub exponent: f64,
    /// `max_{t ≥ dt} t^β |u(t)|_{V_β} / |u₀|`
    pub max_ratio: f64,
}

impl RegularityReport {
    pub fn finite(&self) -> bool {
        self.norms.iter().all(|x| x.is_finite())
    }
}

/// Precomputed pieces shared by the bound checks of one problem.
pub struct Certifier<'a> {
    problem: &'a MildProblem,
    map: FixedPointMap<'a>,
    kf: KFunction,
    seminorm: f64,
    base: HilbertPath,
}

impl<'a> Certifier<'a> {
    pub fn new(problem: &'a MildProblem) -> Result<Self> {
        Ok(Self {
            problem,
            map: FixedPointMap::new(problem)?,
            kf: KFunction::new(problem.kparams()?),
            seminorm: problem.driver_seminorm()?,
            base: problem.semigroup_path(),
        })
    }

    pub fn seminorm(&self) -> f64 {
        self.seminorm
    }

    pub fn kfunction(&self) -> &KFunction {
        &self.kf
    }

    fn params(&self, rho: f64) -> HolderParams {
        self.problem.params.with_rho(rho)
    }

    fn log_norm(&self, u: &HilbertPath, rho: f64) -> Result<f64> {
        holder::log_weighted_norm(u, &self.params(rho), self.problem.window())
    }

    /// `‖T(u) - S(·)u₀‖ / (|||ω||| K(ρ) (1 + ‖u‖))` in the `ρ`-weighted norm.
    pub fn growth_observed(&self, u: &HilbertPath, rho: f64) -> Result<f64> {
        let lhs = self.log_norm(&self.map.apply(u)?.sub(&self.base)?, rho)?;
        let k = self.kf.eval(rho)?;
        let nu = self.log_norm(u, rho)?.exp();
        Ok((lhs - (self.seminorm * k * (1.0 + nu)).ln()).exp())
    }

    /// `‖T(u₁) - T(u₂)‖ / (|||ω||| (1 + ‖u₁‖ + ‖u₂‖) K(ρ) ‖u₁ - u₂‖)` for iterates with the problem's `u₀`.
    pub fn contraction_observed(&self, u1: &HilbertPath, u2: &HilbertPath, rho: f64) -> Result<f64> {
        let diff = u1.sub(u2)?;
        let ld = self.log_norm(&diff, rho)?;
        if ld == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let lhs = self.log_norm(&self.map.apply(u1)?.sub(&self.map.apply(u2)?)?, rho)?;
        let k = self.kf.eval(rho)?;
        let n1 = self.log_norm(u1, rho)?.exp();
        let n2 = self.log_norm(u2, rho)?.exp();
        Ok((lhs - ld - (self.seminorm * k * (1.0 + n1 + n2)).ln()).exp())
    }

    /// `c_T = 1.5 ×` median observed ratio over `count` draws.
    pub fn calibrate(&self, count: usize, seed: u64) -> Result<Calibration> {
        if count == 0 {
            return domain("calibration needs at least one draw");
        }
        let us = random_iterates(self.problem, 2 * count, seed)?;
        let mut ratios = Vec::with_capacity(count);
        for pair in us.chunks(2) {
            let mut r: f64 = 0.0;
            for rho in CALIBRATION_RHOS {
                r = r
                    .max(self.growth_observed(&pair[0], rho)?)
                    .max(self.contraction_observed(&pair[0], &pair[1], rho)?);
            }
            ratios.push(r);
        }
        let median = stats::median(&ratios);
        if !(median > 0.0 && median.is_finite()) {
            return domain(format!("calibration produced a degenerate median ratio {median}"));
        }
        Ok(Calibration {
            c_t: CALIBRATION_FACTOR * median,
            median,
            ratios,
        })
    }

    /// `‖T(u)‖ / (c_T |||ω||| K(ρ) (1 + ‖u‖) + c |u₀|)`.
    pub fn growth_ratio(&self, u: &HilbertPath, rho: f64, c_t: f64) -> Result<f64> {
        let lhs = self.log_norm(&self.map.apply(u)?, rho)?;
        let k = self.kf.eval(rho)?;
        let nu = self.log_norm(u, rho)?.exp();
        let c = initial_constant(self.problem.params.beta) * euclid(&self.problem.u0);
        let rhs = log_add((c_t * self.seminorm * k * (1.0 + nu)).ln(), c.ln());
        Ok((lhs - rhs).exp())
    }

    /// Both sides of the contraction bound for iterates whose initial values are
    /// their values at node 0; returns `lhs / rhs`.
    pub fn contraction_ratio(&self, u1: &HilbertPath, u2: &HilbertPath, rho: f64, c_t: f64) -> Result<f64> {
        let x1 = u1.at(0);
        let x2 = u2.at(0);
        let dx: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
        let p1 = self.problem.with_u0(x1)?;
        let p2 = self.problem.with_u0(x2)?;
        let t1 = FixedPointMap::new(&p1)?.apply(u1)?;
        let t2 = FixedPointMap::new(&p2)?.apply(u2)?;
        let lhs = self.log_norm(&t1.sub(&t2)?, rho)?;
        if lhs == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let k = self.kf.eval(rho)?;
        let n1 = self.log_norm(u1, rho)?.exp();
        let n2 = self.log_norm(u2, rho)?.exp();
        let ld = self.log_norm(&u1.sub(u2)?, rho)?;
        let c = initial_constant(self.problem.params.beta) * euclid(&dx);
        let rhs = log_add((c_t * self.seminorm * k * (1.0 + n1 + n2)).ln() + ld, c.ln());
        Ok((lhs - rhs).exp())
    }

    /// `ρ` from [`choose_rho_for`] with the given constant, then the contraction
    /// ratio on `pairs` held-out pairs drawn from `seed`.
    pub fn contraction_suite(&self, c_t: f64, pairs: usize, seed: u64) -> Result<ContractionReport> {
        let (rho, k_rho) = choose_rho_for(&self.kf, c_t * self.seminorm)?;
        let us = random_iterates(self.problem, 2 * pairs, seed)?;
        let ratios = us
            .chunks(2)
            .map(|p| self.contraction_ratio(&p[0], &p[1], rho, c_t))
            .collect::<Result<_>>()?;
        Ok(ContractionReport { rho, k_rho, c_t, ratios })
    }
}

/// Calibrate `c_T` on `count` draws from `seed`.
pub fn calibrate_c_t(problem: &MildProblem, count: usize, seed: u64) -> Result<Calibration> {
    Certifier::new(problem)?.calibrate(count, seed)
}

/// Contraction ratio of one pair at `ρ` with constant `c_T`.
pub fn contraction_certify(problem: &MildProblem, u1: &HilbertPath, u2: &HilbertPath, rho: f64, c_t: f64) -> Result<f64> {
    Certifier::new(problem)?.contraction_ratio(u1, u2, rho, c_t)
}

/// Left derivative of `r ↦ S(t-r)G(u(r))` on `[0, t]` against its envelope.
pub fn lemma5_bound_check(problem: &MildProblem, u: &HilbertPath, t: f64) -> Result<Lemma5Report> {
    let k = u.node_of(t)?;
    if k < 16 {
        return domain("derivative envelope check needs at least 16 steps before t");
    }
    let p = &problem.params;
    let w = Window::new(0, k)?;
    let h = u.dt();
    let mut sq = vec![0.0; k];
    for i in 0..problem.n_modes() {
        let l = problem.op.lambdas()[i];
        let z = ScalarPath::new(
            0.0,
            h,
            (0..=k)
                .map(|j| (-l * (k - j) as f64 * h).exp() * problem.g.entry(i, u.mode(i).values()[j]))
                .collect(),
        )?;
        let d = weyl_left(&z, p.alpha, w)?;
        for (s, v) in sq.iter_mut().zip(&d.values) {
            *s += v * v;
        }
    }
    let lhs: Vec<f64> = sq.iter().map(|s| s.sqrt()).collect();
    let unorm = holder::modified_norm(u, p.beta, Window::new(0, k)?)?;
    // nodes 1..k-1; node k is the singular endpoint
    let r: Vec<f64> = (1..k).map(|m| m as f64 * h).collect();
    let lhs = lhs[..k - 1].to_vec();
    let envelope: Vec<f64> = r
        .iter()
        .map(|&x| (1.0 + unorm) * x.powf(-p.alpha) * (1.0 + (x / (t - x)).powf(p.beta)))
        .collect();
    let constant = lhs
        .iter()
        .zip(&envelope)
        .map(|(a, b)| a / b)
        .fold(0.0, f64::max);
    let near = (k / 32).max(4);
    let slope_origin = stats::loglog_slope(&r[..near], &lhs[..near]);
    let tail: Vec<f64> = r[k - 1 - near..].iter().map(|x| t - x).collect();
    let slope_end = stats::loglog_slope(&tail, &lhs[k - 1 - near..]);
    Ok(Lemma5Report {
        t,
        r,
        lhs,
        envelope,
        constant,
        slope_origin,
        slope_end,
        alpha: p.alpha,
        beta: p.beta,
    })
}

/// `|u(t)|_{V_β}` at every node and the `t^{-β}` envelope constant over `t ≥ dt`.
pub fn regularity_report(problem: &MildProblem, solution: &HilbertPath) -> Result<RegularityReport> {
    let beta = problem.params.beta;
    let u0 = euclid(&problem.u0);
    if u0 == 0.0 {
        return domain("regularity envelope needs u0 != 0");
    }
    let t: Vec<f64> = (0..solution.len()).map(|k| solution.time(k)).collect();
    let norms = (0..solution.len())
        .map(|k| vdelta_norm(&solution.at(k), beta, &problem.op))
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = t[1..]
        .iter()
        .zip(&norms[1..])
        .map(|(t, n)| t.powf(beta) * n / u0)
        .fold(0.0, f64::max);
    let last = ((solution.len() - 1) / 16).max(2);
    let lt: Vec<f64> = t[1..=last].iter().map(|x| x.ln()).collect();
    let ln: Vec<f64> = norms[1..=last].iter().map(|x| (x / u0).ln()).collect();
    let exponent = stats::slope(&lt, &ln);
    // constant of the envelope with the exponent pinned at -β
    let constant = lt
        .iter()
        .zip(&ln)
        .map(|(a, b)| b + beta * a)
        .sum::<f64>()
        / lt.len() as f64;
    Ok(RegularityReport {
        t,
        norms,
        constant: constant.exp(),
        exponent,
        max_ratio,
    })
}

/// `|φ(t+τ, ω, u₀) - φ(t, θ_τ ω, φ(τ, ω, u₀))|` in `V`.
pub fn cocycle_defect(problem: &MildProblem, t: f64, tau: f64) -> Result<f64> {
    if t < 0.0 || tau < 0.0 {
        return domain(format!("cocycle times must be nonnegative, got t={t}, tau={tau}"));
    }
    let h = problem.dt();
    let kt = problem.driver().node_of(t)?;
    let ktau = problem.driver().node_of(tau)?;
    if kt + ktau > problem.steps() {
        return domain(format!("t + tau = {} exceeds the horizon {}", t + tau, problem.horizon()));
    }
    let total = kt + ktau;
    if total == 0 {
        return Ok(0.0);
    }
    let whole = solve_mild(&problem.with_horizon(total as f64 * h)?)?.0;
    let lhs = whole.at(total);
    let mid = if ktau == 0 {
        problem.u0.clone()
    } else {
        solve_mild(&problem.with_horizon(ktau as f64 * h)?)?.0.at(ktau)
    };
    let rhs = if kt == 0 {
        mid
    } else {
        let shifted = problem.driver().wiener_shift(ktau as f64 * h)?;
        let p2 = MildProblem::new(
            problem.op.clone(),
            problem.g.clone(),
            &shifted,
            mid,
            problem.params,
            kt as f64 * h,
        )?;
        let mut p2 = p2;
        p2.tol = problem.tol;
        p2.max_iter = problem.max_iter;
        p2.c_t = problem.c_t;
        p2.drift = problem.drift.clone();
        solve_mild(&p2)?.0.at(kt)
    };
    Ok(euclid(&lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect::<Vec<_>>()))
}

/// Sup-norm gap between the Picard limits started from `S(·)u₀` and from `u₀`.
pub fn uniqueness_gap(problem: &MildProblem) -> Result<f64> {
    let a = solve_mild_from(problem, Init::Semigroup)?.0;
    let b = solve_mild_from(problem, Init::Constant)?.0;
    holder::sup_norm(&a.sub(&b)?, problem.window())
}

/// `|φ(t, u₀ + εv) - φ(t, u₀)| / ε` for each `ε` in `scales`, `v` a random unit vector.
pub fn continuity_constants(problem: &MildProblem, t: f64, scales: &[f64], seed: u64) -> Result<Vec<f64>> {
    let k = problem.driver().node_of(t)?;
    let base = solve_mild(problem)?.0.at(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..problem.n_modes()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = euclid(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    scales
        .iter()
        .map(|&eps| {
            let u0: Vec<f64> = problem.u0.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
            let other = solve_mild(&problem.with_u0(u0)?)?.0.at(k);
            let d: Vec<f64> = other.iter().zip(&base).map(|(a, b)| a - b).collect();
            Ok(euclid(&d) / eps)
        })
        .collect()
}

/// `u_i(t) = u₀_i exp(-λ_i t + μ_i ω_i(t))`, the solution for the identity profile.
pub fn exponential_oracle(problem: &MildProblem) -> Result<HilbertPath> {
    if problem.g.profile() != Profile::Identity || problem.drift.is_some() {
        return domain("the exponential oracle needs the identity profile and no drift");
    }
    let modes = (0..problem.n_modes())
        .map(|i| {
            let l = problem.op.lambdas()[i];
            let mu = problem.g.mus()[i];
            let w = problem.driver().mode(i);
            let w0 = w.values()[0];
            let x = problem.u0[i];
            ScalarPath::new(
                0.0,
                problem.dt(),
                (0..w.len())
                    .map(|k| x * (-l * w.time(k) + mu * (w.values()[k] - w0)).exp())
                    .collect(),
            )
        })
        .collect::<Result<_>>()?;
    HilbertPath::new(modes)
}

/// `u₀_i e^{-λ_i t} + μ_i ∫_0^t e^{-λ_i(t-r)} dω_i(r)` for the constant profile, the
/// integral as a left-point sum on `fine`, whose step divides the problem step by `factor`.
pub fn variation_of_constants_oracle(problem: &MildProblem, fine: &HilbertPath, factor: usize) -> Result<HilbertPath> {
    if problem.g.profile() != Profile::Constant || problem.drift.is_some() {
        return domain("the variation-of-constants oracle needs the constant profile and no drift");
    }
    if fine.n_modes() != problem.n_modes() || factor == 0 {
        return domain("fine driver has the wrong number of modes");
    }
    let hf = problem.dt() / factor as f64;
    if ((fine.dt() - hf) / hf).abs() > 1e-9 {
        return domain(format!("fine step {} does not equal {hf}", fine.dt()));
    }
    let z = fine.node_of(0.0)?;
    let n = problem.steps();
    if z + n * factor >= fine.len() {
        return domain("fine driver does not cover the horizon");
    }
    let modes = (0..problem.n_modes())
        .map(|i| {
            let l = problem.op.lambdas()[i];
            let mu = problem.g.mus()[i];
            let w = fine.mode(i).values();
            let damp = (-l * hf).exp();
            let mut acc = 0.0;
            let mut out = vec![0.0; n + 1];
            for j in 0..n * factor {
                acc = damp * (acc + (w[z + j + 1] - w[z + j]));
                if (j + 1) % factor == 0 {
                    out[(j + 1) / factor] = acc;
                }
            }
            let v = (0..=n)
                .map(|k| problem.u0[i] * (-l * k as f64 * problem.dt()).exp() + mu * out[k])
                .collect();
            ScalarPath::new(0.0, problem.dt(), v)
        })
        .collect::<Result<_>>()?;
    HilbertPath::new(modes)
}

/// `max_k |a_k - b_k| / max_k |b_k|` over nodes, Euclidean in the modes.
pub fn relative_sup_error(a: &HilbertPath, b: &HilbertPath) -> Result<f64> {
    let w = Window::full(b)?;
    let num = holder::sup_norm(&a.sub(b)?, w)?;
    let den = holder::sup_norm(b, w)?;
    Ok(if den == 0.0 { num } else { num / den })
}

/// Instances used by the acceptance suite, the command line, and the benches.
pub mod instances {
    use super::*;

    /// Finest grid from which coarser drivers are subsampled.
    pub const FINE_STEPS: usize = 4096;

    pub fn default_params() -> HolderParams {
        HolderParams::new(0.55, 0.7, 0.4, 0.0).expect("admissible")
    }

    /// Scalar fBm on `[0, T]` with `FINE_STEPS` steps, subsampled to `steps`.
    pub fn scalar_driver(hurst: f64, horizon: f64, steps: usize, seed: u64) -> Result<HilbertPath> {
        driver(hurst, horizon, steps, seed, &TraceWeights::new(vec![1.0])?)
    }

    /// V-valued fBm on `[0, T]` with `FINE_STEPS.max(steps)` steps, subsampled to `steps`.
    pub fn driver(hurst: f64, horizon: f64, steps: usize, seed: u64, q: &TraceWeights) -> Result<HilbertPath> {
        let fine = FINE_STEPS.max(steps);
        if fine % steps != 0 {
            return domain(format!("steps {steps} must divide {fine}"));
        }
        let cfg = FbmConfig::new(hurst, horizon, fine, seed)?;
        sample_fbm_hilbert(&cfg, q)?.coarsen(fine / steps)
    }

    /// `du = -λu dt + σu dω`, `u₀ = 1` on `[0, 1]`.
    pub fn scalar_linear(lambda: f64, sigma: f64, hurst: f64, steps: usize, seed: u64) -> Result<MildProblem> {
        MildProblem::new(
            SpectralOperator::new(vec![lambda])?,
            DiagonalNemytskii::scalar(sigma, Profile::Identity)?,
            &scalar_driver(hurst, 1.0, steps, seed)?,
            vec![1.0],
            default_params(),
            1.0,
        )
    }

    /// `du = -λu dt + σ dω`, `u₀ = 1` on `[0, 1]`, on a driver given by the caller.
    pub fn scalar_additive(lambda: f64, sigma: f64, omega: &HilbertPath) -> Result<MildProblem> {
        MildProblem::new(
            SpectralOperator::new(vec![lambda])?,
            DiagonalNemytskii::scalar(sigma, Profile::Constant)?,
            omega,
            vec![1.0],
            default_params(),
            1.0,
        )
    }

    /// Dirichlet Laplacian with `n` modes, `μ_i = i^{-1}`, `q_i = i^{-2}`, `u₀ = coef · i^{-decay}`.
    pub fn multimode(
        n_modes: usize,
        profile: Profile,
        u0_decay: f64,
        steps: usize,
        seed: u64,
    ) -> Result<MildProblem> {
        let omega = driver(0.75, 1.0, steps, seed, &TraceWeights::default_for(n_modes))?;
        MildProblem::new(
            SpectralOperator::dirichlet_laplacian(n_modes)?,
            DiagonalNemytskii::power_law(n_modes, 1.0, profile)?,
            &omega,
            (1..=n_modes).map(|i| (i as f64).powf(-u0_decay)).collect(),
            default_params(),
            1.0,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::instances::*;
    use super::*;

    #[test]
    fn initial_constant_bounds_semigroup_norm() {
        let p = multimode(4, Profile::Tanh, 1.0, 256, 3).unwrap();
        let s = p.semigroup_path();
        let m = holder::modified_norm(&s, 0.55, p.window()).unwrap();
        assert!(m <= initial_constant(0.55) * euclid(&p.u0));
    }

    #[test]
    fn equal_iterates_have_zero_ratio() {
        let p = scalar_linear(1.0, 0.5, 0.75, 128, 1).unwrap();
        let c = Certifier::new(&p).unwrap();
        let u = random_iterate(&p, 0.3, 9).unwrap();
        assert_eq!(c.contraction_ratio(&u, &u, 10.0, 1.0).unwrap(), 0.0);
        assert_eq!(c.contraction_observed(&u, &u, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn oracles_reject_wrong_profile() {
        let p = scalar_linear(1.0, 0.5, 0.75, 128, 1).unwrap();
        assert!(variation_of_constants_oracle(&p, p.driver(), 1).is_err());
        let q = multimode(2, Profile::Tanh, 1.0, 128, 1).unwrap();
        assert!(exponential_oracle(&q).is_err());
    }

    #[test]
    fn exponential_oracle_at_zero_is_u0() {
        let p = scalar_linear(1.0, 0.5, 0.75, 128, 1).unwrap();
        let o = exponential_oracle(&p).unwrap();
        assert_eq!(o.at(0), vec![1.0]);
    }

    #[test]
    fn trivial_cocycle_cases() {
        let p = multimode(3, Profile::Tanh, 1.0, 128, 2).unwrap();
        assert!(cocycle_defect(&p, 0.0, 0.5).unwrap() <= 1e-8);
        assert!(cocycle_defect(&p, 0.5, 0.0).unwrap() <= 1e-8);
        assert!(cocycle_defect(&p, 0.75, 0.5).is_err());
    }

    #[test]
    fn variation_of_constants_matches_solver_on_same_grid() {
        let omega = scalar_driver(0.75, 1.0, 256, 4).unwrap();
        let p = scalar_additive(1.0, 0.5, &omega).unwrap();
        let o = variation_of_constants_oracle(&p, p.driver(), 1).unwrap();
        let u = solve_mild(&p).unwrap().0;
        assert!(relative_sup_error(&u, &o).unwrap() < 0.05);
    }
}
