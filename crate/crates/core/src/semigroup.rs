//! Spectral analytic semigroup `S(t) = e^{tA}` on the eigenbasis of `-A`,
//! fractional power norms, and exact operator norms for the smoothing estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::par;
use crate::stats;

/// Default number of modes.
pub const DEFAULT_MODES: usize = 64;

/// Eigenvalues `λ_i` of `-A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    lambdas: Vec<f64>,
}

impl SpectralOperator {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return domain("spectral operator needs at least one eigenvalue");
        }
        if !(lambdas[0] >= 0.0) || lambdas.iter().any(|l| !l.is_finite()) {
            return domain(format!("eigenvalues must be finite and nonnegative, got λ_1={}", lambdas[0]));
        }
        if lambdas.windows(2).any(|w| w[1] < w[0]) {
            return domain("eigenvalues must be nondecreasing");
        }
        Ok(Self { lambdas })
    }

    /// `λ_i = i²`, the Dirichlet Laplacian on `(0, π)`.
    pub fn dirichlet_laplacian(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| (i * i) as f64).collect())
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambda1(&self) -> f64 {
        self.lambdas[0]
    }

    fn require_positive(&self) -> Result<()> {
        if self.lambda1() > 0.0 {
            Ok(())
        } else {
            domain("estimate needs λ_1 > 0")
        }
    }
}

impl Default for SpectralOperator {
    fn default() -> Self {
        Self::dirichlet_laplacian(DEFAULT_MODES).expect("positive spectrum")
    }
}

/// Coefficient vector tagged with the smoothness index of its space `V_δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VdeltaVector {
    pub coeffs: Vec<f64>,
    pub delta: f64,
}

impl VdeltaVector {
    pub fn new(coeffs: Vec<f64>, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return domain(format!("delta must be nonnegative, got {delta}"));
        }
        Ok(Self { coeffs, delta })
    }

    pub fn norm(&self, op: &SpectralOperator) -> Result<f64> {
        vdelta_norm(&self.coeffs, self.delta, op)
    }
}

fn check_len(v: &[f64], op: &SpectralOperator) -> Result<()> {
    if v.len() != op.n_modes() {
        return domain(format!(
            "vector has {} coefficients but the operator has {} modes",
            v.len(),
            op.n_modes()
        ));
    }
    Ok(())
}

/// `S(t) v`.
pub fn apply_semigroup(op: &SpectralOperator, t: f64, v: &[f64]) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return domain(format!("semigroup time must be nonnegative, got {t}"));
    }
    check_len(v, op)?;
    Ok(v.iter()
        .zip(&op.lambdas)
        .map(|(x, l)| (-l * t).exp() * x)
        .collect())
}

/// `(Σ λ_i^{2δ} v_i²)^{1/2}`.
pub fn vdelta_norm(v: &[f64], delta: f64, op: &SpectralOperator) -> Result<f64> {
    check_len(v, op)?;
    if delta == 0.0 {
        return Ok(v.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    Ok(v.iter()
        .zip(&op.lambdas)
        .map(|(x, l)| l.powf(2.0 * delta) * x * x)
        .sum::<f64>()
        .sqrt())
}

/// One sample of an estimate check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub t: f64,
    pub exact_norm: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Exact operator norms against a reference bound; `constant` is the largest ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub name: &'static str,
    pub rows: Vec<EstimateRow>,
    pub constant: f64,
    /// Largest ratio allowed for the check to pass.
    pub allowed: f64,
}

impl EstimateReport {
    fn from_rows(name: &'static str, rows: Vec<EstimateRow>, allowed: f64) -> Self {
        let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        Self {
            name,
            rows,
            constant,
            allowed,
        }
    }

    pub fn passed(&self) -> bool {
        self.constant.is_finite() && self.constant <= self.allowed
    }

    /// Slope of `log exact_norm` against `t`.
    pub fn log_decay_rate(&self) -> f64 {
        let t: Vec<f64> = self.rows.iter().map(|r| r.t).collect();
        let y: Vec<f64> = self.rows.iter().map(|r| r.exact_norm.ln()).collect();
        stats::slope(&t, &y)
    }

    /// Slope of `log exact_norm` against `log t`.
    pub fn loglog_exponent(&self) -> f64 {
        let t: Vec<f64> = self.rows.iter().map(|r| r.t).collect();
        let y: Vec<f64> = self.rows.iter().map(|r| r.exact_norm).collect();
        stats::loglog_slope(&t, &y)
    }

    pub const CSV_HEADER: &'static str = "t,exact_norm,bound,ratio";

    pub fn write_csv<W: std::io::Write>(&self, w: &mut W, sep: char) -> std::io::Result<()> {
        writeln!(w, "t{sep}exact_norm{sep}bound{sep}ratio")?;
        for r in &self.rows {
            writeln!(w, "{}", crate::io::join_row(&[r.t, r.exact_norm, r.bound, r.ratio], sep))?;
        }
        Ok(())
    }
}

fn ratio(norm: f64, bound: f64) -> f64 {
    if norm == 0.0 {
        0.0
    } else {
        norm / bound
    }
}

/// Continuum envelope `sup_{x>0} x^γ e^{-xt} = (γ/(et))^γ`.
pub fn smoothing_envelope(gamma: f64, t: f64) -> f64 {
    (gamma / (std::f64::consts::E * t)).powf(gamma)
}

/// Exact `|(-A)^γ S(t)|_{L(V)} = sup_i λ_i^γ e^{-λ_i t}`.
pub fn smoothing_norm(op: &SpectralOperator, gamma: f64, t: f64) -> f64 {
    op.lambdas
        .iter()
        .map(|l| l.powf(gamma) * (-l * t).exp())
        .fold(0.0, f64::max)
}

/// Smoothing estimate against `(γ/e)^γ t^{-γ} e^{-λ_1 t/2}`.
///
/// With decay rate `λ_1/2` the exact constant is at most `2^γ`, which is the
/// pass threshold. Rows never exceed the continuum envelope [`smoothing_envelope`].
pub fn smoothing_estimate_check(op: &SpectralOperator, gamma: f64, t_samples: &[f64]) -> Result<EstimateReport> {
    op.require_positive()?;
    if !(gamma > 0.0) {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    if t_samples.iter().any(|t| !(*t > 0.0)) {
        return domain("time samples must be positive");
    }
    let lam = op.lambda1() / 2.0;
    let rows = par::map_slice(t_samples, |&t| {
        let exact = smoothing_norm(op, gamma, t);
        let bound = (gamma / std::f64::consts::E).powf(gamma) * t.powf(-gamma) * (-lam * t).exp();
        EstimateRow {
            t,
            exact_norm: exact,
            bound,
            ratio: ratio(exact, bound),
        }
    });
    Ok(EstimateReport::from_rows("smoothing", rows, 2f64.powf(gamma)))
}

/// Exact `|S(t) - id|_{L(V_{σ+μ}, V_{θ+μ})} = sup_i λ_i^{θ-σ}(1 - e^{-λ_i t})` against `t^{σ-θ}`.
pub fn hoelder_estimate_check(
    op: &SpectralOperator,
    sigma: f64,
    theta: f64,
    mu: f64,
    t_samples: &[f64],
) -> Result<EstimateReport> {
    op.require_positive()?;
    if !(theta >= 0.0 && sigma >= theta && sigma <= 1.0 + theta) {
        return domain(format!(
            "need theta >= 0 and theta <= sigma <= 1 + theta, got sigma={sigma}, theta={theta}"
        ));
    }
    if !(mu >= 0.0) || t_samples.iter().any(|t| !(*t > 0.0)) {
        return domain("need mu >= 0 and positive time samples");
    }
    let s = sigma - theta;
    let rows = par::map_slice(t_samples, |&t| {
        let exact = op
            .lambdas
            .iter()
            .map(|l| l.powf(-s) * (-(l * t)).exp_m1().abs())
            .fold(0.0, f64::max);
        let bound = t.powf(s);
        EstimateRow {
            t,
            exact_norm: exact,
            bound,
            ratio: ratio(exact, bound),
        }
    });
    Ok(EstimateReport::from_rows("hoelder", rows, 1.0))
}

/// Times `q ≤ r ≤ s ≤ t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadruple {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

/// `count` sorted uniform quadruples in `[0, horizon]`.
pub fn random_quadruples(count: usize, horizon: f64, seed: u64) -> Vec<Quadruple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * horizon);
            x.sort_by(f64::total_cmp);
            Quadruple {
                q: x[0],
                r: x[1],
                s: x[2],
                t: x[3],
            }
        })
        .collect()
}

/// Exact `|S(t-r) - S(s-r) - S(t-q) + S(s-q)|_{L(V)}`.
pub fn double_difference_norm(op: &SpectralOperator, x: &Quadruple) -> f64 {
    let (a, b, c) = (x.t - x.s, x.s - x.r, x.r - x.q);
    // factored form: (e^{-λa} - 1) e^{-λb} (1 - e^{-λc})
    op.lambdas
        .iter()
        .map(|l| ((-l * a).exp_m1() * (-l * b).exp() * (-l * c).exp_m1()).abs())
        .fold(0.0, f64::max)
}

/// Double-difference estimate; rows use `t - q` as the time column and the
/// bound `(t-s)^β (r-q)^γ (s-r)^{-(β+γ)}` without constant.
pub fn double_difference_check(
    op: &SpectralOperator,
    beta: f64,
    gamma: f64,
    quads: &[Quadruple],
) -> Result<EstimateReport> {
    op.require_positive()?;
    if !(beta >= 0.0 && gamma >= 0.0 && beta + gamma <= 1.0) {
        return domain(format!("need beta, gamma >= 0 and beta + gamma <= 1, got {beta}, {gamma}"));
    }
    for x in quads {
        if !(0.0 <= x.q && x.q <= x.r && x.r <= x.s && x.s <= x.t) {
            return domain(format!("quadruple out of order: {x:?}"));
        }
    }
    let rows = par::map_slice(quads, |x| {
        let exact = double_difference_norm(op, x);
        let bound = (x.t - x.s).powf(beta) * (x.r - x.q).powf(gamma) * (x.s - x.r).powf(-(beta + gamma));
        EstimateRow {
            t: x.t - x.q,
            exact_norm: exact,
            bound,
            ratio: ratio(exact, bound),
        }
    });
    // sup_y (1-e^{-y}) y^{-β} ≤ 1 and sup_y e^{-y} y^{β+γ} = ((β+γ)/e)^{β+γ}
    let p = beta + gamma;
    let allowed = if p > 0.0 { (p / std::f64::consts::E).powf(p) } else { 1.0 };
    Ok(EstimateReport::from_rows("double_difference", rows, allowed))
}
