//! The contraction modulus `K(ρ) = sup_{t∈[0,T]} t^d ∫_0^1 e^{-ρt(1-v)} v^a (1-v)^b dv`.

use crate::error::{domain, Result};
use crate::special::hat_weights;

const LEFT_CELLS: usize = 2048;
const GRADE: f64 = 1.01;
const MAX_CELL: f64 = 2e-3;
/// Beyond `c y = TAIL` the exponential factor is below `e^{-60}`.
const TAIL: f64 = 60.0;
const T_GRID: usize = 64;
const GOLDEN_ITERS: usize = 200;

/// Exponents of the modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KParams {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub horizon: f64,
}

impl KParams {
    pub fn new(a: f64, b: f64, d: f64, horizon: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0 && a + b >= -1.0 && d > 0.0 && horizon > 0.0) {
            return domain(format!(
                "K(rho) needs a > -1, b > -1, a + b >= -1, d > 0, T > 0; got a={a}, b={b}, d={d}, T={horizon}"
            ));
        }
        Ok(Self { a, b, d, horizon })
    }

    /// `a = -α`, `b = α - 1`, `d = β' - β`.
    pub fn from_holder(p: &crate::holder::HolderParams, horizon: f64) -> Result<Self> {
        Self::new(-p.alpha, p.alpha - 1.0, p.beta_prime - p.beta, horizon)
    }
}

/// Inner integral `J(c) = ∫_0^1 e^{-c(1-v)} v^a (1-v)^b dv` with reusable tables.
#[derive(Debug, Clone)]
pub struct InnerIntegral {
    a: f64,
    b: f64,
    left_w: Vec<f64>,
    // (1 - v_j) and (1 - v_j)^b on the uniform mesh of [0, 1/2]
    left_y: Vec<f64>,
    left_pow: Vec<f64>,
}

impl InnerIntegral {
    pub fn new(a: f64, b: f64) -> Self {
        let h = 0.5 / LEFT_CELLS as f64;
        let left_y: Vec<f64> = (0..=LEFT_CELLS).map(|j| 1.0 - j as f64 * h).collect();
        Self {
            a,
            b,
            left_w: hat_weights(a, h, LEFT_CELLS),
            left_pow: left_y.iter().map(|y| y.powf(b)).collect(),
            left_y,
        }
    }

    pub fn eval(&self, c: f64) -> f64 {
        // v in [0, 1/2]: exact v^a moments against (1-v)^b e^{-c(1-v)}
        let mut left = 0.0;
        for j in 0..=LEFT_CELLS {
            left += self.left_w[j] * self.left_pow[j] * (-c * self.left_y[j]).exp();
        }
        left + self.right(c)
    }

    // y = 1 - v in [0, 1/2]: exact y^b moments against (1-y)^a e^{-c y}
    fn right(&self, c: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let y_end = if c > 0.0 { (TAIL / c).min(0.5) } else { 0.5 };
        let y_min = (1e-4 / c.max(1.0)).min(y_end / 2.0);
        let f = |y: f64| (1.0 - y).powf(a) * (-c * y).exp();
        let b1 = b + 1.0;
        let b2 = b + 2.0;
        // first cell [0, y_min]: moments from the origin are exact
        let mut y0 = y_min;
        let mut f0 = f(y0);
        let fz = f(0.0);
        let m0 = y0.powf(b1) / b1;
        let m1 = y0.powf(b2) / b2;
        let mut acc = fz * m0 + (f0 - fz) * m1 / y0;
        let mut p1 = y0.powf(b1);
        let mut p2 = y0.powf(b2);
        while y0 < y_end {
            let y1 = (y0 * GRADE).min(y0 + MAX_CELL).min(y_end);
            let f1 = f(y1);
            let q1 = y1.powf(b1);
            let q2 = y1.powf(b2);
            let m0 = (q1 - p1) / b1;
            let m1 = (q2 - p2) / b2;
            acc += f0 * m0 + (f1 - f0) * (m1 - y0 * m0) / (y1 - y0);
            y0 = y1;
            f0 = f1;
            p1 = q1;
            p2 = q2;
        }
        acc
    }
}

/// Evaluates `K(ρ)` for fixed exponents.
#[derive(Debug, Clone)]
pub struct KFunction {
    params: KParams,
    inner: InnerIntegral,
}

impl KFunction {
    pub fn new(params: KParams) -> Self {
        Self {
            inner: InnerIntegral::new(params.a, params.b),
            params,
        }
    }

    pub fn params(&self) -> KParams {
        self.params
    }

    fn objective(&self, rho: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        t.powf(self.params.d) * self.inner.eval(rho * t)
    }

    /// `K(ρ)` and the maximizing `t`.
    pub fn eval_with_argmax(&self, rho: f64) -> Result<(f64, f64)> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return domain(format!("rho must be finite and nonnegative, got {rho}"));
        }
        let t_end = self.params.horizon;
        // 64 uniform points plus 64 logarithmic points reaching the 1/ρ scale
        let mut ts: Vec<f64> = (1..=T_GRID).map(|i| t_end * i as f64 / T_GRID as f64).collect();
        let t_lo = t_end * (1e-3 / (rho * t_end).max(1.0)).min(1.0 / T_GRID as f64);
        let span = (t_end / t_lo).ln();
        ts.extend((0..T_GRID).map(|i| t_lo * (span * i as f64 / T_GRID as f64).exp()));
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let vals: Vec<f64> = ts.iter().map(|&t| self.objective(rho, t)).collect();
        let (i, _) = vals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let lo = if i == 0 { 0.0 } else { ts[i - 1] };
        let hi = if i + 1 < ts.len() { ts[i + 1] } else { ts[i] };
        let (t_star, k) = golden_max(|t| self.objective(rho, t), lo, hi);
        if k >= vals[i] {
            Ok((k, t_star))
        } else {
            Ok((vals[i], ts[i]))
        }
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        Ok(self.eval_with_argmax(rho)?.0)
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `K(ρ)` for the given exponents.
pub fn kfun(rho: f64, a: f64, b: f64, d: f64, horizon: f64) -> Result<f64> {
    KFunction::new(KParams::new(a, b, d, horizon)?).eval(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta;
    use approx::assert_relative_eq;

    #[test]
    fn rho_zero_is_beta() {
        let k = kfun(0.0, -0.4, -0.6, 0.05, 1.0).unwrap();
        assert_relative_eq!(k, std::f64::consts::PI / (0.4 * std::f64::consts::PI).sin(), max_relative = 1e-6);
        assert_relative_eq!(k, 3.303265999194124, max_relative = 1e-6);
        let k = kfun(0.0, -0.3, 0.2, 0.5, 2.0).unwrap();
        assert_relative_eq!(k, 2f64.powf(0.5) * beta(0.7, 1.2), max_relative = 1e-6);
    }

    #[test]
    fn parameter_validation() {
        assert!(kfun(1.0, -1.0, 0.0, 0.1, 1.0).is_err());
        assert!(kfun(1.0, -0.6, -0.6, 0.1, 1.0).is_err());
        assert!(kfun(1.0, -0.4, -0.6, 0.0, 1.0).is_err());
        assert!(kfun(-1.0, -0.4, -0.6, 0.1, 1.0).is_err());
    }

    #[test]
    fn huge_rho_is_finite_and_small() {
        let k = kfun(2f64.powi(60), -0.4, -0.6, 0.15, 1.0).unwrap();
        assert!(k > 0.0 && k < 1e-2);
    }
}
