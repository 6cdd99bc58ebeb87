//! Special functions and exact cell moments for singular kernels.

pub use statrs::function::beta::beta;
pub use statrs::function::gamma::{gamma, ln_gamma};

// 8-point Gauss-Legendre rule on [0, 1].
const GL8_X: [f64; 8] = [
    0.019855071751231856,
    0.10166676129318664,
    0.2372337950418355,
    0.4082826787521751,
    0.5917173212478249,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL8_W: [f64; 8] = [
    0.05061426814518813,
    0.11119051722668724,
    0.15685332293894363,
    0.18134189168918100,
    0.18134189168918100,
    0.15685332293894363,
    0.11119051722668724,
    0.05061426814518813,
];

/// Past this offset the integrand of [`moment`] is smooth enough for the fixed rule.
const SMOOTH_OFFSET: f64 = 8.0;

/// `∫_0^1 g(u) du` by the 8-point Gauss-Legendre rule.
pub fn gauss_legendre8(g: impl Fn(f64) -> f64) -> f64 {
    GL8_X.iter().zip(&GL8_W).map(|(&x, &w)| w * g(x)).sum()
}

/// `∫_0^1 u^k (e + u)^p du` for `k ∈ {0, 1}` and `e ≥ 0`.
/// At `e = 0` the integral needs `p + k > -1`.
pub fn moment(p: f64, e: f64, k: u32) -> f64 {
    debug_assert!(e >= 0.0 && k <= 1);
    if e >= SMOOTH_OFFSET {
        return gauss_legendre8(|u| u.powi(k as i32) * (e + u).powf(p));
    }
    match k {
        0 => moment0(p, e),
        _ => {
            if e == 0.0 {
                1.0 / (p + 2.0)
            } else {
                moment0(p + 1.0, e) - e * moment0(p, e)
            }
        }
    }
}

fn moment0(p: f64, e: f64) -> f64 {
    let q = p + 1.0;
    if e == 0.0 {
        return 1.0 / q;
    }
    let l = (1.0 / e).ln_1p();
    if q == 0.0 {
        l
    } else {
        // (e+1)^q - e^q without cancellation
        e.powf(q) * (q * l).exp_m1() / q
    }
}

/// Weights `w_d` with `∫_0^{nh} f(x) x^p dx = Σ_d w_d f(d h)` for `f` piecewise
/// linear on the grid `x_d = d h`, `d = 0..=n`.
pub fn hat_weights(p: f64, h: f64, n: usize) -> Vec<f64> {
    let scale = h.powf(p + 1.0);
    let mut w = vec![0.0; n + 1];
    for d in 0..n {
        let m0 = moment(p, d as f64, 0);
        let m1 = moment(p, d as f64, 1);
        w[d] += scale * (m0 - m1);
        w[d + 1] += scale * m1;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute(p: f64, e: f64, k: u32) -> f64 {
        // substitution u = s^m removes an endpoint singularity at e = 0
        let m = 8.0;
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            let s = (i as f64 + 0.5) / n as f64;
            let u = s.powf(m);
            acc += u.powi(k as i32) * (e + u).powf(p) * m * s.powf(m - 1.0);
        }
        acc / n as f64
    }

    #[test]
    fn moments_against_brute_force() {
        for &p in &[-1.4, -1.6, -0.6, 0.4, -1.0] {
            for &e in &[0.5, 1.0, 3.0, 7.9, 8.0, 50.0, 4000.0] {
                for k in 0..2 {
                    assert_relative_eq!(moment(p, e, k), brute(p, e, k), max_relative = 1e-9);
                }
            }
        }
        assert_relative_eq!(moment(-0.4, 0.0, 0), 1.0 / 0.6, max_relative = 1e-15);
        assert_relative_eq!(moment(-1.4, 0.0, 1), 1.0 / 0.6, max_relative = 1e-15);
    }

    #[test]
    fn hat_weights_integrate_linear_exactly() {
        let (p, h, n) = (-0.4, 0.01, 100);
        let w = hat_weights(p, h, n);
        let x_end = n as f64 * h;
        let int0: f64 = w.iter().sum();
        let int1: f64 = w.iter().enumerate().map(|(d, w)| w * d as f64 * h).sum();
        assert_relative_eq!(int0, x_end.powf(p + 1.0) / (p + 1.0), max_relative = 1e-13);
        assert_relative_eq!(int1, x_end.powf(p + 2.0) / (p + 2.0), max_relative = 1e-13);
    }

    #[test]
    fn gl8_exact_for_degree_15() {
        assert_relative_eq!(gauss_legendre8(|u| u.powi(15)), 1.0 / 16.0, max_relative = 1e-14);
    }
}
