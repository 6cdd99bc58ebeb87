use proptest::prelude::*;

use pathwise::fbm::{sample_fbm_1d, sample_fbm_hilbert, wiener_shift};
use pathwise::fraccalc::zahle_integral_scalar;
use pathwise::holder::{holder_seminorm, sup_norm};
use pathwise::semigroup::{apply_semigroup, smoothing_envelope, smoothing_norm, vdelta_norm, SpectralOperator};
use pathwise::solver::{KFunction, KParams};
use pathwise::{FbmConfig, ScalarPath, TraceWeights, Window};

fn path(values: Vec<f64>) -> ScalarPath {
    let n = values.len() - 1;
    ScalarPath::new(0.0, 1.0 / n as f64, values).unwrap()
}

fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    len.prop_flat_map(|n| prop::collection::vec(-5.0..5.0f64, n))
}

fn pair(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0..5.0f64, n),
            prop::collection::vec(-5.0..5.0f64, n),
        )
    })
}

fn trapezoid(z: &[f64], w: &[f64]) -> f64 {
    (0..z.len() - 1).map(|k| 0.5 * (z[k] + z[k + 1]) * (w[k + 1] - w[k])).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seminorm_is_homogeneous(v in values(3..40), c in -10.0..10.0f64, beta in 0.05..0.95f64) {
        let p = path(v);
        let w = Window::full(&p).unwrap();
        let a = holder_seminorm(&p.map(|x| c * x), beta, w).unwrap();
        let b = c.abs() * holder_seminorm(&p, beta, w).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn seminorm_triangle_inequality((x, y) in pair(3..40), beta in 0.05..0.95f64) {
        let (p, q) = (path(x), path(y));
        let w = Window::full(&p).unwrap();
        let s = holder_seminorm(&p.combine(1.0, &q, 1.0).unwrap(), beta, w).unwrap();
        let bound = holder_seminorm(&p, beta, w).unwrap() + holder_seminorm(&q, beta, w).unwrap();
        prop_assert!(s <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn seminorm_ignores_constants(v in values(3..40), c in -10.0..10.0f64, beta in 0.05..0.95f64) {
        let p = path(v);
        let w = Window::full(&p).unwrap();
        let a = holder_seminorm(&p.map(|x| x + c), beta, w).unwrap();
        let b = holder_seminorm(&p, beta, w).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
        prop_assert!(sup_norm(&p, w).unwrap() >= 0.0);
    }

    #[test]
    fn integral_reproduces_trapezoid((z, w) in pair(3..200), alpha in 0.05..0.95f64) {
        let (zp, wp) = (path(z.clone()), path(w.clone()));
        let v = zahle_integral_scalar(&zp, &wp, alpha, Window::full(&zp).unwrap()).unwrap();
        let t = trapezoid(&z, &w);
        let scale: f64 = z.iter().map(|x| x.abs()).sum::<f64>() * 10.0 + 1.0;
        prop_assert!((v - t).abs() <= 1e-11 * scale, "{} vs {}", v, t);
    }

    #[test]
    fn integral_is_bilinear((z, w) in pair(3..100), (y, _) in pair(3..4), a in -3.0..3.0f64) {
        let n = z.len();
        let y: Vec<f64> = (0..n).map(|k| y[k % y.len()] + k as f64 * 0.1).collect();
        let (zp, wp, yp) = (path(z), path(w), path(y));
        let win = Window::full(&zp).unwrap();
        let i = |z: &ScalarPath, w: &ScalarPath| zahle_integral_scalar(z, w, 0.4, win).unwrap();
        let lhs = i(&zp.combine(a, &yp, 1.0).unwrap(), &wp);
        let rhs = a * i(&zp, &wp) + i(&yp, &wp);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        let lhs = i(&zp, &wp.combine(a, &yp, 1.0).unwrap());
        let rhs = a * i(&zp, &wp) + i(&zp, &yp);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn kfun_decreases_in_rho(alpha in 0.1..0.9f64, d in 0.05..1.0f64, horizon in 0.2..3.0f64, rho in 0.0..1e3f64) {
        let kf = KFunction::new(KParams::new(-alpha, alpha - 1.0, d, horizon).unwrap());
        let a = kf.eval(rho).unwrap();
        let b = kf.eval(rho * 2.0 + 1.0).unwrap();
        prop_assert!(a.is_finite() && b > 0.0 && b < a);
    }

    #[test]
    fn semigroup_is_contractive_and_smoothing(
        v in prop::collection::vec(-10.0..10.0f64, 16),
        t in 1e-4..5.0f64,
        gamma in 0.05..2.0f64,
    ) {
        let op = SpectralOperator::dirichlet_laplacian(16).unwrap();
        let s = apply_semigroup(&op, t, &v).unwrap();
        prop_assert!(vdelta_norm(&s, 0.0, &op).unwrap() <= vdelta_norm(&v, 0.0, &op).unwrap() * (1.0 + 1e-14));
        prop_assert!(smoothing_norm(&op, gamma, t) <= smoothing_envelope(gamma, t) * (1.0 + 1e-12));
        let half = apply_semigroup(&op, t / 2.0, &apply_semigroup(&op, t / 2.0, &v).unwrap()).unwrap();
        for (a, b) in half.iter().zip(&s) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fbm_is_seeded_and_anchored(hurst in 0.55..0.95f64, steps in 4usize..300, seed in any::<u64>()) {
        let cfg = FbmConfig::new(hurst, 1.0, steps, seed).unwrap();
        let a = sample_fbm_1d(&cfg).unwrap();
        let again = sample_fbm_1d(&cfg).unwrap();
        prop_assert_eq!(a.values(), again.values());
        prop_assert_eq!(a.values()[0], 0.0);
        prop_assert_eq!(a.len(), steps + 1);
        let b = sample_fbm_1d(&cfg.with_seed(seed ^ 1)).unwrap();
        prop_assert_ne!(a.values(), b.values());
    }

    #[test]
    fn wiener_shift_keeps_increments(steps in 8usize..200, k in 1usize..8, seed in any::<u64>()) {
        let cfg = FbmConfig::new(0.7, 1.0, steps, seed).unwrap();
        let h = sample_fbm_hilbert(&cfg, &TraceWeights::default_for(2)).unwrap();
        let tau = k as f64 / steps as f64;
        let s = wiener_shift(&h, tau).unwrap();
        for (m, sm) in h.modes().iter().zip(s.modes()) {
            let (v, sv) = (m.values(), sm.values());
            prop_assert_eq!(sv[k], 0.0);
            for j in 0..v.len() {
                prop_assert!((sv[j] - (v[j] - v[k])).abs() <= 1e-15 * (1.0 + v[j].abs()));
            }
            prop_assert!((sm.t0() - (m.t0() - tau)).abs() <= 1e-15);
        }
    }
}
