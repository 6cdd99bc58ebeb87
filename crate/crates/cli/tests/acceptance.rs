//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run with `cargo test -p pathwise-cli --test acceptance`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pathwise::coefficients::{lemma4_certify, DiagonalNemytskii, Profile};
use pathwise::fbm::{sample_fbm_hilbert, CholeskySampler, CirculantSampler};
use pathwise::fraccalc::{additivity_defect, shift_covariance_defect, zahle_integral_scalar, OperatorPath};
use pathwise::semigroup::{
    double_difference_check, hoelder_estimate_check, random_quadruples, smoothing_norm, SpectralOperator,
};
use pathwise::solver::certify::instances::{driver, multimode, scalar_additive, scalar_linear};
use pathwise::solver::certify::{
    cocycle_defect, exponential_oracle, regularity_report, relative_sup_error, uniqueness_gap,
    variation_of_constants_oracle, Certifier,
};
use pathwise::solver::kfun::{KFunction, KParams};
use pathwise::solver::solve_mild;
use pathwise::stats::{fitted_order, median, strictly_decreasing};
use pathwise::{FbmConfig, ScalarPath, TraceWeights, Window};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, secs: f64) -> bool {
    elapsed.as_secs_f64() < secs
}

fn fbm_cov(t: f64, s: f64, h: f64) -> f64 {
    0.5 * (t.powf(2.0 * h) + s.powf(2.0 * h) - (t - s).abs().powf(2.0 * h))
}

// 1
fn fbm_law() -> Outcome {
    let start = Instant::now();
    let (n, m) = (64usize, 10_000u64);
    let mut worst_formula: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for h in [0.6, 0.75, 0.9] {
        let cfg = FbmConfig::new(h, 1.0, n, 0).unwrap();
        let ce = CirculantSampler::new(&cfg).unwrap();
        let ch = CholeskySampler::new(&cfg).unwrap();
        let mut ca = vec![0.0; (n + 1) * (n + 1)];
        let mut cb = vec![0.0; (n + 1) * (n + 1)];
        for s in 0..m {
            let a = ce.sample(s);
            let b = ch.sample(1_000_000 + s);
            let (a, b) = (a.values(), b.values());
            for i in 1..=n {
                for j in 1..=i {
                    ca[i * (n + 1) + j] += a[i] * a[j];
                    cb[i * (n + 1) + j] += b[i] * b[j];
                }
            }
        }
        for i in 1..=n {
            for j in 1..=i {
                let (t, s) = (i as f64 / n as f64, j as f64 / n as f64);
                let c = fbm_cov(t, s, h);
                // Gaussian: Var(X_t X_s) = C_tt C_ss + C_ts²
                let se = ((fbm_cov(t, t, h) * fbm_cov(s, s, h) + c * c) / m as f64).sqrt();
                let ea = ca[i * (n + 1) + j] / m as f64;
                let eb = cb[i * (n + 1) + j] / m as f64;
                worst_formula = worst_formula.max((ea - c).abs() / se);
                worst_oracle = worst_oracle.max((ea - eb).abs() / (se * 2f64.sqrt()));
            }
        }
    }
    let el = start.elapsed();
    outcome(
        worst_formula <= 3.0 && worst_oracle <= 3.0 && within(el, 30.0),
        format!(
            "max |z| vs formula {worst_formula:.2}, vs Cholesky {worst_oracle:.2} (limit 3); {:.1}s (limit 30s)",
            el.as_secs_f64()
        ),
    )
}

type Smooth = (&'static str, fn(f64) -> f64, fn(f64) -> f64);

fn smooth_corpus() -> Vec<Smooth> {
    vec![
        ("sin/cos", |t| (3.0 * t).sin(), |t| (2.0 * t).cos() + t * t),
        ("exp/cubic", |t| (-t).exp(), |t| t * t * t - t),
        ("poly/sqrt", |t| 1.0 + t * t, |t| (1.0 + t).sqrt()),
        ("log/sin", |t| (2.0 + t).ln(), |t| (5.0 * t).sin()),
    ]
}

fn grid(f: fn(f64) -> f64, n: usize) -> ScalarPath {
    ScalarPath::from_fn(0.0, 1.0 / n as f64, n, f).unwrap()
}

// left-point Riemann–Stieltjes sum on a fine grid
fn rs_fine(z: fn(f64) -> f64, zeta: fn(f64) -> f64) -> f64 {
    let n = 1usize << 22;
    let h = 1.0 / n as f64;
    (0..n).map(|k| z(k as f64 * h) * (zeta((k + 1) as f64 * h) - zeta(k as f64 * h))).sum()
}

fn fbm(h: f64, n: usize, seed: u64) -> ScalarPath {
    CirculantSampler::new(&FbmConfig::new(h, 1.0, n, seed).unwrap()).unwrap().sample(seed)
}

// 2
fn integral_correctness() -> Outcome {
    let start = Instant::now();
    let n = 1usize << 12;
    let mut smooth: f64 = 0.0;
    for (_, z, zeta) in smooth_corpus() {
        let (zp, wp) = (grid(z, n), grid(zeta, n));
        let v = zahle_integral_scalar(&zp, &wp, 0.4, Window::full(&zp).unwrap()).unwrap();
        let r = rs_fine(z, zeta);
        smooth = smooth.max((v - r).abs() / r.abs());
    }
    let mut unit: f64 = 0.0;
    let mut chain: f64 = 0.0;
    for seed in 0..5 {
        let om = fbm(0.75, n, seed);
        let w = Window::full(&om).unwrap();
        let v = om.values();
        let one = om.map(|_| 1.0);
        unit = unit.max((zahle_integral_scalar(&one, &om, 0.4, w).unwrap() - (v[n] - v[0])).abs());
        let c = zahle_integral_scalar(&om, &om, 0.4, w).unwrap();
        let exact = 0.5 * v[n] * v[n];
        chain = chain.max((c - exact).abs() / exact.abs());
    }
    let el = start.elapsed();
    outcome(
        smooth <= 1e-4 && unit <= 1e-3 && chain <= 1e-2 && within(el, 60.0),
        format!(
            "smooth vs RS rel {smooth:.2e} (1e-4); unit integrand {unit:.2e} (1e-3); chain rule rel {chain:.2e} (1e-2); {:.1}s",
            el.as_secs_f64()
        ),
    )
}

// 3
fn alpha_independence() -> Outcome {
    let n = 1usize << 12;
    let (a1, a2) = (0.35, 0.6);
    let rel = |z: &ScalarPath, w: &ScalarPath| {
        let win = Window::full(z).unwrap();
        let x = zahle_integral_scalar(z, w, a1, win).unwrap();
        let y = zahle_integral_scalar(z, w, a2, win).unwrap();
        (x - y).abs() / x.abs().max(y.abs())
    };
    let mut worst: f64 = 0.0;
    for (_, z, zeta) in smooth_corpus() {
        worst = worst.max(rel(&grid(z, n), &grid(zeta, n)));
    }
    for seed in 0..3 {
        let om = fbm(0.75, n, seed);
        let other = fbm(0.75, n, 100 + seed);
        worst = worst.max(rel(&om, &om));
        worst = worst.max(rel(&om.map(f64::sin), &om));
        worst = worst.max(rel(&other.map(f64::cos), &om));
    }
    outcome(worst <= 1e-3, format!("alpha {a1} vs {a2}: max rel diff {worst:.2e} (1e-3)"))
}

// 4
fn additivity_and_shift() -> Outcome {
    let mut smooth: f64 = 0.0;
    for (_, z, zeta) in smooth_corpus() {
        let (zp, wp) = (grid(z, 1024), grid(zeta, 1024));
        for t2 in [0.25, 0.5, 0.75] {
            smooth = smooth.max(additivity_defect(&zp, &wp, 0.4, 0.0, t2, 1.0).unwrap());
        }
    }
    // defects under refinement; rounding-level defects are reported as converged
    const FLOOR: f64 = 1e-8;
    let ns = [512usize, 1024, 2048, 4096];
    let mut refine_ok = true;
    let mut notes = Vec::new();
    for seed in 0..3 {
        let fine = fbm(0.75, 4096, seed);
        let d: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let om = fine.coarsen(4096 / n).unwrap();
                additivity_defect(&om.map(f64::sin), &om, 0.4, 0.0, 0.5, 1.0).unwrap()
            })
            .collect();
        let floor = d.iter().all(|x| *x <= FLOOR);
        let rate = strictly_decreasing(&d) && fitted_order(&ns, &d) >= 0.5;
        refine_ok &= floor || rate;
        notes.push(format!("{:.1e}", d.iter().cloned().fold(0.0, f64::max)));
    }
    let h = sample_fbm_hilbert(
        &FbmConfig::new(0.75, 1.0, 1024, 4).unwrap(),
        &TraceWeights::default_for(3),
    )
    .unwrap();
    let z = OperatorPath::diagonal(h.modes().iter().map(|m| m.map(|x| x.tanh() + 0.5)).collect()).unwrap();
    let shift = [0.125, 0.25, 0.5]
        .iter()
        .map(|&tau| shift_covariance_defect(&z, &h, tau, 0.4, 0.0, 1.0).unwrap())
        .fold(0.0, f64::max);
    outcome(
        smooth <= 1e-4 && refine_ok && shift <= 1e-10,
        format!(
            "smooth defect {smooth:.2e} (1e-4); fBm defects max per seed [{}] (rounding floor {FLOOR:e} or order >= 0.5); shift {shift:.2e} (1e-10)",
            notes.join(", ")
        ),
    )
}

// 5
fn kfun_criterion() -> Outcome {
    let start = Instant::now();
    let (a, b, d, t) = (-0.4, -0.6, 0.5, 1.0);
    let kf = KFunction::new(KParams::new(a, b, d, t).unwrap());
    let rhos = [0.0, 1.0, 10.0, 1e2, 1e3, 1e4];
    let k: Vec<f64> = rhos.iter().map(|&r| kf.eval(r).unwrap()).collect();
    // B(0.6, 0.4) = Γ(0.6)Γ(0.4) = π / sin(0.4π)
    let exact = t.powf(d) * PI / (0.4 * PI).sin();
    let rel0 = (k[0] - exact).abs() / exact;
    let slope = -fitted_order(&[100, 1000, 10000], &k[3..]);
    let el = start.elapsed();
    outcome(
        rel0 <= 1e-6 && strictly_decreasing(&k) && (slope + (b + 1.0)).abs() <= 0.1 && within(el, 5.0),
        format!(
            "a={a}, b={b}, d={d}: K(0) rel {rel0:.2e} (1e-6); decreasing {}; slope {slope:.3} vs {:.1} ± 0.1; {:.2}s",
            strictly_decreasing(&k),
            -(b + 1.0),
            el.as_secs_f64()
        ),
    )
}

// 6
fn solver_closed_form() -> Outcome {
    let start = Instant::now();
    let ns = [512usize, 1024, 2048, 4096];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let p = scalar_linear(1.0, 0.5, 0.75, n, 1).unwrap();
            relative_sup_error(&solve_mild(&p).unwrap().0, &exponential_oracle(&p).unwrap()).unwrap()
        })
        .collect();
    let linear_time = start.elapsed();
    let order = fitted_order(&ns, &errs);
    let t2 = Instant::now();
    let fine = driver(0.75, 1.0, 4096 * 16, 1, &TraceWeights::new(vec![1.0]).unwrap()).unwrap();
    let p = scalar_additive(1.0, 0.5, &fine.coarsen(16).unwrap()).unwrap();
    let voc = variation_of_constants_oracle(&p, &fine, 16).unwrap();
    let add = relative_sup_error(&solve_mild(&p).unwrap().0, &voc).unwrap();
    let add_time = t2.elapsed();
    outcome(
        errs[3] <= 2e-2
            && strictly_decreasing(&errs)
            && order >= 0.5
            && add <= 1e-2
            && within(linear_time, 120.0)
            && within(add_time, 120.0),
        format!(
            "linear errors {:?} order {order:.2} (>= 0.5, last <= 2e-2); additive vs oracle {add:.2e} (1e-2); {:.1}s + {:.1}s",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            linear_time.as_secs_f64(),
            add_time.as_secs_f64()
        ),
    )
}

// 7
fn contraction() -> Outcome {
    let p = multimode(4, Profile::Tanh, 1.0, 512, 5).unwrap();
    let c = Certifier::new(&p).unwrap();
    // calibration and held-out pairs come from disjoint seeds
    let cal = c.calibrate(10, 1001).unwrap();
    let rep = c.contraction_suite(cal.c_t, 20, 2002).unwrap();
    let mut q = p.clone();
    q.c_t = Some(cal.c_t);
    let (_, diag) = solve_mild(&q).unwrap();
    let slope = diag.log_distance_slope();
    let gap = uniqueness_gap(&q).unwrap();
    outcome(
        slope <= 0.9f64.ln() && rep.passed() && rep.ratios.len() == 20 && gap <= 10.0 * q.tol,
        format!(
            "c_T {:.3e}, rho {}: Picard slope {slope:.2} (<= {:.3}); held-out max ratio {:.3} (<= 1); init gap {gap:.1e} (<= {:.0e})",
            cal.c_t,
            rep.rho,
            0.9f64.ln(),
            rep.max_ratio(),
            10.0 * q.tol
        ),
    )
}

// 8
fn semigroup_estimates() -> Outcome {
    let start = Instant::now();
    let op = SpectralOperator::dirichlet_laplacian(128).unwrap();
    let ts: Vec<f64> = (0..400).map(|i| 10f64.powf(-5.0 + 5.5 * i as f64 / 399.0)).collect();
    let mut env_ok = true;
    for gamma in [0.1, 0.25, 0.5, 0.75, 1.0, 1.5] {
        for &t in &ts {
            let envelope = (gamma / (std::f64::consts::E * t)).powf(gamma);
            env_ok &= smoothing_norm(&op, gamma, t) <= envelope * (1.0 + 1e-12);
        }
    }
    let h = hoelder_estimate_check(&op, 1.2, 0.2, 0.0, &ts).unwrap();
    let sharp = h.constant <= 1.0 && h.constant >= 0.99;
    let consts: Vec<f64> = (0..5)
        .map(|s| {
            let q = random_quadruples(10_000, 1.0, 40 + s);
            double_difference_check(&op, 0.3, 0.4, &q).unwrap().constant
        })
        .collect();
    let med = median(&consts);
    let spread = consts.iter().map(|c| (c / med - 1.0).abs()).fold(0.0, f64::max);
    let el = start.elapsed();
    outcome(
        env_ok && sharp && consts.iter().all(|c| c.is_finite()) && spread <= 0.1 && within(el, 10.0),
        format!(
            "envelope respected {env_ok}; unit-gap constant {:.5} (in [0.99, 1]); double-difference spread {:.1}% (10%); {:.2}s",
            h.constant,
            100.0 * spread,
            el.as_secs_f64()
        ),
    )
}

// 9
fn cocycle() -> Outcome {
    let p = scalar_linear(1.0, 0.5, 0.75, 4096, 1).unwrap();
    let scalar = cocycle_defect(&p, 0.5, 0.5).unwrap();
    const FLOOR: f64 = 1e-8;
    let mut multi_ok = true;
    let mut rows = Vec::new();
    let mut trivial: f64 = 0.0;
    for seed in [1u64, 2] {
        let d: Vec<f64> = [256usize, 512, 1024]
            .iter()
            .map(|&n| cocycle_defect(&multimode(8, Profile::Tanh, 1.0, n, seed).unwrap(), 0.5, 0.25).unwrap())
            .collect();
        multi_ok &= strictly_decreasing(&d) || d.iter().all(|x| *x <= FLOOR);
        rows.push(format!("{:.1e}/{:.1e}/{:.1e}", d[0], d[1], d[2]));
        let q = multimode(8, Profile::Tanh, 1.0, 256, seed).unwrap();
        trivial = trivial.max(cocycle_defect(&q, 0.5, 0.0).unwrap()).max(cocycle_defect(&q, 0.0, 0.5).unwrap());
    }
    outcome(
        scalar <= 1e-2 && multi_ok && trivial <= 1e-8,
        format!(
            "scalar {scalar:.2e} (1e-2); multi-mode [{}] (decreasing or <= {FLOOR:e}); tau=0/t=0 {trivial:.1e} (1e-8)",
            rows.join(", ")
        ),
    )
}

// 10
fn regularity() -> Outcome {
    let mut cs = Vec::new();
    let mut exps = Vec::new();
    let mut finite = true;
    let mut beta = 0.0;
    for seed in 1..=4u64 {
        let p = multimode(64, Profile::Tanh, 0.51, 256, seed).unwrap();
        beta = p.params.beta;
        let (u, _) = solve_mild(&p).unwrap();
        let r = regularity_report(&p, &u).unwrap();
        finite &= r.finite() && r.norms[1..].iter().all(|x| *x > 0.0);
        cs.push(r.constant);
        exps.push(r.exponent);
    }
    let med = median(&cs);
    let spread = cs.iter().map(|c| (c / med - 1.0).abs()).fold(0.0, f64::max);
    let exp_gap = exps.iter().map(|e| (e + beta).abs()).fold(0.0, f64::max);
    outcome(
        finite && spread <= 0.2 && exp_gap <= 0.1,
        format!(
            "finite {finite}; constants {:?} spread {:.1}% (20%); exponent gap to -beta {exp_gap:.3} (0.1)",
            cs.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>(),
            100.0 * spread
        ),
    )
}

// 11
fn coefficient_bounds() -> Outcome {
    let profiles = [
        Profile::Identity,
        Profile::Tanh,
        Profile::Constant,
        Profile::Affine { a: 0.5, b: -2.0 },
    ];
    let mut total = 0usize;
    let mut ok = true;
    for (k, p) in profiles.into_iter().enumerate() {
        let g = DiagonalNemytskii::power_law(8, 1.0, p).unwrap();
        match lemma4_certify(&g, 10_000, 77 + k as u64) {
            Ok(r) => {
                total += r.violations.iter().sum::<usize>();
                ok &= r.passed() && r.samples == 10_000;
            }
            Err(_) => ok = false,
        }
    }
    outcome(ok && total == 0, format!("{total} violations over 4 profiles x 1e4 samples"))
}

// 12
fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pathwise");
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fbm_h075_n16_s7.csv");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let a = run(&["fbm", "--hurst", "0.75", "--steps", "16", "--seed", "7"]);
    let b = run(&["fbm", "--hurst", "0.75", "--steps", "16", "--seed", "7"]);
    let same = a.stdout == b.stdout;
    let gold = a.stdout == std::fs::read(golden).unwrap();
    let codes = [
        (run(&["fbm", "--steps", "32"]).status.code(), 0),
        (run(&["fbm", "--hurst", "1.2"]).status.code(), 1),
        (
            run(&["certify", "--only", "contraction", "--steps", "128", "--corrupt-ct", "1e-3", "-q"])
                .status
                .code(),
            2,
        ),
        (run(&["solve", "--steps", "64", "--max-iter", "1", "-q"]).status.code(), 3),
    ];
    let codes_ok = codes.iter().all(|(got, want)| *got == Some(*want));
    outcome(
        same && gold && codes_ok,
        format!(
            "deterministic {same}; golden {gold}; exit codes {:?} (want 0,1,2,3)",
            codes.iter().map(|(g, _)| g.unwrap_or(-1)).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("fBm law", fbm_law),
        ("integral correctness", integral_correctness),
        ("alpha independence", alpha_independence),
        ("additivity and shift", additivity_and_shift),
        ("K(rho)", kfun_criterion),
        ("solver vs closed form", solver_closed_form),
        ("contraction", contraction),
        ("semigroup estimates", semigroup_estimates),
        ("cocycle", cocycle),
        ("regularity", regularity),
        ("coefficient bounds", coefficient_bounds),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.passed);
        println!(
            "{} {:>2} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
