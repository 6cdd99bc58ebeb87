//! Certification suite: one row per check with value, bound and status.

use std::io::Write;

use clap::{Args, ValueEnum};
use pathwise::coefficients::{lemma4_certify, DiagonalNemytskii, Profile};
use pathwise::fbm::CirculantSampler;
use pathwise::fraccalc::{additivity_defect, shift_covariance_defect, zahle_integral_scalar, OperatorPath};
use pathwise::io::fmt_f64;
use pathwise::semigroup::{
    double_difference_check, hoelder_estimate_check, random_quadruples, smoothing_envelope, smoothing_norm,
    SpectralOperator,
};
use pathwise::solver::certify::instances::{default_params, multimode};
use pathwise::solver::certify::{
    cocycle_defect, lemma5_bound_check, random_iterates, regularity_report, uniqueness_gap, Certifier,
};
use pathwise::solver::kfun::{KFunction, KParams};
use pathwise::solver::solve_mild;
use pathwise::special::beta;
use pathwise::{stats, FbmConfig, Window};

use crate::commands::{status, ADDITIVITY_TOL, SHIFT_TOL};
use crate::{parse_enum, CliError, CliResult, Ctx};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Integral,
    Coefficients,
    Semigroup,
    Kfun,
    Derivative,
    Contraction,
    Uniqueness,
    Cocycle,
    Regularity,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Run one suite only; `kfun` prints the K(ρ) table.
    #[arg(long, value_enum)]
    only: Option<Suite>,
    /// Grid steps of the solver instances.
    #[arg(long)]
    steps: Option<usize>,
    /// Modes of the solver instances.
    #[arg(long)]
    modes: Option<usize>,
    /// Random samples per profile for the coefficient bounds.
    #[arg(long)]
    samples: Option<usize>,
    /// Calibration draws for c_T.
    #[arg(long)]
    calibration: Option<usize>,
    /// Held-out pairs for the contraction bound.
    #[arg(long)]
    pairs: Option<usize>,
    /// Multiply the calibrated c_T by this factor before certifying.
    #[arg(long)]
    corrupt_ct: Option<f64>,
}

/// One line of the report.
pub struct Row {
    pub suite: &'static str,
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

fn row(suite: &'static str, check: impl Into<String>, value: f64, bound: f64, passed: bool) -> Row {
    Row {
        suite,
        check: check.into(),
        value,
        bound,
        passed,
    }
}

fn le(suite: &'static str, check: impl Into<String>, value: f64, bound: f64) -> Row {
    row(suite, check, value, bound, value.is_finite() && value <= bound)
}

pub const RHO_GRID: [f64; 6] = [0.0, 1.0, 10.0, 100.0, 1e3, 1e4];

fn kparams() -> CliResult<KParams> {
    Ok(KParams::from_holder(&default_params(), 1.0)?)
}

fn integral_rows(seed: u64, steps: usize) -> CliResult<Vec<Row>> {
    let cfg = FbmConfig::new(0.75, 1.0, steps, seed)?;
    let om = CirculantSampler::new(&cfg)?.sample(seed);
    let z = om.map(f64::sin);
    let w = Window::full(&om)?;
    let a = zahle_integral_scalar(&z, &om, 0.35, w)?;
    let b = zahle_integral_scalar(&z, &om, 0.6, w)?;
    let d = additivity_defect(&z, &om, 0.4, 0.0, 0.5, 1.0)?;
    let h = pathwise::fbm::sample_fbm_hilbert(&cfg, &pathwise::TraceWeights::default_for(2))?;
    let zz = OperatorPath::diagonal(h.modes().iter().map(|m| m.map(f64::sin)).collect())?;
    let s = shift_covariance_defect(&zz, &h, 0.25, 0.4, 0.0, 1.0)?;
    Ok(vec![
        le("integral", "alpha_independence", (a - b).abs() / a.abs().max(f64::MIN_POSITIVE), 1e-3),
        le("integral", "additivity", d, ADDITIVITY_TOL),
        le("integral", "shift_covariance", s, SHIFT_TOL),
    ])
}

fn coefficient_rows(seed: u64, samples: usize) -> CliResult<Vec<Row>> {
    let profiles = [
        Profile::Identity,
        Profile::Tanh,
        Profile::Constant,
        Profile::Affine { a: 0.5, b: -2.0 },
    ];
    let mut rows = Vec::new();
    for (k, p) in profiles.into_iter().enumerate() {
        let g = DiagonalNemytskii::power_law(8, 1.0, p)?;
        let r = match lemma4_certify(&g, samples, seed.wrapping_add(k as u64)) {
            Ok(r) => r,
            Err(pathwise::Error::Certification { .. }) => {
                rows.push(row("coefficients", format!("bounds_{}", p.name()), 1.0, 0.0, false));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let v: usize = r.violations.iter().sum();
        rows.push(row("coefficients", format!("bounds_{}", p.name()), v as f64, 0.0, v == 0));
    }
    Ok(rows)
}

fn semigroup_rows(seed: u64) -> CliResult<Vec<Row>> {
    let op = SpectralOperator::dirichlet_laplacian(64)?;
    let ts: Vec<f64> = (0..200).map(|i| 10f64.powf(-4.0 + 4.3 * i as f64 / 199.0)).collect();
    let mut rows = Vec::new();
    for gamma in [0.25, 0.55, 1.0] {
        let worst = ts
            .iter()
            .map(|&t| smoothing_norm(&op, gamma, t) / smoothing_envelope(gamma, t))
            .fold(0.0, f64::max);
        rows.push(le("semigroup", format!("smoothing_envelope_gamma_{gamma}"), worst, 1.0));
    }
    let h = hoelder_estimate_check(&op, 1.3, 0.3, 0.0, &ts)?;
    rows.push(le("semigroup", "hoelder_unit_gap", h.constant, 1.0));
    let mut consts = Vec::new();
    for k in 0..4u64 {
        let q = random_quadruples(10_000, 1.0, seed.wrapping_add(k));
        consts.push(double_difference_check(&op, 0.3, 0.4, &q)?.constant);
    }
    let med = stats::median(&consts);
    let spread = consts.iter().map(|c| (c / med - 1.0).abs()).fold(0.0, f64::max);
    rows.push(row(
        "semigroup",
        "double_difference_stability",
        spread,
        0.1,
        consts.iter().all(|c| c.is_finite()) && spread <= 0.1,
    ));
    Ok(rows)
}

fn kfun_rows() -> CliResult<Vec<Row>> {
    let kp = kparams()?;
    let kf = KFunction::new(kp);
    let vals = RHO_GRID.iter().map(|&r| kf.eval(r)).collect::<pathwise::Result<Vec<_>>>()?;
    let exact = kp.horizon.powf(kp.d) * beta(kp.a + 1.0, kp.b + 1.0);
    Ok(vec![
        le("kfun", "value_at_zero", (vals[0] - exact).abs() / exact, 1e-6),
        row(
            "kfun",
            "strictly_decreasing",
            f64::from(u8::from(stats::strictly_decreasing(&vals))),
            1.0,
            stats::strictly_decreasing(&vals),
        ),
    ])
}

struct SolverCtx {
    steps: usize,
    modes: usize,
    calibration: usize,
    pairs: usize,
    corrupt: f64,
    seed: u64,
}

fn derivative_rows(s: &SolverCtx) -> CliResult<Vec<Row>> {
    let p = multimode(s.modes, Profile::Tanh, 1.0, s.steps, s.seed)?;
    let (u, _) = solve_mild(&p)?;
    let mut rows = Vec::new();
    for t in [0.5, 1.0] {
        let r = lemma5_bound_check(&p, &u, t)?;
        rows.push(row("derivative", format!("envelope_slopes_t_{t}"), r.constant, f64::INFINITY, r.passed()));
    }
    Ok(rows)
}

fn contraction_rows(s: &SolverCtx) -> CliResult<Vec<Row>> {
    let p = multimode(s.modes, Profile::Tanh, 1.0, s.steps, s.seed)?;
    let c = Certifier::new(&p)?;
    let cal = c.calibrate(s.calibration, s.seed ^ 0xca1)?;
    let c_t = cal.c_t * s.corrupt;
    let rep = c.contraction_suite(c_t, s.pairs, s.seed ^ 0x401d)?;
    let us = random_iterates(&p, s.pairs, s.seed ^ 0x9a0)?;
    let growth = us
        .iter()
        .map(|u| c.growth_ratio(u, rep.rho, c_t))
        .collect::<pathwise::Result<Vec<_>>>()?;
    let mut q = p.clone();
    q.c_t = Some(c_t);
    let slope = match solve_mild(&q) {
        Ok((_, d)) => d.log_distance_slope(),
        Err(pathwise::Error::Divergence { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    Ok(vec![
        le("contraction", "contraction_bound_max_ratio", rep.max_ratio(), 1.0),
        le("contraction", "growth_bound_max_ratio", stats::max(&growth), 1.0),
        le("contraction", "picard_log_distance_slope", slope, 0.9f64.ln()),
    ])
}

fn uniqueness_rows(s: &SolverCtx) -> CliResult<Vec<Row>> {
    let p = multimode(s.modes, Profile::Tanh, 1.0, s.steps, s.seed)?;
    Ok(vec![le("uniqueness", "initialization_gap", uniqueness_gap(&p)?, 10.0 * p.tol)])
}

fn cocycle_rows(s: &SolverCtx) -> CliResult<Vec<Row>> {
    let p = multimode(s.modes, Profile::Tanh, 1.0, s.steps, s.seed)?;
    Ok(vec![
        le("cocycle", "defect_t_0.5_tau_0.25", cocycle_defect(&p, 0.5, 0.25)?, 1e-2),
        le("cocycle", "defect_tau_0", cocycle_defect(&p, 0.5, 0.0)?, 1e-8),
        le("cocycle", "defect_t_0", cocycle_defect(&p, 0.0, 0.5)?, 1e-8),
    ])
}

fn regularity_rows(s: &SolverCtx) -> CliResult<Vec<Row>> {
    let p = multimode(s.modes.max(16), Profile::Tanh, 0.51, s.steps, s.seed)?;
    let (u, _) = solve_mild(&p)?;
    let r = regularity_report(&p, &u)?;
    let beta = p.params.beta;
    Ok(vec![
        row("regularity", "finite_norms", r.max_ratio, f64::INFINITY, r.finite()),
        le("regularity", "envelope_exponent_gap", (r.exponent + beta).abs(), 0.1),
    ])
}

fn write_rows(ctx: &Ctx, rows: &[Row]) -> CliResult<()> {
    let sep = ctx.sep();
    let mut w = ctx.writer()?;
    writeln!(w, "suite{sep}check{sep}value{sep}bound{sep}status")?;
    for r in rows {
        writeln!(
            w,
            "{}{sep}{}{sep}{}{sep}{}{sep}{}",
            r.suite,
            r.check,
            fmt_f64(r.value),
            fmt_f64(r.bound),
            status(r.passed)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_kfun_table(ctx: &Ctx) -> CliResult<()> {
    let kf = KFunction::new(kparams()?);
    let sep = ctx.sep();
    let mut w = ctx.writer()?;
    writeln!(w, "rho{sep}k{sep}t_star")?;
    for rho in RHO_GRID {
        let (k, t) = kf.eval_with_argmax(rho)?;
        writeln!(w, "{}{sep}{}{sep}{}", fmt_f64(rho), fmt_f64(k), fmt_f64(t))?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(ctx: &Ctx, a: CertifyArgs) -> CliResult<()> {
    let f = &ctx.file;
    let only = match a.only {
        Some(s) => Some(s),
        None => f.raw("only").map(|s| parse_enum(s, "only")).transpose()?,
    };
    if only == Some(Suite::Kfun) {
        let rows = kfun_rows()?;
        write_kfun_table(ctx)?;
        return finish(ctx, &rows);
    }
    let corrupt = f.pick(a.corrupt_ct, "corrupt-ct", 1.0)?;
    if !(corrupt > 0.0 && corrupt.is_finite()) {
        return Err(CliError::Validation(format!("corrupt-ct must be positive, got {corrupt}")));
    }
    let s = SolverCtx {
        steps: f.pick(a.steps, "steps", 256)?,
        modes: f.pick(a.modes, "modes", 4)?,
        calibration: f.pick(a.calibration, "calibration", 10)?,
        pairs: f.pick(a.pairs, "pairs", 20)?,
        corrupt,
        seed: ctx.seed,
    };
    let samples = f.pick(a.samples, "samples", 10_000)?;
    let want = |x: Suite| only.is_none() || only == Some(x);
    let mut rows = Vec::new();
    if want(Suite::Integral) {
        rows.extend(integral_rows(ctx.seed, s.steps.max(64))?);
    }
    if want(Suite::Coefficients) {
        rows.extend(coefficient_rows(ctx.seed, samples)?);
    }
    if want(Suite::Semigroup) {
        rows.extend(semigroup_rows(ctx.seed)?);
    }
    if want(Suite::Kfun) {
        rows.extend(kfun_rows()?);
    }
    if want(Suite::Derivative) {
        rows.extend(derivative_rows(&s)?);
    }
    if want(Suite::Contraction) {
        rows.extend(contraction_rows(&s)?);
    }
    if want(Suite::Uniqueness) {
        rows.extend(uniqueness_rows(&s)?);
    }
    if want(Suite::Cocycle) {
        rows.extend(cocycle_rows(&s)?);
    }
    if want(Suite::Regularity) {
        rows.extend(regularity_rows(&s)?);
    }
    write_rows(ctx, &rows)?;
    finish(ctx, &rows)
}

fn finish(ctx: &Ctx, rows: &[Row]) -> CliResult<()> {
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.check.as_str()).collect();
    ctx.note(&format!("{} checks, {} failed", rows.len(), failed.len()));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}
