use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pathwise::coefficients::Profile;
use pathwise::fbm::{sample_fbm_hilbert, CholeskySampler, CirculantSampler};
use pathwise::fraccalc::{additivity_defect, shift_covariance_defect, zahle_integral_scalar, OperatorPath};
use pathwise::io::{fmt_f64, join_row, read_hilbert_path, write_hilbert_path, write_scalar_path};
use pathwise::solver::certify::instances::{self, default_params};
use pathwise::solver::certify::{
    calibrate_c_t, cocycle_defect, exponential_oracle, relative_sup_error, variation_of_constants_oracle,
};
use pathwise::solver::{solve_mild, MildProblem};
use pathwise::{stats, FbmConfig, HilbertPath, ScalarPath, TraceWeights, Window};

use crate::{parse_enum, CliError, CliResult, Ctx};

/// Defect tolerances of the integral checks.
pub const ADDITIVITY_TOL: f64 = 1e-4;
pub const SHIFT_TOL: f64 = 1e-10;
/// Defects below this are rounding noise; a sequence entirely below it counts as converged.
pub const DEFECT_FLOOR: f64 = 1e-8;

fn parse_or<T: ValueEnum>(ctx: &Ctx, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
    match flag {
        Some(v) => Ok(v),
        None => match ctx.file.raw(key) {
            Some(s) => parse_enum(s, key),
            None => Ok(default),
        },
    }
}

fn profile(ctx: &Ctx, flag: Option<String>, default: Profile) -> CliResult<Profile> {
    match ctx.file.pick_opt(flag, "profile")? {
        Some(s) => s.parse::<Profile>().map_err(|e| CliError::Validation(e.to_string())),
        None => Ok(default),
    }
}

#[derive(Args, Debug)]
pub struct FbmArgs {
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Number of modes; more than one samples a V-valued path with `q_i = i^{-2}`.
    #[arg(long)]
    modes: Option<usize>,
    /// Use the exact Cholesky sampler (scalar paths, at most 2048 steps).
    #[arg(long)]
    cholesky: bool,
}

pub fn fbm(ctx: &Ctx, a: FbmArgs) -> CliResult<()> {
    let f = &ctx.file;
    let cfg = FbmConfig::new(
        f.pick(a.hurst, "hurst", 0.75)?,
        f.pick(a.horizon, "horizon", 1.0)?,
        f.pick(a.steps, "steps", 1024)?,
        ctx.seed,
    )?;
    let modes = f.pick(a.modes, "modes", 1)?;
    if modes == 0 {
        return Err(CliError::Validation("modes must be at least 1".into()));
    }
    let mut w = ctx.writer()?;
    if modes > 1 {
        let path = sample_fbm_hilbert(&cfg, &TraceWeights::default_for(modes))?;
        write_hilbert_path(&mut w, &path, ctx.format)?;
    } else {
        let path = if a.cholesky {
            CholeskySampler::new(&cfg)?.sample(cfg.seed)
        } else {
            CirculantSampler::new(&cfg)?.sample(cfg.seed)
        };
        write_scalar_path(&mut w, &path, ctx.format)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Additivity,
    Shift,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    /// Integrator path file (`t,mode_0,...`); sampled from --hurst/--steps when absent.
    #[arg(long)]
    path: Option<PathBuf>,
    /// `one`, `path` (the integrator itself), `sin` (of the integrator) or a path file.
    #[arg(long)]
    integrand: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    t2: Option<f64>,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Run a defect check instead of a single integral.
    #[arg(long)]
    check: Option<Check>,
    /// Shift for `--check shift`.
    #[arg(long)]
    tau: Option<f64>,
}

fn read_path(p: &PathBuf) -> CliResult<HilbertPath> {
    let text = std::fs::read_to_string(p)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
    Ok(read_hilbert_path(&text)?)
}

fn integrand_for(spec: &str, omega: &ScalarPath) -> CliResult<ScalarPath> {
    Ok(match spec {
        "one" => omega.map(|_| 1.0),
        "path" => omega.clone(),
        "sin" => omega.map(f64::sin),
        file => {
            let z = read_path(&PathBuf::from(file))?.mode(0).clone();
            pathwise::fbm::same_grid(&z, omega)?;
            z
        }
    })
}

/// Smooth integrand/integrator pairs of the additivity corpus on `[0, 1]`.
pub fn smooth_corpus(steps: usize) -> CliResult<Vec<(&'static str, ScalarPath, ScalarPath)>> {
    let h = 1.0 / steps as f64;
    let p = |f: fn(f64) -> f64| ScalarPath::from_fn(0.0, h, steps, f);
    Ok(vec![
        ("sin_cos", p(|t| (3.0 * t).sin())?, p(|t| (2.0 * t).cos() + t * t)?),
        ("exp_poly", p(|t| (-t).exp())?, p(|t| t * t * t - t)?),
        ("poly_sqrt", p(|t| 1.0 + t * t)?, p(|t| (1.0 + t).sqrt())?),
    ])
}

pub fn integrate(ctx: &Ctx, a: IntegrateArgs) -> CliResult<()> {
    let f = &ctx.file;
    let alpha = f.pick(a.alpha, "alpha", 0.4)?;
    let hurst = f.pick(a.hurst, "hurst", 0.75)?;
    let steps = f.pick(a.steps, "steps", 1024)?;
    let path_file = f.pick_opt(a.path, "path")?;
    let driver = match &path_file {
        Some(p) => read_path(p)?,
        None => {
            let cfg = FbmConfig::new(hurst, 1.0, steps, ctx.seed)?;
            let n = if a.check == Some(Check::Shift) { 2 } else { 1 };
            sample_fbm_hilbert(&cfg, &TraceWeights::default_for(n))?
        }
    };
    let omega = driver.mode(0).clone();
    let spec = f.pick(a.integrand, "integrand", "sin".to_string())?;
    let sep = ctx.sep();
    let mut w = ctx.writer()?;
    match parse_check(ctx, a.check)? {
        None => {
            let z = integrand_for(&spec, &omega)?;
            let t1 = f.pick(a.t1, "t1", omega.t0())?;
            let t2 = f.pick(a.t2, "t2", omega.t_end())?;
            let v = zahle_integral_scalar(&z, &omega, alpha, Window::from_times(&omega, t1, t2)?)?;
            writeln!(w, "integral = {}", fmt_f64(v))?;
        }
        Some(Check::Additivity) => {
            writeln!(w, "case{sep}t1{sep}t2{sep}t3{sep}defect{sep}tolerance{sep}status")?;
            let mut cases: Vec<(String, ScalarPath, ScalarPath)> = Vec::new();
            if path_file.is_some() {
                cases.push((format!("path_{spec}"), integrand_for(&spec, &omega)?, omega.clone()));
            } else {
                for (name, z, zeta) in smooth_corpus(steps)? {
                    cases.push((name.to_string(), z, zeta));
                }
                for k in 0..3u64 {
                    let cfg = FbmConfig::new(hurst, 1.0, steps, ctx.seed.wrapping_add(k))?;
                    let om = CirculantSampler::new(&cfg)?.sample(cfg.seed);
                    cases.push((format!("fbm_sin_{k}"), om.map(f64::sin), om));
                }
            }
            let (t1, t3) = (omega.t0(), omega.t_end());
            let mut failed = 0;
            for (name, z, zeta) in &cases {
                for frac in [0.25, 0.5] {
                    let t2 = zeta.time(zeta.node_of(t1 + frac * (t3 - t1)).unwrap_or(zeta.len() / 2));
                    let d = additivity_defect(z, zeta, alpha, t1, t2, t3)?;
                    let ok = d <= ADDITIVITY_TOL;
                    failed += usize::from(!ok);
                    writeln!(
                        w,
                        "{name}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}",
                        fmt_f64(t1),
                        fmt_f64(t2),
                        fmt_f64(t3),
                        fmt_f64(d),
                        fmt_f64(ADDITIVITY_TOL),
                        status(ok)
                    )?;
                }
            }
            w.flush()?;
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} additivity defects above tolerance")));
            }
        }
        Some(Check::Shift) => {
            let tau = f.pick(a.tau, "tau", 0.25)?;
            let z = OperatorPath::diagonal(driver.modes().iter().map(|m| m.map(f64::sin)).collect())?;
            let d = shift_covariance_defect(&z, &driver, tau, alpha, driver.t0(), driver.time(driver.len() - 1))?;
            let ok = d <= SHIFT_TOL;
            writeln!(w, "check{sep}tau{sep}defect{sep}tolerance{sep}status")?;
            writeln!(
                w,
                "shift_covariance{sep}{}{sep}{}{sep}{}{sep}{}",
                fmt_f64(tau),
                fmt_f64(d),
                fmt_f64(SHIFT_TOL),
                status(ok)
            )?;
            w.flush()?;
            if !ok {
                return Err(CliError::Failed(format!("shift defect {d:e} above {SHIFT_TOL:e}")));
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_check(ctx: &Ctx, flag: Option<Check>) -> CliResult<Option<Check>> {
    match flag {
        Some(c) => Ok(Some(c)),
        None => ctx.file.raw("check").map(|s| parse_enum(s, "check")).transpose(),
    }
}

pub fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `du = -λu dt + σu dω`, scalar.
    Linear,
    /// `du = -λu dt + σ dω`, scalar.
    Additive,
    /// Dirichlet Laplacian with a diagonal coefficient.
    Multimode,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    /// Closed-form exponential (linear problem).
    Exp,
    /// Variation of constants on a 16× finer driver (additive problem).
    Voc,
    /// `S(t)u₀`.
    Semigroup,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    /// `identity`, `tanh`, `constant` or `affine:a:b`.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    u0_decay: Option<f64>,
    /// Fixed weight ρ (ignored when a constant c_T is set or calibrated).
    #[arg(long)]
    rho: Option<f64>,
    /// Constant c_T from which ρ is chosen.
    #[arg(long)]
    c_t: Option<f64>,
    /// Calibrate c_T on this many draws before solving.
    #[arg(long)]
    calibrate: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Append oracle columns and a relative-error column.
    #[arg(long, value_enum)]
    oracle: Option<Oracle>,
    /// Write the diagnostics block here instead of stderr.
    #[arg(long)]
    diag: Option<PathBuf>,
}

/// Steps of the finer driver used by the variation-of-constants oracle.
pub const ORACLE_REFINE: usize = 16;

pub struct Built {
    pub problem: MildProblem,
    pub fine: Option<HilbertPath>,
}

pub fn build_problem(
    kind: ProblemKind,
    lambda: f64,
    sigma: f64,
    hurst: f64,
    steps: usize,
    modes: usize,
    prof: Profile,
    u0_decay: f64,
    seed: u64,
) -> CliResult<Built> {
    Ok(match kind {
        ProblemKind::Linear => {
            let omega = instances::scalar_driver(hurst, 1.0, steps, seed)?;
            let g = pathwise::coefficients::DiagonalNemytskii::scalar(sigma, Profile::Identity)?;
            let op = pathwise::semigroup::SpectralOperator::new(vec![lambda])?;
            Built {
                problem: MildProblem::new(op, g, &omega, vec![1.0], default_params(), 1.0)?,
                fine: None,
            }
        }
        ProblemKind::Additive => {
            let fine = instances::driver(hurst, 1.0, steps * ORACLE_REFINE, seed, &TraceWeights::new(vec![1.0])?)?;
            let coarse = fine.coarsen(ORACLE_REFINE)?;
            Built {
                problem: instances::scalar_additive(lambda, sigma, &coarse)?,
                fine: Some(fine),
            }
        }
        ProblemKind::Multimode => Built {
            problem: instances::multimode(modes, prof, u0_decay, steps, seed)?,
            fine: None,
        },
    })
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn solve(ctx: &Ctx, a: SolveArgs) -> CliResult<()> {
    let f = &ctx.file;
    let kind = parse_or(ctx, a.problem, "problem", ProblemKind::Linear)?;
    let built = build_problem(
        kind,
        f.pick(a.lambda, "lambda", 1.0)?,
        f.pick(a.sigma, "sigma", 0.5)?,
        f.pick(a.hurst, "hurst", 0.75)?,
        f.pick(a.steps, "steps", 1024)?,
        f.pick(a.modes, "modes", 8)?,
        profile(ctx, a.profile, Profile::Tanh)?,
        f.pick(a.u0_decay, "u0-decay", 1.0)?,
        ctx.seed,
    )?;
    let mut p = built.problem;
    p.params = p.params.with_rho(f.pick(a.rho, "rho", 0.0)?);
    p.tol = f.pick(a.tol, "tol", p.tol)?;
    p.max_iter = f.pick(a.max_iter, "max-iter", p.max_iter)?;
    p.c_t = f.pick_opt(a.c_t, "c-t")?;
    if let Some(count) = f.pick_opt(a.calibrate, "calibrate")? {
        let cal = calibrate_c_t(&p, count, ctx.seed ^ 0x5eed)?;
        p.c_t = Some(cal.c_t);
    }
    let oracle = match a.oracle {
        Some(o) => Some(o),
        None => f.raw("oracle").map(|s| parse_enum(s, "oracle")).transpose()?,
    };
    let (u, diag) = solve_mild(&p)?;
    let reference = match oracle {
        None => None,
        Some(Oracle::Exp) => Some(exponential_oracle(&p)?),
        Some(Oracle::Voc) => match &built.fine {
            Some(fine) => Some(variation_of_constants_oracle(&p, fine, ORACLE_REFINE)?),
            None => return Err(CliError::Validation("--oracle voc needs --problem additive".into())),
        },
        Some(Oracle::Semigroup) => Some(p.semigroup_path()),
    };
    let sep = ctx.sep();
    let mut w = ctx.writer()?;
    let mut header = String::from("t");
    for i in 0..u.n_modes() {
        header.push_str(&format!("{sep}mode_{i}"));
    }
    if reference.is_some() {
        for i in 0..u.n_modes() {
            header.push_str(&format!("{sep}oracle_{i}"));
        }
        header.push_str(&format!("{sep}rel_error"));
    }
    writeln!(w, "{header}")?;
    for k in 0..u.len() {
        let mut row = vec![u.time(k)];
        let uk = u.at(k);
        row.extend(&uk);
        if let Some(r) = &reference {
            let rk = r.at(k);
            let d: Vec<f64> = uk.iter().zip(&rk).map(|(a, b)| a - b).collect();
            let den = euclid(&rk);
            row.extend(&rk);
            row.push(if den == 0.0 { euclid(&d) } else { euclid(&d) / den });
        }
        writeln!(w, "{}", join_row(&row, sep))?;
    }
    w.flush()?;
    let mut block = diag.key_values();
    if let Some(r) = &reference {
        block.push_str(&format!("relative_sup_error = {}\n", fmt_f64(relative_sup_error(&u, r)?)));
    }
    match f.pick_opt(a.diag, "diag")? {
        Some(path) => std::fs::write(&path, block)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => ctx.note(block.trim_end()),
    }
    Ok(())
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// Linear problem against the exponential oracle.
    Linear,
    /// Cocycle defect on a multi-mode problem.
    Cocycle,
    /// `∫ sin(ω) dω` against the trapezoid sum on a 16× finer grid.
    Integral,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    study: Option<Study>,
    /// Comma-separated step counts.
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
}

/// Outcome of one convergence study.
#[derive(Debug, Clone)]
pub struct Convergence {
    pub ns: Vec<usize>,
    pub errors: Vec<f64>,
    pub order: f64,
    pub decreasing: bool,
    pub passed: bool,
    pub requirement: String,
}

pub fn default_ns(study: Study) -> Vec<usize> {
    match study {
        Study::Cocycle => vec![256, 512, 1024],
        _ => vec![512, 1024, 2048, 4096],
    }
}

fn trapezoid(z: &ScalarPath, w: &ScalarPath) -> f64 {
    let (z, w) = (z.values(), w.values());
    (0..z.len() - 1).map(|k| 0.5 * (z[k] + z[k + 1]) * (w[k + 1] - w[k])).sum()
}

pub fn run_study(study: Study, ns: &[usize], hurst: f64, modes: usize, seed: u64) -> CliResult<Convergence> {
    if ns.len() < 2 {
        return Err(CliError::Validation("a convergence study needs at least two grids".into()));
    }
    let errors: Vec<f64> = match study {
        Study::Linear => ns
            .iter()
            .map(|&n| {
                let p = instances::scalar_linear(1.0, 0.5, hurst, n, seed)?;
                relative_sup_error(&solve_mild(&p)?.0, &exponential_oracle(&p)?)
            })
            .collect::<pathwise::Result<_>>()?,
        Study::Cocycle => ns
            .iter()
            .map(|&n| {
                let p = instances::multimode(modes, Profile::Tanh, 1.0, n, seed)?;
                cocycle_defect(&p, 0.5, 0.5)
            })
            .collect::<pathwise::Result<_>>()?,
        Study::Integral => {
            let fine_n = ns.iter().max().copied().unwrap_or(1) * ORACLE_REFINE;
            let cfg = FbmConfig::new(hurst, 1.0, fine_n, seed)?;
            let om = CirculantSampler::new(&cfg)?.sample(seed);
            let reference = trapezoid(&om.map(f64::sin), &om);
            ns.iter()
                .map(|&n| {
                    if fine_n % n != 0 {
                        return Err(pathwise::Error::Domain(format!("{n} must divide {fine_n}")));
                    }
                    let c = om.coarsen(fine_n / n)?;
                    let v = zahle_integral_scalar(&c.map(f64::sin), &c, 0.4, Window::full(&c)?)?;
                    Ok((v - reference).abs() / reference.abs().max(f64::MIN_POSITIVE))
                })
                .collect::<pathwise::Result<_>>()?
        }
    };
    let order = stats::fitted_order(ns, &errors);
    let decreasing = stats::strictly_decreasing(&errors);
    let floor = errors.iter().all(|e| *e <= DEFECT_FLOOR);
    let p = default_params();
    let (passed, requirement) = match study {
        Study::Linear => (decreasing && order >= 0.5, "strictly decreasing, order >= 0.5".to_string()),
        Study::Cocycle => (decreasing || floor, format!("strictly decreasing or all <= {DEFECT_FLOOR:e}")),
        Study::Integral => {
            let need = p.beta + p.beta_prime - 1.0 - 0.1;
            (order >= need, format!("order >= {need:.3}"))
        }
    };
    Ok(Convergence {
        ns: ns.to_vec(),
        errors,
        order,
        decreasing,
        passed,
        requirement,
    })
}

pub fn converge(ctx: &Ctx, a: ConvergeArgs) -> CliResult<()> {
    let f = &ctx.file;
    let study = parse_or(ctx, a.study, "study", Study::Linear)?;
    let ns = match f.pick_opt(a.ns, "ns")? {
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Validation(format!("bad --ns list: {e}")))?,
        None => default_ns(study),
    };
    let c = run_study(
        study,
        &ns,
        f.pick(a.hurst, "hurst", 0.75)?,
        f.pick(a.modes, "modes", 8)?,
        ctx.seed,
    )?;
    let sep = ctx.sep();
    let mut w = ctx.writer()?;
    writeln!(w, "n{sep}error")?;
    for (n, e) in c.ns.iter().zip(&c.errors) {
        writeln!(w, "{n}{sep}{}", fmt_f64(*e))?;
    }
    w.flush()?;
    ctx.note(&format!(
        "fitted_order = {}\nstrictly_decreasing = {}\nrequirement = {}\nstatus = {}",
        fmt_f64(c.order),
        c.decreasing,
        c.requirement,
        status(c.passed)
    ));
    if c.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("convergence study does not meet: {}", c.requirement)))
    }
}
