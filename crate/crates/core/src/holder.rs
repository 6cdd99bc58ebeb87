//! Hölder seminorm, the modified `C^{β,∼}` norm and its ρ-weighted equivalent on grid paths.
//!
//! All suprema run over pairs of grid nodes. Up to [`FULL_SCAN_LIMIT`] steps every
//! pair is visited; above that the scan is restricted to dyadic lags plus every
//! pair touching a window endpoint.

use crate::error::{domain, Result};
use crate::fbm::{HilbertPath, ScalarPath};
use crate::par;

/// Windows with at most this many steps are scanned pair by pair.
pub const FULL_SCAN_LIMIT: usize = 4096;

/// Exponents and weight shared by the norms, the integral and the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderParams {
    pub beta: f64,
    pub beta_prime: f64,
    pub alpha: f64,
    pub rho: f64,
}

impl HolderParams {
    pub fn new(beta: f64, beta_prime: f64, alpha: f64, rho: f64) -> Result<Self> {
        let p = Self {
            beta,
            beta_prime,
            alpha,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            beta,
            beta_prime,
            alpha,
            rho,
        } = *self;
        if !(0.5 < beta && beta < beta_prime && beta_prime < 1.0) {
            return domain(format!(
                "need 1/2 < beta < beta' < 1, got beta={beta}, beta'={beta_prime}"
            ));
        }
        if !(1.0 - beta_prime < alpha && alpha < beta) {
            return domain(format!(
                "need 1 - beta' < alpha < beta, got alpha={alpha} (beta={beta}, beta'={beta_prime})"
            ));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return domain(format!("rho must be finite and nonnegative, got {rho}"));
        }
        Ok(())
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.beta, self.beta_prime, alpha, self.rho)
    }
}

/// Node range `[start, end]` of a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return domain(format!("empty window [{start}, {end}]"));
        }
        Ok(Self { start, end })
    }

    pub fn full<P: GridPath + ?Sized>(path: &P) -> Result<Self> {
        Self::new(0, path.grid_len() - 1)
    }

    /// Window between the grid nodes at times `t1 < t2`.
    pub fn from_times<P: GridPath + ?Sized>(path: &P, t1: f64, t2: f64) -> Result<Self> {
        let a = crate::fbm::node_of(path.grid_t0(), path.grid_dt(), path.grid_len(), t1)?;
        let b = crate::fbm::node_of(path.grid_t0(), path.grid_dt(), path.grid_len(), t2)?;
        Self::new(a, b)
    }

    pub fn steps(&self) -> usize {
        self.end - self.start
    }

    fn check<P: GridPath + ?Sized>(&self, path: &P) -> Result<()> {
        if self.start >= self.end || self.end >= path.grid_len() {
            return domain(format!(
                "window [{}, {}] not inside a path with {} nodes",
                self.start,
                self.end,
                path.grid_len()
            ));
        }
        Ok(())
    }
}

/// Read access to a grid path with values in a Hilbert space.
pub trait GridPath: Sync {
    fn grid_len(&self) -> usize;
    fn grid_t0(&self) -> f64;
    fn grid_dt(&self) -> f64;
    /// `|u(t_k)|`.
    fn point_norm(&self, k: usize) -> f64;
    /// `|u(t_k) - u(t_j)|`.
    fn increment_norm(&self, j: usize, k: usize) -> f64;
}

impl GridPath for ScalarPath {
    fn grid_len(&self) -> usize {
        self.len()
    }
    fn grid_t0(&self) -> f64 {
        self.t0()
    }
    fn grid_dt(&self) -> f64 {
        self.dt()
    }
    fn point_norm(&self, k: usize) -> f64 {
        self.values()[k].abs()
    }
    fn increment_norm(&self, j: usize, k: usize) -> f64 {
        let v = self.values();
        (v[k] - v[j]).abs()
    }
}

// Euclidean norm of coefficients = V-norm in the orthonormal eigenbasis.
impl GridPath for HilbertPath {
    fn grid_len(&self) -> usize {
        self.len()
    }
    fn grid_t0(&self) -> f64 {
        self.t0()
    }
    fn grid_dt(&self) -> f64 {
        self.dt()
    }
    fn point_norm(&self, k: usize) -> f64 {
        if self.n_modes() == 1 {
            return self.mode(0).values()[k].abs();
        }
        self.modes()
            .iter()
            .map(|m| m.values()[k].powi(2))
            .sum::<f64>()
            .sqrt()
    }
    fn increment_norm(&self, j: usize, k: usize) -> f64 {
        if self.n_modes() == 1 {
            let v = self.mode(0).values();
            return (v[k] - v[j]).abs();
        }
        self.modes()
            .iter()
            .map(|m| {
                let v = m.values();
                (v[k] - v[j]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Supremum over node pairs `j < k` in the window of `weight(j, k) * |u_k - u_j|`.
/// Rows with `j < first_row` are skipped.
fn pair_sup<P, W>(path: &P, w: Window, first_row: usize, weight: W) -> f64
where
    P: GridPath + ?Sized,
    W: Fn(usize, usize) -> f64 + Sync + Send,
{
    let rows = w.end.saturating_sub(first_row);
    if w.steps() <= FULL_SCAN_LIMIT {
        par::max_range(rows, |r| {
            let j = first_row + r;
            let mut best = 0.0f64;
            for k in j + 1..=w.end {
                let q = weight(j, k) * path.increment_norm(j, k);
                if q > best {
                    best = q;
                }
            }
            best
        })
    } else {
        par::max_range(rows, |r| {
            let j = first_row + r;
            let mut best = 0.0f64;
            let mut lag = 1;
            while j + lag <= w.end {
                best = best.max(weight(j, j + lag) * path.increment_norm(j, j + lag));
                lag *= 2;
            }
            // pairs touching the endpoints
            best = best.max(weight(j, w.end) * path.increment_norm(j, w.end));
            if j == w.start {
                for k in j + 1..=w.end {
                    best = best.max(weight(j, k) * path.increment_norm(j, k));
                }
            }
            best
        })
    }
}

fn lag_powers(dt: f64, steps: usize, beta: f64) -> Vec<f64> {
    // lag_pow[l] = (l dt)^{-beta}
    (0..=steps)
        .map(|l| if l == 0 { 0.0 } else { (l as f64 * dt).powf(-beta) })
        .collect()
}

/// `sup |u(t) - u(s)| / |t - s|^β` over the window.
pub fn holder_seminorm<P: GridPath + ?Sized>(path: &P, beta: f64, w: Window) -> Result<f64> {
    w.check(path)?;
    let lp = lag_powers(path.grid_dt(), w.steps(), beta);
    Ok(pair_sup(path, w, w.start, |j, k| lp[k - j]))
}

/// `sup |u(s)|` over the window.
pub fn sup_norm<P: GridPath + ?Sized>(path: &P, w: Window) -> Result<f64> {
    w.check(path)?;
    Ok((w.start..=w.end)
        .map(|k| path.point_norm(k))
        .fold(0.0, f64::max))
}

/// `sup_{T1 < s < t} (s - T1)^β |u(t) - u(s)| / |t - s|^β`.
pub fn modified_seminorm<P: GridPath + ?Sized>(path: &P, beta: f64, w: Window) -> Result<f64> {
    weighted_seminorm(path, beta, 0.0, w)
}

/// `sup |u| + sup (s - T1)^β |u(t) - u(s)| / |t - s|^β`.
pub fn modified_norm<P: GridPath + ?Sized>(path: &P, beta: f64, w: Window) -> Result<f64> {
    Ok(sup_norm(path, w)? + modified_seminorm(path, beta, w)?)
}

fn weighted_sup<P: GridPath + ?Sized>(path: &P, rho: f64, w: Window) -> f64 {
    let dt = path.grid_dt();
    (w.start..=w.end)
        .map(|k| (-rho * (k - w.start) as f64 * dt).exp() * path.point_norm(k))
        .fold(0.0, f64::max)
}

fn weighted_seminorm<P: GridPath + ?Sized>(path: &P, beta: f64, rho: f64, w: Window) -> Result<f64> {
    w.check(path)?;
    let dt = path.grid_dt();
    let lp = lag_powers(dt, w.steps(), beta);
    let s_pow: Vec<f64> = (0..=w.steps())
        .map(|l| (l as f64 * dt).powf(beta))
        .collect();
    let decay: Vec<f64> = (0..=w.steps())
        .map(|l| (-rho * l as f64 * dt).exp())
        .collect();
    Ok(pair_sup(path, w, w.start + 1, |j, k| {
        s_pow[j - w.start] * decay[k - w.start] * lp[k - j]
    }))
}

/// The ρ-weighted modified norm `‖u‖_{β,ρ,∼}`.
pub fn weighted_norm<P: GridPath + ?Sized>(path: &P, params: &HolderParams, w: Window) -> Result<f64> {
    w.check(path)?;
    Ok(weighted_sup(path, params.rho, w) + weighted_seminorm(path, params.beta, params.rho, w)?)
}

/// `ln ‖u‖_{β,ρ,∼}`, evaluated in log space so that large `ρ` does not underflow.
/// Returns `-∞` for the zero path.
pub fn log_weighted_norm<P: GridPath + ?Sized>(path: &P, params: &HolderParams, w: Window) -> Result<f64> {
    w.check(path)?;
    let dt = path.grid_dt();
    let rho = params.rho;
    let beta = params.beta;
    let sup = (w.start..=w.end)
        .map(|k| -rho * (k - w.start) as f64 * dt + path.point_norm(k).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_x: Vec<f64> = (0..=w.steps()).map(|l| (l as f64 * dt).ln()).collect();
    let full = w.steps() <= FULL_SCAN_LIMIT;
    let term = |j: usize, k: usize| {
        beta * (ln_x[j - w.start] - ln_x[k - j]) - rho * (k - w.start) as f64 * dt
            + path.increment_norm(j, k).ln()
    };
    let rows = w.end.saturating_sub(w.start + 1);
    let semi = par::max_range_from(rows, f64::NEG_INFINITY, |r| {
        let j = w.start + 1 + r;
        let mut best = f64::NEG_INFINITY;
        if full {
            for k in j + 1..=w.end {
                best = best.max(term(j, k));
            }
        } else {
            let mut lag = 1;
            while j + lag <= w.end {
                best = best.max(term(j, j + lag));
                lag *= 2;
            }
            best = best.max(term(j, w.end));
        }
        best
    });
    Ok(log_add(sup, semi))
}

/// `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// All four norms of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub sup_norm: f64,
    pub holder_seminorm: f64,
    pub modified_seminorm: f64,
    pub weighted_norm: f64,
    pub beta: f64,
    pub rho: f64,
}

impl NormReport {
    pub fn compute<P: GridPath + ?Sized>(path: &P, params: &HolderParams, w: Window) -> Result<Self> {
        Ok(Self {
            sup_norm: sup_norm(path, w)?,
            holder_seminorm: holder_seminorm(path, params.beta, w)?,
            modified_seminorm: modified_seminorm(path, params.beta, w)?,
            weighted_norm: weighted_norm(path, params, w)?,
            beta: params.beta,
            rho: params.rho,
        })
    }

    pub const CSV_HEADER: &'static str = "sup,seminorm,modified,weighted,beta,rho";

    pub fn csv_row(&self, sep: char) -> String {
        [
            self.sup_norm,
            self.holder_seminorm,
            self.modified_seminorm,
            self.weighted_norm,
            self.beta,
            self.rho,
        ]
        .iter()
        .map(|x| crate::io::fmt_f64(*x))
        .collect::<Vec<_>>()
        .join(&sep.to_string())
    }
}

/// Hölder exponent estimate: slope of `log E|u(t+l dt) - u(t)|` against `log(l dt)`
/// for dyadic lags `l = 1, 2, 4, ...` up to an eighth of the path.
pub fn holder_exponent_estimate(path: &ScalarPath) -> Result<f64> {
    let n = path.len() - 1;
    if n < 16 {
        return domain("exponent estimate needs at least 16 steps");
    }
    let v = path.values();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lag = 1;
    while lag <= n / 8 {
        let m = n + 1 - lag;
        let mean = (0..m).map(|k| (v[k + lag] - v[k]).abs()).sum::<f64>() / m as f64;
        if mean > 0.0 {
            xs.push((lag as f64 * path.dt()).ln());
            ys.push(mean.ln());
        }
        lag *= 2;
    }
    if xs.len() < 2 {
        return domain("path too flat for an exponent estimate");
    }
    Ok(crate::stats::slope(&xs, &ys))
}
