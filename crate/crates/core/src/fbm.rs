//! Fractional Brownian motion: covariance, exact samplers and the Wiener shift.
//!
//! Paths live on uniform grids `t_k = t0 + k * dt`. The circulant-embedding
//! sampler draws unit-step fractional Gaussian noise over the whole grid in one
//! stationary stream, integrates it, and re-anchors the path so the node at
//! time 0 is exactly 0. The Cholesky sampler is the small-grid reference.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{domain, Error, Result};
use crate::par;

/// Relative clipping threshold for circulant eigenvalues.
pub const EIGEN_REL_TOL: f64 = 1e-10;
/// Default cap on the number of steps accepted by the Cholesky sampler.
pub const CHOLESKY_CAP: usize = 2048;

/// Time tolerance, in units of `dt`, when mapping a time onto a grid node.
const NODE_TOL: f64 = 1e-6;

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        domain(format!("hurst must lie in (0,1), got {hurst}"))
    }
}

/// Autocovariance of unit-step fBm increments (fractional Gaussian noise) at lag `k`.
pub fn fgn_covariance(k: u64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(fgn_cov_unchecked(k as f64, hurst))
}

fn fgn_cov_unchecked(k: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).abs().powf(h2) - 2.0 * k.abs().powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Two-sided fBm covariance `E B(t) B(s)`.
pub fn fbm_covariance(t: f64, s: f64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(fbm_cov_unchecked(t, s, hurst))
}

fn fbm_cov_unchecked(t: f64, s: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.abs().powf(h2) + s.abs().powf(h2) - (t - s).abs().powf(h2))
}

/// A real path sampled on a uniform grid.
///
/// The stored values are `raw[k] - anchor`. Keeping the raw series lets the
/// Wiener shift be composed without accumulating rounding: shifting twice reads
/// the same raw entries as a single shift by the summed time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPath {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    raw: Arc<Vec<f64>>,
    anchor: f64,
}

impl ScalarPath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return domain(format!("dt must be positive, got {dt}"));
        }
        if values.is_empty() {
            return domain("a path needs at least one node");
        }
        Ok(Self {
            t0,
            dt,
            raw: Arc::new(values.clone()),
            values,
            anchor: 0.0,
        })
    }

    fn anchored(t0: f64, dt: f64, raw: Arc<Vec<f64>>, anchor: f64) -> Self {
        let values = raw.iter().map(|&x| x - anchor).collect();
        Self {
            t0,
            dt,
            values,
            raw,
            anchor,
        }
    }

    /// Sample a function on the grid `t0 + k*dt`, `k = 0..=steps`.
    pub fn from_fn(t0: f64, dt: f64, steps: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=steps).map(|k| f(t0 + k as f64 * dt)).collect();
        Self::new(t0, dt, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of nodes (`steps + 1`).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Index of the grid node at time `t`.
    pub fn node_of(&self, t: f64) -> Result<usize> {
        node_of(self.t0, self.dt, self.len(), t)
    }

    /// Restrict to nodes `start..=end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end >= self.len() {
            return domain(format!("slice {start}..={end} outside 0..{}", self.len()));
        }
        Self::new(self.time(start), self.dt, self.values[start..=end].to_vec())
    }

    /// Keep every `factor`-th node (nested coarse grid).
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || (self.len() - 1) % factor != 0 {
            return domain(format!(
                "coarsening factor {factor} does not divide {} steps",
                self.len() - 1
            ));
        }
        let values = self.values.iter().step_by(factor).copied().collect();
        Self::new(self.t0, self.dt * factor as f64, values)
    }

    /// Pointwise `a * self + b * other` on a shared grid.
    pub fn combine(&self, a: f64, other: &ScalarPath, b: f64) -> Result<Self> {
        same_grid(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.t0, self.dt, values)
    }

    /// Same values on the grid moved to start at `t0`.
    pub fn with_t0(&self, t0: f64) -> Self {
        Self { t0, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.t0, self.dt, self.values.iter().map(|&x| f(x)).collect())
            .expect("grid already validated")
    }
}

/// Error unless both paths live on the same grid.
pub fn same_grid(a: &ScalarPath, b: &ScalarPath) -> Result<()> {
    if a.len() != b.len() || (a.t0 - b.t0).abs() > NODE_TOL * a.dt || (a.dt - b.dt).abs() > 1e-12 * a.dt
    {
        return domain(format!(
            "paths do not share a grid: (t0={}, dt={}, n={}) vs (t0={}, dt={}, n={})",
            a.t0,
            a.dt,
            a.len(),
            b.t0,
            b.dt,
            b.len()
        ));
    }
    Ok(())
}

pub(crate) fn node_of(t0: f64, dt: f64, len: usize, t: f64) -> Result<usize> {
    let x = (t - t0) / dt;
    let k = x.round();
    if (x - k).abs() > NODE_TOL {
        return domain(format!("time {t} is not a grid node (t0={t0}, dt={dt})"));
    }
    if k < 0.0 || k as usize >= len {
        return domain(format!(
            "time {t} outside the sampled horizon [{t0}, {}]",
            t0 + (len - 1) as f64 * dt
        ));
    }
    Ok(k as usize)
}

/// A V-valued path stored as one scalar series per eigenmode.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertPath {
    modes: Vec<ScalarPath>,
}

impl HilbertPath {
    pub fn new(modes: Vec<ScalarPath>) -> Result<Self> {
        let Some(first) = modes.first() else {
            return domain("a Hilbert path needs at least one mode");
        };
        for m in &modes[1..] {
            same_grid(first, m)?;
        }
        Ok(Self { modes })
    }

    /// Build from mode-major coefficient series.
    pub fn from_series(t0: f64, dt: f64, series: Vec<Vec<f64>>) -> Result<Self> {
        let modes = series
            .into_iter()
            .map(|v| ScalarPath::new(t0, dt, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(modes)
    }

    /// Identically zero path with `n_modes` modes and `steps` steps.
    pub fn zeros(t0: f64, dt: f64, steps: usize, n_modes: usize) -> Result<Self> {
        Self::from_series(t0, dt, vec![vec![0.0; steps + 1]; n_modes.max(1)])
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, i: usize) -> &ScalarPath {
        &self.modes[i]
    }

    pub fn modes(&self) -> &[ScalarPath] {
        &self.modes
    }

    pub fn t0(&self) -> f64 {
        self.modes[0].t0
    }

    pub fn dt(&self) -> f64 {
        self.modes[0].dt
    }

    pub fn len(&self) -> usize {
        self.modes[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.modes[0].time(k)
    }

    pub fn node_of(&self, t: f64) -> Result<usize> {
        self.modes[0].node_of(t)
    }

    /// Coefficient vector at node `k`.
    pub fn at(&self, k: usize) -> Vec<f64> {
        self.modes.iter().map(|m| m.values[k]).collect()
    }

    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        Self::new(
            self.modes
                .iter()
                .map(|m| m.slice(start, end))
                .collect::<Result<_>>()?,
        )
    }

    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.modes
                .iter()
                .map(|m| m.coarsen(factor))
                .collect::<Result<_>>()?,
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            modes: self.modes.iter().map(|m| m.map(|x| c * x)).collect(),
        }
    }

    /// `self - other` on a shared grid.
    pub fn sub(&self, other: &HilbertPath) -> Result<Self> {
        if self.n_modes() != other.n_modes() {
            return domain("mode count mismatch");
        }
        Self::new(
            self.modes
                .iter()
                .zip(&other.modes)
                .map(|(a, b)| a.combine(1.0, b, -1.0))
                .collect::<Result<_>>()?,
        )
    }
}

/// Validated sampling configuration for a (two-sided) fBm grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmConfig {
    pub hurst: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub seed: u64,
}

impl FbmConfig {
    /// One-sided grid on `[0, horizon]`.
    pub fn new(hurst: f64, horizon: f64, steps: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            hurst,
            t_start: 0.0,
            t_end: horizon,
            steps,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn two_sided(hurst: f64, t_start: f64, t_end: f64, steps: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            hurst,
            t_start,
            t_end,
            steps,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_hurst(self.hurst)?;
        if self.steps == 0 {
            return domain("steps must be positive");
        }
        if !(self.t_start < self.t_end) {
            return domain(format!(
                "t_start < t_end required, got [{}, {}]",
                self.t_start, self.t_end
            ));
        }
        if self.t_start > 0.0 || self.t_end < 0.0 {
            return domain("the grid must contain time 0 (t_start <= 0 <= t_end)");
        }
        self.zero_node().map(|_| ())
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    /// Index of the node at time 0.
    pub fn zero_node(&self) -> Result<usize> {
        let x = -self.t_start / self.dt();
        let k = x.round();
        if (x - k).abs() > NODE_TOL {
            return domain(format!(
                "time 0 is not a grid node for [{}, {}] with {} steps",
                self.t_start, self.t_end, self.steps
            ));
        }
        Ok(k as usize)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    fn grid_t0(&self) -> f64 {
        // time(k0) = t0 + k0*dt evaluates to exactly 0 with this t0
        -(self.zero_node().unwrap_or(0) as f64 * self.dt()) + 0.0
    }
}

/// Seed for mode `i` derived from a master seed: `splitmix64(master ^ splitmix64(i + 1))`.
pub fn mode_seed(master: u64, i: usize) -> u64 {
    splitmix64(master ^ splitmix64(i as u64 + 1))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reusable circulant (Davies–Harte) embedding for one grid and Hurst index.
#[derive(Clone)]
pub struct CirculantSampler {
    config: FbmConfig,
    /// `sqrt(lambda_k / m)` for the `m = 2n` circulant eigenvalues.
    scale: Vec<f64>,
    fft: Arc<dyn rustfft::Fft<f64>>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantSampler")
            .field("config", &self.config)
            .field("embedding_len", &self.scale.len())
            .finish()
    }
}

impl CirculantSampler {
    pub fn new(config: &FbmConfig) -> Result<Self> {
        config.validate()?;
        let n = config.steps;
        let m = 2 * n;
        let mut c: Vec<Complex64> = (0..m)
            .map(|k| {
                let lag = if k <= n { k } else { m - k };
                Complex64::new(fgn_cov_unchecked(lag as f64, config.hurst), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut c);
        let max = c.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let threshold = EIGEN_REL_TOL * max;
        let mut scale = Vec::with_capacity(m);
        for (index, z) in c.iter().enumerate() {
            let ev = z.re;
            if ev < -threshold {
                return Err(Error::Embedding {
                    index,
                    eigenvalue: ev,
                    threshold: -threshold,
                });
            }
            scale.push((ev.max(0.0) / m as f64).sqrt());
        }
        Ok(Self {
            config: config.clone(),
            scale,
            fft,
        })
    }

    pub fn config(&self) -> &FbmConfig {
        &self.config
    }

    /// Unit-step fGn increments for `seed` (length `steps`).
    pub fn unit_increments(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(s * a, s * b)
            })
            .collect();
        self.fft.process(&mut w);
        w[..self.config.steps].iter().map(|z| z.re).collect()
    }

    /// fBm path for `seed`, anchored to 0 at time 0.
    pub fn sample(&self, seed: u64) -> ScalarPath {
        let cfg = &self.config;
        let step_scale = cfg.dt().powf(cfg.hurst);
        let inc = self.unit_increments(seed);
        let mut raw = Vec::with_capacity(cfg.steps + 1);
        raw.push(0.0);
        let mut acc = 0.0;
        for x in inc {
            acc += step_scale * x;
            raw.push(acc);
        }
        let k0 = cfg.zero_node().expect("validated");
        let anchor = raw[k0];
        ScalarPath::anchored(cfg.grid_t0(), cfg.dt(), Arc::new(raw), anchor)
    }
}

/// Sample a scalar fBm path by circulant embedding.
pub fn sample_fbm_1d(config: &FbmConfig) -> Result<ScalarPath> {
    Ok(CirculantSampler::new(config)?.sample(config.seed))
}

/// Exact-covariance reference sampler based on a Cholesky factor of the
/// covariance matrix of the path values at all non-zero nodes.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    config: FbmConfig,
    /// Node indices (all except the zero node), in grid order.
    nodes: Vec<usize>,
    /// Row-major lower-triangular factor.
    factor: Vec<f64>,
}

impl CholeskySampler {
    pub fn new(config: &FbmConfig) -> Result<Self> {
        Self::with_cap(config, CHOLESKY_CAP)
    }

    pub fn with_cap(config: &FbmConfig, cap: usize) -> Result<Self> {
        config.validate()?;
        if config.steps > cap {
            return domain(format!(
                "cholesky sampler limited to {cap} steps, got {}",
                config.steps
            ));
        }
        let k0 = config.zero_node()?;
        let t0 = config.grid_t0();
        let dt = config.dt();
        let nodes: Vec<usize> = (0..=config.steps).filter(|&k| k != k0).collect();
        let times: Vec<f64> = nodes.iter().map(|&k| t0 + k as f64 * dt).collect();
        let d = nodes.len();
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                a[i * d + j] = fbm_cov_unchecked(times[i], times[j], config.hurst);
            }
        }
        let factor = cholesky_lower(&mut a, d)?;
        Ok(Self {
            config: config.clone(),
            nodes,
            factor,
        })
    }

    pub fn sample(&self, seed: u64) -> ScalarPath {
        let cfg = &self.config;
        let d = self.nodes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut values = vec![0.0; cfg.steps + 1];
        for (i, &k) in self.nodes.iter().enumerate() {
            let row = &self.factor[i * d..i * d + i + 1];
            values[k] = row.iter().zip(&z).map(|(l, x)| l * x).sum();
        }
        ScalarPath::new(cfg.grid_t0(), cfg.dt(), values).expect("validated grid")
    }
}

/// In-place Cholesky of the lower triangle of a row-major `d x d` matrix.
fn cholesky_lower(a: &mut [f64], d: usize) -> Result<Vec<f64>> {
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= a[j * d + k] * a[j * d + k];
        }
        if !(diag > 0.0) {
            return Err(Error::Factorization {
                pivot: j,
                value: diag,
            });
        }
        let ljj = diag.sqrt();
        a[j * d + j] = ljj;
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = s / ljj;
        }
        for k in j + 1..d {
            a[j * d + k] = 0.0;
        }
    }
    Ok(a.to_vec())
}

/// Sample a scalar fBm path from the exact Cholesky factor (steps ≤ 2048).
pub fn sample_fbm_cholesky(config: &FbmConfig) -> Result<ScalarPath> {
    Ok(CholeskySampler::new(config)?.sample(config.seed))
}

/// Nonnegative trace-class weights `q_i` of the covariance operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceWeights {
    q: Vec<f64>,
}

impl TraceWeights {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return domain("trace weights need at least one mode");
        }
        if let Some(bad) = q.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return domain(format!("trace weights must be finite and nonnegative, got {bad}"));
        }
        Ok(Self { q })
    }

    /// `q_i = i^{-exponent}`, `i = 1..=n`. Summable for `exponent > 1`.
    pub fn power_law(n: usize, exponent: f64) -> Result<Self> {
        if exponent <= 1.0 {
            return domain(format!(
                "power-law weights need exponent > 1 to be trace class, got {exponent}"
            ));
        }
        Self::new((1..=n).map(|i| (i as f64).powf(-exponent)).collect())
    }

    /// Default weights `q_i = i^{-2}`.
    pub fn default_for(n: usize) -> Self {
        Self::power_law(n, 2.0).expect("valid exponent")
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.q.iter().sum()
    }
}

/// V-valued fBm `sum_i sqrt(q_i) beta_i e_i` with independent modes seeded by [`mode_seed`].
pub fn sample_fbm_hilbert(config: &FbmConfig, weights: &TraceWeights) -> Result<HilbertPath> {
    let sampler = CirculantSampler::new(config)?;
    let modes = par::map_range(weights.len(), |i| {
        let q = weights.q[i];
        let path = sampler.sample(mode_seed(config.seed, i));
        if q == 0.0 {
            path.map(|_| 0.0)
        } else {
            let s = q.sqrt();
            path.map(|x| s * x)
        }
    });
    HilbertPath::new(modes)
}

/// Wiener shift `theta_tau`.
pub trait WienerShift: Sized {
    /// `p(s) = omega(tau + s) - omega(tau)` on the relabelled grid.
    fn wiener_shift(&self, tau: f64) -> Result<Self>;
}

impl WienerShift for ScalarPath {
    fn wiener_shift(&self, tau: f64) -> Result<Self> {
        let k = self.node_of(tau)?;
        Ok(ScalarPath::anchored(
            self.t0 - tau,
            self.dt,
            Arc::clone(&self.raw),
            self.raw[k],
        ))
    }
}

impl WienerShift for HilbertPath {
    fn wiener_shift(&self, tau: f64) -> Result<Self> {
        Ok(Self {
            modes: self
                .modes
                .iter()
                .map(|m| m.wiener_shift(tau))
                .collect::<Result<_>>()?,
        })
    }
}

/// Free-function form of [`WienerShift::wiener_shift`].
pub fn wiener_shift<P: WienerShift>(path: &P, tau: f64) -> Result<P> {
    path.wiener_shift(tau)
}
