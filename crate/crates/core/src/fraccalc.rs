//! Weyl fractional derivatives on grids and the Zähle pathwise integral.
//!
//! Both derivatives treat the path as the piecewise-linear interpolant of its
//! nodal values and integrate the singular kernels exactly cell by cell, so
//! constants and linear functions are reproduced to rounding.
//!
//! The integral splits each derivative into its endpoint singularity and a
//! bounded remainder,
//!
//! ```text
//! D^α z      = cL x^{-α} + L̃,     x = r - T1,  cL = z(T1) / Γ(1-α)
//! D^{1-α} ζ  = cR y^α    + R̃,     y = T2 - r,  cR = -ζ'(T2-) / Γ(1+α)
//! ```
//!
//! integrates `x^{-α} y^α` in closed form, the cross terms with exact product
//! weights, and `L̃ R̃` by the trapezoid rule.
//!
//! Nodal sampling of `L̃ R̃` misses the cusps both derivatives develop inside
//! each cell. Writing `z = z(T1) + Σ_a Δz_a ψ_a` with unit ramps `ψ_a` across
//! cell `a`, the error of the nodal rule is
//!
//! ```text
//! z(T1) Σ_b f(b) Δζ_b + Σ_{a ≤ b} e(a, b) Δz_a Δζ_b
//! ```
//!
//! with kernels that depend only on `α` and on distances to the window ends.
//! For rough paths the diagonal part adds up to a multiple of the quadratic
//! covariation, so the rule is corrected with the full kernels. The corrected
//! rule integrates the piecewise-linear interpolants exactly.

use crate::error::{domain, Result};
use crate::fbm::{same_grid, HilbertPath, ScalarPath, WienerShift};
use crate::holder::Window;
use crate::par;
use crate::special::{beta, gamma, hat_weights, moment};

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        domain(format!("fractional order must lie in (0,1), got {alpha}"))
    }
}

/// Cell kernels for one order `α`, step `h` and up to `n` steps.
#[derive(Debug, Clone)]
pub struct Kernels {
    pub(crate) alpha: f64,
    pub(crate) h: f64,
    pub(crate) n: usize,
    pub(crate) inv_g1ma: f64,
    pub(crate) inv_ga: f64,
    pub(crate) inv_g1pa: f64,
    pub(crate) beta_sing: f64,
    // left, indexed by d = m - j
    k1: Vec<f64>,
    k2: Vec<f64>,
    // right, indexed by e = j - m
    k3: Vec<f64>,
    k4: Vec<f64>,
    /// `(d h)^{-α}`
    pub(crate) xpow: Vec<f64>,
    /// `(e h)^{α-1}`
    ybdry: Vec<f64>,
    /// `(e h)^α`
    pub(crate) ysing: Vec<f64>,
    pub(crate) wx: Vec<f64>,
    pub(crate) wy: Vec<f64>,
    /// interior error kernel by lag, length `n`
    pub(crate) inner: Vec<f64>,
    /// last-cell error kernel by lag, length `n`
    pub(crate) elast: Vec<f64>,
    /// constant-part error of interior cell `b`, length `n`
    pub(crate) fconst: Vec<f64>,
    /// constant-part error of the last cell of an `m`-step window, length `n + 1`
    pub(crate) flast: Vec<f64>,
}

impl Kernels {
    pub fn new(alpha: f64, h: f64, n: usize) -> Result<Self> {
        let mut k = Self::bare(alpha, h, n)?;
        k.inner = error_kernel(alpha, n)?;
        k.edge_kernels();
        Ok(k)
    }

    fn bare(alpha: f64, h: f64, n: usize) -> Result<Self> {
        check_order(alpha)?;
        if !(h > 0.0) || n == 0 {
            return domain(format!("kernels need h > 0 and n > 0, got h={h}, n={n}"));
        }
        let a = alpha;
        let lscale = a * h.powf(-a);
        let rscale = (1.0 - a) * h.powf(a - 1.0);
        let mut k1 = vec![0.0; n + 1];
        let mut k2 = vec![0.0; n + 1];
        for d in 1..=n {
            let e = (d - 1) as f64;
            if d > 1 {
                k1[d] = lscale * moment(-1.0 - a, e, 0);
            }
            k2[d] = lscale * moment(-1.0 - a, e, 1);
        }
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        for e in 0..n {
            if e > 0 {
                k3[e] = rscale * moment(a - 2.0, e as f64, 0);
            }
            k4[e] = -rscale * moment(a - 2.0, e as f64, 1);
        }
        let pw = |p: f64| -> Vec<f64> {
            (0..=n)
                .map(|d| if d == 0 { 0.0 } else { (d as f64 * h).powf(p) })
                .collect()
        };
        Ok(Self {
            alpha,
            h,
            n,
            inv_g1ma: 1.0 / gamma(1.0 - a),
            inv_ga: 1.0 / gamma(a),
            inv_g1pa: 1.0 / gamma(1.0 + a),
            beta_sing: beta(1.0 - a, 1.0 + a),
            k1,
            k2,
            k3,
            k4,
            xpow: pw(-a),
            ybdry: pw(a - 1.0),
            ysing: pw(a),
            wx: hat_weights(-a, h, n),
            wy: hat_weights(a, h, n),
            inner: Vec::new(),
            elast: Vec::new(),
            fconst: Vec::new(),
            flast: Vec::new(),
        })
    }

    // Nodal-rule errors that involve the last cell or the constant part, from
    // the remainders of an up-ramp at the window start, an interior ramp and
    // the last-cell ramp.
    fn edge_kernels(&mut self) {
        let n = self.n;
        let h = self.h;
        let up: Vec<f64> = (0..=n).map(|m| if m == 0 { 0.0 } else { 1.0 }).collect();
        let ell = left_part(self, &up).tilde;
        let last: Vec<f64> = (0..=n).map(|m| if m == n { 1.0 } else { 0.0 }).collect();
        let rl = right_part(self, &last);
        let mut elast = vec![0.0; n];
        for (d, e) in elast.iter_mut().enumerate() {
            let a = n - 1 - d;
            let mut acc = 0.0;
            for j in 1..=d + 1 {
                acc += rl.c * self.wy[d + 1 - j] * ell[j];
            }
            for j in 1..=d {
                acc += h * ell[j] * rl.tilde[a + j];
            }
            *e = -acc - if d == 0 { 0.5 } else { 1.0 };
        }
        let mut fconst = vec![0.0; n];
        if n >= 2 {
            // ramp across cell n-2; its right derivative at distance i before the rise end
            let inner: Vec<f64> = (0..=n).map(|m| if m <= n - 2 { 0.0 } else { 1.0 }).collect();
            let r = right_values(self, &inner);
            for (b, f) in fconst.iter_mut().enumerate().take(n - 1) {
                let mut acc = 0.0;
                for m in 0..=b {
                    acc += self.wx[m] * r[n - 2 - b + m];
                }
                *f = -self.inv_g1ma * acc - 1.0;
            }
        }
        let mut flast = vec![0.0; n + 1];
        for (mw, f) in flast.iter_mut().enumerate().skip(1) {
            let mut acc = rl.c * mw as f64 * h * self.beta_sing;
            for m in 0..mw {
                acc += self.wx[m] * rl.tilde[n - mw + m];
            }
            *f = -self.inv_g1ma * acc - 1.0;
        }
        self.elast = elast;
        self.fconst = fconst;
        self.flast = flast;
    }

    /// Total correction of the nodal rule on a window with nodal values `z`, `w`.
    pub(crate) fn correction(&self, z: &[f64], w: &[f64]) -> f64 {
        let n = z.len() - 1;
        let dw_last = w[n] - w[n - 1];
        let mut last = 0.0;
        for (d, e) in self.elast.iter().enumerate().take(n) {
            last += e * (z[n - d] - z[n - 1 - d]);
        }
        let mut konst = self.flast[n] * dw_last;
        for b in 0..n - 1 {
            konst += self.fconst[b] * (w[b + 1] - w[b]);
        }
        self.inner_correction(z, w) + dw_last * last + z[0] * konst
    }

    /// Error kernel of the nodal rule by lag.
    pub fn error_kernel(&self) -> &[f64] {
        &self.inner
    }

    /// `Σ_b Δζ_b Σ_d e(d) Δz_{b-d}` over all cells but the last of a window.
    pub(crate) fn inner_correction(&self, z: &[f64], w: &[f64]) -> f64 {
        let n = z.len() - 1;
        let mut acc = 0.0;
        for b in 0..n.saturating_sub(1) {
            let dw = w[b + 1] - w[b];
            if dw == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for (d, e) in self.inner.iter().enumerate().take(b + 1) {
                let a = b - d;
                s += e * (z[a + 1] - z[a]);
            }
            acc += dw * s;
        }
        acc
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_steps(&self) -> usize {
        self.n
    }

    /// Integral part of the left derivative at node `m`, times `Γ(1-α)`:
    /// `α ∫_0^{x_m} (z(x_m) - z(q)) (x_m - q)^{-1-α} dq`.
    pub(crate) fn left_sum(&self, m: usize, z: impl Fn(usize) -> f64) -> f64 {
        let zm = z(m);
        let mut acc = 0.0;
        let mut next = zm;
        // cells j = m-1 down to 0
        for d in 1..=m {
            let j = m - d;
            let zj = z(j);
            acc += (zm - next) * self.k1[d] + (next - zj) * self.k2[d];
            next = zj;
        }
        acc
    }

    /// Cell term of the right derivative: contribution of cell `j` to node `m`.
    #[inline]
    pub(crate) fn right_cell(&self, wm: f64, wj: f64, wj1: f64, e: usize) -> f64 {
        (wm - wj) * self.k3[e] + (wj1 - wj) * self.k4[e]
    }

    /// Boundary term `(ω_m - ω_end) (e h)^{α-1}` at distance `e` from the end.
    #[inline]
    pub(crate) fn right_boundary(&self, wm: f64, wend: f64, e: usize) -> f64 {
        (wm - wend) * self.ybdry[e]
    }
}

// Nodal-rule error on unit ramps: e(d) = Q(ψ_a, ψ_{a+d}) - ∫ψ_a dψ_{a+d}, where ψ_a
// rises from 0 to 1 across cell a. Only L̃ R̃ sees interior ramps, so
// e(0) = -1/2 and e(d) = -Σ_{j=1}^d ℓ(j) r(d+1-j) - 1 with ℓ, r the remainders
// at distance j after the rise and i before it on a unit grid.
fn error_kernel(alpha: f64, len: usize) -> Result<Vec<f64>> {
    let b = len.max(1);
    let n = b + 2;
    let k = Kernels::bare(alpha, 1.0, n)?;
    let up: Vec<f64> = (0..=n).map(|m| if m == 0 { 0.0 } else { 1.0 }).collect();
    let ell = left_part(&k, &up).tilde;
    let down: Vec<f64> = (0..=n).map(|m| if m <= b { 0.0 } else { 1.0 }).collect();
    let r = right_values(&k, &down);
    let mut out = vec![0.0; len];
    for (d, e) in out.iter_mut().enumerate() {
        if d == 0 {
            *e = -0.5;
            continue;
        }
        let mut s = 0.0;
        for j in 1..=d {
            s += ell[j] * r[b + j - d];
        }
        *e = -s - 1.0;
    }
    Ok(out)
}

/// Left derivative split into singular coefficient and remainder on `n+1` nodes.
#[derive(Debug, Clone)]
pub(crate) struct LeftPart {
    pub c: f64,
    /// `L̃` at nodes `0..=n`; `L̃[0] = 0`.
    pub tilde: Vec<f64>,
}

/// Right derivative split into singular coefficient and remainder on `n+1` nodes.
#[derive(Debug, Clone)]
pub(crate) struct RightPart {
    pub c: f64,
    /// `R̃` at nodes `0..=n`; the last two entries are 0.
    pub tilde: Vec<f64>,
}

pub(crate) fn left_part(k: &Kernels, z: &[f64]) -> LeftPart {
    let n = z.len() - 1;
    let z0 = z[0];
    let mut tilde = par::map_range(n + 1, |m| {
        if m == 0 {
            0.0
        } else {
            k.inv_g1ma * ((z[m] - z0) * k.xpow[m] + k.left_sum(m, |j| z[j]))
        }
    });
    tilde[0] = 0.0;
    LeftPart {
        c: z0 * k.inv_g1ma,
        tilde,
    }
}

/// Real bracket of the right derivative at nodes `0..n` (node `n` excluded).
fn right_values(k: &Kernels, w: &[f64]) -> Vec<f64> {
    let n = w.len() - 1;
    let wn = w[n];
    par::map_range(n, |m| {
        let wm = w[m];
        let mut acc = k.right_boundary(wm, wn, n - m);
        for j in m..n {
            acc += k.right_cell(wm, w[j], w[j + 1], j - m);
        }
        k.inv_ga * acc
    })
}

pub(crate) fn right_part(k: &Kernels, w: &[f64]) -> RightPart {
    let n = w.len() - 1;
    let c = right_sing_coeff(k, w[n - 1], w[n]);
    let vals = right_values(k, w);
    let mut tilde: Vec<f64> = vals
        .iter()
        .enumerate()
        .map(|(m, r)| r - c * k.ysing[n - m])
        .collect();
    tilde[n - 1] = 0.0;
    tilde.push(0.0);
    RightPart { c, tilde }
}

#[inline]
pub(crate) fn right_sing_coeff(k: &Kernels, w_prev: f64, w_end: f64) -> f64 {
    -(w_end - w_prev) / k.h * k.inv_g1pa
}

/// `∫ L R` over a window of `n` steps from the split parts (no sign flip).
pub(crate) fn combine(k: &Kernels, n: usize, l: &LeftPart, r: &RightPart) -> f64 {
    let x_end = n as f64 * k.h;
    let mut acc = l.c * r.c * x_end * k.beta_sing;
    if l.c != 0.0 {
        let mut s = 0.0;
        for m in 0..n {
            s += k.wx[m] * r.tilde[m];
        }
        acc += l.c * s;
    }
    if r.c != 0.0 {
        let mut s = 0.0;
        for m in 1..=n {
            s += k.wy[n - m] * l.tilde[m];
        }
        acc += r.c * s;
    }
    let mut s = 0.0;
    for m in 1..n {
        s += l.tilde[m] * r.tilde[m];
    }
    acc + k.h * s
}

/// Per-node samples of a fractional derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct FracDerivSamples {
    pub t1: f64,
    pub t2: f64,
    pub order: f64,
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

impl FracDerivSamples {
    pub const CSV_HEADER: &'static str = "r,value";

    pub fn write_csv<W: std::io::Write>(&self, w: &mut W, sep: char) -> std::io::Result<()> {
        writeln!(w, "r{sep}value")?;
        for (r, v) in self.r.iter().zip(&self.values) {
            writeln!(w, "{}", crate::io::join_row(&[*r, *v], sep))?;
        }
        Ok(())
    }
}

fn window_values(path: &ScalarPath, w: Window) -> Result<&[f64]> {
    if w.start >= w.end || w.end >= path.len() {
        return domain(format!(
            "window [{}, {}] not inside a path with {} nodes",
            w.start,
            w.end,
            path.len()
        ));
    }
    Ok(&path.values()[w.start..=w.end])
}

/// `D^α_{T1+} z` at the nodes of `(T1, T2]`.
pub fn weyl_left(z: &ScalarPath, alpha: f64, w: Window) -> Result<FracDerivSamples> {
    check_order(alpha)?;
    let v = window_values(z, w)?;
    let n = w.steps();
    let k = Kernels::new(alpha, z.dt(), n)?;
    let lp = left_part(&k, v);
    let values = (1..=n).map(|m| lp.c * k.xpow[m] + lp.tilde[m]).collect();
    Ok(FracDerivSamples {
        t1: z.time(w.start),
        t2: z.time(w.end),
        order: alpha,
        r: (w.start + 1..=w.end).map(|m| z.time(m)).collect(),
        values,
    })
}

/// Real bracket of `D^{1-α}_{T2-} ω_{T2-}` at the nodes of `[T1, T2)`.
pub fn weyl_right_minus(omega: &ScalarPath, alpha: f64, w: Window) -> Result<FracDerivSamples> {
    check_order(alpha)?;
    let v = window_values(omega, w)?;
    let k = Kernels::new(alpha, omega.dt(), w.steps())?;
    Ok(FracDerivSamples {
        t1: omega.time(w.start),
        t2: omega.time(w.end),
        order: 1.0 - alpha,
        r: (w.start..w.end).map(|m| omega.time(m)).collect(),
        values: right_values(&k, v),
    })
}

/// Zähle integral `∫_{T1}^{T2} z dζ`.
pub fn zahle_integral_scalar(z: &ScalarPath, zeta: &ScalarPath, alpha: f64, w: Window) -> Result<f64> {
    same_grid(z, zeta)?;
    let zv = window_values(z, w)?;
    let wv = window_values(zeta, w)?;
    let n = w.steps();
    let k = Kernels::new(alpha, z.dt(), n)?;
    let lp = left_part(&k, zv);
    let rp = right_part(&k, wv);
    Ok(-combine(&k, n, &lp, &rp) - k.correction(zv, wv))
}

/// Zähle integral between two grid times.
pub fn zahle_integral_between(z: &ScalarPath, zeta: &ScalarPath, alpha: f64, t1: f64, t2: f64) -> Result<f64> {
    let w = Window::new(z.node_of(t1)?, z.node_of(t2)?)?;
    zahle_integral_scalar(z, zeta, alpha, w)
}

/// Left-point Riemann–Stieltjes sum over the whole grid.
pub fn riemann_stieltjes_oracle(z: &ScalarPath, zeta: &ScalarPath) -> Result<f64> {
    same_grid(z, zeta)?;
    let zv = z.values();
    let wv = zeta.values();
    Ok((0..zv.len() - 1).map(|k| zv[k] * (wv[k + 1] - wv[k])).sum())
}

/// `|∫_{T1}^{T2} + ∫_{T2}^{T3} - ∫_{T1}^{T3}|`.
pub fn additivity_defect(
    z: &ScalarPath,
    zeta: &ScalarPath,
    alpha: f64,
    t1: f64,
    t2: f64,
    t3: f64,
) -> Result<f64> {
    if !(t1 < t2 && t2 < t3) {
        return domain(format!("need T1 < T2 < T3, got {t1}, {t2}, {t3}"));
    }
    let a = zahle_integral_between(z, zeta, alpha, t1, t2)?;
    let b = zahle_integral_between(z, zeta, alpha, t2, t3)?;
    let c = zahle_integral_between(z, zeta, alpha, t1, t3)?;
    Ok((a + b - c).abs())
}

/// Operator-valued integrand: per-node Hilbert–Schmidt operators in the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorPath {
    /// Entry `i` is the path of `z_ii`.
    Diagonal(Vec<ScalarPath>),
    /// Row-major `N × N` entries, `entries[j * N + i]` is `z_ji`.
    Dense { n_modes: usize, entries: Vec<ScalarPath> },
}

impl OperatorPath {
    pub fn diagonal(entries: Vec<ScalarPath>) -> Result<Self> {
        check_shared(&entries)?;
        Ok(Self::Diagonal(entries))
    }

    pub fn dense(n_modes: usize, entries: Vec<ScalarPath>) -> Result<Self> {
        if n_modes == 0 || entries.len() != n_modes * n_modes {
            return domain(format!(
                "dense operator path needs {} entries, got {}",
                n_modes * n_modes,
                entries.len()
            ));
        }
        check_shared(&entries)?;
        Ok(Self::Dense { n_modes, entries })
    }

    /// Constant-in-time diagonal operator.
    pub fn constant_diagonal(diag: &[f64], t0: f64, dt: f64, steps: usize) -> Result<Self> {
        let entries = diag
            .iter()
            .map(|&d| ScalarPath::new(t0, dt, vec![d; steps + 1]))
            .collect::<Result<_>>()?;
        Self::diagonal(entries)
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Self::Diagonal(e) => e.len(),
            Self::Dense { n_modes, .. } => *n_modes,
        }
    }

    fn first(&self) -> &ScalarPath {
        match self {
            Self::Diagonal(e) => &e[0],
            Self::Dense { entries, .. } => &entries[0],
        }
    }

    pub fn len(&self) -> usize {
        self.first().len()
    }

    pub fn is_empty(&self) -> bool {
        self.first().is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.first().dt()
    }

    pub fn t0(&self) -> f64 {
        self.first().t0()
    }

    /// Entry `z_ji`; `None` for structural zeros.
    pub fn entry(&self, j: usize, i: usize) -> Option<&ScalarPath> {
        match self {
            Self::Diagonal(e) => (i == j).then(|| &e[i]),
            Self::Dense { n_modes, entries } => Some(&entries[j * n_modes + i]),
        }
    }

    /// Hilbert–Schmidt (Frobenius) norm at node `k`.
    pub fn hs_norm(&self, k: usize) -> f64 {
        let entries = match self {
            Self::Diagonal(e) => e,
            Self::Dense { entries, .. } => entries,
        };
        entries
            .iter()
            .map(|p| p.values()[k].powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `r ↦ Z(r + τ)`: same values with the grid moved back by `τ`.
    pub fn time_shift(&self, tau: f64) -> Self {
        let shift = |e: &Vec<ScalarPath>| e.iter().map(|p| p.with_t0(p.t0() - tau)).collect();
        match self {
            Self::Diagonal(e) => Self::Diagonal(shift(e)),
            Self::Dense { n_modes, entries } => Self::Dense {
                n_modes: *n_modes,
                entries: shift(entries),
            },
        }
    }
}

fn check_shared(entries: &[ScalarPath]) -> Result<()> {
    if entries.is_empty() {
        return domain("operator path needs at least one mode");
    }
    for e in &entries[1..] {
        same_grid(&entries[0], e)?;
    }
    Ok(())
}

/// `∫_{T1}^{T2} Z dω` as a coefficient vector: component `j` is `Σ_i ∫ z_ji dω_i`.
pub fn zahle_integral_hilbert(z: &OperatorPath, omega: &HilbertPath, alpha: f64, w: Window) -> Result<Vec<f64>> {
    let n_modes = z.n_modes();
    if omega.n_modes() != n_modes {
        return domain(format!(
            "operator has {n_modes} modes but the driver has {}",
            omega.n_modes()
        ));
    }
    same_grid(z.first(), omega.mode(0))?;
    let n = w.steps();
    for i in 0..n_modes {
        window_values(omega.mode(i), w)?;
    }
    let k = Kernels::new(alpha, omega.dt(), n)?;
    let rights: Vec<RightPart> = par::map_range(n_modes, |i| {
        right_part(&k, &omega.mode(i).values()[w.start..=w.end])
    });
    let out = par::map_range(n_modes, |j| {
        let mut acc = 0.0;
        for (i, rp) in rights.iter().enumerate() {
            if let Some(zji) = z.entry(j, i) {
                let zv = &zji.values()[w.start..=w.end];
                let lp = left_part(&k, zv);
                acc += -combine(&k, n, &lp, rp) - k.correction(zv, &omega.mode(i).values()[w.start..=w.end]);
            }
        }
        acc
    });
    Ok(out)
}

/// `|∫_{T1}^{T2} Z dω - ∫_{T1-τ}^{T2-τ} Z(· + τ) dθ_τ ω|`.
pub fn shift_covariance_defect(
    z: &OperatorPath,
    omega: &HilbertPath,
    tau: f64,
    alpha: f64,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    let w = Window::new(omega.node_of(t1)?, omega.node_of(t2)?)?;
    let lhs = zahle_integral_hilbert(z, omega, alpha, w)?;
    let zs = z.time_shift(tau);
    let ws = omega.wiener_shift(tau)?;
    let w2 = Window::new(ws.node_of(t1 - tau)?, ws.node_of(t2 - tau)?)?;
    let rhs = zahle_integral_hilbert(&zs, &ws, alpha, w2)?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(n: usize, f: impl Fn(f64) -> f64) -> ScalarPath {
        ScalarPath::from_fn(0.0, 1.0 / n as f64, n, f).unwrap()
    }

    #[test]
    fn left_of_constant() {
        let z = unit(64, |_| 2.0);
        let d = weyl_left(&z, 0.4, Window::full(&z).unwrap()).unwrap();
        for (r, v) in d.r.iter().zip(&d.values) {
            assert_relative_eq!(*v, 2.0 / (gamma(0.6) * r.powf(0.4)), max_relative = 1e-13);
        }
    }

    #[test]
    fn left_of_identity() {
        let z = unit(64, |t| t);
        let d = weyl_left(&z, 0.4, Window::full(&z).unwrap()).unwrap();
        assert_relative_eq!(*d.values.last().unwrap(), 1.0 / gamma(1.6), max_relative = 1e-12);
        assert_relative_eq!(1.0 / gamma(1.6), 1.1191749540701224, max_relative = 1e-13);
        for (r, v) in d.r.iter().zip(&d.values) {
            assert_relative_eq!(*v, r.powf(0.6) / gamma(1.6), max_relative = 1e-12);
        }
    }

    #[test]
    fn right_of_identity() {
        let w = unit(64, |t| t);
        let d = weyl_right_minus(&w, 0.4, Window::full(&w).unwrap()).unwrap();
        assert_relative_eq!(d.values[0], -1.0 / gamma(1.4), max_relative = 1e-12);
        assert_relative_eq!(-1.0 / gamma(1.4), -1.1270604979860275, max_relative = 1e-13);
        for (r, v) in d.r.iter().zip(&d.values) {
            assert_relative_eq!(*v, -(1.0 - r).powf(0.4) / gamma(1.4), max_relative = 1e-12);
        }
    }

    #[test]
    fn right_of_constant_is_zero() {
        let w = unit(32, |_| 5.0);
        let d = weyl_right_minus(&w, 0.3, Window::full(&w).unwrap()).unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn order_validation() {
        let w = unit(8, |t| t);
        assert!(weyl_left(&w, 0.0, Window::full(&w).unwrap()).is_err());
        assert!(weyl_right_minus(&w, 1.0, Window::full(&w).unwrap()).is_err());
    }

    #[test]
    fn unit_integrand_linear_integrator_is_exact() {
        let z = unit(128, |_| 1.0);
        let w = unit(128, |t| 3.0 * t - 1.0);
        let v = zahle_integral_scalar(&z, &w, 0.4, Window::full(&z).unwrap()).unwrap();
        assert_relative_eq!(v, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn identity_against_identity() {
        let z = unit(1024, |t| t);
        let v = zahle_integral_scalar(&z, &z, 0.45, Window::full(&z).unwrap()).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-10);
    }

    fn trapezoid(z: &[f64], w: &[f64]) -> f64 {
        (0..z.len() - 1).map(|k| 0.5 * (z[k] + z[k + 1]) * (w[k + 1] - w[k])).sum()
    }

    #[test]
    fn short_windows_integrate_interpolants_exactly() {
        // within BAND steps every kernel entry is exact, so the rule returns the
        // integral of the piecewise-linear interpolants
        let n = 60;
        let z = unit(n, |t| (37.0 * t).sin() + 2.0 * (91.0 * t * t).cos());
        let w = unit(n, |t| (53.0 * t).cos() * t + (17.0 * t).sin());
        for alpha in [0.3, 0.45, 0.6] {
            for (a, b) in [(0, n), (7, 41), (40, 43), (59, 60)] {
                let win = Window::new(a, b).unwrap();
                let v = zahle_integral_scalar(&z, &w, alpha, win).unwrap();
                let t = trapezoid(&z.values()[a..=b], &w.values()[a..=b]);
                assert_relative_eq!(v, t, epsilon = 1e-12, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = unit(16, |t| t);
        let b = unit(32, |t| t);
        assert!(zahle_integral_scalar(&a, &b, 0.4, Window::new(0, 16).unwrap()).is_err());
    }

    #[test]
    fn additivity_ordering() {
        let a = unit(16, |t| t);
        assert!(additivity_defect(&a, &a, 0.4, 0.5, 0.25, 1.0).is_err());
    }

    #[test]
    fn oracle_basic() {
        let z = unit(1024, |t| t);
        assert!((riemann_stieltjes_oracle(&z, &z).unwrap() - 0.5).abs() < 1e-3);
        let one = unit(1024, |_| 1.0);
        let w = unit(1024, |t| (5.0 * t).sin());
        assert_eq!(
            riemann_stieltjes_oracle(&one, &w).unwrap(),
            w.values().windows(2).map(|p| p[1] - p[0]).sum::<f64>()
        );
    }

    #[test]
    fn hilbert_zero_and_identity() {
        let omega = HilbertPath::from_series(
            0.0,
            1.0 / 64.0,
            vec![
                (0..=64).map(|k| (k as f64 / 64.0).sqrt()).collect(),
                (0..=64).map(|k| (k as f64 / 10.0).sin()).collect(),
            ],
        )
        .unwrap();
        let w = Window::full(&omega).unwrap();
        let zero = OperatorPath::constant_diagonal(&[0.0, 0.0], 0.0, 1.0 / 64.0, 64).unwrap();
        assert_eq!(zahle_integral_hilbert(&zero, &omega, 0.4, w).unwrap(), vec![0.0, 0.0]);
        let id = OperatorPath::constant_diagonal(&[1.0, 1.0], 0.0, 1.0 / 64.0, 64).unwrap();
        let v = zahle_integral_hilbert(&id, &omega, 0.4, w).unwrap();
        for i in 0..2 {
            let m = omega.mode(i).values();
            assert_relative_eq!(v[i], m[64] - m[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_matches_diagonal() {
        let n = 64;
        let a = unit(n, |t| 1.0 + t * t);
        let b = unit(n, |t| t.cos());
        let zero = unit(n, |_| 0.0);
        let omega = HilbertPath::new(vec![unit(n, |t| t.sin()), unit(n, |t| t * t * t)]).unwrap();
        let w = Window::new(0, n).unwrap();
        let diag = OperatorPath::diagonal(vec![a.clone(), b.clone()]).unwrap();
        let dense = OperatorPath::dense(2, vec![a, zero.clone(), zero, b]).unwrap();
        let x = zahle_integral_hilbert(&diag, &omega, 0.4, w).unwrap();
        let y = zahle_integral_hilbert(&dense, &omega, 0.4, w).unwrap();
        assert_eq!(x, y);
    }
}
