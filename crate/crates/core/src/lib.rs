//! Pathwise integration and mild solutions for evolution equations driven by
//! fractional Brownian motion.
//!
//! * [`fbm`] samples scalar and Hilbert-valued fBm and applies the Wiener shift.
//! * [`holder`] computes Hölder seminorms and the weighted modified norms.
//! * [`fraccalc`] evaluates Weyl fractional derivatives and the Zähle integral.
//! * [`semigroup`] is the spectral analytic semigroup and its estimates.
//! * [`coefficients`] is the diagonal noise coefficient `G`.
//! * [`solver`] runs Picard iteration for the mild equation and the certification checks.

pub mod coefficients;
pub mod error;
pub mod fbm;
pub mod fraccalc;
pub mod holder;
pub mod io;
pub mod par;
pub mod semigroup;
pub mod solver;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use fbm::{FbmConfig, HilbertPath, ScalarPath, TraceWeights, WienerShift};
pub use holder::{HolderParams, NormReport, Window};
