//! Diagonal Nemytskii noise coefficient `G(u) = diag(μ_i h(u_i))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};

/// Scalar profile `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Identity,
    Tanh,
    Constant,
    Affine { a: f64, b: f64 },
}

impl Profile {
    pub fn h(&self, x: f64) -> f64 {
        match *self {
            Profile::Identity => x,
            Profile::Tanh => x.tanh(),
            Profile::Constant => 1.0,
            Profile::Affine { a, b } => a + b * x,
        }
    }

    pub fn sup_dh(&self) -> f64 {
        match *self {
            Profile::Identity | Profile::Tanh => 1.0,
            Profile::Constant => 0.0,
            Profile::Affine { b, .. } => b.abs(),
        }
    }

    pub fn sup_d2h(&self) -> f64 {
        match *self {
            // max of |2 tanh x sech² x| at tanh² x = 1/3
            Profile::Tanh => 4.0 / (3.0 * 3f64.sqrt()),
            _ => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Identity => "identity",
            Profile::Tanh => "tanh",
            Profile::Constant => "constant",
            Profile::Affine { .. } => "affine",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;
    /// `identity`, `tanh`, `constant` or `affine:a:b`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Profile::Identity),
            "tanh" => Ok(Profile::Tanh),
            "constant" => Ok(Profile::Constant),
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() == 3 && parts[0] == "affine" {
                    let a = parts[1].parse::<f64>();
                    let b = parts[2].parse::<f64>();
                    if let (Ok(a), Ok(b)) = (a, b) {
                        return Ok(Profile::Affine { a, b });
                    }
                }
                domain(format!(
                    "unknown profile '{s}' (expected identity, tanh, constant or affine:a:b)"
                ))
            }
        }
    }
}

/// `G(u) = diag(μ_i h(u_i))` with its Lipschitz constants.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalNemytskii {
    mus: Vec<f64>,
    profile: Profile,
    c_g: f64,
    c_dg: f64,
    c_d2g: f64,
}

impl DiagonalNemytskii {
    pub fn new(mus: Vec<f64>, profile: Profile) -> Result<Self> {
        if mus.is_empty() || mus.iter().any(|m| !m.is_finite()) {
            return domain("mus must be a nonempty vector of finite reals");
        }
        let h0 = profile.h(0.0);
        let c_g = mus.iter().map(|m| m * m * h0 * h0).sum::<f64>().sqrt();
        let mu_max = mus.iter().map(|m| m.abs()).fold(0.0, f64::max);
        Ok(Self {
            c_g,
            c_dg: mu_max * profile.sup_dh(),
            c_d2g: mu_max * profile.sup_d2h(),
            mus,
            profile,
        })
    }

    /// `μ_i = i^{-decay}`.
    pub fn power_law(n: usize, decay: f64, profile: Profile) -> Result<Self> {
        Self::new((1..=n).map(|i| (i as f64).powf(-decay)).collect(), profile)
    }

    /// Scalar `G(u) = σ h(u)`.
    pub fn scalar(sigma: f64, profile: Profile) -> Result<Self> {
        Self::new(vec![sigma], profile)
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0.0; n], Profile::Constant).expect("finite")
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn n_modes(&self) -> usize {
        self.mus.len()
    }

    pub fn c_g(&self) -> f64 {
        self.c_g
    }

    pub fn c_dg(&self) -> f64 {
        self.c_dg
    }

    pub fn c_d2g(&self) -> f64 {
        self.c_d2g
    }

    pub fn is_zero(&self) -> bool {
        self.mus.iter().all(|m| *m == 0.0)
    }

    /// Diagonal entry `i` of `G(x e_i)` evaluated at coefficient `x`.
    #[inline]
    pub fn entry(&self, i: usize, x: f64) -> f64 {
        self.mus[i] * self.profile.h(x)
    }

    /// Diagonal entries of `G(u)`.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.mus.len() {
            return domain(format!(
                "vector has {} coefficients but G has {} modes",
                u.len(),
                self.mus.len()
            ));
        }
        Ok(u.iter().enumerate().map(|(i, &x)| self.entry(i, x)).collect())
    }
}

/// Free-function form of [`DiagonalNemytskii::apply`].
#[allow(non_snake_case)]
pub fn apply_G(g: &DiagonalNemytskii, u: &[f64]) -> Result<Vec<f64>> {
    g.apply(u)
}

/// Hilbert–Schmidt norm of a diagonal operator.
pub fn hs_norm(diag: &[f64]) -> f64 {
    norm(diag)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Outcome of the three-inequality certification.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Report {
    pub profile: &'static str,
    pub samples: usize,
    /// Violations of the growth, Lipschitz and second-difference inequalities.
    pub violations: [usize; 3],
    /// Largest `lhs / rhs` per inequality.
    pub max_ratio: [f64; 3],
}

impl Lemma4Report {
    pub fn passed(&self) -> bool {
        self.violations.iter().all(|v| *v == 0)
    }
}

const INEQUALITIES: [&str; 3] = ["growth", "lipschitz", "second difference"];

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 4.0 * f64::EPSILON) + 4.0 * f64::MIN_POSITIVE
}

/// Random certification of the growth, Lipschitz and second-difference bounds.
/// Returns a certification error naming the first violated inequality and sample.
pub fn lemma4_certify(g: &DiagonalNemytskii, sample_count: usize, seed: u64) -> Result<Lemma4Report> {
    if sample_count == 0 {
        return domain("sample_count must be at least 1");
    }
    let n = g.n_modes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let scale = 10f64.powf(rng.random_range(-2.0..1.0));
        (0..n)
            .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect()
    };
    let mut report = Lemma4Report {
        profile: g.profile().name(),
        samples: sample_count,
        violations: [0; 3],
        max_ratio: [0.0; 3],
    };
    let mut first: Option<(usize, usize, f64, f64)> = None;
    for s in 0..sample_count {
        let u1 = draw(&mut rng);
        let u2 = draw(&mut rng);
        let mut v1 = draw(&mut rng);
        let mut v2 = draw(&mut rng);
        // pull some pairs close together so the small-difference regime is covered
        if s % 4 == 1 {
            v1 = u1.iter().zip(&v1).map(|(a, b)| a + 1e-3 * b).collect();
            v2 = u2.iter().zip(&v2).map(|(a, b)| a + 1e-3 * b).collect();
        }
        let gu1 = g.apply(&u1)?;
        let gu2 = g.apply(&u2)?;
        let gv1 = g.apply(&v1)?;
        let gv2 = g.apply(&v2)?;
        let d1 = diff(&u1, &v1);
        let d2 = diff(&u2, &v2);
        let lhs = [
            norm(&gu1),
            norm(&diff(&gu1, &gv1)),
            norm(&diff(&diff(&gu1, &gv1), &diff(&gu2, &gv2))),
        ];
        let rhs = [
            g.c_g() + g.c_dg() * norm(&u1),
            g.c_dg() * norm(&d1),
            g.c_dg() * norm(&diff(&d1, &d2)) + g.c_d2g() * norm(&diff(&u1, &u2)) * (norm(&d1) + norm(&d2)),
        ];
        for k in 0..3 {
            if lhs[k] > 0.0 {
                report.max_ratio[k] = report.max_ratio[k].max(lhs[k] / rhs[k]);
            }
            if !holds(lhs[k], rhs[k]) {
                report.violations[k] += 1;
                if first.is_none() {
                    first = Some((k, s, lhs[k], rhs[k]));
                }
            }
        }
    }
    if let Some((k, s, l, r)) = first {
        return Err(Error::Certification {
            check: format!("G {} inequality ({})", INEQUALITIES[k], report.profile),
            detail: format!(
                "sample {s}: lhs {l:e} > rhs {r:e}; {} violations in {sample_count} samples",
                report.violations.iter().sum::<usize>()
            ),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants_follow_formulas() {
        let g = DiagonalNemytskii::power_law(4, 1.0, Profile::Constant).unwrap();
        let expect = (1.0f64 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0).sqrt();
        assert_relative_eq!(g.c_g(), expect, max_relative = 1e-15);
        assert_eq!(g.c_dg(), 0.0);
        let t = DiagonalNemytskii::new(vec![0.5, -2.0], Profile::Tanh).unwrap();
        assert_eq!(t.c_g(), 0.0);
        assert_eq!(t.c_dg(), 2.0);
        assert_relative_eq!(t.c_d2g(), 2.0 * 0.769800358919501, max_relative = 1e-14);
    }

    #[test]
    fn apply_examples() {
        let g = DiagonalNemytskii::power_law(3, 1.0, Profile::Constant).unwrap();
        assert_eq!(g.apply(&[5.0, -1.0, 2.0]).unwrap(), vec![1.0, 0.5, 1.0 / 3.0]);
        let id = DiagonalNemytskii::power_law(3, 1.0, Profile::Identity).unwrap();
        assert_eq!(id.apply(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        let th = DiagonalNemytskii::power_law(2, 1.0, Profile::Tanh).unwrap();
        let e = th.apply(&[10.0, 10.0]).unwrap();
        assert_relative_eq!(e[0], 0.9999999958776927, max_relative = 1e-15);
        assert_relative_eq!(e[1], 0.5 * 0.9999999958776927, max_relative = 1e-15);
        assert!(th.apply(&[1.0]).is_err());
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("tanh".parse::<Profile>().unwrap(), Profile::Tanh);
        assert_eq!(
            "affine:1:-2".parse::<Profile>().unwrap(),
            Profile::Affine { a: 1.0, b: -2.0 }
        );
        assert!("cubic".parse::<Profile>().is_err());
    }

    #[test]
    fn certify_small() {
        for p in [Profile::Identity, Profile::Constant, Profile::Tanh] {
            let g = DiagonalNemytskii::power_law(8, 1.0, p).unwrap();
            assert!(lemma4_certify(&g, 500, 1).unwrap().passed());
        }
        let g = DiagonalNemytskii::power_law(8, 1.0, Profile::Tanh).unwrap();
        assert!(lemma4_certify(&g, 0, 1).is_err());
    }
}
