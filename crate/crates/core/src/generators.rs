//! Instance families that are convex by a known certificate, violated at a
//! known pair, or unstructured.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::certificates::{bipos_constant, decomposition_bounds};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::QuadraticInstance;
use crate::sampling::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gap,
    DiagIff,
    Bipos,
    Cd,
    Random,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Gap, Family::DiagIff, Family::Bipos, Family::Cd, Family::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gap => "gap",
            Family::DiagIff => "diag-iff",
            Family::Bipos => "bipos",
            Family::Cd => "cd",
            Family::Random => "random",
        }
    }

    /// Registry name of the certificate a convex member of the family fires.
    pub fn target_certificate(self) -> Option<&'static str> {
        match self {
            Family::Gap => Some("thlt.vi.gap"),
            Family::DiagIff => Some("iffdiag"),
            Family::Bipos => Some("bipos"),
            Family::Cd => Some("cd.iii"),
            Family::Random => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::field("family", format!("unknown family `{s}` (gap, diag-iff, bipos, cd, random)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    pub family: Family,
    pub target_certificate: Option<String>,
    /// `None` when the family does not determine convexity.
    pub expect_convex: Option<bool>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub instance: QuadraticInstance,
    pub cone: Cone,
    pub meta: GeneratorMeta,
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}

fn uniform_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
    (&m + m.transpose()) * 0.5
}

fn abs_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample::<f64, _>(StandardNormal).abs()
}

/// Random `A`, and `b` below the spectral-gap bound `2√n(λ_min - λ_max)`.
pub fn gen_gap<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuadraticInstance> {
    check_dim(n)?;
    let a = uniform_symmetric(n, rng);
    let probe = QuadraticInstance::new(a.clone(), DVector::zeros(n), 0.0)?;
    let bound = 2.0 * (n as f64).sqrt() * (probe.lambda_min() - probe.lambda_max());
    let b = DVector::from_fn(n, |_, _| bound - abs_normal(rng));
    QuadraticInstance::new(a, b, 0.0)
}

/// Diagonal `A` whose minimum is attained at least twice. With `convex`, every
/// `b_i` is at or below `2(min d - d_i)`; otherwise exactly one coordinate
/// exceeds its bound by a margin in `[0.05, 0.5]`.
pub fn gen_diag_iff<R: Rng + ?Sized>(n: usize, rng: &mut R, convex: bool) -> Result<QuadraticInstance> {
    check_dim(n)?;
    let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let first = d.iter().position(|&x| x == min).expect("nonempty");
    let mut twin = rng.random_range(0..n - 1);
    if twin >= first {
        twin += 1;
    }
    d[twin] = min;
    let mut b: Vec<f64> = d
        .iter()
        .map(|&di| {
            let slack = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..1.0) };
            2.0 * (min - di) - slack
        })
        .collect();
    if !convex {
        let k = rng.random_range(0..n);
        b[k] = 2.0 * (min - d[k]) + rng.random_range(0.05..=0.5);
    }
    QuadraticInstance::diagonal(&d, &b, 0.0)
}

/// Diagonal `A` with a unique minimum `d_1` and constant tail `d_1 + gap`;
/// `b` is positive at the minimum (in `(0, 2 gap]`) and `-2·gap·β` elsewhere,
/// `β = √(6√3 - 9)`.
pub fn gen_bipos<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuadraticInstance> {
    check_dim(n)?;
    let d1 = rng.random_range(-2.0..=2.0);
    let gap = rng.random_range(0.25..=2.0);
    let t = rng.random_range(0..n);
    let beta = bipos_constant();
    let mut d = vec![d1 + gap; n];
    let mut b = vec![-2.0 * gap * beta; n];
    d[t] = d1;
    // 1 - U with U in [0, 1) lands in (0, 1].
    b[t] = 2.0 * gap * (1.0 - rng.random::<f64>());
    QuadraticInstance::diagonal(&d, &b, 0.0)
}

/// Random `A`, and `b` below the decomposition bound
/// `-2a_kk⁺ - 2Σ_{i≠k} a_ii⁻ - 4Σ_{i≠j}|a_ij|`.
pub fn gen_cd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuadraticInstance> {
    check_dim(n)?;
    let a = uniform_symmetric(n, rng);
    let (_, coarse) = decomposition_bounds(&a);
    let b = DVector::from_fn(n, |k, _| coarse[k] - rng.random_range(0.0..0.5));
    QuadraticInstance::new(a, b, 0.0)
}

/// Uniform `A` entries in `[-1, 1]`, standard normal `b` and `c`.
pub fn gen_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuadraticInstance> {
    check_dim(n)?;
    let a = uniform_symmetric(n, rng);
    let b = DVector::from_fn(n, |_, _| rng.sample(StandardNormal));
    let c = rng.sample(StandardNormal);
    QuadraticInstance::new(a, b, c)
}

/// One instance of `family` on the nonnegative orthant. `convex` only matters
/// for [`Family::DiagIff`].
pub fn generate(family: Family, n: usize, seed: u64, convex: bool) -> Result<GeneratedInstance> {
    let mut rng = rng_from_seed(seed);
    let instance = match family {
        Family::Gap => gen_gap(n, &mut rng)?,
        Family::DiagIff => gen_diag_iff(n, &mut rng, convex)?,
        Family::Bipos => gen_bipos(n, &mut rng)?,
        Family::Cd => gen_cd(n, &mut rng)?,
        Family::Random => gen_random(n, &mut rng)?,
    };
    let expect_convex = match family {
        Family::Random => None,
        Family::DiagIff => Some(convex),
        _ => Some(true),
    };
    Ok(GeneratedInstance {
        instance,
        cone: Cone::orthant(n),
        meta: GeneratorMeta {
            family,
            target_certificate: family.target_certificate().map(String::from),
            expect_convex,
            seed,
        },
    })
}
