//! Seeded sampling on `S^{n-1} ∩ K` and on great spheres `v^⟂ ∩ S^{n-1}`.

use nalgebra::DVector;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cone::Cone;
use crate::error::{Error, Result};

pub type SeededRng = ChaCha8Rng;

/// Probability that an orthant draw has a random subset of coordinates zeroed.
pub const BOUNDARY_PROBABILITY: f64 = 0.25;

const MAX_RETRIES: usize = 100;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for batch `index` of a run seeded with `seed`. Fixed arithmetic, so
/// results never depend on how batches are scheduled.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn normal_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point on `S^{n-1}`.
pub fn sample_unit_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let g = normal_vector(n, rng);
        let norm = g.norm();
        if norm > 1e-8 {
            return g / norm;
        }
    }
}

/// Random unit vector of `K`.
///
/// Orthant: absolute values of a Gaussian draw; with probability
/// [`BOUNDARY_PROBABILITY`] only a random nonempty proper subset of the
/// coordinates is kept, so faces and basis vectors are hit. Generated cones:
/// a random nonnegative combination of the generators.
pub fn sample_unit_in_cone<R: Rng + ?Sized>(cone: &Cone, rng: &mut R) -> Result<DVector<f64>> {
    match cone {
        Cone::NonnegOrthant { n } => {
            let n = *n;
            let mut v = normal_vector(n, rng).map(f64::abs);
            if n > 1 && rng.random::<f64>() < BOUNDARY_PROBABILITY {
                let keep = rng.random_range(1..n);
                let mut mask = vec![false; n];
                for i in sample_indices(rng, n, keep).iter() {
                    mask[i] = true;
                }
                for (vi, keep) in v.iter_mut().zip(mask) {
                    if !keep {
                        *vi = 0.0;
                    }
                }
            }
            for _ in 0..MAX_RETRIES {
                let norm = v.norm();
                if norm > 1e-12 {
                    return Ok(v / norm);
                }
                v = normal_vector(n, rng).map(f64::abs);
            }
            Err(Error::SamplingFailure(MAX_RETRIES))
        }
        Cone::Generated { generators } => {
            let n = cone.dim();
            for _ in 0..MAX_RETRIES {
                let mut v = DVector::zeros(n);
                for g in generators {
                    let w: f64 = rng.sample::<f64, _>(StandardNormal).abs();
                    v.axpy(w, g, 1.0);
                }
                let norm = v.norm();
                if norm > 1e-12 {
                    return Ok(v / norm);
                }
            }
            Err(Error::SamplingFailure(MAX_RETRIES))
        }
    }
}

/// Uniform unit vector orthogonal to the unit vector `v`.
pub fn sample_orthogonal_partner<R: Rng + ?Sized>(v: &DVector<f64>, rng: &mut R) -> DVector<f64> {
    loop {
        let mut g = normal_vector(v.len(), rng);
        let p = g.dot(v);
        g.axpy(-p, v, 1.0);
        // second pass keeps <u, v> at rounding level
        let p = g.dot(v);
        g.axpy(-p, v, 1.0);
        let norm = g.norm();
        if norm > 1e-8 {
            return g / norm;
        }
    }
}

/// Sample with the orthant boundary mask forced to keep exactly the listed coordinates.
pub fn masked_orthant_sample<R: Rng + ?Sized>(n: usize, keep: &[usize], rng: &mut R) -> DVector<f64> {
    loop {
        let mut v = DVector::zeros(n);
        for &i in keep {
            v[i] = rng.sample::<f64, _>(StandardNormal).abs();
        }
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}
