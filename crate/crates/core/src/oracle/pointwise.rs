use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use super::OracleConfig;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::{basis, bilinear, quad_form, QuadraticInstance};
use crate::linalg::RestrictedOperator;
use crate::sampling::{child_seed, rng_from_seed, sample_unit_in_cone, sample_unit_sphere};
use crate::witness::WitnessPair;

/// Interior margin required by [`liminf_estimate`] on the orthant.
pub const INTERIOR_MARGIN: f64 = 1e-6;

const LIMINF_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const PATTERN_MIN_STEP: f64 = 1e-9;
const H_SAMPLES_GENERATED: usize = 10_000;

fn check_unit(x: &DVector<f64>) -> Result<()> {
    if (x.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition("point is not a unit vector".into()));
    }
    Ok(())
}

/// `h(x) = min_{u ⟂ x} <Au,u> - <Ax,x> - <b,x>/2`.
///
/// `h(x) >= 0` for every unit `x ∈ K` exactly when `f` is spherically convex.
pub fn pointwise_h(inst: &QuadraticInstance, cone: &Cone, x: &DVector<f64>) -> Result<f64> {
    check_unit(x)?;
    if !cone.contains(x) {
        return Err(Error::Precondition("point is not in the cone".into()));
    }
    Ok(h_unchecked(inst, x))
}

fn h_unchecked(inst: &QuadraticInstance, x: &DVector<f64>) -> f64 {
    let op = RestrictedOperator::new(inst.a(), x).expect("unit point of matching dimension");
    op.lambda_min().0 - quad_form(inst.a(), x) - 0.5 * inst.b().dot(x)
}

/// The pair `(u*, x)` where `u*` minimizes `<Au,u>` over unit `u ⟂ x`; its
/// slack equals `h(x)`.
pub fn witness_at(inst: &QuadraticInstance, x: &DVector<f64>) -> Result<WitnessPair> {
    check_unit(x)?;
    let x = x / x.norm();
    let (_, u) = RestrictedOperator::new(inst.a(), &x)?.lambda_min();
    Ok(WitnessPair::new(inst, &u, &x))
}

fn chart(w: &DVector<f64>) -> DVector<f64> {
    let sq = w.map(|v| v * v);
    let norm = sq.norm();
    sq / norm
}

/// Compass search for a local minimum of `h(w²/||w²||)` from `w0`.
fn pattern_search(inst: &QuadraticInstance, w0: DVector<f64>, budget: usize) -> (f64, DVector<f64>) {
    let n = w0.len();
    let mut w = w0;
    let mut best = h_unchecked(inst, &chart(&w));
    let mut evals = 1;
    let mut step = 0.5;
    while evals < budget && step > PATTERN_MIN_STEP {
        let mut improved = false;
        'dirs: for k in 0..n {
            for sign in [1.0, -1.0] {
                if evals >= budget {
                    break 'dirs;
                }
                let mut trial = w.clone();
                trial[k] += sign * step;
                if trial.norm_squared() < 1e-300 {
                    continue;
                }
                let value = h_unchecked(inst, &chart(&trial));
                evals += 1;
                if value < best {
                    best = value;
                    w = trial;
                    improved = true;
                    break 'dirs;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        // keep the chart well scaled
        let norm = w.norm();
        w /= norm;
    }
    (best, chart(&w))
}

/// Multistart derivative-free minimization of `h` over `S^{n-1} ∩ K`.
///
/// Orthant: compass search in the chart `x = w²/||w²||` from every basis
/// vector, the uniform vector and `multistart_count` random points.
/// Generated cones: the minimum of `h` over sampled points and normalized
/// generators.
pub fn minimize_h(inst: &QuadraticInstance, cone: &Cone, config: &OracleConfig) -> Result<(f64, DVector<f64>)> {
    let n = inst.n();
    let seed = child_seed(config.seed, 0x6d69_6e5f_6800);
    match cone {
        Cone::NonnegOrthant { .. } => {
            let mut starts: Vec<DVector<f64>> = (0..n).map(|i| basis(n, i)).collect();
            starts.push(DVector::from_element(n, 1.0 / (n as f64).sqrt()));
            let mut rng = rng_from_seed(seed);
            for _ in 0..config.multistart_count {
                starts.push(sample_unit_in_cone(cone, &mut rng)?);
            }
            let results: Vec<(f64, DVector<f64>)> = starts
                .into_par_iter()
                .map(|x| pattern_search(inst, x.map(f64::sqrt), config.descent_max_iters))
                .collect();
            Ok(results
                .into_iter()
                .reduce(|a, b| if b.0 < a.0 { b } else { a })
                .expect("at least n starts"))
        }
        Cone::Generated { generators } => {
            let mut points: Vec<DVector<f64>> = generators.iter().map(|g| g / g.norm()).collect();
            let mut rng = rng_from_seed(seed);
            for _ in 0..H_SAMPLES_GENERATED {
                points.push(sample_unit_in_cone(cone, &mut rng)?);
            }
            Ok(points
                .into_par_iter()
                .map(|x| (h_unchecked(inst, &x), x))
                .collect::<Vec<_>>()
                .into_iter()
                .reduce(|a, b| if b.0 < a.0 { b } else { a })
                .expect("at least one generator"))
        }
    }
}

/// Estimate of `liminf_{y → x} <A(y-x), y-x>/||y-x||²` over `y` on the sphere
/// and in `K`, from `samples` random directions.
///
/// Each direction contributes the Richardson extrapolation to `t = 0` of the
/// quotients at the two smallest step lengths, which removes the `O(t)` bias
/// of the raw quotient; the minimum over directions is returned.
pub fn liminf_estimate<R: Rng + ?Sized>(
    inst: &QuadraticInstance,
    cone: &Cone,
    x: &DVector<f64>,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_unit(x)?;
    let interior = match cone {
        Cone::NonnegOrthant { .. } => x.iter().all(|&v| v >= INTERIOR_MARGIN),
        Cone::Generated { .. } => cone.contains(x),
    };
    if !interior {
        return Err(Error::Precondition("liminf is only estimated at interior points".into()));
    }
    let a = inst.a();
    let quotient = |w: &DVector<f64>, t: f64| -> Option<f64> {
        let y = x + w * t;
        let y = &y / y.norm();
        if !cone.contains(&y) {
            return None;
        }
        let d = &y - x;
        let dd = d.norm_squared();
        (dd > 0.0).then(|| quad_form(a, &d) / dd)
    };
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let w = sample_unit_sphere(inst.n(), rng);
        let q: Vec<Option<f64>> = LIMINF_STEPS.iter().map(|&t| quotient(&w, t)).collect();
        let estimate = match (q[1], q[2]) {
            (Some(q1), Some(q2)) => {
                let ratio = LIMINF_STEPS[2] / (LIMINF_STEPS[1] - LIMINF_STEPS[2]);
                q2 + (q2 - q1) * ratio
            }
            (_, Some(q2)) => q2,
            _ => continue,
        };
        best = best.min(estimate);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::SamplingFailure(samples))
    }
}

/// Slack of the non-orthogonal pair condition:
/// `[<Av,v> - 2s<Av,x> + (2s² - 1)<Ax,x>]/(1 - s²) - <b,x>/2` with `s = <v,x>`.
///
/// It equals the first-order slack of `(w, x)` where `w` is `v` projected onto
/// `x^⟂` and normalized.
pub fn bx_slack(inst: &QuadraticInstance, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let s = v.dot(x);
    if s.abs() >= 1.0 - 1e-12 {
        return Err(Error::Precondition("v is too close to ±x".into()));
    }
    let a = inst.a();
    let rhs = (quad_form(a, v) - 2.0 * s * bilinear(a, v, x) + (2.0 * s * s - 1.0) * quad_form(a, x)) / (1.0 - s * s);
    Ok(rhs - 0.5 * inst.b().dot(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slack::foc_slack;

    fn diag(d: &[f64], b: &[f64]) -> QuadraticInstance {
        QuadraticInstance::diagonal(d, b, 0.0).unwrap()
    }

    #[test]
    fn h_examples() {
        let k = Cone::orthant(3);
        let mut rng = rng_from_seed(4);
        let id = diag(&[1.0; 3], &[0.0; 3]);
        for _ in 0..20 {
            let x = sample_unit_in_cone(&k, &mut rng).unwrap();
            assert!(pointwise_h(&id, &k, &x).unwrap().abs() < 1e-14);
        }
        let e3 = basis(3, 2);
        let h = pointwise_h(&diag(&[1.0, 1.0, 2.0], &[0.0, 0.0, -2.0]), &k, &e3).unwrap();
        assert!(h.abs() < 1e-14);
        let h = pointwise_h(&diag(&[1.0, 2.0, 3.0], &[0.0; 3]), &k, &e3).unwrap();
        assert!((h + 2.0).abs() < 1e-14);
        assert!(pointwise_h(&id, &k, &(-e3)).is_err());
    }

    #[test]
    fn minimize_h_examples() {
        let k = Cone::orthant(3);
        let cfg = OracleConfig::with_seed(3);
        let (h, _) = minimize_h(&diag(&[1.0; 3], &[0.0; 3]), &k, &cfg).unwrap();
        assert!(h.abs() < 1e-13);
        let (h, x) = minimize_h(&diag(&[1.0, 1.0, 2.0], &[0.0, 0.0, -2.0]), &k, &cfg).unwrap();
        assert!(h.abs() < 1e-9, "h = {h}");
        assert!((x.norm() - 1.0).abs() < 1e-12);
        let (h, x) = minimize_h(&diag(&[1.0, 1.0, 2.0], &[0.0, 0.0, -1.8]), &k, &cfg).unwrap();
        assert!(h <= -0.1 + 1e-12, "h = {h}");
        assert!(x[2] > 0.9);
    }

    #[test]
    fn witness_at_matches_h() {
        let inst = QuadraticInstance::from_rows(
            &[vec![0.2, 0.9, -0.3], vec![0.9, -1.0, 0.1], vec![-0.3, 0.1, 0.5]],
            &[0.3, -0.2, 0.1],
            0.0,
        )
        .unwrap();
        let x = DVector::from_vec(vec![0.6, 0.0, 0.8]);
        let w = witness_at(&inst, &x).unwrap();
        let h = pointwise_h(&inst, &Cone::orthant(3), &x).unwrap();
        assert!((w.slack - h).abs() < 1e-12);
    }

    #[test]
    fn liminf_identity_and_precondition() {
        let k = Cone::orthant(3);
        let id = diag(&[1.0; 3], &[0.0; 3]);
        let x = DVector::from_element(3, 1.0 / 3f64.sqrt());
        let mut rng = rng_from_seed(8);
        let est = liminf_estimate(&id, &k, &x, 100, &mut rng).unwrap();
        assert!((est - 1.0).abs() < 1e-8);
        assert!(liminf_estimate(&id, &k, &basis(3, 0), 10, &mut rng).is_err());
    }

    #[test]
    fn liminf_approaches_restricted_eigenvalue() {
        let k = Cone::orthant(3);
        let inst = diag(&[1.0, 2.0, 3.0], &[0.0; 3]);
        let x = DVector::from_element(3, 1.0 / 3f64.sqrt());
        let target = crate::linalg::restricted_lambda_min(inst.a(), &x).unwrap();
        let est = liminf_estimate(&inst, &k, &x, 10_000, &mut rng_from_seed(2)).unwrap();
        assert!(est >= target - 1e-3);
        assert!((est - target).abs() < 1e-2, "{est} vs {target}");
    }

    #[test]
    fn bx_reduces_to_foc_at_orthogonal_pairs() {
        let inst = QuadraticInstance::from_rows(
            &[vec![0.2, 0.9, -0.3], vec![0.9, -1.0, 0.1], vec![-0.3, 0.1, 0.5]],
            &[0.3, -0.2, 0.1],
            0.0,
        )
        .unwrap();
        let mut rng = rng_from_seed(6);
        for _ in 0..1000 {
            let x = sample_unit_in_cone(&Cone::orthant(3), &mut rng).unwrap();
            let v = crate::sampling::sample_orthogonal_partner(&x, &mut rng);
            let bx = bx_slack(&inst, &x, &v).unwrap();
            assert!((bx - foc_slack(&inst, &v, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn bx_equals_foc_of_projected_direction() {
        let inst = diag(&[1.0; 3], &[0.0; 3]);
        let mut rng = rng_from_seed(9);
        for _ in 0..100 {
            let x = sample_unit_in_cone(&Cone::orthant(3), &mut rng).unwrap();
            let v = sample_unit_sphere(3, &mut rng);
            assert!(bx_slack(&inst, &x, &v).unwrap().abs() < 1e-12);
        }
        assert!(bx_slack(&inst, &basis(3, 0), &basis(3, 0)).is_err());
    }
}
