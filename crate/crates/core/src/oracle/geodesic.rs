use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::OracleConfig;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::{basis, bilinear, quad_form, QuadraticInstance};
use crate::sampling::{child_seed, rng_from_seed, sample_orthogonal_partner, sample_unit_in_cone};
use crate::witness::WitnessPair;

const GRID: usize = 64;
const MIN_ARC: f64 = 1e-6;
const DEMO_MAX_ITERS: usize = 20_000;

fn require_orthant(cone: &Cone) -> Result<()> {
    if cone.is_orthant() {
        Ok(())
    } else {
        Err(Error::Precondition("only implemented for the nonnegative orthant".into()))
    }
}

/// `(f∘γ)''(t)` for `γ(t) = cos t·x + sin t·v` with orthonormal `x, v`:
/// `-2cos2t(<Ax,x> - <Av,v>) - 4sin2t<Ax,v> - cos t<b,x> - sin t<b,v>`.
pub fn geodesic_second_derivative(inst: &QuadraticInstance, x: &DVector<f64>, v: &DVector<f64>, t: f64) -> f64 {
    let a = inst.a();
    let b = inst.b();
    let (s2, c2) = (2.0 * t).sin_cos();
    let (s, c) = t.sin_cos();
    -2.0 * c2 * (quad_form(a, x) - quad_form(a, v)) - 4.0 * s2 * bilinear(a, x, v) - c * b.dot(x) - s * b.dot(v)
}

/// Largest `T <= π` such that `cos t·x + sin t·v >= 0` on `[0, T]`, for
/// `x` in the orthant. Coordinate `i` is `r_i cos(t - φ_i)` and leaves the
/// orthant at `φ_i + π/2`.
pub fn geodesic_range(x: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let mut end = PI;
    for (&xi, &vi) in x.iter().zip(v.iter()) {
        if xi.hypot(vi) == 0.0 {
            continue;
        }
        let phi = vi.atan2(xi.max(0.0));
        end = end.min(phi + FRAC_PI_2);
    }
    end.max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicScan {
    pub geodesics_checked: usize,
    pub min_second_derivative: f64,
    /// `(γ'(t), γ(t))` at the first violating grid point.
    pub witness: Option<WitnessPair>,
}

/// Checks `(f∘γ)'' >= -tol` on a grid along random geodesic arcs that stay in
/// the orthant.
pub fn geodesic_scan(inst: &QuadraticInstance, cone: &Cone, config: &OracleConfig) -> Result<GeodesicScan> {
    require_orthant(cone)?;
    let tol = config.abs_tol(inst);
    let base = child_seed(config.seed, 0x6765_6f64);
    let results: Vec<Result<(f64, Option<WitnessPair>)>> = (0..config.geodesic_count as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(child_seed(base, k));
            let x = sample_unit_in_cone(cone, &mut rng)?;
            let mut v = sample_orthogonal_partner(&x, &mut rng);
            let mut end = geodesic_range(&x, &v);
            let back = geodesic_range(&x, &(-&v));
            if back > end {
                v = -v;
                end = back;
            }
            if end < MIN_ARC {
                return Ok((f64::INFINITY, None));
            }
            let mut min = f64::INFINITY;
            for g in 0..GRID {
                let t = end * g as f64 / (GRID - 1) as f64;
                let d2 = geodesic_second_derivative(inst, &x, &v, t);
                min = min.min(d2);
                if d2 < -tol {
                    let (s, c) = t.sin_cos();
                    let point = (&x * c + &v * s).map(|p| p.max(0.0));
                    let point = &point / point.norm();
                    let tangent = &v * c - &x * s;
                    let tangent = &tangent - &point * tangent.dot(&point);
                    let tangent = &tangent / tangent.norm();
                    return Ok((min, Some(WitnessPair::new(inst, &tangent, &point))));
                }
            }
            Ok((min, None))
        })
        .collect();
    let mut scan = GeodesicScan {
        geodesics_checked: 0,
        min_second_derivative: f64::INFINITY,
        witness: None,
    };
    for r in results {
        let (min, witness) = r?;
        scan.geodesics_checked += 1;
        scan.min_second_derivative = scan.min_second_derivative.min(min);
        if scan.witness.is_none() {
            scan.witness = witness;
        }
    }
    Ok(scan)
}

fn project(x: &DVector<f64>) -> Option<DVector<f64>> {
    let p = x.map(|v| v.max(0.0));
    let norm = p.norm();
    (norm > 1e-300).then(|| p / norm)
}

/// Projected Riemannian gradient descent of `f` on `S ∩ R^n_+` from `x0`.
fn descend(inst: &QuadraticInstance, x0: DVector<f64>) -> (f64, DVector<f64>) {
    let mut x = x0;
    let mut fx = inst.value(&x);
    for _ in 0..DEMO_MAX_ITERS {
        let g = inst.gradient(&x);
        let rg = &g - &x * g.dot(&x);
        let mut alpha = 1.0 / (1.0 + inst.a_norm_fro());
        let mut moved = false;
        while alpha > 1e-16 {
            let Some(y) = project(&(&x - &rg * alpha)) else {
                alpha *= 0.5;
                continue;
            };
            let fy = inst.value(&y);
            let dist2 = (&y - &x).norm_squared();
            if fy <= fx - 1e-4 * dist2 / alpha && dist2 > 0.0 {
                let step = dist2.sqrt();
                x = y;
                fx = fy;
                moved = step > 1e-13;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (fx, x)
}

/// Multistart descent of `f` over `S ∩ R^n_+`; one `(value, point)` per start.
///
/// Starts are the basis vectors, the uniform vector, then random points,
/// truncated to `starts`. On a spherically convex instance every local
/// minimizer is global, so all values coincide.
pub fn minimize_f_demo(
    inst: &QuadraticInstance,
    cone: &Cone,
    starts: usize,
    seed: u64,
) -> Result<Vec<(f64, DVector<f64>)>> {
    require_orthant(cone)?;
    let n = inst.n();
    let mut points: Vec<DVector<f64>> = (0..n).map(|i| basis(n, i)).collect();
    points.push(DVector::from_element(n, 1.0 / (n as f64).sqrt()));
    let mut rng = rng_from_seed(child_seed(seed, 0x6465_6d6f));
    while points.len() < starts {
        points.push(sample_unit_in_cone(cone, &mut rng)?);
    }
    points.truncate(starts);
    Ok(points.into_par_iter().map(|x| descend(inst, x)).collect())
}

/// `max - min` of the values returned by [`minimize_f_demo`].
pub fn value_spread(results: &[(f64, DVector<f64>)]) -> f64 {
    let max = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let min = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    max - min
}
