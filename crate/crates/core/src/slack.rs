//! Pointwise slacks of the two pair characterizations of spherical convexity.
//!
//! `f` is spherically convex on `S ∩ K` exactly when [`foc_slack`] is
//! nonnegative for every unit `u ⟂ v` with `v ∈ K`, and exactly when
//! [`soc_slack`] is nonnegative for every pair of unit `x, y ∈ K`.

use nalgebra::DVector;

use crate::instance::{bilinear, quad_form, QuadraticInstance};

/// `<Au,u> - <Av,v> - <b,v>/2`.
///
/// Callers pass unit `u ⟂ v`; this is only checked in debug builds.
pub fn foc_slack(inst: &QuadraticInstance, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    debug_assert!((u.norm() - 1.0).abs() < 1e-8, "u is not a unit vector");
    debug_assert!((v.norm() - 1.0).abs() < 1e-8, "v is not a unit vector");
    debug_assert!(u.dot(v).abs() < 1e-8, "u and v are not orthogonal");
    quad_form(inst.a(), u) - quad_form(inst.a(), v) - 0.5 * inst.b().dot(v)
}

/// `2<x,y>(<Ax,x> + <Ay,y>) + (<x,y> - 1)<b, x+y> - 4<Ax,y>` for unit `x, y ∈ K`.
pub fn soc_slack(inst: &QuadraticInstance, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let a = inst.a();
    let s = x.dot(y);
    let bxy = inst.b().dot(x) + inst.b().dot(y);
    2.0 * s * (quad_form(a, x) + quad_form(a, y)) + (s - 1.0) * bxy - 4.0 * bilinear(a, x, y)
}
