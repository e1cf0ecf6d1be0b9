use nalgebra::{DMatrix, DVector};

use super::smallest_eigenvalue;
use crate::error::{Error, Result};
use crate::instance::quad_form;

/// `P_x = I - x x^T`, the orthogonal projector onto `x^⟂` (for unit `x`).
pub fn projector_p(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::identity(n, n) - x * x.transpose()
}

/// `Q_x = x x^T`.
pub fn projector_q(x: &DVector<f64>) -> DMatrix<f64> {
    x * x.transpose()
}

/// `lambda_min(P_x A P_x + <Ar,r> Q_x)` for positive definite `A`, unit `x`
/// and unit `r ⟂ x`.
///
/// The value equals the minimum of `<Au,u>` over unit `u ⟂ x`. Indefinite
/// matrices are rejected with [`Error::NotPositiveDefinite`]; shift them by a
/// multiple of the identity first.
pub fn projection_formula_lambda_min(a: &DMatrix<f64>, x: &DVector<f64>, r: &DVector<f64>) -> Result<f64> {
    let n = x.len();
    if a.nrows() != n || r.len() != n {
        return Err(Error::Shape("dimensions of A, x and r disagree".into()));
    }
    if (x.norm() - 1.0).abs() > 1e-8 || (r.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition("x and r must be unit vectors".into()));
    }
    if r.dot(x).abs() > 1e-10 {
        return Err(Error::Precondition(format!("r is not orthogonal to x (<r,x> = {:e})", r.dot(x))));
    }
    let (lmin, _) = smallest_eigenvalue(a)?;
    if lmin <= 0.0 {
        return Err(Error::NotPositiveDefinite(lmin));
    }
    let p = projector_p(x);
    let lambda = quad_form(a, r);
    let m = &p * a * &p + projector_q(x) * lambda;
    let m = (&m + m.transpose()) * 0.5;
    Ok(smallest_eigenvalue(&m)?.0)
}
