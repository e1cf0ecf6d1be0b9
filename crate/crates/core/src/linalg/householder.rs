use nalgebra::{DMatrix, DVector};

use super::smallest_eigenvalue;
use crate::error::{Error, Result};

/// Orthonormal basis of `x^⟂` (as the columns of an `n x (n-1)` matrix) from the
/// Householder reflection sending `x` to `±e^pivot`, with column `pivot` dropped.
pub fn complement_basis(x: &DVector<f64>, pivot: usize) -> DMatrix<f64> {
    let n = x.len();
    let sign = if x[pivot] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = x.clone();
    w[pivot] += sign;
    let ww = w.norm_squared();
    let mut basis = DMatrix::zeros(n, n - 1);
    let mut col = 0;
    for j in 0..n {
        if j == pivot {
            continue;
        }
        let scale = 2.0 * w[j] / ww;
        for i in 0..n {
            basis[(i, col)] = if i == j { 1.0 } else { 0.0 } - scale * w[i];
        }
        col += 1;
    }
    basis
}

/// `A` restricted to the tangent hyperplane `x^⟂`: `M = B^T A B`.
#[derive(Clone, Debug)]
pub struct RestrictedOperator {
    pub base: DVector<f64>,
    pub basis: DMatrix<f64>,
    pub restricted: DMatrix<f64>,
}

impl RestrictedOperator {
    /// Uses the reflection onto `e^1`.
    pub fn new(a: &DMatrix<f64>, x: &DVector<f64>) -> Result<Self> {
        Self::with_pivot(a, x, 0)
    }

    pub fn with_pivot(a: &DMatrix<f64>, x: &DVector<f64>, pivot: usize) -> Result<Self> {
        let n = x.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::Shape("matrix and base point disagree in dimension".into()));
        }
        if pivot >= n {
            return Err(Error::Precondition(format!("pivot {pivot} out of range")));
        }
        if (x.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Precondition("base point is not a unit vector".into()));
        }
        let basis = complement_basis(x, pivot);
        let restricted = basis.transpose() * a * &basis;
        let restricted = (&restricted + restricted.transpose()) * 0.5;
        Ok(Self {
            base: x.clone(),
            basis,
            restricted,
        })
    }

    /// `min { <Au,u> : u unit, u ⟂ x }` and a minimizing `u` in `R^n`.
    pub fn lambda_min(&self) -> (f64, DVector<f64>) {
        let (lambda, w) =
            smallest_eigenvalue(&self.restricted).expect("restricted operator is symmetric by construction");
        let u = &self.basis * w;
        let norm = u.norm();
        (lambda, u / norm)
    }
}

/// `lambda_min(B^T A B)` for an orthonormal basis `B` of `x^⟂`.
pub fn restricted_lambda_min(a: &DMatrix<f64>, x: &DVector<f64>) -> Result<f64> {
    Ok(RestrictedOperator::new(a, x)?.lambda_min().0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{rng_from_seed, sample_unit_sphere};
    use rand::Rng;

    #[test]
    fn basis_is_orthonormal_complement() {
        let mut rng = rng_from_seed(17);
        for _ in 0..200 {
            let n = rng.random_range(3..9);
            let x = sample_unit_sphere(n, &mut rng);
            for pivot in [0, n - 1] {
                let b = complement_basis(&x, pivot);
                let gram = b.transpose() * &b;
                assert!((gram - DMatrix::identity(n - 1, n - 1)).norm() < 1e-12);
                assert!((b.transpose() * &x).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_for_negative_pivot_coordinate() {
        let x = DVector::from_vec(vec![-1.0, 0.0, 0.0]);
        let b = complement_basis(&x, 0);
        assert!((b.transpose() * &x).norm() < 1e-15);
    }

    #[test]
    fn examples() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let e1 = crate::instance::basis(3, 0);
        assert!((restricted_lambda_min(&d, &e1).unwrap() - 2.0).abs() < 1e-14);
        let id = DMatrix::<f64>::identity(3, 3);
        let x = DVector::from_vec(vec![0.3, -0.4, 0.5]).normalize();
        assert!((restricted_lambda_min(&id, &x).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn minimizer_is_orthogonal_and_attains() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, -1.0, 0.5, 2.0, 0.5, 1.0]);
        let x = DVector::from_vec(vec![1.0, 2.0, 2.0]) / 3.0;
        let (lambda, u) = RestrictedOperator::new(&a, &x).unwrap().lambda_min();
        assert!(u.dot(&x).abs() < 1e-14);
        assert!(((&a * &u).dot(&u) - lambda).abs() < 1e-12);
    }
}
