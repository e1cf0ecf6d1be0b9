//! Dense kernels for the small symmetric matrices this crate works with
//! (`n` is at most a few dozen).

mod copositive;
mod householder;
mod projection;

pub use copositive::{copositivity_check, project_to_simplex, CopositivityResult, CopositivityStatus};
pub use householder::{complement_basis, restricted_lambda_min, RestrictedOperator};
pub use projection::{projection_formula_lambda_min, projector_p, projector_q};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Absolute-plus-relative tolerance under which a matrix counts as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending and
/// eigenvectors in the matching columns.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Cyclic Jacobi eigensolver.
///
/// Returns [`Error::NotSymmetric`] when `m` is not symmetric to within
/// [`SYMMETRY_TOL`]` * (1 + ||m||_F)`.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::Shape(format!("{}x{} matrix is not square", k, m.ncols())));
    }
    let fro = m.norm();
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL * (1.0 + fro) {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = DMatrix::from_fn(k, k, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut v = DMatrix::<f64>::identity(k, k);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * fro || off == 0.0 {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..k {
                    let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(k, k, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Smallest eigenpair of a symmetric matrix.
pub fn smallest_eigenvalue(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let e = symmetric_eigen(m)?;
    Ok((e.values[0], e.vector(0)))
}

/// Largest eigenpair of a symmetric matrix.
pub fn largest_eigenvalue(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let e = symmetric_eigen(m)?;
    let last = e.values.len() - 1;
    Ok((e.values[last], e.vector(last)))
}

/// All entries strictly positive. Under this hypothesis the eigenvector of
/// `lambda_max` can be taken entrywise positive.
pub fn perron_check(a: &DMatrix<f64>) -> bool {
    a.iter().all(|&v| v > 0.0)
}

/// Unit eigenvector of `lambda_max`, sign-normalized to a nonnegative vector.
/// Only meaningful when [`perron_check`] holds.
pub fn perron_vector(a: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let (lambda, mut v) = largest_eigenvalue(a)?;
    if v.sum() < 0.0 {
        v = -v;
    }
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    let norm = v.norm();
    Ok((lambda, v / norm))
}

/// Lawson-Hanson nonnegative least squares: `min ||G w - x||` over `w >= 0`.
/// Returns the minimizer and the residual norm.
pub fn nnls(g: &DMatrix<f64>, x: &DVector<f64>) -> (DVector<f64>, f64) {
    let k = g.ncols();
    let tol = 1e-12 * (1.0 + g.norm()) * (1.0 + x.norm());
    let mut w = DVector::<f64>::zeros(k);
    let mut passive = vec![false; k];

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(g.nrows(), idx.len(), |r, c| g[(r, idx[c])]);
        let z_sub = sub
            .svd(true, true)
            .solve(x, 1e-14)
            .unwrap_or_else(|_| DVector::zeros(idx.len()));
        let mut z = DVector::zeros(k);
        for (c, &j) in idx.iter().enumerate() {
            z[j] = z_sub[c];
        }
        z
    };

    for _ in 0..(3 * k + 10) {
        let grad = g.transpose() * (x - g * &w);
        let candidate = (0..k)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        let Some(j) = candidate.filter(|&j| grad[j] > tol) else {
            break;
        };
        passive[j] = true;
        for _ in 0..(3 * k + 10) {
            let z = solve_passive(&passive);
            if (0..k).filter(|&j| passive[j]).all(|j| z[j] > 0.0) {
                w = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for j in (0..k).filter(|&j| passive[j] && z[j] <= 0.0) {
                let denom = w[j] - z[j];
                if denom > 0.0 {
                    alpha = alpha.min(w[j] / denom);
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            w = &w + (z - &w) * alpha;
            for j in 0..k {
                if passive[j] && w[j] <= tol {
                    passive[j] = false;
                    w[j] = 0.0;
                }
            }
        }
    }
    let residual = (x - g * &w).norm();
    (w, residual)
}
