use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Input asymmetry above this is reported as a warning.
pub const ASYMMETRY_WARN: f64 = 1e-12;

/// The quadratic `f(x) = <Ax, x> + <b, x> + c` with `A` symmetric and `n >= 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticInstance {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
    asymmetry: f64,
}

impl QuadraticInstance {
    /// Builds an instance, replacing `A` by `(A + A^T)/2`.
    ///
    /// The largest input discrepancy `|a_ij - a_ji|` is kept and can be read
    /// back through [`asymmetry`](Self::asymmetry).
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Shape(format!("A is {}x{}, expected square", n, a.ncols())));
        }
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        if b.len() != n {
            return Err(Error::Shape(format!("b has length {}, expected {}", b.len(), n)));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(Error::Precondition("non-finite coefficient".into()));
        }
        let mut sym = a.clone();
        let mut asymmetry = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asymmetry = asymmetry.max((a[(i, j)] - a[(j, i)]).abs());
                let m = 0.5 * (a[(i, j)] + a[(j, i)]);
                sym[(i, j)] = m;
                sym[(j, i)] = m;
            }
        }
        Ok(Self { a: sym, b, c, asymmetry })
    }

    /// Convenience constructor from row-major data.
    pub fn from_rows(rows: &[Vec<f64>], b: &[f64], c: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("A rows must all have length n".into()));
        }
        let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(a, DVector::from_column_slice(b), c)
    }

    /// `A = diag(d)`.
    pub fn diagonal(d: &[f64], b: &[f64], c: f64) -> Result<Self> {
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(d));
        Self::new(a, DVector::from_column_slice(b), c)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn asymmetry_warning(&self) -> Option<String> {
        (self.asymmetry > ASYMMETRY_WARN).then(|| {
            format!(
                "input matrix was not symmetric (max |a_ij - a_ji| = {:e}); symmetrized",
                self.asymmetry
            )
        })
    }

    /// `f(x)`.
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        quad_form(&self.a, x) + self.b.dot(x) + self.c
    }

    /// Euclidean gradient `2Ax + b`.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x * 2.0 + &self.b
    }

    pub fn a_norm_fro(&self) -> f64 {
        self.a.norm()
    }

    pub fn b_norm(&self) -> f64 {
        self.b.norm()
    }

    /// `1 + ||A||_F + ||b||`, the scale every tolerance is multiplied by.
    pub fn scale(&self) -> f64 {
        1.0 + self.a_norm_fro() + self.b_norm()
    }

    pub fn lambda_min(&self) -> f64 {
        linalg::symmetric_eigen(&self.a)
            .expect("instance matrix is symmetric by construction")
            .values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        let e = linalg::symmetric_eigen(&self.a).expect("instance matrix is symmetric by construction");
        e.values[e.values.len() - 1]
    }

    /// `f_{A - lambda I, b, c}`. Spherical convexity is unchanged by the shift.
    pub fn shift(&self, lambda: f64) -> Self {
        let mut a = self.a.clone();
        for i in 0..self.n() {
            a[(i, i)] -= lambda;
        }
        Self {
            a,
            b: self.b.clone(),
            c: self.c,
            asymmetry: self.asymmetry,
        }
    }

    /// Shift so that `lambda_min(A) = 1`.
    pub fn make_positive_definite(&self) -> Self {
        self.shift(self.lambda_min() - 1.0)
    }

    /// Largest off-diagonal magnitude.
    pub fn max_offdiag_abs(&self) -> f64 {
        let n = self.n();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.a[(i, j)].abs());
                }
            }
        }
        m
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.a[(i, i)]).collect()
    }
}

/// `<Mx, x>` without allocating.
pub fn quad_form(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for j in 0..n {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        let col = m.column(j);
        let mut t = 0.0;
        for i in 0..n {
            t += col[i] * x[i];
        }
        s += t * xj;
    }
    s
}

/// `<Mx, y>` without allocating.
pub fn bilinear(m: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for j in 0..n {
        let col = m.column(j);
        let mut t = 0.0;
        for i in 0..n {
            t += col[i] * y[i];
        }
        s += t * x[j];
    }
    s
}

/// Standard basis vector `e^i` (0-based).
pub fn basis(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_and_records_asymmetry() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let inst = QuadraticInstance::new(a, DVector::zeros(3), 0.0).unwrap();
        assert_eq!(inst.a()[(0, 1)], 1.0);
        assert_eq!(inst.a()[(1, 0)], 1.0);
        assert_eq!(inst.asymmetry(), 2.0);
        assert!(inst.asymmetry_warning().is_some());
    }

    #[test]
    fn exact_symmetry_after_construction() {
        let a = DMatrix::from_fn(5, 5, |i, j| (i as f64 + 0.1) * (j as f64 + 0.3).sin());
        let inst = QuadraticInstance::new(a, DVector::zeros(5), 0.0).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(inst.a()[(i, j)].to_bits(), inst.a()[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn rejects_small_dimension() {
        let err = QuadraticInstance::diagonal(&[1.0, 2.0], &[0.0, 0.0], 0.0).unwrap_err();
        assert!(matches!(err, Error::DimensionTooSmall(2)));
    }

    #[test]
    fn rejects_wrong_b_length() {
        assert!(QuadraticInstance::diagonal(&[1.0, 2.0, 3.0], &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn shift_diagonal() {
        let inst = QuadraticInstance::diagonal(&[1.0, 2.0, 3.0], &[0.5, -1.0, 0.0], 2.0).unwrap();
        let s = inst.shift(1.0);
        assert_eq!(s.diag(), vec![0.0, 1.0, 2.0]);
        assert_eq!(s.b(), inst.b());
        assert_eq!(s.c(), 2.0);
    }

    #[test]
    fn make_positive_definite_has_unit_lambda_min() {
        let inst = QuadraticInstance::from_rows(
            &[vec![0.0, 2.0, 1.0], vec![2.0, -1.0, 0.5], vec![1.0, 0.5, 3.0]],
            &[0.0; 3],
            0.0,
        )
        .unwrap();
        let pd = inst.make_positive_definite();
        assert!((pd.lambda_min() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quad_form_matches_matvec() {
        let m = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 - 7.0);
        let x = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let y = DVector::from_vec(vec![1.0, 0.0, -0.5, 0.25]);
        assert!((quad_form(&m, &x) - (&m * &x).dot(&x)).abs() < 1e-12);
        assert!((bilinear(&m, &x, &y) - (&m * &x).dot(&y)).abs() < 1e-12);
    }
}
