use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::nnls;

/// Tolerance on orthant coordinates: a point is a member when every coordinate
/// is at least `-ORTHANT_TOL`. Boundary points are admissible.
pub const ORTHANT_TOL: f64 = 1e-10;

/// Relative residual tolerance of the nonnegative-combination test.
pub const GENERATED_TOL: f64 = 1e-9;

/// The pointed convex cone `K` defining the domain `S^{n-1} ∩ K`.
#[derive(Clone, Debug, PartialEq)]
pub enum Cone {
    /// `R^n_+`.
    NonnegOrthant { n: usize },
    /// The conic hull of a finite generator list.
    Generated { generators: Vec<DVector<f64>> },
}

impl Cone {
    pub fn orthant(n: usize) -> Self {
        Cone::NonnegOrthant { n }
    }

    /// Validates that every generator is nonzero and finite, that all have the
    /// same length, and that the cone is pointed.
    pub fn generated(generators: Vec<DVector<f64>>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidCone("no generators".into()));
        };
        let n = first.len();
        for (k, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::InvalidCone(format!(
                    "generator {k} has length {}, expected {n}",
                    g.len()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidCone(format!("generator {k} is not finite")));
            }
            if g.norm() == 0.0 {
                return Err(Error::InvalidCone(format!("generator {k} is zero")));
            }
        }
        let cone = Cone::Generated { generators };
        // A nonzero lineality space is a face, so it contains some generator.
        if let Cone::Generated { generators } = &cone {
            for (k, g) in generators.iter().enumerate() {
                if cone.contains(&(-g)) {
                    return Err(Error::InvalidCone(format!(
                        "not pointed: the negation of generator {k} lies in the cone"
                    )));
                }
            }
        }
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        match self {
            Cone::NonnegOrthant { n } => *n,
            Cone::Generated { generators } => generators[0].len(),
        }
    }

    pub fn is_orthant(&self) -> bool {
        matches!(self, Cone::NonnegOrthant { .. })
    }

    fn generator_matrix(generators: &[DVector<f64>]) -> DMatrix<f64> {
        DMatrix::from_columns(generators)
    }

    /// Membership in `K`, with the tolerances above.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        match self {
            Cone::NonnegOrthant { .. } => x.iter().all(|&v| v >= -ORTHANT_TOL),
            Cone::Generated { generators } => {
                let g = Self::generator_matrix(generators);
                let (_, residual) = nnls(&g, x);
                residual <= GENERATED_TOL * (1.0 + x.norm())
            }
        }
    }

    /// `x ∈ K* = { y : <y, k> >= 0 for all k in K }`.
    pub fn dual_contains(&self, y: &DVector<f64>, tol: f64) -> bool {
        match self {
            Cone::NonnegOrthant { .. } => y.iter().all(|&v| v >= -tol),
            Cone::Generated { generators } => generators.iter().all(|g| g.dot(y) >= -tol * g.norm()),
        }
    }

    /// `x ∈ K^⊥ = -K*`.
    pub fn polar_contains(&self, y: &DVector<f64>, tol: f64) -> bool {
        self.dual_contains(&(-y), tol)
    }

    /// `R^n_+ ⊆ K`.
    pub fn contains_orthant(&self) -> bool {
        match self {
            Cone::NonnegOrthant { .. } => true,
            Cone::Generated { .. } => {
                let n = self.dim();
                (0..n).all(|i| self.contains(&crate::instance::basis(n, i)))
            }
        }
    }

    /// `K ⊆ R^n_+`.
    pub fn within_orthant(&self) -> bool {
        match self {
            Cone::NonnegOrthant { .. } => true,
            Cone::Generated { generators } => generators
                .iter()
                .all(|g| g.iter().all(|&v| v >= -ORTHANT_TOL * g.norm())),
        }
    }
}
