use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::QuadraticInstance;
use crate::slack::foc_slack;

/// Unit-norm and orthogonality tolerance of a witness.
pub const WITNESS_TOL: f64 = 1e-12;

/// An admissible pair `(u, v)`: unit vectors, `u ⟂ v`, `v ∈ K`, with its
/// first-order slack. A negative slack disproves spherical convexity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub slack: f64,
}

impl WitnessPair {
    pub fn new(inst: &QuadraticInstance, u: &DVector<f64>, v: &DVector<f64>) -> Self {
        Self {
            u: u.iter().copied().collect(),
            v: v.iter().copied().collect(),
            slack: foc_slack(inst, u, v),
        }
    }

    pub fn u_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.u)
    }

    pub fn v_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.v)
    }

    /// Recomputes the slack from scratch.
    pub fn recompute(&self, inst: &QuadraticInstance) -> f64 {
        crate::instance::quad_form(inst.a(), &self.u_vec())
            - crate::instance::quad_form(inst.a(), &self.v_vec())
            - 0.5 * inst.b().dot(&self.v_vec())
    }

    /// Checks every structural invariant of the pair against `inst` and `cone`.
    pub fn validate(&self, inst: &QuadraticInstance, cone: &Cone) -> Result<()> {
        let n = inst.n();
        if self.u.len() != n || self.v.len() != n {
            return Err(Error::Precondition("witness has wrong dimension".into()));
        }
        let (u, v) = (self.u_vec(), self.v_vec());
        if (u.norm() - 1.0).abs() > WITNESS_TOL || (v.norm() - 1.0).abs() > WITNESS_TOL {
            return Err(Error::Precondition("witness vectors are not unit".into()));
        }
        if u.dot(&v).abs() > WITNESS_TOL {
            return Err(Error::Precondition(format!(
                "witness vectors are not orthogonal (<u,v> = {:e})",
                u.dot(&v)
            )));
        }
        if !cone.contains(&v) {
            return Err(Error::Precondition("witness v is not in the cone".into()));
        }
        let fresh = self.recompute(inst);
        if (fresh - self.slack).abs() > WITNESS_TOL * inst.scale() {
            return Err(Error::Precondition(format!(
                "stored slack {} differs from recomputed {}",
                self.slack, fresh
            )));
        }
        Ok(())
    }

    /// Valid and strictly negative (below `-threshold`) on recomputation.
    pub fn disproves(&self, inst: &QuadraticInstance, cone: &Cone, threshold: f64) -> bool {
        self.validate(inst, cone).is_ok() && self.recompute(inst) < -threshold
    }
}
