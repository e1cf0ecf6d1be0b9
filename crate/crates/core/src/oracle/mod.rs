//! Numerical evidence for or against spherical convexity.
//!
//! Nothing in here proves convexity. A negative first-order slack found by
//! search is a constructive disproof, but the absence of one only means the
//! instance is numerically convex within the searched budget.

mod falsify;
mod geodesic;
mod pointwise;

use nalgebra::DVector;
use serde::Serialize;

pub use falsify::{falsify, structured_pairs};
pub use geodesic::{
    geodesic_range, geodesic_scan, geodesic_second_derivative, minimize_f_demo, value_spread, GeodesicScan,
};
pub use pointwise::{bx_slack, liminf_estimate, minimize_h, pointwise_h, witness_at};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::QuadraticInstance;
use crate::witness::WitnessPair;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    /// Random admissible pairs drawn after the structured seed pairs.
    pub pair_budget: usize,
    pub multistart_count: usize,
    /// Relative tolerance; the absolute one is `tol * (1 + ||A||_F + ||b||)`.
    pub tol: f64,
    /// Pattern-search evaluations per start when minimizing `h`.
    pub descent_max_iters: usize,
    /// Geodesics checked by [`geodesic_scan`].
    pub geodesic_count: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            pair_budget: 100_000,
            multistart_count: 32,
            tol: 1e-9,
            descent_max_iters: 500,
            geodesic_count: 1000,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn abs_tol(&self, inst: &QuadraticInstance) -> f64 {
        self.tol * inst.scale()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Precondition("oracle tolerance must be positive".into()));
        }
        if self.multistart_count == 0 || self.descent_max_iters == 0 {
            return Err(Error::Precondition("oracle budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleStatus {
    FalsifiedNonConvex,
    NumericallyConvex,
    /// No violation, but the search was too thin to call the instance
    /// numerically convex (only structured pairs were checked).
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub status: OracleStatus,
    pub witness: Option<WitnessPair>,
    pub min_slack: f64,
    pub min_h: f64,
    pub min_h_point: Vec<f64>,
    pub pairs_checked: u64,
    /// Smallest slack of the non-orthogonal pair condition seen while sampling.
    pub min_bx_slack: Option<f64>,
    /// Smallest second derivative along sampled geodesics (orthant only).
    pub min_geodesic_second_derivative: Option<f64>,
}

impl OracleVerdict {
    pub fn is_falsified(&self) -> bool {
        self.status == OracleStatus::FalsifiedNonConvex
    }
}

/// Falsifier, global minimization of `h`, and (for the orthant) the
/// geodesic scan, merged into one verdict.
pub fn run_oracle(inst: &QuadraticInstance, cone: &Cone, config: &OracleConfig) -> Result<OracleVerdict> {
    let mut verdict = falsify(inst, cone, config)?;
    if verdict.is_falsified() {
        return Ok(verdict);
    }
    let tol = config.abs_tol(inst);

    let (h, x) = minimize_h(inst, cone, config)?;
    if h < verdict.min_h {
        verdict.min_h = h;
        verdict.min_h_point = x.iter().copied().collect();
    }
    if verdict.min_h < -tol {
        let point = DVector::from_column_slice(&verdict.min_h_point);
        let witness = witness_at(inst, &point)?;
        if witness.disproves(inst, cone, tol) {
            verdict.min_slack = verdict.min_slack.min(witness.slack);
            verdict.witness = Some(witness);
            verdict.status = OracleStatus::FalsifiedNonConvex;
            return Ok(verdict);
        }
    }

    if cone.is_orthant() {
        let scan = geodesic_scan(inst, cone, config)?;
        verdict.min_geodesic_second_derivative = Some(scan.min_second_derivative);
        if let Some(w) = scan.witness {
            if w.disproves(inst, cone, tol) {
                verdict.min_slack = verdict.min_slack.min(w.slack);
                verdict.witness = Some(w);
                verdict.status = OracleStatus::FalsifiedNonConvex;
                return Ok(verdict);
            }
        }
    }

    verdict.status = if config.pair_budget == 0 {
        OracleStatus::Exhausted
    } else if verdict.min_slack >= -tol && verdict.min_h >= -tol {
        OracleStatus::NumericallyConvex
    } else {
        OracleStatus::Exhausted
    };
    Ok(verdict)
}
