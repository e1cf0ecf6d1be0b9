use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use super::smallest_eigenvalue;
use crate::instance::quad_form;
use crate::sampling::{child_seed, rng_from_seed};

/// Value below which a simplex point counts as a copositivity violation.
pub const VIOLATION_TOL: f64 = 1e-10;

const PSD_TOL: f64 = 1e-10;
const DESCENT_STEPS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CopositivityStatus {
    Copositive,
    NotCopositive,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CopositivityResult {
    pub status: CopositivityStatus,
    /// Nonnegative unit vector with `x^T M x < 0`, present iff `NotCopositive`.
    pub witness: Option<Vec<f64>>,
    pub witness_value: Option<f64>,
    /// Which rung of the decision ladder settled the question.
    pub method: &'static str,
}

impl CopositivityResult {
    fn decided(status: CopositivityStatus, method: &'static str) -> Self {
        Self {
            status,
            witness: None,
            witness_value: None,
            method,
        }
    }

    fn violated(m: &DMatrix<f64>, x: DVector<f64>, method: &'static str) -> Self {
        let x = &x / x.norm();
        let value = quad_form(m, &x);
        if value < -1e-12 {
            Self {
                status: CopositivityStatus::NotCopositive,
                witness: Some(x.iter().copied().collect()),
                witness_value: Some(value),
                method,
            }
        } else {
            Self::decided(CopositivityStatus::Unknown, method)
        }
    }
}

/// Euclidean projection onto the unit simplex `{x >= 0, sum x = 1}`.
pub fn project_to_simplex(y: &DVector<f64>) -> DVector<f64> {
    let mut sorted: Vec<f64> = y.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        }
    }
    y.map(|v| (v - tau).max(0.0))
}

fn descend(m: &DMatrix<f64>, mut x: DVector<f64>, step: f64) -> (f64, DVector<f64>) {
    let mut best = (quad_form(m, &x), x.clone());
    for _ in 0..DESCENT_STEPS {
        let grad = m * &x * 2.0;
        x = project_to_simplex(&(&x - grad * step));
        let value = quad_form(m, &x);
        if value < best.0 {
            best = (value, x.clone());
        }
    }
    best
}

/// Three-valued copositivity test of a symmetric matrix.
///
/// The ladder: nonnegative entries, positive semidefiniteness, the exact
/// `k <= 2` criterion, and finally `budget` starts of projected gradient
/// descent of `x^T M x` over the unit simplex. Only the last rung can answer
/// `Unknown`.
pub fn copositivity_check<R: Rng + ?Sized>(m: &DMatrix<f64>, budget: usize, rng: &mut R) -> CopositivityResult {
    use CopositivityStatus::*;
    let k = m.nrows();
    if m.iter().all(|&v| v >= 0.0) {
        return CopositivityResult::decided(Copositive, "nonnegative");
    }
    match smallest_eigenvalue(m) {
        Ok((lambda, _)) if lambda >= -PSD_TOL => return CopositivityResult::decided(Copositive, "psd"),
        _ => {}
    }
    if let Some(i) = (0..k).find(|&i| m[(i, i)] < 0.0) {
        return CopositivityResult::violated(m, crate::instance::basis(k, i), "diagonal");
    }
    if k == 1 {
        return CopositivityResult::decided(Copositive, "exact");
    }
    if k == 2 {
        let (m11, m22, m12) = (m[(0, 0)], m[(1, 1)], m[(0, 1)]);
        if m12 + (m11 * m22).sqrt() >= 0.0 {
            return CopositivityResult::decided(Copositive, "exact");
        }
        // m12 < 0 here, so a zero diagonal entry makes the other coordinate free
        let x = if m11 == 0.0 {
            DVector::from_vec(vec![1.0, (-m12 / m22.max(f64::MIN_POSITIVE)).clamp(1e-3, 1.0)])
        } else if m22 == 0.0 {
            DVector::from_vec(vec![(-m12 / m11).clamp(1e-3, 1.0), 1.0])
        } else {
            DVector::from_vec(vec![m22.sqrt(), m11.sqrt()])
        };
        let exact = CopositivityResult::violated(m, x, "exact");
        if exact.status == NotCopositive {
            return exact;
        }
        return CopositivityResult::violated(m, DVector::from_element(2, 1.0), "exact");
    }

    let step = 1.0 / (2.0 * m.norm());
    let base: u64 = rng.random();
    let hit = (0..budget.max(1) as u64).into_par_iter().find_map_first(|s| {
        let x0 = if s == 0 {
            DVector::from_element(k, 1.0 / k as f64)
        } else {
            let mut r = rng_from_seed(child_seed(base, s));
            let e = DVector::from_fn(k, |_, _| Exp1.sample(&mut r));
            let sum: f64 = e.sum();
            e / sum
        };
        let (value, x) = descend(m, x0, step);
        (value < -VIOLATION_TOL).then_some(x)
    });
    match hit {
        Some(x) => CopositivityResult::violated(m, x, "simplex-descent"),
        None => CopositivityResult::decided(Unknown, "simplex-descent"),
    }
}
