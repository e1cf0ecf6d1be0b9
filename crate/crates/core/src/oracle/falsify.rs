use nalgebra::DVector;
use rayon::prelude::*;

use super::pointwise::{bx_slack, witness_at};
use super::{OracleConfig, OracleStatus, OracleVerdict};
use crate::certificates::{theta_pair, theta_scan_pair};
use crate::cone::Cone;
use crate::error::Result;
use crate::instance::{basis, QuadraticInstance};
use crate::sampling::{child_seed, rng_from_seed, sample_orthogonal_partner, sample_unit_in_cone, sample_unit_sphere};
use crate::slack::foc_slack;
use crate::witness::WitnessPair;

/// Random draws per parallel batch.
const CHUNK: usize = 4096;
/// Batches evaluated before checking for a violation; fixed so that the
/// reported witness does not depend on the thread count.
const WINDOW: usize = 16;
/// Every `BX_EVERY`-th draw also evaluates the non-orthogonal pair slack.
const BX_EVERY: usize = 4;

type Pair = (DVector<f64>, DVector<f64>);

fn normalized(v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    v / n
}

/// Points of `S ∩ K` on which the proofs' witnesses live: basis vectors and
/// two-coordinate midpoints for the orthant, generators and their pairwise
/// midpoints otherwise, plus a central point.
fn structured_points(cone: &Cone) -> Vec<DVector<f64>> {
    let n = cone.dim();
    let mut points = Vec::new();
    match cone {
        Cone::NonnegOrthant { .. } => {
            for i in 0..n {
                points.push(basis(n, i));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    points.push(normalized(basis(n, i) + basis(n, j)));
                }
            }
            points.push(DVector::from_element(n, 1.0 / (n as f64).sqrt()));
        }
        Cone::Generated { generators } => {
            let unit: Vec<DVector<f64>> = generators.iter().map(|g| g / g.norm()).collect();
            for (i, g) in unit.iter().enumerate() {
                points.push(g.clone());
                for h in &unit[i + 1..] {
                    let mid = g + h;
                    if mid.norm() > 1e-12 {
                        points.push(normalized(mid));
                    }
                }
            }
            let centroid = unit.iter().fold(DVector::zeros(n), |acc, g| acc + g);
            if centroid.norm() > 1e-12 {
                points.push(normalized(centroid));
            }
        }
    }
    points
}

/// The structured seed pairs, in evaluation order.
pub fn structured_pairs(inst: &QuadraticInstance, cone: &Cone) -> Vec<Pair> {
    let n = inst.n();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut pairs = Vec::new();
    if cone.is_orthant() {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    pairs.push((basis(n, i), basis(n, j)));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let plus = (basis(n, i) + basis(n, j)) * s;
                let minus = (basis(n, i) - basis(n, j)) * s;
                pairs.push((minus.clone(), plus.clone()));
                for k in (0..n).filter(|&k| k != i && k != j) {
                    pairs.push((minus.clone(), basis(n, k)));
                    pairs.push((plus.clone(), basis(n, k)));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (theta, _) = theta_scan_pair(inst, i, j);
                    pairs.push(theta_pair(n, i, j, theta));
                }
            }
        }
    }
    for v in structured_points(cone) {
        if let Ok(w) = witness_at(inst, &v) {
            pairs.push((w.u_vec(), v));
        }
    }
    pairs
}

#[derive(Clone, Debug)]
struct ChunkResult {
    drawn: usize,
    min_slack: f64,
    min_bx: Option<f64>,
    violation: Option<WitnessPair>,
}

fn run_chunk(inst: &QuadraticInstance, cone: &Cone, seed: u64, size: usize, tol: f64) -> Result<ChunkResult> {
    let mut rng = rng_from_seed(seed);
    let n = inst.n();
    let mut out = ChunkResult {
        drawn: 0,
        min_slack: f64::INFINITY,
        min_bx: None,
        violation: None,
    };
    for k in 0..size {
        let v = sample_unit_in_cone(cone, &mut rng)?;
        let u = sample_orthogonal_partner(&v, &mut rng);
        let slack = foc_slack(inst, &u, &v);
        out.drawn = k + 1;
        out.min_slack = out.min_slack.min(slack);
        if slack < -tol {
            out.violation = Some(WitnessPair::new(inst, &u, &v));
            return Ok(out);
        }
        if k % BX_EVERY == 0 {
            let other = sample_unit_sphere(n, &mut rng);
            if let Ok(bx) = bx_slack(inst, &v, &other) {
                out.min_bx = Some(out.min_bx.map_or(bx, |m: f64| m.min(bx)));
                if bx < -tol {
                    let s = other.dot(&v);
                    let w = normalized(&other - &v * s);
                    let w = normalized(&w - &v * w.dot(&v));
                    let witness = WitnessPair::new(inst, &w, &v);
                    if witness.slack < -tol {
                        out.min_slack = out.min_slack.min(witness.slack);
                        out.violation = Some(witness);
                        return Ok(out);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Searches for an admissible pair with negative first-order slack.
///
/// The structured pairs of [`structured_pairs`] go first; then `pair_budget`
/// random pairs are drawn in fixed-size batches with seeds derived from the
/// batch index, so the outcome is reproducible for any thread count.
pub fn falsify(inst: &QuadraticInstance, cone: &Cone, config: &OracleConfig) -> Result<OracleVerdict> {
    config.validate()?;
    let tol = config.abs_tol(inst);
    let mut verdict = OracleVerdict {
        status: OracleStatus::NumericallyConvex,
        witness: None,
        min_slack: f64::INFINITY,
        min_h: f64::INFINITY,
        min_h_point: Vec::new(),
        pairs_checked: 0,
        min_bx_slack: None,
        min_geodesic_second_derivative: None,
    };

    let mut best: Option<WitnessPair> = None;
    for (u, v) in structured_pairs(inst, cone) {
        let w = WitnessPair::new(inst, &u, &v);
        verdict.pairs_checked += 1;
        if best.as_ref().is_none_or(|b| w.slack < b.slack) {
            best = Some(w);
        }
    }
    for v in structured_points(cone) {
        let w = witness_at(inst, &v)?;
        if w.slack < verdict.min_h {
            verdict.min_h = w.slack;
            verdict.min_h_point = w.v.clone();
        }
    }
    if let Some(b) = best {
        verdict.min_slack = b.slack;
        if b.slack < -tol && b.validate(inst, cone).is_ok() {
            verdict.witness = Some(b);
            verdict.status = OracleStatus::FalsifiedNonConvex;
            return Ok(verdict);
        }
    }

    let chunks = config.pair_budget.div_ceil(CHUNK);
    let mut start = 0;
    while start < chunks {
        let end = (start + WINDOW).min(chunks);
        let results: Vec<Result<ChunkResult>> = (start..end)
            .into_par_iter()
            .map(|c| {
                let size = CHUNK.min(config.pair_budget - c * CHUNK);
                run_chunk(inst, cone, child_seed(config.seed, c as u64), size, tol)
            })
            .collect();
        for r in results {
            let r = r?;
            verdict.pairs_checked += r.drawn as u64;
            verdict.min_slack = verdict.min_slack.min(r.min_slack);
            if let Some(bx) = r.min_bx {
                verdict.min_bx_slack = Some(verdict.min_bx_slack.map_or(bx, |m| m.min(bx)));
            }
            if let Some(w) = r.violation {
                if w.validate(inst, cone).is_ok() {
                    verdict.witness = Some(w);
                    verdict.status = OracleStatus::FalsifiedNonConvex;
                    return Ok(verdict);
                }
            }
        }
        start = end;
    }

    if config.pair_budget == 0 {
        verdict.status = OracleStatus::Exhausted;
    }
    Ok(verdict)
}
