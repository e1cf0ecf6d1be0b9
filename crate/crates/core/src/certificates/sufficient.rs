use nalgebra::DMatrix;

use super::{default_tol, diagonal_argmin, is_diagonal, CertificateOutcome, PATTERN_TOL, ZERO_TOL};
use crate::cone::Cone;
use crate::instance::QuadraticInstance;
use crate::linalg::{copositivity_check, CopositivityStatus};
use crate::sampling::rng_from_seed;

pub(super) const GAP: &str = "thlt.vi.gap";
pub(super) const COPOSITIVE: &str = "suffd.copositive";
pub(super) const ZMATRIX: &str = "sd1.zmatrix";
pub(super) const BIPOS: &str = "bipos";
pub(super) const DECOMPOSITION: &str = "cd.iii";

/// Starts of the simplex search inside the copositivity test.
const COPOSITIVE_BUDGET: usize = 32;
/// The copositivity search is randomized; certificates stay pure by fixing its seed.
const COPOSITIVE_SEED: u64 = 0x636f_706f_7369_7469;

/// `sqrt(6√3 - 9) ≈ 1.1799597`.
pub fn bipos_constant() -> f64 {
    (6.0 * 3f64.sqrt() - 9.0).sqrt()
}

/// Spectral gap bound: `b_i <= 2√n (lambda_min - lambda_max)` for all `i`.
pub fn cert_gap_sufficient(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    gap(inst, cone, default_tol(inst))
}

pub(super) fn gap(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.within_orthant() {
        return CertificateOutcome::not_applicable(GAP, "cone is not contained in the orthant");
    }
    let n = inst.n() as f64;
    let bound = 2.0 * n.sqrt() * (inst.lambda_min() - inst.lambda_max());
    let bmax = inst.b().max();
    if bmax <= bound + tol {
        CertificateOutcome::convex(GAP, format!("max b_i = {bmax} <= {bound}"))
    } else {
        CertificateOutcome::inconclusive(GAP, format!("max b_i = {bmax} > {bound}"))
    }
}

fn diag_matrix(a: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(&a.diagonal())
}

/// The three conditions of the copositive implication chain, each `None`
/// when the copositivity test could not decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuffdChain {
    /// `diag²(A) - A` copositive and `b_i <= 2(lambda_min - a_ii)`.
    pub cond_i: Option<bool>,
    /// `2(lambda_min I - A) - diag(b)` copositive and `b <= 0`.
    pub cond_ii: Option<bool>,
    /// `b_i <= 2(lambda_min - a_ii)`.
    pub cond_iii: bool,
}

fn copositive(m: &DMatrix<f64>) -> Option<bool> {
    let r = copositivity_check(m, COPOSITIVE_BUDGET, &mut rng_from_seed(COPOSITIVE_SEED));
    match r.status {
        CopositivityStatus::Copositive => Some(true),
        CopositivityStatus::NotCopositive => Some(false),
        CopositivityStatus::Unknown => None,
    }
}

fn and(a: Option<bool>, b: bool) -> Option<bool> {
    if !b {
        Some(false)
    } else {
        a
    }
}

/// Evaluates the three conditions with absolute tolerance `tol`.
pub fn suffd_chain(inst: &QuadraticInstance, tol: f64) -> SuffdChain {
    let a = inst.a();
    let b = inst.b();
    let n = inst.n();
    let lmin = inst.lambda_min();
    let cond_iii = (0..n).all(|i| b[i] <= 2.0 * (lmin - a[(i, i)]) + tol);
    let c1 = diag_matrix(a) - a;
    let cond_i = and(copositive(&c1), cond_iii);
    let b_nonpos = b.iter().all(|&v| v <= tol);
    let cond_ii = if b_nonpos {
        let c2 = (DMatrix::identity(n, n) * lmin - a) * 2.0 - DMatrix::from_diagonal(b);
        copositive(&c2)
    } else {
        Some(false)
    };
    SuffdChain {
        cond_i,
        cond_ii,
        cond_iii,
    }
}

/// Copositivity of `2(lambda_min I - A) - diag(b)` together with `b <= 0`.
pub fn cert_copositive_chain(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    copositive_chain(inst, cone, default_tol(inst))
}

pub(super) fn copositive_chain(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(COPOSITIVE, "cone is not the nonnegative orthant");
    }
    if inst.b().iter().any(|&v| v > tol) {
        return CertificateOutcome::inconclusive(COPOSITIVE, "b has a positive entry");
    }
    let chain = suffd_chain(inst, tol);
    let cond_i = match chain.cond_i {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "undecided",
    };
    match chain.cond_ii {
        Some(true) => CertificateOutcome::convex(
            COPOSITIVE,
            format!("2(lambda_min I - A) - diag(b) is copositive; condition (i) {cond_i}"),
        ),
        Some(false) => CertificateOutcome::inconclusive(
            COPOSITIVE,
            format!("2(lambda_min I - A) - diag(b) is not copositive; condition (i) {cond_i}"),
        ),
        None => CertificateOutcome::inconclusive(
            COPOSITIVE,
            format!("copositivity of 2(lambda_min I - A) - diag(b) is undecided; condition (i) {cond_i}"),
        ),
    }
}

/// Z-matrix `A` with `b_i <= 2(lambda_min - a_ii)`.
pub fn cert_zmatrix(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    zmatrix(inst, cone, default_tol(inst))
}

pub(super) fn zmatrix(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(ZMATRIX, "cone is not the nonnegative orthant");
    }
    let a = inst.a();
    let n = inst.n();
    if (0..n).any(|i| (0..n).any(|j| i != j && a[(i, j)] > ZERO_TOL)) {
        return CertificateOutcome::not_applicable(ZMATRIX, "A has a positive off-diagonal entry");
    }
    let lmin = inst.lambda_min();
    let b = inst.b();
    let worst = (0..n)
        .map(|i| b[i] - 2.0 * (lmin - a[(i, i)]))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst <= tol {
        CertificateOutcome::convex(ZMATRIX, format!("max b_i - 2(lambda_min - a_ii) = {worst:e}"))
    } else {
        CertificateOutcome::inconclusive(ZMATRIX, format!("b_i exceeds 2(lambda_min - a_ii) by {worst:e}"))
    }
}

/// Diagonal `A` with a unique minimum and constant remaining entries.
pub fn cert_bipos(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    bipos(inst, cone, default_tol(inst))
}

pub(super) fn bipos(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(BIPOS, "cone is not the nonnegative orthant");
    }
    let a = inst.a();
    if !is_diagonal(a) {
        return CertificateOutcome::not_applicable(BIPOS, "A is not diagonal");
    }
    let (d1, argmin) = diagonal_argmin(a);
    if argmin.len() != 1 {
        return CertificateOutcome::not_applicable(BIPOS, "minimal diagonal entry is not unique");
    }
    let t1 = argmin[0];
    let n = inst.n();
    let tail: Vec<f64> = (0..n).filter(|&i| i != t1).map(|i| a[(i, i)]).collect();
    let d2 = tail.iter().copied().fold(f64::INFINITY, f64::min);
    if tail.iter().any(|&d| d - d2 > PATTERN_TOL) {
        return CertificateOutcome::not_applicable(BIPOS, "non-minimal diagonal entries are not all equal");
    }
    let gap = d2 - d1;
    let beta = bipos_constant();
    let b = inst.b();
    let top = 2.0 * gap;
    let rest = -2.0 * gap * beta;
    let top_ok = b[t1] <= top + tol;
    let rest_ok = (0..n).filter(|&i| i != t1).all(|i| b[i] <= rest + tol);
    let detail = format!("gap = {gap}; bounds b_tau1 <= {top}, others <= {rest}");
    if top_ok && rest_ok {
        CertificateOutcome::convex(BIPOS, detail)
    } else {
        CertificateOutcome::inconclusive(BIPOS, detail)
    }
}

/// Per-coordinate upper bounds on `b` from splitting `A` into rank-one
/// diagonal and off-diagonal pair pieces. Returns `(sharp, coarse)`: the
/// sharp bound charges positive and negative off-diagonal parts separately,
/// the coarse one uses `4 Σ|a_ij|`. Off-diagonal sums run over ordered pairs.
pub fn decomposition_bounds(a: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut pos = 0.0;
    let mut neg = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pos += a[(i, j)].max(0.0);
                neg += (-a[(i, j)]).max(0.0);
            }
        }
    }
    let diag_neg: f64 = (0..n).map(|i| (-a[(i, i)]).max(0.0)).sum();
    let diag_part = |k: usize| {
        let own = a[(k, k)];
        -2.0 * own.max(0.0) - 2.0 * (diag_neg - (-own).max(0.0))
    };
    let sharp = (0..n).map(|k| diag_part(k) - 4.0 * pos - 2.0 * neg).collect();
    let coarse = (0..n).map(|k| diag_part(k) - 4.0 * (pos + neg)).collect();
    (sharp, coarse)
}

/// `b_k <= -2 a_kk⁺ - 2 Σ_{i≠k} a_ii⁻ - 4 Σ_{i≠j} |a_ij|`.
pub fn cert_decomposition(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    decomposition(inst, cone, default_tol(inst))
}

pub(super) fn decomposition(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(DECOMPOSITION, "cone is not the nonnegative orthant");
    }
    if inst.a_norm_fro() <= ZERO_TOL {
        return CertificateOutcome::not_applicable(DECOMPOSITION, "A is zero");
    }
    let (sharp, coarse) = decomposition_bounds(inst.a());
    let b = inst.b();
    let n = inst.n();
    let holds = |bound: &[f64]| (0..n).all(|k| b[k] <= bound[k] + tol);
    let detail = format!(
        "bounds (ordered off-diagonal pairs) {coarse:?}; sharper split bounds {sharp:?} {}",
        if holds(&sharp) { "hold" } else { "fail" }
    );
    if holds(&coarse) {
        CertificateOutcome::convex(DECOMPOSITION, detail)
    } else {
        CertificateOutcome::inconclusive(DECOMPOSITION, detail)
    }
}
