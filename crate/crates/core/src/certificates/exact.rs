use nalgebra::DVector;

use super::{default_tol, diagonal_argmin, e, is_diagonal, other_index, rotated_pair, CertificateOutcome, ZERO_TOL};
use crate::cone::Cone;
use crate::instance::QuadraticInstance;

pub(super) const AFFINE: &str = "thlt.i.affine";
pub(super) const DIAG_IFF: &str = "iffdiag";
pub(super) const RANK_ONE: &str = "lemd.rank1";
pub(super) const OFFDIAG_PAIR: &str = "lemndp.offdiag";

/// Affine case `A = 0`: convex iff `b` lies in the polar cone.
pub fn cert_affine(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    affine(inst, cone, default_tol(inst))
}

pub(super) fn affine(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if inst.a_norm_fro() > ZERO_TOL {
        return CertificateOutcome::not_applicable(AFFINE, "A is not zero");
    }
    let n = inst.n();
    let b = inst.b();
    let directions: Vec<DVector<f64>> = match cone {
        Cone::NonnegOrthant { .. } => (0..n).map(|i| e(n, i)).collect(),
        Cone::Generated { generators } => generators.iter().map(|g| g / g.norm()).collect(),
    };
    let worst = directions
        .iter()
        .map(|v| (b.dot(v), v))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .expect("cone has at least one direction");
    if worst.0 <= tol {
        return CertificateOutcome::convex(AFFINE, format!("max <b, k> over cone directions = {:e}", worst.0));
    }
    let v = worst.1.clone();
    let u = crate::linalg::complement_basis(&v, 0).column(0).into_owned();
    CertificateOutcome::nonconvex(AFFINE, inst, cone, &[(u, v)], format!("<b, v> = {:e} > 0", worst.0))
}

/// Diagonal `A` whose minimal entry is attained at least twice: convex iff
/// `b_i <= 2(min d - d_i)` for all `i`.
pub fn cert_diag_iff(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    diag_iff(inst, cone, default_tol(inst))
}

pub(super) fn diag_iff(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(DIAG_IFF, "cone is not the nonnegative orthant");
    }
    let a = inst.a();
    if !is_diagonal(a) {
        return CertificateOutcome::not_applicable(DIAG_IFF, "A is not diagonal");
    }
    let (dmin, argmin) = diagonal_argmin(a);
    if argmin.len() < 2 {
        return CertificateOutcome::not_applicable(DIAG_IFF, "minimal diagonal entry is unique");
    }
    let n = inst.n();
    let b = inst.b();
    let excess: Vec<f64> = (0..n).map(|i| b[i] - 2.0 * (dmin - a[(i, i)])).collect();
    let (i, worst) = excess
        .iter()
        .copied()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("n >= 3");
    if worst <= tol {
        return CertificateOutcome::convex(DIAG_IFF, format!("max b_i - 2(min d - d_i) = {worst:e}"));
    }
    let i0 = *argmin.iter().find(|&&m| m != i).expect("two minimal indices");
    CertificateOutcome::nonconvex(
        DIAG_IFF,
        inst,
        cone,
        &[(e(n, i0), e(n, i))],
        format!("b_{} exceeds 2(min d - d_{}) by {worst:e}", i + 1, i + 1),
    )
}

/// `A = ±e^i (e^i)^T`.
pub fn cert_rank_one_basis(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    rank_one_basis(inst, cone, default_tol(inst))
}

fn rank_one_pattern(inst: &QuadraticInstance) -> Option<(usize, f64)> {
    let a = inst.a();
    let n = inst.n();
    if !is_diagonal(a) {
        return None;
    }
    let nonzero: Vec<usize> = (0..n).filter(|&i| a[(i, i)].abs() > ZERO_TOL).collect();
    match nonzero.as_slice() {
        [i] if (a[(*i, *i)].abs() - 1.0).abs() <= ZERO_TOL => Some((*i, a[(*i, *i)].signum())),
        _ => None,
    }
}

pub(super) fn rank_one_basis(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(RANK_ONE, "cone is not the nonnegative orthant");
    }
    let Some((i, sign)) = rank_one_pattern(inst) else {
        return CertificateOutcome::not_applicable(RANK_ONE, "A is not ±e^i(e^i)^T");
    };
    let n = inst.n();
    let b = inst.b();
    let others = (0..n).filter(|&j| j != i);
    if sign > 0.0 {
        // convex iff b_i <= -2 and b_j <= 0 otherwise
        if b[i] > -2.0 + tol {
            let j = other_index(n, &[i]);
            return CertificateOutcome::nonconvex(
                RANK_ONE,
                inst,
                cone,
                &[(e(n, j), e(n, i))],
                format!("b_{} = {} > -2", i + 1, b[i]),
            );
        }
        if let Some(j) = others.clone().find(|&j| b[j] > tol) {
            let k = other_index(n, &[i, j]);
            return CertificateOutcome::nonconvex(
                RANK_ONE,
                inst,
                cone,
                &[(e(n, k), e(n, j))],
                format!("b_{} = {} > 0", j + 1, b[j]),
            );
        }
        return CertificateOutcome::convex(RANK_ONE, "A = e^i(e^i)^T with b_i <= -2, b_j <= 0");
    }

    // A = -e^i(e^i)^T: b_j <= -2 (j != i) and b_i <= 2 are necessary; the
    // two-level diagonal bound (gap 1) is sufficient.
    if let Some(j) = others.clone().find(|&j| b[j] > -2.0 + tol) {
        return CertificateOutcome::nonconvex(
            RANK_ONE,
            inst,
            cone,
            &[(e(n, i), e(n, j))],
            format!("b_{} = {} > -2", j + 1, b[j]),
        );
    }
    if b[i] > 2.0 + tol {
        let j = other_index(n, &[i]);
        return CertificateOutcome::nonconvex(
            RANK_ONE,
            inst,
            cone,
            &[(e(n, j), e(n, i))],
            format!("b_{} = {} > 2", i + 1, b[i]),
        );
    }
    let beta = super::bipos_constant();
    if others.clone().all(|j| b[j] <= -2.0 * beta + tol) {
        return CertificateOutcome::convex(
            RANK_ONE,
            "A = -e^i(e^i)^T with b_i <= 2 and b_j <= -2·sqrt(6√3-9)",
        );
    }
    CertificateOutcome::inconclusive(
        RANK_ONE,
        "A = -e^i(e^i)^T: necessary bounds hold, sufficient bound b_j <= -2·sqrt(6√3-9) does not",
    )
}

/// `A = ±(e^i (e^j)^T + e^j (e^i)^T)`.
pub fn cert_offdiag_pair(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    offdiag_pair(inst, cone, default_tol(inst))
}

fn offdiag_pattern(inst: &QuadraticInstance) -> Option<(usize, usize, f64)> {
    let a = inst.a();
    let n = inst.n();
    let mut found = None;
    for p in 0..n {
        if a[(p, p)].abs() > ZERO_TOL {
            return None;
        }
        for q in (p + 1)..n {
            let v = a[(p, q)];
            if v.abs() <= ZERO_TOL {
                continue;
            }
            if found.is_some() || (v.abs() - 1.0).abs() > ZERO_TOL {
                return None;
            }
            found = Some((p, q, v.signum()));
        }
    }
    found
}

pub(super) fn offdiag_pair(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(OFFDIAG_PAIR, "cone is not the nonnegative orthant");
    }
    let Some((i, j, sign)) = offdiag_pattern(inst) else {
        return CertificateOutcome::not_applicable(OFFDIAG_PAIR, "A is not ±(e^i(e^j)^T + e^j(e^i)^T)");
    };
    let n = inst.n();
    let b = inst.b();
    // necessary: b_k <= 2(δ_ik + δ_jk - 1)
    for k in 0..n {
        let inside = k == i || k == j;
        let bound = if inside { 0.0 } else { -2.0 };
        if b[k] <= bound + tol {
            continue;
        }
        let candidate = if inside {
            (e(n, other_index(n, &[i, j])), e(n, k))
        } else {
            // the rotated direction with <Au,u> = -1
            let (mut u, _) = rotated_pair(n, i, j);
            if sign < 0.0 {
                u[j] = -u[j];
            }
            (u, e(n, k))
        };
        return CertificateOutcome::nonconvex(
            OFFDIAG_PAIR,
            inst,
            cone,
            &[candidate],
            format!("b_{} = {} > {bound}", k + 1, b[k]),
        );
    }
    let bound = if sign > 0.0 { -4.0 } else { -2.0 };
    if b.iter().all(|&bk| bk <= bound + tol) {
        return CertificateOutcome::convex(OFFDIAG_PAIR, format!("all b_k <= {bound}"));
    }
    CertificateOutcome::inconclusive(
        OFFDIAG_PAIR,
        format!("necessary bounds hold, sufficient bound b_k <= {bound} does not"),
    )
}
