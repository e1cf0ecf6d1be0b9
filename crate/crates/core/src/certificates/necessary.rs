use std::f64::consts::{FRAC_PI_2, SQRT_2};

use nalgebra::DVector;

use super::{default_tol, diagonal_argmin, e, rotated_pair, CertificateOutcome, ZERO_TOL};
use crate::cone::Cone;
use crate::instance::QuadraticInstance;
use crate::linalg::{perron_check, perron_vector, smallest_eigenvalue, symmetric_eigen};
use crate::slack::foc_slack;

pub(super) const MIX: &str = "thlt.ii.mix";
pub(super) const PAIR_SUMS: &str = "thlt.iii.pairsums";
pub(super) const SUP: &str = "thlt.iv.sup";
pub(super) const BMINUS: &str = "thlt.v.bminus";
pub(super) const PROP_B: &str = "propb.bm";
pub(super) const DELETED: &str = "deleted.submatrix";
pub(super) const THETA: &str = "theta.scan";

const THETA_GRID: usize = 1024;
const GOLDEN_ITERS: usize = 80;

type Pair = (DVector<f64>, DVector<f64>);

fn basis_pairs(n: usize, i: usize, j: usize) -> [Pair; 2] {
    [(e(n, i), e(n, j)), (e(n, j), e(n, i))]
}

/// `a_ij <= -(√2/8)(b_i + b_j)` for all `i != j`.
pub fn cert_offdiag_mix(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    offdiag_mix(inst, cone, default_tol(inst))
}

pub(super) fn offdiag_mix(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(MIX, "cone is not the nonnegative orthant");
    }
    let (a, b, n) = (inst.a(), inst.b(), inst.n());
    let mut worst: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let excess = a[(i, j)] + SQRT_2 / 8.0 * (b[i] + b[j]);
            if excess > tol && worst.is_none_or(|w| excess > w.0) {
                worst = Some((excess, i, j));
            }
        }
    }
    match worst {
        None => CertificateOutcome::inconclusive(MIX, "a_ij <= -(√2/8)(b_i + b_j) for all pairs"),
        Some((excess, i, j)) => CertificateOutcome::nonconvex(
            MIX,
            inst,
            cone,
            &[rotated_pair(n, i, j)],
            format!("a_{}{} exceeds -(√2/8)(b_i + b_j) by {excess:e}", i + 1, j + 1),
        ),
    }
}

/// `b_i + b_j <= 0` and `2(a_ii - a_jj) >= b_j` for all `i != j`.
pub fn cert_pair_sums(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    pair_sums(inst, cone, default_tol(inst))
}

pub(super) fn pair_sums(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.contains_orthant() {
        return CertificateOutcome::not_applicable(PAIR_SUMS, "cone does not contain the orthant");
    }
    let (a, b, n) = (inst.a(), inst.b(), inst.n());
    // 2(a_jj - a_ii) + b_j is twice minus the slack of (e^i, e^j); the pair-sum
    // condition is the sum of the two orderings.
    let mut worst: Option<(f64, usize, usize, &str)> = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ij = 2.0 * (a[(j, j)] - a[(i, i)]) + b[j];
            let sum = b[i] + b[j];
            for (value, label) in [(ij, "2(a_ii - a_jj) >= b_j"), (sum, "b_i + b_j <= 0")] {
                if value > tol && worst.is_none_or(|w| value > w.0) {
                    worst = Some((value, i, j, label));
                }
            }
        }
    }
    match worst {
        None => CertificateOutcome::inconclusive(PAIR_SUMS, "all pair conditions hold"),
        Some((value, i, j, label)) => CertificateOutcome::nonconvex(
            PAIR_SUMS,
            inst,
            cone,
            &basis_pairs(n, i, j),
            format!("{label} fails at (i, j) = ({}, {}) by {value:e}", i + 1, j + 1),
        ),
    }
}

/// `b_i + b_j <= -4√2 a_ij⁺` for all `i != j`.
pub fn cert_pair_vs_offdiag(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    pair_vs_offdiag(inst, cone, default_tol(inst))
}

pub(super) fn pair_vs_offdiag(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(SUP, "cone is not the nonnegative orthant");
    }
    let (a, b, n) = (inst.a(), inst.b(), inst.n());
    let mut worst: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let excess = b[i] + b[j] + 4.0 * SQRT_2 * a[(i, j)].max(0.0);
            if excess > tol && worst.is_none_or(|w| excess > w.0) {
                worst = Some((excess, i, j));
            }
        }
    }
    match worst {
        None => CertificateOutcome::inconclusive(SUP, "b_i + b_j <= -4√2 a_ij⁺ for all pairs"),
        Some((excess, i, j)) => {
            let [p, q] = basis_pairs(n, i, j);
            CertificateOutcome::nonconvex(
                SUP,
                inst,
                cone,
                &[p, q, rotated_pair(n, i, j)],
                format!("b_{} + b_{} exceeds -4√2 a_ij⁺ by {excess:e}", i + 1, j + 1),
            )
        }
    }
}

/// For entrywise positive `A`: `||b₋|| >= 2(lambda_max - lambda_min)`.
pub fn cert_bminus_positive(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    bminus_positive(inst, cone, default_tol(inst))
}

pub(super) fn bminus_positive(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(BMINUS, "cone is not the nonnegative orthant");
    }
    if !perron_check(inst.a()) {
        return CertificateOutcome::not_applicable(BMINUS, "A is not entrywise positive");
    }
    let eig = symmetric_eigen(inst.a()).expect("instance matrix is symmetric");
    let lmin = eig.values[0];
    let lmax = *eig.values.last().expect("n >= 3");
    let bound = 2.0 * (lmax - lmin);
    let b_minus = inst.b().map(|v| (-v).max(0.0)).norm();
    if bound <= tol {
        return CertificateOutcome::inconclusive(BMINUS, "lambda_max = lambda_min, the bound is vacuous");
    }
    if b_minus >= bound - tol {
        return CertificateOutcome::inconclusive(BMINUS, format!("||b₋|| = {b_minus} >= {bound}"));
    }
    let (_, v) = perron_vector(inst.a()).expect("instance matrix is symmetric");
    let mut u = eig.vector(0);
    let p = u.dot(&v);
    u.axpy(-p, &v, 1.0);
    let u = u.normalize();
    CertificateOutcome::nonconvex(
        BMINUS,
        inst,
        cone,
        &[(u, v)],
        format!("||b₋|| = {b_minus} < 2(lambda_max - lambda_min) = {bound}"),
    )
}

/// Sign conditions on `b` relative to the argmin of the diagonal.
pub fn cert_prop_b(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    prop_b(inst, cone, default_tol(inst))
}

pub(super) fn prop_b(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(PROP_B, "cone is not the nonnegative orthant");
    }
    if inst.a_norm_fro() <= ZERO_TOL {
        return CertificateOutcome::not_applicable(PROP_B, "A is zero (affine case)");
    }
    let (a, b, n) = (inst.a(), inst.b(), inst.n());
    let (_, argmin) = diagonal_argmin(a);

    // b_i <= 0 for every i different from some minimal index m
    let mut worst: Option<(f64, usize, usize)> = None;
    for &m in &argmin {
        for i in (0..n).filter(|&i| i != m) {
            if b[i] > tol && worst.is_none_or(|w| b[i] > w.0) {
                worst = Some((b[i], m, i));
            }
        }
    }
    if let Some((value, m, i)) = worst {
        return CertificateOutcome::nonconvex(
            PROP_B,
            inst,
            cone,
            &[(e(n, m), e(n, i))],
            format!("b_{} = {value} > 0 although {} is a minimal diagonal index", i + 1, m + 1),
        );
    }

    // b_m <= -max_{i != m} (b_i + 4 a_mi⁺)
    let mut worst: Option<(f64, usize, usize)> = None;
    for &m in &argmin {
        for i in (0..n).filter(|&i| i != m) {
            let excess = b[m] + b[i] + 4.0 * a[(m, i)].max(0.0);
            if excess > tol && worst.is_none_or(|w| excess > w.0) {
                worst = Some((excess, m, i));
            }
        }
    }
    match worst {
        None => CertificateOutcome::inconclusive(PROP_B, "sign and b_m bounds hold"),
        Some((excess, m, i)) => {
            let [p, q] = basis_pairs(n, m, i);
            CertificateOutcome::nonconvex(
                PROP_B,
                inst,
                cone,
                &[p, q, rotated_pair(n, m, i)],
                format!("b_{} + b_{} + 4a⁺ = {excess:e} > 0", m + 1, i + 1),
            )
        }
    }
}

fn deleted(a: &nalgebra::DMatrix<f64>, m: usize) -> nalgebra::DMatrix<f64> {
    a.clone().remove_row(m).remove_column(m)
}

/// If `lambda_min(A_{-m}) <= a_mm` for every minimal index `m`, then `b <= 0`.
pub fn cert_deleted_submatrix(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    deleted_submatrix(inst, cone, default_tol(inst))
}

pub(super) fn deleted_submatrix(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(DELETED, "cone is not the nonnegative orthant");
    }
    let (a, b, n) = (inst.a(), inst.b(), inst.n());
    let (_, argmin) = diagonal_argmin(a);
    for &m in &argmin {
        let (lambda, _) = smallest_eigenvalue(&deleted(a, m)).expect("principal submatrix is symmetric");
        if lambda > a[(m, m)] + super::PATTERN_TOL {
            return CertificateOutcome::not_applicable(
                DELETED,
                format!("lambda_min(A_-{}) = {lambda} > a_mm = {}", m + 1, a[(m, m)]),
            );
        }
    }
    let Some(i) = (0..n).filter(|&i| b[i] > tol).max_by(|&x, &y| b[x].total_cmp(&b[y])) else {
        return CertificateOutcome::inconclusive(DELETED, "b <= 0");
    };
    let candidate = if argmin.contains(&i) {
        let (_, w) = smallest_eigenvalue(&deleted(a, i)).expect("principal submatrix is symmetric");
        let mut u = DVector::zeros(n);
        for (k, r) in (0..n).filter(|&r| r != i).enumerate() {
            u[r] = w[k];
        }
        (u.normalize(), e(n, i))
    } else {
        (e(n, argmin[0]), e(n, i))
    };
    CertificateOutcome::nonconvex(
        DELETED,
        inst,
        cone,
        &[candidate],
        format!("b_{} = {} > 0 under the deleted-submatrix hypothesis", i + 1, b[i]),
    )
}

/// `u = cos θ e^i - sin θ e^j`, `v = sin θ e^i + cos θ e^j`.
pub fn theta_pair(n: usize, i: usize, j: usize, theta: f64) -> Pair {
    let (s, c) = theta.sin_cos();
    let mut u = DVector::zeros(n);
    let mut v = DVector::zeros(n);
    u[i] = c;
    u[j] = -s;
    v[i] = s;
    v[j] = c;
    (u, v)
}

/// `g(θ) = 2(a_ii - a_jj) cos 2θ - 4 a_ij sin 2θ - b_i sin θ - b_j cos θ`,
/// twice the first-order slack of [`theta_pair`].
fn theta_g(inst: &QuadraticInstance, i: usize, j: usize, theta: f64) -> f64 {
    let (a, b) = (inst.a(), inst.b());
    2.0 * (a[(i, i)] - a[(j, j)]) * (2.0 * theta).cos() - 4.0 * a[(i, j)] * (2.0 * theta).sin()
        - b[i] * theta.sin()
        - b[j] * theta.cos()
}

/// Minimizes `g` over `[0, π/2]` by a dense grid and golden-section
/// refinement; returns `(θ*, g(θ*)/2)`.
pub fn theta_scan_pair(inst: &QuadraticInstance, i: usize, j: usize) -> (f64, f64) {
    let h = FRAC_PI_2 / THETA_GRID as f64;
    let (k, _) = (0..=THETA_GRID)
        .map(|k| (k, theta_g(inst, i, j, k as f64 * h)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("grid is nonempty");
    let mut lo = (k.saturating_sub(1)) as f64 * h;
    let mut hi = ((k + 1).min(THETA_GRID)) as f64 * h;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (theta_g(inst, i, j, x1), theta_g(inst, i, j, x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = theta_g(inst, i, j, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = theta_g(inst, i, j, x2);
        }
    }
    let grid_theta = k as f64 * h;
    let candidates = [grid_theta, x1, x2];
    let best = candidates
        .iter()
        .map(|&t| (t, theta_g(inst, i, j, t)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three candidates");
    (best.0, best.1 / 2.0)
}

/// Two-coordinate rotation scan over all ordered pairs.
pub fn cert_theta_scan(inst: &QuadraticInstance, cone: &Cone) -> CertificateOutcome {
    theta_scan(inst, cone, default_tol(inst))
}

pub(super) fn theta_scan(inst: &QuadraticInstance, cone: &Cone, tol: f64) -> CertificateOutcome {
    if !cone.is_orthant() {
        return CertificateOutcome::not_applicable(THETA, "cone is not the nonnegative orthant");
    }
    let n = inst.n();
    let mut best: Option<(f64, usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (theta, slack) = theta_scan_pair(inst, i, j);
            if best.is_none_or(|b| slack < b.0) {
                best = Some((slack, i, j, theta));
            }
        }
    }
    let (slack, i, j, theta) = best.expect("n >= 3");
    if 2.0 * slack >= -tol {
        return CertificateOutcome::inconclusive(THETA, format!("min over pairs of g/2 = {slack:e}"));
    }
    let pair = theta_pair(n, i, j, theta);
    debug_assert!((foc_slack(inst, &pair.0, &pair.1) - slack).abs() < 1e-9 * inst.scale());
    CertificateOutcome::nonconvex(
        THETA,
        inst,
        cone,
        &[pair],
        format!("g/2 = {slack:e} at (i, j) = ({}, {}), θ = {theta}", i + 1, j + 1),
    )
}
