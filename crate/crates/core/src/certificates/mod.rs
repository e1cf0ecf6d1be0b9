//! Closed-form conditions for spherical convexity of quadratics on the
//! spherical positive orthant, each packaged as an independent certificate.
//!
//! Exact certificates decide their pattern class both ways, sufficient ones
//! can only prove convexity, and necessary ones can only disprove it. A
//! disproof always carries a [`WitnessPair`] that was re-validated against the
//! instance before being returned.

mod exact;
mod necessary;
mod sufficient;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::QuadraticInstance;
use crate::witness::WitnessPair;

pub use exact::{cert_affine, cert_diag_iff, cert_offdiag_pair, cert_rank_one_basis};
pub use necessary::{
    cert_bminus_positive, cert_deleted_submatrix, cert_offdiag_mix, cert_pair_sums, cert_pair_vs_offdiag,
    cert_prop_b, cert_theta_scan, theta_pair, theta_scan_pair,
};
pub use sufficient::{
    bipos_constant, cert_bipos, cert_copositive_chain, cert_decomposition, cert_gap_sufficient, cert_zmatrix,
    decomposition_bounds, suffd_chain, SuffdChain,
};

/// Relative tolerance: an inequality `value <= 0` counts as violated when
/// `value > CERT_TOL * (1 + ||A||_F + ||b||)`.
pub const CERT_TOL: f64 = 1e-10;

/// Pattern tolerance for diagonal comparisons (argmin ties, constant tails).
pub const PATTERN_TOL: f64 = 1e-10;

/// Off-diagonal entries at most this large in magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-14;

/// Witness slacks must be below `-WITNESS_SLACK_TOL` to be reported.
pub const WITNESS_SLACK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    ProvesConvex,
    ProvesNonConvex,
    NotApplicable,
    Inconclusive,
}

impl Verdict {
    pub fn is_conclusive(self) -> bool {
        matches!(self, Verdict::ProvesConvex | Verdict::ProvesNonConvex)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Exact,
    Sufficient,
    Necessary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateOutcome {
    pub name: String,
    pub verdict: Verdict,
    pub witness: Option<WitnessPair>,
    pub detail: String,
}

impl CertificateOutcome {
    pub fn not_applicable(name: &str, detail: impl Into<String>) -> Self {
        Self::plain(name, Verdict::NotApplicable, detail)
    }

    pub fn inconclusive(name: &str, detail: impl Into<String>) -> Self {
        Self::plain(name, Verdict::Inconclusive, detail)
    }

    pub fn convex(name: &str, detail: impl Into<String>) -> Self {
        Self::plain(name, Verdict::ProvesConvex, detail)
    }

    fn plain(name: &str, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            verdict,
            witness: None,
            detail: detail.into(),
        }
    }

    /// Picks the candidate pair with the smallest slack and returns a disproof
    /// if it validates with slack below `-WITNESS_SLACK_TOL`; otherwise the
    /// outcome is downgraded to `Inconclusive` with a diagnostic.
    pub fn nonconvex(
        name: &str,
        inst: &QuadraticInstance,
        cone: &Cone,
        candidates: &[(DVector<f64>, DVector<f64>)],
        detail: impl Into<String>,
    ) -> Self {
        let detail = detail.into();
        let best = candidates
            .iter()
            .map(|(u, v)| WitnessPair::new(inst, u, v))
            .min_by(|a, b| a.slack.total_cmp(&b.slack));
        let Some(witness) = best else {
            return Self::inconclusive(name, format!("{detail}; no witness candidate"));
        };
        if let Err(e) = witness.validate(inst, cone) {
            return Self::inconclusive(name, format!("{detail}; witness rejected: {e}"));
        }
        if witness.slack >= -WITNESS_SLACK_TOL {
            return Self::inconclusive(
                name,
                format!("{detail}; best witness slack {:e} is not negative", witness.slack),
            );
        }
        Self {
            name: name.to_string(),
            verdict: Verdict::ProvesNonConvex,
            witness: Some(witness),
            detail,
        }
    }
}

pub type CertificateFn = fn(&QuadraticInstance, &Cone, f64) -> CertificateOutcome;

#[derive(Clone, Copy)]
pub struct Certificate {
    pub name: &'static str,
    pub kind: CertificateKind,
    pub run: CertificateFn,
}

impl std::fmt::Debug for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Certificate")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

const REGISTRY: &[Certificate] = &[
    Certificate { name: exact::AFFINE, kind: CertificateKind::Exact, run: exact::affine },
    Certificate { name: exact::DIAG_IFF, kind: CertificateKind::Exact, run: exact::diag_iff },
    Certificate { name: exact::RANK_ONE, kind: CertificateKind::Exact, run: exact::rank_one_basis },
    Certificate { name: exact::OFFDIAG_PAIR, kind: CertificateKind::Exact, run: exact::offdiag_pair },
    Certificate { name: sufficient::GAP, kind: CertificateKind::Sufficient, run: sufficient::gap },
    Certificate { name: sufficient::COPOSITIVE, kind: CertificateKind::Sufficient, run: sufficient::copositive_chain },
    Certificate { name: sufficient::ZMATRIX, kind: CertificateKind::Sufficient, run: sufficient::zmatrix },
    Certificate { name: sufficient::BIPOS, kind: CertificateKind::Sufficient, run: sufficient::bipos },
    Certificate { name: sufficient::DECOMPOSITION, kind: CertificateKind::Sufficient, run: sufficient::decomposition },
    Certificate { name: necessary::MIX, kind: CertificateKind::Necessary, run: necessary::offdiag_mix },
    Certificate { name: necessary::PAIR_SUMS, kind: CertificateKind::Necessary, run: necessary::pair_sums },
    Certificate { name: necessary::SUP, kind: CertificateKind::Necessary, run: necessary::pair_vs_offdiag },
    Certificate { name: necessary::BMINUS, kind: CertificateKind::Necessary, run: necessary::bminus_positive },
    Certificate { name: necessary::PROP_B, kind: CertificateKind::Necessary, run: necessary::prop_b },
    Certificate { name: necessary::DELETED, kind: CertificateKind::Necessary, run: necessary::deleted_submatrix },
    Certificate { name: necessary::THETA, kind: CertificateKind::Necessary, run: necessary::theta_scan },
];

/// All certificates, exact first, then sufficient, then necessary.
pub fn registry() -> &'static [Certificate] {
    REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static Certificate> {
    REGISTRY.iter().find(|c| c.name == name)
}

/// The default absolute tolerance for `inst`.
pub fn default_tol(inst: &QuadraticInstance) -> f64 {
    CERT_TOL * inst.scale()
}

#[derive(Clone, Debug, Default)]
pub struct BatteryConfig {
    /// Run every certificate instead of stopping at the first conclusive one.
    pub exhaustive: bool,
    /// Absolute tolerance overrides by certificate name.
    pub tolerances: HashMap<String, f64>,
    /// When set, only these certificates run (registry order is kept).
    pub only: Option<Vec<String>>,
}

impl BatteryConfig {
    pub fn exhaustive() -> Self {
        Self {
            exhaustive: true,
            ..Self::default()
        }
    }

    fn selected(&self) -> Result<Vec<&'static Certificate>> {
        if let Some(names) = &self.only {
            for n in names {
                if lookup(n).is_none() {
                    return Err(Error::Precondition(format!("unknown certificate `{n}`")));
                }
            }
        }
        for n in self.tolerances.keys() {
            if lookup(n).is_none() {
                return Err(Error::Precondition(format!("tolerance override for unknown certificate `{n}`")));
            }
        }
        Ok(REGISTRY
            .iter()
            .filter(|c| self.only.as_ref().is_none_or(|names| names.iter().any(|n| n == c.name)))
            .collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryResult {
    pub outcomes: Vec<CertificateOutcome>,
    /// `ProvesConvex`, `ProvesNonConvex` or `Inconclusive`.
    pub verdict: Verdict,
    /// Name of the first certificate (in registry order) that was conclusive.
    pub decided_by: Option<String>,
}

impl BatteryResult {
    pub fn witness(&self) -> Option<&WitnessPair> {
        self.outcomes
            .iter()
            .find(|o| o.verdict == Verdict::ProvesNonConvex)
            .and_then(|o| o.witness.as_ref())
    }
}

/// Runs the selected certificates in registry order.
///
/// Returns [`Error::Contradiction`] if two certificates reach opposite
/// conclusive verdicts; that can only come from an implementation bug.
pub fn run_battery(inst: &QuadraticInstance, cone: &Cone, config: &BatteryConfig) -> Result<BatteryResult> {
    if cone.dim() != inst.n() {
        return Err(Error::Shape(format!(
            "cone dimension {} differs from instance dimension {}",
            cone.dim(),
            inst.n()
        )));
    }
    let selected = config.selected()?;
    let default = default_tol(inst);
    let tol_for = |c: &Certificate| config.tolerances.get(c.name).copied().unwrap_or(default);

    let outcomes: Vec<CertificateOutcome> = if config.exhaustive {
        selected.par_iter().map(|c| (c.run)(inst, cone, tol_for(c))).collect()
    } else {
        let mut out = Vec::new();
        for c in &selected {
            let o = (c.run)(inst, cone, tol_for(c));
            let stop = o.verdict.is_conclusive();
            out.push(o);
            if stop {
                break;
            }
        }
        out
    };

    let convex = outcomes.iter().find(|o| o.verdict == Verdict::ProvesConvex);
    let nonconvex = outcomes.iter().find(|o| o.verdict == Verdict::ProvesNonConvex);
    if let (Some(c), Some(nc)) = (convex, nonconvex) {
        return Err(Error::Contradiction(format!(
            "`{}` proves convexity but `{}` proves non-convexity",
            c.name, nc.name
        )));
    }
    let decided = outcomes.iter().find(|o| o.verdict.is_conclusive());
    Ok(BatteryResult {
        verdict: decided.map_or(Verdict::Inconclusive, |o| o.verdict),
        decided_by: decided.map(|o| o.name.clone()),
        outcomes,
    })
}

pub(crate) fn e(n: usize, i: usize) -> DVector<f64> {
    crate::instance::basis(n, i)
}

/// `(e^i - e^j)/√2` and `(e^i + e^j)/√2`.
pub(crate) fn rotated_pair(n: usize, i: usize, j: usize) -> (DVector<f64>, DVector<f64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DVector::zeros(n);
    let mut v = DVector::zeros(n);
    u[i] = s;
    u[j] = -s;
    v[i] = s;
    v[j] = s;
    (u, v)
}

pub(crate) fn is_diagonal(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)].abs() <= ZERO_TOL))
}

/// Indices whose diagonal entry is within [`PATTERN_TOL`] of the minimum.
pub(crate) fn diagonal_argmin(a: &DMatrix<f64>) -> (f64, Vec<usize>) {
    let d = a.diagonal();
    let min = d.min();
    let idx = (0..d.len()).filter(|&i| d[i] <= min + PATTERN_TOL).collect();
    (min, idx)
}

/// Any index other than the listed ones (exists since `n >= 3`).
pub(crate) fn other_index(n: usize, exclude: &[usize]) -> usize {
    (0..n).find(|k| !exclude.contains(k)).expect("n >= 3 leaves a free index")
}
