//! Battery plus oracle, merged into one machine-readable report.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::certificates::{run_battery, BatteryConfig, CertificateOutcome, Verdict};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::instance::QuadraticInstance;
use crate::io::cone_to_value;
use crate::oracle::{run_oracle, OracleConfig, OracleVerdict};
use crate::witness::WitnessPair;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AggregateVerdict {
    ConvexCertified,
    NonConvexCertified,
    NumericallyConvex,
    Inconclusive,
}

impl AggregateVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            AggregateVerdict::ConvexCertified => 0,
            AggregateVerdict::NonConvexCertified => 1,
            AggregateVerdict::NumericallyConvex => 2,
            AggregateVerdict::Inconclusive => 3,
        }
    }
}

pub const EXIT_INPUT_ERROR: i32 = 64;
pub const EXIT_CONTRADICTION: i32 = 70;

/// Exit code for a failed run: contradictions are internal errors, anything
/// else is blamed on the input.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Contradiction(_) => EXIT_CONTRADICTION,
        _ => EXIT_INPUT_ERROR,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceDigest {
    pub n: usize,
    /// SHA-256 of the little-endian bytes of `A` (row-major), `b` and `c`.
    pub a_sha256: String,
    pub b_sha256: String,
    pub c_sha256: String,
    pub warnings: Vec<String>,
}

fn sha256_hex(values: impl IntoIterator<Item = f64>) -> String {
    let mut hasher = Sha256::new();
    for v in values {
        hasher.update(v.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl InstanceDigest {
    pub fn of(inst: &QuadraticInstance) -> Self {
        let n = inst.n();
        let a = inst.a();
        Self {
            n,
            a_sha256: sha256_hex((0..n).flat_map(|i| (0..n).map(move |j| a[(i, j)]))),
            b_sha256: sha256_hex(inst.b().iter().copied()),
            c_sha256: sha256_hex([inst.c()]),
            warnings: inst.asymmetry_warning().into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub battery_ms: f64,
    pub oracle_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool_version: String,
    pub seed: u64,
    pub instance: InstanceDigest,
    pub cone: Value,
    pub outcomes: Vec<CertificateOutcome>,
    pub battery_verdict: Verdict,
    pub decided_by: Option<String>,
    pub oracle: OracleVerdict,
    /// The disproof behind `NonConvexCertified`.
    pub witness: Option<WitnessPair>,
    pub aggregate: AggregateVerdict,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        self.aggregate.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the certificate battery, then the oracle, and merges them.
///
/// Precedence: a certificate disproof, then a validated oracle witness
/// (both `NonConvexCertified`), then a certificate proof, then the oracle's
/// `NumericallyConvex`. A proof of convexity next to a validated witness is
/// reported as [`Error::Contradiction`].
pub fn verify(
    inst: &QuadraticInstance,
    cone: &Cone,
    battery: &BatteryConfig,
    oracle: &OracleConfig,
) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let result = run_battery(inst, cone, battery)?;
    let battery_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let verdict = run_oracle(inst, cone, oracle)?;
    let oracle_ms = t1.elapsed().as_secs_f64() * 1e3;

    let oracle_witness = verdict
        .witness
        .clone()
        .filter(|w| verdict.is_falsified() && w.validate(inst, cone).is_ok());
    if result.verdict == Verdict::ProvesConvex {
        if let Some(w) = &oracle_witness {
            return Err(Error::Contradiction(format!(
                "`{}` proves convexity but the oracle found a pair with slack {:e}",
                result.decided_by.as_deref().unwrap_or("?"),
                w.slack
            )));
        }
    }

    let battery_witness = result.witness().cloned();
    let (aggregate, witness) = if let Some(w) = battery_witness {
        (AggregateVerdict::NonConvexCertified, Some(w))
    } else if let Some(w) = oracle_witness {
        (AggregateVerdict::NonConvexCertified, Some(w))
    } else if result.verdict == Verdict::ProvesConvex {
        (AggregateVerdict::ConvexCertified, None)
    } else if verdict.status == crate::oracle::OracleStatus::NumericallyConvex {
        (AggregateVerdict::NumericallyConvex, None)
    } else {
        (AggregateVerdict::Inconclusive, None)
    };

    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        seed: oracle.seed,
        instance: InstanceDigest::of(inst),
        cone: cone_to_value(cone),
        outcomes: result.outcomes,
        battery_verdict: result.verdict,
        decided_by: result.decided_by,
        oracle: verdict,
        witness,
        aggregate,
        timing: Timing { battery_ms, oracle_ms },
    })
}
