use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sphconv::certificates::BatteryConfig;
use sphconv::generators::{generate, Family};
use sphconv::io::{read_instance, write_instance};
use sphconv::oracle::{falsify, run_oracle, OracleConfig, OracleVerdict};
use sphconv::report::{error_exit_code, verify, EXIT_INPUT_ERROR};
use sphconv::sampling::child_seed;
use sphconv::Error;

#[derive(Parser)]
#[command(name = "sphconv", version, about = "Spherical convexity of quadratic functions on cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the certificate battery and the oracle, and write a report.
    Check {
        instance: PathBuf,
        /// Random pairs drawn by the oracle.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Oracle tolerance, relative to 1 + ||A||_F + ||b||.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Run every certificate instead of stopping at the first conclusive one.
        #[arg(long)]
        exhaustive: bool,
        /// Write the JSON report here instead of to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Oracle only: print a witness as JSON if one is found.
    Falsify {
        instance: PathBuf,
        /// Random pairs after the structured ones; 0 checks structured pairs only.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write generated instances with metadata.
    Generate {
        /// gap, diag-iff, bipos, cd or random.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        /// diag-iff only: violate the bound at one coordinate.
        #[arg(long)]
        nonconvex: bool,
    },
}

fn configure_threads() {
    let Ok(value) = std::env::var("SPHCONV_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // Fails only if the pool was already built, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => eprintln!("warning: ignoring SPHCONV_THREADS={value:?}, expected a nonnegative integer"),
    }
}

fn check(
    path: &Path,
    samples: usize,
    seed: u64,
    tol: f64,
    exhaustive: bool,
    report: Option<&Path>,
) -> Result<i32, Error> {
    let file = read_instance(path)?;
    let battery = BatteryConfig {
        exhaustive,
        ..BatteryConfig::default()
    };
    let oracle = OracleConfig {
        pair_budget: samples,
        tol,
        ..OracleConfig::with_seed(seed)
    };
    oracle.validate()?;
    let r = verify(&file.instance, &file.cone, &battery, &oracle)?;
    for w in &r.instance.warnings {
        eprintln!("warning: {w}");
    }
    match report {
        Some(out) => {
            std::fs::write(out, r.to_json() + "\n")?;
            let by = r.decided_by.as_deref().map(|d| format!(" ({d})")).unwrap_or_default();
            println!("{:?}{by}", r.aggregate);
            if let Some(w) = &r.witness {
                println!("witness slack {:e}: u = {:?}, v = {:?}", w.slack, w.u, w.v);
            }
        }
        None => println!("{}", r.to_json()),
    }
    Ok(r.exit_code())
}

fn falsify_summary(v: &OracleVerdict) -> serde_json::Value {
    json!({
        "status": v.status,
        "pairs_checked": v.pairs_checked,
        "min_slack": v.min_slack,
        "min_h": v.min_h,
    })
}

fn falsify_cmd(path: &Path, budget: usize, seed: u64) -> Result<i32, Error> {
    let file = read_instance(path)?;
    let cfg = OracleConfig {
        pair_budget: budget,
        ..OracleConfig::with_seed(seed)
    };
    let verdict = if budget == 0 {
        falsify(&file.instance, &file.cone, &cfg)?
    } else {
        run_oracle(&file.instance, &file.cone, &cfg)?
    };
    match &verdict.witness {
        Some(w) if verdict.is_falsified() => {
            println!("{}", serde_json::to_string_pretty(w)?);
            Ok(1)
        }
        _ => {
            println!("{}", serde_json::to_string_pretty(&falsify_summary(&verdict))?);
            Ok(2)
        }
    }
}

fn generate_cmd(family: &str, n: usize, seed: u64, count: usize, out: &Path, nonconvex: bool) -> Result<i32, Error> {
    let family: Family = family.parse()?;
    if nonconvex && family != Family::DiagIff {
        return Err(Error::Precondition("--nonconvex only applies to the diag-iff family".into()));
    }
    std::fs::create_dir_all(out)?;
    for k in 0..count {
        let g = generate(family, n, child_seed(seed, k as u64), !nonconvex)?;
        let path = out.join(format!("{family}-n{n}-{k:04}.json"));
        write_instance(&path, &g.instance, &g.cone, Some(&g.meta))?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT_ERROR as u8 } else { 0 });
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Check {
            instance,
            samples,
            seed,
            tol,
            exhaustive,
            report,
        } => check(instance, *samples, *seed, *tol, *exhaustive, report.as_deref()),
        Command::Falsify { instance, budget, seed } => falsify_cmd(instance, *budget, *seed),
        Command::Generate {
            family,
            n,
            seed,
            count,
            out,
            nonconvex,
        } => generate_cmd(family, *n, *seed, *count, out, *nonconvex),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
