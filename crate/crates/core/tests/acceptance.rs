//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use sphconv::certificates::{
    bipos_constant, cert_bipos, run_battery, suffd_chain, BatteryConfig, CertificateOutcome, Verdict,
};
use sphconv::generators::{gen_bipos, gen_cd, gen_diag_iff, gen_random, generate, Family};
use sphconv::linalg::{projection_formula_lambda_min, restricted_lambda_min};
use sphconv::oracle::{
    falsify, geodesic_second_derivative, minimize_f_demo, run_oracle, value_spread, OracleConfig,
};
use sphconv::sampling::{
    child_seed, rng_from_seed, sample_orthogonal_partner, sample_unit_in_cone, sample_unit_sphere, SeededRng,
};
use sphconv::{foc_slack, Cone, QuadraticInstance};

const SEED: u64 = 0x005e_edac;

struct Check {
    pass: bool,
    summary: String,
}

impl Check {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
        }
    }
}

/// Runs one criterion and prints its line; a criterion over its time limit
/// fails even when its numbers are fine.
fn criterion(id: &str, title: &str, limit: Duration, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let check = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = check.pass && in_time;
    println!(
        "[{}] {id} {title}: {}; {:.2} s (limit {} s){}",
        if pass { "PASS" } else { "FAIL" },
        check.summary,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over time" },
    );
    pass
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `<Au,u> - <Av,v> - <b,v>/2` straight from the definition.
fn direct_slack(inst: &QuadraticInstance, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let a = inst.a();
    (a * u).dot(u) - (a * v).dot(v) - 0.5 * inst.b().dot(v)
}

fn conclusive(outcomes: &[CertificateOutcome], verdict: Verdict) -> usize {
    outcomes.iter().filter(|o| o.verdict == verdict).count()
}

fn ac1() -> Check {
    let mut worst: f64 = 0.0;
    let mut flips = 0;
    for k in 0..50u64 {
        let mut rng = rng_from_seed(child_seed(SEED, k));
        let n = rng.random_range(3..=8);
        let inst = gen_random(n, &mut rng).unwrap();
        let lambda = rng.random_range(-5.0..=5.0);
        let shifted = inst.shift(lambda);
        let cone = Cone::orthant(n);
        for _ in 0..1000 {
            let v = sample_unit_in_cone(&cone, &mut rng).unwrap();
            let u = sample_orthogonal_partner(&v, &mut rng);
            worst = worst.max((foc_slack(&inst, &u, &v) - foc_slack(&shifted, &u, &v)).abs());
        }
        let before = run_battery(&inst, &cone, &BatteryConfig::exhaustive()).unwrap().verdict;
        let after = run_battery(&shifted, &cone, &BatteryConfig::exhaustive()).unwrap().verdict;
        if before.is_conclusive() && after.is_conclusive() && before != after {
            flips += 1;
        }
    }
    Check::new(
        worst <= 1e-11 && flips == 0,
        format!("max |slack - shifted slack| = {worst:.2e} (tol 1e-11), conclusive flips = {flips}"),
    )
}

/// Minimum of `<Au,u>` over unit `u ⟂ x` from `evals` evaluations: uniform
/// draws for the first fifth, then a (1+1) evolution strategy around the
/// incumbent with the one-fifth step-size rule.
fn sampled_restricted_min(a: &DMatrix<f64>, x: &DVector<f64>, evals: usize, rng: &mut SeededRng) -> f64 {
    let n = x.len();
    let rayleigh = |u: &DVector<f64>| (a * u).dot(u);
    let project = |w: DVector<f64>| -> Option<DVector<f64>> {
        let p = &w - x * w.dot(x);
        let norm = p.norm();
        (norm > 1e-12).then(|| p / norm)
    };
    let mut best_u = sample_orthogonal_partner(x, rng);
    let mut best = rayleigh(&best_u);
    let uniform = evals / 5;
    for _ in 1..uniform {
        let u = sample_orthogonal_partner(x, rng);
        let q = rayleigh(&u);
        if q < best {
            best = q;
            best_u = u;
        }
    }
    let mut sigma = 0.3;
    for _ in uniform..evals {
        let step = DVector::from_fn(n, |_, _| normal(rng) * sigma);
        let Some(u) = project(&best_u + step) else { continue };
        let q = rayleigh(&u);
        if q < best {
            best = q;
            best_u = u;
            sigma *= 1.5;
        } else {
            sigma *= 1.5f64.powf(-0.25);
        }
        sigma = sigma.clamp(1e-9, 1.0);
    }
    best
}

fn ac2() -> Check {
    let mut worst_identity: f64 = 0.0;
    let mut worst_below: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for k in 0..100u64 {
        let mut rng = rng_from_seed(child_seed(SEED ^ 2, k));
        let n = rng.random_range(3..=6);
        let m = DMatrix::from_fn(n, n, |_, _| normal(&mut rng));
        let a = &m * m.transpose() / n as f64 + DMatrix::identity(n, n) * rng.random_range(0.05..1.0);
        let x = DVector::from_fn(n, |_, _| normal(&mut rng).abs() + 0.05);
        let x = &x / x.norm();
        let direct = restricted_lambda_min(&a, &x).unwrap();
        for _ in 0..2 {
            let r = sample_orthogonal_partner(&x, &mut rng);
            let formula = projection_formula_lambda_min(&a, &x, &r).unwrap();
            worst_identity = worst_identity.max((formula - direct).abs());
        }
        let sampled = sampled_restricted_min(&a, &x, 10_000, &mut rng);
        worst_below = worst_below.max(direct - sampled);
        worst_gap = worst_gap.max(sampled - direct);
    }
    Check::new(
        worst_identity <= 1e-8 && worst_below <= 1e-6 && worst_gap <= 1e-3,
        format!(
            "max |formula - restricted| = {worst_identity:.2e} (tol 1e-8), sampled min below eigenvalue by at most \
             {worst_below:.2e} (tol 1e-6), above by at most {worst_gap:.2e} (tol 1e-3)"
        ),
    )
}

fn ac3() -> Check {
    let mut worst_convex = f64::INFINITY;
    let mut worst_violated = f64::NEG_INFINITY;
    let mut missed = 0;
    for k in 0..50u64 {
        let mut rng = rng_from_seed(child_seed(SEED ^ 3, k));
        let n = rng.random_range(3..=8);
        let convex = k % 2 == 0;
        let inst = gen_diag_iff(n, &mut rng, convex).unwrap();
        let cone = Cone::orthant(n);
        if convex {
            let cfg = OracleConfig {
                pair_budget: 100_000,
                ..OracleConfig::with_seed(k)
            };
            let v = falsify(&inst, &cone, &cfg).unwrap();
            worst_convex = worst_convex.min(v.min_slack);
        } else {
            let cfg = OracleConfig {
                pair_budget: 0,
                ..OracleConfig::with_seed(k)
            };
            match falsify(&inst, &cone, &cfg).unwrap().witness {
                Some(w) => worst_violated = worst_violated.max(direct_slack(&inst, &w.u_vec(), &w.v_vec())),
                None => missed += 1,
            }
        }
    }
    Check::new(
        worst_convex >= -1e-8 && missed == 0 && worst_violated <= -0.02,
        format!(
            "at-bound min slack = {worst_convex:.2e} (tol -1e-8), violated: {missed} missed, largest witness \
             slack = {worst_violated:.4} (need <= -0.02)"
        ),
    )
}

fn ac4() -> Check {
    let mut cond_i = 0;
    let mut cond_ii = 0;
    let mut worst = f64::INFINITY;
    for k in 0..100u64 {
        let mut rng = rng_from_seed(child_seed(SEED ^ 4, k));
        let n = rng.random_range(3..=8);
        // Condition (i) forces a Z-matrix: a zero-diagonal copositive matrix
        // is entrywise nonnegative.
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = rng.random_range(-2.0..2.0);
            for j in (i + 1)..n {
                let off = if rng.random_bool(0.3) { 0.0 } else { -rng.random_range(0.0..1.0) };
                a[(i, j)] = off;
                a[(j, i)] = off;
            }
        }
        let probe = QuadraticInstance::new(a.clone(), DVector::zeros(n), 0.0).unwrap();
        let lmin = probe.lambda_min();
        let b = DVector::from_fn(n, |i, _| {
            let margin = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1.0) };
            2.0 * (lmin - a[(i, i)]) - margin
        });
        let inst = QuadraticInstance::new(a, b, 0.0).unwrap();
        let chain = suffd_chain(&inst, 1e-10 * inst.scale());
        if chain.cond_i == Some(true) {
            cond_i += 1;
            if chain.cond_ii == Some(true) {
                cond_ii += 1;
            }
        }
        let cfg = OracleConfig {
            pair_budget: 10_000,
            ..OracleConfig::with_seed(k)
        };
        worst = worst.min(falsify(&inst, &Cone::orthant(n), &cfg).unwrap().min_slack);
    }
    Check::new(
        cond_i == 100 && cond_ii == 100 && worst >= -1e-8,
        format!("(i) held on {cond_i}/100, (ii) on {cond_ii}/100, oracle min slack = {worst:.2e} (tol -1e-8)"),
    )
}

fn ac5() -> Check {
    let beta = bipos_constant();
    let mut fired = 0;
    let mut one_positive = 0;
    let mut worst = f64::INFINITY;
    for k in 0..20u64 {
        let mut rng = rng_from_seed(child_seed(SEED ^ 5, k));
        let n = rng.random_range(3..=8);
        let inst = gen_bipos(n, &mut rng).unwrap();
        let cone = Cone::orthant(n);
        if inst.b().iter().filter(|&&x| x > 0.0).count() == 1 {
            one_positive += 1;
        }
        if cert_bipos(&inst, &cone).verdict == Verdict::ProvesConvex {
            fired += 1;
        }
        let cfg = OracleConfig {
            pair_budget: 100_000,
            ..OracleConfig::with_seed(k)
        };
        worst = worst.min(falsify(&inst, &cone, &cfg).unwrap().min_slack);
    }
    let ratio = 2.0 * (-1.0 + beta);
    Check::new(
        fired == 20 && one_positive == 20 && worst >= -1e-8 && (beta - 1.1799597).abs() <= 1e-6 && (ratio - 0.3599).abs() <= 1e-3,
        format!(
            "certificate fired {fired}/20, one positive b entry {one_positive}/20, oracle min slack = {worst:.2e}, \
             beta = {beta:.7}, 2(beta - 1) = {ratio:.4}"
        ),
    )
}

fn ac6() -> Check {
    let mut disproofs = 0;
    let mut bad_witnesses = 0;
    let mut contradictions = 0;
    for k in 0..200u64 {
        let mut rng = rng_from_seed(child_seed(SEED ^ 6, k));
        let n = rng.random_range(3..=8);
        let inst = match k % 4 {
            0 | 1 => gen_random(n, &mut rng).unwrap(),
            // Diagonal and sparse instances reach the exact and structural
            // certificates that dense random matrices never trigger.
            2 => {
                let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let b: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
                QuadraticInstance::diagonal(&d, &b, 0.0).unwrap()
            }
            _ => {
                let base = gen_cd(n, &mut rng).unwrap();
                let b = base.b().map(|x| x + 3.0 * normal(&mut rng));
                QuadraticInstance::new(base.a().clone(), b, 0.0).unwrap()
            }
        };
        let cone = Cone::orthant(n);
        let battery = run_battery(&inst, &cone, &BatteryConfig::exhaustive());
        let Ok(battery) = battery else {
            contradictions += 1;
            continue;
        };
        for o in &battery.outcomes {
            if o.verdict == Verdict::ProvesNonConvex {
                disproofs += 1;
                let ok = o.witness.as_ref().is_some_and(|w| {
                    let (u, v) = (w.u_vec(), w.v_vec());
                    (u.norm() - 1.0).abs() <= 1e-12
                        && (v.norm() - 1.0).abs() <= 1e-12
                        && u.dot(&v).abs() <= 1e-12
                        && v.iter().all(|&x| x >= -1e-10)
                        && direct_slack(&inst, &u, &v) < -1e-12
                });
                if !ok {
                    bad_witnesses += 1;
                }
            }
        }
        let cfg = OracleConfig {
            pair_budget: 10_000,
            geodesic_count: 200,
            ..OracleConfig::with_seed(k)
        };
        let oracle = run_oracle(&inst, &cone, &cfg).unwrap();
        if conclusive(&battery.outcomes, Verdict::ProvesConvex) > 0 && oracle.is_falsified() {
            contradictions += 1;
        }
    }
    Check::new(
        bad_witnesses == 0 && contradictions == 0 && disproofs > 0,
        format!("{disproofs} disproofs checked, {bad_witnesses} invalid witnesses, {contradictions} contradictions"),
    )
}

fn ac7() -> Check {
    let mut worst_fd: f64 = 0.0;
    let mut worst_foc: f64 = 0.0;
    let h = 1e-3;
    for k in 0..1000u64 {
        let mut rng = rng_from_seed(child_seed(SEED ^ 7, k));
        let n = rng.random_range(3..=8);
        let inst = gen_random(n, &mut rng).unwrap();
        let x = sample_unit_sphere(n, &mut rng);
        let v = sample_orthogonal_partner(&x, &mut rng);
        let t = rng.random_range(0.0..std::f64::consts::PI);
        let f = |s: f64| inst.value(&(&x * s.cos() + &v * s.sin()));
        // Five-point central stencil.
        let fd = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
        worst_fd = worst_fd.max((fd - geodesic_second_derivative(&inst, &x, &v, t)).abs());
        let at0 = geodesic_second_derivative(&inst, &x, &v, 0.0);
        worst_foc = worst_foc.max((at0 - 2.0 * direct_slack(&inst, &v, &x)).abs());
    }
    Check::new(
        worst_fd <= 1e-6 && worst_foc <= 1e-10,
        format!("max |analytic - finite difference| = {worst_fd:.2e} (tol 1e-6), max |g''(0) - 2 slack| = {worst_foc:.2e} (tol 1e-10)"),
    )
}

fn ac8() -> Check {
    let families = [Family::Gap, Family::DiagIff, Family::Bipos, Family::Cd];
    let mut worst: f64 = 0.0;
    let mut certified = 0;
    for k in 0..10u64 {
        let family = families[k as usize % families.len()];
        let n = 3 + k as usize % 4;
        let g = generate(family, n, child_seed(SEED ^ 8, k), true).unwrap();
        let battery = run_battery(&g.instance, &g.cone, &BatteryConfig::default()).unwrap();
        if battery.verdict == Verdict::ProvesConvex {
            certified += 1;
        }
        let runs = minimize_f_demo(&g.instance, &g.cone, 20, k).unwrap();
        worst = worst.max(value_spread(&runs));
    }
    let bad = QuadraticInstance::diagonal(&[1.0, 2.0, 3.0], &[0.0; 3], 0.0).unwrap();
    let spread = value_spread(&minimize_f_demo(&bad, &Cone::orthant(3), 20, 0).unwrap());
    Check::new(
        certified == 10 && worst <= 1e-6 && spread > 0.5,
        format!("{certified}/10 certified, max value spread = {worst:.2e} (tol 1e-6), diag(1,2,3) spread = {spread:.3} (need > 0.5)"),
    )
}

fn ac9() -> Check {
    let mut rng = rng_from_seed(SEED ^ 9);
    let mut worst_proj: f64 = 0.0;
    for _ in 0..100_000 {
        let n = rng.random_range(3..=8);
        let a = sample_unit_sphere(n, &mut rng);
        let v = sample_unit_sphere(n, &mut rng);
        let u = sample_orthogonal_partner(&v, &mut rng);
        worst_proj = worst_proj.max(a.dot(&u).powi(2) + a.dot(&v).powi(2));
    }
    let mut worst_sum = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let n = rng.random_range(3..=8);
        let mut b: Vec<f64> = (0..n).map(|_| -normal(&mut rng).abs()).collect();
        let k = rng.random_range(0..n);
        let room = (0..n).filter(|&j| j != k).map(|j| -b[j]).fold(f64::INFINITY, f64::min);
        b[k] = rng.random_range(-1.0..=1.0) * room;
        let b = DVector::from_vec(b);
        // Orthonormal pairs in the orthant have disjoint supports.
        let split = rng.random_range(1..n);
        let perm = rand::seq::index::sample(&mut rng, n, n);
        let mut u = DVector::zeros(n);
        let mut v = DVector::zeros(n);
        for (pos, idx) in perm.iter().enumerate() {
            let w = normal(&mut rng).abs();
            if pos < split {
                u[idx] = w;
            } else {
                v[idx] = w;
            }
        }
        if u.norm() == 0.0 || v.norm() == 0.0 {
            continue;
        }
        let (u, v) = (&u / u.norm(), &v / v.norm());
        worst_sum = worst_sum.max(b.dot(&(u + v)));
    }
    Check::new(
        worst_proj <= 1.0 + 1e-12 && worst_sum <= 1e-12,
        format!("max <a,u>^2 + <a,v>^2 = {worst_proj:.15} (bound 1 + 1e-12), max <b,u+v> = {worst_sum:.2e} (bound 1e-12)"),
    )
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        criterion("AC1", "shift invariance", s(10), ac1),
        criterion("AC2", "projection formula identity", s(30), ac2),
        criterion("AC3", "diagonal exactness", s(60), ac3),
        criterion("AC4", "copositive implication chain", s(60), ac4),
        criterion("AC5", "positive-component diagonal instances", s(90), ac5),
        criterion("AC6", "negative-certificate soundness", s(60), ac6),
        criterion("AC7", "geodesic second derivative", s(60), ac7),
        criterion("AC8", "local minima are global", s(60), ac8),
        criterion("AC9", "orthonormal projections and pair sums", s(5), ac9),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
