//! Cross-checks against oracles that share no code with the library paths
//! they test: nalgebra's eigensolver and QR, brute-force circle scans, and
//! the random falsifier against closed-form certificates.

use nalgebra::{DMatrix, DVector};

use sphconv::certificates::{
    bipos_constant, cert_bipos, cert_decomposition, cert_diag_iff, cert_gap_sufficient, run_battery,
    theta_scan_pair, BatteryConfig, Verdict,
};
use sphconv::generators::{gen_bipos, gen_cd, gen_diag_iff, gen_gap, gen_random};
use sphconv::linalg::{restricted_lambda_min, symmetric_eigen};
use sphconv::oracle::{falsify, pointwise_h, OracleConfig, OracleStatus};
use sphconv::sampling::{rng_from_seed, sample_unit_sphere};
use sphconv::{foc_slack, Cone, QuadraticInstance};

/// `lambda_min(B^T A B)` with `B` from nalgebra's QR of `[x | I]`.
fn qr_restricted_min(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let n = x.len();
    let mut m = DMatrix::zeros(n, n + 1);
    m.set_column(0, x);
    m.columns_mut(1, n).copy_from(&DMatrix::identity(n, n));
    let q = m.qr().q();
    let b = q.columns(1, n - 1).into_owned();
    let r = b.transpose() * a * &b;
    nalgebra::SymmetricEigen::new(r).eigenvalues.min()
}

fn random_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    let m = DMatrix::from_fn(n, n, |_, _| sample_unit_sphere(1, &mut rng)[0] * rand::Rng::random::<f64>(&mut rng));
    (&m + m.transpose()) * 0.5
}

#[test]
fn restricted_min_matches_qr_complement() {
    for seed in 0..200 {
        let n = 3 + (seed as usize % 6);
        let a = random_matrix(n, seed);
        let x = sample_unit_sphere(n, &mut rng_from_seed(seed + 1000));
        let ours = restricted_lambda_min(&a, &x).unwrap();
        let theirs = qr_restricted_min(&a, &x);
        assert!((ours - theirs).abs() < 1e-10, "seed {seed}: {ours} vs {theirs}");
    }
}

#[test]
fn jacobi_matches_nalgebra() {
    for seed in 0..200 {
        let n = 3 + (seed as usize % 6);
        let a = random_matrix(n, seed) * 10.0;
        let ours = symmetric_eigen(&a).unwrap().values;
        let mut theirs: Vec<f64> = nalgebra::SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

/// In `R^3`, `h(x)` is the minimum of `foc_slack(u, x)` over the great circle
/// `x^⟂`; a fine scan of that circle gives it directly.
#[test]
fn pointwise_h_matches_circle_scan_in_three_dimensions() {
    for seed in 0..50 {
        let inst = gen_random(3, &mut rng_from_seed(seed)).unwrap();
        let cone = Cone::orthant(3);
        let x = sample_unit_sphere(3, &mut rng_from_seed(seed + 77)).map(f64::abs);
        let p = (DMatrix::identity(3, 3) - &x * x.transpose()).column(0).into_owned();
        let p = if p.norm() > 1e-6 {
            p.normalize()
        } else {
            (DMatrix::identity(3, 3) - &x * x.transpose()).column(1).normalize()
        };
        let q = x.cross(&p);
        let scan = (0..200_000)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 200_000.0;
                foc_slack(&inst, &(&p * t.cos() + &q * t.sin()), &x)
            })
            .fold(f64::INFINITY, f64::min);
        let h = pointwise_h(&inst, &cone, &x).unwrap();
        assert!(h <= scan + 1e-12 && scan - h < 1e-8, "seed {seed}: {h} vs {scan}");
    }
}

/// The rotated pair in the (i, j) plane is a one-parameter family; a fine
/// scan of its slack bounds the refined minimizer.
#[test]
fn theta_scan_matches_brute_force() {
    for seed in 0..30 {
        let inst = gen_random(4, &mut rng_from_seed(seed)).unwrap();
        let (i, j) = (seed as usize % 4, (seed as usize + 1) % 4);
        let (_, slack) = theta_scan_pair(&inst, i, j);
        let mut best = f64::INFINITY;
        for k in 0..=100_000 {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / 100_000.0;
            let mut u = DVector::zeros(4);
            let mut v = DVector::zeros(4);
            u[i] = t.cos();
            u[j] = -t.sin();
            v[i] = t.sin();
            v[j] = t.cos();
            best = best.min(foc_slack(&inst, &u, &v));
        }
        assert!(slack <= best + 1e-9 && best - slack < 1e-6, "seed {seed}: {slack} vs {best}");
    }
}

fn no_violation(inst: &QuadraticInstance, pairs: usize, seed: u64) -> f64 {
    let cfg = OracleConfig {
        pair_budget: pairs,
        ..OracleConfig::with_seed(seed)
    };
    let v = falsify(inst, &Cone::orthant(inst.n()), &cfg).unwrap();
    assert_ne!(v.status, OracleStatus::FalsifiedNonConvex, "witness {:?}", v.witness);
    v.min_slack
}

#[test]
fn sufficient_families_survive_the_falsifier() {
    for seed in 0..20 {
        let n = 3 + seed as usize % 4;
        let mut rng = rng_from_seed(seed);
        let orthant = Cone::orthant(n);
        let gap = gen_gap(n, &mut rng).unwrap();
        assert_eq!(cert_gap_sufficient(&gap, &orthant).verdict, Verdict::ProvesConvex);
        assert!(no_violation(&gap, 100_000, seed) >= -1e-8);
        let bip = gen_bipos(n, &mut rng).unwrap();
        assert_eq!(cert_bipos(&bip, &orthant).verdict, Verdict::ProvesConvex);
        assert!(no_violation(&bip, 100_000, seed) >= -1e-8);
        let cd = gen_cd(n, &mut rng).unwrap();
        assert_eq!(cert_decomposition(&cd, &orthant).verdict, Verdict::ProvesConvex);
        assert!(no_violation(&cd, 100_000, seed) >= -1e-8);
        let diag = gen_diag_iff(n, &mut rng, true).unwrap();
        assert_eq!(cert_diag_iff(&diag, &orthant).verdict, Verdict::ProvesConvex);
        assert!(no_violation(&diag, 100_000, seed) >= -1e-8);
    }
}

#[test]
fn diag_iff_agrees_with_sampling_at_margin_point_one() {
    for seed in 0..20 {
        let n = 3 + seed as usize % 4;
        let mut d: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.37).collect();
        d[n - 1] = 1.0;
        let mut b: Vec<f64> = d.iter().map(|di| 2.0 * (1.0 - di)).collect();
        let k = seed as usize % n;
        b[k] += 0.1;
        let inst = QuadraticInstance::diagonal(&d, &b, 0.0).unwrap();
        assert_eq!(cert_diag_iff(&inst, &Cone::orthant(n)).verdict, Verdict::ProvesNonConvex);
        // The violating basis pair is one of the structured seed pairs.
        let cfg = OracleConfig {
            pair_budget: 10_000,
            ..OracleConfig::with_seed(seed)
        };
        let v = falsify(&inst, &Cone::orthant(n), &cfg).unwrap();
        assert!(v.is_falsified(), "seed {seed}");
        assert!(v.witness.unwrap().slack <= -0.05 + 1e-12);
    }
}

#[test]
fn bipos_constant_value() {
    let beta = bipos_constant();
    assert!((beta - 1.1799597).abs() < 1e-6);
    assert!((2.0 * (beta - 1.0) - 0.3599).abs() < 1e-3);
    assert!((beta * beta - (6.0 * 3f64.sqrt() - 9.0)).abs() < 1e-15);
}

#[test]
fn battery_and_falsifier_never_contradict() {
    for seed in 0..100 {
        let n = 3 + seed as usize % 5;
        let inst = gen_random(n, &mut rng_from_seed(seed)).unwrap();
        let cone = Cone::orthant(n);
        let battery = run_battery(&inst, &cone, &BatteryConfig::exhaustive()).unwrap();
        let cfg = OracleConfig {
            pair_budget: 20_000,
            ..OracleConfig::with_seed(seed)
        };
        let oracle = falsify(&inst, &cone, &cfg).unwrap();
        assert!(!(battery.verdict == Verdict::ProvesConvex && oracle.is_falsified()), "seed {seed}");
        if let Some(w) = &oracle.witness {
            assert!(foc_slack(&inst, &w.u_vec(), &w.v_vec()) < -cfg.abs_tol(&inst));
        }
    }
}
