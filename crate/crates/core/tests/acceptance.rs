//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{naive_restricted_sums, random_general, random_symmetric, rel_err};
use permcorr::builders::{kernel_matrix, mmd_label_matrix, Bandwidth, LabelVector};
use permcorr::conditions::{bounded_entries_matrix, prime_transform, scenario_bounded_entries, Ratio};
use permcorr::engine::{enumerate_exact, ks_normal, sample_null, EnumerationCap, Summary};
use permcorr::moments::Standardizer;
use permcorr::oracle::{random_antisymmetric, random_symmetric_hollow};
use permcorr::statistic::{build_pair, synthetic_inputs, BuildOptions, Statistic};
use permcorr::{
    exact_mean, exact_second_moment, exact_variance, moment_report, normalizer, restricted_sum, CoefficientMatrix,
    DistinctSumPattern, NormalizerKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn cap() -> EnumerationCap {
    EnumerationCap::default()
}

fn enumerated(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Vec<f64> {
    enumerate_exact(a, b, cap()).unwrap().values
}

fn moment(values: &[f64], p: i32) -> f64 {
    values.iter().map(|v| v.powi(p)).sum::<f64>() / values.len() as f64
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for n in 4..=7 {
        for _ in 0..20 {
            let a = random_symmetric_hollow(n, &mut rng);
            let b = random_symmetric_hollow(n, &mut rng);
            let v = enumerated(&a, &b);
            e1 = e1.max(rel_err(exact_mean(&a, &b).unwrap(), moment(&v, 1)));
            e2 = e2.max(rel_err(exact_second_moment(&a, &b).unwrap(), moment(&v, 2)));
        }
    }
    let msg = format!("80 pairs, max rel err mean {e1:.2e}, second moment {e2:.2e} (tol 1e-9)");
    if e1 <= 1e-9 && e2 <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn antisymmetric_mean() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let (mut formula, mut worst) = (0.0f64, 0.0f64);
    for n in 4..=7 {
        for _ in 0..20 {
            let a = random_antisymmetric(n, &mut rng);
            let b = random_antisymmetric(n, &mut rng);
            let scale = (n * n) as f64 * a.max_abs() * b.max_abs();
            formula = formula.max(exact_mean(&a, &b).unwrap().abs());
            worst = worst.max(moment(&enumerated(&a, &b), 1).abs() / scale);
        }
    }
    let msg = format!("80 pairs, max |formula| {formula:.1e}, max scaled |enum mean| {worst:.2e} (tol 1e-10)");
    if formula == 0.0 && worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn restricted_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst = 0.0f64;
    for k in 0..50 {
        // alternate classes so every pattern sees a diagonal and asymmetry
        let a = if k % 2 == 0 {
            random_general(6, &mut rng)
        } else {
            random_symmetric(6, false, &mut rng)
        };
        let naive = naive_restricted_sums(&a);
        for (p, want) in DistinctSumPattern::ALL.iter().zip(naive) {
            worst = worst.max(rel_err(restricted_sum(&a, *p), want));
        }
    }
    let msg = format!("50 matrices x 7 patterns, max rel err {worst:.2e} (tol 1e-10)");
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn degenerate_family() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [4, 6, 8] {
        let a = bounded_entries_matrix(n).unwrap();
        let b = random_symmetric_hollow(n, &mut rng);
        let raw = exact_second_moment(&a, &b).unwrap() - exact_mean(&a, &b).unwrap().powi(2);
        let eps = 1e-12 * ((n * n) as f64 * a.max_abs() * b.max_abs()).powi(2);
        let report = moment_report(&a, &b).unwrap();
        let dist = enumerate_exact(&a, &b, cap()).unwrap();
        let first = dist.values[0];
        let single = dist.values.iter().all(|v| (v - first).abs() <= 1e-12 * first.abs().max(1.0));
        ok &= raw.abs() <= eps && report.degenerate && report.variance == 0.0 && single && dist.is_constant();
        notes.push(format!("N={n} |var|={:.1e}", raw.abs()));
    }
    let msg = format!("{}; single support point", notes.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scenario() -> Outcome {
    let s = scenario_bounded_entries(10).unwrap();
    let got = (
        s.pham2.ratio("a_sq_over_n2_max_sq"),
        s.pham3.ratio("a_max_abs_rowsum_over_max"),
        s.main.ratio("h_a"),
    );
    let msg = format!("pham2 {:?}, pham3 {:?}, h_a {:?}", got.0, got.1, got.2);
    if got == (Some(Ratio::Value(0.9)), Some(Ratio::Value(9.0)), Some(Ratio::Value(0.81))) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn pair_for(stat: Statistic, n: usize, data_seed: u64) -> (CoefficientMatrix, CoefficientMatrix) {
    let inputs = synthetic_inputs(stat, n, data_seed).unwrap();
    build_pair(stat, &inputs, &BuildOptions::default()).unwrap()
}

fn standardized_summary(a: &CoefficientMatrix, b: &CoefficientMatrix, values: &[f64]) -> Summary {
    let st = Standardizer::new(a, b, NormalizerKind::ExactSd).unwrap();
    let z: Vec<f64> = values.iter().map(|&g| st.apply(g)).collect();
    Summary::of(&z)
}

fn wilcoxon_normality() -> Outcome {
    let (a, b) = pair_for(Statistic::Wilcoxon, 200, 2024);
    let dist = sample_null(&a, &b, 20_000, 7, None).unwrap();
    let ks = ks_normal(&dist, &a, &b, NormalizerKind::ExactSd).unwrap();
    let skew = dist.summary.skewness.unwrap();
    let msg = format!("KS {ks:.4} (<= 0.025), skewness {skew:+.4} (|.| <= 0.1)");
    if ks <= 0.025 && skew.abs() <= 0.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn mantel_normality() -> Outcome {
    let (a, b) = pair_for(Statistic::MantelCentered, 200, 2025);
    let dist = sample_null(&a, &b, 20_000, 8, None).unwrap();
    let ks = ks_normal(&dist, &a, &b, NormalizerKind::ExactSd).unwrap();
    let sd = exact_variance(&a, &b).unwrap().sqrt();
    let ratio = normalizer(&a, &b, NormalizerKind::Daniels).unwrap() / sd;
    let pham3 = normalizer(&a, &b, NormalizerKind::Pham3).unwrap() / sd;
    let msg = format!(
        "KS {ks:.4} (<= 0.03), main-theorem normalizer / exact sd {ratio:.4} (in [0.85, 1.15]); pham3 / exact sd {pham3:.4}"
    );
    if ks <= 0.03 && (0.85..=1.15).contains(&ratio) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn mmd_end_to_end() -> Outcome {
    let inputs = synthetic_inputs(Statistic::Mmd, 100, 2026).unwrap();
    let sample = inputs.points.unwrap();
    let labels = LabelVector::new((0..100).map(|i| (i >= 50) as u8).collect()).unwrap();
    let a = kernel_matrix(&sample, Bandwidth::Median, false).unwrap();
    let b = mmd_label_matrix(&labels).unwrap();
    let dist = sample_null(&a, &b, 20_000, 9, None).unwrap();
    let s = standardized_summary(&a, &b, &dist.values);
    let msg = format!("standardized mean {:+.4} (in [-0.05, 0.05]), variance {:.4} (in [0.9, 1.1])", s.mean, s.variance);
    if (-0.05..=0.05).contains(&s.mean) && (0.9..=1.1).contains(&s.variance) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn third_moment_trend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let scaled = |n: usize, rng: &mut ChaCha8Rng| -> f64 {
        let a = prime_transform(&random_symmetric_hollow(n, rng));
        let b = prime_transform(&random_symmetric_hollow(n, rng));
        let m3 = moment(&enumerated(&a, &b), 3);
        m3.abs() / ((n as f64).powf(4.5) * a.max_abs().powi(3) * b.max_abs().powi(3))
    };
    let mut wins = 0;
    for _ in 0..20 {
        let s5 = scaled(5, &mut rng);
        let s8 = scaled(8, &mut rng);
        wins += (s8 < s5) as usize;
    }
    let msg = format!("decreased in {wins}/20 trials (need >= 18)");
    if wins >= 18 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn strip_wall_clock(json: &[u8]) -> String {
    String::from_utf8_lossy(json)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_clock_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let inputs = synthetic_inputs(Statistic::Mmd, 60, 2027).unwrap();
    let pts: String = inputs
        .points
        .unwrap()
        .points()
        .iter()
        .map(|p| format!("{:?},{:?}\n", p[0], p[1]))
        .collect();
    let lab: String = (0..60).map(|i| format!("{}\n", (i % 2) as u8)).collect();
    let points = dir.path().join("points.csv");
    let labels = dir.path().join("labels.csv");
    std::fs::write(&points, pts).unwrap();
    std::fs::write(&labels, lab).unwrap();
    let run = |threads: &str| -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_permcorr"))
            .args(["test", "--statistic", "mmd", "--draws", "5000", "--seed", "31", "--threads", threads])
            .arg("--points")
            .arg(&points)
            .arg("--labels")
            .arg(&labels)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(strip_wall_clock(&out.stdout))
    };
    let first = run("1")?;
    let second = run("1")?;
    let parallel = run("4")?;
    let msg = format!(
        "{} bytes; repeat identical: {}, threads 1 vs 4 identical: {}",
        first.len(),
        first == second,
        first == parallel
    );
    if first == second && first == parallel {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("moment formulas match enumeration", oracle_equivalence),
        ("antisymmetric mean is zero", antisymmetric_mean),
        ("restricted-sum kernels match loops", restricted_sums),
        ("degenerate family", degenerate_family),
        ("bounded-entries scenario", scenario),
        ("wilcoxon N=200 normality", wilcoxon_normality),
        ("centered-distance N=200 normality", mantel_normality),
        ("mmd N=100 standardization", mmd_end_to_end),
        ("third-moment scaling trend", third_moment_trend),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
