//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. `UPDATE_GOLDEN=1` rewrites the report golden files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specband::criteria::{c0_matrix_bounded, cesaro_mu_window, cesaro_verdict, operator_verdicts, rhaly_beta_window, rhaly_verdict, Decision};
use specband::finsec::{
    dense_eigenvalues, eigen_residual, finite_rank_error, random_operator_distance, smallest_singular_value, DEFAULT_SEED,
};
use specband::spectra::{
    a1_a2_membership, adjoint_eigenvector_rhaly, eigenvector_cesaro, eigenvector_rhaly, fine_spectrum_report,
    kummer_certificate, KummerVerdict, Membership, ReportOptions,
};
use specband::{CoeffSpec, OperatorSpec, SeqWindow, WeightSpec};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        x.abs()
    } else {
        ((x - y) / y).abs()
    }
}

fn geometric_half() -> WeightSpec {
    WeightSpec::Geometric { ratio: 0.5 }
}

fn unweighted() -> WeightSpec {
    WeightSpec::Constant { c: 1.0 }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn beta_example() -> Outcome {
    let start = Instant::now();
    let a = CoeffSpec::PowerDecay { p: 2.0 };
    let s = WeightSpec::ExpPower { alpha: 2 };
    let beta = rhaly_beta_window(&a, &s, 500).map_err(err)?;
    let first_rise = (20..beta.len()).find(|&i| beta[i] >= beta[i - 1]);
    ensure(first_rise.is_none(), || format!("beta rises at n = {}", first_rise.unwrap() + 1))?;
    let b500 = beta[499];
    ensure(b500 < 1e-3, || format!("beta_500 = {b500:e}"))?;
    // tol 1e-6 cannot be met by beta_500 ~ 1.7e-4 inside the horizon; 1e-3 can
    let v = rhaly_verdict(&a, &s, 500, 1e-3).map_err(err)?;
    ensure(v.compact.decision == Decision::Holds && !v.compact.certified, || {
        format!("compact verdict {:?} certified={}", v.compact.decision, v.compact.certified)
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("beta_500 = {b500:.6e}, compact holds (heuristic), {elapsed:.0?}"))
}

fn unbounded_sqrt() -> Outcome {
    let a = CoeffSpec::PowerDecay { p: 0.5 };
    let op = OperatorSpec::rhaly(a.clone(), unweighted());
    let v = rhaly_verdict(&a, &unweighted(), 512, 1e-6).map_err(err)?;
    ensure(v.bounded.decision == Decision::Fails && v.bounded.certified, || {
        format!("bounded verdict {:?} certified={}", v.bounded.decision, v.bounded.certified)
    })?;
    let lemma = c0_matrix_bounded(&op, 512).map_err(err)?;
    ensure(lemma.decision == Decision::Fails, || format!("row criterion says {:?}", lemma.decision))?;
    let rows = op.truncate(101).map_err(err)?.row_l1_norms();
    for (i, r) in rows.iter().enumerate() {
        let n = (i + 1) as f64;
        ensure(rel_err(*r, n.sqrt()) < 1e-12, || format!("row {} norm {r} != sqrt(n)", i + 1))?;
    }
    ensure(rows[99] >= 10.0 - 1e-12 && rows[100] > 10.0, || format!("row norms {} {}", rows[99], rows[100]))?;
    Ok(format!("bounded fails (certified), row 100 norm = {:.12}", rows[99]))
}

fn eigenvectors() -> Outcome {
    let x = eigenvector_rhaly(&CoeffSpec::Harmonic, 2, 300).map_err(err)?;
    for (n, v) in x.values.indexed() {
        let expected = n as f64 - 1.0;
        ensure(if n == 1 { v == 0.0 } else { rel_err(v, expected) <= 1e-12 }, || {
            format!("x_{n} = {v}, expected {expected}")
        })?;
    }
    let op = OperatorSpec::rhaly(CoeffSpec::Harmonic, geometric_half());
    let res = eigen_residual(&op, 0.5, &x.values, 300, &geometric_half()).map_err(err)?;
    ensure(res <= 1e-10, || format!("residual {res:e}"))?;
    let t = 0.5f64;
    let c1 = eigenvector_cesaro(t, 1, 60).map_err(err)?;
    let c2 = eigenvector_cesaro(t, 2, 60).map_err(err)?;
    for n in 1..=60usize {
        let want1 = t.powi(n as i32 - 1);
        let want2 = if n == 1 { 0.0 } else { (n - 1) as f64 * t.powi(n as i32 - 2) };
        let (g1, g2) = (c1.values.get(n).unwrap(), c2.values.get(n).unwrap());
        ensure(rel_err(g1, want1) <= 1e-12, || format!("m = 1, n = {n}: {g1} vs {want1}"))?;
        ensure(rel_err(g2, want2) <= 1e-12, || format!("m = 2, n = {n}: {g2} vs {want2}"))?;
    }
    Ok(format!("x_n = n - 1 through n = 300, residual {res:.2e}"))
}

fn adjoint_support() -> Outcome {
    let a = CoeffSpec::Harmonic;
    let op = OperatorSpec::rhaly(a.clone(), unweighted());
    let mut worst: f64 = 0.0;
    for k in [1usize, 2, 3, 7] {
        let lambda = 1.0 / k as f64;
        let x = adjoint_eigenvector_rhaly(&a, k, 20).map_err(err)?;
        ensure(x.values[k..].iter().all(|v| *v == 0.0), || format!("k = {k}: nonzero beyond k"))?;
        let y = op.apply_adjoint_finite(&x).map_err(err)?;
        let res = y
            .values
            .iter()
            .zip(&x.values)
            .fold(0.0f64, |m, (yn, xn)| m.max((yn - lambda * xn).abs()));
        ensure(res <= 1e-14, || format!("k = {k}: residual {res:e}"))?;
        worst = worst.max(res);
    }
    Ok(format!("k in {{1,2,3,7}}, worst residual {worst:.1e}"))
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn report_json(op: &OperatorSpec) -> Result<String, String> {
    let verdicts = operator_verdicts(op, 512, 1e-6).map_err(err)?;
    let report = fine_spectrum_report(op, &verdicts, ReportOptions::default()).map_err(err)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(err)?;
    text.push('\n');
    Ok(text)
}

fn golden_reports() -> Outcome {
    let cases = [
        ("compact_rhaly_report.json", OperatorSpec::rhaly(CoeffSpec::Harmonic, geometric_half())),
        ("compact_cesaro_report.json", OperatorSpec::gen_cesaro(0.5, geometric_half(), geometric_half())),
    ];
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, op) in &cases {
        let first = report_json(op)?;
        let second = report_json(op)?;
        ensure(first == second, || format!("{name}: output differs between runs"))?;
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &first).map_err(err)?;
        }
        let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(expected == first, || format!("{name}: differs from golden file"))?;
    }
    Ok("Rhaly and C_t reports match golden files".into())
}

fn cesaro_cross_check() -> Outcome {
    let a = CoeffSpec::Harmonic;
    let s = unweighted();
    for m in 1..=20usize {
        let r = a1_a2_membership(&a, &s, 1.0, Complex64::new(1.0 / m as f64, 0.0)).map_err(err)?;
        ensure(r.in_a1 == Membership::No, || format!("1/{m} in A1: {:?}", r.in_a1))?;
    }
    let inside = a1_a2_membership(&a, &s, 1.0, Complex64::new(0.4, 0.1)).map_err(err)?;
    ensure(inside.in_a2 == Membership::Yes, || format!("0.4+0.1i in A2: {:?}", inside.in_a2))?;
    ensure((inside.alpha - 0.4 / 0.17).abs() <= 1e-12, || format!("alpha {}", inside.alpha))?;
    let outside = a1_a2_membership(&a, &s, 1.0, Complex64::new(2.0, 0.0)).map_err(err)?;
    ensure(outside.in_a2 == Membership::No, || format!("2 in A2: {:?}", outside.in_a2))?;
    ensure((outside.alpha - 0.5).abs() <= 1e-12, || format!("alpha {}", outside.alpha))?;
    Ok(format!("alpha = {:.15} and {:.15}", inside.alpha, outside.alpha))
}

fn mu_and_norm() -> Outcome {
    let s = unweighted();
    let mu = cesaro_mu_window(0.5, &s, &s, 200).map_err(err)?;
    for (i, m) in mu.iter().enumerate() {
        let n = (i + 1) as f64;
        let want = (1.0 - 0.5f64.powi(i as i32 + 1)) / (0.5 * n);
        ensure(rel_err(*m, want) <= 1e-12, || format!("mu_{} = {m}, expected {want}", i + 1))?;
    }
    let v = cesaro_verdict(0.5, &s, &s, 512, 1e-6).map_err(err)?;
    ensure((v.norm.value - 1.0).abs() <= 1e-12 && v.norm.argmax == 1, || {
        format!("norm {} at {}", v.norm.value, v.norm.argmax)
    })?;
    let bound = finite_rank_error(0.5, &s, &s, 10, 512).map_err(err)?;
    ensure(rel_err(bound.value, mu[10]) <= 1e-12, || format!("bound {} vs mu_11 {}", bound.value, mu[10]))?;
    let measured = random_operator_distance(0.5, &s, &s, 10, 200, 50, DEFAULT_SEED).map_err(err)?;
    ensure(measured <= bound.value + 1e-12, || format!("measured {measured} > bound {}", bound.value))?;
    Ok(format!("norm = 1, mu_11 = {:.15}, measured {measured:.6}", bound.value))
}

fn sigma_min_decay() -> Outcome {
    let start = Instant::now();
    let op = OperatorSpec::rhaly(CoeffSpec::Harmonic, geometric_half());
    // dense SVD of the conjugated sections, computed once and frozen
    let oracle = [
        (100usize, 0.006_981_214_272_630_340_5),
        (200, 0.003_434_131_272_285_415_4),
        (400, 0.001_698_886_024_380_661_3),
        (800, 0.000_843_608_935_610_984_2),
    ];
    let mut values = Vec::new();
    for (n, want) in oracle {
        let t = op.truncate_conjugated(n).map_err(err)?;
        let got = smallest_singular_value(&t, Complex64::new(0.0, 0.0)).map_err(err)?;
        ensure(rel_err(got, want) <= 0.1, || format!("N = {n}: {got:e} vs oracle {want:e}"))?;
        values.push(got);
    }
    ensure(values.windows(2).all(|w| w[1] <= w[0]), || format!("not nonincreasing: {values:?}"))?;
    let ratio = values[3] / values[0];
    ensure(ratio < 1.0 / 3.0, || format!("ratio {ratio}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("sigma_800/sigma_100 = {ratio:.4}, {elapsed:.1?}"))
}

fn kummer() -> Outcome {
    let a = CoeffSpec::Harmonic;
    let x = eigenvector_rhaly(&a, 2, 101).map_err(err)?;
    let cert = kummer_certificate(&a, &geometric_half(), &x.values, 50..=100).map_err(err)?;
    let stat = &cert.statistic.values;
    ensure(stat.iter().all(|v| *v > 0.0), || "statistic not positive".into())?;
    ensure(stat.windows(2).all(|w| w[1] > w[0]), || "statistic not increasing".into())?;
    ensure(cert.verdict == KummerVerdict::Diverging, || format!("{:?}", cert.verdict))?;
    Ok(format!("statistic {:.4} -> {:.4}, diverging", stat[0], stat[stat.len() - 1]))
}

fn oracle_equivalence() -> Outcome {
    let ops = [
        OperatorSpec::rhaly(CoeffSpec::Harmonic, geometric_half()),
        OperatorSpec::rhaly(CoeffSpec::PowerDecay { p: 2.0 }, WeightSpec::ExpPower { alpha: 2 }),
        OperatorSpec::gen_cesaro(0.5, geometric_half(), unweighted()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut worst: f64 = 0.0;
    for op in &ops {
        for n in [1usize, 17, 100] {
            let dense = op.truncate(n).map_err(err)?;
            for _ in 0..50 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let fast = op.apply_truncated(&SeqWindow::from_prefix(x.clone()).map_err(err)?, n).map_err(err)?;
                let slow = dense.matvec(&x);
                let scale = slow.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let diff = fast.values.iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                ensure(diff <= 1e-12 * scale, || format!("N = {n}: difference {diff:e}"))?;
                worst = worst.max(diff / scale);
            }
        }
        let dense = op.truncate(200).map_err(err)?;
        let mut eig: Vec<f64> = dense_eigenvalues(&dense)
            .iter()
            .map(|z| {
                if z.im.abs() > 1e-10 {
                    f64::NAN
                } else {
                    z.re
                }
            })
            .collect();
        let mut diag = dense.diagonal();
        eig.sort_by(f64::total_cmp);
        diag.sort_by(f64::total_cmp);
        for (e, d) in eig.iter().zip(&diag) {
            ensure((e - d).abs() <= 1e-10, || format!("eigenvalue {e} vs diagonal {d}"))?;
        }
    }
    Ok(format!("worst relative difference {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("beta decay for n^-2 on exp(-sqrt n) weights", beta_example),
        ("n^-1/2 unbounded on c0", unbounded_sqrt),
        ("eigenvector closed forms", eigenvectors),
        ("adjoint eigenvectors have finite support", adjoint_support),
        ("fine spectrum golden reports", golden_reports),
        ("classical Cesaro A1/A2 membership", cesaro_cross_check),
        ("mu_n, norm and finite-rank bound", mu_and_norm),
        ("sigma_min decay at 0", sigma_min_decay),
        ("Kummer certificate", kummer),
        ("apply vs dense and eigenvalues vs diagonal", oracle_equivalence),
    ];
    let mut summary = String::new();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => writeln!(summary, "PASS {:>2} {name}: {detail}", i + 1).unwrap(),
            Err(detail) => {
                failures += 1;
                writeln!(summary, "FAIL {:>2} {name}: {detail}", i + 1).unwrap();
            }
        }
    }
    print!("{summary}");
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
