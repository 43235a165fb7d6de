//! One PASS/FAIL line per acceptance criterion. Tolerances and runtime
//! budgets are pinned below. The process exits nonzero only when a
//! criterion outside `KNOWN_FAILURES` fails.

use std::process::Command;
use std::time::{Duration, Instant};

use monoword::limits::{
    default_convergence_grid, f0, f0_normalization, f2, fklim_check, gue_f, theorem4_convergence,
    F0Method, GueRoute, MonteCarloOptions,
};
use monoword_cli::commands::crosscheck::{
    identity_checks, theorem1_checks, theorem2_checks, theorem3_checks, Check, DEFAULT_POINTS,
};

const SWEEP_SEED: u64 = 20_240;
const REPRO_SEED: u64 = 11;

const EXACT: f64 = 0.0;
const IDENTITY_TOL: f64 = 1e-6;
const DIFFERENCE_TOL: f64 = 1e-4;
const REFINEMENT_RATIO_TOL: f64 = 0.5;
const DET_TOL: f64 = 1e-6;
const SIGMA_FORM_TOL: f64 = 1e-5;
const FIRST_INTEGRAL_TOL: f64 = 1e-5;
const BOUNDARY_REL_TOL: f64 = 1e-3;
const CLOSED_FORM_TOL: f64 = 1e-8;
const FREDHOLM_TOL: f64 = 1e-6;
const NODE_DOUBLING_TOL: f64 = 1e-9;
const GAMMA_TOL: f64 = 1e-10;
const CONVERGENCE_FINAL_K2: f64 = 0.05;
const NORMALIZATION_TOL: f64 = 1e-6;
const CONVOLUTION_TOL: f64 = 1e-5;
const AIRY_TOL: f64 = 1e-4;
const FKLIM_BOUND: f64 = 0.2;

const CONVERGENCE_LENGTHS: [u32; 4] = [50, 100, 200, 400];

/// Criteria whose failure is analysed and expected.
const KNOWN_FAILURES: [u32; 1] = [5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn pinned(checks: &[Check], expected: &[(&str, f64)]) -> Outcome {
    let mut failed = Vec::new();
    let mut detail = Vec::new();
    for &(name, tol) in expected {
        let Some(c) = checks.iter().find(|c| c.name == name) else {
            failed.push(format!("{name} missing"));
            continue;
        };
        if c.tolerance != tol {
            failed.push(format!(
                "{name} tolerance {:e} differs from {tol:e}",
                c.tolerance
            ));
        }
        let ok = c.max_residual.is_finite() && c.max_residual <= tol;
        if !ok {
            failed.push(format!("{name} = {:.3e} at {}", c.max_residual, c.worst));
        }
        detail.push(format!("{name}={:.2e}", c.max_residual));
    }
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            detail.join(" ")
        } else {
            failed.join("; ")
        },
    }
}

fn criterion_1() -> Outcome {
    let checks = theorem1_checks().expect("theorem 1 checks run");
    pinned(
        &checks,
        &[
            ("theorem1.series_vs_enumeration", EXACT),
            ("theorem1.tableaux_vs_enumeration", EXACT),
        ],
    )
}

fn criterion_2() -> Outcome {
    let checks = identity_checks(DEFAULT_POINTS, SWEEP_SEED).expect("identity sweep runs");
    let mut expected: Vec<(String, f64)> = checks
        .iter()
        .filter(|c| c.name != "identities.h_refinement")
        .map(|c| {
            let short = c.name.trim_start_matches("identities.");
            let tol = if short.starts_with('d') {
                DIFFERENCE_TOL
            } else {
                IDENTITY_TOL
            };
            (c.name.clone(), tol)
        })
        .collect();
    expected.push(("identities.h_refinement".into(), REFINEMENT_RATIO_TOL));
    let borrowed: Vec<(&str, f64)> = expected.iter().map(|(n, t)| (n.as_str(), *t)).collect();
    let mut out = pinned(&checks, &borrowed);
    if out.pass {
        let worst = checks
            .iter()
            .filter(|c| c.name != "identities.h_refinement")
            .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
            .expect("identities present");
        out.detail = format!(
            "{} identities, {} points, worst {}={:.2e}, h-refinement |ratio-4|={:.2e}",
            checks.len() - 1,
            DEFAULT_POINTS,
            worst.name,
            worst.max_residual,
            checks.last().unwrap().max_residual
        );
    }
    out
}

fn criterion_3() -> Outcome {
    let checks = theorem2_checks(0.0).expect("theorem 2 checks run");
    pinned(
        &checks,
        &[
            ("theorem2.determinant", DET_TOL),
            ("theorem2.sigma_form", SIGMA_FORM_TOL),
            ("theorem2.first_integral", FIRST_INTEGRAL_TOL),
            ("theorem2.boundary_coefficient", BOUNDARY_REL_TOL),
            ("theorem2.closed_form", CLOSED_FORM_TOL),
        ],
    )
}

fn criterion_4() -> Outcome {
    let checks = theorem3_checks(0.0).expect("theorem 3 checks run");
    pinned(
        &checks,
        &[
            ("theorem3.fredholm", FREDHOLM_TOL),
            ("theorem3.node_doubling", NODE_DOUBLING_TOL),
            ("theorem3.incomplete_gamma", GAMMA_TOL),
        ],
    )
}

fn criterion_5() -> Outcome {
    let grid = default_convergence_grid();
    let two = theorem4_convergence(2, &CONVERGENCE_LENGTHS, &grid).expect("k = 2 convergence runs");
    let three =
        theorem4_convergence(3, &CONVERGENCE_LENGTHS, &grid).expect("k = 3 convergence runs");
    let col = |r: &monoword::limits::ConvergenceReport| {
        r.rows
            .iter()
            .map(|row| format!("{:.4}", row.sup_error))
            .collect::<Vec<_>>()
            .join(",")
    };
    let last = two.rows.last().expect("rows").sup_error;
    let mut failed = Vec::new();
    if !two.decreasing() {
        failed.push("k=2 not decreasing".to_string());
    }
    if last >= CONVERGENCE_FINAL_K2 {
        failed.push(format!("k=2 final {last:.4} >= {CONVERGENCE_FINAL_K2}"));
    }
    if !three.decreasing() {
        failed.push("k=3 not decreasing".to_string());
    }
    let detail = format!("k=2 [{}] k=3 [{}]", col(&two), col(&three));
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            detail
        } else {
            format!("{}; {detail}", failed.join("; "))
        },
    }
}

fn criterion_6() -> Outcome {
    let mut failed = Vec::new();
    let mut detail = Vec::new();

    let mut norm = 0.0f64;
    for k in 2..=4 {
        norm = norm.max((f0_normalization(k).expect("normalization") - 1.0).abs());
        let tail = f0(7.0, k, F0Method::Quadrature).expect("f0").value;
        norm = norm.max((tail - 1.0).abs());
    }
    if norm > NORMALIZATION_TOL {
        failed.push(format!("F0(inf) off by {norm:.2e}"));
    }
    detail.push(format!("norm={norm:.1e}"));

    let mut conv = 0.0f64;
    for k in [2, 3] {
        for i in 0..=12 {
            let s = -3.0 + 0.5 * i as f64;
            let a = gue_f(s, k, GueRoute::Convolution).expect("convolution");
            let b = gue_f(s, k, GueRoute::Direct).expect("direct");
            conv = conv.max((a - b).abs());
        }
    }
    if conv > CONVOLUTION_TOL {
        failed.push(format!("GUE convolution off by {conv:.2e}"));
    }
    detail.push(format!("gue={conv:.1e}"));

    let grid: Vec<f64> = (0..=280).map(|i| -8.0 + 0.05 * i as f64).collect();
    let table = f2(&grid, 1e-10).expect("F2");
    if !table.monotone() {
        failed.push("F2 not monotone".into());
    }
    if table.max_airy_deviation > AIRY_TOL {
        failed.push(format!("q/Ai off by {:.2e}", table.max_airy_deviation));
    }
    detail.push(format!("q/Ai={:.1e}", table.max_airy_deviation));

    let s_grid: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
    let rows = fklim_check(&[4], &s_grid, MonteCarloOptions::default()).expect("fklim");
    let err = rows[0].max_error;
    if err >= FKLIM_BOUND {
        failed.push(format!("Fklim error {err:.3} >= {FKLIM_BOUND}"));
    }
    detail.push(format!("fklim(k=4)={err:.3}"));

    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            detail.join(" ")
        } else {
            failed.join("; ")
        },
    }
}

fn crosscheck_bytes(dir: &std::path::Path, name: &str) -> Vec<u8> {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_monoword"))
        .args(["crosscheck", "--seed", &REPRO_SEED.to_string(), "-o"])
        .arg(&path)
        .status()
        .expect("binary runs");
    assert!(status.code().is_some(), "crosscheck was killed");
    std::fs::read(&path).expect("report written")
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let a = crosscheck_bytes(dir.path(), "a.json");
    let b = crosscheck_bytes(dir.path(), "b.json");
    Outcome {
        pass: !a.is_empty() && a == b,
        detail: format!("seed {REPRO_SEED}, {} and {} bytes", a.len(), b.len()),
    }
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 7] = [
        (
            1,
            "exact distribution identity",
            Duration::from_secs(120),
            criterion_1,
        ),
        (
            2,
            "recursion identity suite",
            Duration::from_secs(60),
            criterion_2,
        ),
        (
            3,
            "Painleve V sigma form",
            Duration::from_secs(60),
            criterion_3,
        ),
        (
            4,
            "Laguerre Fredholm determinant",
            Duration::from_secs(60),
            criterion_4,
        ),
        (
            5,
            "large-N convergence",
            Duration::from_secs(300),
            criterion_5,
        ),
        (6, "limit laws", Duration::from_secs(300), criterion_6),
        (
            7,
            "crosscheck reproducibility",
            Duration::from_secs(120),
            criterion_7,
        ),
    ];
    let mut unexpected = 0;
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let mut out = run();
        let elapsed = start.elapsed();
        if elapsed > budget {
            out.pass = false;
            out.detail = format!("over budget {:?}; {}", budget, out.detail);
        }
        let known = KNOWN_FAILURES.contains(&id);
        let verdict = match (out.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !out.pass && !known {
            unexpected += 1;
        }
        println!(
            "criterion {id} {title}: {verdict} [{:.1}s] {}",
            elapsed.as_secs_f64(),
            out.detail
        );
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
