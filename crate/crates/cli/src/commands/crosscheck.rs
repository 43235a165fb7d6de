//! Cross-route checks: exact equalities between the combinatorial routes,
//! the determinant identity sweep, the Painlevé route and the Fredholm route.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use monoword::combinatorics::{
    exact_distribution_enumeration, tableaux_distribution, DEFAULT_ENUMERATION_BUDGET,
};
use monoword::exact::to_f64;
use monoword::laguerre::{
    incomplete_gamma_form, smallest_eigenvalue_prob_fredholm, smallest_eigenvalue_prob_quadrature,
    DEFAULT_NODES,
};
use monoword::painleve::{boundary_coefficient, determinant_from_sigma, integrate_sigma};
use monoword::series::series_distribution;
use monoword::toeplitz::{default_step, differentiation_residuals, identity_sweep, toeplitz_det};
use monoword::{Parameters, SigmaOptions, ToeplitzContext, Which};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::grid::tolerance_override;
use crate::output::raw_float;
use crate::{CliResult, Failure};

pub const DEFAULT_POINTS: usize = 100;

#[derive(Debug, Clone, Args)]
pub struct CrosscheckArgs {
    /// Seed for the random identity sweep.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points in the identity sweep.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    /// Override a check tolerance, e.g. `--tol theorem2.determinant=1e-8`.
    #[arg(long = "tol", value_parser = tolerance_override)]
    pub tolerances: Vec<(String, f64)>,
    /// Test hook: scale every Toeplitz determinant by (1 + eps) before it is
    /// compared with the other routes.
    #[arg(long, default_value_t = 0.0)]
    pub perturb_determinant: f64,
    /// Report path; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl Default for CrosscheckArgs {
    fn default() -> Self {
        Self {
            seed: 0,
            points: DEFAULT_POINTS,
            tolerances: Vec::new(),
            perturb_determinant: 0.0,
            output: None,
        }
    }
}

/// One named comparison: the largest residual seen over `cases` evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub worst: String,
}

impl Check {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_residual: 0.0,
            tolerance,
            cases: 0,
            worst: String::new(),
        }
    }

    fn record(&mut self, residual: f64, at: impl FnOnce() -> String) {
        self.cases += 1;
        if residual > self.max_residual || residual.is_nan() {
            self.max_residual = residual;
            self.worst = at();
        }
    }

    /// Exact checks carry tolerance 0 and pass only at residual 0.
    pub fn pass(&self) -> bool {
        self.max_residual.is_finite() && self.max_residual <= self.tolerance
    }
}

fn scaled(t: f64, which: Which, n: usize, k: u32, eps: f64) -> CliResult<f64> {
    let ctx = ToeplitzContext::new(n, k, t, which)?;
    Ok((-(k as f64) * t).exp() * toeplitz_det(&ctx)?.value * (1.0 + eps))
}

/// Series and tableaux routes against enumeration, as rationals, for
/// k ∈ 1..=3, n ∈ 1..=4, N ∈ 0..=8 and both statistics.
pub fn theorem1_checks() -> CliResult<Vec<Check>> {
    let mut jobs = Vec::new();
    for which in [Which::Increasing, Which::Decreasing] {
        for k in 1..=3u32 {
            for length in 0..=8u32 {
                jobs.push((which, k, length));
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|&(which, k, length)| {
            let e = exact_distribution_enumeration(k, length, which, DEFAULT_ENUMERATION_BUDGET)?;
            let s = series_distribution(k, length, which)?;
            let t = tableaux_distribution(k, length, which, length.max(1))?;
            Ok((1..=4u32)
                .map(|n| (n, e.get(n) != s.get(n), e.get(n) != t.get(n)))
                .collect::<Vec<_>>())
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut series = Check::new("theorem1.series_vs_enumeration", 0.0);
    let mut tableaux = Check::new("theorem1.tableaux_vs_enumeration", 0.0);
    for (&(which, k, length), rows) in jobs.iter().zip(results) {
        for (n, bad_s, bad_t) in rows {
            let at = || format!("which={which} n={n} k={k} N={length}");
            series.record(bad_s as u8 as f64, at);
            tableaux.record(bad_t as u8 as f64, at);
        }
    }
    Ok(vec![series, tableaux])
}

/// Coarse steps where truncation error dominates, for the second-order check.
pub const REFINEMENT_POINTS: [(usize, u32, f64); 3] = [(3, 2, 1.0), (5, 3, 2.0), (6, 4, 3.0)];

/// The random identity sweep (n ≤ 8, k ≤ 5, t ∈ [0.05, 5]) plus the h-refinement
/// ratio of the finite-difference identities.
pub fn identity_checks(points: usize, seed: u64) -> CliResult<Vec<Check>> {
    let sweep = identity_sweep(points, 8, 5, (0.05, 5.0), seed)?;
    let mut checks = Vec::new();
    for (name, &v) in &sweep.max_residual {
        let tol = if name.starts_with('d') { 1e-4 } else { 1e-6 };
        let (n, k, t) = sweep.worst_point[name];
        checks.push(Check {
            name: format!("identities.{name}"),
            max_residual: v,
            tolerance: tol,
            cases: sweep.points,
            worst: format!("n={n} k={k} t={t}"),
        });
    }
    let mut refinement = Check::new("identities.h_refinement", 0.5);
    for (n, k, t) in REFINEMENT_POINTS {
        let ctx = ToeplitzContext::new(n, k, t, Which::Increasing)?;
        let coarse = differentiation_residuals(&ctx, 0.04 * t.max(1.0))?;
        let half = differentiation_residuals(&ctx, 0.02 * t.max(1.0))?;
        let fine = differentiation_residuals(&ctx, default_step(t))?;
        for (name, c) in &coarse {
            // Below roundoff there is nothing to refine.
            if fine[name] < 1e-12 && *c < 1e-9 {
                continue;
            }
            let ratio = c / half[name];
            refinement.record((ratio - 4.0).abs(), || {
                format!("{name} n={n} k={k} t={t} ratio={ratio}")
            });
        }
    }
    checks.push(refinement);
    Ok(checks)
}

pub const THEOREM2_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

struct Theorem2Point {
    n: usize,
    k: u32,
    errors: Vec<(f64, f64)>,
    residual: f64,
    first_integral: f64,
    coefficient: f64,
}

/// Painlevé route against Toeplitz for (n, k) ∈ {1..4}², plus trajectory
/// residuals, the t^{n+1} coefficient and the n = k = 1 closed form.
pub fn theorem2_checks(perturb: f64) -> CliResult<Vec<Check>> {
    let pairs: Vec<(usize, u32)> = (1..=4).flat_map(|n| (1..=4).map(move |k| (n, k))).collect();
    let opts = SigmaOptions {
        samples: THEOREM2_TIMES.to_vec(),
        ..SigmaOptions::default()
    };
    let points = pairs
        .par_iter()
        .map(|&(n, k)| {
            let params = Parameters {
                n,
                k,
                which: Which::Increasing,
            };
            let traj = integrate_sigma(params, 4.0, &opts)?;
            let errors = THEOREM2_TIMES
                .iter()
                .map(|&t| {
                    let pv = determinant_from_sigma(&traj, t)?;
                    Ok((t, (pv - scaled(t, Which::Increasing, n, k, perturb)?).abs()))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let a = to_f64(&boundary_coefficient(n, k));
            let est = traj.leading_coefficient_estimate().ok_or_else(|| {
                Failure::Validation("trajectory too short for the coefficient".into())
            })?;
            Ok(Theorem2Point {
                n,
                k,
                errors,
                residual: traj.max_residual,
                first_integral: traj.max_first_integral,
                coefficient: (est / a - 1.0).abs(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut det = Check::new("theorem2.determinant", 1e-6);
    let mut s5 = Check::new("theorem2.sigma_form", 1e-5);
    let mut first = Check::new("theorem2.first_integral", 1e-5);
    let mut coef = Check::new("theorem2.boundary_coefficient", 1e-3);
    for p in &points {
        let (n, k) = (p.n, p.k);
        for &(t, e) in &p.errors {
            det.record(e, || format!("n={n} k={k} t={t}"));
        }
        s5.record(p.residual, || format!("n={n} k={k}"));
        first.record(p.first_integral, || format!("n={n} k={k}"));
        coef.record(p.coefficient, || format!("n={n} k={k}"));
    }
    let closed_times = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0];
    let opts = SigmaOptions {
        samples: closed_times.to_vec(),
        ..SigmaOptions::default()
    };
    let traj = integrate_sigma(
        Parameters {
            n: 1,
            k: 1,
            which: Which::Increasing,
        },
        5.0,
        &opts,
    )?;
    let mut closed = Check::new("theorem2.closed_form", 1e-8);
    for t in closed_times {
        let sigma = traj.sigma_at(t).expect("sampled time");
        closed.record((sigma - t * t / (1.0 + t)).abs(), || format!("t={t}"));
    }
    Ok(vec![det, s5, first, coef, closed])
}

pub const THEOREM3_TIMES: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

/// Fredholm route against Toeplitz for k, n ∈ 1..=5, node doubling, and the
/// k = 1 incomplete-gamma form.
pub fn theorem3_checks(perturb: f64) -> CliResult<Vec<Check>> {
    let mut jobs = Vec::new();
    for k in 1..=5u32 {
        for n in 1..=5u32 {
            for t in THEOREM3_TIMES {
                jobs.push((k, n, t));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(k, n, t)| {
            let fred = smallest_eigenvalue_prob_fredholm(k, n, t, DEFAULT_NODES)?;
            let doubled = smallest_eigenvalue_prob_fredholm(k, n, t, 2 * DEFAULT_NODES)?;
            let toep = scaled(t, Which::Increasing, n as usize, k, perturb)?;
            Ok(((fred - toep).abs(), (fred - doubled).abs()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut fredholm = Check::new("theorem3.fredholm", 1e-6);
    let mut doubling = Check::new("theorem3.node_doubling", 1e-9);
    for (&(k, n, t), (e, d)) in jobs.iter().zip(rows) {
        fredholm.record(e, || format!("n={n} k={k} t={t}"));
        doubling.record(d, || format!("n={n} k={k} t={t}"));
    }
    let mut gamma = Check::new("theorem3.incomplete_gamma", 1e-10);
    for n in 0..=5u32 {
        for t in THEOREM3_TIMES {
            let closed = incomplete_gamma_form(n, t);
            let routes = [
                (
                    "fredholm",
                    smallest_eigenvalue_prob_fredholm(1, n, t, DEFAULT_NODES)?,
                ),
                ("quadrature", smallest_eigenvalue_prob_quadrature(1, n, t)?),
                (
                    "toeplitz",
                    scaled(t, Which::Increasing, n as usize, 1, perturb)?,
                ),
            ];
            for (route, v) in routes {
                gamma.record((v - closed).abs(), || format!("{route} n={n} t={t}"));
            }
        }
    }
    Ok(vec![fredholm, doubling, gamma])
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    max_residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    cases: usize,
    worst: &'a str,
    pass: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'static str,
    seed: u64,
    sweep_points: usize,
    perturb_determinant: Box<RawValue>,
    checks: Vec<JsonCheck<'a>>,
    failed: Vec<&'a str>,
    pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub points: usize,
    pub perturb_determinant: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failed(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn to_json(&self) -> String {
        let report = JsonReport {
            command: "crosscheck",
            seed: self.seed,
            sweep_points: self.points,
            perturb_determinant: raw_float(self.perturb_determinant),
            checks: self
                .checks
                .iter()
                .map(|c| JsonCheck {
                    name: &c.name,
                    max_residual: raw_float(c.max_residual),
                    tolerance: raw_float(c.tolerance),
                    cases: c.cases,
                    worst: &c.worst,
                    pass: c.pass(),
                })
                .collect(),
            failed: self.failed(),
            pass: self.pass(),
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn build_report(args: &CrosscheckArgs) -> CliResult<Report> {
    if args.points == 0 {
        return Err(Failure::Usage("--points must be positive".into()));
    }
    if !args.perturb_determinant.is_finite() {
        return Err(Failure::Usage(
            "--perturb-determinant must be finite".into(),
        ));
    }
    let mut checks = theorem1_checks()?;
    checks.extend(identity_checks(args.points, args.seed)?);
    checks.extend(theorem2_checks(args.perturb_determinant)?);
    checks.extend(theorem3_checks(args.perturb_determinant)?);
    let overrides: BTreeMap<&str, f64> = args
        .tolerances
        .iter()
        .map(|(n, v)| (n.as_str(), *v))
        .collect();
    for name in overrides.keys() {
        if !checks.iter().any(|c| c.name == *name) {
            return Err(Failure::Usage(format!("unknown check {name:?} in --tol")));
        }
    }
    for c in &mut checks {
        if let Some(&tol) = overrides.get(c.name.as_str()) {
            c.tolerance = tol;
        }
    }
    Ok(Report {
        seed: args.seed,
        points: args.points,
        perturb_determinant: args.perturb_determinant,
        checks,
    })
}

pub fn run(args: &CrosscheckArgs) -> CliResult<()> {
    let report = build_report(args)?;
    let text = report.to_json();
    match &args.output {
        Some(path) => std::fs::write(path, &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "failed checks: {}",
            report.failed().join(", ")
        )))
    }
}
