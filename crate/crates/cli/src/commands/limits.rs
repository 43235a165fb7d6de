use std::io::Write;

use clap::{Args, Subcommand, ValueEnum};
use monoword::limits::{
    default_convergence_grid, f0, f2, fklim_check, gue_f, theorem4_convergence, F0Method, GueRoute,
    MonteCarloOptions,
};
use rayon::prelude::*;

use crate::grid::{int_grid, positive, real_grid, IntGrid, RealGrid};
use crate::output::{sort_records, write_table, Param, Record, Value};
use crate::{open_output, CliResult, Failure, OutputArgs};

#[derive(Debug, Clone, Args)]
pub struct LimitsArgs {
    #[command(subcommand)]
    pub table: LimitsTable,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 64)]
    pub strata: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl McArgs {
    fn options(&self) -> MonteCarloOptions {
        MonteCarloOptions {
            samples: self.samples,
            strata: self.strata,
            seed: self.seed,
            max_std_error: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum F0MethodArg {
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GueRouteArg {
    Convolution,
    Direct,
}

#[derive(Debug, Clone, Subcommand)]
pub enum LimitsTable {
    /// Largest-eigenvalue law F⁰(s, k) of the traceless GUE.
    F0 {
        #[arg(long, value_parser = int_grid)]
        k: IntGrid,
        #[arg(long, value_parser = real_grid)]
        s: RealGrid,
        #[arg(long, value_enum, default_value_t = F0MethodArg::Quadrature)]
        method: F0MethodArg,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Largest-eigenvalue law of the k×k GUE.
    Gue {
        #[arg(long, value_parser = int_grid)]
        k: IntGrid,
        #[arg(long, value_parser = real_grid)]
        s: RealGrid,
        #[arg(long, value_enum, default_value_t = GueRouteArg::Convolution)]
        route: GueRouteArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tracy–Widom F₂ on a grid inside [−8, 6].
    F2 {
        #[arg(long, value_parser = real_grid)]
        s: RealGrid,
        #[arg(long, value_parser = positive, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sup error of the centred, scaled exact law against F⁰(s, k), one row per N.
    Thm4 {
        #[arg(long)]
        k: u32,
        #[arg(long = "N", value_parser = int_grid)]
        length: IntGrid,
        /// Defaults to 0:4:0.02.
        #[arg(long, value_parser = real_grid)]
        s: Option<RealGrid>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// F⁰ at the edge scaling against F₂.
    Fklim {
        #[arg(long, value_parser = int_grid)]
        k: IntGrid,
        /// Defaults to -2:2:0.1.
        #[arg(long, value_parser = real_grid)]
        s: Option<RealGrid>,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn float(route: &'static str, k: Option<u32>, s: f64, value: f64, err_bar: Option<f64>) -> Record {
    Record {
        route,
        which: None,
        n: None,
        k,
        x: Param::Real(s),
        value: Value::Float(value),
        err_bar,
    }
}

/// Records for one limits table, plus a validation message when the table
/// fails its own property (decreasing sup error, monotone F₂).
pub fn table(t: &LimitsTable) -> CliResult<(Vec<Record>, Option<String>)> {
    let mut verdict = None;
    let mut records = match t {
        LimitsTable::F0 {
            k, s, method, mc, ..
        } => {
            let (route, method) = match method {
                F0MethodArg::Quadrature => ("f0-quad", F0Method::Quadrature),
                F0MethodArg::Mc => ("f0-mc", F0Method::MonteCarlo(mc.options())),
            };
            let jobs: Vec<(u32, f64)> =
                k.0.iter()
                    .flat_map(|&k| s.0.iter().map(move |&s| (k, s)))
                    .collect();
            jobs.into_par_iter()
                .map(|(k, s)| {
                    let e = f0(s, k, method)?;
                    let err = matches!(method, F0Method::MonteCarlo(_)).then_some(e.std_error);
                    Ok(float(route, Some(k), s, e.value, err))
                })
                .collect::<CliResult<Vec<_>>>()?
        }
        LimitsTable::Gue { k, s, route, .. } => {
            let (tag, route) = match route {
                GueRouteArg::Convolution => ("gue-conv", GueRoute::Convolution),
                GueRouteArg::Direct => ("gue-direct", GueRoute::Direct),
            };
            let jobs: Vec<(u32, f64)> =
                k.0.iter()
                    .flat_map(|&k| s.0.iter().map(move |&s| (k, s)))
                    .collect();
            jobs.into_par_iter()
                .map(|(k, s)| Ok(float(tag, Some(k), s, gue_f(s, k, route)?, None)))
                .collect::<CliResult<Vec<_>>>()?
        }
        LimitsTable::F2 { s, tol, .. } => {
            let table = f2(&s.0, *tol)?;
            if !table.monotone() {
                verdict = Some("F₂ is not monotone on the grid".to_string());
            }
            table
                .s
                .iter()
                .zip(&table.f2)
                .map(|(&s, &v)| float("f2", None, s, v, None))
                .collect()
        }
        LimitsTable::Thm4 { k, length, s, .. } => {
            let grid = s
                .as_ref()
                .map(|g| g.0.clone())
                .unwrap_or_else(default_convergence_grid);
            let report = theorem4_convergence(*k, &length.0, &grid)?;
            if !report.decreasing() {
                verdict = Some(format!(
                    "sup error is not strictly decreasing in N at k = {k}"
                ));
            }
            report
                .rows
                .iter()
                .map(|r| Record {
                    route: "thm4",
                    which: None,
                    n: None,
                    k: Some(*k),
                    x: Param::Int(r.length),
                    value: Value::Float(r.sup_error),
                    err_bar: None,
                })
                .collect()
        }
        LimitsTable::Fklim { k, s, mc, .. } => {
            let grid = s
                .as_ref()
                .map(|g| g.0.clone())
                .unwrap_or_else(|| (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect());
            let rows = fklim_check(&k.0, &grid, mc.options())?;
            let mut out = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                for ((&s, e), &v) in row.s.iter().zip(&row.f0).zip(&row.f2) {
                    let err = (e.std_error > 0.0).then_some(e.std_error);
                    out.push(float("fklim-f0", Some(row.k), s, e.value, err));
                    if i == 0 {
                        out.push(float("f2", None, s, v, None));
                    }
                }
            }
            out
        }
    };
    sort_records(&mut records);
    Ok((records, verdict))
}

fn out_args(t: &LimitsTable) -> &OutputArgs {
    match t {
        LimitsTable::F0 { out, .. }
        | LimitsTable::Gue { out, .. }
        | LimitsTable::F2 { out, .. }
        | LimitsTable::Thm4 { out, .. }
        | LimitsTable::Fklim { out, .. } => out,
    }
}

pub fn run(args: &LimitsArgs) -> CliResult<()> {
    let (records, verdict) = table(&args.table)?;
    let out_args = out_args(&args.table);
    let mut out = open_output(out_args)?;
    write_table("limits", &records, out_args.format, &mut out)?;
    out.flush()?;
    match verdict {
        None => Ok(()),
        Some(m) => Err(Failure::Validation(m)),
    }
}
