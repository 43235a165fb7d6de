use std::io::Write;

use clap::{Args, ValueEnum};
use monoword::painleve::{determinant_from_sigma, integrate_sigma, Seed};
use monoword::toeplitz::{sigma_from_toeplitz, toeplitz_det};
use monoword::{Parameters, SigmaOptions, ToeplitzContext, Which};
use rayon::prelude::*;

use crate::grid::{int_grid, positive, real_grid, IntGrid, RealGrid};
use crate::output::{sort_records, write_table, Param, Record, Value};
use crate::{open_output, CliResult, Failure, OutputArgs, WhichArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// e^{−kt} D_n(t)
    Det,
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedArg {
    Series,
    Leading,
}

#[derive(Debug, Clone, Args)]
pub struct PainleveArgs {
    #[arg(long, value_parser = int_grid)]
    pub n: IntGrid,
    #[arg(long, value_parser = int_grid)]
    pub k: IntGrid,
    #[arg(long, value_enum, ignore_case = true, default_value_t = WhichArg::I)]
    pub which: WhichArg,
    /// Times, e.g. `0.5,1,2,4` or `0.1:5:0.1`.
    #[arg(long, value_parser = real_grid)]
    pub t: RealGrid,
    #[arg(long, value_parser = positive, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = SeedArg::Series)]
    pub seed_kind: SeedArg,
    #[arg(long, value_parser = positive)]
    pub t_start: Option<f64>,
    /// Re-seed from the Toeplitz route when the σ-form residual drifts.
    #[arg(long)]
    pub hybrid: bool,
    #[arg(long, value_enum, default_value_t = Quantity::Det)]
    pub quantity: Quantity,
    /// Also emit the Toeplitz route at the same points.
    #[arg(long)]
    pub compare: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn record(route: &'static str, which: Which, n: u32, k: u32, t: f64, value: f64) -> Record {
    Record {
        route,
        which: Some(which),
        n: Some(n),
        k: Some(k),
        x: Param::Real(t),
        value: Value::Float(value),
        err_bar: None,
    }
}

fn trajectory_rows(args: &PainleveArgs, which: Which, n: u32, k: u32) -> CliResult<Vec<Record>> {
    let grid = &args.t.0;
    let opts = SigmaOptions {
        tol: args.tol,
        t_start: args.t_start,
        seed: match args.seed_kind {
            SeedArg::Series => Seed::Series,
            SeedArg::Leading => Seed::Leading,
        },
        samples: grid.clone(),
        hybrid: args.hybrid,
        ..SigmaOptions::default()
    };
    let params = Parameters {
        n: n as usize,
        k,
        which,
    };
    let t_end = grid.last().copied().unwrap_or(0.0);
    let traj = integrate_sigma(params, t_end.max(1.0), &opts)?;
    let sign = match which {
        Which::Increasing => 1.0,
        Which::Decreasing => -1.0,
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid {
        let value = match args.quantity {
            Quantity::Det => determinant_from_sigma(&traj, t)?,
            Quantity::Sigma if t < traj.t_start => {
                sigma_from_toeplitz(n as usize, sign * k as f64, sign * t)?
            }
            Quantity::Sigma => traj.sigma_at(t).expect("t lies on the trajectory"),
        };
        rows.push(record("painleve", which, n, k, t, value));
        if args.compare {
            let value = match args.quantity {
                Quantity::Det => {
                    let ctx = ToeplitzContext::new(n as usize, k, t, which)?;
                    (-(k as f64) * t).exp() * toeplitz_det(&ctx)?.value
                }
                Quantity::Sigma => sigma_from_toeplitz(n as usize, sign * k as f64, sign * t)?,
            };
            rows.push(record("toeplitz", which, n, k, t, value));
        }
    }
    Ok(rows)
}

pub fn table(args: &PainleveArgs) -> CliResult<Vec<Record>> {
    if args.n.0.contains(&0) || args.k.0.contains(&0) {
        return Err(Failure::Usage("n and k must be positive".into()));
    }
    if args.t.0.first().is_some_and(|&t| t < 0.0) {
        return Err(Failure::Usage("t must be nonnegative".into()));
    }
    let mut jobs = Vec::new();
    for which in args.which.kinds() {
        for &n in &args.n.0 {
            for &k in &args.k.0 {
                jobs.push((which, n, k));
            }
        }
    }
    let parts = jobs
        .into_par_iter()
        .map(|(which, n, k)| trajectory_rows(args, which, n, k))
        .collect::<CliResult<Vec<_>>>()?;
    let mut records: Vec<Record> = parts.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

pub fn run(args: &PainleveArgs) -> CliResult<()> {
    let records = table(args)?;
    let mut out = open_output(&args.out)?;
    write_table("painleve", &records, args.out.format, &mut out)?;
    out.flush()?;
    Ok(())
}
