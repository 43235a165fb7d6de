use std::io::Write;

use clap::{Args, ValueEnum};
use monoword::combinatorics::{
    exact_distribution_enumeration, tableaux_distribution, DEFAULT_ENUMERATION_BUDGET,
    DEFAULT_PARTITION_BUDGET,
};
use monoword::series::extract_distribution;
use monoword::{Route, Which};
use rayon::prelude::*;

use crate::grid::{int_grid, IntGrid};
use crate::output::{sort_records, write_table, Param, Record, Value};
use crate::{open_output, CliResult, Failure, OutputArgs, WhichArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Enum,
    Tableaux,
    Series,
    /// All three; disagreement is a validation failure.
    All,
}

impl RouteArg {
    fn routes(self) -> Vec<Route> {
        match self {
            RouteArg::Enum => vec![Route::Enumeration],
            RouteArg::Tableaux => vec![Route::Tableaux],
            RouteArg::Series => vec![Route::Series],
            RouteArg::All => vec![Route::Enumeration, Route::Tableaux, Route::Series],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[arg(long, value_enum, ignore_case = true, default_value_t = WhichArg::I)]
    pub which: WhichArg,
    /// Alphabet sizes.
    #[arg(long, value_parser = int_grid)]
    pub k: IntGrid,
    /// Word lengths: `8`, `0..8` or `50,100`.
    #[arg(long = "N", value_parser = int_grid)]
    pub length: IntGrid,
    /// Largest n in the table; defaults to N.
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long, value_enum, default_value_t = RouteArg::Tableaux)]
    pub route: RouteArg,
    /// Cap on k^N (enum) or on N (tableaux).
    #[arg(long)]
    pub budget: Option<u128>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn route_table(
    route: Route,
    which: Which,
    k: u32,
    length: u32,
    n_max: u32,
    budget: Option<u128>,
) -> CliResult<Vec<Record>> {
    let values = match route {
        Route::Enumeration => {
            let table = exact_distribution_enumeration(
                k,
                length,
                which,
                budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET),
            )?;
            (0..=n_max).map(|n| table.get(n)).collect()
        }
        Route::Tableaux => {
            let cap = budget
                .unwrap_or(DEFAULT_PARTITION_BUDGET as u128)
                .min(u32::MAX as u128) as u32;
            let table = tableaux_distribution(k, length, which, cap)?;
            (0..=n_max).map(|n| table.get(n)).collect()
        }
        Route::Series => (0..=n_max)
            .into_par_iter()
            .map(|n| extract_distribution(n, k, which, length))
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(n, v)| Record {
            route: route.tag(),
            which: Some(which),
            n: Some(n as u32),
            k: Some(k),
            x: Param::Int(length),
            value: Value::Exact(v),
            err_bar: None,
        })
        .collect())
}

/// Records for every (route, which, k, N), sorted by parameter tuple.
pub fn table(args: &DistArgs) -> CliResult<Vec<Record>> {
    if args.k.0.contains(&0) {
        return Err(Failure::Usage("alphabet size must be positive".into()));
    }
    let mut jobs = Vec::new();
    for route in args.route.routes() {
        for which in args.which.kinds() {
            for &k in &args.k.0 {
                for &length in &args.length.0 {
                    jobs.push((route, which, k, length));
                }
            }
        }
    }
    let parts = jobs
        .into_par_iter()
        .map(|(route, which, k, length)| {
            route_table(
                route,
                which,
                k,
                length,
                args.n_max.unwrap_or(length),
                args.budget,
            )
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut records: Vec<Record> = parts.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Pairs of records from different routes that disagree.
pub fn disagreements(records: &[Record]) -> Vec<String> {
    let mut seen: std::collections::BTreeMap<(Which, u32, u32, u32), &Record> = Default::default();
    let mut bad = Vec::new();
    for r in records {
        let (Some(which), Some(n), Some(k), Param::Int(length)) = (r.which, r.n, r.k, r.x) else {
            continue;
        };
        match seen.get(&(which, n, k, length)) {
            Some(first) if first.value != r.value => bad.push(format!(
                "F_{which}({n};{k},{length}): {} disagrees with {}",
                r.route, first.route
            )),
            Some(_) => {}
            None => {
                seen.insert((which, n, k, length), r);
            }
        }
    }
    bad
}

pub fn run(args: &DistArgs) -> CliResult<()> {
    let records = table(args)?;
    let mut out = open_output(&args.out)?;
    write_table("dist", &records, args.out.format, &mut out)?;
    out.flush()?;
    let bad = disagreements(&records);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(bad.join("; ")))
    }
}
