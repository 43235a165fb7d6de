use std::io::Write;

use clap::{Args, ValueEnum};
use monoword::laguerre::{
    incomplete_gamma_form, smallest_eigenvalue_prob_fredholm, smallest_eigenvalue_prob_quadrature,
    DEFAULT_NODES,
};
use monoword::toeplitz::toeplitz_det;
use monoword::{ToeplitzContext, Which};
use rayon::prelude::*;

use crate::grid::{int_grid, real_grid, IntGrid, RealGrid};
use crate::output::{sort_records, write_table, Param, Record, Value};
use crate::{open_output, CliResult, Failure, OutputArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Nyström discretization of det(I − K_L).
    Fredholm,
    /// Tensor Gauss–Laguerre over the k eigenvalues (k ≤ 3).
    Quadrature,
    /// e^{−kt} D_n(t) from the Toeplitz matrix.
    Toeplitz,
    /// Γ(n+1, t)/n!, k = 1 only.
    Gamma,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct LaguerreArgs {
    /// Matrix sizes.
    #[arg(long, value_parser = int_grid)]
    pub k: IntGrid,
    /// Weight exponents.
    #[arg(long, value_parser = int_grid)]
    pub n: IntGrid,
    #[arg(long, value_parser = real_grid)]
    pub t: RealGrid,
    /// Gauss–Legendre nodes for the Nyström route.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t = Method::Fredholm)]
    pub method: Method,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn methods(m: Method, k: u32) -> Vec<Method> {
    match m {
        Method::All => {
            let mut v = vec![Method::Fredholm, Method::Toeplitz];
            if k <= monoword::laguerre::QUADRATURE_MAX_K {
                v.push(Method::Quadrature);
            }
            if k == 1 {
                v.push(Method::Gamma);
            }
            v
        }
        m => vec![m],
    }
}

fn point(method: Method, k: u32, n: u32, t: f64, nodes: usize) -> CliResult<Record> {
    let (route, value) = match method {
        Method::Fredholm => (
            "fredholm",
            smallest_eigenvalue_prob_fredholm(k, n, t, nodes)?,
        ),
        Method::Quadrature => (
            "laguerre-quad",
            smallest_eigenvalue_prob_quadrature(k, n, t)?,
        ),
        Method::Toeplitz => {
            let ctx = ToeplitzContext::new(n as usize, k, t, Which::Increasing)?;
            (
                "toeplitz",
                (-(k as f64) * t).exp() * toeplitz_det(&ctx)?.value,
            )
        }
        Method::Gamma => {
            if k != 1 {
                return Err(Failure::Usage(
                    "the incomplete-gamma form needs k = 1".into(),
                ));
            }
            ("gamma", incomplete_gamma_form(n, t))
        }
        Method::All => unreachable!("expanded by methods()"),
    };
    Ok(Record {
        route,
        which: Some(Which::Increasing),
        n: Some(n),
        k: Some(k),
        x: Param::Real(t),
        value: Value::Float(value),
        err_bar: None,
    })
}

pub fn table(args: &LaguerreArgs) -> CliResult<Vec<Record>> {
    if args.k.0.contains(&0) {
        return Err(Failure::Usage("k must be positive".into()));
    }
    if args.t.0.first().is_some_and(|&t| t < 0.0) {
        return Err(Failure::Usage("t must be nonnegative".into()));
    }
    let mut jobs = Vec::new();
    for &k in &args.k.0 {
        for method in methods(args.method, k) {
            for &n in &args.n.0 {
                for &t in &args.t.0 {
                    jobs.push((method, k, n, t));
                }
            }
        }
    }
    let mut records = jobs
        .into_par_iter()
        .map(|(method, k, n, t)| point(method, k, n, t, args.nodes))
        .collect::<CliResult<Vec<_>>>()?;
    sort_records(&mut records);
    Ok(records)
}

pub fn run(args: &LaguerreArgs) -> CliResult<()> {
    let records = table(args)?;
    let mut out = open_output(&args.out)?;
    write_table("laguerre", &records, args.out.format, &mut out)?;
    out.flush()?;
    Ok(())
}
