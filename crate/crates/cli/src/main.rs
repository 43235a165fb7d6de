use std::process::ExitCode;

use clap::Parser;
use monoword_cli::{run, threads_from_env, Cli, THREADS_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let threads = std::env::var(THREADS_ENV).ok();
    let result = threads_from_env(threads.as_deref()).and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .expect("global pool is configured once");
        }
        run(cli)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("monoword: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
