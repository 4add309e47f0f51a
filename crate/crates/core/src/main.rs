// Copyright 2026 The ncqsi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ncqsi::cli;

/// Numerical checks for stochastic integrals over finite tensor-chain algebras.
#[derive(Debug, Parser)]
#[command(name = "ncqsi", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the verification suites of a config and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the seed given in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Refine dyadically and write the convergence table as CSV.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Walk through the spectral step counterexample on a built-in fixture.
    Demo,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                cli::EXIT_USAGE as u8
            } else {
                0
            });
        }
    };
    if let Err(e) = cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(cli::EXIT_USAGE as u8);
    }
    let code = match args.command {
        Command::Verify { config, out, seed } => cli::cmd_verify(&config, &out, seed),
        Command::Converge { config, out } => cli::cmd_converge(&config, &out),
        Command::Demo => cli::cmd_demo(&mut std::io::stdout().lock()),
    };
    ExitCode::from(code as u8)
}
