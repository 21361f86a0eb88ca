// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Build, check, convert and exercise placement delivery arrays.
#[derive(Debug, Parser)]
#[command(name = "pdakit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    /// Subset-graph construction from (m, a, b, lambda).
    Theorem3,
    /// Maddah-Ali–Niesen scheme from (K, t).
    Mn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Graph,
    Pda,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a PDA and print its parameters `K F Z S g M/N R`.
    Construct {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        lambda: Option<u32>,
        /// Number of users (mn scheme).
        #[arg(long = "K")]
        users: Option<u32>,
        /// Cache size parameter t = KM/N (mn scheme).
        #[arg(long)]
        t: Option<u32>,
        /// Write the array here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a PDA or colored bipartite graph file.
    Verify {
        path: PathBuf,
        /// Also check the graph form of a PDA and compare both verdicts.
        #[arg(long)]
        as_graph: bool,
    },
    /// Convert between the PDA and graph text formats.
    Convert {
        path: PathBuf,
        #[arg(long, value_enum)]
        to: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run placement, delivery and decoding on random files.
    Simulate {
        path: PathBuf,
        /// Number of files N (defaults to the number of users).
        #[arg(long)]
        files: Option<usize>,
        /// Bytes per packet.
        #[arg(long, default_value_t = 32)]
        packet_bytes: usize,
        /// Comma-separated requested file per user, e.g. 1,2,3,4.
        #[arg(long)]
        demands: Option<String>,
        /// Seed for file contents and, without --demands, the demands.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the XOR terms of every transmitted signal.
        #[arg(long)]
        audit: bool,
        /// Label packet rows as the b-subsets of {1..m}, given as `m,b`.
        #[arg(long)]
        subset_labels: Option<String>,
    },
    /// Compare a subset-graph family with the Maddah-Ali–Niesen scheme.
    Table {
        #[arg(long, default_value = "a=2,lambda=1,m=2b")]
        family: String,
        #[arg(long, default_value = "3..5")]
        b_range: String,
        /// Also evaluate the closed-form expressions for a=2,lambda=1,m=2b.
        #[arg(long)]
        general: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(e: impl ToString) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct {
            scheme,
            m,
            a,
            b,
            lambda,
            users,
            t,
            out,
        } => commands::construct(
            scheme,
            commands::ConstructArgs {
                m,
                a,
                b,
                lambda,
                users,
                t,
            },
            out.as_deref(),
        ),
        Command::Verify { path, as_graph } => commands::verify(&path, as_graph),
        Command::Convert { path, to, out } => commands::convert(&path, to, out.as_deref()),
        Command::Simulate {
            path,
            files,
            packet_bytes,
            demands,
            seed,
            audit,
            subset_labels,
        } => commands::simulate(
            &path,
            commands::SimulateArgs {
                files,
                packet_bytes,
                demands,
                seed,
                audit,
                subset_labels,
            },
        ),
        Command::Table {
            family,
            b_range,
            general,
        } => commands::table(&family, &b_range, general),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pdakit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
