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

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use pdakit::bigraph::graph_of_array;
use pdakit::comparison::{closed_forms, compare_family, parse_b_range, truncated_decimal, Family};
use pdakit::constructions::ConstructionError;
use pdakit::{
    binomial, graph_to_pda, maddah_niesen_pda, parse_graph, parse_pda, pda_to_graph, scheme_params,
    serialize_graph, serialize_pda, simulate as run_simulation, theorem2_agrees,
    theorem2_agrees_graph, theorem3_pda, unrank_subset, verify_pda, verify_strong_coloring,
    CachingError, ColoredBipartiteGraph, Count, DemandVector, GraphError, Pda, Ratio,
    SimulationConfig, SubsetGraphParams,
};

use crate::{CliError, Format, Scheme};

type CliResult = Result<ExitCode, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

enum Document {
    Pda(Pda),
    Graph(ColoredBipartiteGraph),
}

fn load(path: &Path) -> Result<Document, CliError> {
    let text = read(path)?;
    let located = |e: &dyn std::fmt::Display| CliError::Usage(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with("BIGRAPH") {
        parse_graph(&text)
            .map(Document::Graph)
            .map_err(|e| located(&e))
    } else {
        parse_pda(&text).map(Document::Pda).map_err(|e| located(&e))
    }
}

fn load_pda(path: &Path) -> Result<Pda, CliError> {
    match load(path)? {
        Document::Pda(p) => Ok(p),
        Document::Graph(_) => Err(CliError::Usage(format!(
            "{}: expected a PDA file",
            path.display()
        ))),
    }
}

pub struct ConstructArgs {
    pub m: Option<u32>,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub lambda: Option<u32>,
    pub users: Option<u32>,
    pub t: Option<u32>,
}

fn required(value: Option<u32>, flag: &str, scheme: &str) -> Result<u32, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--scheme {scheme} requires --{flag}")))
}

fn construction_error(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::TooLarge { .. } => CliError::Usage(format!(
            "{e}; `pdakit table` reports parameters without building the array"
        )),
        other => CliError::usage(other),
    }
}

pub fn construct(scheme: Scheme, args: ConstructArgs, out: Option<&Path>) -> CliResult {
    let pda = match scheme {
        Scheme::Theorem3 => {
            let params = SubsetGraphParams::new(
                required(args.m, "m", "theorem3")?,
                required(args.a, "a", "theorem3")?,
                required(args.b, "b", "theorem3")?,
                required(args.lambda, "lambda", "theorem3")?,
            )
            .map_err(construction_error)?;
            theorem3_pda(params).map_err(construction_error)?
        }
        Scheme::Mn => maddah_niesen_pda(
            required(args.users, "K", "mn")?,
            required(args.t, "t", "mn")?,
        )
        .map_err(construction_error)?,
    };
    let params = scheme_params(&pda).map_err(|e| CliError::Invalid(e.to_string()))?;
    emit(&serialize_pda(&pda), out)?;
    if out.is_some() {
        println!("{params}");
    } else {
        eprintln!("{params}");
    }
    Ok(ExitCode::SUCCESS)
}

fn status(valid: bool) -> ExitCode {
    if valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_coloring(graph: &ColoredBipartiteGraph, heading: &str) -> bool {
    let report = verify_strong_coloring(graph);
    let contiguous = graph.check_contiguous();
    let valid = report.strong && report.left_degree.is_some() && contiguous.is_ok();
    let degree = report
        .left_degree
        .map_or_else(|| "-".to_string(), |d| d.to_string());
    println!(
        "{heading}{} proper={} strong={} left_degree={degree} colors={}",
        if valid { "valid" } else { "invalid" },
        report.proper,
        report.strong,
        graph.num_colors()
    );
    if let Err(e) = contiguous {
        println!("  {e}");
    }
    for v in &report.violations {
        println!("  {v}");
    }
    valid
}

pub fn verify(path: &Path, as_graph: bool) -> CliResult {
    match load(path)? {
        Document::Pda(pda) => {
            let report = verify_pda(&pda);
            if report.valid {
                let params = scheme_params(&pda).expect("array is valid");
                let g = report.g.map_or_else(|| "-".to_string(), |g| g.to_string());
                println!("valid g={g}");
                println!(
                    "K={} F={} Z={} S={} M/N={} R={}",
                    report.k, report.f, report.z, report.s, params.memory_ratio, params.rate
                );
            } else {
                println!("invalid");
                for v in &report.violations {
                    println!("  {v}");
                }
            }
            if as_graph {
                print_coloring(&graph_of_array(&pda), "graph: ");
                if !theorem2_agrees(&pda) {
                    return Err(CliError::Invalid("array and graph checks disagree".into()));
                }
                println!("array and graph checks agree");
            }
            Ok(status(report.valid))
        }
        Document::Graph(graph) => {
            let valid = print_coloring(&graph, "");
            if as_graph && !theorem2_agrees_graph(&graph) {
                return Err(CliError::Invalid("array and graph checks disagree".into()));
            }
            Ok(status(valid))
        }
    }
}

pub fn convert(path: &Path, to: Format, out: Option<&Path>) -> CliResult {
    let text = match (load(path)?, to) {
        (Document::Pda(pda), Format::Graph) => {
            let graph = pda_to_graph(&pda).map_err(|e| match e {
                GraphError::InvalidPda(inner) => CliError::Invalid(inner.to_string()),
                other => CliError::usage(other),
            })?;
            serialize_graph(&graph)
        }
        (Document::Graph(graph), Format::Pda) => {
            serialize_pda(&graph_to_pda(&graph).map_err(CliError::usage)?)
        }
        (Document::Pda(_), Format::Pda) => {
            return Err(CliError::Usage("input is already a PDA".into()))
        }
        (Document::Graph(_), Format::Graph) => {
            return Err(CliError::Usage("input is already a graph".into()))
        }
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

pub struct SimulateArgs {
    pub files: Option<usize>,
    pub packet_bytes: usize,
    pub demands: Option<String>,
    pub seed: u64,
    pub audit: bool,
    pub subset_labels: Option<String>,
}

/// Row labels for the audit: explicit `m,b`, or the `t`-subsets of the
/// users when the array is exactly the Maddah-Ali–Niesen PDA.
fn row_labels(pda: &Pda, explicit: Option<&str>) -> Result<Option<(u32, u32)>, CliError> {
    if let Some(spec) = explicit {
        let bad = || CliError::Usage(format!("--subset-labels expects `m,b`, got `{spec}`"));
        let (m, b) = spec.split_once(',').ok_or_else(bad)?;
        let m: u32 = m.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if m > 64 || b > m || binomial(m as u64, b as u64) != Count::from(pda.rows() as u64) {
            return Err(CliError::Usage(format!(
                "C({m},{b}) does not equal F = {}",
                pda.rows()
            )));
        }
        return Ok(Some((m, b)));
    }
    let k = pda.cols() as u32;
    if k > 64 {
        return Ok(None);
    }
    for t in 0..=k {
        if binomial(k as u64, t as u64) == Count::from(pda.rows() as u64)
            && maddah_niesen_pda(k, t).is_ok_and(|mn| mn == *pda)
        {
            return Ok(Some((k, t)));
        }
    }
    Ok(None)
}

pub fn simulate(path: &Path, args: SimulateArgs) -> CliResult {
    let pda = load_pda(path)?;
    let report = verify_pda(&pda);
    if let Some(first) = report.violations.first() {
        return Err(CliError::Invalid(format!(
            "{}: not a valid PDA: {first}",
            path.display()
        )));
    }
    let demands = args
        .demands
        .as_deref()
        .map(DemandVector::parse)
        .transpose()
        .map_err(CliError::usage)?;
    let config = SimulationConfig {
        num_files: args.files.unwrap_or(pda.cols()),
        packet_len: args.packet_bytes,
        demands,
        seed: args.seed,
    };
    if config.packet_len == 0 {
        return Err(CliError::Usage("--packet-bytes must be positive".into()));
    }
    let result = run_simulation(&pda, &config).map_err(|e| match e {
        CachingError::MissingCacheEntry { .. } | CachingError::MissingSignal(_) => {
            CliError::Invalid(e.to_string())
        }
        other => CliError::usage(other),
    })?;

    let mut text = String::new();
    writeln!(text, "demands={}", result.demands).unwrap();
    if args.audit {
        let labels = row_labels(&pda, args.subset_labels.as_deref())?;
        let label = |j: usize| match labels {
            Some((m, b)) => unrank_subset(j as u64 + 1, b, m)
                .expect("label rank in range")
                .to_string(),
            None => (j + 1).to_string(),
        };
        for signal in &result.signals {
            writeln!(
                text,
                "slot {}: {}",
                signal.color,
                signal.audit(&result.demands, label)
            )
            .unwrap();
        }
    }
    text.push_str(&result.to_string());
    print!("{text}");
    Ok(status(result.all_decoded()))
}

fn rate_cells(rate: Option<Ratio<u128>>) -> (String, String) {
    match rate {
        Some(r) => (r.to_string(), truncated_decimal(&r, 4)),
        None => (">2^127".into(), "-".into()),
    }
}

pub fn table(family: &str, b_range: &str, general: bool) -> CliResult {
    let family: Family = family.parse().map_err(CliError::usage)?;
    let bs = parse_b_range(b_range).map_err(CliError::usage)?;
    let rows = compare_family(&family, bs.clone()).map_err(CliError::usage)?;

    let mut text = String::new();
    writeln!(text, "family {family}").unwrap();
    writeln!(
        text,
        "{:>3} {:>6} {:>7} {:>6}  {:<11} {:>10} {:>10}  F",
        "b", "K", "M/N", "t", "scheme", "R", "R~"
    )
    .unwrap();
    for row in &rows {
        for (name, rate, f) in [
            ("Ali-Niesen", row.ali_niesen_rate(), row.ali_niesen.f),
            ("New", row.new_rate(), row.new.scheme.f),
        ] {
            let (exact, approx) = rate_cells(rate);
            writeln!(
                text,
                "{:>3} {:>6} {:>7} {:>6}  {:<11} {:>10} {:>10}  {}",
                row.b,
                row.k.to_string(),
                row.memory_ratio.to_string(),
                row.t,
                name,
                exact,
                approx,
                f
            )
            .unwrap();
        }
    }

    if general {
        writeln!(text).unwrap();
        writeln!(
            text,
            "closed forms: Ali-Niesen R=b^2/(b^2-b+1) F=C(b(2b-1),b(b-1)); New R=b F=C(2b,b)"
        )
        .unwrap();
        for b in bs {
            let closed = closed_forms(&family, b).map_err(CliError::usage)?;
            for (name, rate, f) in [
                ("Ali-Niesen", closed.ali_niesen_rate, closed.ali_niesen_f),
                ("New", closed.new_rate, closed.new_f),
            ] {
                let (exact, approx) = rate_cells(Some(rate));
                writeln!(
                    text,
                    "{:>3}  {:<11} {:>10} {:>10}  {}",
                    b, name, exact, approx, f
                )
                .unwrap();
            }
        }
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}
