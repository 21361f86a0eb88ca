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

//! Exit criteria for the toolkit. Each criterion prints one PASS/FAIL line
//! with its runtime; the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pdakit::bigraph::{theorem2_agrees, BRUTE_FORCE_EDGE_CAP};
use pdakit::{
    brute_force_sq, color_s1, color_s2, graph_to_pda, maddah_niesen_pda, parse_pda, pda_to_graph,
    scheme_params, simulate, subset_graph, theorem3_params, theorem3_pda, verify_pda,
    verify_strong_coloring, BipartiteGraph, Cell, Count, Edge, Pda, Ratio, SimulationConfig,
    SubsetGraphParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_pdakit");

/// The 6x4 Maddah-Ali–Niesen array for K = 4, t = 2, rows {1,2},...,{3,4}.
const A42: [[&str; 4]; 6] = [
    ["*", "*", "1", "2"],
    ["*", "1", "*", "3"],
    ["*", "2", "3", "*"],
    ["1", "*", "*", "4"],
    ["2", "*", "4", "*"],
    ["3", "4", "*", "*"],
];

/// Delivery of that array for demands (1,2,3,4), one line per time slot.
const DELIVERY_STEPS: [&str; 4] = [
    "W_{1,{2,3}} ⊕ W_{2,{1,3}} ⊕ W_{3,{1,2}}",
    "W_{1,{2,4}} ⊕ W_{2,{1,4}} ⊕ W_{4,{1,2}}",
    "W_{1,{3,4}} ⊕ W_{3,{1,4}} ⊕ W_{4,{1,3}}",
    "W_{2,{3,4}} ⊕ W_{3,{2,4}} ⊕ W_{4,{2,3}}",
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    ))
}

fn a42_file() -> Result<tempfile::TempPath, String> {
    let path = tempfile::NamedTempFile::new()
        .map_err(|e| e.to_string())?
        .into_temp_path();
    let p = path.to_str().unwrap().to_string();
    let (code, _) = run(&[
        "construct",
        "--scheme",
        "mn",
        "--K",
        "4",
        "--t",
        "2",
        "--out",
        &p,
    ])?;
    ensure!(code == 0, "construct exited {code}");
    Ok(path)
}

fn mn_array_exactness() -> Outcome {
    let path = a42_file()?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let pda = parse_pda(&text).map_err(|e| e.to_string())?;
    ensure!(
        pda.rows() == 6 && pda.cols() == 4,
        "shape {}x{}",
        pda.rows(),
        pda.cols()
    );
    for (j, row) in A42.iter().enumerate() {
        for (k, want) in row.iter().enumerate() {
            let got = pda.get(j, k).to_string();
            ensure!(
                got == *want,
                "cell ({},{}) is {got}, expected {want}",
                j + 1,
                k + 1
            );
        }
    }
    Ok("24 cells match".into())
}

fn delivery_audit_exactness() -> Outcome {
    let path = a42_file()?;
    let (code, out) = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--demands",
        "1,2,3,4",
        "--audit",
    ])?;
    ensure!(code == 0, "simulate exited {code}");
    let slots: Vec<&str> = out.lines().filter(|l| l.starts_with("slot ")).collect();
    ensure!(slots.len() == 4, "expected 4 slots, got {}", slots.len());
    for (i, (line, want)) in slots.iter().zip(DELIVERY_STEPS).enumerate() {
        let expected = format!("slot {}: {want}", i + 1);
        ensure!(*line == expected, "slot {} is `{line}`", i + 1);
    }
    ensure!(out.contains("4/4 OK rate=2/3"), "decoding summary missing");
    Ok("4 slots match term-for-term".into())
}

fn comparison_table_exactness() -> Outcome {
    let (code, out) = run(&[
        "table",
        "--family",
        "a=2,lambda=1,m=2b",
        "--b-range",
        "3..5",
    ])?;
    ensure!(code == 0, "table exited {code}");
    // (b, scheme) -> (exact R, 4-digit R, F)
    let expected = [
        ("3", "Ali-Niesen", "9/7", "1.2857", "5005"),
        ("3", "New", "3", "3.0000", "20"),
        ("4", "Ali-Niesen", "16/13", "1.2307", "30421755"),
        ("4", "New", "4", "4.0000", "70"),
        ("5", "Ali-Niesen", "25/21", "1.1904", "3169870830126"),
        ("5", "New", "5", "5.0000", "252"),
    ];
    let rows: Vec<Vec<&str>> = out
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|t| t.len() == 8 && t[0].parse::<u32>().is_ok())
        .collect();
    ensure!(rows.len() == 6, "expected 6 rows, got {}", rows.len());
    for (row, (b, scheme, r, approx, f)) in rows.iter().zip(expected) {
        ensure!(
            row[0] == b && row[4] == scheme && row[5] == r && row[6] == approx && row[7] == f,
            "row {row:?} != b={b} {scheme} R={r} ({approx}) F={f}"
        );
    }
    Ok("6 (R, F) pairs exact".into())
}

fn theorem3_identities() -> Outcome {
    let all = SubsetGraphParams::all_up_to(8);
    for p in &all {
        let pda = theorem3_pda(*p).map_err(|e| format!("{p}: {e}"))?;
        let measured = scheme_params(&pda).map_err(|e| format!("{p}: {e}"))?;
        let analytic = theorem3_params(*p).unwrap().scheme.scheme_params();
        ensure!(
            Some(&measured) == analytic.as_ref(),
            "{p}: {measured:?} vs {analytic:?}"
        );
        ensure!(measured.g.is_some(), "{p}: not g-regular");
    }
    Ok(format!("{} parameter tuples", all.len()))
}

fn theorem2_equivalence() -> Outcome {
    let mut constructed: Vec<Pda> = SubsetGraphParams::all_up_to(8)
        .into_iter()
        .map(|p| theorem3_pda(p).unwrap())
        .collect();
    for k in 1..=8 {
        for t in 0..k {
            constructed.push(maddah_niesen_pda(k, t).unwrap());
        }
    }
    for pda in &constructed {
        ensure!(
            theorem2_agrees(pda),
            "checks disagree on a constructed {}x{} array",
            pda.rows(),
            pda.cols()
        );
        let graph = pda_to_graph(pda).map_err(|e| e.to_string())?;
        ensure!(
            graph_to_pda(&graph).as_ref() == Ok(pda),
            "round trip changed a {}x{} array",
            pda.rows(),
            pda.cols()
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let mut valid = 0;
    for i in 0..1000 {
        let cells = (0..36)
            .map(|_| match rng.random_range(0..4u32) {
                0 => Cell::Star,
                c => Cell::Color(c),
            })
            .collect();
        let pda = Pda::new(6, 6, cells).unwrap().compacted();
        ensure!(
            theorem2_agrees(&pda),
            "random instance {i} disagrees:\n{pda}"
        );
        valid += usize::from(verify_pda(&pda).valid);
    }
    // Arrays with a fixed star count per column, so both verdicts occur.
    let mut balanced_valid = 0;
    for i in 0..1000 {
        let mut cells = vec![Cell::Star; 36];
        let colored = rng.random_range(1..=2);
        for col in 0..6 {
            let mut rows: Vec<usize> = (0..6).collect();
            for _ in 0..colored {
                let r = rows.swap_remove(rng.random_range(0..rows.len()));
                cells[r * 6 + col] = Cell::Color(rng.random_range(1..=3));
            }
        }
        let pda = Pda::new(6, 6, cells).unwrap().compacted();
        ensure!(
            theorem2_agrees(&pda),
            "balanced instance {i} disagrees:\n{pda}"
        );
        balanced_valid += usize::from(verify_pda(&pda).valid);
    }
    Ok(format!(
        "{} round trips, 1000 random arrays agree ({valid} valid), 1000 column-balanced arrays agree ({balanced_valid} valid)",
        constructed.len()
    ))
}

fn coloring_validity() -> Outcome {
    let all = SubsetGraphParams::all_up_to(8);
    for p in &all {
        let sg = subset_graph(*p).map_err(|e| e.to_string())?;
        for (name, colored, colors, class) in [
            ("S1", color_s1(&sg), p.s1_colors(), p.s1_class_size()),
            ("S2", color_s2(&sg), p.s2_colors(), p.s2_class_size()),
        ] {
            ensure!(
                verify_strong_coloring(&colored).strong,
                "{p} {name}: not strong"
            );
            ensure!(
                Count::from(colored.num_colors() as u64) == colors,
                "{p} {name}: color count"
            );
            ensure!(
                colored
                    .color_classes()
                    .iter()
                    .all(|c| Count::from(c.len() as u64) == class),
                "{p} {name}: class sizes"
            );
        }
    }
    Ok(format!("{} parameter tuples, both strategies", all.len()))
}

fn decode_soundness() -> Outcome {
    let all = SubsetGraphParams::all_up_to(7);
    let mut runs = 0;
    for p in &all {
        let pda = theorem3_pda(*p).unwrap();
        let s = verify_pda(&pda).s as usize;
        for seed in 0..20u64 {
            let config = SimulationConfig {
                num_files: pda.cols(),
                packet_len: 32,
                demands: None,
                seed,
            };
            let report = simulate(&pda, &config).map_err(|e| format!("{p}: {e}"))?;
            ensure!(report.all_decoded(), "{p}, seed {seed}: decode failure");
            ensure!(
                report.link_bytes == s * 32,
                "{p}: {} link bytes, expected {}",
                report.link_bytes,
                s * 32
            );
            ensure!(
                report.measured_rate == Ratio::new(s as u128, pda.rows() as u128),
                "{p}: rate"
            );
            runs += 1;
        }
    }
    Ok(format!("{runs} simulations, every user decoded"))
}

fn oracle_cross_check() -> Outcome {
    let sg =
        subset_graph(SubsetGraphParams::new(4, 1, 2, 0).unwrap()).map_err(|e| e.to_string())?;
    ensure!(
        sg.graph.edges().len() <= BRUTE_FORCE_EDGE_CAP,
        "graph too large for the oracle"
    );
    let (sq, witness) = brute_force_sq(&sg.graph).map_err(|e| e.to_string())?;
    ensure!(sq <= 4, "sq(S_4(1,2,0)) = {sq} > 4");
    ensure!(
        verify_strong_coloring(&witness).strong,
        "witness coloring is not strong"
    );

    let cycle = BipartiteGraph::new(
        2,
        2,
        vec![
            Edge::new(0, 0),
            Edge::new(0, 1),
            Edge::new(1, 0),
            Edge::new(1, 1),
        ],
    )
    .unwrap();
    let (cycle_sq, _) = brute_force_sq(&cycle).map_err(|e| e.to_string())?;
    ensure!(cycle_sq == 4, "sq(C4) = {cycle_sq}");
    Ok(format!("sq(S_4(1,2,0)) = {sq}, sq(C4) = 4"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "array for K=4, t=2 is exact",
            Duration::from_secs(1),
            mn_array_exactness,
        ),
        (
            "delivery audit for d=(1,2,3,4) is exact",
            Duration::from_secs(1),
            delivery_audit_exactness,
        ),
        (
            "comparison table for b=3,4,5 is exact",
            Duration::from_secs(1),
            comparison_table_exactness,
        ),
        (
            "constructed parameters match formulas (m<=8)",
            Duration::from_secs(60),
            theorem3_identities,
        ),
        (
            "array/graph equivalence",
            Duration::from_secs(30),
            theorem2_equivalence,
        ),
        (
            "S1/S2 colorings strong with exact counts (m<=8)",
            Duration::from_secs(60),
            coloring_validity,
        ),
        (
            "end-to-end decoding (m<=7, 20 seeds)",
            Duration::from_secs(120),
            decode_soundness,
        ),
        (
            "exhaustive strong chromatic index oracle",
            Duration::from_secs(60),
            oracle_cross_check,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => {
                Err(format!("{detail}, but took longer than {limit:?}"))
            }
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {} [{tag}] {name} ({:.2}s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
        failed += usize::from(outcome.is_err());
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all 8 criteria passed");
        ExitCode::SUCCESS
    }
}
