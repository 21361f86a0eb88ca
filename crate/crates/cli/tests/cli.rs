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

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn pdakit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdakit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn mn42(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("a42.pda");
    let out = pdakit(&[
        "construct",
        "--scheme",
        "mn",
        "--K",
        "4",
        "--t",
        "2",
        "--out",
        s(&path),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "4 6 3 4 3 1/2 2/3");
    path
}

#[test]
fn construct_to_stdout_is_parseable() {
    let out = pdakit(&[
        "construct",
        "--scheme",
        "theorem3",
        "--m",
        "6",
        "--a",
        "2",
        "--b",
        "3",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let pda = pdakit::parse_pda(&stdout(&out)).unwrap();
    assert_eq!((pda.cols(), pda.rows()), (15, 20));
    assert!(stderr(&out).contains("15 20 8 60 3 2/5 3"));
}

#[test]
fn construct_rejects_bad_parameters() {
    let out = pdakit(&[
        "construct",
        "--scheme",
        "theorem3",
        "--m",
        "4",
        "--a",
        "3",
        "--b",
        "3",
        "--lambda",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());
    let out = pdakit(&["construct", "--scheme", "mn", "--K", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_valid_array() {
    let dir = TempDir::new().unwrap();
    let path = mn42(&dir);
    let out = pdakit(&["verify", s(&path), "--as-graph"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("valid g=3"));
    assert!(text.contains("array and graph checks agree"));
}

#[test]
fn verify_reports_corruption() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(mn42(&dir))
        .unwrap()
        .replacen("* * 1 2", "1 * 1 2", 1);
    let path = write(&dir, "bad.pda", &text);
    let out = pdakit(&["verify", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout(&out);
    assert!(report.starts_with("invalid"));
    assert!(
        report.contains("C3a: color 1 at (1,1) and (1,3)"),
        "{report}"
    );
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.pda", "PDA 2 2\n* x\n* *\n");
    let out = pdakit(&["verify", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let path = write(&dir, "short.pda", "PDA 2 2\n* 1\n1 *");
    assert_eq!(pdakit(&["verify", s(&path)]).status.code(), Some(2));
    assert_eq!(
        pdakit(&["verify", s(&dir.path().join("missing"))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn convert_round_trip() {
    let dir = TempDir::new().unwrap();
    let pda = dir.path().join("t3.pda");
    let graph = dir.path().join("t3.graph");
    let back = dir.path().join("back.pda");
    let out = pdakit(&[
        "construct",
        "--scheme",
        "theorem3",
        "--m",
        "6",
        "--a",
        "2",
        "--b",
        "3",
        "--lambda",
        "1",
        "--out",
        s(&pda),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        pdakit(&["convert", s(&pda), "--to", "graph", "--out", s(&graph)])
            .status
            .code(),
        Some(0)
    );
    assert!(fs::read_to_string(&graph)
        .unwrap()
        .starts_with("BIGRAPH 15 20 60\n"));
    let out = pdakit(&["verify", s(&graph)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(
        pdakit(&["convert", s(&graph), "--to", "pda", "--out", s(&back)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(fs::read(&pda).unwrap(), fs::read(&back).unwrap());
}

#[test]
fn convert_all_star_fails() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "z.pda", "PDA 2 2\n* *\n* *\n");
    let out = pdakit(&["convert", s(&path), "--to", "graph"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn simulate_decodes_every_user() {
    let dir = TempDir::new().unwrap();
    let path = mn42(&dir);
    let out = pdakit(&["simulate", s(&path), "--seed", "7", "--packet-bytes", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("4/4 OK rate=2/3"), "{text}");
    assert!(text.contains("bytes=64"), "{text}");
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = mn42(&dir);
    let args = ["simulate", s(&path), "--seed", "11", "--audit"];
    assert_eq!(stdout(&pdakit(&args)), stdout(&pdakit(&args)));
}

#[test]
fn simulate_rejects_bad_demands() {
    let dir = TempDir::new().unwrap();
    let path = mn42(&dir);
    for demands in ["1,2", "1,2,3,9", "1,a,3,4"] {
        let out = pdakit(&["simulate", s(&path), "--demands", demands]);
        assert_eq!(out.status.code(), Some(2), "{demands}");
    }
}

#[test]
fn simulate_rejects_invalid_array() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.pda", "PDA 2 2\n1 1\n* *\n");
    assert_eq!(pdakit(&["simulate", s(&path)]).status.code(), Some(1));
}

#[test]
fn table_general_prints_closed_forms() {
    let out = pdakit(&["table", "--b-range", "3..=4", "--general"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("16/13"));
    assert!(text.lines().count() > 5);
}

#[test]
fn table_rejects_malformed_family() {
    assert_eq!(
        pdakit(&["table", "--family", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pdakit(&["table", "--b-range", "5..3"]).status.code(),
        Some(2)
    );
}
