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

//! Placement delivery arrays: the array type, its validity checker, the
//! caching-scheme parameters it induces, and the line-oriented text format.
//!
//! A `(K, F, Z, S)` array has `F` rows (packets) and `K` columns (users).
//! Each cell is either a star (the user caches that packet) or a color in
//! `1..=S` (the packet is delivered in multicast slot `s`). The array is
//! valid when
//!
//! * every column holds the same number `Z` of stars,
//! * every color `1..=S` occurs,
//! * two cells of the same color sit in distinct rows and columns, and the
//!   two cells completing their 2x2 sub-array are both stars.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Star,
    Color(u32),
}

impl Cell {
    pub fn is_star(self) -> bool {
        matches!(self, Cell::Star)
    }

    pub fn color(self) -> Option<u32> {
        match self {
            Cell::Star => None,
            Cell::Color(c) => Some(c),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Star => f.write_str("*"),
            Cell::Color(c) => write!(f, "{c}"),
        }
    }
}

/// A cell position, zero-based internally and printed one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row + 1, self.col + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdaError {
    #[error("an array needs at least one row and one column (got {rows}x{cols})")]
    EmptyDimension { rows: usize, cols: usize },
    #[error("{found} cells cannot fill a {rows}x{cols} array")]
    CellCount {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("color 0 at {0}; colors are positive")]
    ZeroColor(Position),
    #[error("array is not a valid PDA ({count} violation(s), first: {first})")]
    Invalid { first: Violation, count: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// An `F x K` array over `{*, 1, 2, ...}`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pda {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl Pda {
    pub fn new(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self, PdaError> {
        if rows == 0 || cols == 0 {
            return Err(PdaError::EmptyDimension { rows, cols });
        }
        if rows.checked_mul(cols) != Some(cells.len()) {
            return Err(PdaError::CellCount {
                rows,
                cols,
                found: cells.len(),
            });
        }
        if let Some(i) = cells.iter().position(|&c| c == Cell::Color(0)) {
            return Err(PdaError::ZeroColor(Position::new(i / cols, i % cols)));
        }
        Ok(Pda { rows, cols, cells })
    }

    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Result<Self, PdaError> {
        let f = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        let mut cells = Vec::with_capacity(f * k);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(PdaError::RaggedRow {
                    row: j + 1,
                    expected: k,
                    found: row.len(),
                });
            }
            cells.extend(row);
        }
        Pda::new(f, k, cells)
    }

    pub fn all_star(rows: usize, cols: usize) -> Result<Self, PdaError> {
        Pda::new(rows, cols, vec![Cell::Star; rows.saturating_mul(cols)])
    }

    /// Number of rows, `F`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns, `K`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cell: Cell) {
        assert!(cell != Cell::Color(0), "colors are positive");
        self.cells[row * self.cols + col] = cell;
    }

    pub fn row(&self, row: usize) -> &[Cell] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Largest color label present; this is `S` for arrays whose colors are
    /// contiguous.
    pub fn num_colors(&self) -> u32 {
        self.cells
            .iter()
            .filter_map(|c| c.color())
            .max()
            .unwrap_or(0)
    }

    pub fn star_count(&self, col: usize) -> usize {
        (0..self.rows)
            .filter(|&j| self.get(j, col).is_star())
            .count()
    }

    /// Cells of each color `1..=S` in row-major order; index `s - 1` holds
    /// color `s`.
    pub fn color_classes(&self) -> Vec<Vec<Position>> {
        let mut classes = vec![Vec::new(); self.num_colors() as usize];
        for (i, cell) in self.cells.iter().enumerate() {
            if let Cell::Color(s) = cell {
                classes[*s as usize - 1].push(Position::new(i / self.cols, i % self.cols));
            }
        }
        classes
    }

    /// Relabels the colors in use to `1..=S`, preserving their order.
    pub fn compacted(&self) -> Pda {
        let mut used: Vec<u32> = self.cells.iter().filter_map(|c| c.color()).collect();
        used.sort_unstable();
        used.dedup();
        let cells = self
            .cells
            .iter()
            .map(|c| match c {
                Cell::Star => Cell::Star,
                Cell::Color(s) => Cell::Color(used.binary_search(s).unwrap() as u32 + 1),
            })
            .collect();
        Pda {
            rows: self.rows,
            cols: self.cols,
            cells,
        }
    }
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_pda(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    C1,
    C2,
    C3a,
    C3b,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3a => "C3a",
            Condition::C3b => "C3b",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    /// Column `col` has `stars` stars where the first column has `expected`.
    StarCount {
        col: usize,
        stars: usize,
        expected: usize,
    },
    /// Color `color` is below the largest label but never used.
    MissingColor { color: u32 },
    /// Two cells of one color share a row or a column.
    SharedLine {
        color: u32,
        first: Position,
        second: Position,
    },
    /// Two cells of one color whose 2x2 sub-array has a non-star corner.
    CornerNotStar {
        color: u32,
        first: Position,
        second: Position,
        corner: Position,
        found: Cell,
    },
}

impl Violation {
    pub fn condition(&self) -> Condition {
        match self {
            Violation::StarCount { .. } => Condition::C1,
            Violation::MissingColor { .. } => Condition::C2,
            Violation::SharedLine { .. } => Condition::C3a,
            Violation::CornerNotStar { .. } => Condition::C3b,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.condition())?;
        match self {
            Violation::StarCount {
                col,
                stars,
                expected,
            } => {
                write!(
                    f,
                    "column {} has {stars} stars, expected {expected}",
                    col + 1
                )
            }
            Violation::MissingColor { color } => write!(f, "color {color} does not occur"),
            Violation::SharedLine {
                color,
                first,
                second,
            } => {
                write!(f, "color {color} at {first} and {second}")
            }
            Violation::CornerNotStar {
                color,
                first,
                second,
                corner,
                found,
            } => write!(
                f,
                "color {color} at {first} and {second} needs * at {corner}, found {found}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaReport {
    pub valid: bool,
    pub k: usize,
    pub f: usize,
    /// Star count of the first column; the common count when valid.
    pub z: usize,
    pub s: u32,
    /// Common multiplicity of the colors, if they all occur equally often.
    pub g: Option<usize>,
    pub violations: Vec<Violation>,
}

/// Checks every placement delivery array condition and reports all
/// violations: column conditions first, then missing colors, then
/// same-color conflicts in row-major order of the cell pair.
pub fn verify_pda(p: &Pda) -> PdaReport {
    let mut violations = Vec::new();

    let expected = p.star_count(0);
    for col in 1..p.cols {
        let stars = p.star_count(col);
        if stars != expected {
            violations.push(Violation::StarCount {
                col,
                stars,
                expected,
            });
        }
    }

    let classes = p.color_classes();
    for (i, class) in classes.iter().enumerate() {
        if class.is_empty() {
            violations.push(Violation::MissingColor {
                color: i as u32 + 1,
            });
        }
    }

    let mut conflicts = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        let color = i as u32 + 1;
        for (x, &first) in class.iter().enumerate() {
            for &second in &class[x + 1..] {
                if first.row == second.row || first.col == second.col {
                    conflicts.push(Violation::SharedLine {
                        color,
                        first,
                        second,
                    });
                    continue;
                }
                for corner in [
                    Position::new(first.row, second.col),
                    Position::new(second.row, first.col),
                ] {
                    let found = p.get(corner.row, corner.col);
                    if !found.is_star() {
                        conflicts.push(Violation::CornerNotStar {
                            color,
                            first,
                            second,
                            corner,
                            found,
                        });
                    }
                }
            }
        }
    }
    conflicts.sort_by_key(|v| match v {
        Violation::SharedLine { first, second, .. } => (*first, *second, *second),
        Violation::CornerNotStar {
            first,
            second,
            corner,
            ..
        } => (*first, *second, *corner),
        _ => unreachable!(),
    });
    violations.extend(conflicts);

    let g = match classes.first() {
        Some(head) if !head.is_empty() && classes.iter().all(|c| c.len() == head.len()) => {
            Some(head.len())
        }
        _ => None,
    };

    PdaReport {
        valid: violations.is_empty(),
        k: p.cols,
        f: p.rows,
        z: expected,
        s: p.num_colors(),
        g,
        violations,
    }
}

/// Parameters of the coded caching scheme realized by a valid array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub k: u128,
    pub f: u128,
    pub z: u128,
    pub s: u128,
    pub g: Option<u128>,
    /// Fraction of the library each user caches, `Z/F`.
    pub memory_ratio: Ratio<u128>,
    /// Normalized delivery load, `S/F`.
    pub rate: Ratio<u128>,
}

impl fmt::Display for SchemeParams {
    /// `K F Z S g M/N R`, with `-` for a missing `g`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.g.map_or_else(|| "-".to_string(), |g| g.to_string());
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.k, self.f, self.z, self.s, g, self.memory_ratio, self.rate
        )
    }
}

pub fn scheme_params(p: &Pda) -> Result<SchemeParams, PdaError> {
    let report = verify_pda(p);
    if let Some(first) = report.violations.first() {
        return Err(PdaError::Invalid {
            first: first.clone(),
            count: report.violations.len(),
        });
    }
    let f = report.f as u128;
    Ok(SchemeParams {
        k: report.k as u128,
        f,
        z: report.z as u128,
        s: report.s as u128,
        g: report.g.map(|g| g as u128),
        memory_ratio: Ratio::new(report.z as u128, f),
        rate: Ratio::new(report.s as u128, f),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("expected {expected} tokens, found {found}")]
    RaggedRow { expected: usize, found: usize },
    #[error("invalid token `{0}`, expected `*` or a positive integer")]
    BadToken(String),
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("missing trailing newline")]
    MissingTrailingNewline,
    #[error("colors must be exactly 1..={max}; color {missing} does not occur")]
    GappedColors { max: u32, missing: u32 },
    #[error("{0}")]
    Other(String),
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }
}

/// `PDA K F`, then `F` lines of `K` space-separated tokens, newline-terminated.
pub fn serialize_pda(p: &Pda) -> String {
    let mut out = format!("PDA {} {}\n", p.cols, p.rows);
    for j in 0..p.rows {
        for (k, cell) in p.row(j).iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push_str(&cell.to_string());
        }
        out.push('\n');
    }
    out
}

/// Splits `text` into lines, each paired with its 1-based number, and
/// insists on a trailing newline.
pub(crate) fn split_lines(text: &str) -> Result<Vec<(usize, &str)>, ParseError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let lines: Vec<&str> = text.split('\n').collect();
    let (last, body) = lines.split_last().expect("split yields at least one piece");
    if !last.is_empty() {
        return Err(ParseError::new(
            lines.len(),
            last.len() + 1,
            ParseErrorKind::MissingTrailingNewline,
        ));
    }
    Ok(body
        .iter()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .collect())
}

/// Whitespace-separated tokens with their 1-based starting columns.
pub(crate) fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split([' ', '\t'])
        .scan(1usize, |col, tok| {
            let start = *col;
            *col += tok.chars().count() + 1;
            Some((start, tok))
        })
        .filter(|(_, tok)| !tok.is_empty())
}

pub(crate) fn parse_header(
    lines: &[(usize, &str)],
    keyword: &'static str,
    arity: usize,
) -> Result<Vec<usize>, ParseError> {
    let Some(&(line, text)) = lines.first() else {
        return Err(ParseError::new(
            1,
            1,
            ParseErrorKind::MissingHeader(keyword),
        ));
    };
    let toks: Vec<(usize, &str)> = tokens(text).collect();
    match toks.first() {
        Some((_, kw)) if *kw == keyword => {}
        Some((col, _)) => {
            return Err(ParseError::new(
                line,
                *col,
                ParseErrorKind::MissingHeader(keyword),
            ))
        }
        None => {
            return Err(ParseError::new(
                line,
                1,
                ParseErrorKind::MissingHeader(keyword),
            ))
        }
    }
    if toks.len() != arity + 1 {
        return Err(ParseError::new(
            line,
            1,
            ParseErrorKind::BadHeader(format!("expected `{keyword}` followed by {arity} integers")),
        ));
    }
    toks[1..]
        .iter()
        .map(|&(col, t)| {
            t.parse::<usize>().map_err(|_| {
                ParseError::new(
                    line,
                    col,
                    ParseErrorKind::BadHeader(format!("`{t}` is not an integer")),
                )
            })
        })
        .collect()
}

pub fn parse_pda(text: &str) -> Result<Pda, ParseError> {
    let lines = split_lines(text)?;
    let header = parse_header(&lines, "PDA", 2)?;
    let (k, f) = (header[0], header[1]);
    if k == 0 || f == 0 {
        return Err(ParseError::new(
            1,
            1,
            ParseErrorKind::BadHeader("K and F must be positive".into()),
        ));
    }
    let body = &lines[1..];
    if body.len() != f {
        let line = if body.len() < f {
            lines.len() + 1
        } else {
            f + 2
        };
        return Err(ParseError::new(
            line,
            1,
            ParseErrorKind::RowCount {
                expected: f,
                found: body.len(),
            },
        ));
    }

    let mut cells = Vec::with_capacity(k * f);
    let mut first_seen: Vec<Option<(usize, usize)>> = Vec::new();
    for &(line, text) in body {
        let mut found = 0;
        for (col, tok) in tokens(text) {
            found += 1;
            if found > k {
                return Err(ParseError::new(
                    line,
                    col,
                    ParseErrorKind::RaggedRow {
                        expected: k,
                        found: tokens(text).count(),
                    },
                ));
            }
            let cell = if tok == "*" {
                Cell::Star
            } else {
                match tok.parse::<u32>() {
                    Ok(s) if s > 0 && tok.bytes().all(|b| b.is_ascii_digit()) => {
                        let idx = s as usize - 1;
                        if first_seen.len() <= idx {
                            first_seen.resize(idx + 1, None);
                        }
                        first_seen[idx].get_or_insert((line, col));
                        Cell::Color(s)
                    }
                    _ => {
                        return Err(ParseError::new(
                            line,
                            col,
                            ParseErrorKind::BadToken(tok.to_string()),
                        ))
                    }
                }
            };
            cells.push(cell);
        }
        if found < k {
            return Err(ParseError::new(
                line,
                text.len() + 1,
                ParseErrorKind::RaggedRow { expected: k, found },
            ));
        }
    }

    if let Some(gap) = first_seen.iter().position(Option::is_none) {
        let max = first_seen.len() as u32;
        let (line, col) = first_seen[max as usize - 1].expect("largest color was seen");
        return Err(ParseError::new(
            line,
            col,
            ParseErrorKind::GappedColors {
                max,
                missing: gap as u32 + 1,
            },
        ));
    }

    Ok(Pda::new(f, k, cells).expect("dimensions checked above"))
}

impl std::str::FromStr for Pda {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pda(s)
    }
}
