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

//! Side-by-side comparison of subset-graph PDAs against the Maddah-Ali–Niesen
//! scheme at the same number of users and memory ratio.
//!
//! A family fixes `a` and `lambda` and makes `m` an affine function of `b`;
//! each `b` gives one row. Everything is exact arithmetic: no array is built.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::combinatorics::{binomial, Count};
use crate::constructions::{
    maddah_niesen_params, theorem3_params, AnalyticParams, ConstructionError, SubsetGraphParams,
    Theorem3Params,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComparisonError {
    #[error("malformed family `{0}`: expected `a=<int>,lambda=<int>,m=<expr in b>`, e.g. `a=2,lambda=1,m=2b`")]
    FamilySyntax(String),
    #[error("malformed b range `{0}`: expected `lo..hi`")]
    RangeSyntax(String),
    #[error("b = {b}: {source}")]
    Params { b: u32, source: ConstructionError },
    #[error("b = {b}: t = K*M/N = {k}*{memory_ratio} is not an integer")]
    NonIntegralT {
        b: u32,
        k: Count,
        memory_ratio: String,
    },
    #[error("b = {b}: parameters overflow exact arithmetic")]
    Overflow { b: u32 },
    #[error("the closed forms only cover the family a=2,lambda=1,m=2b")]
    NotGeneralFamily,
}

/// `a`, `lambda`, and `m = scale * b + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Family {
    pub a: u32,
    pub lambda: u32,
    pub scale: u32,
    pub offset: i64,
}

impl Family {
    /// The family `a = 2, lambda = 1, m = 2b`.
    pub const SQRT_USERS: Family = Family {
        a: 2,
        lambda: 1,
        scale: 2,
        offset: 0,
    };

    pub fn params(&self, b: u32) -> Result<SubsetGraphParams, ComparisonError> {
        let m = self.scale as i64 * b as i64 + self.offset;
        let m = u32::try_from(m).map_err(|_| ComparisonError::Params {
            b,
            source: ConstructionError::InvalidParams(format!("m = {m} is negative")),
        })?;
        SubsetGraphParams::new(m, self.a, b, self.lambda)
            .map_err(|source| ComparisonError::Params { b, source })
    }
}

fn parse_m_expr(expr: &str) -> Option<(u32, i64)> {
    let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let (linear, rest) = match expr.find('b') {
        Some(pos) => {
            let coeff = &expr[..pos];
            let coeff = if coeff.is_empty() {
                1
            } else {
                coeff.trim_end_matches('*').parse().ok()?
            };
            (coeff, &expr[pos + 1..])
        }
        None => (0, expr.as_str()),
    };
    let offset = match rest {
        "" => 0,
        r if r.starts_with('+') => r[1..].parse().ok()?,
        r if r.starts_with('-') => -r[1..].parse::<i64>().ok()?,
        r if linear == 0 => r.parse().ok()?,
        _ => return None,
    };
    Some((linear, offset))
}

impl FromStr for Family {
    type Err = ComparisonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ComparisonError::FamilySyntax(s.to_string());
        let (mut a, mut lambda, mut m) = (None, None, None);
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "a" => a = Some(value.trim().parse().map_err(|_| bad())?),
                "lambda" => lambda = Some(value.trim().parse().map_err(|_| bad())?),
                "m" => m = Some(parse_m_expr(value).ok_or_else(bad)?),
                _ => return Err(bad()),
            }
        }
        let (scale, offset) = m.ok_or_else(bad)?;
        Ok(Family {
            a: a.ok_or_else(bad)?,
            lambda: lambda.ok_or_else(bad)?,
            scale,
            offset,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={},lambda={},m=", self.a, self.lambda)?;
        match (self.scale, self.offset) {
            (0, o) => write!(f, "{o}"),
            (s, 0) => write!(f, "{s}b"),
            (s, o) if o > 0 => write!(f, "{s}b+{o}"),
            (s, o) => write!(f, "{s}b{o}"),
        }
    }
}

/// Parses `lo..hi` (inclusive) or a single value.
pub fn parse_b_range(text: &str) -> Result<RangeInclusive<u32>, ComparisonError> {
    let bad = || ComparisonError::RangeSyntax(text.to_string());
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub b: u32,
    pub k: Count,
    pub memory_ratio: Ratio<u128>,
    /// `K M / N`, the Maddah-Ali–Niesen caching parameter at this point.
    pub t: u64,
    pub ali_niesen: AnalyticParams,
    pub new: Theorem3Params,
}

impl ComparisonRow {
    /// `(K - t) / (t + 1)`, which equals `C(K, t+1) / C(K, t)` and stays
    /// exact when those binomials overflow.
    pub fn ali_niesen_rate(&self) -> Option<Ratio<u128>> {
        let k = self.k.value()?;
        let t = self.t as u128;
        Some(Ratio::new(k - t, t + 1))
    }

    pub fn new_rate(&self) -> Option<Ratio<u128>> {
        self.new.scheme.rate()
    }
}

pub fn compare(family: &Family, b: u32) -> Result<ComparisonRow, ComparisonError> {
    let params = family.params(b)?;
    let new = theorem3_params(params).map_err(|source| ComparisonError::Params { b, source })?;
    let overflow = ComparisonError::Overflow { b };
    let memory_ratio = new.scheme.memory_ratio().ok_or(overflow.clone())?;
    let k = new.scheme.k;
    let k_exact = k.value().ok_or(overflow.clone())?;
    if k_exact % memory_ratio.denom() != 0 {
        return Err(ComparisonError::NonIntegralT {
            b,
            k,
            memory_ratio: memory_ratio.to_string(),
        });
    }
    let t = (k_exact / memory_ratio.denom())
        .checked_mul(*memory_ratio.numer())
        .and_then(|t| u64::try_from(t).ok())
        .ok_or(overflow.clone())?;
    let k64 = u64::try_from(k_exact).map_err(|_| overflow)?;
    let ali_niesen =
        maddah_niesen_params(k64, t).map_err(|source| ComparisonError::Params { b, source })?;
    Ok(ComparisonRow {
        b,
        k,
        memory_ratio,
        t,
        ali_niesen,
        new,
    })
}

pub fn compare_family(
    family: &Family,
    bs: RangeInclusive<u32>,
) -> Result<Vec<ComparisonRow>, ComparisonError> {
    bs.map(|b| compare(family, b)).collect()
}

/// Closed forms for the family `a=2, lambda=1, m=2b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForms {
    pub b: u32,
    /// `b^2 / (b^2 - b + 1)`.
    pub ali_niesen_rate: Ratio<u128>,
    /// `C(b(2b-1), b(b-1))`.
    pub ali_niesen_f: Count,
    /// `b`.
    pub new_rate: Ratio<u128>,
    /// `C(2b, b)`.
    pub new_f: Count,
}

pub fn closed_forms(family: &Family, b: u32) -> Result<ClosedForms, ComparisonError> {
    if *family != Family::SQRT_USERS {
        return Err(ComparisonError::NotGeneralFamily);
    }
    family.params(b)?;
    let bb = b as u128;
    let b64 = b as u64;
    Ok(ClosedForms {
        b,
        ali_niesen_rate: Ratio::new(bb * bb, bb * bb - bb + 1),
        ali_niesen_f: binomial(b64 * (2 * b64 - 1), b64 * (b64 - 1)),
        new_rate: Ratio::from_integer(bb),
        new_f: binomial(2 * b64, b64),
    })
}

/// Decimal rendering truncated (not rounded) to `places` digits.
pub fn truncated_decimal(r: &Ratio<u128>, places: u32) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    let whole = n / d;
    let scale = 10u128.pow(places);
    match (n % d).checked_mul(scale) {
        Some(frac) if places > 0 => {
            format!("{whole}.{:0width$}", frac / d, width = places as usize)
        }
        Some(_) => whole.to_string(),
        None => format!("{:.*}", places as usize, n as f64 / d as f64),
    }
}
