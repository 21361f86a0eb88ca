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

//! Exact k-subset arithmetic: binomial coefficients with an explicit
//! overflow marker, lexicographic ranking/unranking, and enumeration.
//!
//! Subsets live over a ground set `{1, ..., m}` with `m <= 64` and are stored
//! as a single machine word so that intersections and differences used by
//! the subset-graph colorings are one instruction each.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use thiserror::Error;

/// Largest ground set a [`Subset`] can live over.
pub const MAX_GROUND: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("ground set size {0} exceeds the supported maximum of {MAX_GROUND}")]
    GroundTooLarge(u32),
    #[error("element {element} is outside the ground set 1..={ground}")]
    MemberOutOfRange { element: u32, ground: u32 },
    #[error("element {0} occurs more than once")]
    DuplicateMember(u32),
    #[error("rank {rank} is out of range 1..={max} for {k}-subsets of a {m}-set")]
    RankOutOfRange { rank: u64, k: u32, m: u32, max: u64 },
    #[error("cannot choose {k} elements from a {m}-set")]
    SizeExceedsGround { k: u32, m: u32 },
}

/// A nonnegative integer that is exact up to `2^127 - 1` and carries an
/// explicit marker beyond that.
///
/// Arithmetic on an overflowed operand yields `Overflow`; values marked this
/// way are for reporting only and must never size an allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Count {
    Exact(u128),
    Overflow,
}

impl Count {
    /// Largest representable exact value.
    pub const LIMIT: u128 = i128::MAX as u128;

    pub const ZERO: Count = Count::Exact(0);
    pub const ONE: Count = Count::Exact(1);

    pub fn new(value: u128) -> Self {
        if value > Self::LIMIT {
            Count::Overflow
        } else {
            Count::Exact(value)
        }
    }

    pub fn value(self) -> Option<u128> {
        match self {
            Count::Exact(v) => Some(v),
            Count::Overflow => None,
        }
    }

    pub fn is_overflow(self) -> bool {
        matches!(self, Count::Overflow)
    }

    /// Narrowing conversion for sizing in-memory structures.
    pub fn to_usize(self) -> Option<usize> {
        self.value().and_then(|v| usize::try_from(v).ok())
    }

    pub fn min(self, other: Count) -> Count {
        match (self, other) {
            (Count::Exact(a), Count::Exact(b)) => Count::Exact(a.min(b)),
            (Count::Exact(a), Count::Overflow) | (Count::Overflow, Count::Exact(a)) => {
                Count::Exact(a)
            }
            (Count::Overflow, Count::Overflow) => Count::Overflow,
        }
    }

    pub fn max(self, other: Count) -> Count {
        match (self, other) {
            (Count::Exact(a), Count::Exact(b)) => Count::Exact(a.max(b)),
            _ => Count::Overflow,
        }
    }

    /// Subtraction that reports underflow instead of panicking.
    pub fn checked_sub(self, rhs: Count) -> Option<Count> {
        match (self, rhs) {
            (Count::Exact(a), Count::Exact(b)) => a.checked_sub(b).map(Count::Exact),
            _ => Some(Count::Overflow),
        }
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count::Exact(v as u128)
    }
}

impl Add for Count {
    type Output = Count;

    fn add(self, rhs: Count) -> Count {
        match (self, rhs) {
            (Count::Exact(a), Count::Exact(b)) => {
                a.checked_add(b).map_or(Count::Overflow, Count::new)
            }
            _ => Count::Overflow,
        }
    }
}

impl Mul for Count {
    type Output = Count;

    fn mul(self, rhs: Count) -> Count {
        match (self, rhs) {
            (Count::Exact(0), _) | (_, Count::Exact(0)) => Count::ZERO,
            (Count::Exact(a), Count::Exact(b)) => {
                a.checked_mul(b).map_or(Count::Overflow, Count::new)
            }
            _ => Count::Overflow,
        }
    }
}

impl Sub for Count {
    type Output = Count;

    /// Panics if an exact result would be negative.
    fn sub(self, rhs: Count) -> Count {
        self.checked_sub(rhs).expect("Count subtraction underflow")
    }
}

impl PartialOrd for Count {
    fn partial_cmp(&self, other: &Count) -> Option<Ordering> {
        match (self, other) {
            (Count::Exact(a), Count::Exact(b)) => Some(a.cmp(b)),
            (Count::Exact(_), Count::Overflow) => Some(Ordering::Less),
            (Count::Overflow, Count::Exact(_)) => Some(Ordering::Greater),
            (Count::Overflow, Count::Overflow) => None,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(v) => write!(f, "{v}"),
            Count::Overflow => f.write_str(">2^127"),
        }
    }
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Count {
    if k > n {
        return Count::ZERO;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc = C(n, i-1); acc * (n-i+1) is divisible by i, and after
        // removing gcd(acc, i) the rest of i divides (n-i+1).
        let numer = n as u128 - i + 1;
        let g = num_integer::gcd(acc, i);
        let step = numer / (i / g);
        acc = match (acc / g).checked_mul(step) {
            Some(v) if v <= Count::LIMIT => v,
            _ => return Count::Overflow,
        };
    }
    Count::Exact(acc)
}

fn pascal() -> &'static [[u64; 65]; 65] {
    static TABLE: OnceLock<Box<[[u64; 65]; 65]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; 65]; 65]);
        for n in 0..65 {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

/// `C(n, k)` for `n <= 64`, where every value fits in a `u64`.
pub(crate) fn small_binomial(n: u32, k: u32) -> u64 {
    if k > n {
        0
    } else {
        pascal()[n as usize][k as usize]
    }
}

/// A subset of `{1, ..., ground}` with `ground <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    bits: u64,
    ground: u32,
}

fn check_ground(ground: u32) -> Result<(), CombinatoricsError> {
    if ground > MAX_GROUND {
        Err(CombinatoricsError::GroundTooLarge(ground))
    } else {
        Ok(())
    }
}

fn ground_mask(ground: u32) -> u64 {
    if ground == 64 {
        u64::MAX
    } else {
        (1u64 << ground) - 1
    }
}

impl Subset {
    pub fn new(members: &[u32], ground: u32) -> Result<Self, CombinatoricsError> {
        check_ground(ground)?;
        let mut bits = 0u64;
        for &e in members {
            if e == 0 || e > ground {
                return Err(CombinatoricsError::MemberOutOfRange { element: e, ground });
            }
            let bit = 1u64 << (e - 1);
            if bits & bit != 0 {
                return Err(CombinatoricsError::DuplicateMember(e));
            }
            bits |= bit;
        }
        Ok(Subset { bits, ground })
    }

    /// Bit `i` set means element `i + 1` is a member.
    pub fn from_bits(bits: u64, ground: u32) -> Result<Self, CombinatoricsError> {
        check_ground(ground)?;
        let stray = bits & !ground_mask(ground);
        if stray != 0 {
            return Err(CombinatoricsError::MemberOutOfRange {
                element: stray.trailing_zeros() + 1,
                ground,
            });
        }
        Ok(Subset { bits, ground })
    }

    pub fn empty(ground: u32) -> Result<Self, CombinatoricsError> {
        Self::from_bits(0, ground)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn ground(&self) -> u32 {
        self.ground
    }

    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && element <= self.ground && self.bits & (1u64 << (element - 1)) != 0
    }

    /// Members in increasing order.
    pub fn members(&self) -> Members {
        Members { bits: self.bits }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.ground, other.ground);
        Subset {
            bits: self.bits & other.bits,
            ground: self.ground,
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.ground, other.ground);
        Subset {
            bits: self.bits | other.bits,
            ground: self.ground,
        }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.ground, other.ground);
        Subset {
            bits: self.bits & !other.bits,
            ground: self.ground,
        }
    }

    pub fn symmetric_difference(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.ground, other.ground);
        Subset {
            bits: self.bits ^ other.bits,
            ground: self.ground,
        }
    }

    pub fn complement(&self) -> Subset {
        Subset {
            bits: !self.bits & ground_mask(self.ground),
            ground: self.ground,
        }
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.bits & other.bits == 0
    }

    /// Re-expresses `self` inside `universe`, numbering the elements of
    /// `universe` `1..=|universe|` in increasing order.
    ///
    /// `self` must be contained in `universe`.
    pub fn relabel_within(&self, universe: &Subset) -> Subset {
        debug_assert_eq!(self.bits & !universe.bits, 0);
        let mut bits = 0u64;
        for e in self.members() {
            let below = universe.bits & ((1u64 << (e - 1)) - 1);
            bits |= 1u64 << below.count_ones();
        }
        Subset {
            bits,
            ground: universe.len(),
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.ground)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.members().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Lexicographic order on the sorted member lists.
impl Ord for Subset {
    fn cmp(&self, other: &Subset) -> Ordering {
        self.members()
            .cmp(other.members())
            .then(self.ground.cmp(&other.ground))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Subset) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct Members {
    bits: u64,
}

impl Iterator for Members {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.bits == 0 {
            return None;
        }
        let tz = self.bits.trailing_zeros();
        self.bits &= self.bits - 1;
        Some(tz + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.bits.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// 1-based position of `s` among all `|s|`-subsets of its ground set in
/// lexicographic order.
pub fn rank_subset(s: &Subset) -> u64 {
    let m = s.ground;
    let k = s.len();
    let mut rank = 1u64;
    let mut prev = 0u32;
    for (i, c) in s.members().enumerate() {
        let remaining = k - i as u32 - 1;
        for v in prev + 1..c {
            rank += small_binomial(m - v, remaining);
        }
        prev = c;
    }
    rank
}

/// Inverse of [`rank_subset`].
pub fn unrank_subset(rank: u64, k: u32, m: u32) -> Result<Subset, CombinatoricsError> {
    check_ground(m)?;
    if k > m {
        return Err(CombinatoricsError::SizeExceedsGround { k, m });
    }
    let max = small_binomial(m, k);
    if rank == 0 || rank > max {
        return Err(CombinatoricsError::RankOutOfRange { rank, k, m, max });
    }
    let mut r = rank;
    let mut bits = 0u64;
    let mut v = 1u32;
    for i in 1..=k {
        loop {
            let block = small_binomial(m - v, k - i);
            if r > block {
                r -= block;
                v += 1;
            } else {
                break;
            }
        }
        bits |= 1u64 << (v - 1);
        v += 1;
    }
    Ok(Subset { bits, ground: m })
}

/// All `k`-subsets of `{1, ..., m}` in lexicographic order.
pub fn enumerate_subsets(m: u32, k: u32) -> Result<Subsets, CombinatoricsError> {
    check_ground(m)?;
    if k > m {
        return Err(CombinatoricsError::SizeExceedsGround { k, m });
    }
    Ok(Subsets {
        m,
        current: Some((1..=k).collect()),
        remaining: small_binomial(m, k),
    })
}

#[derive(Debug, Clone)]
pub struct Subsets {
    m: u32,
    current: Option<Vec<u32>>,
    remaining: u64,
}

impl Iterator for Subsets {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.current.as_mut()?;
        let out = Subset::new(cur, self.m).expect("enumerated members are in range");
        self.remaining -= 1;

        let k = cur.len();
        let m = self.m as usize;
        match (0..k).rev().find(|&i| (cur[i] as usize) < m - k + i + 1) {
            Some(i) => {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
            }
            None => self.current = None,
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Subsets {}
