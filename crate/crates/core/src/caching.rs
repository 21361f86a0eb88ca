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

//! Placement, delivery and decoding driven by a PDA, on real bytes.
//!
//! Every file is cut into `F` equal packets. User `k` caches packet `j` of
//! every file when cell `(j, k)` is a star. For each color `s` the server
//! broadcasts the XOR of packet `j` of the file requested by user `k`, over
//! all cells `(j, k)` holding `s`. A user holding color `s` in row `j` has
//! every other packet in that XOR cached, so one XOR recovers its packet.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pda::{verify_pda, Cell, Pda, PdaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CachingError {
    #[error("the library needs at least one file")]
    NoFiles,
    #[error("files must be nonempty")]
    EmptyFile,
    #[error("file {index} has {len} bytes, expected {expected}")]
    UnequalFiles {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("file length {len} is not a multiple of F = {f}")]
    Divisibility { len: usize, f: usize },
    #[error("demand vector has {found} entries, expected one per user ({expected})")]
    DemandLength { expected: usize, found: usize },
    #[error("user {user} requests file {file}, but the library has {files} file(s)")]
    FileIndex {
        user: usize,
        file: usize,
        files: usize,
    },
    #[error("malformed demand list `{0}`: expected comma-separated positive integers")]
    DemandSyntax(String),
    #[error("user {user} has no cached copy of packet {packet} of file {file}")]
    MissingCacheEntry {
        user: usize,
        file: usize,
        packet: usize,
    },
    #[error("no signal with color {0} was received")]
    MissingSignal(u32),
    #[error(transparent)]
    InvalidPda(#[from] PdaError),
}

fn ensure_valid(p: &Pda) -> Result<(), CachingError> {
    let report = verify_pda(p);
    match report.violations.first() {
        Some(first) => Err(PdaError::Invalid {
            first: first.clone(),
            count: report.violations.len(),
        }
        .into()),
        None => Ok(()),
    }
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// XOR of equal-length byte strings.
pub fn xor_all(parts: &[&[u8]]) -> Vec<u8> {
    let mut out = vec![0u8; parts.first().map_or(0, |p| p.len())];
    for p in parts {
        xor_into(&mut out, p);
    }
    out
}

/// `N` equal-length files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    files: Vec<Vec<u8>>,
}

impl Library {
    pub fn new(files: Vec<Vec<u8>>) -> Result<Self, CachingError> {
        let expected = files.first().ok_or(CachingError::NoFiles)?.len();
        if expected == 0 {
            return Err(CachingError::EmptyFile);
        }
        if let Some((index, f)) = files.iter().enumerate().find(|(_, f)| f.len() != expected) {
            return Err(CachingError::UnequalFiles {
                index: index + 1,
                len: f.len(),
                expected,
            });
        }
        Ok(Library { files })
    }

    pub fn random<R: Rng>(
        num_files: usize,
        file_len: usize,
        rng: &mut R,
    ) -> Result<Self, CachingError> {
        let files = (0..num_files)
            .map(|_| {
                let mut buf = vec![0u8; file_len];
                rng.fill(&mut buf[..]);
                buf
            })
            .collect();
        Library::new(files)
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn file_len(&self) -> usize {
        self.files[0].len()
    }

    /// File `i`, zero-based.
    pub fn file(&self, i: usize) -> &[u8] {
        &self.files[i]
    }

    pub fn packet_len(&self, f: usize) -> Result<usize, CachingError> {
        let len = self.file_len();
        if !len.is_multiple_of(f) {
            return Err(CachingError::Divisibility { len, f });
        }
        Ok(len / f)
    }

    /// Packet `j` of file `i`, both zero-based.
    pub fn packet(&self, i: usize, j: usize, packet_len: usize) -> &[u8] {
        &self.files[i][j * packet_len..(j + 1) * packet_len]
    }
}

/// Requested file per user, one-based file numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(files: Vec<usize>) -> Self {
        DemandVector(files)
    }

    /// Parses `d1,d2,...,dK`.
    pub fn parse(text: &str) -> Result<Self, CachingError> {
        text.split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(CachingError::DemandSyntax(text.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(DemandVector)
    }

    pub fn random<R: Rng>(users: usize, num_files: usize, rng: &mut R) -> Self {
        DemandVector(
            (0..users)
                .map(|_| rng.random_range(1..=num_files))
                .collect(),
        )
    }

    pub fn files(&self) -> &[usize] {
        &self.0
    }

    /// Zero-based file index requested by zero-based user `k`.
    pub fn file_of(&self, k: usize) -> usize {
        self.0[k] - 1
    }

    fn check(&self, users: usize, num_files: usize) -> Result<(), CachingError> {
        if self.0.len() != users {
            return Err(CachingError::DemandLength {
                expected: users,
                found: self.0.len(),
            });
        }
        if let Some((user, &file)) = self
            .0
            .iter()
            .enumerate()
            .find(|(_, &f)| f == 0 || f > num_files)
        {
            return Err(CachingError::FileIndex {
                user: user + 1,
                file,
                files: num_files,
            });
        }
        Ok(())
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Cache contents of one user: `(file, packet) -> bytes`, zero-based keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCache {
    pub user: usize,
    pub entries: BTreeMap<(usize, usize), Vec<u8>>,
}

impl UserCache {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bytes(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn get(&self, file: usize, packet: usize) -> Option<&[u8]> {
        self.entries.get(&(file, packet)).map(Vec::as_slice)
    }
}

/// Each user caches every packet row in which its column holds a star.
pub fn place(p: &Pda, lib: &Library) -> Result<Vec<UserCache>, CachingError> {
    ensure_valid(p)?;
    let packet_len = lib.packet_len(p.rows())?;
    Ok((0..p.cols())
        .map(|k| {
            let mut entries = BTreeMap::new();
            for j in (0..p.rows()).filter(|&j| p.get(j, k).is_star()) {
                for i in 0..lib.num_files() {
                    entries.insert((i, j), lib.packet(i, j, packet_len).to_vec());
                }
            }
            UserCache { user: k, entries }
        })
        .collect())
}

/// One XOR term of a signal: packet `packet` of the file user `user` wants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub user: usize,
    pub packet: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub color: u32,
    pub payload: Vec<u8>,
    /// Sorted by user.
    pub terms: Vec<Term>,
}

impl Signal {
    /// Symbolic form, e.g. `W_{1,{2,3}} ⊕ W_{2,{1,3}}`, with `row_label`
    /// naming zero-based packet rows.
    pub fn audit(&self, d: &DemandVector, row_label: impl Fn(usize) -> String) -> String {
        self.terms
            .iter()
            .map(|t| format!("W_{{{},{}}}", d.files()[t.user], row_label(t.packet)))
            .collect::<Vec<_>>()
            .join(" ⊕ ")
    }
}

/// One signal per color `1..=S`, in color order.
pub fn deliver(p: &Pda, lib: &Library, d: &DemandVector) -> Result<Vec<Signal>, CachingError> {
    ensure_valid(p)?;
    let packet_len = lib.packet_len(p.rows())?;
    d.check(p.cols(), lib.num_files())?;
    Ok(p.color_classes()
        .into_iter()
        .enumerate()
        .map(|(i, class)| {
            let mut terms: Vec<Term> = class
                .iter()
                .map(|pos| Term {
                    user: pos.col,
                    packet: pos.row,
                })
                .collect();
            terms.sort_unstable();
            let mut payload = vec![0u8; packet_len];
            for t in &terms {
                xor_into(
                    &mut payload,
                    lib.packet(d.file_of(t.user), t.packet, packet_len),
                );
            }
            Signal {
                color: i as u32 + 1,
                payload,
                terms,
            }
        })
        .collect())
}

/// Reassembles the file requested by user `user` (zero-based) from its cache
/// and the broadcast signals.
pub fn decode(
    p: &Pda,
    cache: &UserCache,
    signals: &[Signal],
    d: &DemandVector,
    user: usize,
) -> Result<Vec<u8>, CachingError> {
    let want = d.file_of(user);
    let mut out = Vec::new();
    for j in 0..p.rows() {
        match p.get(j, user) {
            Cell::Star => {
                let packet = cache.get(want, j).ok_or(CachingError::MissingCacheEntry {
                    user: user + 1,
                    file: want + 1,
                    packet: j + 1,
                })?;
                out.extend_from_slice(packet);
            }
            Cell::Color(s) => {
                let signal = signals
                    .iter()
                    .find(|sig| sig.color == s)
                    .ok_or(CachingError::MissingSignal(s))?;
                let mut packet = signal.payload.clone();
                for t in signal.terms.iter().filter(|t| t.user != user) {
                    let file = d.file_of(t.user);
                    let known =
                        cache
                            .get(file, t.packet)
                            .ok_or(CachingError::MissingCacheEntry {
                                user: user + 1,
                                file: file + 1,
                                packet: t.packet + 1,
                            })?;
                    xor_into(&mut packet, known);
                }
                out.extend_from_slice(&packet);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationConfig {
    pub num_files: usize,
    pub packet_len: usize,
    /// Drawn from `seed` when absent.
    pub demands: Option<DemandVector>,
    /// Seeds the file contents (and the demands, if not given).
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryReport {
    pub demands: DemandVector,
    /// Per-user decode success.
    pub decoded: Vec<bool>,
    pub signals: Vec<Signal>,
    pub packets_per_file: usize,
    pub packet_len: usize,
    /// `S_d / F`.
    pub measured_rate: Ratio<u128>,
    pub link_bytes: usize,
}

impl DeliveryReport {
    pub fn signals_sent(&self) -> usize {
        self.signals.len()
    }

    pub fn successes(&self) -> usize {
        self.decoded.iter().filter(|&&ok| ok).count()
    }

    pub fn all_decoded(&self) -> bool {
        self.decoded.iter().all(|&ok| ok)
    }
}

impl fmt::Display for DeliveryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, ok) in self.decoded.iter().enumerate() {
            writeln!(f, "user {}: {}", k + 1, if *ok { "OK" } else { "FAIL" })?;
        }
        writeln!(
            f,
            "signals={} rate={} bytes={}",
            self.signals_sent(),
            self.measured_rate,
            self.link_bytes
        )?;
        writeln!(
            f,
            "{}/{} {} rate={}",
            self.successes(),
            self.decoded.len(),
            if self.all_decoded() { "OK" } else { "FAIL" },
            self.measured_rate
        )
    }
}

/// Runs placement, delivery and decoding for every user on random files.
pub fn simulate(p: &Pda, config: &SimulationConfig) -> Result<DeliveryReport, CachingError> {
    ensure_valid(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lib = Library::random(config.num_files, config.packet_len * p.rows(), &mut rng)?;
    let demands = match &config.demands {
        Some(d) => d.clone(),
        None => DemandVector::random(p.cols(), config.num_files, &mut rng),
    };
    let caches = place(p, &lib)?;
    let signals = deliver(p, &lib, &demands)?;
    let decoded = caches
        .iter()
        .map(|cache| {
            let got = decode(p, cache, &signals, &demands, cache.user)?;
            Ok(got == lib.file(demands.file_of(cache.user)))
        })
        .collect::<Result<Vec<bool>, CachingError>>()?;
    let link_bytes = signals.iter().map(|s| s.payload.len()).sum();
    Ok(DeliveryReport {
        demands,
        decoded,
        measured_rate: Ratio::new(signals.len() as u128, p.rows() as u128),
        signals,
        packets_per_file: p.rows(),
        packet_len: config.packet_len,
        link_bytes,
    })
}
