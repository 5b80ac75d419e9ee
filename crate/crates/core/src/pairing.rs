//! Canonical enumeration of `X × X` for a countably infinite `X = {x_1, x_2, ...}`.
//!
//! Pairs are listed along anti-diagonals: by `i + j` ascending, then by `i`
//! ascending. Positions are 1-based, so `q_1 = (x_1, x_1)`, `q_2 = (x_1, x_2)`,
//! `q_3 = (x_2, x_1)`, `q_4 = (x_1, x_3)` and so on.
//!
//! Every index falls into exactly one of three classes:
//!
//! | Class | Pairs |
//! |-------|-------|
//! | `R`   | diagonal pairs `(x_i, x_i)` |
//! | `A`   | off-diagonal pairs listed before their transpose (`i < j`) |
//! | `B`   | the transpose partners of `A` (`i > j`) |
//!
//! Transposes sit on the same anti-diagonal, which keeps [`partner`] O(1).
//! The matching `k ↦ (k-th A index, its partner)` is the sequence [`gamma`].

use std::fmt;

use num_integer::Roots;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PairingError {
    #[error("coordinates are 1-based; got ({0}, {1})")]
    ZeroCoordinate(u64, u64),
    #[error("pair ({0}, {1}) has no index representable in u64")]
    Overflow(u64, u64),
    #[error("pair indices are 1-based; got 0")]
    ZeroIndex,
}

/// 1-based position of a pair in the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PairIndex(u64);

impl PairIndex {
    pub const FIRST: PairIndex = PairIndex(1);

    pub fn new(k: u64) -> Result<Self, PairingError> {
        if k == 0 {
            Err(PairingError::ZeroIndex)
        } else {
            Ok(PairIndex(k))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Next index in the enumeration.
    #[inline]
    pub fn succ(self) -> PairIndex {
        PairIndex(self.0 + 1)
    }

    #[inline]
    pub(crate) fn raw(k: u64) -> PairIndex {
        debug_assert!(k >= 1);
        PairIndex(k)
    }
}

impl TryFrom<u64> for PairIndex {
    type Error = PairingError;

    fn try_from(k: u64) -> Result<Self, Self::Error> {
        PairIndex::new(k)
    }
}

impl From<PairIndex> for u64 {
    fn from(k: PairIndex) -> u64 {
        k.0
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    R,
    A,
    B,
}

impl Atom {
    pub const ALL: [Atom; 3] = [Atom::R, Atom::A, Atom::B];

    /// The class holding the transposes of this class.
    pub fn transposed(self) -> Atom {
        match self {
            Atom::R => Atom::R,
            Atom::A => Atom::B,
            Atom::B => Atom::A,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Atom::R => "R",
            Atom::A => "A",
            Atom::B => "B",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClass {
    pub class: Atom,
    /// Index of the transposed pair; the index itself for `R`.
    pub partner: PairIndex,
}

/// Index of `(x_i, x_j)`: `(i+j-2)(i+j-1)/2 + i`.
pub fn encode(i: u64, j: u64) -> Result<PairIndex, PairingError> {
    if i == 0 || j == 0 {
        return Err(PairingError::ZeroCoordinate(i, j));
    }
    let s = i as u128 + j as u128;
    (s - 2)
        .checked_mul(s - 1)
        .and_then(|t| u64::try_from(t / 2 + i as u128).ok())
        .map(PairIndex)
        .ok_or(PairingError::Overflow(i, j))
}

/// Coordinates `(i, j)` of `q_k`.
pub fn decode(k: PairIndex) -> (u64, u64) {
    let k = k.0 as u128;
    // smallest d with d(d+1)/2 >= k; d = i + j - 1
    let mut d = ((8 * k + 1).sqrt() - 1) / 2;
    while d * (d + 1) / 2 < k {
        d += 1;
    }
    while d > 1 && (d - 1) * d / 2 >= k {
        d -= 1;
    }
    let i = k - (d - 1) * d / 2;
    let j = d + 1 - i;
    (i as u64, j as u64)
}

/// Transpose partner of `q_k`.
pub fn partner(k: PairIndex) -> PairIndex {
    let (i, j) = decode(k);
    // (j, i) lies on the same anti-diagonal as k, so it never overflows
    PairIndex((k.0 as i128 + j as i128 - i as i128) as u64)
}

pub fn atom_of(k: PairIndex) -> Atom {
    let (i, j) = decode(k);
    match i.cmp(&j) {
        std::cmp::Ordering::Equal => Atom::R,
        std::cmp::Ordering::Less => Atom::A,
        std::cmp::Ordering::Greater => Atom::B,
    }
}

pub fn classify(k: PairIndex) -> PairClass {
    PairClass {
        class: atom_of(k),
        partner: partner(k),
    }
}

/// `encode(i, i) = 2i² − 2i + 1`.
pub fn diagonal_index(i: u64) -> Result<PairIndex, PairingError> {
    encode(i, i)
}

/// Largest coordinate mentioned by any index `<= k`.
pub fn max_coordinate_upto(k: PairIndex) -> u64 {
    let (i, j) = decode(k);
    i + j - 1
}

/// Smallest diagonal index `>= k`.
pub fn next_diagonal_at_or_after(k: PairIndex) -> PairIndex {
    let (i, j) = decode(k);
    let d = i + j - 1;
    // diagonal of anti-diagonal d exists only when d is odd: ((d+1)/2, (d+1)/2)
    let mut c = d.div_ceil(2);
    loop {
        let idx = PairIndex(2 * c * c - 2 * c + 1);
        if idx >= k {
            return idx;
        }
        c += 1;
    }
}

/// Iterator over `Γ`: the `k`-th item is `(k-th A index, its B partner)`.
pub fn gamma() -> impl Iterator<Item = (PairIndex, PairIndex)> {
    (1u64..)
        .map(PairIndex)
        .filter(|&k| atom_of(k) == Atom::A)
        .map(|k| (k, partner(k)))
}
