use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A single- or double-qubit excitation.
///
/// The evolution `exp(θT)` rotates the *source* pattern (`q` occupied for a
/// single; `r, s` occupied for a double) into the *destination* pattern (`p`
/// occupied; `p, q` occupied) with the other pair of qubits empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Excitation {
    Single { p: usize, q: usize },
    Double { p: usize, q: usize, r: usize, s: usize },
}

impl Excitation {
    pub fn single(p: usize, q: usize) -> Result<Self> {
        if p == q {
            return Err(Error::RepeatedIndex(vec![p, q]));
        }
        Ok(Self::Single { p, q })
    }

    pub fn double(p: usize, q: usize, r: usize, s: usize) -> Result<Self> {
        let idx = [p, q, r, s];
        for i in 0..4 {
            if idx[i + 1..].contains(&idx[i]) {
                return Err(Error::RepeatedIndex(idx.to_vec()));
            }
        }
        Ok(Self::Double { p, q, r, s })
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Self::Single { p, q } => vec![p, q],
            Self::Double { p, q, r, s } => vec![p, q, r, s],
        }
    }

    pub fn is_single(&self) -> bool {
        matches!(self, Self::Single { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Single { .. } => "single",
            Self::Double { .. } => "double",
        }
    }

    /// Bits occupied in the source pattern.
    pub fn source_mask(&self) -> u64 {
        match *self {
            Self::Single { q, .. } => 1 << q,
            Self::Double { r, s, .. } => (1 << r) | (1 << s),
        }
    }

    /// Bits occupied in the destination pattern.
    pub fn dest_mask(&self) -> u64 {
        match *self {
            Self::Single { p, .. } => 1 << p,
            Self::Double { p, q, .. } => (1 << p) | (1 << q),
        }
    }

    pub fn check_range(&self, n_qubits: usize) -> Result<()> {
        match self.indices().into_iter().find(|&i| i >= n_qubits) {
            Some(index) => Err(Error::IndexOutOfRange {
                what: "qubit register",
                index,
                size: n_qubits,
            }),
            None => Ok(()),
        }
    }

    /// Calls `f(src, dst)` for every basis pair the rotation mixes.
    #[inline]
    pub fn for_each_pair(&self, n_qubits: usize, mut f: impl FnMut(usize, usize)) {
        let src_bits = self.source_mask();
        let flip = src_bits | self.dest_mask();
        let full = if n_qubits == 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        };
        let free = full & !flip;
        // Enumerate subsets of the free bits.
        let mut sub = 0u64;
        loop {
            let src = sub | src_bits;
            f(src as usize, (src ^ flip) as usize);
            sub = sub.wrapping_sub(free) & free;
            if sub == 0 {
                break;
            }
        }
    }

    /// CNOT count of the standard circuit for this evolution: 3 for a single,
    /// 13 for a double.
    pub fn cnot_count(&self) -> usize {
        match self {
            Self::Single { .. } => 3,
            Self::Double { .. } => 13,
        }
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Single { p, q } => write!(f, "single {p} {q}"),
            Self::Double { p, q, r, s } => write!(f, "double {p} {q} {r} {s}"),
        }
    }
}

impl FromStr for Excitation {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `double 6 7 0 1`.
    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let nums: Vec<usize> = toks
            .iter()
            .skip(1)
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Invalid(format!("bad excitation indices in {s:?}")))?;
        match (toks.first().copied(), nums.as_slice()) {
            (Some("single"), &[p, q]) => Self::single(p, q),
            (Some("double"), &[p, q, r, s]) => Self::double(p, q, r, s),
            _ => Err(Error::Invalid(format!("cannot parse excitation {s:?}"))),
        }
    }
}
