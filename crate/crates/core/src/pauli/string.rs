use std::fmt;

use num_complex::Complex64;

/// A tensor product of single-qubit Paulis in symplectic form.
///
/// Qubit `k` carries `X` if only bit `k` of `x` is set, `Z` if only bit `k` of
/// `z` is set and `Y` if both are. Phases live in the coefficient of the
/// containing [`QubitOperator`](super::QubitOperator).
///
/// Field order makes the derived `Ord` lexicographic on `(z, x)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    pub z: u64,
    pub x: u64,
}

/// `i^k` for `k` taken mod 4.
#[inline]
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: Self = Self { z: 0, x: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Self { z, x }
    }

    pub fn x(q: usize) -> Self {
        Self::new(1 << q, 0)
    }

    pub fn y(q: usize) -> Self {
        Self::new(1 << q, 1 << q)
    }

    pub fn z(q: usize) -> Self {
        Self::new(0, 1 << q)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Highest qubit acted on non-trivially, plus one.
    pub fn support_len(&self) -> usize {
        64 - (self.x | self.z).leading_zeros() as usize
    }

    /// `self · other = phase · result`.
    ///
    /// Writing each string as `i^{x·z} X^x Z^z` and moving `Z^{z1}` past
    /// `X^{x2}` gives the phase `i^{|x1 z1| + |x2 z2| − |x3 z3|} (−1)^{|z1 x2|}`.
    pub fn mul(&self, other: &Self) -> (Complex64, Self) {
        let out = Self::new(self.x ^ other.x, self.z ^ other.z);
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones()
            + 4
            - (out.y_count() & 3);
        (i_pow(k), out)
    }

    /// Action on a computational basis state: `P|v⟩ = phase · |v ^ x⟩`.
    ///
    /// Each `Y = iXZ` contributes a factor `i`; every `Z` (including the one
    /// inside `Y`) contributes `(−1)` when its qubit is set in `v`.
    #[inline]
    pub fn apply_to_basis(&self, v: u64) -> (Complex64, u64) {
        let sign = if (v & self.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        (i_pow(self.y_count()) * sign, v ^ self.x)
    }

    /// Whether the two strings commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Parse a word like `X0 Z1 Y3`; the empty word (or `I`) is the identity.
    pub fn parse(word: &str) -> Option<Self> {
        let mut out = Self::IDENTITY;
        for tok in word.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let (op, idx) = tok.split_at(1);
            let q: usize = idx.parse().ok()?;
            if q >= 64 {
                return None;
            }
            let bit = 1u64 << q;
            if (out.x | out.z) & bit != 0 {
                return None;
            }
            match op {
                "X" => out.x |= bit,
                "Y" => {
                    out.x |= bit;
                    out.z |= bit
                }
                "Z" => out.z |= bit,
                _ => return None,
            }
        }
        Some(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in 0..self.support_len() {
            let bit = 1u64 << q;
            let c = match (self.x & bit != 0, self.z & bit != 0) {
                (false, false) => continue,
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{c}{q}")?;
            first = false;
        }
        Ok(())
    }
}
