use std::fmt;

/// Slater determinant as an interleaved spin-orbital occupation mask
/// (bit `2i` = α in spatial orbital `i`, bit `2i + 1` = β).
///
/// The determinant is `a†_{p1} a†_{p2} ⋯ |vac⟩` with `p1 < p2 < ⋯`, which is
/// exactly the Jordan–Wigner basis state with the same bits. Ordering is by
/// bitstring value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Determinant(pub u64);

const EVEN: u64 = 0x5555_5555_5555_5555;

fn spread(mut v: u64) -> u64 {
    // inverse of `compact`: bit i -> bit 2i
    v &= 0xffff_ffff;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    (v | (v << 1)) & EVEN
}

fn compact(mut v: u64) -> u64 {
    v &= EVEN;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v >> 4)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v >> 8)) & 0x0000_ffff_0000_ffff;
    (v | (v >> 16)) & 0xffff_ffff
}

impl Determinant {
    pub fn from_alpha_beta(alpha: u64, beta: u64) -> Self {
        Self(spread(alpha) | (spread(beta) << 1))
    }

    /// Spatial-orbital mask of α electrons.
    pub fn alpha(&self) -> u64 {
        compact(self.0)
    }

    pub fn beta(&self) -> u64 {
        compact(self.0 >> 1)
    }

    pub fn n_electrons(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn excitation_degree(&self, other: &Self) -> u32 {
        (self.0 ^ other.0).count_ones() / 2
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> {
        bits(self.0)
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x} {:x}", self.alpha(), self.beta())
    }
}

/// Indices of set bits, ascending.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// `a_p |det⟩ = sign |det'⟩`, or `None` if `p` is empty.
#[inline]
pub fn annihilate(det: u64, p: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if det & bit == 0 {
        return None;
    }
    Some((det ^ bit, parity(det, p)))
}

/// `a†_p |det⟩ = sign |det'⟩`, or `None` if `p` is occupied.
#[inline]
pub fn create(det: u64, p: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if det & bit != 0 {
        return None;
    }
    Some((det | bit, parity(det, p)))
}

/// `(−1)^(occupied orbitals below p)`.
#[inline]
fn parity(det: u64, p: usize) -> f64 {
    if (det & ((1u64 << p) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Every determinant reachable from `det` by an S_z-conserving single or
/// double excitation within `n_spin_orbitals`.
pub fn connected(det: Determinant, n_spin_orbitals: usize) -> Vec<Determinant> {
    let occ: Vec<usize> = bits(det.0).collect();
    let full = (1u64 << n_spin_orbitals) - 1;
    let virt: Vec<usize> = bits(full & !det.0).collect();
    let mut out = Vec::new();
    for &i in &occ {
        for &a in virt.iter().filter(|&&a| a % 2 == i % 2) {
            out.push(Determinant(det.0 ^ (1 << i) ^ (1 << a)));
        }
    }
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    if (i % 2) + (j % 2) == (a % 2) + (b % 2) {
                        out.push(Determinant(det.0 ^ (1 << i) ^ (1 << j) ^ (1 << a) ^ (1 << b)));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_beta_interleaving() {
        let d = Determinant::from_alpha_beta(0b101, 0b011);
        assert_eq!(d.0, 0b01_10_11);
        assert_eq!(d.alpha(), 0b101);
        assert_eq!(d.beta(), 0b011);
        assert_eq!(Determinant::from_alpha_beta(0b1, 0b1).0, 0b11);
    }

    #[test]
    fn ladder_signs() {
        // a_1 |0b011⟩: one electron below → −
        assert_eq!(annihilate(0b011, 1), Some((0b001, -1.0)));
        assert_eq!(annihilate(0b011, 2), None);
        assert_eq!(create(0b011, 2), Some((0b111, 1.0)));
        assert_eq!(create(0b010, 0), Some((0b011, 1.0)));
    }

    #[test]
    fn h2_connections() {
        let conn = connected(Determinant(0b0011), 4);
        assert_eq!(conn.len(), 3);
        assert!(conn.contains(&Determinant(0b1100)));
    }
}
