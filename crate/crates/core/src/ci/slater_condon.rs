//! Hamiltonian matrix elements between determinants.

use super::determinant::{annihilate, bits, create, Determinant};
use crate::ham_io::MolecularHamiltonian;

/// `⟨I|H|I⟩`, including the core energy.
pub fn diagonal(h: &MolecularHamiltonian, det: Determinant) -> f64 {
    let occ: Vec<usize> = bits(det.0).collect();
    let mut e = h.core_energy;
    for (x, &i) in occ.iter().enumerate() {
        e += h.h1(i, i);
        for &j in &occ[x + 1..] {
            e += h.eri(i, i, j, j) - h.eri(i, j, j, i);
        }
    }
    e
}

/// `⟨J|H|I⟩` for any pair of determinants.
pub fn matrix_element(h: &MolecularHamiltonian, bra: Determinant, ket: Determinant) -> f64 {
    let (i_det, j_det) = (ket.0, bra.0);
    if i_det.count_ones() != j_det.count_ones() {
        return 0.0;
    }
    let diff = i_det ^ j_det;
    match diff.count_ones() {
        0 => diagonal(h, ket),
        2 => {
            let i = (i_det & diff).trailing_zeros() as usize;
            let a = (j_det & diff).trailing_zeros() as usize;
            let (d, s1) = annihilate(i_det, i).unwrap();
            let (_, s2) = create(d, a).unwrap();
            let mut v = h.h1(a, i);
            for j in bits(i_det) {
                v += h.eri(a, i, j, j) - h.eri(a, j, j, i);
            }
            s1 * s2 * v
        }
        4 => {
            let mut from = bits(i_det & diff);
            let mut to = bits(j_det & diff);
            let (i, j) = (from.next().unwrap(), from.next().unwrap());
            let (a, b) = (to.next().unwrap(), to.next().unwrap());
            // J = sign · a†_a a†_b a_j a_i I
            let (d, s1) = annihilate(i_det, i).unwrap();
            let (d, s2) = annihilate(d, j).unwrap();
            let (d, s3) = create(d, b).unwrap();
            let (_, s4) = create(d, a).unwrap();
            s1 * s2 * s3 * s4 * (h.eri(a, i, b, j) - h.eri(a, j, b, i))
        }
        _ => 0.0,
    }
}
