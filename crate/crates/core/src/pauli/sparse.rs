use num_complex::Complex64;

use super::operator::{QubitOperator, PRUNE_TOL};

/// A [`QubitOperator`] compiled to a row-compressed matrix over the full
/// `2^N` computational basis.
///
/// Algorithms apply the Hamiltonian thousands of times per run; summing the
/// Pauli terms once per matrix element keeps each application proportional to
/// the number of nonzero entries instead of `terms × 2^N`.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    n_qubits: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    pub fn from_qubit_operator(op: &QubitOperator) -> Self {
        let n = op.n_qubits();
        let dim = 1usize << n;
        let terms: Vec<_> = op.iter().map(|(s, c)| (*s, *c)).collect();

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut row: Vec<(u32, Complex64)> = Vec::new();
        row_ptr.push(0);
        for y in 0..dim as u64 {
            row.clear();
            // ⟨y|P|v⟩ is nonzero only for v = y ^ x.
            for (s, c) in &terms {
                let v = y ^ s.x;
                let (phase, w) = s.apply_to_basis(v);
                debug_assert_eq!(w, y);
                row.push((v as u32, c * phase));
            }
            row.sort_by_key(|&(col, _)| col);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut sum = Complex64::default();
                while k < row.len() && row[k].0 == col {
                    sum += row[k].1;
                    k += 1;
                }
                if sum.norm() >= PRUNE_TOL {
                    cols.push(col);
                    vals.push(sum);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n_qubits: n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out = A x`.
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), 1 << self.n_qubits);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); x.len()];
        self.apply_into(x, &mut out);
        out
    }

    /// Matrix element `⟨row|A|col⟩`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::default(),
        }
    }
}
