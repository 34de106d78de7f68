use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::excitation::Excitation;
use crate::statevector::{rotate, Statevector};

/// Ordered product of qubit-excitation evolutions applied to the
/// Hartree–Fock state. Entry 0 acts first, so the prepared state is
/// `U_m(θ_m) ⋯ U_1(θ_1)|HF⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    n_qubits: usize,
    n_electrons: usize,
    ops: Vec<(Excitation, f64)>,
}

/// Single/double split and CNOT total of an ansatz.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceCount {
    pub singles: usize,
    pub doubles: usize,
    pub cnots: usize,
}

impl ResourceCount {
    pub fn from_excitations<'a>(ops: impl IntoIterator<Item = &'a Excitation>) -> Self {
        let mut out = Self::default();
        for e in ops {
            if e.is_single() {
                out.singles += 1;
            } else {
                out.doubles += 1;
            }
            out.cnots += e.cnot_count();
        }
        out
    }
}

impl Ansatz {
    pub fn hartree_fock(n_qubits: usize, n_electrons: usize) -> Self {
        Self {
            n_qubits,
            n_electrons,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// Hartree–Fock occupation mask.
    pub fn reference(&self) -> u64 {
        (1u64 << self.n_electrons) - 1
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, exc: Excitation, theta: f64) {
        self.ops.push((exc, theta));
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &(Excitation, f64)> + ExactSizeIterator {
        self.ops.iter()
    }

    pub fn excitations(&self) -> impl Iterator<Item = &Excitation> {
        self.ops.iter().map(|(e, _)| e)
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.ops.iter().map(|(_, t)| *t).collect()
    }

    pub fn set_thetas(&mut self, thetas: &[f64]) {
        assert_eq!(thetas.len(), self.ops.len(), "angle count mismatch");
        for ((_, t), v) in self.ops.iter_mut().zip(thetas) {
            *t = *v;
        }
    }

    pub fn with_thetas(&self, thetas: &[f64]) -> Self {
        let mut out = self.clone();
        out.set_thetas(thetas);
        out
    }

    pub fn resources(&self) -> ResourceCount {
        ResourceCount::from_excitations(self.excitations())
    }

    /// `|HF⟩` followed by every evolution in order.
    pub fn prepare(&self) -> Result<Statevector> {
        let mut s = Statevector::prepare_hf(self.n_qubits, self.n_electrons)?;
        for (exc, _) in &self.ops {
            exc.check_range(self.n_qubits)?;
        }
        let n = self.n_qubits;
        for (exc, theta) in &self.ops {
            rotate(s.amplitudes_mut(), n, exc, *theta);
        }
        Ok(s)
    }

    /// Text form: a header line then `kind indices… theta` per operator.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# ansatz n_qubits={} n_electrons={}\n",
            self.n_qubits, self.n_electrons
        );
        for (e, t) in &self.ops {
            let _ = writeln!(out, "{e} {t:e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Invalid("empty ansatz file".into()))?;
        let field = |key: &str| -> Result<usize> {
            header
                .split_whitespace()
                .find_map(|t| t.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Invalid(format!("ansatz header lacks {key}")))
        };
        let mut out = Self::hartree_fock(field("n_qubits=")?, field("n_electrons=")?);
        for line in lines {
            let line = line.trim();
            let (exc, theta) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| Error::Invalid(format!("bad ansatz line {line:?}")))?;
            let theta: f64 = theta
                .parse()
                .map_err(|_| Error::Invalid(format!("bad angle in {line:?}")))?;
            let exc: Excitation = exc.parse()?;
            exc.check_range(out.n_qubits)?;
            out.push(exc, theta);
        }
        Ok(out)
    }
}
