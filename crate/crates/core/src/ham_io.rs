//! FCIDUMP ingestion and assembly of the spin-orbital electronic Hamiltonian.
//!
//! Integrals are read in chemists' notation over spatial orbitals (1-based, as
//! written in the file) and expanded to spin-orbitals with the interleaved
//! ordering `p = 2·(i − 1) + σ`, σ = 0 for α and 1 for β. With that ordering the
//! closed-shell Hartree–Fock determinant is the lowest-`n` bit mask.
//!
//! The assembled [`MolecularHamiltonian`] stores the coefficients of
//!
//! ```text
//! H = E_core + Σ h_pq a†_p a_q + Σ h_pqrs a†_p a†_r a_s a_q
//! ```
//!
//! where `h_pqrs = ½ (pq|rs)` carries the factor from the double-counted sum.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Canonical key of a two-electron integral under 8-fold permutational symmetry.
pub type TwoBodyKey = [usize; 4];

fn canonical_pair(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Lexicographically smallest of the 8 index tuples equivalent to `(ij|kl)`.
pub fn canonical_two_body(i: usize, j: usize, k: usize, l: usize) -> TwoBodyKey {
    let a = canonical_pair(i, j);
    let b = canonical_pair(k, l);
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    [a.0, a.1, b.0, b.1]
}

/// Reference energies carried by fixture files as `# REF_HF=` / `# REF_FCI=` comments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct References {
    pub hf: Option<f64>,
    pub fci: Option<f64>,
}

/// Raw contents of an FCIDUMP file.
#[derive(Clone, Debug, PartialEq)]
pub struct FcidumpData {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub core_energy: f64,
    /// Keyed by `(min(i, j), max(i, j))`, 1-based spatial indices.
    pub one_body: BTreeMap<(usize, usize), f64>,
    /// Keyed by [`canonical_two_body`], 1-based spatial indices.
    pub two_body: BTreeMap<TwoBodyKey, f64>,
    pub references: References,
}

impl FcidumpData {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_fcidump(&text)
    }

    /// `h(i, j)`, 1-based; zero when absent.
    pub fn one_body(&self, i: usize, j: usize) -> f64 {
        self.one_body
            .get(&canonical_pair(i, j))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(ij|kl)`, 1-based chemists' notation; zero when absent.
    pub fn two_body(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.two_body
            .get(&canonical_two_body(i, j, k, l))
            .copied()
            .unwrap_or(0.0)
    }

    /// Serialize back to FCIDUMP text. Values are written in shortest
    /// round-trip form, so re-parsing reproduces every stored value exactly.
    pub fn to_fcidump_string(&self) -> String {
        let mut out = String::new();
        if let Some(hf) = self.references.hf {
            let _ = writeln!(out, "# REF_HF={hf:e}");
        }
        if let Some(fci) = self.references.fci {
            let _ = writeln!(out, "# REF_FCI={fci:e}");
        }
        let _ = writeln!(
            out,
            " &FCI NORB={},NELEC={},MS2={},\n &END",
            self.norb, self.nelec, self.ms2
        );
        for (&[i, j, k, l], v) in &self.two_body {
            let _ = writeln!(out, "{v:e} {i} {j} {k} {l}");
        }
        for (&(i, j), v) in &self.one_body {
            let _ = writeln!(out, "{v:e} {i} {j} 0 0");
        }
        let _ = writeln!(out, "{:e} 0 0 0 0", self.core_energy);
        out
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token
        .replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("malformed number {token:?}"),
        })
}

fn parse_index(token: &str, line: usize, norb: usize) -> Result<usize> {
    let idx: usize = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("malformed index {token:?}"),
    })?;
    if idx > norb {
        return Err(Error::Parse {
            line,
            msg: format!("index {idx} outside [0, {norb}]"),
        });
    }
    Ok(idx)
}

fn parse_reference(comment: &str, refs: &mut References) {
    let comment = comment.trim_start_matches('#').trim();
    let (slot, value) = if let Some(v) = comment.strip_prefix("REF_HF=") {
        (&mut refs.hf, v)
    } else if let Some(v) = comment.strip_prefix("REF_FCI=") {
        (&mut refs.fci, v)
    } else {
        return;
    };
    if let Ok(v) = value.trim().parse() {
        *slot = Some(v);
    }
}

/// Parse FCIDUMP text.
///
/// `#` lines are comments; `# REF_HF=` and `# REF_FCI=` are picked up as
/// [`References`]. ORBSYM/ISYM and unknown namelist keys are ignored, as are
/// orbital-energy records (`e i 0 0 0`).
pub fn parse_fcidump(text: &str) -> Result<FcidumpData> {
    let mut refs = References::default();
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));

    // Namelist: from `&FCI` up to `&END` or `/`.
    let mut namelist = String::new();
    let mut started = false;
    for (lineno, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.starts_with('#') {
            parse_reference(line, &mut refs);
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut body = line;
        if !started {
            let upper = body.to_ascii_uppercase();
            if !upper.starts_with("&FCI") {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "expected &FCI namelist".into(),
                });
            }
            started = true;
            body = &body[4..];
        }
        let upper = body.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END").or_else(|| upper.find('/')) {
            namelist.push_str(&body[..pos]);
            namelist.push(' ');
            break;
        }
        namelist.push_str(body);
        namelist.push(' ');
    }
    if !started {
        return Err(Error::Parse {
            line: 1,
            msg: "no &FCI namelist found".into(),
        });
    }

    let mut keys: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for token in namelist.split(|c: char| c == ',' || c.is_whitespace()) {
        if token.is_empty() {
            continue;
        }
        if let Some((key, rest)) = token.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            let entry = keys.entry(key.clone()).or_default();
            if !rest.is_empty() {
                entry.push(rest.to_string());
            }
            current = Some(key);
        } else if let Some(key) = &current {
            keys.entry(key.clone()).or_default().push(token.to_string());
        }
    }
    let scalar = |name: &'static str| -> Result<i64> {
        let v = keys
            .get(name)
            .and_then(|v| v.first())
            .ok_or(Error::MissingKey(name))?;
        v.parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("namelist value {name}={v:?} is not an integer"),
        })
    };
    let norb = scalar("NORB")?;
    let nelec = scalar("NELEC")?;
    let ms2 = scalar("MS2")?;
    if norb < 1 || nelec < 0 || nelec > 2 * norb {
        return Err(Error::Invalid(format!(
            "NORB={norb} NELEC={nelec} is not a valid electron/orbital count"
        )));
    }
    let norb = norb as usize;

    let mut data = FcidumpData {
        norb,
        nelec: nelec as usize,
        ms2,
        core_energy: 0.0,
        one_body: BTreeMap::new(),
        two_body: BTreeMap::new(),
        references: refs,
    };

    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            parse_reference(line, &mut data.references);
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `value i j k l`, got {} fields", tokens.len()),
            });
        }
        let value = parse_number(tokens[0], lineno)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&tokens[1..]) {
            *slot = parse_index(tok, lineno, norb)?;
        }
        match idx {
            [0, 0, 0, 0] => data.core_energy = value,
            [i, j, 0, 0] if i != 0 && j != 0 => {
                data.one_body.insert(canonical_pair(i, j), value);
            }
            [i, j, k, l] if i != 0 && j != 0 && k != 0 && l != 0 => {
                data.two_body.insert(canonical_two_body(i, j, k, l), value);
            }
            [_, 0, 0, 0] => {} // orbital energy
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unsupported index pattern {idx:?}"),
                })
            }
        }
    }
    Ok(data)
}

/// Second-quantized Hamiltonian over `N = 2·norb` interleaved spin-orbitals.
#[derive(Clone, Debug)]
pub struct MolecularHamiltonian {
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub core_energy: f64,
    /// `h_pq`, real symmetric N×N.
    pub one_body: DMatrix<f64>,
    two_body: Vec<f64>,
    pub references: References,
}

impl MolecularHamiltonian {
    /// Build directly from spin-orbital arrays; `two_body` is row-major
    /// `[p][q][r][s]` holding the coefficient of `a†_p a†_r a_s a_q`.
    pub fn from_parts(
        n_electrons: usize,
        core_energy: f64,
        one_body: DMatrix<f64>,
        two_body: Vec<f64>,
    ) -> Result<Self> {
        let n = one_body.nrows();
        if one_body.ncols() != n || two_body.len() != n.pow(4) {
            return Err(Error::Invalid("integral array shapes disagree".into()));
        }
        if n_electrons > n {
            return Err(Error::TooManyElectrons {
                n_electrons,
                n_qubits: n,
            });
        }
        Ok(Self {
            n_spin_orbitals: n,
            n_electrons,
            core_energy,
            one_body,
            two_body,
            references: References::default(),
        })
    }

    #[inline]
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.one_body[(p, q)]
    }

    /// Coefficient of `a†_p a†_r a_s a_q`.
    #[inline]
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spin_orbitals;
        self.two_body[((p * n + q) * n + r) * n + s]
    }

    /// Spin-orbital chemists' integral `(pq|rs) = 2·h_pqrs`.
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        2.0 * self.h2(p, q, r, s)
    }

    /// Occupation mask of the Hartree–Fock determinant (lowest `n` bits).
    pub fn hf_mask(&self) -> u64 {
        (1u64 << self.n_electrons) - 1
    }
}

/// Expand spatial-orbital FCIDUMP integrals to interleaved spin-orbitals.
pub fn to_spin_orbital(f: &FcidumpData) -> MolecularHamiltonian {
    let n = 2 * f.norb;
    let spatial = |p: usize| p / 2 + 1;
    let spin = |p: usize| p % 2;

    let mut one_body = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            if spin(p) == spin(q) {
                one_body[(p, q)] = f.one_body(spatial(p), spatial(q));
            }
        }
    }

    let mut two_body = vec![0.0; n.pow(4)];
    for p in 0..n {
        for q in (0..n).filter(|&q| spin(q) == spin(p)) {
            for r in 0..n {
                for s in (0..n).filter(|&s| spin(s) == spin(r)) {
                    two_body[((p * n + q) * n + r) * n + s] =
                        0.5 * f.two_body(spatial(p), spatial(q), spatial(r), spatial(s));
                }
            }
        }
    }

    MolecularHamiltonian {
        n_spin_orbitals: n,
        n_electrons: f.nelec,
        core_energy: f.core_energy,
        one_body,
        two_body,
        references: f.references,
    }
}
