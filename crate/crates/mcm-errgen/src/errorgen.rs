//! Elementary error generators (EEGs) in the Pauli transfer representation.
//!
//! The four sectors act on a density operator as
//!
//! * Hamiltonian:      `H_P[rho] = -i (P rho - rho P)`
//! * Pauli-stochastic: `S_P[rho] = P rho P - rho`
//! * correlation:      `C_{P,Q}[rho] = P rho Q + Q rho P - {{P,Q}, rho}/2`
//! * anti-symmetric:   `A_{P,Q}[rho] = i (P rho Q - Q rho P) + i [[P,Q], rho]/2`
//!
//! with P, Q non-identity Paulis and P < Q lexicographically for the pair
//! sectors. The canonical ordering enumerates H, then S, then C, then A, each
//! sector in lexicographic Pauli order: d²-1 each for H and S and
//! (d²-1)(d²-2)/2 each for C and A, totalling d²(d²-1) generators (12 for one
//! qubit, 240 for two).

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{logm, pinv, CMat, RMat};
use crate::pauli::{pauli_index, pauli_label, pauli_matrix, sdim};
use crate::ptm::ptm_from_action;
use crate::{Error, Result};

/// Sector tag of an elementary error generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EegType {
    /// Hamiltonian (coherent) generator.
    H,
    /// Pauli-stochastic generator.
    S,
    /// Correlation (symmetric pair) generator.
    C,
    /// Anti-symmetric pair generator.
    A,
}

impl EegType {
    fn tag(self) -> char {
        match self {
            EegType::H => 'H',
            EegType::S => 'S',
            EegType::C => 'C',
            EegType::A => 'A',
        }
    }
}

/// An elementary error generator: sector plus one or two Pauli indices.
///
/// `p` and `q` are indices into the n-qubit Pauli basis (base-4 digits,
/// I=0, X=1, Y=2, Z=3); `q` is unused for H and S.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Eeg {
    /// Sector.
    pub ty: EegType,
    /// First Pauli index (nonzero).
    pub p: usize,
    /// Second Pauli index (nonzero, > p); 0 for H and S.
    pub q: usize,
}

impl Eeg {
    /// Hamiltonian generator on Pauli `p`.
    pub fn h(p: usize) -> Eeg {
        Eeg { ty: EegType::H, p, q: 0 }
    }

    /// Pauli-stochastic generator on Pauli `p`.
    pub fn s(p: usize) -> Eeg {
        Eeg { ty: EegType::S, p, q: 0 }
    }

    /// Correlation generator on the pair (p, q), p < q.
    pub fn c(p: usize, q: usize) -> Eeg {
        Eeg { ty: EegType::C, p, q }
    }

    /// Anti-symmetric generator on the pair (p, q), p < q.
    pub fn a(p: usize, q: usize) -> Eeg {
        Eeg { ty: EegType::A, p, q }
    }

    /// Canonical text label, e.g. `"H_ZY"`, `"S_IX"`, `"C_IXZZ"`, `"A_XIYI"`.
    /// Pair sectors concatenate both Pauli strings.
    pub fn label(&self, n_qubits: usize) -> String {
        match self.ty {
            EegType::H | EegType::S => {
                format!("{}_{}", self.ty.tag(), pauli_label(n_qubits, self.p))
            }
            EegType::C | EegType::A => format!(
                "{}_{}{}",
                self.ty.tag(),
                pauli_label(n_qubits, self.p),
                pauli_label(n_qubits, self.q)
            ),
        }
    }

    /// Parse a canonical label for a given qubit count.
    pub fn parse(label: &str, n_qubits: usize) -> Result<Eeg> {
        let bad = || Error::UnknownLabel(format!("malformed error-generator label '{label}'"));
        let (tag, rest) = label.split_once('_').ok_or_else(bad)?;
        let ty = match tag {
            "H" => EegType::H,
            "S" => EegType::S,
            "C" => EegType::C,
            "A" => EegType::A,
            _ => return Err(bad()),
        };
        match ty {
            EegType::H | EegType::S => {
                if rest.len() != n_qubits {
                    return Err(bad());
                }
                let p = pauli_index(rest)?;
                if p == 0 {
                    return Err(bad());
                }
                Ok(Eeg { ty, p, q: 0 })
            }
            EegType::C | EegType::A => {
                if rest.len() != 2 * n_qubits {
                    return Err(bad());
                }
                let p = pauli_index(&rest[..n_qubits])?;
                let q = pauli_index(&rest[n_qubits..])?;
                if p == 0 || q == 0 || p >= q {
                    return Err(bad());
                }
                Ok(Eeg { ty, p, q })
            }
        }
    }

    /// The generator's action on a density operator (complex matrix form).
    pub fn action(&self, n_qubits: usize, rho: &CMat) -> CMat {
        let i = Complex64::i();
        let pm = pauli_matrix(n_qubits, self.p);
        match self.ty {
            EegType::H => (&pm * rho - rho * &pm) * (-i),
            EegType::S => &pm * rho * &pm - rho,
            EegType::C => {
                let qm = pauli_matrix(n_qubits, self.q);
                let anti = &pm * &qm + &qm * &pm;
                let half = Complex64::new(0.5, 0.0);
                &pm * rho * &qm + &qm * rho * &pm - (&anti * rho + rho * &anti) * half
            }
            EegType::A => {
                let qm = pauli_matrix(n_qubits, self.q);
                let comm = &pm * &qm - &qm * &pm;
                (&pm * rho * &qm - &qm * rho * &pm) * i + (&comm * rho + rho * &comm) * (i * 0.5)
            }
        }
    }

    /// The generator's PTM (superoperator matrix in the normalized Pauli
    /// basis). Its first row is always zero (trace annihilation).
    pub fn matrix(&self, n_qubits: usize) -> RMat {
        ptm_from_action(n_qubits, |rho| self.action(n_qubits, rho))
    }
}

/// All elementary error generators on `n_qubits` in canonical order:
/// H (lexicographic), S, C (pairs p < q lexicographic in (p, q)), A.
pub fn all_eegs(n_qubits: usize) -> Vec<Eeg> {
    let s = sdim(n_qubits);
    let mut out = Vec::with_capacity(s * s);
    for p in 1..s {
        out.push(Eeg::h(p));
    }
    for p in 1..s {
        out.push(Eeg::s(p));
    }
    for p in 1..s {
        for q in (p + 1)..s {
            out.push(Eeg::c(p, q));
        }
    }
    for p in 1..s {
        for q in (p + 1)..s {
            out.push(Eeg::a(p, q));
        }
    }
    out
}

/// Stack of all EEG PTMs as columns of a (d²·d²) x n_eeg matrix, plus its
/// pseudo-inverse, cached per qubit count.
struct EegFrame {
    eegs: Vec<Eeg>,
    columns: RMat,
    pinv: RMat,
}

fn frame(n_qubits: usize) -> &'static EegFrame {
    static FRAMES: [OnceLock<EegFrame>; 2] = [OnceLock::new(), OnceLock::new()];
    assert!(
        (1..=2).contains(&n_qubits),
        "error-generator projection supports 1 or 2 qubits"
    );
    FRAMES[n_qubits - 1].get_or_init(|| {
        let eegs = all_eegs(n_qubits);
        let s = sdim(n_qubits);
        let mut columns = RMat::zeros(s * s, eegs.len());
        for (j, eeg) in eegs.iter().enumerate() {
            let m = eeg.matrix(n_qubits);
            for r in 0..s {
                for c in 0..s {
                    columns[(r * s + c, j)] = m[(r, c)];
                }
            }
        }
        let pinv = pinv(&columns, 1e-12);
        EegFrame { eegs, columns, pinv }
    })
}

/// Expand an error generator (PTM superoperator, first row ~ 0) in the EEG
/// basis. Returns rates in canonical EEG order plus the residual Frobenius
/// norm after reconstruction (0 for any trace-annihilating generator, since
/// the EEGs span that space).
pub fn project_onto_eegs(n_qubits: usize, gen: &RMat) -> (Vec<f64>, f64) {
    let fr = frame(n_qubits);
    let s = sdim(n_qubits);
    assert_eq!(gen.nrows(), s);
    assert_eq!(gen.ncols(), s);
    let mut v = nalgebra::DVector::zeros(s * s);
    for r in 0..s {
        for c in 0..s {
            v[r * s + c] = gen[(r, c)];
        }
    }
    let rates = &fr.pinv * &v;
    let recon = &fr.columns * &rates;
    let residual = (&recon - &v).norm();
    (rates.iter().copied().collect(), residual)
}

/// Reassemble a generator PTM from canonical-order EEG rates.
pub fn generator_from_rates(n_qubits: usize, rates: &[f64]) -> RMat {
    let fr = frame(n_qubits);
    assert_eq!(rates.len(), fr.eegs.len());
    let s = sdim(n_qubits);
    let v = &fr.columns * nalgebra::DVector::from_column_slice(rates);
    let mut out = RMat::zeros(s, s);
    for r in 0..s {
        for c in 0..s {
            out[(r, c)] = v[r * s + c];
        }
    }
    out
}

/// Rates as a label -> rate map in canonical order (order preserved by the
/// returned Vec of pairs; zero rates below `min_abs` are omitted).
pub fn rates_to_labeled(n_qubits: usize, rates: &[f64], min_abs: f64) -> Vec<(String, f64)> {
    let fr = frame(n_qubits);
    fr.eegs
        .iter()
        .zip(rates)
        .filter(|(_, &r)| r.abs() >= min_abs)
        .map(|(e, &r)| (e.label(n_qubits), r))
        .collect()
}

/// Map a process PTM to its error generator: `L = logm(G · G_target^{-1})`.
/// With `target` = identity this is the plain matrix logarithm.
pub fn process_to_generator(g: &RMat, target: &RMat) -> Result<RMat> {
    let tinv = target
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::LogmFailed("singular target PTM".into()))?;
    logm(&(g * tinv))
}

/// Map an error generator back to a process PTM: `G = expm(L) · G_target`.
pub fn generator_to_process(l: &RMat, target: &RMat) -> RMat {
    let n = l.nrows();
    let e = DMatrix::from_fn(n, n, |r, c| l[(r, c)]).exp();
    e * target
}
