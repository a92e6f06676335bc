//! Quantum instruments for a single-qubit mid-circuit measurement.
//!
//! An instrument is a pair of completely positive maps `{Q_0, Q_1}` — one per
//! measurement outcome — whose **sum** is trace preserving. Applied to a
//! state `ρ`, outcome `c` occurs with probability `Tr(Q_c[ρ])` and leaves the
//! (normalized) state `Q_c[ρ]/Tr(Q_c[ρ])`.
//!
//! The ideal instrument of a computational-basis measurement is
//! `Q̄_c = |c⟩⟩⟨⟨c|`: project onto `|c⟩⟨c|` and renormalize.

use nalgebra::{Matrix4, Vector4};

use crate::linalg::RMat;
use crate::ptm::{check_tp, choi_from_ptm, ground_state_vec, min_choi_eigenvalue, z_effect_vec};
use crate::{Error, Result};

/// Convert a 4×4 dynamic matrix into a fixed-size `Matrix4`.
pub fn to_matrix4(m: &RMat) -> Matrix4<f64> {
    assert_eq!((m.nrows(), m.ncols()), (4, 4), "expected a 4×4 matrix");
    Matrix4::from_fn(|i, j| m[(i, j)])
}

/// Convert a fixed-size `Matrix4` into a dynamic matrix.
pub fn to_dmatrix(m: &Matrix4<f64>) -> RMat {
    RMat::from_fn(4, 4, |i, j| m[(i, j)])
}

/// A two-outcome quantum instrument in PTM representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    /// Outcome maps `[Q_0, Q_1]`, each a 4×4 PTM (CP, trace non-increasing).
    pub q: [Matrix4<f64>; 2],
}

impl Instrument {
    /// The ideal instrument `Q̄_c = |c⟩⟩⟨⟨c|`.
    pub fn ideal() -> Self {
        let q = [0, 1].map(|c| {
            let ket = if c == 0 {
                ground_state_vec()
            } else {
                crate::ptm::state_vec(&crate::ptm::basis_state(1))
            };
            let bra = z_effect_vec(c);
            let k = Vector4::from_fn(|i, _| ket[i]);
            let b = Vector4::from_fn(|i, _| bra[i]);
            k * b.transpose()
        });
        Instrument { q }
    }

    /// Construct from outcome-map PTMs without validation.
    pub fn from_parts(q0: Matrix4<f64>, q1: Matrix4<f64>) -> Self {
        Instrument { q: [q0, q1] }
    }

    /// The total (outcome-summed) channel `Q_0 + Q_1`.
    pub fn total(&self) -> Matrix4<f64> {
        self.q[0] + self.q[1]
    }

    /// Deviation pair `{ΔQ_0, ΔQ_1}` from the ideal instrument.
    pub fn deviation(&self) -> [Matrix4<f64>; 2] {
        let ideal = Self::ideal();
        [self.q[0] - ideal.q[0], self.q[1] - ideal.q[1]]
    }

    /// Probability of outcome `c` on the (PTM-vector) state `r`.
    pub fn outcome_probability(&self, c: usize, r: &Vector4<f64>) -> f64 {
        // Tr(Q_c[ρ]) = ⟨⟨I|Q_c|ρ⟩⟩ with ⟨⟨I| = √2 (1,0,0,0).
        let out = self.q[c] * r;
        out[0] * 2f64.sqrt()
    }

    /// Validate CP of each outcome map and TP of the sum.
    pub fn validate(&self, cp_tol: f64, tp_tol: f64) -> Result<()> {
        for c in 0..2 {
            let min_eig = min_choi_eigenvalue(&to_dmatrix(&self.q[c]));
            if min_eig < -cp_tol {
                return Err(Error::NotCompletelyPositive(min_eig));
            }
        }
        check_tp(&to_dmatrix(&self.total()), tp_tol)
    }

    /// Minimum Choi eigenvalue across the two outcome maps.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        (0..2)
            .map(|c| min_choi_eigenvalue(&to_dmatrix(&self.q[c])))
            .fold(f64::INFINITY, f64::min)
    }

    /// Choi matrices of the two outcome maps.
    pub fn choi(&self) -> [crate::linalg::CMat; 2] {
        [0, 1].map(|c| choi_from_ptm(&to_dmatrix(&self.q[c])))
    }
}
