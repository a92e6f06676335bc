//! The measurement gadget: a two-qubit circuit-level model of a mid-circuit
//! measurement, and the "crunch" map that compresses a two-qubit process
//! acting on (physical ⊗ virtual) into a one-qubit quantum instrument.
//!
//! The gadget prepares the virtual qubit in |0>, entangles with a CNOT
//! (physical control, virtual target), lets a two-qubit process `E` act, and
//! reads the virtual qubit out in the Z basis:
//!
//! ```text
//! Q_c(E) = Project_c · E · CNOT · Inject        (a 4x4 PTM per outcome c)
//! ```
//!
//! `crunch(identity)` reproduces the ideal projective instrument. Because the
//! map is linear in `E`, a process `exp(ε L)` crunches to
//! `Q̄_c + ε·Λ_c(L) + O(ε²)` where `Λ_c(L) = Project_c · L · CNOT · Inject`
//! is the first-order deviation of the error generator `L`.

use std::sync::OnceLock;

use nalgebra::Matrix4;

use crate::errorgen::{all_eegs, Eeg};
use crate::instrument::{to_matrix4, Instrument};
use crate::linalg::RMat;
use crate::ptm;

/// The fixed gadget tensors.
pub struct GadgetFixture {
    /// CNOT PTM on (physical ⊗ virtual), physical qubit is the control.
    pub cnot: RMat,
    /// 16x4 injection: one-qubit state coordinates -> two-qubit coordinates
    /// with the virtual qubit prepared in |0>.
    pub inject: RMat,
    /// 4x16 projections: partial trace against the virtual-qubit effect
    /// |c><c| for outcomes c = 0, 1.
    pub project: [RMat; 2],
    /// CNOT · Inject, the 16x4 entangling preparation.
    pub entangle: RMat,
}

/// The gadget tensors (built once).
pub fn fixture() -> &'static GadgetFixture {
    static FIXTURE: OnceLock<GadgetFixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let s0 = ptm::ground_state_vec(); // (1,0,0,1)/√2
        let mut inject = RMat::zeros(16, 4);
        for p in 0..4 {
            for v in 0..4 {
                inject[(4 * p + v, p)] = s0[v];
            }
        }
        let mut project = [RMat::zeros(4, 16), RMat::zeros(4, 16)];
        for c in 0..2 {
            let eff = ptm::z_effect_vec(c); // (1,0,0,±1)/√2
            for p in 0..4 {
                for v in 0..4 {
                    project[c][(p, 4 * p + v)] = eff[v];
                }
            }
        }
        let cnot = ptm::cnot_ptm();
        let entangle = &cnot * &inject;
        GadgetFixture {
            cnot,
            inject,
            project,
            entangle,
        }
    })
}

/// Crunch a two-qubit process PTM (16x16) into a one-qubit instrument.
pub fn crunch(e: &RMat) -> Instrument {
    let fx = fixture();
    let right = e * &fx.entangle;
    Instrument {
        q: [
            to_matrix4(&(&fx.project[0] * &right)),
            to_matrix4(&(&fx.project[1] * &right)),
        ],
    }
}

/// First-order deviation of a two-qubit error generator (16x16 PTM):
/// `Λ_c = Project_c · L · CNOT · Inject`.
pub fn generator_deviation(l: &RMat) -> [Matrix4<f64>; 2] {
    let fx = fixture();
    let right = l * &fx.entangle;
    [
        to_matrix4(&(&fx.project[0] * &right)),
        to_matrix4(&(&fx.project[1] * &right)),
    ]
}

/// First-order deviation of the `idx`-th elementary error generator in
/// canonical order (0..240).
pub fn first_order_deviation(idx: usize) -> [Matrix4<f64>; 2] {
    let eegs = all_eegs(2);
    eeg_deviation(&eegs[idx])
}

/// First-order deviation of a specific elementary error generator.
pub fn eeg_deviation(eeg: &Eeg) -> [Matrix4<f64>; 2] {
    generator_deviation(&eeg.matrix(2))
}

/// The linearized crunch as a cached 32x256 matrix: rows index the stacked
/// deviation pair (c·16 + 4·row + col, row-major within each Q_c), columns
/// index the generator entries (16·i + j, row-major).
pub fn deviation_map() -> &'static RMat {
    static MAP: OnceLock<RMat> = OnceLock::new();
    MAP.get_or_init(|| {
        let fx = fixture();
        let mut d = RMat::zeros(32, 256);
        for c in 0..2 {
            for r in 0..4 {
                for s in 0..4 {
                    let row = c * 16 + r * 4 + s;
                    for i in 0..16 {
                        for j in 0..16 {
                            d[(row, 16 * i + j)] = fx.project[c][(r, i)] * fx.entangle[(j, s)];
                        }
                    }
                }
            }
        }
        d
    })
}

/// Flatten a deviation pair in the row ordering of [`deviation_map`].
pub fn vec32(dev: &[Matrix4<f64>; 2]) -> nalgebra::DVector<f64> {
    let mut v = nalgebra::DVector::zeros(32);
    for c in 0..2 {
        for r in 0..4 {
            for s in 0..4 {
                v[c * 16 + r * 4 + s] = dev[c][(r, s)];
            }
        }
    }
    v
}

/// CSV dump of a deviation pair (columns: element, row, col, value) for
/// external inspection.
pub fn deviation_to_csv(dev: &[Matrix4<f64>; 2]) -> String {
    let mut out = String::from("element,row,col,value\n");
    for (c, m) in dev.iter().enumerate() {
        for r in 0..4 {
            for s in 0..4 {
                out.push_str(&format!("Q{c},{r},{s},{:.17e}\n", m[(r, s)]));
            }
        }
    }
    out
}
