//! Pauli transfer matrices (PTMs), Choi matrices, and standard channels.
//!
//! A linear map `E` on `n`-qubit operators is represented by the real matrix
//! `[E]_{kl} = Tr(σ̂_k E[σ̂_l]) = (1/d) Tr(σ_k E[σ_l])` in the normalized
//! Pauli basis `σ̂_k = σ_k/√d`. States are column vectors
//! `|ρ⟩⟩_k = Tr(σ̂_k ρ)` and POVM effects are row vectors
//! `⟨⟨E|_k = Tr(σ̂_k E)`, so that `⟨⟨E|ρ⟩⟩ = Tr(Eρ)` and maps compose by
//! matrix multiplication.
//!
//! The Choi matrix convention is **output ⊗ input**:
//! `J(E) = Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j| = Σ_kl [E]_{kl} σ̂_k ⊗ σ̂_lᵀ`.
//! `E` is completely positive iff `J ⪰ 0` and trace preserving iff
//! `Tr_out J = I` (partial trace over the first factor).

use num_complex::Complex64;

use crate::linalg::{min_hermitian_eigenvalue, CMat, RMat, RVec};
use crate::pauli::{dim, pauli_matrix, pauli_normalized, sdim};
use crate::{Error, Result};

/// Tolerance used for complete-positivity checks (minimum Choi eigenvalue).
pub const CP_TOL: f64 = 1e-10;

/// Build the PTM of a linear, Hermiticity-preserving map given its action on
/// density-like operators. `f` receives each (unnormalized) Pauli `σ_l` and
/// must return `E[σ_l]`.
pub fn ptm_from_action(n_qubits: usize, mut f: impl FnMut(&CMat) -> CMat) -> RMat {
    let nn = sdim(n_qubits);
    let d = dim(n_qubits) as f64;
    let mut g = RMat::zeros(nn, nn);
    for l in 0..nn {
        let sl = pauli_matrix(n_qubits, l);
        let out = f(&sl);
        for k in 0..nn {
            let sk = pauli_matrix(n_qubits, k);
            let val = (&sk * &out).diagonal().sum() / Complex64::new(d, 0.0);
            debug_assert!(
                val.im.abs() < 1e-9,
                "PTM entry has imaginary part {:.3e}; map is not Hermiticity-preserving",
                val.im
            );
            g[(k, l)] = val.re;
        }
    }
    g
}

/// PTM of the channel `ρ ↦ Σ_i K_i ρ K_i†` given its Kraus operators.
pub fn ptm_from_kraus(n_qubits: usize, kraus: &[CMat]) -> RMat {
    ptm_from_action(n_qubits, |s| {
        let mut out = CMat::zeros(s.nrows(), s.ncols());
        for k in kraus {
            out += k * s * k.adjoint();
        }
        out
    })
}

/// PTM of the unitary conjugation `ρ ↦ U ρ U†`.
pub fn ptm_unitary(u: &CMat) -> RMat {
    let n = u.nrows().trailing_zeros() as usize;
    assert_eq!(u.nrows(), dim(n), "unitary dimension must be a power of 2");
    ptm_from_kraus(n, std::slice::from_ref(u))
}

/// State vector `|ρ⟩⟩` of a density operator in the normalized Pauli basis.
pub fn state_vec(rho: &CMat) -> RVec {
    let n = rho.nrows().trailing_zeros() as usize;
    let nn = sdim(n);
    RVec::from_fn(nn, |k, _| {
        (pauli_normalized(n, k) * rho).diagonal().sum().re
    })
}

/// Effect (row) vector `⟨⟨E|` of a POVM element in the normalized Pauli
/// basis, returned as a column vector; use `effect.dot(&state)` for `Tr(Eρ)`.
pub fn effect_vec(e: &CMat) -> RVec {
    state_vec(e)
}

/// Choi matrix of a PTM: `J = Σ_kl [E]_{kl} σ̂_k ⊗ σ̂_lᵀ` (output ⊗ input).
pub fn choi_from_ptm(g: &RMat) -> CMat {
    let nn = g.nrows();
    let n = (nn.trailing_zeros() / 2) as usize;
    let d = dim(n);
    let mut j = CMat::zeros(d * d, d * d);
    for k in 0..nn {
        for l in 0..nn {
            if g[(k, l)] == 0.0 {
                continue;
            }
            let sk = pauli_normalized(n, k);
            let slt = pauli_normalized(n, l).transpose();
            j += sk.kronecker(&slt) * Complex64::new(g[(k, l)], 0.0);
        }
    }
    j
}

/// PTM from a Choi matrix (inverse of [`choi_from_ptm`]).
pub fn ptm_from_choi(j: &CMat) -> RMat {
    let dd = j.nrows();
    let d = (dd as f64).sqrt().round() as usize;
    let n = d.trailing_zeros() as usize;
    let nn = sdim(n);
    let mut g = RMat::zeros(nn, nn);
    for k in 0..nn {
        let sk = pauli_normalized(n, k);
        for l in 0..nn {
            let slt = pauli_normalized(n, l).transpose();
            let basis = sk.kronecker(&slt);
            let val = (basis.adjoint() * j).diagonal().sum();
            debug_assert!(val.im.abs() < 1e-9, "non-Hermitian Choi pairing");
            g[(k, l)] = val.re;
        }
    }
    g
}

/// Minimum eigenvalue of the Choi matrix of `g` (≥ `-CP_TOL` ⟺ CP).
pub fn min_choi_eigenvalue(g: &RMat) -> f64 {
    min_hermitian_eigenvalue(&choi_from_ptm(g))
}

/// Check complete positivity of a PTM within `tol` on the minimum Choi
/// eigenvalue.
pub fn check_cp(g: &RMat, tol: f64) -> Result<()> {
    let min_eig = min_choi_eigenvalue(g);
    if min_eig < -tol {
        Err(Error::NotCompletelyPositive(min_eig))
    } else {
        Ok(())
    }
}

/// Deviation of the top PTM row from `(1, 0, …, 0)`; zero ⟺ trace
/// preserving.
pub fn tp_deviation(g: &RMat) -> f64 {
    let mut dev: f64 = (g[(0, 0)] - 1.0).abs();
    for l in 1..g.ncols() {
        dev = dev.max(g[(0, l)].abs());
    }
    dev
}

/// Check trace preservation of a PTM within `tol`.
pub fn check_tp(g: &RMat, tol: f64) -> Result<()> {
    let dev = tp_deviation(g);
    if dev > tol {
        Err(Error::NotTracePreserving(dev))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Standard single-qubit states, effects, unitaries, and channels.
// ---------------------------------------------------------------------------

/// Computational-basis state `|b⟩⟨b|` as a 2×2 density matrix.
pub fn basis_state(b: usize) -> CMat {
    let mut rho = CMat::zeros(2, 2);
    rho[(b, b)] = Complex64::new(1.0, 0.0);
    rho
}

/// `|0⟩⟨0|` state vector: `(1, 0, 0, 1)/√2`.
pub fn ground_state_vec() -> RVec {
    state_vec(&basis_state(0))
}

/// Computational-basis effect vectors `⟨⟨E_b|` for `b ∈ {0, 1}`.
pub fn z_effect_vec(b: usize) -> RVec {
    effect_vec(&basis_state(b))
}

/// Single-qubit rotation `exp(-i θ σ_a / 2)` for Pauli axis `a ∈ {1,2,3}`.
pub fn rotation_unitary(axis: usize, theta: f64) -> CMat {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let ms = Complex64::new(0.0, -(theta / 2.0).sin());
    CMat::identity(2, 2) * c + pauli_matrix(1, axis) * ms
}

/// Rotation about a general Pauli string: `exp(-i θ P / 2)` where `P` is the
/// `n`-qubit Pauli with index `k`. Uses `P² = I`.
pub fn pauli_rotation_unitary(n_qubits: usize, k: usize, theta: f64) -> CMat {
    let d = dim(n_qubits);
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let ms = Complex64::new(0.0, -(theta / 2.0).sin());
    CMat::identity(d, d) * c + pauli_matrix(n_qubits, k) * ms
}

/// PTM of the depolarizing channel `ρ ↦ (1-p) ρ + p I/2`.
pub fn depolarizing_ptm(p: f64) -> RMat {
    RMat::from_diagonal(&RVec::from_vec(vec![1.0, 1.0 - p, 1.0 - p, 1.0 - p]))
}

/// PTM of amplitude damping (`|1⟩ → |0⟩` with probability `gamma`).
pub fn amplitude_damping_ptm(gamma: f64) -> RMat {
    let s = (1.0 - gamma).sqrt();
    RMat::from_row_slice(
        4,
        4,
        &[
            1.0,
            0.0,
            0.0,
            0.0,
            0.0,
            s,
            0.0,
            0.0,
            0.0,
            0.0,
            s,
            0.0,
            gamma,
            0.0,
            0.0,
            1.0 - gamma,
        ],
    )
}

/// PTM of thermal excitation (`|0⟩ → |1⟩` with probability `gamma`).
pub fn thermal_excitation_ptm(gamma: f64) -> RMat {
    let s = (1.0 - gamma).sqrt();
    RMat::from_row_slice(
        4,
        4,
        &[
            1.0,
            0.0,
            0.0,
            0.0,
            0.0,
            s,
            0.0,
            0.0,
            0.0,
            0.0,
            s,
            0.0,
            -gamma,
            0.0,
            0.0,
            1.0 - gamma,
        ],
    )
}

/// PTM of pure dephasing: off-diagonal coherences shrink by `1 - lambda`.
pub fn dephasing_ptm(lambda: f64) -> RMat {
    RMat::from_diagonal(&RVec::from_vec(vec![
        1.0,
        1.0 - lambda,
        1.0 - lambda,
        1.0,
    ]))
}

/// CNOT unitary with the **first** factor as control and the second as
/// target (basis order `|00⟩, |01⟩, |10⟩, |11⟩`).
pub fn cnot_unitary() -> CMat {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    CMat::from_row_slice(
        4,
        4,
        &[
            l, o, o, o, //
            o, l, o, o, //
            o, o, o, l, //
            o, o, l, o,
        ],
    )
}

/// PTM (16×16) of the CNOT with first factor as control.
pub fn cnot_ptm() -> RMat {
    ptm_unitary(&cnot_unitary())
}
