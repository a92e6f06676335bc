//! Pauli operators and the normalized Pauli (superoperator) basis.
//!
//! Conventions used throughout the crate:
//! - Single-qubit Paulis are indexed `0..4` in the order `I, X, Y, Z`.
//! - `n`-qubit Pauli strings are indexed lexicographically: the index of a
//!   string is read base-4 with the **first** tensor factor as the most
//!   significant digit. For two qubits the order is
//!   `II, IX, IY, IZ, XI, ..., ZZ` and `index = 4*first + second`.
//! - In the two-qubit measurement gadget the *physical* (data) qubit is the
//!   first tensor factor and the *virtual* (readout) qubit is the second, so
//!   a label like `XZ` means `X` on the physical qubit and `Z` on the virtual
//!   qubit, with matrix `kron(X, Z)`.
//! - The superoperator basis is the *normalized* Pauli basis
//!   `σ̂_k = σ_k / √d`, orthonormal under the Hilbert–Schmidt inner product.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Complex matrix alias used for operator-level (Hilbert-space) objects.
pub type CMat = DMatrix<Complex64>;

const PAULI_CHARS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Hilbert-space dimension `d = 2^n` for `n` qubits.
pub const fn dim(n_qubits: usize) -> usize {
    1 << n_qubits
}

/// Superoperator dimension `d² = 4^n` for `n` qubits.
pub const fn sdim(n_qubits: usize) -> usize {
    1 << (2 * n_qubits)
}

/// The single-qubit Pauli matrix with index `k` (`0..4` ⟶ `I, X, Y, Z`).
///
/// # Panics
/// Panics if `k >= 4`.
pub fn pauli_1q(k: usize) -> CMat {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => CMat::from_row_slice(2, 2, &[l, o, o, l]),
        1 => CMat::from_row_slice(2, 2, &[o, l, l, o]),
        2 => CMat::from_row_slice(2, 2, &[o, -i, i, o]),
        3 => CMat::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("Pauli index out of range: {k}"),
    }
}

/// The `n`-qubit Pauli string with lexicographic index `k` (`0 <= k < 4^n`),
/// as an unnormalized `2^n × 2^n` matrix.
///
/// # Panics
/// Panics if `k >= 4^n`.
pub fn pauli_matrix(n_qubits: usize, k: usize) -> CMat {
    assert!(k < sdim(n_qubits), "Pauli index out of range: {k}");
    let mut m = CMat::identity(1, 1);
    // Most significant base-4 digit = first tensor factor.
    for q in 0..n_qubits {
        let digit = (k >> (2 * (n_qubits - 1 - q))) & 3;
        m = m.kronecker(&pauli_1q(digit));
    }
    m
}

/// Normalized Pauli `σ̂_k = σ_k / √d`; these are orthonormal under the
/// Hilbert–Schmidt inner product `⟨A, B⟩ = Tr(A†B)`.
pub fn pauli_normalized(n_qubits: usize, k: usize) -> CMat {
    let d = dim(n_qubits) as f64;
    pauli_matrix(n_qubits, k) * Complex64::new(1.0 / d.sqrt(), 0.0)
}

/// The label of the Pauli string with index `k`, e.g. `"XZ"` for two qubits.
pub fn pauli_label(n_qubits: usize, k: usize) -> String {
    assert!(k < sdim(n_qubits), "Pauli index out of range: {k}");
    (0..n_qubits)
        .map(|q| PAULI_CHARS[(k >> (2 * (n_qubits - 1 - q))) & 3])
        .collect()
}

/// Parse a Pauli-string label such as `"Z"` or `"xz"` into its index.
/// The number of qubits is the label length.
pub fn pauli_index(label: &str) -> Result<usize> {
    if label.is_empty() {
        return Err(Error::UnknownLabel("empty Pauli label".into()));
    }
    let mut k = 0usize;
    for ch in label.chars() {
        let digit = match ch.to_ascii_uppercase() {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            'Z' => 3,
            _ => return Err(Error::UnknownLabel(format!("Pauli label {label:?}"))),
        };
        k = 4 * k + digit;
    }
    Ok(k)
}
