//! Matrix functions and small linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here is pure Rust (no LAPACK binding): the matrices in this
//! crate are at most 16×16 (two-qubit superoperators) or 32×28 (deviation
//! bases), so `nalgebra`'s built-in decompositions are more than adequate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Real (PTM-level) matrix.
pub type RMat = DMatrix<f64>;
/// Real vector.
pub type RVec = DVector<f64>;
/// Complex (Hilbert-space / Choi-level) matrix.
pub type CMat = DMatrix<Complex64>;

/// Frobenius distance `‖a − b‖_F`.
pub fn fro_dist(a: &RMat, b: &RMat) -> f64 {
    (a - b).norm()
}

/// Matrix exponential (delegates to `nalgebra`'s scaling-and-squaring Padé
/// implementation).
pub fn expm(a: &RMat) -> RMat {
    a.exp()
}

/// Principal matrix square root via the Denman–Beavers iteration.
///
/// Converges quadratically for matrices with no eigenvalues on the closed
/// negative real axis; callers are expected to have screened for that (see
/// [`logm`]).
pub fn sqrtm(a: &RMat) -> Result<RMat> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension("sqrtm requires a square matrix".into()));
    }
    let mut y = a.clone();
    let mut z = RMat::identity(n, n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogmFailed("singular iterate in sqrtm".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogmFailed("singular iterate in sqrtm".into()))?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let delta = fro_dist(&y_next, &y) / y.norm().max(1e-300);
        y = y_next;
        z = z_next;
        if delta < 1e-14 {
            return Ok(y);
        }
    }
    // One final accuracy check instead of failing outright: quadratic
    // convergence can stall at roundoff level without meeting the
    // relative-change criterion.
    if fro_dist(&(&y * &y), a) / a.norm().max(1e-300) < 1e-10 {
        Ok(y)
    } else {
        Err(Error::LogmFailed("sqrtm iteration did not converge".into()))
    }
}

/// Gauss–Legendre nodes and weights (8-point) on `[0, 1]`, used by the
/// Padé-quadrature core of [`logm`].
const GL8: [(f64, f64); 8] = [
    (0.019855071751231856, 0.05061426814518813),
    (0.10166676129318664, 0.11119051722668724),
    (0.2372337950418355, 0.15685332293894364),
    (0.40828267875217505, 0.18134189168918099),
    (0.5917173212478249, 0.18134189168918099),
    (0.7627662049581645, 0.15685332293894364),
    (0.8983332387068134, 0.11119051722668724),
    (0.9801449282487681, 0.05061426814518813),
];

/// Principal matrix logarithm via inverse scaling-and-squaring.
///
/// The matrix is repeatedly square-rooted (Denman–Beavers) until it is close
/// to the identity, a Padé-quadrature approximation of `log(I + X)` is
/// evaluated, and the result is scaled back up. Fails with
/// [`Error::LogmFailed`] if the spectrum touches the closed negative real
/// axis (no principal logarithm exists there) or the iteration breaks down.
pub fn logm(a: &RMat) -> Result<RMat> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension("logm requires a square matrix".into()));
    }
    // Branch-cut screen: principal log requires no eigenvalues on (-∞, 0].
    let eigs = a.complex_eigenvalues();
    for lam in eigs.iter() {
        if lam.re <= 0.0 && lam.im.abs() < 1e-12 {
            return Err(Error::LogmFailed(format!(
                "eigenvalue {lam} on the closed negative real axis"
            )));
        }
    }
    let identity = RMat::identity(n, n);
    let mut t = a.clone();
    let mut k = 0u32;
    while fro_dist(&t, &identity) > 0.12 {
        if k >= 60 {
            return Err(Error::LogmFailed(
                "inverse scaling did not reach the identity".into(),
            ));
        }
        t = sqrtm(&t)?;
        k += 1;
    }
    let x = &t - &identity;
    // log(I + X) = Σ_i w_i · X (I + x_i X)^{-1}  (8-point Gauss–Legendre).
    let mut log_t = RMat::zeros(n, n);
    for (node, weight) in GL8 {
        let m = (&identity + &x * node)
            .try_inverse()
            .ok_or_else(|| Error::LogmFailed("singular Padé denominator".into()))?;
        log_t += (&x * m) * weight;
    }
    Ok(log_t * 2f64.powi(k as i32))
}

/// Moore–Penrose pseudo-inverse via SVD. Singular values below
/// `rel_tol · σ_max` are treated as zero.
pub fn pinv(a: &RMat, rel_tol: f64) -> RMat {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cut = rel_tol * smax;
    let u = svd.u.as_ref().expect("svd requested with u");
    let vt = svd.v_t.as_ref().expect("svd requested with v_t");
    let mut sinv = DMatrix::zeros(vt.nrows(), u.ncols());
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > cut {
            sinv[(i, i)] = 1.0 / s;
        }
    }
    vt.transpose() * sinv * u.transpose()
}

/// Rank of a matrix: the number of singular values above `rel_tol · σ_max`.
pub fn rank(a: &RMat, rel_tol: f64) -> usize {
    let sv = a.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * smax).count()
}

/// Eigendecomposition of a Hermitian complex matrix. Returns `(eigenvalues,
/// eigenvectors)` with eigenvectors in the columns, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMat) -> (RVec, CMat) {
    let se = nalgebra::SymmetricEigen::new(a.clone());
    // Sort ascending for deterministic downstream use.
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let n = a.nrows();
    let mut vals = RVec::zeros(n);
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        vals[dst] = se.eigenvalues[src];
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a Hermitian complex matrix.
pub fn min_hermitian_eigenvalue(a: &CMat) -> f64 {
    let se = nalgebra::SymmetricEigen::new(a.clone());
    se.eigenvalues.min()
}
