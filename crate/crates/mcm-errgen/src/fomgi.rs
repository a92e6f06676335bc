//! The 28-dimensional deviation basis for one-qubit MCM instruments.
//!
//! First-order instrument deviations `ΔQ = {ΔQ_0, ΔQ_1}` live in a
//! 28-dimensional real vector space: 16 free entries in `ΔQ_0` plus 16 in
//! `ΔQ_1` minus the 4 constraints from aggregate trace preservation
//! (`2·4² − 4 = 28`). This module constructs a physically labelled basis
//! `{Λ^(j)}` for that space by pushing two-qubit elementary error generators
//! through the measurement gadget of [`crate::gadget`], keeping the
//! symmetric/antisymmetric *base* term of each representative generator and
//! adding its trace-correction term only when the crunched base alone fails
//! to conserve total outcome probability.
//!
//! The basis splits into six sectors:
//!
//! | sector | labels | meaning |
//! |--------|--------|---------|
//! | S      | `s_meas`, `s_prep`, `s_read`   | stochastic (incoherent) errors |
//! | A      | `a_meas`, `a_prep`, `a_read`   | asymmetry / bias errors |
//! | R      | `rx_meas` … `ry_dep_prep`      | rotation errors |
//! | Rt     | `rt_x_meas` … `rt_y_dep_prep`  | state-dependent rotation errors |
//! | W      | `w0` … `w3`                    | measurement weakness (coherence survival) |
//! | Wt     | `wt0` … `wt3`                  | conjugate weakness |
//!
//! Suffixes: `_meas` errors disturb the recorded outcome before projection,
//! `_prep` errors disturb the post-measurement state, `_read` errors flip the
//! record after projection; `ind`/`dep` distinguish outcome-independent from
//! outcome-dependent variants; `c0`/`c1` in composites refer to the two
//! outcomes.
//!
//! [`build_basis`] assembles the 28 deviations, the change-of-basis matrix
//! `F`, and its inverse whose rows are the dual elements; construction
//! aborts ([`Error::SelfTest`]) if the result disagrees with the frozen
//! reference tables (hand-written unit actions and the integer decomposition
//! of all 240 two-qubit elementary generators). [`extract`] projects a
//! measured deviation onto the basis, producing the 28 strengths plus
//! composite physical error measures (T1-type rates, readout flips, rotation
//! angles, weakness magnitude).

use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::errorgen::{all_eegs, Eeg, EegType};
use crate::gadget;
use crate::instrument::{to_matrix4, Instrument};
use crate::linalg::{CMat, RMat, RVec};
use crate::pauli::pauli_matrix;
use crate::ptm::ptm_from_action;
use crate::{Error, Result};

/// Number of basis deviations.
pub const N_FOMGI: usize = 28;

/// Aggregate trace-preservation tolerance accepted by [`extract`].
pub const TP_TOL: f64 = 1e-8;

/// Sector of a basis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// Stochastic errors.
    S,
    /// Asymmetry (bias) errors.
    A,
    /// Rotation errors.
    R,
    /// State-dependent rotation errors.
    Rt,
    /// Measurement weakness.
    W,
    /// Conjugate measurement weakness.
    Wt,
}

impl Sector {
    /// Short ASCII tag used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Sector::S => "S",
            Sector::A => "A",
            Sector::R => "R",
            Sector::Rt => "Rt",
            Sector::W => "W",
            Sector::Wt => "Wt",
        }
    }

    /// All six sectors in canonical order.
    pub fn all() -> [Sector; 6] {
        [Sector::S, Sector::A, Sector::R, Sector::Rt, Sector::W, Sector::Wt]
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Static description of one basis element.
#[derive(Clone, Copy, Debug)]
pub struct FomgiSpec {
    /// Canonical label.
    pub name: &'static str,
    /// Sector.
    pub sector: Sector,
    /// Representative two-qubit elementary generator (compact label) whose
    /// crunched base term generates the deviation.
    rep: &'static str,
}

/// The 28 basis labels in canonical order.
pub const SPECS: [FomgiSpec; 28] = [
    FomgiSpec { name: "s_meas", sector: Sector::S, rep: "s_xx" },
    FomgiSpec { name: "s_prep", sector: Sector::S, rep: "s_xi" },
    FomgiSpec { name: "s_read", sector: Sector::S, rep: "s_ix" },
    FomgiSpec { name: "a_meas", sector: Sector::A, rep: "a_xxyx" },
    FomgiSpec { name: "a_prep", sector: Sector::A, rep: "a_xiyi" },
    FomgiSpec { name: "a_read", sector: Sector::A, rep: "a_ixiy" },
    FomgiSpec { name: "rx_meas", sector: Sector::R, rep: "h_xx" },
    FomgiSpec { name: "ry_meas", sector: Sector::R, rep: "h_yx" },
    FomgiSpec { name: "rx_ind_prep", sector: Sector::R, rep: "h_xi" },
    FomgiSpec { name: "rx_dep_prep", sector: Sector::R, rep: "h_xz" },
    FomgiSpec { name: "ry_ind_prep", sector: Sector::R, rep: "h_yi" },
    FomgiSpec { name: "ry_dep_prep", sector: Sector::R, rep: "h_yz" },
    FomgiSpec { name: "rt_x_meas", sector: Sector::Rt, rep: "c_xizy" },
    FomgiSpec { name: "rt_y_meas", sector: Sector::Rt, rep: "c_ixxz" },
    FomgiSpec { name: "rt_xz_meas", sector: Sector::Rt, rep: "c_xzzy" },
    FomgiSpec { name: "rt_yz_meas", sector: Sector::Rt, rep: "c_ixxi" },
    FomgiSpec { name: "rt_x_ind_prep", sector: Sector::Rt, rep: "c_xxzy" },
    FomgiSpec { name: "rt_x_dep_prep", sector: Sector::Rt, rep: "c_ixxy" },
    FomgiSpec { name: "rt_y_ind_prep", sector: Sector::Rt, rep: "c_ixxx" },
    FomgiSpec { name: "rt_y_dep_prep", sector: Sector::Rt, rep: "c_xxzx" },
    FomgiSpec { name: "w0", sector: Sector::W, rep: "h_zy" },
    FomgiSpec { name: "w1", sector: Sector::W, rep: "h_iy" },
    FomgiSpec { name: "w2", sector: Sector::W, rep: "h_zx" },
    FomgiSpec { name: "w3", sector: Sector::W, rep: "h_ix" },
    FomgiSpec { name: "wt0", sector: Sector::Wt, rep: "c_xixy" },
    FomgiSpec { name: "wt1", sector: Sector::Wt, rep: "c_xiyy" },
    FomgiSpec { name: "wt2", sector: Sector::Wt, rep: "c_yyyz" },
    FomgiSpec { name: "wt3", sector: Sector::Wt, rep: "c_xxxz" },
];

/// Canonical label list.
pub fn labels() -> [&'static str; N_FOMGI] {
    let mut out = [""; N_FOMGI];
    for (i, s) in SPECS.iter().enumerate() {
        out[i] = s.name;
    }
    out
}

/// Index of a canonical label.
pub fn index_of(name: &str) -> Option<usize> {
    SPECS.iter().position(|s| s.name == name)
}

/// Reference decomposition of every two-qubit elementary generator onto the
/// basis: row `j` lists `(compact generator label, integer coefficient)`
/// pairs; generators not listed in any row crunch to zero at first order.
/// Frozen fixture, verified by [`build_basis`].
const COMBINATIONS: [&[(&str, f64)]; N_FOMGI] = [
    // s_meas
    &[("s_xx", 1.0), ("s_yx", 1.0), ("s_xy", 1.0), ("s_yy", 1.0), ("c_xxyy", -2.0), ("c_xyyx", 2.0)],
    // s_prep
    &[("s_xi", 1.0), ("s_yi", 1.0), ("s_xz", 1.0), ("s_yz", 1.0), ("a_xiyz", 2.0), ("a_xzyi", 2.0)],
    // s_read
    &[("s_ix", 1.0), ("s_iy", 1.0), ("s_zx", 1.0), ("s_zy", 1.0), ("a_ixzy", 2.0), ("a_iyzx", -2.0)],
    // a_meas
    &[("a_xxyx", 1.0), ("a_xxxy", 1.0), ("a_xyyy", 1.0), ("a_yxyy", 1.0)],
    // a_prep
    &[("a_xiyi", 1.0), ("a_xzyz", 1.0), ("c_xixz", 1.0), ("c_yiyz", 1.0)],
    // a_read
    &[("a_ixiy", 1.0), ("a_zxzy", 1.0), ("c_ixzx", 1.0), ("c_iyzy", 1.0)],
    // rx_meas
    &[("h_xx", 1.0), ("h_yy", -1.0), ("a_xxzz", -1.0), ("a_yyzz", 1.0), ("c_izxy", 1.0), ("c_izyx", 1.0), ("c_xyzi", 1.0), ("c_yxzi", 1.0)],
    // ry_meas
    &[("h_yx", 1.0), ("h_xy", 1.0), ("a_xyzz", -1.0), ("a_yxzz", -1.0), ("c_izxx", -1.0), ("c_izyy", 1.0), ("c_xxzi", -1.0), ("c_yyzi", 1.0)],
    // rx_ind_prep
    &[("h_xi", 1.0), ("a_ixyy", 1.0), ("a_iyyx", -1.0), ("a_izxz", 1.0), ("a_xizz", -2.0), ("a_xzzi", -2.0), ("c_xxzy", 1.0), ("c_xyzx", -1.0), ("c_yizi", -1.0), ("c_yzzz", -1.0)],
    // rx_dep_prep
    &[("h_xz", 1.0), ("a_izxi", 1.0), ("a_xizi", -2.0), ("a_xxzx", -1.0), ("a_xyzy", -1.0), ("a_xzzz", -2.0), ("c_ixyx", 1.0), ("c_iyyy", 1.0), ("c_yizz", -1.0), ("c_yzzi", -1.0)],
    // ry_ind_prep
    &[("h_yi", 1.0), ("a_ixxy", -1.0), ("a_iyxx", 1.0), ("a_izyz", 1.0), ("a_yizz", -2.0), ("a_yzzi", -2.0), ("c_xizi", 1.0), ("c_xzzz", 1.0), ("c_yxzy", 1.0), ("c_yyzx", -1.0)],
    // ry_dep_prep
    &[("h_yz", 1.0), ("a_izyi", 1.0), ("a_yizi", -2.0), ("a_yxzx", -1.0), ("a_yyzy", -1.0), ("a_yzzz", -2.0), ("c_ixxx", -1.0), ("c_iyxy", -1.0), ("c_xizz", 1.0), ("c_xzzi", 1.0)],
    // rt_x_meas
    &[("a_ixxi", 1.0), ("a_iyyi", -1.0), ("a_xzzx", 1.0), ("a_yzzy", -1.0), ("c_ixyz", -1.0), ("c_iyxz", -1.0), ("c_xizy", 1.0), ("c_yizx", 1.0)],
    // rt_y_meas
    &[("a_ixyi", 1.0), ("a_iyxi", 1.0), ("a_xzzy", 1.0), ("a_yzzx", 1.0), ("c_ixxz", 1.0), ("c_iyyz", -1.0), ("c_xizx", -1.0), ("c_yizy", 1.0)],
    // rt_xz_meas
    &[("a_ixxz", 1.0), ("a_iyyz", -1.0), ("a_xizx", 1.0), ("a_yizy", -1.0), ("c_ixyi", -1.0), ("c_iyxi", -1.0), ("c_xzzy", 1.0), ("c_yzzx", 1.0)],
    // rt_yz_meas
    &[("a_ixyz", 1.0), ("a_iyxz", 1.0), ("a_xizy", 1.0), ("a_yizx", 1.0), ("c_ixxi", 1.0), ("c_iyyi", -1.0), ("c_xzzx", -1.0), ("c_yzzy", 1.0)],
    // rt_x_ind_prep
    &[("a_ixxx", 1.0), ("a_ixyy", -1.0), ("a_iyxy", 1.0), ("a_iyyx", 1.0), ("c_xxzy", 1.0), ("c_xyzx", -1.0), ("c_yxzx", -1.0), ("c_yyzy", -1.0)],
    // rt_x_dep_prep
    &[("a_xxzx", 1.0), ("a_xyzy", 1.0), ("a_yxzy", 1.0), ("a_yyzx", -1.0), ("c_ixxy", 1.0), ("c_ixyx", 1.0), ("c_iyxx", -1.0), ("c_iyyy", 1.0)],
    // rt_y_ind_prep
    &[("a_xxzy", 1.0), ("a_xyzx", -1.0), ("a_yxzx", -1.0), ("a_yyzy", -1.0), ("c_ixxx", 1.0), ("c_ixyy", -1.0), ("c_iyxy", 1.0), ("c_iyyx", 1.0)],
    // rt_y_dep_prep
    &[("a_ixxy", 1.0), ("a_ixyx", 1.0), ("a_iyxx", -1.0), ("a_iyyy", 1.0), ("c_xxzx", 1.0), ("c_xyzy", 1.0), ("c_yxzy", 1.0), ("c_yyzx", -1.0)],
    // w0
    &[("h_zy", 1.0), ("a_iyzi", 1.0), ("a_xyxz", -1.0), ("a_yyyz", -1.0), ("a_zyzz", -2.0), ("c_ixzz", 1.0), ("c_izzx", -1.0), ("c_xixx", -1.0), ("c_yiyx", -1.0), ("c_zizx", -2.0)],
    // w1
    &[("h_iy", 1.0), ("a_iyzz", -2.0), ("a_xiyx", -1.0), ("a_xxyi", -1.0), ("a_zizy", -1.0), ("c_ixiz", -1.0), ("c_ixzi", -2.0), ("c_xyyz", 1.0), ("c_xzyy", -1.0), ("c_zxzz", 1.0)],
    // w2
    &[("h_zx", 1.0), ("a_ixzi", 1.0), ("a_xxxz", -1.0), ("a_yxyz", -1.0), ("a_zxzz", -2.0), ("c_iyzz", -1.0), ("c_izzy", 1.0), ("c_xixy", 1.0), ("c_yiyy", 1.0), ("c_zizy", 2.0)],
    // w3
    &[("h_ix", 1.0), ("a_ixzz", -2.0), ("a_xiyy", 1.0), ("a_xyyi", 1.0), ("a_zizx", -1.0), ("c_iyiz", 1.0), ("c_iyzi", 2.0), ("c_xxyz", 1.0), ("c_xzyx", -1.0), ("c_zyzz", -1.0)],
    // wt0
    &[("a_xxxz", -1.0), ("a_xyyz", 1.0), ("a_xzyy", -1.0), ("a_yxyz", 1.0), ("c_xixy", 1.0), ("c_xiyx", 1.0), ("c_xxyi", 1.0), ("c_yiyy", -1.0)],
    // wt1
    &[("a_xxyz", -1.0), ("a_xyxz", -1.0), ("a_xzyx", 1.0), ("a_yyyz", 1.0), ("c_xixx", -1.0), ("c_xiyy", 1.0), ("c_xyyi", 1.0), ("c_yiyx", 1.0)],
    // wt2
    &[("a_xixx", -1.0), ("a_xiyy", 1.0), ("a_xyyi", -1.0), ("a_yiyx", 1.0), ("c_xxyz", -1.0), ("c_xyxz", -1.0), ("c_xzyx", -1.0), ("c_yyyz", 1.0)],
    // wt3
    &[("a_xixy", -1.0), ("a_xiyx", -1.0), ("a_xxyi", 1.0), ("a_yiyy", 1.0), ("c_xxxz", 1.0), ("c_xyyz", -1.0), ("c_xzyy", -1.0), ("c_yxyz", -1.0)],
];

/// Parses compact two-qubit generator labels like `"s_xx"`, `"h_zy"`,
/// `"c_xixy"`, `"a_xiyz"` (sector letter, underscore, one Pauli string for
/// H/S or two concatenated Pauli strings for C/A).
fn parse_compact(label: &str) -> Eeg {
    let (tag, rest) = label.split_once('_').expect("compact label");
    let idx = |s: &str| -> usize {
        s.chars().fold(0usize, |acc, ch| {
            4 * acc
                + match ch {
                    'i' => 0,
                    'x' => 1,
                    'y' => 2,
                    'z' => 3,
                    _ => panic!("bad pauli char {ch}"),
                }
        })
    };
    match tag {
        "h" => Eeg::h(idx(rest)),
        "s" => Eeg::s(idx(rest)),
        "c" | "a" => {
            assert_eq!(rest.len(), 4, "pair label {label}");
            let p = idx(&rest[..2]);
            let q = idx(&rest[2..]);
            if tag == "c" {
                Eeg::c(p, q)
            } else {
                Eeg::a(p, q)
            }
        }
        _ => panic!("bad sector tag {tag}"),
    }
}

/// PTM of the base term of a generator: the full commutator for H, the
/// conjugation `PρP` for S, the cross term `PρQ + QρP` for C, and
/// `i(PρQ − QρP)` for A.
fn base_ptm(e: &Eeg) -> RMat {
    let p = pauli_matrix(2, e.p);
    let i = Complex64::i();
    match e.ty {
        EegType::H => ptm_from_action(2, |rho| (&p * rho - rho * &p) * (-i)),
        EegType::S => ptm_from_action(2, |rho| &p * rho * &p),
        EegType::C => {
            let q = pauli_matrix(2, e.q);
            ptm_from_action(2, |rho| &p * rho * &q + &q * rho * &p)
        }
        EegType::A => {
            let q = pauli_matrix(2, e.q);
            ptm_from_action(2, |rho| (&p * rho * &q - &q * rho * &p) * i)
        }
    }
}

/// PTM of the trace-correction term of a generator (`None` for H, which has
/// no correction): `−ρ` for S, `−½{{P,Q},ρ}` for C, `+(i/2){[P,Q],ρ}` for A.
fn corr_ptm(e: &Eeg) -> Option<RMat> {
    let i = Complex64::i();
    match e.ty {
        EegType::H => None,
        EegType::S => Some(ptm_from_action(2, |rho| -rho)),
        EegType::C => {
            let p = pauli_matrix(2, e.p);
            let q = pauli_matrix(2, e.q);
            let anti = &p * &q + &q * &p;
            Some(ptm_from_action(2, |rho| {
                (&anti * rho + rho * &anti) * Complex64::new(-0.5, 0.0)
            }))
        }
        EegType::A => {
            let p = pauli_matrix(2, e.p);
            let q = pauli_matrix(2, e.q);
            let comm = &p * &q - &q * &p;
            Some(ptm_from_action(2, |rho| (&comm * rho + rho * &comm) * (i * 0.5)))
        }
    }
}

/// Builds basis deviation `row` from its representative generator: crunch the
/// base term; if the resulting pair does not conserve total outcome
/// probability (nonzero aggregate top row), add the crunched correction term.
/// Returns the deviation and whether the correction was applied.
fn constructed_deviation(row: usize) -> ([Matrix4<f64>; 2], bool) {
    let rep = parse_compact(SPECS[row].rep);
    let mut dev = gadget::generator_deviation(&base_ptm(&rep));
    let top = (dev[0] + dev[1]).row(0).amax();
    let corrected = top > 1e-9;
    if corrected {
        let corr = corr_ptm(&rep).expect("non-TP base must come with a correction term");
        let extra = gadget::generator_deviation(&corr);
        dev[0] += extra[0];
        dev[1] += extra[1];
    }
    (dev, corrected)
}

/// Flattens a deviation pair to its 28 free coordinates: all 16 entries of
/// `ΔQ_0` (row major), then the X/Y/Z rows of `ΔQ_1`. The top row of `ΔQ_1`
/// is dropped: aggregate trace preservation fixes it to `−ΔQ_0` row I.
pub fn vec28(dev: &[Matrix4<f64>; 2]) -> RVec {
    let mut v = RVec::zeros(N_FOMGI);
    for r in 0..4 {
        for c in 0..4 {
            v[4 * r + c] = dev[0][(r, c)];
        }
    }
    for r in 1..4 {
        for c in 0..4 {
            v[16 + 4 * (r - 1) + c] = dev[1][(r, c)];
        }
    }
    v
}

/// Rebuilds a deviation pair from its 28 coordinates, imposing aggregate
/// trace preservation (top row of `ΔQ_1` set to `−ΔQ_0` row I).
pub fn unvec28(v: &RVec) -> [Matrix4<f64>; 2] {
    let mut q0 = Matrix4::zeros();
    let mut q1 = Matrix4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            q0[(r, c)] = v[4 * r + c];
        }
    }
    for r in 1..4 {
        for c in 0..4 {
            q1[(r, c)] = v[16 + 4 * (r - 1) + c];
        }
    }
    for c in 0..4 {
        q1[(0, c)] = -q0[(0, c)];
    }
    [q0, q1]
}

/// The 28-element basis: deviations, change-of-basis matrix, and duals.
#[derive(Clone, Debug)]
pub struct FomgiBasis {
    /// The 28 deviation pairs in canonical order.
    pub deviations: Vec<[Matrix4<f64>; 2]>,
    /// Columns are `vec28` of each deviation.
    pub f: RMat,
    /// Inverse of `f`; rows are the dual elements.
    pub f_inv: RMat,
    /// 2-norm condition number of `f`.
    pub condition: f64,
    /// Whether the trace-correction term was needed for each element.
    pub corrected: Vec<bool>,
}

impl FomgiBasis {
    /// Dual row `j` in `vec28` coordinates.
    pub fn dual_row(&self, j: usize) -> RVec {
        self.f_inv.row(j).transpose()
    }

    /// Strength vector of a deviation (no validation; see [`extract`]).
    pub fn project(&self, dev: &[Matrix4<f64>; 2]) -> Vec<f64> {
        let s = &self.f_inv * vec28(dev);
        s.iter().copied().collect()
    }

    /// Reassembles a deviation pair from strengths.
    pub fn assemble(&self, strengths: &[f64]) -> [Matrix4<f64>; 2] {
        assert_eq!(strengths.len(), N_FOMGI);
        let s = RVec::from_column_slice(strengths);
        unvec28(&(&self.f * s))
    }
}

/// Constructs and self-tests the basis.
///
/// Errors with [`Error::SelfTest`] if `F` is singular, if any constructed
/// deviation disagrees with its frozen hand-written unit action, or if the
/// first-order decomposition of any of the 240 two-qubit elementary
/// generators disagrees with the frozen integer reference table.
pub fn build_basis() -> Result<FomgiBasis> {
    let mut deviations = Vec::with_capacity(N_FOMGI);
    let mut corrected = Vec::with_capacity(N_FOMGI);
    for row in 0..N_FOMGI {
        let (dev, corr) = constructed_deviation(row);
        deviations.push(dev);
        corrected.push(corr);
    }

    let mut f = RMat::zeros(N_FOMGI, N_FOMGI);
    for (j, dev) in deviations.iter().enumerate() {
        f.set_column(j, &vec28(dev));
    }
    let f_inv = f
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SelfTest("change-of-basis matrix is singular".into()))?;

    let svals = f.clone().svd(false, false).singular_values;
    let condition = svals.max() / svals.min();

    // Duality must hold to machine precision.
    let eye_dev = (&f_inv * &f - RMat::identity(N_FOMGI, N_FOMGI)).amax();
    if eye_dev > 1e-12 {
        return Err(Error::SelfTest(format!(
            "duality violated: |F^-1 F - I| = {eye_dev:.3e}"
        )));
    }

    // Unit actions: every constructed deviation must match the frozen
    // hand-written form exactly.
    for (j, dev) in deviations.iter().enumerate() {
        let reference = reference_action(j);
        let d = ((dev[0] - reference[0]).amax()).max((dev[1] - reference[1]).amax());
        if d > 1e-10 {
            return Err(Error::SelfTest(format!(
                "unit action mismatch for {}: max deviation {d:.3e}",
                SPECS[j].name
            )));
        }
    }

    // Integer decomposition of all 240 elementary generators.
    let eegs = all_eegs(2);
    let mut expected = vec![vec![0.0_f64; eegs.len()]; N_FOMGI];
    for (j, combo) in COMBINATIONS.iter().enumerate() {
        for (label, coeff) in combo.iter() {
            let target = parse_compact(label);
            let k = eegs
                .iter()
                .position(|e| *e == target)
                .unwrap_or_else(|| panic!("unknown generator {label}"));
            expected[j][k] = *coeff;
        }
    }
    for (k, eeg) in eegs.iter().enumerate() {
        let coeffs = &f_inv * vec28(&gadget::eeg_deviation(eeg));
        for j in 0..N_FOMGI {
            if (coeffs[j] - expected[j][k]).abs() > 1e-9 {
                return Err(Error::SelfTest(format!(
                    "decomposition mismatch: {} onto {} gave {:.6}, reference {}",
                    eeg.label(2),
                    SPECS[j].name,
                    coeffs[j],
                    expected[j][k]
                )));
            }
        }
    }

    Ok(FomgiBasis { deviations, f, f_inv, condition, corrected })
}

/// The basis as a process-wide constant (first call pays construction and
/// self-test cost; panics if the self-test fails).
pub fn basis() -> &'static FomgiBasis {
    static BASIS: OnceLock<FomgiBasis> = OnceLock::new();
    BASIS.get_or_init(|| build_basis().expect("FOMGI basis self-test"))
}

// ---------------------------------------------------------------------------
// Frozen unit actions.

fn op(rows: [[f64; 2]; 2]) -> CMat {
    CMat::from_fn(2, 2, |r, c| Complex64::new(rows[r][c], 0.0))
}

fn op_p0() -> CMat {
    op([[1.0, 0.0], [0.0, 0.0]])
}

fn op_p1() -> CMat {
    op([[0.0, 0.0], [0.0, 1.0]])
}

fn op_x() -> CMat {
    op([[0.0, 1.0], [1.0, 0.0]])
}

fn op_y() -> CMat {
    CMat::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => Complex64::new(0.0, 0.0),
    })
}

fn op_z() -> CMat {
    op([[1.0, 0.0], [0.0, -1.0]])
}

fn r00(rho: &CMat) -> Complex64 {
    rho[(0, 0)]
}

fn r11(rho: &CMat) -> Complex64 {
    rho[(1, 1)]
}

/// `x = Tr(Xρ) = ρ01 + ρ10`.
fn xs(rho: &CMat) -> Complex64 {
    rho[(0, 1)] + rho[(1, 0)]
}

/// `y = Tr(Yρ) = i(ρ01 − ρ10)`.
fn ys(rho: &CMat) -> Complex64 {
    (rho[(0, 1)] - rho[(1, 0)]) * Complex64::i()
}

/// `z = Tr(Zρ) = ρ00 − ρ11`.
fn zs(rho: &CMat) -> Complex64 {
    rho[(0, 0)] - rho[(1, 1)]
}

/// `Tr ρ = ρ00 + ρ11`.
fn ts(rho: &CMat) -> Complex64 {
    rho[(0, 0)] + rho[(1, 1)]
}

fn act2(f0: impl Fn(&CMat) -> CMat, f1: impl Fn(&CMat) -> CMat) -> [Matrix4<f64>; 2] {
    [
        to_matrix4(&ptm_from_action(1, |rho| f0(rho))),
        to_matrix4(&ptm_from_action(1, |rho| f1(rho))),
    ]
}

/// The frozen hand-written unit action `{Λ_0[ρ], Λ_1[ρ]}` of basis element
/// `row`, as PTMs.
pub fn reference_action(row: usize) -> [Matrix4<f64>; 2] {
    let half = Complex64::new(0.5, 0.0);
    match SPECS[row].name {
        "s_meas" => act2(|r| op_p0() * (-zs(r)), |r| op_p1() * zs(r)),
        "s_prep" => act2(|r| op_z() * (-r00(r)), |r| op_z() * r11(r)),
        "s_read" => act2(
            |r| op_p0() * (-r00(r)) + op_p1() * r11(r),
            |r| op_p0() * r00(r) + op_p1() * (-r11(r)),
        ),
        "a_meas" => act2(|r| op_p0() * (-2.0 * ts(r)), |r| op_p1() * (2.0 * ts(r))),
        "a_prep" => act2(|r| op_z() * (-2.0 * r00(r)), |r| op_z() * (-2.0 * r11(r))),
        "a_read" => act2(
            |r| op_p0() * (-2.0 * r00(r)) + op_p1() * (-2.0 * r11(r)),
            |r| op_p0() * (2.0 * r00(r)) + op_p1() * (2.0 * r11(r)),
        ),
        "rx_meas" => act2(|r| op_p0() * ys(r), |r| op_p1() * (-ys(r))),
        "ry_meas" => act2(|r| op_p0() * (-xs(r)), |r| op_p1() * xs(r)),
        "rx_ind_prep" => act2(|r| op_y() * (-r00(r)), |r| op_y() * r11(r)),
        "rx_dep_prep" => act2(|r| op_y() * (-r00(r)), |r| op_y() * (-r11(r))),
        "ry_ind_prep" => act2(|r| op_x() * r00(r), |r| op_x() * (-r11(r))),
        "ry_dep_prep" => act2(|r| op_x() * r00(r), |r| op_x() * r11(r)),
        "rt_x_meas" => act2(|r| op_p1() * (-ys(r)), |r| op_p0() * ys(r)),
        "rt_y_meas" => act2(|r| op_p1() * xs(r), |r| op_p0() * (-xs(r))),
        "rt_xz_meas" => act2(|r| op_z() * ys(r), |r| op_z() * (-ys(r))),
        "rt_yz_meas" => act2(|r| op_z() * (-xs(r)), |r| op_z() * xs(r)),
        "rt_x_ind_prep" => act2(|r| op_y() * r11(r), |r| op_y() * (-r00(r))),
        "rt_x_dep_prep" => act2(|r| op_y() * r11(r), |r| op_y() * r00(r)),
        "rt_y_ind_prep" => act2(|r| op_x() * r11(r), |r| op_x() * r00(r)),
        "rt_y_dep_prep" => act2(|r| op_x() * (-r11(r)), |r| op_x() * r00(r)),
        "w0" => act2(
            move |r| (op_x() * xs(r) + op_y() * ys(r)) * half,
            move |r| (op_x() * xs(r) + op_y() * ys(r)) * half,
        ),
        "w1" => act2(
            move |r| (op_x() * xs(r) + op_y() * ys(r)) * (-half),
            move |r| (op_x() * xs(r) + op_y() * ys(r)) * half,
        ),
        "w2" => act2(
            move |r| (op_y() * xs(r) - op_x() * ys(r)) * half,
            move |r| (op_y() * xs(r) - op_x() * ys(r)) * half,
        ),
        "w3" => act2(
            move |r| (op_y() * xs(r) - op_x() * ys(r)) * (-half),
            move |r| (op_y() * xs(r) - op_x() * ys(r)) * half,
        ),
        "wt0" => act2(
            move |r| (op_y() * xs(r) + op_x() * ys(r)) * half,
            move |r| (op_y() * xs(r) + op_x() * ys(r)) * half,
        ),
        "wt1" => act2(
            move |r| (op_x() * xs(r) - op_y() * ys(r)) * (-half),
            move |r| (op_x() * xs(r) - op_y() * ys(r)) * (-half),
        ),
        "wt2" => act2(
            move |r| (op_y() * xs(r) + op_x() * ys(r)) * (-half),
            move |r| (op_y() * xs(r) + op_x() * ys(r)) * half,
        ),
        "wt3" => act2(
            move |r| (op_x() * xs(r) - op_y() * ys(r)) * half,
            move |r| (op_x() * xs(r) - op_y() * ys(r)) * (-half),
        ),
        other => panic!("no reference action for {other}"),
    }
}

// ---------------------------------------------------------------------------
// Extraction.

/// Strengths plus derived quantities for one instrument deviation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorStrengthReport {
    /// The 28 strengths in canonical label order.
    pub strengths: Vec<f64>,
    /// Composite physical error measures, in fixed order.
    pub composites: Vec<(String, f64)>,
    /// Optional 2σ uncertainties per strength (bootstrap), canonical order.
    pub uncertainties: Option<Vec<f64>>,
    /// Norm of the aggregate trace-preservation violation that was projected
    /// out before extraction.
    pub tp_violation: f64,
    /// Max-abs difference between the input deviation and its reconstruction
    /// from the extracted strengths (on the 28 free coordinates).
    pub reconstruction_residual: f64,
}

impl ErrorStrengthReport {
    /// Strength by canonical label.
    pub fn strength(&self, name: &str) -> Option<f64> {
        index_of(name).map(|i| self.strengths[i])
    }

    /// Composite by name.
    pub fn composite(&self, name: &str) -> Option<f64> {
        self.composites
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    /// `(label, strength)` pairs in canonical order.
    pub fn labeled(&self) -> Vec<(&'static str, f64)> {
        labels().iter().copied().zip(self.strengths.iter().copied()).collect()
    }

    /// CSV serialization: header plus one row per basis label in canonical
    /// order (`label,sector,strength,2sigma`; the last field is empty when no
    /// uncertainties are attached).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,sector,strength,2sigma\n");
        for (i, spec) in SPECS.iter().enumerate() {
            let sigma = match &self.uncertainties {
                Some(u) => format!("{:.12e}", u[i]),
                None => String::new(),
            };
            out.push_str(&format!(
                "{},{},{:.12e},{}\n",
                spec.name,
                spec.sector.as_str(),
                self.strengths[i],
                sigma
            ));
        }
        out
    }

    /// JSON serialization with labels attached to each strength.
    pub fn to_json_value(&self) -> serde_json::Value {
        let strengths: Vec<serde_json::Value> = SPECS
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let mut entry = serde_json::json!({
                    "label": spec.name,
                    "sector": spec.sector.as_str(),
                    "strength": self.strengths[i],
                });
                if let Some(u) = &self.uncertainties {
                    entry["two_sigma"] = serde_json::json!(u[i]);
                }
                entry
            })
            .collect();
        let composites: Vec<serde_json::Value> = self
            .composites
            .iter()
            .map(|(n, v)| serde_json::json!({ "name": n, "value": v }))
            .collect();
        serde_json::json!({
            "strengths": strengths,
            "composites": composites,
            "tp_violation": self.tp_violation,
            "reconstruction_residual": self.reconstruction_residual,
        })
    }
}

/// Projects a deviation pair onto the basis.
///
/// The aggregate top row (total-probability change) must vanish within
/// [`TP_TOL`]; a violation below tolerance is projected out and reported in
/// the result, a larger one is an error.
pub fn extract(dev: &[Matrix4<f64>; 2]) -> Result<ErrorStrengthReport> {
    let top = (dev[0] + dev[1]).row(0).amax();
    if top > TP_TOL {
        return Err(Error::NotTracePreserving(top));
    }
    let b = basis();
    let coords = vec28(dev);
    let s = &b.f_inv * &coords;
    let strengths: Vec<f64> = s.iter().copied().collect();
    let recon = &b.f * &s;
    let reconstruction_residual = (&recon - &coords).amax();
    let composites = composites(&strengths);
    Ok(ErrorStrengthReport {
        strengths,
        composites,
        uncertainties: None,
        tp_violation: top,
        reconstruction_residual,
    })
}

/// Extraction straight from an instrument (deviation from the ideal).
pub fn extract_from_instrument(inst: &Instrument) -> Result<ErrorStrengthReport> {
    extract(&inst.deviation())
}

/// Composite physical error measures, calibrated so that the natural
/// generating process reproduces its parameter:
///
/// * `pre_mcm_t1` equals the damping probability γ of an amplitude-damping
///   channel ahead of the measurement (exactly, at any γ);
/// * `post_mcm_t1` likewise for damping after the measurement, and the
///   `*_thermal` variants for excitation instead of decay;
/// * `readout_flip_0to1`/`readout_flip_1to0` equal the two classical
///   record-flip probabilities; `pure_readout` is their average;
/// * `rot_*_meas` equals `sin θ` for a rotation by θ ahead of the
///   measurement; `rot_*_prep_c{0,1}` equal `sin θ_c` for post-measurement
///   rotations applied on outcome `c`;
/// * `bias_*` are the raw asymmetry strengths;
/// * `weakness_magnitude` is the Euclidean norm of the eight weakness
///   strengths.
pub fn composites(strengths: &[f64]) -> Vec<(String, f64)> {
    assert_eq!(strengths.len(), N_FOMGI);
    let g = |n: &str| strengths[index_of(n).expect("label")];
    let pre_t1 = g("s_meas") - 2.0 * g("a_meas");
    let pre_th = g("s_meas") + 2.0 * g("a_meas");
    let post_t1 = g("s_prep") - 2.0 * g("a_prep");
    let post_th = g("s_prep") + 2.0 * g("a_prep");
    let weakness = SPECS
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.sector, Sector::W | Sector::Wt))
        .map(|(i, _)| strengths[i] * strengths[i])
        .sum::<f64>()
        .sqrt();
    let rxi = g("rx_ind_prep");
    let rxd = g("rx_dep_prep");
    let ryi = g("ry_ind_prep");
    let ryd = g("ry_dep_prep");
    let items: Vec<(&str, f64)> = vec![
        ("pre_mcm_t1", pre_t1),
        ("pre_mcm_thermal", pre_th),
        ("post_mcm_t1", post_t1),
        ("post_mcm_thermal", post_th),
        ("total_t1", pre_t1 + post_t1),
        ("pure_readout", g("s_read")),
        ("readout_flip_0to1", g("s_read") + 2.0 * g("a_read")),
        ("readout_flip_1to0", g("s_read") - 2.0 * g("a_read")),
        ("bias_meas", g("a_meas")),
        ("bias_prep", g("a_prep")),
        ("bias_read", g("a_read")),
        ("rot_x_meas", 2.0 * g("rx_meas")),
        ("rot_y_meas", 2.0 * g("ry_meas")),
        ("rot_x_prep_c0", 2.0 * (rxi + rxd)),
        ("rot_x_prep_c1", 2.0 * (rxi - rxd)),
        ("rot_y_prep_c0", 2.0 * (ryi + ryd)),
        ("rot_y_prep_c1", 2.0 * (ryi - ryd)),
        ("weakness_magnitude", weakness),
    ];
    items.into_iter().map(|(n, v)| (n.to_string(), v)).collect()
}

/// Per-sector grouping of a strength report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectorSummary {
    /// `(sector, l2 norm of its strengths)` in canonical sector order.
    pub sector_norms: Vec<(Sector, f64)>,
    /// Strengths grouped by sector, canonical order inside each group.
    pub by_sector: Vec<(Sector, Vec<(String, f64)>)>,
    /// Label with the largest absolute strength, if any strength is nonzero.
    pub dominant: Option<(String, f64)>,
    /// Composite measures copied from the report.
    pub composites: Vec<(String, f64)>,
}

/// Groups a report by sector and finds the dominant label.
pub fn classify(report: &ErrorStrengthReport) -> SectorSummary {
    let mut sector_norms = Vec::new();
    let mut by_sector = Vec::new();
    for sector in Sector::all() {
        let entries: Vec<(String, f64)> = SPECS
            .iter()
            .enumerate()
            .filter(|(_, s)| s.sector == sector)
            .map(|(i, s)| (s.name.to_string(), report.strengths[i]))
            .collect();
        let norm = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        sector_norms.push((sector, norm));
        by_sector.push((sector, entries));
    }
    let dominant = report
        .strengths
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .filter(|(_, v)| v.abs() > 1e-15)
        .map(|(i, v)| (SPECS[i].name.to_string(), *v));
    SectorSummary {
        sector_norms,
        by_sector,
        dominant,
        composites: report.composites.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::to_dmatrix;
    use crate::ptm::{
        amplitude_damping_ptm, ptm_unitary, rotation_unitary, thermal_excitation_ptm,
    };
    use nalgebra::Vector4;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn projector_ptm(c: usize) -> Matrix4<f64> {
        to_matrix4(&ptm_from_action(1, |rho| {
            let p = if c == 0 { op_p0() } else { op_p1() };
            &p * rho * &p
        }))
    }

    /// Diagnostic dump of the constructed basis: run with
    /// `cargo test dump_basis -- --ignored --nocapture`.
    #[test]
    #[ignore]
    fn dump_basis_diagnostics() {
        let coord_name = |idx: usize| -> String {
            let (q, r, c) = if idx < 16 {
                (0, idx / 4, idx % 4)
            } else {
                (1, 1 + (idx - 16) / 4, (idx - 16) % 4)
            };
            let p = ["I", "X", "Y", "Z"];
            format!("Q{}[{},{}]", q, p[r], p[c])
        };
        for row in 0..N_FOMGI {
            let (dev, corr) = constructed_deviation(row);
            let v = vec28(&dev);
            let reference = reference_action(row);
            let rv = vec28(&reference);
            let diff = (&v - &rv).amax();
            print!(
                "{:<14} corrected={:<5} |ref-built|={:.2e} built:",
                SPECS[row].name, corr, diff
            );
            for i in 0..N_FOMGI {
                if v[i].abs() > 1e-12 {
                    print!(" {}={:+.3}", coord_name(i), v[i]);
                }
            }
            println!();
            if diff > 1e-10 {
                print!("  reference:");
                for i in 0..N_FOMGI {
                    if rv[i].abs() > 1e-12 {
                        print!(" {}={:+.3}", coord_name(i), rv[i]);
                    }
                }
                println!();
            }
        }
        // Decomposition of all 240 generators vs the frozen table.
        let mut f = RMat::zeros(N_FOMGI, N_FOMGI);
        for row in 0..N_FOMGI {
            let (dev, _) = constructed_deviation(row);
            f.set_column(row, &vec28(&dev));
        }
        let f_inv = f.try_inverse().expect("invertible");
        let eegs = all_eegs(2);
        let mut expected = vec![vec![0.0_f64; eegs.len()]; N_FOMGI];
        for (j, combo) in COMBINATIONS.iter().enumerate() {
            for (label, coeff) in combo.iter() {
                let target = parse_compact(label);
                let k = eegs.iter().position(|e| *e == target).unwrap();
                expected[j][k] = *coeff;
            }
        }
        let mut bad = 0;
        for (k, eeg) in eegs.iter().enumerate() {
            let coeffs = &f_inv * vec28(&gadget::eeg_deviation(eeg));
            for j in 0..N_FOMGI {
                if (coeffs[j] - expected[j][k]).abs() > 1e-9 {
                    println!(
                        "combo mismatch: {:<8} onto {:<14} built {:+.4} table {:+}",
                        eeg.label(2),
                        SPECS[j].name,
                        coeffs[j],
                        expected[j][k]
                    );
                    bad += 1;
                }
            }
        }
        println!("combination mismatches: {bad}");
    }

    #[test]
    fn basis_builds_and_duality_holds() {
        let b = basis();
        assert!(b.condition.is_finite());
        assert!(b.condition < 100.0, "condition {}", b.condition);
        // <dual_i, vec28(dev_j)> = delta_ij to 1e-12.
        for i in 0..N_FOMGI {
            let dual = b.dual_row(i);
            for j in 0..N_FOMGI {
                let pairing = dual.dot(&vec28(&b.deviations[j]));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (pairing - expect).abs() < 1e-12,
                    "duality failed at ({i},{j}): {pairing}"
                );
            }
        }
    }

    #[test]
    fn unit_actions_match_reference() {
        for row in 0..N_FOMGI {
            let (dev, _) = constructed_deviation(row);
            let reference = reference_action(row);
            let d = ((dev[0] - reference[0]).amax()).max((dev[1] - reference[1]).amax());
            assert!(d < 1e-12, "{}: action off by {d:.3e}", SPECS[row].name);
        }
    }

    #[test]
    fn correction_applied_only_when_base_violates_tp() {
        let b = basis();
        // H-sector representatives never need a correction.
        for (j, spec) in SPECS.iter().enumerate() {
            if spec.rep.starts_with("h_") {
                assert!(!b.corrected[j], "{} should not be corrected", spec.name);
            }
        }
        // All S-sector representatives do.
        for (j, spec) in SPECS.iter().enumerate() {
            if spec.rep.starts_with("s_") {
                assert!(b.corrected[j], "{} needs its trace correction", spec.name);
            }
        }
    }

    #[test]
    fn equivalence_classes_collapse() {
        // S_IX and S_IY crunch identically, so their strength vectors agree
        // exactly.
        let a = extract(&gadget::eeg_deviation(&Eeg::s(1))).unwrap();
        let b = extract(&gadget::eeg_deviation(&Eeg::s(2))).unwrap();
        for i in 0..N_FOMGI {
            assert!((a.strengths[i] - b.strengths[i]).abs() < 1e-12);
        }
        // Both are pure s_read with unit coefficient.
        assert!((a.strength("s_read").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_random_strengths() {
        let b = basis();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..1000 {
            let lam: Vec<f64> = (0..N_FOMGI).map(|_| rng.random_range(-0.01..0.01)).collect();
            let dev = b.assemble(&lam);
            let rep = extract(&dev).unwrap();
            for i in 0..N_FOMGI {
                assert!(
                    (rep.strengths[i] - lam[i]).abs() <= 1e-10,
                    "strength {i} off: {} vs {}",
                    rep.strengths[i],
                    lam[i]
                );
            }
            assert!(rep.reconstruction_residual <= 1e-10);
        }
    }

    #[test]
    fn pure_s_read_extraction() {
        let b = basis();
        let j = index_of("s_read").unwrap();
        let dev = [b.deviations[j][0] * 0.01, b.deviations[j][1] * 0.01];
        let rep = extract(&dev).unwrap();
        for (i, s) in rep.strengths.iter().enumerate() {
            let expect = if i == j { 0.01 } else { 0.0 };
            assert!((s - expect).abs() < 1e-12, "{}: {}", SPECS[i].name, s);
        }
        assert!(rep.tp_violation < 1e-14);
    }

    #[test]
    fn damping_composite_unit_action() {
        // The decay composite 2*Lambda(s_meas) - Lambda(a_meas) has unit
        // action {4 rho11 |0><0|, -4 rho11 |1><1|}.
        let b = basis();
        let sm = &b.deviations[index_of("s_meas").unwrap()];
        let am = &b.deviations[index_of("a_meas").unwrap()];
        let combo = [sm[0] * 2.0 - am[0], sm[1] * 2.0 - am[1]];
        let expect = act2(
            |r| op_p0() * (4.0 * r11(r)),
            |r| op_p1() * (-4.0 * r11(r)),
        );
        assert!((combo[0] - expect[0]).amax() < 1e-12);
        assert!((combo[1] - expect[1]).amax() < 1e-12);
        // At coefficient 0.02 the extracted strengths are {0.04, -0.02}.
        let dev = [combo[0] * 0.02, combo[1] * 0.02];
        let rep = extract(&dev).unwrap();
        assert!((rep.strength("s_meas").unwrap() - 0.04).abs() < 1e-12);
        assert!((rep.strength("a_meas").unwrap() + 0.02).abs() < 1e-12);
    }

    /// Deviation of the instrument `Q_c = post_c · Π_c · pre` from ideal.
    fn instrument_deviation(
        pre: &Matrix4<f64>,
        post: [&Matrix4<f64>; 2],
    ) -> [Matrix4<f64>; 2] {
        let p0 = projector_ptm(0);
        let p1 = projector_ptm(1);
        [post[0] * p0 * pre - p0, post[1] * p1 * pre - p1]
    }

    fn mat4(m: &RMat) -> Matrix4<f64> {
        to_matrix4(m)
    }

    #[test]
    fn pre_mcm_damping_calibration_is_exact() {
        let eye = Matrix4::identity();
        for gamma in [0.005, 0.02, 0.2] {
            let d = mat4(&amplitude_damping_ptm(gamma));
            let dev = instrument_deviation(&d, [&eye, &eye]);
            let rep = extract(&dev).unwrap();
            assert!((rep.strength("s_meas").unwrap() - gamma / 2.0).abs() < 1e-12);
            assert!((rep.strength("a_meas").unwrap() + gamma / 4.0).abs() < 1e-12);
            assert!((rep.composite("pre_mcm_t1").unwrap() - gamma).abs() < 1e-12);
            assert!(rep.composite("pre_mcm_thermal").unwrap().abs() < 1e-12);
            assert!(rep.composite("post_mcm_t1").unwrap().abs() < 1e-12);
            // No rotation or weakness content.
            assert!(rep.composite("weakness_magnitude").unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn post_mcm_damping_calibration_is_exact() {
        let eye = Matrix4::identity();
        for gamma in [0.01, 0.1] {
            let d = mat4(&amplitude_damping_ptm(gamma));
            let dev = instrument_deviation(&eye, [&d, &d]);
            let rep = extract(&dev).unwrap();
            assert!((rep.strength("s_prep").unwrap() - gamma / 2.0).abs() < 1e-12);
            assert!((rep.strength("a_prep").unwrap() + gamma / 4.0).abs() < 1e-12);
            assert!((rep.composite("post_mcm_t1").unwrap() - gamma).abs() < 1e-12);
            assert!(rep.composite("post_mcm_thermal").unwrap().abs() < 1e-12);
            assert!(rep.composite("pre_mcm_t1").unwrap().abs() < 1e-12);
            assert!((rep.composite("total_t1").unwrap() - gamma).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_composites_calibrated() {
        let eye = Matrix4::identity();
        let gamma = 0.03;
        let up = mat4(&thermal_excitation_ptm(gamma));
        let pre = extract(&instrument_deviation(&up, [&eye, &eye])).unwrap();
        assert!((pre.composite("pre_mcm_thermal").unwrap() - gamma).abs() < 1e-12);
        assert!(pre.composite("pre_mcm_t1").unwrap().abs() < 1e-12);
        let post = extract(&instrument_deviation(&eye, [&up, &up])).unwrap();
        assert!((post.composite("post_mcm_thermal").unwrap() - gamma).abs() < 1e-12);
        assert!(post.composite("post_mcm_t1").unwrap().abs() < 1e-12);
    }

    #[test]
    fn readout_flip_composites_calibrated() {
        // Record flips: 0->1 with probability p, 1->0 with probability q.
        let (p, q) = (0.013, 0.004);
        let p0 = projector_ptm(0);
        let p1 = projector_ptm(1);
        let dev = [p0 * (-p) + p1 * q, p0 * p + p1 * (-q)];
        let rep = extract(&dev).unwrap();
        assert!((rep.composite("readout_flip_0to1").unwrap() - p).abs() < 1e-12);
        assert!((rep.composite("readout_flip_1to0").unwrap() - q).abs() < 1e-12);
        assert!((rep.composite("pure_readout").unwrap() - (p + q) / 2.0).abs() < 1e-12);
        assert!((rep.strength("a_read").unwrap() - (p - q) / 4.0).abs() < 1e-12);
        assert!(rep.composite("pre_mcm_t1").unwrap().abs() < 1e-12);
    }

    #[test]
    fn measurement_rotation_composites_calibrated() {
        let eye = Matrix4::identity();
        let theta = 0.07;
        for (axis, name, other) in [(1usize, "rot_x_meas", "rot_y_meas"), (2, "rot_y_meas", "rot_x_meas")] {
            let r = mat4(&ptm_unitary(&rotation_unitary(axis, theta)));
            let rep = extract(&instrument_deviation(&r, [&eye, &eye])).unwrap();
            assert!(
                (rep.composite(name).unwrap() - theta.sin()).abs() < 1e-12,
                "{name}: {}",
                rep.composite(name).unwrap()
            );
            assert!(rep.composite(other).unwrap().abs() < 1e-12);
            // Post-measurement rotation composites stay silent.
            assert!(rep.composite("rot_x_prep_c0").unwrap().abs() < 1e-12);
            assert!(rep.composite("rot_y_prep_c1").unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn branch_rotation_composites_calibrated() {
        let (phi0, phi1) = (0.05, -0.03);
        for (axis, c0, c1, off0, off1) in [
            (1usize, "rot_x_prep_c0", "rot_x_prep_c1", "rot_y_prep_c0", "rot_y_prep_c1"),
            (2, "rot_y_prep_c0", "rot_y_prep_c1", "rot_x_prep_c0", "rot_x_prep_c1"),
        ] {
            let eye = Matrix4::identity();
            let r0 = mat4(&ptm_unitary(&rotation_unitary(axis, phi0)));
            let r1 = mat4(&ptm_unitary(&rotation_unitary(axis, phi1)));
            let rep = extract(&instrument_deviation(&eye, [&r0, &r1])).unwrap();
            assert!(
                (rep.composite(c0).unwrap() - phi0.sin()).abs() < 1e-12,
                "{c0}: {} vs {}",
                rep.composite(c0).unwrap(),
                phi0.sin()
            );
            assert!(
                (rep.composite(c1).unwrap() - phi1.sin()).abs() < 1e-12,
                "{c1}: {} vs {}",
                rep.composite(c1).unwrap(),
                phi1.sin()
            );
            assert!(rep.composite(off0).unwrap().abs() < 1e-12);
            assert!(rep.composite(off1).unwrap().abs() < 1e-12);
            assert!(rep.composite("rot_x_meas").unwrap().abs() < 1e-12);
            assert!(rep.composite("rot_y_meas").unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn weakness_from_zy_rotation() {
        // A weak-measurement core: exp(theta/2 * H_ZY) crunched. Its
        // first-order content is pure w0 at strength theta/2.
        let theta = 0.08;
        let gen = Eeg::h(14).matrix(2) * (theta / 2.0);
        let inst = gadget::crunch(&crate::linalg::expm(&gen));
        let rep = extract(&inst.deviation()).unwrap();
        let summary = classify(&rep);
        let (name, _) = summary.dominant.unwrap();
        assert_eq!(name, "w0");
        assert!((rep.strength("w0").unwrap() - theta / 2.0).abs() < 1e-4);
        assert!(rep.composite("weakness_magnitude").unwrap() > 0.03);
        // W sector carries essentially all the weight.
        let w_norm = summary
            .sector_norms
            .iter()
            .find(|(s, _)| *s == Sector::W)
            .unwrap()
            .1;
        assert!(w_norm > 10.0 * (rep.composite("pre_mcm_t1").unwrap().abs() + 1e-12));
    }

    #[test]
    fn delta_p_columns_match() {
        // Probability shifts Delta p_c = first row of Lambda_c applied to the
        // state: prep-type deviations cause none, meas-type ones match their
        // hand-written traces.
        let b = basis();
        let states: Vec<Vector4<f64>> = vec![
            Vector4::new(1.0, 0.0, 0.0, 1.0) / 2f64.sqrt(),
            Vector4::new(1.0, 1.0, 0.0, 0.0) / 2f64.sqrt(),
            Vector4::new(1.0, 0.0, -1.0, 0.0) / 2f64.sqrt(),
        ];
        for name in ["s_prep", "a_prep", "rx_ind_prep", "rt_x_dep_prep", "rt_xz_meas", "w0"] {
            let dev = &b.deviations[index_of(name).unwrap()];
            for r in &states {
                for c in 0..2 {
                    let dp = 2f64.sqrt() * (dev[c] * r)[0];
                    assert!(dp.abs() < 1e-12, "{name} outcome {c}: dp = {dp}");
                }
            }
        }
        // s_meas: dp_0 = -z, dp_1 = +z.
        let sm = &b.deviations[index_of("s_meas").unwrap()];
        let plus = Vector4::new(1.0, 1.0, 0.0, 0.0) / 2f64.sqrt();
        let zero = Vector4::new(1.0, 0.0, 0.0, 1.0) / 2f64.sqrt();
        let z_of = |r: &Vector4<f64>| 2f64.sqrt() * r[3] / 2f64.sqrt() * 2f64.sqrt();
        for r in [&zero, &plus] {
            let z = z_of(r);
            assert!((2f64.sqrt() * (sm[0] * r)[0] + z).abs() < 1e-12);
            assert!((2f64.sqrt() * (sm[1] * r)[0] - z).abs() < 1e-12);
        }
        // rx_meas: dp_0 = +y.
        let rx = &b.deviations[index_of("rx_meas").unwrap()];
        let y_state = Vector4::new(1.0, 0.0, 0.8, 0.0) / 2f64.sqrt();
        let y = 2f64.sqrt() * y_state[2] / 2f64.sqrt() * 2f64.sqrt();
        assert!((2f64.sqrt() * (rx[0] * y_state)[0] - y).abs() < 1e-12);
    }

    #[test]
    fn dual_closed_forms() {
        let b = basis();
        let v = |name: &str| vec28(&b.deviations[index_of(name).unwrap()]);
        let dual = |name: &str| b.dual_row(index_of(name).unwrap());
        // S triple.
        assert!((dual("s_meas") - (v("s_meas") * 2.0 - v("s_prep")) / 4.0).amax() < 1e-12);
        assert!(
            (dual("s_prep") - (v("s_prep") * 2.0 - v("s_meas") - v("s_read")) / 4.0).amax()
                < 1e-12
        );
        assert!((dual("s_read") - (v("s_read") * 2.0 - v("s_prep")) / 4.0).amax() < 1e-12);
        // Proportional rows: dual = primal / 4.
        for name in [
            "rx_ind_prep",
            "rx_dep_prep",
            "ry_ind_prep",
            "ry_dep_prep",
            "rt_x_ind_prep",
            "rt_x_dep_prep",
            "rt_y_ind_prep",
            "rt_y_dep_prep",
            "w0",
            "w1",
            "w2",
            "w3",
            "wt0",
            "wt1",
            "wt2",
            "wt3",
        ] {
            assert!(
                (dual(name) - v(name) / 4.0).amax() < 1e-12,
                "dual({name}) is not primal/4"
            );
        }
        // Diagonal rotation rows: dual = primal / 8.
        for name in ["rt_xz_meas", "rt_yz_meas"] {
            assert!((dual(name) - v(name) / 8.0).amax() < 1e-12);
        }
        // Measurement rotation pairs mix: dual = (3 primal - partner) / 8.
        for (a, b) in [("rx_meas", "rt_x_meas"), ("ry_meas", "rt_y_meas")] {
            assert!((dual(a) - (v(a) * 3.0 - v(b)) / 8.0).amax() < 1e-12);
            assert!((dual(b) - (v(b) * 3.0 - v(a)) / 8.0).amax() < 1e-12);
        }
        // A triple: same tridiagonal pattern as the S triple, denominator 16.
        let (am, ap, ar) = (v("a_meas"), v("a_prep"), v("a_read"));
        assert!((dual("a_meas") - (&am * 2.0 - &ap) / 16.0).amax() < 1e-12);
        assert!((dual("a_prep") - (&ap * 2.0 - &am - &ar) / 16.0).amax() < 1e-12);
        assert!((dual("a_read") - (&ar * 2.0 - &ap) / 16.0).amax() < 1e-12);
    }

    #[test]
    fn extract_rejects_non_tp_input() {
        let mut dev = [Matrix4::zeros(), Matrix4::zeros()];
        dev[0][(0, 0)] = 1e-3;
        assert!(matches!(
            extract(&dev),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn classify_zero_and_grouping() {
        let rep = extract(&[Matrix4::zeros(), Matrix4::zeros()]).unwrap();
        let summary = classify(&rep);
        assert!(summary.dominant.is_none());
        for (_, norm) in &summary.sector_norms {
            assert!(*norm == 0.0);
        }
        assert_eq!(summary.by_sector.len(), 6);
        let n_labels: usize = summary.by_sector.iter().map(|(_, v)| v.len()).sum();
        assert_eq!(n_labels, N_FOMGI);
    }

    #[test]
    fn report_serialization() {
        let b = basis();
        let j = index_of("s_meas").unwrap();
        let dev = [b.deviations[j][0] * 0.003, b.deviations[j][1] * 0.003];
        let mut rep = extract(&dev).unwrap();
        rep.uncertainties = Some(vec![1e-4; N_FOMGI]);
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 29);
        assert_eq!(lines[0], "label,sector,strength,2sigma");
        assert!(lines[1].starts_with("s_meas,S,"));
        assert!(lines[28].starts_with("wt3,Wt,"));
        let json = rep.to_json_value();
        assert_eq!(json["strengths"].as_array().unwrap().len(), N_FOMGI);
        assert!((json["strengths"][0]["strength"].as_f64().unwrap() - 0.003).abs() < 1e-12);
        let text = serde_json::to_string(&rep).unwrap();
        let back: ErrorStrengthReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.strengths.len(), N_FOMGI);
    }

    #[test]
    fn build_basis_is_fast_enough() {
        let t0 = std::time::Instant::now();
        let b = build_basis().unwrap();
        assert_eq!(b.deviations.len(), N_FOMGI);
        assert!(t0.elapsed().as_secs_f64() < 1.0, "basis build too slow");
    }

    #[test]
    fn random_instrument_round_trip_through_crunch() {
        // Small random two-qubit generator -> crunch -> extract -> assemble
        // reproduces the deviation's TP-projected part.
        let mut rng = StdRng::seed_from_u64(7);
        let rates: Vec<f64> = (0..240).map(|_| rng.random_range(-2e-3..2e-3)).collect();
        let gen = crate::errorgen::generator_from_rates(2, &rates);
        let inst = gadget::crunch(&crate::linalg::expm(&gen));
        let dev = inst.deviation();
        let rep = extract(&dev).unwrap();
        let b = basis();
        let recon = b.assemble(&rep.strengths);
        assert!((vec28(&recon) - vec28(&dev)).amax() < 1e-12);
        let _ = to_dmatrix(&dev[0]);
    }
}
