//! Numeric gate sets: state preparation, gates, instrument, terminal POVM,
//! and circuit probability evaluation by outcome-branch enumeration.

use nalgebra::{Matrix4, Vector4};

use crate::circuit::{Circuit, Op};
use crate::instrument::{to_dmatrix, to_matrix4, Instrument};
use crate::ptm::{self, CP_TOL};
use crate::{Error, Result};

/// Index of a gate inside [`GateSet::gates`].
pub const GATE_I: usize = 0;
/// Index of the X pi/2 gate.
pub const GATE_X: usize = 1;
/// Index of the Y pi/2 gate.
pub const GATE_Y: usize = 2;

/// Map an [`Op`] to its gate index; `None` for measurements.
pub fn gate_index(op: Op) -> Option<usize> {
    match op {
        Op::Gi => Some(GATE_I),
        Op::Gx => Some(GATE_X),
        Op::Gy => Some(GATE_Y),
        Op::Mcm | Op::Measure => None,
    }
}

/// A fully materialized single-qubit gate set with one quantum instrument.
///
/// All operators are stored in the Pauli transfer representation. `post_gates`
/// holds the context-dependent gate variants used at circuit positions after
/// an MCM (e.g. gates dressed with a measurement-induced Z-rotation); when
/// `None`, `gates` is used everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSet {
    /// Prepared state, as a Pauli coordinate vector.
    pub rho: Vector4<f64>,
    /// Terminal POVM effects for outcomes 0 and 1.
    pub effects: [Vector4<f64>; 2],
    /// Gate PTMs indexed by [`GATE_I`], [`GATE_X`], [`GATE_Y`].
    pub gates: [Matrix4<f64>; 3],
    /// The mid-circuit measurement instrument.
    pub instrument: Instrument,
    /// Gate variants applied after an MCM, if context-dependent.
    pub post_gates: Option<[Matrix4<f64>; 3]>,
}

impl GateSet {
    /// The ideal gate set: |0> preparation, exact pi/2 pulses, projective
    /// Z-basis instrument and POVM.
    pub fn ideal() -> GateSet {
        let gx = ptm::ptm_unitary(&ptm::rotation_unitary(1, std::f64::consts::FRAC_PI_2));
        let gy = ptm::ptm_unitary(&ptm::rotation_unitary(2, std::f64::consts::FRAC_PI_2));
        GateSet {
            rho: Vector4::from_iterator(ptm::ground_state_vec().iter().copied()),
            effects: [
                Vector4::from_iterator(ptm::z_effect_vec(0).iter().copied()),
                Vector4::from_iterator(ptm::z_effect_vec(1).iter().copied()),
            ],
            gates: [Matrix4::identity(), to_matrix4(&gx), to_matrix4(&gy)],
            instrument: Instrument::ideal(),
            post_gates: None,
        }
    }

    /// The gate PTM used at a given circuit context.
    pub fn gate(&self, idx: usize, after_mcm: bool) -> &Matrix4<f64> {
        match (&self.post_gates, after_mcm) {
            (Some(post), true) => &post[idx],
            _ => &self.gates[idx],
        }
    }

    /// Replace the post-MCM gate context with Z-rotation-dressed variants:
    /// every gate applied after an MCM acquires an extra Z rotation by `phi`
    /// radians (applied after the gate). `phi = 0` clears the context.
    pub fn with_stark(&self, phi: f64) -> GateSet {
        let mut out = self.clone();
        if phi == 0.0 {
            out.post_gates = None;
            return out;
        }
        let rz = to_matrix4(&ptm::ptm_unitary(&ptm::rotation_unitary(3, phi)));
        out.post_gates = Some([rz * self.gates[0], rz * self.gates[1], rz * self.gates[2]]);
        out
    }

    /// Outcome probabilities for `circuit`, ordered by outcome index (MCM bits
    /// big-endian, terminal bit last). The circuit must validate.
    pub fn probabilities(&self, circuit: &Circuit) -> Result<Vec<f64>> {
        circuit.validate()?;
        // Each branch carries the (subnormalized) conditional state for one
        // MCM outcome prefix; branches are ordered by prefix index.
        let mut branches: Vec<Vector4<f64>> = vec![self.rho];
        let mut after_mcm = false;
        for &op in circuit.ops() {
            match op {
                Op::Gi | Op::Gx | Op::Gy => {
                    let g = self.gate(gate_index(op).unwrap(), after_mcm);
                    for r in &mut branches {
                        *r = g * *r;
                    }
                }
                Op::Mcm => {
                    after_mcm = true;
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for r in &branches {
                        next.push(self.instrument.q[0] * r);
                        next.push(self.instrument.q[1] * r);
                    }
                    branches = next;
                }
                Op::Measure => {
                    let mut probs = Vec::with_capacity(branches.len() * 2);
                    for r in &branches {
                        probs.push(self.effects[0].dot(r));
                        probs.push(self.effects[1].dot(r));
                    }
                    return Ok(probs);
                }
            }
        }
        unreachable!("validated circuit ends with a terminal measurement");
    }

    /// Validate physicality: CP instrument elements summing to a TP map, CP/TP
    /// gates, unit-trace state, and POVM effects summing to the identity.
    pub fn validate(&self, cp_tol: f64, tp_tol: f64) -> Result<()> {
        self.instrument.validate(cp_tol, tp_tol)?;
        for g in self
            .gates
            .iter()
            .chain(self.post_gates.iter().flat_map(|p| p.iter()))
        {
            let gd = to_dmatrix(g);
            ptm::check_cp(&gd, cp_tol)?;
            ptm::check_tp(&gd, tp_tol)?;
        }
        let trace = self.rho[0] * std::f64::consts::SQRT_2;
        if (trace - 1.0).abs() > tp_tol {
            return Err(Error::NotTracePreserving((trace - 1.0).abs()));
        }
        let esum = self.effects[0] + self.effects[1];
        let ident = Vector4::new(std::f64::consts::SQRT_2, 0.0, 0.0, 0.0);
        if (esum - ident).norm() > tp_tol {
            return Err(Error::NotTracePreserving((esum - ident).norm()));
        }
        Ok(())
    }

    /// Convenience wrapper using the library CP tolerance.
    pub fn validate_default(&self) -> Result<()> {
        self.validate(CP_TOL, 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    /// Independent density-matrix oracle: complex 2x2 states, unitary gates,
    /// projective MCM with classical readout flip.
    fn oracle_probs(circuit: &Circuit, readout_flip: f64) -> Vec<f64> {
        let c = |re: f64| Complex64::new(re, 0.0);
        let gx: CMat = ptm::rotation_unitary(1, std::f64::consts::FRAC_PI_2);
        let gy: CMat = ptm::rotation_unitary(2, std::f64::consts::FRAC_PI_2);
        let proj = [
            CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]),
            CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]),
        ];
        let rho0 = proj[0].clone();
        // branches: (subnormalized rho, outcome prefix index)
        let mut branches = vec![(rho0, 0usize)];
        for &op in circuit.ops() {
            match op {
                Op::Gi => {}
                Op::Gx | Op::Gy => {
                    let u = if op == Op::Gx { &gx } else { &gy };
                    for (rho, _) in &mut branches {
                        *rho = u * rho.clone() * u.adjoint();
                    }
                }
                Op::Mcm => {
                    let mut next = Vec::new();
                    for (rho, idx) in &branches {
                        // collapse outcomes, then mix classically by the flip
                        let post = [
                            &proj[0] * rho * &proj[0],
                            &proj[1] * rho * &proj[1],
                        ];
                        for c_out in 0..2 {
                            let kept = &post[c_out] * c(1.0 - readout_flip)
                                + &post[1 - c_out] * c(readout_flip);
                            next.push((kept, idx * 2 + c_out));
                        }
                    }
                    branches = next;
                }
                Op::Measure => {
                    let mut probs = vec![0.0; branches.len() * 2];
                    for (rho, idx) in &branches {
                        for b in 0..2 {
                            let p = (&proj[b] * rho).trace().re;
                            probs[idx * 2 + b] = p;
                        }
                    }
                    return probs;
                }
            }
        }
        unreachable!()
    }

    fn flip_instrument(p: f64) -> Instrument {
        let ideal = Instrument::ideal();
        Instrument {
            q: [
                ideal.q[0] * (1.0 - p) + ideal.q[1] * p,
                ideal.q[1] * (1.0 - p) + ideal.q[0] * p,
            ],
        }
    }

    #[test]
    fn ideal_matches_density_matrix_oracle() {
        let gs = GateSet::ideal();
        for text in [
            "M",
            "Gx:M",
            "Gy:M",
            "Gx:Gx:M",
            "MCM:M",
            "Gx:MCM:M",
            "Gx:MCM:Gx:M",
            "Gy:MCM:Gy:Gy:M",
            "Gx:MCM:Gy:MCM:Gx:M",
            "Gi:Gx:Gx:Gx:MCM:Gy:M",
        ] {
            let circuit = Circuit::parse(text).unwrap();
            let got = gs.probabilities(&circuit).unwrap();
            let want = oracle_probs(&circuit, 0.0);
            assert_eq!(got.len(), want.len());
            let total: f64 = got.iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            for (g, w) in got.iter().zip(&want) {
                assert_abs_diff_eq!(g, w, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ideal_mcm_is_deterministic_from_ground() {
        let gs = GateSet::ideal();
        let probs = gs
            .probabilities(&Circuit::parse("MCM:M").unwrap())
            .unwrap();
        assert_abs_diff_eq!(probs[0], 1.0, epsilon = 1e-14);
        for p in &probs[1..] {
            assert_abs_diff_eq!(*p, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn readout_flip_matches_oracle() {
        let p = 0.1;
        let mut gs = GateSet::ideal();
        gs.instrument = flip_instrument(p);
        gs.validate_default().unwrap();
        for text in ["MCM:M", "Gx:MCM:M", "Gx:MCM:Gx:M", "MCM:MCM:M"] {
            let circuit = Circuit::parse(text).unwrap();
            let got = gs.probabilities(&circuit).unwrap();
            let want = oracle_probs(&circuit, p);
            for (g, w) in got.iter().zip(&want) {
                assert_abs_diff_eq!(g, w, epsilon = 1e-12);
            }
        }
        // [MCM, M] from |0>: P(10) + P(01) = p exactly (flip on the MCM record
        // only; the collapsed state still yields the matching terminal bit).
        let probs = gs
            .probabilities(&Circuit::parse("MCM:M").unwrap())
            .unwrap();
        assert_abs_diff_eq!(probs[1] + probs[2], p, epsilon = 1e-12);
    }

    #[test]
    fn stark_context_affects_only_post_mcm_gates() {
        let gs = GateSet::ideal();
        let dressed = gs.with_stark(0.1);
        // Gates after the MCM: predictions differ. Two Gx pulses are needed to
        // expose the Z rotation (a single Rz just before the Z-basis terminal
        // measurement is invisible).
        let after = Circuit::parse("MCM:Gx:Gx:M").unwrap();
        let p0 = gs.probabilities(&after).unwrap();
        let p1 = dressed.probabilities(&after).unwrap();
        assert!(
            p0.iter()
                .zip(&p1)
                .any(|(a, b)| (a - b).abs() > 1e-4),
            "post-MCM gate must feel the Z rotation"
        );
        // gate before the MCM: identical predictions
        let before = Circuit::parse("Gx:MCM:M").unwrap();
        let q0 = gs.probabilities(&before).unwrap();
        let q1 = dressed.probabilities(&before).unwrap();
        for (a, b) in q0.iter().zip(&q1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        // phi = 0 restores the plain gate set
        assert_eq!(gs.with_stark(0.0), gs);
    }

    #[test]
    fn stark_oracle_cross_check() {
        // Brute-force oracle for the dressed circuit [MCM, Gx, M]: after the
        // MCM collapse the state is |0><0|; Rz(phi) Gx |0><0| then measure.
        let phi = 0.3;
        let gs = GateSet::ideal().with_stark(phi);
        let probs = gs
            .probabilities(&Circuit::parse("MCM:Gx:M").unwrap())
            .unwrap();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let gx: CMat = ptm::rotation_unitary(1, std::f64::consts::FRAC_PI_2);
        let rz: CMat = ptm::rotation_unitary(3, phi);
        let u = &rz * &gx;
        let psi0 = CMat::from_row_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let out = &u * &psi0;
        let p00 = out[(0, 0)].norm_sqr();
        let p01 = out[(1, 0)].norm_sqr();
        assert_abs_diff_eq!(probs[0], p00, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], p01, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[2], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(probs[3], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn gate_ptms_match_table_targets() {
        // Gx maps Z -> -Y -> ... ; spot-check action on Pauli axes.
        let gs = GateSet::ideal();
        let z = Vector4::new(0.0, 0.0, 0.0, 1.0);
        let gx_z = gs.gates[GATE_X] * z;
        assert_abs_diff_eq!(gx_z[2], -1.0, epsilon = 1e-14); // Z -> -Y
        let gy_z = gs.gates[GATE_Y] * z;
        assert_abs_diff_eq!(gy_z[1], 1.0, epsilon = 1e-14); // Z -> +X
    }

    #[test]
    fn validate_rejects_broken_sets() {
        let mut gs = GateSet::ideal();
        gs.effects[1][0] = 0.9; // POVM no longer sums to identity
        assert!(gs.validate_default().is_err());
        let mut gs2 = GateSet::ideal();
        gs2.gates[GATE_X][(1, 1)] = 1.5; // not CP
        assert!(gs2.validate_default().is_err());
    }
}
