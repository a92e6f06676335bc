//! Circuit representation: linear sequences of named operations.
//!
//! A circuit is a list of [`Op`]s applied left to right. Mid-circuit
//! measurements ([`Op::Mcm`]) may appear anywhere; the terminal measurement
//! ([`Op::Measure`]) must be the last operation. Outcome strings concatenate
//! the MCM outcomes in temporal order followed by the terminal outcome, and
//! outcome indices read those strings as big-endian binary (first MCM bit is
//! the most significant).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A single circuit operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// Idle gate.
    Gi,
    /// X-axis pi/2 rotation.
    Gx,
    /// Y-axis pi/2 rotation.
    Gy,
    /// Mid-circuit measurement (quantum instrument).
    Mcm,
    /// Terminal computational-basis measurement.
    Measure,
}

impl Op {
    /// Canonical text label.
    pub fn label(self) -> &'static str {
        match self {
            Op::Gi => "Gi",
            Op::Gx => "Gx",
            Op::Gy => "Gy",
            Op::Mcm => "MCM",
            Op::Measure => "M",
        }
    }

    /// Parse a canonical label.
    pub fn parse(label: &str) -> Result<Op> {
        match label {
            "Gi" => Ok(Op::Gi),
            "Gx" => Ok(Op::Gx),
            "Gy" => Ok(Op::Gy),
            "MCM" => Ok(Op::Mcm),
            "M" => Ok(Op::Measure),
            other => Err(Error::UnknownLabel(format!("unknown operation '{other}'"))),
        }
    }

    /// True for the three unitary-gate labels (Gi, Gx, Gy).
    pub fn is_gate(self) -> bool {
        matches!(self, Op::Gi | Op::Gx | Op::Gy)
    }
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Op {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Op {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Op, D::Error> {
        let s = String::deserialize(d)?;
        Op::parse(&s).map_err(D::Error::custom)
    }
}

/// A circuit: an ordered list of operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit(pub Vec<Op>);

impl Circuit {
    /// Build from a list of operations.
    pub fn new(ops: Vec<Op>) -> Circuit {
        Circuit(ops)
    }

    /// Empty circuit (no operations).
    pub fn empty() -> Circuit {
        Circuit(Vec::new())
    }

    /// The operations.
    pub fn ops(&self) -> &[Op] {
        &self.0
    }

    /// Number of mid-circuit measurements.
    pub fn n_mcm(&self) -> usize {
        self.0.iter().filter(|&&op| op == Op::Mcm).count()
    }

    /// True if the circuit ends with the terminal measurement.
    pub fn has_terminal(&self) -> bool {
        self.0.last() == Some(&Op::Measure)
    }

    /// Validate the shape required for probability evaluation: exactly one
    /// terminal measurement, in final position.
    pub fn validate(&self) -> Result<()> {
        let n_term = self.0.iter().filter(|&&op| op == Op::Measure).count();
        if n_term != 1 || !self.has_terminal() {
            return Err(Error::Dimension(format!(
                "circuit '{self}' must contain exactly one terminal measurement, in final position"
            )));
        }
        Ok(())
    }

    /// Number of measurement outcomes: 2^(n_mcm + 1) for a terminated circuit.
    pub fn n_outcomes(&self) -> usize {
        1 << (self.n_mcm() + 1)
    }

    /// Outcome bit strings in index order: MCM bits in temporal order followed
    /// by the terminal bit, read as a big-endian binary index.
    pub fn outcome_strings(&self) -> Vec<String> {
        let bits = self.n_mcm() + 1;
        (0..self.n_outcomes())
            .map(|idx| {
                (0..bits)
                    .rev()
                    .map(|b| if (idx >> b) & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Parse a ":"-joined sequence of operation labels, e.g. `"Gx:MCM:Gy:M"`.
    /// The empty string parses to the empty circuit.
    pub fn parse(text: &str) -> Result<Circuit> {
        if text.is_empty() {
            return Ok(Circuit::empty());
        }
        let ops = text.split(':').map(Op::parse).collect::<Result<Vec<_>>>()?;
        Ok(Circuit(ops))
    }
}

impl std::fmt::Display for Circuit {
    /// Joins labels with ":" (the empty circuit displays as the empty string).
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<&str> = self.0.iter().map(|op| op.label()).collect();
        f.write_str(&labels.join(":"))
    }
}
