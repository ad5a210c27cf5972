//! Exact joint distributions for single-signal eavesdropping attacks.
//!
//! Eve attacks each signal independently with probability `q` (the
//! interception fraction) and lets it pass otherwise. Alice's prior is
//! uniform; every measurement is the POVM `(d/n)|m_k><m_k|` of a tight frame.

mod anneal;
mod cloner;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frames::{povm_from_frame, Frame, StateVector};
use crate::info::JointDistribution;
use crate::protocol::Protocol;

pub use anneal::{optimize_cloner, unitary_from_generator, AnnealConfig, CloneOptimum, SYMMETRY_TOL};
pub use cloner::{
    average_clone_fidelity, bb84_paper_clone_states, bb84_reference_cloner, clone_overlaps, clone_symmetry_penalty,
    paper_trine_cloner, reduced_clone_fidelities, CloneUnitary,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    InterceptResend,
    Clone,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::InterceptResend => "intercept-resend",
            AttackKind::Clone => "clone",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intercept-resend" | "intercept_resend" | "ir" => Ok(AttackKind::InterceptResend),
            "clone" | "cloning" => Ok(AttackKind::Clone),
            _ => Err(Error::UnknownAttack(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    kind: AttackKind,
    q: f64,
    cloner: Option<CloneUnitary>,
}

impl AttackSpec {
    pub fn intercept_resend(q: f64) -> Result<Self> {
        check_fraction(q)?;
        Ok(Self {
            kind: AttackKind::InterceptResend,
            q,
            cloner: None,
        })
    }

    pub fn clone(q: f64, cloner: CloneUnitary) -> Result<Self> {
        check_fraction(q)?;
        Ok(Self {
            kind: AttackKind::Clone,
            q,
            cloner: Some(cloner),
        })
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn cloner(&self) -> Option<&CloneUnitary> {
        self.cloner.as_ref()
    }

    /// Joint distribution for `protocol` under this attack, using the
    /// protocol's standard frames for Alice, Bob and Eve.
    pub fn joint(&self, protocol: Protocol) -> Result<JointDistribution> {
        let signal = protocol.signal_frame();
        let bob = protocol.bob_frame();
        match self.kind {
            AttackKind::InterceptResend => intercept_resend_joint(&signal, &bob, &protocol.intercept_frame(), self.q),
            AttackKind::Clone => {
                let u = self.cloner.as_ref().ok_or(Error::MissingCloner)?;
                clone_joint(&signal, &bob, &protocol.clone_frame(), u, self.q)
            }
        }
    }
}

pub(crate) fn check_fraction(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidFraction(q));
    }
    Ok(())
}

fn check_dims(expected: usize, frames: &[&Frame]) -> Result<()> {
    match frames.iter().find(|f| f.dim() != expected) {
        Some(f) => Err(Error::DimensionMismatch {
            expected,
            actual: f.dim(),
        }),
        None => Ok(()),
    }
}

/// Squared overlaps below this are rounding residue of orthogonal states.
const ORTHOGONAL_FLOOR: f64 = 1e-30;

fn born(overlap_sq: f64) -> f64 {
    if overlap_sq < ORTHOGONAL_FLOOR {
        0.0
    } else {
        overlap_sq
    }
}

/// Intercept-resend: with probability `q` Eve measures her frame's POVM and
/// resends the state she observed; otherwise the signal passes and Eve
/// records the extra symbol `eve.len()`. The extra symbol is present only
/// when `q < 1`.
pub fn intercept_resend_joint(signal: &Frame, bob: &Frame, eve: &Frame, q: f64) -> Result<JointDistribution> {
    check_fraction(q)?;
    let d = signal.dim();
    check_dims(d, &[bob, eve])?;
    for f in [signal, bob, eve] {
        povm_from_frame(f)?;
    }

    let n = signal.len();
    let (nb, ne) = (bob.len(), eve.len());
    let wb = d as f64 / nb as f64;
    let we = d as f64 / ne as f64;
    let e_size = if q < 1.0 { ne + 1 } else { ne };

    JointDistribution::from_fn([n, nb, e_size], |i, j, k| {
        let phi = signal.state(i);
        let b = bob.state(j);
        if k < ne {
            let m = eve.state(k);
            q / n as f64 * we * born(m.overlap_sq(phi)) * wb * born(b.overlap_sq(m))
        } else {
            (1.0 - q) / n as f64 * wb * born(b.overlap_sq(phi))
        }
    })
}

/// Cloning attack: with probability `q` Eve applies `u` to
/// `|signal> (x) |0>_probe`, otherwise the identity. Bob measures his POVM on
/// the signal subsystem, Eve hers on the probe. Eve's alphabet is the same
/// for every `q`.
pub fn clone_joint(signal: &Frame, bob: &Frame, eve: &Frame, u: &CloneUnitary, q: f64) -> Result<JointDistribution> {
    check_fraction(q)?;
    let d = signal.dim();
    check_dims(d, &[bob, eve])?;
    if u.dim() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            actual: u.dim(),
        });
    }
    povm_from_frame(bob)?;
    povm_from_frame(eve)?;

    let n = signal.len();
    let (nb, ne) = (bob.len(), eve.len());
    let weight = (d as f64 / nb as f64) * (d as f64 / ne as f64) / n as f64;
    let probe = StateVector::basis(d, 0);

    let inputs: Vec<_> = signal.states().iter().map(|s| s.tensor(&probe)).collect();
    let outputs: Vec<_> = inputs.iter().map(|s| u.matrix() * s.as_vector()).collect();
    let effects: Vec<Vec<StateVector>> = bob
        .states()
        .iter()
        .map(|b| eve.states().iter().map(|e| b.tensor(e)).collect())
        .collect();

    JointDistribution::from_fn([n, nb, ne], |i, j, k| {
        let effect = effects[j][k].as_vector();
        let attacked = born(effect.dotc(&outputs[i]).norm_sqr());
        let untouched = born(effect.dotc(inputs[i].as_vector()).norm_sqr());
        weight * (q * attacked + (1.0 - q) * untouched)
    })
}
