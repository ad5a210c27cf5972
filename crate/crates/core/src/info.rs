//! Finite joint distributions `p(a, b, e)` over Alice's signal, Bob's
//! outcome and Eve's outcome, and the information quantities computed from
//! them. All logarithms are base 2; rates are in bits per signal.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::protocol::Protocol;

/// Total-probability tolerance for a joint table.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Overlaps below this count as orthogonal when deciding error events.
const ORTHOGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    A,
    B,
    E,
}

/// Dense table `p(a, b, e)`, stored with `e` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    sizes: [usize; 3],
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(sizes: [usize; 3], probs: Vec<f64>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::InvalidWeights(format!(
                "alphabet sizes must be positive, got {sizes:?}"
            )));
        }
        let expected = sizes.iter().product::<usize>();
        if probs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: probs.len(),
            });
        }
        if let Some(p) = probs.iter().find(|p| **p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidWeights(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidWeights(format!("table sums to {total}")));
        }
        Ok(Self { sizes, probs })
    }

    /// Builds a table from a closure evaluated at every `(a, b, e)`.
    pub fn from_fn(sizes: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut probs = Vec::with_capacity(sizes.iter().product());
        for a in 0..sizes[0] {
            for b in 0..sizes[1] {
                for e in 0..sizes[2] {
                    probs.push(f(a, b, e));
                }
            }
        }
        Self::new(sizes, probs)
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn index(&self, a: usize, b: usize, e: usize) -> usize {
        (a * self.sizes[1] + b) * self.sizes[2] + e
    }

    pub fn get(&self, a: usize, b: usize, e: usize) -> f64 {
        self.probs[self.index(a, b, e)]
    }

    fn size_of(&self, v: Var) -> usize {
        match v {
            Var::A => self.sizes[0],
            Var::B => self.sizes[1],
            Var::E => self.sizes[2],
        }
    }

    fn entries(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        let [_, nb, ne] = self.sizes;
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| ([i / (nb * ne), (i / ne) % nb, i % ne], p))
    }

    pub fn marginal(&self, v: Var) -> Vec<f64> {
        let mut out = vec![0.0; self.size_of(v)];
        for (idx, p) in self.entries() {
            out[idx[slot(v)]] += p;
        }
        out
    }

    /// Two-variable marginal, rows indexed by `x`, columns by `y`.
    pub fn pair_marginal(&self, x: Var, y: Var) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.size_of(y)]; self.size_of(x)];
        for (idx, p) in self.entries() {
            out[idx[slot(x)]][idx[slot(y)]] += p;
        }
        out
    }

    /// Whether Alice's marginal is uniform within `tol`.
    pub fn alice_uniform(&self, tol: f64) -> bool {
        let n = self.sizes[0] as f64;
        self.marginal(Var::A).iter().all(|p| (p - 1.0 / n).abs() <= tol)
    }

    /// CSV with header `a,b,e,p`, one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,e,p\n");
        for ([a, b, e], p) in self.entries() {
            let _ = writeln!(out, "{a},{b},{e},{p}");
        }
        out
    }
}

fn slot(v: Var) -> usize {
    match v {
        Var::A => 0,
        Var::B => 1,
        Var::E => 2,
    }
}

fn shannon<'a>(weights: impl IntoIterator<Item = &'a f64>) -> f64 {
    weights.into_iter().filter(|&&w| w > 0.0).map(|&w| -w * w.log2()).sum()
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(weights: &[f64]) -> Result<f64> {
    if let Some(w) = weights.iter().find(|w| **w < 0.0 || w.is_nan()) {
        return Err(Error::InvalidWeights(format!("negative weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(shannon(weights))
}

fn table_mutual_information(table: &[Vec<f64>]) -> f64 {
    let ncols = table.first().map_or(0, Vec::len);
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..ncols).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    shannon(&rows) + shannon(&cols) - shannon(table.iter().flatten())
}

/// `I(X:Y) = H(X) + H(Y) - H(XY)` with the third variable marginalized out.
pub fn mutual_information(joint: &JointDistribution, x: Var, y: Var) -> f64 {
    table_mutual_information(&joint.pair_marginal(x, y))
}

/// `I(A:B|E) = sum_e p(e) I(A:B | E = e)`; zero-probability slices are skipped.
pub fn conditional_mutual_information(joint: &JointDistribution) -> f64 {
    let [na, nb, ne] = joint.sizes();
    (0..ne)
        .filter_map(|e| {
            let slice: Vec<Vec<f64>> = (0..na).map(|a| (0..nb).map(|b| joint.get(a, b, e)).collect()).collect();
            let pe: f64 = slice.iter().flatten().sum();
            if pe <= 0.0 {
                return None;
            }
            let normalized: Vec<Vec<f64>> = slice.iter().map(|r| r.iter().map(|p| p / pe).collect()).collect();
            Some(pe * table_mutual_information(&normalized))
        })
        .sum()
}

/// Secret-key rate bounds `I_E <= R <= I(A:B|E)`, in bits per signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    pub i_ab_given_e: f64,
    /// One-way rate `I(A:B) - min(I(A:E), I(B:E))`.
    pub lower: f64,
    /// `I(A:B|E)`.
    pub upper: f64,
}

pub fn key_rate_bounds(joint: &JointDistribution) -> RateBounds {
    let i_ab = mutual_information(joint, Var::A, Var::B);
    let i_ae = mutual_information(joint, Var::A, Var::E);
    let i_be = mutual_information(joint, Var::B, Var::E);
    let i_ab_given_e = conditional_mutual_information(joint);
    RateBounds {
        i_ab,
        i_ae,
        i_be,
        i_ab_given_e,
        lower: i_ab - i_ae.min(i_be),
        upper: i_ab_given_e,
    }
}

/// Probability that Bob's outcome state is orthogonal to Alice's signal.
///
/// Without an eavesdropper this event never happens for either protocol.
/// For the trine with the exclusion measurement it is `p(b = a)`; for BB84
/// with the amalgamated POVM it is a same-basis bit flip.
pub fn observed_error_rate(joint: &JointDistribution, protocol: Protocol) -> Result<f64> {
    let signal = protocol.signal_frame();
    let bob = protocol.bob_frame();
    let [na, nb, ne] = joint.sizes();
    if (na, nb) != (signal.len(), bob.len()) {
        return Err(Error::AlphabetMismatch {
            protocol: protocol.to_string(),
            expected: (signal.len(), bob.len()),
            actual: (na, nb),
        });
    }
    let mut rate = 0.0;
    for a in 0..na {
        for b in 0..nb {
            if signal.state(a).overlap_sq(bob.state(b)) < ORTHOGONAL_TOL {
                rate += (0..ne).map(|e| joint.get(a, b, e)).sum::<f64>();
            }
        }
    }
    Ok(rate)
}
