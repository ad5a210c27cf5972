//! Simulated annealing over unitaries on signal (x) probe.
//!
//! A unitary is parameterized as `exp(A)` with `A` anti-Hermitian, so every
//! proposal is exactly unitary. For a `D x D` unitary there are `D^2` real
//! parameters: `D` for the imaginary diagonal and two per upper-triangular
//! entry. Each step perturbs one random parameter by a Gaussian of that
//! parameter's current width, accepts by the Metropolis rule and cools
//! geometrically. Widths start at `step_scale` and are rescaled every
//! [`ADAPT_WINDOW`] proposals to keep per-parameter acceptance near 50%, so
//! moves shrink as the walk freezes into an optimum. Restarts are
//! independent (seed `seed + restart`) and run in parallel; the best objective wins, ties going to the lowest restart.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::cloner::{variance, CloneUnitary};
use crate::error::{Error, Result};
use crate::frames::Frame;

/// Symmetry penalty below which an optimized cloner counts as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig {
    pub seed: u64,
    pub steps: usize,
    pub restarts: usize,
    pub temp_initial: f64,
    pub cooling: f64,
    pub step_scale: f64,
    pub penalty_weight: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            steps: 50_000,
            restarts: 8,
            temp_initial: 0.01,
            cooling: 0.9995,
            step_scale: 0.3,
            penalty_weight: 100.0,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidAnnealConfig(msg.to_string()));
        if self.steps < 1 {
            return fail("steps must be at least 1");
        }
        if self.restarts < 1 {
            return fail("restarts must be at least 1");
        }
        if self.temp_initial <= 0.0 || !self.temp_initial.is_finite() {
            return fail("initial temperature must be positive");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return fail("cooling factor must lie in (0, 1)");
        }
        if self.step_scale <= 0.0 || !self.step_scale.is_finite() {
            return fail("step scale must be positive");
        }
        if self.penalty_weight < 0.0 || !self.penalty_weight.is_finite() {
            return fail("penalty weight must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloneOptimum {
    pub unitary: CloneUnitary,
    /// Average clone fidelity of `unitary`.
    pub fidelity: f64,
    /// Symmetry penalty (variance of per-state overlaps) of `unitary`.
    pub penalty: f64,
    /// `fidelity - penalty_weight * penalty`.
    pub objective: f64,
    /// Index of the winning restart.
    pub restart: usize,
}

impl CloneOptimum {
    pub fn is_symmetric(&self) -> bool {
        self.penalty < SYMMETRY_TOL
    }
}

/// `exp(A)` for the anti-Hermitian generator encoded by `params`
/// (`params.len()` must be `dim * dim`).
pub fn unitary_from_generator(params: &[f64], dim: usize) -> CloneUnitary {
    assert_eq!(params.len(), dim * dim, "generator needs dim^2 parameters");
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    let mut p = params.iter().copied();
    for r in 0..dim {
        gen[(r, r)] = Complex64::new(0.0, p.next().unwrap());
    }
    for r in 0..dim {
        for c in (r + 1)..dim {
            let z = Complex64::new(p.next().unwrap(), p.next().unwrap());
            gen[(r, c)] = z;
            gen[(c, r)] = -z.conj();
        }
    }
    CloneUnitary::new(gen.exp()).expect("exponential of anti-Hermitian generator is unitary")
}

struct Scorer {
    inputs: Vec<nalgebra::DVector<Complex64>>,
    targets: Vec<nalgebra::DVector<Complex64>>,
    penalty_weight: f64,
}

impl Scorer {
    fn new(signal: &Frame, penalty_weight: f64) -> Self {
        let probe = crate::frames::StateVector::basis(signal.dim(), 0);
        Self {
            inputs: signal
                .states()
                .iter()
                .map(|s| s.tensor(&probe).as_vector().clone())
                .collect(),
            targets: signal
                .states()
                .iter()
                .map(|s| s.tensor(s).as_vector().clone())
                .collect(),
            penalty_weight,
        }
    }

    /// Returns (objective, fidelity, penalty).
    fn score(&self, u: &CloneUnitary) -> (f64, f64, f64) {
        let overlaps: Vec<f64> = self
            .inputs
            .iter()
            .zip(&self.targets)
            .map(|(x, t)| t.dotc(&(u.matrix() * x)).norm_sqr())
            .collect();
        let fidelity = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
        let penalty = variance(&overlaps);
        (fidelity - self.penalty_weight * penalty, fidelity, penalty)
    }
}

/// Proposals per parameter between width adjustments.
const ADAPT_WINDOW: usize = 20;

/// Rescales a proposal width toward a 40-60% acceptance band.
fn adapt_width(width: f64, acceptance: f64) -> f64 {
    let factor = if acceptance > 0.6 {
        1.0 + 2.0 * (acceptance - 0.6) / 0.4
    } else if acceptance < 0.4 {
        1.0 / (1.0 + 2.0 * (0.4 - acceptance) / 0.4)
    } else {
        1.0
    };
    (width * factor).clamp(1e-12, std::f64::consts::PI)
}

fn run_restart(scorer: &Scorer, dim: usize, config: &AnnealConfig, restart: usize) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
    let nparams = dim * dim;
    let mut params: Vec<f64> = (0..nparams)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    let mut widths = vec![config.step_scale; nparams];
    let mut tried = vec![0usize; nparams];
    let mut accepted = vec![0usize; nparams];

    let mut current = scorer.score(&unitary_from_generator(&params, dim)).0;
    let mut best = (params.clone(), current);
    let mut temp = config.temp_initial;

    for _ in 0..config.steps {
        let idx = rng.random_range(0..nparams);
        let kick: f64 = rng.sample(StandardNormal);
        let old = params[idx];
        params[idx] += kick * widths[idx];
        let candidate = scorer.score(&unitary_from_generator(&params, dim)).0;
        let delta = candidate - current;
        let accept = delta >= 0.0 || rng.random::<f64>() < (delta / temp).exp();
        tried[idx] += 1;
        if accept {
            accepted[idx] += 1;
            current = candidate;
            if current > best.1 {
                best = (params.clone(), current);
            }
        } else {
            params[idx] = old;
        }
        if tried[idx] == ADAPT_WINDOW {
            widths[idx] = adapt_width(widths[idx], accepted[idx] as f64 / ADAPT_WINDOW as f64);
            tried[idx] = 0;
            accepted[idx] = 0;
        }
        temp *= config.cooling;
    }
    best
}

/// Maximizes `average fidelity - penalty_weight * symmetry penalty` over
/// unitaries on qubit signal (x) qubit probe.
pub fn optimize_cloner(signal: &Frame, config: &AnnealConfig) -> Result<CloneOptimum> {
    config.validate()?;
    if signal.dim() != 2 {
        return Err(Error::NotQubit(signal.dim()));
    }
    let dim = signal.dim() * signal.dim();
    let scorer = Scorer::new(signal, config.penalty_weight);

    let runs: Vec<(Vec<f64>, f64)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&scorer, dim, config, r))
        .collect();

    let mut winner = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 > runs[winner].1 {
            winner = r;
        }
    }
    let unitary = unitary_from_generator(&runs[winner].0, dim);
    let (objective, fidelity, penalty) = scorer.score(&unitary);
    Ok(CloneOptimum {
        unitary,
        fidelity,
        penalty,
        objective,
        restart: winner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{average_clone_fidelity, clone_symmetry_penalty};
    use crate::frames::{make_trine, StateVector};
    use approx::assert_abs_diff_eq;

    fn quick() -> AnnealConfig {
        AnnealConfig {
            steps: 4_000,
            restarts: 2,
            cooling: 0.997,
            ..AnnealConfig::default()
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let u = unitary_from_generator(&[0.0; 16], 4);
        assert_eq!(u.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn generator_always_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p: Vec<f64> = (0..16).map(|_| rng.random_range(-5.0..5.0)).collect();
            assert!(unitary_from_generator(&p, 4).unitarity_residual() < 1e-10);
        }
    }

    #[test]
    fn reported_values_match_unitary() {
        let t = make_trine();
        let opt = optimize_cloner(&t, &quick()).unwrap();
        assert_eq!(opt.fidelity, average_clone_fidelity(&opt.unitary, &t).unwrap());
        assert_abs_diff_eq!(
            opt.penalty,
            clone_symmetry_penalty(&opt.unitary, &t).unwrap(),
            epsilon = 1e-15
        );
        assert!(opt.fidelity > 0.5);
    }

    #[test]
    fn deterministic_given_seed() {
        let t = make_trine();
        let a = optimize_cloner(&t, &quick()).unwrap();
        let b = optimize_cloner(&t, &quick()).unwrap();
        assert_eq!(a.fidelity.to_bits(), b.fidelity.to_bits());
        assert_eq!(a.penalty.to_bits(), b.penalty.to_bits());
        assert_eq!(a.unitary, b.unitary);
    }

    #[test]
    fn single_known_state_clones_perfectly() {
        let f = Frame::new("zero", vec![StateVector::basis(2, 0)]).unwrap();
        let opt = optimize_cloner(&f, &AnnealConfig::default()).unwrap();
        assert_abs_diff_eq!(opt.fidelity, 1.0, epsilon = 1e-6);
        assert_eq!(opt.penalty, 0.0);
    }

    #[test]
    fn degenerate_budget_still_returns() {
        let cfg = AnnealConfig {
            steps: 1,
            restarts: 1,
            ..AnnealConfig::default()
        };
        let opt = optimize_cloner(&make_trine(), &cfg).unwrap();
        assert!(opt.unitary.unitarity_residual() < 1e-10);
    }

    #[test]
    fn rejects_bad_config() {
        let t = make_trine();
        for cfg in [
            AnnealConfig {
                steps: 0,
                ..AnnealConfig::default()
            },
            AnnealConfig {
                restarts: 0,
                ..AnnealConfig::default()
            },
            AnnealConfig {
                temp_initial: 0.0,
                ..AnnealConfig::default()
            },
            AnnealConfig {
                cooling: 1.0,
                ..AnnealConfig::default()
            },
            AnnealConfig {
                penalty_weight: -1.0,
                ..AnnealConfig::default()
            },
        ] {
            assert!(matches!(optimize_cloner(&t, &cfg), Err(Error::InvalidAnnealConfig(_))));
        }
        let qutrit = Frame::orthonormal_basis(3);
        assert_eq!(optimize_cloner(&qutrit, &quick()).unwrap_err(), Error::NotQubit(3));
    }
}
