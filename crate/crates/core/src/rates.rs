//! Key-rate curves as a function of the observed error rate.
//!
//! Curves are computed on a grid of interception fractions `q` and reported
//! against the error rate `E(q)`, which is linear in `q`. Every point is
//! exact; nothing is sampled.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::attacks::{
    bb84_reference_cloner, optimize_cloner, paper_trine_cloner, AnnealConfig, AttackKind, AttackSpec, CloneUnitary,
};
use crate::error::{Error, Result};
use crate::info::{key_rate_bounds, observed_error_rate};
use crate::protocol::Protocol;

/// Bisection tolerance in `q` for threshold searches.
pub const THRESHOLD_TOL: f64 = 1e-6;
/// Default number of uniformly spaced `q` values.
pub const DEFAULT_Q_POINTS: usize = 101;
/// Slack when comparing curves or checking bound ordering.
pub const CURVE_TOL: f64 = 1e-9;

pub const CSV_HEADER: &str = "protocol,attack,q,error_rate,rate_lower,rate_upper";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCurvePoint {
    pub q: f64,
    pub error_rate: f64,
    /// `I_E`, bits per signal.
    pub lower: f64,
    /// `I(A:B|E)`, bits per signal.
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    pub fn of(self, point: &RateCurvePoint) -> f64 {
        match self {
            Bound::Lower => point.lower,
            Bound::Upper => point.upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClonerSource {
    /// The published cloner: the explicit trine unitary, or for BB84 the
    /// unitary realizing the published clone states.
    Paper,
    Optimize(AnnealConfig),
}

impl ClonerSource {
    pub fn resolve(&self, protocol: Protocol) -> Result<CloneUnitary> {
        match self {
            ClonerSource::Paper => Ok(match protocol {
                Protocol::Trine => paper_trine_cloner(),
                Protocol::Bb84 => bb84_reference_cloner(),
            }),
            ClonerSource::Optimize(config) => Ok(optimize_cloner(&protocol.signal_frame(), config)?.unitary),
        }
    }
}

/// A protocol under one attack family, with everything but `q` fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub protocol: Protocol,
    pub attack: AttackKind,
    pub cloner: Option<CloneUnitary>,
}

impl Scenario {
    pub fn intercept_resend(protocol: Protocol) -> Self {
        Self {
            protocol,
            attack: AttackKind::InterceptResend,
            cloner: None,
        }
    }

    pub fn clone(protocol: Protocol, cloner: CloneUnitary) -> Self {
        Self {
            protocol,
            attack: AttackKind::Clone,
            cloner: Some(cloner),
        }
    }

    pub fn attack_at(&self, q: f64) -> Result<AttackSpec> {
        match self.attack {
            AttackKind::InterceptResend => AttackSpec::intercept_resend(q),
            AttackKind::Clone => AttackSpec::clone(q, self.cloner.clone().ok_or(Error::MissingCloner)?),
        }
    }

    pub fn evaluate(&self, q: f64) -> Result<RateCurvePoint> {
        let joint = self.attack_at(q)?.joint(self.protocol)?;
        let bounds = key_rate_bounds(&joint);
        Ok(RateCurvePoint {
            q,
            error_rate: observed_error_rate(&joint, self.protocol)?,
            lower: bounds.lower,
            upper: bounds.upper,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub protocol: Protocol,
    pub attack: AttackKind,
    pub q_grid: Vec<f64>,
    /// Required when `attack` is [`AttackKind::Clone`].
    pub cloner_source: Option<ClonerSource>,
}

impl SweepConfig {
    pub fn scenario(&self) -> Result<Scenario> {
        validate_grid(&self.q_grid)?;
        Ok(match self.attack {
            AttackKind::InterceptResend => Scenario::intercept_resend(self.protocol),
            AttackKind::Clone => {
                let source = self.cloner_source.as_ref().ok_or(Error::MissingCloner)?;
                Scenario::clone(self.protocol, source.resolve(self.protocol)?)
            }
        })
    }
}

/// `points` values `i / (points - 1)`; a single point is `[0]`.
pub fn uniform_grid(points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(Error::InvalidGrid("at least one point is required".into())),
        1 => Ok(vec![0.0]),
        _ => Ok((0..points).map(|i| i as f64 / (points - 1) as f64).collect()),
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(q) = grid.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidGrid(format!("{q} lies outside [0, 1]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    Ok(())
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<RateCurvePoint>> {
    sweep_scenario(&config.scenario()?, &config.q_grid)
}

/// Evaluates every grid point (in parallel); output follows grid order.
pub fn sweep_scenario(scenario: &Scenario, q_grid: &[f64]) -> Result<Vec<RateCurvePoint>> {
    validate_grid(q_grid)?;
    q_grid.par_iter().map(|&q| scenario.evaluate(q)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Interception fraction at the zero crossing.
    pub q: f64,
    /// Observed error rate at that `q`: the tolerable error.
    pub error_rate: f64,
}

/// Bisects on `q` for the zero crossing of the chosen bound, to within
/// `tol` in `q`, and reports the error rate there.
pub fn tolerable_error(scenario: &Scenario, bound: Bound, tol: f64) -> Result<Threshold> {
    let value = |q: f64| scenario.evaluate(q).map(|p| bound.of(&p));
    let at_zero = value(0.0)?;
    if at_zero <= 0.0 {
        return Err(Error::BoundNotPositive(at_zero));
    }
    if value(1.0)? > 0.0 {
        return Err(Error::NoZeroCrossing);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if value(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(Threshold {
        q,
        error_rate: scenario.evaluate(q)?.error_rate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// Curves agree everywhere within [`CURVE_TOL`].
    Tie,
    /// First curve is at least the second everywhere, and above somewhere.
    First,
    Second,
    /// The curves cross.
    Neither,
}

impl Dominance {
    fn from_diffs(diffs: &[f64]) -> Self {
        let first_ge = diffs.iter().all(|d| *d >= -CURVE_TOL);
        let second_ge = diffs.iter().all(|d| *d <= CURVE_TOL);
        match (first_ge, second_ge) {
            (true, true) => Dominance::Tie,
            (true, false) => Dominance::First,
            (false, true) => Dominance::Second,
            (false, false) => Dominance::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub lower: Dominance,
    pub upper: Dominance,
    /// Lower-bound tolerable errors; `None` when the bound never reaches zero.
    pub threshold_first: Option<Threshold>,
    pub threshold_second: Option<Threshold>,
    /// Common error-rate grid both curves were resampled onto.
    pub error_grid: Vec<f64>,
}

impl DominanceReport {
    /// Whether the first scenario tolerates strictly more error. A bound
    /// that never crosses zero tolerates every attainable error.
    pub fn first_more_robust(&self) -> bool {
        match (self.threshold_first, self.threshold_second) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => a.error_rate > b.error_rate,
            _ => false,
        }
    }

    pub fn second_more_robust(&self) -> bool {
        match (self.threshold_first, self.threshold_second) {
            (Some(_), None) => true,
            (Some(a), Some(b)) => b.error_rate > a.error_rate,
            _ => false,
        }
    }
}

fn lower_threshold(scenario: &Scenario) -> Result<Option<Threshold>> {
    match tolerable_error(scenario, Bound::Lower, THRESHOLD_TOL) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NoZeroCrossing) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Linear interpolation on strictly increasing `xs`; `x` must lie in range.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.len() == 1 {
        return ys[0];
    }
    let hi = xs.partition_point(|v| *v < x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[hi - 1], xs[hi]);
    let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
    ys[hi - 1] + t * (ys[hi] - ys[hi - 1])
}

/// Sweeps both scenarios over `q_grid`, resamples each curve onto a common
/// error-rate grid (`q_grid.len()` points spanning the shared error range)
/// and reports per-bound dominance plus lower-bound thresholds.
pub fn compare(first: &Scenario, second: &Scenario, q_grid: &[f64]) -> Result<DominanceReport> {
    let a = sweep_scenario(first, q_grid)?;
    let b = sweep_scenario(second, q_grid)?;
    for curve in [&a, &b] {
        if curve.len() > 1 && curve.windows(2).any(|w| w[1].error_rate <= w[0].error_rate) {
            return Err(Error::NonMonotoneCurve);
        }
    }
    let lo = a[0].error_rate.max(b[0].error_rate);
    let hi = a[a.len() - 1].error_rate.min(b[b.len() - 1].error_rate);
    let n = q_grid.len();
    let error_grid: Vec<f64> = if n == 1 || hi <= lo {
        vec![lo]
    } else {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };

    let resample = |curve: &[RateCurvePoint], bound: Bound| -> Vec<f64> {
        let xs: Vec<f64> = curve.iter().map(|p| p.error_rate).collect();
        let ys: Vec<f64> = curve.iter().map(|p| bound.of(p)).collect();
        error_grid.iter().map(|&e| interpolate(&xs, &ys, e)).collect()
    };
    let verdict = |bound: Bound| {
        let diffs: Vec<f64> = resample(&a, bound)
            .iter()
            .zip(resample(&b, bound))
            .map(|(x, y)| x - y)
            .collect();
        Dominance::from_diffs(&diffs)
    };

    Ok(DominanceReport {
        lower: verdict(Bound::Lower),
        upper: verdict(Bound::Upper),
        threshold_first: lower_threshold(first)?,
        threshold_second: lower_threshold(second)?,
        error_grid,
    })
}

/// `%.{sig}g`-style formatting: `sig` significant digits, trailing zeros
/// trimmed, exponent notation outside `[1e-5, 10^sig)`.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig.saturating_sub(1), x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        return format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        );
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the curve CSV (header included), floats at 12 significant digits.
pub fn write_csv<W: Write>(
    mut out: W,
    protocol: Protocol,
    attack: AttackKind,
    points: &[RateCurvePoint],
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            protocol,
            attack,
            format_sig(p.q, 12),
            format_sig(p.error_rate, 12),
            format_sig(p.lower, 12),
            format_sig(p.upper, 12)
        )?;
    }
    Ok(())
}
