//! Signal ensembles and measurement frames.
//!
//! A [`Frame`] is an ordered list of unit vectors in `C^d`. Index order is
//! significant everywhere downstream: frame index `k` is the signal label on
//! Alice's side and the outcome label on Bob's or Eve's side.
//!
//! Besides the constructors for the protocols studied here (trine, its dual,
//! BB84, regular simplex) this module exposes the frame diagnostics used to
//! certify an ensemble: Gram matrix, frame potentials `V_t`, equiangularity
//! against the Welch value, the POVM built from a tight frame, the
//! measure-and-reprepare fidelity `d V_2 / n^2`, and the maximally entangled
//! bipartite state that realizes the frame.
//!
//! Closed form for the `V_2` floor: summing `n` unit diagonal terms and
//! `n(n-1)` off-diagonal terms at the Welch value gives
//! `V_2 = n + n (n-d)^2 / (d^2 (n-1))`, e.g. `27/8` for the trine.
//! [`v2_floor`] uses this expression.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix_text;

/// Tolerance for structural checks (norms, resolutions of identity).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for spectral checks and for the tight-frame precondition.
pub const SPECTRAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within [`STRUCTURAL_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector);
        }
        let amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> StateVector {
        Self {
            amps: self.amps.conjugate(),
        }
    }

    /// `|self> (x) |other>` in lexicographic basis order, self first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        Self {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.amps * self.amps.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    dim: usize,
    states: Vec<StateVector>,
    label: String,
}

impl Frame {
    pub fn new(label: impl Into<String>, states: Vec<StateVector>) -> Result<Self> {
        let dim = states.first().ok_or(Error::EmptyFrame)?.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            states,
            label: label.into(),
        })
    }

    pub fn orthonormal_basis(dim: usize) -> Self {
        assert!(dim >= 1);
        let states = (0..dim).map(|k| StateVector::basis(dim, k)).collect();
        Self {
            dim,
            states,
            label: format!("basis:{dim}"),
        }
    }

    /// `first` followed by `second`, preserving both orders.
    pub fn concat(label: impl Into<String>, first: &Frame, second: &Frame) -> Result<Self> {
        let states = first.states.iter().chain(&second.states).cloned().collect();
        Self::new(label, states)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &StateVector {
        &self.states[k]
    }

    /// Serializes in the plain-text matrix format, one state per line.
    pub fn to_text(&self) -> String {
        matrix_text::format_rows(self.states.iter().map(|s| s.amplitudes()))
    }

    pub fn from_text(label: impl Into<String>, text: &str) -> Result<Self> {
        let rows = matrix_text::parse_rows(text)?;
        let states = rows.into_iter().map(StateVector::new).collect::<Result<Vec<_>>>()?;
        Self::new(label, states)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n = {}, d = {})", self.label, self.len(), self.dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    /// Real eigenvalues, sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }
}

/// Positive operator-valued measure on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<DMatrix<Complex64>>,
}

impl Povm {
    /// Validates positivity (min eigenvalue >= -1e-12) and completeness
    /// (entrywise residual against the identity <= [`SPECTRAL_TOL`]).
    pub fn new(elements: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::EmptyFrame)?.nrows();
        for (index, el) in elements.iter().enumerate() {
            if el.nrows() != dim || el.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: el.nrows().max(el.ncols()),
                });
            }
            let min_eigenvalue = hermitian_eigenvalues(el).last().copied().unwrap_or(0.0);
            if min_eigenvalue < -STRUCTURAL_TOL {
                return Err(Error::NotPositive { index, min_eigenvalue });
            }
        }
        let povm = Self { dim, elements };
        let residual = povm.identity_residual();
        if residual > SPECTRAL_TOL {
            return Err(Error::NotComplete { residual });
        }
        Ok(povm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    /// Largest entrywise deviation of the element sum from the identity.
    pub fn identity_residual(&self) -> f64 {
        let sum = self
            .elements
            .iter()
            .fold(DMatrix::zeros(self.dim, self.dim), |acc, e| acc + e);
        max_abs_diff(&sum, &DMatrix::identity(self.dim, self.dim))
    }

    /// Born-rule outcome probabilities for a pure input state.
    pub fn probabilities(&self, state: &StateVector) -> Vec<f64> {
        let psi = state.as_vector();
        self.elements.iter().map(|e| psi.dotc(&(e * psi)).re).collect()
    }
}

/// Pure state on `C^{dim_a} (x) C^{dim_b}`, amplitudes in lexicographic `(a, b)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    amps: DVector<Complex64>,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                actual: amplitudes.len(),
            });
        }
        let amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dim_a, dim_b, amps })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    fn coefficient_matrix(&self) -> DMatrix<Complex64> {
        // Row a, column b.
        DMatrix::from_fn(self.dim_a, self.dim_b, |a, b| self.amps[a * self.dim_b + b])
    }

    pub fn reduced_a(&self) -> DMatrix<Complex64> {
        let c = self.coefficient_matrix();
        &c * c.adjoint()
    }

    pub fn reduced_b(&self) -> DMatrix<Complex64> {
        let c = self.coefficient_matrix();
        (c.adjoint() * &c).transpose()
    }
}

/// Squared overlap of an equiangular frame: `(n - d) / (d (n - 1))`.
pub fn welch_overlap(n: usize, d: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let (n, d) = (n as f64, d as f64);
    (n - d) / (d * (n - 1.0))
}

/// Minimum of `V_1` over frames of `n` unit vectors in dimension `d`.
pub fn v1_floor(n: usize, d: usize) -> f64 {
    (n * n) as f64 / d as f64
}

/// `V_2` of an `n`-element equiangular frame in dimension `d`.
pub fn v2_floor(n: usize, d: usize) -> f64 {
    let w = welch_overlap(n, d);
    n as f64 + (n * (n.saturating_sub(1))) as f64 * w * w
}

/// The three equally spaced qubit states
/// `|phi_j> = (w^j / sqrt 2)(|0> + w^j |1>)`, `w = exp(2 pi i / 3)`,
/// global phases included.
pub fn make_trine() -> Frame {
    let states = (0..3)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / 3.0;
            let amp0 = Complex64::from_polar(1.0 / 2f64.sqrt(), theta);
            let amp1 = Complex64::from_polar(1.0 / 2f64.sqrt(), 2.0 * theta);
            StateVector::new(vec![amp0, amp1]).expect("trine state is normalized")
        })
        .collect();
    Frame::new("trine", states).expect("trine frame is well formed")
}

/// `|0>, |1>, |+>, |->` in that order.
pub fn make_bb84() -> Frame {
    let h = 1.0 / 2f64.sqrt();
    let c = |re: f64| Complex64::new(re, 0.0);
    let states = [[c(1.0), c(0.0)], [c(0.0), c(1.0)], [c(h), c(h)], [c(h), c(-h)]]
        .into_iter()
        .map(|amps| StateVector::new(amps.to_vec()).expect("bb84 state is normalized"))
        .collect();
    Frame::new("bb84", states).expect("bb84 frame is well formed")
}

/// Qubit states orthogonal to each member, same order. Each dual state is
/// phased so that its first nonzero amplitude is real and positive.
pub fn dual_frame(frame: &Frame) -> Result<Frame> {
    if frame.dim() != 2 {
        return Err(Error::NotQubit(frame.dim()));
    }
    let states = frame
        .states()
        .iter()
        .map(|s| {
            let a = s.amplitudes();
            let perp = vec![-a[1].conj(), a[0].conj()];
            StateVector::new(fix_phase(perp))
        })
        .collect::<Result<Vec<_>>>()?;
    Frame::new(format!("dual({})", frame.label()), states)
}

fn fix_phase(mut amps: Vec<Complex64>) -> Vec<Complex64> {
    if let Some(lead) = amps.iter().find(|z| z.norm() > STRUCTURAL_TOL).copied() {
        let phase = lead.conj() / lead.norm();
        for z in &mut amps {
            *z *= phase;
        }
    }
    amps
}

/// Regular simplex of `d + 1` real unit vectors in dimension `d`, built by
/// centering the standard basis of `R^{d+1}` and expressing the centered
/// vectors in an orthonormal basis of the hyperplane they span.
pub fn make_simplex(d: usize) -> Result<Frame> {
    if d < 2 {
        return Err(Error::SimplexDimension(d));
    }
    let n = d + 1;
    let mean = 1.0 / n as f64;
    let centered: Vec<DVector<f64>> = (0..n)
        .map(|k| DVector::from_fn(n, |i, _| if i == k { 1.0 - mean } else { -mean }))
        .collect();

    // Gram-Schmidt over the first d centered vectors spans the hyperplane.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d);
    for v in centered.iter().take(d) {
        let mut w = v.clone();
        for b in &basis {
            w -= b * b.dot(v);
        }
        basis.push(w.normalize());
    }

    let states = centered
        .iter()
        .map(|v| {
            let coords: Vec<Complex64> = basis.iter().map(|b| Complex64::new(b.dot(v), 0.0)).collect();
            StateVector::normalized(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    Frame::new(format!("simplex:{d}"), states)
}

pub fn gram(frame: &Frame) -> GramMatrix {
    let n = frame.len();
    let entries = DMatrix::from_fn(n, n, |j, k| frame.state(j).inner(frame.state(k)));
    GramMatrix { entries }
}

/// `V_t = sum_{j,k} |<phi_j|phi_k>|^{2t}` over all ordered pairs, diagonal included.
pub fn frame_potential(frame: &Frame, t: u32) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidExponent);
    }
    let exp = t as i32;
    let states = frame.states();
    Ok(states
        .iter()
        .flat_map(|a| states.iter().map(move |b| a.overlap_sq(b).powi(exp)))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equiangularity {
    pub equiangular: bool,
    /// Mean off-diagonal squared overlap.
    pub overlap: f64,
    pub welch: f64,
}

pub fn is_equiangular(frame: &Frame, tol: f64) -> Equiangularity {
    let n = frame.len();
    let welch = welch_overlap(n, frame.dim());
    let overlaps: Vec<f64> = (0..n)
        .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
        .map(|(j, k)| frame.state(j).overlap_sq(frame.state(k)))
        .collect();
    if overlaps.is_empty() {
        return Equiangularity {
            equiangular: true,
            overlap: 0.0,
            welch,
        };
    }
    let overlap = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
    let lo = overlaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = overlaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let equiangular = hi - lo <= tol && overlaps.iter().all(|o| (o - welch).abs() <= tol);
    Equiangularity {
        equiangular,
        overlap,
        welch,
    }
}

/// `S = sum_k |phi_k><phi_k|`.
pub fn frame_operator(frame: &Frame) -> DMatrix<Complex64> {
    let d = frame.dim();
    frame
        .states()
        .iter()
        .fold(DMatrix::zeros(d, d), |acc, s| acc + s.projector())
}

/// Entrywise residual of `S` against `(n/d) I`.
pub fn tightness_residual(frame: &Frame) -> f64 {
    let d = frame.dim();
    let target = DMatrix::<Complex64>::identity(d, d).scale(frame.len() as f64 / d as f64);
    max_abs_diff(&frame_operator(frame), &target)
}

fn require_tight(frame: &Frame) -> Result<()> {
    let residual = tightness_residual(frame);
    if residual > SPECTRAL_TOL {
        return Err(Error::NotTight { residual });
    }
    Ok(())
}

/// POVM with elements `(d/n)|phi_k><phi_k|` in frame order. The frame
/// operator must equal `(n/d) I` within [`SPECTRAL_TOL`].
pub fn povm_from_frame(frame: &Frame) -> Result<Povm> {
    require_tight(frame)?;
    let weight = frame.dim() as f64 / frame.len() as f64;
    Povm::new(frame.states().iter().map(|s| s.projector().scale(weight)).collect())
}

/// Average fidelity of measuring with the frame's POVM and re-preparing the
/// outcome state, `d V_2 / n^2`.
pub fn classical_fidelity(frame: &Frame) -> Result<f64> {
    require_tight(frame)?;
    let n = frame.len() as f64;
    Ok(frame.dim() as f64 * frame_potential(frame, 2)? / (n * n))
}

/// `(sqrt d / n) sum_k |phi_k> (x) |phi_k^*>`.
pub fn entangled_realization(frame: &Frame) -> Result<BipartiteState> {
    require_tight(frame)?;
    let d = frame.dim();
    let scale = (d as f64).sqrt() / frame.len() as f64;
    let sum = frame
        .states()
        .iter()
        .fold(DVector::<Complex64>::zeros(d * d), |acc, s| {
            acc + s.as_vector().kronecker(s.conj().as_vector())
        });
    let amps = sum.scale(scale);
    // Renormalize away rounding; tightness already guarantees unit norm.
    let norm = amps.norm();
    BipartiteState::new(d, d, amps.unscale(norm).as_slice().to_vec())
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
