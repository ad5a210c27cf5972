use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frames::{max_abs_diff, Frame, StateVector};
use crate::matrix_text;

/// Unitarity tolerance, entrywise on `U^dagger U - I`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Unitary on signal (x) probe, basis order `|signal, probe>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneUnitary {
    entries: DMatrix<Complex64>,
}

impl CloneUnitary {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        let u = Self { entries };
        let residual = u.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(&(self.entries.adjoint() * &self.entries), &DMatrix::identity(n, n))
    }

    /// Rows in the plain-text matrix format.
    pub fn to_text(&self) -> String {
        let rows: Vec<Vec<Complex64>> = self.entries.row_iter().map(|r| r.iter().copied().collect()).collect();
        matrix_text::format_rows(rows.iter().map(Vec::as_slice))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows = matrix_text::parse_rows(text)?;
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || n != m {
            return Err(Error::DimensionMismatch { expected: n, actual: m });
        }
        Self::new(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }
}

/// The symmetric trine cloner
/// `(1/sqrt 2) [[0,0,0,sqrt 2],[1,1,0,0],[1,-1,0,0],[0,0,sqrt 2,0]]`.
pub fn paper_trine_cloner() -> CloneUnitary {
    let h = 1.0 / 2f64.sqrt();
    let r = 2f64.sqrt() * h;
    #[rustfmt::skip]
    let real = [
        0.0, 0.0, 0.0, r,
        h,   h,   0.0, 0.0,
        h,   -h,  0.0, 0.0,
        0.0, 0.0, r,   0.0,
    ];
    let entries = DMatrix::from_row_iterator(4, 4, real.iter().map(|&x| Complex64::new(x, 0.0)));
    CloneUnitary::new(entries).expect("trine cloner is unitary")
}

fn bb84_z_clones() -> [DVector<Complex64>; 2] {
    let s = 2f64.sqrt();
    let c = |re: f64, im: f64| Complex64::new(re / 4.0, im / 4.0);
    [
        DVector::from_vec(vec![c(2.0 + s, 0.0), c(0.0, -s), c(0.0, -s), c(2.0 - s, 0.0)]),
        DVector::from_vec(vec![c(2.0 - s, 0.0), c(0.0, s), c(0.0, s), c(2.0 + s, 0.0)]),
    ]
}

/// Published two-qubit clone outputs for BB84: the images of `|0>` and
/// `|1>`, then the normalized sum and difference (images of `|+>`, `|->`).
pub fn bb84_paper_clone_states() -> Vec<StateVector> {
    let [plus_z, minus_z] = bb84_z_clones();
    [plus_z.clone(), minus_z.clone(), &plus_z + &minus_z, &plus_z - &minus_z]
        .into_iter()
        .map(|v| StateVector::normalized(v.as_slice().to_vec()).expect("nonzero clone state"))
        .collect()
}

/// A unitary realizing the published BB84 clone outputs: `|0,0>` and
/// `|1,0>` map to the two z-state clones; the columns for probe `|1>` are a
/// Gram-Schmidt completion over the computational basis (they never act on
/// a `|0>` probe).
pub fn bb84_reference_cloner() -> CloneUnitary {
    let [plus_z, minus_z] = bb84_z_clones();
    let mut columns: Vec<DVector<Complex64>> = vec![plus_z.clone(), minus_z.clone()];
    for k in 0..4 {
        if columns.len() == 4 {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(4);
        v[k] = Complex64::new(1.0, 0.0);
        for c in &columns {
            let proj = c.dotc(&v);
            v -= c * proj;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            columns.push(v.unscale(norm));
        }
    }
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    // Input index = 2 * signal + probe.
    m.set_column(0, &columns[0]);
    m.set_column(2, &columns[1]);
    m.set_column(1, &columns[2]);
    m.set_column(3, &columns[3]);
    CloneUnitary::new(m).expect("completion is unitary")
}

fn check_compatible(u: &CloneUnitary, signal: &Frame) -> Result<()> {
    let d = signal.dim();
    if u.dim() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            actual: u.dim(),
        });
    }
    Ok(())
}

/// `|<phi_j, phi_j| U |phi_j, 0>|^2` for each signal state.
pub fn clone_overlaps(u: &CloneUnitary, signal: &Frame) -> Result<Vec<f64>> {
    check_compatible(u, signal)?;
    let probe = StateVector::basis(signal.dim(), 0);
    Ok(signal
        .states()
        .iter()
        .map(|s| {
            let out = u.matrix() * s.tensor(&probe).as_vector();
            s.tensor(s).as_vector().dotc(&out).norm_sqr()
        })
        .collect())
}

/// Mean of [`clone_overlaps`].
pub fn average_clone_fidelity(u: &CloneUnitary, signal: &Frame) -> Result<f64> {
    let overlaps = clone_overlaps(u, signal)?;
    Ok(overlaps.iter().sum::<f64>() / overlaps.len() as f64)
}

/// Population variance of [`clone_overlaps`]; zero when every signal is
/// cloned equally well.
pub fn clone_symmetry_penalty(u: &CloneUnitary, signal: &Frame) -> Result<f64> {
    Ok(variance(&clone_overlaps(u, signal)?))
}

pub(crate) fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Average single-copy fidelities `<phi_j| rho |phi_j>` of the signal-side
/// and probe-side reduced output states.
pub fn reduced_clone_fidelities(u: &CloneUnitary, signal: &Frame) -> Result<(f64, f64)> {
    check_compatible(u, signal)?;
    let d = signal.dim();
    let probe = StateVector::basis(d, 0);
    let (mut sig_total, mut probe_total) = (0.0, 0.0);
    for s in signal.states() {
        let out = u.matrix() * s.tensor(&probe).as_vector();
        // Coefficient matrix: row = signal index, column = probe index.
        let c = DMatrix::from_fn(d, d, |a, b| out[a * d + b]);
        let rho_sig = &c * c.adjoint();
        let rho_probe = (c.adjoint() * &c).transpose();
        let v = s.as_vector();
        sig_total += v.dotc(&(rho_sig * v)).re;
        probe_total += v.dotc(&(rho_probe * v)).re;
    }
    let n = signal.len() as f64;
    Ok((sig_total / n, probe_total / n))
}
