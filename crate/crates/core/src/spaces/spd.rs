//! Symmetric positive definite matrices with the affine-invariant and
//! Bures–Wasserstein metrics, plus the symmetric matrix-function core
//! (sqrt, log, powers) they are built on.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative symmetry tolerance for validated constructors.
const SYMMETRY_RTOL: f64 = 1e-10;

/// A symmetric positive definite matrix with runtime dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
}

impl SpdMatrix {
    /// Validates symmetry (relative Frobenius tolerance 1e-10) and strict
    /// positive definiteness, then stores the symmetrized matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::invalid("matrix must be square and nonempty"));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        let norm = m.norm();
        let asym = (&m - m.transpose()).norm();
        if asym > SYMMETRY_RTOL * norm.max(1e-300) {
            return Err(Error::NotPositiveDefinite(format!(
                "asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:.0e} relative"
            )));
        }
        let s = symmetrize(&m);
        let eig = sym_eigen(&s);
        let lambda_min = eig.values[0];
        if lambda_min <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "smallest eigenvalue {lambda_min:.3e} is not positive"
            )));
        }
        Ok(Self { m: s })
    }

    /// Wraps a matrix that is positive definite by construction (geodesic
    /// and matrix-function outputs); only symmetrizes against round-off.
    pub(crate) fn from_computed(m: DMatrix<f64>) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Smallest eigenvalue, recomputed from the stored matrix.
    pub fn lambda_min(&self) -> f64 {
        sym_eigen(&self.m).values[0]
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }
}

/// `(m + mᵀ)/2`, absorbing round-off before eigendecomposition.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = m.clone();
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted
/// ascending and the eigenvector columns permuted to match.
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn sym_eigen(m: &DMatrix<f64>) -> SymEigen {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    SymEigen { values, vectors }
}

/// Applies a scalar function to the spectrum: `Q f(Λ) Qᵀ`.
///
/// The input is symmetrized first. Errors if `f` produces a non-finite
/// value on some eigenvalue (domain violation, e.g. `log` of a
/// nonpositive eigenvalue).
pub fn sym_matrix_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let eig = sym_eigen(&symmetrize(m));
    let mut fv = DVector::zeros(eig.values.len());
    for (i, &lambda) in eig.values.iter().enumerate() {
        let y = f(lambda);
        if !y.is_finite() {
            return Err(Error::invalid(format!(
                "matrix function undefined on eigenvalue {lambda:.6e}"
            )));
        }
        fv[i] = y;
    }
    let q = &eig.vectors;
    Ok(symmetrize(&(q * DMatrix::from_diagonal(&fv) * q.transpose())))
}

/// Symmetric square root of an SPD (or PSD up to round-off) matrix;
/// eigenvalues are clamped at zero before the root.
pub fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    sym_matrix_function(m, |x| x.max(0.0).sqrt()).expect("sqrt of clamped spectrum is finite")
}

/// Affine-invariant distance `‖log(A^{−1/2} B A^{−1/2})‖_F`.
pub fn ai_distance(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    let ea = sym_eigen(a.matrix());
    let inv_sqrt_a = spectral_map(&ea, |x| 1.0 / x.sqrt());
    let inner = symmetrize(&(&inv_sqrt_a * b.matrix() * &inv_sqrt_a));
    let ev = sym_eigen(&inner).values;
    ev.iter().map(|&l| l.max(f64::MIN_POSITIVE).ln().powi(2)).sum::<f64>().sqrt()
}

/// Affine-invariant geodesic `A^{1/2} (A^{−1/2} B A^{−1/2})^t A^{1/2}`.
///
/// `t = ½` is the geometric mean. Caller validates `t ∈ [0, 1]`.
pub fn ai_interpolate(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> SpdMatrix {
    let ea = sym_eigen(a.matrix());
    let sqrt_a = spectral_map(&ea, f64::sqrt);
    let inv_sqrt_a = spectral_map(&ea, |x| 1.0 / x.sqrt());
    let inner = symmetrize(&(&inv_sqrt_a * b.matrix() * &inv_sqrt_a));
    let powered = sym_matrix_function(&inner, |x| x.max(f64::MIN_POSITIVE).powf(t))
        .expect("power of clamped spectrum is finite");
    SpdMatrix::from_computed(&sqrt_a * powered * &sqrt_a)
}

/// Squared Bures–Wasserstein distance
/// `tr(A) + tr(B) − 2 tr((A^{1/2} B A^{1/2})^{1/2})`, clamped at zero.
pub fn bw_distance_sq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let sa = sym_sqrt(a);
    let inner = symmetrize(&(&sa * b * &sa));
    let cross: f64 = sym_eigen(&inner)
        .values
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    (a.trace() + b.trace() - 2.0 * cross).max(0.0)
}

/// Bures–Wasserstein distance.
pub fn bw_distance(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    bw_distance_sq(a.matrix(), b.matrix()).sqrt()
}

/// Bures–Wasserstein geodesic `γ(t) = M_t A M_t` with
/// `M_t = (1−t) I + t T` and optimal map
/// `T = A^{−1/2} (A^{1/2} B A^{1/2})^{1/2} A^{−1/2}`.
///
/// For positive definite endpoints the geodesic is unique and stays in the
/// cone for all `t ∈ [0, 1]`.
pub fn bw_interpolate(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> SpdMatrix {
    let ea = sym_eigen(a.matrix());
    let sqrt_a = spectral_map(&ea, f64::sqrt);
    let inv_sqrt_a = spectral_map(&ea, |x| 1.0 / x.sqrt());
    let cross = sym_sqrt(&symmetrize(&(&sqrt_a * b.matrix() * &sqrt_a)));
    let map = symmetrize(&(&inv_sqrt_a * cross * &inv_sqrt_a));
    let dim = a.dim();
    let m_t = DMatrix::identity(dim, dim) * (1.0 - t) + map * t;
    SpdMatrix::from_computed(&m_t * a.matrix() * &m_t)
}

fn spectral_map(eig: &SymEigen, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let fv = DVector::from_fn(eig.values.len(), |i, _| f(eig.values[i]));
    symmetrize(&(&eig.vectors * DMatrix::from_diagonal(&fv) * eig.vectors.transpose()))
}
