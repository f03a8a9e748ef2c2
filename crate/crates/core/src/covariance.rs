//! Canonical sample covariance (zero-mean model) and the eigenvalue-floor
//! bookkeeping used by the Bures–Wasserstein experiments.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::spd::{sym_eigen, SpdMatrix};

/// A sample covariance matrix with its smallest eigenvalue and, when a
/// floor λ₀ was declared, whether it is satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub matrix: DMatrix<f64>,
    pub lambda_min: f64,
    /// `Some(λ_min ≥ λ₀)` when a floor was declared via `with_floor`.
    pub floor_satisfied: Option<bool>,
}

impl CovarianceEstimate {
    /// Declares the floor λ₀ and records whether the estimate satisfies it.
    pub fn with_floor(mut self, lambda0: f64) -> Self {
        self.floor_satisfied = Some(self.lambda_min >= lambda0);
        self
    }

    /// Converts into an SPD point; fails on singular (PSD-only) estimates,
    /// which make the affine-invariant metric undefined.
    pub fn into_spd(self) -> Result<SpdMatrix> {
        SpdMatrix::new(self.matrix)
    }
}

/// `Σ̂ = (1/n) Σ X_i X_iᵀ` without centering (zero-mean model).
///
/// The accumulation is over outer products, so the result is exactly
/// symmetric and positive semidefinite by construction.
pub fn sample_covariance(data: &[DVector<f64>]) -> Result<CovarianceEstimate> {
    let Some(first) = data.first() else {
        return Err(Error::invalid("sample covariance of an empty sample"));
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::invalid("data vectors must be nonempty"));
    }
    let mut acc = DMatrix::<f64>::zeros(d, d);
    for x in data {
        if x.len() != d {
            return Err(Error::invalid(format!(
                "inconsistent dimensions: expected {d}, got {}",
                x.len()
            )));
        }
        // accumulate the upper triangle and mirror once at the end
        for i in 0..d {
            let xi = x[i];
            for j in i..d {
                acc[(i, j)] += xi * x[j];
            }
        }
    }
    let inv_n = 1.0 / data.len() as f64;
    for i in 0..d {
        for j in i..d {
            let v = acc[(i, j)] * inv_n;
            acc[(i, j)] = v;
            acc[(j, i)] = v;
        }
    }
    let lambda_min = sym_eigen(&acc).values[0];
    Ok(CovarianceEstimate {
        matrix: acc,
        lambda_min,
        floor_satisfied: None,
    })
}

/// True iff the smallest eigenvalue is at least `lambda0` (inclusive).
pub fn eigenvalue_floor_check(est: &CovarianceEstimate, lambda0: f64) -> Result<bool> {
    if !(lambda0 > 0.0) {
        return Err(Error::invalid("lambda0 must be positive"));
    }
    Ok(est.lambda_min >= lambda0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{generate_spd_with_spectrum, sample_multivariate_t, RngStream};

    fn v(vals: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(vals)
    }

    #[test]
    fn rank_deficient_two_point_sample() {
        let est = sample_covariance(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])]).unwrap();
        assert_eq!(est.matrix[(0, 0)], 1.0);
        assert_eq!(est.matrix[(1, 1)], 0.0);
        assert_eq!(est.matrix[(0, 1)], 0.0);
        assert!(est.lambda_min.abs() < 1e-14);
        assert!(!eigenvalue_floor_check(&est, 0.1).unwrap());
        assert_eq!(est.with_floor(0.1).floor_satisfied, Some(false));
    }

    #[test]
    fn standard_basis_gives_half_identity() {
        let est = sample_covariance(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert_eq!(est.matrix[(0, 0)], 0.5);
        assert_eq!(est.matrix[(1, 1)], 0.5);
        assert_eq!(est.matrix[(0, 1)], 0.0);
    }

    #[test]
    fn floor_check_boundary_is_inclusive() {
        let est = sample_covariance(&[v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])])
            .unwrap();
        // eigenvalues are exactly 0.5
        assert!(eigenvalue_floor_check(&est, 0.5).unwrap());
        assert!(!eigenvalue_floor_check(&est, 0.5 + 1e-12).unwrap());
        assert!(eigenvalue_floor_check(&est, -1.0).is_err());
    }

    #[test]
    fn empty_input_rejected() {
        assert!(sample_covariance(&[]).is_err());
    }

    #[test]
    fn output_is_symmetric_psd_and_scales_quadratically() {
        let mut rng = RngStream::new(21, 0).rng();
        let sigma = generate_spd_with_spectrum(&[1.0, 2.0, 3.0], &mut rng).unwrap();
        let data = sample_multivariate_t(4.0, &sigma, 500, &mut rng).unwrap();
        let est = sample_covariance(&data).unwrap();
        // exact symmetry by construction
        assert_eq!(est.matrix, est.matrix.transpose());
        assert!(est.lambda_min >= -1e-10 * est.matrix.trace());
        // c^2 scaling, exact up to float rounding
        let scaled: Vec<DVector<f64>> = data.iter().map(|x| x * 3.0).collect();
        let est9 = sample_covariance(&scaled).unwrap();
        let rel = (&est9.matrix - est.matrix.scale(9.0)).norm() / est9.matrix.norm();
        assert!(rel < 1e-12);
    }

    #[test]
    fn t_sample_covariance_approaches_five_sigma() {
        let mut rng = RngStream::new(20, 0).rng();
        let sigma = generate_spd_with_spectrum(&[1.0, 2.0, 3.0, 4.0], &mut rng).unwrap();
        let data = sample_multivariate_t(2.5, &sigma, 1_000_000, &mut rng).unwrap();
        let est = sample_covariance(&data).unwrap();
        let target = sigma.matrix() * 5.0;
        for i in 0..4 {
            for j in 0..4 {
                // entrywise relative on the covariance scale sqrt(s_ii s_jj)
                let denom = target[(i, j)]
                    .abs()
                    .max((target[(i, i)] * target[(j, j)]).sqrt());
                let rel = (est.matrix[(i, j)] - target[(i, j)]).abs() / denom;
                assert!(rel < 0.10, "entry ({i},{j}): {} vs {}", est.matrix[(i, j)], target[(i, j)]);
            }
        }
    }

    #[test]
    fn singular_estimate_cannot_enter_the_ai_space() {
        let est = sample_covariance(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])]).unwrap();
        assert!(est.into_spd().is_err());
    }
}
