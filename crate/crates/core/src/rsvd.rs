//! Randomized SVD by Gaussian sketching, plus the regularized solvers
//! that operate on any thin SVD in spectral form (Tikhonov filtering and
//! truncated SVD).

use crate::error::{Error, Result};
use crate::matcore::{svd, DenseMatrix, SvdFactorization};
use crate::randn::GaussianSource;
use nalgebra::{DMatrix, DVector};

/// Sketch parameters: sample size, seed for the Gaussian test matrix and
/// an optional number of power iterations (0 reproduces the plain sketch).
#[derive(Debug, Clone, Copy)]
pub struct SketchConfig {
    pub sample_size: usize,
    pub seed: u64,
    pub power_iterations: usize,
}

impl SketchConfig {
    pub fn new(sample_size: usize, seed: u64) -> Self {
        Self {
            sample_size,
            seed,
            power_iterations: 0,
        }
    }
}

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut g = GaussianSource::new(seed);
    let mut m = DMatrix::zeros(rows, cols);
    g.fill(m.as_mut_slice());
    m
}

/// Approximate rank-l SVD of K. For wide K the row space is sketched
/// (Y = Omega K, orthonormalize Y^T, factor K Q); for tall K the mirrored
/// column-space variant is used.
pub fn rsvd(k: &DenseMatrix, cfg: &SketchConfig) -> Result<SvdFactorization> {
    let (m, n) = k.shape();
    let l = cfg.sample_size;
    if l == 0 || l > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "sample size {l} out of range for a {m}x{n} matrix"
        )));
    }

    if m <= n {
        let omega = gaussian_matrix(l, m, cfg.seed);
        let mut y = &omega * k; // l x n
        for _ in 0..cfg.power_iterations {
            y = (&y * k.transpose()) * k;
        }
        let q = y.transpose().qr().q(); // n x l
        let b = k * &q; // m x l
        let fb = svd(&b)?;
        Ok(SvdFactorization {
            u: fb.u,
            singular_values: fb.singular_values,
            v: &q * fb.v,
            truncation_rank: l,
        })
    } else {
        let omega = gaussian_matrix(n, l, cfg.seed);
        let mut y = k * &omega; // m x l
        for _ in 0..cfg.power_iterations {
            y = k * (k.transpose() * &y);
        }
        let q = y.qr().q(); // m x l
        let b = q.transpose() * k; // l x n
        let fb = svd(&b)?;
        Ok(SvdFactorization {
            u: &q * fb.u,
            singular_values: fb.singular_values,
            v: fb.v,
            truncation_rank: l,
        })
    }
}

/// Tikhonov-filtered solution in spectral form:
/// y = sum_i sigma_i^2/(sigma_i^2 + mu^2) * (u_i^T b / sigma_i) * v_i.
pub fn tikhonov_filtered(
    f: &SvdFactorization,
    b: &DVector<f64>,
    mu: f64,
) -> Result<DVector<f64>> {
    if b.len() != f.u.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "tikhonov_filtered: b has length {}, U has {} rows",
            b.len(),
            f.u.nrows()
        )));
    }
    if mu < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "regularization parameter must be nonnegative, got {mu}"
        )));
    }
    let beta = f.u.transpose() * b;
    let smax = f.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = crate::matcore::rank_tolerance(f.u.nrows(), f.v.nrows(), smax);
    let mut y = DVector::zeros(f.v.nrows());
    for i in 0..f.truncation_rank {
        let s = f.singular_values[i];
        if s <= tol {
            continue;
        }
        let coeff = s * beta[i] / (s * s + mu * mu);
        y.axpy(coeff, &f.v.column(i).into_owned(), 1.0);
    }
    Ok(y)
}

/// Truncated SVD solution: y_k = sum_{i<k} (u_i^T b / sigma_i) v_i.
pub fn tsvd_solve(f: &SvdFactorization, b: &DVector<f64>, k: usize) -> Result<DVector<f64>> {
    if b.len() != f.u.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "tsvd_solve: b has length {}, U has {} rows",
            b.len(),
            f.u.nrows()
        )));
    }
    if k == 0 || k > f.truncation_rank {
        return Err(Error::InvalidParameter(format!(
            "truncation index {k} out of range 1..={}",
            f.truncation_rank
        )));
    }
    let beta = f.u.transpose() * b;
    let smax = f.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = crate::matcore::rank_tolerance(f.u.nrows(), f.v.nrows(), smax);
    let mut y = DVector::zeros(f.v.nrows());
    for i in 0..k {
        let s = f.singular_values[i];
        if s <= tol {
            continue;
        }
        y.axpy(beta[i] / s, &f.v.column(i).into_owned(), 1.0);
    }
    Ok(y)
}
