//! General-form regularized solvers on a GSVD of the pair (A, L):
//! Tikhonov filtering, truncated GSVD, and the randomized variant that
//! factors the pair restricted to a sketched right subspace.

use crate::error::{Error, Result};
use crate::matcore::{gsvd, DenseMatrix, GsvdFactorization};
use crate::rsvd::{rsvd, SketchConfig};
use nalgebra::DVector;

/// Cosines at or below this level carry no recoverable information: the
/// corresponding direction of A is numerically null.
fn c_tolerance(f: &GsvdFactorization) -> f64 {
    let cmax = f.c.iter().cloned().fold(0.0, f64::max);
    crate::matcore::rank_tolerance(f.u.nrows(), f.g.ncols(), cmax)
}

fn check_rhs(f: &GsvdFactorization, b: &DVector<f64>) -> Result<()> {
    if b.len() != f.u.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "right-hand side has length {}, U has {} rows",
            b.len(),
            f.u.nrows()
        )));
    }
    Ok(())
}

/// Tikhonov solution through the GSVD filter:
/// x = sum_i c_i (u_i^T b) / (c_i^2 + mu^2 s_i^2) * g_i.
/// Trailing indices with s_i = 0 pass through unregularized (filter 1);
/// indices with c_i = 0 are skipped.
pub fn cgsvd_tikhonov(
    f: &GsvdFactorization,
    b: &DVector<f64>,
    mu: f64,
) -> Result<DVector<f64>> {
    check_rhs(f, b)?;
    if mu < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "regularization parameter must be nonnegative, got {mu}"
        )));
    }
    let beta = f.u.transpose() * b;
    let n = f.g.ncols();
    let ctol = c_tolerance(f);
    let mut x = DVector::zeros(f.g.nrows());
    for i in 0..n {
        let c = f.c[i];
        if c <= ctol {
            continue;
        }
        let s = f.s[i];
        let coeff = c * beta[i] / (c * c + mu * mu * s * s);
        x.axpy(coeff, &f.g.column(i).into_owned(), 1.0);
    }
    Ok(x)
}

/// Truncated GSVD solution keeping the k largest generalized values:
/// x_k = sum_{i=q-k}^{q-1} (u_i^T b / c_i) g_i plus the unregularized tail,
/// with q = min(p, n).
pub fn tgsvd_solve(f: &GsvdFactorization, b: &DVector<f64>, k: usize) -> Result<DVector<f64>> {
    check_rhs(f, b)?;
    let q = f.num_pairs();
    let n = f.g.ncols();
    if k == 0 || k > q {
        return Err(Error::InvalidParameter(format!(
            "truncation index {k} out of range 1..={q}"
        )));
    }
    let beta = f.u.transpose() * b;
    let ctol = c_tolerance(f);
    let mut x = DVector::zeros(f.g.nrows());
    for i in (q - k)..q {
        let c = f.c[i];
        if c <= ctol {
            continue;
        }
        x.axpy(beta[i] / c, &f.g.column(i).into_owned(), 1.0);
    }
    for i in q..n {
        x.axpy(beta[i], &f.g.column(i).into_owned(), 1.0);
    }
    Ok(x)
}

/// Sketched GSVD: a rank-l right subspace of A, optionally augmented with
/// caller-supplied directions, and the GSVD of the restricted pair.
#[derive(Debug, Clone)]
pub struct RgsvdFactors {
    /// n x l' orthonormal sketch basis (l' = l + accepted augmentations).
    pub v1: DenseMatrix,
    /// GSVD of (A V1, L V1).
    pub inner: GsvdFactorization,
    /// Augmentation vectors dropped for lying in span(V1) already.
    pub skipped_augments: usize,
}

/// Build the sketched factorization. Augmentation vectors are projected
/// against the sketch basis and appended normalized; vectors numerically
/// inside the span are counted in `skipped_augments` instead.
pub fn rgsvd(
    a: &DenseMatrix,
    l: &DenseMatrix,
    cfg: &SketchConfig,
    augment: &[DVector<f64>],
) -> Result<RgsvdFactors> {
    let n = a.ncols();
    if l.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "rgsvd: A has {n} columns, L has {}",
            l.ncols()
        )));
    }
    let fa = rsvd(a, cfg)?;
    let mut cols: Vec<DVector<f64>> =
        (0..fa.v.ncols()).map(|j| fa.v.column(j).into_owned()).collect();
    let mut skipped = 0;
    for e in augment {
        if e.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "rgsvd: augmentation vector has length {}, expected {n}",
                e.len()
            )));
        }
        let mut w = e.clone();
        for _ in 0..2 {
            for q in &cols {
                let dot = q.dot(&w);
                w.axpy(-dot, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= 1e-10 * e.norm().max(1e-300) {
            skipped += 1;
            continue;
        }
        cols.push(w / norm);
    }
    let lp = cols.len();
    let mut v1 = DenseMatrix::zeros(n, lp);
    for (j, col) in cols.iter().enumerate() {
        v1.set_column(j, col);
    }
    let inner = gsvd(&(a * &v1), &(l * &v1))?;
    Ok(RgsvdFactors {
        v1,
        inner,
        skipped_augments: skipped,
    })
}

/// Tikhonov solution of the sketched problem, lifted back to R^n:
/// x = V1 * (GSVD filter solution of the restricted pair).
pub fn rgsvd_tikhonov(f: &RgsvdFactors, b: &DVector<f64>, mu: f64) -> Result<DVector<f64>> {
    let xhat = cgsvd_tikhonov(&f.inner, b, mu)?;
    Ok(&f.v1 * xhat)
}
