//! Dense factorization kernels shared by every solver in the crate:
//! SVD, QR with column pivoting, complete orthogonal decomposition,
//! CS decomposition, GSVD of a matrix pair, and pseudoinverse application.

mod cod;
mod gsvd;

pub use cod::{complete_orthogonal, CompleteOrthDecomp};
pub use gsvd::{cs_decompose, gsvd, CsDecomp, GsvdFactorization};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Universal dense carrier for operators, factors and data matrices.
/// Column-major `f64` storage with explicit row/column counts.
pub type DenseMatrix = DMatrix<f64>;

/// Build a matrix from row-major data, rejecting non-finite entries.
pub fn from_rows(rows: usize, cols: usize, data: &[f64]) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if data.len() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix needs {} values, got {}",
            rows,
            cols,
            rows * cols,
            data.len()
        )));
    }
    if !data.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("matrix entries must be finite".into()));
    }
    Ok(DMatrix::from_row_slice(rows, cols, data))
}

/// Numerical rank tolerance: sigma > eps * max(rows, cols) * sigma_max.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    f64::EPSILON * rows.max(cols) as f64 * sigma_max
}

fn check_nonempty(m: &DenseMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        Err(Error::EmptyMatrix)
    } else {
        Ok(())
    }
}

/// Flip the sign of each column so its largest-magnitude entry is positive.
/// Keeps factorizations deterministic and comparable across runs.
pub(crate) fn fix_column_signs(m: &mut DenseMatrix) -> Vec<f64> {
    let mut flips = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for i in 0..m.nrows() {
            let a = m[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        let sign = if m[(best, j)] < 0.0 { -1.0 } else { 1.0 };
        if sign < 0.0 {
            for i in 0..m.nrows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
        flips.push(sign);
    }
    flips
}

/// Extend `basis` (orthonormal columns) by `extra` orthonormal columns:
/// pivoted QR of the complementary projector I - B B^T picks the best
/// conditioned directions first.
pub(crate) fn orthonormal_completion(basis: &DenseMatrix, extra: usize) -> DenseMatrix {
    let n = basis.nrows();
    if extra == 0 {
        return DMatrix::zeros(n, 0);
    }
    let mut proj = DMatrix::identity(n, n);
    if basis.ncols() > 0 {
        proj -= basis * basis.transpose();
    }
    let q = proj.col_piv_qr().q();
    let mut added = q.columns(0, extra).into_owned();
    // one cleanup pass against the basis: the projector carries O(eps)
    // leakage that the QR cannot remove
    if basis.ncols() > 0 {
        let overlap = basis.transpose() * &added;
        added -= basis * overlap;
        for j in 0..extra {
            let norm = added.column(j).norm();
            added.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    added
}

// ── SVD ─────────────────────────────────────────────────────────────

/// Thin SVD with nonincreasing singular values and deterministic signs.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    /// m x k orthonormal left factor.
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative singular values (length k).
    pub singular_values: DVector<f64>,
    /// n x k orthonormal right factor.
    pub v: DenseMatrix,
    pub truncation_rank: usize,
}

impl SvdFactorization {
    /// Count of singular values above the shared rank tolerance.
    pub fn numerical_rank(&self) -> usize {
        let smax = self.singular_values.get(0).copied().unwrap_or(0.0);
        let tol = rank_tolerance(self.u.nrows(), self.v.nrows(), smax);
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    /// Reassemble U * diag(sigma) * V^T.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for j in 0..self.truncation_rank {
            let s = self.singular_values[j];
            us.column_mut(j).scale_mut(s);
        }
        &us * self.v.transpose()
    }
}

/// One-sided Jacobi sweeps: orthogonalize the columns of `b` by plane
/// rotations, accumulating the same rotations into `v`. Returns once a
/// full sweep performs no rotation.
fn jacobi_orthogonalize(b: &mut DenseMatrix, v: &mut DenseMatrix) {
    let (rows, cols) = b.shape();
    let vrows = v.nrows();
    let tol = 2.0 * f64::EPSILON;
    let bs = b.as_mut_slice();
    let vs = v.as_mut_slice();
    // maintained squared column norms; pairs of numerically dead columns
    // cannot move the factorization at working accuracy and are skipped
    let mut nsq: Vec<f64> = (0..cols)
        .map(|j| bs[j * rows..(j + 1) * rows].iter().map(|x| x * x).sum())
        .collect();
    let max_nsq = nsq.iter().cloned().fold(0.0, f64::max);
    let dead = max_nsq * f64::EPSILON * f64::EPSILON;
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (alpha, beta) = (nsq[p], nsq[q]);
                if alpha <= dead && beta <= dead {
                    continue;
                }
                let (lo, hi) = bs.split_at_mut(q * rows);
                let cp = &mut lo[p * rows..p * rows + rows];
                let cq = &mut hi[..rows];
                let gamma: f64 = cp.iter().zip(cq.iter()).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (bp, bq) = (*x, *y);
                    *x = c * bp - s * bq;
                    *y = s * bp + c * bq;
                }
                let (lo, hi) = vs.split_at_mut(q * vrows);
                let vp = &mut lo[p * vrows..p * vrows + vrows];
                let vq = &mut hi[..vrows];
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (a, bb) = (*x, *y);
                    *x = c * a - s * bb;
                    *y = s * a + c * bb;
                }
                // diagonal update of the implicit Gram matrix
                nsq[p] = alpha - t * gamma;
                nsq[q] = beta + t * gamma;
            }
        }
        if !rotated {
            return;
        }
    }
}

/// Full thin SVD, k = min(rows, cols).
///
/// A bidiagonalization SVD seeds the right factor, then one-sided Jacobi
/// sweeps polish it to machine accuracy; the seed makes the polish cheap
/// and the polish repairs the seed's failure modes (columns of wildly
/// different scale lose accuracy in the bidiagonal reduction).
pub fn svd(m: &DenseMatrix) -> Result<SvdFactorization> {
    check_nonempty(m)?;
    let (rows, cols) = m.shape();
    if rows < cols {
        // work on the transpose so the rotated factor has the long columns
        let f = svd(&m.transpose())?;
        return Ok(SvdFactorization {
            u: f.v,
            singular_values: f.singular_values,
            v: f.u,
            truncation_rank: f.truncation_rank,
        });
    }

    if rows > 2 * cols {
        // strongly rectangular input: reduce by a thin QR first and
        // factor the small triangle, which also preconditions the
        // Jacobi polish (column scaling survives the QR)
        let qr = m.clone().qr();
        let f = svd(&qr.r())?;
        let mut u = qr.q() * &f.u;
        let mut v = f.v;
        let flips = fix_column_signs(&mut u);
        for (j, sign) in flips.iter().enumerate() {
            if *sign < 0.0 {
                for i in 0..cols {
                    v[(i, j)] = -v[(i, j)];
                }
            }
        }
        return Ok(SvdFactorization {
            u,
            singular_values: f.singular_values,
            v,
            truncation_rank: f.truncation_rank,
        });
    }

    let mut v = match nalgebra::SVD::try_new(m.clone(), false, true, f64::EPSILON * 4.0, 0) {
        Some(fact) => fact.v_t.expect("requested").transpose(),
        None => DMatrix::identity(cols, cols),
    };
    let mut b = m * &v;
    jacobi_orthogonalize(&mut b, &mut v);

    let k = cols;
    let norms: Vec<f64> = (0..k).map(|j| b.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &c| norms[c].partial_cmp(&norms[a]).unwrap());

    let mut u = DMatrix::zeros(rows, k);
    let mut vv = DMatrix::zeros(cols, k);
    let mut s = DVector::zeros(k);
    let smax = norms[order[0]];
    let dead_tol = f64::EPSILON * smax; // columns with no usable direction
    let mut dead: Vec<usize> = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = norms[src];
        vv.set_column(dst, &v.column(src));
        if norms[src] > dead_tol {
            u.set_column(dst, &(b.column(src) / norms[src]));
        } else {
            dead.push(dst);
        }
    }
    // keep U orthonormal even across exactly null directions
    if !dead.is_empty() && dead.len() < k {
        let live: Vec<usize> = (0..k).filter(|i| !dead.contains(i)).collect();
        let base = DMatrix::from_fn(rows, live.len(), |r, j| u[(r, live[j])]);
        let extra = orthonormal_completion(&base, dead.len());
        for (slot, &dst) in dead.iter().enumerate() {
            u.set_column(dst, &extra.column(slot));
        }
    } else if dead.len() == k {
        let extra = orthonormal_completion(&DMatrix::zeros(rows, 0), k);
        u.copy_from(&extra);
    }

    let flips = fix_column_signs(&mut u);
    for (j, sign) in flips.iter().enumerate() {
        if *sign < 0.0 {
            for i in 0..cols {
                vv[(i, j)] = -vv[(i, j)];
            }
        }
    }
    Ok(SvdFactorization {
        u,
        singular_values: s,
        v: vv,
        truncation_rank: k,
    })
}

// ── QR with column pivoting ─────────────────────────────────────────

/// Householder QR with column pivoting: M * Pi = Q1 * T1, with Q1 holding
/// orthonormal columns spanning the range and T1 of full row rank.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// m x r orthonormal range basis.
    pub q1: DenseMatrix,
    /// r x n upper-trapezoidal factor (columns in pivoted order).
    pub t1: DenseMatrix,
    /// Pivot order: column j of M*Pi is column permutation[j] of M.
    pub permutation: Vec<usize>,
    pub numerical_rank: usize,
    rows: usize,
}

pub fn qr_pivoted(m: &DenseMatrix) -> Result<PivotedQr> {
    check_nonempty(m)?;
    let (rows, cols) = m.shape();
    let kmax = rows.min(cols);
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut norms_sq: Vec<f64> = (0..cols).map(|j| a.column(j).norm_squared()).collect();
    let orig_norms_sq = norms_sq.clone();
    // Householder vectors live below the diagonal of `a`; betas on the side.
    let mut betas = vec![0.0f64; kmax];

    for k in 0..kmax {
        // pivot: largest remaining column norm
        let mut pivot = k;
        for j in (k + 1)..cols {
            if norms_sq[j] > norms_sq[pivot] {
                pivot = j;
            }
        }
        if pivot != k {
            a.swap_columns(k, pivot);
            perm.swap(k, pivot);
            norms_sq.swap(k, pivot);
        }

        // reflector for column k
        let mut sigma = 0.0;
        for i in k..rows {
            sigma += a[(i, k)] * a[(i, k)];
        }
        let norm = sigma.sqrt();
        if norm > 0.0 {
            let alpha = if a[(k, k)] >= 0.0 { -norm } else { norm };
            let v0 = a[(k, k)] - alpha;
            let beta = -1.0 / (alpha * v0);
            a[(k, k)] = alpha;
            // store scaled reflector tail; head is implicit v0
            for i in (k + 1)..rows {
                a[(i, k)] /= v0;
            }
            betas[k] = beta * v0 * v0;
            // apply to trailing columns
            for j in (k + 1)..cols {
                let mut dot = a[(k, j)];
                for i in (k + 1)..rows {
                    dot += a[(i, k)] * a[(i, j)];
                }
                dot *= betas[k];
                a[(k, j)] -= dot;
                for i in (k + 1)..rows {
                    let vi = a[(i, k)];
                    a[(i, j)] -= dot * vi;
                }
            }
        } else {
            betas[k] = 0.0;
        }

        // downdate column norms, recomputing on heavy cancellation
        for j in (k + 1)..cols {
            norms_sq[j] -= a[(k, j)] * a[(k, j)];
            if norms_sq[j] < 1e-12 * orig_norms_sq[j] {
                let mut fresh = 0.0;
                for i in (k + 1)..rows {
                    fresh += a[(i, j)] * a[(i, j)];
                }
                norms_sq[j] = fresh;
            }
        }
    }

    // numerical rank from the diagonal of R
    let rmax = (0..kmax).map(|k| a[(k, k)].abs()).fold(0.0f64, f64::max);
    let tol = rank_tolerance(rows, cols, rmax);
    let mut rank = 0;
    for k in 0..kmax {
        if a[(k, k)].abs() > tol {
            rank = k + 1;
        } else {
            break;
        }
    }

    // T1: first `rank` rows of R
    let mut t1 = DMatrix::zeros(rank, cols);
    for i in 0..rank {
        for j in i..cols {
            t1[(i, j)] = a[(i, j)];
        }
    }

    // Q1: apply reflectors to the first `rank` identity columns
    let mut q1 = DMatrix::zeros(rows, rank);
    for j in 0..rank {
        q1[(j, j)] = 1.0;
    }
    for k in (0..kmax).rev() {
        if betas[k] == 0.0 {
            continue;
        }
        for j in 0..rank {
            let mut dot = q1[(k, j)];
            for i in (k + 1)..rows {
                dot += a[(i, k)] * q1[(i, j)];
            }
            dot *= betas[k];
            q1[(k, j)] -= dot;
            for i in (k + 1)..rows {
                let vi = a[(i, k)];
                q1[(i, j)] -= dot * vi;
            }
        }
    }

    Ok(PivotedQr {
        q1,
        t1,
        permutation: perm,
        numerical_rank: rank,
        rows,
    })
}

impl PivotedQr {
    /// Reassemble the factored matrix (columns back in original order).
    pub fn reconstruct(&self) -> DenseMatrix {
        let prod = &self.q1 * &self.t1;
        let cols = self.permutation.len();
        let mut m = DMatrix::zeros(self.q1.nrows(), cols);
        for j in 0..cols {
            m.set_column(self.permutation[j], &prod.column(j));
        }
        m
    }
}

/// Apply the Moore-Penrose pseudoinverse of the factored matrix to `v`,
/// computed as Pi * T1^T * (T1 T1^T)^{-1} * Q1^T * v.
pub fn pinv_apply(f: &PivotedQr, v: &DVector<f64>) -> Result<DVector<f64>> {
    if v.len() != f.rows {
        return Err(Error::ShapeMismatch(format!(
            "pinv_apply: vector length {} != matrix rows {}",
            v.len(),
            f.rows
        )));
    }
    let cols = f.permutation.len();
    if f.numerical_rank == 0 {
        return Ok(DVector::zeros(cols));
    }
    let z = f.q1.transpose() * v;
    let gram = &f.t1 * f.t1.transpose();
    let chol = nalgebra::Cholesky::new(gram).ok_or_else(|| {
        Error::InvalidParameter("T1 T1^T not positive definite in pinv_apply".into())
    })?;
    let w = chol.solve(&z);
    let u = f.t1.transpose() * w;
    let mut x = DVector::zeros(cols);
    for j in 0..cols {
        x[f.permutation[j]] = u[j];
    }
    Ok(x)
}

/// Dense pseudoinverse of the factored matrix (cols x rows), for callers
/// that need the operator itself rather than a single application.
pub fn pinv_matrix(f: &PivotedQr) -> DenseMatrix {
    let cols = f.permutation.len();
    let mut out = DMatrix::zeros(cols, f.rows);
    for i in 0..f.rows {
        let mut e = DVector::zeros(f.rows);
        e[i] = 1.0;
        let col = pinv_apply(f, &e).expect("length checked");
        out.set_column(i, &col);
    }
    out
}
