//! CS decomposition of a column-orthonormal stacked pair and the GSVD of
//! a matrix pair (A, L) built from it via a stacked QR factorization.

use super::{fix_column_signs, orthonormal_completion, rank_tolerance, DenseMatrix};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// CS decomposition of [Qa; Ql] with orthonormal columns:
/// Qa = U C W^T, Ql = V S W^T, c ascending, s descending, c^2 + s^2 = 1.
#[derive(Debug, Clone)]
pub struct CsDecomp {
    /// ma x n, orthonormal columns.
    pub u: DenseMatrix,
    /// pl x min(pl, n), orthonormal columns.
    pub v: DenseMatrix,
    /// Cosines, nondecreasing (length n).
    pub c: DVector<f64>,
    /// Sines, nonincreasing (length n); zero for indices >= min(pl, n).
    pub s: DVector<f64>,
    /// n x n orthogonal shared right factor.
    pub w: DenseMatrix,
}

impl CsDecomp {
    /// Reassemble the Qa block: U * diag(c) * W^T.
    pub fn reconstruct_a(&self) -> DenseMatrix {
        let mut uc = self.u.clone();
        for j in 0..uc.ncols() {
            let cj = self.c[j];
            uc.column_mut(j).scale_mut(cj);
        }
        &uc * self.w.transpose()
    }

    /// Reassemble the Ql block: V * diag(s) * W^T over the live columns.
    pub fn reconstruct_l(&self) -> DenseMatrix {
        let k = self.v.ncols();
        let mut vs = self.v.clone();
        for j in 0..k {
            let sj = self.s[j];
            vs.column_mut(j).scale_mut(sj);
        }
        &vs * self.w.columns(0, k).transpose()
    }
}

/// CS decomposition via an SVD of the Qa block, re-resolving the
/// small-sine subspace from the Ql side. The split at 1/sqrt(2) keeps
/// every quantity derived on the side where it is well conditioned:
/// tiny cosines come out of Qa's SVD, tiny sines out of Ql's.
pub fn cs_decompose(qa: &DenseMatrix, ql: &DenseMatrix) -> Result<CsDecomp> {
    let n = qa.ncols();
    if n == 0 || qa.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if ql.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "cs_decompose: Qa has {} columns, Ql has {}",
            n,
            ql.ncols()
        )));
    }
    if qa.nrows() < n {
        return Err(Error::InvalidParameter(format!(
            "cs_decompose: Qa block must be at least square ({}x{})",
            qa.nrows(),
            n
        )));
    }
    let gram = qa.transpose() * qa + ql.transpose() * ql;
    let defect = (&gram - DMatrix::identity(n, n)).amax();
    if defect > 1e-10 {
        return Err(Error::NotOrthonormal { defect });
    }

    let pl = ql.nrows();
    let k = pl.min(n);
    let split = std::f64::consts::FRAC_1_SQRT_2;

    // SVD of Qa: cosines ascending after reversal, U exactly orthonormal.
    let fa = super::svd(qa)?;
    let mut c = DVector::zeros(n);
    let mut w = DMatrix::zeros(n, n);
    let mut u = DMatrix::zeros(qa.nrows(), n);
    for i in 0..n {
        let src = n - 1 - i;
        c[i] = fa.singular_values[src].min(1.0);
        w.set_column(i, &fa.v.column(src));
        u.set_column(i, &fa.u.column(src));
    }

    // group 1: c <= 1/sqrt(2), so s >= 1/sqrt(2) and V is safe to read off
    // from Ql W directly; group 2 needs its subspace re-resolved below.
    let n1 = (0..n).take_while(|&i| c[i] <= split).count();
    let n2 = n - n1;

    let mut s = DVector::zeros(n);
    let mut v = DMatrix::zeros(pl, k);
    for i in 0..n1 {
        let col: DVector<f64> = ql * w.column(i);
        let norm = col.norm();
        s[i] = norm.min(1.0);
        v.set_column(i, &(col / norm));
    }

    if n2 > 0 {
        // rotate the large-cosine subspace so Ql is diagonalized on it:
        // SVD of M = Ql W2 gives the sines directly, with full accuracy
        // for sines near zero.
        let w2 = w.columns(n1, n2).into_owned();
        let m = ql * &w2;
        let fm = super::svd(&m)?;
        let k2 = fm.singular_values.len();
        let mut h = DMatrix::zeros(n2, n2);
        h.columns_mut(0, k2).copy_from(&fm.v);
        if k2 < n2 {
            let extra = orthonormal_completion(&fm.v, n2 - k2);
            h.columns_mut(k2, n2 - k2).copy_from(&extra);
        }
        let w2_rot = &w2 * &h;
        w.columns_mut(n1, n2).copy_from(&w2_rot);

        let s_tol = rank_tolerance(pl.max(n), n, 1.0);
        for j in 0..n2 {
            let i = n1 + j;
            let sj = if j < k2 { fm.singular_values[j].min(1.0) } else { 0.0 };
            s[i] = if sj > s_tol { sj } else { 0.0 };
            if i < k {
                v.set_column(i, &fm.u.column(j));
            }
            // cosine and left vector from the rotated column; c is near 1
            // here so the norm and direction are both well conditioned
            let col: DVector<f64> = qa * w.column(i);
            let norm = col.norm();
            c[i] = norm.min(1.0);
            u.set_column(i, &(col / norm));
        }
    }

    // deterministic signs: flip W columns, mirroring the flip into U and V
    let flips = fix_column_signs(&mut w);
    for (j, sign) in flips.iter().enumerate() {
        if *sign < 0.0 {
            u.column_mut(j).neg_mut();
            if j < k {
                v.column_mut(j).neg_mut();
            }
        }
    }

    Ok(CsDecomp { u, v, c, s, w })
}

/// GSVD of the pair (A, L): A = U C G^{-1}, L = V S G^{-1}, obtained from
/// the thin QR of the stacked pair followed by the CS decomposition.
#[derive(Debug, Clone)]
pub struct GsvdFactorization {
    /// m x n, orthonormal columns.
    pub u: DenseMatrix,
    /// Left factor for L: p x min(p, n), orthonormal columns.
    pub v: DenseMatrix,
    /// Cosines, nondecreasing.
    pub c: DVector<f64>,
    /// Sines, nonincreasing; zero on the trailing n - p indices when p < n.
    pub s: DVector<f64>,
    /// n x n right factor with columns g_i.
    pub g: DenseMatrix,
    /// Row count of L.
    pub p: usize,
    // kept for applying G^{-1} = W^T R without an explicit inverse
    w: DenseMatrix,
    r: DenseMatrix,
}

impl GsvdFactorization {
    /// Number of (c, s) pairs subject to regularization: min(p, n).
    pub fn num_pairs(&self) -> usize {
        self.p.min(self.g.ncols())
    }

    /// Apply G^{-1} = W^T R to a matrix.
    pub fn apply_g_inv(&self, m: &DenseMatrix) -> DenseMatrix {
        self.w.transpose() * (&self.r * m)
    }

    /// Reassemble A = U C G^{-1}.
    pub fn reconstruct_a(&self) -> DenseMatrix {
        let mut uc = self.u.clone();
        for j in 0..uc.ncols() {
            let cj = self.c[j];
            uc.column_mut(j).scale_mut(cj);
        }
        &uc * self.w.transpose() * &self.r
    }

    /// Reassemble L = V S G^{-1}.
    pub fn reconstruct_l(&self) -> DenseMatrix {
        let k = self.v.ncols();
        let mut vs = self.v.clone();
        for j in 0..k {
            let sj = self.s[j];
            vs.column_mut(j).scale_mut(sj);
        }
        &vs * self.w.columns(0, k).transpose() * &self.r
    }
}

pub fn gsvd(a: &DenseMatrix, l: &DenseMatrix) -> Result<GsvdFactorization> {
    let (m, n) = a.shape();
    let p = l.nrows();
    if m == 0 || n == 0 || p == 0 {
        return Err(Error::EmptyMatrix);
    }
    if l.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "gsvd: A has {} columns, L has {}",
            n,
            l.ncols()
        )));
    }
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "gsvd: A must have at least as many rows as columns ({m}x{n})"
        )));
    }

    let mut stack = DMatrix::zeros(m + p, n);
    stack.rows_mut(0, m).copy_from(a);
    stack.rows_mut(m, p).copy_from(l);
    let qr = stack.qr();
    let q = qr.q();
    let r = qr.r();

    let rmax = (0..n).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
    let tol = rank_tolerance(m + p, n, rmax);
    if (0..n).any(|i| r[(i, i)].abs() <= tol) {
        return Err(Error::RankDeficientStack);
    }

    let qa = q.rows(0, m).into_owned();
    let ql = q.rows(m, p).into_owned();
    let cs = cs_decompose(&qa, &ql)?;

    // G from R G = W (R upper triangular, nonsingular by the rank check)
    let g = r
        .solve_upper_triangular(&cs.w)
        .expect("R nonsingular by rank check");

    Ok(GsvdFactorization {
        u: cs.u,
        v: cs.v,
        c: cs.c,
        s: cs.s,
        g,
        p,
        w: cs.w,
        r,
    })
}
