//! Complete orthogonal decomposition: U^T M V = [T 0; 0 0] with T
//! nonsingular triangular of order rank(M). Built from pivoted QR of M
//! followed by a QR of the leading rows transposed.

use super::{orthonormal_completion, qr_pivoted, DenseMatrix};
use crate::error::Result;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct CompleteOrthDecomp {
    /// m x m orthogonal; first r columns span R(M).
    pub u: DenseMatrix,
    /// n x n orthogonal; last n - r columns span N(M).
    pub v: DenseMatrix,
    /// r x r nonsingular lower-triangular block.
    pub t: DenseMatrix,
    pub numerical_rank: usize,
}

impl CompleteOrthDecomp {
    /// Orthonormal basis of the range (first r columns of U).
    pub fn range_basis(&self) -> DenseMatrix {
        self.u.columns(0, self.numerical_rank).into_owned()
    }

    /// Orthonormal basis of the null space (last n - r columns of V).
    pub fn null_basis(&self) -> DenseMatrix {
        let n = self.v.ncols();
        self.v.columns(self.numerical_rank, n - self.numerical_rank).into_owned()
    }

    /// Dense Moore-Penrose pseudoinverse V1 * T^{-1} * U1^T (n x m).
    pub fn pinv_matrix(&self) -> DenseMatrix {
        let r = self.numerical_rank;
        let n = self.v.ncols();
        let m = self.u.nrows();
        if r == 0 {
            return DMatrix::zeros(n, m);
        }
        let u1t = self.u.columns(0, r).transpose();
        // forward-substitute the lower-triangular T against U1^T
        let sol = self
            .t
            .clone()
            .solve_lower_triangular(&u1t.into_owned())
            .expect("T nonsingular by construction");
        self.v.columns(0, r) * sol
    }

    /// Reassemble U * [T 0; 0 0] * V^T.
    pub fn reconstruct(&self) -> DenseMatrix {
        let r = self.numerical_rank;
        let mut block = DMatrix::zeros(self.u.ncols(), self.v.ncols());
        for i in 0..r {
            for j in 0..r {
                block[(i, j)] = self.t[(i, j)];
            }
        }
        &self.u * block * self.v.transpose()
    }
}

pub fn complete_orthogonal(m: &DenseMatrix) -> Result<CompleteOrthDecomp> {
    let (rows, cols) = m.shape();
    let pq = qr_pivoted(m)?;
    let r = pq.numerical_rank;

    if r == 0 {
        return Ok(CompleteOrthDecomp {
            u: DMatrix::identity(rows, rows),
            v: DMatrix::identity(cols, cols),
            t: DMatrix::zeros(0, 0),
            numerical_rank: 0,
        });
    }

    // T1 = Ttilde^T * Qtilde^T from a plain QR of T1^T (n x r, full rank r)
    let qr = pq.t1.transpose().qr();
    let q_tilde = qr.q(); // n x r
    let t = qr.r().transpose(); // r x r lower triangular

    // U = [Q1 | completion]
    let u_extra = orthonormal_completion(&pq.q1, rows - r);
    let mut u = DMatrix::zeros(rows, rows);
    u.columns_mut(0, r).copy_from(&pq.q1);
    if rows > r {
        u.columns_mut(r, rows - r).copy_from(&u_extra);
    }

    // V = Pi * [Qtilde | completion]: undo the column pivoting row-wise
    let v_extra = orthonormal_completion(&q_tilde, cols - r);
    let mut v_base = DMatrix::zeros(cols, cols);
    v_base.columns_mut(0, r).copy_from(&q_tilde);
    if cols > r {
        v_base.columns_mut(r, cols - r).copy_from(&v_extra);
    }
    let mut v = DMatrix::zeros(cols, cols);
    for j in 0..cols {
        v.set_row(pq.permutation[j], &v_base.row(j));
    }

    Ok(CompleteOrthDecomp {
        u,
        v,
        t,
        numerical_rank: r,
    })
}
