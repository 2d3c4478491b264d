//! Shared oracles and instance generators for the integration suites.
//!
//! The oracles deliberately avoid the library's own factorization code:
//! a one-sided Jacobi SVD orthogonalizes columns by plane rotations only,
//! so it provides an independent reference for pseudoinverse solutions.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use regusolve_core::matcore::DenseMatrix;
use regusolve_core::randn::GaussianSource;

/// Thin SVD by one-sided Jacobi: returns (U, sigma, V) with descending
/// singular values, A = U diag(sigma) V^T.
pub fn jacobi_svd(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let (m, n) = a.shape();
    if m < n {
        let (u, s, v) = jacobi_svd(&a.transpose());
        return (v, s, u);
    }
    let mut work = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let cp = work.column(p).into_owned();
                let cq = work.column(q).into_owned();
                let alpha = cp.norm_squared();
                let beta = cq.norm_squared();
                let gamma = cp.dot(&cq);
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)];
                    work[(i, p)] = c * wp - s * wq;
                    work[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let mut u = DMatrix::zeros(m, n);
    let mut vv = DMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            u.set_column(dst, &(work.column(src) / s));
        }
        vv.set_column(dst, &v.column(src));
    }
    (u, sigma, vv)
}

/// Minimum-norm least-squares solution via the Jacobi SVD oracle.
pub fn pinv_solve(a: &DenseMatrix, b: &DVector<f64>) -> DVector<f64> {
    let (u, sigma, v) = jacobi_svd(a);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let tol = f64::EPSILON * a.nrows().max(a.ncols()) as f64 * smax;
    let proj = u.transpose() * b;
    let mut x = DVector::zeros(v.nrows());
    for (i, &s) in sigma.iter().enumerate() {
        if s > tol {
            x.axpy(proj[i] / s, &v.column(i).into_owned(), 1.0);
        }
    }
    x
}

/// Oracle for min ||Ax-b||^2 + mu^2 ||Lx||^2: minimum-norm solution of the
/// stacked least-squares problem [A; mu L] x = [b; 0].
pub fn stacked_tikhonov_oracle(
    a: &DenseMatrix,
    l: &DenseMatrix,
    b: &DVector<f64>,
    mu: f64,
) -> DVector<f64> {
    if mu == 0.0 {
        return pinv_solve(a, b);
    }
    let (m, n) = a.shape();
    let p = l.nrows();
    let mut stack = DMatrix::zeros(m + p, n);
    stack.rows_mut(0, m).copy_from(a);
    stack.rows_mut(m, p).copy_from(&(l * mu));
    let mut rhs = DVector::zeros(m + p);
    rhs.rows_mut(0, m).copy_from(b);
    pinv_solve(&stack, &rhs)
}

/// Oracle via the regularized normal equations (A^T A + mu^2 L^T L) x = A^T b;
/// valid when the stacked matrix has full column rank.
pub fn normal_equations_oracle(
    a: &DenseMatrix,
    l: &DenseMatrix,
    b: &DVector<f64>,
    mu: f64,
) -> Option<DVector<f64>> {
    let lhs = a.transpose() * a + l.transpose() * l * (mu * mu);
    let rhs = a.transpose() * b;
    lhs.lu().solve(&rhs)
}

/// Seeded dense Gaussian matrix.
pub fn randn_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut g = GaussianSource::new(seed);
    let mut m = DMatrix::zeros(rows, cols);
    g.fill(m.as_mut_slice());
    m
}

/// Seeded Gaussian vector.
pub fn randn_vector(len: usize, seed: u64) -> DVector<f64> {
    let mut g = GaussianSource::new(seed);
    let mut v = DVector::zeros(len);
    g.fill(v.as_mut_slice());
    v
}

/// Random matrix of exact rank r.
pub fn randn_rank_deficient(rows: usize, cols: usize, r: usize, seed: u64) -> DenseMatrix {
    let left = randn_matrix(rows, r, seed.wrapping_mul(2).wrapping_add(1));
    let right = randn_matrix(r, cols, seed.wrapping_mul(2).wrapping_add(2));
    left * right
}

pub fn rel_err(x: &DVector<f64>, want: &DVector<f64>) -> f64 {
    (x - want).norm() / want.norm().max(1e-300)
}

pub fn rel_err_mat(x: &DenseMatrix, want: &DenseMatrix) -> f64 {
    (x - want).norm() / want.norm().max(1e-300)
}

/// One seeded general-form instance per transformation case family;
/// dims stay small so the Jacobi oracle is cheap.
pub fn transform_instance(
    seed: u64,
) -> (
    DenseMatrix,
    DenseMatrix,
    DVector<f64>,
    regusolve_core::transform::CaseTag,
) {
    use regusolve_core::problems::{derivative_operator, OperatorKind};
    use regusolve_core::transform::CaseTag;
    let n = 3 + (seed % 8) as usize; // 3..=10
    let m = n + 2 + (seed % 3) as usize;
    let b = randn_vector(m, seed.wrapping_mul(31).wrapping_add(5));
    match seed % 5 {
        0 => {
            let a = randn_matrix(m, n, 7 * seed + 1);
            let l = randn_matrix(n, n, 7 * seed + 2);
            (a, l, b, CaseTag::SquareNonsingular)
        }
        1 => {
            let a = randn_matrix(m, n, 7 * seed + 1);
            let l = randn_matrix(n + 2, n, 7 * seed + 2);
            (a, l, b, CaseTag::FullColRank)
        }
        2 => {
            let a = randn_matrix(m, n, 7 * seed + 1);
            let kind = if seed % 2 == 0 {
                OperatorKind::D1
            } else {
                OperatorKind::D2
            };
            let l = derivative_operator(kind, n).unwrap();
            (a, l, b, CaseTag::FullRowRank)
        }
        3 => {
            // A = B L puts N(L) inside N(A)
            let l = derivative_operator(OperatorKind::D1, n).unwrap();
            let bm = randn_matrix(m, n - 1, 7 * seed + 1);
            let b_short = randn_vector(m, seed.wrapping_mul(31).wrapping_add(5));
            (&bm * &l, l, b_short, CaseTag::NullInNull)
        }
        _ => {
            let a = randn_matrix(m, n, 7 * seed + 1);
            let r = 1 + (seed as usize % (n - 1));
            let l = randn_rank_deficient(n + 1, n, r, 7 * seed + 3);
            (a, l, b, CaseTag::General)
        }
    }
}

/// Blocks of the governing matrix in the right singular basis of A.
pub struct SchurBlocks {
    pub u1: DenseMatrix,
    pub u2: DenseMatrix,
    pub v1: DenseMatrix,
    pub v2: DenseMatrix,
    pub sigma1: DVector<f64>,
    pub sigma2: DVector<f64>,
    pub f: DenseMatrix,
    pub b: DenseMatrix,
    pub d: DenseMatrix,
    pub s: DenseMatrix,
}

pub fn schur_blocks(a: &DenseMatrix, l: &DenseMatrix, r: usize, mu: f64) -> SchurBlocks {
    let n = a.ncols();
    let (u, sig, v) = jacobi_svd(a);
    let u1 = u.columns(0, r).into_owned();
    let u2 = u.columns(r, n - r).into_owned();
    let v1 = v.columns(0, r).into_owned();
    let v2 = v.columns(r, n - r).into_owned();
    let sigma1 = DVector::from_iterator(r, sig[..r].iter().cloned());
    let sigma2 = DVector::from_iterator(n - r, sig[r..n].iter().cloned());
    let lv1 = l * &v1;
    let lv2 = l * &v2;
    let f = DMatrix::from_diagonal(&sigma1.map(|s| s * s)) + lv1.transpose() * &lv1 * (mu * mu);
    let b = lv1.transpose() * &lv2 * (mu * mu);
    let d = DMatrix::from_diagonal(&sigma2.map(|s| s * s)) + lv2.transpose() * &lv2 * (mu * mu);
    let finv_b = f.clone().lu().solve(&b).unwrap();
    let s = &d - b.transpose() * &finv_b;
    SchurBlocks {
        u1,
        u2,
        v1,
        v2,
        sigma1,
        sigma2,
        f,
        b,
        d,
        s,
    }
}

/// Three-term block expansion of (A^T A + mu^2 L^T L)^{-1} A^T b through
/// the Schur complement of the split governing matrix.
pub fn schur_solution(blk: &SchurBlocks, b: &DVector<f64>) -> DVector<f64> {
    let flu = blk.f.clone().lu();
    let slu = blk.s.clone().lu();
    let t1 = DMatrix::from_diagonal(&blk.sigma1) * (blk.u1.transpose() * b);
    let f_t1 = flu.solve(&t1).unwrap();
    let bt_f_t1 = blk.b.transpose() * &f_t1;
    let s_bt = slu.solve(&bt_f_t1).unwrap();
    let t2 = DMatrix::from_diagonal(&blk.sigma2) * (blk.u2.transpose() * b);
    let s_t2 = slu.solve(&t2).unwrap();
    let finv_b = flu.solve(&blk.b).unwrap();
    &blk.v1 * (&f_t1 + flu.solve(&(&blk.b * &s_bt)).unwrap()) - &blk.v2 * &s_bt
        + (&blk.v2 - &blk.v1 * &finv_b) * &s_t2
}
