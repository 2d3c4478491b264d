//! Standard-form transformation: reduce min ||Ax-b||^2 + mu^2 ||Lx||^2 to
//! min ||Ky-b||^2 + mu^2 ||y||^2 plus an affine back-map
//! x = back_basis * y + back_offset.
//!
//! The general path builds L's pseudoinverse and null-space basis from a
//! complete orthogonal decomposition; structured operators take cheaper
//! routes (L square, full column rank, full row rank, or with its null
//! space contained in A's).

use crate::error::{Error, Result};
use crate::matcore::{complete_orthogonal, pinv_matrix, qr_pivoted, DenseMatrix};
use nalgebra::{DMatrix, DVector};

/// Which reduction path was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// No structure exploited.
    General,
    /// N(L) contained in N(A): all A W terms vanish.
    NullInNull,
    /// L has full row rank (p < n) with trivial joint null space.
    FullRowRank,
    /// L has full column rank (p > n): a skinny QR suffices.
    FullColRank,
    /// L square nonsingular: plain inversion.
    SquareNonsingular,
}

/// The transformed standard-form problem together with the affine map
/// back to the original variables.
#[derive(Debug, Clone)]
pub struct StandardFormSystem {
    /// Standard-form operator K = A * back_basis (m x r).
    pub k: DenseMatrix,
    /// Right-hand side, unchanged by the transformation.
    pub rhs: DVector<f64>,
    /// n x r map from standard-form coordinates back to x.
    pub back_basis: DenseMatrix,
    /// Affine part of the back-map (zero unless the A W terms are live).
    pub back_offset: DVector<f64>,
    pub case_tag: CaseTag,
}

/// x = back_basis * y + back_offset.
pub fn back_map(sys: &StandardFormSystem, y: &DVector<f64>) -> Result<DVector<f64>> {
    if y.len() != sys.back_basis.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "back_map: y has length {}, expected {}",
            y.len(),
            sys.back_basis.ncols()
        )));
    }
    Ok(&sys.back_basis * y + &sys.back_offset)
}

/// Orthonormal bases W of N(L) and Z of R(L). Either may have zero columns.
pub fn null_range_bases(l: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let cod = complete_orthogonal(l)?;
    Ok((cod.null_basis(), cod.range_basis()))
}

fn solve_upper(r: &DenseMatrix, rhs: DenseMatrix) -> Result<DenseMatrix> {
    r.solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::InvalidParameter("singular triangular factor".into()))
}

/// Reduce (A, L, b) to standard form, picking the cheapest applicable path.
pub fn to_standard_form(
    a: &DenseMatrix,
    l: &DenseMatrix,
    b: &DVector<f64>,
) -> Result<StandardFormSystem> {
    let (m, n) = a.shape();
    let p = l.nrows();
    if l.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "to_standard_form: A has {n} columns, L has {}",
            l.ncols()
        )));
    }
    if b.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "to_standard_form: b has length {}, A has {m} rows",
            b.len()
        )));
    }

    let lqr = qr_pivoted(l)?;
    let rank = lqr.numerical_rank;

    if rank == n {
        // no null space: the offset vanishes and Z drops out
        let (back_basis, tag) = if p == n {
            let lu = l.clone().lu();
            let inv = lu
                .try_inverse()
                .ok_or(Error::InvalidParameter("L numerically singular".into()))?;
            (inv, CaseTag::SquareNonsingular)
        } else {
            // skinny QR: L = Q R, so L^+ Z = R^{-1}
            let r = l.clone().qr().unpack_r();
            (solve_upper(&r, DMatrix::identity(n, n))?, CaseTag::FullColRank)
        };
        let k = a * &back_basis;
        return Ok(StandardFormSystem {
            k,
            rhs: b.clone(),
            back_basis,
            back_offset: DVector::zeros(n),
            case_tag: tag,
        });
    }

    if rank == p && p < n {
        // full row rank: QR of L^T yields both L^+ and the null basis, and
        // R(L) is all of R^p so Z = I
        let qr = l.transpose().qr();
        let k1 = qr.q(); // n x p
        let r = qr.unpack_r(); // p x p
        let w = crate::matcore::orthonormal_completion(&k1, n - p);
        let l_pinv = solve_upper(&r, k1.transpose())?.transpose(); // K1 R^{-T}

        let aw = a * &w;
        if aw.norm() <= 1e-12 * a.norm() * (w.ncols() as f64).sqrt().max(1.0) {
            let back_basis = l_pinv;
            let k = a * &back_basis;
            return Ok(StandardFormSystem {
                k,
                rhs: b.clone(),
                back_basis,
                back_offset: DVector::zeros(n),
                case_tag: CaseTag::NullInNull,
            });
        }
        let awqr = qr_pivoted(&aw)?;
        let aw_pinv = pinv_matrix(&awqr);
        let back_basis = &l_pinv - &w * (&aw_pinv * (a * &l_pinv));
        let back_offset = &w * (&aw_pinv * b);
        let k = a * &back_basis;
        return Ok(StandardFormSystem {
            k,
            rhs: b.clone(),
            back_basis,
            back_offset,
            case_tag: CaseTag::FullRowRank,
        });
    }

    // general rank-deficient L
    let cod = complete_orthogonal(l)?;
    let w = cod.null_basis();
    let z = cod.range_basis();
    let lpz = cod.pinv_matrix() * &z; // n x rank

    let aw = a * &w;
    if aw.norm() <= 1e-12 * a.norm() * (w.ncols() as f64).sqrt().max(1.0) {
        let k = a * &lpz;
        return Ok(StandardFormSystem {
            k,
            rhs: b.clone(),
            back_basis: lpz,
            back_offset: DVector::zeros(n),
            case_tag: CaseTag::NullInNull,
        });
    }
    let awqr = qr_pivoted(&aw)?;
    let aw_pinv = pinv_matrix(&awqr);
    let back_basis = &lpz - &w * (&aw_pinv * (a * &lpz));
    let back_offset = &w * (&aw_pinv * b);
    let k = a * &back_basis;
    Ok(StandardFormSystem {
        k,
        rhs: b.clone(),
        back_basis,
        back_offset,
        case_tag: CaseTag::General,
    })
}
