//! Regularization-parameter choice rules (GCV, discrepancy principle,
//! L-curve) evaluated in spectral form, so one implementation serves both
//! the SVD and GSVD filter families.

use crate::error::{Error, Result};
use crate::matcore::{GsvdFactorization, SvdFactorization};
use nalgebra::DVector;

const GRID_POINTS: usize = 300;

/// Everything the choice rules need about a filtered factorization:
/// generalized values, projected data, and the part of the data outside
/// the factorization's range.
#[derive(Debug, Clone)]
pub struct FilterSpectrum {
    /// Generalized values gamma_i > 0 (sigma_i for the SVD form, c_i/s_i
    /// for the GSVD form), any order.
    pub gamma: Vec<f64>,
    /// Projected data beta_i = u_i^T b for the same indices.
    pub beta: Vec<f64>,
    /// Per-index scale of the solution coefficient in the (semi)norm;
    /// 1.0 unless a weighted seminorm is wanted.
    pub scale: Vec<f64>,
    /// Norm of the data component no filter can reach.
    pub residual_floor: f64,
    /// Data dimension (rows of the operator), for the GCV denominator.
    pub m: usize,
    /// Count of unregularized directions (filter pinned at 1).
    pub unregularized: usize,
}

impl FilterSpectrum {
    /// Spectrum of a standard-form factorization.
    pub fn from_svd(f: &SvdFactorization, b: &DVector<f64>) -> Result<Self> {
        if b.len() != f.u.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "spectrum: b has length {}, U has {} rows",
                b.len(),
                f.u.nrows()
            )));
        }
        let proj = f.u.transpose() * b;
        let floor_vec = b - &f.u * &proj;
        let mut gamma = Vec::new();
        let mut beta = Vec::new();
        let mut extra = 0.0f64;
        for i in 0..f.truncation_rank {
            let s = f.singular_values[i];
            if s > 0.0 {
                gamma.push(s);
                beta.push(proj[i]);
            } else {
                extra += proj[i] * proj[i];
            }
        }
        let scale = vec![1.0; gamma.len()];
        Ok(Self {
            gamma,
            beta,
            scale,
            residual_floor: (floor_vec.norm_squared() + extra).sqrt(),
            m: b.len(),
            unregularized: 0,
        })
    }

    /// Spectrum of a general-form factorization: gamma_i = c_i/s_i over the
    /// regularized pairs; indices with s_i = 0 are unregularized
    /// pass-through directions.
    pub fn from_gsvd(f: &GsvdFactorization, b: &DVector<f64>) -> Result<Self> {
        if b.len() != f.u.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "spectrum: b has length {}, U has {} rows",
                b.len(),
                f.u.nrows()
            )));
        }
        let proj = f.u.transpose() * b;
        let floor_vec = b - &f.u * &proj;
        let n = f.g.ncols();
        let mut gamma = Vec::new();
        let mut beta = Vec::new();
        let mut unregularized = 0;
        let mut extra = 0.0f64;
        for i in 0..n {
            let (c, s) = (f.c[i], f.s[i]);
            if s == 0.0 {
                unregularized += 1;
            } else if c > 0.0 {
                gamma.push(c / s);
                beta.push(proj[i]);
            } else {
                // c = 0: the filter never passes this direction
                extra += proj[i] * proj[i];
            }
        }
        let scale = vec![1.0; gamma.len()];
        Ok(Self {
            gamma,
            beta,
            scale,
            residual_floor: (floor_vec.norm_squared() + extra).sqrt(),
            m: b.len(),
            unregularized,
        })
    }

    fn gamma_max(&self) -> f64 {
        self.gamma.iter().cloned().fold(0.0, f64::max)
    }

    /// ||K y_mu - b|| in spectral form.
    pub fn residual_norm(&self, mu: f64) -> f64 {
        let mut sq = self.residual_floor * self.residual_floor;
        for (g, b) in self.gamma.iter().zip(&self.beta) {
            let f = g * g / (g * g + mu * mu);
            let r = (1.0 - f) * b;
            sq += r * r;
        }
        sq.sqrt()
    }

    /// Solution (semi)norm ||y_mu|| in spectral form.
    pub fn solution_norm(&self, mu: f64) -> f64 {
        let mut sq = 0.0;
        for ((g, b), sc) in self.gamma.iter().zip(&self.beta).zip(&self.scale) {
            let f = g * g / (g * g + mu * mu);
            let t = f * b / g * sc;
            sq += t * t;
        }
        sq.sqrt()
    }

    /// Effective degrees of freedom: sum of filter factors, with the
    /// unregularized directions counting as 1 each.
    fn filter_sum(&self, mu: f64) -> f64 {
        let mut sum = self.unregularized as f64;
        for g in &self.gamma {
            sum += g * g / (g * g + mu * mu);
        }
        sum
    }

    /// GCV objective G(mu) = ||residual||^2 / (m - sum f_i)^2.
    pub fn gcv(&self, mu: f64) -> f64 {
        let r = self.residual_norm(mu);
        let denom = self.m as f64 - self.filter_sum(mu);
        let g = r * r / (denom * denom);
        // 0/0 can occur on exactly consistent data with a saturated filter
        if g.is_finite() {
            g
        } else {
            f64::INFINITY
        }
    }

    fn log_grid(&self) -> Vec<f64> {
        let gmax = self.gamma_max();
        let lo = (1e-10 * gmax).ln();
        let hi = (10.0 * gmax).ln();
        (0..GRID_POINTS)
            .map(|i| (lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64).exp())
            .collect()
    }

    fn check_nonempty(&self) -> Result<()> {
        if self.gamma.is_empty() || self.gamma_max() <= 0.0 {
            return Err(Error::SelectionFailed(
                "spectrum has no positive generalized values".into(),
            ));
        }
        Ok(())
    }
}

/// Minimize the GCV function over a logarithmic grid, then refine the best
/// bracket by golden-section search.
pub fn gcv_select(spec: &FilterSpectrum) -> Result<f64> {
    spec.check_nonempty()?;
    let grid = spec.log_grid();
    let values: Vec<f64> = grid.iter().map(|&mu| spec.gcv(mu)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::SelectionFailed("empty grid".into()))?;

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    Ok(golden_section(lo, hi, |mu| spec.gcv(mu)))
}

fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    // work in log space; the grid is logarithmic
    let (mut la, mut lb) = (a.ln(), b.ln());
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = lb - phi * (lb - la);
    let mut x2 = la + phi * (lb - la);
    let (mut f1, mut f2) = (f(x1.exp()), f(x2.exp()));
    for _ in 0..80 {
        if f1 <= f2 {
            lb = x2;
            x2 = x1;
            f2 = f1;
            x1 = lb - phi * (lb - la);
            f1 = f(x1.exp());
        } else {
            la = x1;
            x1 = x2;
            f1 = f2;
            x2 = la + phi * (lb - la);
            f2 = f(x2.exp());
        }
        if lb - la < 1e-12 {
            break;
        }
    }
    a = la.exp();
    b = lb.exp();
    (a * b).sqrt()
}

/// Discrepancy principle: find mu with ||residual(mu)|| = tau * eps by
/// bisection on the monotone residual function. tau defaults to 1.
pub fn discrepancy_select(spec: &FilterSpectrum, eps: f64, tau: f64) -> Result<f64> {
    spec.check_nonempty()?;
    let target = tau * eps;
    let gmax = spec.gamma_max();
    let (mut lo, mut hi) = (1e-14 * gmax, 1e6 * gmax);
    let r_lo = spec.residual_norm(lo);
    let r_hi = spec.residual_norm(hi);
    if target <= r_lo || target >= r_hi {
        return Err(Error::SelectionFailed(format!(
            "discrepancy target {target:.3e} outside attainable range \
             [{r_lo:.3e}, {r_hi:.3e}]"
        )));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if spec.residual_norm(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    let mu = (lo * hi).sqrt();
    let achieved = spec.residual_norm(mu);
    if (achieved - target).abs() > 0.01 * target {
        return Err(Error::SelectionFailed(format!(
            "bisection stalled: residual {achieved:.6e} vs target {target:.6e}"
        )));
    }
    Ok(mu)
}

/// L-curve corner: mu maximizing the curvature of
/// (log residual, log solution norm) over the logarithmic grid, with
/// curvature from centered finite differences.
pub fn lcurve_select(spec: &FilterSpectrum) -> Result<f64> {
    spec.check_nonempty()?;
    let grid = spec.log_grid();
    let pts: Vec<(f64, f64, f64)> = grid
        .iter()
        .filter_map(|&mu| {
            let rho = spec.residual_norm(mu);
            let eta = spec.solution_norm(mu);
            if rho > 0.0 && eta > 0.0 {
                Some((mu, rho.ln(), eta.ln()))
            } else {
                None
            }
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::SelectionFailed(
            "L-curve degenerate: fewer than 3 usable grid points".into(),
        ));
    }
    let mut best: Option<(f64, f64)> = None;
    for win in pts.windows(3) {
        let [(_, r0, e0), (mu, r1, e1), (_, r2, e2)] = [win[0], win[1], win[2]];
        // centered differences in the (uniform) log-mu grid parameter
        let dr = (r2 - r0) / 2.0;
        let de = (e2 - e0) / 2.0;
        let ddr = r2 - 2.0 * r1 + r0;
        let dde = e2 - 2.0 * e1 + e0;
        let denom = (dr * dr + de * de).powf(1.5);
        if denom == 0.0 {
            continue;
        }
        let kappa = (dr * dde - de * ddr) / denom;
        if best.map_or(true, |(k, _)| kappa > k) {
            best = Some((kappa, mu));
        }
    }
    match best {
        Some((kappa, mu)) if kappa > 0.0 => Ok(mu),
        _ => Err(Error::SelectionFailed(
            "L-curve has no corner (flat curvature)".into(),
        )),
    }
}
