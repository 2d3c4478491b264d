//! Benchmark pipelines: generate a test problem, factor it with the chosen
//! method, pick the regularization parameter, solve, and record accuracy
//! and per-phase wall-clock times.

use nalgebra::DVector;
use regusolve_core::gsvdreg::{cgsvd_tikhonov, rgsvd, rgsvd_tikhonov};
use regusolve_core::matcore::{gsvd, svd};
use regusolve_core::paramsel::{
    discrepancy_select, gcv_select, lcurve_select, FilterSpectrum,
};
use regusolve_core::problems::{
    add_noise, derivative_operator, generate, NoiseSpec, OperatorKind,
};
use regusolve_core::rsvd::{rsvd, tikhonov_filtered, SketchConfig};
use regusolve_core::transform::{back_map, to_standard_form};
use regusolve_core::{Error, Result};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// SVD of A with identity regularizer.
    Csvd,
    /// Classical GSVD of the pair (A, L).
    Cgsvd,
    /// Randomized GSVD on a sketched right subspace.
    Rgsvd,
    /// Standard-form transformation followed by randomized SVD.
    RsvdStd,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Csvd => "csvd",
            Method::Cgsvd => "cgsvd",
            Method::Rgsvd => "rgsvd",
            Method::RsvdStd => "rsvd_std",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Rule {
    Gcv,
    Lcurve,
    Discrepancy,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub problem: String,
    pub n: usize,
    pub example: usize,
    pub method: Method,
    pub operator: OperatorKind,
    pub delta: f64,
    pub sample_size: usize,
    pub seed_noise: u64,
    pub seed_sketch: u64,
    pub rule: Rule,
    /// Append the projected all-ones direction to the sketch basis.
    pub augment_constant: bool,
}

impl BenchConfig {
    fn check(&self) -> Result<()> {
        if self.method == Method::Csvd && self.operator != OperatorKind::Identity {
            return Err(Error::InvalidParameter(
                "csvd works in standard form; use --operator identity".into(),
            ));
        }
        Ok(())
    }

    fn operator_name(&self) -> &'static str {
        match self.operator {
            OperatorKind::Identity => "identity",
            OperatorKind::D1 => "d1",
            OperatorKind::D2 => "d2",
        }
    }
}

/// One finished case: the configuration echo plus the measured outcome.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub problem: String,
    pub n: usize,
    pub method: &'static str,
    pub operator: &'static str,
    pub l: usize,
    pub seed_noise: u64,
    pub seed_sketch: u64,
    pub mu: f64,
    pub rel_err: f64,
    pub t_factor: f64,
    pub t_select: f64,
    pub t_solve: f64,
}

impl BenchRecord {
    pub fn t_total(&self) -> f64 {
        self.t_factor + self.t_select + self.t_solve
    }
}

fn select(spec: &FilterSpectrum, rule: Rule, noise_norm: f64) -> Result<f64> {
    match rule {
        Rule::Gcv => gcv_select(spec),
        Rule::Lcurve => lcurve_select(spec),
        Rule::Discrepancy => discrepancy_select(spec, noise_norm, 1.0),
    }
}

pub fn run_case(cfg: &BenchConfig) -> Result<BenchRecord> {
    cfg.check()?;
    let prob = generate(&cfg.problem, cfg.n, cfg.example)?;
    let l_op = derivative_operator(cfg.operator, cfg.n)?;
    let b = add_noise(
        &prob.b_exact,
        &NoiseSpec {
            delta: cfg.delta,
            seed: cfg.seed_noise,
        },
    )?;
    let noise_norm = cfg.delta * prob.b_exact.norm();
    let sketch = SketchConfig::new(cfg.sample_size, cfg.seed_sketch);
    let augment: Vec<DVector<f64>> = if cfg.augment_constant {
        vec![DVector::from_element(cfg.n, 1.0)]
    } else {
        vec![]
    };

    // noiseless data admits the exact solution; no regularization wanted
    let forced_mu = if cfg.delta == 0.0 { Some(0.0) } else { None };

    let t0 = Instant::now();
    let (mu, rel_err, t_factor, t_select) = match cfg.method {
        Method::Csvd => {
            let f = svd(&prob.a)?;
            let t_factor = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let spec = FilterSpectrum::from_svd(&f, &b)?;
            let mu = match forced_mu {
                Some(mu) => mu,
                None => select(&spec, cfg.rule, noise_norm)?,
            };
            let t_select = t1.elapsed().as_secs_f64();
            let x = tikhonov_filtered(&f, &b, mu)?;
            (mu, rel_err_of(&x, &prob.x_exact), t_factor, t_select)
        }
        Method::Cgsvd => {
            let f = gsvd(&prob.a, &l_op)?;
            let t_factor = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let spec = FilterSpectrum::from_gsvd(&f, &b)?;
            let mu = match forced_mu {
                Some(mu) => mu,
                None => select(&spec, cfg.rule, noise_norm)?,
            };
            let t_select = t1.elapsed().as_secs_f64();
            let x = cgsvd_tikhonov(&f, &b, mu)?;
            (mu, rel_err_of(&x, &prob.x_exact), t_factor, t_select)
        }
        Method::Rgsvd => {
            let f = rgsvd(&prob.a, &l_op, &sketch, &augment)?;
            let t_factor = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let spec = FilterSpectrum::from_gsvd(&f.inner, &b)?;
            let mu = match forced_mu {
                Some(mu) => mu,
                None => select(&spec, cfg.rule, noise_norm)?,
            };
            let t_select = t1.elapsed().as_secs_f64();
            let x = rgsvd_tikhonov(&f, &b, mu)?;
            (mu, rel_err_of(&x, &prob.x_exact), t_factor, t_select)
        }
        Method::RsvdStd => {
            let sys = to_standard_form(&prob.a, &l_op, &b)?;
            let f = rsvd(&sys.k, &sketch)?;
            let t_factor = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            // parameter rules must only see the data the filter can reach
            let b_red = &b - &prob.a * &sys.back_offset;
            let spec = FilterSpectrum::from_svd(&f, &b_red)?;
            let mu = match forced_mu {
                Some(mu) => mu,
                None => select(&spec, cfg.rule, noise_norm)?,
            };
            let t_select = t1.elapsed().as_secs_f64();
            let y = tikhonov_filtered(&f, &b_red, mu)?;
            let x = back_map(&sys, &y)?;
            (mu, rel_err_of(&x, &prob.x_exact), t_factor, t_select)
        }
    };
    let t_solve = t0.elapsed().as_secs_f64() - t_factor - t_select;

    Ok(BenchRecord {
        problem: cfg.problem.clone(),
        n: cfg.n,
        method: cfg.method.name(),
        operator: cfg.operator_name(),
        l: cfg.sample_size,
        seed_noise: cfg.seed_noise,
        seed_sketch: cfg.seed_sketch,
        mu,
        rel_err,
        t_factor,
        t_select,
        t_solve,
    })
}

fn rel_err_of(x: &DVector<f64>, want: &DVector<f64>) -> f64 {
    (x - want).norm() / want.norm()
}

pub const CSV_HEADER: &str = "problem,n,method,operator,l,seed_noise,seed_sketch,\
mu,rel_err,t_factor,t_select,t_solve,t_total";

pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6e},{:.6e},{:.4},{:.4},{:.4},{:.4}\n",
            r.problem,
            r.n,
            r.method,
            r.operator,
            r.l,
            r.seed_noise,
            r.seed_sketch,
            r.mu,
            r.rel_err,
            r.t_factor,
            r.t_select,
            r.t_solve,
            r.t_total()
        ));
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Markdown table of per-method medians, one row per (problem, n, method),
/// mirroring the comparison tables the records came from.
pub fn emit_md(records: &[BenchRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to tabulate".into()));
    }
    let mut groups: Vec<(String, Vec<&BenchRecord>)> = Vec::new();
    for r in records {
        let key = format!("{}|{}|{}|{}|{}", r.problem, r.n, r.method, r.operator, r.l);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    let mut out = String::new();
    out.push_str("| problem | n | method | operator | l | reps | T(s) | mu | err |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for (_, rs) in &groups {
        let first = rs[0];
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {:.3} | {:.3e} | {:.3e} |\n",
            first.problem,
            first.n,
            first.method,
            first.operator,
            first.l,
            rs.len(),
            median(rs.iter().map(|r| r.t_total()).collect()),
            median(rs.iter().map(|r| r.mu).collect()),
            median(rs.iter().map(|r| r.rel_err).collect()),
        ));
    }
    Ok(out)
}
