//! Empirical convergence-rate experiments.
//!
//! For every sample size `n` and seed, a fresh cloud is drawn from the
//! σ-tube of a synthetic manifold, a batch of fresh queries from the same
//! tube is projected, and the medians of `dist(p̂, M)` and of the largest
//! principal angle to the true tangent are recorded. Slopes are fitted by
//! ordinary least squares on `(ln n, ln median)` over all cells.

use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::angle_max;
use crate::refine::{project, EstimatorConfig};
use crate::synth::ManifoldSpec;

/// Stream offset separating query draws from cloud draws.
const QUERY_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq)]
pub struct RatesPlan {
    pub spec: ManifoldSpec,
    /// Strictly increasing sample sizes, at least four.
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    pub sigma: f64,
    pub queries: usize,
    /// Estimator settings; its `seed` is overridden per cell.
    pub cfg: EstimatorConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesRow {
    pub n: usize,
    pub seed: u64,
    pub median_dist: f64,
    pub median_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatesReport {
    pub rows: Vec<RatesRow>,
    pub slope_dist: SlopeFit,
    pub slope_angle: SlopeFit,
}

/// Ordinary least squares of `ln y` on `ln x`, with the slope's standard error.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> SlopeFit {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if lx.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    SlopeFit {
        slope,
        intercept,
        stderr,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Medians for one `(n, seed)` cell. Queries that fail to project count as
/// infinitely far and at a right angle.
pub fn run_cell(plan: &RatesPlan, n: usize, seed: u64) -> Result<RatesRow> {
    let cloud = plan.spec.sample_tubular_stream(n, plan.sigma, seed, n as u64)?;
    let queries =
        plan.spec
            .sample_tubular_stream(plan.queries, plan.sigma, seed, QUERY_STREAM + n as u64)?;
    let mut cfg = plan.cfg.clone();
    cfg.seed = seed;
    let mut dists = Vec::with_capacity(plan.queries);
    let mut angles = Vec::with_capacity(plan.queries);
    for i in 0..queries.len() {
        let r: DVector<f64> = queries.point(i);
        match project(&cloud, &r, &cfg) {
            Ok(res) => {
                dists.push(plan.spec.distance(&res.p_hat)?);
                let truth = plan.spec.oracle_tangent(&r)?;
                angles.push(angle_max(&res.tangent, &truth)?);
            }
            Err(_) => {
                dists.push(f64::INFINITY);
                angles.push(std::f64::consts::FRAC_PI_2);
            }
        }
    }
    Ok(RatesRow {
        n,
        seed,
        median_dist: median(dists),
        median_angle: median(angles),
    })
}

pub fn run_rates(plan: &RatesPlan) -> Result<RatesReport> {
    if plan.ns.len() < 4 {
        return Err(Error::InvalidConfig(
            "need at least four sample sizes for a slope fit".into(),
        ));
    }
    if plan.ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("sample sizes must be strictly increasing".into()));
    }
    if plan.seeds.is_empty() || plan.queries == 0 {
        return Err(Error::InvalidConfig("need at least one seed and one query".into()));
    }
    plan.cfg.validate(plan.spec.ambient_dim())?;

    let cells: Vec<(usize, u64)> = plan
        .ns
        .iter()
        .flat_map(|&n| plan.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut rows: Vec<RatesRow> = cells
        .par_iter()
        .map(|&(n, s)| run_cell(plan, n, s))
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.seed.cmp(&b.seed)));

    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let dist: Vec<f64> = rows.iter().map(|r| r.median_dist).collect();
    let angle: Vec<f64> = rows.iter().map(|r| r.median_angle).collect();
    Ok(RatesReport {
        slope_dist: fit_loglog(&xs, &dist),
        slope_angle: fit_loglog(&xs, &angle),
        rows,
    })
}

impl RatesReport {
    pub fn summary_lines(&self) -> Vec<String> {
        vec![
            format!("slope_dist={}", self.slope_dist.slope),
            format!("slope_dist_se={}", self.slope_dist.stderr),
            format!("slope_angle={}", self.slope_angle.slope),
            format!("slope_angle_se={}", self.slope_angle.stderr),
        ]
    }

    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments.iter().chain(self.summary_lines().iter()) {
            writeln!(w, "# {c}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "seed", "median_dist", "median_angle"])?;
        for r in &self.rows {
            out.write_record([
                r.n.to_string(),
                r.seed.to_string(),
                r.median_dist.to_string(),
                r.median_angle.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
