//! Iterated local polynomial regression: the projection estimator.
//!
//! Starting from the frame produced by [`fit_initial_frame`], each step
//! regresses the normal coordinates of the nearby samples on their tangent
//! coordinates and replaces the frame's tangent space by the tangent of the
//! fitted graph at zero. Two loop variants are offered:
//!
//! * [`Mode::Recenter`] (default): the origin is moved onto the fitted graph
//!   after every step, and the loop stops once the origin moves less than
//!   `stop_tol` (or after `max_iter_cap` steps).
//! * [`Mode::FixedOrigin`]: the origin stays at the query point and exactly
//!   `κ` tangent updates are made, `κ` given by [`kappa`]. This is the
//!   variant with known convergence rates.

use std::io::Write;

use bitflags::bitflags;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Frame;
use crate::initcs::{fit_initial_frame, InitConfig, InitDiagnostics, WeightScheme};
use crate::pointset::{bandwidth_filter, local_coords, PointCloud};
use crate::polyfit::{fit_mom, graph_tangent, monomial_count, FitDiagnostics};

/// How many times the bandwidth may be widened by [`EXPANSION_FACTOR`].
pub const MAX_EXPANSIONS: u32 = 8;
pub const EXPANSION_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    FixedOrigin,
    Recenter,
}

bitflags! {
    /// Non-fatal conditions met while projecting a point.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
    pub struct Warnings: u32 {
        /// The refinement loop hit its iteration cap before the step norm
        /// dropped below `stop_tol`.
        const NO_CONVERGENCE = 1;
        /// The initial origin ended up `2σ` or further from the query.
        const SEARCH_REGION_VIOLATED = 1 << 1;
        /// A regression had condition number above `1e12`.
        const ILL_CONDITIONED = 1 << 2;
        /// The bandwidth had to be widened to collect enough samples.
        const BANDWIDTH_EXPANDED = 1 << 3;
        /// The PCA seeding the initial frame had a zero eigengap.
        const DEGENERATE_SPECTRUM = 1 << 4;
        /// The initial-frame iteration hit its cap.
        const INIT_NO_CONVERGENCE = 1 << 5;
        /// The query could not be projected at all (batch output only).
        const FAILED = 1 << 7;
    }
}

/// Constants of the iteration-count formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaConsts {
    pub c0: f64,
    /// `None` means `1/√D`, resolved when the ambient dimension is known.
    pub alpha1: Option<f64>,
    pub delta: f64,
}

impl Default for KappaConsts {
    fn default() -> Self {
        Self {
            c0: 1.0,
            alpha1: None,
            delta: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub d: usize,
    /// Smoothness order; regressions use total degree `k − 1`.
    pub k: usize,
    pub sigma: f64,
    pub tau: f64,
    /// Dimensionless; the bandwidth is `c · n^(−1/(2k+d)) · √(στ)`.
    pub bandwidth_const: f64,
    /// Median-of-means block count (1 = plain least squares).
    pub blocks: usize,
    pub mode: Mode,
    pub stop_tol: f64,
    pub max_iter_cap: usize,
    pub kappa: KappaConsts,
    /// Seeds the block shuffles of the median-of-means fits.
    pub seed: u64,
    pub init_weights: WeightScheme,
    pub init_max_iter: usize,
}

impl EstimatorConfig {
    pub fn new(d: usize, k: usize, sigma: f64, tau: f64) -> Self {
        Self {
            d,
            k,
            sigma,
            tau,
            bandwidth_const: 1.0,
            blocks: 1,
            mode: Mode::Recenter,
            stop_tol: 1e-3 * sigma,
            max_iter_cap: 64,
            kappa: KappaConsts::default(),
            seed: 0,
            init_weights: WeightScheme::Gaussian { scale: None },
            init_max_iter: 100,
        }
    }

    /// `⌈8 ln(1/δ)⌉` blocks, for a failure probability `δ`.
    pub fn blocks_for_confidence(delta: f64) -> usize {
        (8.0 * (1.0 / delta).ln()).ceil().max(1.0) as usize
    }

    pub fn validate(&self, ambient: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.d == 0 || self.d >= ambient {
            return bad(format!("need 1 <= d < D, got d={}, D={ambient}", self.d));
        }
        if !(self.sigma > 0.0 && self.sigma < self.tau) {
            return bad(format!(
                "need 0 < sigma < tau, got sigma={}, tau={}",
                self.sigma, self.tau
            ));
        }
        if !(self.stop_tol > 0.0) || !(self.bandwidth_const > 0.0) {
            return bad("stop_tol and bandwidth_const must be positive".into());
        }
        if self.blocks == 0 || self.max_iter_cap == 0 {
            return bad("blocks and max_iter_cap must be at least 1".into());
        }
        Ok(())
    }

    pub fn init_config(&self) -> InitConfig {
        let mut init = InitConfig::new(self.sigma, self.tau);
        init.weights = self.init_weights;
        init.max_iter = self.init_max_iter;
        init
    }

    /// Bandwidth in ambient length units for a cloud of `n` points.
    pub fn scaled_bandwidth(&self, n: usize) -> f64 {
        bandwidth(n, self.k, self.d, self.bandwidth_const) * (self.sigma * self.tau).sqrt()
    }

    /// Iteration count of the fixed-origin variant, before the cap.
    pub fn kappa_for(&self, n: usize, ambient: usize) -> usize {
        let alpha1 = self.kappa.alpha1.unwrap_or(1.0 / (ambient as f64).sqrt());
        kappa(n, self.d, self.k, self.kappa.delta, alpha1, self.kappa.c0)
    }
}

/// `c · n^(−1/(2k+d))`.
pub fn bandwidth(n: usize, k: usize, d: usize, c: f64) -> f64 {
    c * (n as f64).powf(-1.0 / (2 * k + d) as f64)
}

/// Unclamped iteration-count formula
/// `r₁ log₂ n + C̄ − log₂ ln((2 r₁ log₂ n + 2 C̄)/δ)` with
/// `C̄ = 1 + log₂(α₁ / (12√d)) − log₂ C₀` and `r₁ = (k−1)/(2k+d)`.
///
/// NaN when the argument of the logarithm is not positive.
pub fn kappa_formula(n: usize, d: usize, k: usize, delta: f64, alpha1: f64, c0: f64) -> f64 {
    let r1 = (k as f64 - 1.0) / (2 * k + d) as f64;
    let c_bar = 1.0 + (alpha1 / (12.0 * (d as f64).sqrt())).log2() - c0.log2();
    let x = r1 * (n as f64).log2() + c_bar;
    x - ((2.0 * x) / delta).ln().log2()
}

/// Number of refinement iterations, `⌈max(1, formula)⌉`.
pub fn kappa(n: usize, d: usize, k: usize, delta: f64, alpha1: f64, c0: f64) -> usize {
    let v = kappa_formula(n, d, k, delta, alpha1, c0);
    if v.is_finite() && v > 1.0 {
        v.ceil() as usize
    } else {
        1
    }
}

/// Outcome of one regression over a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineStep {
    /// Frame with the updated tangent; origin moved onto the graph in
    /// recenter mode, unchanged otherwise.
    pub frame: Frame,
    /// `origin + V π(0)`: the current frame's origin lifted onto the fit.
    pub lifted: DVector<f64>,
    pub fit: FitDiagnostics,
    /// Bandwidth actually used (after any widening).
    pub bandwidth: f64,
    pub expansions: u32,
}

/// One regression step over `frame`, using the samples of `roi`.
///
/// `n` is the total sample count that sets the bandwidth; `step` only
/// perturbs the median-of-means shuffle seed.
pub fn refine_step(
    cloud: &PointCloud,
    roi: &[usize],
    frame: &Frame,
    cfg: &EstimatorConfig,
    step: u64,
) -> Result<RefineStep> {
    let degree = cfg.k - 1;
    let m = monomial_count(cfg.d, degree);
    let wanted = 3 * m * cfg.blocks;
    let needed = m * cfg.blocks;

    let pairs = local_coords(cloud, roi, frame);
    let mut eps = cfg.scaled_bandwidth(cloud.len());
    let mut selected = bandwidth_filter(&pairs, eps);
    let mut expansions = 0;
    while selected.len() < wanted && expansions < MAX_EXPANSIONS {
        eps *= EXPANSION_FACTOR;
        expansions += 1;
        selected = bandwidth_filter(&pairs, eps);
    }
    if selected.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            found: selected.len(),
        });
    }

    let fit = fit_mom(&selected, degree, cfg.blocks, cfg.seed.wrapping_add(step))?;
    let value = fit.model.value_at_zero();
    let dpi = fit.model.differential_at_zero();
    let tangent = graph_tangent(frame, &dpi)?;
    let lifted = frame.origin() + frame.normal() * &value;
    let origin = match cfg.mode {
        Mode::Recenter => lifted.clone(),
        Mode::FixedOrigin => frame.origin().clone(),
    };
    Ok(RefineStep {
        frame: Frame::new(origin, tangent)?,
        lifted,
        fit: fit.diagnostics,
        bandwidth: eps,
        expansions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub p_hat: DVector<f64>,
    /// Orthonormal `D × d` basis of the estimated tangent space.
    pub tangent: DMatrix<f64>,
    pub iterations: usize,
    pub step_norms: Vec<f64>,
    pub warnings: Warnings,
    pub init: InitDiagnostics,
}

/// Estimates the projection of `r` onto the sampled manifold and the
/// tangent space there.
///
/// Guarantees assume `r` lies within about `σ` of the manifold; this is
/// not checked.
pub fn project(cloud: &PointCloud, r: &DVector<f64>, cfg: &EstimatorConfig) -> Result<ProjectionResult> {
    cfg.validate(cloud.dim())?;
    let init = fit_initial_frame(cloud, r, cfg.d, &cfg.init_config())?;

    let mut warnings = Warnings::empty();
    warnings.set(Warnings::INIT_NO_CONVERGENCE, !init.diagnostics.converged);
    warnings.set(
        Warnings::SEARCH_REGION_VIOLATED,
        !init.diagnostics.constraint_ok,
    );
    warnings.set(
        Warnings::DEGENERATE_SPECTRUM,
        init.diagnostics.degenerate_spectrum,
    );

    let note = |s: &RefineStep, warnings: &mut Warnings| {
        if s.expansions > 0 {
            *warnings |= Warnings::BANDWIDTH_EXPANDED;
        }
        if s.fit.ill_conditioned {
            *warnings |= Warnings::ILL_CONDITIONED;
        }
    };

    let roi = &init.roi;
    let mut step_norms = Vec::new();
    let (p_hat, tangent, iterations) = match cfg.mode {
        Mode::Recenter => {
            // move the initial origin onto the first fit, keeping H₀
            let first = refine_step(cloud, roi, &init.frame, cfg, 0)?;
            note(&first, &mut warnings);
            let mut frame = init.frame.with_origin(first.lifted.clone());
            let mut last_good = (!first.fit.ill_conditioned).then(|| first.lifted.clone());
            let mut last_ill = first.fit.ill_conditioned;

            let mut iterations = 0;
            let mut converged = false;
            while iterations < cfg.max_iter_cap {
                iterations += 1;
                let s = refine_step(cloud, roi, &frame, cfg, iterations as u64)?;
                note(&s, &mut warnings);
                let moved = (s.frame.origin() - frame.origin()).norm();
                step_norms.push(moved);
                last_ill = s.fit.ill_conditioned;
                if !last_ill {
                    last_good = Some(s.frame.origin().clone());
                }
                frame = s.frame;
                if moved <= cfg.stop_tol {
                    converged = true;
                    break;
                }
            }
            warnings.set(Warnings::NO_CONVERGENCE, !converged);
            let p_hat = match (last_ill, last_good) {
                (true, Some(good)) => good,
                _ => frame.origin().clone(),
            };
            (p_hat, frame.tangent().clone(), iterations)
        }
        Mode::FixedOrigin => {
            let budget = cfg.kappa_for(cloud.len(), cloud.dim()).min(cfg.max_iter_cap);
            let mut frame = init.frame.with_origin(r.clone());
            let mut last_good: Option<DVector<f64>> = None;
            let mut previous: Option<DVector<f64>> = None;
            for step in 0..budget {
                let s = refine_step(cloud, roi, &frame, cfg, step as u64)?;
                note(&s, &mut warnings);
                if let Some(prev) = &previous {
                    step_norms.push((&s.lifted - prev).norm());
                }
                if !s.fit.ill_conditioned {
                    last_good = Some(s.lifted.clone());
                }
                previous = Some(s.lifted);
                frame = s.frame;
            }
            let last = refine_step(cloud, roi, &frame, cfg, budget as u64)?;
            note(&last, &mut warnings);
            if let Some(prev) = &previous {
                step_norms.push((&last.lifted - prev).norm());
            }
            let p_hat = match (last.fit.ill_conditioned, last_good) {
                (true, Some(good)) => good,
                _ => last.lifted,
            };
            (p_hat, frame.tangent().clone(), budget)
        }
    };

    Ok(ProjectionResult {
        p_hat,
        tangent,
        iterations,
        step_norms,
        warnings,
        init: init.diagnostics,
    })
}

/// Projects every query independently (in parallel); output order matches
/// the input order.
pub fn project_batch(
    cloud: &PointCloud,
    queries: &[DVector<f64>],
    cfg: &EstimatorConfig,
) -> Vec<Result<ProjectionResult>> {
    queries.par_iter().map(|r| project(cloud, r, cfg)).collect()
}

/// Writes one row per query: `p0..p{D-1}`, the tangent basis flattened
/// row-major as `t{i}_{j}`, `iterations`, `warnings` (bitmask). Failed
/// queries get NaN coordinates and the `FAILED` bit.
pub fn write_results_csv<W: Write>(
    mut writer: W,
    results: &[Result<ProjectionResult>],
    ambient: usize,
    d: usize,
    comments: &[String],
) -> Result<()> {
    for c in comments {
        writeln!(writer, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..ambient).map(|i| format!("p{i}")).collect();
    for i in 0..ambient {
        for j in 0..d {
            header.push(format!("t{i}_{j}"));
        }
    }
    header.push("iterations".into());
    header.push("warnings".into());
    w.write_record(&header)?;

    for res in results {
        let row: Vec<String> = match res {
            Ok(p) => {
                let mut row: Vec<String> = p.p_hat.iter().map(|v| v.to_string()).collect();
                for i in 0..ambient {
                    for j in 0..d {
                        row.push(p.tangent[(i, j)].to_string());
                    }
                }
                row.push(p.iterations.to_string());
                row.push(p.warnings.bits().to_string());
                row
            }
            Err(_) => {
                let mut row = vec!["NaN".to_string(); ambient + ambient * d];
                row.push("0".into());
                row.push(Warnings::FAILED.bits().to_string());
                row
            }
        };
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
