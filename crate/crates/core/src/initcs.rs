//! Initial local coordinate system around a query point.
//!
//! Restricts the cloud to the ball of radius `√(στ)` around the query `r`
//! and looks for an origin `q` and a `d`-dimensional direction space `H`
//! minimising the mean squared distance of the ball's points to `q + H`,
//! subject to `r − q ⟂ H`. The search starts from a spatially weighted
//! PCA and alternates an affine least-squares fit with re-centering.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::{orthonormalize, Frame};
use crate::linalg::{lstsq, RANK_RTOL};
use crate::pointset::{roi, PointCloud};

/// Weights used by the PCA that seeds the iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    /// Every point of the region gets weight one.
    Uniform,
    /// `exp(−‖r_i − r‖² / scale²)`; `None` uses `scale = √(στ)`.
    Gaussian { scale: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitConfig {
    pub sigma: f64,
    pub tau: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub weights: WeightScheme,
}

impl InitConfig {
    pub fn new(sigma: f64, tau: f64) -> Self {
        Self {
            sigma,
            tau,
            max_iter: 100,
            tol: 1e-6 * sigma,
            weights: WeightScheme::Gaussian { scale: None },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < self.tau) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < sigma < tau, got sigma={}, tau={}",
                self.sigma, self.tau
            )));
        }
        if self.max_iter == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("max_iter and tol must be positive".into()));
        }
        Ok(())
    }

    /// Radius of the region of interest, `√(στ)`.
    pub fn roi_radius(&self) -> f64 {
        (self.sigma * self.tau).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPca {
    /// Leading `d` principal directions, `D × d`.
    pub basis: DMatrix<f64>,
    /// Eigenvalues of the weighted covariance, descending (zeros padded up to `D`).
    pub eigenvalues: Vec<f64>,
    /// The `d`-th and `(d+1)`-th eigenvalues coincide, so the leading
    /// subspace is not uniquely determined.
    pub degenerate: bool,
}

/// Leading `d` eigenvectors of `Σ w_i (p_i − c)(p_i − c)ᵀ / Σ w_i`.
///
/// `points` holds one point per row. Computed from an SVD of the
/// weight-scaled centred rows rather than by forming the covariance.
pub fn weighted_pca(
    points: &DMatrix<f64>,
    center: &DVector<f64>,
    weights: &[f64],
    d: usize,
) -> Result<WeightedPca> {
    let (n, ambient) = points.shape();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidConfig("weights must be finite and nonnegative".into()));
    }
    let positive = weights.iter().filter(|&&w| w > 0.0).count();
    if positive < d {
        return Err(Error::RankDeficient {
            rank: positive,
            expected: d,
        });
    }
    let total: f64 = weights.iter().sum();
    let mut scaled = DMatrix::zeros(n, ambient);
    for i in 0..n {
        let s = (weights[i] / total).sqrt();
        for j in 0..ambient {
            scaled[(i, j)] = s * (points[(i, j)] - center[j]);
        }
    }
    let svd = scaled.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });

    let mut eigenvalues: Vec<f64> = order
        .iter()
        .map(|&i| svd.singular_values[i].powi(2))
        .collect();
    eigenvalues.resize(ambient, 0.0);

    let s_max = eigenvalues[0].sqrt();
    let rank = eigenvalues
        .iter()
        .filter(|&&l| l.sqrt() > RANK_RTOL * s_max && l > 0.0)
        .count();
    if rank < d {
        return Err(Error::RankDeficient { rank, expected: d });
    }

    let cols: Vec<DVector<f64>> = order[..d]
        .iter()
        .map(|&i| v_t.row(i).transpose())
        .collect();
    let basis = orthonormalize(&DMatrix::from_columns(&cols))?;
    let gap = eigenvalues[d - 1] - eigenvalues.get(d).copied().unwrap_or(0.0);
    let degenerate = gap <= 1e-10 * eigenvalues[0];
    Ok(WeightedPca {
        basis,
        eigenvalues,
        degenerate,
    })
}

fn j1_rows(points: &DMatrix<f64>, q: &DVector<f64>, u: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for row in points.row_iter() {
        let offset = row.transpose() - q;
        let tangential = u * u.tr_mul(&offset);
        total += (offset - tangential).norm_squared();
    }
    total / points.nrows() as f64
}

/// Mean squared distance of the selected points to the affine space `q + span(U)`.
pub fn j1_score(
    cloud: &PointCloud,
    roi_indices: &[usize],
    q: &DVector<f64>,
    u: &DMatrix<f64>,
) -> Result<f64> {
    if roi_indices.is_empty() {
        return Err(Error::EmptyRoi);
    }
    Ok(j1_rows(&cloud.gather(roi_indices), q, u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the PCA initialisation (`q = r`).
    pub j1_initial: f64,
    pub j1_final: f64,
    /// Whether `‖r − q*‖ < 2σ`.
    pub constraint_ok: bool,
    pub degenerate_spectrum: bool,
}

impl InitDiagnostics {
    /// `iterations,j1,constraint_ok` as one CSV row.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            self.iterations,
            self.j1_final,
            u8::from(self.constraint_ok)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialFrame {
    pub frame: Frame,
    /// Indices of the region of interest the frame was fitted on.
    pub roi: Vec<usize>,
    pub diagnostics: InitDiagnostics,
}

/// Fits the initial frame `(q*, H*)` for the query `r`.
///
/// Hitting `max_iter` is not an error: the last iterate is returned with
/// `converged == false`.
pub fn fit_initial_frame(
    cloud: &PointCloud,
    r: &DVector<f64>,
    d: usize,
    cfg: &InitConfig,
) -> Result<InitialFrame> {
    cfg.validate()?;
    let ambient = cloud.dim();
    if r.len() != ambient {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            found: r.len(),
        });
    }
    if d == 0 || d >= ambient {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= d < D, got d={d}, D={ambient}"
        )));
    }
    let radius = cfg.roi_radius();
    let indices = roi(cloud, r, radius);
    if indices.is_empty() {
        return Err(Error::EmptyRoi);
    }
    if indices.len() < d + 1 {
        return Err(Error::RankDeficient {
            rank: indices.len().saturating_sub(1),
            expected: d,
        });
    }
    let pts = cloud.gather(&indices);
    let n = pts.nrows();

    let weights: Vec<f64> = match cfg.weights {
        WeightScheme::Uniform => vec![1.0; n],
        WeightScheme::Gaussian { scale } => {
            let s2 = scale.unwrap_or(radius).powi(2);
            pts.row_iter()
                .map(|row| (-(row.transpose() - r).norm_squared() / s2).exp())
                .collect()
        }
    };
    let total: f64 = weights.iter().sum();
    let mut mean = DVector::zeros(ambient);
    for (row, w) in pts.row_iter().zip(&weights) {
        mean.axpy(*w / total, &row.transpose(), 1.0);
    }
    let pca = weighted_pca(&pts, &mean, &weights, d)?;

    let mut u = pca.basis.clone();
    let mut q = r.clone();
    let j1_initial = j1_rows(&pts, &q, &u);

    let mut iterations = 0;
    let mut converged = false;
    let mut design = DMatrix::zeros(n, d + 1);
    design.column_mut(0).fill(1.0);
    while iterations < cfg.max_iter {
        iterations += 1;
        let q_prev = q.clone();
        let mut centered = pts.clone();
        for mut row in centered.row_iter_mut() {
            row -= q.transpose();
        }
        design.columns_mut(1, d).copy_from(&(&centered * &u));
        let ls = lstsq(&design, &centered);
        if ls.rank < d + 1 {
            return Err(Error::RankDeficient {
                rank: ls.rank.saturating_sub(1),
                expected: d,
            });
        }
        let q_tilde = &q + ls.solution.row(0).transpose();
        u = orthonormalize(&ls.solution.rows(1, d).transpose())?;
        q = &q_tilde + &u * u.tr_mul(&(r - &q_tilde));
        if (&q - &q_prev).norm() < cfg.tol {
            converged = true;
            break;
        }
    }

    let j1_final = j1_rows(&pts, &q, &u);
    let constraint_ok = (r - &q).norm() < 2.0 * cfg.sigma;
    let frame = Frame::new(q, u)?;
    Ok(InitialFrame {
        frame,
        roi: indices,
        diagnostics: InitDiagnostics {
            iterations,
            converged,
            j1_initial,
            j1_final,
            constraint_ok,
            degenerate_spectrum: pca.degenerate,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{angle_max, random_orthonormal};
    use nalgebra::dvector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pca_recovers_a_line() {
        let pts = DMatrix::from_row_slice(4, 2, &[-2.0, -1.0, -1.0, -0.5, 1.0, 0.5, 2.0, 1.0]);
        let pca = weighted_pca(&pts, &DVector::zeros(2), &[1.0; 4], 1).unwrap();
        let dir = DMatrix::from_column_slice(2, 1, &[2.0, 1.0]) / 5f64.sqrt();
        assert!(angle_max(&pca.basis, &dir).unwrap() < 1e-12);
        assert!(!pca.degenerate);
    }

    #[test]
    fn pca_flags_symmetric_cross() {
        let pts = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        let pca = weighted_pca(&pts, &DVector::zeros(2), &[1.0; 4], 1).unwrap();
        assert!(pca.degenerate);
    }

    #[test]
    fn pca_noisy_plane_matches_dense_eig() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let plane = random_orthonormal(&mut rng, 5, 2);
        let normal = crate::geom::complement(&plane).unwrap();
        let n = 500;
        let mut pts = DMatrix::zeros(n, 5);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let x = DVector::from_fn(2, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let y = DVector::from_fn(3, |_, _| (rng.random::<f64>() - 0.5) * 0.02);
            pts.row_mut(i).copy_from(&(&plane * x + &normal * y).transpose());
            weights.push(0.5 + rng.random::<f64>());
        }
        let center = DVector::zeros(5);
        let pca = weighted_pca(&pts, &center, &weights, 2).unwrap();
        assert!(angle_max(&pca.basis, &plane).unwrap() <= 0.05);

        // oracle: eigen-decomposition of the explicitly formed covariance
        let total: f64 = weights.iter().sum();
        let mut cov = DMatrix::zeros(5, 5);
        for (row, w) in pts.row_iter().zip(&weights) {
            let v = row.transpose() - &center;
            cov += (&v * v.transpose()) * (*w / total);
        }
        let eig = cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = DMatrix::from_columns(&[
            eig.eigenvectors.column(order[0]).into_owned(),
            eig.eigenvectors.column(order[1]).into_owned(),
        ]);
        assert!(angle_max(&pca.basis, &top).unwrap() < 1e-8);
        for (k, &i) in order.iter().enumerate() {
            assert!((pca.eigenvalues[k] - eig.eigenvalues[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pca_needs_enough_weighted_points() {
        let pts = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let err = weighted_pca(&pts, &DVector::zeros(2), &[1.0, 0.0, 0.0], 2);
        assert!(matches!(err, Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn j1_by_hand() {
        let cloud = PointCloud::new(vec![0.0, 0.0, 1.0, 0.0, -3.0, 0.0], 2).unwrap();
        let u = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert_eq!(j1_score(&cloud, &[0, 1, 2], &DVector::zeros(2), &u).unwrap(), 0.0);
        let one = PointCloud::new(vec![0.3, 0.25], 2).unwrap();
        let j = j1_score(&one, &[0], &DVector::zeros(2), &u).unwrap();
        assert!((j - 0.0625).abs() < 1e-15);
        assert!(matches!(
            j1_score(&one, &[], &DVector::zeros(2), &u),
            Err(Error::EmptyRoi)
        ));
    }

    #[test]
    fn j1_random_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<f64> = (0..40 * 4).map(|_| rng.random::<f64>()).collect();
        let cloud = PointCloud::new(data, 4).unwrap();
        let u = random_orthonormal(&mut rng, 4, 2);
        let q = dvector![0.1, 0.2, 0.3, 0.4];
        let idx: Vec<usize> = (0..40).step_by(3).collect();
        let mut direct = 0.0;
        for &i in &idx {
            let v = cloud.point(i) - &q;
            let mut perp = v.clone();
            for j in 0..2 {
                let c = u.column(j).dot(&v);
                perp -= u.column(j) * c;
            }
            direct += perp.dot(&perp);
        }
        direct /= idx.len() as f64;
        let j = j1_score(&cloud, &idx, &q, &u).unwrap();
        assert!((j - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn too_few_points_is_rank_deficient() {
        let cloud = PointCloud::new(vec![0.0, 0.0, 0.0, 0.01, 0.0, 0.0], 3).unwrap();
        let cfg = InitConfig::new(0.01, 1.0);
        let r = dvector![0.0, 0.0, 0.0];
        assert!(matches!(
            fit_initial_frame(&cloud, &r, 2, &cfg),
            Err(Error::RankDeficient { .. })
        ));
        let far = dvector![5.0, 5.0, 5.0];
        assert!(matches!(
            fit_initial_frame(&cloud, &far, 2, &cfg),
            Err(Error::EmptyRoi)
        ));
    }

    #[test]
    fn bad_config_is_rejected() {
        let cfg = InitConfig::new(2.0, 1.0);
        assert!(cfg.validate().is_err());
        let csv = InitDiagnostics {
            iterations: 3,
            converged: true,
            j1_initial: 1.0,
            j1_final: 0.5,
            constraint_ok: true,
            degenerate_spectrum: false,
        }
        .csv_row();
        assert_eq!(csv, "3,0.5,1");
    }
}
