//! Synthetic manifolds with closed-form (or certified) projection and
//! tangent oracles, exact uniform samplers for their tubular
//! neighbourhoods, and the geodesic walk built on top of a projector.
//!
//! Samples are drawn from the uniform distribution on
//! `M_σ = {p : dist(p, M) < σ}` with respect to ambient Lebesgue measure.
//! For flat pieces, circles and spheres this is done exactly through the
//! radial density; for polynomial graphs by rejection from a bounding box.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geom::{complement, orthonormalize};
use crate::pointset::PointCloud;
use crate::polyfit::{exponents, PolyModel};

/// Seeded portable generator; `stream` separates independent draws that
/// share a seed.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A test manifold with known geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldSpec {
    /// The patch `offset + B x`, `x ∈ [−h, h]^d`. The oracles treat it as
    /// the full (unbounded) affine subspace.
    Affine {
        basis: DMatrix<f64>,
        offset: DVector<f64>,
        half_width: f64,
    },
    /// Circle of the given radius in the plane of the first two coordinates.
    Circle { radius: f64, ambient: usize },
    /// `d`-sphere of the given radius in the first `d + 1` coordinates.
    Sphere { d: usize, radius: f64, ambient: usize },
    /// Graph `{(x, P(x)) : x ∈ [−h, h]^d}` of a polynomial `P: R^d → R^codim`,
    /// `d ∈ {1, 2}`. Its reach is not computed and must be supplied.
    PolyGraph {
        poly: PolyModel,
        half_width: f64,
        reach: f64,
    },
}

/// Points visited by a geodesic walk and the tangent bases estimated there.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<DVector<f64>>,
    pub tangents: Vec<DMatrix<f64>>,
}

fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> DVector<f64> {
    let g = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = g.norm();
    let u: f64 = rng.random();
    g / norm * (radius * u.powf(1.0 / dim as f64))
}

fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = g.norm();
        if n > 1e-12 {
            return g / n;
        }
    }
}

/// Uniform sample from the σ-tube around a `d`-sphere embedded in the
/// first `d + 1` of `ambient` coordinates.
fn sample_sphere_tube<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    radius: f64,
    ambient: usize,
    sigma: f64,
) -> DVector<f64> {
    let dir = unit_vector(rng, d + 1);
    let mut p = DVector::zeros(ambient);
    if ambient == d + 1 {
        // radial density ∝ ρ^(D−1) on [R−σ, R+σ]
        let lo = (radius - sigma).powi(ambient as i32);
        let hi = (radius + sigma).powi(ambient as i32);
        let u: f64 = rng.random();
        let rho = (lo + u * (hi - lo)).powf(1.0 / ambient as f64);
        p.rows_mut(0, d + 1).copy_from(&(dir * rho));
        return p;
    }
    // (s, z) uniform in the normal σ-ball, weighted by the (R+s)^d volume factor
    loop {
        let offset = uniform_ball(rng, ambient - d, sigma);
        let s = offset[0];
        let accept = ((radius + s) / (radius + sigma)).powi(d as i32);
        if rng.random::<f64>() < accept {
            p.rows_mut(0, d + 1).copy_from(&(&dir * (radius + s)));
            p.rows_mut(d + 1, ambient - d - 1)
                .copy_from(&offset.rows(1, ambient - d - 1));
            return p;
        }
    }
}

/// Bounds of each monomial over the box `[−h, h]^d`, by interval arithmetic.
fn poly_range(poly: &PolyModel, h: f64) -> (DVector<f64>, DVector<f64>) {
    let exps = exponents(poly.d(), poly.degree());
    let mut lo = DVector::zeros(poly.codim());
    let mut hi = DVector::zeros(poly.codim());
    for (row, e) in exps.iter().enumerate() {
        let even = e.iter().all(|p| p % 2 == 0);
        let total: u32 = e.iter().sum();
        let mag = h.powi(total as i32);
        let (mlo, mhi) = if total == 0 {
            (1.0, 1.0)
        } else if even {
            (0.0, mag)
        } else {
            (-mag, mag)
        };
        for j in 0..poly.codim() {
            let c = poly.coeffs()[(row, j)];
            let (a, b) = (c * mlo, c * mhi);
            lo[j] += a.min(b);
            hi[j] += a.max(b);
        }
    }
    (lo, hi)
}

/// Upper bound on the operator norm of the Jacobian of `poly` over
/// `[−h, h]^d` (Frobenius norm of termwise bounds).
fn gradient_bound(poly: &PolyModel, h: f64) -> f64 {
    let exps = exponents(poly.d(), poly.degree());
    let mut total = 0.0;
    for j in 0..poly.codim() {
        for v in 0..poly.d() {
            let mut b = 0.0;
            for (row, e) in exps.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let deg: u32 = e.iter().sum();
                b += poly.coeffs()[(row, j)].abs() * f64::from(e[v]) * h.powi(deg as i32 - 1);
            }
            total += b * b;
        }
    }
    total.sqrt()
}

/// Whether `point` lies within `sigma` of the graph. Any foot closer than
/// `sigma` has its parameter within `sigma` of the point's own parameter, so
/// a local scan of that window followed by refinement decides it.
fn tube_contains(poly: &PolyModel, h: f64, point: &DVector<f64>, sigma: f64) -> bool {
    let d = poly.d();
    let nodes: usize = if d == 1 { 41 } else { 21 };
    let axis = |v: usize, i: usize| {
        let lo = (point[v] - sigma).max(-h);
        let hi = (point[v] + sigma).min(h);
        lo + (hi - lo) * i as f64 / (nodes - 1) as f64
    };
    if (0..d).any(|v| point[v] - sigma > h || point[v] + sigma < -h) {
        return false;
    }
    let mut best = (f64::INFINITY, DVector::zeros(d));
    for flat in 0..nodes.pow(d as u32) {
        let x = if d == 1 {
            DVector::from_vec(vec![axis(0, flat)])
        } else {
            DVector::from_vec(vec![axis(0, flat / nodes), axis(1, flat % nodes)])
        };
        let f = graph_objective(poly, point, &x);
        if f < best.0 {
            best = (f, x);
        }
    }
    if best.0 < sigma * sigma {
        return true;
    }
    let x = refine_foot(poly, h, point, best.1);
    graph_objective(poly, point, &x) < sigma * sigma
}

impl ManifoldSpec {
    /// Affine patch through `offset` spanned by the columns of `basis`.
    pub fn affine(basis: DMatrix<f64>, offset: DVector<f64>, half_width: f64) -> Result<Self> {
        if basis.nrows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: offset.len(),
                found: basis.nrows(),
            });
        }
        let basis = orthonormalize(&basis)?;
        Ok(Self::Affine {
            basis,
            offset,
            half_width,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Affine { basis, .. } => basis.ncols(),
            Self::Circle { .. } => 1,
            Self::Sphere { d, .. } => *d,
            Self::PolyGraph { poly, .. } => poly.d(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Affine { offset, .. } => offset.len(),
            Self::Circle { ambient, .. } | Self::Sphere { ambient, .. } => *ambient,
            Self::PolyGraph { poly, .. } => poly.d() + poly.codim(),
        }
    }

    /// Reach of the manifold (infinite for affine patches).
    pub fn reach(&self) -> f64 {
        match self {
            Self::Affine { .. } => f64::INFINITY,
            Self::Circle { radius, .. } | Self::Sphere { radius, .. } => *radius,
            Self::PolyGraph { reach, .. } => *reach,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Affine { half_width, .. } => *half_width > 0.0,
            Self::Circle { radius, ambient } => *radius > 0.0 && *ambient >= 2,
            Self::Sphere { d, radius, ambient } => *radius > 0.0 && *d >= 1 && *ambient > *d,
            Self::PolyGraph {
                poly,
                half_width,
                reach,
            } => *half_width > 0.0 && *reach > 0.0 && (1..=2).contains(&poly.d()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid manifold spec {self:?}")))
        }
    }

    /// `n` i.i.d. points uniform on the σ-tube, reproducible from `seed`.
    pub fn sample_tubular(&self, n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
        self.sample_tubular_stream(n, sigma, seed, 0)
    }

    /// As [`Self::sample_tubular`] on an independent stream of the same seed.
    pub fn sample_tubular_stream(
        &self,
        n: usize,
        sigma: f64,
        seed: u64,
        stream: u64,
    ) -> Result<PointCloud> {
        self.validate()?;
        if !(sigma > 0.0) || sigma >= self.reach() {
            return Err(Error::SigmaExceedsReach {
                sigma,
                reach: self.reach(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidConfig("sample count must be positive".into()));
        }
        let mut rng = seeded_rng(seed, stream);
        let ambient = self.ambient_dim();
        let mut data = Vec::with_capacity(n * ambient);
        match self {
            Self::Affine {
                basis,
                offset,
                half_width,
            } => {
                let normal = complement(basis)?;
                let d = basis.ncols();
                for _ in 0..n {
                    let x = DVector::from_fn(d, |_, _| (rng.random::<f64>() * 2.0 - 1.0) * half_width);
                    let y = uniform_ball(&mut rng, ambient - d, sigma);
                    let p = offset + basis * x + &normal * y;
                    data.extend_from_slice(p.as_slice());
                }
            }
            Self::Circle { radius, ambient } => {
                for _ in 0..n {
                    let p = sample_sphere_tube(&mut rng, 1, *radius, *ambient, sigma);
                    data.extend_from_slice(p.as_slice());
                }
            }
            Self::Sphere { d, radius, ambient } => {
                for _ in 0..n {
                    let p = sample_sphere_tube(&mut rng, *d, *radius, *ambient, sigma);
                    data.extend_from_slice(p.as_slice());
                }
            }
            Self::PolyGraph {
                poly, half_width, ..
            } => {
                let d = poly.d();
                let (lo, hi) = poly_range(poly, *half_width);
                let slope_factor = (1.0 + gradient_bound(poly, half_width + sigma).powi(2)).sqrt();
                let mut accepted = 0;
                while accepted < n {
                    let x = DVector::from_fn(d, |_, _| {
                        (rng.random::<f64>() * 2.0 - 1.0) * (half_width + sigma)
                    });
                    let y = DVector::from_fn(poly.codim(), |j, _| {
                        lo[j] - sigma + rng.random::<f64>() * (hi[j] - lo[j] + 2.0 * sigma)
                    });
                    let inside_box = x.iter().all(|v| v.abs() <= *half_width);
                    let vertical = (&y - poly.eval(&x)).norm();
                    // the vertical distance bounds the true distance from above,
                    // and from below once divided by √(1 + L²)
                    let keep = if inside_box && vertical < sigma {
                        true
                    } else if vertical >= sigma * slope_factor {
                        false
                    } else {
                        let mut p = DVector::zeros(ambient);
                        p.rows_mut(0, d).copy_from(&x);
                        p.rows_mut(d, poly.codim()).copy_from(&y);
                        tube_contains(poly, *half_width, &p, sigma)
                    };
                    if keep {
                        data.extend(x.iter().chain(y.iter()));
                        accepted += 1;
                    }
                }
            }
        }
        PointCloud::new(data, ambient)
    }

    /// Nearest point of the manifold.
    pub fn oracle_project(&self, point: &DVector<f64>) -> Result<DVector<f64>> {
        if point.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: point.len(),
            });
        }
        match self {
            Self::Affine { basis, offset, .. } => {
                Ok(offset + basis * basis.tr_mul(&(point - offset)))
            }
            Self::Circle { radius, .. } => project_sphere(point, 1, *radius),
            Self::Sphere { d, radius, .. } => project_sphere(point, *d, *radius),
            Self::PolyGraph {
                poly, half_width, ..
            } => {
                let x = poly_graph_foot(poly, *half_width, point)?;
                Ok(lift(poly, &x))
            }
        }
    }

    /// Orthonormal tangent basis at the projection of `point`.
    pub fn oracle_tangent(&self, point: &DVector<f64>) -> Result<DMatrix<f64>> {
        let p = self.oracle_project(point)?;
        let ambient = self.ambient_dim();
        match self {
            Self::Affine { basis, .. } => Ok(basis.clone()),
            Self::Circle { .. } | Self::Sphere { .. } => {
                let d = self.dim();
                let radial = DMatrix::from_column_slice(d + 1, 1, p.rows(0, d + 1).normalize().as_slice());
                let inner = complement(&radial)?;
                let mut t = DMatrix::zeros(ambient, d);
                t.view_mut((0, 0), (d + 1, d)).copy_from(&inner);
                Ok(t)
            }
            Self::PolyGraph { poly, .. } => {
                let d = poly.d();
                let x = p.rows(0, d).into_owned();
                let jac = poly.jacobian(&x);
                let mut cols = DMatrix::zeros(ambient, d);
                cols.view_mut((0, 0), (d, d)).copy_from(&DMatrix::identity(d, d));
                cols.view_mut((d, 0), (poly.codim(), d)).copy_from(&jac);
                orthonormalize(&cols)
            }
        }
    }

    pub fn distance(&self, point: &DVector<f64>) -> Result<f64> {
        Ok((point - self.oracle_project(point)?).norm())
    }

    /// `key=value` description used in CSV comment headers.
    pub fn header_lines(&self) -> Vec<String> {
        let join = |v: &mut dyn Iterator<Item = f64>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(";")
        };
        match self {
            Self::Affine {
                basis,
                offset,
                half_width,
            } => vec![
                "manifold=affine".into(),
                format!("d={}", basis.ncols()),
                format!("ambient={}", offset.len()),
                format!("half_width={half_width}"),
                format!("basis={}", join(&mut basis.transpose().iter().copied())),
                format!("offset={}", join(&mut offset.iter().copied())),
            ],
            Self::Circle { radius, ambient } => vec![
                "manifold=circle".into(),
                format!("radius={radius}"),
                format!("ambient={ambient}"),
            ],
            Self::Sphere { d, radius, ambient } => vec![
                "manifold=sphere".into(),
                format!("d={d}"),
                format!("radius={radius}"),
                format!("ambient={ambient}"),
            ],
            Self::PolyGraph {
                poly,
                half_width,
                reach,
            } => vec![
                "manifold=poly".into(),
                format!("d={}", poly.d()),
                format!("ambient={}", poly.d() + poly.codim()),
                format!("degree={}", poly.degree()),
                format!("half_width={half_width}"),
                format!("reach={reach}"),
                format!("coeffs={}", join(&mut poly.coeffs().transpose().iter().copied())),
            ],
        }
    }

    /// Inverse of [`Self::header_lines`]; unrelated keys are ignored.
    pub fn from_header_lines<S: AsRef<str>>(lines: &[S]) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for line in lines {
            let line = line.as_ref().trim().trim_start_matches('#').trim();
            if let Some((k, v)) = line.split_once('=') {
                kv.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let get = |k: &str| {
            kv.get(k)
                .ok_or_else(|| Error::InvalidConfig(format!("manifold header lacks {k}")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("{k}: {e}")))
        };
        let int = |k: &str| -> Result<usize> {
            get(k)?
                .parse::<usize>()
                .map_err(|e| Error::InvalidConfig(format!("{k}: {e}")))
        };
        let list = |k: &str| -> Result<Vec<f64>> {
            get(k)?
                .split(';')
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::InvalidConfig(format!("{k}: {e}")))
                })
                .collect()
        };
        let spec = match get("manifold")?.as_str() {
            "affine" => {
                let (d, ambient) = (int("d")?, int("ambient")?);
                let basis = DMatrix::from_row_slice(ambient, d, &list("basis")?);
                Self::Affine {
                    basis,
                    offset: DVector::from_vec(list("offset")?),
                    half_width: num("half_width")?,
                }
            }
            "circle" => Self::Circle {
                radius: num("radius")?,
                ambient: int("ambient")?,
            },
            "sphere" => Self::Sphere {
                d: int("d")?,
                radius: num("radius")?,
                ambient: int("ambient")?,
            },
            "poly" => {
                let (d, ambient, degree) = (int("d")?, int("ambient")?, int("degree")?);
                let codim = ambient - d;
                let coeffs = list("coeffs")?;
                let m = coeffs.len() / codim.max(1);
                let poly = PolyModel::new(d, codim, degree, DMatrix::from_row_slice(m, codim, &coeffs))?;
                Self::PolyGraph {
                    poly,
                    half_width: num("half_width")?,
                    reach: num("reach")?,
                }
            }
            other => return Err(Error::InvalidConfig(format!("unknown manifold {other}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn project_sphere(point: &DVector<f64>, d: usize, radius: f64) -> Result<DVector<f64>> {
    let head = point.rows(0, d + 1);
    let norm = head.norm();
    if norm <= 1e-9 * radius {
        return Err(Error::AmbiguousProjection);
    }
    let mut p = DVector::zeros(point.len());
    p.rows_mut(0, d + 1).copy_from(&(head * (radius / norm)));
    Ok(p)
}

fn lift(poly: &PolyModel, x: &DVector<f64>) -> DVector<f64> {
    let d = poly.d();
    let mut p = DVector::zeros(d + poly.codim());
    p.rows_mut(0, d).copy_from(x);
    p.rows_mut(d, poly.codim()).copy_from(&poly.eval(x));
    p
}

fn graph_objective(poly: &PolyModel, point: &DVector<f64>, x: &DVector<f64>) -> f64 {
    (lift(poly, x) - point).norm_squared()
}

/// Gauss-Newton on `‖(x, P(x)) − point‖²`, clamped to the parameter box.
fn refine_foot(poly: &PolyModel, h: f64, point: &DVector<f64>, start: DVector<f64>) -> DVector<f64> {
    let d = poly.d();
    let mut x = start;
    for _ in 0..200 {
        let residual = lift(poly, &x) - point;
        let mut jac = DMatrix::zeros(d + poly.codim(), d);
        jac.view_mut((0, 0), (d, d)).copy_from(&DMatrix::identity(d, d));
        jac.view_mut((d, 0), (poly.codim(), d)).copy_from(&poly.jacobian(&x));
        let normal = jac.tr_mul(&jac);
        let Some(chol) = normal.cholesky() else { break };
        let step = chol.solve(&(-jac.tr_mul(&residual)));
        let mut next = &x + &step;
        for v in next.iter_mut() {
            *v = v.clamp(-h, h);
        }
        let moved = (&next - &x).norm();
        // only accept non-increasing steps
        if graph_objective(poly, point, &next) > graph_objective(poly, point, &x) + 1e-300 {
            break;
        }
        x = next;
        if moved < 1e-15 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

/// Parameter `x*` of the nearest graph point: dense grid scan, then local
/// refinement of the best grid minima.
fn poly_graph_foot(poly: &PolyModel, h: f64, point: &DVector<f64>) -> Result<DVector<f64>> {
    let d = poly.d();
    let per_axis: usize = if d == 1 { 4001 } else { 201 };
    let node = |i: usize| -h + 2.0 * h * i as f64 / (per_axis - 1) as f64;
    let mut grid = Vec::with_capacity(per_axis.pow(d as u32));
    let total = per_axis.pow(d as u32);
    for flat in 0..total {
        let x = if d == 1 {
            DVector::from_vec(vec![node(flat)])
        } else {
            DVector::from_vec(vec![node(flat / per_axis), node(flat % per_axis)])
        };
        let f = graph_objective(poly, point, &x);
        grid.push((x, f));
    }
    // discrete local minima (ties count as minima)
    let neighbours = |flat: usize| -> Vec<usize> {
        let mut out = Vec::new();
        if d == 1 {
            if flat > 0 {
                out.push(flat - 1);
            }
            if flat + 1 < total {
                out.push(flat + 1);
            }
        } else {
            let (i, j) = (flat / per_axis, flat % per_axis);
            if i > 0 {
                out.push(flat - per_axis);
            }
            if i + 1 < per_axis {
                out.push(flat + per_axis);
            }
            if j > 0 {
                out.push(flat - 1);
            }
            if j + 1 < per_axis {
                out.push(flat + 1);
            }
        }
        out
    };
    let mut minima: Vec<usize> = (0..total)
        .filter(|&i| neighbours(i).iter().all(|&j| grid[i].1 <= grid[j].1))
        .collect();
    minima.sort_by(|&a, &b| grid[a].1.total_cmp(&grid[b].1).then(a.cmp(&b)));
    minima.truncate(8);

    let mut refined: Vec<(DVector<f64>, f64)> = minima
        .iter()
        .map(|&i| {
            let x = refine_foot(poly, h, point, grid[i].0.clone());
            let f = graph_objective(poly, point, &x);
            (x, f)
        })
        .collect();
    refined.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (best, fbest) = refined[0].clone();
    for (x, f) in refined.iter().skip(1) {
        let distinct = (x - &best).norm() > 1e-6 * (1.0 + h);
        if distinct && (f - fbest).abs() <= 1e-12 * fbest.max(1e-300) {
            return Err(Error::AmbiguousProjection);
        }
    }
    Ok(best)
}

/// Walks along the manifold: step `eps` along the current unit velocity,
/// project back with `project_fn`, and transport the velocity to the new
/// tangent space by orthogonal projection and renormalisation.
///
/// `x0` is projected first; `v0` is an ambient vector whose tangential part
/// gives the initial direction. Returns `steps + 1` points.
pub fn geodesic_walk<F>(
    mut project_fn: F,
    x0: &DVector<f64>,
    v0: &DVector<f64>,
    eps: f64,
    steps: usize,
) -> Result<Trajectory>
where
    F: FnMut(&DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)>,
{
    if v0.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            found: v0.len(),
        });
    }
    if v0.norm() == 0.0 || !(eps > 0.0) {
        return Err(Error::InvalidConfig(
            "initial velocity must be nonzero and the step positive".into(),
        ));
    }
    let transport = |v: &DVector<f64>, t: &DMatrix<f64>| -> Result<DVector<f64>> {
        let w = t * t.tr_mul(v);
        let n = w.norm();
        if n < 1e-8 * v.norm() {
            return Err(Error::DegenerateTransport);
        }
        Ok(w / n)
    };

    let (mut x, mut t) = project_fn(x0)?;
    let mut v = transport(v0, &t)?;
    let mut points = vec![x.clone()];
    let mut tangents = vec![t.clone()];
    for _ in 0..steps {
        let guess = &x + &v * eps;
        (x, t) = project_fn(&guess)?;
        v = transport(&v, &t)?;
        points.push(x.clone());
        tangents.push(t.clone());
    }
    Ok(Trajectory { points, tangents })
}
