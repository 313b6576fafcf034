//! Local frames, orthonormal bases and principal angles between subspaces.
//!
//! Subspaces are always carried around as explicit column-orthonormal
//! `D × d` matrices. Every routine that produces a basis applies the same
//! sign convention (the first significant ambient coordinate of each column
//! is positive), so two runs over the same input produce identical bits.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::RANK_RTOL;

/// Tolerance used when validating that a basis is column-orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A local coordinate system: an origin in `R^D` together with orthonormal
/// bases of a `d`-dimensional direction subspace and of its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    origin: DVector<f64>,
    tangent: DMatrix<f64>,
    normal: DMatrix<f64>,
}

impl Frame {
    /// Builds a frame from an already orthonormal tangent basis. The normal
    /// basis is computed with [`complement`].
    pub fn new(origin: DVector<f64>, tangent: DMatrix<f64>) -> Result<Self> {
        let ambient = origin.len();
        if tangent.nrows() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: tangent.nrows(),
            });
        }
        let d = tangent.ncols();
        if d == 0 || d >= ambient {
            return Err(Error::InvalidConfig(format!(
                "frame dimension must satisfy 1 <= d < D, got d={d}, D={ambient}"
            )));
        }
        if orthonormality_defect(&tangent) > ORTHONORMAL_TOL {
            return Err(Error::InvalidConfig(
                "tangent basis is not column-orthonormal".into(),
            ));
        }
        let normal = complement(&tangent)?;
        Ok(Self {
            origin,
            tangent,
            normal,
        })
    }

    /// Builds a frame whose tangent space is the span of arbitrary
    /// full-rank columns.
    pub fn from_columns(origin: DVector<f64>, columns: &DMatrix<f64>) -> Result<Self> {
        let tangent = orthonormalize(columns)?;
        Self::new(origin, tangent)
    }

    /// The frame at the ambient origin spanned by the first `d` coordinate axes.
    pub fn standard(ambient: usize, d: usize) -> Result<Self> {
        let tangent = DMatrix::identity(ambient, d);
        Self::new(DVector::zeros(ambient), tangent)
    }

    pub fn origin(&self) -> &DVector<f64> {
        &self.origin
    }

    pub fn tangent(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    pub fn normal(&self) -> &DMatrix<f64> {
        &self.normal
    }

    /// Intrinsic dimension `d`.
    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    /// Ambient dimension `D`.
    pub fn ambient_dim(&self) -> usize {
        self.origin.len()
    }

    /// Same directions, different origin.
    pub fn with_origin(&self, origin: DVector<f64>) -> Self {
        assert_eq!(origin.len(), self.ambient_dim());
        Self {
            origin,
            tangent: self.tangent.clone(),
            normal: self.normal.clone(),
        }
    }

    /// Splits `point - origin` into tangent and normal coordinates.
    pub fn to_local(&self, point: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let offset = point - &self.origin;
        (self.tangent.tr_mul(&offset), self.normal.tr_mul(&offset))
    }

    /// Inverse of [`Frame::to_local`].
    pub fn from_local(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.origin + &self.tangent * x + &self.normal * y
    }
}

/// Largest entry of `|BᵀB − I|`.
pub fn orthonormality_defect(basis: &DMatrix<f64>) -> f64 {
    let gram = basis.tr_mul(basis);
    let id = DMatrix::<f64>::identity(gram.nrows(), gram.ncols());
    (gram - id).amax()
}

/// Flips the column so that its first significant coordinate is positive.
fn fix_sign(mut column: DVector<f64>) -> DVector<f64> {
    let scale = column.amax();
    if let Some(first) = column.iter().find(|v| v.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            column.neg_mut();
        }
    }
    column
}

/// Orthonormal basis of the column span of a full-rank `D × d` matrix.
pub fn orthonormalize(columns: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = columns.ncols();
    if d == 0 || columns.nrows() < d {
        return Err(Error::RankDeficient {
            rank: columns.nrows().min(d),
            expected: d,
        });
    }
    let s = columns.clone().singular_values();
    let s_max = s.max();
    let rank = s.iter().filter(|&&v| v > RANK_RTOL * s_max && v > 0.0).count();
    if rank < d {
        return Err(Error::RankDeficient { rank, expected: d });
    }
    let q = columns.clone().qr().q();
    let fixed: Vec<DVector<f64>> = q
        .column_iter()
        .map(|c| fix_sign(c.into_owned()))
        .collect();
    Ok(DMatrix::from_columns(&fixed))
}

/// Orthonormal basis of the orthogonal complement of `span(basis)`.
///
/// Candidates are the ambient axes projected away from the basis; at each
/// step the one with the largest residual is taken (lowest index on ties).
pub fn complement(basis: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let ambient = basis.nrows();
    let d = basis.ncols();
    if d > ambient {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            found: d,
        });
    }
    let target = ambient - d;
    let mut candidates = DMatrix::<f64>::identity(ambient, ambient) - basis * basis.transpose();
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(target);

    for _ in 0..target {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (j, c) in candidates.column_iter().enumerate() {
            let n = c.norm();
            if n > best_norm {
                best = j;
                best_norm = n;
            }
        }
        let mut v: DVector<f64> = candidates.column(best).into_owned();
        // second pass of Gram-Schmidt against everything accepted so far
        for _ in 0..2 {
            v -= basis * basis.tr_mul(&v);
            for a in &accepted {
                let proj = a.dot(&v);
                v.axpy(-proj, a, 1.0);
            }
        }
        let n = v.norm();
        if n <= f64::EPSILON {
            return Err(Error::RankDeficient {
                rank: d + accepted.len(),
                expected: ambient,
            });
        }
        v /= n;
        let v = fix_sign(v);
        for mut c in candidates.column_iter_mut() {
            let proj = v.dot(&c);
            c.axpy(-proj, &v, 1.0);
        }
        accepted.push(v);
    }

    if accepted.is_empty() {
        return Ok(DMatrix::zeros(ambient, 0));
    }
    Ok(DMatrix::from_columns(&accepted))
}

/// Principal angles between `span(u)` and `span(w)`, ascending, in `[0, π/2]`.
///
/// Cosines come from the singular values of `UᵀW` and sines from those of
/// `(I − UUᵀ)W`; each angle is read off whichever of the two is better
/// conditioned, which keeps tiny angles accurate.
pub fn principal_angles(u: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<Vec<f64>> {
    if u.nrows() != w.nrows() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: w.nrows(),
        });
    }
    let (big, small) = if w.ncols() <= u.ncols() { (u, w) } else { (w, u) };
    let m = small.ncols();
    if m == 0 {
        return Ok(Vec::new());
    }
    let cross = big.tr_mul(small);
    let mut cosines: Vec<f64> = cross.singular_values().iter().cloned().collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    let residual = small - big * &cross;
    let mut sines: Vec<f64> = residual.singular_values().iter().cloned().collect();
    sines.sort_by(|a, b| a.total_cmp(b));

    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(sines.iter())
        .take(m)
        .map(|(&c, &s)| {
            let c = c.clamp(-1.0, 1.0);
            if c * c < 0.5 {
                c.acos()
            } else {
                s.clamp(-1.0, 1.0).asin()
            }
        })
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    Ok(angles)
}

/// Largest principal angle between two subspaces of equal dimension.
pub fn angle_max(u: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<f64> {
    if u.ncols() != w.ncols() {
        return Err(Error::DimensionMismatch {
            expected: u.ncols(),
            found: w.ncols(),
        });
    }
    Ok(principal_angles(u, w)?.last().copied().unwrap_or(0.0))
}

/// Haar-distributed random `D × d` orthonormal basis.
pub fn random_orthonormal<R: Rng + ?Sized>(rng: &mut R, ambient: usize, d: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(ambient, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(q) = orthonormalize(&g) {
            return q;
        }
    }
}
