//! Projection onto a manifold known only through noisy samples.
//!
//! Given points drawn from the σ-tube around an unknown `d`-dimensional
//! submanifold of `R^D` and a query point `r`, [`refine::project`] returns
//! an estimate of the nearest point of the manifold to `r` together with an
//! orthonormal basis of the tangent space there.
//!
//! The estimate is built in two steps. [`initcs`] finds a rough local frame
//! from a weighted PCA inside a ball of radius `√(στ)` around `r`. [`refine`]
//! then fits the manifold as a graph of degree `k - 1` polynomials over that
//! frame, with a shrinking bandwidth, and moves the frame onto the fitted
//! graph until it stops moving.
//!
//! ```
//! use manproj::refine::{project, EstimatorConfig};
//! use manproj::synth::ManifoldSpec;
//! use nalgebra::DVector;
//!
//! let circle = ManifoldSpec::Circle { radius: 1.0, ambient: 2 };
//! let cloud = circle.sample_tubular(4000, 0.02, 7).unwrap();
//! let cfg = EstimatorConfig::new(1, 3, 0.02, 1.0);
//! let r = DVector::from_vec(vec![0.6, 0.8]);
//! let res = project(&cloud, &r, &cfg).unwrap();
//! assert!(circle.distance(&res.p_hat).unwrap() < 0.02);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geom;
pub mod initcs;
mod linalg;
pub mod pointset;
pub mod polyfit;
pub mod rates;
pub mod refine;
pub mod synth;

pub use error::{Error, Result};
pub use geom::{angle_max, principal_angles, Frame};
pub use pointset::PointCloud;
pub use refine::{project, EstimatorConfig, ProjectionResult};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/initial-frame.md")]
    mod initial_frame {}
    #[doc = include_str!("../../../book/src/regression.md")]
    mod regression {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
}
