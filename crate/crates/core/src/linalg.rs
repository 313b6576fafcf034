//! Small dense least-squares helper shared by the two fitting stages.

use nalgebra::DMatrix;

/// Singular values below `RANK_RTOL * s_max` are treated as zero.
pub(crate) const RANK_RTOL: f64 = 1e-10;

pub(crate) struct LeastSquares {
    pub solution: DMatrix<f64>,
    pub rank: usize,
    /// Ratio of largest to smallest singular value of the design (infinite
    /// when the smallest one is exactly zero).
    pub condition: f64,
}

/// Minimum-norm solution of `design * X ≈ rhs` through a thin SVD, with
/// singular values under the relative threshold discarded.
pub(crate) fn lstsq(design: &DMatrix<f64>, rhs: &DMatrix<f64>) -> LeastSquares {
    let cols = design.ncols();
    let svd = design.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let s = &svd.singular_values;

    let s_max = s.iter().cloned().fold(0.0_f64, f64::max);
    let s_min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let threshold = RANK_RTOL * s_max;

    let ut_b = u.transpose() * rhs;
    let mut scaled = DMatrix::zeros(s.len(), rhs.ncols());
    let mut rank = 0;
    for (i, &si) in s.iter().enumerate() {
        if si > threshold && si > 0.0 {
            rank += 1;
            for j in 0..rhs.ncols() {
                scaled[(i, j)] = ut_b[(i, j)] / si;
            }
        }
    }
    let solution = v_t.transpose() * scaled;
    debug_assert_eq!(solution.nrows(), cols);

    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    LeastSquares {
        solution,
        rank,
        condition,
    }
}
