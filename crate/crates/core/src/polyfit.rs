//! Vector-valued local polynomial regression `R^d → R^(D−d)`.
//!
//! Monomials are ordered graded-lexicographically: the constant first, then
//! `x_1, …, x_d`, then all degree-two products (`x_1², x_1x_2, …, x_d²`),
//! and so on. Coefficient row `j` of a [`PolyModel`] belongs to monomial `j`.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{orthonormalize, Frame};
use crate::linalg::lstsq;
use crate::pointset::LocalPair;

/// Design matrices with a condition number above this are flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Polynomial map of total degree `degree` from `R^d` to `R^codim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyModel {
    d: usize,
    codim: usize,
    degree: usize,
    coeffs: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    pub samples: usize,
    pub rank: usize,
    pub condition: f64,
    pub ill_conditioned: bool,
}

/// A fitted model together with how well-posed the fit was.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub model: PolyModel,
    pub diagnostics: FitDiagnostics,
}

/// `C(d + degree, d)`.
pub fn monomial_count(d: usize, degree: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        acc = acc * (degree as u128 + i) / i;
    }
    acc as usize
}

/// Exponent tuples in graded-lexicographic order.
pub fn exponents(d: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(d: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=total).rev() {
            prefix.push(e);
            rec(d, total - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(monomial_count(d, degree));
    for t in 0..=degree as u32 {
        rec(d, t, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// Values of all monomials of total degree `≤ degree` at `x`.
pub fn monomials(d: usize, degree: usize, x: &DVector<f64>) -> DVector<f64> {
    assert_eq!(x.len(), d, "monomial input has wrong dimension");
    let exps = exponents(d, degree);
    DVector::from_iterator(
        exps.len(),
        exps.iter().map(|e| {
            e.iter()
                .zip(x.iter())
                .map(|(&p, &xi)| xi.powi(p as i32))
                .product::<f64>()
        }),
    )
}

fn design_matrix(pairs: &[LocalPair], d: usize, degree: usize) -> DMatrix<f64> {
    let m = monomial_count(d, degree);
    let mut x = DMatrix::zeros(pairs.len(), m);
    for (i, p) in pairs.iter().enumerate() {
        x.row_mut(i).copy_from(&monomials(d, degree, &p.x).transpose());
    }
    x
}

impl PolyModel {
    pub fn new(d: usize, codim: usize, degree: usize, coeffs: DMatrix<f64>) -> Result<Self> {
        let m = monomial_count(d, degree);
        if coeffs.shape() != (m, codim) {
            return Err(Error::DimensionMismatch {
                expected: m * codim,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("non-finite polynomial coefficient".into()));
        }
        Ok(Self {
            d,
            codim,
            degree,
            coeffs,
        })
    }

    pub fn zero(d: usize, codim: usize, degree: usize) -> Self {
        Self {
            d,
            codim,
            degree,
            coeffs: DMatrix::zeros(monomial_count(d, degree), codim),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        self.coeffs.tr_mul(&monomials(self.d, self.degree, x))
    }

    pub fn value_at_zero(&self) -> DVector<f64> {
        self.coeffs.row(0).transpose()
    }

    /// Jacobian at the origin, `codim × d`; column `j` is the coefficient
    /// row of the monomial `x_j`.
    pub fn differential_at_zero(&self) -> DMatrix<f64> {
        if self.degree == 0 {
            return DMatrix::zeros(self.codim, self.d);
        }
        self.coeffs.rows(1, self.d).transpose()
    }

    /// Jacobian at an arbitrary point.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let exps = exponents(self.d, self.degree);
        let mut grad = DMatrix::zeros(exps.len(), self.d);
        for (row, e) in exps.iter().enumerate() {
            for j in 0..self.d {
                if e[j] == 0 {
                    continue;
                }
                let mut term = e[j] as f64;
                for (k, &p) in e.iter().enumerate() {
                    let p = if k == j { p - 1 } else { p };
                    term *= x[k].powi(p as i32);
                }
                grad[(row, j)] = term;
            }
        }
        self.coeffs.tr_mul(&grad)
    }

    /// Writes `d,codim,degree`, their values, then one coefficient row per
    /// monomial in graded-lex order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "d,codim,degree")?;
        writeln!(w, "{},{},{}", self.d, self.codim, self.degree)?;
        for row in self.coeffs.row_iter() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let parse_err = |line: usize, message: String| Error::Parse {
            line: line as u64 + 1,
            message,
        };
        let (_, head) = lines.next().ok_or_else(|| parse_err(0, "empty input".into()))?;
        if head?.trim() != "d,codim,degree" {
            return Err(parse_err(0, "expected header d,codim,degree".into()));
        }
        let (i, dims) = lines.next().ok_or_else(|| parse_err(1, "missing sizes".into()))?;
        let dims: Vec<usize> = dims?
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(i, e.to_string()))?;
        let [d, codim, degree] = dims[..] else {
            return Err(parse_err(i, "expected three sizes".into()));
        };
        let m = monomial_count(d, degree);
        let mut coeffs = DMatrix::zeros(m, codim);
        for row in 0..m {
            let (i, line) = lines
                .next()
                .ok_or_else(|| parse_err(row + 2, "missing coefficient row".into()))?;
            let vals: Vec<f64> = line?
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(i, e.to_string()))?;
            if vals.len() != codim {
                return Err(parse_err(i, format!("expected {codim} coefficients")));
            }
            for (j, v) in vals.into_iter().enumerate() {
                coeffs[(row, j)] = v;
            }
        }
        Self::new(d, codim, degree, coeffs)
    }
}

/// Least-squares polynomial of total degree `degree` through `(x_i, y_i)`.
///
/// Minimum-norm solution when the design is rank deficient; a condition
/// number above [`ILL_CONDITIONED`] is reported in the diagnostics.
pub fn fit_ls(pairs: &[LocalPair], degree: usize) -> Result<PolyFit> {
    let first = pairs.first().ok_or(Error::InsufficientSamples {
        needed: 1,
        found: 0,
    })?;
    let (d, codim) = (first.x.len(), first.y.len());
    let m = monomial_count(d, degree);
    if pairs.len() < m {
        return Err(Error::InsufficientSamples {
            needed: m,
            found: pairs.len(),
        });
    }
    let design = design_matrix(pairs, d, degree);
    let mut rhs = DMatrix::zeros(pairs.len(), codim);
    for (i, p) in pairs.iter().enumerate() {
        rhs.row_mut(i).copy_from(&p.y.transpose());
    }
    let ls = lstsq(&design, &rhs);
    Ok(PolyFit {
        model: PolyModel::new(d, codim, degree, ls.solution)?,
        diagnostics: FitDiagnostics {
            samples: pairs.len(),
            rank: ls.rank,
            condition: ls.condition,
            ill_conditioned: ls.condition > ILL_CONDITIONED,
        },
    })
}

/// Shuffles `0..n` with `seed` and cuts it into `blocks` runs whose sizes
/// differ by at most one (the first `n % blocks` runs get the extra item).
pub fn block_partition(n: usize, blocks: usize, seed: u64) -> Vec<Vec<usize>> {
    assert!(blocks >= 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / blocks;
    let extra = n % blocks;
    let mut out = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        out.push(idx[start..start + len].to_vec());
        start += len;
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median-of-means variant of [`fit_ls`]: independent fits on `blocks`
/// random blocks, combined by a coordinate-wise median of every
/// coefficient. With one block this is exactly `fit_ls` (no shuffling).
pub fn fit_mom(pairs: &[LocalPair], degree: usize, blocks: usize, seed: u64) -> Result<PolyFit> {
    if blocks == 0 {
        return Err(Error::InvalidConfig("block count must be at least 1".into()));
    }
    if blocks == 1 {
        return fit_ls(pairs, degree);
    }
    let d = pairs.first().map(|p| p.x.len()).unwrap_or(0);
    let needed = blocks * monomial_count(d, degree);
    if pairs.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            found: pairs.len(),
        });
    }
    let parts = block_partition(pairs.len(), blocks, seed);
    let fits: Vec<PolyFit> = parts
        .par_iter()
        .map(|idx| {
            let block: Vec<LocalPair> = idx.iter().map(|&i| pairs[i].clone()).collect();
            fit_ls(&block, degree)
        })
        .collect::<Result<_>>()?;

    let proto = &fits[0].model;
    let mut coeffs = DMatrix::zeros(proto.coeffs.nrows(), proto.coeffs.ncols());
    let mut column = vec![0.0; fits.len()];
    for r in 0..coeffs.nrows() {
        for c in 0..coeffs.ncols() {
            for (slot, f) in column.iter_mut().zip(&fits) {
                *slot = f.model.coeffs[(r, c)];
            }
            coeffs[(r, c)] = median(&mut column);
        }
    }
    let worst = fits
        .iter()
        .map(|f| f.diagnostics.condition)
        .fold(0.0_f64, f64::max);
    Ok(PolyFit {
        model: PolyModel::new(proto.d, proto.codim, degree, coeffs)?,
        diagnostics: FitDiagnostics {
            samples: pairs.len(),
            rank: fits.iter().map(|f| f.diagnostics.rank).min().unwrap_or(0),
            condition: worst,
            ill_conditioned: fits.iter().any(|f| f.diagnostics.ill_conditioned),
        },
    })
}

/// Tangent space of the graph `x ↦ (x, π(x))` at zero, lifted to `R^D`:
/// the span of `U e_j + V Dπ e_j`.
pub fn graph_tangent(frame: &Frame, dpi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = frame.dim();
    let codim = frame.ambient_dim() - d;
    if dpi.shape() != (codim, d) {
        return Err(Error::DimensionMismatch {
            expected: codim * d,
            found: dpi.len(),
        });
    }
    let lifted = frame.tangent() + frame.normal() * dpi;
    orthonormalize(&lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{angle_max, orthonormality_defect, random_orthonormal};
    use nalgebra::dvector;
    use proptest::prelude::*;
    use rand::Rng;

    fn pairs_from<F: Fn(&DVector<f64>) -> DVector<f64>>(
        n: usize,
        d: usize,
        seed: u64,
        f: F,
    ) -> Vec<LocalPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x = DVector::from_fn(d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
                let y = f(&x);
                LocalPair { x, y }
            })
            .collect()
    }

    #[test]
    fn monomial_values() {
        assert_eq!(monomials(3, 2, &DVector::zeros(3)).as_slice()[0], 1.0);
        assert!(monomials(3, 2, &DVector::zeros(3)).as_slice()[1..]
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(monomials(1, 2, &dvector![3.0]).as_slice(), &[1.0, 3.0, 9.0]);
        assert_eq!(
            monomials(2, 2, &dvector![2.0, 5.0]).as_slice(),
            &[1.0, 2.0, 5.0, 4.0, 10.0, 25.0]
        );
        assert_eq!(monomial_count(3, 3), 20);
        assert_eq!(exponents(3, 3).len(), 20);
    }

    #[test]
    fn fits_constant_exactly() {
        let pairs = pairs_from(40, 2, 1, |_| dvector![1.5, -2.0]);
        let fit = fit_ls(&pairs, 2).unwrap();
        assert!((fit.model.value_at_zero() - dvector![1.5, -2.0]).amax() < 1e-10);
        assert!(fit.model.coeffs().rows(1, 5).amax() < 1e-10);
    }

    #[test]
    fn reproduces_polynomials() {
        for d in 1..=3 {
            for k in 2..=4 {
                let degree = k - 1;
                let m = monomial_count(d, degree);
                let mut rng = ChaCha8Rng::seed_from_u64((d * 10 + k) as u64);
                let truth = PolyModel::new(
                    d,
                    2,
                    degree,
                    DMatrix::from_fn(m, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0),
                )
                .unwrap();
                let pairs = pairs_from(3 * m, d, 99, |x| truth.eval(x));
                let fit = fit_ls(&pairs, degree).unwrap();
                assert!(
                    (fit.model.coeffs() - truth.coeffs()).amax() <= 1e-8,
                    "d={d} k={k}"
                );
                // residuals are orthogonal to the design columns
                let design = design_matrix(&pairs, d, degree);
                let mut resid = DMatrix::zeros(pairs.len(), 2);
                for (i, p) in pairs.iter().enumerate() {
                    resid.row_mut(i).copy_from(&(&p.y - fit.model.eval(&p.x)).transpose());
                }
                assert!(design.tr_mul(&resid).amax() <= 1e-8);
            }
        }
    }

    #[test]
    fn matches_normal_equations() {
        let pairs = pairs_from(200, 2, 5, |x| {
            dvector![
                0.3 + x[0] - 2.0 * x[1] * x[1] + 0.1 * x[0].sin(),
                x[0] * x[1] - 0.7
            ]
        });
        let fit = fit_ls(&pairs, 2).unwrap();
        let x = design_matrix(&pairs, 2, 2);
        let mut y = DMatrix::zeros(200, 2);
        for (i, p) in pairs.iter().enumerate() {
            y.row_mut(i).copy_from(&p.y.transpose());
        }
        let xtx = x.tr_mul(&x);
        let beta = xtx.cholesky().unwrap().solve(&x.tr_mul(&y));
        assert!((fit.model.value_at_zero() - beta.row(0).transpose()).amax() < 1e-9);
    }

    #[test]
    fn insufficient_samples() {
        let pairs = pairs_from(5, 2, 3, |_| dvector![0.0]);
        assert!(matches!(
            fit_ls(&pairs, 2),
            Err(Error::InsufficientSamples { needed: 6, found: 5 })
        ));
        let pairs = pairs_from(10, 2, 3, |_| dvector![0.0]);
        assert!(matches!(
            fit_mom(&pairs, 1, 4, 0),
            Err(Error::InsufficientSamples { needed: 12, found: 10 })
        ));
    }

    #[test]
    fn ill_conditioned_is_flagged() {
        // all x on a line: the quadratic design loses rank
        let pairs: Vec<LocalPair> = (0..20)
            .map(|i| {
                let t = i as f64 / 10.0;
                LocalPair {
                    x: dvector![t, t],
                    y: dvector![t],
                }
            })
            .collect();
        let fit = fit_ls(&pairs, 1).unwrap();
        assert!(fit.diagnostics.ill_conditioned);
        assert_eq!(fit.diagnostics.rank, 2);
    }

    #[test]
    fn single_block_is_plain_ls() {
        let pairs = pairs_from(60, 2, 8, |x| dvector![x[0] * x[0] + 0.2]);
        let a = fit_ls(&pairs, 2).unwrap();
        let b = fit_mom(&pairs, 2, 1, 1234).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_blocks_give_common_fit() {
        let base = pairs_from(30, 1, 4, |x| dvector![1.0 + 2.0 * x[0] + 0.01 * x[0].cos()]);
        let mut pairs = Vec::new();
        for _ in 0..3 {
            pairs.extend(base.iter().cloned());
        }
        // stitch so every block contains the same multiset: pick the
        // partition and rebuild the input so block b holds `base`
        let parts = block_partition(90, 3, 7);
        let mut arranged = vec![base[0].clone(); 90];
        for part in &parts {
            for (slot, &i) in part.iter().enumerate() {
                arranged[i] = base[slot].clone();
            }
        }
        let mom = fit_mom(&arranged, 1, 3, 7).unwrap();
        let common = fit_ls(&base, 1).unwrap();
        assert!((mom.model.coeffs() - common.model.coeffs()).amax() < 1e-12);
    }

    #[test]
    fn median_resists_a_corrupted_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let truth = 0.5;
        let mut pairs: Vec<LocalPair> = (0..300)
            .map(|_| {
                let x = rng.random::<f64>() * 2.0 - 1.0;
                let noise = (rng.random::<f64>() - 0.5) * 0.2;
                LocalPair {
                    x: dvector![x],
                    y: dvector![truth + 0.3 * x + noise],
                }
            })
            .collect();
        let seed = 17;
        let parts = block_partition(pairs.len(), 3, seed);
        let clean_block_err = parts
            .iter()
            .map(|idx| {
                let block: Vec<LocalPair> = idx.iter().map(|&i| pairs[i].clone()).collect();
                (fit_ls(&block, 1).unwrap().model.value_at_zero()[0] - truth).abs()
            })
            .fold(0.0, f64::max);

        pairs[parts[1][0]].y[0] = 1e6;
        let mom = fit_mom(&pairs, 1, 3, seed).unwrap();
        let ls = fit_ls(&pairs, 1).unwrap();
        let mom_err = (mom.model.value_at_zero()[0] - truth).abs();
        let ls_err = (ls.model.value_at_zero()[0] - truth).abs();
        assert!(mom_err <= 2.0 * clean_block_err, "{mom_err} vs {clean_block_err}");
        assert!(ls_err > 1e3);
    }

    #[test]
    fn value_and_differential() {
        let pairs = pairs_from(10, 1, 2, |x| dvector![2.0 + 3.0 * x[0]]);
        let m = fit_ls(&pairs, 1).unwrap().model;
        assert!((m.value_at_zero()[0] - 2.0).abs() < 1e-12);
        assert!((m.differential_at_zero()[(0, 0)] - 3.0).abs() < 1e-12);

        let z = PolyModel::zero(2, 3, 2);
        assert_eq!(z.value_at_zero(), DVector::zeros(3));
        assert_eq!(z.differential_at_zero(), DMatrix::zeros(3, 2));
    }

    #[test]
    fn eval_by_hand() {
        let m = PolyModel::new(1, 1, 2, DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(m.eval(&dvector![2.0])[0], 17.0);
        assert_eq!(m.eval(&dvector![0.0]), m.value_at_zero());
    }

    #[test]
    fn eval_matches_term_by_term_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let m = PolyModel::new(
            2,
            1,
            3,
            DMatrix::from_fn(10, 1, |_, _| rng.random::<f64>() - 0.5),
        )
        .unwrap();
        let (a, b) = (0.37, -1.2);
        let c = m.coeffs();
        let by_hand = c[0]
            + c[1] * a
            + c[2] * b
            + c[3] * a * a
            + c[4] * a * b
            + c[5] * b * b
            + c[6] * a * a * a
            + c[7] * a * a * b
            + c[8] * a * b * b
            + c[9] * b * b * b;
        let v = m.eval(&dvector![a, b])[0];
        assert!((v - by_hand).abs() <= 1e-12 * by_hand.abs().max(1.0));
    }

    #[test]
    fn differential_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let m = PolyModel::new(
                3,
                2,
                3,
                DMatrix::from_fn(20, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0),
            )
            .unwrap();
            let jac = m.differential_at_zero();
            let h = 1e-6;
            for j in 0..3 {
                let mut e = DVector::zeros(3);
                e[j] = h;
                let fd = (m.eval(&e) - m.eval(&(-&e))) / (2.0 * h);
                for i in 0..2 {
                    let exact = jac[(i, j)];
                    assert!((fd[i] - exact).abs() <= 1e-4 * exact.abs().max(1e-3));
                }
            }
            assert_eq!(m.jacobian(&DVector::zeros(3)), jac);
        }
    }

    #[test]
    fn graph_tangent_cases() {
        let frame = Frame::standard(4, 2).unwrap();
        let t = graph_tangent(&frame, &DMatrix::zeros(2, 2)).unwrap();
        assert!(angle_max(&t, frame.tangent()).unwrap() <= 1e-12);

        let theta = 0.4_f64;
        let plane = Frame::standard(2, 1).unwrap();
        let t = graph_tangent(&plane, &DMatrix::from_element(1, 1, theta.tan())).unwrap();
        assert!((t[(0, 0)] - theta.cos()).abs() < 1e-12);
        assert!((t[(1, 0)] - theta.sin()).abs() < 1e-12);
    }

    #[test]
    fn graph_tangent_matches_lift_and_qr() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..10 {
            let basis = random_orthonormal(&mut rng, 6, 2);
            let frame = Frame::new(DVector::zeros(6), basis).unwrap();
            let dpi = DMatrix::from_fn(4, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let t = graph_tangent(&frame, &dpi).unwrap();
            assert!(orthonormality_defect(&t) < 1e-12);

            // independent route: stack (I; Dπ) in local coordinates, QR, then
            // rotate into the ambient space with [U V]
            let mut stacked = DMatrix::zeros(6, 2);
            stacked.view_mut((0, 0), (2, 2)).copy_from(&DMatrix::identity(2, 2));
            stacked.view_mut((2, 0), (4, 2)).copy_from(&dpi);
            let local_q = stacked.qr().q();
            let mut uv = DMatrix::zeros(6, 6);
            uv.view_mut((0, 0), (6, 2)).copy_from(frame.tangent());
            uv.view_mut((0, 2), (6, 4)).copy_from(frame.normal());
            let oracle = uv * local_q;
            assert!(angle_max(&t, &oracle).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn model_csv_round_trip() {
        let m = PolyModel::new(
            2,
            2,
            2,
            DMatrix::from_fn(6, 2, |r, c| r as f64 * 0.5 - c as f64 / 3.0),
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("d,codim,degree\n2,2,2\n"));
        assert_eq!(PolyModel::read_csv(buf.as_slice()).unwrap(), m);
        assert!(PolyModel::read_csv("d,codim,degree\n1,1,1\n0.5\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn partition_covers_everything(n in 0usize..200, blocks in 1usize..9, seed: u64) {
            let parts = block_partition(n, blocks, seed);
            prop_assert_eq!(parts.len(), blocks);
            let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
