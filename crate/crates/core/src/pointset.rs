//! Point clouds, the two region-of-interest filters and CSV I/O.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::Frame;

/// `n` points in `R^D`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    dim: usize,
}

/// A sample expressed in a [`Frame`]: tangent coordinates `x` and normal
/// coordinates `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPair {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl PointCloud {
    /// Wraps row-major coordinates. Requires `n ≥ 1`, `D ≥ 2` and finite values.
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidConfig(format!(
                "ambient dimension must be at least 2, got {dim}"
            )));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidConfig(format!(
                "expected a nonzero multiple of {dim} coordinates, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        Ok(Self { data, dim })
    }

    pub fn from_points(points: &[DVector<f64>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            data.extend_from_slice(p.as_slice());
        }
        Self::new(data, dim)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Ambient dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Applies `f` to every point.
    pub fn map_points<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(DVector<f64>) -> DVector<f64>,
    {
        let pts: Vec<DVector<f64>> = (0..self.len()).map(|i| f(self.point(i))).collect();
        Self::from_points(&pts)
    }

    /// Points with the given indices as an `N × D` matrix.
    pub fn gather(&self, indices: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(indices.len(), self.dim, |r, c| self.data[indices[r] * self.dim + c])
    }

    /// Reads a cloud from CSV text: one point per row, `#` comment lines
    /// ignored, optional `x0,...,x{D-1}` header.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let mut dim = None;
        let mut data = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if k == 0 && is_header(&record) {
                dim = Some(record.len());
                continue;
            }
            let expected = *dim.get_or_insert(record.len());
            if record.len() != expected {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {expected} columns, found {}", record.len()),
                });
            }
            for field in record.iter() {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("cannot parse {field:?} as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("non-finite value {field:?}"),
                    });
                }
                data.push(v);
            }
        }
        let dim = dim.ok_or(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        })?;
        if data.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no data rows".into(),
            });
        }
        Self::new(data, dim)
    }

    /// Writes `# comment` lines, the `x0,...` header and one row per point.
    pub fn write_csv<W: Write>(&self, mut writer: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(writer, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record((0..self.dim).map(|j| format!("x{j}")))?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn is_header(record: &csv::StringRecord) -> bool {
    record
        .iter()
        .enumerate()
        .all(|(j, f)| f == format!("x{j}"))
}

/// Indices of points strictly closer than `radius` to `center`, ascending.
pub fn roi(cloud: &PointCloud, center: &DVector<f64>, radius: f64) -> Vec<usize> {
    assert_eq!(center.len(), cloud.dim(), "query dimension mismatch");
    let c = center.as_slice();
    cloud
        .rows()
        .enumerate()
        .filter(|(_, row)| {
            let d2: f64 = row.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() < radius
        })
        .map(|(i, _)| i)
        .collect()
}

/// Coordinates of the selected points in `frame`.
pub fn local_coords(cloud: &PointCloud, indices: &[usize], frame: &Frame) -> Vec<LocalPair> {
    if indices.is_empty() {
        return Vec::new();
    }
    let mut centered = cloud.gather(indices);
    for mut row in centered.row_iter_mut() {
        row -= frame.origin().transpose();
    }
    let xs = &centered * frame.tangent();
    let ys = &centered * frame.normal();
    (0..indices.len())
        .map(|i| LocalPair {
            x: xs.row(i).transpose(),
            y: ys.row(i).transpose(),
        })
        .collect()
}

/// Keeps the pairs whose tangent coordinates satisfy `‖x‖ < eps`.
pub fn bandwidth_filter(pairs: &[LocalPair], eps: f64) -> Vec<LocalPair> {
    pairs.iter().filter(|p| p.x.norm() < eps).cloned().collect()
}
