use crate::error::{LaatError, Result};

/// Label used for background points in every generated cloud.
pub const NOISE_LABEL: u32 = 0;

/// A flat, row-major set of points in `dim` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(LaatError::invalid("point dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(LaatError::invalid(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(LaatError::invalid(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Copies the points with the given ids, in order.
    pub fn select(&self, ids: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// A named per-point real channel such as density or temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<f64>,
}

/// Points plus optional attribute channels and ground-truth labels.
///
/// Labels follow one convention across the crate: [`NOISE_LABEL`] marks
/// background, any other value names the structure a point was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: PointSet,
    attributes: Vec<Attribute>,
    labels: Option<Vec<u32>>,
}

impl PointCloud {
    pub fn new(points: PointSet) -> Result<Self> {
        Self::with_parts(points, Vec::new(), None)
    }

    pub fn with_parts(
        points: PointSet,
        attributes: Vec<Attribute>,
        labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(LaatError::InvalidCloud("cloud has no points".into()));
        }
        if points.dim() < 2 {
            return Err(LaatError::InvalidCloud(format!(
                "points must have at least 2 dimensions, got {}",
                points.dim()
            )));
        }
        if let Some(i) = points.coords().iter().position(|c| !c.is_finite()) {
            return Err(LaatError::InvalidCloud(format!(
                "non-finite coordinate in point {}",
                i / points.dim()
            )));
        }
        for attr in &attributes {
            if attr.values.len() != n {
                return Err(LaatError::LengthMismatch {
                    what: "attribute channel",
                    got: attr.values.len(),
                    expected: n,
                });
            }
            if attr.values.iter().any(|v| !v.is_finite()) {
                return Err(LaatError::InvalidCloud(format!(
                    "attribute `{}` has non-finite entries",
                    attr.name
                )));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(LaatError::LengthMismatch {
                    what: "label column",
                    got: labels.len(),
                    expected: n,
                });
            }
        }
        Ok(Self {
            points,
            attributes,
            labels,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.point(i)
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, name: &str) -> Option<&[f64]> {
        self.attributes
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.values.as_slice())
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// Ids of labeled points whose label is not [`NOISE_LABEL`].
    pub fn manifold_ids(&self) -> Option<Vec<usize>> {
        self.labels.as_ref().map(|labels| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l != NOISE_LABEL)
                .map(|(i, _)| i)
                .collect()
        })
    }

    /// A new cloud holding only the given points, with attributes and labels carried along.
    pub fn subset(&self, ids: &[usize]) -> Result<PointCloud> {
        let attributes = self
            .attributes
            .iter()
            .map(|a| Attribute {
                name: a.name.clone(),
                values: ids.iter().map(|&i| a.values[i]).collect(),
            })
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| ids.iter().map(|&i| l[i]).collect());
        PointCloud::with_parts(self.points.select(ids), attributes, labels)
    }

    /// Axis-aligned bounding box as (min, max) per dimension.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in self.points.iter() {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}
