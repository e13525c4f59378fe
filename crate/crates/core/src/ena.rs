//! Epistemic network analysis: moving-window co-occurrence accumulation,
//! sphere normalisation, means rotation and group networks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{mann_whitney, median, MannWhitneyResult};
use crate::timeline::TimelineMatrix;
use crate::types::Level;

pub const DEFAULT_WINDOW: usize = 6;

/// Code pairs `(i, j)` with `i < j` in canonical order.
pub fn code_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionVector {
    pub unit_id: String,
    pub values: Vec<f64>,
    pub normalized: bool,
}

/// Sums, over every second, the binary connections between the codes active in
/// that second and the codes active anywhere in the trailing window (which
/// includes the current second).
pub fn accumulate_connections(timeline: &TimelineMatrix, window: usize) -> Result<ConnectionVector> {
    if window == 0 {
        return Err(Error::invalid("window must be at least 1"));
    }
    if timeline.rows() == 0 {
        return Err(Error::invalid(format!("timeline '{}' is empty", timeline.unit_id())));
    }
    let k = timeline.codes().len();
    let pairs = code_pairs(k);
    let mut values = vec![0.0; pairs.len()];
    let mut stanza = vec![false; k];
    for t in 0..timeline.rows() {
        stanza.iter_mut().for_each(|s| *s = false);
        for r in t.saturating_sub(window - 1)..=t {
            for (s, v) in stanza.iter_mut().zip(timeline.row(r)) {
                *s |= *v == 1;
            }
        }
        let now = timeline.row(t);
        for (v, &(i, j)) in values.iter_mut().zip(&pairs) {
            if (now[i] == 1 && stanza[j]) || (now[j] == 1 && stanza[i]) {
                *v += 1.0;
            }
        }
    }
    Ok(ConnectionVector {
        unit_id: timeline.unit_id().to_string(),
        values,
        normalized: false,
    })
}

/// Scales to unit length. The flag is set when the vector is all zero and
/// therefore left unchanged.
pub fn sphere_normalize(v: &ConnectionVector) -> (ConnectionVector, bool) {
    let norm = v.values.iter().map(|x| x * x).sum::<f64>().sqrt();
    let zero = norm == 0.0;
    let values = if zero {
        v.values.clone()
    } else {
        v.values.iter().map(|x| x / norm).collect()
    };
    (
        ConnectionVector {
            unit_id: v.unit_id.clone(),
            values,
            normalized: true,
        },
        zero,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnaPoint {
    pub unit_id: String,
    pub level: Level,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnaSpace {
    pub center: Vec<f64>,
    /// Axis 0 is the means-rotation direction; the rest are residual SVD axes.
    pub axes: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub points: Vec<EnaPoint>,
}

impl EnaSpace {
    pub fn scores(&self, dim: usize, level: Level) -> Vec<f64> {
        self.points.iter().filter(|p| p.level == level).map(|p| p.coords[dim]).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn group_mean(rows: &[&[f64]], dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    for r in rows {
        for (a, b) in m.iter_mut().zip(*r) {
            *a += b;
        }
    }
    m.iter_mut().for_each(|a| *a /= rows.len() as f64);
    m
}

/// Orthonormal basis of the complement of unit vector `u`, via the Householder
/// reflection that maps `u` onto the first coordinate axis.
fn complement_basis(u: &[f64]) -> DMatrix<f64> {
    let p = u.len();
    let mut w = DVector::from_column_slice(u);
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    w[0] += sign;
    let wn = w.norm_squared();
    let mut h = DMatrix::<f64>::identity(p, p);
    if wn > 0.0 {
        h -= (&w * w.transpose()) * (2.0 / wn);
    }
    // column 0 of h is -sign*u; the remaining columns span its complement
    h.columns(1, p - 1).into_owned()
}

/// Means rotation: axis 1 joins the two group means of the centred data,
/// residual axes are the leading principal directions orthogonal to it.
pub fn means_rotation(vectors: &[ConnectionVector], levels: &[Level], residual_dims: usize) -> Result<EnaSpace> {
    if vectors.len() != levels.len() {
        return Err(Error::Shape(format!("{} vectors but {} labels", vectors.len(), levels.len())));
    }
    if vectors.len() < 2 {
        return Err(Error::invalid("means rotation needs at least two units"));
    }
    let p = vectors[0].values.len();
    if vectors.iter().any(|v| v.values.len() != p) {
        return Err(Error::Shape("connection vectors differ in length".into()));
    }
    if residual_dims + 1 > p {
        return Err(Error::invalid(format!("{residual_dims} residual dimensions requested from a {p}-dimensional space")));
    }
    if !levels.contains(&Level::High) || !levels.contains(&Level::Low) {
        return Err(Error::invalid("both performance groups need at least one unit"));
    }
    let n = vectors.len();
    let all: Vec<&[f64]> = vectors.iter().map(|v| v.values.as_slice()).collect();
    let center = group_mean(&all, p);
    let centered: Vec<Vec<f64>> = all.iter().map(|r| r.iter().zip(&center).map(|(a, c)| a - c).collect()).collect();

    let pick = |lv: Level| -> Vec<&[f64]> {
        centered.iter().zip(levels).filter(|(_, l)| **l == lv).map(|(r, _)| r.as_slice()).collect()
    };
    let high = group_mean(&pick(Level::High), p);
    let low = group_mean(&pick(Level::Low), p);
    let diff: Vec<f64> = high.iter().zip(&low).map(|(h, l)| h - l).collect();
    let norm = dot(&diff, &diff).sqrt();
    if norm < 1e-12 {
        return Err(Error::degenerate("degenerate rotation: group means coincide"));
    }
    let axis1: Vec<f64> = diff.iter().map(|d| d / norm).collect();

    let mut axes = vec![axis1.clone()];
    let mut singular_values = Vec::new();
    if residual_dims > 0 {
        let q = complement_basis(&axis1);
        let x = DMatrix::from_fn(n, p, |i, j| centered[i][j]);
        let y = &x * &q;
        let gram = y.transpose() * &y;
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        for &k in order.iter().take(residual_dims) {
            let mut axis: Vec<f64> = (&q * eig.eigenvectors.column(k)).iter().copied().collect();
            // sign convention: largest-magnitude loading positive
            let lead = axis.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            if lead < 0.0 {
                axis.iter_mut().for_each(|v| *v = -*v);
            }
            axes.push(axis);
            singular_values.push(eig.eigenvalues[k].max(0.0).sqrt());
        }
    }

    let points = vectors
        .iter()
        .zip(levels)
        .zip(&centered)
        .map(|((v, &level), row)| EnaPoint {
            unit_id: v.unit_id.clone(),
            level,
            coords: axes.iter().map(|a| dot(row, a)).collect(),
        })
        .collect();
    Ok(EnaSpace {
        center,
        axes,
        singular_values,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    HighMean,
    LowMean,
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkGraph {
    pub kind: NetworkKind,
    pub nodes: Vec<String>,
    /// Fixed circular layout on the unit circle, first node at the top.
    pub positions: Vec<(f64, f64)>,
    pub edges: Vec<Edge>,
}

impl NetworkGraph {
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().find(|e| e.a == a && e.b == b).map(|e| e.weight)
    }
}

pub fn circular_layout(k: usize) -> Vec<(f64, f64)> {
    (0..k)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / k as f64;
            (theta.sin(), -theta.cos())
        })
        .collect()
}

fn graph(kind: NetworkKind, codes: &[String], weights: &[f64]) -> NetworkGraph {
    NetworkGraph {
        kind,
        nodes: codes.to_vec(),
        positions: circular_layout(codes.len()),
        edges: code_pairs(codes.len())
            .into_iter()
            .zip(weights)
            .map(|((a, b), &weight)| Edge { a, b, weight })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupNetworks {
    pub high: NetworkGraph,
    pub low: NetworkGraph,
    pub difference: NetworkGraph,
}

/// Mean normalised connection strength per group and their edgewise difference.
pub fn group_networks(vectors: &[ConnectionVector], levels: &[Level], codes: &[String]) -> Result<GroupNetworks> {
    if vectors.len() != levels.len() {
        return Err(Error::Shape(format!("{} vectors but {} labels", vectors.len(), levels.len())));
    }
    let m = code_pairs(codes.len()).len();
    if vectors.iter().any(|v| v.values.len() != m) {
        return Err(Error::Shape(format!("connection vectors must have {m} entries for {} codes", codes.len())));
    }
    let mean_for = |lv: Level| -> Result<Vec<f64>> {
        let rows: Vec<&[f64]> = vectors
            .iter()
            .zip(levels)
            .filter(|(_, l)| **l == lv)
            .map(|(v, _)| v.values.as_slice())
            .collect();
        if rows.is_empty() {
            return Err(Error::invalid(format!("group {lv:?} has no units")));
        }
        Ok(group_mean(&rows, m))
    };
    let high = mean_for(Level::High)?;
    let low = mean_for(Level::Low)?;
    let diff: Vec<f64> = high.iter().zip(&low).map(|(h, l)| h - l).collect();
    Ok(GroupNetworks {
        high: graph(NetworkKind::HighMean, codes, &high),
        low: graph(NetworkKind::LowMean, codes, &low),
        difference: graph(NetworkKind::Difference, codes, &diff),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionComparison {
    pub dim: usize,
    pub n_high: usize,
    pub n_low: usize,
    pub median_high: f64,
    pub median_low: f64,
    /// High-group scores as the first sample.
    pub test: MannWhitneyResult,
}

/// Mann-Whitney comparison of High against Low scores on dimension `dim` (0-based).
pub fn compare_projection(space: &EnaSpace, dim: usize) -> Result<ProjectionComparison> {
    if space.axes.len() <= dim {
        return Err(Error::invalid(format!("space has no dimension {dim}")));
    }
    let high = space.scores(dim, Level::High);
    let low = space.scores(dim, Level::Low);
    let test = mann_whitney(&high, &low)?;
    Ok(ProjectionComparison {
        dim,
        n_high: high.len(),
        n_low: low.len(),
        median_high: median(&high).unwrap_or(f64::NAN),
        median_low: median(&low).unwrap_or(f64::NAN),
        test,
    })
}
