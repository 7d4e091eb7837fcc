use std::collections::VecDeque;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{SomMap, DEFAULT_THRESHOLD_PERCENTILE};
use crate::error::{Error, Result};

pub const DEFAULT_CONTOUR_LEVELS: usize = 10;

fn neighbours(rows: usize, cols: usize, r: usize, c: usize) -> impl Iterator<Item = (usize, usize)> {
    let up = (r > 0).then(|| (r - 1, c));
    let down = (r + 1 < rows).then_some((r + 1, c));
    let left = (c > 0).then(|| (r, c - 1));
    let right = (c + 1 < cols).then_some((r, c + 1));
    [up, down, left, right].into_iter().flatten()
}

/// Mean distance from each node's weight to its 4-neighbours' weights.
#[derive(Debug, Clone, PartialEq)]
pub struct UMatrix {
    heights: Array2<f64>,
}

impl UMatrix {
    pub fn from_map(map: &SomMap) -> Self {
        let (rows, cols) = (map.rows(), map.cols());
        let heights = Array2::from_shape_fn((rows, cols), |(r, c)| {
            let w = map.weight(r * cols + c);
            let (sum, n) = neighbours(rows, cols, r, c).fold((0.0, 0), |(sum, n), (nr, nc)| {
                (sum + map.metric().distance(w, map.weight(nr * cols + nc)), n + 1)
            });
            if n == 0 {
                0.0
            } else {
                sum / n as f64
            }
        });
        Self { heights }
    }

    pub fn from_heights(heights: Array2<f64>) -> Result<Self> {
        if heights.is_empty() || heights.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::argument("U-Matrix heights must be finite and non-negative"));
        }
        Ok(Self { heights })
    }

    pub fn heights(&self) -> &Array2<f64> {
        &self.heights
    }

    pub fn rows(&self) -> usize {
        self.heights.nrows()
    }

    pub fn cols(&self) -> usize {
        self.heights.ncols()
    }

    pub fn min(&self) -> f64 {
        self.heights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Height percentile, `q` in [0, 100], linear between order statistics.
    pub fn percentile(&self, q: f64) -> Result<f64> {
        percentile(self.heights.iter().copied(), q)
    }

    pub fn default_threshold(&self) -> f64 {
        self.percentile(DEFAULT_THRESHOLD_PERCENTILE).expect("non-empty heights")
    }
}

pub fn percentile(values: impl IntoIterator<Item = f64>, q: f64) -> Result<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() || !(0.0..=100.0).contains(&q) {
        return Err(Error::argument(format!("percentile {q} of {} values", v.len())));
    }
    v.sort_by(f64::total_cmp);
    let pos = q / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Negative U-Matrix gradient per node, plus height levels for contouring.
///
/// `dx` runs along columns and `dy` along rows.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractionField {
    pub dx: Array2<f64>,
    pub dy: Array2<f64>,
    pub levels: Vec<f64>,
}

fn derivative(at: impl Fn(usize) -> f64, i: usize, n: usize) -> f64 {
    match n {
        1 => 0.0,
        _ if i == 0 => at(1) - at(0),
        _ if i == n - 1 => at(n - 1) - at(n - 2),
        _ => (at(i + 1) - at(i - 1)) / 2.0,
    }
}

pub fn attraction_field(um: &UMatrix, n_levels: usize) -> AttractionField {
    let h = um.heights();
    let (rows, cols) = h.dim();
    let dx = Array2::from_shape_fn((rows, cols), |(r, c)| -derivative(|k| h[[r, k]], c, cols));
    let dy = Array2::from_shape_fn((rows, cols), |(r, c)| -derivative(|k| h[[k, c]], r, rows));
    let levels = (1..=n_levels)
        .map(|k| um.percentile(100.0 * k as f64 / (n_levels + 1) as f64).expect("valid quantile"))
        .collect();
    AttractionField { dx, dy, levels }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeCluster {
    Cluster(usize),
    Border,
}

impl std::fmt::Display for NodeCluster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeCluster::Cluster(id) => write!(f, "{id}"),
            NodeCluster::Border => f.write_str("border"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clusters {
    pub rows: usize,
    pub cols: usize,
    pub threshold: f64,
    /// Row-major.
    pub assignment: Vec<NodeCluster>,
    pub count: usize,
}

impl Clusters {
    pub fn of(&self, node: usize) -> NodeCluster {
        self.assignment[node]
    }
}

/// 4-connected components of nodes strictly below `threshold`. Ids follow row-major discovery order.
pub fn clusters(um: &UMatrix, threshold: f64) -> Result<Clusters> {
    if !threshold.is_finite() {
        return Err(Error::argument(format!("threshold {threshold}")));
    }
    let h = um.heights();
    let (rows, cols) = h.dim();
    let mut assignment = vec![NodeCluster::Border; rows * cols];
    let mut seen = vec![false; rows * cols];
    let mut count = 0;
    for start in 0..rows * cols {
        let (r, c) = (start / cols, start % cols);
        if seen[start] || h[[r, c]] >= threshold {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([(r, c)]);
        while let Some((r, c)) = queue.pop_front() {
            assignment[r * cols + c] = NodeCluster::Cluster(count);
            for (nr, nc) in neighbours(rows, cols, r, c) {
                let k = nr * cols + nc;
                if !seen[k] && h[[nr, nc]] < threshold {
                    seen[k] = true;
                    queue.push_back((nr, nc));
                }
            }
        }
        count += 1;
    }
    Ok(Clusters {
        rows,
        cols,
        threshold,
        assignment,
        count,
    })
}
