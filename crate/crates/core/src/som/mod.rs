//! Kohonen self-organizing map on a rectangular grid.
//!
//! Each presentation of `x` moves every node toward it:
//!
//! ```text
//! w_i <- w_i + alpha(t) * h(i, i*, sigma(t)) * (x - w_i)
//! ```
//!
//! where `i*` is the best-matching unit and `h` the grid kernel.

mod umatrix;

pub use umatrix::{
    attraction_field, clusters, percentile, AttractionField, Clusters, NodeCluster, UMatrix, DEFAULT_CONTOUR_LEVELS,
};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ROWS: usize = 10;
pub const DEFAULT_COLS: usize = 10;
pub const DEFAULT_EPOCHS: usize = 200;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_SIGMA_END: f64 = 0.25;
/// Percentile of U-Matrix heights used as the cluster cut.
pub const DEFAULT_THRESHOLD_PERCENTILE: f64 = 60.0;
const MIN_NODES: usize = 2;
const RANDOM_SMALL_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Gaussian,
    /// 1 within grid distance sigma, 0 outside.
    Bubble,
}

impl Kernel {
    pub fn value(self, grid_dist_sq: f64, sigma: f64) -> f64 {
        match self {
            Kernel::Gaussian if sigma == 0.0 => f64::from(grid_dist_sq == 0.0),
            Kernel::Gaussian => (-grid_dist_sq / (2.0 * sigma * sigma)).exp(),
            Kernel::Bubble => f64::from(grid_dist_sq <= sigma * sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    RandomSmall,
    SampleInit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

/// Learning rate over epochs `t = 1..=T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSchedule {
    /// `initial * (1 - (t - 1) / T)`
    Linear { initial: f64 },
    Constant { value: f64 },
}

impl AlphaSchedule {
    pub fn at(&self, t: usize, epochs: usize) -> f64 {
        match *self {
            AlphaSchedule::Linear { initial } => initial * (1.0 - (t - 1) as f64 / epochs as f64),
            AlphaSchedule::Constant { value } => value,
        }
    }
}

/// Neighbourhood radius over epochs, in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaSchedule {
    /// Linear from `start` at t = 1 to `end` at t = T. A missing start means half the longer map side.
    Linear { start: Option<f64>, end: f64 },
    Constant { value: f64 },
}

impl SigmaSchedule {
    pub fn at(&self, t: usize, epochs: usize, rows: usize, cols: usize) -> f64 {
        match *self {
            SigmaSchedule::Linear { start, end } => {
                let start = start.unwrap_or(rows.max(cols) as f64 / 2.0).max(end);
                if epochs <= 1 {
                    return start;
                }
                start + (end - start) * (t - 1) as f64 / (epochs - 1) as f64
            }
            SigmaSchedule::Constant { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSchedule {
    pub epochs: usize,
    pub alpha: AlphaSchedule,
    pub sigma: SigmaSchedule,
    pub kernel: Kernel,
    pub rng_seed: u64,
    pub init: Init,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        Self {
            epochs: DEFAULT_EPOCHS,
            alpha: AlphaSchedule::Linear { initial: DEFAULT_ALPHA },
            sigma: SigmaSchedule::Linear {
                start: None,
                end: DEFAULT_SIGMA_END,
            },
            kernel: Kernel::Gaussian,
            rng_seed: 0,
            init: Init::RandomSmall,
        }
    }
}

impl TrainSchedule {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        let alpha = match self.alpha {
            AlphaSchedule::Linear { initial } => initial,
            AlphaSchedule::Constant { value } => value,
        };
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config(format!("learning rate {alpha} outside [0, 1]")));
        }
        let ok = match self.sigma {
            SigmaSchedule::Linear { start, end } => {
                end.is_finite() && end >= 0.0 && start.is_none_or(|s| s.is_finite() && s >= end)
            }
            SigmaSchedule::Constant { value } => value.is_finite() && value >= 0.0,
        };
        if !ok {
            return Err(Error::Config(format!("bad neighbourhood radius {:?}", self.sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomMap {
    rows: usize,
    cols: usize,
    dim: usize,
    metric: Metric,
    schedule: TrainSchedule,
    trained: bool,
    /// Row-major, `dim` values per node.
    weights: Vec<f64>,
}

fn check_dims<V: AsRef<[f64]>>(data: &[V], dim: usize) -> Result<()> {
    match data.iter().position(|x| x.as_ref().len() != dim) {
        Some(i) => Err(Error::argument(format!(
            "vector {i} has length {}, map expects {dim}",
            data[i].as_ref().len()
        ))),
        None => Ok(()),
    }
}

impl SomMap {
    /// Fresh map initialised per `schedule.init`. Samples set the RandomSmall range and feed SampleInit.
    pub fn init<V: AsRef<[f64]>>(
        rows: usize,
        cols: usize,
        dim: usize,
        schedule: TrainSchedule,
        samples: Option<&[V]>,
    ) -> Result<Self> {
        if rows * cols < MIN_NODES || dim == 0 {
            return Err(Error::argument(format!("map {rows}x{cols} of dimension {dim} is too small")));
        }
        schedule.validate()?;
        if let Some(s) = samples {
            check_dims(s, dim)?;
        }
        let n_nodes = rows * cols;
        let mut rng = ChaCha8Rng::seed_from_u64(schedule.rng_seed);
        let weights = match schedule.init {
            Init::RandomSmall => {
                let eps: Vec<f64> = match samples {
                    Some(s) if !s.is_empty() => (0..dim)
                        .map(|d| {
                            let (lo, hi) = s.iter().fold((f64::MAX, f64::MIN), |(lo, hi), x| {
                                (lo.min(x.as_ref()[d]), hi.max(x.as_ref()[d]))
                            });
                            RANDOM_SMALL_FRACTION * (hi - lo)
                        })
                        .collect(),
                    _ => vec![RANDOM_SMALL_FRACTION; dim],
                };
                (0..n_nodes * dim)
                    .map(|k| eps[k % dim] * rng.random_range(-1.0..=1.0))
                    .collect()
            }
            Init::SampleInit => {
                let s = samples
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::argument("sample initialisation needs samples"))?;
                let picks: Vec<usize> = if s.len() >= n_nodes {
                    rand::seq::index::sample(&mut rng, s.len(), n_nodes).into_vec()
                } else {
                    (0..n_nodes).map(|_| rng.random_range(0..s.len())).collect()
                };
                picks.iter().flat_map(|&i| s[i].as_ref().iter().copied()).collect()
            }
        };
        Ok(Self {
            rows,
            cols,
            dim,
            metric: Metric::Euclidean,
            schedule,
            trained: false,
            weights,
        })
    }

    /// Map with given weights, marked as trained.
    pub fn from_weights(rows: usize, cols: usize, dim: usize, weights: Vec<f64>) -> Result<Self> {
        let map = Self {
            rows,
            cols,
            dim,
            metric: Metric::Euclidean,
            schedule: TrainSchedule::default(),
            trained: true,
            weights,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows * self.cols < MIN_NODES || self.dim == 0 {
            return Err(Error::schema(format!("map {}x{} of dimension {}", self.rows, self.cols, self.dim)));
        }
        if self.weights.len() != self.rows * self.cols * self.dim {
            return Err(Error::schema(format!(
                "{} weights for {}x{}x{}",
                self.weights.len(),
                self.rows,
                self.cols,
                self.dim
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::schema("non-finite weight"));
        }
        self.schedule.validate()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.rows * self.cols
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn schedule(&self) -> &TrainSchedule {
        &self.schedule
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, node: usize) -> &[f64] {
        &self.weights[node * self.dim..(node + 1) * self.dim]
    }

    pub fn node_pos(&self, node: usize) -> (usize, usize) {
        (node / self.cols, node % self.cols)
    }

    pub fn grid_dist_sq(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.node_pos(a);
        let (rb, cb) = self.node_pos(b);
        let dr = ra as f64 - rb as f64;
        let dc = ca as f64 - cb as f64;
        dr * dr + dc * dc
    }

    /// Nearest node and its distance; ties go to the lowest row-major index.
    pub fn best_match(&self, x: &[f64]) -> Result<(usize, f64)> {
        if x.len() != self.dim {
            return Err(Error::argument(format!("input has length {}, map expects {}", x.len(), self.dim)));
        }
        Ok(self.bmu(x))
    }

    fn bmu(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for node in 0..self.n_nodes() {
            let d = self.metric.distance(x, self.weight(node));
            if d < best.1 {
                best = (node, d);
            }
        }
        best
    }

    /// Runs the full schedule. Presentation order is reshuffled every epoch.
    pub fn train<V: AsRef<[f64]>>(mut self, data: &[V]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::argument("no training data"));
        }
        check_dims(data, self.dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.schedule.rng_seed);
        rng.set_stream(1);
        let TrainSchedule {
            epochs,
            alpha,
            sigma,
            kernel,
            ..
        } = self.schedule;
        let mut order: Vec<usize> = (0..data.len()).collect();
        for t in 1..=epochs {
            let a = alpha.at(t, epochs);
            let s = sigma.at(t, epochs, self.rows, self.cols);
            order.shuffle(&mut rng);
            for &k in &order {
                self.present(data[k].as_ref(), a, s, kernel);
            }
        }
        self.trained = true;
        Ok(self)
    }

    fn present(&mut self, x: &[f64], alpha: f64, sigma: f64, kernel: Kernel) {
        let (winner, _) = self.bmu(x);
        for node in 0..self.n_nodes() {
            let f = alpha * kernel.value(self.grid_dist_sq(node, winner), sigma);
            if f == 0.0 {
                continue;
            }
            let keep = 1.0 - f;
            let w = &mut self.weights[node * self.dim..(node + 1) * self.dim];
            for (wi, xi) in w.iter_mut().zip(x) {
                *wi = keep * *wi + f * xi;
            }
        }
    }

    /// Mean distance from each vector to its best-matching weight.
    pub fn quantization_error<V: AsRef<[f64]>>(&self, data: &[V]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::argument("no data"));
        }
        check_dims(data, self.dim)?;
        Ok(data.iter().map(|x| self.bmu(x.as_ref()).1).sum::<f64>() / data.len() as f64)
    }

    pub fn umatrix(&self) -> UMatrix {
        UMatrix::from_map(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let map: Self = serde_json::from_str(s)?;
        map.validate()?;
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn schedule(alpha: f64, sigma: f64, kernel: Kernel, epochs: usize) -> TrainSchedule {
        TrainSchedule {
            epochs,
            alpha: AlphaSchedule::Constant { value: alpha },
            sigma: SigmaSchedule::Constant { value: sigma },
            kernel,
            ..TrainSchedule::default()
        }
    }

    #[test]
    fn default_schedule_decays() {
        let s = TrainSchedule::default();
        assert_eq!(s.alpha.at(1, 200), 0.5);
        assert!(s.alpha.at(200, 200) > 0.0);
        assert_eq!(s.sigma.at(1, 200, 10, 10), 5.0);
        assert_eq!(s.sigma.at(200, 200, 10, 10), 0.25);
        for t in 1..200 {
            assert!(s.alpha.at(t + 1, 200) <= s.alpha.at(t, 200));
            assert!(s.sigma.at(t + 1, 200, 10, 10) <= s.sigma.at(t, 200, 10, 10));
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(schedule(1.5, 1.0, Kernel::Gaussian, 1).validate().is_err());
        assert!(schedule(0.5, -1.0, Kernel::Gaussian, 1).validate().is_err());
        assert!(schedule(0.5, 1.0, Kernel::Gaussian, 0).validate().is_err());
        assert!(schedule(0.0, 0.0, Kernel::Bubble, 1).validate().is_ok());
    }

    #[test]
    fn same_seed_same_weights() {
        let a = SomMap::init::<Vec<f64>>(3, 3, 4, TrainSchedule::default().with_seed(9), None).unwrap();
        let b = SomMap::init::<Vec<f64>>(3, 3, 4, TrainSchedule::default().with_seed(9), None).unwrap();
        let c = SomMap::init::<Vec<f64>>(3, 3, 4, TrainSchedule::default().with_seed(10), None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn random_small_respects_epsilon() {
        let samples = vec![vec![0.0, -10.0], vec![300.0, 10.0]];
        let m = SomMap::init(5, 5, 2, TrainSchedule::default(), Some(&samples)).unwrap();
        for node in 0..25 {
            assert!(m.weight(node)[0].abs() <= 3.0);
            assert!(m.weight(node)[1].abs() <= 0.2);
        }
        let m = SomMap::init::<Vec<f64>>(5, 5, 2, TrainSchedule::default(), None).unwrap();
        assert!(m.weights().iter().all(|w| w.abs() <= 0.01));
    }

    #[test]
    fn sample_init_permutes_samples() {
        let samples: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, -(i as f64)]).collect();
        let sched = TrainSchedule {
            init: Init::SampleInit,
            ..TrainSchedule::default()
        };
        let m = SomMap::init(2, 3, 2, sched, Some(&samples)).unwrap();
        let mut firsts: Vec<f64> = (0..6).map(|n| m.weight(n)[0]).collect();
        firsts.sort_by(f64::total_cmp);
        assert_eq!(firsts, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        for n in 0..6 {
            assert_eq!(m.weight(n)[1], -m.weight(n)[0]);
        }
        // Fewer samples than nodes draws with replacement.
        let m = SomMap::init(3, 3, 2, sched, Some(&samples[..2])).unwrap();
        assert!((0..9).all(|n| m.weight(n)[0] <= 1.0));
        assert!(SomMap::init::<Vec<f64>>(2, 2, 2, sched, Some(&[])).is_err());
        assert!(SomMap::init::<Vec<f64>>(2, 2, 2, sched, None).is_err());
    }

    #[test]
    fn bmu_exact_match_and_ties() {
        let m = SomMap::from_weights(2, 2, 1, vec![0.0, 1.0, 3.0, 1.0]).unwrap();
        assert_eq!(m.best_match(&[3.0]).unwrap(), (2, 0.0));
        assert_eq!(m.best_match(&[1.0]).unwrap().0, 1);
        assert_eq!(m.best_match(&[2.0]).unwrap().0, 1);
        assert!(m.best_match(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn bmu_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dim = 6;
        let weights: Vec<f64> = (0..25 * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = SomMap::from_weights(5, 5, dim, weights.clone()).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dists: Vec<f64> = weights
                .chunks(dim)
                .map(|w| w.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                .collect();
            let oracle = (0..25).fold(0, |best, i| if dists[i] < dists[best] { i } else { best });
            assert_eq!(m.best_match(&x).unwrap().0, oracle);
        }
    }

    #[test]
    fn unit_rate_zero_radius_copies_the_input() {
        let x = vec![0.1, -7.3, 1e-300, 12345.678];
        let m = SomMap::init::<Vec<f64>>(2, 2, 4, schedule(1.0, 0.0, Kernel::Bubble, 1), None).unwrap();
        let winner = m.best_match(&x).unwrap().0;
        let before = m.clone();
        let m = m.train(std::slice::from_ref(&x)).unwrap();
        assert_eq!(m.weight(winner), &x[..]);
        for n in (0..4).filter(|&n| n != winner) {
            assert_eq!(m.weight(n), before.weight(n));
        }
    }

    #[test]
    fn zero_rate_leaves_weights_alone() {
        let data = vec![vec![5.0, 5.0], vec![-3.0, 2.0]];
        let m = SomMap::init::<Vec<f64>>(3, 3, 2, schedule(0.0, 2.0, Kernel::Gaussian, 20), None).unwrap();
        let trained = m.clone().train(&data).unwrap();
        assert_eq!(trained.weights(), m.weights());
        assert!(trained.is_trained());
    }

    #[test]
    fn training_rejects_bad_data() {
        let m = SomMap::init::<Vec<f64>>(2, 2, 2, TrainSchedule::default(), None).unwrap();
        assert!(m.clone().train::<Vec<f64>>(&[]).is_err());
        assert!(m.train(&[vec![1.0]]).is_err());
    }

    #[test]
    fn two_blobs_on_a_1x2_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.5).unwrap();
        let centers = [[0.0, 0.0], [20.0, 0.0]];
        let data: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let c = centers[i % 2];
                vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]
            })
            .collect();
        let means: Vec<[f64; 2]> = (0..2)
            .map(|k| {
                let pts: Vec<&Vec<f64>> = data.iter().skip(k).step_by(2).collect();
                let n = pts.len() as f64;
                [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n]
            })
            .collect();
        let m = SomMap::init(1, 2, 2, TrainSchedule::default(), Some(&data)).unwrap();
        let m = m.train(&data).unwrap();
        for mean in &means {
            let err = (0..2)
                .map(|n| Metric::Euclidean.distance(m.weight(n), mean))
                .fold(f64::INFINITY, f64::min);
            assert!(err <= 0.1 * 20.0, "{err}");
        }
    }

    #[test]
    fn training_is_deterministic_and_reduces_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data: Vec<Vec<f64>> = (0..30).map(|_| (0..5).map(|_| rng.random_range(0.0..10.0)).collect()).collect();
        let init = SomMap::init(4, 4, 5, TrainSchedule::default().with_seed(3), Some(&data)).unwrap();
        let a = init.clone().train(&data).unwrap();
        let b = init.clone().train(&data).unwrap();
        assert_eq!(a, b);
        assert!(a.quantization_error(&data).unwrap() <= init.quantization_error(&data).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let m = SomMap::init::<Vec<f64>>(2, 3, 2, TrainSchedule::default().with_seed(77), None).unwrap();
        let back = SomMap::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        let broken = m.to_json().unwrap().replace("\"dim\": 2", "\"dim\": 3");
        assert!(SomMap::from_json(&broken).is_err());
    }
}
