//! Map labelling, classification, leave-one-out validation and Cohen's kappa.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::gait::ClassLabel;
use crate::som::{Clusters, Metric, NodeCluster, SomMap, TrainSchedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledVector {
    pub id: String,
    pub label: ClassLabel,
    pub values: Vec<f64>,
}

impl LabeledVector {
    pub fn new(id: impl Into<String>, label: ClassLabel, values: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            label,
            values,
        }
    }

    pub fn from_features(fv: FeatureVector, label: ClassLabel) -> Self {
        Self {
            id: fv.subject_id.unwrap_or_default(),
            label,
            values: fv.values,
        }
    }
}

impl AsRef<[f64]> for LabeledVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Highest count wins; ties go to the lowest label.
fn majority(counts: &BTreeMap<ClassLabel, usize>) -> Option<ClassLabel> {
    let mut best: Option<(&ClassLabel, usize)> = None;
    for (label, &n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((label, n));
        }
    }
    best.map(|(l, _)| l.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMap {
    map: SomMap,
    /// Training-label counts per node.
    hits: Vec<BTreeMap<ClassLabel, usize>>,
    node_labels: Vec<ClassLabel>,
}

impl LabeledMap {
    /// Labels nodes by majority of the training vectors they win. Empty nodes copy the nearest labelled node.
    pub fn new(map: SomMap, training: &[LabeledVector]) -> Result<Self> {
        if !map.is_trained() {
            return Err(Error::State("map has not been trained".into()));
        }
        if training.is_empty() {
            return Err(Error::argument("no labelled vectors"));
        }
        let mut hits = vec![BTreeMap::new(); map.n_nodes()];
        for v in training {
            let (node, _) = map.best_match(&v.values)?;
            *hits[node].entry(v.label.clone()).or_insert(0) += 1;
        }
        let own: Vec<Option<ClassLabel>> = hits.iter().map(majority).collect();
        let labelled: Vec<usize> = (0..own.len()).filter(|&i| own[i].is_some()).collect();
        let node_labels = (0..map.n_nodes())
            .map(|i| match &own[i] {
                Some(l) => l.clone(),
                None => {
                    let nearest = labelled
                        .iter()
                        .copied()
                        .min_by(|&a, &b| map.grid_dist_sq(i, a).total_cmp(&map.grid_dist_sq(i, b)))
                        .expect("at least one labelled node");
                    own[nearest].clone().expect("labelled")
                }
            })
            .collect();
        Ok(Self {
            map,
            hits,
            node_labels,
        })
    }

    pub fn map(&self) -> &SomMap {
        &self.map
    }

    pub fn node_labels(&self) -> &[ClassLabel] {
        &self.node_labels
    }

    /// Number of training vectors whose best match is `node`.
    pub fn hit_count(&self, node: usize) -> usize {
        self.hits[node].values().sum()
    }

    pub fn hits(&self, node: usize) -> &BTreeMap<ClassLabel, usize> {
        &self.hits[node]
    }

    /// Majority training label per cluster. Clusters nobody landed in are absent.
    pub fn cluster_labels(&self, clusters: &Clusters) -> BTreeMap<usize, ClassLabel> {
        let mut counts: BTreeMap<usize, BTreeMap<ClassLabel, usize>> = BTreeMap::new();
        for (node, hits) in self.hits.iter().enumerate() {
            if let NodeCluster::Cluster(id) = clusters.of(node) {
                let c = counts.entry(id).or_default();
                for (label, n) in hits {
                    *c.entry(label.clone()).or_insert(0) += n;
                }
            }
        }
        counts
            .iter()
            .filter_map(|(&id, c)| majority(c).map(|l| (id, l)))
            .collect()
    }

    pub fn classify(&self, x: &[f64]) -> Result<ClassLabel> {
        let (node, _) = self.map.best_match(x)?;
        Ok(self.node_labels[node].clone())
    }
}

pub fn label_map(map: SomMap, training: &[LabeledVector]) -> Result<LabeledMap> {
    LabeledMap::new(map, training)
}

pub fn classify(lm: &LabeledMap, x: &[f64]) -> Result<ClassLabel> {
    lm.classify(x)
}

/// Cohen's kappa of a square count matrix (rows: truth, columns: prediction).
pub fn kappa(confusion: &[Vec<usize>]) -> Result<f64> {
    let k = confusion.len();
    if confusion.iter().any(|row| row.len() != k) {
        return Err(Error::argument("confusion matrix must be square"));
    }
    let n: u128 = confusion.iter().flatten().map(|&c| c as u128).sum();
    if n == 0 {
        return Err(Error::argument("empty confusion matrix"));
    }
    let trace: u128 = (0..k).map(|i| confusion[i][i] as u128).sum();
    let chance: u128 = (0..k)
        .map(|i| {
            let row: u128 = confusion[i].iter().map(|&c| c as u128).sum();
            let col: u128 = confusion.iter().map(|r| r[i] as u128).sum();
            row * col
        })
        .sum();
    // kappa = (n*trace - chance) / (n^2 - chance), everything scaled by n^2.
    let denom = n * n - chance;
    if denom == 0 {
        return Err(Error::Undefined("chance agreement is 1".into()));
    }
    let num = (n * trace) as i128 - chance as i128;
    Ok(num as f64 / denom as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fold: usize,
    pub held_out: String,
    pub truth: ClassLabel,
    pub predicted: ClassLabel,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Row and column order of `confusion`.
    pub classes: Vec<ClassLabel>,
    pub confusion: Vec<Vec<usize>>,
    pub recognition_rate: f64,
    /// Population standard deviation of the per-fold 0/1 outcomes.
    pub rate_dispersion: f64,
    pub kappa: f64,
    pub folds: Vec<FoldRecord>,
}

impl EvalReport {
    pub fn from_predictions(folds: Vec<FoldRecord>) -> Result<Self> {
        if folds.is_empty() {
            return Err(Error::argument("no predictions"));
        }
        let classes: Vec<ClassLabel> = folds
            .iter()
            .flat_map(|f| [f.truth.clone(), f.predicted.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = |l: &ClassLabel| classes.binary_search(l).expect("known class");
        let mut confusion = vec![vec![0; classes.len()]; classes.len()];
        for f in &folds {
            confusion[index(&f.truth)][index(&f.predicted)] += 1;
        }
        let n = folds.len() as f64;
        let correct = folds.iter().filter(|f| f.truth == f.predicted).count() as f64;
        let rate = correct / n;
        Ok(Self {
            kappa: kappa(&confusion)?,
            classes,
            confusion,
            recognition_rate: rate,
            rate_dispersion: (rate * (1.0 - rate)).sqrt(),
            folds,
        })
    }

    pub fn write_confusion_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["truth".to_string()];
        header.extend(self.classes.iter().map(ToString::to_string));
        w.write_record(&header)?;
        for (label, row) in self.classes.iter().zip(&self.confusion) {
            let mut rec = vec![label.to_string()];
            rec.extend(row.iter().map(ToString::to_string));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("confusion", e))?;
        Ok(())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.classes.iter().map(|c| c.as_str().len()).max().unwrap_or(0).max(6);
        write!(f, "{:>width$}", "truth")?;
        for c in &self.classes {
            write!(f, " {:>width$}", c.as_str())?;
        }
        writeln!(f)?;
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            write!(f, "{:>width$}", c.as_str())?;
            for n in row {
                write!(f, " {n:>width$}")?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "recognition rate {:.4} +/- {:.4}  kappa {:.4}  (n = {})",
            self.recognition_rate,
            self.rate_dispersion,
            self.kappa,
            self.folds.len()
        )
    }
}

/// Leave-one-out: fold `k` trains a fresh `rows x cols` map with seed `schedule.rng_seed + k`.
pub fn loocv(data: &[LabeledVector], rows: usize, cols: usize, schedule: &TrainSchedule) -> Result<EvalReport> {
    loocv_with_metric(data, rows, cols, schedule, Metric::Euclidean)
}

pub fn loocv_with_metric(
    data: &[LabeledVector],
    rows: usize,
    cols: usize,
    schedule: &TrainSchedule,
    metric: Metric,
) -> Result<EvalReport> {
    if data.len() < 2 {
        return Err(Error::argument("leave-one-out needs at least two vectors"));
    }
    if data.iter().map(|v| &v.label).collect::<BTreeSet<_>>().len() < 2 {
        return Err(Error::argument("leave-one-out needs at least two classes"));
    }
    let dim = data[0].values.len();
    if let Some(bad) = data.iter().find(|v| v.values.len() != dim) {
        return Err(Error::argument(format!("{} has length {}, expected {dim}", bad.id, bad.values.len())));
    }
    schedule.validate()?;
    let folds = (0..data.len())
        .into_par_iter()
        .map(|k| {
            let seed = schedule.rng_seed.wrapping_add(k as u64);
            let train: Vec<LabeledVector> = data
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, v)| v.clone())
                .collect();
            let map = SomMap::init(rows, cols, dim, schedule.with_seed(seed), Some(&train))?
                .with_metric(metric)
                .train(&train)?;
            let lm = LabeledMap::new(map, &train)?;
            Ok(FoldRecord {
                fold: k,
                held_out: data[k].id.clone(),
                truth: data[k].label.clone(),
                predicted: lm.classify(&data[k].values)?,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_predictions(folds)
}
