//! Scalogram regions and fixed-length feature vectors.
//!
//! A scalogram is cut vertically at the end of stance and horizontally
//! into a low-scale and a high-scale band, giving four regions numbered
//! 1 = stance/low, 2 = swing/low, 3 = swing/high, 4 = stance/high.
//!
//! A single-joint feature vector samples one scale level (the 8 smallest
//! or 8 largest scales) at 20 time points, 0..=95% in 5% steps, and is
//! flattened time-major.

use std::ops::Range;

use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::JointSide;
use crate::wavelet::Scalogram;

pub const N_TIME_SAMPLES: usize = 20;
pub const TIME_STEP_PCT: f64 = 5.0;
pub const DEFAULT_SCALES_PER_LEVEL: usize = 8;
pub const DEFAULT_STANCE_FRACTION: f64 = 0.60;

const AXIS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Large scales, low frequencies.
    High,
    /// Small scales, high frequencies.
    Low,
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Level::High => "high",
            Level::Low => "low",
        })
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" | "highscale" => Ok(Level::High),
            "low" | "lowscale" => Ok(Level::Low),
            other => Err(Error::argument(format!("unknown level {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegionSplit {
    pub stance_fraction: f64,
    pub level: Level,
    /// Scales sampled per level. With 12 scales the two 8-scale windows
    /// overlap in the middle four.
    pub scales_per_level: usize,
}

impl Default for RegionSplit {
    fn default() -> Self {
        Self {
            stance_fraction: DEFAULT_STANCE_FRACTION,
            level: Level::High,
            scales_per_level: DEFAULT_SCALES_PER_LEVEL,
        }
    }
}

impl RegionSplit {
    pub fn new(stance_fraction: f64, level: Level) -> Result<Self> {
        let split = Self {
            stance_fraction,
            level,
            ..Self::default()
        };
        split.validate()?;
        Ok(split)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.stance_fraction > 0.0 && self.stance_fraction < 1.0) {
            return Err(Error::Config(format!(
                "stance_fraction must lie in (0, 1), got {}",
                self.stance_fraction
            )));
        }
        if self.scales_per_level == 0 {
            return Err(Error::Config("scales_per_level must be >= 1".into()));
        }
        Ok(())
    }

    /// Row window of this split's level on a scalogram with `n_scales` rows.
    pub fn level_rows(&self, n_scales: usize) -> Result<Range<usize>> {
        let k = self.scales_per_level;
        if n_scales < k {
            return Err(Error::argument(format!(
                "{n_scales} scales cannot supply {k} per level"
            )));
        }
        Ok(match self.level {
            Level::Low => 0..k,
            Level::High => n_scales - k..n_scales,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Stance,
    Swing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// 1 = stance/low, 2 = swing/low, 3 = swing/high, 4 = stance/high.
    pub id: u8,
    pub phase: Phase,
    pub level: Level,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    pub values: Array2<f64>,
}

/// Tiles the scalogram into its four regions.
///
/// Stance holds every column at or before `stance_fraction * 100` percent;
/// the band boundary sits halfway down the scale axis.
pub fn split_regions(sc: &Scalogram, split: &RegionSplit) -> Result<[Region; 4]> {
    split.validate()?;
    let cut_pct = split.stance_fraction * 100.0 + AXIS_TOLERANCE;
    let stance_cols = sc.time_axis().iter().take_while(|&&p| p <= cut_pct).count();
    let n_cols = sc.n_times();
    let band_row = sc.n_scales() / 2;
    let n_rows = sc.n_scales();

    let region = |id, phase, level, rows: Range<usize>, cols: Range<usize>| Region {
        id,
        phase,
        level,
        values: sc.values().slice(s![rows.clone(), cols.clone()]).to_owned(),
        rows,
        cols,
    };
    Ok([
        region(1, Phase::Stance, Level::Low, 0..band_row, 0..stance_cols),
        region(2, Phase::Swing, Level::Low, 0..band_row, stance_cols..n_cols),
        region(3, Phase::Swing, Level::High, band_row..n_rows, stance_cols..n_cols),
        region(4, Phase::Stance, Level::High, band_row..n_rows, 0..stance_cols),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub subject_id: Option<String>,
    /// Joint-sides in concatenation order.
    pub parts: Vec<JointSide>,
    pub level: Level,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy scaled to zero mean and unit variance. A constant vector maps to zeros.
    pub fn zscored(&self) -> Self {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        let values = self
            .values
            .iter()
            .map(|v| if sd > 0.0 { (v - mean) / sd } else { 0.0 })
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn column_at(sc: &Scalogram, pct: f64) -> Result<usize> {
    sc.time_axis()
        .iter()
        .position(|&p| (p - pct).abs() <= AXIS_TOLERANCE)
        .ok_or_else(|| Error::argument(format!("time axis has no column at {pct}%")))
}

/// Samples the split's level at 0, 5, ..., 95 percent, time-major.
pub fn extract_features(sc: &Scalogram, split: &RegionSplit) -> Result<FeatureVector> {
    split.validate()?;
    let rows = split.level_rows(sc.n_scales())?;
    let cols = (0..N_TIME_SAMPLES)
        .map(|i| column_at(sc, i as f64 * TIME_STEP_PCT))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(cols.len() * rows.len());
    for &c in &cols {
        for r in rows.clone() {
            values.push(sc.values()[[r, c]]);
        }
    }
    Ok(FeatureVector {
        values,
        subject_id: sc.subject_id().map(str::to_owned),
        parts: vec![sc.source()],
        level: split.level,
    })
}

/// Concatenates per-joint vectors of one subject in declared joint order.
pub fn combine_joints(parts: Vec<FeatureVector>) -> Result<FeatureVector> {
    let first = parts
        .first()
        .ok_or_else(|| Error::argument("nothing to combine"))?;
    let (subject_id, level) = (first.subject_id.clone(), first.level);
    if let Some(bad) = parts.iter().find(|p| p.subject_id != subject_id || p.level != level) {
        return Err(Error::argument(format!(
            "cannot combine {:?}/{} with {:?}/{}",
            subject_id, level, bad.subject_id, bad.level
        )));
    }
    let mut parts = parts;
    parts.sort_by_key(|p| p.parts.first().copied());
    let keys: Vec<JointSide> = parts.iter().flat_map(|p| p.parts.iter().copied()).collect();
    if keys.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::argument(format!("duplicate or interleaved joints in {keys:?}")));
    }
    Ok(FeatureVector {
        values: parts.iter().flat_map(|p| p.values.iter().copied()).collect(),
        subject_id,
        parts: keys,
        level,
    })
}
