//! Joint-angle trajectories on a normalized gait-cycle grid.
//!
//! Every trajectory is a sequence of sagittal angles (degrees) sampled
//! uniformly over 0..=100% of one gait cycle. Sample `k` of an `n`-point
//! grid sits at `k * 100 / (n - 1)` percent.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical grid: one sample per percent, both endpoints included.
pub const CANONICAL_GRID: usize = 101;
/// Shortest grid a trajectory may be stored on.
pub const MIN_GRID: usize = 21;
/// Largest admissible absolute angle, degrees.
pub const MAX_ABS_ANGLE: f64 = 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Joint {
    Hip,
    Knee,
    Ankle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl Joint {
    pub const ALL: [Joint; 3] = [Joint::Hip, Joint::Knee, Joint::Ankle];

    pub fn as_str(self) -> &'static str {
        match self {
            Joint::Hip => "hip",
            Joint::Knee => "knee",
            Joint::Ankle => "ankle",
        }
    }
}

impl Side {
    pub const ALL: [Side; 2] = [Side::Right, Side::Left];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

impl fmt::Display for Joint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Joint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hip" => Ok(Joint::Hip),
            "knee" => Ok(Joint::Knee),
            "ankle" => Ok(Joint::Ankle),
            other => Err(Error::schema(format!("unknown joint {other:?}"))),
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "right" | "r" => Ok(Side::Right),
            "left" | "l" => Ok(Side::Left),
            other => Err(Error::schema(format!("unknown side {other:?}"))),
        }
    }
}

/// A (joint, side) pair. The derived ordering (hip < knee < ankle, then
/// right < left) is the declared concatenation order for feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct JointSide {
    pub joint: Joint,
    pub side: Side,
}

impl JointSide {
    pub const fn new(joint: Joint, side: Side) -> Self {
        Self { joint, side }
    }
}

impl fmt::Display for JointSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.joint, self.side)
    }
}

impl From<JointSide> for String {
    fn from(js: JointSide) -> Self {
        js.to_string()
    }
}

impl TryFrom<String> for JointSide {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for JointSide {
    type Err = Error;

    /// Parses `hip:right` style tags.
    fn from_str(s: &str) -> Result<Self> {
        let (joint, side) = s
            .split_once([':', '_', '-'])
            .ok_or_else(|| Error::argument(format!("expected joint:side, got {s:?}")))?;
        Ok(Self::new(joint.parse()?, side.parse()?))
    }
}

/// Diagnostic class of a subject.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ClassLabel {
    Normal,
    CpDiplegia,
    CpLeftAsymmetric,
    CpRightAsymmetric,
    CpLeftHemiplegia,
    CpRightHemiplegia,
    Polio,
    SpinaBifida,
    Other(String),
}

impl ClassLabel {
    pub fn as_str(&self) -> &str {
        match self {
            ClassLabel::Normal => "Normal",
            ClassLabel::CpDiplegia => "CP-dp",
            ClassLabel::CpLeftAsymmetric => "CP-la",
            ClassLabel::CpRightAsymmetric => "CP-ra",
            ClassLabel::CpLeftHemiplegia => "CP-lh",
            ClassLabel::CpRightHemiplegia => "CP-rh",
            ClassLabel::Polio => "Polio",
            ClassLabel::SpinaBifida => "SpinaBifida",
            ClassLabel::Other(s) => s,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(Error::schema("missing label"));
        }
        let label = match trimmed.to_ascii_lowercase().as_str() {
            "normal" => ClassLabel::Normal,
            "cp-dp" => ClassLabel::CpDiplegia,
            "cp-la" => ClassLabel::CpLeftAsymmetric,
            "cp-ra" => ClassLabel::CpRightAsymmetric,
            "cp-lh" => ClassLabel::CpLeftHemiplegia,
            "cp-rh" => ClassLabel::CpRightHemiplegia,
            "polio" => ClassLabel::Polio,
            "spinabifida" | "spina-bifida" => ClassLabel::SpinaBifida,
            _ => ClassLabel::Other(trimmed.to_string()),
        };
        Ok(label)
    }
}

impl From<ClassLabel> for String {
    fn from(label: ClassLabel) -> Self {
        label.as_str().to_string()
    }
}

impl TryFrom<String> for ClassLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Cycle percentage of sample `k` on an `n`-point uniform grid.
pub fn grid_pct(k: usize, n: usize) -> f64 {
    k as f64 * 100.0 / (n - 1) as f64
}

/// One joint's sagittal angle over a normalized gait cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitTrajectory {
    joint: Joint,
    side: Side,
    samples: Vec<f64>,
}

impl GaitTrajectory {
    pub fn new(joint: Joint, side: Side, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_GRID {
            return Err(Error::argument(format!(
                "trajectory needs at least {MIN_GRID} samples, got {}",
                samples.len()
            )));
        }
        if let Some((k, v)) = samples
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > MAX_ABS_ANGLE)
        {
            return Err(Error::argument(format!(
                "sample {k} of {joint}:{side} is out of range: {v}"
            )));
        }
        Ok(Self {
            joint,
            side,
            samples,
        })
    }

    pub fn joint(&self) -> Joint {
        self.joint
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn joint_side(&self) -> JointSide {
        JointSide::new(self.joint, self.side)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    /// Grid spacing in cycle percent.
    pub fn step(&self) -> f64 {
        100.0 / (self.samples.len() - 1) as f64
    }

    pub fn pct_axis(&self) -> Vec<f64> {
        let n = self.grid_size();
        (0..n).map(|k| grid_pct(k, n)).collect()
    }

    /// Linear interpolation onto a uniform grid of `new_grid_size` points.
    ///
    /// Grid positions are located with exact integer arithmetic, so
    /// endpoints and coincident nodes are copied bit-for-bit.
    pub fn resample(&self, new_grid_size: usize) -> Result<Self> {
        let samples = resample_uniform(&self.samples, new_grid_size)?;
        Self::new(self.joint, self.side, samples)
    }
}

/// Linearly resamples uniformly spaced `values` onto `new_len` uniform points
/// spanning the same interval.
pub fn resample_uniform(values: &[f64], new_len: usize) -> Result<Vec<f64>> {
    if new_len < 2 {
        return Err(Error::argument(format!(
            "grid size must be at least 2, got {new_len}"
        )));
    }
    if values.len() < 2 {
        return Err(Error::argument("cannot resample fewer than 2 samples"));
    }
    if values.len() == new_len {
        return Ok(values.to_vec());
    }
    let old_span = (values.len() - 1) as u64;
    let new_span = (new_len - 1) as u64;
    let out = (0..new_len as u64)
        .map(|j| {
            let num = j * old_span;
            let i = (num / new_span) as usize;
            let rem = num % new_span;
            if rem == 0 {
                values[i]
            } else {
                let frac = rem as f64 / new_span as f64;
                values[i] + (values[i + 1] - values[i]) * frac
            }
        })
        .collect();
    Ok(out)
}

/// A subject record: one label and one or more trajectories sharing a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    id: String,
    label: ClassLabel,
    trajectories: BTreeMap<JointSide, GaitTrajectory>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    meta: BTreeMap<String, String>,
}

impl Subject {
    pub fn new(
        id: impl Into<String>,
        label: ClassLabel,
        trajectories: impl IntoIterator<Item = GaitTrajectory>,
    ) -> Result<Self> {
        let id = id.into();
        let mut map = BTreeMap::new();
        for traj in trajectories {
            let key = traj.joint_side();
            if map.insert(key, traj).is_some() {
                return Err(Error::schema(format!(
                    "subject {id}: duplicate trajectory {key}"
                )));
            }
        }
        let mut sizes = map.values().map(GaitTrajectory::grid_size);
        let first = sizes
            .next()
            .ok_or_else(|| Error::schema(format!("subject {id} has no trajectories")))?;
        if sizes.any(|n| n != first) {
            return Err(Error::schema(format!(
                "subject {id}: trajectories have different grid sizes"
            )));
        }
        Ok(Self {
            id,
            label,
            trajectories: map,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, meta: BTreeMap<String, String>) -> Self {
        self.meta = meta;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> &ClassLabel {
        &self.label
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn trajectory(&self, key: JointSide) -> Option<&GaitTrajectory> {
        self.trajectories.get(&key)
    }

    /// Trajectories in declared (joint, side) order.
    pub fn trajectories(&self) -> impl Iterator<Item = &GaitTrajectory> {
        self.trajectories.values()
    }

    pub fn grid_size(&self) -> usize {
        self.trajectories
            .values()
            .next()
            .map(GaitTrajectory::grid_size)
            .unwrap_or(0)
    }

    /// Copy with every trajectory resampled to `grid_size` points.
    pub fn resampled(&self, grid_size: usize) -> Result<Self> {
        let trajectories = self
            .trajectories
            .values()
            .map(|t| t.resample(grid_size))
            .collect::<Result<Vec<_>>>()?;
        Ok(Subject::new(self.id.clone(), self.label.clone(), trajectories)?
            .with_meta(self.meta.clone()))
    }
}
