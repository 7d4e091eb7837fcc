//! Continuous wavelet transform with a complex Morlet mother wavelet.
//!
//! The transform of a trajectory `x` at scale `s` and shift `tau` is
//!
//! ```text
//! W(s, tau) = 1/sqrt(s) * integral x(t) * conj(psi((t - tau) / s)) dt
//! psi(t)    = exp(-t^2/2) / sqrt(2 pi) * exp(i 2 pi nu0 t)
//! ```
//!
//! with `t` and `tau` in cycle percent. A [`Scalogram`] stores `|W|` on the
//! (scale x trajectory grid) lattice.

use std::f64::consts::{PI, SQRT_2};

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{grid_pct, GaitTrajectory, JointSide};

/// Morlet center frequencies at or below this fail admissibility.
pub const ADMISSIBILITY_NU0: f64 = 0.8;
pub const MIN_TRUNCATION_RADIUS: f64 = 3.0;
pub const DEFAULT_SCALE_COUNT: usize = 12;
pub const DEFAULT_MIN_SCALE: f64 = 1.0;
pub const DEFAULT_MAX_SCALE: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MorletParams {
    pub nu0: f64,
    /// Support half-width in standard deviations of the scaled Gaussian.
    pub truncation_radius: f64,
}

impl Default for MorletParams {
    fn default() -> Self {
        Self {
            nu0: 1.0,
            truncation_radius: 5.0,
        }
    }
}

impl MorletParams {
    pub fn new(nu0: f64, truncation_radius: f64) -> Result<Self> {
        let p = Self {
            nu0,
            truncation_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nu0.is_finite() || self.nu0 <= ADMISSIBILITY_NU0 {
            return Err(Error::Config(format!(
                "nu0 must exceed {ADMISSIBILITY_NU0}, got {}",
                self.nu0
            )));
        }
        if !self.truncation_radius.is_finite() || self.truncation_radius < MIN_TRUNCATION_RADIUS {
            return Err(Error::Config(format!(
                "truncation_radius must be >= {MIN_TRUNCATION_RADIUS}, got {}",
                self.truncation_radius
            )));
        }
        Ok(())
    }
}

/// Complex Morlet wavelet at dimensionless time `t`.
pub fn morlet(t: f64, params: &MorletParams) -> Complex64 {
    let envelope = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    let (sin, cos) = (2.0 * PI * params.nu0 * t).sin_cos();
    Complex64::new(envelope * cos, envelope * sin)
}

/// Strictly increasing list of positive scales (cycle-percent units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScaleGrid {
    scales: Vec<f64>,
}

impl ScaleGrid {
    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::argument("scale grid is empty"));
        }
        if scales.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::argument("scales must be finite and positive"));
        }
        if scales.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("scales must be strictly increasing"));
        }
        Ok(Self { scales })
    }

    /// `count` logarithmically spaced scales over `[min, max]`, endpoints exact.
    pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !min.is_finite() || !max.is_finite() || min <= 0.0 || max <= min {
            return Err(Error::argument(format!(
                "log grid needs 0 < min < max and count >= 2, got [{min}, {max}] x {count}"
            )));
        }
        let ratio = (max / min).ln();
        let scales = (0..count)
            .map(|i| match i {
                0 => min,
                i if i == count - 1 => max,
                i => min * (ratio * i as f64 / (count - 1) as f64).exp(),
            })
            .collect();
        Self::new(scales)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

impl Default for ScaleGrid {
    fn default() -> Self {
        Self::log_spaced(DEFAULT_MIN_SCALE, DEFAULT_MAX_SCALE, DEFAULT_SCALE_COUNT)
            .expect("default scale grid is valid")
    }
}

impl TryFrom<Vec<f64>> for ScaleGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ScaleGrid> for Vec<f64> {
    fn from(g: ScaleGrid) -> Self {
        g.scales
    }
}

/// How the signal is continued outside `[0, 100]` percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Zero,
    Periodic,
}

/// Discretization of the transform integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Quadrature {
    /// `sum_k x(t_k) conj(psi((t_k - tau)/s)) dt` on the trajectory grid.
    SignalGrid,
    /// Same sum on a grid refined by an integer factor (linear interpolation
    /// of `x`) so each scale gets at least `per_scale` samples per wavelet
    /// period, with half weights at the zero-padding edges.
    Oversampled { per_scale: u32 },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::Oversampled { per_scale: 32 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cwt {
    pub scales: ScaleGrid,
    pub params: MorletParams,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl Cwt {
    pub fn new(scales: ScaleGrid, params: MorletParams) -> Self {
        Self {
            scales,
            params,
            boundary: Boundary::default(),
            quadrature: Quadrature::default(),
        }
    }

    pub fn boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Quadrature::Oversampled { per_scale: 0 } = self.quadrature {
            return Err(Error::Config("oversampling needs per_scale >= 1".into()));
        }
        Ok(())
    }

    pub fn transform(&self, traj: &GaitTrajectory) -> Result<Scalogram> {
        let values = self.transform_samples(traj.samples())?;
        let n = traj.grid_size();
        Ok(Scalogram {
            values,
            time_axis: (0..n).map(|k| grid_pct(k, n)).collect(),
            scales: self.scales.clone(),
            source: traj.joint_side(),
            subject_id: None,
            boundary: self.boundary,
        })
    }

    /// Magnitude matrix (scales x samples) for samples on a uniform grid
    /// spanning 0..=100 percent.
    pub fn transform_samples(&self, samples: &[f64]) -> Result<Array2<f64>> {
        self.validate()?;
        if samples.len() < 2 {
            return Err(Error::argument("signal grid needs at least 2 samples"));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::argument(format!("sample {k} is not finite")));
        }
        let n = samples.len();
        let rows: Vec<Vec<f64>> = self
            .scales
            .scales()
            .par_iter()
            .map(|&s| self.scale_row(samples, s))
            .collect();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(Array2::from_shape_vec((self.scales.len(), n), flat).expect("row lengths match"))
    }

    fn refinement(&self, dt: f64, scale: f64) -> usize {
        match self.quadrature {
            Quadrature::SignalGrid => 1,
            Quadrature::Oversampled { per_scale } => {
                let needed = per_scale as f64 * self.params.nu0.max(1.0) * dt / scale;
                (needed.ceil() as usize).max(1)
            }
        }
    }

    fn scale_row(&self, x: &[f64], scale: f64) -> Vec<f64> {
        let n = x.len();
        let dt = 100.0 / (n - 1) as f64;
        let m = self.refinement(dt, scale);
        let h = dt / m as f64;

        let fine: Vec<f64> = (0..(n - 1) * m + 1)
            .map(|j| {
                let (i, r) = (j / m, j % m);
                if r == 0 {
                    x[i]
                } else {
                    x[i] + (x[i + 1] - x[i]) * (r as f64 / m as f64)
                }
            })
            .collect();
        let last = fine.len() - 1;
        let edge_weight = match self.quadrature {
            Quadrature::SignalGrid => h,
            Quadrature::Oversampled { .. } => 0.5 * h,
        };

        let half = (self.params.truncation_radius * scale / h + 1e-9).floor() as isize;
        let kernel: Vec<Complex64> = (-half..=half)
            .map(|d| morlet(d as f64 * h / scale, &self.params).conj())
            .collect();
        let norm = 1.0 / scale.sqrt();

        (0..n)
            .map(|k| {
                let center = (k * m) as isize;
                let mut acc = Complex64::new(0.0, 0.0);
                match self.boundary {
                    Boundary::Zero => {
                        let lo = (-half).max(-center);
                        let hi = half.min(last as isize - center);
                        for d in lo..=hi {
                            let idx = (center + d) as usize;
                            let w = if idx == 0 || idx == last { edge_weight } else { h };
                            acc += kernel[(d + half) as usize] * (w * fine[idx]);
                        }
                    }
                    Boundary::Periodic => {
                        let period = last as isize;
                        for d in -half..=half {
                            let idx = (center + d).rem_euclid(period) as usize;
                            acc += kernel[(d + half) as usize] * (h * fine[idx]);
                        }
                    }
                }
                acc.norm() * norm
            })
            .collect()
    }
}

/// Transform with the default boundary and quadrature.
pub fn cwt(traj: &GaitTrajectory, grid: &ScaleGrid, params: &MorletParams) -> Result<Scalogram> {
    Cwt::new(grid.clone(), *params).transform(traj)
}

/// `|W|` over (scale x cycle percent).
#[derive(Debug, Clone, PartialEq)]
pub struct Scalogram {
    values: Array2<f64>,
    time_axis: Vec<f64>,
    scales: ScaleGrid,
    source: JointSide,
    subject_id: Option<String>,
    boundary: Boundary,
}

impl Scalogram {
    pub fn new(values: Array2<f64>, time_axis: Vec<f64>, scales: ScaleGrid, source: JointSide) -> Result<Self> {
        if values.dim() != (scales.len(), time_axis.len()) {
            return Err(Error::argument(format!(
                "scalogram is {:?} but axes are {} x {}",
                values.dim(),
                scales.len(),
                time_axis.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::argument("scalogram values must be finite and >= 0"));
        }
        if time_axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("time axis must be strictly increasing"));
        }
        Ok(Self {
            values,
            time_axis,
            scales,
            source,
            subject_id: None,
            boundary: Boundary::Zero,
        })
    }

    pub fn with_subject(mut self, id: impl Into<String>) -> Self {
        self.subject_id = Some(id.into());
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    pub fn scales(&self) -> &ScaleGrid {
        &self.scales
    }

    pub fn source(&self) -> JointSide {
        self.source
    }

    pub fn subject_id(&self) -> Option<&str> {
        self.subject_id.as_deref()
    }

    pub fn n_scales(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_times(&self) -> usize {
        self.values.ncols()
    }

    /// True where zero padding influences the value: within `sqrt(2) * s`
    /// of either end of the cycle (the Morlet e-folding distance).
    pub fn in_boundary_cone(&self, row: usize, col: usize) -> bool {
        match self.boundary {
            Boundary::Periodic => false,
            Boundary::Zero => {
                let t = self.time_axis[col];
                let first = self.time_axis[0];
                let last = self.time_axis[self.time_axis.len() - 1];
                (t - first).min(last - t) < SQRT_2 * self.scales.scales()[row]
            }
        }
    }
}
