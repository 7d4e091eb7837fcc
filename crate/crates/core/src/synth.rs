//! Labelled synthetic gait datasets.
//!
//! Normal subjects are low-order Fourier templates with Gaussian jitter on
//! each harmonic amplitude. Pathological classes add a windowed
//! high-frequency component (harmonics 10..=20), a timing shift, and a
//! left/right asymmetry on top of the same template.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{grid_pct, ClassLabel, GaitTrajectory, Joint, Side, Subject, CANONICAL_GRID, MIN_GRID};

pub const MAX_TEMPLATE_HARMONIC: u32 = 15;
pub const HF_LOW: u32 = 10;
pub const HF_HIGH: u32 = 20;
/// Stance/swing boundary used by the perturbation windows, percent.
pub const STANCE_END_PCT: f64 = 60.0;
/// High-frequency phase jitter of the built-in pathology presets, radians.
pub const PRESET_HF_PHASE_JITTER: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub index: u32,
    /// Degrees.
    pub amplitude: f64,
    /// Radians.
    pub phase: f64,
}

impl Harmonic {
    pub const fn new(index: u32, amplitude: f64, phase: f64) -> Self {
        Self {
            index,
            amplitude,
            phase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTemplate {
    pub joint: Joint,
    pub harmonics: Vec<Harmonic>,
}

impl JointTemplate {
    /// Template value at cycle percentage `pct` (no jitter).
    pub fn eval(&self, pct: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.amplitude * (2.0 * PI * h.index as f64 * pct / 100.0 + h.phase).cos())
            .sum()
    }
}

/// Default normal templates: hip is a 30 degree fundamental with a small
/// second harmonic, knee uses harmonics 0..=3 (two flexion peaks, the swing
/// one near 60 degrees), ankle uses harmonics 0..=4.
pub fn default_templates() -> Vec<JointTemplate> {
    vec![
        JointTemplate {
            joint: Joint::Hip,
            harmonics: vec![Harmonic::new(1, 30.0, 0.0), Harmonic::new(2, 4.0, 0.4)],
        },
        JointTemplate {
            joint: Joint::Knee,
            harmonics: vec![
                Harmonic::new(0, 25.0, 0.0),
                Harmonic::new(1, 21.6, 1.78),
                Harmonic::new(2, 12.3, -2.602),
                Harmonic::new(3, 2.1, -2.625),
            ],
        },
        JointTemplate {
            joint: Joint::Ankle,
            harmonics: vec![
                Harmonic::new(0, -1.6, 0.0),
                Harmonic::new(1, 5.5, -1.783),
                Harmonic::new(2, 5.5, 1.335),
                Harmonic::new(3, 1.9, -2.175),
                Harmonic::new(4, 1.7, 0.611),
            ],
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseRegion {
    Stance,
    Swing,
    Both,
}

impl PhaseRegion {
    /// Smooth window confining the perturbation to its phase.
    pub fn window(self, pct: f64) -> f64 {
        match self {
            PhaseRegion::Both => 1.0,
            PhaseRegion::Stance if pct <= STANCE_END_PCT => {
                (PI * pct / STANCE_END_PCT).sin().powi(2)
            }
            PhaseRegion::Swing if pct >= STANCE_END_PCT => {
                (PI * (pct - STANCE_END_PCT) / (100.0 - STANCE_END_PCT))
                    .sin()
                    .powi(2)
            }
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbationSpec {
    /// Amplitude (degrees) of the added harmonic 10..=20 component; the
    /// component has the RMS of a single sinusoid of this amplitude.
    pub hf_amplitude: f64,
    pub hf_phase_region: PhaseRegion,
    /// Left/right perturbation ratio. Values above 1 weaken the right side,
    /// values below 1 weaken the left side.
    pub asymmetry_gain: f64,
    /// Percent of cycle by which the template is delayed on the affected side.
    pub timing_shift: f64,
    /// Standard deviation (degrees) of per-harmonic amplitude jitter.
    pub jitter_sd: f64,
    /// Half-width (radians, at most pi) of the per-subject uniform jitter on
    /// the high-frequency phases. The jitter is added to Schroeder phases,
    /// whose flat envelope keeps the component's magnitude steady over the
    /// window. At pi the phases are uniformly random.
    pub hf_phase_jitter: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            hf_amplitude: 0.0,
            hf_phase_region: PhaseRegion::Both,
            asymmetry_gain: 1.0,
            timing_shift: 0.0,
            jitter_sd: 0.0,
            hf_phase_jitter: PI,
        }
    }
}

impl PerturbationSpec {
    pub fn jitter_only(jitter_sd: f64) -> Self {
        Self {
            jitter_sd,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let magnitudes = [
            ("hf_amplitude", self.hf_amplitude),
            ("timing_shift", self.timing_shift),
            ("jitter_sd", self.jitter_sd),
        ];
        for (name, v) in magnitudes {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(0.0..=PI).contains(&self.hf_phase_jitter) {
            return Err(Error::Config(format!(
                "hf_phase_jitter must be within [0, pi], got {}",
                self.hf_phase_jitter
            )));
        }
        if !self.asymmetry_gain.is_finite() || self.asymmetry_gain <= 0.0 {
            return Err(Error::Config(format!(
                "asymmetry_gain must be > 0, got {}",
                self.asymmetry_gain
            )));
        }
        Ok(())
    }

    /// Perturbation strength on `side`, normalized so the stronger side is 1.
    pub fn side_factor(&self, side: Side) -> f64 {
        let g = self.asymmetry_gain;
        let norm = g.max(1.0);
        match side {
            Side::Left => g / norm,
            Side::Right => 1.0 / norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub label: ClassLabel,
    pub perturbation: PerturbationSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Subjects per class.
    pub n_subjects: usize,
    pub templates: Vec<JointTemplate>,
    pub sides: Vec<Side>,
    pub classes: Vec<ClassSpec>,
    pub grid_size: usize,
    pub rng_seed: u64,
}

impl SynthSpec {
    /// Two classes: jittered Normal subjects and `label` subjects carrying
    /// `pathology`. Both use the pathology's jitter.
    pub fn normal_vs(label: ClassLabel, pathology: PerturbationSpec, n_subjects: usize, rng_seed: u64) -> Self {
        Self {
            n_subjects,
            templates: default_templates(),
            sides: Side::ALL.to_vec(),
            classes: vec![
                ClassSpec {
                    label: ClassLabel::Normal,
                    perturbation: PerturbationSpec::jitter_only(pathology.jitter_sd),
                },
                ClassSpec {
                    label,
                    perturbation: pathology,
                },
            ],
            grid_size: CANONICAL_GRID,
            rng_seed,
        }
    }

    /// Normal vs spastic gait: high-frequency content during stance.
    pub fn spastic(n_subjects: usize, rng_seed: u64) -> Self {
        Self::normal_vs(
            ClassLabel::CpDiplegia,
            PerturbationSpec {
                hf_amplitude: 5.0,
                hf_phase_region: PhaseRegion::Stance,
                jitter_sd: 1.5,
                hf_phase_jitter: PRESET_HF_PHASE_JITTER,
                ..PerturbationSpec::default()
            },
            n_subjects,
            rng_seed,
        )
    }

    /// Left-affected, right-affected and symmetric diplegic classes.
    pub fn laterality(n_subjects: usize, rng_seed: u64) -> Self {
        let base = PerturbationSpec {
            hf_amplitude: 6.0,
            hf_phase_region: PhaseRegion::Stance,
            jitter_sd: 1.5,
            hf_phase_jitter: PRESET_HF_PHASE_JITTER,
            ..PerturbationSpec::default()
        };
        Self {
            n_subjects,
            templates: default_templates(),
            sides: Side::ALL.to_vec(),
            classes: vec![
                ClassSpec {
                    label: ClassLabel::CpLeftAsymmetric,
                    perturbation: PerturbationSpec {
                        asymmetry_gain: 4.0,
                        ..base
                    },
                },
                ClassSpec {
                    label: ClassLabel::CpRightAsymmetric,
                    perturbation: PerturbationSpec {
                        asymmetry_gain: 0.25,
                        ..base
                    },
                },
                ClassSpec {
                    label: ClassLabel::CpDiplegia,
                    perturbation: PerturbationSpec {
                        hf_amplitude: base.hf_amplitude / 2.0,
                        ..base
                    },
                },
            ],
            grid_size: CANONICAL_GRID,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subjects == 0 {
            return Err(Error::Config("n_subjects must be >= 1".into()));
        }
        if self.classes.is_empty() {
            return Err(Error::Config("at least one class is required".into()));
        }
        if self.templates.is_empty() || self.sides.is_empty() {
            return Err(Error::Config("at least one joint and one side are required".into()));
        }
        if self.grid_size < MIN_GRID {
            return Err(Error::Config(format!("grid_size must be >= {MIN_GRID}")));
        }
        for t in &self.templates {
            for h in &t.harmonics {
                if h.index > MAX_TEMPLATE_HARMONIC {
                    return Err(Error::Config(format!(
                        "{} template harmonic {} exceeds {MAX_TEMPLATE_HARMONIC}",
                        t.joint, h.index
                    )));
                }
                if !h.amplitude.is_finite() || !h.phase.is_finite() {
                    return Err(Error::Config(format!("{} template has a non-finite term", t.joint)));
                }
            }
        }
        for c in &self.classes {
            c.perturbation.validate()?;
        }
        Ok(())
    }
}

/// Generates the dataset described by `spec`. Output is a pure function
/// of the spec, including its seed.
pub fn generate(spec: &SynthSpec) -> Result<Vec<Subject>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut subjects = Vec::with_capacity(spec.n_subjects * spec.classes.len());
    for class in &spec.classes {
        for i in 0..spec.n_subjects {
            let id = format!("{}_{:03}", class.label, i + 1);
            subjects.push(generate_subject(spec, class, id, &mut rng)?);
        }
    }
    Ok(subjects)
}

/// Low crest factor phases for the harmonics `HF_LOW..=HF_HIGH`.
pub fn schroeder_phases() -> Vec<f64> {
    let k = (HF_HIGH - HF_LOW + 1) as f64;
    (1..=HF_HIGH - HF_LOW + 1)
        .map(|i| {
            let i = i as f64;
            -PI * i * (i - 1.0) / k
        })
        .collect()
}

fn generate_subject(spec: &SynthSpec, class: &ClassSpec, id: String, rng: &mut ChaCha8Rng) -> Result<Subject> {
    let p = &class.perturbation;
    // Shared by both sides so a gain of 1 gives identical sides up to jitter.
    let hf_phases: Vec<f64> = schroeder_phases()
        .into_iter()
        .map(|ph| ph + p.hf_phase_jitter * rng.random_range(-1.0..1.0))
        .collect();
    let jitter = Normal::new(0.0, p.jitter_sd).map_err(|e| Error::Config(e.to_string()))?;
    let hf_norm = ((HF_HIGH - HF_LOW + 1) as f64).sqrt();

    let mut trajectories = Vec::new();
    for template in &spec.templates {
        for &side in &spec.sides {
            let factor = if p.hf_amplitude > 0.0 || p.timing_shift > 0.0 {
                p.side_factor(side)
            } else {
                0.0
            };
            let amplitudes: Vec<f64> = template
                .harmonics
                .iter()
                .map(|h| h.amplitude + jitter.sample(rng))
                .collect();
            let shift = p.timing_shift * factor;
            let hf_amp = p.hf_amplitude * factor / hf_norm;
            let samples = (0..spec.grid_size)
                .map(|k| {
                    let pct = grid_pct(k, spec.grid_size);
                    let base: f64 = template
                        .harmonics
                        .iter()
                        .zip(&amplitudes)
                        .map(|(h, a)| a * (2.0 * PI * h.index as f64 * (pct - shift) / 100.0 + h.phase).cos())
                        .sum();
                    let hf: f64 = (HF_LOW..=HF_HIGH)
                        .zip(&hf_phases)
                        .map(|(h, ph)| (2.0 * PI * h as f64 * pct / 100.0 + ph).sin())
                        .sum();
                    base + hf_amp * p.hf_phase_region.window(pct) * hf
                })
                .collect();
            trajectories.push(GaitTrajectory::new(template.joint, side, samples)?);
        }
    }
    Subject::new(id, class.label.clone(), trajectories)
}
