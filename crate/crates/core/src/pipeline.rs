//! End-to-end runs driven by one TOML configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{loocv_with_metric, EvalReport, LabeledMap};
use crate::export::{self, FeatureMatrix, ScalogramRecord};
use crate::features::{combine_joints, extract_features, Level, RegionSplit};
use crate::gait::{ClassLabel, Joint, JointSide, Side, Subject};
use crate::ingest;
use crate::som::{
    attraction_field, clusters, AlphaSchedule, Init, Kernel, Metric, SigmaSchedule, SomMap, TrainSchedule,
    DEFAULT_CONTOUR_LEVELS, DEFAULT_THRESHOLD_PERCENTILE,
};
use crate::synth::{generate, SynthSpec};
use crate::wavelet::{Boundary, Cwt, MorletParams, Quadrature, ScaleGrid, Scalogram};

pub const FAILURE_MARKER: &str = "PIPELINE_FAILED";
pub const RESOLVED_CONFIG: &str = "config.resolved.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum SynthConfig {
    /// Normal vs spastic diplegia.
    Spastic { n_subjects: usize },
    /// Left-affected, right-affected and symmetric diplegia.
    Laterality { n_subjects: usize },
    /// Full generator spec. Its own seed is replaced by the run seed.
    Custom { spec: SynthSpec },
}

impl SynthConfig {
    pub fn spec(&self, seed: u64) -> SynthSpec {
        match self {
            SynthConfig::Spastic { n_subjects } => SynthSpec::spastic(*n_subjects, seed),
            SynthConfig::Laterality { n_subjects } => SynthSpec::laterality(*n_subjects, seed),
            SynthConfig::Custom { spec } => SynthSpec {
                rng_seed: seed,
                ..spec.clone()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalesConfig {
    List(Vec<f64>),
    LogSpaced { min: f64, max: f64, count: usize },
}

impl ScalesConfig {
    pub fn grid(&self) -> Result<ScaleGrid> {
        match self {
            ScalesConfig::List(v) => ScaleGrid::new(v.clone()),
            ScalesConfig::LogSpaced { min, max, count } => ScaleGrid::log_spaced(*min, *max, *count),
        }
    }
}

impl Default for ScalesConfig {
    fn default() -> Self {
        let g = ScaleGrid::default();
        ScalesConfig::LogSpaced {
            min: g.scales()[0],
            max: g.scales()[g.len() - 1],
            count: g.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletConfig {
    pub nu0: f64,
    pub truncation_radius: f64,
    pub scales: ScalesConfig,
    pub boundary: Boundary,
    pub quadrature: Quadrature,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        let p = MorletParams::default();
        Self {
            nu0: p.nu0,
            truncation_radius: p.truncation_radius,
            scales: ScalesConfig::default(),
            boundary: Boundary::default(),
            quadrature: Quadrature::default(),
        }
    }
}

impl WaveletConfig {
    pub fn cwt(&self) -> Result<Cwt> {
        let cwt = Cwt::new(self.scales.grid()?, MorletParams::new(self.nu0, self.truncation_radius)?)
            .boundary(self.boundary)
            .quadrature(self.quadrature);
        cwt.validate()?;
        Ok(cwt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    /// Joint-sides concatenated into one vector per subject.
    pub joints: Vec<JointSide>,
    pub level: Level,
    pub stance_fraction: f64,
    pub scales_per_level: usize,
    /// Scale each vector to zero mean and unit variance.
    pub zscore: bool,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        let split = RegionSplit::default();
        Self {
            joints: vec![JointSide::new(Joint::Hip, Side::Right)],
            level: split.level,
            stance_fraction: split.stance_fraction,
            scales_per_level: split.scales_per_level,
            zscore: false,
        }
    }
}

impl FeaturesConfig {
    pub fn split(&self) -> RegionSplit {
        RegionSplit {
            stance_fraction: self.stance_fraction,
            level: self.level,
            scales_per_level: self.scales_per_level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SomConfig {
    pub rows: usize,
    pub cols: usize,
    pub epochs: usize,
    pub alpha: AlphaSchedule,
    pub sigma: SigmaSchedule,
    pub kernel: Kernel,
    pub init: Init,
    pub metric: Metric,
}

impl Default for SomConfig {
    fn default() -> Self {
        let s = TrainSchedule::default();
        Self {
            rows: crate::som::DEFAULT_ROWS,
            cols: crate::som::DEFAULT_COLS,
            epochs: s.epochs,
            alpha: s.alpha,
            sigma: s.sigma,
            kernel: s.kernel,
            init: s.init,
            metric: Metric::default(),
        }
    }
}

impl SomConfig {
    pub fn schedule(&self, seed: u64) -> TrainSchedule {
        TrainSchedule {
            epochs: self.epochs,
            alpha: self.alpha,
            sigma: self.sigma,
            kernel: self.kernel,
            rng_seed: seed,
            init: self.init,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClustersConfig {
    /// Fixed U-Matrix cut. Without it the percentile below is used.
    pub threshold: Option<f64>,
    pub percentile: f64,
    pub contour_levels: usize,
}

impl Default for ClustersConfig {
    fn default() -> Self {
        Self {
            threshold: None,
            percentile: DEFAULT_THRESHOLD_PERCENTILE,
            contour_levels: DEFAULT_CONTOUR_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub loocv: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { loocv: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write every scalogram as CSV.
    pub scalograms: bool,
    /// Also render scalograms and the U-Matrix as PGM images.
    pub pgm: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            scalograms: true,
            pgm: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds the generator, the full-data map, and (plus fold index) every validation fold.
    pub seed: u64,
    pub input: Option<InputConfig>,
    pub synth: Option<SynthConfig>,
    pub wavelet: WaveletConfig,
    pub features: FeaturesConfig,
    pub som: SomConfig,
    pub clusters: ClustersConfig,
    pub eval: EvalConfig,
    pub output: OutputConfig,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Checks every section without touching the output directory.
    pub fn validate(&self) -> Result<()> {
        match (&self.input, &self.synth) {
            (None, None) => return Err(Error::Config("either [input] or [synth] is required".into())),
            (Some(_), Some(_)) => return Err(Error::Config("[input] and [synth] are mutually exclusive".into())),
            (Some(input), None) if !input.path.is_file() => {
                return Err(Error::Config(format!("input {} does not exist", input.path.display())))
            }
            (None, Some(s)) => s.spec(self.seed).validate().map_err(config_err)?,
            _ => {}
        }
        self.validate_params()
    }

    /// Every check except the data source.
    pub fn validate_params(&self) -> Result<()> {
        let cwt = self.wavelet.cwt().map_err(config_err)?;
        let f = &self.features;
        if f.joints.is_empty() {
            return Err(Error::Config("features.joints is empty".into()));
        }
        if f.joints.iter().collect::<BTreeSet<_>>().len() != f.joints.len() {
            return Err(Error::Config("features.joints has duplicates".into()));
        }
        let split = f.split();
        split.validate().map_err(config_err)?;
        split.level_rows(cwt.scales.len()).map_err(config_err)?;
        if self.som.rows * self.som.cols < 2 {
            return Err(Error::Config("map needs at least two nodes".into()));
        }
        self.som.schedule(self.seed).validate()?;
        let c = &self.clusters;
        if c.threshold.is_some_and(|t| !t.is_finite()) {
            return Err(Error::Config("clusters.threshold must be finite".into()));
        }
        if !(0.0..=100.0).contains(&c.percentile) {
            return Err(Error::Config("clusters.percentile must be within [0, 100]".into()));
        }
        if self.output.dir.as_os_str().is_empty() {
            return Err(Error::Config("output.dir is empty".into()));
        }
        Ok(())
    }
}

/// Scalograms of the selected joint-sides of one subject, in declared order.
pub fn subject_scalograms(subject: &Subject, cwt: &Cwt, joints: &[JointSide]) -> Result<Vec<Scalogram>> {
    let mut keys = joints.to_vec();
    keys.sort();
    keys.iter()
        .map(|&key| {
            let traj = subject
                .trajectory(key)
                .ok_or_else(|| Error::schema(format!("subject {} has no {key} trajectory", subject.id())))?;
            Ok(cwt.transform(traj)?.with_subject(subject.id()))
        })
        .collect()
}

/// One combined feature vector per subject.
pub fn featurize(subjects: &[Subject], cwt: &Cwt, features: &FeaturesConfig) -> Result<FeatureMatrix> {
    let split = features.split();
    let vectors = subjects
        .par_iter()
        .map(|s| {
            let parts = subject_scalograms(s, cwt, &features.joints)?
                .iter()
                .map(|sc| extract_features(sc, &split))
                .collect::<Result<Vec<_>>>()?;
            let mut fv = combine_joints(parts)?;
            if features.zscore {
                fv = fv.zscored();
            }
            Ok((fv, s.label().clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n_subjects: usize,
    pub feature_dim: usize,
    pub classes: Vec<ClassLabel>,
    pub quantization_error: f64,
    pub threshold: f64,
    pub clusters: usize,
    pub recognition_rate: Option<f64>,
    pub rate_dispersion: Option<f64>,
    pub kappa: Option<f64>,
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "subjects        {}", self.n_subjects)?;
        writeln!(f, "feature length  {}", self.feature_dim)?;
        writeln!(f, "clusters        {} (threshold {:.4})", self.clusters, self.threshold)?;
        match (self.recognition_rate, self.rate_dispersion, self.kappa) {
            (Some(r), Some(d), Some(k)) => {
                writeln!(f, "recognition     {r:.4} +/- {d:.4}")?;
                writeln!(f, "kappa           {k:.4}")
            }
            _ => writeln!(f, "recognition     not evaluated"),
        }
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut w = export::create(path)?;
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, |w| w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e)))
}

pub fn scalogram_stem(sc: &Scalogram) -> String {
    let src = sc.source();
    format!("{}_{}_{}", sc.subject_id().unwrap_or("unnamed"), src.joint, src.side)
}

/// Validates, then runs every stage into `output.dir`. A failed stage leaves a
/// `PIPELINE_FAILED` file naming it next to whatever was already written.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let out = &cfg.output.dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let marker = out.join(FAILURE_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))?;
    }
    let result = run_stages(cfg, out);
    if let Err(e) = &result {
        // Best effort; the original error matters more than a failed marker write.
        let _ = fs::write(&marker, format!("{e}\n"));
    }
    result
}

fn run_stages(cfg: &RunConfig, out: &Path) -> Result<RunSummary> {
    stage("config", write_resolved_config(cfg, out))?;

    let subjects = stage(
        "data",
        match (&cfg.input, &cfg.synth) {
            (Some(input), _) => ingest::ingest(&input.path),
            (None, Some(s)) => generate(&s.spec(cfg.seed)),
            (None, None) => unreachable!("validated"),
        },
    )?;
    stage("data", write_subjects(out, &subjects))?;

    let cwt = cfg.wavelet.cwt()?;
    if cfg.output.scalograms {
        stage("cwt", write_scalograms(&subjects, &cwt, cfg, &out.join("scalograms")))?;
    }

    let fm = stage("features", featurize(&subjects, &cwt, &cfg.features))?;
    stage("features", write_features(&out.join("features.csv"), &fm))?;

    let map = map_stage(&fm, cfg, out)?;
    let report = if cfg.eval.loocv {
        Some(eval_stage(&fm, cfg, out)?)
    } else {
        None
    };

    let summary = RunSummary {
        n_subjects: fm.rows.len(),
        feature_dim: fm.dim(),
        classes: fm
            .rows
            .iter()
            .map(|r| r.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        quantization_error: map.quantization_error,
        threshold: map.threshold,
        clusters: map.clusters,
        recognition_rate: report.as_ref().map(|r| r.recognition_rate),
        rate_dispersion: report.as_ref().map(|r| r.rate_dispersion),
        kappa: report.as_ref().map(|r| r.kappa),
    };
    stage(
        "summary",
        write_text(&out.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n")),
    )?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSummary {
    pub quantization_error: f64,
    pub threshold: f64,
    pub clusters: usize,
}

/// Trains the full-data map and writes it with its U-Matrix, attraction field and clusters.
pub fn map_stage(fm: &FeatureMatrix, cfg: &RunConfig, out: &Path) -> Result<MapSummary> {
    let som_cfg = &cfg.som;
    let map = stage(
        "train",
        SomMap::init(som_cfg.rows, som_cfg.cols, fm.dim(), som_cfg.schedule(cfg.seed), Some(&fm.rows))
            .map(|m| m.with_metric(som_cfg.metric))
            .and_then(|m| m.train(&fm.rows)),
    )?;
    stage("train", write_text(&out.join("som.json"), &(map.to_json()? + "\n")))?;
    let quantization_error = stage("train", map.quantization_error(&fm.rows))?;

    let um = map.umatrix();
    let threshold = match cfg.clusters.threshold {
        Some(t) => t,
        None => stage("umatrix", um.percentile(cfg.clusters.percentile))?,
    };
    let field = attraction_field(&um, cfg.clusters.contour_levels);
    let cl = stage("umatrix", clusters(&um, threshold))?;
    let lm = stage("umatrix", LabeledMap::new(map, &fm.rows))?;
    stage("umatrix", {
        write_file(&out.join("umatrix.csv"), |w| export::write_umatrix_csv(w, &um))
            .and_then(|_| write_file(&out.join("attraction.csv"), |w| export::write_attraction_csv(w, &field)))
            .and_then(|_| write_file(&out.join("contours.csv"), |w| export::write_contours_csv(w, &field)))
            .and_then(|_| write_file(&out.join("clusters.csv"), |w| export::write_clusters_csv(w, &cl, Some(&lm))))
            .and_then(|_| match cfg.output.pgm {
                true => write_file(&out.join("umatrix.pgm"), |w| export::write_pgm(w, um.heights())),
                false => Ok(()),
            })
    })?;
    Ok(MapSummary {
        quantization_error,
        threshold,
        clusters: cl.count,
    })
}

/// Leave-one-out evaluation, written as `eval.json`, `eval.txt` and `confusion.csv`.
pub fn eval_stage(fm: &FeatureMatrix, cfg: &RunConfig, out: &Path) -> Result<EvalReport> {
    let som_cfg = &cfg.som;
    let schedule = som_cfg.schedule(cfg.seed);
    let report = stage(
        "eval",
        loocv_with_metric(&fm.rows, som_cfg.rows, som_cfg.cols, &schedule, som_cfg.metric),
    )?;
    stage("eval", write_report(&report, out))?;
    Ok(report)
}

/// Groups scalograms by subject and builds one combined vector per subject.
/// Subjects keep the order in which they first appear.
pub fn features_from_scalograms(records: Vec<ScalogramRecord>, features: &FeaturesConfig) -> Result<FeatureMatrix> {
    let split = features.split();
    let mut order: Vec<String> = Vec::new();
    let mut by_subject: BTreeMap<String, (Option<ClassLabel>, Vec<Scalogram>)> = BTreeMap::new();
    for rec in records {
        let id = rec
            .scalogram
            .subject_id()
            .ok_or_else(|| Error::schema("scalogram without subject_id"))?
            .to_string();
        if !features.joints.contains(&rec.scalogram.source()) {
            continue;
        }
        let entry = by_subject.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            (rec.label.clone(), Vec::new())
        });
        if entry.0 != rec.label {
            return Err(Error::schema(format!("subject {id} has conflicting labels")));
        }
        entry.1.push(rec.scalogram);
    }
    let vectors = order
        .iter()
        .map(|id| {
            let (label, scalograms) = &by_subject[id];
            let label = label
                .clone()
                .ok_or_else(|| Error::schema(format!("subject {id} has no label")))?;
            if scalograms.len() != features.joints.len() {
                return Err(Error::schema(format!(
                    "subject {id} has {} of the {} selected joint-sides",
                    scalograms.len(),
                    features.joints.len()
                )));
            }
            let parts = scalograms
                .iter()
                .map(|sc| extract_features(sc, &split))
                .collect::<Result<Vec<_>>>()?;
            let mut fv = combine_joints(parts)?;
            if features.zscore {
                fv = fv.zscored();
            }
            Ok((fv, label))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(vectors)
}

/// Echoes `cfg` as `config.resolved.json` in `out`.
pub fn write_resolved_config(cfg: &RunConfig, out: &Path) -> Result<()> {
    write_text(&out.join(RESOLVED_CONFIG), &cfg.to_json()?)
}

pub fn write_subjects(out: &Path, subjects: &[Subject]) -> Result<()> {
    ingest::export_csv(&out.join("subjects.csv"), subjects)
}

pub fn write_features(path: &Path, fm: &FeatureMatrix) -> Result<()> {
    write_file(path, |w| export::write_feature_csv(w, fm))
}

pub fn write_scalograms(subjects: &[Subject], cwt: &Cwt, cfg: &RunConfig, dir: &Path) -> Result<()> {
    let joints = &cfg.features.joints;
    subjects.par_iter().try_for_each(|s| {
        for sc in subject_scalograms(s, cwt, joints)? {
            let stem = scalogram_stem(&sc);
            write_file(&dir.join(format!("{stem}.csv")), |w| {
                export::write_scalogram_csv(w, &sc, Some(s.label()))
            })?;
            if cfg.output.pgm {
                write_file(&dir.join(format!("{stem}.pgm")), |w| export::write_pgm(w, sc.values()))?;
            }
        }
        Ok(())
    })
}

/// `eval.json`, `eval.txt` and `confusion.csv`.
pub fn write_report(report: &EvalReport, out: &Path) -> Result<()> {
    write_text(&out.join("eval.json"), &(serde_json::to_string_pretty(report)? + "\n"))?;
    write_text(&out.join("eval.txt"), &report.to_string())?;
    write_file(&out.join("confusion.csv"), |w| report.write_confusion_csv(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_minimal_toml() {
        let cfg = RunConfig::from_toml_str("[synth]\npreset = \"spastic\"\nn_subjects = 3\n").unwrap();
        assert_eq!(cfg.synth, Some(SynthConfig::Spastic { n_subjects: 3 }));
        assert_eq!(cfg.som.rows, 10);
        assert_eq!(cfg.features.joints, vec![JointSide::new(Joint::Hip, Side::Right)]);
        cfg.validate().unwrap();
    }

    #[test]
    fn full_toml() {
        let text = r#"
seed = 9
[synth]
preset = "laterality"
n_subjects = 4
[wavelet]
nu0 = 1.2
scales = [1.0, 2.0, 4.0, 8.0, 16.0, 20.0, 22.0, 25.0]
boundary = "periodic"
quadrature = { kind = "signal_grid" }
[features]
joints = ["hip:left", "hip:right"]
level = "low"
scales_per_level = 6
[som]
rows = 3
cols = 4
kernel = "bubble"
alpha = { kind = "constant", value = 0.1 }
[clusters]
threshold = 0.5
[output]
dir = "elsewhere"
pgm = false
"#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.wavelet.cwt().unwrap().scales.len(), 8);
        assert_eq!(cfg.som.schedule(cfg.seed).rng_seed, 9);
        let back: RunConfig = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_catches_bad_sections() {
        let bad = [
            "",
            "[input]\npath = \"/no/such/file.csv\"\n",
            "[synth]\npreset = \"spastic\"\nn_subjects = 0\n",
            "[synth]\npreset = \"spastic\"\nn_subjects = 2\n[wavelet]\nnu0 = 0.5\n",
            "[synth]\npreset = \"spastic\"\nn_subjects = 2\n[features]\njoints = []\n",
            "[synth]\npreset = \"spastic\"\nn_subjects = 2\n[features]\nscales_per_level = 13\n",
            "[synth]\npreset = \"spastic\"\nn_subjects = 2\n[som]\nrows = 1\ncols = 1\n",
            "[synth]\npreset = \"spastic\"\nn_subjects = 2\n[clusters]\npercentile = 120\n",
        ];
        for text in bad {
            let cfg = RunConfig::from_toml_str(text).unwrap();
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{text}");
        }
        assert!(RunConfig::from_toml_str("colour = 3\n").is_err());
    }
}
