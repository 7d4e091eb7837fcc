//! File formats for scalograms, feature matrices and map artifacts.
//!
//! CSV files may start with `# key=value` lines carrying metadata.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::eval::{LabeledMap, LabeledVector};
use crate::features::{FeatureVector, Level, N_TIME_SAMPLES};
use crate::gait::{ClassLabel, JointSide};
use crate::som::{AttractionField, Clusters, UMatrix};
use crate::wavelet::{Boundary, ScaleGrid, Scalogram};

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Splits leading `# key=value` lines from the CSV body.
fn split_meta<R: Read>(mut reader: R) -> Result<(BTreeMap<String, String>, String, usize)> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<csv reader>", e))?;
    let mut meta = BTreeMap::new();
    let mut offset = 0;
    let mut lines = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.trim_end().strip_prefix('#') else {
            break;
        };
        lines += 1;
        offset += line.len();
        if let Some((k, v)) = rest.trim().split_once('=') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok((meta, text[offset..].to_string(), lines))
}

fn write_meta<W: Write>(out: &mut W, pairs: &[(&str, String)]) -> Result<()> {
    for (k, v) in pairs {
        writeln!(out, "# {k}={v}").map_err(|e| Error::io("<csv writer>", e))?;
    }
    Ok(())
}

fn parse_f64(s: &str, row: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse {
        row,
        message: format!("not a number: {s:?}"),
    })
}

fn required<'a>(meta: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    meta.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::schema(format!("missing metadata `{key}`")))
}

/// Data rows tagged with their file line number.
type NumberedRows = Vec<(usize, Vec<String>)>;

/// Reads the CSV body with its header; rows are reported with file line numbers.
fn body_records(body: &str) -> Result<(Vec<String>, NumberedRows)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok((header, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalogramRecord {
    pub scalogram: Scalogram,
    pub label: Option<ClassLabel>,
}

/// One row per scale: `scale,<magnitude at each time column>`.
pub fn write_scalogram_csv<W: Write>(mut out: W, sc: &Scalogram, label: Option<&ClassLabel>) -> Result<()> {
    let mut meta = Vec::new();
    if let Some(id) = sc.subject_id() {
        meta.push(("subject_id", id.to_string()));
    }
    if let Some(l) = label {
        meta.push(("label", l.to_string()));
    }
    meta.push(("joint", sc.source().joint.to_string()));
    meta.push(("side", sc.source().side.to_string()));
    let boundary = match sc.boundary() {
        Boundary::Zero => "zero",
        Boundary::Periodic => "periodic",
    };
    meta.push(("boundary", boundary.to_string()));
    write_meta(&mut out, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["scale".to_string()];
    header.extend(sc.time_axis().iter().map(ToString::to_string));
    w.write_record(&header)?;
    for (s, row) in sc.scales().scales().iter().zip(sc.values().rows()) {
        let mut rec = vec![s.to_string()];
        rec.extend(row.iter().map(ToString::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn read_scalogram_csv<R: Read>(reader: R) -> Result<ScalogramRecord> {
    let (meta, body, skipped) = split_meta(reader)?;
    let source = JointSide::new(required(&meta, "joint")?.parse()?, required(&meta, "side")?.parse()?);
    let (header, rows) = body_records(&body)?;
    let time_axis = header
        .iter()
        .skip(1)
        .map(|h| parse_f64(h, skipped + 1))
        .collect::<Result<Vec<_>>>()?;
    let mut scales = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len() * time_axis.len());
    for (line, rec) in &rows {
        if rec.len() != time_axis.len() + 1 {
            return Err(Error::Parse {
                row: skipped + line,
                message: format!("expected {} fields, found {}", time_axis.len() + 1, rec.len()),
            });
        }
        scales.push(parse_f64(&rec[0], skipped + line)?);
        for v in &rec[1..] {
            values.push(parse_f64(v, skipped + line)?);
        }
    }
    let values = Array2::from_shape_vec((scales.len(), time_axis.len()), values)
        .map_err(|e| Error::schema(e.to_string()))?;
    let boundary = match meta.get("boundary").map(String::as_str) {
        None | Some("zero") => Boundary::Zero,
        Some("periodic") => Boundary::Periodic,
        Some(other) => return Err(Error::schema(format!("unknown boundary {other:?}"))),
    };
    let mut sc = Scalogram::new(values, time_axis, ScaleGrid::new(scales)?, source)?.with_boundary(boundary);
    if let Some(id) = meta.get("subject_id") {
        sc = sc.with_subject(id.clone());
    }
    let label = meta.get("label").map(|l| l.parse()).transpose()?;
    Ok(ScalogramRecord { scalogram: sc, label })
}

/// 8-bit binary PGM, min-max scaled. A constant matrix renders black.
pub fn write_pgm<W: Write>(mut out: W, values: &Array2<f64>) -> Result<()> {
    let (rows, cols) = values.dim();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let pixels: Vec<u8> = values
        .iter()
        .map(|&v| {
            if span > 0.0 {
                ((v - lo) / span * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect();
    let io = |e| Error::io("<pgm writer>", e);
    write!(out, "P5\n{cols} {rows}\n255\n").map_err(io)?;
    out.write_all(&pixels).map_err(io)?;
    out.flush().map_err(io)
}

/// Feature vectors sharing one layout, with their class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub level: Level,
    pub parts: Vec<JointSide>,
    pub rows: Vec<LabeledVector>,
}

impl FeatureMatrix {
    pub fn new(vectors: Vec<(FeatureVector, ClassLabel)>) -> Result<Self> {
        let (first, _) = vectors
            .first()
            .ok_or_else(|| Error::argument("no feature vectors"))?;
        let (level, parts, len) = (first.level, first.parts.clone(), first.len());
        if let Some((bad, _)) = vectors.iter().find(|(v, _)| v.level != level || v.parts != parts || v.len() != len) {
            return Err(Error::argument(format!(
                "feature layout of {:?} differs from the first vector",
                bad.subject_id
            )));
        }
        let rows = vectors
            .into_iter()
            .map(|(v, l)| LabeledVector::from_features(v, l))
            .collect();
        Ok(Self { level, parts, rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.values.len())
    }
}

pub fn write_feature_csv<W: Write>(mut out: W, fm: &FeatureMatrix) -> Result<()> {
    let parts: Vec<String> = fm.parts.iter().map(ToString::to_string).collect();
    write_meta(
        &mut out,
        &[
            ("level", fm.level.to_string()),
            ("parts", parts.join(";")),
            ("time_samples", N_TIME_SAMPLES.to_string()),
            ("layout", "time-major".to_string()),
        ],
    )?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["subject_id".to_string(), "label".to_string()];
    header.extend((0..fm.dim()).map(|i| format!("f{i}")));
    w.write_record(&header)?;
    for r in &fm.rows {
        let mut rec = vec![r.id.clone(), r.label.to_string()];
        rec.extend(r.values.iter().map(ToString::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn read_feature_csv<R: Read>(reader: R) -> Result<FeatureMatrix> {
    let (meta, body, skipped) = split_meta(reader)?;
    let level: Level = required(&meta, "level")?.parse()?;
    let parts = required(&meta, "parts")?
        .split(';')
        .map(str::parse)
        .collect::<Result<Vec<JointSide>>>()?;
    let (header, records) = body_records(&body)?;
    if header.len() < 3 || header[0] != "subject_id" || header[1] != "label" {
        return Err(Error::schema("feature header must start with subject_id,label"));
    }
    let dim = header.len() - 2;
    let mut rows = Vec::with_capacity(records.len());
    for (line, rec) in records {
        let row = skipped + line;
        if rec.len() != dim + 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", dim + 2, rec.len()),
            });
        }
        let values = rec[2..].iter().map(|v| parse_f64(v, row)).collect::<Result<Vec<_>>>()?;
        rows.push(LabeledVector::new(rec[0].clone(), rec[1].parse()?, values));
    }
    if rows.is_empty() {
        return Err(Error::schema("feature file has no rows"));
    }
    Ok(FeatureMatrix { level, parts, rows })
}

pub fn write_umatrix_csv<W: Write>(out: W, um: &UMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "height"])?;
    for ((r, c), h) in um.heights().indexed_iter() {
        w.write_record([r.to_string(), c.to_string(), h.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn write_attraction_csv<W: Write>(out: W, field: &AttractionField) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "dx", "dy"])?;
    for ((r, c), dx) in field.dx.indexed_iter() {
        w.write_record([r.to_string(), c.to_string(), dx.to_string(), field.dy[[r, c]].to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn write_contours_csv<W: Write>(out: W, field: &AttractionField) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "height"])?;
    for (i, h) in field.levels.iter().enumerate() {
        w.write_record([(i + 1).to_string(), h.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Per-node cluster id, plus node label and hit count when a labelled map is given.
pub fn write_clusters_csv<W: Write>(out: W, clusters: &Clusters, labels: Option<&LabeledMap>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "cluster", "label", "hits"])?;
    for (node, a) in clusters.assignment.iter().enumerate() {
        let (label, hits) = match labels {
            Some(lm) => (lm.node_labels()[node].to_string(), lm.hit_count(node).to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            (node / clusters.cols).to_string(),
            (node % clusters.cols).to_string(),
            a.to_string(),
            label,
            hits,
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
