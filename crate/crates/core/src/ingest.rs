//! Dataset ingestion and canonical export.
//!
//! The tabular format has one row per (subject, joint, side, grid point):
//!
//! ```text
//! subject_id,label,joint,side,pct,angle_deg
//! s01,Normal,hip,right,0,34
//! ```
//!
//! A JSON manifest carrying inline sample arrays is accepted as well.
//! Trajectories on any uniform grid are resampled to [`CANONICAL_GRID`].

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{
    grid_pct, ClassLabel, GaitTrajectory, Joint, JointSide, Side, Subject, CANONICAL_GRID,
    MAX_ABS_ANGLE, MIN_GRID,
};

pub const CSV_HEADER: [&str; 6] = ["subject_id", "label", "joint", "side", "pct", "angle_deg"];

const GRID_TOLERANCE: f64 = 1e-6;

/// Reads a dataset, picking the format from the file extension
/// (`.json` for manifests, anything else is CSV).
pub fn ingest(path: &Path) -> Result<Vec<Subject>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => ingest_json(path),
        _ => ingest_csv(path),
    }
}

pub fn ingest_csv(path: &Path) -> Result<Vec<Subject>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}

pub fn ingest_json(path: &Path) -> Result<Vec<Subject>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_json(file)
}

struct PendingSubject {
    label: ClassLabel,
    label_row: usize,
    // (pct, angle, row) per trajectory
    points: BTreeMap<JointSide, Vec<(f64, f64, usize)>>,
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Subject>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let columns: Vec<&str> = headers.iter().collect();
    if columns != CSV_HEADER {
        return Err(Error::schema(format!(
            "expected header {:?}, found {:?}",
            CSV_HEADER.join(","),
            columns.join(",")
        )));
    }

    let mut order: Vec<String> = Vec::new();
    let mut pending: HashMap<String, PendingSubject> = HashMap::new();

    for result in rdr.records() {
        let record = result.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::Parse {
                row,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse_err = |message: String| Error::Parse { row, message };

        let subject_id = &record[0];
        if subject_id.is_empty() {
            return Err(parse_err("empty subject_id".into()));
        }
        let label_field = &record[1];
        if label_field.is_empty() {
            return Err(Error::schema(format!(
                "row {row}: missing label for subject {subject_id}"
            )));
        }
        let label: ClassLabel = label_field.parse()?;
        let joint: Joint = record[2].parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let side: Side = record[3].parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let pct: f64 = record[4]
            .parse()
            .map_err(|_| parse_err(format!("bad pct {:?}", &record[4])))?;
        let angle: f64 = record[5]
            .parse()
            .map_err(|_| parse_err(format!("bad angle {:?}", &record[5])))?;
        if !pct.is_finite() || !(0.0..=100.0).contains(&pct) {
            return Err(parse_err(format!("pct {pct} outside [0, 100]")));
        }
        if !angle.is_finite() || angle.abs() > MAX_ABS_ANGLE {
            return Err(parse_err(format!("angle {angle} is not a valid angle")));
        }

        let entry = pending.entry(subject_id.to_string()).or_insert_with(|| {
            order.push(subject_id.to_string());
            PendingSubject {
                label: label.clone(),
                label_row: row,
                points: BTreeMap::new(),
            }
        });
        if entry.label != label {
            return Err(Error::schema(format!(
                "row {row}: subject {subject_id} labelled {label} but row {} says {}",
                entry.label_row, entry.label
            )));
        }
        entry
            .points
            .entry(JointSide::new(joint, side))
            .or_default()
            .push((pct, angle, row));
    }

    order
        .into_iter()
        .map(|id| {
            let p = pending.remove(&id).expect("subject recorded in order");
            let trajectories = p
                .points
                .into_iter()
                .map(|(key, mut pts)| {
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let pcts: Vec<f64> = pts.iter().map(|p| p.0).collect();
                    check_uniform_grid(&id, key, &pcts)?;
                    let angles = pts.into_iter().map(|p| p.1).collect();
                    canonical_trajectory(key, angles)
                })
                .collect::<Result<Vec<_>>>()?;
            Subject::new(id, p.label, trajectories)
        })
        .collect()
}

fn check_uniform_grid(id: &str, key: JointSide, pcts: &[f64]) -> Result<()> {
    let n = pcts.len();
    if n < MIN_GRID {
        return Err(Error::schema(format!(
            "subject {id} {key}: {n} grid points, need at least {MIN_GRID}"
        )));
    }
    for (k, &p) in pcts.iter().enumerate() {
        let expected = grid_pct(k, n);
        if (p - expected).abs() > GRID_TOLERANCE {
            return Err(Error::schema(format!(
                "subject {id} {key}: non-uniform grid, point {k} is at {p}% (expected {expected}%)"
            )));
        }
    }
    Ok(())
}

fn canonical_trajectory(key: JointSide, angles: Vec<f64>) -> Result<GaitTrajectory> {
    GaitTrajectory::new(key.joint, key.side, angles)?.resample(CANONICAL_GRID)
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestSubject {
    subject_id: String,
    label: String,
    #[serde(default)]
    meta: BTreeMap<String, String>,
    trajectories: Vec<ManifestTrajectory>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestTrajectory {
    joint: String,
    side: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pct: Option<Vec<f64>>,
    angle_deg: Vec<f64>,
}

pub fn read_json<R: Read>(reader: R) -> Result<Vec<Subject>> {
    let manifest: Vec<ManifestSubject> = serde_json::from_reader(reader)?;
    manifest
        .into_iter()
        .map(|m| {
            if m.label.trim().is_empty() {
                return Err(Error::schema(format!(
                    "subject {}: missing label",
                    m.subject_id
                )));
            }
            let label: ClassLabel = m.label.parse()?;
            let trajectories = m
                .trajectories
                .into_iter()
                .map(|t| {
                    let key = JointSide::new(t.joint.parse()?, t.side.parse()?);
                    if let Some(pct) = &t.pct {
                        if pct.len() != t.angle_deg.len() {
                            return Err(Error::schema(format!(
                                "subject {} {key}: {} pct values for {} angles",
                                m.subject_id,
                                pct.len(),
                                t.angle_deg.len()
                            )));
                        }
                        check_uniform_grid(&m.subject_id, key, pct)?;
                    } else if t.angle_deg.len() < MIN_GRID {
                        return Err(Error::schema(format!(
                            "subject {} {key}: {} samples, need at least {MIN_GRID}",
                            m.subject_id,
                            t.angle_deg.len()
                        )));
                    }
                    canonical_trajectory(key, t.angle_deg)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Subject::new(m.subject_id, label, trajectories)?.with_meta(m.meta))
        })
        .collect()
}

/// Writes subjects in the tabular schema, trajectories in declared order.
/// Values use the shortest round-trip decimal form, so re-ingesting a
/// canonical-grid export reproduces the same data bit-for-bit.
pub fn write_csv<W: Write>(writer: W, subjects: &[Subject]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(CSV_HEADER)?;
    for subject in subjects {
        let label = subject.label().to_string();
        for traj in subject.trajectories() {
            let n = traj.grid_size();
            for (k, angle) in traj.samples().iter().enumerate() {
                wtr.write_record([
                    subject.id(),
                    label.as_str(),
                    traj.joint().as_str(),
                    traj.side().as_str(),
                    &grid_pct(k, n).to_string(),
                    &angle.to_string(),
                ])?;
            }
        }
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn export_csv(path: &Path, subjects: &[Subject]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), subjects)
}
