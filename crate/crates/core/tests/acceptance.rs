//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use gaitsig::eval::{kappa, loocv, LabeledMap, LabeledVector};
use gaitsig::features::{combine_joints, extract_features, split_regions, Level, RegionSplit};
use gaitsig::gait::{ClassLabel, Joint, JointSide, Side, Subject};
use gaitsig::pipeline::{featurize, run_pipeline, FeaturesConfig, RunConfig, SomConfig, SynthConfig};
use gaitsig::som::{clusters, AlphaSchedule, Kernel, NodeCluster, SigmaSchedule, SomMap, TrainSchedule};
use gaitsig::synth::{generate, SynthSpec};
use gaitsig::wavelet::{morlet, Cwt, MorletParams, ScaleGrid};
use ndarray::{array, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const HIP_R: JointSide = JointSide::new(Joint::Hip, Side::Right);
const HIP_L: JointSide = JointSide::new(Joint::Hip, Side::Left);

fn c1_morlet() -> Check {
    let p = MorletParams::default();
    let g0 = morlet(0.0, &p);
    let expect = 1.0 / (2.0 * PI).sqrt();
    ensure((g0.re - expect).abs() <= 1e-12, format!("psi(0) = {}", g0.re))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = rng.random_range(-6.0..6.0);
        let (a, b) = (morlet(t, &p), morlet(-t, &p));
        worst = worst.max((a.re - b.re).abs()).max((a.im + b.im).abs());
    }
    ensure(worst <= 1e-12, format!("parity error {worst:e}"))?;
    Ok(format!("psi(0) = {:.15}, parity error {worst:.1e}", g0.re))
}

/// |W(s, tau)| for a continuous signal by composite Simpson with `n` panels.
fn brute_force(x: impl Fn(f64) -> f64, s: f64, tau: f64, p: &MorletParams, n: usize) -> f64 {
    let lo = (tau - p.truncation_radius * s).max(0.0);
    let hi = (tau + p.truncation_radius * s).min(100.0);
    let h = (hi - lo) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let t = lo + k as f64 * h;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * x(t) * morlet((t - tau) / s, p).conj();
    }
    (acc * h / 3.0).norm() / s.sqrt()
}

fn nearest_bin(scales: &[f64], s: f64) -> usize {
    (0..scales.len())
        .min_by(|&a, &b| (scales[a].ln() - s.ln()).abs().total_cmp(&(scales[b].ln() - s.ln()).abs()))
        .unwrap()
}

fn c2_scale_localization() -> Check {
    let p = MorletParams::default();
    let grid = ScaleGrid::default();
    let scales = grid.scales().to_vec();
    let dense = ScaleGrid::log_spaced(1.0, 25.0, 120).unwrap();
    let cwt = Cwt::new(grid, p);
    let mut report = Vec::new();
    for s_star in [2.0, 4.0, 8.0, 16.0] {
        let x = |t: f64| (2.0 * PI * p.nu0 * t / s_star).cos();
        let samples: Vec<f64> = (0..101).map(|k| x(k as f64)).collect();
        let sc = cwt.transform_samples(&samples).map_err(|e| e.to_string())?;
        // Interior columns, away from the zero-padded edges.
        let cols = 40..=60;
        let energy = |i: usize| cols.clone().map(|c| sc[[i, c]]).sum::<f64>();
        let got = (0..scales.len()).max_by(|&a, &b| energy(a).total_cmp(&energy(b))).unwrap();
        let oracle_s = dense
            .scales()
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let e = |s| cols.clone().map(|c| brute_force(x, s, c as f64, &p, 4000)).sum::<f64>();
                e(a).total_cmp(&e(b))
            })
            .unwrap();
        let target = nearest_bin(&scales, s_star);
        let oracle = nearest_bin(&scales, oracle_s);
        ensure(
            got.abs_diff(target) <= 1 && got.abs_diff(oracle) <= 1,
            format!("s*={s_star}: bin {got}, target {target}, oracle {oracle} (s={oracle_s:.3})"),
        )?;
        report.push(format!("s*={s_star}->bin {got} (oracle s={oracle_s:.2})"));
    }
    Ok(report.join(", "))
}

fn c3_linearity() -> Check {
    let cwt = Cwt::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..101)
        .map(|k| 20.0 * (2.0 * PI * k as f64 / 100.0).sin() + rng.random_range(-3.0..3.0))
        .collect();
    let base = cwt.transform_samples(&x).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for a in [-3.7, -1.0, 0.001, 0.5, 2.0, 1234.5] {
        let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
        let scaled = cwt.transform_samples(&ax).map_err(|e| e.to_string())?;
        for (i, row) in base.rows().into_iter().enumerate() {
            let peak = row.iter().cloned().fold(0.0, f64::max);
            for (c, v) in row.iter().enumerate() {
                let rel = (scaled[[i, c]] - a.abs() * v).abs() / (a.abs() * peak);
                worst = worst.max(rel);
            }
        }
    }
    ensure(worst <= 1e-12, format!("relative error {worst:e}"))?;
    let zero = cwt.transform_samples(&[0.0; 101]).map_err(|e| e.to_string())?;
    ensure(zero.iter().all(|&v| v == 0.0), "zero signal gave non-zero output")?;
    Ok(format!("worst relative error {worst:.1e}, zero signal exact"))
}

fn c4_feature_geometry() -> Check {
    let subjects = generate(&SynthSpec::spastic(1, 4)).map_err(|e| e.to_string())?;
    let s = &subjects[0];
    let cwt = Cwt::default();
    let split = RegionSplit::default();
    let right = cwt.transform(s.trajectory(HIP_R).unwrap()).map_err(|e| e.to_string())?;
    let left = cwt.transform(s.trajectory(HIP_L).unwrap()).map_err(|e| e.to_string())?;
    let fr = extract_features(&right.clone().with_subject(s.id()), &split).map_err(|e| e.to_string())?;
    let fl = extract_features(&left.with_subject(s.id()), &split).map_err(|e| e.to_string())?;
    ensure(fr.len() == 160, format!("single joint length {}", fr.len()))?;
    let both = combine_joints(vec![fl, fr]).map_err(|e| e.to_string())?;
    ensure(both.len() == 320, format!("combined length {}", both.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..10 {
        let f = rng.random_range(0.05..0.95);
        let regions = split_regions(&right, &RegionSplit::new(f, Level::High).unwrap()).map_err(|e| e.to_string())?;
        let mut cover = Array2::<u32>::zeros((right.n_scales(), right.n_times()));
        for r in &regions {
            for i in r.rows.clone() {
                for j in r.cols.clone() {
                    cover[[i, j]] += 1;
                }
            }
        }
        ensure(cover.iter().all(|&c| c == 1), format!("regions do not tile at stance fraction {f}"))?;
    }
    Ok("160 / 320 values, 10 random splits tile exactly".into())
}

fn c5_fixed_point() -> Check {
    let sched = TrainSchedule {
        epochs: 1,
        alpha: AlphaSchedule::Constant { value: 1.0 },
        sigma: SigmaSchedule::Constant { value: 0.0 },
        kernel: Kernel::Bubble,
        ..TrainSchedule::default()
    };
    let x = vec![0.3, -1.7e5, 2.0f64.powi(-40), 123.456, -0.0001];
    let map = SomMap::init::<Vec<f64>>(3, 3, x.len(), sched, None).map_err(|e| e.to_string())?;
    let winner = map.best_match(&x).map_err(|e| e.to_string())?.0;
    let trained = map.train(std::slice::from_ref(&x)).map_err(|e| e.to_string())?;
    let w = trained.weight(winner);
    ensure(
        w.iter().zip(&x).all(|(a, b)| a.to_bits() == b.to_bits()),
        format!("{w:?} != {x:?}"),
    )?;
    Ok(format!("node {winner} equals the input bit for bit"))
}

fn c6_two_clusters() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let radius = 0.5;
    let noise = Normal::new(0.0, radius).unwrap();
    let centers = [[-5.0, 3.0], [15.0, 3.0]];
    let separation = 20.0;
    let data: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            let c = centers[i % 2];
            vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]
        })
        .collect();
    let mut worst: f64 = 0.0;
    let map = SomMap::init(1, 2, 2, TrainSchedule::default().with_seed(6), Some(&data))
        .and_then(|m| m.train(&data))
        .map_err(|e| e.to_string())?;
    for k in 0..2 {
        let members: Vec<&Vec<f64>> = data.iter().skip(k).step_by(2).collect();
        let n = members.len() as f64;
        let mean = [
            members.iter().map(|p| p[0]).sum::<f64>() / n,
            members.iter().map(|p| p[1]).sum::<f64>() / n,
        ];
        let err = (0..2)
            .map(|node| {
                let w = map.weight(node);
                ((w[0] - mean[0]).powi(2) + (w[1] - mean[1]).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(err / separation);
    }
    ensure(worst <= 0.10, format!("weights {:.1}% of separation from the means", 100.0 * worst))?;
    Ok(format!("worst offset {:.2}% of separation", 100.0 * worst))
}

fn c7_umatrix() -> Check {
    // Weights chosen so every distance is a Pythagorean length.
    let w = vec![0.0, 0.0, 3.0, 4.0, 6.0, 8.0, 6.0, 0.0];
    let map = SomMap::from_weights(2, 2, 2, w).map_err(|e| e.to_string())?;
    // d(0,1)=5, d(0,2)=10, d(1,3)=5, d(2,3)=8
    let expect = array![[7.5, 5.0], [9.0, 6.5]];
    let got = map.umatrix();
    ensure(*got.heights() == expect, format!("{:?}", got.heights()))?;
    let flat = SomMap::from_weights(3, 3, 2, vec![4.2; 18]).map_err(|e| e.to_string())?;
    ensure(flat.umatrix().heights().iter().all(|&h| h == 0.0), "flat map has non-zero heights")?;
    Ok("hand-computed heights and flat map match exactly".into())
}

fn c8_kappa() -> Check {
    let k = |m: &[Vec<usize>]| kappa(m).map_err(|e| e.to_string());
    ensure(k(&[vec![7, 0, 0], vec![0, 3, 0], vec![0, 0, 9]])? == 1.0, "diagonal")?;
    ensure(k(&[vec![25, 25], vec![25, 25]])? == 0.0, "uniform")?;
    // p_o = 80/100, p_e = (50*60 + 50*40)/100^2 = 1/2, kappa = 0.3/0.5.
    let (po, pe) = (80.0 / 100.0, (50.0 * 60.0 + 50.0 * 40.0) / 10000.0);
    let oracle: f64 = (po - pe) / (1.0 - pe);
    let got = k(&[vec![45, 5], vec![15, 35]])?;
    ensure((got - 0.6).abs() <= 1e-12 && (got - oracle).abs() <= 1e-12, format!("kappa {got}"))?;
    Ok(format!("1, 0, {got}"))
}

/// Energy of harmonics `from..` of a periodic sample (last sample dropped).
fn dft_energy_from(samples: &[f64], from: usize) -> f64 {
    let x = &samples[..samples.len() - 1];
    let n = x.len();
    (from..n / 2)
        .map(|h| {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, v) in x.iter().enumerate() {
                let a = 2.0 * PI * (h * k) as f64 / n as f64;
                re += v * a.cos();
                im -= v * a.sin();
            }
            re * re + im * im
        })
        .sum()
}

fn hip_high(joints: Vec<JointSide>) -> FeaturesConfig {
    FeaturesConfig {
        joints,
        level: Level::High,
        ..FeaturesConfig::default()
    }
}

fn c9_discrimination() -> Check {
    let seed = 2024;
    let subjects = generate(&SynthSpec::spastic(20, seed)).map_err(|e| e.to_string())?;
    let class_energy = |label: &ClassLabel| {
        let of: Vec<&Subject> = subjects.iter().filter(|s| s.label() == label).collect();
        of.iter()
            .map(|s| dft_energy_from(s.trajectory(HIP_R).unwrap().samples(), 10))
            .sum::<f64>()
            / of.len() as f64
    };
    let ratio = class_energy(&ClassLabel::CpDiplegia) / class_energy(&ClassLabel::Normal);
    ensure(ratio >= 10.0, format!("spectral ratio above harmonic 10 is only {ratio:.1}"))?;
    let fm = featurize(&subjects, &Cwt::default(), &hip_high(vec![HIP_R])).map_err(|e| e.to_string())?;
    let schedule = TrainSchedule::default().with_seed(seed);
    let a = loocv(&fm.rows, 10, 10, &schedule).map_err(|e| e.to_string())?;
    let b = loocv(&fm.rows, 10, 10, &schedule).map_err(|e| e.to_string())?;
    ensure(a == b, "LOOCV is not deterministic")?;
    ensure(
        a.recognition_rate >= 0.90 && a.kappa >= 0.80,
        format!("rate {:.3}, kappa {:.3}", a.recognition_rate, a.kappa),
    )?;
    Ok(format!(
        "spectral ratio {ratio:.1e}, rate {:.3} +/- {:.3}, kappa {:.3}",
        a.recognition_rate, a.rate_dispersion, a.kappa
    ))
}

fn c10_laterality() -> Check {
    let seed = 77;
    let subjects = generate(&SynthSpec::laterality(20, seed)).map_err(|e| e.to_string())?;
    let fm = featurize(&subjects, &Cwt::default(), &hip_high(vec![HIP_R, HIP_L])).map_err(|e| e.to_string())?;
    ensure(fm.dim() == 320, format!("feature length {}", fm.dim()))?;
    let map = SomMap::init(10, 10, fm.dim(), TrainSchedule::default().with_seed(seed), Some(&fm.rows))
        .and_then(|m| m.train(&fm.rows))
        .map_err(|e| e.to_string())?;
    let um = map.umatrix();
    let cl = clusters(&um, um.default_threshold()).map_err(|e| e.to_string())?;
    let lm = LabeledMap::new(map, &fm.rows).map_err(|e| e.to_string())?;
    let of = |label: ClassLabel| -> Vec<&LabeledVector> { fm.rows.iter().filter(|r| r.label == label).collect() };
    let bmus = |rows: &[&LabeledVector]| -> Vec<usize> {
        rows.iter().map(|r| lm.map().best_match(&r.values).unwrap().0).collect()
    };
    let (left, right, sym) = (
        bmus(&of(ClassLabel::CpLeftAsymmetric)),
        bmus(&of(ClassLabel::CpRightAsymmetric)),
        bmus(&of(ClassLabel::CpDiplegia)),
    );
    let cluster_set = |nodes: &[usize]| -> std::collections::BTreeSet<usize> {
        nodes
            .iter()
            .filter_map(|&n| match cl.of(n) {
                NodeCluster::Cluster(id) => Some(id),
                NodeCluster::Border => None,
            })
            .collect()
    };
    let (cl_l, cl_r) = (cluster_set(&left), cluster_set(&right));
    ensure(!cl_l.is_empty() && !cl_r.is_empty(), format!("left {cl_l:?}, right {cl_r:?}"))?;
    ensure(cl_l.is_disjoint(&cl_r), format!("shared clusters: left {cl_l:?}, right {cl_r:?}"))?;
    let cols = lm.map().cols();
    let centroid = |nodes: &[usize]| {
        let n = nodes.len() as f64;
        (
            nodes.iter().map(|&k| (k / cols) as f64).sum::<f64>() / n,
            nodes.iter().map(|&k| (k % cols) as f64).sum::<f64>() / n,
        )
    };
    let (l, r, s) = (centroid(&left), centroid(&right), centroid(&sym));
    let axis = (r.0 - l.0, r.1 - l.1);
    let t = ((s.0 - l.0) * axis.0 + (s.1 - l.1) * axis.1) / (axis.0 * axis.0 + axis.1 * axis.1);
    ensure(t > 0.0 && t < 1.0, format!("symmetric centroid projects to {t:.3} on the left-right axis"))?;
    Ok(format!(
        "{} clusters, left {cl_l:?}, right {cl_r:?}, symmetric at {t:.2} along the axis",
        cl.count
    ))
}

fn files_under(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(files_under(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn c11_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<(String, Vec<u8>)>, String> {
        let dir = tmp.path().join(name);
        let cfg = RunConfig {
            seed: 11,
            synth: Some(SynthConfig::Spastic { n_subjects: 6 }),
            features: hip_high(vec![HIP_R, HIP_L]),
            som: SomConfig {
                rows: 5,
                cols: 5,
                epochs: 60,
                ..SomConfig::default()
            },
            output: gaitsig::pipeline::OutputConfig {
                dir: dir.clone(),
                ..Default::default()
            },
            ..RunConfig::default()
        };
        run_pipeline(&cfg).map_err(|e| e.to_string())?;
        Ok(files_under(&dir)
            .into_iter()
            .map(|p| {
                let rel = p.strip_prefix(&dir).unwrap().display().to_string();
                (rel, std::fs::read(&p).unwrap())
            })
            .collect())
    };
    let (a, b) = (run("a")?, run("b")?);
    let names = |v: &[(String, Vec<u8>)]| v.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    ensure(names(&a) == names(&b), "runs produced different file sets")?;
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        // The resolved config records the output directory, which differs by construction.
        if name == "config.resolved.json" {
            let strip = |v: &[u8]| String::from_utf8_lossy(v).replace("/a\"", "/X\"").replace("/b\"", "/X\"");
            ensure(strip(x) == strip(y), "resolved configs differ")?;
            continue;
        }
        ensure(x == y, format!("{name} differs between runs"))?;
    }
    let kinds = ["csv", "json", "pgm"]
        .iter()
        .map(|ext| format!("{} {ext}", a.iter().filter(|(n, _)| n.ends_with(ext)).count()))
        .collect::<Vec<_>>();
    Ok(format!("{} files identical ({})", a.len(), kinds.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 morlet correctness", c1_morlet),
        ("2 cwt scale localization", c2_scale_localization),
        ("3 cwt linearity and zero signal", c3_linearity),
        ("4 feature geometry", c4_feature_geometry),
        ("5 som update fixed point", c5_fixed_point),
        ("6 som two-cluster oracle", c6_two_clusters),
        ("7 u-matrix oracle", c7_umatrix),
        ("8 kappa oracle", c8_kappa),
        ("9 synthetic discrimination", c9_discrimination),
        ("10 laterality separation", c10_laterality),
        ("11 pipeline determinism", c11_determinism),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
