//! `cuspwave probe`: ridges, surface alignment and conormal scans of a
//! trajectory written by `cuspwave solve`.

use crate::config::{RunConfig, MANIFEST};
use crate::{CliError, Result};
use cuspwave::keyvalue::KeyValues;
use cuspwave::probe::{
    conormal_scan, gnuplot_ridges, gnuplot_scan, gradient_away_from, ridge_extract_with_threshold,
    surface_distance, write_ridges_csv, write_scan_csv, CharSurface, RidgePoint, ScanRow, Sign,
    SurfaceKind, VectorFieldId,
};
use cuspwave::semilinear::finite_difference_dt;
use cuspwave::spectral::import_trajectory;
use cuspwave::{Field, SpectralTrajectory};
use rayon::prelude::*;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct ProbeOutcome {
    pub trajectory: SpectralTrajectory,
    pub surfaces: Vec<CharSurface>,
    /// Ridge points of the last snapshot.
    pub final_ridges: Vec<RidgePoint>,
    /// Per surface: label and distance (in grid cells) to the nearest final ridge.
    pub alignment: Vec<(String, f64)>,
    /// Mean `|∇u|` away from all surfaces over the largest final ridge strength.
    pub away_ratio: f64,
    pub scan: Vec<ScanRow>,
    pub control: Vec<ScanRow>,
    pub out_dir: PathBuf,
}

pub fn surface_label(s: &CharSurface) -> String {
    match (s.kind(), s.sign()) {
        (SurfaceKind::GammaPM, Some(Sign::Plus)) => format!("gamma+ m={}", s.m()),
        (SurfaceKind::GammaPM, _) => format!("gamma- m={}", s.m()),
        (SurfaceKind::Gamma, _) => format!("gamma m={}", s.m()),
        (SurfaceKind::Gamma0, _) => "gamma0".into(),
        (SurfaceKind::L0, _) => "l0".into(),
        (SurfaceKind::Sigma0, _) => "sigma0".into(),
    }
}

/// Load a trajectory directory; `∂t` snapshots come from finite differences.
pub fn load_trajectory(dir: &Path) -> Result<SpectralTrajectory> {
    if !dir.is_dir() {
        return Err(CliError::Config(format!("trajectory directory {} does not exist", dir.display())));
    }
    let (times, fields) = import_trajectory(dir)?;
    let grid = fields[0].grid().clone();
    let snaps: Vec<Field> = fields.iter().map(Field::to_spectral).collect();
    if times.len() < 5 {
        return Err(cuspwave::Error::Format(format!("need at least 5 snapshots, found {}", times.len())).into());
    }
    let h = times[1] - times[0];
    let dt = finite_difference_dt(&snaps, h)?;
    Ok(SpectralTrajectory::new(grid, times, snaps, dt)?)
}

fn surfaces_for(family: &str, n: usize, m: u32, pair: Option<(u32, u32)>) -> Result<Vec<CharSurface>> {
    let radial = family.eq_ignore_ascii_case("a2") && n > 1;
    let cusp = |m: u32| -> Result<Vec<CharSurface>> {
        Ok(if radial {
            vec![CharSurface::gamma(m)?]
        } else {
            vec![CharSurface::gamma_pm(m, Sign::Minus)?, CharSurface::gamma_pm(m, Sign::Plus)?]
        })
    };
    Ok(match pair {
        Some((m1, m2)) => {
            let mut v = cusp(m1)?;
            v.extend(cusp(m2)?);
            v
        }
        None => {
            let mut v = cusp(m)?;
            v.push(if radial { CharSurface::l0() } else { CharSurface::gamma0() });
            v
        }
    })
}

fn default_fields(n: usize, radial: bool) -> String {
    if radial {
        let mut f = vec!["V0".to_string()];
        for i in 1..=n {
            for j in i + 1..=n {
                f.push(format!("L:{i},{j}"));
            }
        }
        f.join(";")
    } else {
        "Vhalf".into()
    }
}

fn parse_fields(src: &str, m: u32) -> Result<Vec<VectorFieldId>> {
    src.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| VectorFieldId::parse(s, m).map_err(CliError::from))
        .collect()
}

/// Keep ridges only in snapshots that are not numerically smooth: the
/// spectrum above a quarter of the resolved band must carry more than
/// `tail` of the `L²` norm. Smooth data decays faster than any power and
/// leaves nothing there.
fn rough_only(traj: &SpectralTrajectory, points: Vec<RidgePoint>, tail: f64) -> Vec<RidgePoint> {
    let grid = traj.grid();
    let rho = grid.frequency_magnitudes();
    let cut = 0.25 * rho.iter().copied().fold(0.0, f64::max);
    let rough: Vec<bool> = traj
        .snapshots()
        .par_iter()
        .map(|f| {
            let f = f.to_spectral();
            let (mut hi, mut all) = (0.0, 0.0);
            for (v, r) in f.values().iter().zip(&rho) {
                all += v.norm_sqr();
                if *r > cut {
                    hi += v.norm_sqr();
                }
            }
            all > 0.0 && (hi / all).sqrt() > tail
        })
        .collect();
    points.into_iter().filter(|p| rough[p.snapshot]).collect()
}

/// Exponential filter `Π_a exp(−36 (|k_a|/(N_a/3))^order)` inside the
/// dealiased band, zero outside. Spectral derivatives of an unfiltered jump
/// ring over the whole box, and multiplying that ringing by `x` is not small.
pub fn filter_trajectory(traj: &SpectralTrajectory, order: i32) -> Result<SpectralTrajectory> {
    if order <= 0 {
        return Ok(traj.clone());
    }
    let grid = traj.grid().clone();
    let sigma: Vec<f64> = (0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            (0..grid.dim())
                .map(|a| {
                    let k = grid.wavenumber(a, idx[a]).unsigned_abs() as f64 / (grid.sizes()[a] as f64 / 3.0);
                    if k > 1.0 {
                        0.0
                    } else {
                        (-36.0 * k.powi(order)).exp()
                    }
                })
                .product()
        })
        .collect();
    let apply = |fields: &[Field]| -> cuspwave::Result<Vec<Field>> {
        fields
            .par_iter()
            .map(|f| {
                let f = f.to_spectral();
                let v = f.values().iter().zip(&sigma).map(|(v, s)| v * *s).collect();
                Field::new(grid.clone(), v, cuspwave::Space::Spectral)
            })
            .collect()
    };
    let snaps = apply(traj.snapshots())?;
    let dts = apply(traj.dt_snapshots())?;
    Ok(SpectralTrajectory::new(grid.clone(), traj.times().to_vec(), snaps, dts)?)
}

pub fn run(cfg: &RunConfig) -> Result<ProbeOutcome> {
    let traj_dir = PathBuf::from(cfg.string("traj", "out/solve"));
    let solved = match std::fs::read_to_string(traj_dir.join(MANIFEST)) {
        Ok(text) => KeyValues::parse(&text).unwrap_or_default(),
        Err(_) => KeyValues::default(),
    };
    let from_run = |key: &str, default: &str| solved.get(key).unwrap_or(default).to_string();
    let fourth = solved.get("kind") == Some("fourth");
    let pair = match cfg.opt::<String>("pair")? {
        Some(p) => Some(parse_pair(&p)?),
        None if fourth => {
            let m1 = from_run("m1", "2");
            let m2 = from_run("m2", "1");
            cfg.note("pair", format!("{m1},{m2}"));
            Some(parse_pair(&format!("{m1},{m2}"))?)
        }
        None => None,
    };
    let m: u32 = cfg.get("m", from_run("m", &pair.map_or(1, |p| p.0).to_string()).parse().unwrap_or(1))?;
    if m == 0 {
        return Err(cuspwave::Error::Parameter("m must be at least 1, got 0".into()).into());
    }
    let family = cfg.string("family", &from_run("data.family", "A1"));
    let threshold: f64 = cfg.get("threshold", 0.5)?;
    let tail: f64 = cfg.get("tail", 1e-4)?;
    let away: f64 = cfg.get("away", 0.2)?;
    let depth: usize = cfg.get("depth", 2)?;
    let filter_order: i32 = cfg.get("filter_order", 8)?;
    let s: f64 = cfg.get("s", from_run("s_mon", "0").parse().unwrap_or(0.0))?;
    let out = cfg.out_dir(&traj_dir.join("probe").display().to_string());

    let traj = load_trajectory(&traj_dir)?;
    let grid = traj.grid().clone();
    let n = grid.dim();
    let radial = family.eq_ignore_ascii_case("a2") && n > 1;
    let fields = parse_fields(&cfg.string("fields", &default_fields(n, radial)), m)?;
    let control = parse_fields(&cfg.string("control", "D:1"), m)?;
    let surfaces = surfaces_for(&family, n, m, pair)?;

    let ridges = rough_only(&traj, ridge_extract_with_threshold(&traj, threshold)?, tail);
    let last = traj.len() - 1;
    let t_end = traj.times()[last];
    let final_ridges: Vec<RidgePoint> = ridges.iter().filter(|p| p.snapshot == last).cloned().collect();
    let dx = grid.spacing(0);

    let mut alignment = Vec::new();
    for s in &surfaces {
        let mut best = f64::INFINITY;
        for p in &final_ridges {
            best = best.min(surface_distance(s, t_end, &p.x)?);
        }
        alignment.push((surface_label(s), best / dx));
    }
    let (mean_away, _) = gradient_away_from(traj.last(), t_end, &surfaces, away)?;
    let peak = final_ridges.iter().map(|p| p.strength).fold(0.0, f64::max);
    let away_ratio = if peak > 0.0 { mean_away / peak } else { f64::NAN };

    let smoothed = filter_trajectory(&traj, filter_order)?;
    let scan = conormal_scan(&smoothed, &fields, depth, s)?;
    let control_rows: Vec<ScanRow> = conormal_scan(&smoothed, &control, depth, s)?
        .into_iter()
        .filter(|r| !r.word.is_empty())
        .collect();

    crate::create_dir(&out)?;
    let open = |name: &str| -> Result<BufWriter<File>> {
        let p = out.join(name);
        Ok(BufWriter::new(File::create(&p).map_err(|e| CliError::io(&p, e))?))
    };
    write_ridges_csv(open("ridges.csv")?, &ridges)?;
    let mut all_rows = scan.clone();
    all_rows.extend(control_rows.iter().cloned());
    write_scan_csv(open("scan.csv")?, &all_rows)?;
    write_distance_histogram(&out, &ridges, &surfaces, dx)?;
    let mut csv = String::from("surface,nearest_ridge_cells\n");
    for (l, d) in &alignment {
        csv.push_str(&format!("{l},{d}\n"));
    }
    crate::write_file(&out.join("alignment.csv"), &csv)?;
    crate::write_file(&out.join("ridges.gp"), &gnuplot_ridges("ridges.csv", m, "ridges.png"))?;
    crate::write_file(&out.join("scan.gp"), &gnuplot_scan("scan.csv", "scan.png"))?;
    crate::write_file(
        &out.join("distances.gp"),
        "set datafile separator ','\nset terminal pngcairo size 900,600\nset output 'distances.png'\n\
         set style fill solid 0.6\nset xlabel 'distance to nearest surface (cells)'\nset ylabel 'ridge points'\n\
         plot 'distances.csv' using (($1+$2)/2):3 skip 1 with boxes title 'ridge points'\n",
    )?;

    let mut result: Vec<(&str, String)> = vec![
        ("t_end", t_end.to_string()),
        ("ridge_points", ridges.len().to_string()),
        ("final_ridge_points", final_ridges.len().to_string()),
        ("away_gradient_ratio", away_ratio.to_string()),
    ];
    let labels: Vec<String> = alignment.iter().map(|(l, d)| format!("{l}: {d:.3}")).collect();
    result.push(("alignment_cells", labels.join("; ")));
    cfg.write_manifest(&out, &result)?;
    Ok(ProbeOutcome {
        trajectory: traj,
        surfaces,
        final_ridges,
        alignment,
        away_ratio,
        scan,
        control: control_rows,
        out_dir: out,
    })
}

fn write_distance_histogram(
    out: &Path,
    ridges: &[RidgePoint],
    surfaces: &[CharSurface],
    dx: f64,
) -> Result<()> {
    const BINS: usize = 20;
    let mut counts = [0usize; BINS + 1];
    for p in ridges {
        let mut best = f64::INFINITY;
        for s in surfaces {
            best = best.min(surface_distance(s, p.t, &p.x)?);
        }
        let cells = best / dx;
        let bin = if cells.is_finite() { (cells.floor() as usize).min(BINS) } else { BINS };
        counts[bin] += 1;
    }
    let mut csv = String::from("cells_lo,cells_hi,count\n");
    for (b, c) in counts.iter().enumerate() {
        let hi = if b == BINS { "inf".to_string() } else { (b + 1).to_string() };
        csv.push_str(&format!("{b},{hi},{c}\n"));
    }
    crate::write_file(&out.join("distances.csv"), &csv)
}

pub fn parse_pair(src: &str) -> Result<(u32, u32)> {
    let bad = || CliError::Config(format!("expected a pair `m1,m2`, got `{src}`"));
    let (a, b) = src.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}
