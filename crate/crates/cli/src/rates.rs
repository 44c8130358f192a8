//! `cuspwave rates`: fitted small-time exponents of the linear estimates.
//!
//! The propagator entries use ring data, a smooth radial profile in
//! frequency supported on `|ξ| ∈ [ρ_lo, ρ_hi]`, so that the asymptotic
//! regime `t^{(m+2)/2}ρ ≫ 1` covers the whole fitting window.

use crate::config::RunConfig;
use crate::{CliError, Result};
use cuspwave::initial_data::InitialDataSpec;
use cuspwave::linear::Propagators;
use cuspwave::probe::{fit_power_law, gnuplot_fit, s1_max, s2_max, EstimateCatalog, EstimateFit};
use cuspwave::{Field, Grid};
use num_complex::Complex64;
use std::path::PathBuf;

pub const ENTRIES: [&str; 4] = ["propagator-v1", "propagator-v2", "log-squared", "a1-bounded"];

#[derive(Debug, Clone)]
pub struct RateRow {
    pub id: String,
    pub expected: f64,
    pub fit: EstimateFit,
    pub window: (f64, f64),
    pub accepted: bool,
    /// `(abscissa, value)` pairs behind the fit.
    pub samples: Vec<(f64, f64)>,
    /// Largest `max|u| / (1 + |ln t|)²` over the window, log entries only.
    pub log_ratio_sup: Option<f64>,
}

#[derive(Debug)]
pub struct RatesOutcome {
    pub rows: Vec<RateRow>,
    pub out_dir: PathBuf,
}

impl RatesOutcome {
    pub fn row(&self, id: &str) -> Option<&RateRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn check(&self) -> Result<()> {
        let bad: Vec<String> = self
            .rows
            .iter()
            .filter(|r| !r.accepted)
            .map(|r| format!("{} (expected {:.4}, fitted {:.4})", r.id, r.expected, r.fit.exponent))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CliError::Verification(format!("rejected fits: {}", bad.join(", "))))
        }
    }
}

fn log_space(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// `exp(1 − 1/(1 − s²))` on `|s| < 1`.
fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

pub fn ring_data(grid: &Grid, rho_lo: f64, rho_hi: f64) -> Field {
    let c = 0.5 * (rho_lo + rho_hi);
    let w = 0.5 * (rho_hi - rho_lo);
    Field::from_spectral_fn(grid, |xi| {
        let rho = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        Complex64::new(bump((rho - c) / w), 0.0)
    })
}

/// Start of the window where `2t^{(m+2)/2}ρ_lo/(m+2) ≥ 10`.
pub fn asymptotic_start(m: u32, rho_lo: f64) -> f64 {
    let k = f64::from(m) + 2.0;
    (10.0 * k / (2.0 * rho_lo)).powf(2.0 / k)
}

pub fn run(cfg: &RunConfig) -> Result<RatesOutcome> {
    let m: u32 = cfg.get("m", 1)?;
    if m == 0 {
        return Err(cuspwave::Error::Parameter("m must be at least 1, got 0".into()).into());
    }
    let entries: Vec<String> = cfg.list("entries", &ENTRIES.join(","))?;
    for e in &entries {
        if !ENTRIES.contains(&e.as_str()) {
            return Err(CliError::Config(format!("unknown rates entry `{e}` ({})", ENTRIES.join(", "))));
        }
    }
    let s1: f64 = cfg.get("s1", s1_max(m))?;
    let s2: f64 = cfg.get("s2", s2_max(m))?;
    let s: f64 = cfg.get("s", 0.0)?;
    let samples: usize = cfg.get("samples", 24)?;
    if samples < 5 {
        return Err(cuspwave::Error::Domain(format!("need at least 5 samples per fit, got {samples}")).into());
    }
    let out = cfg.out_dir("out/rates");
    // thresholds of the other catalog entries only need to be admissible
    let catalog = EstimateCatalog::new(m, s1, s2, 0.0, 0.0, 2.0, 0.0)?;
    let mut rows = Vec::new();

    let wants = |id: &str| entries.iter().any(|e| e == id);
    if wants("propagator-v1") || wants("propagator-v2") {
        let size: usize = cfg.get("size", 8192)?;
        let l: f64 = cfg.get("L", 8.0)?;
        let grid = Grid::new(&[size], l)?;
        let rho_max = grid.frequency_magnitudes().into_iter().fold(0.0, f64::max);
        let rho_lo: f64 = cfg.get("ring_lo", (rho_max / 4.0).round())?;
        let rho_hi: f64 = cfg.get("ring_hi", (0.6 * rho_max).round())?;
        if !(0.0 < rho_lo && rho_lo < rho_hi && rho_hi <= rho_max) {
            return Err(CliError::Config(format!(
                "ring [{rho_lo}, {rho_hi}] must lie inside (0, {rho_max}]"
            )));
        }
        let t_hi: f64 = cfg.get("t_max", 1.0)?;
        let t_lo: f64 = cfg.get("t_min", asymptotic_start(m, rho_lo))?;
        let ts = log_space(t_lo, t_hi, samples);
        let mut times = vec![0.0];
        times.extend(&ts);
        let g = ring_data(&grid, rho_lo, rho_hi);
        let zero = Field::zeros(&grid, cuspwave::Space::Spectral);
        let props = Propagators::new(m, &grid, &times)?;
        for (id, gain, hom) in [
            ("propagator-v1", s1, props.homogeneous(&g, &zero)?),
            ("propagator-v2", s2, props.homogeneous(&zero, &g)?),
        ] {
            if !wants(id) {
                continue;
            }
            let values = hom.snapshots()[1..]
                .iter()
                .map(|f| f.sobolev_norm(s + gain))
                .collect::<cuspwave::Result<Vec<_>>>()?;
            let fit = fit_power_law(&ts, &values)?;
            let entry = catalog.get(id).expect("catalog entry");
            rows.push(RateRow {
                id: id.into(),
                expected: entry.exponent,
                accepted: entry.accepts(&fit),
                fit,
                window: (t_lo, t_hi),
                samples: ts.iter().copied().zip(values).collect(),
                log_ratio_sup: None,
            });
        }
    }

    let t_lo: f64 = cfg.get("log_t_min", 1e-3)?;
    let log_ts = log_space(t_lo, 1.0, samples.max(8));
    if wants("log-squared") {
        let size: usize = cfg.get("log_size", 256)?;
        let l: f64 = cfg.get("log_L", 4.0)?;
        let grid = Grid::cube(2, size, l)?;
        let spec = InitialDataSpec::parse(
            "family = A2\nslots = 2\n\
             slot0.radial = bump center=0,0 width=1 amp=1\nslot0.angular = 1 ; 0.5 w1\n\
             slot1.radial = bump center=0,0 width=1 amp=1\nslot1.angular = 1 ; 0.5 w1\n",
        )?;
        rows.push(log_entry(cfg, "log-squared", m, &grid, &spec, &log_ts, 2.0, 2.2)?);
    }
    if wants("a1-bounded") {
        let size: usize = cfg.get("a1_size", 1024)?;
        let l: f64 = cfg.get("a1_L", 8.0)?;
        let grid = Grid::new(&[size], l)?;
        let spec = InitialDataSpec::parse(
            "family = A1\nslots = 2\n\
             slot0.right = bump center=0 width=2 amp=1\nslot0.left = zero\n\
             slot1.right = bump center=0 width=2 amp=1\nslot1.left = zero\n",
        )?;
        rows.push(log_entry(cfg, "a1-bounded", m, &grid, &spec, &log_ts, 0.0, 0.5)?);
    }

    crate::create_dir(&out)?;
    let mut csv = String::from("id,expected,fitted,r2,t_min,t_max,accepted\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.id, r.expected, r.fit.exponent, r.fit.r2, r.window.0, r.window.1, r.accepted
        ));
        let mut samples = String::from("abscissa,value\n");
        for (x, v) in &r.samples {
            samples.push_str(&format!("{x},{v}\n"));
        }
        crate::write_file(&out.join(format!("samples_{}.csv", r.id)), &samples)?;
    }
    crate::write_file(&out.join("fits.csv"), &csv)?;
    crate::write_file(&out.join("fits.gp"), &gnuplot_fit("fits.csv", "fits.png"))?;
    let result: Vec<(&str, String)> = rows
        .iter()
        .map(|r| (r.id.as_str(), format!("fitted {} expected {} accepted {}", r.fit.exponent, r.expected, r.accepted)))
        .collect();
    cfg.write_manifest(&out, &result)?;
    Ok(RatesOutcome { rows, out_dir: out })
}

/// Fit of `max|u(t)|` against `|ln t|` on `t ≤ e^{-1}`; accepted when the
/// exponent stays below `bound`.
#[allow(clippy::too_many_arguments)]
fn log_entry(
    cfg: &RunConfig,
    id: &str,
    m: u32,
    grid: &Grid,
    spec: &InitialDataSpec,
    ts: &[f64],
    expected: f64,
    bound: f64,
) -> Result<RateRow> {
    cfg.note(&format!("{id}.bound"), bound);
    let mut times = vec![0.0];
    times.extend(ts);
    let props = Propagators::new(m, grid, &times)?;
    let hom = props.homogeneous(&spec.field(0, grid)?, &spec.field(1, grid)?)?;
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    let mut sup: f64 = 0.0;
    for (t, f) in ts.iter().zip(&hom.snapshots()[1..]) {
        let v = f.to_physical().max_abs();
        let lt = t.ln().abs();
        sup = sup.max(v / (1.0 + lt).powi(2));
        if *t <= (-1.0f64).exp() {
            xs.push(lt);
            vals.push(v);
        }
    }
    let fit = fit_power_law(&xs, &vals)?;
    Ok(RateRow {
        id: id.into(),
        expected,
        accepted: fit.exponent <= bound,
        fit,
        window: (ts[0], (-1.0f64).exp()),
        samples: xs.into_iter().zip(vals).collect(),
        log_ratio_sup: Some(sup),
    })
}
