//! `cuspwave solve {linear|second|third|fourth}`.

use crate::config::RunConfig;
use crate::{CliError, Result};
use cuspwave::initial_data::InitialDataSpec;
use cuspwave::linear::{FnForcing, Propagators};
use cuspwave::semilinear::{
    fourth_order_residual, solve_fourth_order, solve_second_order, solve_third_order, Nonlinearity,
    PicardConfig, PicardReport,
};
use cuspwave::spectral::export_trajectory;
use cuspwave::{Field, Grid, SpectralTrajectory};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveKind {
    Linear,
    Second,
    Third,
    Fourth,
}

impl std::str::FromStr for SolveKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Self::Linear),
            "second" => Ok(Self::Second),
            "third" => Ok(Self::Third),
            "fourth" => Ok(Self::Fourth),
            other => Err(CliError::Config(format!(
                "unknown solve kind `{other}` (linear, second, third, fourth)"
            ))),
        }
    }
}

impl std::fmt::Display for SolveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Second => "second",
            Self::Third => "third",
            Self::Fourth => "fourth",
        })
    }
}

impl SolveKind {
    fn slots(self) -> usize {
        match self {
            Self::Linear | Self::Second => 2,
            Self::Third => 3,
            Self::Fourth => 4,
        }
    }
}

/// Everything a solve produced, for callers that want more than the files.
#[derive(Debug)]
pub struct SolveOutcome {
    pub kind: SolveKind,
    pub trajectory: SpectralTrajectory,
    pub report: Option<PicardReport>,
    /// `(t, relative residual)` of the factorized fourth-order operator.
    pub residual: Vec<(f64, f64)>,
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
}

impl SolveOutcome {
    /// Mean over the box of the last snapshot, i.e. the zero mode.
    pub fn final_mean(&self) -> f64 {
        field_mean(self.trajectory.last())
    }

    /// Non-convergence becomes an error after the artifacts are written.
    pub fn check(&self) -> Result<()> {
        match &self.report {
            Some(r) if !r.converged => Err(CliError::NonConvergence(format!(
                "Picard iteration stopped after {} iterations at distance {:e} (ratio {:.4})",
                r.iterate_distances.len(),
                r.iterate_distances.last().copied().unwrap_or(f64::NAN),
                r.contraction_ratio
            ))),
            _ => Ok(()),
        }
    }
}

pub fn field_mean(f: &Field) -> f64 {
    let p = f.to_physical();
    p.values().iter().map(|v| v.re).sum::<f64>() / p.values().len() as f64
}

fn positive_m(cfg: &RunConfig, key: &str) -> Result<u32> {
    let m: u32 = cfg.get(key, 1)?;
    if m == 0 {
        return Err(cuspwave::Error::Parameter(format!("{key} must be at least 1, got 0")).into());
    }
    Ok(m)
}

/// Grid from the `n`, `size` and `L` keys.
pub fn grid_from(cfg: &RunConfig, size: usize, half_length: f64) -> Result<Grid> {
    let n: usize = cfg.get("n", 1)?;
    let size: usize = cfg.get("size", size)?;
    let l: f64 = cfg.get("L", half_length)?;
    Ok(Grid::cube(n, size, l)?)
}

pub fn default_data(n: usize) -> String {
    let center = vec!["0"; n].join(",");
    format!("family = smooth\nslots = 1\nslot0.value = bump center={center} width=2 amp=1\n")
}

pub fn run(cfg: &RunConfig, kind: Option<SolveKind>) -> Result<SolveOutcome> {
    let kind = match kind {
        Some(k) => {
            cfg.note("kind", k);
            k
        }
        None => cfg.require::<SolveKind>("kind")?,
    };
    let (m, m2) = if kind == SolveKind::Fourth {
        (positive_m(cfg, "m1")?, positive_m(cfg, "m2")?)
    } else {
        (positive_m(cfg, "m")?, 0)
    };
    let grid = grid_from(cfg, 256, 8.0)?;
    let picard = PicardConfig {
        t_end: cfg.get("T", 1.0)?,
        n_t: cfg.get("n_t", 257)?,
        max_iters: cfg.get("max_iters", 50)?,
        tol: cfg.get("tol", 1e-10)?,
        s_mon: cfg.get("s_mon", 0.0)?,
    };
    picard.validate()?;
    let f = Nonlinearity::parse(&cfg.string("f", "const:0"))?;
    let s_list: Vec<f64> = cfg.list("s_list", "0")?;
    cfg.get::<u64>("seed", 0)?;
    let out = cfg.out_dir("out/solve");
    let spec: InitialDataSpec = cfg.data_spec_or(&default_data(grid.dim()))?;
    crate::emit_warnings(cfg.command(), &spec.warnings(&grid));
    if spec.slots.len() > kind.slots() {
        return Err(CliError::Config(format!(
            "{kind} solves take {} data slots, the spec has {}",
            kind.slots(),
            spec.slots.len()
        )));
    }
    let data: Vec<Field> = (0..kind.slots())
        .map(|j| spec.field(j, &grid))
        .collect::<cuspwave::Result<_>>()?;

    let times = picard.times();
    let (traj, report) = match kind {
        SolveKind::Linear => (linear(m, &f, &data, &times)?, None),
        SolveKind::Second => {
            let (t, r) = solve_second_order(m, &f, &data[0], &data[1], &picard)?;
            (t, Some(r))
        }
        SolveKind::Third => {
            let (t, r) = solve_third_order(m, &f, &data[0], &data[1], &data[2], &picard)?;
            (t, Some(r))
        }
        SolveKind::Fourth => {
            let psi = [&data[0], &data[1], &data[2], &data[3]];
            let (t, r) = solve_fourth_order(m, m2, &f, psi, &picard)?;
            (t, Some(r))
        }
    };
    let residual = if kind == SolveKind::Fourth {
        fourth_order_residual(m, m2, &f, &traj)?
    } else {
        Vec::new()
    };

    export_trajectory(&out, &traj, &s_list)?;
    let mut result = vec![
        ("snapshots", traj.len().to_string()),
        ("t_end", picard.t_end.to_string()),
        ("zero_mode_at_t_end", field_mean(traj.last()).to_string()),
        ("max_abs_at_t_end", traj.last().to_physical().max_abs().to_string()),
    ];
    if let Some(r) = &report {
        crate::write_file(&out.join("picard.csv"), &r.to_csv())?;
        result.push(("converged", r.converged.to_string()));
        result.push(("iterations", r.iterate_distances.len().to_string()));
        result.push(("contraction_ratio", r.contraction_ratio.to_string()));
    }
    if !residual.is_empty() {
        let worst = residual.iter().map(|p| p.1).fold(0.0, f64::max);
        result.push(("max_residual_interior", worst.to_string()));
        let mut csv = String::from("time,relative_residual\n");
        for (t, r) in &residual {
            csv.push_str(&format!("{t},{r}\n"));
        }
        crate::write_file(&out.join("residual.csv"), &csv)?;
    }
    let manifest = cfg.write_manifest(&out, &result)?;
    Ok(SolveOutcome {
        kind,
        trajectory: traj,
        report,
        residual,
        out_dir: out,
        manifest,
    })
}

/// `u = V1φ0 + V2φ1 + Duhamel(f(t, x, 0))`.
fn linear(m: u32, f: &Nonlinearity, data: &[Field], times: &[f64]) -> Result<SpectralTrajectory> {
    let grid = data[0].grid().clone();
    let props = Propagators::new(m, &grid, times)?;
    let hom = props.homogeneous(&data[0], &data[1])?;
    let zero = Field::zeros(&grid, cuspwave::Space::Physical);
    // parsed nonlinearities do not depend on (t, x)
    if f.evaluate(0.0, &[0.0; 3][..grid.dim()], 0.0) == 0.0 {
        return Ok(hom);
    }
    let forcing = FnForcing::new(&grid, |t| {
        f.apply_snapshot(t, &zero).unwrap_or_else(|_| Field::zeros(&grid, cuspwave::Space::Spectral))
    });
    Ok(hom.add(&props.duhamel(&forcing)?)?)
}
