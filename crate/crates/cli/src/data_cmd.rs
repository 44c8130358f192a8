//! `cuspwave data generate|preview`: sample initial data on a grid.

use crate::config::RunConfig;
use crate::solve::{default_data, grid_from};
use crate::{CliError, Result};
use cuspwave::spectral::{write_csv, write_cwgrid_file};
use cuspwave::Field;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataAction {
    Generate,
    Preview,
}

impl std::str::FromStr for DataAction {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generate" => Ok(Self::Generate),
            "preview" => Ok(Self::Preview),
            other => Err(CliError::Config(format!("unknown data action `{other}` (generate, preview)"))),
        }
    }
}

#[derive(Debug)]
pub struct DataOutcome {
    pub fields: Vec<Field>,
    pub warnings: Vec<String>,
    pub out_dir: PathBuf,
}

pub fn run(cfg: &RunConfig, action: DataAction) -> Result<DataOutcome> {
    let grid = grid_from(cfg, 256, 8.0)?;
    let out = cfg.out_dir("out/data");
    let spec = cfg.data_spec_or(&default_data(grid.dim()))?;
    let warnings = spec.warnings(&grid);
    crate::emit_warnings(cfg.command(), &warnings);
    let fields = (0..spec.slots.len())
        .map(|j| spec.field(j, &grid))
        .collect::<cuspwave::Result<Vec<_>>>()?;

    crate::create_dir(&out)?;
    let mut plots = Vec::new();
    for (j, f) in fields.iter().enumerate() {
        let phys = f.to_physical();
        if action == DataAction::Generate {
            write_cwgrid_file(&out.join(format!("slot{j}.cwgrid")), &phys)?;
        }
        let name = format!("slot{j}.csv");
        let p = out.join(&name);
        write_csv(BufWriter::new(File::create(&p).map_err(|e| CliError::io(&p, e))?), &phys)?;
        plots.push(name);
    }
    crate::write_file(&out.join("preview.gp"), &gnuplot_preview(grid.dim(), &plots))?;
    let mut text = String::new();
    for w in &warnings {
        text.push_str(w);
        text.push('\n');
    }
    crate::write_file(&out.join("warnings.txt"), &text)?;
    cfg.note("action", if action == DataAction::Generate { "generate" } else { "preview" });
    cfg.write_manifest(
        &out,
        &[("slots", fields.len().to_string()), ("warnings", warnings.len().to_string())],
    )?;
    Ok(DataOutcome {
        fields,
        warnings,
        out_dir: out,
    })
}

fn gnuplot_preview(dim: usize, files: &[String]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset terminal pngcairo size 900,600\nset output 'preview.png'\n",
    );
    // CSV columns: grid indices, then the real and imaginary parts
    let plots: Vec<String> = files
        .iter()
        .map(|f| match dim {
            1 => format!("'{f}' using 1:2 skip 1 with lines title '{f}'"),
            _ => format!("'{f}' using 1:2:{} skip 1 with image title '{f}'", dim + 1),
        })
        .collect();
    if dim == 1 {
        s.push_str(&format!("plot {}\n", plots.join(", ")));
    } else {
        s.push_str("set view map\n");
        s.push_str(&format!("plot {}\n", plots.first().cloned().unwrap_or_default()));
    }
    s
}
