//! `cuspwave opalg verify` and `cuspwave opalg commutator`.

use crate::config::RunConfig;
use crate::probe_cmd::parse_pair;
use crate::{CliError, Result};
use cuspwave_opalg::catalog::write_report_csv;
use cuspwave_opalg::{catalog_verify, mixed_verify, parse, CatalogRow, Form};
use std::path::PathBuf;

#[derive(Debug)]
pub struct OpalgOutcome {
    pub rows: Vec<CatalogRow>,
    pub csv: String,
    pub summary: String,
    pub out_dir: PathBuf,
}

impl OpalgOutcome {
    pub fn failures(&self) -> Vec<&CatalogRow> {
        self.rows.iter().filter(|r| !r.passes()).collect()
    }

    /// Nonzero exit iff some explicit identity fails, or the control passes.
    pub fn check(&self) -> Result<()> {
        let bad = self.failures();
        if bad.is_empty() {
            return Ok(());
        }
        let names: Vec<String> = bad.iter().map(|r| format!("{} ({})", r.name, r.form)).collect();
        Err(CliError::Verification(format!(
            "{} catalog rows fail: {}",
            bad.len(),
            names.join("; ")
        )))
    }
}

pub fn verify(cfg: &RunConfig) -> Result<OpalgOutcome> {
    let m: i64 = cfg.get("m", 2)?;
    let n: usize = cfg.get("n", 2)?;
    let pair = cfg.opt::<String>("pair")?.map(|p| parse_pair(&p)).transpose()?;
    let out = cfg.out_dir("out/opalg");

    let rows = catalog_verify(m, n)?;
    let mut csv = Vec::new();
    write_report_csv(&mut csv, &m.to_string(), n, &rows).map_err(|e| CliError::io(&out, e))?;
    let mut all = rows;
    if let Some((m1, m2)) = pair {
        let mixed = mixed_verify(i64::from(m1), i64::from(m2), n)?;
        let mut extra = Vec::new();
        write_report_csv(&mut extra, &format!("{m1}/{m2}"), n, &mixed).map_err(|e| CliError::io(&out, e))?;
        // drop the repeated header
        let text = String::from_utf8_lossy(&extra).into_owned();
        csv.extend(text.lines().skip(1).flat_map(|l| format!("{l}\n").into_bytes()));
        all.extend(mixed);
    }
    let csv = String::from_utf8(csv).expect("report is UTF-8");
    let summary = summarize(&all, m, n, pair);

    crate::create_dir(&out)?;
    crate::write_file(&out.join("report.csv"), &csv)?;
    crate::write_file(&out.join("summary.txt"), &summary)?;
    let failing = all.iter().filter(|r| !r.passes()).count();
    cfg.write_manifest(
        &out,
        &[("rows", all.len().to_string()), ("failing_rows", failing.to_string())],
    )?;
    Ok(OpalgOutcome {
        rows: all,
        csv,
        summary,
        out_dir: out,
    })
}

fn summarize(rows: &[CatalogRow], m: i64, n: usize, pair: Option<(u32, u32)>) -> String {
    let count = |form: Form| rows.iter().filter(|r| r.form == form).count();
    let pass = |form: Form| rows.iter().filter(|r| r.form == form && r.passes()).count();
    let mut s = format!("operator catalog, m = {m}, n = {n}");
    if let Some((a, b)) = pair {
        s.push_str(&format!(", mixed pair ({a}, {b})"));
    }
    s.push('\n');
    for form in [Form::Stated, Form::Corrected, Form::Control] {
        s.push_str(&format!("  {:<9} {}/{} hold\n", form.to_string(), pass(form), count(form)));
    }
    for r in rows.iter().filter(|r| !r.passes()) {
        s.push_str(&format!("  FAIL [{}] {} ({}): {}", r.group, r.name, r.form, r.status));
        if r.residual_terms > 0 {
            s.push_str(&format!(", residual has {} terms", r.residual_terms));
        }
        s.push('\n');
    }
    s
}

/// `[A, B]` for two operators in the DSL.
pub fn commutator(a: &str, b: &str, n: usize) -> Result<String> {
    let a = parse(a, n)?;
    let b = parse(b, n)?;
    Ok(a.commutator(&b).to_string())
}
