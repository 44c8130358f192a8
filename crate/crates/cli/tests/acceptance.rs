//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Every criterion is evaluated at its stated tolerance. Criteria listed in
//! `EXPECTED_FAILURES` are known not to hold (see the decisions ledger); they
//! still print FAIL, and the test only asserts the remaining ones.

use cuspwave::initial_data::InitialDataSpec;
use cuspwave::kummer::{imaginary_axis_envelope, KummerParams};
use cuspwave::linear::{relative_l2_error, rk4_oracle, FnForcing, Propagators, ZeroForcing};
use cuspwave::probe::fit_power_law;
use cuspwave::propagator::{ode_residual, sample, Which};
use cuspwave::spectral::uniform_times;
use cuspwave::{Field, Grid};
use cuspwave_cli::config::RunConfig;
use cuspwave_cli::probe_cmd::{self, ProbeOutcome};
use cuspwave_cli::{rates, solve};
use cuspwave_opalg::{catalog_verify, mixed_verify, CatalogRow, Form, RowStatus};
use std::path::Path;

const EXPECTED_FAILURES: [usize; 2] = [12, 13];

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn outcome(id: usize, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn cfg(command: &str, text: &str, out: &Path) -> RunConfig {
    let mut c = RunConfig::from_text(command, text).expect("config parses");
    c.set("out", out.display().to_string());
    c
}

fn propagator_normalization() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    for m in 1..=4 {
        for rho in [0.0, 1.0, 8.0, 64.0] {
            let s = sample(m, 0.0, rho).unwrap();
            for e in [(s.v1 - 1.0).norm(), s.v2.norm(), s.dt_v1.norm(), (s.dt_v2 - 1.0).norm()] {
                worst_norm = worst_norm.max(e);
            }
        }
    }
    let mut worst_w: f64 = 0.0;
    for m in 1..=4 {
        for i in 1..=40 {
            let t = 2.0 * i as f64 / 40.0;
            for rho in [0.0, 1.0, 8.0, 64.0] {
                worst_w = worst_w.max((sample(m, t, rho).unwrap().wronskian() - 1.0).norm());
            }
        }
    }
    outcome(
        1,
        worst_norm <= 1e-10 && worst_w <= 1e-9,
        format!("max normalization error {worst_norm:.2e} (tol 1e-10), max |W - 1| {worst_w:.2e} (tol 1e-9)"),
    )
}

/// Residual relative to `(1 + t^m ρ²)|V|`, the size of the two terms.
fn ode_residuals() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=3u32 {
        for i in 0..10 {
            let t = 0.2 + 1.8 * i as f64 / 9.0;
            for j in 0..10 {
                let rho = 16.0 * j as f64 / 9.0;
                let s = sample(m, t, rho).unwrap();
                let scale = 1.0 + t.powi(m as i32) * rho * rho;
                for (which, v) in [(Which::V1, s.v1), (Which::V2, s.v2)] {
                    let r = ode_residual(m, t, rho, which).unwrap();
                    worst = worst.max(r / (scale * v.norm().max(1e-300)));
                }
            }
        }
    }
    outcome(2, worst <= 1e-6, format!("max relative residual {worst:.2e} (tol 1e-6)"))
}

fn kummer_decay() -> Outcome {
    let ys: Vec<f64> = (0..25).map(|i| 10f64.powf(2.0 + 2.0 * i as f64 / 24.0)).collect();
    let mut details = Vec::new();
    let mut pass = true;
    for (p, a) in [
        (KummerParams::from_ratios((1, 6), (1, 3)).unwrap(), 1.0 / 6.0),
        (KummerParams::from_ratios((5, 6), (5, 3)).unwrap(), 5.0 / 6.0),
    ] {
        let env: Vec<f64> = ys.iter().map(|&y| imaginary_axis_envelope(p, y, 64).unwrap()).collect();
        let fit = fit_power_law(&ys, &env).unwrap();
        let rel = (-fit.exponent - a).abs() / a;
        pass &= rel <= 0.05;
        details.push(format!("decay {:.4} vs {a:.4} ({:.1}%)", -fit.exponent, 100.0 * rel));
    }
    outcome(3, pass, details.join(", "))
}

fn gaussian(grid: &Grid) -> Field {
    Field::from_real_fn(grid, |x| (-x[0] * x[0]).exp())
}

fn oracle_equivalence() -> Outcome {
    let grid = Grid::new(&[256], 8.0).unwrap();
    let times = uniform_times(1.0, 257);
    let a1 = InitialDataSpec::parse(
        "family = A1\nslots = 2\nslot0.right = bump center=0 width=2 amp=1\nslot0.left = zero\n\
         slot1.right = zero\nslot1.left = bump center=0 width=3 amp=0.5\n",
    )
    .unwrap();
    let data = [
        ("gaussian", gaussian(&grid), gaussian(&grid).scale(0.5)),
        ("A1", a1.field(0, &grid).unwrap(), a1.field(1, &grid).unwrap()),
    ];
    let g = grid.clone();
    let forcing = FnForcing::new(&grid, move |t| {
        Field::from_real_fn(&g, |x| (1.0 + t).cos() * (-(x[0] - 1.0).powi(2)).exp())
    });
    let zero = ZeroForcing::new(&grid);
    let mut worst: f64 = 0.0;
    for m in [1u32, 2] {
        let props = Propagators::new(m, &grid, &times).unwrap();
        for (_, p1, p2) in &data {
            let hom = props.homogeneous(p1, p2).unwrap();
            let inh = hom.add(&props.duhamel(&forcing).unwrap()).unwrap();
            let o_hom = rk4_oracle(m, p1, p2, &zero, &times).unwrap();
            let o_inh = rk4_oracle(m, p1, p2, &forcing, &times).unwrap();
            for i in [128, 256] {
                worst = worst.max(relative_l2_error(&hom, &o_hom, i).unwrap());
                worst = worst.max(relative_l2_error(&inh, &o_inh, i).unwrap());
            }
        }
    }
    outcome(4, worst <= 1e-6, format!("max relative L2 difference {worst:.2e} (tol 1e-6)"))
}

fn propagator_rates(dir: &Path) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (m, s1) in [(1u32, "0.16666666666666666"), (2, "0.25")] {
        let text = format!("m = {m}\ns1 = {s1}\nentries = propagator-v1\n");
        let out = rates::run(&cfg("rates", &text, &dir.join(format!("rates{m}")))).unwrap();
        let r = out.row("propagator-v1").unwrap();
        pass &= r.accepted;
        details.push(format!("m={m}: fitted {:.4} vs {:.4}", r.fit.exponent, r.expected));
    }
    outcome(5, pass, details.join(", "))
}

const ZERO_DATA: &str = "size = 64\n[data]\nfamily = smooth\nslots = 1\nslot0.value = zero\n";

fn zero_mode(dir: &Path) -> Outcome {
    let third = solve::run(
        &cfg("solve", &format!("m = 1\nf = const:6\n{ZERO_DATA}"), &dir.join("z3")),
        Some(solve::SolveKind::Third),
    )
    .unwrap();
    let fourth = solve::run(
        &cfg("solve", &format!("m1 = 2\nm2 = 1\nf = const:24\n{ZERO_DATA}"), &dir.join("z4")),
        Some(solve::SolveKind::Fourth),
    )
    .unwrap();
    let e3 = (third.final_mean() - 1.0).abs();
    let e4 = (fourth.final_mean() - 1.0).abs();
    outcome(
        6,
        e3 <= 1e-8 && e4 <= 1e-7,
        format!("third-order |u0(1) - 1| = {e3:.2e} (tol 1e-8), fourth-order |u0(1) - 1| = {e4:.2e} (tol 1e-7)"),
    )
}

fn picard_contraction(dir: &Path) -> Outcome {
    let ratio = |t: f64| {
        let text = format!(
            "m = 1\nsize = 256\nT = {t}\nf = poly:0,0,1\n[data]\nfamily = smooth\nslots = 2\n\
             slot0.value = bump center=0 width=2 amp=1\nslot1.value = bump center=0 width=2 amp=0.5\n"
        );
        let o = solve::run(&cfg("solve", &text, &dir.join(format!("picard{t}"))), Some(solve::SolveKind::Second))
            .unwrap();
        o.report.unwrap().contraction_ratio
    };
    let (r2, r4) = (ratio(0.2), ratio(0.4));
    outcome(
        7,
        r4 < 1.0 && r2 < r4,
        format!("contraction ratio {r2:.4e} at T=0.2, {r4:.4e} at T=0.4"),
    )
}

fn fourth_order_residual(dir: &Path) -> Outcome {
    let text = "m1 = 2\nm2 = 1\nsize = 256\nT = 0.5\nf = poly:0,0,1\n";
    let o = solve::run(&cfg("solve", text, &dir.join("fourth")), Some(solve::SolveKind::Fourth)).unwrap();
    let converged = o.report.as_ref().unwrap().converged;
    let worst = o.residual.iter().map(|p| p.1).fold(0.0, f64::max);
    outcome(
        8,
        converged && worst <= 1e-3,
        format!("converged {converged}, max interior residual {worst:.2e} (tol 1e-3)"),
    )
}

fn heaviside_run(size: usize) -> String {
    format!(
        "m = 1\nn = 1\nsize = {size}\nL = 8\nT = 1\nn_t = 257\nf = const:0\n[data]\nfamily = A1\nslots = 3\n\
         slot0.right = bump center=0 width=2 amp=1\nslot0.left = zero\nslot1.value = zero\n\
         slot2.right = bump center=0 width=4 amp=15\nslot2.left = zero\n"
    )
}

fn solve_and_probe(dir: &Path, name: &str, text: &str, kind: solve::SolveKind) -> ProbeOutcome {
    let traj = dir.join(name);
    solve::run(&cfg("solve", text, &traj), Some(kind)).unwrap();
    let mut p = RunConfig::new("probe");
    p.set("traj", traj.display().to_string());
    probe_cmd::run(&p).unwrap()
}

fn singularity_geometry(run9: &ProbeOutcome) -> Outcome {
    let aligned = run9.alignment.iter().all(|(_, cells)| *cells <= 2.0);
    let pass = aligned && run9.alignment.len() == 3 && run9.away_ratio <= 0.05;
    let cells: Vec<String> = run9.alignment.iter().map(|(l, c)| format!("{l} {c:.2}")).collect();
    outcome(
        9,
        pass,
        format!(
            "cells to nearest ridge: {} (tol 2); away/peak gradient {:.4} (tol 0.05)",
            cells.join(", "),
            run9.away_ratio
        ),
    )
}

fn cusp_pair(dir: &Path) -> Outcome {
    let text = "m1 = 2\nm2 = 1\nsize = 1024\nL = 8\nT = 1\nn_t = 257\nf = const:0\n[data]\nfamily = A1\nslots = 4\n\
                slot0.right = bump center=0 width=2 amp=1\nslot0.left = zero\n\
                slot1.right = bump center=0 width=2 amp=14\nslot1.left = zero\n";
    let p = solve_and_probe(dir, "pair", text, solve::SolveKind::Fourth);
    let pass = p.alignment.len() == 4 && p.alignment.iter().all(|(_, c)| *c <= 3.0);
    let cells: Vec<String> = p.alignment.iter().map(|(l, c)| format!("{l} {c:.2}")).collect();
    outcome(10, pass, format!("cells to nearest ridge: {} (tol 3)", cells.join(", ")))
}

fn log_squared(dir: &Path) -> Outcome {
    let text = "m = 1\nentries = log-squared,a1-bounded\n";
    let out = rates::run(&cfg("rates", text, &dir.join("log"))).unwrap();
    let ls = out.row("log-squared").unwrap();
    let a1 = out.row("a1-bounded").unwrap();
    outcome(
        11,
        ls.accepted && a1.accepted,
        format!(
            "A2 n=2: exponent vs |ln t| {:.3} (max 2.2), sup max|u|/(1+|ln t|)^2 = {:.3}; A1 n=1: exponent {:.3} (max 0.5)",
            ls.fit.exponent,
            ls.log_ratio_sup.unwrap_or(f64::NAN),
            a1.fit.exponent
        ),
    )
}

fn symbolic_catalog() -> Outcome {
    let mut rows: Vec<CatalogRow> = Vec::new();
    for m in 1..=8 {
        for n in 1..=2 {
            rows.extend(catalog_verify(m, n).unwrap());
        }
    }
    for (m1, m2) in [(2, 1), (3, 1), (4, 2)] {
        for n in 1..=2 {
            rows.extend(mixed_verify(m1, m2, n).unwrap());
        }
    }
    let explicit: Vec<&CatalogRow> = rows
        .iter()
        .filter(|r| r.form == Form::Stated && r.status != RowStatus::Asserted)
        .collect();
    let failing: Vec<&&CatalogRow> = explicit.iter().filter(|r| !r.passes()).collect();
    let control_ok = rows.iter().filter(|r| r.form == Form::Control).all(|r| r.passes());
    let corrected_ok = rows.iter().filter(|r| r.form == Form::Corrected).all(|r| r.passes());
    let mut names: Vec<&str> = failing.iter().map(|r| r.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    outcome(
        12,
        failing.is_empty() && control_ok,
        format!(
            "{}/{} explicit identities reduce to zero; control reported nonzero: {control_ok}; \
             corrected forms all hold: {corrected_ok}; distinct failing identities: {}",
            explicit.len() - failing.len(),
            explicit.len(),
            names.len()
        ),
    )
}

fn conormal_discriminator(coarse: &ProbeOutcome, fine: &ProbeOutcome) -> Outcome {
    let depth2 = |p: &ProbeOutcome| -> f64 {
        p.scan.iter().filter(|r| r.word.len() == 2).map(|r| r.ratio).fold(0.0, f64::max)
    };
    let control = |p: &ProbeOutcome| -> f64 {
        p.control.iter().find(|r| r.word.len() == 2).map(|r| r.sup_norm).unwrap()
    };
    let (c, f) = (depth2(coarse), depth2(fine));
    let growth = control(fine) / control(coarse);
    outcome(
        13,
        c < 50.0 && f < 50.0 && growth >= 10.0,
        format!("depth-2 tangent ratio {c:.2} (N=512), {f:.2} (N=1024), tol 50; D1^2 growth {growth:.2}x (need 10x)"),
    )
}

#[test]
fn acceptance_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let run9 = solve_and_probe(dir, "run9", &heaviside_run(1024), solve::SolveKind::Third);
    let run9_coarse = solve_and_probe(dir, "run9-512", &heaviside_run(512), solve::SolveKind::Third);
    let results = vec![
        propagator_normalization(),
        ode_residuals(),
        kummer_decay(),
        oracle_equivalence(),
        propagator_rates(dir),
        zero_mode(dir),
        picard_contraction(dir),
        fourth_order_residual(dir),
        singularity_geometry(&run9),
        cusp_pair(dir),
        log_squared(dir),
        symbolic_catalog(),
        conormal_discriminator(&run9_coarse, &run9),
    ];
    for r in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        let note = if !r.pass && EXPECTED_FAILURES.contains(&r.id) {
            " [expected failure]"
        } else {
            ""
        };
        println!("criterion {:>2}: {tag}{note} - {}", r.id, r.detail);
    }
    let unexpected: Vec<usize> = results
        .iter()
        .filter(|r| !r.pass && !EXPECTED_FAILURES.contains(&r.id))
        .map(|r| r.id)
        .collect();
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
