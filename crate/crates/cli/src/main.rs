use clap::{Args, Parser, Subcommand};
use cuspwave_cli::config::RunConfig;
use cuspwave_cli::data_cmd::DataAction;
use cuspwave_cli::solve::SolveKind;
use cuspwave_cli::{data_cmd, opalg_cmd, probe_cmd, rates, solve, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cuspwave", version, about = "Solvers and singularity diagnostics for degenerate hyperbolic equations")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "CUSPWAVE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Clone)]
struct Common {
    /// key = value configuration file
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set T=0.5`; repeatable.
    #[arg(long = "set", short = 's', value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a linear or semilinear problem and write the trajectory.
    Solve {
        /// linear, second, third or fourth; falls back to the `kind` key.
        kind: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        m1: Option<String>,
        #[arg(long)]
        m2: Option<String>,
        #[arg(long)]
        n: Option<String>,
        /// Grid points per axis.
        #[arg(long)]
        size: Option<String>,
        /// Time horizon.
        #[arg(long = "T")]
        t_end: Option<String>,
        /// Data spec file.
        #[arg(long)]
        data: Option<String>,
        /// Nonlinearity, e.g. `poly:0,0,1` or `const:6`.
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Ridges, surface alignment and conormal scans of a solved trajectory.
    Probe {
        /// Trajectory directory written by `solve`.
        #[arg(long)]
        traj: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        pair: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit small-time exponents of the linear estimates.
    Rates {
        #[arg(long)]
        m: Option<String>,
        /// Comma-separated entry ids.
        #[arg(long)]
        entries: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact operator algebra.
    Opalg {
        #[command(subcommand)]
        action: OpalgAction,
    },
    /// Generate or preview initial data.
    Data {
        /// generate or preview
        action: String,
        #[arg(long)]
        data: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        size: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum OpalgAction {
    /// Verify the commutator and decomposition catalog.
    Verify {
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        n: Option<String>,
        /// Mixed-field pair `m1,m2` with m1 > m2.
        #[arg(long)]
        pair: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the commutator [A, B] of two operators.
    Commutator {
        a: String,
        b: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

fn config(command: &str, common: &Common, flags: &[(&str, &Option<String>)]) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(command, common.config.as_deref())?;
    cfg.set_pairs(&common.set)?;
    if let Some(o) = &common.out {
        cfg.set("out", o.clone());
    }
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v.clone());
        }
    }
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            kind,
            m,
            m1,
            m2,
            n,
            size,
            t_end,
            data,
            f,
            seed,
            common,
        } => {
            let cfg = config(
                "solve",
                &common,
                &[
                    ("m", &m),
                    ("m1", &m1),
                    ("m2", &m2),
                    ("n", &n),
                    ("size", &size),
                    ("T", &t_end),
                    ("data", &data),
                    ("f", &f),
                    ("seed", &seed),
                ],
            )?;
            let kind = kind.map(|k| k.parse::<SolveKind>()).transpose()?;
            let outcome = solve::run(&cfg, kind)?;
            println!(
                "{} solve: {} snapshots written to {}",
                outcome.kind,
                outcome.trajectory.len(),
                outcome.out_dir.display()
            );
            outcome.check()
        }
        Command::Probe { traj, m, pair, common } => {
            let cfg = config("probe", &common, &[("traj", &traj), ("m", &m), ("pair", &pair)])?;
            let outcome = probe_cmd::run(&cfg)?;
            println!("ridge alignment at the last snapshot (cells to nearest ridge):");
            for (label, cells) in &outcome.alignment {
                println!("  {label:<12} {cells:.2}");
            }
            println!("  mean |grad u| away from the surfaces / ridge peak: {:.4}", outcome.away_ratio);
            for r in outcome.scan.iter().chain(&outcome.control) {
                println!("  {:<16} ratio {:.4e}", r.word_label(), r.ratio);
            }
            Ok(())
        }
        Command::Rates { m, entries, common } => {
            let cfg = config("rates", &common, &[("m", &m), ("entries", &entries)])?;
            let outcome = rates::run(&cfg)?;
            for r in &outcome.rows {
                println!(
                    "{:<14} expected {:>8.4} fitted {:>8.4} r2 {:.4} {}",
                    r.id,
                    r.expected,
                    r.fit.exponent,
                    r.fit.r2,
                    if r.accepted { "ok" } else { "REJECTED" }
                );
            }
            outcome.check()
        }
        Command::Opalg { action } => match action {
            OpalgAction::Verify { m, n, pair, common } => {
                let cfg = config("opalg", &common, &[("m", &m), ("n", &n), ("pair", &pair)])?;
                let outcome = opalg_cmd::verify(&cfg)?;
                print!("{}", outcome.csv);
                eprint!("{}", outcome.summary);
                outcome.check()
            }
            OpalgAction::Commutator { a, b, n } => {
                println!("{}", opalg_cmd::commutator(&a, &b, n)?);
                Ok(())
            }
        },
        Command::Data {
            action,
            data,
            n,
            size,
            common,
        } => {
            let cfg = config("data", &common, &[("data", &data), ("n", &n), ("size", &size)])?;
            let outcome = data_cmd::run(&cfg, action.parse::<DataAction>()?)?;
            println!("{} slots written to {}", outcome.fields.len(), outcome.out_dir.display());
            Ok(())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::Probe { .. } => "probe",
        Command::Rates { .. } => "rates",
        Command::Opalg { .. } => "opalg",
        Command::Data { .. } => "data",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = CliError::Config(e.to_string().trim().replace('\n', " "));
            eprintln!("{}", err.json_line("cuspwave"));
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            let err = CliError::Config(format!("thread pool: {e}"));
            eprintln!("{}", err.json_line("cuspwave"));
            return ExitCode::from(2);
        }
    }
    let name = command_name(&cli.command);
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.json_line(name));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
