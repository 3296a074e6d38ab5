use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fiberspec::atlas::{classify, predicted_counts, sweep, SweepSpec};
use fiberspec::determinant::{secular_matrix, FiberGeometry};
use fiberspec::integrals::{watson_integrals, CalibrationTable, Side};
use fiberspec::lattice::{band_edges, ModelParams, TorusPoint};
use fiberspec::oracle::oracle_counts;
use fiberspec::spectrum::{spectrum_general, spectrum_k0, SolverOptions, SpectrumReport};
use fiberspec_cli::config::{parse_config, ConfigError, RunConfig};
use fiberspec_cli::output::{csv_string, emit_csv, fmt_num};
use fiberspec_cli::verify::{run_verification, NumericError};

#[derive(Parser, Debug)]
#[command(name = "fiberspec", version, about = "Bound states of two-particle lattice fiber Hamiltonians")]
struct Cli {
    /// Configuration file (`key = value` lines); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Quasimomentum as `K1,K2`.
    #[arg(long = "K", global = true, allow_hyphen_values = true)]
    k: Option<String>,
    /// Grid order for the oracle.
    #[arg(long = "N", global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// paper | computed
    #[arg(long, global = true)]
    source: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band edges of E_K.
    Edges,
    /// The integrals a, b, c, e, f at K = 0.
    Integrals {
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Secular matrix and determinant at (z, K).
    Det {
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Eigenvalues outside the band at K.
    Spectrum,
    /// Region labels and predicted counts.
    Classify,
    /// Parameter sweep written as CSV.
    Sweep {
        #[arg(long = "lambda-range", allow_hyphen_values = true)]
        lambda_range: Option<String>,
        #[arg(long = "mu-range", allow_hyphen_values = true)]
        mu_range: Option<String>,
        #[arg(long)]
        step: Option<String>,
        /// `K1,K2;K1,K2;…`
        #[arg(long = "k-list", allow_hyphen_values = true)]
        k_list: Option<String>,
    },
    /// Grid discretization counts with N×N points.
    Oracle,
    /// Identity, asymptotics and agreement checks.
    Verify,
}

enum Failure {
    Config(String),
    Numeric(String),
    Verification,
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<NumericError> for Failure {
    fn from(e: NumericError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Numeric(e.to_string())
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    let mut overrides: Vec<(&str, String)> = Vec::new();
    for (key, v) in [
        ("gamma", &cli.gamma),
        ("lambda", &cli.lambda),
        ("mu", &cli.mu),
        ("K", &cli.k),
        ("grid_N", &cli.n),
        ("rel_tol", &cli.tol),
        ("constants_source", &cli.source),
    ] {
        if let Some(v) = v {
            overrides.push((key, v.clone()));
        }
    }
    if let Command::Sweep { lambda_range, mu_range, step, k_list } = &cli.command {
        for (key, v) in [("lambda_range", lambda_range), ("mu_range", mu_range), ("step", step), ("k_list", k_list)] {
            if let Some(v) = v {
                overrides.push((key, v.clone()));
            }
        }
    }
    for (key, v) in overrides {
        cfg.set(key, &v).map_err(|msg| ConfigError::Validation { field: key.to_string(), msg })?;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn params(cfg: &RunConfig) -> Result<ModelParams, Failure> {
    ModelParams::new(cfg.gamma, cfg.lambda, cfg.mu).map_err(|e| Failure::Config(e.to_string()))
}

fn solver(cfg: &RunConfig) -> SolverOptions {
    SolverOptions { rel_tol: cfg.rel_tol, ..Default::default() }
}

fn print_report(r: &SpectrumReport) {
    println!("band {} {}", fmt_num(r.band.e_min), fmt_num(r.band.e_max));
    for side in Side::BOTH {
        println!("n_{} {}", side.name(), r.count(side));
        for e in r.side(side) {
            println!(
                "  z {} gap {} mult {} factor {} residual {}{}",
                fmt_num(e.z),
                fmt_num(e.gap),
                e.multiplicity,
                e.factor.name(),
                fmt_num(e.residual),
                if e.edge_bound { " edge-bound" } else { "" }
            );
        }
    }
    for n in &r.notes {
        println!("note: {n}");
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let k = TorusPoint::new(cfg.k.0, cfg.k.1);
    match &cli.command {
        Command::Edges => {
            let p = params(&cfg)?;
            let b = band_edges(&k, &p);
            let g = FiberGeometry::new(&k, cfg.gamma);
            println!("e_min {} at ({}, {})", fmt_num(b.e_min), fmt_num(b.argmin.p1()), fmt_num(b.argmin.p2()));
            println!("e_max {} at ({}, {})", fmt_num(b.e_max), fmt_num(b.argmax.p1()), fmt_num(b.argmax.p2()));
            println!("closed form {} {}", fmt_num(g.e_min()), fmt_num(g.e_max()));
        }
        Command::Integrals { z } => {
            let s = watson_integrals(*z, cfg.gamma, cfg.rel_tol).map_err(numeric)?;
            for (name, v) in [("a", s.a), ("b", s.b), ("c", s.c), ("e", s.e), ("f", s.f)] {
                println!("{name} {}", fmt_num(v));
            }
            println!("error {}", fmt_num(s.est_error));
        }
        Command::Det { z } => {
            let m = secular_matrix(*z, &k, &params(&cfg)?, cfg.rel_tol).map_err(numeric)?;
            for i in 0..5 {
                let row: Vec<String> = (0..5).map(|j| fmt_num(m.entries[(i, j)])).collect();
                println!("{}", row.join(" "));
            }
            println!("det {}", fmt_num(m.det));
        }
        Command::Spectrum => {
            let p = params(&cfg)?;
            let r = if k.is_origin() {
                let table = CalibrationTable::build(&[cfg.gamma]).map_err(numeric)?;
                spectrum_k0(&p, cfg.constants_source, &table, &solver(&cfg)).map_err(numeric)?
            } else {
                spectrum_general(&k, &p, &solver(&cfg)).map_err(numeric)?
            };
            print_report(&r);
        }
        Command::Classify => {
            let p = params(&cfg)?;
            let table = CalibrationTable::build(&[cfg.gamma]).map_err(numeric)?;
            let l = classify(&p, cfg.constants_source, &table).map_err(numeric)?;
            let pc = predicted_counts(&l);
            println!("source {}", cfg.constants_source.name());
            println!("regions {} {} {} {}", l.s_name(), l.d_name(), l.c_plus.name(Side::Above), l.c_minus.name(Side::Below));
            println!("S+ {} S- {}", fmt_num(l.s_plus), fmt_num(l.s_minus));
            for side in Side::BOTH {
                let r = pc.k0(side);
                println!(
                    "{}: K=0 {}..{}, all K >= {} ({:?}), table line {}",
                    side.name(),
                    r.lo,
                    r.hi,
                    pc.lower_bound(side),
                    pc.exactness(side),
                    pc.line(side).map_or("none".to_string(), |t| t.value().to_string())
                );
            }
            if pc.table_conflict() {
                println!("note: literal minus-table reading gives {}", pc.line_below_literal.map_or("none".to_string(), |t| t.value().to_string()));
            }
        }
        Command::Sweep { .. } => {
            let table = CalibrationTable::build(&[cfg.gamma]).map_err(numeric)?;
            let mut spec = SweepSpec::new(cfg.gamma, cfg.sweep.lambda_range, cfg.sweep.mu_range, cfg.sweep.step);
            spec.k_list = cfg.sweep.k_list.iter().map(|&(a, b)| TorusPoint::new(a, b)).collect();
            spec.source = cfg.constants_source;
            spec.solver = solver(&cfg);
            let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let rows = sweep(&spec, &table, workers).map_err(numeric)?;
            match &cfg.output {
                Some(path) => emit_csv(&rows, path).map_err(|e| Failure::Io(e.to_string()))?,
                None => print!("{}", csv_string(&rows)),
            }
        }
        Command::Oracle => {
            let r = oracle_counts(&k, &params(&cfg)?, cfg.grid_n).map_err(numeric)?;
            print_report(&r);
        }
        Command::Verify => {
            let checks = run_verification(&cfg)?;
            let mut all = true;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                all &= c.passed;
            }
            if !all {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(4),
    }
}
