//! Self-check suite behind the `verify` subcommand.

use std::f64::consts::PI;

use fiberspec::integrals::{calibrate_edge_constants, watson_integrals_at, CalibrationTable, ConstantsSource, IntegralError, Side};
use fiberspec::lattice::{ModelParams, TorusPoint};
use fiberspec::oracle::{dense_validate, oracle_counts, OracleError};
use fiberspec::spectrum::{spectrum_general, spectrum_k0, SolverError, SolverOptions, SpectrumReport};
use thiserror::Error;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Params(#[from] fiberspec::lattice::ParamError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn same_spectrum(a: &SpectrumReport, b: &SpectrumReport, tol: f64, min_gap: f64) -> bool {
    Side::BOTH.iter().all(|&side| {
        let edge = match side {
            Side::Below => a.band.e_min,
            Side::Above => a.band.e_max,
        };
        let (x, y) = (a.values(side), b.values(side));
        x.len() == y.len() && x.iter().zip(&y).all(|(u, v)| (u - edge).abs() < min_gap || (u - v).abs() < tol)
    })
}

pub fn run_verification(cfg: &RunConfig) -> Result<Vec<Check>, NumericError> {
    let mut out = Vec::new();
    let g = cfg.gamma;
    let opts = SolverOptions { rel_tol: cfg.rel_tol.min(1e-12), ..Default::default() };

    let mut worst = 0.0f64;
    for gamma in [0.5, 1.0, 2.0, g] {
        for side in Side::BOTH {
            for t in [1e-6, 1e-2, 0.5, 5.0] {
                let s = watson_integrals_at(side, t, gamma, 1e-12)?;
                worst = worst
                    .max(rel(s.a, s.c + s.f))
                    .max(rel(2.0 * (1.0 + gamma) * (s.a - s.b), 1.0 + s.z * s.a))
                    .max(rel(s.c + s.e, s.b * (2.0 - s.z / (1.0 + gamma))));
            }
        }
    }
    out.push(check("identities", worst < 1e-9, format!("worst relative defect {worst:.2e}")));

    let cal = calibrate_edge_constants(g)?;
    let s = 1.0 / (2.0 * PI * (1.0 + g));
    let x = watson_integrals_at(Side::Below, 1e-3, g, 1e-12)?;
    let y = watson_integrals_at(Side::Below, 1e-4, g, 1e-12)?;
    let slope_a = (y.a - x.a) / 10f64.ln();
    let slope_b = (y.b - x.b) / 10f64.ln();
    let ok = rel(slope_a, s) < 0.01 && rel(slope_b, s) < 0.01;
    out.push(check("log-slope", ok, format!("a {slope_a:.6} b {slope_b:.6} expected {s:.6}")));

    let f = (PI - 2.0) / (PI * (1.0 + g));
    let fb = cal.f_limit(Side::Below);
    let fa = cal.f_limit(Side::Above);
    out.push(check("f-limit", (fb - f).abs() < 1e-6 && (fa + f).abs() < 1e-6, format!("{fb:.9} / {fa:.9}, expected ±{f:.9}")));

    let ce = cal.ce_limit(Side::Below);
    let halved = (8.0 - 2.0 * PI) / (2.0 * PI * (1.0 + g));
    let doubled = 2.0 * halved;
    let (m1, m2) = ((ce - halved).abs() < 1e-6, (ce - doubled).abs() < 1e-6);
    out.push(check(
        "c-e-limit",
        m1 != m2,
        format!("measured {ce:.9}; (8-2π)/(2π(1+γ)) {} ; (8-2π)/(π(1+γ)) {}", if m1 { "matches" } else { "differs" }, if m2 { "matches" } else { "differs" }),
    ));

    let table = CalibrationTable::new().with(cal);
    let points = [(-1.0, 0.0), (-6.0, 0.0), (0.0, 12.0), (10.0, 10.0), (3.0, -7.0)];
    let mut general_ok = true;
    let mut oracle_ok = true;
    for (l, m) in points {
        let p = ModelParams::new(g, l, m)?;
        let a = spectrum_k0(&p, ConstantsSource::Computed, &table, &opts)?;
        let b = spectrum_general(&TorusPoint::origin(), &p, &opts)?;
        general_ok &= same_spectrum(&a, &b, 1e-9, 0.0);
        let o = oracle_counts(&TorusPoint::origin(), &p, cfg.grid_n)?;
        oracle_ok &= a.n_below == o.n_below && a.n_above == o.n_above && same_spectrum(&a, &o, 1e-5, 0.1);
    }
    out.push(check("k0-vs-general", general_ok, format!("{} parameter points", points.len())));
    out.push(check("k0-vs-oracle", oracle_ok, format!("grid N = {}", cfg.grid_n)));

    let k = TorusPoint::new(0.9, -0.4);
    let p = ModelParams::new(g, 2.0, -5.0)?;
    let d = dense_validate(&k, &p, 24)?;
    let o = oracle_counts(&k, &p, 24)?;
    out.push(check("dense", d.n_below == o.n_below && d.n_above == o.n_above && same_spectrum(&o, &d, 1e-9, 0.0), "N = 24".into()));
    Ok(out)
}
