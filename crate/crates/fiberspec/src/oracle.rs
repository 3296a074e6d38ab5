//! Momentum-grid discretization of the fiber operator, used as an independent reference.
//!
//! The grid is co-moving, p_j = θ + 2πj/N − π per axis with θ the phase of E_K, so for even N
//! it contains the band minimum (j = N/2) and maximum (j = 0) of E_K exactly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix5, SymmetricEigen};
use thiserror::Error;

use crate::determinant::{inertia, InteractionBasis};
use crate::integrals::Side;
use crate::lattice::{dispersion, Band, ModelParams, PhaseForm, TorusPoint};
use crate::spectrum::{locate_by_count, Eigenvalue, Factor, Sector, SolverError, SolverOptions, SpectrumReport};

/// Largest grid order accepted by [`dense_validate`].
pub const DENSE_MAX_N: usize = 48;

/// Deepest edge distance resolved on the grid.
const GRID_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid order {0} must be even and at least 16")]
    GridOrder(usize),
    #[error("dense validation needs N ≤ {DENSE_MAX_N}, got {0}")]
    DenseTooLarge(usize),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone)]
pub struct GridModel {
    pub n: usize,
    pub k: TorusPoint,
    pub params: ModelParams,
    pub basis: InteractionBasis,
    /// E_K at the N² grid points.
    pub diag: Vec<f64>,
    /// (2π/N)·φᵢ at the grid points, orthonormal in ℓ².
    pub modes: Vec<[f64; 5]>,
    pub band: Band,
}

impl GridModel {
    pub fn new(k: &TorusPoint, params: &ModelParams, n: usize) -> Result<Self, OracleError> {
        if n < 16 || n % 2 != 0 {
            return Err(OracleError::GridOrder(n));
        }
        Ok(Self::build(k, params, n))
    }

    fn build(k: &TorusPoint, params: &ModelParams, n: usize) -> Self {
        let theta = PhaseForm::new(k, params.gamma).phase;
        let h = 2.0 * PI / n as f64;
        let mut diag = Vec::with_capacity(n * n);
        let mut modes = Vec::with_capacity(n * n);
        let mut lo = (f64::INFINITY, TorusPoint::origin());
        let mut hi = (f64::NEG_INFINITY, TorusPoint::origin());
        for i in 0..n {
            for j in 0..n {
                let p = TorusPoint::new(theta[0] + h * i as f64 - PI, theta[1] + h * j as f64 - PI);
                let e = dispersion(k, &p, params);
                if e < lo.0 {
                    lo = (e, p);
                }
                if e > hi.0 {
                    hi = (e, p);
                }
                diag.push(e);
                modes.push(InteractionBasis::modes(&p).map(|x| x * h));
            }
        }
        let band = Band { e_min: lo.0, e_max: hi.0, argmin: lo.1, argmax: hi.1 };
        GridModel { n, k: *k, params: *params, basis: InteractionBasis::new(params), diag, modes, band }
    }

    fn edge(&self, side: Side) -> f64 {
        match side {
            Side::Below => self.band.e_min,
            Side::Above => self.band.e_max,
        }
    }

    /// Grid sums Σⱼ ψᵢψₖ/(Eⱼ − z).
    pub fn gram(&self, z: f64) -> Matrix5<f64> {
        self.weighted_gram(|e| 1.0 / (e - z))
    }

    fn weighted_gram(&self, w: impl Fn(f64) -> f64) -> Matrix5<f64> {
        let mut g = Matrix5::zeros();
        for (e, psi) in self.diag.iter().zip(&self.modes) {
            let k = w(*e);
            if k == 0.0 {
                continue;
            }
            for a in 0..5 {
                let ka = k * psi[a];
                for b in a..5 {
                    g[(a, b)] += ka * psi[b];
                }
            }
        }
        for a in 0..5 {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    /// det(I + D·G(z)) for the discrete problem.
    pub fn secular_det(&self, z: f64) -> f64 {
        let d = Matrix5::from_diagonal(&self.basis.weights.into());
        (Matrix5::identity() + d * self.gram(z)).determinant()
    }

    /// Full N²×N² matrix diag(E) + Σ gᵢ ψᵢψᵢᵀ.
    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.diag.len();
        let w = self.basis.weights;
        let mut h = DMatrix::from_fn(m, m, |i, j| {
            let (a, b) = (&self.modes[i], &self.modes[j]);
            (0..5).map(|k| w[k] * a[k] * b[k]).sum::<f64>()
        });
        for i in 0..m {
            h[(i, i)] += self.diag[i];
        }
        h
    }

    fn active(&self) -> Vec<usize> {
        self.basis.active()
    }

    fn restricted(&self, g: &Matrix5<f64>) -> DMatrix<f64> {
        let act = self.active();
        let n = act.len();
        let w = &self.basis.weights;
        DMatrix::from_fn(n, n, |i, j| g[(act[i], act[j])] + if i == j { 1.0 / w[act[i]] } else { 0.0 })
    }

    fn from_signature(&self, side: Side, pos: usize, neg: usize) -> usize {
        match side {
            Side::Below => pos.saturating_sub(self.basis.positive_rank()),
            Side::Above => neg.saturating_sub(self.basis.negative_rank()),
        }
    }

    /// Eigenvalues of the discrete operator farther than `t` from the discrete edge.
    pub fn count(&self, side: Side, t: f64) -> usize {
        let z = match side {
            Side::Below => self.band.e_min - t,
            Side::Above => self.band.e_max + t,
        };
        let (pos, neg) = inertia(&self.restricted(&self.gram(z)));
        self.from_signature(side, pos, neg)
    }

    /// Count as t → 0: the grid points at the edge give C/t, the rest a finite G₀.
    pub fn limit_count(&self, side: Side) -> usize {
        let edge = self.edge(side);
        let tol = 1e-12 * (1.0 + self.params.gamma);
        let at_edge = |e: f64| (e - edge).abs() <= tol;
        let c = self.weighted_gram(|e| if at_edge(e) { 1.0 } else { 0.0 });
        let g0 = self.weighted_gram(|e| if at_edge(e) { 0.0 } else { 1.0 / (e - edge) });
        let act = self.active();
        let n = act.len();
        let cr = DMatrix::from_fn(n, n, |i, j| c[(act[i], act[j])]);
        let s0 = self.restricted(&g0);
        let eig = SymmetricEigen::new(cr);
        let cmax = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let kernel: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() <= 1e-10 * cmax.max(1e-300)).collect();
        let rank = n - kernel.len();
        let q = DMatrix::from_fn(n, kernel.len(), |i, j| eig.eigenvectors[(i, kernel[j])]);
        let (pos, neg) = inertia(&(q.transpose() * s0 * &q));
        let (pos, neg) = match side {
            Side::Below => (pos + rank, neg),
            Side::Above => (pos, neg + rank),
        };
        self.from_signature(side, pos, neg)
    }

    /// Discrete bound states by bisection of the inertia count.
    pub fn spectrum(&self, opts: &SolverOptions) -> Result<SpectrumReport, OracleError> {
        let mut report = SpectrumReport::empty(self.k, self.band);
        if self.active().is_empty() {
            return Ok(report);
        }
        let window = self.params.coupling_norm() + 1.0 + opts.window_extra;
        for side in Side::BOTH {
            let edge = self.edge(side);
            let n_lim = self.limit_count(side);
            let n_deep = self.count(side, GRID_FLOOR);
            let mut count = |t: f64| Ok(self.count(side, t));
            let clusters = locate_by_count(&mut count, GRID_FLOOR, n_deep, window, 0, edge.abs() + window, opts.scan.budget)?;
            let mut eigs: Vec<Eigenvalue> = clusters
                .into_iter()
                .map(|(t, mult)| {
                    let z = match side {
                        Side::Below => edge - t,
                        Side::Above => edge + t,
                    };
                    Eigenvalue {
                        z,
                        gap: t,
                        multiplicity: mult,
                        sector: Sector::Mixed,
                        factor: Factor::General,
                        residual: self.secular_det(z).abs(),
                        edge_bound: false,
                    }
                })
                .collect();
            if n_lim > n_deep {
                eigs.push(Eigenvalue {
                    z: edge,
                    gap: GRID_FLOOR,
                    multiplicity: n_lim - n_deep,
                    sector: Sector::Mixed,
                    factor: Factor::General,
                    residual: 0.0,
                    edge_bound: true,
                });
            }
            let total: usize = eigs.iter().map(|e| e.multiplicity).sum();
            eigs.sort_by(|a, b| a.z.total_cmp(&b.z));
            match side {
                Side::Below => {
                    report.below = eigs;
                    report.n_below = total;
                }
                Side::Above => {
                    report.above = eigs;
                    report.n_above = total;
                }
            }
        }
        Ok(report)
    }
}

/// Bound states of the N×N grid discretization.
pub fn oracle_counts(k: &TorusPoint, params: &ModelParams, n: usize) -> Result<SpectrumReport, OracleError> {
    GridModel::new(k, params, n)?.spectrum(&SolverOptions::default())
}

fn clusters(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((z, m)) if (v - *z).abs() <= tol => {
                *m += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Bound states from a full symmetric eigendecomposition of the grid matrix.
pub fn dense_validate(k: &TorusPoint, params: &ModelParams, n: usize) -> Result<SpectrumReport, OracleError> {
    if n > DENSE_MAX_N {
        return Err(OracleError::DenseTooLarge(n));
    }
    let model = GridModel::new(k, params, n)?;
    let mut ev: Vec<f64> = model.dense().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let margin = 1e-10 * (1.0 + model.band.e_max.abs());
    let below: Vec<f64> = ev.iter().copied().filter(|&z| z < model.band.e_min - margin).collect();
    let above: Vec<f64> = ev.iter().copied().filter(|&z| z > model.band.e_max + margin).collect();
    let mut report = SpectrumReport::empty(*k, model.band);
    let mk = |cl: Vec<(f64, usize)>, edge: f64| -> Vec<Eigenvalue> {
        cl.into_iter()
            .map(|(z, m)| Eigenvalue {
                z,
                gap: (z - edge).abs(),
                multiplicity: m,
                sector: Sector::Mixed,
                factor: Factor::General,
                residual: model.secular_det(z).abs(),
                edge_bound: false,
            })
            .collect()
    };
    report.n_below = below.len();
    report.n_above = above.len();
    report.below = mk(clusters(&below, 1e-8), model.band.e_min);
    report.above = mk(clusters(&above, 1e-8), model.band.e_max);
    Ok(report)
}

/// Discrete minimax values (e_n, E_n): the n-th bound state from each edge, or the edge itself.
pub fn minimax_values(k: &TorusPoint, params: &ModelParams, n: usize, index: usize) -> Result<(f64, f64), OracleError> {
    assert!(index >= 1, "minimax index starts at 1");
    let r = oracle_counts(k, params, n)?;
    let below = r.values(Side::Below);
    let mut above = r.values(Side::Above);
    above.reverse();
    let e_n = below.get(index - 1).copied().unwrap_or(r.band.e_min);
    let big_e_n = above.get(index - 1).copied().unwrap_or(r.band.e_max);
    Ok((e_n, big_e_n))
}
