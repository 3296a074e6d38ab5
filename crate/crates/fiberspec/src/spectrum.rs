//! Discrete eigenvalues outside the band.
//!
//! At K = 0 the three determinant factors are scanned separately for sign changes. At general K
//! the eigenvalues beyond a distance t from the edge are counted exactly by the inertia of
//! S = D⁻¹ + G(z) (signature of the Schur complement), and the count is bisected.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix5, SymmetricEigen};
use thiserror::Error;

use crate::determinant::{
    delta_even_main, delta_even_sub, delta_odd, inertia, odd_root_factor, resolvent_gram, secular_matrix_at, EdgeModel,
    FiberGeometry, InteractionBasis, LogPoly,
};
use crate::integrals::{watson_integrals_at, CalibrationTable, ConstantsSource, IntegralError, IntegralSet, Side};
use crate::lattice::{band_edges, Band, ModelParams, TorusPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("evaluation budget of {0} exhausted")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error("{count} eigenvalue(s) {side} the search window; window too small")]
    Window { side: &'static str, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Even,
    Odd,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    MainEven,
    SubEven,
    Odd,
    General,
}

impl Factor {
    fn sector(self) -> Sector {
        match self {
            Factor::MainEven | Factor::SubEven => Sector::Even,
            Factor::Odd => Sector::Odd,
            Factor::General => Sector::Mixed,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Factor::MainEven => "main-even",
            Factor::SubEven => "sub-even",
            Factor::Odd => "odd",
            Factor::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub z: f64,
    /// Distance to the adjacent band edge. May underflow to 0 for states bound exponentially weakly.
    pub gap: f64,
    pub multiplicity: usize,
    pub sector: Sector,
    pub factor: Factor,
    pub residual: f64,
    /// Closer to the edge than the deepest resolved distance; `gap` is then an upper bound or model value.
    pub edge_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub k: TorusPoint,
    pub band: Band,
    pub below: Vec<Eigenvalue>,
    pub above: Vec<Eigenvalue>,
    pub n_below: usize,
    pub n_above: usize,
    pub notes: Vec<String>,
}

impl SpectrumReport {
    pub fn empty(k: TorusPoint, band: Band) -> Self {
        SpectrumReport { k, band, below: vec![], above: vec![], n_below: 0, n_above: 0, notes: vec![] }
    }

    pub fn side(&self, side: Side) -> &[Eigenvalue] {
        match side {
            Side::Below => &self.below,
            Side::Above => &self.above,
        }
    }

    pub fn count(&self, side: Side) -> usize {
        match side {
            Side::Below => self.n_below,
            Side::Above => self.n_above,
        }
    }

    /// Eigenvalues on one side, each repeated by its multiplicity, ascending.
    pub fn values(&self, side: Side) -> Vec<f64> {
        self.side(side).iter().flat_map(|e| std::iter::repeat(e.z).take(e.multiplicity)).collect()
    }

    fn set_side(&mut self, side: Side, eigs: Vec<Eigenvalue>) {
        let n = eigs.iter().map(|e| e.multiplicity).sum();
        match side {
            Side::Below => {
                self.below = eigs;
                self.n_below = n;
            }
            Side::Above => {
                self.above = eigs;
                self.n_above = n;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub uniform_points: usize,
    pub geometric_floor: f64,
    pub budget: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { uniform_points: 256, geometric_floor: 1e-10, budget: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub scan: ScanOptions,
    /// Deepest edge distance resolved with the exact integrands.
    pub deep_floor: f64,
    /// Added to the window half-width |λ| + 2|μ| + 1.
    pub window_extra: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { rel_tol: 1e-12, scan: ScanOptions::default(), deep_floor: 1e-280, window_extra: 0.0 }
    }
}

impl SolverOptions {
    fn window(&self, params: &ModelParams) -> f64 {
        params.coupling_norm() + 1.0 + self.window_extra
    }
}

/// Distances uniform on (0, t_max] plus t_max·2⁻ᵏ down to the floor, descending.
pub fn distance_mesh(t_max: f64, opts: &ScanOptions) -> Vec<f64> {
    let n = opts.uniform_points.max(1);
    let mut pts: Vec<f64> = (1..=n).map(|k| t_max * k as f64 / n as f64).collect();
    let mut t = t_max;
    while t > opts.geometric_floor {
        t *= 0.5;
        pts.push(t.max(opts.geometric_floor));
    }
    pts.sort_by(|a, b| b.total_cmp(a));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    pts
}

struct Budget {
    used: usize,
    limit: usize,
}

impl Budget {
    fn tick(&mut self) -> Result<(), SolverError> {
        self.used += 1;
        if self.used > self.limit {
            Err(SolverError::BudgetExceeded(self.limit))
        } else {
            Ok(())
        }
    }
}

fn converged(t_hi: f64, t_lo: f64, z_scale: f64) -> bool {
    let w = t_hi - t_lo;
    w <= 1e-12 * (1.0 + z_scale) && w <= 1e-9 * t_hi
}

fn split(t_hi: f64, t_lo: f64) -> f64 {
    if t_hi > 4.0 * t_lo {
        t_hi.sqrt() * t_lo.sqrt()
    } else {
        0.5 * (t_hi + t_lo)
    }
}

/// Bisection in the edge distance between `t_hi` and `t_lo` whose values have opposite signs.
fn bisect_distance<F>(g: &mut F, mut t_hi: f64, mut s_hi: f64, mut t_lo: f64, z_scale: f64, budget: &mut Budget) -> Result<f64, SolverError>
where
    F: FnMut(f64) -> Result<f64, SolverError>,
{
    while !converged(t_hi, t_lo, z_scale) {
        let mid = split(t_hi, t_lo);
        if mid >= t_hi || mid <= t_lo {
            break;
        }
        budget.tick()?;
        let v = g(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == s_hi {
            t_hi = mid;
            s_hi = v.signum();
        } else {
            t_lo = mid;
        }
    }
    Ok(split(t_hi, t_lo))
}

struct DistanceScan {
    roots: Vec<f64>,
    t_near: f64,
    v_near: f64,
}

fn scan_distance<F>(g: &mut F, mesh: &[f64], values: Option<&[f64]>, z_scale: f64, budget: &mut Budget) -> Result<DistanceScan, SolverError>
where
    F: FnMut(f64) -> Result<f64, SolverError>,
{
    let vals: Vec<f64> = match values {
        Some(v) => v.to_vec(),
        None => mesh
            .iter()
            .map(|&t| {
                budget.tick()?;
                g(t)
            })
            .collect::<Result<_, _>>()?,
    };
    let mut roots = Vec::new();
    for i in 0..mesh.len() {
        if vals[i] == 0.0 {
            roots.push(mesh[i]);
            continue;
        }
        if i + 1 < mesh.len() && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
            roots.push(bisect_distance(g, mesh[i], vals[i].signum(), mesh[i + 1], z_scale, budget)?);
        }
    }
    let last = mesh.len() - 1;
    Ok(DistanceScan { roots, t_near: mesh[last], v_near: vals[last] })
}

/// Which end of the interval is the band edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeEnd {
    Lo,
    Hi,
}

/// Zeros of `f` on (lo, hi) from a mesh that is uniform away from the band edge and geometric toward it.
pub fn scan_and_bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, edge: EdgeEnd, opts: &ScanOptions) -> Result<Vec<f64>, SolverError> {
    let span = hi - lo;
    let to_z = |t: f64| match edge {
        EdgeEnd::Hi => hi - t,
        EdgeEnd::Lo => lo + t,
    };
    let mut g = |t: f64| Ok(f(to_z(t)));
    let mesh: Vec<f64> = distance_mesh(span, opts).into_iter().filter(|&t| t < span || edge == EdgeEnd::Hi).collect();
    let mut budget = Budget { used: 0, limit: opts.budget };
    let scan = scan_distance(&mut g, &mesh, None, lo.abs().max(hi.abs()), &mut budget)?;
    let mut z: Vec<f64> = scan.roots.into_iter().map(to_z).collect();
    z.sort_by(f64::total_cmp);
    Ok(z)
}

fn merge(mut eigs: Vec<Eigenvalue>) -> Vec<Eigenvalue> {
    eigs.sort_by(|a, b| a.z.total_cmp(&b.z));
    let mut out: Vec<Eigenvalue> = Vec::with_capacity(eigs.len());
    for e in eigs {
        if let Some(last) = out.last_mut() {
            if (e.z - last.z).abs() <= 1e-9 {
                if last.factor != e.factor {
                    last.factor = Factor::General;
                }
                if last.sector != e.sector {
                    last.sector = Sector::Mixed;
                }
                last.multiplicity += e.multiplicity;
                last.residual = last.residual.max(e.residual);
                last.edge_bound |= e.edge_bound;
                continue;
            }
        }
        out.push(e);
    }
    out
}

fn zero_momentum_band(gamma: f64) -> Band {
    Band {
        e_min: 0.0,
        e_max: 4.0 * (1.0 + gamma),
        argmin: TorusPoint::origin(),
        argmax: TorusPoint::new(-PI, -PI),
    }
}

type FactorFn = fn(&ModelParams, &IntegralSet) -> f64;

fn full_det(params: &ModelParams, s: &IntegralSet) -> f64 {
    delta_even_main(params, s) * delta_even_sub(params, s) * delta_odd(params, s)
}

/// Spectrum at K = 0 from the three closed-form factors; edge signs taken from `source`.
pub fn spectrum_k0(params: &ModelParams, source: ConstantsSource, table: &CalibrationTable, opts: &SolverOptions) -> Result<SpectrumReport, SolverError> {
    let band = zero_momentum_band(params.gamma);
    let mut report = SpectrumReport::empty(TorusPoint::origin(), band);
    if params.lambda == 0.0 && params.mu == 0.0 {
        return Ok(report);
    }
    let gamma = params.gamma;
    let window = opts.window(params);
    let mesh = distance_mesh(window, &opts.scan);
    let mut factors: Vec<(Factor, FactorFn, usize)> = vec![(Factor::MainEven, delta_even_main::<f64>, 1)];
    if params.mu != 0.0 {
        factors.push((Factor::SubEven, delta_even_sub::<f64>, 1));
        factors.push((Factor::Odd, odd_root_factor::<f64>, 2));
    }
    for side in Side::BOTH {
        let edge = match side {
            Side::Below => band.e_min,
            Side::Above => band.e_max,
        };
        let z_scale = edge.abs() + window;
        let mut budget = Budget { used: 0, limit: opts.scan.budget };
        let sets: Vec<IntegralSet> = mesh
            .iter()
            .map(|&t| {
                budget.tick()?;
                Ok(watson_integrals_at(side, t, gamma, opts.rel_tol)?)
            })
            .collect::<Result<_, SolverError>>()?;
        let model = EdgeModel::new(gamma, side, source, table)?;
        let deep = watson_integrals_at(side, opts.deep_floor, gamma, opts.rel_tol)?;
        let mut eigs = Vec::new();
        for &(factor, fun, mult) in &factors {
            let mut g = |t: f64| -> Result<f64, SolverError> { Ok(fun(params, &watson_integrals_at(side, t, gamma, opts.rel_tol)?)) };
            let vals: Vec<f64> = sets.iter().map(|s| fun(params, s)).collect();
            let scan = scan_distance(&mut g, &mesh, Some(&vals), z_scale, &mut budget)?;
            let mut roots: Vec<(f64, bool)> = scan.roots.iter().map(|&t| (t, false)).collect();
            let poly: LogPoly = match factor {
                Factor::MainEven => model.main_even(params),
                Factor::SubEven => model.sub_even(params),
                _ => model.odd_root(params),
            };
            let lim = poly.limit_sign(1e-9);
            let near = scan.v_near.signum();
            if lim != 0.0 && lim != near {
                let v_deep = fun(params, &deep);
                if v_deep.signum() != near {
                    roots.push((bisect_distance(&mut g, scan.t_near, near, opts.deep_floor, z_scale, &mut budget)?, false));
                } else if let Some(l) = poly.root_beyond(-opts.deep_floor.ln(), 1e-12) {
                    roots.push(((-l).exp(), true));
                    report.notes.push(format!(
                        "{} factor {}: root beyond distance {:e}, placed from the {} edge model",
                        factor.name(),
                        side.name(),
                        opts.deep_floor,
                        source.name()
                    ));
                } else {
                    report.notes.push(format!(
                        "{} factor {}: {} edge model predicts a pending root that exact evaluation to {:e} does not show",
                        factor.name(),
                        side.name(),
                        source.name(),
                        opts.deep_floor
                    ));
                }
            }
            for (t, edge_bound) in roots {
                let residual = if edge_bound {
                    0.0
                } else {
                    full_det(params, &watson_integrals_at(side, t, gamma, opts.rel_tol)?).abs()
                };
                let z = match side {
                    Side::Below => edge - t,
                    Side::Above => edge + t,
                };
                eigs.push(Eigenvalue { z, gap: t, multiplicity: mult, sector: factor.sector(), factor, residual, edge_bound });
            }
        }
        report.set_side(side, merge(eigs));
    }
    Ok(report)
}

/// Counts eigenvalues beyond a given distance from one band edge via the inertia of D⁻¹ + G.
pub struct InertiaCounter<'a> {
    pub geom: &'a FiberGeometry,
    pub basis: InteractionBasis,
    pub active: Vec<usize>,
    pub rel_tol: f64,
}

impl<'a> InertiaCounter<'a> {
    pub fn new(geom: &'a FiberGeometry, params: &ModelParams, rel_tol: f64) -> Self {
        let basis = InteractionBasis::new(params);
        let active = basis.active();
        InertiaCounter { geom, basis, active, rel_tol }
    }

    fn restrict(&self, g: &Matrix5<f64>) -> DMatrix<f64> {
        let n = self.active.len();
        DMatrix::from_fn(n, n, |i, j| g[(self.active[i], self.active[j])])
    }

    fn d_inv(&self) -> DMatrix<f64> {
        let n = self.active.len();
        DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 / self.basis.weights[self.active[i]] } else { 0.0 })
    }

    fn from_signature(&self, side: Side, pos: usize, neg: usize) -> usize {
        match side {
            Side::Below => pos.saturating_sub(self.basis.positive_rank()),
            Side::Above => neg.saturating_sub(self.basis.negative_rank()),
        }
    }

    /// Number of eigenvalues at distance greater than `t` from the edge on `side`.
    pub fn count(&self, side: Side, t: f64) -> Result<usize, SolverError> {
        let (g, _) = resolvent_gram(self.geom, side, t, self.rel_tol)?;
        let s = self.d_inv() + self.restrict(&g);
        let (pos, neg) = inertia(&s);
        Ok(self.from_signature(side, pos, neg))
    }

    /// Number of eigenvalues outside the band on `side` (limit t → 0).
    pub fn limit_count(&self, side: Side) -> Result<usize, SolverError> {
        let sigma = side.kernel_sign();
        let geom = self.geom;
        let snap = 1e-7 * (1.0 + geom.form.gamma);
        let n = self.active.len();
        let (c, g0) = if geom.reduced.r_outer > snap {
            // G(t) = σ(−ln t)·(2π/√(R₀R₁)) v vᵀ + G₀ + O(t ln t), v = φ(edge point).
            let t1 = 1e-14;
            let v = InteractionBasis::modes(&geom.edge_point(side));
            let amp = 2.0 * PI / (geom.reduced.r_outer * geom.reduced.r_inner).sqrt();
            let c = DMatrix::from_fn(n, n, |i, j| amp * v[self.active[i]] * v[self.active[j]]);
            let (g1, _) = resolvent_gram(geom, side, t1, self.rel_tol)?;
            let g0 = self.restrict(&g1) - &c * (sigma * -t1.ln());
            (c, g0)
        } else {
            // One flat direction: G(t) = σ t^{-1/2} C + G₀ + O(t^{1/2}).
            let mut flat = *geom;
            flat.reduced.r_outer = 0.0;
            let ri = flat.reduced.r_inner;
            let outer_axis = usize::from(flat.swapped);
            let base = flat.edge_point(side).coords();
            let m = 16;
            let h = 2.0 * PI / m as f64;
            let mut c = DMatrix::zeros(n, n);
            for k in 0..m {
                let mut p = base;
                p[outer_axis] = -PI + h * k as f64;
                let phi = InteractionBasis::modes(&TorusPoint::new(p[0], p[1]));
                for i in 0..n {
                    for j in 0..n {
                        c[(i, j)] += phi[self.active[i]] * phi[self.active[j]] * h;
                    }
                }
            }
            c *= PI * (2.0 / ri).sqrt();
            let t1 = 1e-12;
            let r = |t: f64| -> Result<DMatrix<f64>, SolverError> {
                let (g, _) = resolvent_gram(&flat, side, t, self.rel_tol)?;
                Ok(self.restrict(&g) - &c * (sigma / t.sqrt()))
            };
            let g0 = r(t1)? * 2.0 - r(4.0 * t1)?;
            (c, g0)
        };
        let s0 = self.d_inv() + g0;
        let eig = SymmetricEigen::new(c);
        let cmax = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let kernel: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() <= 1e-10 * cmax.max(1e-300)).collect();
        let rank = n - kernel.len();
        let q = DMatrix::from_fn(n, kernel.len(), |i, j| eig.eigenvectors[(i, kernel[j])]);
        let proj = q.transpose() * s0 * &q;
        let (pos, neg) = inertia(&proj);
        let (pos, neg) = match side {
            Side::Below => (pos + rank, neg),
            Side::Above => (pos, neg + rank),
        };
        Ok(self.from_signature(side, pos, neg))
    }
}

/// Clusters (distance, multiplicity) located by bisection on a monotone count n(t), n(t_lo) ≥ n(t_hi).
pub(crate) fn locate_by_count<F>(
    count: &mut F,
    t_lo: f64,
    n_lo: usize,
    t_hi: f64,
    n_hi: usize,
    z_scale: f64,
    budget: usize,
) -> Result<Vec<(f64, usize)>, SolverError>
where
    F: FnMut(f64) -> Result<usize, SolverError>,
{
    let mut b = Budget { used: 0, limit: budget };
    let mut out = Vec::new();
    let mut stack = vec![(t_lo, n_lo, t_hi, n_hi)];
    while let Some((lo, nlo, hi, nhi)) = stack.pop() {
        if nlo <= nhi {
            continue;
        }
        let mid = split(hi, lo);
        if converged(hi, lo, z_scale) || mid <= lo || mid >= hi {
            out.push((split(hi, lo), nlo - nhi));
            continue;
        }
        b.tick()?;
        let nm = count(mid)?;
        let nm = nm.clamp(nhi, nlo);
        stack.push((lo, nlo, mid, nm));
        stack.push((mid, nm, hi, nhi));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Closed-form spectrum of a point band {E}: eigenvalues E + gᵢ.
fn point_band_spectrum(report: &mut SpectrumReport, e: f64, basis: &InteractionBasis) {
    for side in Side::BOTH {
        let eigs: Vec<Eigenvalue> = basis
            .weights
            .iter()
            .filter(|&&g| match side {
                Side::Below => g < 0.0,
                Side::Above => g > 0.0,
            })
            .map(|&g| Eigenvalue {
                z: e + g,
                gap: g.abs(),
                multiplicity: 1,
                sector: Sector::Mixed,
                factor: Factor::General,
                residual: 0.0,
                edge_bound: false,
            })
            .collect();
        report.set_side(side, merge(eigs));
    }
}

/// Spectrum at arbitrary K from inertia counts of the 5×5 secular problem.
pub fn spectrum_general(k: &TorusPoint, params: &ModelParams, opts: &SolverOptions) -> Result<SpectrumReport, SolverError> {
    let band = band_edges(k, params);
    let mut report = SpectrumReport::empty(*k, band);
    let geom = FiberGeometry::new(k, params.gamma);
    let counter = InertiaCounter::new(&geom, params, opts.rel_tol);
    if counter.active.is_empty() {
        return Ok(report);
    }
    if geom.is_degenerate() || geom.reduced.r_inner <= 1e-7 * (1.0 + params.gamma) {
        point_band_spectrum(&mut report, geom.reduced.centre, &counter.basis);
        return Ok(report);
    }
    let window = opts.window(params);
    for side in Side::BOTH {
        let edge = match side {
            Side::Below => geom.e_min(),
            Side::Above => geom.e_max(),
        };
        let n_far = counter.count(side, window)?;
        if n_far > 0 {
            return Err(SolverError::Window { side: side.name(), count: n_far });
        }
        let n_lim = counter.limit_count(side)?;
        let n_deep = counter.count(side, opts.deep_floor)?;
        let mut count = |t: f64| counter.count(side, t);
        let clusters = locate_by_count(&mut count, opts.deep_floor, n_deep, window, 0, edge.abs() + window, opts.scan.budget)?;
        let mut eigs = Vec::new();
        for (t, mult) in clusters {
            let m = secular_matrix_at(&geom, params, side, t, opts.rel_tol)?;
            eigs.push(Eigenvalue {
                z: geom.z_at(side, t),
                gap: t,
                multiplicity: mult,
                sector: Sector::Mixed,
                factor: Factor::General,
                residual: m.det.abs(),
                edge_bound: false,
            });
        }
        if n_lim > n_deep {
            eigs.push(Eigenvalue {
                z: edge,
                gap: opts.deep_floor,
                multiplicity: n_lim - n_deep,
                sector: Sector::Mixed,
                factor: Factor::General,
                residual: 0.0,
                edge_bound: true,
            });
        } else if n_lim < n_deep {
            report.notes.push(format!("{} edge: limit count {n_lim} below count {n_deep} at {:e}", side.name(), opts.deep_floor));
        }
        report.set_side(side, merge(eigs));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, l: f64, m: f64) -> ModelParams {
        ModelParams::new(g, l, m).unwrap()
    }

    fn table(g: f64) -> CalibrationTable {
        CalibrationTable::build(&[g]).unwrap()
    }

    #[test]
    fn scan_linear() {
        let r = scan_and_bisect(|z| z - 1.0, 0.0, 2.0, EdgeEnd::Hi, &ScanOptions::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);
        let r = scan_and_bisect(|z| z - 1.0, 0.0, 2.0, EdgeEnd::Lo, &ScanOptions::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_has_no_sign_change() {
        let r = scan_and_bisect(|z| (z - 1.3).powi(2), 0.0, 2.0, EdgeEnd::Hi, &ScanOptions::default()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn geometric_split_does_not_underflow() {
        let m = split(1e-169, 1e-280);
        assert!(m > 1e-280 && m < 1e-169);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = ScanOptions { budget: 10, ..Default::default() };
        assert_eq!(scan_and_bisect(|z| z, -1.0, 1.0, EdgeEnd::Hi, &opts), Err(SolverError::BudgetExceeded(10)));
    }

    #[test]
    fn empty_for_zero_coupling() {
        let t = table(1.0);
        let r = spectrum_k0(&params(1.0, 0.0, 0.0), ConstantsSource::Computed, &t, &SolverOptions::default()).unwrap();
        assert_eq!((r.n_below, r.n_above), (0, 0));
        let g = spectrum_general(&TorusPoint::new(0.4, 2.0), &params(1.0, 0.0, 0.0), &SolverOptions::default()).unwrap();
        assert_eq!((g.n_below, g.n_above), (0, 0));
    }

    #[test]
    fn single_attractive_state() {
        let t = table(1.0);
        let r = spectrum_k0(&params(1.0, -1.0, 0.0), ConstantsSource::Computed, &t, &SolverOptions::default()).unwrap();
        assert_eq!((r.n_below, r.n_above), (1, 0));
        let s = watson_integrals_at(Side::Below, r.below[0].gap, 1.0, 1e-12).unwrap();
        assert!((s.a - 1.0).abs() < 1e-8);
    }

    #[test]
    fn general_agrees_at_zero_momentum() {
        let t = table(1.0);
        for &(l, m) in &[(-1.0, 0.0), (10.0, 10.0), (1.0, 6.0), (-3.0, -7.0)] {
            let p = params(1.0, l, m);
            let a = spectrum_k0(&p, ConstantsSource::Computed, &t, &SolverOptions::default()).unwrap();
            let b = spectrum_general(&TorusPoint::origin(), &p, &SolverOptions::default()).unwrap();
            assert_eq!(a.values(Side::Below).len(), b.values(Side::Below).len(), "{l} {m}");
            assert_eq!(a.values(Side::Above).len(), b.values(Side::Above).len(), "{l} {m}");
            for side in Side::BOTH {
                for (x, y) in a.values(side).iter().zip(b.values(side)) {
                    assert!((x - y).abs() < 1e-9, "{l} {m} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn point_band_closed_form() {
        let p = params(1.0, 2.0, -3.0);
        let r = spectrum_general(&TorusPoint::new(PI, PI), &p, &SolverOptions::default()).unwrap();
        assert_eq!(r.n_above, 1);
        assert_eq!(r.n_below, 4);
        assert!((r.above[0].z - 6.0).abs() < 1e-12);
        assert!((r.below[0].z - 2.5).abs() < 1e-12);
        assert_eq!(r.below[0].multiplicity, 4);
    }
}
