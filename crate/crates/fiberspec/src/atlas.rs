//! Region labels of the (λ, μ) plane, predicted bound-state counts and parameter sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::determinant::{s_minus, s_plus, EdgeModel, InteractionBasis};
use crate::integrals::{CalibrationTable, ConstantsSource, IntegralError, Side};
use crate::lattice::{ModelParams, TorusPoint};
use crate::spectrum::{spectrum_general, spectrum_k0, Factor, SolverOptions, SpectrumReport};

/// Distance below which a defining equality counts as satisfied.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Sweep points closer than this to a region boundary are flagged.
pub const NEAR_BOUNDARY: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Calibration(#[from] IntegralError),
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Position relative to a pair of thresholds μ = t₋ < 0 < t₊.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band3 {
    Minus,
    Zero,
    Plus,
    BoundaryMinus,
    BoundaryPlus,
}

impl Band3 {
    fn of(mu: f64, lo: f64, hi: f64) -> Self {
        let tol = |t: f64| BOUNDARY_TOL * t.abs().max(1.0);
        if (mu - lo).abs() <= tol(lo) {
            Band3::BoundaryMinus
        } else if (mu - hi).abs() <= tol(hi) {
            Band3::BoundaryPlus
        } else if mu < lo {
            Band3::Minus
        } else if mu > hi {
            Band3::Plus
        } else {
            Band3::Zero
        }
    }

    fn name(self, family: char) -> String {
        match self {
            Band3::Minus => format!("{family}0-"),
            Band3::Zero => format!("{family}0"),
            Band3::Plus => format!("{family}0+"),
            Band3::BoundaryMinus => format!("{family}-b"),
            Band3::BoundaryPlus => format!("{family}+b"),
        }
    }

    /// Membership of the open set beyond the threshold on `side`, and of its boundary.
    fn beyond(self, side: Side) -> (bool, bool) {
        match (side, self) {
            (Side::Above, Band3::Plus) | (Side::Below, Band3::Minus) => (true, false),
            (Side::Above, Band3::BoundaryPlus) | (Side::Below, Band3::BoundaryMinus) => (false, true),
            _ => (false, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CRegion {
    C0,
    C1,
    C2,
    /// S = 0 on the C₀ side.
    BoundaryC0,
    /// S = 0 on the C₂ side.
    BoundaryC2,
    /// μ = ±(1+γ) separating C₀ from C₂ (only with the literal orientation).
    BoundaryC02,
}

impl CRegion {
    pub fn name(self, side: Side) -> String {
        let s = match side {
            Side::Above => '+',
            Side::Below => '-',
        };
        match self {
            CRegion::C0 => format!("C0{s}"),
            CRegion::C1 => format!("C1{s}"),
            CRegion::C2 => format!("C2{s}"),
            CRegion::BoundaryC0 => format!("C0{s}b"),
            CRegion::BoundaryC2 => format!("C2{s}b"),
            CRegion::BoundaryC02 => format!("C02{s}b"),
        }
    }

    /// Main-even contribution (lo, hi) to the K = 0 count.
    fn contribution(self) -> (usize, usize) {
        match self {
            CRegion::C0 | CRegion::BoundaryC0 => (0, 0),
            CRegion::C1 | CRegion::BoundaryC2 => (1, 1),
            CRegion::C2 => (2, 2),
            CRegion::BoundaryC02 => (0, 2),
        }
    }
}

/// Thresholds in μ of the sub-even (S) and odd (D) families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub s_minus: f64,
    pub s_plus: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    /// Sign κ with C₁ on a side ⟺ κ·S < 0, indexed by `Side::index`.
    pub c1_sign: [f64; 2],
}

impl Thresholds {
    pub fn paper(gamma: f64) -> Self {
        let g1 = 1.0 + gamma;
        let s = PI * g1 / (8.0 - 2.0 * PI);
        let d = PI * g1 / (PI - 2.0);
        Thresholds { s_minus: -s, s_plus: s, d_minus: -d, d_plus: d, c1_sign: [1.0, 1.0] }
    }

    pub fn computed(gamma: f64, table: &CalibrationTable) -> Result<Self, IntegralError> {
        let cal = table.get(gamma)?;
        let mut c1_sign = [0.0; 2];
        // Orientation from the edge expansion of the main-even factor at (λ, μ) = (1, 0), where S± = 1.
        let probe = ModelParams { gamma, lambda: 1.0, mu: 0.0 };
        for side in Side::BOTH {
            let poly = EdgeModel::new(gamma, side, ConstantsSource::Computed, table)?.main_even(&probe);
            c1_sign[side.index()] = poly.c[1].signum();
        }
        Ok(Thresholds {
            s_minus: -1.0 / cal.ce_limit(Side::Below),
            s_plus: -1.0 / cal.ce_limit(Side::Above),
            d_minus: -1.0 / cal.f_limit(Side::Below),
            d_plus: -1.0 / cal.f_limit(Side::Above),
            c1_sign,
        })
    }

    pub fn for_source(gamma: f64, source: ConstantsSource, table: &CalibrationTable) -> Result<Self, IntegralError> {
        match source {
            ConstantsSource::Paper => Ok(Self::paper(gamma)),
            ConstantsSource::Computed => Self::computed(gamma, table),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionLabel {
    pub s_region: Band3,
    pub d_region: Band3,
    pub c_plus: CRegion,
    pub c_minus: CRegion,
    pub source: ConstantsSource,
    pub thresholds: Thresholds,
    pub s_plus: f64,
    pub s_minus: f64,
    /// Rank of V on each side (positive and negative weights).
    pub rank_above: usize,
    pub rank_below: usize,
}

impl RegionLabel {
    pub fn c(&self, side: Side) -> CRegion {
        match side {
            Side::Above => self.c_plus,
            Side::Below => self.c_minus,
        }
    }

    pub fn s_name(&self) -> String {
        self.s_region.name('S')
    }

    pub fn d_name(&self) -> String {
        self.d_region.name('D')
    }
}

fn c_region(s: f64, scale: f64, mu: f64, side: Side, gamma: f64, c1_sign: f64) -> CRegion {
    let g1 = 1.0 + gamma;
    let (beyond, on_line) = match side {
        Side::Above => (mu > g1, (mu - g1).abs() <= BOUNDARY_TOL * g1),
        Side::Below => (mu < -g1, (mu + g1).abs() <= BOUNDARY_TOL * g1),
    };
    if s.abs() <= BOUNDARY_TOL * scale {
        if beyond {
            CRegion::BoundaryC2
        } else {
            CRegion::BoundaryC0
        }
    } else if c1_sign * s < 0.0 {
        CRegion::C1
    } else if on_line {
        CRegion::BoundaryC02
    } else if beyond {
        CRegion::C2
    } else {
        CRegion::C0
    }
}

pub fn classify_with(params: &ModelParams, source: ConstantsSource, th: &Thresholds) -> RegionLabel {
    let (l, m, g1) = (params.lambda, params.mu, 1.0 + params.gamma);
    let scale = 1.0 + l.abs() + 2.0 * m.abs() + (l * m).abs() / g1;
    let sp = s_plus(params);
    let sm = s_minus(params);
    let basis = InteractionBasis::new(params);
    RegionLabel {
        s_region: Band3::of(m, th.s_minus, th.s_plus),
        d_region: Band3::of(m, th.d_minus, th.d_plus),
        c_plus: c_region(sp, scale, m, Side::Above, params.gamma, th.c1_sign[Side::Above.index()]),
        c_minus: c_region(sm, scale, m, Side::Below, params.gamma, th.c1_sign[Side::Below.index()]),
        source,
        thresholds: *th,
        s_plus: sp,
        s_minus: sm,
        rank_above: basis.positive_rank(),
        rank_below: basis.negative_rank(),
    }
}

pub fn classify(params: &ModelParams, source: ConstantsSource, table: &CalibrationTable) -> Result<RegionLabel, IntegralError> {
    Ok(classify_with(params, source, &Thresholds::for_source(params.gamma, source, table)?))
}

/// Rows of the count table, by their stated bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableLine {
    Zero,
    One,
    Two,
    Three,
    Four,
    Five,
}

impl TableLine {
    pub fn value(self) -> usize {
        self as usize
    }
}

/// Table row for one side. `s_other` replaces the S membership in rows Four and Three (literal reading
/// of the minus table); pass `None` for the symmetric reading.
fn table_line(label: &RegionLabel, side: Side, s_other: Option<bool>) -> Option<TableLine> {
    let (s_in, _) = label.s_region.beyond(side);
    let (d_in, _) = label.d_region.beyond(side);
    let c = label.c(side);
    let c2 = c == CRegion::C2;
    let c1 = matches!(c, CRegion::C1 | CRegion::BoundaryC2);
    let s_mixed = s_other.unwrap_or(s_in);
    if c2 && s_in && d_in {
        Some(TableLine::Five)
    } else if c1 && s_mixed && d_in {
        Some(TableLine::Four)
    } else if c2 && s_mixed && !d_in {
        Some(TableLine::Three)
    } else if (c2 && !s_in && !d_in) || (c1 && s_in && !d_in) {
        Some(TableLine::Two)
    } else if c1 && !s_in && !d_in {
        Some(TableLine::One)
    } else if matches!(c, CRegion::C0 | CRegion::BoundaryC0) {
        Some(TableLine::Zero)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exactness {
    Exact,
    LowerBound,
}

/// Inclusive range of counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountRange {
    pub lo: usize,
    pub hi: usize,
}

impl CountRange {
    pub fn contains(&self, n: usize) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedCounts {
    pub below_k0: CountRange,
    pub above_k0: CountRange,
    pub lower_bound_below_k: usize,
    pub lower_bound_above_k: usize,
    pub exact_below: Exactness,
    pub exact_above: Exactness,
    pub line_below: Option<TableLine>,
    pub line_above: Option<TableLine>,
    /// Minus-side row under the literal reading that uses S₀⁺ in rows Four and Three.
    pub line_below_literal: Option<TableLine>,
}

impl PredictedCounts {
    pub fn k0(&self, side: Side) -> CountRange {
        match side {
            Side::Above => self.above_k0,
            Side::Below => self.below_k0,
        }
    }

    pub fn lower_bound(&self, side: Side) -> usize {
        match side {
            Side::Above => self.lower_bound_above_k,
            Side::Below => self.lower_bound_below_k,
        }
    }

    pub fn exactness(&self, side: Side) -> Exactness {
        match side {
            Side::Above => self.exact_above,
            Side::Below => self.exact_below,
        }
    }

    pub fn line(&self, side: Side) -> Option<TableLine> {
        match side {
            Side::Above => self.line_above,
            Side::Below => self.line_below,
        }
    }

    pub fn table_conflict(&self) -> bool {
        self.line_below != self.line_below_literal
    }
}

fn side_range(label: &RegionLabel, side: Side) -> CountRange {
    let (c_lo, c_hi) = label.c(side).contribution();
    let (s_in, s_b) = label.s_region.beyond(side);
    let (d_in, d_b) = label.d_region.beyond(side);
    let lo = c_lo + usize::from(s_in) + 2 * usize::from(d_in);
    let hi = c_hi + usize::from(s_in || s_b) + 2 * usize::from(d_in || d_b);
    CountRange { lo, hi }
}

pub fn predicted_counts(label: &RegionLabel) -> PredictedCounts {
    let below = side_range(label, Side::Below);
    let above = side_range(label, Side::Above);
    let line_below = table_line(label, Side::Below, None);
    let line_above = table_line(label, Side::Above, None);
    let (s_plus_in, _) = label.s_region.beyond(Side::Above);
    let line_below_literal = table_line(label, Side::Below, Some(s_plus_in));
    let bound = |r: CountRange, line: Option<TableLine>| r.lo.max(line.map_or(0, TableLine::value));
    let lb_below = bound(below, line_below);
    let lb_above = bound(above, line_above);
    let exact = |lb: usize, rank: usize| if lb >= rank { Exactness::Exact } else { Exactness::LowerBound };
    PredictedCounts {
        below_k0: below,
        above_k0: above,
        lower_bound_below_k: lb_below,
        lower_bound_above_k: lb_above,
        exact_below: exact(lb_below, label.rank_below),
        exact_above: exact(lb_above, label.rank_above),
        line_below,
        line_above,
        line_below_literal,
    }
}

/// Euclidean distance from (x, y) to the hyperbola xy = c, c > 0.
fn hyperbola_distance(x: f64, y: f64, c: f64) -> f64 {
    let r = c.sqrt();
    let d2 = |sgn: f64, u: f64| (sgn * r * u.exp() - x).powi(2) + (sgn * r * (-u).exp() - y).powi(2);
    let mut best = f64::INFINITY;
    for sgn in [1.0, -1.0] {
        let n = 400;
        let (lo, hi) = (-12.0, 12.0);
        let h = (hi - lo) / n as f64;
        let mut k_best = 0;
        let mut v_best = f64::INFINITY;
        for k in 0..=n {
            let v = d2(sgn, lo + h * k as f64);
            if v < v_best {
                v_best = v;
                k_best = k;
            }
        }
        // Golden-section refinement on the bracketing cells.
        let (mut a, mut b) = (lo + h * (k_best as f64 - 1.0), lo + h * (k_best as f64 + 1.0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = b - g * (b - a);
            let m2 = a + g * (b - a);
            if d2(sgn, m1) < d2(sgn, m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        best = best.min(d2(sgn, 0.5 * (a + b)).min(v_best));
    }
    best.sqrt()
}

/// Distance in the (λ, μ) plane to the nearest curve on which a label changes.
pub fn boundary_distance(params: &ModelParams, label: &RegionLabel) -> f64 {
    let (l, m, g1) = (params.lambda, params.mu, 1.0 + params.gamma);
    let th = &label.thresholds;
    let mut d = [th.s_minus, th.s_plus, th.d_minus, th.d_plus].iter().map(|t| (m - t).abs()).fold(f64::INFINITY, f64::min);
    // S⁺ = 0 ⟺ (λ − 2g₁)(μ − g₁) = 2g₁², S⁻ = 0 ⟺ (λ + 2g₁)(μ + g₁) = 2g₁².
    let c = 2.0 * g1 * g1;
    d = d.min(hyperbola_distance(l - 2.0 * g1, m - g1, c));
    d = d.min(hyperbola_distance(l + 2.0 * g1, m + g1, c));
    if label.source == ConstantsSource::Paper {
        d = d.min((m - g1).abs()).min((m + g1).abs());
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub gamma: f64,
    pub lambda_range: (f64, f64),
    pub mu_range: (f64, f64),
    pub step: f64,
    pub k_list: Vec<TorusPoint>,
    pub source: ConstantsSource,
    pub solver: SolverOptions,
}

impl SweepSpec {
    pub fn new(gamma: f64, lambda_range: (f64, f64), mu_range: (f64, f64), step: f64) -> Self {
        SweepSpec {
            gamma,
            lambda_range,
            mu_range,
            step,
            k_list: vec![TorusPoint::origin()],
            source: ConstantsSource::Computed,
            solver: SolverOptions::default(),
        }
    }

    fn validate(&self) -> Result<(), AtlasError> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(AtlasError::Spec("step must be positive".into()));
        }
        for (name, (lo, hi)) in [("lambda", self.lambda_range), ("mu", self.mu_range)] {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(AtlasError::Spec(format!("{name} range must be finite with lo ≤ hi")));
            }
        }
        if self.k_list.is_empty() {
            return Err(AtlasError::Spec("K list is empty".into()));
        }
        ModelParams::new(self.gamma, 0.0, 0.0).map_err(|e| AtlasError::Spec(e.to_string()))?;
        Ok(())
    }
}

/// lo, lo + step, … up to hi (inclusive within 1e−9 of a step).
pub fn grid_axis(range: (f64, f64), step: f64) -> Vec<f64> {
    let n = ((range.1 - range.0) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| range.0 + step * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub mu: f64,
    pub gamma: f64,
    pub k: TorusPoint,
    pub label: Option<RegionLabel>,
    pub predicted: Option<PredictedCounts>,
    /// (below, above)
    pub computed: Option<(usize, usize)>,
    pub eigs_below: Vec<f64>,
    pub eigs_above: Vec<f64>,
    pub agree: bool,
    pub near_boundary: bool,
    pub table_conflict: bool,
    pub error: Option<String>,
}

fn agreement(pred: &PredictedCounts, k0: bool, below: usize, above: usize) -> bool {
    if k0 {
        pred.below_k0.contains(below) && pred.above_k0.contains(above)
    } else {
        let check = |side: Side, n: usize| {
            let lb = pred.lower_bound(side);
            match pred.exactness(side) {
                Exactness::Exact => n == lb,
                Exactness::LowerBound => n >= lb,
            }
        };
        check(Side::Below, below) && check(Side::Above, above)
    }
}

fn sweep_point(spec: &SweepSpec, th: &Thresholds, table: &CalibrationTable, lambda: f64, mu: f64) -> Vec<SweepRow> {
    let base = SweepRow {
        lambda,
        mu,
        gamma: spec.gamma,
        k: TorusPoint::origin(),
        label: None,
        predicted: None,
        computed: None,
        eigs_below: vec![],
        eigs_above: vec![],
        agree: false,
        near_boundary: false,
        table_conflict: false,
        error: None,
    };
    let params = match ModelParams::new(spec.gamma, lambda, mu) {
        Ok(p) => p,
        Err(e) => {
            return spec.k_list.iter().map(|k| SweepRow { k: *k, error: Some(e.to_string()), ..base.clone() }).collect();
        }
    };
    let label = classify_with(&params, spec.source, th);
    let pred = predicted_counts(&label);
    let near = boundary_distance(&params, &label) < NEAR_BOUNDARY;
    let mut k0: Option<Result<SpectrumReport, String>> = None;
    spec.k_list
        .iter()
        .map(|k| {
            let mut row = SweepRow {
                k: *k,
                label: Some(label),
                predicted: Some(pred),
                near_boundary: near,
                table_conflict: pred.table_conflict(),
                ..base.clone()
            };
            let result = if k.is_origin() {
                k0.get_or_insert_with(|| spectrum_k0(&params, spec.source, table, &spec.solver).map_err(|e| e.to_string())).clone()
            } else {
                spectrum_general(k, &params, &spec.solver).map_err(|e| e.to_string())
            };
            match result {
                Ok(r) => {
                    row.computed = Some((r.n_below, r.n_above));
                    row.eigs_below = r.values(Side::Below);
                    row.eigs_above = r.values(Side::Above);
                    row.agree = agreement(&pred, k.is_origin(), r.n_below, r.n_above);
                }
                Err(e) => row.error = Some(e),
            }
            row
        })
        .collect()
}

/// Rows in λ-major, μ, then K order. Per-point failures are recorded in the row.
pub fn sweep(spec: &SweepSpec, table: &CalibrationTable, workers: usize) -> Result<Vec<SweepRow>, AtlasError> {
    spec.validate()?;
    let th = Thresholds::for_source(spec.gamma, spec.source, table)?;
    let lambdas = grid_axis(spec.lambda_range, spec.step);
    let mus = grid_axis(spec.mu_range, spec.step);
    let points: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| mus.iter().map(move |&m| (l, m))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| AtlasError::Pool(e.to_string()))?;
    let rows: Vec<Vec<SweepRow>> = pool.install(|| points.par_iter().map(|&(l, m)| sweep_point(spec, &th, table, l, m)).collect());
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubEvenOnset {
    /// First grid μ with an above-band sub-even eigenvalue.
    pub mu: Option<f64>,
    pub paper_threshold: f64,
    pub computed_threshold: f64,
}

impl SubEvenOnset {
    /// Source whose S threshold lies within one grid step (plus `slack`) of the onset.
    pub fn matches(&self, step: f64, slack: f64) -> Option<ConstantsSource> {
        let mu = self.mu?;
        let near = |t: f64| mu >= t - slack && mu <= t + step + slack;
        match (near(self.paper_threshold), near(self.computed_threshold)) {
            (true, false) => Some(ConstantsSource::Paper),
            (false, true) => Some(ConstantsSource::Computed),
            _ => None,
        }
    }
}

/// Scan μ along fixed λ for the appearance of the sub-even root above the band (binary search on the grid).
pub fn sub_even_onset(gamma: f64, lambda: f64, mu_range: (f64, f64), step: f64, table: &CalibrationTable) -> Result<SubEvenOnset, AtlasError> {
    let mus = grid_axis(mu_range, step);
    let opts = SolverOptions::default();
    let has_root = |mu: f64| -> Result<bool, AtlasError> {
        let p = ModelParams::new(gamma, lambda, mu).map_err(|e| AtlasError::Spec(e.to_string()))?;
        let r = spectrum_k0(&p, ConstantsSource::Computed, table, &opts).map_err(|e| AtlasError::Spec(e.to_string()))?;
        Ok(r.above.iter().any(|e| matches!(e.factor, Factor::SubEven | Factor::General)))
    };
    let th_p = Thresholds::paper(gamma);
    let th_c = Thresholds::computed(gamma, table)?;
    let mut onset = None;
    if !mus.is_empty() && has_root(*mus.last().unwrap())? {
        let (mut lo, mut hi) = (0usize, mus.len() - 1);
        if has_root(mus[0])? {
            onset = Some(mus[0]);
        } else {
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if has_root(mus[mid])? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            onset = Some(mus[hi]);
        }
    }
    Ok(SubEvenOnset { mu: onset, paper_threshold: th_p.s_plus, computed_threshold: th_c.s_plus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> CalibrationTable {
        CalibrationTable::build(&[1.0]).unwrap()
    }

    fn p(l: f64, m: f64) -> ModelParams {
        ModelParams::new(1.0, l, m).unwrap()
    }

    #[test]
    fn origin_is_on_both_c_boundaries() {
        let t = table();
        for src in [ConstantsSource::Paper, ConstantsSource::Computed] {
            let lab = classify(&p(0.0, 0.0), src, &t).unwrap();
            assert_eq!(lab.s_name(), "S0");
            assert_eq!(lab.d_name(), "D0");
            assert_eq!(lab.c_plus.name(Side::Above), "C0+b");
            assert_eq!(lab.c_minus.name(Side::Below), "C0-b");
            let pc = predicted_counts(&lab);
            assert_eq!((pc.below_k0, pc.above_k0), (CountRange { lo: 0, hi: 0 }, CountRange { lo: 0, hi: 0 }));
        }
    }

    #[test]
    fn computed_orientation_flips_plus_side() {
        let th = Thresholds::computed(1.0, &table()).unwrap();
        assert_eq!(th.c1_sign, [1.0, -1.0]);
        let lab = classify_with(&p(1.0, 10.0), ConstantsSource::Computed, &th);
        assert_eq!(lab.c_plus, CRegion::C1);
        assert_eq!(predicted_counts(&lab).above_k0.lo, 4);
        let lab = classify_with(&p(10.0, 10.0), ConstantsSource::Computed, &th);
        assert_eq!(lab.c_plus, CRegion::C2);
        assert_eq!(predicted_counts(&lab).line_above, Some(TableLine::Five));
    }

    #[test]
    fn reference_labels() {
        let lab = classify(&p(1.0, 10.0), ConstantsSource::Paper, &table()).unwrap();
        assert_eq!(lab.c_plus, CRegion::C2);
        assert_eq!(lab.s_region, Band3::Plus);
        assert_eq!(lab.d_region, Band3::Plus);
        let lab = classify(&p(-6.0, 0.0), ConstantsSource::Computed, &table()).unwrap();
        assert_eq!(lab.c_minus, CRegion::C1);
        assert_eq!((lab.s_region, lab.d_region), (Band3::Zero, Band3::Zero));
    }

    #[test]
    fn literal_minus_reading_differs() {
        let lab = classify(&p(1.0, -10.0), ConstantsSource::Computed, &table()).unwrap();
        let pc = predicted_counts(&lab);
        assert_eq!(pc.line_below, Some(TableLine::Four));
        assert_eq!(pc.line_below_literal, None);
        assert!(pc.table_conflict());
        assert_eq!(pc.below_k0.lo, 4);
    }

    #[test]
    fn hyperbola_distance_matches_closed_form() {
        // Nearest point of xy = 1 to the origin is (1, 1).
        assert!((hyperbola_distance(0.0, 0.0, 1.0) - 2f64.sqrt()).abs() < 1e-12);
        assert!(hyperbola_distance(2.0, 0.5, 1.0) < 1e-12);
        assert!((hyperbola_distance(0.5, 0.5, 1.0) - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn grid_axis_inclusive() {
        let a = grid_axis((-1.0, 1.0), 0.5);
        assert_eq!(a, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(grid_axis((3.0, 3.0), 0.1), vec![3.0]);
    }

    #[test]
    fn empty_sweep_rejected() {
        let mut s = SweepSpec::new(1.0, (0.0, 1.0), (0.0, 1.0), 0.0);
        assert!(matches!(sweep(&s, &table(), 1), Err(AtlasError::Spec(_))));
        s.step = 1.0;
        s.k_list.clear();
        assert!(matches!(sweep(&s, &table(), 1), Err(AtlasError::Spec(_))));
    }

    #[test]
    fn single_point_sweep() {
        let s = SweepSpec::new(1.0, (0.0, 0.0), (0.0, 0.0), 0.5);
        let rows = sweep(&s, &table(), 2).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].computed, Some((0, 0)));
        assert!(rows[0].agree);
    }
}
