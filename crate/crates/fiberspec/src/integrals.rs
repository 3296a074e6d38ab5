//! Resolvent integrals of the zero-momentum fiber and their band-edge behaviour.
//!
//! Every 2D integral is reduced to 1D: the inner angle is done in closed form against
//! 1/(A − R cos q₂), the outer one by adaptive Gauss–Kronrod on panels that shrink
//! geometrically toward the singular end. All evaluations are parametrised by the
//! distance `t` to the band edge so that `t` may be as small as 1e−300.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::lattice::{lit, Scalar};
use crate::quadrature::{dyadic_breaks, integrate, QuadError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegralError {
    #[error("z = {0} lies in the closed band")]
    Domain(f64),
    #[error("tolerance failure: {0}")]
    Tolerance(#[from] QuadError),
    #[error("relative tolerance {0:e} is below the supported floor")]
    TolerancePrecondition(f64),
    #[error("no edge calibration available for gamma = {0}")]
    CalibrationMissing(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Below, Side::Above];

    pub fn index(self) -> usize {
        match self {
            Side::Below => 0,
            Side::Above => 1,
        }
    }

    /// Sign of the resolvent kernel 1/(E − z) on this side.
    pub fn kernel_sign(self) -> f64 {
        match self {
            Side::Below => 1.0,
            Side::Above => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Below => "below",
            Side::Above => "above",
        }
    }
}

/// Separable dispersion E(q) = centre − r_outer cos q₁ − r_inner cos q₂ with r_inner ≥ r_outer ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedGeometry<T = f64> {
    pub centre: T,
    pub r_outer: T,
    pub r_inner: T,
}

impl<T: Scalar> ReducedGeometry<T> {
    /// Builds the geometry from the two axis amplitudes; the flag is true when axis 0 became the inner one.
    pub fn new(centre: T, r0: T, r1: T) -> (Self, bool) {
        if r0 > r1 {
            (ReducedGeometry { centre, r_outer: r1, r_inner: r0 }, true)
        } else {
            (ReducedGeometry { centre, r_outer: r0, r_inner: r1 }, false)
        }
    }

    pub fn e_min(&self) -> T {
        self.centre - self.r_outer - self.r_inner
    }

    pub fn e_max(&self) -> T {
        self.centre + self.r_outer + self.r_inner
    }

    pub fn z_at(&self, side: Side, t: T) -> T {
        match side {
            Side::Below => self.e_min() - t,
            Side::Above => self.e_max() + t,
        }
    }
}

/// Index of each weight in [`Moments::w`]; `1` is the outer angle, `2` the inner one.
pub mod weight {
    pub const ONE: usize = 0;
    pub const C1: usize = 1;
    pub const C2: usize = 2;
    pub const C1C1: usize = 3;
    pub const C2C2: usize = 4;
    pub const S1S1: usize = 5;
    pub const S2S2: usize = 6;
    pub const C1C2: usize = 7;
}

/// (1/(2π)²)∫ w(q) dq/(E(q) − z) for the eight even weights listed in [`weight`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T = f64> {
    pub w: [T; 8],
    pub est_error: T,
}

const MAX_PANELS: usize = 6000;

fn check_tol<T: Scalar>(rel_tol: T) -> Result<(), IntegralError> {
    let floor = lit::<T>(1e-13).max(lit::<T>(10.0) * T::epsilon());
    if !(rel_tol >= floor) {
        return Err(IntegralError::TolerancePrecondition(rel_tol.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Resolvent moments at distance `t > 0` from the edge on `side`.
pub fn resolvent_moments<T: Scalar>(geom: &ReducedGeometry<T>, side: Side, t: T, rel_tol: T) -> Result<Moments<T>, IntegralError> {
    check_tol(rel_tol)?;
    if !(t > T::zero()) {
        return Err(IntegralError::Domain(geom.z_at(side, t).to_f64().unwrap_or(f64::NAN)));
    }
    let r1 = geom.r_outer;
    let r2 = geom.r_inner;
    let two: T = lit(2.0);
    let half: T = lit(0.5);
    let inv_pi = T::FRAC_1_PI();
    // In u = q₁ (below) or u = π − q₁ (above) the singular end is u = 0 and
    // |A| − r₂ = t + 2 r₁ sin²(u/2) holds on both sides.
    let (s, c1_sign) = match side {
        Side::Below => (T::one(), T::one()),
        Side::Above => (-T::one(), -T::one()),
    };
    let integrand = |u: T| -> [T; 8] {
        let sh = (half * u).sin();
        let dm = t + two * r1 * sh * sh;
        let abs_a = r2 + dm;
        let d = (dm * (abs_a + r2)).sqrt();
        let i0 = s / d;
        let den = d * (abs_a + d);
        let i1 = r2 / den;
        let i2 = s * abs_a / den;
        let is = s / (abs_a + d);
        let c1 = c1_sign * u.cos();
        let s1 = u.sin();
        [
            i0 * inv_pi,
            c1 * i0 * inv_pi,
            i1 * inv_pi,
            c1 * c1 * i0 * inv_pi,
            i2 * inv_pi,
            s1 * s1 * i0 * inv_pi,
            is * inv_pi,
            c1 * i1 * inv_pi,
        ]
    };
    let breaks = if r1 > T::zero() {
        let w_min = half * (t / r1).sqrt();
        if w_min >= T::PI() {
            vec![T::zero(), T::PI()]
        } else {
            dyadic_breaks(T::PI(), w_min)
        }
    } else {
        vec![T::zero(), T::PI()]
    };
    let r = integrate(integrand, &breaks, rel_tol, MAX_PANELS)?;
    Ok(Moments { w: r.value, est_error: r.error })
}

/// The five integrals a, b, c, e, f at z outside the zero-momentum band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralSet<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub e: T,
    pub f: T,
    pub z: T,
    pub est_error: T,
    pub side: Side,
    /// Distance |z − edge| the set was computed at (exact, unlike `z`).
    pub distance: T,
}

impl<T: Scalar> IntegralSet<T> {
    fn from_moments(m: &Moments<T>, z: T, side: Side, distance: T) -> Self {
        IntegralSet {
            a: m.w[weight::ONE],
            b: m.w[weight::C1],
            c: m.w[weight::C1C1],
            e: m.w[weight::C1C2],
            f: m.w[weight::S1S1],
            z,
            est_error: m.est_error,
            side,
            distance,
        }
    }

    pub fn get(&self, which: Which) -> T {
        match which {
            Which::A => self.a,
            Which::B => self.b,
            Which::C => self.c,
            Which::E => self.e,
            Which::F => self.f,
        }
    }
}

pub fn zero_momentum_geometry<T: Scalar>(gamma: T) -> ReducedGeometry<T> {
    let r = T::one() + gamma;
    ReducedGeometry { centre: r + r, r_outer: r, r_inner: r }
}

/// Integrals at distance `t` from the band edge on `side`.
pub fn watson_integrals_at<T: Scalar>(side: Side, t: T, gamma: T, rel_tol: T) -> Result<IntegralSet<T>, IntegralError> {
    let g = zero_momentum_geometry(gamma);
    let m = resolvent_moments(&g, side, t, rel_tol)?;
    Ok(IntegralSet::from_moments(&m, g.z_at(side, t), side, t))
}

/// Integrals at z ∉ [0, 4(1+γ)].
pub fn watson_integrals<T: Scalar>(z: T, gamma: T, rel_tol: T) -> Result<IntegralSet<T>, IntegralError> {
    let top = lit::<T>(4.0) * (T::one() + gamma);
    let (side, t) = if z < T::zero() {
        (Side::Below, -z)
    } else if z > top {
        (Side::Above, z - top)
    } else {
        return Err(IntegralError::Domain(z.to_f64().unwrap_or(f64::NAN)));
    };
    let mut set = watson_integrals_at(side, t, gamma, rel_tol)?;
    set.z = z;
    Ok(set)
}

/// Independent route: periodic trapezoid on the full torus with grid doubling.
/// Intended for |z − edge| ≥ 0.05, where it converges spectrally.
pub fn watson_integrals_trapezoid<T: Scalar>(z: T, gamma: T, rel_tol: T) -> Result<IntegralSet<T>, IntegralError> {
    let top = lit::<T>(4.0) * (T::one() + gamma);
    let side = if z < T::zero() {
        Side::Below
    } else if z > top {
        Side::Above
    } else {
        return Err(IntegralError::Domain(z.to_f64().unwrap_or(f64::NAN)));
    };
    let distance = if side == Side::Below { -z } else { z - top };
    let eval = |n: usize| -> [T; 5] {
        let mut acc = [T::zero(); 5];
        let h = lit::<T>(2.0) * T::PI() / lit(n as f64);
        let cs: Vec<(T, T)> = (0..n).map(|j| ((h * lit(j as f64)).cos(), (h * lit(j as f64)).sin())).collect();
        for &(c1, s1) in &cs {
            for &(c2, _) in &cs {
                let e = (T::one() + gamma) * (lit::<T>(2.0) - c1 - c2);
                let k = T::one() / (e - z);
                acc[0] = acc[0] + k;
                acc[1] = acc[1] + c1 * k;
                acc[2] = acc[2] + c1 * c1 * k;
                acc[3] = acc[3] + c1 * c2 * k;
                acc[4] = acc[4] + s1 * s1 * k;
            }
        }
        let norm = T::one() / lit((n * n) as f64);
        acc.map(|x| x * norm)
    };
    let mut n = 16;
    let mut prev = eval(n);
    loop {
        n *= 2;
        let cur = eval(n);
        let scale = cur.iter().map(|x| x.abs()).fold(T::zero(), T::max);
        let diff = (0..5).map(|k| (cur[k] - prev[k]).abs()).fold(T::zero(), T::max);
        if diff <= rel_tol * scale {
            return Ok(IntegralSet { a: cur[0], b: cur[1], c: cur[2], e: cur[3], f: cur[4], z, est_error: diff, side, distance });
        }
        if n >= 2048 {
            return Err(IntegralError::Tolerance(QuadError::Budget {
                requested: rel_tol.to_f64().unwrap_or(f64::NAN),
                achieved: (diff / scale).to_f64().unwrap_or(f64::NAN),
                panels: n,
            }));
        }
        prev = cur;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    A,
    B,
    C,
    E,
    F,
}

impl Which {
    pub const ALL: [Which; 5] = [Which::A, Which::B, Which::C, Which::E, Which::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Which::A => "a",
            Which::B => "b",
            Which::C => "c",
            Which::E => "e",
            Which::F => "f",
        }
    }

    /// Weight value at the band-edge point: p = 0 below, p = (π, π) above.
    fn edge_weight(self, side: Side) -> f64 {
        match (self, side) {
            (Which::F, _) => 0.0,
            (Which::B, Side::Above) => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantsSource {
    Paper,
    Computed,
}

impl ConstantsSource {
    pub fn name(self) -> &'static str {
        match self {
            ConstantsSource::Paper => "paper",
            ConstantsSource::Computed => "computed",
        }
    }
}

/// Log-linear edge model: value ≈ ∓ log_slope · ln t + offset (upper sign below the band).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeAsymptotics {
    pub side: Side,
    pub log_slope: f64,
    pub offset: f64,
    pub source: ConstantsSource,
}

impl EdgeAsymptotics {
    pub fn eval(&self, t: f64) -> f64 {
        match self.side {
            Side::Below => -self.log_slope * t.ln() + self.offset,
            Side::Above => self.log_slope * t.ln() + self.offset,
        }
    }

    /// Model as (constant, coefficient) in L = −ln t.
    pub fn in_log(&self) -> (f64, f64) {
        match self.side {
            Side::Below => (self.offset, self.log_slope),
            Side::Above => (self.offset, -self.log_slope),
        }
    }
}

fn unit_slope(gamma: f64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * (1.0 + gamma))
}

/// The published constants, verbatim.
pub fn paper_asymptote(which: Which, side: Side, gamma: f64) -> EdgeAsymptotics {
    use std::f64::consts::{LN_2, PI};
    let s = unit_slope(gamma);
    let l5 = 5.0 * LN_2;
    let (slope, off_below) = match which {
        Which::A => (s, l5 * s),
        Which::B => (s, (l5 - PI) * s),
        Which::C => (s, (l5 - 3.0 * PI + 8.0) * s),
        Which::E => (s, (l5 + PI - 8.0) * s),
        Which::F => (0.0, (PI - 2.0) / (PI * (1.0 + gamma))),
    };
    let offset = match side {
        Side::Below => off_below,
        Side::Above => -off_below,
    };
    EdgeAsymptotics { side, log_slope: slope, offset, source: ConstantsSource::Paper }
}

pub const CALIBRATION_DISTANCES: [f64; 3] = [1e-4, 1e-5, 1e-6];
const CALIBRATION_TOL: f64 = 1e-13;

/// Numerically extracted edge constants for one γ.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCalibration {
    pub gamma: f64,
    computed: [[EdgeAsymptotics; 2]; 5],
    measured_slope: [[f64; 2]; 5],
}

impl EdgeCalibration {
    pub fn get(&self, which: Which, side: Side) -> EdgeAsymptotics {
        self.computed[which.index()][side.index()]
    }

    pub fn paper(&self, which: Which, side: Side) -> EdgeAsymptotics {
        paper_asymptote(which, side, self.gamma)
    }

    /// Two-point slope measured at distances 1e−6 and 1e−7, in the ∓ convention.
    pub fn measured_slope(&self, which: Which, side: Side) -> f64 {
        self.measured_slope[which.index()][side.index()]
    }

    /// Computed minus published offset.
    pub fn discrepancy(&self, which: Which, side: Side) -> f64 {
        self.get(which, side).offset - self.paper(which, side).offset
    }

    /// Edge limit of c − e (the logarithms cancel).
    pub fn ce_limit(&self, side: Side) -> f64 {
        self.get(Which::C, side).offset - self.get(Which::E, side).offset
    }

    pub fn f_limit(&self, side: Side) -> f64 {
        self.get(Which::F, side).offset
    }
}

/// Fit value − (∓ slope ln t) = offset + β t ln t + δ t through the three calibration
/// distances, with the slope fixed to the weight of the integrand at the edge point.
pub fn calibrate_edge_constants(gamma: f64) -> Result<EdgeCalibration, IntegralError> {
    let s = unit_slope(gamma);
    let mut computed = [[EdgeAsymptotics { side: Side::Below, log_slope: 0.0, offset: 0.0, source: ConstantsSource::Computed }; 2]; 5];
    let mut measured_slope = [[0.0; 2]; 5];
    for side in Side::BOTH {
        let sets: Vec<IntegralSet> = CALIBRATION_DISTANCES
            .iter()
            .map(|&t| watson_integrals_at(side, t, gamma, CALIBRATION_TOL))
            .collect::<Result<_, _>>()?;
        let near = [watson_integrals_at(side, 1e-6, gamma, CALIBRATION_TOL)?, watson_integrals_at(side, 1e-7, gamma, CALIBRATION_TOL)?];
        let m = Matrix3::from_fn(|i, j| {
            let t = CALIBRATION_DISTANCES[i];
            [1.0, t * t.ln(), t][j]
        });
        let lu = m.lu();
        for which in Which::ALL {
            let slope = s * which.edge_weight(side);
            let model = EdgeAsymptotics { side, log_slope: slope, offset: 0.0, source: ConstantsSource::Computed };
            let rhs = Vector3::from_fn(|i, _| sets[i].get(which) - model.eval(CALIBRATION_DISTANCES[i]));
            let sol = lu.solve(&rhs).expect("calibration design matrix is regular");
            computed[which.index()][side.index()] = EdgeAsymptotics { offset: sol[0], ..model };
            let dv = near[0].get(which) - near[1].get(which);
            let dl = (1e-6f64).ln() - (1e-7f64).ln();
            measured_slope[which.index()][side.index()] = match side {
                Side::Below => -dv / dl,
                Side::Above => dv / dl,
            };
        }
    }
    Ok(EdgeCalibration { gamma, computed, measured_slope })
}

/// Immutable collection of calibrations keyed by γ.
#[derive(Debug, Clone, Default)]
pub struct CalibrationTable {
    entries: Vec<EdgeCalibration>,
}

impl CalibrationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build(gammas: &[f64]) -> Result<Self, IntegralError> {
        let mut table = Self::new();
        for &g in gammas {
            if table.get(g).is_err() {
                table.entries.push(calibrate_edge_constants(g)?);
            }
        }
        Ok(table)
    }

    pub fn with(mut self, cal: EdgeCalibration) -> Self {
        if self.get(cal.gamma).is_err() {
            self.entries.push(cal);
        }
        self
    }

    pub fn get(&self, gamma: f64) -> Result<&EdgeCalibration, IntegralError> {
        self.entries
            .iter()
            .find(|c| c.gamma == gamma)
            .ok_or(IntegralError::CalibrationMissing(gamma))
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.gamma).collect()
    }
}

pub fn predicted_asymptote(
    which: Which,
    side: Side,
    gamma: f64,
    source: ConstantsSource,
    table: &CalibrationTable,
) -> Result<EdgeAsymptotics, IntegralError> {
    match source {
        ConstantsSource::Paper => Ok(paper_asymptote(which, side, gamma)),
        ConstantsSource::Computed => Ok(table.get(gamma)?.get(which, side)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn far_below_is_small_and_positive() {
        let s = watson_integrals(-1e6, 1.0, 1e-10).unwrap();
        assert!(s.a > 0.0 && s.a < 1e-5);
        for v in [s.b, s.c, s.e, s.f] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn domain_and_tolerance_errors() {
        assert!(matches!(watson_integrals(3.0, 1.0, 1e-10), Err(IntegralError::Domain(_))));
        assert!(matches!(watson_integrals(0.0, 1.0, 1e-10), Err(IntegralError::Domain(_))));
        assert!(matches!(watson_integrals(8.0, 1.0, 1e-10), Err(IntegralError::Domain(_))));
        assert!(matches!(watson_integrals(-1.0, 1.0, 1e-15), Err(IntegralError::TolerancePrecondition(_))));
    }

    #[test]
    fn reflection_about_band_centre() {
        let lo = watson_integrals(-1.0, 1.0, 1e-12).unwrap();
        let hi = watson_integrals(9.0, 1.0, 1e-12).unwrap();
        assert!(close(lo.a, -hi.a, 1e-11));
        assert!(close(lo.c, -hi.c, 1e-11));
        assert!(close(lo.e, -hi.e, 1e-11));
        assert!(close(lo.f, -hi.f, 1e-11));
        assert!(close(lo.b, hi.b, 1e-11));
    }

    #[test]
    fn matches_trapezoid_away_from_edge() {
        for &g in &[0.5, 1.0, 2.0] {
            let top = 4.0 * (1.0 + g);
            for z in [-0.05, -0.7, -3.0, top + 0.05, top + 2.0] {
                let a: IntegralSet = watson_integrals(z, g, 1e-12).unwrap();
                let b: IntegralSet = watson_integrals_trapezoid(z, g, 1e-13).unwrap();
                for w in Which::ALL {
                    assert!((a.get(w) - b.get(w)).abs() < 1e-11 * (1.0 + a.a.abs()), "{g} {z} {w:?}");
                }
            }
        }
    }

    #[test]
    fn f_limit_closed_form() {
        let s = watson_integrals_at(Side::Below, 1e-12, 1.0, 1e-12).unwrap();
        assert!((s.f - (PI - 2.0) / (2.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn deep_edge_stays_finite() {
        let s = watson_integrals_at(Side::Below, 1e-280, 1.0, 1e-12).unwrap();
        let slope = 1.0 / (4.0 * PI);
        let off = s.a + slope * (1e-280f64).ln();
        assert!((off - 5.0 * LN_2 * slope).abs() < 1e-9);
    }

    #[test]
    fn calibration_lookup() {
        let t = CalibrationTable::new();
        assert!(matches!(
            predicted_asymptote(Which::A, Side::Below, 1.0, ConstantsSource::Computed, &t),
            Err(IntegralError::CalibrationMissing(_))
        ));
        let p = predicted_asymptote(Which::A, Side::Below, 1.0, ConstantsSource::Paper, &t).unwrap();
        assert!((p.log_slope - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((p.offset - 5.0 * LN_2 / (4.0 * PI)).abs() < 1e-16);
        let f = paper_asymptote(Which::F, Side::Above, 1.0);
        assert_eq!(f.log_slope, 0.0);
        assert!((f.offset + (PI - 2.0) / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn single_precision_agrees() {
        let d = watson_integrals(-0.5f64, 1.0, 1e-12).unwrap();
        let s = watson_integrals(-0.5f32, 1.0, 1e-5).unwrap();
        assert!((d.a - s.a as f64).abs() < 1e-5);
        assert!((d.e - s.e as f64).abs() < 1e-5);
    }
}
