//! Secular determinants of the rank-5 interaction: closed-form factors at K = 0 and the
//! 5×5 matrix M = I + D·G(z) at arbitrary K.

use std::f64::consts::PI;

use nalgebra::{Matrix5, SymmetricEigen};

use crate::integrals::{
    predicted_asymptote, resolvent_moments, weight, CalibrationTable, ConstantsSource, EdgeAsymptotics, IntegralError,
    IntegralSet, ReducedGeometry, Side, Which,
};
use crate::lattice::{ModelParams, PhaseForm, Scalar, TorusPoint};

/// The five weighted modes (g, φ) spanning the range of V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionBasis {
    pub weights: [f64; 5],
}

impl InteractionBasis {
    pub fn new(params: &ModelParams) -> Self {
        let h = params.mu / 2.0;
        InteractionBasis { weights: [params.lambda, h, h, h, h] }
    }

    /// φ₀..φ₄ = 1/(2π), cos p₁/(√2π), cos p₂/(√2π), sin p₁/(√2π), sin p₂/(√2π).
    pub fn modes(p: &TorusPoint) -> [f64; 5] {
        let n0 = 1.0 / (2.0 * PI);
        let n1 = 1.0 / (2.0f64.sqrt() * PI);
        [n0, n1 * p.p1().cos(), n1 * p.p2().cos(), n1 * p.p1().sin(), n1 * p.p2().sin()]
    }

    /// Indices of modes with nonzero weight.
    pub fn active(&self) -> Vec<usize> {
        (0..5).filter(|&i| self.weights[i] != 0.0).collect()
    }

    pub fn positive_rank(&self) -> usize {
        self.weights.iter().filter(|&&g| g > 0.0).count()
    }

    pub fn negative_rank(&self) -> usize {
        self.weights.iter().filter(|&&g| g < 0.0).count()
    }

    /// (V f)(p) = Σ g (f, φ) φ(p) with inner products on an n×n periodic grid.
    pub fn apply(&self, f: &dyn Fn(&TorusPoint) -> f64, p: &TorusPoint, n: usize) -> f64 {
        let h = 2.0 * PI / n as f64;
        let mut inner = [0.0; 5];
        for i in 0..n {
            for j in 0..n {
                let q = TorusPoint::new(-PI + h * i as f64, -PI + h * j as f64);
                let fq = f(&q);
                let m = Self::modes(&q);
                for k in 0..5 {
                    inner[k] += fq * m[k] * h * h;
                }
            }
        }
        let m = Self::modes(p);
        (0..5).map(|k| self.weights[k] * inner[k] * m[k]).sum()
    }
}

/// Odd-sector factor (1 + μf)².
pub fn delta_odd<T: Scalar>(params: &ModelParams<T>, ints: &IntegralSet<T>) -> T {
    let r = odd_root_factor(params, ints);
    r * r
}

/// 1 + μf; crosses zero transversally where (1 + μf)² has its double zero.
pub fn odd_root_factor<T: Scalar>(params: &ModelParams<T>, ints: &IntegralSet<T>) -> T {
    T::one() + params.mu * ints.f
}

/// Simple even factor 1 + μ(c − e).
pub fn delta_even_sub<T: Scalar>(params: &ModelParams<T>, ints: &IntegralSet<T>) -> T {
    T::one() + params.mu * (ints.c - ints.e)
}

/// Coupled even factor (1 + λa)(1 + μ(c + e)) − 2λμb².
pub fn delta_even_main<T: Scalar>(params: &ModelParams<T>, ints: &IntegralSet<T>) -> T {
    let two = T::one() + T::one();
    (T::one() + params.lambda * ints.a) * (T::one() + params.mu * (ints.c + ints.e)) - two * params.lambda * params.mu * ints.b * ints.b
}

pub fn s_plus(params: &ModelParams) -> f64 {
    2.0 * params.mu + params.lambda - params.lambda * params.mu / (1.0 + params.gamma)
}

pub fn s_minus(params: &ModelParams) -> f64 {
    2.0 * params.mu + params.lambda + params.lambda * params.mu / (1.0 + params.gamma)
}

/// Published constant term of the coupled even factor at the lower (`Below`) or upper edge.
pub fn paper_b_constant(params: &ModelParams, side: Side) -> f64 {
    let l5 = 5.0 * std::f64::consts::LN_2;
    let g1 = 1.0 + params.gamma;
    let (lam, mu) = (params.lambda, params.mu);
    let cross = (l5 - PI) / (PI * g1) * (l5 / (2.0 * PI * g1) - 1.0) * lam * mu;
    match side {
        Side::Below => 1.0 + (l5 - PI) / (PI * g1) * mu + l5 / (2.0 * PI * g1) * lam + cross,
        Side::Above => 1.0 - (l5 - PI) / (PI * g1) * mu - l5 / (2.0 * PI * g1) * lam + cross,
    }
}

/// Polynomial c₀ + c₁L + c₂L² in L = −ln(distance to the edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPoly {
    pub c: [f64; 3],
}

impl LogPoly {
    fn linear(c0: f64, c1: f64) -> Self {
        LogPoly { c: [c0, c1, 0.0] }
    }

    fn constant(c0: f64) -> Self {
        LogPoly { c: [c0, 0.0, 0.0] }
    }

    fn mul(&self, o: &Self) -> Self {
        let a = self.c;
        let b = o.c;
        // Products of linear polynomials only; the cubic part never arises.
        LogPoly { c: [a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1] + a[0] * b[2] + a[2] * b[0]] }
    }

    fn add(&self, o: &Self) -> Self {
        LogPoly { c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]] }
    }

    fn scale(&self, s: f64) -> Self {
        LogPoly { c: self.c.map(|x| x * s) }
    }

    pub fn eval(&self, l: f64) -> f64 {
        self.c[0] + l * (self.c[1] + l * self.c[2])
    }

    /// Sign as L → ∞, ignoring coefficients below `rel` of the polynomial's scale.
    pub fn limit_sign(&self, rel: f64) -> f64 {
        let scale = self.c.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        for k in (0..3).rev() {
            if self.c[k].abs() > rel * scale {
                return self.c[k].signum();
            }
        }
        0.0
    }

    /// Largest real root greater than `l0`, if any.
    pub fn root_beyond(&self, l0: f64, rel: f64) -> Option<f64> {
        let scale = self.c.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        let [c0, c1, c2] = self.c;
        let roots: Vec<f64> = if c2.abs() > rel * scale {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc < 0.0 {
                vec![]
            } else {
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                let mut v = vec![q / c2];
                if q != 0.0 {
                    v.push(c0 / q);
                }
                v
            }
        } else if c1.abs() > rel * scale {
            vec![-c0 / c1]
        } else {
            vec![]
        };
        roots.into_iter().filter(|&r| r > l0).fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }
}

/// Log-linear models of a, b, c, e, f at one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeModel {
    pub side: Side,
    pub models: [EdgeAsymptotics; 5],
}

impl EdgeModel {
    pub fn new(gamma: f64, side: Side, source: ConstantsSource, table: &CalibrationTable) -> Result<Self, IntegralError> {
        let mut models = [predicted_asymptote(Which::A, side, gamma, ConstantsSource::Paper, table)?; 5];
        for w in Which::ALL {
            models[w.index()] = predicted_asymptote(w, side, gamma, source, table)?;
        }
        Ok(EdgeModel { side, models })
    }

    fn poly(&self, w: Which) -> LogPoly {
        let (c0, c1) = self.models[w.index()].in_log();
        LogPoly::linear(c0, c1)
    }

    pub fn main_even(&self, params: &ModelParams) -> LogPoly {
        let one = LogPoly::constant(1.0);
        let a = self.poly(Which::A);
        let b = self.poly(Which::B);
        let ce = self.poly(Which::C).add(&self.poly(Which::E));
        let left = one.add(&a.scale(params.lambda)).mul(&one.add(&ce.scale(params.mu)));
        left.add(&b.mul(&b).scale(-2.0 * params.lambda * params.mu))
    }

    pub fn sub_even(&self, params: &ModelParams) -> LogPoly {
        let d = self.poly(Which::C).add(&self.poly(Which::E).scale(-1.0));
        LogPoly::constant(1.0).add(&d.scale(params.mu))
    }

    pub fn odd_root(&self, params: &ModelParams) -> LogPoly {
        LogPoly::constant(1.0).add(&self.poly(Which::F).scale(params.mu))
    }
}

/// Dispersion at fixed K in the form used by the 1D-reduced quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberGeometry {
    pub k: TorusPoint,
    pub form: PhaseForm,
    pub reduced: ReducedGeometry,
    /// True when axis 0 of p is the inner quadrature variable.
    pub swapped: bool,
}

impl FiberGeometry {
    pub fn new(k: &TorusPoint, gamma: f64) -> Self {
        let form = PhaseForm::new(k, gamma);
        let (reduced, swapped) = ReducedGeometry::new(form.centre(), form.amp[0], form.amp[1]);
        FiberGeometry { k: *k, form, reduced, swapped }
    }

    pub fn e_min(&self) -> f64 {
        self.reduced.e_min()
    }

    pub fn e_max(&self) -> f64 {
        self.reduced.e_max()
    }

    pub fn is_degenerate(&self) -> bool {
        self.e_max() - self.e_min() < 1e-12
    }

    pub fn z_at(&self, side: Side, t: f64) -> f64 {
        self.reduced.z_at(side, t)
    }

    /// Side and edge distance of z, or a domain error when z is in the band.
    pub fn locate(&self, z: f64) -> Result<(Side, f64), IntegralError> {
        if self.is_degenerate() {
            let e = self.reduced.centre;
            return if z < e {
                Ok((Side::Below, e - z))
            } else if z > e {
                Ok((Side::Above, z - e))
            } else {
                Err(IntegralError::Domain(z))
            };
        }
        if z < self.e_min() {
            Ok((Side::Below, self.e_min() - z))
        } else if z > self.e_max() {
            Ok((Side::Above, z - self.e_max()))
        } else {
            Err(IntegralError::Domain(z))
        }
    }

    /// Point of the torus where E_K attains the edge on `side`.
    pub fn edge_point(&self, side: Side) -> TorusPoint {
        let shift = match side {
            Side::Below => 0.0,
            Side::Above => PI,
        };
        TorusPoint::new(self.form.phase[0] + shift, self.form.phase[1] + shift)
    }

    /// Map u = (1, cos q₀, cos q₁, sin q₀, sin q₁) coefficients of the modes, q = p − θ.
    fn mode_coefficients(&self) -> Matrix5<f64> {
        let n0 = 1.0 / (2.0 * PI);
        let n1 = 1.0 / (2.0f64.sqrt() * PI);
        let (s0, c0) = self.form.phase[0].sin_cos();
        let (s1, c1) = self.form.phase[1].sin_cos();
        let mut t = Matrix5::zeros();
        t[(0, 0)] = n0;
        t[(1, 1)] = n1 * c0;
        t[(1, 3)] = -n1 * s0;
        t[(2, 2)] = n1 * c1;
        t[(2, 4)] = -n1 * s1;
        t[(3, 1)] = n1 * s0;
        t[(3, 3)] = n1 * c0;
        t[(4, 2)] = n1 * s1;
        t[(4, 4)] = n1 * c1;
        t
    }
}

/// G_ij = ∫ φᵢφⱼ dp/(E_K(p) − z) at distance `t` from the edge on `side`, with its error estimate.
pub fn resolvent_gram(geom: &FiberGeometry, side: Side, t: f64, rel_tol: f64) -> Result<(Matrix5<f64>, f64), IntegralError> {
    let m = resolvent_moments(&geom.reduced, side, t, rel_tol)?;
    let o = usize::from(geom.swapped);
    // Axis-indexed views of the outer/inner moments.
    let c = [[weight::C1, weight::C2], [weight::C2, weight::C1]][o];
    let cc = [[weight::C1C1, weight::C2C2], [weight::C2C2, weight::C1C1]][o];
    let ss = [[weight::S1S1, weight::S2S2], [weight::S2S2, weight::S1S1]][o];
    let mut u = Matrix5::zeros();
    u[(0, 0)] = m.w[weight::ONE];
    u[(0, 1)] = m.w[c[0]];
    u[(1, 0)] = m.w[c[0]];
    u[(0, 2)] = m.w[c[1]];
    u[(2, 0)] = m.w[c[1]];
    u[(1, 1)] = m.w[cc[0]];
    u[(2, 2)] = m.w[cc[1]];
    u[(1, 2)] = m.w[weight::C1C2];
    u[(2, 1)] = m.w[weight::C1C2];
    u[(3, 3)] = m.w[ss[0]];
    u[(4, 4)] = m.w[ss[1]];
    let t5 = geom.mode_coefficients();
    let g = t5 * u * t5.transpose() * (4.0 * PI * PI);
    Ok((g, m.est_error * 4.0 * PI * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularMatrix {
    pub z: f64,
    pub k: TorusPoint,
    pub entries: Matrix5<f64>,
    pub det: f64,
}

impl SecularMatrix {
    fn from_gram(z: f64, k: TorusPoint, basis: &InteractionBasis, g: &Matrix5<f64>) -> Self {
        let d = Matrix5::from_diagonal(&basis.weights.into());
        let entries = Matrix5::identity() + d * g;
        let det = entries.lu().determinant();
        SecularMatrix { z, k, entries, det }
    }

    /// Number of singular values below `tol`.
    pub fn nullity(&self, tol: f64) -> usize {
        self.entries.singular_values().iter().filter(|&&s| s < tol).count()
    }
}

pub fn secular_matrix_at(geom: &FiberGeometry, params: &ModelParams, side: Side, t: f64, rel_tol: f64) -> Result<SecularMatrix, IntegralError> {
    let (g, _) = resolvent_gram(geom, side, t, rel_tol)?;
    Ok(SecularMatrix::from_gram(geom.z_at(side, t), geom.k, &InteractionBasis::new(params), &g))
}

pub fn secular_matrix(z: f64, k: &TorusPoint, params: &ModelParams, rel_tol: f64) -> Result<SecularMatrix, IntegralError> {
    let geom = FiberGeometry::new(k, params.gamma);
    let (side, t) = geom.locate(z)?;
    let mut m = secular_matrix_at(&geom, params, side, t, rel_tol)?;
    m.z = z;
    Ok(m)
}

/// Cross-check route: periodic trapezoid on the torus with grid doubling.
pub fn secular_matrix_trapezoid(z: f64, k: &TorusPoint, params: &ModelParams, rel_tol: f64) -> Result<SecularMatrix, IntegralError> {
    let geom = FiberGeometry::new(k, params.gamma);
    geom.locate(z)?;
    let eval = |n: usize| {
        let h = 2.0 * PI / n as f64;
        let mut g = Matrix5::<f64>::zeros();
        for i in 0..n {
            for j in 0..n {
                let p = TorusPoint::new(-PI + h * i as f64, -PI + h * j as f64);
                let w = 1.0 / (geom.form.eval(&p) - z);
                let m = InteractionBasis::modes(&p);
                for a in 0..5 {
                    for b in a..5 {
                        g[(a, b)] += m[a] * m[b] * w;
                    }
                }
            }
        }
        for a in 0..5 {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g * (h * h)
    };
    let mut n = 16;
    let mut prev = eval(n);
    loop {
        n *= 2;
        let cur = eval(n);
        let diff = (cur - prev).abs().max();
        if diff <= rel_tol * cur.abs().max() {
            return Ok(SecularMatrix::from_gram(z, *k, &InteractionBasis::new(params), &cur));
        }
        if n >= 2048 {
            return Err(IntegralError::Tolerance(crate::quadrature::QuadError::Budget {
                requested: rel_tol,
                achieved: diff / cur.abs().max(),
                panels: n,
            }));
        }
        prev = cur;
    }
}

/// Signature (positive, negative) counts of a symmetric matrix.
pub fn inertia(m: &nalgebra::DMatrix<f64>) -> (usize, usize) {
    if m.nrows() == 0 {
        return (0, 0);
    }
    let e = SymmetricEigen::new(m.clone());
    let pos = e.eigenvalues.iter().filter(|&&x| x > 0.0).count();
    let neg = e.eigenvalues.iter().filter(|&&x| x < 0.0).count();
    (pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{watson_integrals, watson_integrals_at};

    fn params(g: f64, l: f64, m: f64) -> ModelParams {
        ModelParams::new(g, l, m).unwrap()
    }

    #[test]
    fn modes_are_orthonormal() {
        let n = 32;
        let h = 2.0 * PI / n as f64;
        let mut gram = [[0.0; 5]; 5];
        for i in 0..n {
            for j in 0..n {
                let m = InteractionBasis::modes(&TorusPoint::new(h * i as f64, h * j as f64));
                for a in 0..5 {
                    for b in 0..5 {
                        gram[a][b] += m[a] * m[b] * h * h;
                    }
                }
            }
        }
        for a in 0..5 {
            for b in 0..5 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a][b] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn basis_reproduces_convolution() {
        // (V f)(p) = (2π)⁻² ∫ v(p − q) f(q) dq for a trigonometric polynomial f.
        let pr = params(1.0, 0.8, -1.3);
        let f = |q: &TorusPoint| 0.3 + q.p1().cos() - 0.7 * q.p2().sin() + 0.25 * (q.p1() + q.p2()).cos() + 0.4 * (2.0 * q.p1()).cos();
        let basis = InteractionBasis::new(&pr);
        let n = 24;
        let h = 2.0 * PI / n as f64;
        for &(a, b) in &[(0.2, -1.0), (2.5, 0.7)] {
            let p = TorusPoint::new(a, b);
            let mut conv = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let q = TorusPoint::new(h * i as f64, h * j as f64);
                    conv += crate::lattice::potential_symbol(&p.sub(&q), &pr) * f(&q);
                }
            }
            conv *= h * h / (4.0 * PI * PI);
            assert!((basis.apply(&f, &p, n) - conv).abs() < 1e-12);
        }
    }

    #[test]
    fn factor_examples() {
        let s = watson_integrals(-0.3, 1.0, 1e-12).unwrap();
        let p0 = params(1.0, 0.0, 0.0);
        assert_eq!(delta_odd(&p0, &s), 1.0);
        assert_eq!(delta_even_sub(&p0, &s), 1.0);
        assert_eq!(delta_even_main(&p0, &s), 1.0);
        let far = watson_integrals(-1e9, 1.0, 1e-12).unwrap();
        let p = params(1.0, 3.0, -4.0);
        assert!((delta_odd(&p, &far) - 1.0).abs() < 1e-8);
        assert!((delta_even_sub(&p, &far) - 1.0).abs() < 1e-8);
        let hi = watson_integrals(8.0 + 1e9, 1.0, 1e-12).unwrap();
        assert!((delta_even_sub(&p, &hi) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn odd_factor_vanishes_at_threshold_coupling() {
        let mu = -2.0 * PI / (PI - 2.0);
        let s = watson_integrals_at(Side::Below, 1e-14, 1.0, 1e-12).unwrap();
        assert!(delta_odd(&params(1.0, 0.0, mu), &s) < 1e-12);
    }

    #[test]
    fn main_factor_sign_near_top_edge() {
        let p = params(1.0, 1.0, 6.0);
        let near = watson_integrals(8.0 + 1e-6, 1.0, 1e-12).unwrap();
        let far = watson_integrals(8.0 + 1e-2, 1.0, 1e-12).unwrap();
        assert!(delta_even_main(&p, &near) < delta_even_main(&p, &far));
        assert!(delta_even_main(&p, &near) < 0.0);
    }

    #[test]
    fn zero_momentum_blocks_and_factorization() {
        let p = params(1.3, -2.0, 3.5);
        let k = TorusPoint::origin();
        for z in [-0.4, -3.0, 12.0, 9.5] {
            let m = secular_matrix(z, &k, &p, 1e-12).unwrap();
            for &e in &[0usize, 1, 2] {
                for &o in &[3usize, 4] {
                    assert!(m.entries[(e, o)].abs() < 1e-12 && m.entries[(o, e)].abs() < 1e-12);
                }
            }
            let s = watson_integrals(z, p.gamma, 1e-12).unwrap();
            let f = delta_even_main(&p, &s) * delta_even_sub(&p, &s) * delta_odd(&p, &s);
            assert!((m.det - f).abs() <= 1e-9 * (1.0 + f.abs()), "{z}: {} vs {f}", m.det);
        }
    }

    #[test]
    fn zero_coupling_is_identity() {
        let p = params(0.7, 0.0, 0.0);
        let m = secular_matrix(-1.0, &TorusPoint::new(1.0, -2.0), &p, 1e-10).unwrap();
        assert_eq!(m.entries, Matrix5::identity());
        assert_eq!(m.det, 1.0);
    }

    #[test]
    fn degenerate_band_is_diagonal() {
        let p = params(1.0, 1.5, -0.8);
        let k = TorusPoint::new(PI, PI);
        for z in [2.0, 5.5] {
            let m = secular_matrix(z, &k, &p, 1e-12).unwrap();
            let r = 1.0 / (4.0 - z);
            let w = InteractionBasis::new(&p).weights;
            let mut det = 1.0;
            for i in 0..5 {
                assert!((m.entries[(i, i)] - (1.0 + w[i] * r)).abs() < 1e-12);
                det *= 1.0 + w[i] * r;
            }
            assert!((m.det - det).abs() < 1e-11);
        }
    }

    #[test]
    fn general_momentum_matches_trapezoid() {
        let p = params(0.6, 1.1, -2.3);
        for &(k1, k2) in &[(1.0, 0.5), (-2.7, 0.3), (3.1, -3.0)] {
            let k = TorusPoint::new(k1, k2);
            let g = FiberGeometry::new(&k, p.gamma);
            for z in [g.e_min() - 0.3, g.e_max() + 0.06] {
                let a = secular_matrix(z, &k, &p, 1e-12).unwrap();
                let b = secular_matrix_trapezoid(z, &k, &p, 1e-12).unwrap();
                assert!((a.entries - b.entries).abs().max() < 1e-10, "{k1} {k2} {z}");
                assert!((a.det - b.det).abs() < 1e-9 * (1.0 + a.det.abs()));
            }
        }
    }

    #[test]
    fn edge_model_cancels_square_log() {
        let table = CalibrationTable::new();
        let p = params(1.0, 2.0, 3.0);
        for side in Side::BOTH {
            let m = EdgeModel::new(1.0, side, ConstantsSource::Paper, &table).unwrap();
            let poly = m.main_even(&p);
            assert!(poly.c[2].abs() < 1e-14);
            let s = 1.0 / (4.0 * PI);
            let want = match side {
                Side::Below => s * s_minus(&p),
                Side::Above => -s * s_plus(&p),
            };
            assert!((poly.c[1] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn log_poly_roots() {
        let p = LogPoly { c: [-3.0, 1.0, 0.0] };
        assert_eq!(p.root_beyond(0.0, 1e-12), Some(3.0));
        assert_eq!(p.root_beyond(4.0, 1e-12), None);
        assert_eq!(p.limit_sign(1e-12), 1.0);
        let q = LogPoly { c: [2.0, -3.0, 1.0] };
        assert_eq!(q.root_beyond(0.0, 1e-12), Some(2.0));
    }
}
