//! Dispersion, interaction symbol and band edges on the two-torus.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};
use thiserror::Error;

/// Floating point type the numerical core is written against.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("gamma must be positive and finite, got {0}")]
    Gamma(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
}

/// Mass ratio and the two couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T = f64> {
    pub gamma: T,
    pub lambda: T,
    pub mu: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(gamma: T, lambda: T, mu: T) -> Result<Self, ParamError> {
        let p = ModelParams { gamma, lambda, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.gamma.is_finite() && self.gamma > T::zero()) {
            return Err(ParamError::Gamma(self.gamma.to_f64().unwrap_or(f64::NAN)));
        }
        if !self.lambda.is_finite() {
            return Err(ParamError::NonFinite("lambda"));
        }
        if !self.mu.is_finite() {
            return Err(ParamError::NonFinite("mu"));
        }
        Ok(())
    }

    /// Operator-norm bound |λ| + 2|μ| on the interaction.
    pub fn coupling_norm(&self) -> T {
        self.lambda.abs() + (self.mu + self.mu).abs()
    }
}

/// Wrap an angle into `[-π, π)`.
pub fn wrap<T: Scalar>(x: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut y = x - two_pi * (x / two_pi).round();
    if y >= pi {
        y = y - two_pi;
    }
    if y < -pi {
        y = y + two_pi;
    }
    y
}

/// A point of the torus, components kept in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint<T = f64> {
    p1: T,
    p2: T,
}

impl<T: Scalar> TorusPoint<T> {
    pub fn new(p1: T, p2: T) -> Self {
        TorusPoint { p1: wrap(p1), p2: wrap(p2) }
    }

    pub fn origin() -> Self {
        TorusPoint { p1: T::zero(), p2: T::zero() }
    }

    pub fn p1(&self) -> T {
        self.p1
    }

    pub fn p2(&self) -> T {
        self.p2
    }

    pub fn coords(&self) -> [T; 2] {
        [self.p1, self.p2]
    }

    pub fn is_origin(&self) -> bool {
        self.p1 == T::zero() && self.p2 == T::zero()
    }

    pub fn neg(&self) -> Self {
        TorusPoint::new(-self.p1, -self.p2)
    }

    pub fn sub(&self, other: &Self) -> Self {
        TorusPoint::new(self.p1 - other.p1, self.p2 - other.p2)
    }
}

/// ε(p) = Σ (1 − cos pᵢ).
pub fn epsilon<T: Scalar>(p: &TorusPoint<T>) -> T {
    (T::one() - p.p1.cos()) + (T::one() - p.p2.cos())
}

/// E_K(p) = ε(p) + γ ε(K − p).
pub fn dispersion<T: Scalar>(k: &TorusPoint<T>, p: &TorusPoint<T>, params: &ModelParams<T>) -> T {
    epsilon(p) + params.gamma * epsilon(&k.sub(p))
}

/// v(p) = λ + μ cos p₁ + μ cos p₂.
pub fn potential_symbol<T: Scalar>(p: &TorusPoint<T>, params: &ModelParams<T>) -> T {
    params.lambda + params.mu * p.p1.cos() + params.mu * p.p2.cos()
}

/// Fourier coefficient v̂(s) of the potential: λ on site, μ/2 on the four neighbours.
pub fn potential_coefficient<T: Scalar>(s: (i32, i32), params: &ModelParams<T>) -> T {
    match s.0.abs() + s.1.abs() {
        0 => params.lambda,
        1 => params.mu / lit(2.0),
        _ => T::zero(),
    }
}

/// Amplitude/phase form of the dispersion,
/// E_K(p) = Σᵢ [(1+γ) − Rᵢ cos(pᵢ − θᵢ)] with Rᵢ e^{iθᵢ} = 1 + γ e^{iKᵢ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseForm<T = f64> {
    pub gamma: T,
    pub amp: [T; 2],
    pub phase: [T; 2],
}

impl<T: Scalar> PhaseForm<T> {
    pub fn new(k: &TorusPoint<T>, gamma: T) -> Self {
        let mut amp = [T::zero(); 2];
        let mut phase = [T::zero(); 2];
        for (i, ki) in k.coords().into_iter().enumerate() {
            let re = T::one() + gamma * ki.cos();
            let im = gamma * ki.sin();
            amp[i] = re.hypot(im);
            phase[i] = if amp[i] == T::zero() { T::zero() } else { im.atan2(re) };
        }
        PhaseForm { gamma, amp, phase }
    }

    /// Band centre 2(1+γ).
    pub fn centre(&self) -> T {
        lit::<T>(2.0) * (T::one() + self.gamma)
    }

    pub fn e_min(&self) -> T {
        self.centre() - self.amp[0] - self.amp[1]
    }

    pub fn e_max(&self) -> T {
        self.centre() + self.amp[0] + self.amp[1]
    }

    pub fn eval(&self, p: &TorusPoint<T>) -> T {
        let [p1, p2] = p.coords();
        self.centre() - self.amp[0] * (p1 - self.phase[0]).cos() - self.amp[1] * (p2 - self.phase[1]).cos()
    }
}

/// Essential spectrum [e_min, e_max] of the fiber at K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band<T = f64> {
    pub e_min: T,
    pub e_max: T,
    pub argmin: TorusPoint<T>,
    pub argmax: TorusPoint<T>,
}

impl<T: Scalar> Band<T> {
    pub fn width(&self) -> T {
        self.e_max - self.e_min
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() < lit(1e-12)
    }

    pub fn contains(&self, z: T) -> bool {
        z >= self.e_min && z <= self.e_max
    }
}

const EDGE_GRID: usize = 64;

/// Gradient and Hessian diagonal of E_K (the dispersion is separable).
fn grad_hess<T: Scalar>(k: &TorusPoint<T>, p: &TorusPoint<T>, gamma: T) -> ([T; 2], [T; 2]) {
    let pk = p.coords();
    let kk = k.coords();
    let mut g = [T::zero(); 2];
    let mut h = [T::zero(); 2];
    for i in 0..2 {
        g[i] = pk[i].sin() + gamma * (pk[i] - kk[i]).sin();
        h[i] = pk[i].cos() + gamma * (pk[i] - kk[i]).cos();
    }
    (g, h)
}

fn newton_refine<T: Scalar>(k: &TorusPoint<T>, start: TorusPoint<T>, params: &ModelParams<T>, maximize: bool) -> TorusPoint<T> {
    let better = |a: T, b: T| if maximize { a >= b } else { a <= b };
    let mut p = start;
    let mut val = dispersion(k, &p, params);
    for _ in 0..60 {
        let (g, h) = grad_hess(k, &p, params.gamma);
        let mut step = [T::zero(); 2];
        for i in 0..2 {
            if h[i].abs() > lit(1e-12) {
                step[i] = g[i] / h[i];
            }
        }
        if step[0] == T::zero() && step[1] == T::zero() {
            break;
        }
        let q = TorusPoint::new(p.p1 - step[0], p.p2 - step[1]);
        let qv = dispersion(k, &q, params);
        if !better(qv, val) {
            break;
        }
        let moved = step[0].abs().max(step[1].abs());
        p = q;
        val = qv;
        if moved < lit(1e-15) {
            break;
        }
    }
    p
}

/// Global extrema of E_K: coarse grid scan, then Newton refinement of every grid-local extremum.
pub fn band_edges<T: Scalar>(k: &TorusPoint<T>, params: &ModelParams<T>) -> Band<T> {
    let n = EDGE_GRID;
    let step: T = lit::<T>(2.0) * T::PI() / lit(n as f64);
    let node = |j: usize| -T::PI() + step * lit(j as f64);
    let mut vals = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            vals[i * n + j] = dispersion(k, &TorusPoint::new(node(i), node(j)), params);
        }
    }
    let at = |i: isize, j: isize| {
        let ii = i.rem_euclid(n as isize) as usize;
        let jj = j.rem_euclid(n as isize) as usize;
        vals[ii * n + jj]
    };
    let mut min_cands = Vec::new();
    let mut max_cands = Vec::new();
    for i in 0..n as isize {
        for j in 0..n as isize {
            let v = at(i, j);
            let mut is_min = true;
            let mut is_max = true;
            for di in -1..=1 {
                for dj in -1..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let w = at(i + di, j + dj);
                    is_min &= v <= w;
                    is_max &= v >= w;
                }
            }
            let p = TorusPoint::new(node(i as usize), node(j as usize));
            if is_min {
                min_cands.push(p);
            }
            if is_max {
                max_cands.push(p);
            }
        }
    }
    // A flat direction makes every grid point a local extremum; a handful suffices.
    min_cands.truncate(8);
    max_cands.truncate(8);

    let mut argmin = min_cands[0];
    let mut e_min = T::infinity();
    for c in min_cands {
        let p = newton_refine(k, c, params, false);
        let v = dispersion(k, &p, params);
        if v < e_min {
            e_min = v;
            argmin = p;
        }
    }
    let mut argmax = max_cands[0];
    let mut e_max = T::neg_infinity();
    for c in max_cands {
        let p = newton_refine(k, c, params, true);
        let v = dispersion(k, &p, params);
        if v > e_max {
            e_max = v;
            argmax = p;
        }
    }
    Band { e_min, e_max, argmin, argmax }
}

/// Band-edge gradient residual, for diagnostics.
pub fn gradient_norm<T: Scalar>(k: &TorusPoint<T>, p: &TorusPoint<T>, params: &ModelParams<T>) -> T {
    let (g, _) = grad_hess(k, p, params.gamma);
    g[0].hypot(g[1])
}
