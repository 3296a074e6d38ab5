//! Adaptive 15-point Gauss–Kronrod quadrature for vector-valued integrands.

use thiserror::Error;

use crate::lattice::{lit, Scalar};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("tolerance {requested:e} not reached within {panels} panels (estimated error {achieved:e})")]
    Budget { requested: f64, achieved: f64, panels: usize },
    #[error("integrand returned a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    error: [T; N],
    abs: [T; N],
}

fn rescale_error<T: Scalar>(err: T, res_abs: T, res_asc: T) -> T {
    let mut e = err.abs();
    if res_asc != T::zero() && e != T::zero() {
        let scale = (lit::<T>(200.0) * e / res_asc).powf(lit(1.5));
        e = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = lit::<T>(50.0) * T::epsilon() * res_abs;
    if floor > e {
        e = floor;
    }
    e
}

fn qk15<T: Scalar, const N: usize, F: FnMut(T) -> [T; N]>(f: &mut F, a: T, b: T) -> Result<Panel<T, N>, QuadError> {
    let half: T = lit(0.5);
    let centre = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();
    let fc = f(centre);
    let mut fv1 = [[T::zero(); N]; 7];
    let mut fv2 = [[T::zero(); N]; 7];
    for j in 0..7 {
        let x = half_len * lit(XGK[j]);
        fv1[j] = f(centre - x);
        fv2[j] = f(centre + x);
    }
    let mut panel = Panel { a, b, value: [T::zero(); N], error: [T::zero(); N], abs: [T::zero(); N] };
    for k in 0..N {
        if !fc[k].is_finite() || (0..7).any(|j| !fv1[j][k].is_finite() || !fv2[j][k].is_finite()) {
            return Err(QuadError::NonFinite);
        }
        let mut res_g = fc[k] * lit(WG[3]);
        let mut res_k = fc[k] * lit(WGK[7]);
        let mut res_abs = res_k.abs();
        for j in 0..7 {
            let s = fv1[j][k] + fv2[j][k];
            res_k = res_k + lit::<T>(WGK[j]) * s;
            res_abs = res_abs + lit::<T>(WGK[j]) * (fv1[j][k].abs() + fv2[j][k].abs());
            if j % 2 == 1 {
                res_g = res_g + lit::<T>(WG[j / 2]) * s;
            }
        }
        let mean = res_k * half;
        let mut res_asc = lit::<T>(WGK[7]) * (fc[k] - mean).abs();
        for j in 0..7 {
            res_asc = res_asc + lit::<T>(WGK[j]) * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        panel.value[k] = res_k * half_len;
        panel.abs[k] = res_abs * abs_half;
        panel.error[k] = rescale_error((res_k - res_g) * half_len, res_abs * abs_half, res_asc * abs_half);
    }
    Ok(panel)
}

/// Result of an adaptive integration; `error` is the largest componentwise absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T, const N: usize> {
    pub value: [T; N],
    pub error: T,
    pub panels: usize,
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, starting from the given panels and bisecting the
/// worst one until every component satisfies `error_k ≤ rel_tol · ∫|f_k|`.
pub fn integrate<T, const N: usize, F>(mut f: F, breaks: &[T], rel_tol: T, max_panels: usize) -> Result<Integral<T, N>, QuadError>
where
    T: Scalar,
    F: FnMut(T) -> [T; N],
{
    assert!(breaks.len() >= 2);
    let mut panels: Vec<Panel<T, N>> = Vec::with_capacity(breaks.len() * 2);
    for w in breaks.windows(2) {
        panels.push(qk15(&mut f, w[0], w[1])?);
    }
    loop {
        let mut abs = [T::zero(); N];
        let mut err = [T::zero(); N];
        let mut val = [T::zero(); N];
        for p in &panels {
            for k in 0..N {
                abs[k] = abs[k] + p.abs[k];
                err[k] = err[k] + p.error[k];
                val[k] = val[k] + p.value[k];
            }
        }
        let tiny = T::min_positive_value();
        let converged = (0..N).all(|k| err[k] <= rel_tol * abs[k] || abs[k] <= tiny);
        let max_err = err.iter().copied().fold(T::zero(), T::max);
        if converged {
            return Ok(Integral { value: val, error: max_err, panels: panels.len() });
        }
        if panels.len() >= max_panels {
            let worst_rel = (0..N)
                .map(|k| if abs[k] > tiny { err[k] / abs[k] } else { T::zero() })
                .fold(T::zero(), T::max);
            return Err(QuadError::Budget {
                requested: rel_tol.to_f64().unwrap_or(f64::NAN),
                achieved: worst_rel.to_f64().unwrap_or(f64::NAN),
                panels: panels.len(),
            });
        }
        // Worst panel measured against each component's own scale.
        let mut worst = 0;
        let mut worst_score = T::neg_infinity();
        for (i, p) in panels.iter().enumerate() {
            let score = (0..N)
                .map(|k| if abs[k] > tiny { p.error[k] / abs[k] } else { T::zero() })
                .fold(T::zero(), T::max);
            if score > worst_score {
                worst_score = score;
                worst = i;
            }
        }
        let p = panels.swap_remove(worst);
        let mid = lit::<T>(0.5) * (p.a + p.b);
        panels.push(qk15(&mut f, p.a, mid)?);
        panels.push(qk15(&mut f, mid, p.b)?);
    }
}

/// Breakpoints on `[0, span]` refined geometrically toward 0 down to width `w_min`.
pub fn dyadic_breaks<T: Scalar>(span: T, w_min: T) -> Vec<T> {
    let mut pts = vec![span];
    let mut x = span;
    let half: T = lit(0.5);
    while x > w_min && pts.len() < 2000 {
        x = x * half;
        pts.push(x);
    }
    pts.push(T::zero());
    pts.reverse();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| [x * x, 1.0], &[0.0, 1.0], 1e-13, 10).unwrap();
        assert!((r.value[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.value[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_singularity_with_geometric_panels() {
        let br = dyadic_breaks(1.0, 1e-12);
        let r = integrate(|x: f64| [x.ln()], &br, 1e-12, 2000).unwrap();
        assert!((r.value[0] + 1.0).abs() < 1e-11);
    }

    #[test]
    fn inverse_sqrt_near_singular() {
        // ∫₀¹ dx/√(x²+t) = asinh(1/√t)
        let t: f64 = 1e-20;
        let br = dyadic_breaks(1.0, t.sqrt() * 0.1);
        let r = integrate(|x: f64| [1.0 / (x * x + t).sqrt()], &br, 1e-12, 4000).unwrap();
        let exact = (1.0 / t.sqrt()).asinh();
        assert!(((r.value[0] - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn budget_error() {
        let e = integrate(|x: f64| [(1.0 / x).sin()], &[1e-6, 1.0], 1e-13, 4).unwrap_err();
        assert!(matches!(e, QuadError::Budget { .. }));
    }

    #[test]
    fn single_precision() {
        let r = integrate(|x: f32| [x.cos()], &[0.0f32, 1.0], 1e-5, 50).unwrap();
        assert!((r.value[0] - 1.0f32.sin()).abs() < 1e-6);
    }
}
