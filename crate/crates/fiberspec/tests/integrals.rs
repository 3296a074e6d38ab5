use std::f64::consts::{LN_2, PI};

use fiberspec::integrals::*;

const GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];
const DISTANCES: [f64; 4] = [1e-6, 1e-2, 0.5, 5.0];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn exact_identities_at_24_points() {
    let mut n = 0;
    for g in GAMMAS {
        for side in Side::BOTH {
            for t in DISTANCES {
                let s = watson_integrals_at(side, t, g, 1e-12).unwrap();
                let i1 = rel(s.a, s.c + s.f);
                let i2 = rel(2.0 * (1.0 + g) * (s.a - s.b), 1.0 + s.z * s.a);
                let i3 = rel(s.c + s.e, s.b * (2.0 - s.z / (1.0 + g)));
                assert!(i1 < 1e-9 && i2 < 1e-9 && i3 < 1e-9, "γ={g} {side:?} t={t}: {i1:e} {i2:e} {i3:e}");
                n += 1;
            }
        }
    }
    assert_eq!(n, 24);
}

#[test]
fn adaptive_matches_periodic_trapezoid_away_from_edge() {
    for g in GAMMAS {
        for z in [-1.5, -0.5, 4.0 * (1.0 + g) + 0.7] {
            let a = watson_integrals(z, g, 1e-12).unwrap();
            let b = watson_integrals_trapezoid(z, g, 1e-12).unwrap();
            for w in Which::ALL {
                assert!(rel(a.get(w), b.get(w)) < 1e-10, "γ={g} z={z} {}", w.name());
            }
        }
    }
}

#[test]
fn integrals_monotone_in_z_below() {
    // Every kernel weight is a sum of squares or has a sign-definite derivative for a and f.
    let g = 1.0;
    let mut prev: Option<IntegralSet> = None;
    for t in [4.0, 1.0, 0.1, 1e-3, 1e-6] {
        let s = watson_integrals_at(Side::Below, t, g, 1e-12).unwrap();
        if let Some(p) = prev {
            assert!(s.a > p.a && s.f > p.f && s.c - s.e > p.c - p.e);
        }
        prev = Some(s);
    }
}

#[test]
fn log_slope_two_point_fit() {
    let g = 1.0;
    let s = 1.0 / (2.0 * PI * (1.0 + g));
    for side in Side::BOTH {
        let x = watson_integrals_at(side, 1e-3, g, 1e-12).unwrap();
        let y = watson_integrals_at(side, 1e-4, g, 1e-12).unwrap();
        for (name, u, v) in [("a", x.a, y.a), ("b", x.b, y.b)] {
            let slope = ((v - u) / 10f64.ln()).abs();
            assert!((slope / s - 1.0).abs() < 0.01, "{name} {side:?}: {slope} vs {s}");
        }
    }
}

#[test]
fn offsets_at_unit_gamma() {
    let s = 1.0 / (4.0 * PI);
    let t: f64 = 1e-6;
    let below = watson_integrals_at(Side::Below, t, 1.0, 1e-12).unwrap();
    assert!((below.a + s * t.ln() - 5.0 * LN_2 * s).abs() < 1e-4);
    assert!((below.b + s * t.ln() - (5.0 * LN_2 - PI) * s).abs() < 1e-4);
    // Above the band a(z) = −a(z̄) and b(z) = b(z̄) under p → p + (π, π).
    let above = watson_integrals_at(Side::Above, t, 1.0, 1e-12).unwrap();
    assert!((above.a - s * t.ln() + 5.0 * LN_2 * s).abs() < 1e-4);
    assert!((above.b + s * t.ln() - (5.0 * LN_2 - PI) * s).abs() < 1e-4);
}

#[test]
fn a_offset_for_general_gamma() {
    // a(t) = s(−ln t + 4 ln 2 + ln(1+γ)) + O(t ln t); at t = 1e−200 the remainder is far below 1e−9.
    for g in GAMMAS {
        let s = 1.0 / (2.0 * PI * (1.0 + g));
        let t: f64 = 1e-200;
        let x = watson_integrals_at(Side::Below, t, g, 1e-12).unwrap();
        let offset = x.a + s * t.ln();
        assert!((offset - s * (4.0 * LN_2 + (1.0 + g).ln())).abs() < 1e-9, "γ={g}: {offset}");
    }
}

#[test]
fn calibration_fixes_slopes_and_f_limits() {
    for g in GAMMAS {
        let cal = calibrate_edge_constants(g).unwrap();
        let s = 1.0 / (2.0 * PI * (1.0 + g));
        let f = (PI - 2.0) / (PI * (1.0 + g));
        assert!((cal.f_limit(Side::Below) - f).abs() < 1e-6);
        assert!((cal.f_limit(Side::Above) + f).abs() < 1e-6);
        for side in Side::BOTH {
            for w in [Which::A, Which::C] {
                let m = cal.measured_slope(w, side);
                assert!((m.abs() / s - 1.0).abs() < 1e-3, "γ={g} {} {side:?} {m}", w.name());
            }
        }
    }
}

#[test]
fn c_minus_e_limit_is_half_the_doubled_constant() {
    for g in GAMMAS {
        let cal = calibrate_edge_constants(g).unwrap();
        let halved = (8.0 - 2.0 * PI) / (2.0 * PI * (1.0 + g));
        let doubled = (8.0 - 2.0 * PI) / (PI * (1.0 + g));
        for (side, sign) in [(Side::Below, 1.0), (Side::Above, -1.0)] {
            let lim = cal.ce_limit(side);
            assert!((lim - sign * halved).abs() < 1e-6, "γ={g} {side:?}: {lim}");
            assert!((lim - sign * doubled).abs() > 1e-2);
        }
    }
}

#[test]
fn single_precision_tracks_double() {
    let a = watson_integrals_at(Side::Below, 0.25f32, 1.0f32, 1e-5).unwrap();
    let b = watson_integrals_at(Side::Below, 0.25f64, 1.0f64, 1e-12).unwrap();
    assert!((a.a as f64 - b.a).abs() < 1e-5 * b.a.abs());
    assert!((a.f as f64 - b.f).abs() < 1e-5 * b.f.abs());
}
