#![allow(dead_code)]

use std::f64::consts::PI;

use fiberspec::lattice::{ModelParams, TorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_params(r: &mut ChaCha8Rng) -> ModelParams {
    ModelParams::new(r.gen_range(0.5..2.0), r.gen_range(-12.0..12.0), r.gen_range(-12.0..12.0)).unwrap()
}

pub fn random_k(r: &mut ChaCha8Rng) -> TorusPoint {
    TorusPoint::new(r.gen_range(-PI..PI), r.gen_range(-PI..PI))
}

pub fn params(gamma: f64, lambda: f64, mu: f64) -> ModelParams {
    ModelParams::new(gamma, lambda, mu).unwrap()
}
