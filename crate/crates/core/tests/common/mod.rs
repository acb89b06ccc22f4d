//! Seeded generators of random parameter sets shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use widthlab::exponents::{AbstractParams, LpExponent, SobolevProblem, SpaceParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An exponent in `(1, 8]`, or infinity one time in eight.
pub fn exponent(rng: &mut ChaCha8Rng) -> LpExponent {
    if rng.random_ratio(1, 8) {
        LpExponent::INFINITY
    } else {
        LpExponent::finite(rng.random_range(1.05..=8.0))
    }
}

pub fn space(rng: &mut ChaCha8Rng) -> SpaceParams {
    SpaceParams::new(exponent(rng), exponent(rng), rng.random_range(1.05..=8.0)).unwrap()
}

pub fn power_hset(rng: &mut ChaCha8Rng) -> SobolevProblem {
    let d = rng.random_range(1..=3);
    SobolevProblem::power_hset(
        rng.random_range(1..=4),
        d,
        space(rng),
        rng.random_range(0.0..d as f64),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    )
}

pub fn log_hset(rng: &mut ChaCha8Rng) -> SobolevProblem {
    SobolevProblem::log_hset(
        rng.random_range(1..=4),
        rng.random_range(1..=3),
        space(rng),
        rng.random_range(0.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    )
}

pub fn power_rd(rng: &mut ChaCha8Rng) -> SobolevProblem {
    SobolevProblem::power_rd(
        rng.random_range(1..=4),
        rng.random_range(1..=3),
        space(rng),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    )
}

/// Abstract parameters compatible with `s`, with both level coefficients bounded away from 0.
pub fn abstract_params(rng: &mut ChaCha8Rng, s: &SpaceParams) -> AbstractParams {
    loop {
        let a = AbstractParams::new(
            rng.random_range(0.2..4.0),
            if rng.random_ratio(1, 4) { 0.0 } else { rng.random_range(0.0..2.0) },
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
        .with_k_star(rng.random_range(1..=3));
        let flat = a.s_star + s.inv_p0() - s.inv_p1();
        let level = a.mu_star + a.alpha_star + a.gamma_star * flat;
        if a.compatible_with(s) && flat.abs() > 0.05 && level.abs() > 0.05 {
            return a;
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
