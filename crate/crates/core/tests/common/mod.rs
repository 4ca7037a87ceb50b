#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotnum_core::{CircleMap, LiftParams, RandomSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random circle homeomorphism from one of the built-in kinds.
pub fn random_map(rng: &mut ChaCha8Rng) -> CircleMap {
    match rng.random_range(0..4) {
        0 => CircleMap::rotation(rng.random_range(-2.0..2.0)),
        1 => {
            let m = rng.random_range(1..6);
            let mut xs: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let gaps: Vec<f64> = (0..xs.len()).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = gaps.iter().sum();
            let mut y = rng.random_range(-1.0..1.0);
            let knots: Vec<(f64, f64)> = xs
                .iter()
                .zip(&gaps)
                .map(|(&x, g)| {
                    let knot = (x, y);
                    y += g / total;
                    knot
                })
                .collect();
            CircleMap::piecewise_linear(&knots, rng.random_range(-2..3)).expect("random knots are valid")
        }
        2 => loop {
            let m = [[0; 2]; 2].map(|row| row.map(|_: i32| rng.random_range(-2.0..2.0)));
            if m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.1 {
                break CircleMap::projective(m).expect("positive determinant");
            }
        },
        _ => CircleMap::perturbed_rotation(rng.random_range(-1.0..1.0), rng.random_range(-0.15..0.15))
            .expect("small amplitude"),
    }
}

/// A random i.i.d. system over two or three random maps.
pub fn random_system(rng: &mut ChaCha8Rng, seed: u64) -> RandomSystem {
    let k = rng.random_range(2..4);
    let maps: Vec<CircleMap> = (0..k).map(|_| random_map(rng)).collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let head: f64 = probs[..k - 1].iter().sum();
    probs[k - 1] = 1.0 - head;
    RandomSystem::finite_iid(maps, probs, seed).expect("valid random system")
}

pub fn random_params(rng: &mut ChaCha8Rng) -> LiftParams {
    let q = rng.random_range(-1.0..1.0);
    LiftParams::new(q, q + rng.random_range(-1.5..1.5))
}
