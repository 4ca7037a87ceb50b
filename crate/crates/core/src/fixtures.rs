//! Reference systems with exactly known rotation numbers.

use crate::circle::{Angle, LiftParams};
use crate::error::{Error, Result};
use crate::estimate::rho_estimate;
use crate::homeo::CircleMap;
use crate::system::{iterate_skew, MapFamily, RandomSystem};

/// The constrained points `(s, f(s))` of the four cyclic maps, in `[0, 1)`.
pub const EXAMPLE1_CONSTRAINTS: [(f64, f64); 4] = [(0.125, 0.375), (0.375, 0.625), (0.625, 0.875), (0.875, 0.125)];

/// Four homeomorphisms fixing 0, each moving one point of the orbit
/// `1/8 → 3/8 → 5/8 → 7/8 → 1/8`.
pub fn example1_maps() -> Vec<CircleMap> {
    EXAMPLE1_CONSTRAINTS
        .iter()
        .map(|&(x, y)| CircleMap::piecewise_linear(&[(0.0, 0.0), (x, y)], 0).expect("static knots"))
        .collect()
}

/// Cyclic base `θ = (1 2 3 4)` over [`example1_maps`], started at the first map.
pub fn build_example1() -> Result<RandomSystem> {
    let maps = example1_maps();
    for (i, (m, &(x, y))) in maps.iter().zip(&EXAMPLE1_CONSTRAINTS).enumerate() {
        if m.eval_lift(0.0) != 0.0 || m.apply(Angle::new(x)).value() != y {
            return Err(Error::Fixture(format!("map f{} misses its constraint", i + 1)));
        }
    }
    let sys = RandomSystem::finite_cyclic(maps, 0, 0)?;
    let orbit = iterate_skew(&sys, Angle::new(0.125), 4);
    let angles: Vec<f64> = orbit.iter().map(|s| s.angle.value()).collect();
    if angles != [0.125, 0.375, 0.625, 0.875, 0.125] {
        return Err(Error::Fixture(format!("orbit of 1/8 is {angles:?}")));
    }
    Ok(sys)
}

/// i.i.d. choice between the identity (probability `1 − p`) and the rotation
/// by `theta` (probability `p`).
pub fn build_intro(theta: f64, p: f64, seed: u64) -> Result<RandomSystem> {
    RandomSystem::finite_iid(vec![CircleMap::identity(), CircleMap::rotation(theta)], vec![1.0 - p, p], seed)
}

/// The deterministic time-`dt` North–South map.
pub fn build_north_south(dt: f64) -> Result<RandomSystem> {
    RandomSystem::deterministic(CircleMap::north_south(dt)?, 0)
}

pub fn perturbed_family(c0: f64, w: f64, eps: f64, seed: u64) -> Result<RandomSystem> {
    RandomSystem::parametric(MapFamily::PerturbedRotation { c0, w, eps }, seed)
}

/// Named fixtures for configuration files and the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fixture {
    Example1,
    Intro { theta: f64, p: f64 },
    NorthSouth { dt: f64 },
    Rotation { theta: f64 },
    Perturbed { c0: f64, w: f64, eps: f64 },
}

impl Fixture {
    pub fn by_name(name: &str) -> Result<Fixture> {
        Ok(match name {
            "example1" => Fixture::Example1,
            "intro" => Fixture::Intro { theta: 0.5, p: 0.3 },
            "north-south" => Fixture::NorthSouth { dt: 0.1 },
            "rotation" => Fixture::Rotation { theta: 0.25 },
            "perturbed" => Fixture::Perturbed { c0: 0.3, w: 0.2, eps: 0.05 },
            other => {
                return Err(Error::Config(format!(
                    "unknown fixture {other:?} (expected example1, intro, north-south, rotation, perturbed)"
                )))
            }
        })
    }

    pub fn build(&self, seed: u64) -> Result<RandomSystem> {
        match *self {
            Fixture::Example1 => Ok(build_example1()?.with_seed(seed)),
            Fixture::Intro { theta, p } => build_intro(theta, p, seed),
            Fixture::NorthSouth { dt } => Ok(build_north_south(dt)?.with_seed(seed)),
            Fixture::Rotation { theta } => RandomSystem::deterministic(CircleMap::rotation(theta), seed),
            Fixture::Perturbed { c0, w, eps } => perturbed_family(c0, w, eps, seed),
        }
    }
}

/// `ρ_{0,0}` of the cyclic fixture over one period; 0 since every map fixes 0.
pub fn example1_rho_period() -> Result<f64> {
    Ok(rho_estimate(&build_example1()?, LiftParams::ORIGIN, 0.0, 4)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::orbit_rotation;

    #[test]
    fn example1_self_checks() {
        let sys = build_example1().unwrap();
        for m in example1_maps() {
            assert!(m.validate(10_000));
        }
        assert_eq!(example1_rho_period().unwrap(), 0.0);
        let orbit = iterate_skew(&sys, Angle::ZERO, 12);
        assert!(orbit.iter().all(|s| s.angle.value() == 0.0));
    }

    #[test]
    fn example1_gammas() {
        let (_, trace) = orbit_rotation(&build_example1().unwrap(), Angle::new(0.125), 8).unwrap();
        for (n, g) in trace.gammas.iter().enumerate() {
            assert_eq!(*g, (2 * n + 1) as f64 / 8.0);
        }
    }

    #[test]
    fn example1_orbit_period_is_four() {
        let sys = build_example1().unwrap();
        let orbit = iterate_skew(&sys, Angle::new(0.125), 16);
        for i in 0..12 {
            assert_eq!(orbit[i].angle, orbit[i + 4].angle);
            assert_eq!(orbit[i].base, orbit[i + 4].base);
        }
        assert_ne!(orbit[0].angle, orbit[2].angle);
    }

    #[test]
    fn names_resolve() {
        for name in ["example1", "intro", "north-south", "rotation", "perturbed"] {
            Fixture::by_name(name).unwrap().build(1).unwrap();
        }
        assert!(Fixture::by_name("nope").is_err());
    }

    #[test]
    fn exported_fixture_reparses() {
        for m in example1_maps() {
            let text = crate::plfile::write_pl(&m).unwrap();
            assert_eq!(crate::plfile::parse_pl(&text).unwrap(), m);
        }
    }
}
