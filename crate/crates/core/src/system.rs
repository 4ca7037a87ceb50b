//! Random systems: a law on circle maps plus a base dynamics, realizing the
//! cocycle `fⁿ(ω, ·) = f(θⁿ⁻¹ω, ·) ∘ ⋯ ∘ f(ω, ·)` and its skew product
//! `Θ(ω, s) = (θω, f(ω, s))`.

use std::borrow::Cow;

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::homeo::CircleMap;
use crate::rng::{pick, streams, Stream};

const VALIDATION_GRID: usize = 1000;

/// Atomless map family driven by a random parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapFamily {
    /// `x + c + ε sin(2πx)` with `c ~ U(c0 − w, c0 + w)`.
    PerturbedRotation { c0: f64, w: f64, eps: f64 },
}

impl MapFamily {
    fn sample(&self, u: f64) -> CircleMap {
        match *self {
            MapFamily::PerturbedRotation { c0, w, eps } => {
                let c = c0 - w + 2.0 * w * u;
                CircleMap::perturbed_rotation(c, eps).expect("family validated at construction")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// i.i.d. draws from a finite list of maps.
    FiniteIid { maps: Vec<CircleMap>, probs: Vec<f64> },
    /// Deterministic cyclic shift `θ = (1 2 … m)` starting at index `start`.
    FiniteCyclic { maps: Vec<CircleMap>, start: usize },
    /// i.i.d. draws from a parametric family.
    ParametricIid(MapFamily),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSystem {
    model: Model,
    seed: u64,
    cumulative: Vec<f64>,
}

impl RandomSystem {
    pub fn finite_iid(maps: Vec<CircleMap>, probs: Vec<f64>, seed: u64) -> Result<RandomSystem> {
        if maps.is_empty() {
            return Err(Error::InvalidSystem("finite i.i.d. model needs at least one map".into()));
        }
        if maps.len() != probs.len() {
            return Err(Error::InvalidSystem(format!(
                "{} maps but {} probabilities",
                maps.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidSystem("probabilities must be non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSystem(format!("probabilities sum to {total}, not 1")));
        }
        validate_maps(&maps)?;
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(RandomSystem {
            model: Model::FiniteIid { maps, probs },
            seed,
            cumulative,
        })
    }

    pub fn finite_cyclic(maps: Vec<CircleMap>, start: usize, seed: u64) -> Result<RandomSystem> {
        if maps.is_empty() {
            return Err(Error::InvalidSystem("cyclic model needs at least one map".into()));
        }
        if start >= maps.len() {
            return Err(Error::InvalidSystem(format!(
                "start index {start} out of range for {} maps",
                maps.len()
            )));
        }
        validate_maps(&maps)?;
        Ok(RandomSystem {
            model: Model::FiniteCyclic { maps, start },
            seed,
            cumulative: Vec::new(),
        })
    }

    pub fn parametric(family: MapFamily, seed: u64) -> Result<RandomSystem> {
        match family {
            MapFamily::PerturbedRotation { c0, w, eps } => {
                if !(c0.is_finite() && w.is_finite() && w >= 0.0) {
                    return Err(Error::InvalidSystem("family needs finite c0 and w ≥ 0".into()));
                }
                CircleMap::perturbed_rotation(c0, eps)?;
            }
        }
        Ok(RandomSystem {
            model: Model::ParametricIid(family),
            seed,
            cumulative: Vec::new(),
        })
    }

    /// A single deterministic map (the classical case).
    pub fn deterministic(map: CircleMap, seed: u64) -> Result<RandomSystem> {
        RandomSystem::finite_iid(vec![map], vec![1.0], seed)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> RandomSystem {
        RandomSystem {
            seed,
            ..self.clone()
        }
    }

    pub fn is_iid(&self) -> bool {
        !matches!(self.model, Model::FiniteCyclic { .. })
    }

    /// The map at base time `step`.
    pub fn sample_map(&self, step: u64) -> Cow<'_, CircleMap> {
        match &self.model {
            Model::FiniteCyclic { maps, start } => {
                Cow::Borrowed(&maps[(*start + (step % maps.len() as u64) as usize) % maps.len()])
            }
            _ => {
                let mut s = Stream::at(self.seed, streams::MAPS, step);
                self.draw(&mut s)
            }
        }
    }

    /// The sequence `f(ω), f(θω), f(θ²ω), …`.
    pub fn maps(&self) -> MapStream<'_> {
        self.maps_on(streams::MAPS)
    }

    /// Same law as [`maps`](Self::maps), on another stream of the seed.
    pub fn maps_on(&self, stream: u64) -> MapStream<'_> {
        MapStream {
            sys: self,
            step: 0,
            rng: Stream::new(self.seed, stream),
        }
    }

    /// One independent draw from the law of `f(ω)`; i.i.d. models only.
    pub fn draw(&self, rng: &mut Stream) -> Cow<'_, CircleMap> {
        match &self.model {
            Model::FiniteIid { maps, .. } => Cow::Borrowed(&maps[pick(&self.cumulative, rng.uniform())]),
            Model::ParametricIid(family) => Cow::Owned(family.sample(rng.uniform())),
            Model::FiniteCyclic { maps, .. } => {
                // uniform P on the cycle
                let i = (rng.uniform() * maps.len() as f64) as usize;
                Cow::Borrowed(&maps[i.min(maps.len() - 1)])
            }
        }
    }
}

fn validate_maps(maps: &[CircleMap]) -> Result<()> {
    for (i, m) in maps.iter().enumerate() {
        if !m.validate(VALIDATION_GRID) {
            return Err(Error::InvalidMap(format!(
                "map {i} is not an orientation-preserving lift"
            )));
        }
    }
    Ok(())
}

/// Sequential view of the cocycle's maps.
#[derive(Debug, Clone)]
pub struct MapStream<'a> {
    sys: &'a RandomSystem,
    step: u64,
    rng: Stream,
}

impl<'a> MapStream<'a> {
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn next_map(&mut self) -> Cow<'a, CircleMap> {
        let step = self.step;
        self.step += 1;
        match &self.sys.model {
            Model::FiniteCyclic { maps, start } => {
                let m = maps.len() as u64;
                Cow::Borrowed(&maps[((*start as u64 + step % m) % m) as usize])
            }
            _ => self.sys.draw(&mut self.rng),
        }
    }
}

impl<'a> Iterator for MapStream<'a> {
    type Item = Cow<'a, CircleMap>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_map())
    }
}

/// A point `(θⁱω, sᵢ)` of the skew product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewState {
    pub step: u64,
    /// Cyclic base index, or the stream position for i.i.d. bases.
    pub base: u64,
    pub angle: Angle,
}

pub fn iterate_skew(sys: &RandomSystem, s0: Angle, n: usize) -> Vec<SkewState> {
    let base_of = |step: u64| match sys.model() {
        Model::FiniteCyclic { maps, start } => (*start as u64 + step) % maps.len() as u64,
        _ => step,
    };
    let mut out = Vec::with_capacity(n + 1);
    let mut s = s0;
    out.push(SkewState {
        step: 0,
        base: base_of(0),
        angle: s,
    });
    let mut stream = sys.maps();
    for i in 1..=n as u64 {
        s = stream.next_map().apply(s);
        out.push(SkewState {
            step: i,
            base: base_of(i),
            angle: s,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intro(seed: u64) -> RandomSystem {
        RandomSystem::finite_iid(
            vec![CircleMap::identity(), CircleMap::rotation(0.5)],
            vec![0.7, 0.3],
            seed,
        )
        .unwrap()
    }

    #[test]
    fn cyclic_sampling_is_deterministic() {
        let maps: Vec<_> = (0..4).map(|i| CircleMap::rotation(0.1 * i as f64)).collect();
        let sys = RandomSystem::finite_cyclic(maps.clone(), 0, 1).unwrap();
        assert_eq!(*sys.sample_map(2), maps[2]);
        assert_eq!(*sys.sample_map(6), maps[2]);
        let sys = RandomSystem::finite_cyclic(maps.clone(), 3, 1).unwrap();
        assert_eq!(*sys.sample_map(1), maps[0]);
    }

    #[test]
    fn degenerate_law() {
        let sys = RandomSystem::deterministic(CircleMap::identity(), 9).unwrap();
        for step in [0, 1, 1000] {
            assert_eq!(*sys.sample_map(step), CircleMap::identity());
        }
    }

    #[test]
    fn empirical_frequency_of_rotation() {
        // 3σ for a binomial(10⁵, 0.3) frequency is ≈ 0.0043
        let sys = intro(2024);
        let hits = sys
            .maps()
            .take(100_000)
            .filter(|m| **m == CircleMap::rotation(0.5))
            .count();
        let freq = hits as f64 / 1e5;
        assert!((freq - 0.3).abs() < 0.005, "{freq}");
    }

    #[test]
    fn sample_map_agrees_with_stream() {
        let sys = intro(3);
        let seq: Vec<_> = sys.maps().take(64).map(|m| m.into_owned()).collect();
        for step in [0usize, 5, 17, 63] {
            assert_eq!(*sys.sample_map(step as u64), seq[step]);
        }
    }

    #[test]
    fn rotation_orbit() {
        let sys = RandomSystem::deterministic(CircleMap::rotation(0.25), 0).unwrap();
        let angles: Vec<f64> = iterate_skew(&sys, Angle::ZERO, 4).iter().map(|s| s.angle.value()).collect();
        assert_eq!(angles, vec![0.0, 0.25, 0.5, 0.75, 0.0]);
    }

    #[test]
    fn fixed_point_orbit_is_constant() {
        let sys = RandomSystem::finite_iid(
            vec![CircleMap::north_south(0.3).unwrap(), CircleMap::north_south(1.0).unwrap()],
            vec![0.5, 0.5],
            4,
        )
        .unwrap();
        assert!(iterate_skew(&sys, Angle::new(0.5), 50).iter().all(|s| s.angle.value() == 0.5));
    }

    #[test]
    fn equal_seeds_reproduce_orbits() {
        let fam = MapFamily::PerturbedRotation { c0: 0.3, w: 0.1, eps: 0.1 };
        let a = RandomSystem::parametric(fam, 77).unwrap();
        let b = RandomSystem::parametric(fam, 77).unwrap();
        let c = RandomSystem::parametric(fam, 78).unwrap();
        let oa = iterate_skew(&a, Angle::new(0.2), 500);
        assert_eq!(oa, iterate_skew(&b, Angle::new(0.2), 500));
        assert_ne!(oa, iterate_skew(&c, Angle::new(0.2), 500));
    }

    #[test]
    fn construction_errors() {
        assert!(RandomSystem::finite_iid(vec![CircleMap::identity()], vec![0.9], 0).is_err());
        assert!(RandomSystem::finite_iid(vec![], vec![], 0).is_err());
        assert!(RandomSystem::finite_cyclic(vec![CircleMap::identity()], 1, 0).is_err());
        let bad = CircleMap::piecewise_linear(&[(0.0, 0.0), (0.5, -0.1)], 0).unwrap();
        assert!(matches!(
            RandomSystem::finite_cyclic(vec![bad], 0, 0),
            Err(Error::InvalidMap(_))
        ));
    }
}
