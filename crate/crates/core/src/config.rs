//! Declarative descriptions of systems, as read from TOML configuration.
//!
//! ```toml
//! [system]
//! model = "finite-iid"
//! probs = [0.7, 0.3]
//! maps = [
//!   { kind = "rotation", theta = 0.0 },
//!   { kind = "rotation", theta = 0.5 },
//! ]
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::homeo::CircleMap;
use crate::plfile::parse_pl;
use crate::system::{MapFamily, RandomSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    Rotation {
        theta: f64,
    },
    PiecewiseLinear {
        #[serde(default)]
        knots: Vec<[f64; 2]>,
        #[serde(default)]
        winding: i64,
        /// Reads knots from a piecewise-linear text file instead.
        #[serde(default)]
        file: Option<PathBuf>,
    },
    Projective {
        matrix: [[f64; 2]; 2],
    },
    PerturbedRotation {
        c: f64,
        eps: f64,
    },
    NorthSouth {
        dt: f64,
    },
}

impl MapSpec {
    pub fn build(&self) -> Result<CircleMap> {
        match self {
            MapSpec::Rotation { theta } => Ok(CircleMap::rotation(*theta)),
            MapSpec::PiecewiseLinear { knots, winding, file } => match file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                    parse_pl(&text)
                }
                None => {
                    let knots: Vec<(f64, f64)> = knots.iter().map(|k| (k[0], k[1])).collect();
                    CircleMap::piecewise_linear(&knots, *winding)
                }
            },
            MapSpec::Projective { matrix } => CircleMap::projective(*matrix),
            MapSpec::PerturbedRotation { c, eps } => CircleMap::perturbed_rotation(*c, *eps),
            MapSpec::NorthSouth { dt } => CircleMap::north_south(*dt),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum SystemSpec {
    FiniteIid {
        maps: Vec<MapSpec>,
        probs: Vec<f64>,
    },
    FiniteCyclic {
        maps: Vec<MapSpec>,
        #[serde(default)]
        start: usize,
    },
    PerturbedFamily {
        c0: f64,
        w: f64,
        eps: f64,
    },
    Fixture {
        name: String,
    },
}

impl SystemSpec {
    pub fn build(&self, seed: u64) -> Result<RandomSystem> {
        match self {
            SystemSpec::FiniteIid { maps, probs } => {
                let maps = maps.iter().map(MapSpec::build).collect::<Result<Vec<_>>>()?;
                RandomSystem::finite_iid(maps, probs.clone(), seed)
            }
            SystemSpec::FiniteCyclic { maps, start } => {
                let maps = maps.iter().map(MapSpec::build).collect::<Result<Vec<_>>>()?;
                RandomSystem::finite_cyclic(maps, *start, seed)
            }
            SystemSpec::PerturbedFamily { c0, w, eps } => {
                RandomSystem::parametric(MapFamily::PerturbedRotation { c0: *c0, w: *w, eps: *eps }, seed)
            }
            SystemSpec::Fixture { name } => Fixture::by_name(name)?.build(seed),
        }
    }

    pub fn from_toml(text: &str) -> Result<SystemSpec> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}
