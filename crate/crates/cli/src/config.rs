//! Experiment configuration: an optional TOML file overlaid by command-line
//! flags.
//!
//! ```toml
//! command = "rho"
//! seed = 7
//!
//! [system]
//! model = "fixture"
//! name = "intro"
//!
//! [params]
//! q = 0.0
//! alpha = 0.0
//! n = 100000
//! ```

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rotnum_core::compare::{StreamMode, SweepAxis};
use rotnum_core::config::SystemSpec;
use rotnum_core::estimate::OffsetLaw;
use rotnum_core::fixtures::Fixture;
use rotnum_core::sde::VectorFieldSet;
use rotnum_core::{Error, LiftParams, RandomSystem, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Q,
    Alpha,
}

impl From<Axis> for SweepAxis {
    fn from(a: Axis) -> SweepAxis {
        match a {
            Axis::Q => SweepAxis::Q,
            Axis::Alpha => SweepAxis::Alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Streams {
    Shared,
    Independent,
}

impl From<Streams> for StreamMode {
    fn from(s: Streams) -> StreamMode {
        match s {
            Streams::Shared => StreamMode::Shared,
            Streams::Independent => StreamMode::Independent,
        }
    }
}

/// Numeric parameters shared by all commands; unset values fall back to the
/// config file, then to the defaults below.
#[derive(Debug, Clone, Default, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Target `q′` for `compare`.
    #[arg(long, allow_hyphen_values = true)]
    pub q2: Option<f64>,
    /// Target `α′` for `compare`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<f64>,
    /// Orbit start.
    #[arg(long)]
    pub s0: Option<f64>,
    /// Start point of the lift estimates.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Iterations (or segments).
    #[arg(long)]
    pub n: Option<usize>,
    /// Samples for crossing probabilities.
    #[arg(long)]
    pub n_prob: Option<usize>,
    /// Sampling intervals, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dts: Option<Vec<f64>>,
    /// Single sampling interval (`ns-counterexample`).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Orbit starts for `ns-counterexample`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s0s: Option<Vec<f64>>,
    /// Time horizon for continuous-time estimates.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Integrator steps per sampling interval.
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Offset law: `const:K` or `K:P,K:P,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub offsets: Option<String>,
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    /// Staircase grid start (defaults to the base parameter).
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Staircase grid end (defaults to one period past the start).
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub streams: Option<Streams>,
    /// Vector field: `const:a=A,b=B` or `ns`.
    #[arg(long)]
    pub vf: Option<String>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        Params { $($field: $flags.$field.or($file.$field)),* }
    };
}

impl Params {
    /// Flags win over file values.
    pub fn overlay(self, file: Params) -> Params {
        overlay!(
            self, file, q, alpha, q2, alpha2, s0, x0, n, n_prob, dts, dt, s0s, t, bins, substeps, offsets, axis,
            from, to, points, streams, vf
        )
    }

    pub fn lift(&self) -> LiftParams {
        LiftParams::new(self.q.unwrap_or(0.0), self.alpha.unwrap_or(0.0))
    }

    pub fn target(&self) -> LiftParams {
        let base = self.lift();
        LiftParams::new(self.q2.unwrap_or(base.q), self.alpha2.unwrap_or(base.alpha))
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(10_000)
    }

    pub fn offsets(&self) -> Result<OffsetLaw> {
        let text = self.offsets.as_deref().unwrap_or("const:0");
        parse_offsets(text)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub system: Option<SystemSpec>,
    pub vector_field: Option<VectorFieldSet>,
    pub params: Params,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Resolves the random system: `--fixture` first, then the config file.
pub fn system(fixture: Option<&str>, cfg: &ExperimentConfig, seed: u64) -> Result<RandomSystem> {
    match (fixture, &cfg.system) {
        (Some(name), _) => Fixture::by_name(name)?.build(seed),
        (None, Some(spec)) => spec.build(seed),
        (None, None) => Err(Error::Config("no system given: pass --fixture or a config with [system]".into())),
    }
}

pub fn vector_field(params: &Params, cfg: &ExperimentConfig) -> Result<VectorFieldSet> {
    match (&params.vf, &cfg.vector_field) {
        (Some(text), _) => parse_vf(text),
        (None, Some(vf)) => Ok(vf.clone()),
        (None, None) => Err(Error::Config("no vector field given: pass --vf or a config with [vector-field]".into())),
    }
}

pub fn parse_vf(text: &str) -> Result<VectorFieldSet> {
    if text == "ns" || text == "north-south" {
        return Ok(VectorFieldSet::north_south());
    }
    let body = text
        .strip_prefix("const:")
        .ok_or_else(|| Error::Config(format!("unknown vector field {text:?} (expected const:a=..,b=.. or ns)")))?;
    let (mut a, mut b) = (0.0, 0.0);
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {part:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("not a number: {value:?}")))?;
        match key.trim() {
            "a" => a = value,
            "b" => b = value,
            other => return Err(Error::Config(format!("unknown coefficient {other:?}"))),
        }
    }
    Ok(VectorFieldSet::constant(a, b))
}

pub fn parse_offsets(text: &str) -> Result<OffsetLaw> {
    let bad = |s: &str| Error::Config(format!("bad offset law {s:?}"));
    if let Some(v) = text.strip_prefix("const:") {
        return Ok(OffsetLaw::Constant {
            value: v.trim().parse().map_err(|_| bad(text))?,
        });
    }
    let (mut values, mut probs) = (Vec::new(), Vec::new());
    for part in text.split(',') {
        let (v, p) = part.split_once(':').ok_or_else(|| bad(text))?;
        values.push(v.trim().parse().map_err(|_| bad(text))?);
        probs.push(p.trim().parse().map_err(|_| bad(text))?);
    }
    let law = OffsetLaw::Discrete { values, probs };
    law.validate()?;
    Ok(law)
}
