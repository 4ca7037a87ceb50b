//! Rotation-number estimators.
//!
//! All estimators walk the skew product on the circle and accumulate
//! per-step deviations, so the running lift `Fⁿ(x₀) − x₀` is the telescoped
//! sum `Σ δ(θⁱ⁻¹ω, sᵢ₋₁)` and is never evaluated at a large argument.

use serde::{Deserialize, Serialize};

use crate::circle::{cover, fract01, lift_shift, Angle, Deviation, LiftParams};
use crate::error::{Error, Result};
use crate::rng::{pick, streams, Stream};
use crate::stats::{BatchMeans, MeanVar, Sum};
use crate::system::RandomSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Rho,
    Nonuniform,
    Orbit,
    ErgodicCross,
    SdeRot,
    SdeFormula,
    Sampling,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Rho => "rho",
            Estimator::Nonuniform => "nonuniform",
            Estimator::Orbit => "orbit",
            Estimator::ErgodicCross => "ergodic-cross",
            Estimator::SdeRot => "sde-rot",
            Estimator::SdeFormula => "sde-formula",
            Estimator::Sampling => "sampling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: Estimator,
    pub value: f64,
    pub n: u64,
    pub se_proxy: f64,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub s0: Option<f64>,
    pub seed: u64,
}

impl EstimateReport {
    pub fn params(&self) -> Option<LiftParams> {
        Some(LiftParams::new(self.q?, self.alpha?))
    }
}

/// The lifted orbit `γ₀ ≤ γ₁ ≤ …` with increments in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub gammas: Vec<f64>,
}

impl OrbitTrace {
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.gammas.windows(2).map(|w| w[1] - w[0])
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("iteration count must be ≥ 1".into()));
    }
    Ok(())
}

/// `ρ_{q,α} ≈ (Fⁿ(ω, x₀) − x₀) / n`.
pub fn rho_estimate(sys: &RandomSystem, params: LiftParams, x0: f64, n: usize) -> Result<EstimateReport> {
    rho_estimate_on(sys, params, x0, n, streams::MAPS)
}

/// [`rho_estimate`] driven by another stream of the system's seed.
pub fn rho_estimate_on(
    sys: &RandomSystem,
    params: LiftParams,
    x0: f64,
    n: usize,
    stream: u64,
) -> Result<EstimateReport> {
    check_n(n)?;
    let mut maps = sys.maps_on(stream);
    let mut s = fract01(x0);
    let mut total = Sum::new();
    let mut bm = BatchMeans::new(n);
    for _ in 0..n {
        let map = maps.next_map();
        let dev = Deviation {
            map: &map,
            shift: lift_shift(&map, params),
        };
        let d = dev.eval(s);
        total.add(d);
        bm.push(d);
        s = fract01(s + d);
    }
    Ok(EstimateReport {
        estimator: Estimator::Rho,
        value: total.value() / n as f64,
        n: n as u64,
        se_proxy: bm.standard_error(),
        q: Some(params.q),
        alpha: Some(params.alpha),
        s0: Some(fract01(x0)),
        seed: sys.seed(),
    })
}

/// Law of the integer offsets `N(ω)` of a nonuniform lift `F_{q,α} + N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OffsetLaw {
    Constant { value: i64 },
    Discrete { values: Vec<i64>, probs: Vec<f64> },
}

impl OffsetLaw {
    pub fn validate(&self) -> Result<()> {
        if let OffsetLaw::Discrete { values, probs } = self {
            if values.is_empty() || values.len() != probs.len() {
                return Err(Error::Config("offset law needs matching values/probs".into()));
            }
            let total: f64 = probs.iter().sum();
            if probs.iter().any(|p| *p < 0.0) || (total - 1.0).abs() > 1e-12 {
                return Err(Error::Config("offset probabilities must be a distribution".into()));
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            OffsetLaw::Constant { value } => *value as f64,
            OffsetLaw::Discrete { values, probs } => {
                values.iter().zip(probs).map(|(v, p)| *v as f64 * p).sum()
            }
        }
    }

    fn sampler(&self) -> impl FnMut(&mut Stream) -> i64 + '_ {
        let cumulative: Vec<f64> = match self {
            OffsetLaw::Constant { .. } => Vec::new(),
            OffsetLaw::Discrete { probs, .. } => probs
                .iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect(),
        };
        move |rng| match self {
            OffsetLaw::Constant { value } => *value,
            OffsetLaw::Discrete { values, .. } => values[pick(&cumulative, rng.uniform())],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonuniformRun {
    /// Rotation number of the lifts `G = F_{q,α} + N`.
    pub report: EstimateReport,
    /// `ρ_{q,α}` on the same maps and orbit.
    pub uniform: EstimateReport,
    /// Empirical mean of the offsets drawn.
    pub offset_mean: f64,
    /// `max_{i ≤ n} |Gⁱ(x₀) − Fⁱ(x₀) − Σ_{j ≤ i} N_j|`, with both compositions
    /// evaluated directly on the real line.
    pub max_telescoping_residual: f64,
}

/// Rotation number of the nonuniform random lift `G(ω) = F_{q,α}(ω) + N(ω)`.
pub fn rho_nonuniform(
    sys: &RandomSystem,
    params: LiftParams,
    offsets: &OffsetLaw,
    x0: f64,
    n: usize,
) -> Result<NonuniformRun> {
    check_n(n)?;
    offsets.validate()?;
    let mut draw = offsets.sampler();
    let mut offset_rng = Stream::new(sys.seed(), streams::OFFSETS);
    let mut maps = sys.maps();

    let mut s = fract01(x0);
    let (mut dev_sum, mut g_sum, mut n_sum) = (Sum::new(), Sum::new(), 0i64);
    let (mut bm_f, mut bm_g) = (BatchMeans::new(n), BatchMeans::new(n));
    let (mut g_raw, mut f_raw) = (x0, x0);
    let mut residual: f64 = 0.0;

    for _ in 0..n {
        let map = maps.next_map();
        let dev = Deviation {
            map: &map,
            shift: lift_shift(&map, params),
        };
        let k = draw(&mut offset_rng);
        let d = dev.eval(s);
        dev_sum.add(d);
        g_sum.add(d + k as f64);
        n_sum += k;
        bm_f.push(d);
        bm_g.push(d + k as f64);
        s = fract01(s + d);

        f_raw = dev.lift(f_raw);
        g_raw = dev.lift(g_raw) + k as f64;
        residual = residual.max((g_raw - f_raw - n_sum as f64).abs());
    }

    let nf = n as f64;
    let base = EstimateReport {
        estimator: Estimator::Rho,
        value: dev_sum.value() / nf,
        n: n as u64,
        se_proxy: bm_f.standard_error(),
        q: Some(params.q),
        alpha: Some(params.alpha),
        s0: Some(fract01(x0)),
        seed: sys.seed(),
    };
    Ok(NonuniformRun {
        report: EstimateReport {
            estimator: Estimator::Nonuniform,
            value: g_sum.value() / nf,
            se_proxy: bm_g.standard_error(),
            ..base.clone()
        },
        uniform: base,
        offset_mean: n_sum as f64 / nf,
        max_telescoping_residual: residual,
    })
}

/// The OR increment `δ̄ = frac(F(s) − s) ∈ [0, 1)`.
#[inline]
pub fn orbit_increment(map: &crate::homeo::CircleMap, s: f64) -> f64 {
    fract01(map.eval_lift(s) - s)
}

/// Largest `f64` below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Walks an orbit and emits its increments.
///
/// A contracting orbit reaches a floating-point fixed point after finitely
/// many steps, while the exact orbit only approaches it. Increments from then
/// on are `0⁺` or `1⁻` depending on the side of approach, so the walker keeps
/// the side of the last nonzero increment and emits `1⁻` on a fixed point
/// approached from above. Tiny negative displacements also map to `1⁻`
/// rather than rounding to one and wrapping to zero.
#[derive(Debug, Clone, Copy)]
pub struct OrbitWalker {
    pub s: f64,
    from_above: bool,
}

impl OrbitWalker {
    pub fn new(s0: Angle) -> OrbitWalker {
        OrbitWalker { s: s0.value(), from_above: false }
    }

    pub fn step(&mut self, map: &crate::homeo::CircleMap) -> f64 {
        let image = map.eval_lift(self.s);
        let d = image - self.s;
        let mut inc = d - d.floor();
        if inc >= 1.0 {
            inc = BELOW_ONE;
        }
        if inc == 0.0 {
            if self.from_above {
                inc = BELOW_ONE;
            }
        } else {
            self.from_above = inc > 0.5;
        }
        self.s = fract01(image);
        inc
    }
}

/// Winding rotation number `OR_{s₀} ≈ (γₙ − γ₀) / n` of the orbit from `s₀`.
pub fn orbit_rotation(sys: &RandomSystem, s0: Angle, n: usize) -> Result<(EstimateReport, OrbitTrace)> {
    check_n(n)?;
    let mut maps = sys.maps();
    let mut walker = OrbitWalker::new(s0);
    let mut total = Sum::new();
    let mut bm = BatchMeans::new(n);
    let mut gammas = Vec::with_capacity(n + 1);
    gammas.push(s0.value());
    for _ in 0..n {
        let map = maps.next_map();
        let inc = walker.step(&map);
        total.add(inc);
        bm.push(inc);
        gammas.push(s0.value() + total.value());
    }
    let report = EstimateReport {
        estimator: Estimator::Orbit,
        value: total.value() / n as f64,
        n: n as u64,
        se_proxy: bm.standard_error(),
        q: None,
        alpha: None,
        s0: Some(s0.value()),
        seed: sys.seed(),
    };
    Ok((report, OrbitTrace { gammas }))
}

/// Histogram occupation measure on `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn from_samples(bins: usize, samples: impl IntoIterator<Item = f64>) -> Result<EmpiricalMeasure> {
        if bins == 0 {
            return Err(Error::Config("histogram needs at least one bin".into()));
        }
        let mut counts = vec![0u64; bins];
        let mut total = 0u64;
        for s in samples {
            counts[bin_of(s, bins)] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::Config("empty occupation sample".into()));
        }
        Ok(EmpiricalMeasure {
            weights: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        })
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<EmpiricalMeasure> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0)) || total <= 0.0 {
            return Err(Error::Config("weights must be non-negative and not all zero".into()));
        }
        Ok(EmpiricalMeasure {
            weights: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn center(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) / self.bins() as f64
    }

    /// `∫ g dν` with `g` evaluated at cell centres.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| w * g(self.center(i)))
            .sum()
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut c: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *c.last_mut().unwrap() = 1.0;
        c
    }
}

pub(crate) fn bin_of(s: f64, bins: usize) -> usize {
    ((fract01(s) * bins as f64) as usize).min(bins - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicCheck {
    /// Birkhoff estimate along the measure-building orbit.
    pub direct: EstimateReport,
    /// `E ∫ δ_{q,α} dν` with ν the occupation measure and fresh map draws.
    pub cross: f64,
    pub cross_se: f64,
    pub measure: EmpiricalMeasure,
}

impl ErgodicCheck {
    pub fn combined_se(&self) -> f64 {
        self.direct.se_proxy.hypot(self.cross_se)
    }
}

/// Cross-checks the ergodic formula `ρ_{q,α} = ∫ δ_{q,α} dν dP` for i.i.d.
/// systems, where ν is the stationary measure.
pub fn ergodic_formula_check(
    sys: &RandomSystem,
    params: LiftParams,
    n_measure: usize,
    n_fresh: usize,
    bins: usize,
) -> Result<ErgodicCheck> {
    if !sys.is_iid() {
        return Err(Error::UnsupportedModel {
            operation: "ergodic_formula_check",
            reason: "the fibre measures of a cyclic base are not a single stationary measure".into(),
        });
    }
    check_n(n_measure)?;
    check_n(n_fresh)?;
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }

    let mut maps = sys.maps();
    let mut s = 0.0;
    let mut total = Sum::new();
    let mut bm = BatchMeans::new(n_measure);
    let mut counts = vec![0u64; bins];
    for _ in 0..n_measure {
        counts[bin_of(s, bins)] += 1;
        let map = maps.next_map();
        let dev = Deviation {
            map: &map,
            shift: lift_shift(&map, params),
        };
        let d = dev.eval(s);
        total.add(d);
        bm.push(d);
        s = fract01(s + d);
    }
    let measure = EmpiricalMeasure::from_weights(counts.iter().map(|&c| c as f64).collect())?;
    let direct = EstimateReport {
        estimator: Estimator::Rho,
        value: total.value() / n_measure as f64,
        n: n_measure as u64,
        se_proxy: bm.standard_error(),
        q: Some(params.q),
        alpha: Some(params.alpha),
        s0: Some(0.0),
        seed: sys.seed(),
    };

    let cumulative = measure.cumulative();
    let mut map_rng = Stream::new(sys.seed(), streams::FRESH);
    let mut pos_rng = Stream::new(sys.seed(), streams::AUX);
    let mut mv = MeanVar::default();
    for _ in 0..n_fresh {
        let map = sys.draw(&mut map_rng);
        let bin = pick(&cumulative, pos_rng.uniform());
        let angle = cover((bin as f64 + pos_rng.uniform()) / bins as f64).value();
        let dev = Deviation {
            map: &map,
            shift: lift_shift(&map, params),
        };
        mv.push(dev.eval(angle));
    }
    Ok(ErgodicCheck {
        direct,
        cross: mv.mean(),
        cross_se: mv.standard_error(),
        measure,
    })
}
