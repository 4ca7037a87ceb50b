//! Stratonovich stochastic flows on the circle, lifted to the real line:
//!
//! ```text
//! dx = h⁰(x) dt + Σⱼ hʲ(x) ∘ dBʲ,   hⁱ(x + 1) = hⁱ(x)
//! ```
//!
//! integrated with the Stratonovich Heun predictor–corrector scheme, and the
//! time-Δt discretization experiment relating `ρ_{q,α}(φ_Δt) / Δt` to the
//! continuous rotation number.

use std::f64::consts::TAU;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{ceil_half_open, fract01, Angle, LiftParams};
use crate::error::{Error, Result};
use crate::estimate::{bin_of, orbit_rotation, EmpiricalMeasure};
use crate::homeo::CircleMap;
use crate::rng::{streams, Stream};
use crate::stats::{BatchMeans, Sum};
use crate::system::RandomSystem;

/// Default number of Heun sub-steps per sampling interval.
pub const DEFAULT_SUBSTEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: u32,
    #[serde(default)]
    pub sin: f64,
    #[serde(default)]
    pub cos: f64,
}

/// A 1-periodic scalar field on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VectorField {
    Constant { value: f64 },
    /// `c + Σ (s_k sin 2πkx + c_k cos 2πkx)`.
    Trigpoly {
        #[serde(default)]
        constant: f64,
        terms: Vec<TrigTerm>,
    },
}

impl VectorField {
    pub fn constant(value: f64) -> VectorField {
        VectorField::Constant { value }
    }

    pub fn sine(amplitude: f64) -> VectorField {
        VectorField::Trigpoly {
            constant: 0.0,
            terms: vec![TrigTerm {
                freq: 1,
                sin: amplitude,
                cos: 0.0,
            }],
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match self {
            VectorField::Constant { value } => *value,
            VectorField::Trigpoly { constant, terms } => {
                terms.iter().fold(*constant, |acc, t| {
                    let (s, c) = (TAU * t.freq as f64 * x).sin_cos();
                    acc + t.sin * s + t.cos * c
                })
            }
        }
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            VectorField::Constant { .. } => 0.0,
            VectorField::Trigpoly { terms, .. } => terms.iter().fold(0.0, |acc, t| {
                let w = TAU * t.freq as f64;
                let (s, c) = (w * x).sin_cos();
                acc + w * (t.sin * c - t.cos * s)
            }),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            VectorField::Constant { value } => value.is_finite(),
            VectorField::Trigpoly { constant, terms } => {
                constant.is_finite() && terms.iter().all(|t| t.sin.is_finite() && t.cos.is_finite())
            }
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            VectorField::Constant { value } => *value == 0.0,
            VectorField::Trigpoly { constant, terms } => {
                *constant == 0.0 && terms.iter().all(|t| t.sin == 0.0 && t.cos == 0.0)
            }
        }
    }
}

/// Drift `h⁰` and diffusion fields `h¹ … hᵐ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFieldSet {
    pub drift: VectorField,
    #[serde(default)]
    pub diffusion: Vec<VectorField>,
}

impl VectorFieldSet {
    pub fn new(drift: VectorField, diffusion: Vec<VectorField>) -> Result<VectorFieldSet> {
        if !drift.is_finite() || !diffusion.iter().all(VectorField::is_finite) {
            return Err(Error::Config("vector field coefficients must be finite".into()));
        }
        Ok(VectorFieldSet { drift, diffusion })
    }

    /// `h⁰ ≡ a`, `h¹ ≡ b` (no noise when `b = 0`).
    pub fn constant(a: f64, b: f64) -> VectorFieldSet {
        let diffusion = if b == 0.0 { vec![] } else { vec![VectorField::constant(b)] };
        VectorFieldSet {
            drift: VectorField::constant(a),
            diffusion,
        }
    }

    /// Deterministic `ẋ = sin(2πx)`: source at 0, sink at 1/2. Its time-Δt
    /// flow is [`CircleMap::north_south`].
    pub fn north_south() -> VectorFieldSet {
        VectorFieldSet {
            drift: VectorField::sine(1.0),
            diffusion: vec![],
        }
    }

    pub fn dim(&self) -> usize {
        self.diffusion.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.diffusion.iter().all(VectorField::is_zero)
    }

    /// Itô-form drift `h⁰ + ½ Σ hʲ′ hʲ`.
    pub fn ito_drift(&self, x: f64) -> f64 {
        self.drift.value(x)
            + 0.5
                * self
                    .diffusion
                    .iter()
                    .map(|h| h.derivative(x) * h.value(x))
                    .sum::<f64>()
    }

    /// Largest `|h(x + 1) − h(x)|` over a grid of `[0, 1)`.
    pub fn periodicity_error(&self, grid: usize) -> f64 {
        self.fields()
            .flat_map(|h| (0..grid).map(move |i| {
                let x = i as f64 / grid as f64;
                (h.value(x + 1.0) - h.value(x)).abs()
            }))
            .fold(0.0, f64::max)
    }

    /// Largest gap between supplied derivatives and centred differences.
    pub fn derivative_error(&self, grid: usize) -> f64 {
        let step = 1e-5;
        self.fields()
            .flat_map(|h| (0..grid).map(move |i| {
                let x = i as f64 / grid as f64;
                let fd = (h.value(x + step) - h.value(x - step)) / (2.0 * step);
                (fd - h.derivative(x)).abs()
            }))
            .fold(0.0, f64::max)
    }

    fn fields(&self) -> impl Iterator<Item = &VectorField> {
        std::iter::once(&self.drift).chain(self.diffusion.iter())
    }

    /// One Stratonovich Heun step with Brownian increments `db`.
    #[inline]
    pub fn heun_step(&self, x: f64, dt: f64, db: &[f64]) -> f64 {
        let f0 = self.drift.value(x);
        let mut pred = x + f0 * dt;
        for (h, w) in self.diffusion.iter().zip(db) {
            pred += h.value(x) * w;
        }
        let mut next = x + 0.5 * (f0 + self.drift.value(pred)) * dt;
        for (h, w) in self.diffusion.iter().zip(db) {
            next += 0.5 * (h.value(x) + h.value(pred)) * w;
        }
        next
    }
}

/// Seeded Gaussian increments of an `m`-dimensional Brownian motion sampled
/// at step `dt_internal`, consumed in time order.
#[derive(Debug, Clone)]
pub struct BrownianStream {
    seed: u64,
    dt_internal: f64,
    dim: usize,
    rng: Stream,
}

impl BrownianStream {
    pub fn new(seed: u64, stream: u64, dt_internal: f64, dim: usize) -> Result<BrownianStream> {
        if !(dt_internal.is_finite() && dt_internal > 0.0) {
            return Err(Error::Config(format!("internal step must be positive, got {dt_internal}")));
        }
        Ok(BrownianStream {
            seed,
            dt_internal,
            dim,
            rng: Stream::new(seed, stream),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt_internal(&self) -> f64 {
        self.dt_internal
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        let scale = self.dt_internal.sqrt();
        for v in out {
            let z: f64 = StandardNormal.sample(self.rng.rng());
            *v = scale * z;
        }
    }

    fn substeps_for(&self, delta_t: f64) -> Result<usize> {
        let r = delta_t / self.dt_internal;
        let k = r.round();
        if !(delta_t > 0.0) || k < 1.0 || (r - k).abs() > 1e-9 * r.max(1.0) {
            return Err(Error::Config(format!(
                "Δt = {delta_t} is not a positive multiple of the internal step {}",
                self.dt_internal
            )));
        }
        Ok(k as usize)
    }

    /// Draws the increments of the next `delta_t` of Brownian path.
    pub fn next_segment(&mut self, delta_t: f64) -> Result<FlowSegment> {
        let substeps = self.substeps_for(delta_t)?;
        let mut seg = FlowSegment {
            delta_t,
            dt: self.dt_internal,
            substeps,
            dim: self.dim,
            increments: vec![0.0; substeps * self.dim],
        };
        self.fill(&mut seg.increments);
        Ok(seg)
    }

    /// Refills `seg` in place with the next increments.
    pub fn refill(&mut self, seg: &mut FlowSegment) {
        self.fill(&mut seg.increments);
    }
}

/// The time-Δt lifted flow `ψ_Δt(ω, ·)` for one fixed set of increments.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSegment {
    pub delta_t: f64,
    dt: f64,
    substeps: usize,
    dim: usize,
    increments: Vec<f64>,
}

impl FlowSegment {
    /// `ψ_Δt(ω, x)`; replays the same increments for every `x`.
    pub fn psi(&self, vf: &VectorFieldSet, x: f64) -> f64 {
        if self.dim == 0 {
            return (0..self.substeps).fold(x, |y, _| vf.heun_step(y, self.dt, &[]));
        }
        self.increments
            .chunks_exact(self.dim)
            .fold(x, |y, db| vf.heun_step(y, self.dt, db))
    }

    /// Total Brownian increment of coordinate `j` over the segment.
    pub fn brownian_increment(&self, j: usize) -> f64 {
        self.increments.iter().skip(j).step_by(self.dim.max(1)).sum()
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }
}

pub fn integrate_segment(
    vf: &VectorFieldSet,
    stream: &mut BrownianStream,
    x0: f64,
    delta_t: f64,
) -> Result<(f64, FlowSegment)> {
    if stream.dim() != vf.dim() {
        return Err(Error::Config(format!(
            "Brownian dimension {} does not match {} diffusion fields",
            stream.dim(),
            vf.dim()
        )));
    }
    let seg = stream.next_segment(delta_t)?;
    Ok((seg.psi(vf, x0), seg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotEstimate {
    /// `(ψ_T(x₀) − x₀) / T`.
    pub value: f64,
    /// Same ratio over the window `[T/2, T]`.
    pub tail: f64,
    pub t: f64,
}

struct Walk {
    displacement: Sum,
    half: f64,
}

// Integrates over `steps` internal steps, tracking the angle in [0, 1) and the
// displacement separately so the fields are never evaluated at large x.
fn walk(
    vf: &VectorFieldSet,
    stream: &mut BrownianStream,
    x0: f64,
    steps: usize,
    mut visit: impl FnMut(f64),
) -> Walk {
    let dt = stream.dt_internal();
    let mut db = vec![0.0; vf.dim()];
    let mut r = fract01(x0);
    let mut displacement = Sum::new();
    let mut half = 0.0;
    for i in 0..steps {
        if i == steps / 2 {
            half = displacement.value();
        }
        visit(r);
        stream.fill(&mut db);
        let y = vf.heun_step(r, dt, &db);
        displacement.add(y - r);
        r = fract01(y);
    }
    Walk { displacement, half }
}

fn horizon_steps(stream: &BrownianStream, t: f64) -> Result<usize> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {t}")));
    }
    let steps = (t / stream.dt_internal()).round();
    if steps < 2.0 {
        return Err(Error::Config("horizon shorter than two internal steps".into()));
    }
    Ok(steps as usize)
}

/// Average winding `ψ_T(ω, x₀) / T` of one trajectory.
pub fn rot_continuous(vf: &VectorFieldSet, stream: &mut BrownianStream, x0: f64, t: f64) -> Result<RotEstimate> {
    let steps = horizon_steps(stream, t)?;
    let w = walk(vf, stream, x0, steps, |_| {});
    let t_eff = steps as f64 * stream.dt_internal();
    let total = w.displacement.value();
    let t_half = (steps - steps / 2) as f64 * stream.dt_internal();
    Ok(RotEstimate {
        value: total / t_eff,
        tail: (total - w.half) / t_half,
        t: t_eff,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaEstimate {
    pub value: f64,
    pub measure: EmpiricalMeasure,
}

/// `∫ (h⁰ + ½ Σ hʲ′hʲ) dν` with ν the time-occupation histogram of one
/// trajectory of length `T` started at 0.
pub fn rot_formula_estimate(
    vf: &VectorFieldSet,
    stream: &mut BrownianStream,
    t: f64,
    bins: usize,
) -> Result<FormulaEstimate> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let steps = horizon_steps(stream, t)?;
    let mut counts = vec![0u64; bins];
    walk(vf, stream, 0.0, steps, |r| counts[bin_of(r, bins)] += 1);
    let measure = EmpiricalMeasure::from_weights(counts.iter().map(|&c| c as f64).collect())?;
    Ok(FormulaEstimate {
        value: measure.integrate(|x| vf.ito_drift(x)),
        measure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingRow {
    pub delta_t: f64,
    /// `ρ̂_{q,α}(φ_Δt) / Δt`.
    pub rho_rescaled: f64,
    /// Batch-means standard error of `rho_rescaled`.
    pub se: f64,
    /// `E[|N|] / Δt`.
    pub crossing_diag: f64,
    /// `E[N] / Δt`.
    pub mean_crossing: f64,
    pub n_steps: u64,
}

/// Discretizes the flow at each `Δt` and estimates the rescaled rotation
/// number `ρ_{q,α}(φ_Δt) / Δt`. Requires `q − 1 < α < q`.
pub fn sampling_experiment(
    vf: &VectorFieldSet,
    params: LiftParams,
    delta_ts: &[f64],
    n_steps: usize,
    seed: u64,
    substeps: usize,
) -> Result<Vec<SamplingRow>> {
    if !params.sampling_valid() {
        return Err(Error::Hypothesis {
            hypothesis: "q - 1 < alpha < q",
            detail: format!(
                "(q, alpha) = ({}, {}) lies outside the window where discretizations recover the rotation number",
                params.q, params.alpha
            ),
        });
    }
    sampling_ladder(vf, params, delta_ts, n_steps, seed, substeps)
}

/// [`sampling_experiment`] without the hypothesis gate, for demonstrating
/// what happens outside the window.
pub fn sampling_ladder(
    vf: &VectorFieldSet,
    params: LiftParams,
    delta_ts: &[f64],
    n_steps: usize,
    seed: u64,
    substeps: usize,
) -> Result<Vec<SamplingRow>> {
    if n_steps == 0 || substeps == 0 {
        return Err(Error::Config("n_steps and substeps must be ≥ 1".into()));
    }
    if delta_ts.iter().any(|dt| !(dt.is_finite() && *dt > 0.0)) {
        return Err(Error::Config("every Δt must be positive".into()));
    }
    delta_ts
        .par_iter()
        .enumerate()
        .map(|(rung, &dt)| sampling_rung(vf, params, dt, n_steps, seed, rung as u64, substeps))
        .collect()
}

fn sampling_rung(
    vf: &VectorFieldSet,
    params: LiftParams,
    delta_t: f64,
    n_steps: usize,
    seed: u64,
    rung: u64,
    substeps: usize,
) -> Result<SamplingRow> {
    let mut stream = BrownianStream::new(seed, streams::BROWNIAN + rung, delta_t / substeps as f64, vf.dim())?;
    let mut seg = stream.next_segment(delta_t)?;
    let mut r = fract01(params.q);
    let mut total = Sum::new();
    let mut bm = BatchMeans::new(n_steps);
    let (mut abs_n, mut sum_n) = (0u64, 0i64);
    for i in 0..n_steps {
        if i > 0 {
            stream.refill(&mut seg);
        }
        let y = seg.psi(vf, r);
        let anchor = seg.psi(vf, params.q);
        let crossing = ceil_half_open(params.alpha - anchor);
        let dev = (y - r) + crossing as f64;
        total.add(dev);
        bm.push(dev);
        abs_n += crossing.unsigned_abs();
        sum_n += crossing;
        r = fract01(y);
        if !r.is_finite() {
            return Err(Error::Numeric(format!("flow diverged at step {i} for Δt = {delta_t}")));
        }
    }
    let nf = n_steps as f64;
    Ok(SamplingRow {
        delta_t,
        rho_rescaled: total.value() / nf / delta_t,
        se: bm.standard_error() / delta_t,
        crossing_diag: abs_n as f64 / nf / delta_t,
        mean_crossing: sum_n as f64 / nf / delta_t,
        n_steps: n_steps as u64,
    })
}

/// Least-squares slope of `log |ρ̂/Δt − truth|` against `log Δt`; purely
/// descriptive.
pub fn observed_rate(rows: &[SamplingRow], truth: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| (r.rho_rescaled - truth).abs() > 0.0)
        .map(|r| (r.delta_t.ln(), (r.rho_rescaled - truth).abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub s0: f64,
    pub or: f64,
}

/// Orbit rotation numbers of the time-Δt North–South map for several starts.
pub fn or_sampling_counterexample(delta_t: f64, s0_list: &[f64], n: usize) -> Result<Vec<CounterexampleRow>> {
    let sys = RandomSystem::deterministic(CircleMap::north_south(delta_t)?, 0)?;
    s0_list
        .iter()
        .map(|&s0| {
            let (report, _) = orbit_rotation(&sys, Angle::new(s0), n)?;
            Ok(CounterexampleRow { s0, or: report.value })
        })
        .collect()
}
