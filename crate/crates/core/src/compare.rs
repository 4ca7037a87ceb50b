//! Comparison between rotation numbers for different lift parameters, and
//! between the topological and orbit rotation numbers.
//!
//! For parameters `(q, α)` and `(q′, α′)`:
//!
//! ```text
//! A_i = { ω : F_{q,α′}(ω, q′) ∈ [α′ + i, α′ + i + 1) }
//! B_j = { ω : F_{q,α}(ω, q)   ∈ [α′ − j, α′ − j + 1) }
//! k = min{ i : P(A_i) > 0 },  l = min{ j : P(B_j) > 0 }
//! ρ_{q′,α′} = ρ_{q,α} + P(A_k) − P(B_l) − k + l
//! ```

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{ceil_half_open, cell_index, fract01, lift_shift, Angle, Deviation, LiftParams};
use crate::error::Result;
use crate::estimate::{orbit_increment, rho_estimate_on};
use crate::homeo::CircleMap;
use crate::rng::streams;
use crate::stats::Sum;
use crate::system::RandomSystem;

/// Cells whose observed frequency is below `RARE_CELL / n` are flagged.
pub const RARE_CELL: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingStats {
    pub probs_a: BTreeMap<i64, f64>,
    pub probs_b: BTreeMap<i64, f64>,
    pub k: i64,
    pub l: i64,
    pub n_samples: u64,
    /// The minimal observed A-cell is rare, so `k` may be under-resolved.
    pub k_uncertain: bool,
    pub l_uncertain: bool,
    /// Frequency of `A_k ∩ B_l`, used for the variance of `1_{A_k} − 1_{B_l}`.
    pub joint_kl: f64,
}

impl CrossingStats {
    pub fn p_a(&self) -> f64 {
        self.probs_a.get(&self.k).copied().unwrap_or(0.0)
    }

    pub fn p_b(&self) -> f64 {
        self.probs_b.get(&self.l).copied().unwrap_or(0.0)
    }

    /// Standard error of `P̂(A_k) − P̂(B_l)`.
    pub fn se_difference(&self) -> f64 {
        let (a, b) = (self.p_a(), self.p_b());
        let var = (a + b - 2.0 * self.joint_kl - (a - b).powi(2)).max(0.0);
        (var / self.n_samples as f64).sqrt()
    }
}

/// Index of the A-cell for one map.
pub fn a_index(map: &CircleMap, base: LiftParams, target: LiftParams) -> i64 {
    let mixed = LiftParams::new(base.q, target.alpha);
    let v = map.eval_lift(target.q) + lift_shift(map, mixed) as f64;
    cell_index(v, target.alpha)
}

/// Index of the B-cell for one map.
pub fn b_index(map: &CircleMap, base: LiftParams, target: LiftParams) -> i64 {
    let v = map.eval_lift(base.q) + lift_shift(map, base) as f64;
    ceil_half_open(target.alpha - v)
}

pub fn crossing_stats(sys: &RandomSystem, base: LiftParams, target: LiftParams, n: usize) -> CrossingStats {
    crossing_stats_on(sys, base, target, n, streams::MAPS)
}

pub fn crossing_stats_on(
    sys: &RandomSystem,
    base: LiftParams,
    target: LiftParams,
    n: usize,
    stream: u64,
) -> CrossingStats {
    let n = n.max(1);
    let mut joint: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for map in sys.maps_on(stream).take(n) {
        *joint.entry((a_index(&map, base, target), b_index(&map, base, target))).or_default() += 1;
    }
    let mut ca: BTreeMap<i64, u64> = BTreeMap::new();
    let mut cb: BTreeMap<i64, u64> = BTreeMap::new();
    for (&(i, j), &c) in &joint {
        *ca.entry(i).or_default() += c;
        *cb.entry(j).or_default() += c;
    }
    let nf = n as f64;
    let (&k, &ck) = ca.iter().next().expect("n ≥ 1");
    let (&l, &cl) = cb.iter().next().expect("n ≥ 1");
    CrossingStats {
        probs_a: ca.iter().map(|(&i, &c)| (i, c as f64 / nf)).collect(),
        probs_b: cb.iter().map(|(&j, &c)| (j, c as f64 / nf)).collect(),
        k,
        l,
        n_samples: n as u64,
        k_uncertain: (ck as f64) < RARE_CELL,
        l_uncertain: (cl as f64) < RARE_CELL,
        joint_kl: joint.get(&(k, l)).copied().unwrap_or(0) as f64 / nf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StreamMode {
    /// Both rotation numbers and the crossing frequencies use the same maps.
    #[default]
    Shared,
    /// Three independent streams of the seed.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub se_lhs: f64,
    pub se_rhs: f64,
}

impl Residual {
    pub fn combined_se(&self) -> f64 {
        self.se_lhs.hypot(self.se_rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftComparison {
    pub residual: Residual,
    pub rho_base: f64,
    pub rho_target: f64,
    pub stats: CrossingStats,
}

/// Checks `ρ_{q′,α′} = ρ_{q,α} + P(A_k) − P(B_l) − k + l` with every term
/// estimated numerically.
pub fn verify_lift_comparison(
    sys: &RandomSystem,
    base: LiftParams,
    target: LiftParams,
    n_rho: usize,
    n_prob: usize,
    mode: StreamMode,
) -> Result<LiftComparison> {
    let (s_target, s_base, s_cross) = match mode {
        StreamMode::Shared => (streams::MAPS, streams::MAPS, streams::MAPS),
        StreamMode::Independent => (streams::MAPS, streams::AUX, streams::CROSSING),
    };
    let lhs = rho_estimate_on(sys, target, 0.0, n_rho, s_target)?;
    let rb = rho_estimate_on(sys, base, 0.0, n_rho, s_base)?;
    let stats = crossing_stats_on(sys, base, target, n_prob, s_cross);
    let rhs = rb.value + stats.p_a() - stats.p_b() - stats.k as f64 + stats.l as f64;
    let se_rhs = match mode {
        // shared maps: the identity holds step by step, only the base estimate varies
        StreamMode::Shared => rb.se_proxy,
        StreamMode::Independent => rb.se_proxy.hypot(stats.se_difference()),
    };
    Ok(LiftComparison {
        residual: Residual {
            lhs: lhs.value,
            rhs,
            residual: (lhs.value - rhs).abs(),
            se_lhs: lhs.se_proxy,
            se_rhs,
        },
        rho_base: rb.value,
        rho_target: lhs.value,
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Vary `q′` with `α′ = α`; rows report `k(q′)` and `P(A_k)`.
    Q,
    /// Vary `α′` with `q′ = q`; rows report `l(α′)` and `P(B_l)`.
    Alpha,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseRow {
    pub grid_value: f64,
    pub level: i64,
    pub prob: f64,
    pub uncertain: bool,
}

/// Staircase levels along an ascending grid. Every grid point uses the same
/// map stream, so monotonicity within a cell holds sample by sample.
pub fn staircase_sweep(
    sys: &RandomSystem,
    base: LiftParams,
    axis: SweepAxis,
    grid: &[f64],
    n: usize,
) -> Result<Vec<StaircaseRow>> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(crate::Error::Config("sweep grid must be ascending".into()));
    }
    Ok(grid
        .par_iter()
        .map(|&g| {
            let target = match axis {
                SweepAxis::Q => LiftParams::new(g, base.alpha),
                SweepAxis::Alpha => LiftParams::new(base.q, g),
            };
            let st = crossing_stats(sys, base, target, n);
            let (level, prob, uncertain) = match axis {
                SweepAxis::Q => (st.k, st.p_a(), st.k_uncertain),
                SweepAxis::Alpha => (st.l, st.p_b(), st.l_uncertain),
            };
            StaircaseRow {
                grid_value: g,
                level,
                prob,
                uncertain,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitIdentity {
    pub or: f64,
    pub rho: f64,
    /// `⌊(α − q) − 1⌋`.
    pub k: i64,
    /// Orbit frequencies of δ in `(k, k+1)`, `[k+1, k+2)`, `[k+2, k+3)`.
    pub weights: [f64; 3],
    pub residual: Residual,
    /// The `(q, α) = (0, 0)` rearrangement `ρ + ν{δ < 0} − ν{δ ≥ 1}`.
    pub origin_form: Option<Residual>,
    /// Steps whose deviation fell outside the three cells.
    pub out_of_range: u64,
}

/// Compares `OR_{s₀}` with `ρ_{q,α}` minus the integer corrections weighted by
/// the orbit's occupation of the deviation cells.
pub fn verify_orbit_identity(sys: &RandomSystem, params: LiftParams, s0: Angle, n: usize) -> Result<OrbitIdentity> {
    if n == 0 {
        return Err(crate::Error::Config("iteration count must be ≥ 1".into()));
    }
    let k = (params.alpha - params.q - 1.0).floor() as i64;
    let mut maps = sys.maps();
    let mut s = s0.value();
    let (mut or_sum, mut rho_sum) = (Sum::new(), Sum::new());
    let mut cells = [0u64; 3];
    let (mut negative, mut above_one, mut out_of_range) = (0u64, 0u64, 0u64);
    for _ in 0..n {
        let map = maps.next_map();
        let dev = Deviation {
            map: &map,
            shift: lift_shift(&map, params),
        };
        let d = dev.eval(s);
        let inc = orbit_increment(&map, s);
        rho_sum.add(d);
        or_sum.add(inc);
        match d.floor() as i64 - k {
            c @ 0..=2 => cells[c as usize] += 1,
            _ => out_of_range += 1,
        }
        if d < 0.0 {
            negative += 1;
        } else if d >= 1.0 {
            above_one += 1;
        }
        s = fract01(s + inc);
    }
    let nf = n as f64;
    let or = or_sum.value() / nf;
    let rho = rho_sum.value() / nf;
    let weights = cells.map(|c| c as f64 / nf);
    let rhs = rho
        - k as f64 * weights[0]
        - (k + 1) as f64 * weights[1]
        - (k + 2) as f64 * weights[2];
    let origin_form = (params == LiftParams::ORIGIN).then(|| {
        let rhs0 = rho + negative as f64 / nf - above_one as f64 / nf;
        Residual {
            lhs: or,
            rhs: rhs0,
            residual: (or - rhs0).abs(),
            se_lhs: 0.0,
            se_rhs: 0.0,
        }
    });
    Ok(OrbitIdentity {
        or,
        rho,
        k,
        weights,
        residual: Residual {
            lhs: or,
            rhs,
            residual: (or - rhs).abs(),
            se_lhs: 0.0,
            se_rhs: 0.0,
        },
        origin_form,
        out_of_range,
    })
}
