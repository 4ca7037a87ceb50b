//! Covering-space arithmetic on the unit circle.
//!
//! The circle is parameterized by `[0, 1)` and the covering map is
//! `x ↦ x − ⌊x⌋`, i.e. `x ↦ exp(2πix)` with the period scaled to one.
//! A lift of an orientation-preserving homeomorphism is an increasing
//! `F: ℝ → ℝ` with `F(x + 1) = F(x) + 1`; every lift differs from the
//! canonical one (value at 0 in `[0, 1)`) by an integer.

use serde::{Deserialize, Serialize};

use crate::homeo::CircleMap;

/// Tolerance used for the half-open boundary convention.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A normalized angle in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps an arbitrary real into `[0, 1)`.
    #[inline]
    pub fn new(x: f64) -> Angle {
        cover(x)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts from the `(−1/2, 1/2]` chart.
    pub fn from_centered(x: f64) -> Angle {
        cover(x)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// The covering projection `ℝ → [0, 1)`.
#[inline]
pub fn cover(x: f64) -> Angle {
    let r = x - x.floor();
    // tiny negative inputs round up to exactly 1.0
    if r >= 1.0 {
        Angle(0.0)
    } else {
        Angle(r)
    }
}

/// Fractional part as a plain real in `[0, 1)`.
#[inline]
pub fn fract01(x: f64) -> f64 {
    cover(x).0
}

/// The unique integer `n` with `n ∈ [z, z + 1)`.
///
/// Values within [`BOUNDARY_TOL`] above an integer resolve to that integer,
/// which implements the half-open `[α, α + 1)` convention for points landing
/// on `α` up to round-off.
#[inline]
pub fn ceil_half_open(z: f64) -> i64 {
    (z - BOUNDARY_TOL).ceil() as i64
}

/// The unique integer `i` with `v ∈ [base + i, base + i + 1)`.
#[inline]
pub fn cell_index(v: f64, base: f64) -> i64 {
    (v - base + BOUNDARY_TOL).floor() as i64
}

/// Parameters `(q, α)` selecting the uniform lift: the lift `F` with
/// `F(q) ∈ [α, α + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftParams {
    pub q: f64,
    pub alpha: f64,
}

impl LiftParams {
    pub const ORIGIN: LiftParams = LiftParams { q: 0.0, alpha: 0.0 };

    pub fn new(q: f64, alpha: f64) -> LiftParams {
        LiftParams { q, alpha }
    }

    /// `q − 1 < α < q`, the window in which time discretizations recover the
    /// continuous rotation number.
    pub fn sampling_valid(&self) -> bool {
        self.q - 1.0 < self.alpha && self.alpha < self.q
    }

    /// Integer translation of the parameters; the deviation of the resulting
    /// lift differs from the original one by exactly `l − k`.
    pub fn shifted(&self, k: i64, l: i64) -> LiftParams {
        LiftParams {
            q: self.q + k as f64,
            alpha: self.alpha + l as f64,
        }
    }

    /// Lower and upper strict bounds on any `(q, α)` deviation.
    pub fn deviation_bounds(&self) -> (f64, f64) {
        let d = self.alpha - self.q;
        (d - 1.0, d + 2.0)
    }
}

pub fn shift_params(params: LiftParams, k: i64, l: i64) -> LiftParams {
    params.shifted(k, l)
}

/// Integer offset taking the canonical lift of `map` to its `(q, α)`-lift.
pub fn lift_shift(map: &CircleMap, params: LiftParams) -> i64 {
    ceil_half_open(params.alpha - map.eval_lift(params.q))
}

/// The deviation `δ_{q,α} = F_{q,α} − Id` of one map.
#[derive(Debug, Clone, Copy)]
pub struct Deviation<'a> {
    pub map: &'a CircleMap,
    pub shift: i64,
}

impl<'a> Deviation<'a> {
    pub fn eval(&self, x: f64) -> f64 {
        let r = fract01(x);
        self.map.eval_lift(r) - r + self.shift as f64
    }

    /// The `(q, α)`-lift itself, evaluated without periodic reduction.
    pub fn lift(&self, x: f64) -> f64 {
        self.map.eval_lift(x) + self.shift as f64
    }
}

pub fn normalize_lift(map: &CircleMap, params: LiftParams) -> Deviation<'_> {
    Deviation {
        map,
        shift: lift_shift(map, params),
    }
}
