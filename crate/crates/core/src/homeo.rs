//! Orientation-preserving circle homeomorphisms, each carried by its
//! canonical lift (the lift whose value at 0 lies in `[0, 1)`).

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::circle::{cover, fract01, Angle};
use crate::error::{Error, Result};

/// Monotone piecewise-linear lift through periodic knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    winding: i64,
    canon: f64,
}

impl PiecewiseLinear {
    /// Knots are `(x, y)` pairs with strictly ascending `x ∈ [0, 1)`.
    /// Monotonicity of `y` is not enforced here; see [`CircleMap::validate`].
    pub fn new(knots: &[(f64, f64)], winding: i64) -> Result<PiecewiseLinear> {
        if knots.is_empty() {
            return Err(Error::InvalidMap("piecewise-linear map needs at least one knot".into()));
        }
        for (i, &(x, y)) in knots.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidMap(format!("knot {i} is not finite")));
            }
            if !(0.0..1.0).contains(&x) {
                return Err(Error::InvalidMap(format!("knot {i}: x = {x} outside [0, 1)")));
            }
            if i > 0 && x <= knots[i - 1].0 {
                return Err(Error::InvalidMap(format!("knot {i}: x values must be strictly ascending")));
            }
        }
        let mut pl = PiecewiseLinear {
            xs: knots.iter().map(|k| k.0).collect(),
            ys: knots.iter().map(|k| k.1).collect(),
            winding,
            canon: 0.0,
        };
        pl.canon = -pl.raw(0.0).floor();
        Ok(pl)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    fn raw(&self, x: f64) -> f64 {
        let x0 = self.xs[0];
        let mut m = x.floor();
        let mut r = x - m;
        if r < x0 {
            r += 1.0;
            m -= 1.0;
        }
        let n = self.xs.len();
        let i = self.xs.partition_point(|&k| k <= r) - 1;
        let (xa, ya) = (self.xs[i], self.ys[i]);
        let (xb, yb) = if i + 1 < n {
            (self.xs[i + 1], self.ys[i + 1])
        } else {
            (x0 + 1.0, self.ys[0] + 1.0)
        };
        let y = if r == xa { ya } else { ya + (r - xa) * (yb - ya) / (xb - xa) };
        y + m + self.winding as f64
    }

    fn knots_monotone(&self) -> bool {
        let n = self.ys.len();
        self.ys.windows(2).all(|w| w[1] > w[0]) && self.ys[n - 1] < self.ys[0] + 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// Rigid rotation by `theta` turns.
    Rotation { theta: f64 },
    PiecewiseLinear(PiecewiseLinear),
    /// Action of a 2×2 matrix with positive determinant on unit vectors.
    Projective { matrix: [[f64; 2]; 2] },
    /// `x ↦ x + c + ε sin(2πx)` with `|2πε| < 1`.
    PerturbedRotation { c: f64, eps: f64 },
    /// Time-`dt` flow of `ẋ = sin(2πx)`: source at 0, sink at 1/2.
    NorthSouth { dt: f64 },
    /// Lifts applied left to right, then translated by an integer.
    Composite { parts: Arc<[CircleMap]>, offset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    kind: MapKind,
    // integer translation making the value at 0 land in [0, 1)
    canon: f64,
}

impl CircleMap {
    fn with_canon(kind: MapKind) -> CircleMap {
        let mut m = CircleMap { kind, canon: 0.0 };
        m.canon = -m.eval_lift(0.0).floor();
        m
    }

    pub fn identity() -> CircleMap {
        CircleMap::rotation(0.0)
    }

    pub fn rotation(theta: f64) -> CircleMap {
        CircleMap {
            kind: MapKind::Rotation { theta: fract01(theta) },
            canon: 0.0,
        }
    }

    pub fn piecewise_linear(knots: &[(f64, f64)], winding: i64) -> Result<CircleMap> {
        let pl = PiecewiseLinear::new(knots, winding)?;
        Ok(CircleMap {
            kind: MapKind::PiecewiseLinear(pl),
            canon: 0.0,
        })
    }

    pub fn projective(matrix: [[f64; 2]; 2]) -> Result<CircleMap> {
        let [[a, b], [c, d]] = matrix;
        if !matrix.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::InvalidMap("projective matrix has non-finite entries".into()));
        }
        let det = a * d - b * c;
        if det <= 0.0 {
            return Err(Error::InvalidMap(format!(
                "projective matrix must have positive determinant, got {det}"
            )));
        }
        Ok(CircleMap::with_canon(MapKind::Projective { matrix }))
    }

    pub fn perturbed_rotation(c: f64, eps: f64) -> Result<CircleMap> {
        if !c.is_finite() || !eps.is_finite() || TAU * eps.abs() >= 1.0 {
            return Err(Error::InvalidMap(format!(
                "perturbed rotation needs |2πε| < 1, got ε = {eps}"
            )));
        }
        Ok(CircleMap {
            kind: MapKind::PerturbedRotation { c: fract01(c), eps },
            canon: 0.0,
        })
    }

    pub fn north_south(dt: f64) -> Result<CircleMap> {
        if !dt.is_finite() || dt < 0.0 {
            return Err(Error::InvalidMap(format!("north-south flow time must be ≥ 0, got {dt}")));
        }
        Ok(CircleMap {
            kind: MapKind::NorthSouth { dt },
            canon: 0.0,
        })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Canonical lift `F₀`, with `F₀(0) ∈ [0, 1)`.
    pub fn eval_lift(&self, x: f64) -> f64 {
        self.eval_raw(x) + self.canon
    }

    fn eval_raw(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Rotation { theta } => x + theta,
            MapKind::PiecewiseLinear(pl) => pl.raw(x) + pl.canon,
            MapKind::Projective { matrix } => projective_lift(matrix, x),
            MapKind::PerturbedRotation { c, eps } => x + c + eps * (TAU * x).sin(),
            MapKind::NorthSouth { dt } => north_south_lift(*dt, x),
            MapKind::Composite { parts, offset } => {
                parts.iter().fold(x, |acc, m| m.eval_lift(acc)) + offset
            }
        }
    }

    /// The circle map itself.
    pub fn apply(&self, s: Angle) -> Angle {
        cover(self.eval_lift(s.value()))
    }

    /// Strict monotonicity and unit-translation equivariance on a grid of
    /// `grid_size + 1` points over `[0, 1]`, within 1e−9.
    pub fn validate(&self, grid_size: usize) -> bool {
        let grid_size = grid_size.max(2);
        if let MapKind::PiecewiseLinear(pl) = &self.kind {
            if !pl.knots_monotone() {
                return false;
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=grid_size {
            let x = i as f64 / grid_size as f64;
            let y = self.eval_lift(x);
            if !y.is_finite() || y <= prev {
                return false;
            }
            if (self.eval_lift(x + 1.0) - y - 1.0).abs() > 1e-9 {
                return false;
            }
            prev = y;
        }
        true
    }

    fn as_rotation(&self) -> Option<f64> {
        match self.kind {
            MapKind::Rotation { theta } => Some(theta),
            _ => None,
        }
    }
}

/// `G ∘ F`, renormalized to the canonical lift.
pub fn compose(g: &CircleMap, f: &CircleMap) -> CircleMap {
    match (g.as_rotation(), f.as_rotation()) {
        (Some(a), Some(b)) => return CircleMap::rotation(a + b),
        (Some(0.0), None) => return f.clone(),
        (None, Some(0.0)) => return g.clone(),
        _ => {}
    }
    let mut parts = Vec::new();
    let mut offset = 0.0;
    for m in [f, g] {
        match &m.kind {
            MapKind::Composite { parts: inner, offset: o } => {
                parts.extend(inner.iter().cloned());
                offset += o + m.canon;
            }
            _ => parts.push(m.clone()),
        }
    }
    CircleMap::with_canon(MapKind::Composite {
        parts: parts.into(),
        offset,
    })
}

impl CircleMap {
    pub fn then(&self, next: &CircleMap) -> CircleMap {
        compose(next, self)
    }
}

// Polar decomposition A = R(φ)·P with P symmetric positive definite. P moves
// every direction by less than a quarter turn, so its displacement has a
// continuous branch in (−1/4, 1/4); the rotation contributes φ/2π.
fn projective_lift(m: &[[f64; 2]; 2], x: f64) -> f64 {
    let [[a, b], [c, d]] = *m;
    let phi = (c - b).atan2(a + d);
    let (sp, cp) = phi.sin_cos();
    // P = R(−φ)·A
    let p11 = cp * a + sp * c;
    let p12 = cp * b + sp * d;
    let p21 = -sp * a + cp * c;
    let p22 = -sp * b + cp * d;
    let (s, co) = (TAU * x).sin_cos();
    let w1 = p11 * co + p12 * s;
    let w2 = p21 * co + p22 * s;
    let cross = co * w2 - s * w1;
    let dot = co * w1 + s * w2;
    x + cross.atan2(dot) / TAU + phi / TAU
}

// tan(π(x − 1/2)) decays like e^{−2πt} under ẋ = sin(2πx), so the flow is
// closed form on each period cell [m, m + 1).
fn north_south_lift(dt: f64, x: f64) -> f64 {
    let m = x.floor();
    let r = x - m;
    if r == 0.0 {
        return x;
    }
    let w = PI * (r - 0.5);
    let y = (w.sin() * (-TAU * dt).exp()).atan2(w.cos()) / PI;
    m + 0.5 + y
}
