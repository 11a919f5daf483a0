//! Charts of the compactified plane and the disc projection.
//!
//! Chart 1 uses `u = z/y, v = 1/y`, chart 2 uses `u = y/z, v = 1/z`. The U
//! charts cover `y > 0` (resp. `z > 0`) with `v >= 0`; the V charts use the
//! same formulas on the opposite half-plane, so there `v <= 0`. The degree is
//! odd, hence the V-chart fields coincide with the U-chart fields.

use std::fmt;

use serde::Serialize;

use crate::error::Error;
use crate::parameter_domain::ParameterPoint;
use crate::system::Coeffs;

pub const DEGREE: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ChartId {
    U1,
    U2,
    V1,
    V2,
}

impl ChartId {
    /// 1 for `U1`/`V1`, 2 for `U2`/`V2`.
    pub fn family(self) -> u8 {
        match self {
            ChartId::U1 | ChartId::V1 => 1,
            ChartId::U2 | ChartId::V2 => 2,
        }
    }

    /// Sign of `v` inside the plane for this chart.
    pub fn side(self) -> f64 {
        match self {
            ChartId::U1 | ChartId::U2 => 1.0,
            ChartId::V1 | ChartId::V2 => -1.0,
        }
    }

    pub fn from_parts(family: u8, side: f64) -> ChartId {
        match (family, side >= 0.0) {
            (1, true) => ChartId::U1,
            (1, false) => ChartId::V1,
            (_, true) => ChartId::U2,
            (_, false) => ChartId::V2,
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub u: f64,
    pub v: f64,
}

/// Orthogonal projection of the upper hemisphere; `x` follows `y`, `y` follows `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscPoint {
    pub x: f64,
    pub y: f64,
}

impl DiscPoint {
    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dist(&self, o: &DiscPoint) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

pub fn field_u1(p: &ParameterPoint, (u, v): (f64, f64)) -> (f64, f64) {
    Coeffs::from(p).chart1(u, v)
}

pub fn field_u2(p: &ParameterPoint, (u, v): (f64, f64)) -> (f64, f64) {
    Coeffs::from(p).chart2(u, v)
}

pub fn reduced_field_u1(p: &ParameterPoint, (u, v): (f64, f64)) -> (f64, f64) {
    Coeffs::from(p).reduced1(u, v)
}

pub fn reduced_field_u2(p: &ParameterPoint, (u, v): (f64, f64)) -> (f64, f64) {
    Coeffs::from(p).reduced2(u, v)
}

/// Monomial `coef * u^i * v^j` of a chart field component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub i: u32,
    pub j: u32,
    pub coef: f64,
}

/// Coefficients of the chart field of the given family as `(u', v')`.
pub fn chart_terms(p: &ParameterPoint, family: u8) -> [Vec<Term>; 2] {
    let c = Coeffs::from(p);
    // Chart 2 is chart 1 with the roles of (y, b0, b2) and (z, c0, b3) exchanged.
    let (own, other, along, across) = if family == 1 { (c.b0, c.c0, c.b2, c.b3) } else { (c.c0, c.b0, c.b3, c.b2) };
    let t = |i, j, coef| Term { i, j, coef };
    [
        vec![t(1, 2, other - own)],
        vec![t(0, 3, -own), t(1, 1, -c.b1), t(0, 2, -along), t(1, 2, -across)],
    ]
}

pub fn eval_terms(terms: &[Term], (u, v): (f64, f64)) -> f64 {
    terms.iter().map(|t| t.coef * u.powi(t.i as i32) * v.powi(t.j as i32)).sum()
}

/// Compactified field of the given chart.
pub fn field(p: &ParameterPoint, chart: ChartId, at: (f64, f64)) -> (f64, f64) {
    match chart.family() {
        1 => field_u1(p, at),
        _ => field_u2(p, at),
    }
}

pub fn finite_to_disc((y, z): (f64, f64)) -> DiscPoint {
    let n = (1.0 + y * y + z * z).sqrt();
    DiscPoint { x: y / n, y: z / n }
}

pub fn disc_to_finite(dp: DiscPoint) -> Option<(f64, f64)> {
    let w2 = 1.0 - dp.x * dp.x - dp.y * dp.y;
    if w2 <= 0.0 {
        return None;
    }
    let w = w2.sqrt();
    Some((dp.x / w, dp.y / w))
}

pub fn chart_to_disc(cp: ChartPoint) -> DiscPoint {
    let s = cp.chart.side();
    let n = (cp.v * cp.v + 1.0 + cp.u * cp.u).sqrt();
    match cp.chart.family() {
        1 => DiscPoint { x: s / n, y: s * cp.u / n },
        _ => DiscPoint { x: s * cp.u / n, y: s / n },
    }
}

pub fn disc_to_chart(dp: DiscPoint, chart: ChartId) -> Result<ChartPoint, Error> {
    let r2 = dp.x * dp.x + dp.y * dp.y;
    let lead = if chart.family() == 1 { dp.x } else { dp.y };
    let other = if chart.family() == 1 { dp.y } else { dp.x };
    if r2 > 1.0 + 1e-12 || lead * chart.side() <= 0.0 {
        return Err(Error::OutOfChart { chart: chart.to_string(), x: dp.x, y: dp.y });
    }
    let w = (1.0 - r2).max(0.0).sqrt();
    Ok(ChartPoint { chart, u: other / lead, v: w / lead })
}

/// Chart coordinates of a finite point, if the chart covers it.
pub fn finite_to_chart((y, z): (f64, f64), chart: ChartId) -> Option<ChartPoint> {
    let lead = if chart.family() == 1 { y } else { z };
    let other = if chart.family() == 1 { z } else { y };
    if lead * chart.side() <= 0.0 {
        return None;
    }
    Some(ChartPoint { chart, u: other / lead, v: 1.0 / lead })
}

pub fn chart_to_finite(cp: ChartPoint) -> Option<(f64, f64)> {
    if cp.v == 0.0 {
        return None;
    }
    let lead = 1.0 / cp.v;
    let other = cp.u / cp.v;
    Some(if cp.chart.family() == 1 { (lead, other) } else { (other, lead) })
}

/// Moves a point from chart family 1 to 2 or back; requires `u != 0`.
/// The map `(u, v) -> (1/u, v/u)` is its own inverse.
pub fn switch_chart(cp: ChartPoint) -> ChartPoint {
    let (u, v) = (1.0 / cp.u, cp.v / cp.u);
    let family = 3 - cp.chart.family();
    // The lead coordinate of the new chart has the sign of u times the old side.
    let side = cp.chart.side() * cp.u.signum();
    ChartPoint { chart: ChartId::from_parts(family, side), u, v }
}
