//! Numerical sector check for the chart origins.
//!
//! Seeds on a small ring around the origin are followed forwards and
//! backwards under the chart field rescaled by `1/|v|` (the reduced field
//! with its orientation flipped where `v < 0`). Each seed gets an
//! `(alpha, omega)` pair of fates; the run-length pattern of those pairs on
//! the upper and lower half rings is the observed local portrait.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::compactification::ChartId;
use crate::error::Error;
use crate::infinite::OriginLabel;
use crate::integrator::{Stepper, Tolerances};
use crate::parameter_domain::{require_classifiable, ParameterPoint};
use crate::system::Coeffs;

pub const RAYS: usize = 720;
pub const MIN_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Fate {
    /// Tends to the chart origin.
    Origin,
    /// Leaves the neighbourhood into the finite plane.
    Exit,
    /// Lands on the line at infinity away from the origin.
    Line,
    Unresolved,
}

impl Fate {
    fn code(self) -> char {
        match self {
            Fate::Origin => 'O',
            Fate::Exit => 'X',
            Fate::Line => 'L',
            Fate::Unresolved => '?',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorRun {
    pub alpha: Fate,
    pub omega: Fate,
    pub rays: usize,
    /// Angle of the first ray of the run, in degrees.
    pub start_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub label: OriginLabel,
    pub radius: f64,
    pub upper: Vec<SectorRun>,
    pub lower: Vec<SectorRun>,
}

impl SectorReport {
    /// Compact form, e.g. `XO,XX|LX`: upper half runs, then lower half runs.
    pub fn signature(&self) -> String {
        signature(&self.upper, &self.lower)
    }
}

fn signature(upper: &[SectorRun], lower: &[SectorRun]) -> String {
    let half = |runs: &[SectorRun]| {
        runs.iter()
            .map(|r| format!("{}{}", r.alpha.code(), r.omega.code()))
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{}|{}", half(upper), half(lower))
}

impl fmt::Display for SectorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at r={:e}: {}", self.label, self.radius, self.signature())
    }
}

/// Expected signature of each label, written in the frame of its own chart
/// (`u` horizontal, `v` vertical). Each entry lists the `(alpha, omega)` fate
/// runs counterclockwise from the positive `u`-axis: `O` origin, `X` exit
/// into the plane, `L` landing on the line at infinity.
pub fn expected_signature(label: OriginLabel) -> &'static str {
    use OriginLabel::*;
    match label {
        L1_1 | L2_1 => "XL,XO,XX,LX|LX,OX,OL",
        L1_2 | L2_2 => "XL,XO,LO|LX,OX,XX,XL",
        L1_3 | L2_3 => "LX,XX,XO,XL|OL,OX,LX",
        L1_4 | L2_4 => "LO,XO,XL|XL,XX,OX,LX",
        L1_5 | L2_9 => "XL,XX,LX|LX,XX,XL",
        L1_6 | L2_10 => "LX,XX,XL|XL,XX,LX",
        L1_7 | L2_5 => "XL,XO,LO|LO,XO,XL",
        L1_8 | L2_7 => "LO,XO,XL|XL,XO,LO",
        L2_6 => "OL,OX,LX|LX,OX,OL",
        L2_8 => "LX,OX,OL|OL,OX,LX",
    }
}

fn ring_radius(c: &Coeffs, family: u8) -> f64 {
    // The reduced field has one more singular point on the v-axis.
    let (num, den) = if family == 1 { (c.b2, c.b0) } else { (c.b3, c.c0) };
    let other = if den != 0.0 { (num / den).abs() } else { f64::INFINITY };
    let mut r: f64 = 1e-2;
    if other > 0.0 {
        r = r.min(0.2 * other);
    }
    r
}

/// Ring "radius". Nilpotent origins have sectors tangent to `u ~ v^2`, so
/// there `u` is weighted as a square to spread the sectors over the ring.
#[inline]
fn norm(u: f64, v: f64, nilpotent: bool) -> f64 {
    if nilpotent {
        (u * u + v * v * v * v).sqrt().sqrt()
    } else {
        u.hypot(v)
    }
}

fn ring_point(theta: f64, r: f64, nilpotent: bool) -> [f64; 2] {
    if nilpotent {
        [r * r * theta.cos(), r * theta.sin().signum() * theta.sin().abs().sqrt()]
    } else {
        [r * theta.cos(), r * theta.sin()]
    }
}

fn fate(c: &Coeffs, family: u8, start: [f64; 2], dir: f64, r: f64, nilpotent: bool) -> Fate {
    let mut f = |s: &[f64; 2]| {
        let (du, dv) = if family == 1 { c.reduced1(s[0], s[1]) } else { c.reduced2(s[0], s[1]) };
        let k = dir * s[1].signum();
        [k * du, k * dv]
    };
    let tol = Tolerances { rtol: 1e-9, atol: 1e-12 * r };
    let mut st = Stepper::new(start, 1e-3 * r, tol);
    st.h_min = 1e-30;
    let side = start[1].signum();
    for _ in 0..40_000 {
        let k = f(&st.y);
        let speed = k[0].hypot(k[1]).max(1e-300);
        let h_max = 0.02 * st.y[0].hypot(st.y[1]).max(1e-3 * r) / speed;
        if st.step(&mut f, h_max).is_err() {
            return Fate::Unresolved;
        }
        let [u, v] = st.y;
        let rad = norm(u, v, nilpotent);
        if v * side <= 0.0 || v.abs() < 1e-12 * r {
            return if rad < 0.05 * r { Fate::Origin } else { Fate::Line };
        }
        if rad > 3.0 * r {
            return Fate::Exit;
        }
        if rad < 0.05 * r {
            return Fate::Origin;
        }
    }
    Fate::Unresolved
}

fn runs(pairs: &[(Fate, Fate)], angles: &[f64]) -> Vec<SectorRun> {
    let mut out: Vec<SectorRun> = Vec::new();
    for (i, &(a, o)) in pairs.iter().enumerate() {
        match out.last_mut() {
            Some(r) if r.alpha == a && r.omega == o => r.rays += 1,
            _ => out.push(SectorRun { alpha: a, omega: o, rays: 1, start_deg: angles[i].to_degrees() }),
        }
    }
    // Short runs are noise at sector boundaries; absorb them and re-merge.
    let mut kept: Vec<SectorRun> = Vec::new();
    for r in out.into_iter().filter(|r| r.rays >= MIN_RUN) {
        match kept.last_mut() {
            Some(k) if k.alpha == r.alpha && k.omega == r.omega => k.rays += r.rays,
            _ => kept.push(r),
        }
    }
    kept
}

/// Observes the sector pattern around the origin of `chart` without
/// comparing it to a label.
pub fn observe_origin_sectors(p: &ParameterPoint, chart: ChartId) -> Result<(f64, Vec<SectorRun>, Vec<SectorRun>), Error> {
    require_classifiable(p)?;
    let c = Coeffs::from(p);
    let family = chart.family();
    let mut r = ring_radius(&c, family);
    let nilpotent = if family == 1 { c.b2 == 0.0 } else { c.b3 == 0.0 };
    if nilpotent {
        r = r.sqrt().min(0.1);
    }
    loop {
        let n = RAYS;
        let angles: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * 2.0 * PI / n as f64).collect();
        let pairs: Vec<(Fate, Fate)> = angles
            .iter()
            .map(|&th| {
                let s = ring_point(th, r, nilpotent);
                (fate(&c, family, s, -1.0, r, nilpotent), fate(&c, family, s, 1.0, r, nilpotent))
            })
            .collect();
        let unresolved = pairs.iter().filter(|(a, o)| *a == Fate::Unresolved || *o == Fate::Unresolved).count();
        if unresolved == 0 || r <= 1e-5 {
            let h = n / 2;
            let upper = runs(&pairs[..h], &angles[..h]);
            let lower = runs(&pairs[h..], &angles[h..]);
            return Ok((r, upper, lower));
        }
        r = (r * 0.5).max(1e-5);
    }
}

pub fn verify_origin_sectors(p: &ParameterPoint, chart: ChartId, label: OriginLabel) -> Result<SectorReport, Error> {
    if label.chart().family() != chart.family() {
        return Err(Error::SectorMismatch {
            label: label.to_string(),
            expected: format!("a label of chart {}", label.chart()),
            observed: format!("chart {chart}"),
        });
    }
    let (radius, upper, lower) = observe_origin_sectors(p, chart)?;
    let report = SectorReport { label, radius, upper, lower };
    let observed = report.signature();
    let expected = expected_signature(label);
    if observed != expected {
        return Err(Error::SectorMismatch {
            label: label.to_string(),
            expected: expected.to_string(),
            observed,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correct_labels_verify() {
        let p = ParameterPoint::ints([2, 1, 1, 1, 1]);
        assert!(verify_origin_sectors(&p, ChartId::U1, OriginLabel::L1_2).is_ok());
        assert!(verify_origin_sectors(&p, ChartId::U2, OriginLabel::L2_1).is_ok());
        let q = ParameterPoint::ints([1, 1, 0, 1, 2]);
        assert!(verify_origin_sectors(&q, ChartId::U1, OriginLabel::L1_5).is_ok());
    }

    #[test]
    fn wrong_labels_are_rejected() {
        let p = ParameterPoint::ints([2, 1, 1, 1, 1]);
        let e = verify_origin_sectors(&p, ChartId::U1, OriginLabel::L1_1).unwrap_err();
        assert!(matches!(e, Error::SectorMismatch { .. }));
        let e = verify_origin_sectors(&p, ChartId::U1, OriginLabel::L2_1).unwrap_err();
        assert!(matches!(e, Error::SectorMismatch { .. }));
    }
}
