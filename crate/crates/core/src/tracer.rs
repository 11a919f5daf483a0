//! Orbit tracing on the Poincaré disc and assembly of separatrix skeletons.
//!
//! The finite plane is integrated with the field divided by `1 + y^2 + z^2`;
//! near infinity the chart field divided by `|v|` is used, which is the
//! reduced field times the sign of the chart side.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::compactification::{
    chart_to_disc, chart_to_finite, finite_to_chart, finite_to_disc, switch_chart, ChartId, ChartPoint, DiscPoint,
};
use crate::error::Error;
use crate::finite::{classify_finite, PointId, PointKind, SingularPointReport};
use crate::infinite::{classify_origin_u1, classify_origin_u2};
use crate::integrator::{Stepper, Tolerances};
use crate::parameter_domain::{require_classifiable, ParameterPoint, Quantity};
use crate::scalar::Sign;
use crate::skeleton::{origin_angle, Attachment, Edge, EdgeKind, Node, RegionOrbit, SeparatrixSkeleton};
use crate::system::Coeffs;

pub const FLAG_BUDGET: &str = "tracing_budget_exceeded";
pub const FLAG_DEGENERATE_ORIGIN: &str = "degenerate_nilpotent_origin";
pub const FLAG_UNMATCHED_CONNECTION: &str = "unmatched_connection";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Largest coordinate displacement per step.
    pub max_step: f64,
    /// Arc length budget per orbit, in the disc metric.
    pub max_arc: f64,
    pub max_steps: usize,
    /// `|u|` beyond which a chart hands over to the other family.
    pub handoff_u: f64,
    /// The finite chart is left once `max(|y|,|z|)` exceeds this multiple of
    /// the size of the finite configuration.
    pub finite_box: f64,
    /// Relative seed offset from a singular point.
    pub seed_offset: f64,
    /// Relative capture radius around finite singular points.
    pub capture: f64,
    pub boundary_v: f64,
    /// Boundary angles closer than this are one node.
    pub angle_merge: f64,
    /// Rings of the seed grid used for region orbits.
    pub region_rings: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.02,
            max_arc: 20.0,
            max_steps: 200_000,
            handoff_u: 2.0,
            finite_box: 4.0,
            seed_offset: 1e-6,
            capture: 1e-5,
            boundary_v: 1e-7,
            angle_merge: 1e-3,
            region_rings: 12,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("max_step", self.max_step),
            ("max_arc", self.max_arc),
            ("seed_offset", self.seed_offset),
            ("capture", self.capture),
            ("boundary_v", self.boundary_v),
            ("angle_merge", self.angle_merge),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.handoff_u <= 1.0 {
            return Err(Error::InvalidConfig("handoff_u must exceed 1".into()));
        }
        if self.finite_box <= 2.0 {
            return Err(Error::InvalidConfig("finite_box must exceed 2".into()));
        }
        if self.seed_offset >= self.capture {
            return Err(Error::InvalidConfig("seed_offset must be below the capture radius".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum End {
    Finite(PointId),
    Origin(ChartId),
    /// Landing angle on the boundary circle.
    Boundary(f64),
    /// Budget ran out.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub end: End,
    pub path: Vec<DiscPoint>,
    pub arc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pos {
    Plane(f64, f64),
    Chart(ChartPoint),
}

impl Pos {
    fn disc(self) -> DiscPoint {
        match self {
            Pos::Plane(y, z) => finite_to_disc((y, z)),
            Pos::Chart(cp) => chart_to_disc(cp),
        }
    }

    fn coords(self) -> [f64; 2] {
        match self {
            Pos::Plane(y, z) => [y, z],
            Pos::Chart(cp) => [cp.u, cp.v],
        }
    }

    fn with(self, s: [f64; 2]) -> Pos {
        match self {
            Pos::Plane(..) => Pos::Plane(s[0], s[1]),
            Pos::Chart(cp) => Pos::Chart(ChartPoint { u: s[0], v: s[1], ..cp }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Source {
    Free,
    Finite(PointId),
    Origin(ChartId),
}

/// Orbit follower for one parameter point.
pub struct Tracer<'a> {
    c: Coeffs,
    points: Vec<(PointId, PointKind, (f64, f64))>,
    scale: f64,
    cfg: &'a IntegratorConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Approach {
    Converges,
    Lands,
    Passes,
}

const ORIGIN_BOX: f64 = 1e-3;
const ORIGIN_DEEP: f64 = 1e-6;
const ORIGIN_DWELL: usize = 3000;

impl<'a> Tracer<'a> {
    pub fn new(c: Coeffs, finite: &[SingularPointReport], cfg: &'a IntegratorConfig) -> Self {
        let points: Vec<_> = finite.iter().map(|r| (r.id, r.kind, r.location)).collect();
        let scale = points.iter().map(|p| p.2 .0.hypot(p.2 .1)).fold(1.0, f64::max);
        Tracer { c, points, scale, cfg }
    }

    fn rhs(&self, pos: Pos, s: &[f64; 2], dir: f64) -> [f64; 2] {
        match pos {
            Pos::Plane(..) => {
                let (dy, dz) = self.c.finite(s[0], s[1]);
                let k = dir / (1.0 + s[0] * s[0] + s[1] * s[1]);
                [k * dy, k * dz]
            }
            Pos::Chart(cp) => {
                let (du, dv) = if cp.chart.family() == 1 {
                    self.c.reduced1(s[0], s[1])
                } else {
                    self.c.reduced2(s[0], s[1])
                };
                let k = dir * cp.chart.side();
                [k * du, k * dv]
            }
        }
    }

    fn capture_radius(&self, kind: PointKind, loc: (f64, f64)) -> f64 {
        // Orbits reach a saddle-node along its centre direction only algebraically.
        let base = if kind == PointKind::SaddleNode { 1e-3 } else { self.cfg.capture };
        base * loc.0.hypot(loc.1).max(1.0)
    }

    /// Moves the position into the chart best suited to it.
    fn rechart(&self, pos: Pos) -> Pos {
        let outer = self.cfg.finite_box * self.scale;
        match pos {
            Pos::Plane(y, z) if y.abs().max(z.abs()) > outer => {
                let chart = if y.abs() >= z.abs() {
                    ChartId::from_parts(1, y)
                } else {
                    ChartId::from_parts(2, z)
                };
                finite_to_chart((y, z), chart).map_or(pos, Pos::Chart)
            }
            Pos::Chart(cp) if cp.u.abs() > self.cfg.handoff_u => Pos::Chart(switch_chart(cp)),
            Pos::Chart(cp) => match chart_to_finite(cp) {
                Some((y, z)) if cp.v * cp.chart.side() > 0.0 && y.abs().max(z.abs()) < 0.5 * outer => Pos::Plane(y, z),
                _ => pos,
            },
            _ => pos,
        }
    }

    /// Local fate of an orbit inside the origin box. At a semi-hyperbolic
    /// origin the strong flow first pulls the orbit onto the center manifold
    /// at about the same `u`; it can only converge if that half of the center
    /// manifold lies inside the disc and flows inward.
    fn near_origin(&self, cp: ChartPoint, dir: f64) -> Approach {
        let c = &self.c;
        let (strong, g) = if cp.chart.family() == 1 { (c.b2, c.c0 - c.b0) } else { (c.b3, c.b0 - c.c0) };
        if strong == 0.0 {
            return Approach::Converges;
        }
        let side = cp.chart.side();
        let s = dir * side;
        if s * strong <= 0.0 {
            return Approach::Passes;
        }
        if cp.u == 0.0 {
            return Approach::Converges;
        }
        let v_star = -c.b1 * cp.u / strong;
        if v_star * side <= 0.0 {
            return Approach::Lands;
        }
        if -s * g * c.b1 / strong * cp.u.signum() < 0.0 {
            Approach::Converges
        } else {
            Approach::Passes
        }
    }

    /// Orbits that really tend to a chart origin are caught by the origin box
    /// before they cross `v = 0`; a crossing close to the origin is a regular
    /// point of the boundary unless it is essentially at the origin.
    fn landing(&self, chart: ChartId, u: f64, dir: f64) -> End {
        let cp = ChartPoint { chart, u, v: 0.0 };
        if u.abs() < ORIGIN_DEEP && self.near_origin(cp, dir) != Approach::Lands {
            return End::Origin(chart);
        }
        End::Boundary(chart_to_disc(cp).angle())
    }

    fn trace(&self, start: Pos, dir: f64, source: Source) -> Trace {
        let cfg = self.cfg;
        let mut pos = self.rechart(start);
        let tol = Tolerances { rtol: cfg.rtol, atol: cfg.atol };
        let mut st = Stepper::new(pos.coords(), 1e-4, tol);
        st.h_min = 1e-18;
        let mut path = vec![pos.disc()];
        let mut last = path[0];
        let mut arc = 0.0;
        let mut armed: Vec<bool> = self.points.iter().map(|p| source != Source::Finite(p.0)).collect();
        let mut origin_armed = !matches!(source, Source::Origin(_));
        let mut dwell = 0usize;

        let finish = |mut path: Vec<DiscPoint>, end: End, arc: f64, at: Option<DiscPoint>| {
            if let Some(d) = at {
                path.push(d);
            }
            Trace { end, path, arc }
        };

        for _ in 0..cfg.max_steps {
            let moved = self.rechart(pos);
            if moved != pos {
                pos = moved;
                st.reset(pos.coords());
            }
            let prev = st.y;
            let k = self.rhs(pos, &prev, dir);
            let speed = k[0].hypot(k[1]).max(1e-300);
            let reach = match pos {
                Pos::Plane(y, z) => cfg.max_step * (1.0 + y.hypot(z)),
                Pos::Chart(_) => cfg.max_step,
            };
            let mut f = |s: &[f64; 2]| self.rhs(pos, s, dir);
            if st.step(&mut f, reach / speed).is_err() {
                return finish(path, End::Unresolved, arc, None);
            }
            pos = pos.with(st.y);
            let d = pos.disc();
            arc += d.dist(&last);
            last = d;
            if path.last().is_some_and(|q| q.dist(&d) > 2e-4) {
                path.push(d);
            }

            match pos {
                Pos::Plane(y, z) => {
                    for (i, &(id, kind, loc)) in self.points.iter().enumerate() {
                        let r = self.capture_radius(kind, loc);
                        let dist = (y - loc.0).hypot(z - loc.1);
                        if !armed[i] {
                            armed[i] = dist > 10.0 * r;
                        } else if dist < r {
                            return finish(path, End::Finite(id), arc, Some(finite_to_disc(loc)));
                        }
                    }
                }
                Pos::Chart(cp) => {
                    let side = cp.chart.side();
                    if cp.v * side <= cfg.boundary_v {
                        let u = if cp.v * side < 0.0 {
                            let t = prev[1] / (prev[1] - cp.v);
                            prev[0] + t * (cp.u - prev[0])
                        } else {
                            cp.u
                        };
                        let end = self.landing(cp.chart, u, dir);
                        if matches!(end, End::Origin(ch) if !origin_armed && source == Source::Origin(ch)) {
                            return finish(path, End::Unresolved, arc, None);
                        }
                        let at = match end {
                            End::Origin(ch) => origin_disc(ch),
                            _ => chart_to_disc(ChartPoint { u, v: 0.0, ..cp }),
                        };
                        return finish(path, end, arc, Some(at));
                    }
                    let m = cp.u.abs().max(cp.v.abs());
                    if !origin_armed {
                        origin_armed = m > 10.0 * ORIGIN_BOX;
                    } else if m < ORIGIN_BOX {
                        match self.near_origin(cp, dir) {
                            Approach::Converges => dwell += 1,
                            Approach::Passes => {
                                dwell = 0;
                                continue;
                            }
                            Approach::Lands if m < ORIGIN_DEEP => {
                                let at = chart_to_disc(ChartPoint { v: 0.0, ..cp });
                                return finish(path, End::Boundary(at.angle()), arc, Some(at));
                            }
                            Approach::Lands => {
                                dwell = 0;
                                continue;
                            }
                        }
                        if m < ORIGIN_DEEP || dwell > ORIGIN_DWELL {
                            let ch = cp.chart;
                            return finish(path, End::Origin(ch), arc, Some(origin_disc(ch)));
                        }
                    } else {
                        dwell = 0;
                    }
                }
            }
            if arc > cfg.max_arc {
                break;
            }
        }
        finish(path, End::Unresolved, arc, None)
    }

    /// Follows the orbit through a finite point in both time directions.
    pub fn trace_both(&self, at: (f64, f64)) -> (Trace, Trace) {
        let back = self.trace(Pos::Plane(at.0, at.1), -1.0, Source::Free);
        let fwd = self.trace(Pos::Plane(at.0, at.1), 1.0, Source::Free);
        (back, fwd)
    }
}

fn origin_disc(ch: ChartId) -> DiscPoint {
    let a = origin_angle(ch);
    DiscPoint { x: a.cos(), y: a.sin() }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn joined(back: &Trace, fwd: &Trace) -> Vec<DiscPoint> {
    let mut path: Vec<DiscPoint> = back.path.iter().rev().copied().collect();
    path.extend(fwd.path.iter().skip(1));
    path
}

struct Builder {
    sk: SeparatrixSkeleton,
    merge: f64,
}

impl Builder {
    fn node(&mut self, end: End) -> Option<usize> {
        match end {
            End::Finite(id) => self.sk.finite(id),
            End::Origin(ch) => self.sk.origin(ch),
            End::Boundary(a) => {
                let hit = self
                    .sk
                    .nodes
                    .iter()
                    .position(|n| matches!(n, Node::Boundary { angle } if angle_gap(*angle, a) < self.merge));
                Some(hit.unwrap_or_else(|| self.sk.add_node(Node::Boundary { angle: a })))
            }
            End::Unresolved => None,
        }
    }

    fn flag(&mut self, f: &str) {
        if !self.sk.flags.iter().any(|x| x == f) {
            self.sk.flags.push(f.to_string());
        }
    }
}

/// Attachment of an axis edge at a saddle-type finite point.
fn axis_attachment(
    report: &SingularPointReport,
    axis_family: u8,
    leaving: bool,
    c: &Coeffs,
) -> Option<Attachment> {
    match report.kind {
        PointKind::Saddle => Some(Attachment::SaddleType),
        PointKind::SaddleNode => {
            // P0 merged with P1 has its hyperbolic direction on the y-axis.
            let (hyp_family, lambda) =
                if report.merged_with == Some(PointId::P1) { (1, c.b0) } else { (2, c.c0) };
            if axis_family == hyp_family {
                return Some(Attachment::SaddleType);
            }
            let parabolic = (leaving && lambda > 0.0) || (!leaving && lambda < 0.0);
            Some(if parabolic { Attachment::Parabolic } else { Attachment::SaddleType })
        }
        _ => None,
    }
}

/// Whether the centre curve of a chart origin can be followed away from it
/// with contracting errors; these are the origin separatrices we trace.
fn origin_candidate(p: &ParameterPoint, c: &Coeffs, ch: ChartId) -> Option<Result<(Pos, f64), ()>> {
    let s = p.signs();
    let fam = ch.family();
    let side = ch.side();
    let nilpotent = if fam == 1 { s.b2.is_zero() } else { s.b3.is_zero() };
    let arriving = if fam == 1 { s.c0_minus_b0.is_negative() } else { s.c0_minus_b0.is_positive() };
    let attracting = if nilpotent { p.sign(Quantity::B0PlusC0).is_positive() } else { side > 0.0 };
    if arriving == attracting {
        return None;
    }
    let (strong, lead) = if fam == 1 { (c.b2, c.b0) } else { (c.b3, c.c0) };
    let mut v0: f64 = 1e-3;
    if strong != 0.0 && lead != 0.0 {
        v0 = v0.min(0.01 * (strong / lead).abs());
    }
    let v = side * v0;
    let u = if nilpotent {
        if p.sign(Quantity::B0PlusC0) == Sign::Zero {
            return Some(Err(()));
        }
        -(c.b0 + c.c0) / (2.0 * c.b1) * v * v
    } else {
        -strong / c.b1 * v
    };
    let dir = if arriving { -1.0 } else { 1.0 };
    Some(Ok((Pos::Chart(ChartPoint { chart: ch, u, v }), dir)))
}

pub fn trace_separatrices(p: &ParameterPoint, cfg: &IntegratorConfig) -> Result<SeparatrixSkeleton, Error> {
    cfg.validate()?;
    require_classifiable(p)?;
    let reports = classify_finite(p)?;
    let o1 = classify_origin_u1(p)?.label;
    let o2 = classify_origin_u2(p)?.label;
    let c = Coeffs::from(p);
    let tr = Tracer::new(c, &reports, cfg);
    let mut b = Builder { sk: SeparatrixSkeleton::default(), merge: cfg.angle_merge };
    for r in &reports {
        b.sk.add_node(Node::Finite { id: r.id, kind: r.kind, location: r.location });
    }
    for ch in [ChartId::U1, ChartId::U2, ChartId::V1, ChartId::V2] {
        let label = if ch.family() == 1 { o1 } else { o2 };
        b.sk.add_node(Node::Origin { chart: ch, label: Some(label) });
    }
    let report_of = |id: PointId| reports.iter().find(|r| r.id == id);

    // Axes: one edge per interval between consecutive singular points.
    for fam in [1u8, 2] {
        let mut on_axis: Vec<(f64, PointId)> = reports
            .iter()
            .filter_map(|r| {
                let (along, across) = if fam == 1 { r.location } else { (r.location.1, r.location.0) };
                (across == 0.0).then_some((along, r.id))
            })
            .collect();
        on_axis.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut seeds = Vec::new();
        let first = on_axis[0].0;
        let lastx = on_axis[on_axis.len() - 1].0;
        seeds.push(first - first.abs().max(1.0));
        for w in on_axis.windows(2) {
            seeds.push(0.5 * (w[0].0 + w[1].0));
        }
        seeds.push(lastx + lastx.abs().max(1.0));
        for s in seeds {
            let at = if fam == 1 { (s, 0.0) } else { (0.0, s) };
            let (back, fwd) = tr.trace_both(at);
            let path = joined(&back, &fwd);
            let (from, to) = (b.node(back.end), b.node(fwd.end));
            let (Some(from), Some(to)) = (from, to) else {
                b.flag(FLAG_BUDGET);
                continue;
            };
            let mut e = Edge::new(from, to, EdgeKind::Axis);
            e.path = path;
            if let End::Finite(id) = back.end {
                e.at_from = report_of(id).and_then(|r| axis_attachment(r, fam, true, &c));
            }
            if let End::Finite(id) = fwd.end {
                e.at_to = report_of(id).and_then(|r| axis_attachment(r, fam, false, &c));
            }
            b.sk.edges.push(e);
        }
    }

    let origin_traceable = |ch: ChartId| matches!(origin_candidate(p, &c, ch), Some(Ok(_)));

    // Off-axis branches of finite saddles.
    for r in reports.iter().filter(|r| r.kind == PointKind::Saddle && r.id != PointId::P0) {
        let (y, z) = r.location;
        let (e, lambda, stratum, fam) = match r.id {
            PointId::P1 => ((c.b0, z * (c.b1 * z + c.b2)), c.b0 - c.c0, Quantity::ConnectionC0, 1u8),
            _ => ((y * (c.b1 * y + c.b3), c.c0), c.c0 - c.b0, Quantity::ConnectionB0, 2u8),
        };
        let me = b.sk.finite(r.id).expect("finite node");
        if p.sign(stratum) == Sign::Zero {
            // The branch lies on an invariant straight line through the saddle.
            for side in [1.0, -1.0] {
                let ch = ChartId::from_parts(fam, side);
                let origin = b.sk.origin(ch).expect("origin node");
                let mut path: Vec<DiscPoint> = (0..=320)
                    .map(|k| {
                        let t = side * 10f64.powf(k as f64 / 20.0 - 6.0);
                        finite_to_disc(if fam == 1 { (t, z) } else { (y, t) })
                    })
                    .collect();
                path.insert(0, finite_to_disc(r.location));
                path.push(origin_disc(ch));
                let leaving = lambda > 0.0;
                let mut edge = if leaving {
                    Edge::new(me, origin, EdgeKind::InvariantLine)
                } else {
                    path.reverse();
                    Edge::new(origin, me, EdgeKind::InvariantLine)
                };
                if leaving {
                    edge.at_from = Some(Attachment::SaddleType);
                } else {
                    edge.at_to = Some(Attachment::SaddleType);
                }
                edge.connection = origin_traceable(ch);
                edge.path = path;
                b.sk.edges.push(edge);
            }
            continue;
        }
        let n = e.0.hypot(e.1);
        let scale = cfg.seed_offset * y.hypot(z).max(1.0);
        let dir = lambda.signum();
        for sgn in [1.0, -1.0] {
            let start = Pos::Plane(y + sgn * scale * e.0 / n, z + sgn * scale * e.1 / n);
            let t = tr.trace(start, dir, Source::Finite(r.id));
            let Some(other) = b.node(t.end) else {
                b.flag(FLAG_BUDGET);
                let mut edge = Edge::new(me, me, EdgeKind::SaddleBranch);
                edge.at_from = Some(Attachment::SaddleType);
                edge.unresolved = true;
                edge.path = t.path;
                b.sk.edges.push(edge);
                continue;
            };
            let mut path = t.path;
            path.insert(0, finite_to_disc(r.location));
            let mut edge = if dir > 0.0 {
                let mut e = Edge::new(me, other, EdgeKind::SaddleBranch);
                e.at_from = Some(Attachment::SaddleType);
                e
            } else {
                path.reverse();
                let mut e = Edge::new(other, me, EdgeKind::SaddleBranch);
                e.at_to = Some(Attachment::SaddleType);
                e
            };
            edge.path = path;
            b.sk.edges.push(edge);
        }
    }

    // Separatrices of the chart origins.
    for ch in [ChartId::U1, ChartId::U2, ChartId::V1, ChartId::V2] {
        let (start, dir) = match origin_candidate(p, &c, ch) {
            None => continue,
            Some(Err(())) => {
                b.flag(FLAG_DEGENERATE_ORIGIN);
                continue;
            }
            Some(Ok(s)) => s,
        };
        let origin = b.sk.origin(ch).expect("origin node");
        let t = tr.trace(start, dir, Source::Origin(ch));
        let Some(other) = b.node(t.end) else {
            b.flag(FLAG_BUDGET);
            let mut edge = Edge::new(origin, origin, EdgeKind::OriginSeparatrix);
            edge.unresolved = true;
            edge.path = t.path;
            b.sk.edges.push(edge);
            continue;
        };
        let mut path = t.path;
        path.insert(0, origin_disc(ch));
        match b.sk.nodes[other].finite_kind() {
            Some(PointKind::Saddle) => {
                // Same orbit as one of the saddle's branches.
                let twin = b.sk.edges.iter_mut().find(|e| {
                    matches!(e.kind, EdgeKind::SaddleBranch | EdgeKind::InvariantLine)
                        && ((e.from == other && e.to == origin) || (e.to == other && e.from == origin))
                });
                match twin {
                    Some(e) => e.connection = true,
                    None => b.flag(FLAG_UNMATCHED_CONNECTION),
                }
                continue;
            }
            _ => {}
        }
        let parabolic = b.sk.nodes[other].finite_kind() == Some(PointKind::SaddleNode);
        let mut edge = if dir > 0.0 {
            let mut e = Edge::new(origin, other, EdgeKind::OriginSeparatrix);
            e.at_to = parabolic.then_some(Attachment::Parabolic);
            e
        } else {
            path.reverse();
            let mut e = Edge::new(other, origin, EdgeKind::OriginSeparatrix);
            e.at_from = parabolic.then_some(Attachment::Parabolic);
            e
        };
        edge.path = path;
        b.sk.edges.push(edge);
    }

    add_region_orbits(&mut b, &tr, cfg);
    if b.sk.edges.iter().any(|e| e.unresolved) {
        b.flag(FLAG_BUDGET);
    }
    Ok(b.sk)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Point(usize),
    Arc(usize),
}

fn add_region_orbits(b: &mut Builder, tr: &Tracer<'_>, cfg: &IntegratorConfig) {
    let n = cfg.region_rings.max(1);
    let mut seeds = Vec::new();
    for k in 0..n {
        let r = 0.97 * (k as f64 + 0.5) / n as f64;
        let m = 8 * (k + 1);
        for j in 0..m {
            let a = (j as f64 + 0.5) * TAU / m as f64 + 0.0123;
            seeds.push(DiscPoint { x: r * a.cos(), y: r * a.sin() });
        }
    }
    let mut starts: Vec<(f64, f64)> = seeds
        .iter()
        .map(|d| {
            let w = (1.0 - d.x * d.x - d.y * d.y).sqrt();
            (d.x / w, d.y / w)
        })
        .collect();
    // Families squeezed between nearby singular points are easily missed by
    // the grid, so every point also gets a small ring of its own.
    for &(_, _, (y, z)) in &tr.points {
        let gap = tr
            .points
            .iter()
            .map(|q| (q.2 .0 - y).hypot(q.2 .1 - z))
            .filter(|&d| d > 0.0)
            .fold(1.0, f64::min);
        let r = 0.3 * gap;
        for j in 0..16 {
            let a = (j as f64 + 0.5) * TAU / 16.0 + 0.0123;
            starts.push((y + r * a.cos(), z + r * a.sin()));
        }
    }
    let traces: Vec<(Trace, Trace)> = starts.par_iter().map(|&s| tr.trace_both(s)).collect();

    // Boundary arcs are cut at the chart origins and at every separatrix landing.
    let mut cuts: Vec<f64> = [0.0, 0.5 * PI, PI, 1.5 * PI].to_vec();
    for n in &b.sk.nodes {
        if let Node::Boundary { angle } = n {
            cuts.push(angle.rem_euclid(TAU));
        }
    }
    cuts.sort_by(f64::total_cmp);
    let key = |b: &Builder, end: End| -> Option<Key> {
        match end {
            End::Finite(id) => b.sk.finite(id).map(Key::Point),
            End::Origin(ch) => b.sk.origin(ch).map(Key::Point),
            End::Boundary(a) => {
                let a = a.rem_euclid(TAU);
                Some(Key::Arc(cuts.iter().filter(|&&c| c <= a).count() % cuts.len()))
            }
            End::Unresolved => None,
        }
    };
    let mut groups: BTreeMap<(Key, Key), Vec<usize>> = BTreeMap::new();
    for (i, (back, fwd)) in traces.iter().enumerate() {
        if let (Some(a), Some(o)) = (key(b, back.end), key(b, fwd.end)) {
            groups.entry((a, o)).or_default().push(i);
        }
    }
    for ((a, o), members) in groups {
        let picks: Vec<usize> = if matches!(a, Key::Arc(_)) || matches!(o, Key::Arc(_)) {
            let mut m = members.clone();
            let land = |i: usize| match (traces[i].0.end, traces[i].1.end) {
                (End::Boundary(x), _) | (_, End::Boundary(x)) => x.rem_euclid(TAU),
                _ => 0.0,
            };
            m.sort_by(|&x, &y| land(x).total_cmp(&land(y)).then(x.cmp(&y)));
            let mut p = vec![m[0], m[m.len() / 2], m[m.len() - 1]];
            p.dedup();
            p
        } else {
            vec![members[0]]
        };
        for i in picks {
            let (back, fwd) = &traces[i];
            let (Some(alpha), Some(omega)) = (b.node(back.end), b.node(fwd.end)) else { continue };
            b.sk.regions.push(RegionOrbit { alpha, omega, path: joined(back, fwd) });
        }
    }
}

/// Endpoint of the off-axis branch of the saddle `id` that starts on the
/// side where the branch coordinate (`y` for P1, `z` for P2) decreases.
pub(crate) fn follow_lower_branch(p: &ParameterPoint, cfg: &IntegratorConfig, id: PointId) -> Result<Trace, Error> {
    cfg.validate()?;
    let reports = classify_finite(p)?;
    let r = reports
        .iter()
        .find(|r| r.id == id && r.kind == PointKind::Saddle)
        .ok_or_else(|| Error::Unclassifiable(format!("{id} is not a saddle at {p}")))?;
    let c = Coeffs::from(p);
    let (y, z) = r.location;
    let (e, lambda) = match id {
        PointId::P1 => ((c.b0, z * (c.b1 * z + c.b2)), c.b0 - c.c0),
        _ => ((c.c0, y * (c.b1 * y + c.b3)), c.c0 - c.b0),
    };
    let n = e.0.hypot(e.1);
    let k = -cfg.seed_offset * y.hypot(z).max(1.0) / n;
    let start = match id {
        PointId::P1 => Pos::Plane(y + k * e.0, z + k * e.1),
        _ => Pos::Plane(y + k * e.1, z + k * e.0),
    };
    let tr = Tracer::new(c, &reports, cfg);
    Ok(tr.trace(start, lambda.signum(), Source::Finite(id)))
}

/// Endpoint of the traced separatrix of a chart origin, if it has one.
pub(crate) fn follow_origin_separatrix(
    p: &ParameterPoint,
    cfg: &IntegratorConfig,
    ch: ChartId,
) -> Result<Option<Trace>, Error> {
    cfg.validate()?;
    let reports = classify_finite(p)?;
    let c = Coeffs::from(p);
    let Some(Ok((start, dir))) = origin_candidate(p, &c, ch) else { return Ok(None) };
    let tr = Tracer::new(c, &reports, cfg);
    Ok(Some(tr.trace(start, dir, Source::Origin(ch))))
}
