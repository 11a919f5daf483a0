//! Separatrix skeletons and the invariants computed from them.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::compactification::{finite_to_disc, ChartId, DiscPoint};
use crate::error::Error;
use crate::finite::{PointId, PointKind};
use crate::infinite::OriginLabel;
use crate::parameter_domain::SymmetryTransform;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Node {
    Finite { id: PointId, kind: PointKind, location: (f64, f64) },
    /// Origin of a chart at infinity.
    Origin { chart: ChartId, label: Option<OriginLabel> },
    /// Point of the normally hyperbolic part of the boundary circle.
    Boundary { angle: f64 },
}

impl Node {
    pub fn is_finite(&self) -> bool {
        matches!(self, Node::Finite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite_kind(&self) -> Option<PointKind> {
        match self {
            Node::Finite { kind, .. } => Some(*kind),
            _ => None,
        }
    }

    pub fn disc(&self) -> DiscPoint {
        match self {
            Node::Finite { location, .. } => finite_to_disc(*location),
            Node::Origin { chart, .. } => {
                let a = origin_angle(*chart);
                DiscPoint { x: a.cos(), y: a.sin() }
            }
            Node::Boundary { angle } => DiscPoint { x: angle.cos(), y: angle.sin() },
        }
    }
}

pub fn origin_angle(chart: ChartId) -> f64 {
    match chart {
        ChartId::U1 => 0.0,
        ChartId::U2 => FRAC_PI_2,
        ChartId::V1 => std::f64::consts::PI,
        ChartId::V2 => -FRAC_PI_2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    /// Piece of a coordinate axis.
    Axis,
    /// Piece of another invariant straight line.
    InvariantLine,
    /// Off-axis branch of a finite saddle.
    SaddleBranch,
    /// Separatrix of a chart origin.
    OriginSeparatrix,
}

/// How an edge sits at a finite point of saddle type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Attachment {
    /// Separatrix of a saddle, or a separatrix bounding the hyperbolic
    /// sectors of a saddle-node.
    SaddleType,
    /// Orbit in the parabolic sector of a saddle-node.
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    pub at_from: Option<Attachment>,
    pub at_to: Option<Attachment>,
    /// The edge reaches a chart origin along one of that origin's separatrices.
    pub connection: bool,
    pub path: Vec<DiscPoint>,
    /// Tracing ran out of budget before the endpoint was resolved.
    pub unresolved: bool,
}

impl Edge {
    pub fn new(from: usize, to: usize, kind: EdgeKind) -> Edge {
        Edge { from, to, kind, at_from: None, at_to: None, connection: false, path: Vec::new(), unresolved: false }
    }

    fn ends(&self) -> [(usize, Option<Attachment>, usize); 2] {
        [(self.from, self.at_from, self.to), (self.to, self.at_to, self.from)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionOrbit {
    pub alpha: usize,
    pub omega: usize,
    pub path: Vec<DiscPoint>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SeparatrixSkeleton {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub regions: Vec<RegionOrbit>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantVector {
    pub i1: u32,
    pub i2: i32,
    pub i3: Option<u32>,
    pub i4: Option<u32>,
    pub i5: Option<u32>,
    pub i6: Option<u32>,
}

impl InvariantVector {
    pub fn as_json(&self) -> serde_json::Value {
        serde_json::json!([self.i1, self.i2, self.i3, self.i4, self.i5, self.i6])
    }
}

impl SeparatrixSkeleton {
    pub fn add_node(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    pub fn finite(&self, id: PointId) -> Option<usize> {
        self.nodes.iter().position(|n| matches!(n, Node::Finite { id: i, .. } if *i == id))
    }

    pub fn origin(&self, chart: ChartId) -> Option<usize> {
        self.nodes.iter().position(|n| matches!(n, Node::Origin { chart: c, .. } if *c == chart))
    }

    /// Checks endpoint validity and the degree of saddle-type points.
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.nodes.len();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from >= n || e.to >= n {
                return Err(Error::MalformedSkeleton(format!("edge {i} has a dangling endpoint")));
            }
            if e.from == e.to && !e.unresolved {
                return Err(Error::MalformedSkeleton(format!("edge {i} is a closed orbit")));
            }
        }
        for r in &self.regions {
            if r.alpha >= n || r.omega >= n {
                return Err(Error::MalformedSkeleton("region orbit has a dangling endpoint".into()));
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            let want = match node.finite_kind() {
                Some(PointKind::Saddle) => 4,
                Some(PointKind::SaddleNode) => 3,
                _ => continue,
            };
            let have = self
                .edges
                .iter()
                .flat_map(|e| e.ends())
                .filter(|(a, att, _)| *a == i && *att == Some(Attachment::SaddleType))
                .count();
            if have != want {
                return Err(Error::MalformedSkeleton(format!(
                    "finite point {i} has {have} separatrices, expected {want}"
                )));
            }
        }
        Ok(())
    }
}

/// Invariants of a skeleton.
///
/// * `I1` finite singular points, `I2` sum of their indices.
/// * `I3` separatrices of saddle-type finite points ending at a finite node.
/// * `I4` separatrices of saddle-type finite points reaching a chart origin
///   along one of its separatrices (axis pieces always do).
/// * `I5` chart origins that receive (or emit) a whole family of orbits
///   from (or to) a single finite point, read off the region orbits.
/// * `I6` orbits in the parabolic sector of a saddle-node that are
///   separatrices ending at infinity.
pub fn compute_invariants(s: &SeparatrixSkeleton) -> Result<InvariantVector, Error> {
    s.validate()?;
    let finite: Vec<usize> = (0..s.nodes.len()).filter(|&i| s.nodes[i].is_finite()).collect();
    let i1 = finite.len() as u32;
    let i2 = finite.iter().map(|&i| s.nodes[i].finite_kind().map_or(0, PointKind::index)).sum();

    let mut i3 = 0;
    let mut i4 = 0;
    let mut i6 = 0;
    for e in &s.edges {
        if e.unresolved {
            continue;
        }
        for (_, att, other) in e.ends() {
            let other_node = &s.nodes[other];
            match att {
                Some(Attachment::SaddleType) => {
                    if other_node.finite_kind().is_some_and(PointKind::is_node) {
                        i3 += 1;
                    }
                    if matches!(other_node, Node::Origin { .. }) && (e.kind == EdgeKind::Axis || e.connection) {
                        i4 += 1;
                    }
                }
                Some(Attachment::Parabolic) => {
                    if other_node.is_infinite() {
                        i6 += 1;
                    }
                }
                None => {}
            }
        }
    }

    let mut receivers = BTreeSet::new();
    for r in &s.regions {
        let (a, o) = (&s.nodes[r.alpha], &s.nodes[r.omega]);
        if a.is_finite() && matches!(o, Node::Origin { .. }) {
            receivers.insert(r.omega);
        }
        if o.is_finite() && matches!(a, Node::Origin { .. }) {
            receivers.insert(r.alpha);
        }
    }
    let i5 = receivers.len() as u32;

    Ok(InvariantVector { i1, i2, i3: Some(i3), i4: Some(i4), i5: Some(i5), i6: Some(i6) })
}

impl SeparatrixSkeleton {
    /// The same skeleton seen through a sign symmetry, so that a skeleton
    /// traced for a normalized point can be drawn for the original one.
    pub fn transformed(&self, t: SymmetryTransform) -> SeparatrixSkeleton {
        if t.is_identity() {
            return self.clone();
        }
        let (sy, sz) = (t.flip_y as f64, t.flip_z as f64);
        let map = |d: &DiscPoint| DiscPoint { x: sy * d.x, y: sz * d.y };
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Finite { id, kind, location } => {
                    Node::Finite { id: *id, kind: *kind, location: t.map_point(*location) }
                }
                Node::Origin { chart, label } => {
                    let s = if chart.family() == 1 { sy } else { sz };
                    Node::Origin { chart: ChartId::from_parts(chart.family(), s * chart.side()), label: *label }
                }
                Node::Boundary { angle } => Node::Boundary { angle: (sz * angle.sin()).atan2(sy * angle.cos()) },
            })
            .collect();
        let reverse = t.reverse_time < 0;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut path: Vec<DiscPoint> = e.path.iter().map(map).collect();
                let mut e = e.clone();
                if reverse {
                    path.reverse();
                    std::mem::swap(&mut e.from, &mut e.to);
                    std::mem::swap(&mut e.at_from, &mut e.at_to);
                }
                e.path = path;
                e
            })
            .collect();
        let regions = self
            .regions
            .iter()
            .map(|r| {
                let mut path: Vec<DiscPoint> = r.path.iter().map(map).collect();
                let (mut alpha, mut omega) = (r.alpha, r.omega);
                if reverse {
                    path.reverse();
                    std::mem::swap(&mut alpha, &mut omega);
                }
                RegionOrbit { alpha, omega, path }
            })
            .collect();
        SeparatrixSkeleton { nodes, edges, regions, flags: self.flags.clone() }
    }
}
