//! Finite singular points: location, linearization and local type.

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::parameter_domain::{case_from_signs, require_classifiable, CaseId, ParameterPoint};
use crate::scalar::Sign;
use crate::system::Coeffs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PointId {
    P0,
    P1,
    P2,
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Saddle,
    StableNode,
    UnstableNode,
    SaddleNode,
}

impl PointKind {
    pub fn index(self) -> i32 {
        match self {
            PointKind::Saddle => -1,
            PointKind::StableNode | PointKind::UnstableNode => 1,
            PointKind::SaddleNode => 0,
        }
    }

    pub fn is_node(self) -> bool {
        matches!(self, PointKind::StableNode | PointKind::UnstableNode)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Saddle => "saddle",
            PointKind::StableNode => "stable_node",
            PointKind::UnstableNode => "unstable_node",
            PointKind::SaddleNode => "saddle_node",
        }
    }

    fn from_signs(a: Sign, b: Sign) -> PointKind {
        use Sign::*;
        match (a, b) {
            (Zero, _) | (_, Zero) => PointKind::SaddleNode,
            (Positive, Positive) => PointKind::UnstableNode,
            (Negative, Negative) => PointKind::StableNode,
            _ => PointKind::Saddle,
        }
    }
}

impl Serialize for PointKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteSingularity {
    pub id: PointId,
    pub location: (f64, f64),
    pub merged_with: Option<PointId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian(pub [[f64; 2]; 2]);

impl Jacobian {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Real eigenvalues, or `None` for a complex pair. Triangular matrices
    /// return their diagonal in order, without rounding.
    pub fn eigenvalues(&self) -> Option<(f64, f64)> {
        let [[a, b], [c, d]] = self.0;
        if b == 0.0 || c == 0.0 {
            return Some((a, d));
        }
        let disc = (a - d) * (a - d) + 4.0 * b * c;
        if disc < 0.0 {
            return None;
        }
        let tr = a + d;
        let s = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let big = if tr >= 0.0 { 0.5 * (tr + s) } else { 0.5 * (tr - s) };
        let small = if big != 0.0 { self.det() / big } else { 0.0 };
        Some(if big <= small { (big, small) } else { (small, big) })
    }
}

pub fn jacobian(p: &ParameterPoint, at: (f64, f64)) -> Jacobian {
    Jacobian(Coeffs::from(p).jacobian(at.0, at.1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPointReport {
    pub id: PointId,
    pub location: (f64, f64),
    pub kind: PointKind,
    pub eigenvalues: (f64, f64),
    pub index: i32,
    pub merged_with: Option<PointId>,
}

impl Serialize for SingularPointReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(None)?;
        m.serialize_entry("id", &self.id)?;
        m.serialize_entry("location", &[self.location.0, self.location.1])?;
        m.serialize_entry("kind", self.kind.as_str())?;
        m.serialize_entry("eigenvalues", &[self.eigenvalues.0, self.eigenvalues.1])?;
        m.serialize_entry("index", &self.index)?;
        if let Some(other) = self.merged_with {
            m.serialize_entry("merged_with", &other)?;
        }
        m.end()
    }
}

pub fn finite_singularities(p: &ParameterPoint) -> Result<Vec<FiniteSingularity>, Error> {
    let s = require_classifiable(p)?;
    let c = Coeffs::from(p);
    let mut out = vec![FiniteSingularity { id: PointId::P0, location: (0.0, 0.0), merged_with: None }];
    if !s.b3.is_zero() {
        if s.c0.is_zero() {
            out[0].merged_with = Some(PointId::P1);
        } else {
            out.push(FiniteSingularity {
                id: PointId::P1,
                location: (0.0, -c.c0 / c.b3),
                merged_with: None,
            });
        }
    }
    if !s.b2.is_zero() {
        if s.b0.is_zero() {
            out[0].merged_with = Some(PointId::P2);
        } else {
            out.push(FiniteSingularity {
                id: PointId::P2,
                location: (-c.b0 / c.b2, 0.0),
                merged_with: None,
            });
        }
    }
    Ok(out)
}

/// Rows of the finite classification tables: `(point, merged partner, kind)`.
pub fn table_kinds(case: &CaseId) -> Vec<(PointId, Option<PointId>, PointKind)> {
    use PointId::*;
    use PointKind::*;
    match (case.major, case.minor) {
        (1, 1) => vec![(P0, None, Saddle), (P1, None, UnstableNode), (P2, None, StableNode)],
        (1, 2) => vec![(P0, None, UnstableNode), (P1, None, Saddle), (P2, None, StableNode)],
        (1, 3) => vec![(P0, None, UnstableNode), (P1, None, StableNode), (P2, None, Saddle)],
        (1, 4) => vec![(P0, Some(P1), SaddleNode), (P2, None, StableNode)],
        (1, 5) => vec![(P0, Some(P2), SaddleNode), (P1, None, StableNode)],
        (2, 1) => vec![(P0, None, Saddle), (P1, None, UnstableNode)],
        (2, 2) => vec![(P0, None, UnstableNode), (P1, None, Saddle)],
        (2, 3) => vec![(P0, None, UnstableNode), (P1, None, StableNode)],
        (2, 4) => vec![(P0, Some(P1), SaddleNode)],
        (3, 1) => vec![(P0, None, Saddle), (P2, None, StableNode)],
        (3, 2) => vec![(P0, None, UnstableNode), (P2, None, Saddle)],
        (3, 3) => vec![(P0, None, UnstableNode), (P2, None, StableNode)],
        (3, 4) => vec![(P0, Some(P2), SaddleNode)],
        (4, 1) => vec![(P0, None, Saddle)],
        (4, 2) => vec![(P0, None, UnstableNode)],
        _ => Vec::new(),
    }
}

pub fn classify_finite(p: &ParameterPoint) -> Result<Vec<SingularPointReport>, Error> {
    let signs = require_classifiable(p)?;
    let case = case_from_signs(&signs).ok_or_else(|| Error::Unclassifiable(p.to_string()))?;
    let rows = table_kinds(&case);
    let points = finite_singularities(p)?;
    let mut out = Vec::with_capacity(points.len());
    for pt in points {
        let row = rows
            .iter()
            .find(|r| r.0 == pt.id)
            .ok_or_else(|| Error::TableMismatch {
                id: pt.id.to_string(),
                from_eigenvalues: "present".into(),
                from_table: "absent".into(),
            })?;
        if row.1 != pt.merged_with {
            return Err(Error::TableMismatch {
                id: pt.id.to_string(),
                from_eigenvalues: format!("merged with {:?}", pt.merged_with),
                from_table: format!("merged with {:?}", row.1),
            });
        }
        let j = jacobian(p, pt.location);
        let eig = j.eigenvalues().ok_or_else(|| Error::TableMismatch {
            id: pt.id.to_string(),
            from_eigenvalues: "complex pair".into(),
            from_table: row.2.to_string(),
        })?;
        let kind = if row.2 == PointKind::SaddleNode {
            row.2
        } else {
            let observed = PointKind::from_signs(Sign::of_f64(eig.0), Sign::of_f64(eig.1));
            if observed != row.2 {
                return Err(Error::TableMismatch {
                    id: pt.id.to_string(),
                    from_eigenvalues: observed.to_string(),
                    from_table: row.2.to_string(),
                });
            }
            observed
        };
        let eigenvalues = if kind == PointKind::SaddleNode {
            // The zero eigenvalue is exact; float inputs within tolerance of a
            // stratum would otherwise show a tiny spurious value.
            if eig.0.abs() < eig.1.abs() {
                (0.0, eig.1)
            } else {
                (eig.0, 0.0)
            }
        } else {
            eig
        };
        out.push(SingularPointReport {
            id: pt.id,
            location: pt.location,
            kind,
            eigenvalues,
            index: kind.index(),
            merged_with: pt.merged_with,
        });
    }
    if out.len() != rows.len() {
        return Err(Error::TableMismatch {
            id: format!("case {case}"),
            from_eigenvalues: format!("{} points", out.len()),
            from_table: format!("{} points", rows.len()),
        });
    }
    Ok(out)
}

pub fn index_sum(reports: &[SingularPointReport]) -> i32 {
    reports.iter().map(|r| r.index).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(p: [i64; 5]) -> Vec<(PointId, PointKind)> {
        classify_finite(&ParameterPoint::ints(p)).unwrap().iter().map(|r| (r.id, r.kind)).collect()
    }

    #[test]
    fn locations() {
        let pts = finite_singularities(&ParameterPoint::ints([2, 1, 1, 1, 1])).unwrap();
        let locs: Vec<_> = pts.iter().map(|p| (p.id, p.location)).collect();
        assert_eq!(
            locs,
            vec![(PointId::P0, (0.0, 0.0)), (PointId::P1, (0.0, -1.0)), (PointId::P2, (-2.0, 0.0))]
        );
        let pts = finite_singularities(&ParameterPoint::ints([1, 1, 0, 1, 2])).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].location, (0.0, -2.0));
        let pts = finite_singularities(&ParameterPoint::ints([1, 1, 1, 1, 0])).unwrap();
        assert_eq!(pts[0].merged_with, Some(PointId::P1));
        assert_eq!(pts[1].location, (-1.0, 0.0));
    }

    #[test]
    fn jacobian_examples() {
        let p = ParameterPoint::ints([1, 1, 1, 1, -1]);
        assert_eq!(jacobian(&p, (0.0, 0.0)).0, [[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(jacobian(&p, (0.0, 1.0)).0, [[2.0, 0.0], [2.0, 1.0]]);
        assert_eq!(jacobian(&p, (0.0, 1.0)).eigenvalues(), Some((2.0, 1.0)));
        assert_eq!(jacobian(&p, (-1.0, 0.0)).0, [[-1.0, 0.0], [0.0, -2.0]]);
    }

    #[test]
    fn classification_examples() {
        use PointId::*;
        use PointKind::*;
        assert_eq!(kinds([1, 1, 1, 1, -1]), vec![(P0, Saddle), (P1, UnstableNode), (P2, StableNode)]);
        assert_eq!(kinds([2, 1, 1, 1, 1]), vec![(P0, UnstableNode), (P1, Saddle), (P2, StableNode)]);
        assert_eq!(kinds([1, 1, 1, 1, 0]), vec![(P0, SaddleNode), (P2, StableNode)]);
    }

    #[test]
    fn index_sums() {
        let r = classify_finite(&ParameterPoint::ints([1, 1, 1, 1, -1])).unwrap();
        assert_eq!(index_sum(&r), 1);
        let r = classify_finite(&ParameterPoint::ints([2, 1, 0, 1, 1])).unwrap();
        assert_eq!(index_sum(&r), 0);
        assert_eq!(index_sum(&[]), 0);
    }

    #[test]
    fn report_json_shape() {
        let r = classify_finite(&ParameterPoint::ints([1, 1, 1, 1, -1])).unwrap();
        let s = serde_json::to_string(&r[0]).unwrap();
        assert_eq!(
            s,
            r#"{"id":"P0","location":[0.0,0.0],"kind":"saddle","eigenvalues":[1.0,-1.0],"index":-1}"#
        );
    }
}
