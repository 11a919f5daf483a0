//! Singular points at infinity: the normally hyperbolic line and the two
//! degenerate chart origins.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::compactification::ChartId;
use crate::error::Error;
use crate::parameter_domain::{require_classifiable, ParameterPoint};
use crate::scalar::Sign;

pub use crate::sectors::{verify_origin_sectors, SectorReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    ArrivesFromInterior,
    LeavesToInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TransversalBehavior {
    pub quadrant: Quadrant,
    pub direction: Direction,
}

/// Behavior at the point `(u0, 0)` of a chart: the transversal eigenvalue
/// there is `-b1 u0`.
pub fn classify_infinity_line(
    p: &ParameterPoint,
    u0: f64,
    chart: ChartId,
) -> Result<TransversalBehavior, Error> {
    if u0 == 0.0 || !u0.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    let b1 = require_classifiable(p)?.b1;
    let eig = -(b1.as_i8() as f64) * u0;
    let direction =
        if eig < 0.0 { Direction::ArrivesFromInterior } else { Direction::LeavesToInterior };
    let pos = u0 > 0.0;
    let quadrant = match (chart, pos) {
        (ChartId::U1, true) | (ChartId::U2, true) => Quadrant::Q1,
        (ChartId::U1, false) | (ChartId::V2, false) => Quadrant::Q4,
        (ChartId::V1, true) | (ChartId::V2, true) => Quadrant::Q3,
        (ChartId::V1, false) | (ChartId::U2, false) => Quadrant::Q2,
    };
    Ok(TransversalBehavior { quadrant, direction })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OriginLabel {
    L1_1,
    L1_2,
    L1_3,
    L1_4,
    L1_5,
    L1_6,
    L1_7,
    L1_8,
    L2_1,
    L2_2,
    L2_3,
    L2_4,
    L2_5,
    L2_6,
    L2_7,
    L2_8,
    L2_9,
    L2_10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OriginFamily {
    SaddleNodeSemiHyperbolic,
    NilpotentSaddle,
    NilpotentHyperbolicElliptic,
}

impl OriginLabel {
    pub const ALL: [OriginLabel; 18] = [
        OriginLabel::L1_1,
        OriginLabel::L1_2,
        OriginLabel::L1_3,
        OriginLabel::L1_4,
        OriginLabel::L1_5,
        OriginLabel::L1_6,
        OriginLabel::L1_7,
        OriginLabel::L1_8,
        OriginLabel::L2_1,
        OriginLabel::L2_2,
        OriginLabel::L2_3,
        OriginLabel::L2_4,
        OriginLabel::L2_5,
        OriginLabel::L2_6,
        OriginLabel::L2_7,
        OriginLabel::L2_8,
        OriginLabel::L2_9,
        OriginLabel::L2_10,
    ];

    pub fn name(self) -> &'static str {
        use OriginLabel::*;
        match self {
            L1_1 => "L1_1",
            L1_2 => "L1_2",
            L1_3 => "L1_3",
            L1_4 => "L1_4",
            L1_5 => "L1_5",
            L1_6 => "L1_6",
            L1_7 => "L1_7",
            L1_8 => "L1_8",
            L2_1 => "L2_1",
            L2_2 => "L2_2",
            L2_3 => "L2_3",
            L2_4 => "L2_4",
            L2_5 => "L2_5",
            L2_6 => "L2_6",
            L2_7 => "L2_7",
            L2_8 => "L2_8",
            L2_9 => "L2_9",
            L2_10 => "L2_10",
        }
    }

    pub fn parse(s: &str) -> Option<OriginLabel> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }

    pub fn chart(self) -> ChartId {
        if (self as u8) < 8 {
            ChartId::U1
        } else {
            ChartId::U2
        }
    }

    pub fn family(self) -> OriginFamily {
        use OriginLabel::*;
        match self {
            L1_1 | L1_2 | L1_3 | L1_4 | L2_1 | L2_2 | L2_3 | L2_4 => {
                OriginFamily::SaddleNodeSemiHyperbolic
            }
            L1_5 | L1_6 | L2_9 | L2_10 => OriginFamily::NilpotentSaddle,
            L1_7 | L1_8 | L2_5 | L2_6 | L2_7 | L2_8 => OriginFamily::NilpotentHyperbolicElliptic,
        }
    }

    /// Local topological class (1, 2 or 3) among the labels of one chart.
    pub fn local_class(self) -> u8 {
        use OriginLabel::*;
        match self {
            L1_1 | L1_2 | L1_3 | L1_4 | L2_1 | L2_2 | L2_3 | L2_4 => 1,
            L1_5 | L1_6 | L2_5 | L2_6 | L2_7 | L2_8 => 2,
            L1_7 | L1_8 | L2_9 | L2_10 => 3,
        }
    }
}

impl fmt::Display for OriginLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for OriginLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OriginPortraitLabel {
    pub chart: ChartId,
    pub label: OriginLabel,
    pub family: OriginFamily,
}

impl From<OriginLabel> for OriginPortraitLabel {
    fn from(label: OriginLabel) -> Self {
        OriginPortraitLabel { chart: label.chart(), label, family: label.family() }
    }
}

pub fn classify_origin_u1(p: &ParameterPoint) -> Result<OriginPortraitLabel, Error> {
    use OriginLabel::*;
    let s = require_classifiable(p)?;
    let pos = s.b1.is_positive();
    let up = s.c0_minus_b0.is_positive();
    let label = if !s.b2.is_zero() {
        match (pos, up) {
            (true, true) => L1_1,
            (true, false) => L1_2,
            (false, true) => L1_3,
            (false, false) => L1_4,
        }
    } else {
        match (pos, up) {
            (true, true) => L1_5,
            (true, false) => L1_7,
            (false, true) => L1_6,
            (false, false) => L1_8,
        }
    };
    Ok(label.into())
}

/// The nilpotent rows (`b3 = 0`) follow the labels used by the global
/// table for negative `b1`.
pub fn classify_origin_u2(p: &ParameterPoint) -> Result<OriginPortraitLabel, Error> {
    use OriginLabel::*;
    let s = require_classifiable(p)?;
    let pos = s.b1.is_positive();
    let up = s.c0_minus_b0.is_positive();
    let label = if !s.b3.is_zero() {
        match (pos, up) {
            (true, false) => L2_1,
            (true, true) => L2_2,
            (false, false) => L2_3,
            (false, true) => L2_4,
        }
    } else {
        match (pos, s.c0, up) {
            (true, Sign::Negative, _) => L2_6,
            (true, Sign::Positive, false) => L2_9,
            (true, Sign::Positive, true) => L2_5,
            (false, Sign::Negative, _) => L2_8,
            (false, Sign::Positive, true) => L2_7,
            (false, Sign::Positive, false) => L2_10,
            _ => {
                return Err(Error::Unclassifiable(format!("no row for the origin of U2 at {p}")))
            }
        }
    };
    Ok(label.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: [i64; 5]) -> ParameterPoint {
        ParameterPoint::ints(v)
    }

    #[test]
    fn infinity_line_examples() {
        let q = p([2, 1, 1, 1, 1]);
        let b = classify_infinity_line(&q, 2.0, ChartId::U1).unwrap();
        assert_eq!((b.quadrant, b.direction), (Quadrant::Q1, Direction::ArrivesFromInterior));
        let b = classify_infinity_line(&q, -2.0, ChartId::U1).unwrap();
        assert_eq!((b.quadrant, b.direction), (Quadrant::Q4, Direction::LeavesToInterior));
        let b = classify_infinity_line(&p([2, -1, 1, 1, 1]), 2.0, ChartId::U1).unwrap();
        assert_eq!((b.quadrant, b.direction), (Quadrant::Q1, Direction::LeavesToInterior));
        assert_eq!(classify_infinity_line(&q, 0.0, ChartId::U1), Err(Error::DegenerateDirection));
    }

    #[test]
    fn antipodal_quadrants_agree() {
        let q = p([2, 1, 1, 1, 1]);
        for u in [-3.0, 0.5] {
            for (a, b) in [(ChartId::U1, ChartId::V1), (ChartId::U2, ChartId::V2)] {
                let x = classify_infinity_line(&q, u, a).unwrap();
                let y = classify_infinity_line(&q, u, b).unwrap();
                assert_eq!(x.direction, y.direction);
                assert_ne!(x.quadrant, y.quadrant);
            }
        }
    }

    #[test]
    fn origin_u1_examples() {
        assert_eq!(classify_origin_u1(&p([2, 1, 1, 1, 1])).unwrap().label, OriginLabel::L1_2);
        assert_eq!(classify_origin_u1(&p([1, 1, 0, 1, 2])).unwrap().label, OriginLabel::L1_5);
        assert_eq!(classify_origin_u1(&p([1, -1, 0, 1, -1])).unwrap().label, OriginLabel::L1_8);
    }

    #[test]
    fn origin_u2_examples() {
        assert_eq!(classify_origin_u2(&p([2, 1, 1, 1, 1])).unwrap().label, OriginLabel::L2_1);
        assert_eq!(classify_origin_u2(&p([1, 1, 1, 1, 2])).unwrap().label, OriginLabel::L2_2);
        assert_eq!(classify_origin_u2(&p([1, 1, 1, 0, -1])).unwrap().label, OriginLabel::L2_6);
    }

    #[test]
    fn label_names_round_trip() {
        for l in OriginLabel::ALL {
            assert_eq!(OriginLabel::parse(l.name()), Some(l));
        }
    }

    #[test]
    fn local_classes_partition() {
        let count = |chart, class| {
            OriginLabel::ALL.iter().filter(|l| l.chart() == chart && l.local_class() == class).count()
        };
        assert_eq!((count(ChartId::U1, 1), count(ChartId::U1, 2), count(ChartId::U1, 3)), (4, 2, 2));
        assert_eq!((count(ChartId::U2, 1), count(ChartId::U2, 2), count(ChartId::U2, 3)), (4, 4, 2));
    }
}
