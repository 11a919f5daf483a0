//! Global portrait labels, topological classes and their invariants.

use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::compactification::ChartId;
use crate::error::Error;
use crate::finite::{table_kinds, PointId};
use crate::infinite::{classify_origin_u1, classify_origin_u2, OriginLabel};
use crate::parameter_domain::{determine_case, CaseId, ParameterPoint, Quantity};
use crate::scalar::{Scalar, Sign};
use crate::skeleton::InvariantVector;
use crate::tracer::{follow_lower_branch, follow_origin_separatrix, End, IntegratorConfig, FLAG_BUDGET};

pub const DEFAULT_EPS_CONN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortraitLabel(pub u8);

impl PortraitLabel {
    pub fn parse(s: &str) -> Option<PortraitLabel> {
        let n: u8 = s.strip_prefix('G')?.parse().ok()?;
        (1..=36).contains(&n).then_some(PortraitLabel(n))
    }
}

impl fmt::Display for PortraitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.0)
    }
}

impl Serialize for PortraitLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RClass(pub u8);

impl fmt::Display for RClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

impl Serialize for RClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One entry of the global table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GlobalRow {
    pub case: (u8, u8),
    pub b1_sign: i8,
    /// Only used by case 4.2.
    pub c0_minus_b0_sign: Option<i8>,
    /// Sign of the connection quantity, for the split rows of cases 1.2 and 1.3.
    pub connection_sign: Option<i8>,
    pub o1: OriginLabel,
    pub o2: OriginLabel,
    pub g: PortraitLabel,
}

const fn row(case: (u8, u8), b1: i8, o1: OriginLabel, o2: OriginLabel, g: u8) -> GlobalRow {
    GlobalRow { case, b1_sign: b1, c0_minus_b0_sign: None, connection_sign: None, o1, o2, g: PortraitLabel(g) }
}

const fn split(case: (u8, u8), conn: i8, o1: OriginLabel, o2: OriginLabel, g: u8) -> GlobalRow {
    GlobalRow { connection_sign: Some(conn), ..row(case, 1, o1, o2, g) }
}

const fn four(diff: i8, b1: i8, o1: OriginLabel, o2: OriginLabel, g: u8) -> GlobalRow {
    GlobalRow { c0_minus_b0_sign: Some(diff), ..row((4, 2), b1, o1, o2, g) }
}

use OriginLabel::*;

pub static GLOBAL_TABLE: [GlobalRow; 36] = [
    row((1, 1), 1, L1_2, L2_1, 1),
    row((1, 1), -1, L1_4, L2_3, 2),
    split((1, 2), 1, L1_2, L2_1, 3),
    split((1, 2), 0, L1_2, L2_1, 4),
    split((1, 2), -1, L1_2, L2_1, 5),
    row((1, 2), -1, L1_4, L2_3, 6),
    split((1, 3), 1, L1_1, L2_2, 7),
    split((1, 3), 0, L1_1, L2_2, 8),
    split((1, 3), -1, L1_1, L2_2, 9),
    row((1, 3), -1, L1_3, L2_4, 10),
    row((1, 4), 1, L1_2, L2_1, 11),
    row((1, 4), -1, L1_4, L2_3, 12),
    row((1, 5), 1, L1_1, L2_2, 13),
    row((1, 5), -1, L1_3, L2_4, 14),
    row((2, 1), 1, L1_7, L2_1, 15),
    row((2, 1), -1, L1_8, L2_3, 16),
    row((2, 2), 1, L1_7, L2_1, 17),
    row((2, 2), -1, L1_8, L2_3, 18),
    row((2, 3), 1, L1_5, L2_2, 19),
    row((2, 3), -1, L1_6, L2_4, 20),
    row((2, 4), 1, L1_7, L2_1, 21),
    row((2, 4), -1, L1_8, L2_3, 22),
    row((3, 1), 1, L1_2, L2_6, 23),
    row((3, 1), -1, L1_4, L2_8, 24),
    row((3, 2), 1, L1_1, L2_5, 25),
    row((3, 2), -1, L1_3, L2_7, 26),
    row((3, 3), 1, L1_2, L2_9, 27),
    row((3, 3), -1, L1_4, L2_10, 28),
    row((3, 4), 1, L1_1, L2_5, 29),
    row((3, 4), -1, L1_3, L2_7, 30),
    row((4, 1), 1, L1_7, L2_6, 31),
    row((4, 1), -1, L1_8, L2_8, 32),
    four(1, 1, L1_5, L2_5, 33),
    four(-1, 1, L1_7, L2_9, 34),
    four(1, -1, L1_6, L2_7, 35),
    four(-1, -1, L1_8, L2_10, 36),
];

/// Number of distinct condition rows before the connection split.
pub fn condition_rows() -> usize {
    let mut keys: Vec<_> = GLOBAL_TABLE.iter().map(|r| (r.case, r.b1_sign, r.c0_minus_b0_sign)).collect();
    keys.dedup();
    keys.len()
}

/// Quantity splitting case 1.2 (resp. 1.3) with `b1 > 0`.
pub fn connection_quantity(case: &CaseId) -> Option<Quantity> {
    match (case.major, case.minor, case.b1_sign) {
        (1, 2, 1) => Some(Quantity::ConnectionC0),
        (1, 3, 1) => Some(Quantity::ConnectionB0),
        _ => None,
    }
}

pub fn global_row(g: PortraitLabel) -> &'static GlobalRow {
    &GLOBAL_TABLE[g.0 as usize - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalClassification {
    pub case: CaseId,
    pub o1: OriginLabel,
    pub o2: OriginLabel,
    pub g: PortraitLabel,
}

pub fn assemble_global(p: &ParameterPoint) -> Result<GlobalClassification, Error> {
    let case = determine_case(p)?;
    let conn = connection_quantity(&case).map(|q| p.sign(q).as_i8());
    let row = GLOBAL_TABLE
        .iter()
        .find(|r| {
            r.case == (case.major, case.minor)
                && r.b1_sign == case.b1_sign
                && r.c0_minus_b0_sign == case.c0_minus_b0_sign
                && r.connection_sign == conn
        })
        .ok_or_else(|| Error::Unclassifiable(format!("no global row for case {case} at {p}")))?;
    let o1 = classify_origin_u1(p)?.label;
    let o2 = classify_origin_u2(p)?.label;
    for (got, want, chart) in [(o1, row.o1, "O1"), (o2, row.o2, "O2")] {
        if got != want {
            return Err(Error::TableMismatch {
                id: format!("{} {chart}", row.g),
                from_eigenvalues: got.to_string(),
                from_table: want.to_string(),
            });
        }
    }
    Ok(GlobalClassification { case, o1, o2, g: row.g })
}

pub fn r_class(g: PortraitLabel) -> RClass {
    let r = match g.0 {
        1 | 2 => 1,
        3 | 7 => 2,
        4 | 8 => 3,
        5 | 9 => 4,
        6 | 10 => 5,
        11 | 13 => 6,
        12 | 14 => 7,
        15 | 16 | 23 | 24 => 8,
        17 | 18 | 25 | 26 => 9,
        19 | 20 | 27 | 28 => 10,
        21 | 22 | 29 | 30 => 11,
        31 | 32 => 12,
        _ => 13,
    };
    RClass(r)
}

pub fn members(r: RClass) -> Vec<PortraitLabel> {
    (1..=36).map(PortraitLabel).filter(|&g| r_class(g) == r).collect()
}

/// Invariant vector of each class; `None` where the classification does not
/// need the invariant.
pub fn class_invariants(r: RClass) -> InvariantVector {
    let v = |i1, i2, i3, i4, i5, i6| InvariantVector { i1, i2, i3, i4, i5, i6 };
    match r.0 {
        1 => v(3, 1, Some(2), Some(2), None, None),
        2 => v(3, 1, Some(2), Some(1), Some(2), None),
        3 => v(3, 1, Some(1), Some(2), None, None),
        4 => v(3, 1, Some(1), Some(1), None, None),
        5 => v(3, 1, Some(2), Some(1), Some(1), None),
        6 => v(2, 1, Some(1), Some(2), None, Some(1)),
        7 => v(2, 1, Some(1), Some(2), None, Some(2)),
        8 => v(2, 0, Some(1), Some(3), None, None),
        9 => v(2, 0, Some(1), Some(1), None, None),
        10 => v(2, 2, None, None, None, None),
        11 => v(1, 0, None, None, None, None),
        12 => v(1, -1, None, None, None, None),
        _ => v(1, 1, None, None, None, None),
    }
}

/// Keeps only the entries the class uses.
pub fn mask(v: &InvariantVector, r: RClass) -> InvariantVector {
    let t = class_invariants(r);
    InvariantVector {
        i1: v.i1,
        i2: v.i2,
        i3: t.i3.and(v.i3),
        i4: t.i4.and(v.i4),
        i5: t.i5.and(v.i5),
        i6: t.i6.and(v.i6),
    }
}

/// Class from computed invariants, applying them in order: `I1`, `I2`,
/// then `I3`/`I4`, then `I5` or `I6` where those still tie.
pub fn class_from_invariants(v: &InvariantVector) -> Option<RClass> {
    let r = match (v.i1, v.i2) {
        (3, 1) => match (v.i3?, v.i4?) {
            (2, 2) => 1,
            (1, 2) => 3,
            (1, 1) => 4,
            (2, 1) => match v.i5? {
                2 => 2,
                1 => 5,
                _ => return None,
            },
            _ => return None,
        },
        (2, 1) => match v.i6? {
            1 => 6,
            2 => 7,
            _ => return None,
        },
        (2, 0) => match v.i4? {
            3 => 8,
            1 => 9,
            _ => return None,
        },
        (2, 2) => 10,
        (1, 0) => 11,
        (1, -1) => 12,
        (1, 1) => 13,
        _ => return None,
    };
    Some(RClass(r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopoClass {
    pub r: RClass,
    pub invariants: InvariantVector,
}

pub fn topo_class(g: PortraitLabel) -> TopoClass {
    let r = r_class(g);
    TopoClass { r, invariants: class_invariants(r) }
}

/// Coarse class 1–7 by the number and index sum of finite singular points.
pub fn classes_table(g: PortraitLabel) -> u8 {
    match g.0 {
        1..=10 => 1,
        11..=14 => 2,
        15..=18 | 23..=26 => 3,
        19 | 20 | 27 | 28 => 4,
        21 | 22 | 29 | 30 => 5,
        31 | 32 => 6,
        _ => 7,
    }
}

/// One parameter point per class, as exact rationals `(num, den)`.
pub static REPRESENTATIVES: [(u8, [(i64, i64); 5]); 13] = [
    (1, [(1, 1), (1, 1), (2, 1), (1, 1), (-1, 1)]),
    (2, [(2, 1), (1, 1), (1, 1), (1, 1), (1, 2)]),
    (3, [(2, 1), (1, 1), (1, 1), (1, 1), (1, 1)]),
    (4, [(2, 1), (1, 1), (1, 1), (1, 1), (3, 2)]),
    (5, [(2, 1), (-1, 1), (1, 1), (1, 1), (1, 1)]),
    (6, [(1, 1), (1, 1), (1, 1), (1, 1), (0, 1)]),
    (7, [(1, 1), (-1, 1), (1, 1), (1, 1), (0, 1)]),
    (8, [(2, 1), (1, 1), (0, 1), (1, 1), (-1, 1)]),
    (9, [(2, 1), (1, 1), (0, 1), (1, 1), (1, 1)]),
    (10, [(1, 1), (1, 1), (0, 1), (1, 1), (2, 1)]),
    (11, [(1, 1), (1, 1), (0, 1), (1, 1), (0, 1)]),
    (12, [(2, 1), (1, 1), (0, 1), (0, 1), (-1, 1)]),
    (13, [(1, 1), (1, 1), (0, 1), (0, 1), (2, 1)]),
];

pub fn representative(r: RClass) -> ParameterPoint {
    let (_, v) = REPRESENTATIVES[r.0 as usize - 1];
    let s = |i: usize| Scalar::ratio(v[i].0, v[i].1);
    ParameterPoint::new(s(0), s(1), s(2), s(3), s(4))
}

/// Everything the classifier relies on, for auditing.
pub fn tables_json() -> Value {
    let global: Vec<Value> = GLOBAL_TABLE
        .iter()
        .map(|r| {
            json!({
                "G": r.g,
                "case": format!("{}.{}", r.case.0, r.case.1),
                "b1_sign": r.b1_sign,
                "c0_minus_b0_sign": r.c0_minus_b0_sign,
                "connection_sign": r.connection_sign,
                "O1": r.o1,
                "O2": r.o2,
                "R": r_class(r.g),
                "class": classes_table(r.g),
            })
        })
        .collect();
    let classes: Vec<Value> = (1..=13)
        .map(|n| {
            let r = RClass(n);
            json!({
                "R": r,
                "G": members(r),
                "invariants": class_invariants(r).as_json(),
                "representative": representative(r),
            })
        })
        .collect();
    let finite: Vec<Value> = GLOBAL_TABLE
        .iter()
        .filter(|r| r.b1_sign == 1 && r.connection_sign.unwrap_or(0) == 0 && r.c0_minus_b0_sign.unwrap_or(1) == 1)
        .map(|r| {
            let case = CaseId { major: r.case.0, minor: r.case.1, b1_sign: 1, c0_minus_b0_sign: None };
            let pts: Vec<Value> = table_kinds(&case)
                .into_iter()
                .map(|(id, merged, kind)| json!({"id": id, "merged_with": merged, "kind": kind}))
                .collect();
            json!({"case": case.to_string(), "points": pts})
        })
        .collect();
    json!({
        "schema": "kolportrait/1",
        "global": global,
        "global_entries": GLOBAL_TABLE.len(),
        "condition_rows": condition_rows(),
        "classes": classes,
        "finite": finite,
    })
}

/// Signs used to look up the connection row, if the case has one.
pub fn connection_sign(p: &ParameterPoint) -> Result<Option<Sign>, Error> {
    let case = determine_case(p)?;
    Ok(connection_quantity(&case).map(|q| p.sign(q)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Configuration {
    /// The saddle branch ends at the finite node on the negative axis.
    A,
    /// The saddle branch and the separatrix of the antipodal chart origin coincide.
    B,
    /// The saddle branch lands on the line at infinity.
    C,
}

impl Configuration {
    fn from_sign(s: Sign) -> Configuration {
        match s {
            Sign::Positive => Configuration::A,
            Sign::Zero => Configuration::B,
            Sign::Negative => Configuration::C,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionReport {
    /// Configuration seen by tracing, if tracing could decide.
    pub traced: Option<Configuration>,
    pub algebraic: Configuration,
    /// Value of the connection quantity.
    pub margin: f64,
    pub near_boundary: bool,
    pub branch_end: End,
    pub separatrix_end: Option<End>,
    pub flags: Vec<String>,
}

impl ConnectionReport {
    pub fn configuration(&self) -> Configuration {
        self.traced.unwrap_or(self.algebraic)
    }

    pub fn agrees(&self) -> bool {
        self.traced == Some(self.algebraic)
    }
}

pub const FLAG_NEAR_CONNECTION: &str = "near_connection_boundary";
pub const FLAG_INCONCLUSIVE: &str = "inconclusive_near_boundary";

/// Traces the saddle branch entering the quadrant where both coordinates are
/// negative and the separatrix of the antipodal chart origin there, and
/// decides which of the three configurations holds.
pub fn detect_connection_boundary(
    p: &ParameterPoint,
    eps_conn: f64,
    cfg: &IntegratorConfig,
) -> Result<ConnectionReport, Error> {
    let case = determine_case(p)?;
    let q = connection_quantity(&case)
        .ok_or_else(|| Error::Unclassifiable(format!("case {case} has no connection stratum")))?;
    // Case 1.3 is case 1.2 with the roles of y and z exchanged.
    let work = if case.minor == 3 {
        ParameterPoint::new(p.c0.clone(), p.b1.clone(), p.b3.clone(), p.b2.clone(), p.b0.clone()).with_eps(p.eps)
    } else {
        p.clone()
    };
    let sign = work.sign(Quantity::ConnectionC0);
    debug_assert_eq!(sign, p.sign(q));
    let algebraic = Configuration::from_sign(sign);
    let margin = work.value(Quantity::ConnectionC0).0;
    let mut flags = Vec::new();
    let near = margin.abs() <= eps_conn;
    if near {
        flags.push(FLAG_NEAR_CONNECTION.to_string());
    }
    let branch = follow_lower_branch(&work, cfg, PointId::P1)?;
    let sep = follow_origin_separatrix(&work, cfg, ChartId::V1)?;
    let traced = if sign == Sign::Zero && work.is_exact() {
        // Exactly on the stratum the branch runs along the invariant line z = -c0/b3.
        flags.push("certified_invariant_line".to_string());
        Some(Configuration::B)
    } else if near {
        flags.push(FLAG_INCONCLUSIVE.to_string());
        None
    } else {
        match branch.end {
            End::Finite(PointId::P2) => Some(Configuration::A),
            End::Origin(ChartId::V1) => Some(Configuration::B),
            // Reaching infinity anywhere else, including the origin on the
            // negative vertical axis when the saddle sits far out on it.
            End::Boundary(_) | End::Origin(ChartId::V2) => Some(Configuration::C),
            _ => None,
        }
    };
    if traced.is_none() && !near {
        flags.push(FLAG_BUDGET.to_string());
    }
    Ok(ConnectionReport {
        traced,
        algebraic,
        margin,
        near_boundary: near,
        branch_end: branch.end,
        separatrix_end: sep.map(|t| t.end),
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: [(i64, i64); 5]) -> ParameterPoint {
        let s = |i: usize| Scalar::ratio(v[i].0, v[i].1);
        ParameterPoint::new(s(0), s(1), s(2), s(3), s(4))
    }

    #[test]
    fn worked_examples() {
        let g = |c0: (i64, i64)| assemble_global(&pt([(2, 1), (1, 1), (1, 1), (1, 1), c0])).unwrap().g.0;
        assert_eq!((g((1, 2)), g((1, 1)), g((3, 2))), (3, 4, 5));
        let g = |b0: (i64, i64)| assemble_global(&pt([b0, (1, 1), (1, 1), (1, 1), (2, 1)])).unwrap().g.0;
        assert_eq!((g((1, 2)), g((1, 1)), g((3, 2))), (7, 8, 9));
        assert_eq!(assemble_global(&ParameterPoint::ints([1, 1, 0, 0, 2])).unwrap().g.0, 33);
    }

    #[test]
    fn table_shape() {
        assert_eq!(condition_rows(), 32);
        for (i, r) in GLOBAL_TABLE.iter().enumerate() {
            assert_eq!(r.g.0 as usize, i + 1);
        }
    }

    #[test]
    fn class_lookups() {
        assert_eq!(topo_class(PortraitLabel(1)).r, RClass(1));
        assert_eq!(topo_class(PortraitLabel(8)).r, RClass(3));
        assert_eq!(topo_class(PortraitLabel(36)).r, RClass(13));
        assert_eq!(classes_table(PortraitLabel(5)), 1);
        assert_eq!(classes_table(PortraitLabel(28)), 4);
        assert_eq!(classes_table(PortraitLabel(31)), 6);
    }

    #[test]
    fn class_vectors_decode_to_their_class() {
        for n in 1..=13 {
            let r = RClass(n);
            assert_eq!(class_from_invariants(&class_invariants(r)), Some(r));
        }
    }

    #[test]
    fn representatives_hit_their_class() {
        for n in 1..=13 {
            let g = assemble_global(&representative(RClass(n))).unwrap().g;
            assert_eq!(r_class(g), RClass(n));
        }
    }

    #[test]
    fn connection_examples() {
        let cfg = IntegratorConfig::default();
        let run = |c0: (i64, i64)| {
            detect_connection_boundary(&pt([(2, 1), (1, 1), (1, 1), (1, 1), c0]), DEFAULT_EPS_CONN, &cfg).unwrap()
        };
        let a = run((1, 2));
        assert_eq!((a.traced, a.algebraic), (Some(Configuration::A), Configuration::A));
        let b = run((1, 1));
        assert_eq!(b.configuration(), Configuration::B);
        assert!(b.near_boundary);
        let c = run((3, 2));
        assert_eq!((c.traced, c.algebraic), (Some(Configuration::C), Configuration::C));
        let mirrored = detect_connection_boundary(&pt([(3, 2), (1, 1), (1, 1), (1, 1), (2, 1)]), DEFAULT_EPS_CONN, &cfg);
        assert_eq!(mirrored.unwrap().traced, Some(Configuration::C));
    }

    #[test]
    fn label_parsing() {
        assert_eq!(PortraitLabel::parse("G36"), Some(PortraitLabel(36)));
        assert_eq!(PortraitLabel::parse("G37"), None);
        assert_eq!(PortraitLabel(4).to_string(), "G4");
    }
}
