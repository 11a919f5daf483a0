//! Parameter points, the admissible region, sign symmetries and the case split.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{decide_sign, Poly, Scalar, Sign};

pub const DEFAULT_EPS_PARAM: f64 = 1e-12;

/// The five coefficients `(b0, b1, b2, b3, c0)` of
/// `y' = y(b0 + b1 y z + b2 y + b3 z)`, `z' = z(c0 + b1 y z + b2 y + b3 z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub b0: Scalar,
    pub b1: Scalar,
    pub b2: Scalar,
    pub b3: Scalar,
    pub c0: Scalar,
    /// Zero tolerance for float coefficients; ignored when all are exact.
    #[serde(skip, default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    DEFAULT_EPS_PARAM
}

/// Polynomial quantities whose signs drive every classification rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    B0,
    B1,
    B2,
    B3,
    C0,
    C0MinusB0,
    /// `b2 b3 - b1 c0`
    ConnectionC0,
    /// `b2 b3 - b1 b0`
    ConnectionB0,
    B0PlusC0,
}

impl Quantity {
    fn poly(self) -> Poly {
        const B0: Poly = Poly::new(&[(1, &[0])]);
        const B1: Poly = Poly::new(&[(1, &[1])]);
        const B2: Poly = Poly::new(&[(1, &[2])]);
        const B3: Poly = Poly::new(&[(1, &[3])]);
        const C0: Poly = Poly::new(&[(1, &[4])]);
        const C0_MINUS_B0: Poly = Poly::new(&[(1, &[4]), (-1, &[0])]);
        const CONN_C0: Poly = Poly::new(&[(1, &[2, 3]), (-1, &[1, 4])]);
        const CONN_B0: Poly = Poly::new(&[(1, &[2, 3]), (-1, &[1, 0])]);
        const B0_PLUS_C0: Poly = Poly::new(&[(1, &[0]), (1, &[4])]);
        match self {
            Quantity::B0 => B0,
            Quantity::B1 => B1,
            Quantity::B2 => B2,
            Quantity::B3 => B3,
            Quantity::C0 => C0,
            Quantity::C0MinusB0 => C0_MINUS_B0,
            Quantity::ConnectionC0 => CONN_C0,
            Quantity::ConnectionB0 => CONN_B0,
            Quantity::B0PlusC0 => B0_PLUS_C0,
        }
    }
}

impl ParameterPoint {
    pub fn new(b0: Scalar, b1: Scalar, b2: Scalar, b3: Scalar, c0: Scalar) -> Self {
        ParameterPoint { b0, b1, b2, b3, c0, eps: DEFAULT_EPS_PARAM }
    }

    /// Exact point from integer numerators over a common denominator.
    pub fn ints(v: [i64; 5]) -> Self {
        let [b0, b1, b2, b3, c0] = v.map(Scalar::int);
        Self::new(b0, b1, b2, b3, c0)
    }

    pub fn from_f64(v: [f64; 5]) -> Self {
        let [b0, b1, b2, b3, c0] = v.map(Scalar::Float);
        Self::new(b0, b1, b2, b3, c0)
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn coeffs(&self) -> [&Scalar; 5] {
        [&self.b0, &self.b1, &self.b2, &self.b3, &self.c0]
    }

    pub fn to_f64(&self) -> [f64; 5] {
        self.coeffs().map(Scalar::to_f64)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs().iter().all(|s| s.is_exact())
    }

    fn exact_coeffs(&self) -> Option<[BigRational; 5]> {
        let c = self.coeffs();
        Some([
            c[0].exact()?.clone(),
            c[1].exact()?.clone(),
            c[2].exact()?.clone(),
            c[3].exact()?.clone(),
            c[4].exact()?.clone(),
        ])
    }

    pub fn sign(&self, q: Quantity) -> Sign {
        decide_sign(q.poly(), self.exact_coeffs().as_ref(), &self.to_f64(), self.eps)
    }

    /// Float value of a quantity together with its term scale.
    pub fn value(&self, q: Quantity) -> (f64, f64) {
        q.poly().eval_f64(&self.to_f64())
    }

    /// Sign of every quantity at once, evaluated exactly at most once.
    pub fn signs(&self) -> SignTable {
        let exact = self.exact_coeffs();
        let approx = self.to_f64();
        let s = |q: Quantity| decide_sign(q.poly(), exact.as_ref(), &approx, self.eps);
        SignTable {
            b0: s(Quantity::B0),
            b1: s(Quantity::B1),
            b2: s(Quantity::B2),
            b3: s(Quantity::B3),
            c0: s(Quantity::C0),
            c0_minus_b0: s(Quantity::C0MinusB0),
        }
    }
}

impl fmt::Display for ParameterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(b0={}, b1={}, b2={}, b3={}, c0={})",
            self.b0, self.b1, self.b2, self.b3, self.c0
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignTable {
    pub b0: Sign,
    pub b1: Sign,
    pub b2: Sign,
    pub b3: Sign,
    pub c0: Sign,
    pub c0_minus_b0: Sign,
}

/// One defining condition of the admissible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    B1NonZero,
    C0MinusB0NonZero,
    B0NonNegative,
    B2NonNegative,
    B3NonNegative,
    B3OrC0NonZero,
    B2OrB0NonZero,
    /// `b2 b3 = 0` implies `b1 > 0`
    DegenerateImpliesB1Positive,
    /// `b0 = 0` implies `c0 > 0`
    B0ZeroImpliesC0Positive,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::B1NonZero => "b1 != 0",
            Condition::C0MinusB0NonZero => "c0 - b0 != 0",
            Condition::B0NonNegative => "b0 >= 0",
            Condition::B2NonNegative => "b2 >= 0",
            Condition::B3NonNegative => "b3 >= 0",
            Condition::B3OrC0NonZero => "b3^2 + c0^2 != 0",
            Condition::B2OrB0NonZero => "b2^2 + b0^2 != 0",
            Condition::DegenerateImpliesB1Positive => "b2*b3 = 0 => b1 > 0",
            Condition::B0ZeroImpliesC0Positive => "b0 = 0 => c0 > 0",
        }
    }

    /// Conditions that no sign symmetry can repair.
    pub fn is_structural(self) -> bool {
        matches!(
            self,
            Condition::B1NonZero
                | Condition::C0MinusB0NonZero
                | Condition::B3OrC0NonZero
                | Condition::B2OrB0NonZero
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Condition>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when only the two refinements fail (the point is still classifiable).
    pub fn only_refinements(&self) -> bool {
        self.violations.iter().all(|c| {
            matches!(c, Condition::DegenerateImpliesB1Positive | Condition::B0ZeroImpliesC0Positive)
        })
    }
}

fn check(s: &SignTable) -> ValidationReport {
    let mut v = Vec::new();
    if s.b1.is_zero() {
        v.push(Condition::B1NonZero);
    }
    if s.c0_minus_b0.is_zero() {
        v.push(Condition::C0MinusB0NonZero);
    }
    if s.b0.is_negative() {
        v.push(Condition::B0NonNegative);
    }
    if s.b2.is_negative() {
        v.push(Condition::B2NonNegative);
    }
    if s.b3.is_negative() {
        v.push(Condition::B3NonNegative);
    }
    if s.b3.is_zero() && s.c0.is_zero() {
        v.push(Condition::B3OrC0NonZero);
    }
    if s.b2.is_zero() && s.b0.is_zero() {
        v.push(Condition::B2OrB0NonZero);
    }
    if (s.b2.is_zero() || s.b3.is_zero()) && !s.b1.is_positive() {
        v.push(Condition::DegenerateImpliesB1Positive);
    }
    if s.b0.is_zero() && !s.c0.is_positive() {
        v.push(Condition::B0ZeroImpliesC0Positive);
    }
    ValidationReport { violations: v }
}

pub fn validate_hypothesis(p: &ParameterPoint) -> ValidationReport {
    check(&p.signs())
}

/// Checks everything except `b2 b3 = 0 => b1 > 0`; the classifiers accept
/// both signs of `b1` in the degenerate cases.
pub(crate) fn require_classifiable(p: &ParameterPoint) -> Result<SignTable, Error> {
    let s = p.signs();
    let report = check(&s);
    let bad: Vec<_> = report
        .violations
        .into_iter()
        .filter(|c| *c != Condition::DegenerateImpliesB1Positive)
        .collect();
    if bad.is_empty() {
        Ok(s)
    } else {
        Err(Error::Unclassifiable(format!(
            "{p} violates {}",
            bad.iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
        )))
    }
}

/// Sign change `(y, z, t) -> (sy y, sz z, st t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetryTransform {
    pub flip_y: i8,
    pub flip_z: i8,
    pub reverse_time: i8,
}

impl SymmetryTransform {
    pub const IDENTITY: SymmetryTransform = SymmetryTransform { flip_y: 1, flip_z: 1, reverse_time: 1 };

    /// Search order used by [`normalize`].
    pub const ORDER: [SymmetryTransform; 8] = [
        SymmetryTransform { flip_y: 1, flip_z: 1, reverse_time: 1 },
        SymmetryTransform { flip_y: -1, flip_z: 1, reverse_time: 1 },
        SymmetryTransform { flip_y: 1, flip_z: -1, reverse_time: 1 },
        SymmetryTransform { flip_y: -1, flip_z: -1, reverse_time: 1 },
        SymmetryTransform { flip_y: 1, flip_z: 1, reverse_time: -1 },
        SymmetryTransform { flip_y: -1, flip_z: 1, reverse_time: -1 },
        SymmetryTransform { flip_y: 1, flip_z: -1, reverse_time: -1 },
        SymmetryTransform { flip_y: -1, flip_z: -1, reverse_time: -1 },
    ];

    pub fn compose(self, other: SymmetryTransform) -> SymmetryTransform {
        SymmetryTransform {
            flip_y: self.flip_y * other.flip_y,
            flip_z: self.flip_z * other.flip_z,
            reverse_time: self.reverse_time * other.reverse_time,
        }
    }

    pub fn is_identity(self) -> bool {
        self == Self::IDENTITY
    }

    /// Coefficients of the system seen in the new coordinates.
    pub fn apply(self, p: &ParameterPoint) -> ParameterPoint {
        let (sy, sz, st) = (self.flip_y, self.flip_z, self.reverse_time);
        ParameterPoint {
            b0: p.b0.signed(st),
            b1: p.b1.signed(st * sy * sz),
            b2: p.b2.signed(st * sy),
            b3: p.b3.signed(st * sz),
            c0: p.c0.signed(st),
            eps: p.eps,
        }
    }

    pub fn map_point(self, (y, z): (f64, f64)) -> (f64, f64) {
        (self.flip_y as f64 * y, self.flip_z as f64 * z)
    }
}

pub fn normalize(p: &ParameterPoint) -> Result<(ParameterPoint, SymmetryTransform), Error> {
    let base = validate_hypothesis(p);
    let structural: Vec<_> = base.violations.iter().copied().filter(|c| c.is_structural()).collect();
    if !structural.is_empty() {
        return Err(Error::NotNormalizable { point: p.to_string(), violated: structural });
    }
    for t in SymmetryTransform::ORDER {
        let q = t.apply(p);
        if validate_hypothesis(&q).is_ok() {
            return Ok((q, t));
        }
    }
    Err(Error::NotNormalizable { point: p.to_string(), violated: base.violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CaseId {
    pub major: u8,
    pub minor: u8,
    pub b1_sign: i8,
    /// Only set for case 4.2.
    pub c0_minus_b0_sign: Option<i8>,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.major, self.minor)
    }
}

pub fn determine_case(p: &ParameterPoint) -> Result<CaseId, Error> {
    let s = require_classifiable(p)?;
    case_from_signs(&s).ok_or_else(|| Error::Unclassifiable(format!("no case row matches {p}")))
}

pub(crate) fn case_from_signs(s: &SignTable) -> Option<CaseId> {
    use Sign::*;
    let (major, minor) = match (s.b2.is_zero(), s.b3.is_zero()) {
        (false, false) => match (s.b0, s.c0, s.c0_minus_b0) {
            (Positive, Negative, _) => (1, 1),
            (Positive, Positive, Negative) => (1, 2),
            (Positive, Positive, Positive) => (1, 3),
            (Positive, Zero, _) => (1, 4),
            (Zero, Positive, _) => (1, 5),
            _ => return None,
        },
        (true, false) => match (s.b0, s.c0, s.c0_minus_b0) {
            (Positive, Negative, _) => (2, 1),
            (Positive, Positive, Negative) => (2, 2),
            (Positive, Positive, Positive) => (2, 3),
            (Positive, Zero, _) => (2, 4),
            _ => return None,
        },
        (false, true) => match (s.b0, s.c0, s.c0_minus_b0) {
            (Positive, Negative, _) => (3, 1),
            (Positive, Positive, Positive) => (3, 2),
            (Positive, Positive, Negative) => (3, 3),
            (Zero, Positive, _) => (3, 4),
            _ => return None,
        },
        (true, true) => match (s.b0, s.c0) {
            (Positive, Negative) => (4, 1),
            (Positive, Positive) => (4, 2),
            _ => return None,
        },
    };
    Some(CaseId {
        major,
        minor,
        b1_sign: s.b1.as_i8(),
        c0_minus_b0_sign: (major == 4 && minor == 2).then(|| s.c0_minus_b0.as_i8()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        assert!(validate_hypothesis(&ParameterPoint::ints([2, 1, 1, 1, 1])).is_ok());
        assert_eq!(
            validate_hypothesis(&ParameterPoint::ints([1, 0, 1, 1, 2])).violations,
            vec![Condition::B1NonZero]
        );
        assert_eq!(
            validate_hypothesis(&ParameterPoint::ints([0, 1, 0, 1, 1])).violations,
            vec![Condition::B2OrB0NonZero]
        );
    }

    #[test]
    fn normalize_examples() {
        let (q, t) = normalize(&ParameterPoint::ints([2, 1, 1, 1, 1])).unwrap();
        assert!(t.is_identity());
        assert_eq!(q, ParameterPoint::ints([2, 1, 1, 1, 1]));

        let (q, t) = normalize(&ParameterPoint::ints([-2, -1, -1, -1, -1])).unwrap();
        assert_eq!(t.reverse_time, -1);
        assert_eq!(q, ParameterPoint::ints([2, 1, 1, 1, 1]));

        let (q, t) = normalize(&ParameterPoint::ints([2, -1, 1, 0, 1])).unwrap();
        assert_eq!(t.reverse_time, 1);
        assert_eq!(t.flip_y * t.flip_z, -1);
        assert_eq!(q.b1, Scalar::int(1));
    }

    #[test]
    fn normalize_rejects_structural_failures() {
        assert!(matches!(
            normalize(&ParameterPoint::ints([1, 1, 1, 1, 1])),
            Err(Error::NotNormalizable { .. })
        ));
        assert!(matches!(
            normalize(&ParameterPoint::ints([0, 1, 0, 1, 1])),
            Err(Error::NotNormalizable { .. })
        ));
    }

    #[test]
    fn case_examples() {
        let c = determine_case(&ParameterPoint::ints([1, 1, 1, 1, -1])).unwrap();
        assert_eq!((c.major, c.minor, c.b1_sign), (1, 1, 1));
        let c = determine_case(&ParameterPoint::ints([2, 1, 1, 1, 1])).unwrap();
        assert_eq!((c.major, c.minor, c.b1_sign), (1, 2, 1));
        let c = determine_case(&ParameterPoint::ints([1, 1, 0, 0, 2])).unwrap();
        assert_eq!((c.major, c.minor, c.b1_sign, c.c0_minus_b0_sign), (4, 2, 1, Some(1)));
    }

    #[test]
    fn negative_b1_in_degenerate_cases_is_still_classified() {
        let c = determine_case(&ParameterPoint::ints([1, -1, 0, 1, -1])).unwrap();
        assert_eq!((c.major, c.minor, c.b1_sign), (2, 1, -1));
    }

    #[test]
    fn float_points_use_tolerance() {
        let p = ParameterPoint::from_f64([1.0, 1.0, 1e-14, 1.0, 2.0]);
        let c = determine_case(&p).unwrap();
        assert_eq!(c.major, 2);
    }

    #[test]
    fn json_round_trip() {
        let p: ParameterPoint =
            serde_json::from_str(r#"{"b0":2,"b1":"1","b2":"1/2","b3":1.5,"c0":-1}"#).unwrap();
        assert_eq!(p.b2, Scalar::ratio(1, 2));
        assert_eq!(p.b3, Scalar::Float(1.5));
        let back: ParameterPoint = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
