//! Classification of a single parameter point, as reported by the CLI.

use serde::Serialize;

use crate::error::Error;
use crate::global::{
    assemble_global, class_from_invariants, class_invariants, classes_table, connection_quantity,
    detect_connection_boundary, mask, r_class, ConnectionReport, PortraitLabel, RClass, FLAG_NEAR_CONNECTION,
};
use crate::infinite::OriginLabel;
use crate::parameter_domain::{normalize, ParameterPoint, Quantity, SymmetryTransform};
use crate::sectors::verify_origin_sectors;
use crate::skeleton::{compute_invariants, SeparatrixSkeleton};
use crate::tracer::{trace_separatrices, IntegratorConfig};

pub const SCHEMA: &str = "kolportrait/1";
pub const FLAG_TRACING_DISAGREES: &str = "tracing_disagrees";
pub const FLAG_CONNECTION_DISAGREES: &str = "connection_detector_disagrees";
pub const FLAG_NEAR_STRATUM: &str = "near_stratum";

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub eps_conn: f64,
    /// Distance to a classification stratum below which results are flagged.
    pub stratum_margin: f64,
    pub with_tracing: bool,
    /// Run the numeric connection detector where the case has a connection stratum.
    pub detect_connection: bool,
    pub check_sectors: bool,
    pub cfg: IntegratorConfig,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            eps_conn: crate::global::DEFAULT_EPS_CONN,
            stratum_margin: 1e-3,
            with_tracing: false,
            detect_connection: false,
            check_sectors: false,
            cfg: IntegratorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Traced {
    pub invariants: serde_json::Value,
    #[serde(rename = "R")]
    pub r: Option<RClass>,
    pub edges: usize,
    pub regions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub schema: &'static str,
    pub input: ParameterPoint,
    pub normalized: ParameterPoint,
    pub transform: SymmetryTransform,
    pub case: String,
    pub b1_sign: i8,
    #[serde(rename = "O1")]
    pub o1: OriginLabel,
    #[serde(rename = "O2")]
    pub o2: OriginLabel,
    #[serde(rename = "G")]
    pub g: PortraitLabel,
    #[serde(rename = "R")]
    pub r: RClass,
    pub class: u8,
    pub invariants: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traced: Option<Traced>,
    pub flags: Vec<String>,
    #[serde(skip)]
    pub skeleton: Option<SeparatrixSkeleton>,
}

/// Smallest absolute value among the nonzero sign-deciding quantities of a
/// normalized point.
pub fn stratum_margin(p: &ParameterPoint) -> f64 {
    use Quantity::*;
    let mut qs = vec![B0, B1, B2, B3, C0, C0MinusB0];
    if let Ok(case) = crate::parameter_domain::determine_case(p) {
        qs.extend(connection_quantity(&case));
    }
    qs.into_iter()
        .filter(|&q| !p.sign(q).is_zero())
        .map(|q| p.value(q).0.abs())
        .fold(f64::INFINITY, f64::min)
}

pub fn classify(p: &ParameterPoint, opts: &ClassifyOptions) -> Result<Classification, Error> {
    let (q, transform) = normalize(p)?;
    let global = assemble_global(&q)?;
    let r = r_class(global.g);
    let mut flags = Vec::new();

    if opts.check_sectors {
        verify_origin_sectors(&q, global.o1.chart(), global.o1)?;
        verify_origin_sectors(&q, global.o2.chart(), global.o2)?;
    }

    let mut connection = None;
    if let Some(cq) = connection_quantity(&global.case) {
        if q.value(cq).0.abs() <= opts.eps_conn {
            flags.push(FLAG_NEAR_CONNECTION.to_string());
        }
        if opts.detect_connection || opts.with_tracing {
            let rep = detect_connection_boundary(&q, opts.eps_conn, &opts.cfg)?;
            if rep.traced.is_some() && !rep.agrees() {
                flags.push(FLAG_CONNECTION_DISAGREES.to_string());
            }
            connection = Some(rep);
        }
    }
    if stratum_margin(&q) <= opts.stratum_margin {
        flags.push(FLAG_NEAR_STRATUM.to_string());
    }

    let mut traced = None;
    let mut skeleton = None;
    if opts.with_tracing {
        let s = trace_separatrices(&q, &opts.cfg)?;
        let v = compute_invariants(&s)?;
        let tr = class_from_invariants(&v);
        if tr != Some(r) {
            flags.push(FLAG_TRACING_DISAGREES.to_string());
        }
        flags.extend(s.flags.iter().cloned());
        traced = Some(Traced {
            invariants: mask(&v, tr.unwrap_or(r)).as_json(),
            r: tr,
            edges: s.edges.len(),
            regions: s.regions.len(),
        });
        skeleton = Some(s.transformed(transform));
    }
    flags.sort();
    flags.dedup();

    Ok(Classification {
        schema: SCHEMA,
        input: p.clone(),
        normalized: q,
        transform,
        case: global.case.to_string(),
        b1_sign: global.case.b1_sign,
        o1: global.o1,
        o2: global.o2,
        g: global.g,
        r,
        class: classes_table(global.g),
        invariants: class_invariants(r).as_json(),
        connection,
        traced,
        flags,
        skeleton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn worked_example_json() {
        let p = ParameterPoint::ints([2, 1, 1, 1, 1]);
        let c = classify(&p, &ClassifyOptions::default()).unwrap();
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j["schema"], "kolportrait/1");
        assert_eq!(j["case"], "1.2");
        assert_eq!(j["b1_sign"], 1);
        assert_eq!(j["O1"], "L1_2");
        assert_eq!(j["O2"], "L2_1");
        assert_eq!(j["G"], "G4");
        assert_eq!(j["R"], "R3");
        assert_eq!(j["invariants"], serde_json::json!([3, 1, 1, 2, null, null]));
        assert!(c.flags.contains(&FLAG_NEAR_CONNECTION.to_string()));
    }

    #[test]
    fn normalization_is_applied() {
        // Reversing time maps this point onto the worked example.
        let p = ParameterPoint::new(
            Scalar::int(-2),
            Scalar::int(-1),
            Scalar::int(-1),
            Scalar::int(-1),
            Scalar::ratio(-1, 2),
        );
        let c = classify(&p, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.g, PortraitLabel(3));
        assert_eq!(c.transform.reverse_time, -1);
    }

    #[test]
    fn stratum_margin_ignores_exact_zeros() {
        let p = ParameterPoint::ints([1, 1, 0, 0, 2]);
        assert_eq!(stratum_margin(&p), 1.0);
    }
}
