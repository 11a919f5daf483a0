//! Parameter sweeps: classify many points and tally the classes.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::global::{PortraitLabel, RClass};
use crate::parameter_domain::ParameterPoint;
use crate::report::{classify, ClassifyOptions, SCHEMA};
use crate::scalar::Scalar;

pub const PARAMS: [&str; 5] = ["b0", "b1", "b2", "b3", "c0"];

/// Range of one coordinate of a grid: a constant or `[lo, hi, steps]`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Axis {
    Fixed(f64),
    Range(f64, f64, usize),
}

impl Axis {
    /// Grid values as exact rationals, so strata such as `b2 b3 = b1 c0` are
    /// hit exactly whenever the grid contains them.
    fn values(&self) -> Vec<Scalar> {
        let exact = Scalar::from_f64_exact;
        match *self {
            Axis::Fixed(x) => vec![exact(x)],
            Axis::Range(lo, _, 1) => vec![exact(lo)],
            Axis::Range(lo, hi, n) => {
                let (Some(a), Some(b)) = (BigRational::from_float(lo), BigRational::from_float(hi)) else {
                    return Vec::new();
                };
                let d = BigRational::from_integer((n as i64 - 1).into());
                (0..n)
                    .map(|i| {
                        let t = BigRational::from_integer((i as i64).into());
                        Scalar::Exact(&a + (&b - &a) * t / &d)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct RandomSpec {
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "box", default = "default_box")]
    pub bounds: (f64, f64),
}

fn default_box() -> (f64, f64) {
    (-3.0, 3.0)
}

/// Sweep description. Any combination of the three sources may be given;
/// samples are listed grid first, then random, then explicit points.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<BTreeMap<String, Axis>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<[f64; 5]>,
}

impl SweepSpec {
    pub fn samples(&self) -> Result<Vec<ParameterPoint>, String> {
        let mut out = Vec::new();
        if let Some(grid) = &self.grid {
            if let Some(k) = grid.keys().find(|k| !PARAMS.contains(&k.as_str())) {
                return Err(format!("unknown grid parameter `{k}`"));
            }
            let axes: Vec<Vec<Scalar>> = PARAMS
                .iter()
                .map(|k| grid.get(*k).map(Axis::values).ok_or_else(|| format!("grid is missing `{k}`")))
                .collect::<Result<_, _>>()?;
            let mut idx = [0usize; 5];
            if axes.iter().all(|a| !a.is_empty()) {
                loop {
                    let c = |i: usize| axes[i][idx[i]].clone();
                    out.push(ParameterPoint::new(c(0), c(1), c(2), c(3), c(4)));
                    let mut k = 4;
                    loop {
                        idx[k] += 1;
                        if idx[k] < axes[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                    }
                    if idx.iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
        }
        if let Some(r) = &self.random {
            let (lo, hi) = r.bounds;
            if !(lo < hi) {
                return Err(format!("empty sampling box [{lo}, {hi}]"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
            for _ in 0..r.n {
                let v: [f64; 5] = std::array::from_fn(|_| rng.gen_range(lo..hi));
                out.push(ParameterPoint::from_f64(v));
            }
        }
        for v in &self.points {
            out.push(ParameterPoint::new(
                Scalar::from_f64_exact(v[0]),
                Scalar::from_f64_exact(v[1]),
                Scalar::from_f64_exact(v[2]),
                Scalar::from_f64_exact(v[3]),
                Scalar::from_f64_exact(v[4]),
            ));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleFailure {
    pub index: usize,
    pub point: ParameterPoint,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub index: usize,
    pub point: ParameterPoint,
    pub table: RClass,
    pub traced: Option<RClass>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Census {
    pub schema: &'static str,
    pub samples: usize,
    pub classified: usize,
    #[serde(rename = "G_counts")]
    pub g_counts: BTreeMap<PortraitLabel, usize>,
    #[serde(rename = "R_counts")]
    pub r_counts: BTreeMap<RClass, usize>,
    /// Every observed class lies in R1..R13.
    pub support_ok: bool,
    pub with_tracing: bool,
    pub traced_agree: usize,
    pub disagreements: Vec<Disagreement>,
    pub failures: Vec<SampleFailure>,
}

/// Classifies all samples in parallel; the report does not depend on the
/// number of worker threads.
pub fn sweep(points: &[ParameterPoint], opts: &ClassifyOptions) -> Census {
    let results: Vec<_> = points.par_iter().map(|p| classify(p, opts)).collect();
    let mut g_counts = BTreeMap::new();
    let mut r_counts = BTreeMap::new();
    let mut failures = Vec::new();
    let mut disagreements = Vec::new();
    let mut classified = 0;
    let mut traced_agree = 0;
    let mut support_ok = true;
    for (index, (p, res)) in points.iter().zip(results).enumerate() {
        match res {
            Ok(c) => {
                classified += 1;
                *g_counts.entry(c.g).or_insert(0) += 1;
                *r_counts.entry(c.r).or_insert(0) += 1;
                support_ok &= (1..=13).contains(&c.r.0);
                if let Some(t) = &c.traced {
                    if t.r == Some(c.r) {
                        traced_agree += 1;
                    } else {
                        disagreements.push(Disagreement {
                            index,
                            point: p.clone(),
                            table: c.r,
                            traced: t.r,
                            flags: c.flags.clone(),
                        });
                    }
                }
            }
            Err(e) => failures.push(SampleFailure { index, point: p.clone(), error: e.to_string() }),
        }
    }
    Census {
        schema: SCHEMA,
        samples: points.len(),
        classified,
        g_counts,
        r_counts,
        support_ok,
        with_tracing: opts.with_tracing,
        traced_agree,
        disagreements,
        failures,
    }
}

impl Census {
    pub fn classes(&self) -> Vec<RClass> {
        self.r_counts.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_exact_and_ordered() {
        let spec: SweepSpec = serde_json::from_str(
            r#"{"grid": {"b0": 2, "b1": 1, "b2": 1, "b3": 1, "c0": [0.5, 1.5, 3]}}"#,
        )
        .unwrap();
        let pts = spec.samples().unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1], ParameterPoint::ints([2, 1, 1, 1, 1]));
        let census = sweep(&pts, &ClassifyOptions::default());
        assert_eq!(census.g_counts.keys().map(|g| g.0).collect::<Vec<_>>(), [3, 4, 5]);
    }

    #[test]
    fn random_sampling_is_reproducible() {
        let spec: SweepSpec = serde_json::from_str(r#"{"random": {"n": 20, "seed": 7, "box": [-3, 3]}}"#).unwrap();
        assert_eq!(spec.samples().unwrap(), spec.samples().unwrap());
        assert!(serde_json::from_str::<SweepSpec>(r#"{"grdi": {}}"#).is_err());
    }
}
