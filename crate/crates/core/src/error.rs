use thiserror::Error;

use crate::parameter_domain::Condition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{point} cannot be brought into the admissible region (violates {})", join(violated))]
    NotNormalizable { point: String, violated: Vec<Condition> },
    #[error("unclassifiable parameters: {0}")]
    Unclassifiable(String),
    #[error("table mismatch at {id}: eigenvalues give {from_eigenvalues}, table row gives {from_table}")]
    TableMismatch { id: String, from_eigenvalues: String, from_table: String },
    #[error("direction u0 = 0 is a chart origin, not a point of the infinity line")]
    DegenerateDirection,
    #[error("point ({x}, {y}) is not covered by chart {chart}")]
    OutOfChart { chart: String, x: f64, y: f64 },
    #[error("sector mismatch for {label}: expected {expected}, observed {observed}")]
    SectorMismatch { label: String, expected: String, observed: String },
    #[error("malformed skeleton: {0}")]
    MalformedSkeleton(String),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

fn join(c: &[Condition]) -> String {
    c.iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
}
