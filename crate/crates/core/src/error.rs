use crate::lattice::{Edge, Vertex};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vertices {0:?} and {1:?} are not adjacent")]
    NotAdjacent(Vertex, Vertex),
    #[error("invalid parallelogram [{a},{b}]x[{c},{d}]")]
    InvalidRegion { a: i32, b: i32, c: i32, d: i32 },
    #[error("vertex {0:?} lies outside the domain")]
    OutsideDomain(Vertex),
    #[error("edge {0:?} lies outside the domain")]
    EdgeOutsideDomain(Edge),
    #[error("edge set is not a barrier")]
    NotABarrier,
    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("graph has {edges} edges, exact enumeration is capped at {cap}")]
    SizeExceeded { edges: usize, cap: usize },
    #[error("conditioning event has zero probability")]
    ZeroProbabilityCondition,
    #[error("FK cluster of {0:?} touches the box boundary")]
    ClusterTouchesBoundary(Vertex),
    #[error("malformed crossing: {0}")]
    MalformedCrossing(&'static str),
    #[error("malformed path: {0}")]
    MalformedPath(&'static str),
    #[error("event is not decreasing")]
    NotDecreasing,
    #[error("sampler argument {name} must be at least 1")]
    ZeroSweeps { name: &'static str },
    #[error("cannot parse region literal: {0}")]
    Parse(&'static str),
    #[error("configuration length {got} does not match {expected}")]
    LengthMismatch { expected: usize, got: usize },
}
