use crate::geom::{GeomError, PointId};
use crate::tri::EdgeKey;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("coordinate of point {0} is not finite")]
    NonFinite(usize),
    #[error("points {0} and {1} have identical coordinates")]
    DuplicatePoint(PointId, PointId),
    #[error("vertex id {0} is out of range")]
    InvalidVertex(PointId),
    #[error("edge {0} is a self-loop")]
    SelfLoop(PointId),
    #[error("edge {0} appears more than once")]
    DuplicateEdge(EdgeKey),
    #[error("edges {0} and {1} cross")]
    NotPlanar(EdgeKey, EdgeKey),
    #[error("edge {0} cannot be flipped")]
    NotFlippable(EdgeKey),
    #[error("{0} is not an edge")]
    NotAnEdge(EdgeKey),
    #[error("not a triangulation: {0}")]
    NotATriangulation(String),
    #[error("at least 3 points are required, got {0}")]
    TooFewPoints(usize),
    #[error("vertex sets differ")]
    VertexMismatch,
    #[error("vertex {0} is present in both triangulations")]
    IdCollision(PointId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("probability {0} outside (0, 1]")]
    InvalidProbability(f64),
    #[error("input triangulation is not Delaunay")]
    NotDelaunay,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
