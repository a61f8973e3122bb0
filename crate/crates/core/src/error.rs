use thiserror::Error;

use crate::jet::ChartPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("immersion degenerates (zero homogeneous vector) at {0}")]
    Degenerate(ChartPoint),
    #[error("not an immersion at {0}: tangent map has rank < 2")]
    NotImmersion(ChartPoint),
    #[error("numerical degeneracy: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("node {node} failed: {source}")]
    Node {
        node: ChartPoint,
        #[source]
        source: Box<GeomError>,
    },
}

pub type Result<T> = std::result::Result<T, GeomError>;
