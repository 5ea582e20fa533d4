use thiserror::Error;

use crate::surfaces::SurfaceId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {name} = {value} (lengths must be finite and > 0)")]
    InvalidGeometry { name: &'static str, value: f64 },

    #[error("surface {id} is not defined at d3 = {d3}")]
    SurfaceDomain { id: SurfaceId, d3: f64 },

    #[error("polynomial is identically zero")]
    IdenticallyZero,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
