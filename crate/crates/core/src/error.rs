use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("4*pi*eta*rho0 = {value:.6e} cm^-2 is not positive; no confining slab family")]
    NonconfiningSign { value: f64 },

    #[error("k^2 = {k2:.6e} cm^-2 is not below the bound 4*pi*eta*rho0 = {bound:.6e} cm^-2")]
    InadmissibleK { k2: f64, bound: f64 },

    #[error("point lies within {h:.3e} cm of a region interface")]
    BoundaryPoint { h: f64 },

    #[error("1F1 is undefined for b = {b} (non-positive integer)")]
    PoleB { b: f64 },

    #[error("argument z = {z:.6e} outside the supported range")]
    RangeExceeded { z: f64 },

    #[error("invalid channel: l = {l}, 2j = {two_j}")]
    InvalidChannel { l: u32, two_j: u32 },

    #[error("radial integration overflowed at r = {r:.6e} cm")]
    Overflow { r: f64 },

    #[error("no decaying exterior solution for epsilon = {epsilon:.6e} cm^-2 (>= 0)")]
    NoDecaySeed { epsilon: f64 },

    #[error("no bound states in the searched window")]
    NoBoundStates,

    #[error("grid too coarse: h^2 * max|U| = {value:.3e} exceeds 0.1")]
    GridTooCoarse { value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
