use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field}: {message}")]
    InvalidParameter { field: &'static str, message: &'static str },

    #[error("degenerate real pole; use factored forms")]
    DegeneratePole,

    #[error("closed form requires g = 0")]
    DipoleDipole,

    #[error("confluent case; perturb Ω_d")]
    Confluent,

    #[error("collective scale {which} has Im = {im:e} < 0; the bound state would grow")]
    GrowingExponent { which: &'static str, im: f64 },

    #[error("empty grid")]
    EmptyGrid,

    #[error("grid must be strictly increasing")]
    UnsortedGrid,

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("off-shell arguments: k1 + k2 - p1 - p2 = {0:e}")]
    OffShell(f64),

    #[error("window too narrow: {0}")]
    WindowTooNarrow(String),

    #[error("wavepacket: {0}")]
    Wavepacket(String),

    #[error("insufficient evolution time: atomic population {population:e} exceeds {tolerance:e} at t = {time}")]
    NotDecayed { population: f64, tolerance: f64, time: f64 },

    #[error("scenario file: {0}")]
    Scenario(String),
}
