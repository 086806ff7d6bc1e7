use thiserror::Error;

/// Everything that can go wrong while building maps, evolving states or running sweeps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count must be at least 1")]
    ZeroModes,

    #[error("at least one inner-loop pass is required")]
    ZeroPasses,

    #[error("iteration/trial count must be at least 1")]
    ZeroIterations,

    #[error("pass {pass}: expected {expected} beamsplitter settings, found {found}")]
    WrongSettingCount {
        pass: usize,
        expected: usize,
        found: usize,
    },

    #[error("pass {pass}: beamsplitter at t={t} must be the swap matrix")]
    BoundaryViolation { pass: usize, t: usize },

    #[error("beamsplitter setting is not unitary (deviation {deviation:.3e})")]
    NonUnitarySetting { deviation: f64 },

    #[error("expected a single-pass sequence, got {0} passes")]
    NotSinglePass(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty list of maps")]
    EmptyMapList,

    #[error("permanent of a {n}x{n} matrix exceeds the cap of {cap}")]
    PermanentTooLarge { n: usize, cap: usize },

    #[error("{name} = {value} is outside [0, 1]")]
    EfficiencyOutOfRange { name: &'static str, value: f64 },

    #[error("similarity is undefined for an all-zero matrix")]
    ZeroMatrix,

    #[error("occupation has length {found}, expected {expected}")]
    OccupationLength { expected: usize, found: usize },

    #[error("photon number mismatch: {input} in, {output} out")]
    PhotonNumberMismatch { input: usize, output: usize },

    #[error("Fock basis of {size} states exceeds the cap of {cap}")]
    BasisTooLarge { size: u128, cap: usize },

    #[error("map is not contractive (singular value {0})")]
    NonContractive(f64),

    #[error("shift {shift} violates the bin-confusion bound {bound}")]
    BinConfusion { shift: f64, bound: f64 },

    #[error("input photon is not in region A")]
    InputNotInRegionA,

    #[error("photon left in the inner loop after the final beamsplitter")]
    PhotonInLoop,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Coarse category for machine-readable reporting: `config`, `io` or `model`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_)
            | Error::Json(_)
            | Error::ZeroModes
            | Error::ZeroPasses
            | Error::ZeroIterations
            | Error::EfficiencyOutOfRange { .. }
            | Error::InvalidParameter(_)
            | Error::BinConfusion { .. }
            | Error::OccupationLength { .. }
            | Error::PermanentTooLarge { .. }
            | Error::BasisTooLarge { .. } => "config",
            Error::Io(_) | Error::Csv(_) => "io",
            _ => "model",
        }
    }
}
