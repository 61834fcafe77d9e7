//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be a power of two >= 16, got {0}")]
    BadGridSize(usize),

    #[error("domain length must be positive and finite, got {0}")]
    BadDomainLength(f64),

    #[error("fields live on different grids ({0}x{0} vs {1}x{1})")]
    GridMismatch(usize, usize),

    #[error("non-finite value at sample {index} (value {value})")]
    NonFinite { index: usize, value: f64 },

    #[error("multiplier is non-finite at mode ({kx}, {ky})")]
    MultiplierNonFinite { kx: i64, ky: i64 },

    #[error("scale relation unsolvable: no root N > e for s={s}, k={k}, lambda={lambda}")]
    ScaleRelationUnsolvable { s: f64, k: f64, lambda: f64 },

    #[error("parameter out of range: {0}")]
    BadParameter(String),

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("support overflow: piece radius {radius} exceeds torus margin {margin}")]
    SupportOverflow { radius: f64, margin: f64 },

    #[error("rotated copies overlap: {p}-fold arrangement on circle of radius {ring_radius} cannot hold pieces of diameter {piece_diameter}")]
    PiecesOverlap {
        p: usize,
        ring_radius: f64,
        piece_diameter: f64,
    },

    #[error("resolution deficit: finest resolvable piece is j={finest} (requested j={requested} needs wavenumber index {needed} > n/3 = {available})")]
    ResolutionDeficit {
        finest: usize,
        requested: usize,
        needed: usize,
        available: usize,
    },

    #[error("annulus separation violated between pieces {outer} and {inner}: need R_(j+1) <= R_j/4")]
    AnnulusSeparation { outer: usize, inner: usize },

    #[error("piece supports collide between j={0} and j={1}")]
    AnnulusCollision(usize, usize),

    #[error("norm order invalid: {0}")]
    BadNormOrder(String),

    #[error("field support too wide for the Slobodeckij evaluator: diameter {diameter} > L/4 = {limit}")]
    SupportTooWide { diameter: f64, limit: f64 },

    #[error("CFL violation at t={t}: dt*max|v|*n/L = {cfl} > {limit}")]
    CflViolation { t: f64, cfl: f64, limit: f64 },

    #[error("solution lost finiteness at t={t}; last good state returned separately")]
    BlowUp { t: f64 },

    #[error("saddle lost at t={t}: no velocity zero within {radius} of the expected location")]
    SaddleLost { t: f64, radius: f64 },

    #[error("deformation stretches support beyond the torus margin at t={t}")]
    DeformationOverflow { t: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("snapshot version mismatch: expected {expected}, found {found}")]
    SnapshotVersion { expected: u32, found: String },

    #[error("snapshot dimension mismatch: sidecar says n={n} ({expected} bytes) but payload has {found} bytes")]
    SnapshotDimension { n: usize, expected: usize, found: usize },

    #[error("snapshot truncated: expected {expected} bytes, found {found}")]
    SnapshotTruncated { expected: usize, found: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
