use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis dimension {requested} exceeds the cap {cap}")]
    DimensionOverflow { requested: u128, cap: usize },

    #[error("operators live on different truncated bases")]
    BasisMismatch,

    #[error("non-finite amplitude at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("truncation radius {radius} leaves no safe interior for hop range {hop_range} at depth {depth}")]
    EmptyInterior {
        radius: usize,
        hop_range: usize,
        depth: usize,
    },

    #[error("window {window} too large: needs window + candidate radius {candidate_radius} <= M - hop range ({limit})")]
    WindowTooLarge {
        window: usize,
        candidate_radius: usize,
        limit: usize,
    },

    #[error("wandering check failed: max violation {max_violation:e}, cyclic defect {cyclic_defect:e}")]
    NotWandering {
        max_violation: f64,
        cyclic_defect: f64,
    },

    #[error("generators do not commute: defect {0:e}")]
    GeneratorsDoNotCommute(f64),

    #[error("operator is not covariant: commutator with generator {generator} has norm {norm:e}")]
    NotCovariant { generator: usize, norm: f64 },

    #[error("hop range {hop_range} exceeds what truncation radius {radius} can resolve")]
    HopRangeExceedsTruncation { hop_range: usize, radius: usize },

    #[error("torus point {t:?} is outside the label range {orders:?}")]
    LabelOutOfRange { t: Vec<usize>, orders: Vec<usize> },

    #[error("invariant violated: {check} (residual {residual:e})")]
    InvariantViolation { check: String, residual: f64 },

    #[error("invalid flux p/q = {p}/{q}: gcd must be 1")]
    InvalidFlux { p: u64, q: u64 },

    #[error("operator is not Hermitian: defect {0:e}")]
    NotHermitian(f64),

    #[error("band index {index} out of range for {bands} bands")]
    BandIndexOutOfRange { index: usize, bands: usize },

    #[error("spectral gap {gap:e} below floor {floor:e} at node {node:?}")]
    GapTooSmall { node: Vec<f64>, gap: f64, floor: f64 },

    #[error("plaquette {plaquette:?} has flux {flux} too close to ±π; refine the grid beyond L = {points}")]
    InadmissiblePlaquette {
        plaquette: (usize, usize),
        flux: f64,
        points: usize,
    },

    #[error("expected a {expected}-dimensional torus grid, got {found}")]
    GridDimension { expected: usize, found: usize },
}
