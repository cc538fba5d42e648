use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (max |U^dagger U - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("frame is not orthonormal (max |<v_i|v_j> - delta_ij| = {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("contexts are equivalent; no context change is defined between them")]
    EquivalentContexts,

    #[error("overlap blocks do not span equal subspaces (projector residual {residual:e})")]
    SpanMismatch { residual: f64 },

    #[error("operator does not map frame vector {index} onto a frame vector")]
    NotPermutation { index: usize },

    #[error("history must contain at least one context")]
    EmptyHistory,

    #[error("context at history position {position} is equivalent to its predecessor")]
    RepeatedContext { position: usize },

    #[error("point lies in the tubes of two distinct eigenspaces")]
    AmbiguousTube,

    #[error("epsilon {0} outside (0, sqrt(2)/2)")]
    InvalidEpsilon(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("block {block}: source mass {source_mass} differs from target mass {target_mass}")]
    BlockMassMismatch {
        block: usize,
        source_mass: f64,
        target_mass: f64,
    },

    #[error("coordinate u = {u} is not covered by any segment")]
    UnlabeledPoint { u: f64 },

    #[error("label {label} carries zero mass")]
    ZeroMassLabel { label: usize },

    #[error("observable is not stable in the current context")]
    NotStable,

    #[error("value undefined for sample {sample}")]
    UndefinedValue { sample: usize },

    #[error("no table entry for eigenvalue {0}")]
    MissingTableEntry(f64),

    #[error("eigenvalue {0} has no match in the supplied spectrum")]
    SpectrumMismatch(f64),

    #[error("gFUNC violated at sample {sample}: {detail}")]
    GFuncViolation { sample: usize, detail: String },

    #[error("n-TRNS violated at sample {sample}: {detail}")]
    NTrnsViolation { sample: usize, detail: String },

    #[error("assertion '{check}' failed: {detail}")]
    AssertionFailure { check: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that signal a violated model property rather than bad input.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Error::GFuncViolation { .. }
                | Error::NTrnsViolation { .. }
                | Error::AssertionFailure { .. }
                | Error::UndefinedValue { .. }
                | Error::AmbiguousTube
                | Error::BlockMassMismatch { .. }
                | Error::UnlabeledPoint { .. }
                | Error::NotPermutation { .. }
                | Error::NoConvergence { .. }
        )
    }
}
