//! History-dependent contextual hidden-variable model on finite-dimensional
//! Hilbert spaces.
//!
//! The crate builds contexts (orthonormal frames up to permutation and phase),
//! finest partitions and context-change unitaries between them, the phase-space
//! chart and tube geometry, and labeled ensembles whose value assignment depends
//! on the history of contexts visited.

pub mod context;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod linalg;
pub mod observable;
pub mod phase_space;
pub mod random;
pub mod scenarios;

pub use context::{
    change_unitary, contexts_equivalent, finest_partitions, is_stable, reduce_history, s_permutation, Context, ContextChange,
    ContextId, Frame, History, HistoryReduction, PartitionPair, Permutation,
};
pub use ensemble::{
    assign_value, assign_value_pullback, check_gfunc, check_ntrns, expectation_exact, expectation_mc, extend_history, label_of,
    position_of, prepare, LabeledEnsemble, ModelConfig, Split,
};
pub use error::{Error, Result};
pub use linalg::{jacobi_eigh, CMatrix, CVector, RMatrix, ValueTable, C64};
pub use observable::Observable;
pub use phase_space::{symplectic_volume_check, Chart, PhasePoint, TubeValue};
