//! Joint-value label space and the tables defined on it: the real weight
//! (quasi-probability) table, the complex amplitude table and their
//! phase-space realizations.

mod consistent;
mod phase_space;
mod weight;
mod ztable;

pub use consistent::{consistent_set, consistent_set_with_threshold, LabelSpace, LabelTuple, ZERO_OVERLAP_THRESHOLD};
pub use phase_space::{
    discrete_wigner, phase_space_label_state, proportionality, reinject, LabeledPhaseSpaceState, PhaseSpaceGrid,
    WignerTable, MIN_WIGNER_POINTS,
};
pub use weight::{weight_table, WeightTable, WEIGHT_IMAG_TOL};
pub use ztable::{marginal_residual, z_table, SolverParams, ZTable};
