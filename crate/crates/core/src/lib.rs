//! Double-sequence summability: spaces, duals, and 4-dimensional matrix
//! transformations.
//!
//! The crate works with doubly-indexed sequences `x = (x_{mn})` and the
//! operator pair Δ (double difference) / S (rectangular partial sums). On top
//! of those it provides finite-window certifiers for the Pringsheim, bounded,
//! and regular convergence notions, membership checks for the classical
//! double-sequence spaces and their Δ-domains, dual-space conditions, and
//! condition batteries for 4-D matrix classes.
//!
//! Everything numeric is deterministic: integer inputs stay on an exact
//! `i64` path until an operation overflows, and float reductions run in a
//! fixed association order, so repeated runs are bit-identical.

pub mod config;
pub mod convergence;
pub mod difference;
pub mod duality;
pub mod error;
pub mod grid;
pub mod json;
pub mod matclass;
pub mod matrix;
pub mod scalar;
pub mod seq;
pub mod spaces;
pub mod window;
pub mod zmap;

pub use config::RunConfig;
pub use convergence::{
    bounded, certify_rule, lq_norm_delta, lq_sum, p_limit, r_limit, sup_norm_delta, v_sum,
    ConvergenceReport, Rule, Verdict, WindowEvidence,
};
pub use difference::{
    apply_4d, apply_4d_window, delta, e_to_f, inv_delta, ApplyReport, RowOutcome,
};
pub use duality::{
    alpha_dual_dossier, alpha_pairing_abs, b_matrix, check_f1, check_f2, check_f3, check_lu_abs,
    pairing_partial_sums, AlphaDossier, DualConditionReport, DualVerdict,
};
pub use error::{Error, Result};
pub use grid::{Grid, Table};
pub use json::{mat_from_json, mat_from_str, seq_from_json, seq_from_str};
pub use matclass::{
    check_class, check_domain_class, corollary_check, ClassId, ClassReport, ConditionReport,
    ConditionWitness,
};
pub use matrix::FourDimMatrix;
pub use scalar::{Scalar, ValueKind};
pub use seq::{catalog, DoubleSequence};
pub use spaces::{
    inclusion_ids, inclusion_implications, member, run_atlas, standard_catalog, AtlasReport,
    CatalogEntry, MembershipVerdict, Outcome, SpaceId,
};
pub use window::{Window, WindowSchedule};
pub use zmap::{flatten, phi, phi_inv};
