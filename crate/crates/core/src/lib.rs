//! Gentle bound quivers of cluster-tilted type: the φ invariant, tilting
//! mutations, normal forms and reduction to them.

pub mod anatomy;
pub mod cycles;
pub mod families;
pub mod format;
pub mod generate;
pub mod gentle;
pub mod iso;
pub mod mutation;
pub mod phi;
pub mod quiver;
pub mod reduction;

pub use anatomy::{Attachment, Side};
pub use cycles::{classify_cycles, ClassifyError, CycleReport, Orientation};
pub use families::{
    bb10_shape, build_generalized_normal_form, build_normal_form, decide_derived_equivalent, extract_params,
    phi_collision_demo, phi_formula, recognize_branched, recognize_m_cluster_tilted, shift_cycles, Bb10Shape,
    CollisionReport, ConditionResult, DerivedParams, FamilyError, NormalFormParams, RecognitionReport,
};
pub use format::{parse_quiver, parse_trace, serialize_quiver, serialize_trace, ParseError};
pub use gentle::{is_gentle, validate_gentle, Condition, GentleReport, Violation};
pub use iso::{isomorphic, Isomorphism};
pub use mutation::{
    apply_trace, can_mutate, eligible_steps, mutate, MutationError, MutationKind, MutationStep, MutationTrace,
};
pub use phi::{compute_phi, enumerate_threads, PhiError, PhiInvariant};
pub use quiver::{BoundQuiver, QuiverError};
pub use reduction::{
    is_solar, measure, reduce, solarize, to_m_cluster_tilted_form, Measure, Reduction, ReductionError, ReductionStep,
};
