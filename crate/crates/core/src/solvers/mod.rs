//! Stochastic PDHG, its rescaled variant, restart schemes, schedules and bounds.

mod bounds;
mod radius;
mod restart;
mod schedule;
mod spdhg;
mod stopping;

pub use bounds::{
    bound_expectation, bound_high_probability, bound_rescaled_det, bound_rescaled_var, complexity_det, complexity_stoc,
    horizon_rescaled_det, horizon_rescaled_stoc, restart_radius, restart_stage_count, BoundKind, BoundReport, BoundTerms,
};
pub use radius::{estimate_initial_radius, RadiusEstimate};
pub use restart::{restart_deterministic, restart_stochastic, RestartConfig, RestartPlan, StageRecord, StageRecords};
pub use schedule::{
    default_rhos, rescaled_eta, verify_schedule, ConditionReport, ScheduleKind, ScheduleCondition, ScheduleParams, Sequence,
    Violation,
};
pub use spdhg::{
    geometric_checkpoints, hat_sequence_step, run_spdhg, run_spdhg_rescaled, spdhg_step, Checkpoint, HatState, IterateState,
    Observer, RunOptions, RunRecord,
};
pub use stopping::{gradient_mapping_stop, StopCheck};
