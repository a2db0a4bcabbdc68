//! Cost model of the unrolled decoder: complexity recursions, pipeline
//! schedules with and without register reduction/balancing, and
//! throughput/latency/energy arithmetic.

mod complexity;
mod report;
mod schedule;

pub use complexity::{memory_complexity, memory_complexity_closed_form, time_complexity};
pub use report::{cost_report, CostReport};
pub use schedule::{
    buffer_table, calibrate_period_for_depth, pack_chain, schedule_pipeline, unbalanced_schedule, DelayModel,
    NodeBuffer, Op, OpKind, PipelineSchedule, Stage,
};
