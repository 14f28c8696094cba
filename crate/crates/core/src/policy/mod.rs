//! Stream ordering, thresholds, MCS and mode selection, and the interleaver.

mod interleaver;
mod mcs;
mod plan;
mod thresholds;

pub use interleaver::{build_interleaver, sequential_schedule, Assignment, InterleaverMap};
pub use mcs::{baseline_mcs, select_mcs, BaselineChoice, McsChoice};
pub use plan::{
    plan_for_mode, select_mode, stream_snrs, ModeCandidate, ModeDecision, PlanConfig, PlanRecord, PrecoderSource,
    StreamRecord, TransmissionPlan,
};
pub use thresholds::{
    apply_order, bottleneck, classify_packets, delivered_quality, evaluate_mapping_wt, optimal_thresholds,
    order_streams, transmission_times, weighted_throughput_baseline, weighted_throughput_load_balanced,
    weighted_throughput_prioritized, ThresholdPolicy, BOTTLENECK_TOLERANCE,
};
