//! Packet loss-visibility scoring and the running visibility distribution.

mod glm;
mod kde;
mod trace;

pub use glm::{dequantize, estimate_visibility, logistic, logit, packet_visibility, quantize, GlmModel};
pub use kde::{update_distribution, KdeParams, Kernel, VisibilityDistribution, VisibilityWindow};
pub use trace::{
    ingest_trace, mean_packet_size, read_trace, read_trace_with_model, sample_iid_trace, write_trace, FrameSpec,
    GopSource, PacketRecord,
};
