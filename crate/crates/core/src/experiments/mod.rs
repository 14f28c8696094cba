//! Monte Carlo gain analysis, limited-feedback comparisons and realized
//! session simulation over packet traces.

mod gains;
mod session;
mod sweep;

pub use gains::{
    evaluate_realization, gains_for_channels, limited_feedback_gains, monte_carlo_gains, snr_sweep, GainConfig,
    GainReport, LimitedFeedbackReport, RealizationGains,
};
pub use session::{coherence_sweep, simulate_session, BlockOutcome, ModePolicy, SessionConfig, SessionResult};
pub use sweep::{SweepResult, SweepRow};

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Results come back in index order either way.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
