//! Post-hoc analysis of evolved champions: geometric diversity, robustness
//! to random stiffness, canalization statistics and bootstrap comparisons.

mod metrics;
mod report;
mod robustness;
mod stats;

pub use metrics::{hausdorff, m_body, min_rotation_hausdorff, points, rotations, v_body, v_gain, variance, Point};
pub use report::{
    canalization_rows, compare, diversity_rows, group_of, robustness_rows, summarize, Comparison, GainBounds,
    GroupSummary, ReportRow, Summary,
};
pub use robustness::{log_uniform_stiffness, robustness_experiment, robustness_with, ChampionRecord};
pub use stats::{bonferroni, bootstrap_test, stars, BootstrapOutcome, DEFAULT_RESAMPLES, MIN_RESAMPLES};
