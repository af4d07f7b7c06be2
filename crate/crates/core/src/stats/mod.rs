//! Group comparisons: Welch's t-test and G² keyness.

mod keyness;
pub mod special;
mod ttest;

pub use keyness::{
    g2, keyness, word_counts, KeynessEntry, KeynessRanking, WordCounts, DEFAULT_MIN_TOTAL,
};
pub use ttest::{student_t_cdf, welch_t, TTestResult};
