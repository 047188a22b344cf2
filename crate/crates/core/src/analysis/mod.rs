//! Post-campaign analysis: unique inconsistencies, overlap between corpora
//! and averaging over repetitions.

pub mod average;
pub mod dedup;
pub mod overlap;

pub use average::{average_runs, format_mean};
pub use dedup::{dedup, normalize_message, read_crash_records, CrashRecord, NORMALIZATION_VERSION};
pub use overlap::{overlap, OverlapReport, VennCell};
