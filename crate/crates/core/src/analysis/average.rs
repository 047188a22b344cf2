use crate::error::{Error, Result};

/// Mean of per-run counts; `counts.len()` must equal `repetitions` (≥ 1).
pub fn average_runs(counts: &[u64], repetitions: usize) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::Parameter("repetitions must be at least 1".into()));
    }
    if counts.len() != repetitions {
        return Err(Error::Parameter(format!(
            "expected {repetitions} run counts, got {}",
            counts.len()
        )));
    }
    Ok(counts.iter().map(|&c| c as f64).sum::<f64>() / repetitions as f64)
}

/// One-decimal rendering used in reports (`5.4`, `7.0`).
pub fn format_mean(mean: f64) -> String {
    format!("{mean:.1}")
}
