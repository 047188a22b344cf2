//! Crash-message deduplication.
//!
//! Messages are normalized before keying. Rules, applied in order:
//!
//! 1. timestamps (`2024-01-02T03:04:05.123Z`, bare dates, bare `hh:mm:ss`) → `<time>`
//! 2. hex addresses `0x...` → `<addr>`
//! 3. absolute paths (Unix `/a/b`, Windows `C:\a\b`) → `<path>`
//! 4. decimal thread ids after `thread` / `tid` → `<tid>`
//! 5. whitespace runs collapse to one space; ends are trimmed
//!
//! The normalized message itself is the key. Changing the rules bumps
//! [`NORMALIZATION_VERSION`], which is written into every dedup report.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

pub const NORMALIZATION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrashRecord {
    pub seed_id: String,
    pub run_id: String,
    #[serde(rename = "corpus")]
    pub corpus_name: String,
    pub message: String,
}

static RULES: LazyLock<Vec<(Regex, &'static str)>> = LazyLock::new(|| {
    let rule = |re: &str, rep: &'static str| (Regex::new(re).expect("valid rule"), rep);
    vec![
        rule(
            r"\b\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}:\d{2}(?:[.,]\d+)?(?:Z|[+-]\d{2}:?\d{2})?\b",
            "<time>",
        ),
        rule(r"\b\d{4}-\d{2}-\d{2}\b", "<time>"),
        rule(r"\b\d{1,2}:\d{2}:\d{2}(?:[.,]\d+)?\b", "<time>"),
        rule(r"\b0[xX][0-9a-fA-F]+\b", "<addr>"),
        rule(r#"(^|[\s'"(=\[,;])/[^\s'"()\[\],;:]+"#, "${1}<path>"),
        rule(r#"\b[A-Za-z]:\\[^\s'"()\[\],;:]*"#, "<path>"),
        rule(r"(?i)\b(thread|tid)(\s*[#=:\-]?\s*)\d+\b", "${1}${2}<tid>"),
    ]
});

pub fn normalize_message(message: &str) -> String {
    let mut text = message.to_owned();
    for (re, rep) in RULES.iter() {
        if re.is_match(&text) {
            text = re.replace_all(&text, *rep).into_owned();
        }
    }
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Distinct normalized messages, sorted. Records whose message normalizes to
/// nothing are ignored.
pub fn dedup(records: &[CrashRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| normalize_message(&r.message))
        .filter(|k| !k.is_empty())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Reads JSON Lines crash records; empty messages are rejected.
pub fn read_crash_records(path: &Path) -> Result<Vec<CrashRecord>> {
    let text = io::read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ctx = || format!("{} line {}", path.display(), i + 1);
        let rec: CrashRecord = serde_json::from_str(line).map_err(|e| Error::parse(ctx(), e))?;
        if normalize_message(&rec.message).is_empty() {
            return Err(Error::Validation(format!("{}: empty crash message", ctx())));
        }
        out.push(rec);
    }
    Ok(out)
}
