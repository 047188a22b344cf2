//! Venn-style overlap between two or three sets of unique keys.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetSummary {
    pub name: String,
    pub total: usize,
}

/// Keys in exactly the member sets and in none of the others.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VennCell {
    pub members: Vec<String>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapReport {
    pub sets: Vec<SetSummary>,
    /// Exclusive regions, ordered by member count then set order.
    pub cells: Vec<VennCell>,
    /// Plain intersections `|A ∩ B|`, `|A ∩ B ∩ C|` (not exclusive).
    pub intersections: Vec<VennCell>,
}

impl OverlapReport {
    /// Exclusive cell count for exactly `members`.
    pub fn cell(&self, members: &[&str]) -> Option<usize> {
        self.cells
            .iter()
            .find(|c| {
                c.members.len() == members.len()
                    && members.iter().all(|m| c.members.iter().any(|x| x == m))
            })
            .map(|c| c.count)
    }

    pub fn intersection(&self, members: &[&str]) -> Option<usize> {
        self.intersections
            .iter()
            .find(|c| {
                c.members.len() == members.len()
                    && members.iter().all(|m| c.members.iter().any(|x| x == m))
            })
            .map(|c| c.count)
    }

    /// Aligned text table, one row per region.
    pub fn to_table(&self) -> String {
        let label = |members: &[String]| members.join(" & ");
        let rows: Vec<(String, String, usize)> = self
            .sets
            .iter()
            .map(|s| ("total".to_owned(), s.name.clone(), s.total))
            .chain(
                self.cells
                    .iter()
                    .map(|c| ("only".to_owned(), label(&c.members), c.count)),
            )
            .chain(
                self.intersections
                    .iter()
                    .map(|c| ("intersection".to_owned(), label(&c.members), c.count)),
            )
            .collect();
        let w0 = rows
            .iter()
            .map(|r| r.0.len())
            .max()
            .unwrap_or(0)
            .max("region".len());
        let w1 = rows
            .iter()
            .map(|r| r.1.len())
            .max()
            .unwrap_or(0)
            .max("sets".len());
        let mut out = String::new();
        let _ = writeln!(out, "{:<w0$}  {:<w1$}  count", "region", "sets");
        for (kind, sets, count) in rows {
            let _ = writeln!(out, "{kind:<w0$}  {sets:<w1$}  {count:>5}");
        }
        out
    }
}

fn masks_by_size(k: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks
}

pub fn overlap(sets: &[(String, Vec<String>)]) -> Result<OverlapReport> {
    if !(2..=3).contains(&sets.len()) {
        return Err(Error::Parameter(format!(
            "overlap needs 2 or 3 sets, got {}",
            sets.len()
        )));
    }
    let names: BTreeSet<&str> = sets.iter().map(|(n, _)| n.as_str()).collect();
    if names.len() != sets.len() {
        return Err(Error::Parameter(
            "overlap set names must be distinct".into(),
        ));
    }

    let keyed: Vec<BTreeSet<&str>> = sets
        .iter()
        .map(|(_, keys)| keys.iter().map(String::as_str).collect())
        .collect();
    let universe: BTreeSet<&str> = keyed.iter().flatten().copied().collect();
    let k = sets.len();
    let mut exclusive = vec![0usize; 1 << k];
    for key in universe {
        let mask = keyed
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(key))
            .fold(0usize, |m, (i, _)| m | (1 << i));
        exclusive[mask] += 1;
    }

    let members = |mask: u32| -> Vec<String> {
        (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| sets[i].0.clone())
            .collect()
    };
    let masks = masks_by_size(k);
    let cells = masks
        .iter()
        .map(|&m| VennCell {
            members: members(m),
            count: exclusive[m as usize],
        })
        .collect();
    let intersections = masks
        .iter()
        .filter(|m| m.count_ones() >= 2)
        .map(|&m| VennCell {
            members: members(m),
            count: (0..exclusive.len())
                .filter(|&cell| cell as u32 & m == m)
                .map(|cell| exclusive[cell])
                .sum(),
        })
        .collect();
    Ok(OverlapReport {
        sets: sets
            .iter()
            .zip(&keyed)
            .map(|((name, _), s)| SetSummary {
                name: name.clone(),
                total: s.len(),
            })
            .collect(),
        cells,
        intersections,
    })
}
