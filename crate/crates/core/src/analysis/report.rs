use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{m_body, min_rotation_hausdorff, points, v_body, v_gain};
use super::robustness::{robustness_experiment, ChampionRecord};
use super::stats::{bootstrap_test, stars};
use crate::error::{Error, Result};

/// One line of an analysis CSV report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub champion_id: String,
    pub metric: String,
    pub value: f64,
}

impl ReportRow {
    pub fn new(champion_id: impl Into<String>, metric: impl Into<String>, value: f64) -> Self {
        ReportRow { champion_id: champion_id.into(), metric: metric.into(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub champions: usize,
    pub means: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: String,
    pub group_a: String,
    pub group_b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub raw_p: f64,
    pub corrected_p: f64,
    pub significance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: String,
    pub groups: BTreeMap<String, GroupSummary>,
    pub comparisons: Vec<Comparison>,
}

/// How the gain normalisation bounds are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainBounds {
    /// Bounds over all champions sharing a development rule.
    Treatment,
    /// Bounds over every champion analysed together.
    Global,
}

/// Group label of a champion: its development rule.
pub fn group_of(champion: &ChampionRecord) -> String {
    champion.development_rule.to_string()
}

/// Rotation-minimised Hausdorff distance for every unordered pair of
/// champions; `champion_id` is `a|b`.
pub fn diversity_rows(champions: &[ChampionRecord]) -> Result<Vec<ReportRow>> {
    let Some(first) = champions.first() else {
        return Ok(Vec::new());
    };
    let dims = first.phenotype.dims;
    if let Some(other) = champions.iter().find(|c| c.phenotype.dims != dims) {
        return Err(Error::Mismatch(format!(
            "champions {} ({}) and {} ({}) use different lattice dims",
            first.label, dims, other.label, other.phenotype.dims
        )));
    }
    let sets: Vec<_> = champions.iter().map(|c| points(&c.phenotype.voxel_coords())).collect();
    let mut rows = Vec::new();
    for i in 0..champions.len() {
        for j in i + 1..champions.len() {
            let d = min_rotation_hausdorff(&sets[i], &sets[j], dims)?;
            rows.push(ReportRow::new(
                format!("{}|{}", champions[i].label, champions[j].label),
                "min_rotation_hausdorff",
                d,
            ));
        }
    }
    Ok(rows)
}

/// `n_samples` robustness ratios per champion, in champion order.
pub fn robustness_rows<R: Rng + ?Sized>(
    champions: &[ChampionRecord],
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for champion in champions {
        for r in robustness_experiment(champion, n_samples, rng)? {
            rows.push(ReportRow::new(&champion.label, "robustness", r));
        }
    }
    Ok(rows)
}

/// Training fitness plus the three canalization metrics of every champion.
pub fn canalization_rows(champions: &[ChampionRecord], bounds: GainBounds) -> Result<Vec<ReportRow>> {
    let mut ranges: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for c in champions {
        let key = match bounds {
            GainBounds::Treatment => group_of(c),
            GainBounds::Global => String::new(),
        };
        let range = ranges.entry(key).or_insert((f64::INFINITY, f64::NEG_INFINITY));
        for g in c.gains() {
            range.0 = range.0.min(g);
            range.1 = range.1.max(g);
        }
    }

    let mut rows = Vec::new();
    for c in champions {
        let key = match bounds {
            GainBounds::Treatment => group_of(c),
            GainBounds::Global => String::new(),
        };
        let (lo, hi) = ranges[&key];
        let k0 = c.congenital_stiffness();
        let gains = c.gains();
        // a group with a single gain value has nothing to spread
        let gain_var = if hi > lo { v_gain(&gains, lo, hi)? } else { 0.0 };
        rows.push(ReportRow::new(&c.label, "fitness", c.train_fitness));
        rows.push(ReportRow::new(&c.label, "m_body", m_body(&k0, &c.final_stiffness)?));
        rows.push(ReportRow::new(&c.label, "v_body", v_body(&k0, &c.final_stiffness)?));
        rows.push(ReportRow::new(&c.label, "v_gain", gain_var));
    }
    Ok(rows)
}

/// Per-metric values of each group, in first-seen metric order.
fn grouped(rows: &[ReportRow], groups: &BTreeMap<String, String>) -> BTreeMap<String, BTreeMap<String, Vec<f64>>> {
    let mut out: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        let group = groups.get(&row.champion_id).cloned().unwrap_or_default();
        out.entry(group).or_default().entry(row.metric.clone()).or_default().push(row.value);
    }
    out
}

/// Group means of every metric. `groups` maps champion ids to group labels;
/// rows of unknown champions fall into the group "".
pub fn summarize(kind: &str, rows: &[ReportRow], groups: &BTreeMap<String, String>) -> Summary {
    let mut summary = Summary { kind: kind.to_string(), groups: BTreeMap::new(), comparisons: Vec::new() };
    for (group, metrics) in grouped(rows, groups) {
        let champions = groups.values().filter(|g| **g == group).count();
        let means = metrics
            .into_iter()
            .map(|(metric, values)| {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                (metric, mean)
            })
            .collect();
        summary.groups.insert(group, GroupSummary { champions, means });
    }
    summary
}

/// Bootstrap comparison of every pair of groups on every metric. Within a
/// metric the p-values are corrected for the number of group pairs.
pub fn compare<R: Rng + ?Sized>(
    rows: &[ReportRow],
    groups: &BTreeMap<String, String>,
    n_resamples: usize,
    rng: &mut R,
) -> Result<Summary> {
    let mut summary = summarize("compare", rows, groups);
    let by_group = grouped(rows, groups);
    if by_group.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need ≥ 2 groups to compare (found {})",
            by_group.len()
        )));
    }
    let names: Vec<&String> = by_group.keys().collect();
    let pairs = names.len() * (names.len() - 1) / 2;
    let mut metrics: Vec<&String> = by_group.values().flat_map(|m| m.keys()).collect();
    metrics.sort();
    metrics.dedup();
    for metric in metrics {
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                let (Some(a), Some(b)) = (by_group[names[i]].get(metric), by_group[names[j]].get(metric)) else {
                    continue;
                };
                let outcome = bootstrap_test(a, b, n_resamples, pairs, rng)?;
                summary.comparisons.push(Comparison {
                    metric: metric.clone(),
                    group_a: names[i].clone(),
                    group_b: names[j].clone(),
                    mean_a: a.iter().sum::<f64>() / a.len() as f64,
                    mean_b: b.iter().sum::<f64>() / b.len() as f64,
                    raw_p: outcome.raw_p,
                    corrected_p: outcome.corrected_p,
                    significance: stars(outcome.corrected_p).to_string(),
                });
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SeededRng;
    use rand::SeedableRng;

    fn rows() -> (Vec<ReportRow>, BTreeMap<String, String>) {
        let mut rows = Vec::new();
        let mut groups = BTreeMap::new();
        for i in 0..6 {
            let id = format!("c{i}");
            let group = if i < 3 { "none" } else { "stress" };
            groups.insert(id.clone(), group.to_string());
            rows.push(ReportRow::new(&id, "fitness", i as f64));
        }
        (rows, groups)
    }

    #[test]
    fn group_means() {
        let (rows, groups) = rows();
        let s = summarize("canalization", &rows, &groups);
        assert_eq!(s.groups["none"].means["fitness"], 1.0);
        assert_eq!(s.groups["stress"].means["fitness"], 4.0);
        assert_eq!(s.groups["stress"].champions, 3);
    }

    #[test]
    fn compare_needs_two_groups() {
        let (rows, mut groups) = rows();
        for g in groups.values_mut() {
            *g = "none".into();
        }
        let mut rng = SeededRng::seed_from_u64(0);
        let err = compare(&rows, &groups, 2000, &mut rng).unwrap_err();
        assert!(err.to_string().contains("need ≥ 2 groups"), "{err}");
    }

    #[test]
    fn compare_reports_every_pair() {
        let (rows, groups) = rows();
        let mut rng = SeededRng::seed_from_u64(0);
        let s = compare(&rows, &groups, 2000, &mut rng).unwrap();
        assert_eq!(s.comparisons.len(), 1);
        let c = &s.comparisons[0];
        assert_eq!((c.group_a.as_str(), c.group_b.as_str()), ("none", "stress"));
        assert_eq!(c.corrected_p, c.raw_p);
    }
}
