//! Experiment orchestration: batched spatial elections, per-rule voter
//! satisfaction under two measures, and deterministic CSV aggregation.

use crate::election::Committee;
use crate::euclidean::{
    build_euclidean_election, generate_issue_profile, issue_satisfactions, sample_beta_scaled,
    EuclideanConfig, EuclideanError, IssueModelConfig,
};
use crate::phragmen::{run_float, EngineError};
use crate::rules::{RuleParseError, RuleSpec, TieRule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Rule(#[from] RuleParseError),
    #[error("rule {0:?} is not a purchase-process rule; the simulation pipeline only runs those")]
    UnsupportedRule(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Euclidean(#[from] EuclideanError),
}

fn default_xi() -> Vec<f64> {
    vec![0.2]
}

fn default_issues() -> usize {
    100
}

fn default_tau() -> f64 {
    30.0
}

fn default_delta() -> f64 {
    120.0
}

fn default_groups() -> [f64; 2] {
    [-1.0 / 3.0, 1.0 / 3.0]
}

/// Experiment description, loadable from TOML or JSON.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Beta shape pairs, one scenario group per pair.
    pub distributions: Vec<[f64; 2]>,
    /// Approval radii; scenarios are the product with `distributions`.
    #[serde(default = "default_xi")]
    pub xi: Vec<f64>,
    /// Rule grammar strings, e.g. `alpha:geom:0.5`, `classic`,
    /// `beta:exp:0.9:100`.
    pub rules: Vec<String>,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub runs: usize,
    /// Issue count for the decision measure.
    #[serde(default = "default_issues")]
    pub p: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub seed: u64,
    /// Interior group boundaries partitioning `[-1, 1]` into left, center
    /// and right voter groups.
    #[serde(default = "default_groups")]
    pub groups: [f64; 2],
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if self.distributions.is_empty() || self.rules.is_empty() {
            return Err(HarnessError::Config(
                "need at least one distribution and one rule".into(),
            ));
        }
        if !(self.groups[0] > -1.0 && self.groups[0] < self.groups[1] && self.groups[1] < 1.0) {
            return Err(HarnessError::Config(
                "group boundaries must satisfy -1 < g0 < g1 < 1".into(),
            ));
        }
        Ok(())
    }
}

/// Parses a config document, accepting JSON (leading `{`) or TOML.
pub fn parse_config(text: &str) -> Result<SimConfig, HarnessError> {
    let trimmed = text.trim_start();
    let cfg: SimConfig = if trimmed.starts_with('{') {
        serde_json::from_str(trimmed).map_err(|e| HarnessError::Config(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Pooled mean/spread of one scenario-rule cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub beta_a: f64,
    pub beta_b: f64,
    pub xi: f64,
    pub rule: String,
    pub repr_avg: f64,
    pub repr_std: f64,
    pub decision_avg: f64,
    pub decision_std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNum {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotRow {
    pub beta_a: f64,
    pub beta_b: f64,
    pub xi: f64,
    pub rule: String,
    /// `representatives` or `decisions`.
    pub measure: &'static str,
    /// `left`, `center` or `right`.
    pub group: &'static str,
    pub stats: FiveNum,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    pub rows: Vec<SummaryRow>,
    /// Rows for empty groups are absent.
    pub boxplots: Vec<BoxplotRow>,
}

/// Raw per-voter satisfaction records, one line per (run, voter, rule).
pub type RawCsv = String;

struct RunData {
    positions: Vec<f64>,
    /// Per rule: representative counts and decision satisfactions per voter.
    per_rule: Vec<(Vec<u32>, Vec<f64>)>,
}

pub fn run_experiment(cfg: &SimConfig) -> Result<RunSummary, HarnessError> {
    Ok(run_experiment_with_options(cfg, false)?.0)
}

/// Runs every scenario; with `keep_raw` also renders the raw per-voter CSV.
///
/// Within a run, one sampled election and one issue-stance matrix are shared
/// by all rules, so rule comparisons are paired. The per-run RNG stream is
/// `seed XOR global_run_index`, making runs independent of scheduling and
/// worker count.
pub fn run_experiment_with_options(
    cfg: &SimConfig,
    keep_raw: bool,
) -> Result<(RunSummary, Option<RawCsv>), HarnessError> {
    cfg.validate()?;
    let rules: Vec<(String, RuleSpec)> = cfg
        .rules
        .iter()
        .map(|s| Ok((s.clone(), RuleSpec::parse(s)?)))
        .collect::<Result<_, HarnessError>>()?;
    for (name, rule) in &rules {
        if !matches!(rule, RuleSpec::Phragmen { .. }) {
            return Err(HarnessError::UnsupportedRule(name.clone()));
        }
    }

    let mut summary = RunSummary::default();
    let mut raw = keep_raw.then(|| {
        let mut s = String::new();
        s.push_str(
            "beta_a,beta_b,xi,rule,run,voter,position,representatives,decision_satisfaction\n",
        );
        s
    });

    let mut scenario_index = 0u64;
    for dist in &cfg.distributions {
        for &xi in &cfg.xi {
            let runs: Vec<RunData> = (0..cfg.runs)
                .into_par_iter()
                .map(|r| {
                    let global = scenario_index * cfg.runs as u64 + r as u64;
                    run_one(cfg, &rules, *dist, xi, global)
                })
                .collect::<Result<_, _>>()?;

            for (rule_idx, (rule_name, _)) in rules.iter().enumerate() {
                let mut repr_values: Vec<f64> = Vec::with_capacity(cfg.runs * cfg.n);
                let mut decision_values: Vec<f64> = Vec::with_capacity(cfg.runs * cfg.n);
                let mut positions: Vec<f64> = Vec::with_capacity(cfg.runs * cfg.n);
                for run in &runs {
                    let (repr, decision) = &run.per_rule[rule_idx];
                    positions.extend_from_slice(&run.positions);
                    repr_values.extend(repr.iter().map(|&c| c as f64));
                    decision_values.extend_from_slice(decision);
                }
                let (repr_avg, repr_std) = mean_and_std(&repr_values);
                let (decision_avg, decision_std) = mean_and_std(&decision_values);
                summary.rows.push(SummaryRow {
                    beta_a: dist[0],
                    beta_b: dist[1],
                    xi,
                    rule: rule_name.clone(),
                    repr_avg,
                    repr_std,
                    decision_avg,
                    decision_std,
                });
                for (measure, values) in [
                    ("representatives", &repr_values),
                    ("decisions", &decision_values),
                ] {
                    let groups = group_boxplot_stats(&positions, values, &cfg.groups);
                    for (group_name, stats) in ["left", "center", "right"].into_iter().zip(groups) {
                        if let Some(stats) = stats {
                            summary.boxplots.push(BoxplotRow {
                                beta_a: dist[0],
                                beta_b: dist[1],
                                xi,
                                rule: rule_name.clone(),
                                measure,
                                group: group_name,
                                stats,
                            });
                        }
                    }
                }
            }

            if let Some(raw) = raw.as_mut() {
                for (r, run) in runs.iter().enumerate() {
                    for (rule_idx, (rule_name, _)) in rules.iter().enumerate() {
                        let (repr, decision) = &run.per_rule[rule_idx];
                        for v in 0..cfg.n {
                            let _ = writeln!(
                                raw,
                                "{},{},{},{},{},{},{:.6},{},{:.6}",
                                dist[0],
                                dist[1],
                                xi,
                                rule_name,
                                r,
                                v + 1,
                                run.positions[v],
                                repr[v],
                                decision[v]
                            );
                        }
                    }
                }
            }
            scenario_index += 1;
        }
    }
    Ok((summary, raw))
}

fn run_one(
    cfg: &SimConfig,
    rules: &[(String, RuleSpec)],
    dist: [f64; 2],
    xi: f64,
    global_index: u64,
) -> Result<RunData, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ global_index);
    let ecfg = EuclideanConfig {
        beta_a: dist[0],
        beta_b: dist[1],
        num_voters: cfg.n,
        num_candidates: cfg.m,
        committee_size: cfg.k,
        xi,
        seed: cfg.seed ^ global_index,
    };
    let pe = build_euclidean_election(&ecfg, &mut rng)?;
    let issue_positions: Vec<f64> = (0..cfg.p)
        .map(|_| sample_beta_scaled(dist[0], dist[1], &mut rng))
        .collect();
    let all_positions: Vec<f64> = pe
        .voter_positions
        .iter()
        .chain(&pe.candidate_positions)
        .copied()
        .collect();
    let issue_cfg = IssueModelConfig {
        issues: cfg.p,
        tau: cfg.tau,
        delta: cfg.delta,
    };
    let profile = generate_issue_profile(&all_positions, &issue_positions, &issue_cfg, &mut rng);

    let mut per_rule = Vec::with_capacity(rules.len());
    for (_, rule) in rules {
        let RuleSpec::Phragmen { alpha, beta } = rule else {
            unreachable!("validated in run_experiment");
        };
        let trace = run_float(&pe.election, alpha, beta, &TieRule::LexCandidate, 1e-9)?;
        let committee: &Committee = &trace.committee;
        let w_set = committee.as_bitset(cfg.m);
        let repr: Vec<u32> = (0..cfg.n)
            .map(|v| pe.election.approval_set(v).intersection_count(&w_set) as u32)
            .collect();
        let decision = issue_satisfactions(&profile, cfg.n, committee);
        per_rule.push((repr, decision));
    }
    Ok(RunData {
        positions: pe.voter_positions,
        per_rule,
    })
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for v in values {
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / count;
    let variance = (sumsq / count - mean * mean).max(0.0);
    (mean, variance.sqrt())
}

/// Linear-interpolation quantile (the common "type 7" definition) of a
/// sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Five-number summaries of `satisfactions` split into the three position
/// groups `[-1, g0)`, `[g0, g1]`, `(g1, 1]`. Empty groups yield `None`.
pub fn group_boxplot_stats(
    positions: &[f64],
    satisfactions: &[f64],
    boundaries: &[f64; 2],
) -> [Option<FiveNum>; 3] {
    assert_eq!(positions.len(), satisfactions.len());
    let mut groups: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (&pos, &sat) in positions.iter().zip(satisfactions) {
        let g = if pos < boundaries[0] {
            0
        } else if pos <= boundaries[1] {
            1
        } else {
            2
        };
        groups[g].push(sat);
    }
    groups.map(|mut values| {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        Some(FiveNum {
            min: values[0],
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
            max: values[values.len() - 1],
        })
    })
}

/// Renders the per-cell summary, one row per (distribution, xi, rule).
pub fn summary_csv(summary: &RunSummary) -> String {
    let mut out =
        String::from("beta_a,beta_b,xi,rule,repr_avg,repr_std,decision_avg,decision_std\n");
    for row in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            row.beta_a,
            row.beta_b,
            row.xi,
            row.rule,
            row.repr_avg,
            row.repr_std,
            row.decision_avg,
            row.decision_std
        );
    }
    out
}

pub fn boxplot_csv(summary: &RunSummary) -> String {
    let mut out = String::from("beta_a,beta_b,xi,rule,measure,group,min,q1,median,q3,max\n");
    for row in &summary.boxplots {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            row.beta_a,
            row.beta_b,
            row.xi,
            row.rule,
            row.measure,
            row.group,
            row.stats.min,
            row.stats.q1,
            row.stats.median,
            row.stats.q3,
            row.stats.max
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SimConfig {
        parse_config(
            r#"
            distributions = [[2.0, 2.0]]
            xi = [0.2]
            rules = ["alpha:geom:0.5", "classic", "beta:exp:0.9:100"]
            n = 60
            m = 40
            k = 8
            runs = 12
            p = 40
            seed = 7
            "#,
        )
        .unwrap()
    }

    #[test]
    fn config_parses_from_toml_and_json() {
        let cfg = small_config();
        assert_eq!(cfg.tau, 30.0);
        assert_eq!(cfg.delta, 120.0);
        assert_eq!(cfg.groups, [-1.0 / 3.0, 1.0 / 3.0]);

        let json = r#"{
            "distributions": [[0.5, 2.0]],
            "rules": ["classic"],
            "n": 10, "m": 8, "k": 2, "runs": 1, "seed": 3
        }"#;
        let cfg = parse_config(json).unwrap();
        assert_eq!(cfg.xi, vec![0.2]);

        assert!(parse_config("runs = 0").is_err());
        let bad_rule = r#"{
            "distributions": [[1.0, 1.0]], "rules": ["thiele:pav"],
            "n": 5, "m": 4, "k": 2, "runs": 1, "seed": 1
        }"#;
        let cfg = parse_config(bad_rule).unwrap();
        assert!(matches!(
            run_experiment(&cfg),
            Err(HarnessError::UnsupportedRule(_))
        ));
    }

    #[test]
    fn boxplot_quartiles_are_textbook() {
        let positions = [-0.9, -0.8, -0.7, -0.6, -0.5];
        let values = [1.0, 2.0, 3.0, 4.0, 5.0];
        let [left, center, right] =
            group_boxplot_stats(&positions, &values, &[-1.0 / 3.0, 1.0 / 3.0]);
        let left = left.unwrap();
        assert_eq!(left.median, 3.0);
        assert_eq!(left.q1, 2.0);
        assert_eq!(left.q3, 4.0);
        assert_eq!(left.min, 1.0);
        assert_eq!(left.max, 5.0);
        assert!(center.is_none() && right.is_none());

        // Degenerate box when all values coincide.
        let [g, _, _] = group_boxplot_stats(&[-0.5, -0.6], &[2.5, 2.5], &[-1.0 / 3.0, 1.0 / 3.0]);
        let g = g.unwrap();
        assert!(g.min == 2.5 && g.q1 == 2.5 && g.median == 2.5 && g.q3 == 2.5 && g.max == 2.5);
    }

    #[test]
    fn pipeline_is_deterministic_and_consistent() {
        let cfg = small_config();
        let (summary, raw) = run_experiment_with_options(&cfg, true).unwrap();
        assert_eq!(summary.rows.len(), 3);
        let again = run_experiment(&cfg).unwrap();
        assert_eq!(summary_csv(&summary), summary_csv(&again));
        assert_eq!(boxplot_csv(&summary), boxplot_csv(&again));
        let raw = raw.unwrap();
        assert_eq!(raw.lines().count(), 1 + 12 * 3 * 60);

        // Decision satisfactions are probabilities.
        for row in &summary.rows {
            assert!(row.decision_avg >= 0.0 && row.decision_avg <= 1.0);
            assert!(row.repr_std >= 0.0 && row.decision_std >= 0.0);
        }
        for b in &summary.boxplots {
            let s = b.stats;
            assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        }
    }

    #[test]
    fn skewed_societies_favor_dense_regions_under_slowing_speeds() {
        // With voters massed left of center, the center group's median
        // decision satisfaction under the degressive rule beats the sparse
        // right group's.
        let cfg = parse_config(
            r#"
            distributions = [[2.0, 4.0]]
            xi = [0.2]
            rules = ["alpha:geom:0.5"]
            n = 200
            m = 150
            k = 25
            runs = 60
            p = 100
            seed = 31
            "#,
        )
        .unwrap();
        let summary = run_experiment(&cfg).unwrap();
        let median = |group: &str| {
            summary
                .boxplots
                .iter()
                .find(|b| b.measure == "decisions" && b.group == group)
                .expect("group present")
                .stats
                .median
        };
        assert!(
            median("center") > median("right"),
            "center {} vs right {}",
            median("center"),
            median("right")
        );
    }

    #[test]
    fn representation_totals_match_committee_coverage() {
        // Double-counting identity on a single run: summed voter
        // representation equals summed committee approver counts.
        let cfg = SimConfig {
            runs: 1,
            ..small_config()
        };
        let rules: Vec<(String, RuleSpec)> = cfg
            .rules
            .iter()
            .map(|s| (s.clone(), RuleSpec::parse(s).unwrap()))
            .collect();
        let data = run_one(&cfg, &rules, [2.0, 2.0], 0.2, 0).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let pe = build_euclidean_election(
            &EuclideanConfig {
                beta_a: 2.0,
                beta_b: 2.0,
                num_voters: cfg.n,
                num_candidates: cfg.m,
                committee_size: cfg.k,
                xi: 0.2,
                seed: cfg.seed,
            },
            &mut rng,
        )
        .unwrap();
        for (rule_idx, (_, rule)) in rules.iter().enumerate() {
            let RuleSpec::Phragmen { alpha, beta } = rule else {
                unreachable!()
            };
            let trace = run_float(&pe.election, alpha, beta, &TieRule::LexCandidate, 1e-9).unwrap();
            let by_committee: usize = trace
                .committee
                .members()
                .iter()
                .map(|&c| pe.election.approver_count(c))
                .sum();
            let by_voters: u32 = data.per_rule[rule_idx].0.iter().sum();
            assert_eq!(by_voters as usize, by_committee);
        }
    }
}
