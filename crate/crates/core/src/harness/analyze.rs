//! The analysis pipeline over a replication set: per-condition normality
//! checks, Levene's homogeneity test, ANOVA (two-way when the plan has two
//! factors), effect sizes and Tukey pairwise comparisons at a
//! Bonferroni-corrected alpha. Emitted as structured JSON.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::stats::{
    anova_oneway, anova_twoway, bonferroni, describe, ks_normality, levene, tukey_hsd,
    KsTest, LeveneTest, OneWayAnova, TwoWayAnova,
};

use super::ReplicationSet;

/// Analysis-ready view of a replication set: per condition, one metric map
/// per replication. Built from a [`ReplicationSet`] or parsed from an
/// exported CSV.
#[derive(Debug, Clone)]
pub struct AnalysisInput {
    pub experiment: String,
    pub conditions: Vec<ConditionSamples>,
}

#[derive(Debug, Clone)]
pub struct ConditionSamples {
    pub label: String,
    pub factor_a: String,
    pub factor_b: Option<String>,
    /// One map per replication: metric column -> value (absent groups omit
    /// the key).
    pub replications: Vec<BTreeMap<String, f64>>,
}

impl From<&ReplicationSet> for AnalysisInput {
    fn from(set: &ReplicationSet) -> Self {
        let conditions = set
            .plan
            .conditions
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let replications = set
                    .records
                    .iter()
                    .filter(|r| r.condition == idx)
                    .map(|r| {
                        let mut map = BTreeMap::new();
                        for col in crate::metrics::RunMetrics::COLUMNS {
                            if let Some(v) = r.metrics.get(col) {
                                map.insert(col.to_string(), v);
                            }
                        }
                        map
                    })
                    .collect();
                ConditionSamples {
                    label: c.label.clone(),
                    factor_a: c.factor_a.clone(),
                    factor_b: c.factor_b.clone(),
                    replications,
                }
            })
            .collect();
        AnalysisInput {
            experiment: set.plan.name.clone(),
            conditions,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionStats {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub ks: Option<KsTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TukeySummary {
    pub corrected_alpha: f64,
    pub q_critical: f64,
    pub pairs: Vec<TukeyPair>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TukeyPair {
    pub left: String,
    pub right: String,
    pub mean_difference: f64,
    pub q: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoWaySummary {
    pub factor_a: String,
    pub factor_b: String,
    pub table: TwoWayAnova,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariableReport {
    pub variable: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub conditions: Vec<ConditionStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levene: Option<LeveneTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anova: Option<OneWayAnova>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anova_two_way: Option<TwoWaySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tukey: Option<TukeySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub experiment: String,
    pub alpha: f64,
    pub bonferroni_corrected_alpha: f64,
    pub variables: Vec<VariableReport>,
}

/// Runs the full protocol for each dependent variable. Statistical failures
/// on one variable are reported inline and do not abort the others.
pub fn analyze(input: &AnalysisInput, variables: &[String], alpha: f64) -> AnalysisReport {
    let corrected = bonferroni(alpha, variables.len().max(1));
    let reports = variables
        .iter()
        .map(|v| analyze_variable(input, v, alpha, corrected))
        .collect();
    AnalysisReport {
        experiment: input.experiment.clone(),
        alpha,
        bonferroni_corrected_alpha: corrected,
        variables: reports,
    }
}

fn analyze_variable(
    input: &AnalysisInput,
    variable: &str,
    _alpha: f64,
    corrected_alpha: f64,
) -> VariableReport {
    let mut notes = Vec::new();

    // Collect per-condition samples; a replication missing the variable
    // (absent staff group) fails this variable only.
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for c in &input.conditions {
        let mut values = Vec::with_capacity(c.replications.len());
        for (i, rep) in c.replications.iter().enumerate() {
            match rep.get(variable) {
                Some(&v) => values.push(v),
                None => {
                    return VariableReport {
                        variable: variable.to_string(),
                        notes,
                        conditions: Vec::new(),
                        levene: None,
                        anova: None,
                        anova_two_way: None,
                        tukey: None,
                        error: Some(format!(
                            "`{variable}` absent in condition `{}` replication {i}",
                            c.label
                        )),
                    }
                }
            }
        }
        groups.push((c.label.clone(), values));
    }

    let conditions: Vec<ConditionStats> = groups
        .iter()
        .map(|(label, values)| {
            let d = describe(values).unwrap_or(crate::stats::Descriptives {
                n: values.len(),
                mean: values.iter().sum::<f64>() / values.len().max(1) as f64,
                sd: 0.0,
            });
            let (ks, ks_note) = match ks_normality(values) {
                Ok(ks) => (Some(ks), None),
                Err(e) => (None, Some(format!("normality not tested: {e}"))),
            };
            ConditionStats {
                label: label.clone(),
                n: d.n,
                mean: d.mean,
                sd: d.sd,
                ks,
                ks_note,
            }
        })
        .collect();

    if groups.len() < 2 {
        notes.push("single condition: ANOVA and post-hoc tests skipped".to_string());
        return VariableReport {
            variable: variable.to_string(),
            notes,
            conditions,
            levene: None,
            anova: None,
            anova_two_way: None,
            tukey: None,
            error: None,
        };
    }

    let slices: Vec<&[f64]> = groups.iter().map(|(_, v)| v.as_slice()).collect();
    let levene_result = match levene(&slices) {
        Ok(l) => {
            if l.degenerate {
                notes.push("Levene degenerate (all deviations zero); reported p = 1".into());
            }
            Some(l)
        }
        Err(e) => {
            notes.push(format!("Levene not computed: {e}"));
            None
        }
    };

    let two_way = two_way_layout(input, variable);
    let anova = match (&two_way, anova_oneway(&slices)) {
        (Some(_), _) => None,
        (None, Ok(a)) => Some(a),
        (None, Err(e)) => {
            notes.push(format!("ANOVA not computed: {e}"));
            None
        }
    };

    let tukey = match tukey_hsd(&slices, corrected_alpha) {
        Ok(t) => Some(TukeySummary {
            corrected_alpha,
            q_critical: t.q_critical,
            pairs: t
                .comparisons
                .iter()
                .map(|c| TukeyPair {
                    left: groups[c.group_i].0.clone(),
                    right: groups[c.group_j].0.clone(),
                    mean_difference: c.mean_difference,
                    q: c.q,
                    p: c.p,
                    significant: c.significant,
                })
                .collect(),
        }),
        Err(e) => {
            notes.push(format!("Tukey not computed: {e}"));
            None
        }
    };

    VariableReport {
        variable: variable.to_string(),
        notes,
        conditions,
        levene: levene_result,
        anova,
        anova_two_way: two_way,
        tukey,
        error: None,
    }
}

/// Builds the balanced two-way cell layout when every condition carries a
/// second factor. Returns `None` for one-factor plans or ragged grids.
fn two_way_layout(input: &AnalysisInput, variable: &str) -> Option<TwoWaySummary> {
    if input
        .conditions
        .iter()
        .any(|c| c.factor_b.is_none() || c.replications.is_empty())
    {
        return None;
    }
    let mut a_levels: Vec<&str> = Vec::new();
    let mut b_levels: Vec<&str> = Vec::new();
    for c in &input.conditions {
        let a = c.factor_a.as_str();
        let b = c.factor_b.as_deref().unwrap();
        if !a_levels.contains(&a) {
            a_levels.push(a);
        }
        if !b_levels.contains(&b) {
            b_levels.push(b);
        }
    }
    if a_levels.len() < 2 || b_levels.len() < 2 {
        return None;
    }
    if input.conditions.len() != a_levels.len() * b_levels.len() {
        return None;
    }
    let mut cells = vec![vec![Vec::new(); b_levels.len()]; a_levels.len()];
    for c in &input.conditions {
        let i = a_levels.iter().position(|&a| a == c.factor_a).unwrap();
        let j = b_levels
            .iter()
            .position(|&b| b == c.factor_b.as_deref().unwrap())
            .unwrap();
        let values: Option<Vec<f64>> = c
            .replications
            .iter()
            .map(|rep| rep.get(variable).copied())
            .collect();
        cells[i][j] = values?;
    }
    match anova_twoway(&cells) {
        Ok(table) => Some(TwoWaySummary {
            factor_a: "factor_a".into(),
            factor_b: "factor_b".into(),
            table,
        }),
        // Ragged or too-small grids simply fall back to the one-way path.
        Err(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_input(two_way: bool) -> AnalysisInput {
        // Deterministic synthetic metric values with clear group separation.
        let mut conditions = Vec::new();
        let levels = if two_way { 4 } else { 3 };
        for c in 0..levels {
            let (fa, fb) = if two_way {
                (format!("a{}", c / 2), Some(format!("b{}", c % 2)))
            } else {
                (c.to_string(), None)
            };
            let replications = (0..10)
                .map(|r| {
                    let mut m = BTreeMap::new();
                    let jitter = ((r * 7 + c * 3) % 5) as f64 * 0.1;
                    m.insert("kpi".to_string(), 10.0 * c as f64 + jitter);
                    m
                })
                .collect();
            conditions.push(ConditionSamples {
                label: format!("cond{c}"),
                factor_a: fa,
                factor_b: fb,
                replications,
            });
        }
        AnalysisInput {
            experiment: "synthetic".into(),
            conditions,
        }
    }

    #[test]
    fn bonferroni_alpha_matches_variable_count() {
        let input = synthetic_input(false);
        let report3 = analyze(&input, &["kpi".into(), "kpi".into(), "kpi".into()], 0.05);
        assert!((report3.bonferroni_corrected_alpha - 0.05 / 3.0).abs() < 1e-12);
        let five = vec!["kpi".to_string(); 5];
        let report5 = analyze(&input, &five, 0.05);
        assert!((report5.bonferroni_corrected_alpha - 0.01).abs() < 1e-12);
    }

    #[test]
    fn one_way_report_includes_anova_and_tukey() {
        let input = synthetic_input(false);
        let report = analyze(&input, &["kpi".into()], 0.05);
        let v = &report.variables[0];
        assert!(v.error.is_none());
        let anova = v.anova.as_ref().unwrap();
        assert!(anova.between.p < 1e-10);
        let tukey = v.tukey.as_ref().unwrap();
        assert!(tukey.pairs.iter().all(|p| p.significant));
    }

    #[test]
    fn two_factor_plan_runs_two_way_anova() {
        let input = synthetic_input(true);
        let report = analyze(&input, &["kpi".into()], 0.05);
        let v = &report.variables[0];
        let tw = v.anova_two_way.as_ref().unwrap();
        assert!(tw.table.factor_a.p < 0.01);
        assert!(v.anova.is_none());
    }

    #[test]
    fn single_condition_skips_anova_with_note() {
        let mut input = synthetic_input(false);
        input.conditions.truncate(1);
        let report = analyze(&input, &["kpi".into()], 0.05);
        let v = &report.variables[0];
        assert!(v.anova.is_none());
        assert!(v.notes.iter().any(|n| n.contains("single condition")));
    }

    #[test]
    fn missing_variable_errors_without_aborting_others() {
        let input = synthetic_input(false);
        let report = analyze(&input, &["absent".into(), "kpi".into()], 0.05);
        assert!(report.variables[0].error.is_some());
        assert!(report.variables[1].error.is_none());
    }
}
