//! Replication runner and the preset experiment families: staffing
//! validation, satisfaction-weight sensitivity, and the three
//! management-practice experiments.

mod analyze;
mod export;

pub use analyze::{
    analyze, AnalysisInput, AnalysisReport, ConditionSamples, ConditionStats, TukeySummary,
    TwoWaySummary, VariableReport,
};
pub use export::{csv_string, export_csv, format_significant, write_metadata};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, DepartmentProfile, SimulationConfig, StaffingPlan};
use crate::domain::Simulation;
use crate::engine::{RngStream, RNG_ALGORITHM};
use crate::metrics::{self, RunMetrics};
use crate::satisfaction::WeightScenario;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("condition `{label}` replication {replication}: {source}")]
    Replication {
        label: String,
        replication: u32,
        source: ConfigError,
    },
    #[error("incomplete replication grid: {0}")]
    IncompleteGrid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One experimental condition: a label, its factor values and the full
/// configuration to run.
#[derive(Debug, Clone)]
pub struct Condition {
    pub label: String,
    pub factor_a: String,
    pub factor_b: Option<String>,
    pub config: SimulationConfig,
}

/// A swept experiment: conditions x replications, all sharing one base seed.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub name: String,
    pub swept_parameter: String,
    /// Name of the second factor for two-way designs.
    pub second_factor: Option<String>,
    pub conditions: Vec<Condition>,
    pub replications: u32,
    pub base_seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.conditions.is_empty() {
            return Err(HarnessError::InvalidPlan("no conditions".into()));
        }
        if self.replications < 1 {
            return Err(HarnessError::InvalidPlan("replications must be >= 1".into()));
        }
        for (i, c) in self.conditions.iter().enumerate() {
            if self.conditions[..i].iter().any(|o| o.label == c.label) {
                return Err(HarnessError::InvalidPlan(format!(
                    "duplicate condition label `{}`",
                    c.label
                )));
            }
            c.config.validate().map_err(|source| HarnessError::Replication {
                label: c.label.clone(),
                replication: 0,
                source,
            })?;
        }
        Ok(())
    }
}

/// Metrics of one completed run, keyed by (condition, replication).
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub condition: usize,
    pub replication: u32,
    /// Stream label derived from (base_seed, condition, replication).
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// All runs of an experiment plus the provenance needed to reproduce them.
#[derive(Debug, Clone)]
pub struct ReplicationSet {
    pub plan: ExperimentPlan,
    pub records: Vec<RunRecord>,
    pub config_hash: String,
    pub engine_version: String,
    pub rng_algorithm: String,
}

impl ReplicationSet {
    /// Metric values of one condition across replications, in replication
    /// order.
    pub fn condition_values(&self, condition: usize, column: &str) -> Vec<Option<f64>> {
        self.records
            .iter()
            .filter(|r| r.condition == condition)
            .map(|r| r.metrics.get(column))
            .collect()
    }

    /// Per-condition means of a metric, in condition order.
    pub fn condition_means(&self, column: &str) -> Vec<f64> {
        (0..self.plan.conditions.len())
            .map(|c| {
                let values: Vec<f64> = self
                    .condition_values(c, column)
                    .into_iter()
                    .flatten()
                    .collect();
                values.iter().sum::<f64>() / values.len().max(1) as f64
            })
            .collect()
    }

    /// Verifies the full (condition x replication) grid is present.
    pub fn check_complete(&self) -> Result<(), HarnessError> {
        let expected = self.plan.conditions.len() * self.plan.replications as usize;
        if self.records.len() != expected {
            return Err(HarnessError::IncompleteGrid(format!(
                "{} records, expected {expected}",
                self.records.len()
            )));
        }
        for (c, _) in self.plan.conditions.iter().enumerate() {
            for r in 0..self.plan.replications {
                if !self
                    .records
                    .iter()
                    .any(|rec| rec.condition == c && rec.replication == r)
                {
                    return Err(HarnessError::IncompleteGrid(format!(
                        "missing condition {c} replication {r}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn hash_plan(plan: &ExperimentPlan) -> String {
    let mut hasher = Sha256::new();
    hasher.update(plan.name.as_bytes());
    hasher.update(plan.base_seed.to_le_bytes());
    hasher.update(plan.replications.to_le_bytes());
    for c in &plan.conditions {
        hasher.update(c.label.as_bytes());
        hasher.update(serde_json::to_string(&c.config).expect("config serializes"));
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs one replication of one condition.
pub fn run_one(
    config: &SimulationConfig,
    base_seed: u64,
    condition: u64,
    replication: u64,
) -> Result<RunMetrics, ConfigError> {
    let rng = RngStream::for_replication(base_seed, condition, replication);
    let mut sim = Simulation::new(config.clone(), rng)?;
    sim.run();
    Ok(metrics::snapshot(&sim))
}

/// Runs every (condition, replication) cell of the plan. Replications are
/// independent and executed in parallel; `jobs` bounds the worker count.
pub fn run_replications(
    plan: &ExperimentPlan,
    jobs: Option<usize>,
) -> Result<ReplicationSet, HarnessError> {
    plan.validate()?;
    let tasks: Vec<(usize, u32)> = (0..plan.conditions.len())
        .flat_map(|c| (0..plan.replications).map(move |r| (c, r)))
        .collect();

    let run_all = || -> Result<Vec<RunRecord>, HarnessError> {
        tasks
            .par_iter()
            .map(|&(c, r)| {
                let cond = &plan.conditions[c];
                let metrics = run_one(&cond.config, plan.base_seed, c as u64, r as u64)
                    .map_err(|source| HarnessError::Replication {
                        label: cond.label.clone(),
                        replication: r,
                        source,
                    })?;
                Ok(RunRecord {
                    condition: c,
                    replication: r,
                    seed: RngStream::seed_label(plan.base_seed, c as u64, r as u64),
                    metrics,
                })
            })
            .collect()
    };

    let mut records = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::InvalidPlan(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }?;
    records.sort_by_key(|r| (r.condition, r.replication));

    let set = ReplicationSet {
        config_hash: hash_plan(plan),
        engine_version: crate::ENGINE_VERSION.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        plan: plan.clone(),
        records,
    };
    set.check_complete()?;
    Ok(set)
}

// ---- preset experiment families -----------------------------------------

/// Staffing validation: cashiers swept 1..=5 with total staff held at 10
/// (one expert, the rest selling assistants), 10 weeks, 20 replications.
pub fn preset_staffing_validation(profile: DepartmentProfile) -> ExperimentPlan {
    let dept = profile.name.clone();
    let conditions = staffing_conditions(profile, None);
    ExperimentPlan {
        name: format!("staffing-validation-{dept}"),
        swept_parameter: "staffing.cashiers".into(),
        second_factor: None,
        conditions,
        replications: 20,
        base_seed: 42,
    }
}

/// Two-way variant of the staffing validation: department x cashiers.
pub fn preset_staffing_validation_two_way() -> ExperimentPlan {
    let mut conditions = Vec::new();
    for profile in [DepartmentProfile::atv(), DepartmentProfile::ww()] {
        let dept = profile.name.clone();
        conditions.extend(staffing_conditions(profile, Some(dept)));
    }
    ExperimentPlan {
        name: "staffing-validation-both".into(),
        swept_parameter: "department".into(),
        second_factor: Some("staffing.cashiers".into()),
        conditions,
        replications: 20,
        base_seed: 42,
    }
}

fn staffing_conditions(
    profile: DepartmentProfile,
    dept_factor: Option<String>,
) -> Vec<Condition> {
    (1u32..=5)
        .map(|cashiers| {
            let mut config = SimulationConfig::for_department(profile.clone());
            config.staffing = StaffingPlan::new(cashiers, 10 - cashiers - 1, 1);
            config.run.weeks = 10;
            let label = match &dept_factor {
                Some(d) => format!("{d}/cashiers={cashiers}"),
                None => format!("cashiers={cashiers}"),
            };
            Condition {
                label,
                factor_a: dept_factor.clone().unwrap_or_else(|| cashiers.to_string()),
                factor_b: dept_factor.as_ref().map(|_| cashiers.to_string()),
                config,
            }
        })
        .collect()
}

/// Maps a sensitivity scenario and level to its weight transform:
/// scenario 1 sets every magnitude to the level value, scenario 2 scales by
/// 1/10/100, scenario 3 squares the base magnitudes per level.
pub fn weight_transform(scenario: u8, level: u8) -> Result<WeightScenario, HarnessError> {
    if !(1..=3).contains(&level) {
        return Err(HarnessError::InvalidPlan(format!(
            "weight level must be 1..=3, got {level}"
        )));
    }
    match scenario {
        1 => Ok(WeightScenario::Uniform {
            value: level as i64,
        }),
        2 => Ok(WeightScenario::Scale {
            factor: 10i64.pow(level as u32 - 1),
        }),
        3 => Ok(WeightScenario::SquareProgression { level }),
        _ => Err(HarnessError::InvalidPlan(format!(
            "weight scenario must be 1..=3, got {scenario}"
        ))),
    }
}

/// Satisfaction-weight sensitivity: 3 cashiers, 6 selling assistants and
/// 1 expert, refund loop switched off, the scenario's three weight levels
/// as conditions.
pub fn preset_weight_sensitivity(
    profile: DepartmentProfile,
    scenario: u8,
    level: Option<u8>,
) -> Result<ExperimentPlan, HarnessError> {
    let dept = profile.name.clone();
    let levels: Vec<u8> = match level {
        Some(l) => vec![l],
        None => vec![1, 2, 3],
    };
    let mut conditions = Vec::new();
    for l in levels {
        let mut config = SimulationConfig::for_department(profile.clone());
        config.staffing = StaffingPlan::new(3, 6, 1);
        config.practice.refund_loop_enabled = false;
        config.run.weeks = 10;
        config.run.weight_scenario = Some(weight_transform(scenario, l)?);
        conditions.push(Condition {
            label: format!("level={l}"),
            factor_a: l.to_string(),
            factor_b: None,
            config,
        });
    }
    Ok(ExperimentPlan {
        name: format!("weight-sensitivity-{dept}-scenario{scenario}"),
        swept_parameter: "run.weight_scenario".into(),
        second_factor: None,
        conditions,
        replications: 20,
        base_seed: 42,
    })
}

/// The three management-practice experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PracticeKind {
    TaskEmpowerment,
    EmpowermentToLearn,
    EmployeeDevelopment,
}

/// Management-practice experiments on the A&TV profile: 3 cashiers, 7
/// selling assistants and 2 experts, 70 arrivals per hour, 10 weeks,
/// 20 replications, sweeping only the practice parameter of interest.
pub fn preset_practice(kind: PracticeKind) -> ExperimentPlan {
    let base = || {
        let mut config = SimulationConfig::for_department(DepartmentProfile::atv());
        config.staffing = StaffingPlan::new(3, 7, 2);
        config.department.arrival_rate = 70.0;
        config.run.weeks = 10;
        config
    };
    let (name, parameter, conditions): (&str, &str, Vec<Condition>) = match kind {
        PracticeKind::TaskEmpowerment => (
            "task-empowerment",
            "practice.p_task_empowerment",
            [0.0, 0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|&p| {
                    let mut config = base();
                    config.practice.p_task_empowerment = p;
                    Condition {
                        label: format!("empowerment={p}"),
                        factor_a: p.to_string(),
                        factor_b: None,
                        config,
                    }
                })
                .collect(),
        ),
        PracticeKind::EmpowermentToLearn => (
            "empowerment-to-learn",
            "practice.p_learn",
            [0.0, 0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|&p| {
                    let mut config = base();
                    config.practice.p_learn = p;
                    // Promotion belongs to the development experiment; park
                    // the threshold out of reach.
                    config.practice.k_max = 1_000_000;
                    Condition {
                        label: format!("p_learn={p}"),
                        factor_a: p.to_string(),
                        factor_b: None,
                        config,
                    }
                })
                .collect(),
        ),
        PracticeKind::EmployeeDevelopment => (
            "employee-development",
            "practice.threshold_fraction",
            [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
                .iter()
                .map(|&f| {
                    let mut config = base();
                    config.practice.p_learn = 1.0;
                    config.practice.threshold_fraction = f;
                    config.practice.k_max = 70;
                    Condition {
                        label: format!("threshold={f}"),
                        factor_a: f.to_string(),
                        factor_b: None,
                        config,
                    }
                })
                .collect(),
        ),
    };
    ExperimentPlan {
        name: name.into(),
        swept_parameter: parameter.into(),
        second_factor: None,
        conditions,
        replications: 20,
        base_seed: 42,
    }
}
