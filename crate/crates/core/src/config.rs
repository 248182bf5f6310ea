//! Declarative configuration: department behavior, staffing, management
//! practices, satisfaction weights and run control, with JSON parsing,
//! range validation and the built-in department profiles.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{Exponential, Triangular};
use crate::satisfaction::{WeightScenario, WeightTable};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid value for `{key}`: {constraint}")]
    InvalidField { key: String, constraint: String },
}

fn invalid(key: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::InvalidField {
        key: key.to_string(),
        constraint: constraint.into(),
    }
}

/// Parameters of a triangular duration distribution, in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangularParams {
    pub min: f64,
    pub mode: f64,
    pub max: f64,
}

impl TriangularParams {
    pub const fn new(min: f64, mode: f64, max: f64) -> Self {
        TriangularParams { min, mode, max }
    }

    pub fn dist(&self, key: &str) -> Result<Triangular, ConfigError> {
        Triangular::new(self.min, self.mode, self.max)
            .map_err(|e| invalid(key, e.to_string()))
    }

    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        self.dist(key).map(|_| ())
    }
}

fn check_probability(value: f64, key: &str) -> Result<(), ConfigError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(invalid(key, format!("must lie in [0, 1], got {value}")));
    }
    Ok(())
}

/// All behavioral parameters of one department type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DepartmentProfile {
    pub name: String,
    /// Customers per hour while the department is open.
    pub arrival_rate: f64,
    pub p_need_help: f64,
    pub p_buy_after_browse: f64,
    pub p_buy_after_help: f64,
    pub p_buy_without_help: f64,
    pub p_refund_visit: f64,
    pub p_shop_after_refund: f64,
    /// Probability that a first-line help request turns out to need an
    /// expert. Calibrated so ten weeks of full learning accumulate about
    /// `k_max` knowledge points per selling assistant.
    pub p_escalate: f64,
    pub browse: TriangularParams,
    pub help_duration: TriangularParams,
    /// Duration of the expert stage of an escalated help request; a top-up
    /// consultation, shorter than first-line help.
    pub expert_help_duration: TriangularParams,
    pub pay_duration: TriangularParams,
    pub refund_duration: TriangularParams,
    pub authorization_duration: TriangularParams,
    pub pay_patience: TriangularParams,
    pub help_patience: TriangularParams,
    pub refund_patience: TriangularParams,
}

impl Default for DepartmentProfile {
    fn default() -> Self {
        DepartmentProfile::atv()
    }
}

impl DepartmentProfile {
    /// Audio & Television: advice-heavy department with longer service times.
    pub fn atv() -> Self {
        DepartmentProfile {
            name: "atv".to_string(),
            arrival_rate: 70.0,
            p_need_help: 0.38,
            p_buy_after_browse: 0.37,
            p_buy_after_help: 0.56,
            p_buy_without_help: 0.20,
            p_refund_visit: 0.05,
            p_shop_after_refund: 0.30,
            p_escalate: 0.03,
            browse: TriangularParams::new(1.0, 7.0, 15.0),
            help_duration: TriangularParams::new(3.0, 15.0, 30.0),
            expert_help_duration: TriangularParams::new(1.0, 4.0, 8.0),
            pay_duration: TriangularParams::new(1.0, 3.0, 6.0),
            refund_duration: TriangularParams::new(2.0, 5.0, 10.0),
            authorization_duration: TriangularParams::new(1.0, 3.0, 7.0),
            pay_patience: TriangularParams::new(5.0, 12.0, 20.0),
            help_patience: TriangularParams::new(3.0, 8.0, 15.0),
            refund_patience: TriangularParams::new(5.0, 12.0, 20.0),
        }
    }

    /// Womenswear: higher footfall and conversion, shorter service, less
    /// advice-seeking. Placeholder values honoring the qualitative contrasts
    /// with A&TV; not calibrated against observed data.
    pub fn ww() -> Self {
        DepartmentProfile {
            name: "ww".to_string(),
            arrival_rate: 100.0,
            p_need_help: 0.15,
            p_buy_after_browse: 0.55,
            p_buy_after_help: 0.70,
            p_buy_without_help: 0.25,
            p_refund_visit: 0.06,
            p_shop_after_refund: 0.40,
            p_escalate: 0.01,
            browse: TriangularParams::new(1.0, 5.0, 10.0),
            help_duration: TriangularParams::new(2.0, 8.0, 15.0),
            expert_help_duration: TriangularParams::new(1.0, 3.0, 6.0),
            pay_duration: TriangularParams::new(1.0, 2.0, 4.0),
            refund_duration: TriangularParams::new(2.0, 4.0, 8.0),
            authorization_duration: TriangularParams::new(1.0, 2.0, 5.0),
            pay_patience: TriangularParams::new(5.0, 12.0, 20.0),
            help_patience: TriangularParams::new(3.0, 8.0, 15.0),
            refund_patience: TriangularParams::new(5.0, 12.0, 20.0),
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "atv" | "a&tv" => Some(Self::atv()),
            "ww" => Some(Self::ww()),
            _ => None,
        }
    }

    pub fn arrival_process(&self) -> Result<Exponential, ConfigError> {
        Exponential::from_rate_per_hour(self.arrival_rate)
            .map_err(|e| invalid("department.arrival_rate", e.to_string()))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.arrival_rate <= 0.0 || !self.arrival_rate.is_finite() || self.arrival_rate.is_nan() {
            return Err(invalid(
                "department.arrival_rate",
                format!("must be positive, got {}", self.arrival_rate),
            ));
        }
        for (value, key) in [
            (self.p_need_help, "department.p_need_help"),
            (self.p_buy_after_browse, "department.p_buy_after_browse"),
            (self.p_buy_after_help, "department.p_buy_after_help"),
            (self.p_buy_without_help, "department.p_buy_without_help"),
            (self.p_refund_visit, "department.p_refund_visit"),
            (self.p_shop_after_refund, "department.p_shop_after_refund"),
            (self.p_escalate, "department.p_escalate"),
        ] {
            check_probability(value, key)?;
        }
        for (t, key) in [
            (&self.browse, "department.browse"),
            (&self.help_duration, "department.help_duration"),
            (
                &self.expert_help_duration,
                "department.expert_help_duration",
            ),
            (&self.pay_duration, "department.pay_duration"),
            (&self.refund_duration, "department.refund_duration"),
            (
                &self.authorization_duration,
                "department.authorization_duration",
            ),
            (&self.pay_patience, "department.pay_patience"),
            (&self.help_patience, "department.help_patience"),
            (&self.refund_patience, "department.refund_patience"),
        ] {
            t.validate(key)?;
        }
        Ok(())
    }
}

/// Headcount per staff role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaffingPlan {
    pub cashiers: u32,
    pub normals: u32,
    pub experts: u32,
}

impl Default for StaffingPlan {
    fn default() -> Self {
        StaffingPlan {
            cashiers: 3,
            normals: 6,
            experts: 1,
        }
    }
}

impl StaffingPlan {
    pub const fn new(cashiers: u32, normals: u32, experts: u32) -> Self {
        StaffingPlan {
            cashiers,
            normals,
            experts,
        }
    }

    pub fn total(&self) -> u32 {
        self.cashiers + self.normals + self.experts
    }
}

/// Management-practice parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PracticeConfig {
    /// Probability that a cashier settles a refund claim autonomously
    /// instead of calling an expert for authorization.
    pub p_task_empowerment: f64,
    pub cashier_approval: f64,
    pub expert_approval: f64,
    /// Probability that a selling assistant stays to learn when an expert
    /// takes over one of their help requests.
    pub p_learn: f64,
    /// Fraction of `k_max` at which a selling assistant is promoted to
    /// expert; 0 promotes at the first knowledge point.
    pub threshold_fraction: f64,
    pub k_max: u32,
    pub refund_loop_enabled: bool,
}

impl Default for PracticeConfig {
    fn default() -> Self {
        PracticeConfig {
            p_task_empowerment: 0.0,
            cashier_approval: 0.80,
            expert_approval: 0.70,
            p_learn: 0.0,
            threshold_fraction: 1.0,
            k_max: 70,
            refund_loop_enabled: true,
        }
    }
}

impl PracticeConfig {
    /// Knowledge points required for promotion.
    pub fn promotion_threshold(&self) -> u32 {
        let points = (self.threshold_fraction * self.k_max as f64).ceil() as u32;
        points.max(1)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (value, key) in [
            (self.p_task_empowerment, "practice.p_task_empowerment"),
            (self.cashier_approval, "practice.cashier_approval"),
            (self.expert_approval, "practice.expert_approval"),
            (self.p_learn, "practice.p_learn"),
            (self.threshold_fraction, "practice.threshold_fraction"),
        ] {
            check_probability(value, key)?;
        }
        if self.k_max < 1 {
            return Err(invalid("practice.k_max", "must be at least 1"));
        }
        Ok(())
    }
}

/// Run length, schedule and replication control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunControl {
    pub weeks: u32,
    pub open_hours_per_day: f64,
    pub days_per_week: u32,
    pub replications: u32,
    pub base_seed: u64,
    pub weight_scenario: Option<WeightScenario>,
}

impl Default for RunControl {
    fn default() -> Self {
        RunControl {
            weeks: 10,
            open_hours_per_day: 10.0,
            days_per_week: 7,
            replications: 20,
            base_seed: 42,
            weight_scenario: None,
        }
    }
}

impl RunControl {
    pub fn days(&self) -> u32 {
        self.weeks * self.days_per_week
    }

    pub fn total_open_minutes(&self) -> f64 {
        self.days() as f64 * self.open_hours_per_day * 60.0
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.weeks < 1 {
            return Err(invalid("run.weeks", "must be at least 1"));
        }
        if !(self.open_hours_per_day > 0.0 && self.open_hours_per_day <= 24.0) {
            return Err(invalid(
                "run.open_hours_per_day",
                format!("must lie in (0, 24], got {}", self.open_hours_per_day),
            ));
        }
        if !(1..=7).contains(&self.days_per_week) {
            return Err(invalid("run.days_per_week", "must lie in 1..=7"));
        }
        if self.replications < 1 {
            return Err(invalid("run.replications", "must be at least 1"));
        }
        Ok(())
    }
}

/// Complete configuration for one replication set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub department: DepartmentProfile,
    pub staffing: StaffingPlan,
    pub practice: PracticeConfig,
    pub run: RunControl,
    pub weights: WeightTable,
}

impl SimulationConfig {
    pub fn for_department(profile: DepartmentProfile) -> Self {
        SimulationConfig {
            department: profile,
            ..Default::default()
        }
    }

    /// True if any path in this configuration can lead to a purchase.
    pub fn purchases_possible(&self) -> bool {
        self.department.p_buy_after_browse > 0.0
            || self.department.p_buy_after_help > 0.0
            || self.department.p_buy_without_help > 0.0
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.department.validate()?;
        self.practice.validate()?;
        self.run.validate()?;
        if self.purchases_possible() && self.staffing.cashiers == 0 {
            return Err(invalid(
                "staffing.cashiers",
                "at least one cashier is required while purchases are possible",
            ));
        }
        if let Some(scenario) = self.run.weight_scenario {
            crate::satisfaction::apply_scenario(&self.weights, scenario)
                .map_err(|e| invalid("run.weight_scenario", e.to_string()))?;
        }
        Ok(())
    }

    /// Weight table with the configured scenario transform applied.
    pub fn effective_weights(&self) -> Result<WeightTable, ConfigError> {
        match self.run.weight_scenario {
            Some(scenario) => crate::satisfaction::apply_scenario(&self.weights, scenario)
                .map_err(|e| invalid("run.weight_scenario", e.to_string())),
            None => Ok(self.weights),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Loads and validates a configuration file; missing keys take the
/// documented defaults.
pub fn load_config(path: impl AsRef<Path>) -> Result<SimulationConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config: SimulationConfig =
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
    config.validate()?;
    Ok(config)
}

/// The built-in department profiles.
pub fn builtin_profiles() -> Vec<DepartmentProfile> {
    vec![DepartmentProfile::atv(), DepartmentProfile::ww()]
}

/// Where each schema default comes from: observed departmental data baked
/// into the A&TV profile (`paper`), or an artifact default chosen here
/// (`default`). Echoed into run metadata so experiment reports can state
/// their calibration honestly.
pub fn parameter_provenance() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("department.arrival_rate", "paper"),
        ("department.p_need_help", "paper"),
        ("department.p_buy_after_browse", "paper"),
        ("department.p_buy_after_help", "paper"),
        ("department.p_buy_without_help", "default"),
        ("department.p_refund_visit", "default"),
        ("department.p_shop_after_refund", "default"),
        ("department.p_escalate", "default"),
        ("department.browse", "paper"),
        ("department.help_duration", "paper"),
        ("department.expert_help_duration", "default"),
        ("department.pay_duration", "default"),
        ("department.refund_duration", "default"),
        ("department.authorization_duration", "default"),
        ("department.pay_patience", "paper"),
        ("department.help_patience", "default"),
        ("department.refund_patience", "default"),
        ("practice.cashier_approval", "paper"),
        ("practice.expert_approval", "paper"),
        ("practice.k_max", "default"),
        ("weights.help", "paper"),
        ("weights.pay", "default"),
        ("weights.refund", "default"),
        ("weights.leave_without_purchase", "paper"),
        ("run.weeks", "paper"),
        ("run.open_hours_per_day", "default"),
        ("run.days_per_week", "default"),
        ("run.replications", "paper"),
    ])
}
