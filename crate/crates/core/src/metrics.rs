//! Per-run KPI snapshot: transactions, satisfaction measures, staff
//! utilization by role, knowledge and abandonment counts.

use serde::Serialize;

use crate::domain::{OpeningHours, Simulation, StaffMember, StaffRole};

/// Utilization of one staff group over the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupUtilization {
    /// The group never had a member (reported as absent, not zero).
    Absent,
    Fraction(f64),
}

impl GroupUtilization {
    pub fn value(self) -> Option<f64> {
        match self {
            GroupUtilization::Absent => None,
            GroupUtilization::Fraction(f) => Some(f),
        }
    }
}

/// Fraction of open time a staff group spent engaged with customers.
///
/// Membership is time-weighted when promotions move staff between groups
/// mid-run. A group emptied by promotion reports 0; a group that never
/// existed reports absent.
pub fn utilization(
    staff: &[StaffMember],
    role: StaffRole,
    hours: &OpeningHours,
    now: f64,
) -> GroupUtilization {
    let mut busy = 0.0;
    let mut tenure = 0.0;
    let mut ever_existed = false;
    let mut current_members = 0u32;
    for s in staff {
        let phase = match role {
            StaffRole::Cashier => {
                if s.initial_role() != StaffRole::Cashier {
                    continue;
                }
                (0.0, now)
            }
            StaffRole::Normal => {
                if s.initial_role() != StaffRole::Normal {
                    continue;
                }
                (0.0, s.promoted_at.unwrap_or(now).min(now))
            }
            StaffRole::Expert => match (s.initial_role(), s.promoted_at) {
                (StaffRole::Expert, _) => (0.0, now),
                (_, Some(p)) if p <= now => (p, now),
                _ => continue,
            },
        };
        ever_existed = true;
        if s.role == role {
            current_members += 1;
        }
        tenure += hours.open_overlap(phase.0, phase.1);
        busy += s.busy_open_minutes(role);
        // Credit any still-open busy interval that belongs to this role.
        if let Some(since) = s.busy_since {
            if s.role_at(since) == role {
                busy += hours.open_overlap(since, now);
            }
        }
    }
    if !ever_existed {
        return GroupUtilization::Absent;
    }
    // A group emptied by promotion reports zero, not its historical
    // time-weighted fraction.
    if current_members == 0 {
        return GroupUtilization::Fraction(0.0);
    }
    if tenure <= 0.0 {
        return GroupUtilization::Fraction(0.0);
    }
    let fraction = busy / tenure;
    debug_assert!(
        (-1e-9..=1.0 + 1e-9).contains(&fraction),
        "utilization out of range: {fraction}"
    );
    GroupUtilization::Fraction(fraction.clamp(0.0, 1.0))
}

/// Immutable KPI record of one completed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub arrivals: u64,
    pub departures: u64,
    pub transactions: u64,
    pub satisfied_count: u64,
    pub overall_satisfaction: i64,
    pub overall_satisfaction_shopping: i64,
    pub overall_satisfaction_refund: i64,
    pub utilization_cashier: Option<f64>,
    pub utilization_normal: Option<f64>,
    pub utilization_expert: Option<f64>,
    pub mean_normal_knowledge: f64,
    pub abandoned_help_normal: u64,
    pub abandoned_help_expert: u64,
    pub abandoned_pay: u64,
    pub abandoned_refund: u64,
    pub escalations: u64,
    pub refunds_granted: u64,
    pub refunds_denied: u64,
}

/// Snapshot of a run's KPIs. Call after `run()`; every field is also
/// recomputable by replaying the event-trace log.
pub fn snapshot(sim: &Simulation) -> RunMetrics {
    let now = sim.now();
    let hours = sim.hours();
    let counters = sim.counters();
    let ledger = sim.ledger();

    let normals_now: Vec<&StaffMember> = sim
        .staff()
        .iter()
        .filter(|s| s.role == StaffRole::Normal)
        .collect();
    let mean_normal_knowledge = if normals_now.is_empty() {
        0.0
    } else {
        normals_now.iter().map(|s| s.knowledge as f64).sum::<f64>() / normals_now.len() as f64
    };

    let metrics = RunMetrics {
        arrivals: counters.arrivals,
        departures: counters.departures,
        transactions: counters.transactions,
        satisfied_count: ledger.satisfied_count(),
        overall_satisfaction: ledger.overall_satisfaction(),
        overall_satisfaction_shopping: ledger.overall_satisfaction_shopping(),
        overall_satisfaction_refund: ledger.overall_satisfaction_refund(),
        utilization_cashier: utilization(sim.staff(), StaffRole::Cashier, hours, now).value(),
        utilization_normal: utilization(sim.staff(), StaffRole::Normal, hours, now).value(),
        utilization_expert: utilization(sim.staff(), StaffRole::Expert, hours, now).value(),
        mean_normal_knowledge,
        abandoned_help_normal: counters.abandoned_help_normal,
        abandoned_help_expert: counters.abandoned_help_expert,
        abandoned_pay: counters.abandoned_pay,
        abandoned_refund: counters.abandoned_refund,
        escalations: counters.escalations,
        refunds_granted: counters.refunds_granted,
        refunds_denied: counters.refunds_denied,
    };
    debug_assert!(metrics.transactions <= metrics.arrivals);
    debug_assert!(metrics.departures <= metrics.arrivals);
    debug_assert_eq!(
        metrics.overall_satisfaction,
        metrics.overall_satisfaction_shopping + metrics.overall_satisfaction_refund
    );
    metrics
}

/// One rendered metric value for tabular export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Count(u64),
    Sum(i64),
    Real(f64),
    Missing,
}

impl RunMetrics {
    /// Column order used by CSV export and the analysis pipeline.
    pub const COLUMNS: [&'static str; 18] = [
        "arrivals",
        "departures",
        "transactions",
        "satisfied_count",
        "overall_satisfaction",
        "overall_satisfaction_shopping",
        "overall_satisfaction_refund",
        "utilization_cashier",
        "utilization_normal",
        "utilization_expert",
        "mean_normal_knowledge",
        "abandoned_help_normal",
        "abandoned_help_expert",
        "abandoned_pay",
        "abandoned_refund",
        "escalations",
        "refunds_granted",
        "refunds_denied",
    ];

    pub fn values(&self) -> [MetricValue; 18] {
        let opt = |v: Option<f64>| v.map_or(MetricValue::Missing, MetricValue::Real);
        [
            MetricValue::Count(self.arrivals),
            MetricValue::Count(self.departures),
            MetricValue::Count(self.transactions),
            MetricValue::Count(self.satisfied_count),
            MetricValue::Sum(self.overall_satisfaction),
            MetricValue::Sum(self.overall_satisfaction_shopping),
            MetricValue::Sum(self.overall_satisfaction_refund),
            opt(self.utilization_cashier),
            opt(self.utilization_normal),
            opt(self.utilization_expert),
            MetricValue::Real(self.mean_normal_knowledge),
            MetricValue::Count(self.abandoned_help_normal),
            MetricValue::Count(self.abandoned_help_expert),
            MetricValue::Count(self.abandoned_pay),
            MetricValue::Count(self.abandoned_refund),
            MetricValue::Count(self.escalations),
            MetricValue::Count(self.refunds_granted),
            MetricValue::Count(self.refunds_denied),
        ]
    }

    /// Numeric value of a named column, for analysis. Missing fields (an
    /// absent staff group) return `None`.
    pub fn get(&self, column: &str) -> Option<f64> {
        let idx = Self::COLUMNS.iter().position(|&c| c == column)?;
        match self.values()[idx] {
            MetricValue::Count(v) => Some(v as f64),
            MetricValue::Sum(v) => Some(v as f64),
            MetricValue::Real(v) => Some(v),
            MetricValue::Missing => None,
        }
    }
}
