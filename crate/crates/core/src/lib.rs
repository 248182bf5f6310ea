//! Agent-based simulator of a retail department.
//!
//! Customers enter a department to shop or to obtain a refund, browse, seek
//! advice from selling staff, queue (and sometimes give up queueing), pay at
//! a till and leave. Staffing and management-practice parameters (refund
//! empowerment, on-the-job learning, promotion thresholds) are configurable,
//! and every customer carries a service level index: signed weights attached
//! to the transitions of their visit, summed when they leave.
//!
//! The crate is organized around the run pipeline:
//!
//! - [`engine`]: simulated clock, ordered event queue and reproducible
//!   per-replication random streams.
//! - [`domain`]: customer and staff agents, the help/pay/refund service
//!   blocks, queueing with patience-based abandonment, escalation to experts,
//!   learning and promotion.
//! - [`satisfaction`]: the weight table, per-customer accumulation and the
//!   department-level satisfaction measures.
//! - [`config`]: JSON configuration, validation and the built-in department
//!   profiles.
//! - [`metrics`]: per-run KPI snapshot (transactions, utilization,
//!   satisfaction, knowledge).
//! - [`stats`]: descriptives, KS normality, Levene, one-/two-way ANOVA,
//!   Tukey HSD and Bonferroni correction, implemented with no external
//!   statistics dependency so results are bit-stable across platforms.
//! - [`harness`]: replication runner, preset experiment families, CSV export
//!   and the analysis pipeline.

pub mod config;
pub mod domain;
pub mod engine;
pub mod harness;
pub mod metrics;
pub mod satisfaction;
pub mod stats;

/// Simulated time, in minutes since the start of the run.
pub type Minutes = f64;

/// Version string recorded in run metadata.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub use config::{
    DepartmentProfile, PracticeConfig, RunControl, SimulationConfig, StaffingPlan,
    TriangularParams,
};
pub use domain::{
    Customer, CustomerGoal, CustomerId, CustomerState, OpeningHours, ServiceQueues, Simulation,
    StaffId, StaffMember, StaffRole, TraceSink,
};
pub use engine::{Event, EventQueue, RngStream, Scheduler, SimClock};
pub use harness::{ExperimentPlan, ReplicationSet};
pub use metrics::RunMetrics;
pub use satisfaction::{SatisfactionLedger, WeightScenario, WeightTable};
