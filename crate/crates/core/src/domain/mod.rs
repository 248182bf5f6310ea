//! Customer and staff agents, the help/pay/refund service blocks, queues
//! with patience-based abandonment, escalation to experts, learning and
//! promotion mechanics.

mod hours;
pub mod rules;
mod simulation;
mod trace;

pub use hours::OpeningHours;
pub use simulation::{EventPayload, ServicePoint, Simulation, SimulationCounters};
pub use trace::TraceSink;

use std::collections::VecDeque;
use std::fmt;

use crate::Minutes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CustomerId(pub u32);

impl fmt::Display for CustomerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StaffId(pub u32);

impl fmt::Display for StaffId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// What the customer came for. A refund goal may mutate to a purchase goal
/// exactly once, after a granted refund.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomerGoal {
    Purchase,
    Refund,
}

/// How a customer's visit ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeaveOutcome {
    /// Completed a purchase transaction.
    Purchased,
    /// Left the shopping flow without buying.
    NoPurchase,
    /// Refund granted, left without shopping on.
    RefundGranted,
    /// Refund claim denied.
    RefundDenied,
    /// Gave up queueing for the refund desk.
    RefundAbandoned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CustomerState {
    Contemplating,
    Browsing,
    SeekingHelp,
    WaitingHelpNormal,
    WaitingHelpExpert,
    ReceivingHelp,
    QueuingToPay,
    Paying,
    QueuingRefund,
    ProcessingRefund,
    Left(LeaveOutcome),
}

impl CustomerState {
    pub fn is_waiting(&self) -> bool {
        matches!(
            self,
            CustomerState::WaitingHelpNormal
                | CustomerState::WaitingHelpExpert
                | CustomerState::QueuingToPay
                | CustomerState::QueuingRefund
        )
    }

    pub fn is_left(&self) -> bool {
        matches!(self, CustomerState::Left(_))
    }
}

/// A customer agent. The satisfaction accumulator lives in the ledger and is
/// only modified through its `record_transition`.
#[derive(Debug, Clone)]
pub struct Customer {
    pub id: CustomerId,
    pub arrival_goal: CustomerGoal,
    pub goal: CustomerGoal,
    pub state: CustomerState,
    pub has_item: bool,
    pub entered_at: Minutes,
    pub patience_deadline: Option<Minutes>,
    /// Bumped on every enqueue and dequeue; patience events carry the value
    /// at enqueue so a stale deadline is a no-op.
    pub(crate) queue_generation: u32,
    pub(crate) enqueued_at: Minutes,
    /// Selling assistant shadowing this customer's expert interaction.
    pub(crate) shadowing_normal: Option<StaffId>,
    /// Cashier held while this refund waits for expert authorization.
    pub(crate) authorizing_cashier: Option<StaffId>,
}

impl Customer {
    fn new(id: CustomerId, goal: CustomerGoal, now: Minutes) -> Self {
        Customer {
            id,
            arrival_goal: goal,
            goal,
            state: CustomerState::Contemplating,
            has_item: false,
            entered_at: now,
            patience_deadline: None,
            queue_generation: 0,
            enqueued_at: 0.0,
            shadowing_normal: None,
            authorizing_cashier: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaffRole {
    Cashier,
    Normal,
    Expert,
}

impl StaffRole {
    pub const ALL: [StaffRole; 3] = [StaffRole::Cashier, StaffRole::Normal, StaffRole::Expert];

    pub fn index(self) -> usize {
        match self {
            StaffRole::Cashier => 0,
            StaffRole::Normal => 1,
            StaffRole::Expert => 2,
        }
    }
}

/// A staff member. Role is fixed except for promotion of selling assistants
/// to experts; knowledge is non-decreasing.
#[derive(Debug, Clone)]
pub struct StaffMember {
    pub id: StaffId,
    pub role: StaffRole,
    pub knowledge: u32,
    pub busy_since: Option<Minutes>,
    /// Total minutes engaged with customers.
    pub busy_minutes: f64,
    /// Minutes engaged during opening hours, split by the role held at the
    /// time. Feeds the utilization measures.
    pub(crate) busy_open_by_role: [f64; 3],
    /// When this member was promoted from selling assistant to expert.
    pub promoted_at: Option<Minutes>,
}

impl StaffMember {
    fn new(id: StaffId, role: StaffRole) -> Self {
        StaffMember {
            id,
            role,
            knowledge: 0,
            busy_since: None,
            busy_minutes: 0.0,
            busy_open_by_role: [0.0; 3],
            promoted_at: None,
        }
    }

    pub fn is_busy(&self) -> bool {
        self.busy_since.is_some()
    }

    pub fn busy_open_minutes(&self, role: StaffRole) -> f64 {
        self.busy_open_by_role[role.index()]
    }

    /// Role held at a given simulated time.
    pub fn role_at(&self, t: Minutes) -> StaffRole {
        match self.promoted_at {
            Some(p) if t >= p => StaffRole::Expert,
            Some(_) => StaffRole::Normal,
            None => self.role,
        }
    }

    /// Initial role at the start of the run.
    pub fn initial_role(&self) -> StaffRole {
        if self.promoted_at.is_some() {
            StaffRole::Normal
        } else {
            self.role
        }
    }
}

pub(crate) fn new_staff_roster(plan: &crate::config::StaffingPlan) -> Vec<StaffMember> {
    let mut staff = Vec::with_capacity(plan.total() as usize);
    let mut id = 0u32;
    for _ in 0..plan.cashiers {
        staff.push(StaffMember::new(StaffId(id), StaffRole::Cashier));
        id += 1;
    }
    for _ in 0..plan.normals {
        staff.push(StaffMember::new(StaffId(id), StaffRole::Normal));
        id += 1;
    }
    for _ in 0..plan.experts {
        staff.push(StaffMember::new(StaffId(id), StaffRole::Expert));
        id += 1;
    }
    staff
}

/// The four FIFO queues. The expert queue holds both escalated help requests
/// and refunds waiting for authorization; entries are told apart by the
/// customer's state.
#[derive(Debug, Default, Clone)]
pub struct ServiceQueues {
    pub help_normal: VecDeque<CustomerId>,
    pub help_expert: VecDeque<CustomerId>,
    pub pay: VecDeque<CustomerId>,
    pub refund: VecDeque<CustomerId>,
}

impl ServiceQueues {
    pub fn total_waiting(&self) -> usize {
        self.help_normal.len() + self.help_expert.len() + self.pay.len() + self.refund.len()
    }

    pub fn iter_all(&self) -> impl Iterator<Item = CustomerId> + '_ {
        self.help_normal
            .iter()
            .chain(self.help_expert.iter())
            .chain(self.pay.iter())
            .chain(self.refund.iter())
            .copied()
    }
}
