//! The replication model: one store day-by-day run of customer and staff
//! agents driven by the event scheduler.
//!
//! Customers try to obtain service directly in each block (help, pay,
//! refund); if no suitable staff member is free they queue, and they leave
//! the queue prematurely once their sampled patience runs out. Selling
//! assistants escalate requests beyond their competence to experts and may
//! stay to learn from the interaction; accumulated knowledge can promote
//! them to experts. Cashiers settle refunds alone when empowered to,
//! otherwise customer and cashier wait for an expert authorization.

use crate::config::{ConfigError, SimulationConfig};
use crate::engine::{Exponential, RngStream, Scheduler, Triangular};
use crate::satisfaction::{Block, SatisfactionLedger, Step, Transition, WeightTable};
use crate::Minutes;

use super::rules::{self, BrowseOutcome, FirstLineFollowUp};
use super::{
    new_staff_roster, Customer, CustomerGoal, CustomerId, CustomerState, LeaveOutcome,
    OpeningHours, ServiceQueues, StaffId, StaffMember, StaffRole, TraceSink,
};

/// Where a customer is served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServicePoint {
    HelpNormal,
    HelpExpert,
    Pay,
    Refund,
}

impl ServicePoint {
    fn server_role(self) -> StaffRole {
        match self {
            ServicePoint::HelpNormal => StaffRole::Normal,
            ServicePoint::HelpExpert => StaffRole::Expert,
            ServicePoint::Pay | ServicePoint::Refund => StaffRole::Cashier,
        }
    }

    fn block(self) -> Block {
        match self {
            ServicePoint::HelpNormal | ServicePoint::HelpExpert => Block::Help,
            ServicePoint::Pay => Block::Pay,
            ServicePoint::Refund => Block::Refund,
        }
    }
}

#[derive(Debug, Clone)]
pub enum EventPayload {
    /// Next customer walks in; reschedules itself while the store is open.
    Arrival,
    BrowseExit {
        customer: CustomerId,
    },
    /// Patience deadline for a queued customer; stale once the generation
    /// counter has moved on.
    Patience {
        customer: CustomerId,
        generation: u32,
    },
    ServiceDone {
        staff: StaffId,
        customer: CustomerId,
        point: ServicePoint,
    },
    AuthorizationDone {
        expert: StaffId,
        cashier: StaffId,
        customer: CustomerId,
    },
}

/// Raw event tallies kept by the run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimulationCounters {
    pub arrivals: u64,
    pub departures: u64,
    pub transactions: u64,
    pub abandoned_help_normal: u64,
    pub abandoned_help_expert: u64,
    pub abandoned_pay: u64,
    pub abandoned_refund: u64,
    pub escalations: u64,
    pub authorizations: u64,
    pub refunds_granted: u64,
    pub refunds_denied: u64,
}

#[derive(Debug)]
struct Distributions {
    arrival: Exponential,
    browse: Triangular,
    help_duration: Triangular,
    expert_help_duration: Triangular,
    pay_duration: Triangular,
    refund_duration: Triangular,
    authorization_duration: Triangular,
    pay_patience: Triangular,
    help_patience: Triangular,
    refund_patience: Triangular,
}

impl Distributions {
    fn from_config(cfg: &SimulationConfig) -> Result<Self, ConfigError> {
        let d = &cfg.department;
        Ok(Distributions {
            arrival: d.arrival_process()?,
            browse: d.browse.dist("department.browse")?,
            help_duration: d.help_duration.dist("department.help_duration")?,
            expert_help_duration: d
                .expert_help_duration
                .dist("department.expert_help_duration")?,
            pay_duration: d.pay_duration.dist("department.pay_duration")?,
            refund_duration: d.refund_duration.dist("department.refund_duration")?,
            authorization_duration: d
                .authorization_duration
                .dist("department.authorization_duration")?,
            pay_patience: d.pay_patience.dist("department.pay_patience")?,
            help_patience: d.help_patience.dist("department.help_patience")?,
            refund_patience: d.refund_patience.dist("department.refund_patience")?,
        })
    }

    fn duration(&self, point: ServicePoint) -> &Triangular {
        match point {
            ServicePoint::HelpNormal => &self.help_duration,
            ServicePoint::HelpExpert => &self.expert_help_duration,
            ServicePoint::Pay => &self.pay_duration,
            ServicePoint::Refund => &self.refund_duration,
        }
    }

    fn patience(&self, point: ServicePoint) -> &Triangular {
        match point {
            ServicePoint::HelpNormal | ServicePoint::HelpExpert => &self.help_patience,
            ServicePoint::Pay => &self.pay_patience,
            ServicePoint::Refund => &self.refund_patience,
        }
    }
}

/// One replication. All agent state is owned by this struct; replications
/// never share mutable state.
#[derive(Debug)]
pub struct Simulation {
    config: SimulationConfig,
    dists: Distributions,
    weights: WeightTable,
    hours: OpeningHours,
    scheduler: Scheduler<EventPayload>,
    rng: RngStream,
    customers: Vec<Customer>,
    staff: Vec<StaffMember>,
    queues: ServiceQueues,
    ledger: SatisfactionLedger,
    counters: SimulationCounters,
    trace: TraceSink,
    audit: bool,
    audit_knowledge: Vec<u32>,
}

impl Simulation {
    /// Builds a replication and schedules the arrival process.
    pub fn new(config: SimulationConfig, rng: RngStream) -> Result<Self, ConfigError> {
        let mut sim = Self::new_scripted(config, rng)?;
        let first = sim.dists.arrival.sample(&mut sim.rng);
        if let Some(t) = sim.hours.carry_into_open(first) {
            sim.scheduler
                .schedule(t, EventPayload::Arrival)
                .expect("initial arrival in the future");
        }
        Ok(sim)
    }

    /// Builds a replication without an arrival process. Callers inject
    /// customers explicitly; used by scripted scenarios and tests.
    pub fn new_scripted(config: SimulationConfig, rng: RngStream) -> Result<Self, ConfigError> {
        config.validate()?;
        let dists = Distributions::from_config(&config)?;
        let weights = config.effective_weights()?;
        let hours = OpeningHours::from_run(&config.run);
        let staff = new_staff_roster(&config.staffing);
        let audit_knowledge = staff.iter().map(|s| s.knowledge).collect();
        Ok(Simulation {
            config,
            dists,
            weights,
            hours,
            scheduler: Scheduler::new(),
            rng,
            customers: Vec::new(),
            staff,
            queues: ServiceQueues::default(),
            ledger: SatisfactionLedger::new(),
            counters: SimulationCounters::default(),
            trace: TraceSink::Null,
            audit: false,
            audit_knowledge,
        })
    }

    pub fn set_trace(&mut self, sink: TraceSink) {
        self.trace = sink;
    }

    pub fn take_trace(&mut self) -> TraceSink {
        std::mem::take(&mut self.trace)
    }

    /// Enables per-event invariant checks (placement, conservation, staff
    /// accounting). Meant for short runs; the checks walk all agents.
    pub fn set_audit(&mut self, audit: bool) {
        self.audit = audit;
    }

    pub fn now(&self) -> Minutes {
        self.scheduler.now()
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn hours(&self) -> &OpeningHours {
        &self.hours
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn staff(&self) -> &[StaffMember] {
        &self.staff
    }

    pub fn queues(&self) -> &ServiceQueues {
        &self.queues
    }

    pub fn ledger(&self) -> &SatisfactionLedger {
        &self.ledger
    }

    pub fn counters(&self) -> &SimulationCounters {
        &self.counters
    }

    pub fn in_store(&self) -> u64 {
        self.counters.arrivals - self.counters.departures
    }

    /// Runs the full schedule: arrivals stop at the final close, in-store
    /// customers continue to completion.
    pub fn run(&mut self) {
        self.run_until(self.hours.horizon());
        while let Some(ev) = self.scheduler.pop_next() {
            self.dispatch(ev.fire_time, ev.payload);
        }
        let _ = self.trace.flush();
    }

    /// Processes every event with fire time at or before `t_end`; the clock
    /// ends at `t_end` (or at the last event beyond it, never earlier).
    pub fn run_until(&mut self, t_end: Minutes) {
        while let Some(ev) = self.scheduler.next_before(t_end) {
            self.dispatch(ev.fire_time, ev.payload);
        }
    }

    /// Creates one customer at the current clock with an explicitly chosen
    /// goal, bypassing the arrival process. Scripted-scenario hook.
    pub fn inject_customer(&mut self, goal: CustomerGoal) -> CustomerId {
        self.admit_customer(goal)
    }

    fn dispatch(&mut self, time: Minutes, payload: EventPayload) {
        match payload {
            EventPayload::Arrival => self.handle_arrival(time),
            EventPayload::BrowseExit { customer } => self.handle_browse_exit(customer),
            EventPayload::Patience {
                customer,
                generation,
            } => self.handle_patience(customer, generation),
            EventPayload::ServiceDone {
                staff,
                customer,
                point,
            } => self.handle_service_done(staff, customer, point),
            EventPayload::AuthorizationDone {
                expert,
                cashier,
                customer,
            } => self.handle_authorization_done(expert, cashier, customer),
        }
        if self.audit {
            self.check_invariants();
        }
    }

    // ---- event handlers ----------------------------------------------

    fn handle_arrival(&mut self, time: Minutes) {
        debug_assert!(self.hours.is_open(time), "arrival outside opening hours");
        let goal = rules::arrival_goal(&mut self.rng, &self.config.department, &self.config.practice);
        self.admit_customer(goal);

        let gap = self.dists.arrival.sample(&mut self.rng);
        if let Some(next) = self.hours.carry_into_open(time + gap) {
            self.scheduler
                .schedule(next, EventPayload::Arrival)
                .expect("arrival scheduled forward");
        }
    }

    fn admit_customer(&mut self, goal: CustomerGoal) -> CustomerId {
        let now = self.now();
        let id = CustomerId(self.customers.len() as u32);
        self.customers.push(Customer::new(id, goal, now));
        self.counters.arrivals += 1;
        match goal {
            CustomerGoal::Purchase => {
                self.trace.emit(now, "arrival", id);
                self.start_browsing(id);
            }
            CustomerGoal::Refund => {
                self.trace.emit(now, "arrival_refund", id);
                self.attempt_service(id, ServicePoint::Refund);
            }
        }
        id
    }

    fn start_browsing(&mut self, customer: CustomerId) {
        let now = self.now();
        self.customers[customer.0 as usize].state = CustomerState::Browsing;
        self.trace.emit(now, "browse_enter", customer);
        let exit_at = now + self.dists.browse.sample(&mut self.rng);
        self.scheduler
            .schedule(exit_at, EventPayload::BrowseExit { customer })
            .expect("browse exit in the future");
    }

    fn handle_browse_exit(&mut self, customer: CustomerId) {
        debug_assert_eq!(
            self.customers[customer.0 as usize].state,
            CustomerState::Browsing
        );
        self.trace.emit(self.now(), "browse_exit", customer);
        match rules::browse_outcome(&mut self.rng, &self.config.department) {
            BrowseOutcome::SeekHelp => {
                self.customers[customer.0 as usize].state = CustomerState::SeekingHelp;
                self.attempt_service(customer, ServicePoint::HelpNormal);
            }
            BrowseOutcome::Buy => {
                self.customers[customer.0 as usize].has_item = true;
                self.attempt_service(customer, ServicePoint::Pay);
            }
            BrowseOutcome::Leave => self.depart(customer, LeaveOutcome::NoPurchase),
        }
    }

    /// Customers try to obtain service directly; if no suitable staff member
    /// is free they join the block's queue with a sampled patience deadline.
    fn attempt_service(&mut self, customer: CustomerId, point: ServicePoint) {
        match self.idle_staff(point.server_role()) {
            Some(staff) => self.start_service(staff, customer, point, false),
            None => self.enqueue(customer, point),
        }
    }

    fn idle_staff(&self, role: StaffRole) -> Option<StaffId> {
        self.staff
            .iter()
            .find(|s| s.role == role && !s.is_busy())
            .map(|s| s.id)
    }

    fn enqueue(&mut self, customer: CustomerId, point: ServicePoint) {
        let now = self.now();
        let (queue, state, kind) = match point {
            ServicePoint::HelpNormal => (
                &mut self.queues.help_normal,
                CustomerState::WaitingHelpNormal,
                "help_wait",
            ),
            ServicePoint::HelpExpert => (
                &mut self.queues.help_expert,
                CustomerState::WaitingHelpExpert,
                "help_wait",
            ),
            ServicePoint::Pay => (&mut self.queues.pay, CustomerState::QueuingToPay, "pay_wait"),
            ServicePoint::Refund => (
                &mut self.queues.refund,
                CustomerState::QueuingRefund,
                "refund_wait",
            ),
        };
        queue.push_back(customer);
        let deadline = now + self.dists.patience(point).sample(&mut self.rng);
        let c = &mut self.customers[customer.0 as usize];
        c.state = state;
        c.queue_generation += 1;
        c.enqueued_at = now;
        c.patience_deadline = Some(deadline);
        let generation = c.queue_generation;
        self.trace.emit(now, kind, customer);
        self.record(customer, Transition::Block(point.block(), Step::Wait));
        self.scheduler
            .schedule(
                deadline,
                EventPayload::Patience {
                    customer,
                    generation,
                },
            )
            .expect("patience deadline in the future");
    }

    fn start_service(
        &mut self,
        staff: StaffId,
        customer: CustomerId,
        point: ServicePoint,
        waited: bool,
    ) {
        let now = self.now();
        debug_assert_eq!(self.staff[staff.0 as usize].role, point.server_role());
        self.set_busy(staff);
        let c = &mut self.customers[customer.0 as usize];
        c.state = match point {
            ServicePoint::HelpNormal | ServicePoint::HelpExpert => CustomerState::ReceivingHelp,
            ServicePoint::Pay => CustomerState::Paying,
            ServicePoint::Refund => CustomerState::ProcessingRefund,
        };
        c.patience_deadline = None;
        let (step, kind) = if waited {
            (
                Step::ServedAfterWait,
                match point.block() {
                    Block::Help => "help_serve_after_wait",
                    Block::Pay => "pay_serve_after_wait",
                    Block::Refund => "refund_serve_after_wait",
                },
            )
        } else {
            (
                Step::ImmediateService,
                match point.block() {
                    Block::Help => "help_immediate",
                    Block::Pay => "pay_immediate",
                    Block::Refund => "refund_immediate",
                },
            )
        };
        self.trace.emit(now, kind, customer);
        self.record(customer, Transition::Block(point.block(), step));
        let duration = self.dists.duration(point).sample(&mut self.rng);
        self.scheduler
            .schedule(
                now + duration,
                EventPayload::ServiceDone {
                    staff,
                    customer,
                    point,
                },
            )
            .expect("service completion in the future");
    }

    fn handle_patience(&mut self, customer: CustomerId, generation: u32) {
        let c = &self.customers[customer.0 as usize];
        // Stale deadline: the customer was already pulled into service (or a
        // later queue spell reused the event).
        if c.queue_generation != generation || !c.state.is_waiting() {
            return;
        }
        let now = self.now();
        let state = c.state;
        let (queue, point, kind) = match state {
            CustomerState::WaitingHelpNormal => (
                &mut self.queues.help_normal,
                ServicePoint::HelpNormal,
                "abandon_help_normal",
            ),
            CustomerState::WaitingHelpExpert => (
                &mut self.queues.help_expert,
                ServicePoint::HelpExpert,
                "abandon_help_expert",
            ),
            CustomerState::QueuingToPay => {
                (&mut self.queues.pay, ServicePoint::Pay, "abandon_pay")
            }
            CustomerState::QueuingRefund => (
                &mut self.queues.refund,
                ServicePoint::Refund,
                "abandon_refund",
            ),
            _ => unreachable!("guarded by is_waiting"),
        };
        let pos = queue
            .iter()
            .position(|&id| id == customer)
            .expect("waiting customer present in its queue");
        queue.remove(pos);
        match point {
            ServicePoint::HelpNormal => self.counters.abandoned_help_normal += 1,
            ServicePoint::HelpExpert => self.counters.abandoned_help_expert += 1,
            ServicePoint::Pay => self.counters.abandoned_pay += 1,
            ServicePoint::Refund => self.counters.abandoned_refund += 1,
        }
        let c = &mut self.customers[customer.0 as usize];
        c.queue_generation += 1;
        c.patience_deadline = None;
        self.trace.emit(now, kind, customer);
        self.record(customer, Transition::Block(point.block(), Step::Abandon));

        match point {
            ServicePoint::HelpNormal | ServicePoint::HelpExpert => {
                // A shadowing assistant goes back to work; no knowledge
                // point without a completed expert interaction.
                if let Some(normal) = self.customers[customer.0 as usize].shadowing_normal.take() {
                    self.release(normal);
                }
                if rules::buys_without_help(&mut self.rng, &self.config.department) {
                    self.customers[customer.0 as usize].has_item = true;
                    self.attempt_service(customer, ServicePoint::Pay);
                } else {
                    self.depart(customer, LeaveOutcome::NoPurchase);
                }
            }
            ServicePoint::Pay => self.depart(customer, LeaveOutcome::NoPurchase),
            ServicePoint::Refund => self.depart(customer, LeaveOutcome::RefundAbandoned),
        }
    }

    fn handle_service_done(&mut self, staff: StaffId, customer: CustomerId, point: ServicePoint) {
        let now = self.now();
        match point {
            ServicePoint::Pay => {
                self.counters.transactions += 1;
                self.trace.emit(now, "pay_complete", customer);
                self.record(customer, Transition::Block(Block::Pay, Step::Completion));
                self.release(staff);
                self.depart(customer, LeaveOutcome::Purchased);
            }
            ServicePoint::Refund => {
                if rules::refund_settled_by_cashier(&mut self.rng, &self.config.practice) {
                    let approved = rules::cashier_approves(&mut self.rng, &self.config.practice);
                    self.release(staff);
                    self.resolve_refund(customer, approved);
                } else {
                    // Expert authorization required; customer and cashier
                    // wait together for an expert.
                    self.counters.authorizations += 1;
                    self.trace.emit(now, "auth_request", customer);
                    self.customers[customer.0 as usize].authorizing_cashier = Some(staff);
                    match self.idle_staff(StaffRole::Expert) {
                        Some(expert) => self.start_authorization(expert, customer),
                        None => {
                            self.queues.help_expert.push_back(customer);
                            self.trace.emit(now, "auth_wait", customer);
                        }
                    }
                }
            }
            ServicePoint::HelpNormal => {
                match rules::first_line_follow_up(
                    &mut self.rng,
                    &self.config.department,
                    &self.config.practice,
                ) {
                    FirstLineFollowUp::Escalate { learn } => {
                        self.counters.escalations += 1;
                        self.trace.emit(now, "escalate", customer);
                        if learn {
                            // The assistant stays with the customer through
                            // the expert interaction.
                            self.customers[customer.0 as usize].shadowing_normal = Some(staff);
                            self.trace.emit(now, "shadow_start", staff);
                        } else {
                            self.release(staff);
                        }
                        self.attempt_service(customer, ServicePoint::HelpExpert);
                    }
                    FirstLineFollowUp::Buy => {
                        self.release(staff);
                        self.customers[customer.0 as usize].has_item = true;
                        self.attempt_service(customer, ServicePoint::Pay);
                    }
                    FirstLineFollowUp::Leave => {
                        self.release(staff);
                        self.depart(customer, LeaveOutcome::NoPurchase);
                    }
                }
            }
            ServicePoint::HelpExpert => {
                if let Some(normal) = self.customers[customer.0 as usize].shadowing_normal.take() {
                    let s = &mut self.staff[normal.0 as usize];
                    s.knowledge += 1;
                    self.trace.emit(now, "knowledge_gain", normal);
                    self.promotion_check(normal);
                    self.release(normal);
                }
                self.release(staff);
                if rules::buys_after_help(&mut self.rng, &self.config.department) {
                    self.customers[customer.0 as usize].has_item = true;
                    self.attempt_service(customer, ServicePoint::Pay);
                } else {
                    self.depart(customer, LeaveOutcome::NoPurchase);
                }
            }
        }
    }

    fn start_authorization(&mut self, expert: StaffId, customer: CustomerId) {
        let now = self.now();
        self.set_busy(expert);
        self.trace.emit(now, "auth_start", customer);
        let cashier = self.customers[customer.0 as usize]
            .authorizing_cashier
            .expect("authorization has a waiting cashier");
        let delay = self.dists.authorization_duration.sample(&mut self.rng);
        self.scheduler
            .schedule(
                now + delay,
                EventPayload::AuthorizationDone {
                    expert,
                    cashier,
                    customer,
                },
            )
            .expect("authorization completion in the future");
    }

    fn handle_authorization_done(
        &mut self,
        expert: StaffId,
        cashier: StaffId,
        customer: CustomerId,
    ) {
        self.trace.emit(self.now(), "auth_done", customer);
        let approved = rules::expert_approves(&mut self.rng, &self.config.practice);
        self.customers[customer.0 as usize].authorizing_cashier = None;
        self.release(expert);
        self.release(cashier);
        self.resolve_refund(customer, approved);
    }

    fn resolve_refund(&mut self, customer: CustomerId, approved: bool) {
        let now = self.now();
        if approved {
            self.counters.refunds_granted += 1;
            self.trace.emit(now, "refund_granted", customer);
            self.record(customer, Transition::Block(Block::Refund, Step::Completion));
            if rules::shops_after_refund(&mut self.rng, &self.config.department) {
                let c = &mut self.customers[customer.0 as usize];
                debug_assert_eq!(c.goal, CustomerGoal::Refund, "goal mutates at most once");
                c.goal = CustomerGoal::Purchase;
                self.start_browsing(customer);
            } else {
                self.depart(customer, LeaveOutcome::RefundGranted);
            }
        } else {
            self.counters.refunds_denied += 1;
            self.trace.emit(now, "refund_denied", customer);
            self.record(customer, Transition::RefundDenied);
            self.depart(customer, LeaveOutcome::RefundDenied);
        }
    }

    fn promotion_check(&mut self, staff: StaffId) {
        let now = self.now();
        let threshold = self.config.practice.promotion_threshold();
        let s = &mut self.staff[staff.0 as usize];
        if s.role == StaffRole::Normal && s.knowledge >= threshold {
            s.role = StaffRole::Expert;
            s.promoted_at = Some(now);
            self.trace.emit(now, "promotion", staff);
        }
    }

    // ---- staff busy accounting and queue pulling ------------------------

    fn set_busy(&mut self, staff: StaffId) {
        let now = self.now();
        let s = &mut self.staff[staff.0 as usize];
        debug_assert!(!s.is_busy(), "staff member double-booked");
        s.busy_since = Some(now);
        self.trace.emit(now, "staff_busy", staff);
    }

    /// Closes the staff member's busy interval and immediately offers them
    /// the next suitable queued customer. Busy time is credited to the role
    /// held during the interval; a promotion lands exactly at its end.
    fn release(&mut self, staff: StaffId) {
        let now = self.now();
        let role_now;
        {
            let s = &mut self.staff[staff.0 as usize];
            let since = s.busy_since.take().expect("releasing an idle staff member");
            s.busy_minutes += now - since;
            role_now = s.role;
            let role_during = s.role_at(since);
            s.busy_open_by_role[role_during.index()] += self.hours.open_overlap(since, now);
        }
        self.trace.emit(now, "staff_free", staff);
        self.pull_queue(staff, role_now);
    }

    fn pull_queue(&mut self, staff: StaffId, role: StaffRole) {
        match role {
            StaffRole::Normal => {
                if let Some(customer) = self.queues.help_normal.pop_front() {
                    self.dequeue(customer);
                    self.start_service(staff, customer, ServicePoint::HelpNormal, true);
                }
            }
            StaffRole::Expert => {
                if let Some(customer) = self.queues.help_expert.pop_front() {
                    self.dequeue(customer);
                    if self.customers[customer.0 as usize].authorizing_cashier.is_some() {
                        self.start_authorization(staff, customer);
                    } else {
                        self.start_service(staff, customer, ServicePoint::HelpExpert, true);
                    }
                }
            }
            StaffRole::Cashier => {
                // One till line in spirit: take whichever of the two till
                // queues has waited longest.
                let pay_at = self
                    .queues
                    .pay
                    .front()
                    .map(|&c| self.customers[c.0 as usize].enqueued_at);
                let refund_at = self
                    .queues
                    .refund
                    .front()
                    .map(|&c| self.customers[c.0 as usize].enqueued_at);
                let take_pay = match (pay_at, refund_at) {
                    (Some(p), Some(r)) => p <= r,
                    (Some(_), None) => true,
                    (None, Some(_)) => false,
                    (None, None) => return,
                };
                if take_pay {
                    let customer = self.queues.pay.pop_front().expect("front checked");
                    self.dequeue(customer);
                    self.start_service(staff, customer, ServicePoint::Pay, true);
                } else {
                    let customer = self.queues.refund.pop_front().expect("front checked");
                    self.dequeue(customer);
                    self.start_service(staff, customer, ServicePoint::Refund, true);
                }
            }
        }
    }

    /// Invalidates the customer's pending patience deadline on dequeue.
    fn dequeue(&mut self, customer: CustomerId) {
        let c = &mut self.customers[customer.0 as usize];
        c.queue_generation += 1;
        c.patience_deadline = None;
    }

    fn depart(&mut self, customer: CustomerId, outcome: LeaveOutcome) {
        let now = self.now();
        let kind = match outcome {
            LeaveOutcome::Purchased => "depart_purchase",
            LeaveOutcome::NoPurchase => "depart_no_purchase",
            LeaveOutcome::RefundGranted => "depart_refund_granted",
            LeaveOutcome::RefundDenied => "depart_refund_denied",
            LeaveOutcome::RefundAbandoned => "depart_refund_abandoned",
        };
        if outcome == LeaveOutcome::NoPurchase {
            self.record(customer, Transition::LeaveWithoutPurchase);
        }
        self.trace.emit(now, kind, customer);
        let c = &mut self.customers[customer.0 as usize];
        debug_assert!(!c.state.is_left(), "customer departed twice");
        c.state = CustomerState::Left(outcome);
        let arrival_goal = c.arrival_goal;
        self.ledger
            .finalize_customer(customer, arrival_goal)
            .expect("single finalization per customer");
        self.counters.departures += 1;
    }

    fn record(&mut self, customer: CustomerId, transition: Transition) {
        self.ledger
            .record_transition(customer, transition, &self.weights)
            .expect("transitions only recorded for in-store customers");
    }

    // ---- invariant audit -------------------------------------------------

    /// Walks all agent state and panics on any violated invariant. Enabled
    /// via `set_audit`; used by the randomized conservation suite.
    #[allow(clippy::missing_panics_doc)]
    pub fn check_invariants(&mut self) {
        let now = self.now();

        // Conservation: arrivals = departures + customers still in store.
        let in_store = self
            .customers
            .iter()
            .filter(|c| !c.state.is_left())
            .count() as u64;
        assert_eq!(
            self.counters.arrivals,
            self.counters.departures + in_store,
            "conservation violated at t={now}"
        );
        assert_eq!(self.counters.arrivals, self.customers.len() as u64);

        // Single placement: no customer in two queues; queue members must be
        // waiting (or refunds parked for authorization).
        let mut seen = std::collections::HashSet::new();
        for id in self.queues.iter_all() {
            assert!(seen.insert(id), "{id} appears in two queues at t={now}");
            let c = &self.customers[id.0 as usize];
            let parked_for_auth = c.state == CustomerState::ProcessingRefund
                && c.authorizing_cashier.is_some();
            assert!(
                c.state.is_waiting() || parked_for_auth,
                "{id} queued in state {:?} at t={now}",
                c.state
            );
        }

        for c in &self.customers {
            // Patience deadline set iff waiting in a queue.
            assert_eq!(
                c.patience_deadline.is_some(),
                c.state.is_waiting(),
                "{} deadline/state mismatch at t={now}",
                c.id
            );
            // Sequential order: paying requires a picked-up item.
            if matches!(c.state, CustomerState::QueuingToPay | CustomerState::Paying) {
                assert!(c.has_item, "{} at the till without an item", c.id);
            }
            if c.state.is_waiting() {
                assert!(
                    self.queues.iter_all().any(|id| id == c.id),
                    "{} waiting but not in a queue",
                    c.id
                );
            }
        }

        // Staff accounting: bounded busy time, knowledge monotone.
        for s in &self.staff {
            assert!(
                s.busy_minutes <= now + 1e-9,
                "{} busy longer than elapsed time",
                s.id
            );
            if let Some(since) = s.busy_since {
                assert!(since <= now);
            }
            let prev = self.audit_knowledge[s.id.0 as usize];
            assert!(s.knowledge >= prev, "{} knowledge decreased", s.id);
            if s.promoted_at.is_some() {
                assert_eq!(s.role, StaffRole::Expert, "promotion is irreversible");
            }
        }
        for (slot, s) in self.audit_knowledge.iter_mut().zip(&self.staff) {
            *slot = s.knowledge;
        }
    }
}
