//! The service level index: signed weights attached to customer transitions,
//! per-customer accumulation, and the department-level satisfaction measures.
//!
//! Weights are pure observers. They never influence agent behavior or consume
//! randomness, so the full event trace of a run is identical under any weight
//! table given the same seed.

use serde::{Deserialize, Serialize};

use crate::domain::{CustomerGoal, CustomerId};

#[derive(Debug, thiserror::Error)]
pub enum SatisfactionError {
    #[error("customer {0:?} already departed")]
    AlreadyDeparted(CustomerId),
    #[error("customer {0:?} finalized twice")]
    DoubleFinalization(CustomerId),
    #[error("scenario parameter must be positive, got {0}")]
    NonPositiveScenarioValue(i64),
    #[error("square progression level must be 1, 2 or 3, got {0}")]
    InvalidProgressionLevel(u8),
}

/// Service block a transition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Help,
    Pay,
    Refund,
}

/// Instrumented step within a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// Service obtained directly, without queueing.
    ImmediateService,
    /// Joined a queue.
    Wait,
    /// Service started after a spell in the queue.
    ServedAfterWait,
    /// Left the queue before being served.
    Abandon,
    /// Block concluded successfully (sale rung up, refund granted).
    Completion,
}

/// One instrumented customer transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Block(Block, Step),
    LeaveWithoutPurchase,
    RefundDenied,
}

/// Weights for the five instrumented steps of one service block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockWeights {
    pub immediate_service: i64,
    pub wait: i64,
    pub served_after_wait: i64,
    pub abandon: i64,
    pub completion: i64,
}

/// Satisfaction weight per instrumented transition. The canonical table uses
/// magnitudes from {1, 2, 4}; scenario transforms act on it without touching
/// the simulation itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightTable {
    pub help: BlockWeights,
    pub pay: BlockWeights,
    pub refund: BlockWeights,
    pub leave_without_purchase: i64,
    pub refund_denied: i64,
}

impl Default for WeightTable {
    fn default() -> Self {
        WeightTable::canonical()
    }
}

impl WeightTable {
    /// The canonical table. The help block reproduces the worked arithmetic
    /// exactly: immediate service +4, waiting then being served nets 0, and
    /// an abandoned help queue nets -4 (-6 once the customer leaves without
    /// buying). Getting help carries no separate completion weight; the
    /// served transitions already account for it.
    pub fn canonical() -> Self {
        WeightTable {
            help: BlockWeights {
                immediate_service: 4,
                wait: -2,
                served_after_wait: 2,
                abandon: -2,
                completion: 0,
            },
            pay: BlockWeights {
                immediate_service: 1,
                wait: -1,
                served_after_wait: 1,
                abandon: -4,
                completion: 4,
            },
            refund: BlockWeights {
                immediate_service: 1,
                wait: -1,
                served_after_wait: 1,
                abandon: -4,
                completion: 2,
            },
            leave_without_purchase: -2,
            refund_denied: -2,
        }
    }

    pub fn weight(&self, transition: Transition) -> i64 {
        match transition {
            Transition::Block(block, step) => {
                let w = match block {
                    Block::Help => &self.help,
                    Block::Pay => &self.pay,
                    Block::Refund => &self.refund,
                };
                match step {
                    Step::ImmediateService => w.immediate_service,
                    Step::Wait => w.wait,
                    Step::ServedAfterWait => w.served_after_wait,
                    Step::Abandon => w.abandon,
                    Step::Completion => w.completion,
                }
            }
            Transition::LeaveWithoutPurchase => self.leave_without_purchase,
            Transition::RefundDenied => self.refund_denied,
        }
    }

    fn map(&self, f: impl Fn(i64) -> i64) -> WeightTable {
        let block = |w: &BlockWeights| BlockWeights {
            immediate_service: f(w.immediate_service),
            wait: f(w.wait),
            served_after_wait: f(w.served_after_wait),
            abandon: f(w.abandon),
            completion: f(w.completion),
        };
        WeightTable {
            help: block(&self.help),
            pay: block(&self.pay),
            refund: block(&self.refund),
            leave_without_purchase: f(self.leave_without_purchase),
            refund_denied: f(self.refund_denied),
        }
    }

    pub fn entries(&self) -> [i64; 17] {
        let b = |w: &BlockWeights| {
            [
                w.immediate_service,
                w.wait,
                w.served_after_wait,
                w.abandon,
                w.completion,
            ]
        };
        let mut out = [0i64; 17];
        out[..5].copy_from_slice(&b(&self.help));
        out[5..10].copy_from_slice(&b(&self.pay));
        out[10..15].copy_from_slice(&b(&self.refund));
        out[15] = self.leave_without_purchase;
        out[16] = self.refund_denied;
        out
    }
}

/// Weight-table transforms used by the sensitivity experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScenario {
    /// Every magnitude set to the same value, signs preserved.
    Uniform { value: i64 },
    /// Every entry multiplied by a factor, relationships preserved.
    Scale { factor: i64 },
    /// Base magnitudes {1,2,4} squared per level: level 1 keeps (1,2,4),
    /// level 2 gives (1,4,16), level 3 gives (1,16,256).
    SquareProgression { level: u8 },
}

/// Applies a scenario transform, returning the transformed table.
pub fn apply_scenario(
    weights: &WeightTable,
    scenario: WeightScenario,
) -> Result<WeightTable, SatisfactionError> {
    match scenario {
        WeightScenario::Uniform { value } => {
            if value <= 0 {
                return Err(SatisfactionError::NonPositiveScenarioValue(value));
            }
            Ok(weights.map(|w| w.signum() * value))
        }
        WeightScenario::Scale { factor } => {
            if factor <= 0 {
                return Err(SatisfactionError::NonPositiveScenarioValue(factor));
            }
            Ok(weights.map(|w| w * factor))
        }
        WeightScenario::SquareProgression { level } => {
            if !(1..=3).contains(&level) {
                return Err(SatisfactionError::InvalidProgressionLevel(level));
            }
            // Magnitude m maps to m^(2^(level-1)): 2 -> 4 -> 16, 4 -> 16 -> 256.
            let exponent = 1u32 << (level - 1);
            Ok(weights.map(move |w| w.signum() * w.abs().pow(exponent)))
        }
    }
}

/// Per-customer running indices plus the department counters that accumulate
/// as customers depart.
#[derive(Debug, Clone, Default)]
pub struct SatisfactionLedger {
    current: Vec<i64>,
    finalized: Vec<bool>,
    satisfied_count: u64,
    overall: i64,
    overall_shopping: i64,
    overall_refund: i64,
}

impl SatisfactionLedger {
    pub fn new() -> Self {
        Self::default()
    }

    fn slot(&mut self, customer: CustomerId) -> usize {
        let idx = customer.0 as usize;
        if idx >= self.current.len() {
            self.current.resize(idx + 1, 0);
            self.finalized.resize(idx + 1, false);
        }
        idx
    }

    /// Adds the weight of one transition to the customer's running index.
    pub fn record_transition(
        &mut self,
        customer: CustomerId,
        transition: Transition,
        weights: &WeightTable,
    ) -> Result<(), SatisfactionError> {
        let idx = self.slot(customer);
        if self.finalized[idx] {
            return Err(SatisfactionError::AlreadyDeparted(customer));
        }
        self.current[idx] += weights.weight(transition);
        Ok(())
    }

    /// Freezes the customer's index and folds it into the department
    /// counters, partitioned by the goal the customer arrived with.
    pub fn finalize_customer(
        &mut self,
        customer: CustomerId,
        arrival_goal: CustomerGoal,
    ) -> Result<(), SatisfactionError> {
        let idx = self.slot(customer);
        if self.finalized[idx] {
            return Err(SatisfactionError::DoubleFinalization(customer));
        }
        self.finalized[idx] = true;
        let index = self.current[idx];
        if index > 0 {
            self.satisfied_count += 1;
        }
        self.overall += index;
        match arrival_goal {
            CustomerGoal::Purchase => self.overall_shopping += index,
            CustomerGoal::Refund => self.overall_refund += index,
        }
        Ok(())
    }

    pub fn current_index(&self, customer: CustomerId) -> i64 {
        self.current.get(customer.0 as usize).copied().unwrap_or(0)
    }

    /// Final index of a departed customer, `None` while still in the store.
    pub fn final_index(&self, customer: CustomerId) -> Option<i64> {
        let idx = customer.0 as usize;
        if self.finalized.get(idx).copied().unwrap_or(false) {
            Some(self.current[idx])
        } else {
            None
        }
    }

    pub fn satisfied_count(&self) -> u64 {
        self.satisfied_count
    }

    pub fn overall_satisfaction(&self) -> i64 {
        self.overall
    }

    pub fn overall_satisfaction_shopping(&self) -> i64 {
        self.overall_shopping
    }

    pub fn overall_satisfaction_refund(&self) -> i64 {
        self.overall_refund
    }
}
