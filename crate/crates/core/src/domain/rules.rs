//! Customer decision rules: the probabilistic branches taken at state
//! transitions, factored out of the event handlers so their frequencies can
//! be checked in isolation.

use crate::config::{DepartmentProfile, PracticeConfig};
use crate::engine::RngStream;

use super::CustomerGoal;

/// Goal drawn on arrival. With the refund loop switched off every visitor
/// comes to shop.
pub fn arrival_goal(
    rng: &mut RngStream,
    profile: &DepartmentProfile,
    practice: &PracticeConfig,
) -> CustomerGoal {
    if practice.refund_loop_enabled
        && rng
            .bernoulli(profile.p_refund_visit)
            .expect("validated probability")
    {
        CustomerGoal::Refund
    } else {
        CustomerGoal::Purchase
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrowseOutcome {
    SeekHelp,
    Buy,
    Leave,
}

/// Branch taken when a customer finishes browsing: help first, then purchase
/// among the rest.
pub fn browse_outcome(rng: &mut RngStream, profile: &DepartmentProfile) -> BrowseOutcome {
    if rng
        .bernoulli(profile.p_need_help)
        .expect("validated probability")
    {
        BrowseOutcome::SeekHelp
    } else if rng
        .bernoulli(profile.p_buy_after_browse)
        .expect("validated probability")
    {
        BrowseOutcome::Buy
    } else {
        BrowseOutcome::Leave
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstLineFollowUp {
    /// The request exceeds the assistant's competence; an expert takes over.
    /// `learn` is whether the assistant stays to shadow the interaction.
    Escalate { learn: bool },
    Buy,
    Leave,
}

/// Branch taken when first-line help concludes.
pub fn first_line_follow_up(
    rng: &mut RngStream,
    profile: &DepartmentProfile,
    practice: &PracticeConfig,
) -> FirstLineFollowUp {
    if rng
        .bernoulli(profile.p_escalate)
        .expect("validated probability")
    {
        let learn = rng
            .bernoulli(practice.p_learn)
            .expect("validated probability");
        FirstLineFollowUp::Escalate { learn }
    } else if rng
        .bernoulli(profile.p_buy_after_help)
        .expect("validated probability")
    {
        FirstLineFollowUp::Buy
    } else {
        FirstLineFollowUp::Leave
    }
}

/// Whether the customer buys after completed expert help.
pub fn buys_after_help(rng: &mut RngStream, profile: &DepartmentProfile) -> bool {
    rng.bernoulli(profile.p_buy_after_help)
        .expect("validated probability")
}

/// Whether a customer who gave up on the help queue still buys.
pub fn buys_without_help(rng: &mut RngStream, profile: &DepartmentProfile) -> bool {
    rng.bernoulli(profile.p_buy_without_help)
        .expect("validated probability")
}

/// Whether the cashier is empowered to settle this refund claim alone.
pub fn refund_settled_by_cashier(rng: &mut RngStream, practice: &PracticeConfig) -> bool {
    rng.bernoulli(practice.p_task_empowerment)
        .expect("validated probability")
}

pub fn cashier_approves(rng: &mut RngStream, practice: &PracticeConfig) -> bool {
    rng.bernoulli(practice.cashier_approval)
        .expect("validated probability")
}

pub fn expert_approves(rng: &mut RngStream, practice: &PracticeConfig) -> bool {
    rng.bernoulli(practice.expert_approval)
        .expect("validated probability")
}

/// Whether a refunded customer shops on instead of leaving.
pub fn shops_after_refund(rng: &mut RngStream, profile: &DepartmentProfile) -> bool {
    rng.bernoulli(profile.p_shop_after_refund)
        .expect("validated probability")
}
