//! Acceptance suite. Each test checks one headline behavior end to end and
//! prints a PASS line, so `cargo test --test acceptance -- --nocapture`
//! doubles as a checklist. CSV determinism of the command-line interface has
//! its own acceptance test in the cli crate.

use rand::Rng;
use shopfloor_core::config::{
    DepartmentProfile, SimulationConfig, StaffingPlan, TriangularParams,
};
use shopfloor_core::domain::{CustomerGoal, Simulation, TraceSink};
use shopfloor_core::engine::RngStream;
use shopfloor_core::harness::{self, PracticeKind};
use shopfloor_core::metrics;
use shopfloor_core::satisfaction::{apply_scenario, WeightScenario, WeightTable};
use shopfloor_core::stats;

/// Help-block weight sum for one customer, read off the trace with the
/// canonical weights hardcoded here as the oracle.
fn help_block_sum(trace: &str, agent: &str) -> i64 {
    trace
        .lines()
        .filter_map(|line| {
            let mut parts = line.split('\t');
            let _time = parts.next()?;
            let kind = parts.next()?;
            let who = parts.next()?;
            if who != agent {
                return None;
            }
            match kind {
                "help_immediate" => Some(4),
                "help_wait" => Some(-2),
                "help_serve_after_wait" => Some(2),
                "abandon_help_normal" | "abandon_help_expert" => Some(-2),
                _ => None,
            }
        })
        .sum()
}

fn scripted_base() -> SimulationConfig {
    let mut cfg = SimulationConfig::default();
    cfg.run.weeks = 1;
    cfg.run.days_per_week = 1;
    cfg.run.open_hours_per_day = 24.0;
    cfg.department.p_refund_visit = 0.0;
    cfg.department.p_need_help = 1.0;
    cfg.department.p_buy_after_browse = 0.0;
    cfg.department.p_buy_after_help = 0.0;
    cfg.department.p_buy_without_help = 0.0;
    cfg.department.p_escalate = 0.0;
    cfg.department.browse = TriangularParams::new(1.0, 1.0, 1.0);
    cfg.department.help_duration = TriangularParams::new(5.0, 5.0, 5.0);
    cfg.staffing = StaffingPlan::new(0, 1, 0);
    cfg
}

#[test]
fn acceptance_1_satisfaction_arithmetic() {
    // Immediate help: one customer, one idle assistant.
    let mut immediate = Simulation::new_scripted(
        scripted_base(),
        RngStream::for_replication(1, 0, 0),
    )
    .unwrap();
    immediate.set_trace(TraceSink::buffer());
    let c0 = immediate.inject_customer(CustomerGoal::Purchase);
    immediate.run();
    let trace = String::from_utf8(immediate.take_trace().into_bytes().unwrap()).unwrap();
    assert_eq!(help_block_sum(&trace, &c0.to_string()), 4);
    // Served immediately (+4), left without buying (-2).
    assert_eq!(immediate.ledger().final_index(c0), Some(2));

    // Waited help: the second customer queues behind the first and is served
    // when the assistant frees up; the wait cancels out.
    let mut cfg = scripted_base();
    cfg.department.help_patience = TriangularParams::new(100.0, 100.0, 100.0);
    let mut waited =
        Simulation::new_scripted(cfg, RngStream::for_replication(1, 0, 1)).unwrap();
    waited.set_trace(TraceSink::buffer());
    let _c0 = waited.inject_customer(CustomerGoal::Purchase);
    let c1 = waited.inject_customer(CustomerGoal::Purchase);
    waited.run();
    let trace = String::from_utf8(waited.take_trace().into_bytes().unwrap()).unwrap();
    assert_eq!(help_block_sum(&trace, &c1.to_string()), 0);
    assert_eq!(waited.ledger().final_index(c1), Some(-2));

    // Abandoned help: patience runs out before the assistant frees up;
    // the block contributes -4 and leaving without a purchase makes it -6.
    let mut cfg = scripted_base();
    cfg.department.help_patience = TriangularParams::new(2.0, 2.0, 2.0);
    let mut abandoned =
        Simulation::new_scripted(cfg, RngStream::for_replication(1, 0, 2)).unwrap();
    abandoned.set_trace(TraceSink::buffer());
    let _c0 = abandoned.inject_customer(CustomerGoal::Purchase);
    let c1 = abandoned.inject_customer(CustomerGoal::Purchase);
    abandoned.run();
    let trace = String::from_utf8(abandoned.take_trace().into_bytes().unwrap()).unwrap();
    assert_eq!(help_block_sum(&trace, &c1.to_string()), -4);
    assert_eq!(abandoned.ledger().final_index(c1), Some(-6));

    println!("acceptance 1 PASS: satisfaction arithmetic +4 / 0 / -4 / -6 exact");
}

#[test]
fn acceptance_2_weight_scaling_linearity() {
    let base = {
        let mut cfg = SimulationConfig::for_department(DepartmentProfile::atv());
        cfg.staffing = StaffingPlan::new(3, 6, 1);
        cfg.run.weeks = 2;
        cfg
    };
    let run_scaled = |factor: i64| {
        let mut cfg = base.clone();
        cfg.run.weight_scenario = Some(WeightScenario::Scale { factor });
        let mut sim =
            Simulation::new(cfg, RngStream::for_replication(42, 0, 0)).unwrap();
        sim.run();
        let m = metrics::snapshot(&sim);
        (
            m.overall_satisfaction,
            m.overall_satisfaction_shopping,
            m.overall_satisfaction_refund,
        )
    };
    let unit = run_scaled(1);
    assert_ne!(unit.0, 0, "degenerate run: zero satisfaction");
    for factor in [10i64, 100] {
        let scaled = run_scaled(factor);
        assert_eq!(scaled.0, factor * unit.0);
        assert_eq!(scaled.1, factor * unit.1);
        assert_eq!(scaled.2, factor * unit.2);
    }
    println!("acceptance 2 PASS: overall satisfaction under x10/x100 weights scales exactly");
}

#[test]
fn acceptance_3_behavioral_independence_from_weights() {
    let mut cfg = SimulationConfig::for_department(DepartmentProfile::atv());
    cfg.staffing = StaffingPlan::new(3, 6, 1);
    cfg.run.weeks = 1;
    let run_with = |weights: WeightTable| {
        let mut cfg = cfg.clone();
        cfg.weights = weights;
        let mut sim =
            Simulation::new(cfg, RngStream::for_replication(7, 0, 0)).unwrap();
        sim.set_trace(TraceSink::buffer());
        sim.run();
        sim.take_trace().into_bytes().unwrap()
    };
    let canonical = run_with(WeightTable::canonical());
    let flattened = run_with(
        apply_scenario(&WeightTable::canonical(), WeightScenario::Uniform { value: 1 })
            .unwrap(),
    );
    assert!(!canonical.is_empty());
    assert_eq!(
        canonical, flattened,
        "event traces must be byte-identical under different weight tables"
    );
    println!("acceptance 3 PASS: event trace byte-identical under different weight tables");
}

#[test]
fn acceptance_4_conservation_suite() {
    let mut gen = RngStream::from_seed_parts(20_260_809, &[]);
    let tri = |g: &mut RngStream, lo: f64, hi: f64| {
        let a = g.gen_range(lo..hi);
        let b = g.gen_range(lo..hi);
        let c = g.gen_range(lo..hi);
        let mut v = [a, b, c];
        v.sort_by(f64::total_cmp);
        TriangularParams::new(v[0], v[1], v[2])
    };
    for case in 0..50 {
        let mut cfg = SimulationConfig::default();
        cfg.run.weeks = 1;
        cfg.run.days_per_week = 1;
        cfg.run.open_hours_per_day = gen.gen_range(4.0..10.0);
        cfg.department.arrival_rate = gen.gen_range(5.0..120.0);
        cfg.department.p_need_help = gen.gen();
        cfg.department.p_buy_after_browse = gen.gen();
        cfg.department.p_buy_after_help = gen.gen();
        cfg.department.p_buy_without_help = gen.gen();
        cfg.department.p_refund_visit = gen.gen_range(0.0..0.4);
        cfg.department.p_shop_after_refund = gen.gen();
        cfg.department.p_escalate = gen.gen();
        cfg.department.browse = tri(&mut gen, 0.5, 20.0);
        cfg.department.help_duration = tri(&mut gen, 0.5, 30.0);
        cfg.department.pay_duration = tri(&mut gen, 0.5, 8.0);
        cfg.department.refund_duration = tri(&mut gen, 0.5, 12.0);
        cfg.department.authorization_duration = tri(&mut gen, 0.5, 8.0);
        cfg.department.pay_patience = tri(&mut gen, 1.0, 30.0);
        cfg.department.help_patience = tri(&mut gen, 1.0, 30.0);
        cfg.department.refund_patience = tri(&mut gen, 1.0, 30.0);
        cfg.staffing = StaffingPlan::new(
            gen.gen_range(1..4),
            gen.gen_range(0..6),
            gen.gen_range(0..4),
        );
        cfg.practice.p_task_empowerment = gen.gen();
        cfg.practice.p_learn = gen.gen();
        cfg.practice.threshold_fraction = gen.gen();
        cfg.practice.k_max = gen.gen_range(1..40);
        cfg.validate().unwrap_or_else(|e| panic!("case {case}: {e}"));

        let mut sim =
            Simulation::new(cfg, RngStream::for_replication(1000 + case, 0, 0)).unwrap();
        // Per-event checks: conservation, single placement, staff
        // accounting, knowledge monotonicity.
        sim.set_audit(true);
        sim.run();
        sim.check_invariants();
        let m = metrics::snapshot(&sim);
        assert_eq!(
            m.arrivals,
            m.departures + sim.in_store(),
            "case {case}: conservation after drain"
        );
        for u in [m.utilization_cashier, m.utilization_normal, m.utilization_expert]
            .into_iter()
            .flatten()
        {
            assert!((0.0..=1.0).contains(&u), "case {case}: utilization {u}");
        }
    }
    println!("acceptance 4 PASS: 50 randomized configs hold all conservation invariants");
}

#[test]
fn acceptance_5_staffing_sweep_directionality() {
    let plan = harness::preset_staffing_validation(DepartmentProfile::atv());
    let set = harness::run_replications(&plan, None).unwrap();
    let means = set.condition_means("transactions");
    assert_eq!(means.len(), 5);
    let peak = (0..5)
        .max_by(|&a, &b| means[a].total_cmp(&means[b]))
        .unwrap();
    assert!(
        (1..=3).contains(&peak),
        "transactions should peak at an interior cashier level, means {means:?}"
    );
    assert!(means[0] < means[peak], "rise from one cashier: {means:?}");
    assert!(means[4] < means[peak], "fall by five cashiers: {means:?}");

    let groups: Vec<Vec<f64>> = (0..5)
        .map(|c| {
            set.condition_values(c, "transactions")
                .into_iter()
                .flatten()
                .collect()
        })
        .collect();
    let slices: Vec<&[f64]> = groups.iter().map(|g| g.as_slice()).collect();
    let anova = stats::anova_oneway(&slices).unwrap();
    assert!(
        anova.between.p < 0.001,
        "staffing effect p = {}",
        anova.between.p
    );
    println!(
        "acceptance 5 PASS: transactions rise-peak-fall over cashiers ({:?} peak at {} cashiers), ANOVA p = {:.2e}",
        means.iter().map(|m| m.round()).collect::<Vec<_>>(),
        peak + 1,
        anova.between.p
    );
}

#[test]
fn acceptance_6_learning_sweep_directionality() {
    let corrected = stats::bonferroni(0.05, 5);
    let mut expert_flat = 0;
    for experiment in 0..5u64 {
        let mut plan = harness::preset_practice(PracticeKind::EmpowermentToLearn);
        plan.base_seed = 42 + experiment;
        let set = harness::run_replications(&plan, None).unwrap();

        // Knowledge strictly increases with the probability of learning.
        let knowledge = set.condition_means("mean_normal_knowledge");
        for pair in knowledge.windows(2) {
            assert!(
                pair[0] < pair[1],
                "experiment {experiment}: knowledge not strictly increasing {knowledge:?}"
            );
        }

        let knowledge_groups: Vec<Vec<f64>> = (0..5)
            .map(|c| {
                set.condition_values(c, "mean_normal_knowledge")
                    .into_iter()
                    .flatten()
                    .collect()
            })
            .collect();
        let slices: Vec<&[f64]> = knowledge_groups.iter().map(|g| g.as_slice()).collect();
        let tukey = stats::tukey_hsd(&slices, corrected).unwrap();
        let extremes = tukey
            .comparisons
            .iter()
            .find(|c| c.group_i == 0 && c.group_j == 4)
            .unwrap();
        assert!(
            extremes.significant,
            "experiment {experiment}: extremes not Tukey-significant"
        );

        // Expert utilization must not move with the learning probability.
        let util_groups: Vec<Vec<f64>> = (0..5)
            .map(|c| {
                set.condition_values(c, "utilization_expert")
                    .into_iter()
                    .flatten()
                    .collect()
            })
            .collect();
        let slices: Vec<&[f64]> = util_groups.iter().map(|g| g.as_slice()).collect();
        let anova = stats::anova_oneway(&slices).unwrap();
        if anova.between.p >= 0.05 {
            expert_flat += 1;
        }
    }
    assert!(
        expert_flat >= 4,
        "expert utilization ANOVA non-significant in only {expert_flat} of 5 experiments"
    );
    println!(
        "acceptance 6 PASS: knowledge strictly increases with p_learn; expert utilization flat in {expert_flat}/5 experiments"
    );
}

#[test]
fn acceptance_7_task_empowerment_directionality() {
    let plan = harness::preset_practice(PracticeKind::TaskEmpowerment);
    let set = harness::run_replications(&plan, None).unwrap();
    let means = set.condition_means("overall_satisfaction_refund");
    for pair in means.windows(2) {
        assert!(
            pair[0] < pair[1],
            "refund satisfaction not strictly increasing: {means:?}"
        );
    }
    let groups: Vec<Vec<f64>> = (0..5)
        .map(|c| {
            set.condition_values(c, "overall_satisfaction_refund")
                .into_iter()
                .flatten()
                .collect()
        })
        .collect();
    let slices: Vec<&[f64]> = groups.iter().map(|g| g.as_slice()).collect();
    let corrected = stats::bonferroni(0.05, 3);
    let tukey = stats::tukey_hsd(&slices, corrected).unwrap();
    for step in 0..4 {
        let pair = tukey
            .comparisons
            .iter()
            .find(|c| c.group_i == step && c.group_j == step + 1)
            .unwrap();
        assert!(
            pair.significant,
            "increment {step}->{} not Tukey-significant at alpha {corrected}: diff {}",
            step + 1,
            pair.mean_difference
        );
    }
    println!(
        "acceptance 7 PASS: refund satisfaction strictly increasing, every increment Tukey-significant ({:?})",
        means.iter().map(|m| m.round()).collect::<Vec<_>>()
    );
}

#[test]
fn acceptance_8_statistics_oracles() {
    // One-way hand case.
    let a = stats::anova_oneway(&[&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]]).unwrap();
    assert!((a.between.f - 1.5).abs() < 1e-10);
    assert_eq!((a.between.df, a.within.df), (1.0, 4.0));

    // Bonferroni thresholds.
    assert!((stats::bonferroni(0.05, 3) - 0.0167).abs() < 1e-4);
    assert!((stats::bonferroni(0.05, 5) - 0.01).abs() < 1e-12);

    // Two-way sum-of-squares additivity.
    let cells = vec![
        vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        vec![vec![5.0, 6.0], vec![9.0, 10.0]],
    ];
    let tw = stats::anova_twoway(&cells).unwrap();
    let recomposed = tw.factor_a.ss + tw.factor_b.ss + tw.interaction.ss + tw.within.ss;
    assert!((recomposed - tw.ss_total).abs() < 1e-9);

    // Studentized range critical value against the published table.
    let q = stats::srange::srange_quantile(0.95, 3, 12.0);
    assert!((q - 3.77).abs() < 0.01, "q(3,12,.05) = {q}");

    // F == t^2 for two groups.
    let g1 = [12.1, 14.3, 11.8, 13.6, 12.9, 14.8];
    let g2 = [10.2, 11.9, 10.8, 12.4, 11.1, 10.5];
    let f = stats::anova_oneway(&[&g1, &g2]).unwrap().between.f;
    let d1 = stats::describe(&g1).unwrap();
    let d2 = stats::describe(&g2).unwrap();
    let sp2 = ((g1.len() - 1) as f64 * d1.sd * d1.sd + (g2.len() - 1) as f64 * d2.sd * d2.sd)
        / (g1.len() + g2.len() - 2) as f64;
    let t = (d1.mean - d2.mean)
        / (sp2 * (1.0 / g1.len() as f64 + 1.0 / g2.len() as f64)).sqrt();
    assert!((f - t * t).abs() < 1e-9);

    println!("acceptance 8 PASS: statistics oracles (hand ANOVA, Bonferroni, SS additivity, q-table, F = t^2)");
}
