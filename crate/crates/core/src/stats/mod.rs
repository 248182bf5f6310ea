//! The analysis stack: descriptives, one-sample Kolmogorov-Smirnov
//! normality check, Levene's variance-homogeneity test, one- and two-way
//! ANOVA with effect sizes, Tukey's HSD post-hoc comparisons and the
//! Bonferroni correction.
//!
//! Everything is implemented in-crate (see [`special`] and [`srange`]) so
//! results do not depend on platform math libraries beyond `f64`.

pub mod special;
pub mod srange;

use serde::Serialize;

use special::{f_sf, kolmogorov_sf, normal_cdf};

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("need at least {required} observations/groups, found {found}")]
    InsufficientData { required: usize, found: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("unbalanced design: {0}")]
    UnbalancedDesign(String),
    #[error("group labels must be unique, `{0}` repeats")]
    DuplicateLabel(String),
}

/// Labeled groups of observations, one observation per replication.
#[derive(Debug, Clone, Default)]
pub struct SampleMatrix {
    labels: Vec<String>,
    groups: Vec<Vec<f64>>,
}

impl SampleMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: impl Into<String>, observations: Vec<f64>) -> Result<(), StatsError> {
        let label = label.into();
        if self.labels.contains(&label) {
            return Err(StatsError::DuplicateLabel(label));
        }
        if observations.is_empty() {
            return Err(StatsError::InsufficientData {
                required: 1,
                found: 0,
            });
        }
        self.labels.push(label);
        self.groups.push(observations);
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    pub fn group_slices(&self) -> Vec<&[f64]> {
        self.groups.iter().map(|g| g.as_slice()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptives {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
}

/// Mean and sample standard deviation.
pub fn describe(sample: &[f64]) -> Result<Descriptives, StatsError> {
    if sample.len() < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: sample.len(),
        });
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let ss: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok(Descriptives {
        n: sample.len(),
        mean,
        sd: (ss / (n - 1.0)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub d: f64,
    pub p: f64,
}

/// One-sample Kolmogorov-Smirnov statistic against a normal distribution
/// with the sample's own mean and standard deviation. The p-value uses the
/// asymptotic Kolmogorov distribution with the standard small-sample
/// correction factor (sqrt(n) + 0.12 + 0.11/sqrt(n)).
pub fn ks_normality(sample: &[f64]) -> Result<KsTest, StatsError> {
    if sample.len() < 5 {
        return Err(StatsError::InsufficientData {
            required: 5,
            found: sample.len(),
        });
    }
    let stats = describe(sample)?;
    if stats.sd == 0.0 {
        return Err(StatsError::DegenerateSample(
            "zero variance, normality undefined".into(),
        ));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let z = (x - stats.mean) / stats.sd;
        let cdf = normal_cdf(z);
        let hi = (i + 1) as f64 / n - cdf;
        let lo = cdf - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    let effective = n.sqrt() + 0.12 + 0.11 / n.sqrt();
    Ok(KsTest {
        d,
        p: kolmogorov_sf(effective * d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeveneTest {
    pub w: f64,
    pub p: f64,
    pub df: (f64, f64),
    /// Set when every absolute deviation is zero: W is 0/0, reported as no
    /// evidence against homogeneity (p = 1).
    pub degenerate: bool,
}

/// Levene's test of variance homogeneity (mean-centered variant): a one-way
/// ANOVA on absolute deviations from group means.
pub fn levene(groups: &[&[f64]]) -> Result<LeveneTest, StatsError> {
    check_groups(groups, 2)?;
    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|x| (x - mean).abs()).collect()
        })
        .collect();
    let dev_slices: Vec<&[f64]> = deviations.iter().map(|d| d.as_slice()).collect();
    let parts = sum_of_squares_oneway(&dev_slices);
    let df1 = (groups.len() - 1) as f64;
    let df2 = (parts.n_total - groups.len()) as f64;
    if parts.ss_between == 0.0 && parts.ss_within == 0.0 {
        return Ok(LeveneTest {
            w: 0.0,
            p: 1.0,
            df: (df1, df2),
            degenerate: true,
        });
    }
    let w = (parts.ss_between / df1) / (parts.ss_within / df2);
    let p = if w.is_finite() { f_sf(w, df1, df2) } else { 0.0 };
    Ok(LeveneTest {
        w,
        p,
        df: (df1, df2),
        degenerate: false,
    })
}

/// One tested effect in an ANOVA decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnovaEffect {
    pub ss: f64,
    pub df: f64,
    pub mean_square: f64,
    pub f: f64,
    pub p: f64,
    /// SS_effect / SS_total.
    pub eta_squared: f64,
    /// SS_effect / (SS_effect + SS_within).
    pub partial_eta_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WithinTerm {
    pub ss: f64,
    pub df: f64,
    pub mean_square: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneWayAnova {
    pub between: AnovaEffect,
    pub within: WithinTerm,
    pub ss_total: f64,
}

struct OneWayParts {
    ss_between: f64,
    ss_within: f64,
    n_total: usize,
}

fn check_groups(groups: &[&[f64]], min_n: usize) -> Result<(), StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: groups.len(),
        });
    }
    for g in groups {
        if g.len() < min_n {
            return Err(StatsError::InsufficientData {
                required: min_n,
                found: g.len(),
            });
        }
    }
    Ok(())
}

fn sum_of_squares_oneway(groups: &[&[f64]]) -> OneWayParts {
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let grand_mean =
        groups.iter().flat_map(|g| g.iter()).sum::<f64>() / n_total as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ss_between += g.len() as f64 * (mean - grand_mean) * (mean - grand_mean);
        ss_within += g.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    }
    OneWayParts {
        ss_between,
        ss_within,
        n_total,
    }
}

fn effect(ss: f64, df: f64, ms_within: f64, df_within: f64, ss_total: f64, ss_within: f64) -> AnovaEffect {
    let mean_square = ss / df;
    let f = if ms_within > 0.0 {
        mean_square / ms_within
    } else if ss > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let p = if f.is_finite() {
        f_sf(f, df, df_within)
    } else {
        0.0
    };
    AnovaEffect {
        ss,
        df,
        mean_square,
        f,
        p,
        eta_squared: if ss_total > 0.0 { ss / ss_total } else { 0.0 },
        partial_eta_squared: if ss + ss_within > 0.0 {
            ss / (ss + ss_within)
        } else {
            0.0
        },
    }
}

/// One-way between-groups ANOVA.
pub fn anova_oneway(groups: &[&[f64]]) -> Result<OneWayAnova, StatsError> {
    check_groups(groups, 2)?;
    let parts = sum_of_squares_oneway(groups);
    let df_between = (groups.len() - 1) as f64;
    let df_within = (parts.n_total - groups.len()) as f64;
    let ms_within = parts.ss_within / df_within;
    let ss_total = parts.ss_between + parts.ss_within;
    Ok(OneWayAnova {
        between: effect(
            parts.ss_between,
            df_between,
            ms_within,
            df_within,
            ss_total,
            parts.ss_within,
        ),
        within: WithinTerm {
            ss: parts.ss_within,
            df: df_within,
            mean_square: ms_within,
        },
        ss_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoWayAnova {
    pub factor_a: AnovaEffect,
    pub factor_b: AnovaEffect,
    pub interaction: AnovaEffect,
    pub within: WithinTerm,
    pub ss_total: f64,
}

/// Two-way between-groups ANOVA on a balanced full factorial:
/// `cells[i][j]` holds the observations for level i of factor A and level j
/// of factor B, all cells the same size.
pub fn anova_twoway(cells: &[Vec<Vec<f64>>]) -> Result<TwoWayAnova, StatsError> {
    let a = cells.len();
    if a < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: a,
        });
    }
    let b = cells[0].len();
    if b < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: b,
        });
    }
    if cells.iter().any(|row| row.len() != b) {
        return Err(StatsError::UnbalancedDesign(
            "factor B levels differ across factor A".into(),
        ));
    }
    let n = cells[0][0].len();
    if n < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: n,
        });
    }
    if cells
        .iter()
        .any(|row| row.iter().any(|cell| cell.len() != n))
    {
        return Err(StatsError::UnbalancedDesign(
            "cell sizes differ; the design must be balanced".into(),
        ));
    }

    let nf = n as f64;
    let total: f64 = cells.iter().flatten().flatten().sum();
    let n_total = (a * b * n) as f64;
    let grand_mean = total / n_total;

    let cell_mean = |i: usize, j: usize| cells[i][j].iter().sum::<f64>() / nf;
    let a_means: Vec<f64> = (0..a)
        .map(|i| (0..b).map(|j| cell_mean(i, j)).sum::<f64>() / b as f64)
        .collect();
    let b_means: Vec<f64> = (0..b)
        .map(|j| (0..a).map(|i| cell_mean(i, j)).sum::<f64>() / a as f64)
        .collect();

    let ss_a: f64 = a_means
        .iter()
        .map(|m| (b as f64) * nf * (m - grand_mean) * (m - grand_mean))
        .sum();
    let ss_b: f64 = b_means
        .iter()
        .map(|m| (a as f64) * nf * (m - grand_mean) * (m - grand_mean))
        .sum();
    let mut ss_ab = 0.0;
    let mut ss_within = 0.0;
    let mut ss_total = 0.0;
    for i in 0..a {
        for j in 0..b {
            let cm = cell_mean(i, j);
            let dev = cm - a_means[i] - b_means[j] + grand_mean;
            ss_ab += nf * dev * dev;
            for &x in &cells[i][j] {
                ss_within += (x - cm) * (x - cm);
                ss_total += (x - grand_mean) * (x - grand_mean);
            }
        }
    }

    let df_a = (a - 1) as f64;
    let df_b = (b - 1) as f64;
    let df_ab = df_a * df_b;
    let df_within = (a * b * (n - 1)) as f64;
    let ms_within = ss_within / df_within;

    Ok(TwoWayAnova {
        factor_a: effect(ss_a, df_a, ms_within, df_within, ss_total, ss_within),
        factor_b: effect(ss_b, df_b, ms_within, df_within, ss_total, ss_within),
        interaction: effect(ss_ab, df_ab, ms_within, df_within, ss_total, ss_within),
        within: WithinTerm {
            ss: ss_within,
            df: df_within,
            mean_square: ms_within,
        },
        ss_total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairComparison {
    pub group_i: usize,
    pub group_j: usize,
    pub mean_difference: f64,
    pub q: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TukeyHsd {
    pub alpha: f64,
    pub q_critical: f64,
    pub df_within: f64,
    pub comparisons: Vec<PairComparison>,
}

/// Tukey's HSD pairwise comparisons for a one-way layout. The critical value
/// comes from the studentized range distribution; unequal group sizes use
/// the Tukey-Kramer standard error.
pub fn tukey_hsd(groups: &[&[f64]], alpha: f64) -> Result<TukeyHsd, StatsError> {
    check_groups(groups, 2)?;
    let anova = anova_oneway(groups)?;
    let ms_within = anova.within.mean_square;
    let df_within = anova.within.df;
    let k = groups.len();
    let q_critical = srange::srange_quantile(1.0 - alpha, k, df_within);
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let mut comparisons = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let se = (ms_within / 2.0
                * (1.0 / groups[i].len() as f64 + 1.0 / groups[j].len() as f64))
                .sqrt();
            let diff = means[i] - means[j];
            let q = if se > 0.0 {
                diff.abs() / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let p = if q.is_finite() {
                srange::srange_sf(q, k, df_within)
            } else {
                0.0
            };
            comparisons.push(PairComparison {
                group_i: i,
                group_j: j,
                mean_difference: diff,
                q,
                p,
                significant: q >= q_critical,
            });
        }
    }
    Ok(TukeyHsd {
        alpha,
        q_critical,
        df_within,
        comparisons,
    })
}

/// Bonferroni-corrected significance threshold for `m` tests.
pub fn bonferroni(alpha: f64, m: usize) -> f64 {
    assert!(m >= 1, "bonferroni requires at least one test");
    alpha / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn describe_hand_cases() {
        let d = describe(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.mean, 2.0);
        assert_eq!(d.sd, 1.0);
        let constant = describe(&[4.0; 6]).unwrap();
        assert_eq!(constant.sd, 0.0);
        assert!(matches!(
            describe(&[1.0]),
            Err(StatsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn describe_matches_exact_integer_arithmetic() {
        // 20-point synthetic set; mean and variance computed exactly from
        // integer sums: sd^2 = (n*sum(x^2) - sum(x)^2) / (n*(n-1)).
        let xs: Vec<i64> = vec![
            4853, 4861, 4847, 4870, 4852, 4859, 4844, 4866, 4851, 4857, 4841, 4874, 4856, 4849,
            4863, 4845, 4868, 4855, 4850, 4862,
        ];
        let sample: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let n = xs.len() as i64;
        let sum: i64 = xs.iter().sum();
        let sum_sq: i64 = xs.iter().map(|&x| x * x).sum();
        let exact_mean = sum as f64 / n as f64;
        let exact_var = (n * sum_sq - sum * sum) as f64 / (n as f64 * (n - 1) as f64);
        let d = describe(&sample).unwrap();
        assert!((d.mean - exact_mean).abs() < 1e-10);
        assert!((d.sd - exact_var.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn ks_accepts_normal_quantile_construction() {
        // Points placed at the normal quantiles i/(n+1) are as normal as a
        // sample can be.
        let n = 40;
        let sample: Vec<f64> = (1..=n)
            .map(|i| {
                let p = i as f64 / (n + 1) as f64;
                // Invert the normal CDF by bisection.
                let (mut lo, mut hi) = (-8.0, 8.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let ks = ks_normality(&sample).unwrap();
        assert!(ks.p > 0.05, "p = {}", ks.p);
        assert!(ks.d < 0.1, "d = {}", ks.d);
    }

    #[test]
    fn ks_rejects_heavily_bimodal_sample() {
        let mut sample = vec![0.0; 10];
        sample.extend(vec![100.0; 10]);
        // Brute-force oracle for D: max deviation between empirical CDF and
        // the fitted normal, evaluated at every sample point from both sides.
        let d_stats = describe(&sample).unwrap();
        let mut sorted = sample.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut d_oracle: f64 = 0.0;
        for (i, &x) in sorted.iter().enumerate() {
            let z = (x - d_stats.mean) / d_stats.sd;
            let cdf = normal_cdf(z);
            d_oracle = d_oracle
                .max(((i + 1) as f64 / n - cdf).abs())
                .max((cdf - i as f64 / n).abs());
        }
        let ks = ks_normality(&sample).unwrap();
        assert!((ks.d - d_oracle).abs() < 1e-12);
        assert!(ks.p < 0.05, "expected rejection, p = {}", ks.p);
    }

    #[test]
    fn ks_hand_case_five_points() {
        let sample = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let stats = describe(&sample).unwrap();
        // Hand computation: D = max |F_emp - Phi| over the step corners.
        let mut expected: f64 = 0.0;
        for (i, &x) in sample.iter().enumerate() {
            let z = (x - stats.mean) / stats.sd;
            let cdf = normal_cdf(z);
            expected = expected
                .max((i + 1) as f64 / 5.0 - cdf)
                .max(cdf - i as f64 / 5.0);
        }
        let ks = ks_normality(&sample).unwrap();
        assert!((ks.d - expected).abs() < 1e-12);
    }

    #[test]
    fn ks_degenerate_sample_rejected() {
        assert!(matches!(
            ks_normality(&[3.0; 10]),
            Err(StatsError::DegenerateSample(_))
        ));
    }

    #[test]
    fn levene_identical_groups_is_degenerate_no_evidence() {
        // Identical values within each group: all deviations zero, W = 0/0.
        let l = levene(&[&[2.0, 2.0, 2.0], &[5.0, 5.0, 5.0]]).unwrap();
        assert!(l.degenerate);
        assert_eq!(l.p, 1.0);
        assert_eq!(l.w, 0.0);
    }

    #[test]
    fn levene_hand_case() {
        // Groups {1,5} and {2,2}: deviations {2,2} and {0,0}. Between-SS of
        // the deviations is 4, within-SS is 0, so W is infinite and p = 0.
        let l = levene(&[&[1.0, 5.0], &[2.0, 2.0]]).unwrap();
        assert!(l.w.is_infinite());
        assert_eq!(l.p, 0.0);
        assert!(!l.degenerate);
    }

    #[test]
    fn anova_oneway_hand_case() {
        // Groups {1,2,3} and {2,3,4}: SSB = 1.5, SSW = 4, F = 1.5, df (1,4).
        let a = anova_oneway(&[&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]]).unwrap();
        assert!((a.between.ss - 1.5).abs() < 1e-10);
        assert!((a.within.ss - 4.0).abs() < 1e-10);
        assert!((a.between.f - 1.5).abs() < 1e-10);
        assert_eq!(a.between.df, 1.0);
        assert_eq!(a.within.df, 4.0);
        assert!((a.between.eta_squared - 1.5 / 5.5).abs() < 1e-12);
    }

    #[test]
    fn anova_identical_groups_f_zero() {
        let a = anova_oneway(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(a.between.f, 0.0);
        assert!((0.0..=1.0).contains(&a.between.eta_squared));
    }

    #[test]
    fn anova_f_equals_t_squared_for_two_groups() {
        let g1 = [12.1, 14.3, 11.8, 13.6, 12.9, 14.8];
        let g2 = [10.2, 11.9, 10.8, 12.4, 11.1, 10.5];
        let a = anova_oneway(&[&g1, &g2]).unwrap();
        // Pooled-variance t statistic.
        let d1 = describe(&g1).unwrap();
        let d2 = describe(&g2).unwrap();
        let sp2 = ((g1.len() - 1) as f64 * d1.sd * d1.sd
            + (g2.len() - 1) as f64 * d2.sd * d2.sd)
            / (g1.len() + g2.len() - 2) as f64;
        let t = (d1.mean - d2.mean)
            / (sp2 * (1.0 / g1.len() as f64 + 1.0 / g2.len() as f64)).sqrt();
        assert!((a.between.f - t * t).abs() < 1e-9, "F {} vs t^2 {}", a.between.f, t * t);
    }

    #[test]
    fn anova_twoway_hand_case() {
        // 2x2 design, n = 2 per cell, decomposition computed by hand:
        // SSA = 50, SSB = 18, SSAB = 2, SSW = 2, SST = 72.
        let cells = vec![
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            vec![vec![5.0, 6.0], vec![9.0, 10.0]],
        ];
        let a = anova_twoway(&cells).unwrap();
        assert!((a.factor_a.ss - 50.0).abs() < 1e-10);
        assert!((a.factor_b.ss - 18.0).abs() < 1e-10);
        assert!((a.interaction.ss - 2.0).abs() < 1e-10);
        assert!((a.within.ss - 2.0).abs() < 1e-10);
        assert!((a.ss_total - 72.0).abs() < 1e-10);
        assert!((a.factor_a.f - 100.0).abs() < 1e-9);
        assert!((a.factor_b.f - 36.0).abs() < 1e-9);
        assert!((a.interaction.f - 4.0).abs() < 1e-9);
        assert_eq!(a.within.df, 4.0);
        assert!((a.factor_a.partial_eta_squared - 50.0 / 52.0).abs() < 1e-12);
        // Additivity.
        let sum = a.factor_a.ss + a.factor_b.ss + a.interaction.ss + a.within.ss;
        assert!((sum - a.ss_total).abs() < 1e-9);
    }

    #[test]
    fn anova_twoway_additive_means_leave_no_interaction() {
        // Cell means constructed additively: interaction SS is exactly zero.
        let mut cells = vec![vec![Vec::new(); 3]; 2];
        let a_eff = [0.0, 5.0];
        let b_eff = [0.0, 2.0, 7.0];
        for (i, ae) in a_eff.iter().enumerate() {
            for (j, be) in b_eff.iter().enumerate() {
                // Same within-cell spread everywhere.
                cells[i][j] = vec![10.0 + ae + be - 0.5, 10.0 + ae + be + 0.5];
            }
        }
        let a = anova_twoway(&cells).unwrap();
        assert!(a.interaction.ss.abs() < 1e-18, "SSAB = {}", a.interaction.ss);
        assert!(a.interaction.f < 1e-9);
    }

    #[test]
    fn anova_twoway_rejects_unbalanced_design() {
        let cells = vec![
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            vec![vec![5.0, 6.0, 7.0], vec![9.0, 10.0]],
        ];
        assert!(matches!(
            anova_twoway(&cells),
            Err(StatsError::UnbalancedDesign(_))
        ));
    }

    #[test]
    fn tukey_identical_groups_never_significant() {
        let g = [5.0, 6.0, 7.0, 8.0];
        let t = tukey_hsd(&[&g, &g, &g], 0.05).unwrap();
        assert!(t.comparisons.iter().all(|c| !c.significant));
        assert!(t.comparisons.iter().all(|c| c.q == 0.0));
    }

    #[test]
    fn tukey_separated_groups_all_significant() {
        let g1: Vec<f64> = (0..10).map(|i| 0.0 + i as f64 * 0.1).collect();
        let g2: Vec<f64> = (0..10).map(|i| 50.0 + i as f64 * 0.1).collect();
        let g3: Vec<f64> = (0..10).map(|i| 100.0 + i as f64 * 0.1).collect();
        let t = tukey_hsd(&[&g1, &g2, &g3], 0.05).unwrap();
        assert!(t.comparisons.iter().all(|c| c.significant));
        assert!(t.comparisons.iter().all(|c| c.p < 1e-6));
    }

    #[test]
    fn tukey_two_groups_agrees_with_t_test() {
        // With two groups, Tukey's decision coincides with the two-sample
        // pooled t-test at the same alpha.
        let g1 = [12.1, 14.3, 11.8, 13.6, 12.9, 14.8, 13.3, 12.5];
        let g2 = [11.2, 12.9, 11.8, 13.4, 12.1, 11.5, 12.8, 11.9];
        let alpha = 0.05;
        let tukey = tukey_hsd(&[&g1, &g2], alpha).unwrap();
        let a = anova_oneway(&[&g1, &g2]).unwrap();
        // F-test of the one-way ANOVA on 2 groups is the two-sided t-test.
        let t_significant = a.between.p < alpha;
        assert_eq!(tukey.comparisons[0].significant, t_significant);
        assert!((tukey.comparisons[0].p - a.between.p).abs() < 1e-4);
    }

    #[test]
    fn bonferroni_thresholds() {
        assert!((bonferroni(0.05, 3) - 0.0167).abs() < 1e-4);
        assert!((bonferroni(0.05, 5) - 0.01).abs() < 1e-12);
        assert!((bonferroni(0.05, 1) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn levene_p_values_look_uniform_under_the_null() {
        // Equal-variance normal groups: the p-value should be roughly
        // uniform over repeated seeds. Sanity check, not an exact test.
        use crate::engine::RngStream;
        use rand::Rng;
        let mut rng = RngStream::from_seed_parts(20_240_101, &[]);
        let normal = |rng: &mut RngStream| {
            // Box-Muller from two uniforms.
            let u1: f64 = rng.gen::<f64>().max(1e-12);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let reps = 200;
        let mut below_half = 0;
        let mut below_tenth = 0;
        for _ in 0..reps {
            let groups: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..20).map(|_| normal(&mut rng)).collect())
                .collect();
            let slices: Vec<&[f64]> = groups.iter().map(|g| g.as_slice()).collect();
            let l = levene(&slices).unwrap();
            if l.p < 0.5 {
                below_half += 1;
            }
            if l.p < 0.1 {
                below_tenth += 1;
            }
        }
        let frac_half = below_half as f64 / reps as f64;
        let frac_tenth = below_tenth as f64 / reps as f64;
        assert!((0.35..0.65).contains(&frac_half), "P(p<0.5) = {frac_half}");
        assert!((0.02..0.20).contains(&frac_tenth), "P(p<0.1) = {frac_tenth}");
    }

    #[test]
    fn sample_matrix_rejects_duplicate_labels() {
        let mut m = SampleMatrix::new();
        m.push("a", vec![1.0]).unwrap();
        assert!(matches!(
            m.push("a", vec![2.0]),
            Err(StatsError::DuplicateLabel(_))
        ));
    }
}
