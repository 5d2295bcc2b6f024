//! Fixed audit and regression suites.
//!
//! Instance generation is pinned to one ChaCha8 stream, so every report,
//! digest, and sampler regression target is bit-reproducible across runs and
//! machines. Downstream tooling treats a flipped `holds` flag or a moved
//! digest on these suites as a regression.

use rand::Rng;

use crate::audit::{
    audit_blockwise_bon_ceiling, audit_blockwise_kl, audit_blockwise_lambda_threshold,
    audit_blockwise_sinh, audit_lambda_threshold, audit_symbolwise_chernoff,
    kl_upper_report_given, relative_reward_report_given, sinh_upper_report_given, BoundReport,
};
use crate::blockwise::{exact_blockwise_soft_bon, product_power, BlockModel};
use crate::dist::{tilt, FiniteDistribution, RewardFunction, Temperature};
use crate::exact::{exact_bon, exact_soft_bon, EnumerationBudget};
use crate::sampler::{RngSeed, SamplerConfig};
use crate::Result;

/// Seed of the pinned instance generator.
pub const SUITE_SEED: u64 = 42;

/// Temperatures exercised by the symbolwise bound suite.
pub const SUITE_LAMBDAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 5.0];

/// Candidate counts exercised by the symbolwise bound suite.
pub const SUITE_NS: [u32; 6] = [1, 2, 4, 8, 16, 32];

/// Temperatures exercised by the blockwise bound suite.
pub const BLOCK_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Candidate counts exercised by the blockwise bound suite.
pub const BLOCK_NS: [u32; 4] = [1, 2, 4, 8];

/// 100 pinned instances cycling K = 2, 3, 4: flat-Dirichlet probabilities
/// (normalized unit exponentials) and uniform [0,1) rewards.
pub fn random_instances() -> Vec<(FiniteDistribution, RewardFunction)> {
    let mut rng = RngSeed::new(SUITE_SEED, 0).rng();
    let mut out = Vec::with_capacity(100);
    for i in 0..100usize {
        let k = [2, 3, 4][i % 3];
        // 1 − u keeps the log argument in (0, 1]
        let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let probs = FiniteDistribution::from_probs(raw.iter().map(|&x| x / total).collect())
            .expect("pinned generator yields valid distributions");
        let rewards = RewardFunction::new((0..k).map(|_| rng.gen::<f64>()).collect())
            .expect("pinned generator yields finite rewards");
        out.push((probs, rewards));
    }
    out
}

/// Binary-reward blocks at p ∈ {0.5, 0.3} and m ∈ {1, 2, 3, 4}.
pub fn block_instances() -> Vec<BlockModel> {
    let mut out = Vec::with_capacity(8);
    for &p in &[0.5, 0.3] {
        for m in 1..=4usize {
            let base = FiniteDistribution::from_probs(vec![1.0 - p, p])
                .expect("binary base is valid");
            let reward = RewardFunction::new(vec![0.0, 1.0]).expect("unit rewards are finite");
            out.push(BlockModel::new(base, reward, m).expect("small blocks fit the alphabet cap"));
        }
    }
    out
}

/// Exact bound audits per instance: CV and sinh KL bounds plus the
/// relative-reward bound on the λ × n grid, then the λ-threshold soundness
/// row at every n. Report order is deterministic.
pub fn run_symbolwise_bound_suite(
    instances: &[(FiniteDistribution, RewardFunction)],
    eps: f64,
) -> Result<Vec<BoundReport>> {
    let budget = EnumerationBudget::default();
    let mut out = Vec::new();
    for (p, r) in instances {
        for &l in &SUITE_LAMBDAS {
            let lam = Temperature::new(l)?;
            let star = tilt(p, r, lam)?;
            for &n in &SUITE_NS {
                let law = exact_soft_bon(p, r, lam, n, &budget)?;
                out.push(kl_upper_report_given(p, r, lam, n, &star, &law)?);
                out.push(sinh_upper_report_given(p, r, lam, n, &star, &law)?);
                out.push(relative_reward_report_given(p, r, lam, n, &star, &law)?);
            }
        }
        for &n in &SUITE_NS {
            out.push(audit_lambda_threshold(p, r, n, eps)?);
        }
    }
    Ok(out)
}

/// Blockwise bound audits per block: CV and sinh forms on the λ × n grid,
/// then the blockwise λ-threshold soundness row at every n.
pub fn run_blockwise_bound_suite(blocks: &[BlockModel], eps: f64) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for block in blocks {
        for &l in &BLOCK_LAMBDAS {
            let lam = Temperature::new(l)?;
            for &n in &BLOCK_NS {
                out.push(audit_blockwise_kl(block, lam, n)?);
                out.push(audit_blockwise_sinh(block, lam, n)?);
            }
        }
        for &n in &BLOCK_NS {
            out.push(audit_blockwise_lambda_threshold(block, n, eps)?);
        }
    }
    Ok(out)
}

/// Monte Carlo audits: the sequence-level best-of-n reward ceiling on a
/// 20-position binary block, and the symbolwise Chernoff tail at
/// μ = 0.5, n = 3, m = 50, δ = 2. Streams are kept disjoint.
pub fn run_mc_bound_suite(draws: u64, seed: RngSeed) -> Result<Vec<BoundReport>> {
    let base = FiniteDistribution::from_probs(vec![0.5, 0.5])?;
    let reward = RewardFunction::new(vec![0.0, 1.0])?;
    let ceiling_block = BlockModel::new(base, reward, 20)?;
    Ok(vec![
        audit_blockwise_bon_ceiling(&ceiling_block, 100, 1.0, draws, seed)?,
        audit_symbolwise_chernoff(0.5, 3, 50, 2.0, draws, seed.substream(1 << 33))?,
    ])
}

/// Which sampler a regression case exercises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegressionPolicy {
    BestOfN { n: u32 },
    SoftBestOfN { lam: Temperature, n: u32 },
    BlockwiseSoftBestOfN { lam: Temperature, n: u32 },
    SymbolwiseBestOfN { n: u32 },
}

/// A pinned sampler-vs-exact-law comparison. The case owns its instance so
/// the borrowed [`SamplerConfig`] can be rebuilt on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionCase {
    pub name: &'static str,
    pub policy: RegressionPolicy,
    flat: Option<(FiniteDistribution, RewardFunction)>,
    block: Option<BlockModel>,
}

impl RegressionCase {
    fn flat_case(
        name: &'static str,
        probs: &[f64],
        rewards: &[f64],
        policy: RegressionPolicy,
    ) -> Self {
        let dist = FiniteDistribution::from_probs(probs.to_vec()).expect("pinned case is valid");
        let reward = RewardFunction::new(rewards.to_vec()).expect("pinned case is valid");
        RegressionCase {
            name,
            policy,
            flat: Some((dist, reward)),
            block: None,
        }
    }

    fn block_case(
        name: &'static str,
        probs: &[f64],
        rewards: &[f64],
        m: usize,
        policy: RegressionPolicy,
    ) -> Self {
        let base = FiniteDistribution::from_probs(probs.to_vec()).expect("pinned case is valid");
        let reward = RewardFunction::new(rewards.to_vec()).expect("pinned case is valid");
        let block = BlockModel::new(base, reward, m).expect("pinned case is valid");
        RegressionCase {
            name,
            policy,
            flat: None,
            block: Some(block),
        }
    }

    pub fn config(&self) -> SamplerConfig<'_> {
        match (self.policy, &self.flat, &self.block) {
            (RegressionPolicy::BestOfN { n }, Some((dist, reward)), _) => {
                SamplerConfig::BestOfN { dist, reward, n }
            }
            (RegressionPolicy::SoftBestOfN { lam, n }, Some((dist, reward)), _) => {
                SamplerConfig::SoftBestOfN {
                    dist,
                    reward,
                    lam,
                    n,
                }
            }
            (RegressionPolicy::BlockwiseSoftBestOfN { lam, n }, _, Some(block)) => {
                SamplerConfig::BlockwiseSoftBestOfN { block, lam, n }
            }
            (RegressionPolicy::SymbolwiseBestOfN { n }, _, Some(block)) => {
                SamplerConfig::SymbolwiseBestOfN { block, n }
            }
            _ => unreachable!("case storage always matches its policy"),
        }
    }

    /// The law the sampler's empirical counts must converge to, flattened to
    /// sequence ranks for block policies.
    pub fn exact_law(&self) -> Result<FiniteDistribution> {
        let budget = EnumerationBudget::default();
        match (self.policy, &self.flat, &self.block) {
            (RegressionPolicy::BestOfN { n }, Some((dist, reward)), _) => {
                exact_bon(dist, reward, n)
            }
            (RegressionPolicy::SoftBestOfN { lam, n }, Some((dist, reward)), _) => {
                exact_soft_bon(dist, reward, lam, n, &budget)
            }
            (RegressionPolicy::BlockwiseSoftBestOfN { lam, n }, _, Some(block)) => {
                Ok(exact_blockwise_soft_bon(block, lam, n, &budget)?.flat().clone())
            }
            (RegressionPolicy::SymbolwiseBestOfN { n }, _, Some(block)) => {
                let per_position = exact_bon(block.base(), block.reward(), n)?;
                Ok(product_power(&per_position, block.m())?.flat().clone())
            }
            _ => unreachable!("case storage always matches its policy"),
        }
    }
}

fn temp(lambda: f64) -> Temperature {
    Temperature::new(lambda).expect("pinned temperature is positive")
}

/// Ten pinned sampler regressions spanning every policy, tie handling, and
/// both temperature extremes.
pub fn sampler_regression_cases() -> Vec<RegressionCase> {
    let skew_p = [0.75, 0.2, 0.05];
    let skew_r = [0.016, 0.164, 0.820];
    let k4_p = [0.4, 0.3, 0.2, 0.1];
    let k4_r = [0.9, 0.5, 0.7, 0.1];
    vec![
        RegressionCase::flat_case(
            "binary-bon4",
            &[0.5, 0.5],
            &[0.0, 1.0],
            RegressionPolicy::BestOfN { n: 4 },
        ),
        RegressionCase::flat_case(
            "binary-soft2",
            &[0.5, 0.5],
            &[0.0, 1.0],
            RegressionPolicy::SoftBestOfN {
                lam: temp(1.0),
                n: 2,
            },
        ),
        RegressionCase::flat_case(
            "skew-cold-soft8",
            &skew_p,
            &skew_r,
            RegressionPolicy::SoftBestOfN {
                lam: temp(0.1),
                n: 8,
            },
        ),
        RegressionCase::flat_case(
            "skew-bon16",
            &skew_p,
            &skew_r,
            RegressionPolicy::BestOfN { n: 16 },
        ),
        RegressionCase::flat_case(
            "k4-soft4",
            &k4_p,
            &k4_r,
            RegressionPolicy::SoftBestOfN {
                lam: temp(0.5),
                n: 4,
            },
        ),
        RegressionCase::flat_case(
            "k5-tie-bon3",
            &[0.2, 0.2, 0.2, 0.2, 0.2],
            &[0.0, 0.25, 0.25, 0.7, 1.0],
            RegressionPolicy::BestOfN { n: 3 },
        ),
        RegressionCase::flat_case(
            "k4-hot-soft32",
            &k4_p,
            &k4_r,
            RegressionPolicy::SoftBestOfN {
                lam: temp(5.0),
                n: 32,
            },
        ),
        RegressionCase::block_case(
            "block2-soft2",
            &[0.7, 0.3],
            &[0.0, 1.0],
            2,
            RegressionPolicy::BlockwiseSoftBestOfN {
                lam: temp(1.0),
                n: 2,
            },
        ),
        RegressionCase::block_case(
            "block3-cold-soft4",
            &[0.5, 0.5],
            &[0.0, 1.0],
            3,
            RegressionPolicy::BlockwiseSoftBestOfN {
                lam: temp(0.25),
                n: 4,
            },
        ),
        RegressionCase::block_case(
            "symbolwise-bon5",
            &[0.7, 0.3],
            &[0.0, 1.0],
            4,
            RegressionPolicy::SymbolwiseBestOfN { n: 5 },
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::estimate_distribution;

    #[test]
    fn instances_are_pinned_and_well_formed() {
        let a = random_instances();
        let b = random_instances();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        for (i, (p, r)) in a.iter().enumerate() {
            assert_eq!(p.len(), [2, 3, 4][i % 3]);
            assert_eq!(p.len(), r.len());
            assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(r.values().iter().all(|&v| (0.0..1.0).contains(&v)));
        }
    }

    #[test]
    fn block_instances_cover_lengths() {
        let blocks = block_instances();
        assert_eq!(blocks.len(), 8);
        let ms: Vec<usize> = blocks.iter().map(|b| b.m()).collect();
        assert_eq!(ms, vec![1, 2, 3, 4, 1, 2, 3, 4]);
        assert!((blocks[0].base().prob(1) - 0.5).abs() < 1e-15);
        assert!((blocks[4].base().prob(1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn symbolwise_suite_subset_is_green() {
        let instances = random_instances();
        let reports = run_symbolwise_bound_suite(&instances[..2], 0.1).unwrap();
        // 5 λ × 6 n × 3 bounds + 6 threshold rows, per instance
        assert_eq!(reports.len(), 2 * (5 * 6 * 3 + 6));
        for rep in &reports {
            assert!(rep.holds, "{} lhs={} rhs={}", rep.bound_name, rep.lhs, rep.rhs);
        }
    }

    #[test]
    fn blockwise_suite_subset_is_green() {
        let blocks = block_instances();
        let reports = run_blockwise_bound_suite(&blocks[..2], 0.1).unwrap();
        assert_eq!(reports.len(), 2 * (3 * 4 * 2 + 4));
        for rep in &reports {
            assert!(rep.holds, "{} lhs={} rhs={}", rep.bound_name, rep.lhs, rep.rhs);
        }
    }

    #[test]
    fn mc_suite_is_green_at_small_draws() {
        let reports = run_mc_bound_suite(5_000, RngSeed::new(3, 0)).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].bound_name, "bon_reward_ceiling");
        assert_eq!(reports[1].bound_name, "symbolwise_chernoff_tail");
        for rep in &reports {
            assert!(rep.holds, "{} lhs={} rhs={}", rep.bound_name, rep.lhs, rep.rhs);
        }
    }

    #[test]
    fn regression_cases_are_pinned_and_computable() {
        let cases = sampler_regression_cases();
        assert_eq!(cases.len(), 10);
        let mut names: Vec<&str> = cases.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 10);
        for case in &cases {
            let law = case.exact_law().unwrap();
            assert!((law.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10, "{}", case.name);
        }
    }

    #[test]
    fn regression_sampler_tracks_exact_law_at_smoke_draws() {
        let cases = sampler_regression_cases();
        for case in cases.iter().filter(|c| {
            matches!(
                c.name,
                "binary-bon4" | "k5-tie-bon3" | "block2-soft2" | "symbolwise-bon5"
            )
        }) {
            let law = case.exact_law().unwrap();
            let emp = estimate_distribution(&case.config(), 4_000, RngSeed::new(9, 0)).unwrap();
            let tv = emp.tv_to(&law).unwrap();
            assert!(tv < 0.05, "{}: tv={tv}", case.name);
        }
    }
}
