//! Seeded Monte Carlo counterparts of the exact selection laws.
//!
//! All randomness flows through a counter-based contract: a [`RngSeed`] is a
//! `(seed, stream)` pair driving a ChaCha8 generator, and bulk estimation
//! assigns draw i the substream `stream + i`. That makes every sample
//! reproducible in isolation, so fan-out across workers and a sequential run
//! produce identical counts. The generator choice (ChaCha8) is fixed;
//! regression tests freeze its behavior.
//!
//! Soft selection uses Gumbel-max on the log weights r(x_i)/λ + G_i, which
//! never normalizes and therefore survives λ as small as 1e-6. Best-of-n
//! breaks reward ties by reservoir replacement, i.e. uniformly over the
//! maximizing sample indices, from the same stream as the draws.

use crate::blockwise::{mean_reward_of_counts, BlockModel};
use crate::dist::{check_pair, FiniteDistribution, RewardFunction, Temperature};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A fully reproducible RNG coordinate: `(seed, stream)` determines the
/// entire sample sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSeed { seed, stream }
    }

    /// The i-th substream, wrapping on overflow.
    pub fn substream(self, i: u64) -> Self {
        RngSeed {
            seed: self.seed,
            stream: self.stream.wrapping_add(i),
        }
    }

    pub(crate) fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Inverse-CDF table for a finite distribution, built once per distribution.
pub(crate) struct Categorical {
    cum: Vec<f64>,
}

impl Categorical {
    pub(crate) fn new(d: &FiniteDistribution) -> Self {
        let mut cum = Vec::with_capacity(d.len());
        let mut acc = 0.0f64;
        for &p in d.probs() {
            acc += p;
            cum.push(acc);
        }
        // pin the top so u ∈ [0,1) always lands inside the table
        *cum.last_mut().expect("nonempty alphabet") = 1.0;
        Categorical { cum }
    }

    pub(crate) fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        self.cum.partition_point(|&c| c <= u)
    }
}

fn gumbel(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen();
    -(-u.ln()).ln()
}

/// n base draws, return the max-reward one; ties replaced with probability
/// 1/(ties so far), which is uniform over the maximizing indices.
fn bon_pick(cat: &Categorical, r: &RewardFunction, n: u32, rng: &mut ChaCha8Rng) -> usize {
    let mut best = cat.sample(rng);
    let mut best_reward = r.value(best);
    let mut ties = 1u32;
    for _ in 1..n {
        let x = cat.sample(rng);
        let reward = r.value(x);
        if reward > best_reward {
            best = x;
            best_reward = reward;
            ties = 1;
        } else if reward == best_reward {
            ties += 1;
            if rng.gen::<f64>() * f64::from(ties) < 1.0 {
                best = x;
            }
        }
    }
    best
}

fn soft_pick(
    cat: &Categorical,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut best = cat.sample(rng);
    let mut best_score = r.value(best) / lam.lambda() + gumbel(rng);
    for _ in 1..n {
        let x = cat.sample(rng);
        let score = r.value(x) / lam.lambda() + gumbel(rng);
        if score > best_score {
            best = x;
            best_score = score;
        }
    }
    best
}

/// One best-of-n draw; returns the symbol index.
pub fn sample_bon(
    p: &FiniteDistribution,
    r: &RewardFunction,
    n: u32,
    seed: RngSeed,
) -> Result<usize> {
    check_pair(p, r)?;
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let cat = Categorical::new(p);
    Ok(bon_pick(&cat, r, n, &mut seed.rng()))
}

/// One soft best-of-n draw via Gumbel-max selection; returns the symbol index.
pub fn sample_soft_bon(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
    seed: RngSeed,
) -> Result<usize> {
    check_pair(p, r)?;
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let cat = Categorical::new(p);
    Ok(soft_pick(&cat, r, lam, n, &mut seed.rng()))
}

/// One blockwise soft best-of-n draw: n candidate sequences from P^⊗m,
/// softmax selection on mean sequence reward. Returns m symbol indices.
pub fn sample_blockwise_soft_bon(
    block: &BlockModel,
    lam: Temperature,
    n: u32,
    seed: RngSeed,
) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let cat = Categorical::new(block.base());
    let mut rng = seed.rng();
    let m = block.m();
    let mut counts = vec![0u32; block.k()];
    let mut candidate = vec![0usize; m];
    let mut best = vec![0usize; m];
    let mut best_score = f64::NEG_INFINITY;
    for _ in 0..n {
        counts.iter_mut().for_each(|c| *c = 0);
        for slot in candidate.iter_mut() {
            let x = cat.sample(&mut rng);
            *slot = x;
            counts[x] += 1;
        }
        let reward = mean_reward_of_counts(&counts, block.reward(), m);
        let score = reward / lam.lambda() + gumbel(&mut rng);
        if score > best_score {
            best.copy_from_slice(&candidate);
            best_score = score;
        }
    }
    Ok(best)
}

/// Position-by-position best-of-n: each of the m slots gets its own n
/// candidate draws, all from one continuing stream. Returns m symbol indices.
pub fn sample_symbolwise_bon(block: &BlockModel, n: u32, seed: RngSeed) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let cat = Categorical::new(block.base());
    let mut rng = seed.rng();
    Ok((0..block.m())
        .map(|_| bon_pick(&cat, block.reward(), n, &mut rng))
        .collect())
}

/// Which sampler to run and on what instance; borrowed so configs stay cheap
/// to build per grid point.
#[derive(Debug, Clone)]
pub enum SamplerConfig<'a> {
    BestOfN {
        dist: &'a FiniteDistribution,
        reward: &'a RewardFunction,
        n: u32,
    },
    SoftBestOfN {
        dist: &'a FiniteDistribution,
        reward: &'a RewardFunction,
        lam: Temperature,
        n: u32,
    },
    BlockwiseSoftBestOfN {
        block: &'a BlockModel,
        lam: Temperature,
        n: u32,
    },
    SymbolwiseBestOfN {
        block: &'a BlockModel,
        n: u32,
    },
}

/// Raw counts per symbol (or per sequence rank for block samplers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// Total variation distance to an exact distribution over the same
    /// (index-aligned) alphabet.
    pub fn tv_to(&self, exact: &FiniteDistribution) -> Result<f64> {
        if self.counts.len() != exact.len() {
            return Err(Error::LengthMismatch {
                left: self.counts.len(),
                right: exact.len(),
            });
        }
        let total = self.total as f64;
        let sum: f64 = self
            .counts
            .iter()
            .zip(exact.probs())
            .map(|(&c, &p)| (c as f64 / total - p).abs())
            .sum();
        Ok(0.5 * sum)
    }
}

/// Runs the configured sampler `draws` times on substreams `seed.stream + i`
/// and tallies outcomes. Deterministic given (config, draws, seed), and the
/// per-draw substreams make any partition of the index range reproduce the
/// same counts.
pub fn estimate_distribution(
    config: &SamplerConfig,
    draws: u64,
    seed: RngSeed,
) -> Result<EmpiricalDistribution> {
    if draws == 0 {
        return Err(Error::OutOfDomain {
            param: "draws",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    let mut counts;
    match config {
        SamplerConfig::BestOfN { dist, reward, n } => {
            check_pair(dist, reward)?;
            if *n == 0 {
                return Err(Error::ZeroDraws);
            }
            let cat = Categorical::new(dist);
            counts = vec![0u64; dist.len()];
            for i in 0..draws {
                let mut rng = seed.substream(i).rng();
                counts[bon_pick(&cat, reward, *n, &mut rng)] += 1;
            }
        }
        SamplerConfig::SoftBestOfN {
            dist,
            reward,
            lam,
            n,
        } => {
            check_pair(dist, reward)?;
            if *n == 0 {
                return Err(Error::ZeroDraws);
            }
            let cat = Categorical::new(dist);
            counts = vec![0u64; dist.len()];
            for i in 0..draws {
                let mut rng = seed.substream(i).rng();
                counts[soft_pick(&cat, reward, *lam, *n, &mut rng)] += 1;
            }
        }
        SamplerConfig::BlockwiseSoftBestOfN { block, lam, n } => {
            counts = vec![0u64; block.sequence_count()?];
            for i in 0..draws {
                let seq = sample_blockwise_soft_bon(block, *lam, *n, seed.substream(i))?;
                counts[crate::blockwise::rank_of(&seq, block.k(), block.m())?] += 1;
            }
        }
        SamplerConfig::SymbolwiseBestOfN { block, n } => {
            counts = vec![0u64; block.sequence_count()?];
            for i in 0..draws {
                let seq = sample_symbolwise_bon(block, *n, seed.substream(i))?;
                counts[crate::blockwise::rank_of(&seq, block.k(), block.m())?] += 1;
            }
        }
    }
    Ok(EmpiricalDistribution {
        counts,
        total: draws,
    })
}
