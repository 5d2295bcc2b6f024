//! Length-m sequence models with mean-of-symbol rewards.
//!
//! A [`BlockModel`] is an i.i.d. base source paired with per-symbol rewards
//! and a block length m; sequences score r(x^m) = (1/m)·Σ r(x_i). Sequence
//! alphabets are materialized explicitly in lexicographic order of symbol
//! indices, capped at 10⁶ entries; beyond that, operations error rather than
//! subsample. Blockwise soft best-of-n reuses the flat-alphabet exact engine:
//! the mean reward takes only ~m·K distinct values, so the engine's grouping
//! by reward level keeps the enumeration small even though the flat alphabet
//! has K^m symbols.

use crate::dist::{check_pair, expected_reward, tilt, FiniteDistribution, RewardFunction, Temperature};
use crate::exact::{exact_soft_bon, EnumerationBudget};
use crate::{Error, Result};

/// Hard cap on materialized sequence alphabets.
pub const SEQUENCE_LIMIT: u64 = 1_000_000;

/// An i.i.d. source over K symbols, per-symbol rewards, and a block length.
/// Reward range ([0,1]) is enforced by the bound audits that need it, not
/// here.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModel {
    base: FiniteDistribution,
    reward: RewardFunction,
    m: usize,
}

impl BlockModel {
    pub fn new(base: FiniteDistribution, reward: RewardFunction, m: usize) -> Result<Self> {
        check_pair(&base, &reward)?;
        if m == 0 {
            return Err(Error::OutOfDomain {
                param: "m",
                constraint: "at least 1",
                value: 0.0,
            });
        }
        Ok(BlockModel { base, reward, m })
    }

    pub fn base(&self) -> &FiniteDistribution {
        &self.base
    }

    pub fn reward(&self) -> &RewardFunction {
        &self.reward
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.base.len()
    }

    /// K^m if it fits under [`SEQUENCE_LIMIT`], else an overflow error.
    pub fn sequence_count(&self) -> Result<usize> {
        checked_sequence_count(self.k(), self.m)
    }
}

fn checked_sequence_count(k: usize, m: usize) -> Result<usize> {
    let required = (k as u128)
        .checked_pow(m as u32)
        .unwrap_or(u128::MAX);
    if required > SEQUENCE_LIMIT as u128 {
        return Err(Error::AlphabetOverflow {
            required,
            limit: SEQUENCE_LIMIT,
        });
    }
    Ok(required as usize)
}

/// A distribution over all K^m length-m sequences, lexicographic by symbol
/// index. Stored behind a flat [`FiniteDistribution`] whose symbol names are
/// the per-position names concatenated (single-character bases) or joined
/// with "·".
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDistribution {
    k: usize,
    m: usize,
    flat: FiniteDistribution,
}

impl SequenceDistribution {
    fn from_flat(k: usize, m: usize, flat: FiniteDistribution) -> Self {
        debug_assert_eq!(flat.len(), k.pow(m as u32));
        SequenceDistribution { k, m, flat }
    }

    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        self.flat.probs()
    }

    pub fn prob(&self, rank: usize) -> f64 {
        self.flat.prob(rank)
    }

    /// The flat view; divergences between sequence distributions of the same
    /// shape go through this.
    pub fn flat(&self) -> &FiniteDistribution {
        &self.flat
    }

    /// Symbol indices of the sequence at `rank`, most significant first.
    pub fn sequence(&self, rank: usize) -> Vec<usize> {
        unrank(rank, self.k, self.m)
    }

    /// Lexicographic rank of a sequence of symbol indices.
    pub fn rank(&self, seq: &[usize]) -> Result<usize> {
        rank_of(seq, self.k, self.m)
    }
}

pub(crate) fn unrank(rank: usize, k: usize, m: usize) -> Vec<usize> {
    let mut digits = Vec::with_capacity(m);
    let mut r = rank;
    for _ in 0..m {
        digits.push(r % k);
        r /= k;
    }
    digits.reverse();
    digits
}

pub(crate) fn rank_of(seq: &[usize], k: usize, m: usize) -> Result<usize> {
    if seq.len() != m {
        return Err(Error::LengthMismatch {
            left: seq.len(),
            right: m,
        });
    }
    let mut rank = 0usize;
    for &d in seq {
        if d >= k {
            return Err(Error::UnknownSymbol {
                index: d,
                alphabet: k,
            });
        }
        rank = rank * k + d;
    }
    Ok(rank)
}

fn flat_symbol_names(symbols: &[String], k: usize, m: usize, count: usize) -> Vec<String> {
    let single = symbols.iter().all(|s| s.chars().count() == 1);
    let mut names = Vec::with_capacity(count);
    for rank in 0..count {
        let digits = unrank(rank, k, m);
        let name = if single {
            digits.iter().map(|&d| symbols[d].as_str()).collect()
        } else {
            digits
                .iter()
                .map(|&d| symbols[d].as_str())
                .collect::<Vec<_>>()
                .join("·")
        };
        names.push(name);
    }
    names
}

/// The m-fold product of an arbitrary per-symbol distribution, as a sequence
/// distribution over its alphabet.
pub fn product_power(d: &FiniteDistribution, m: usize) -> Result<SequenceDistribution> {
    if m == 0 {
        return Err(Error::OutOfDomain {
            param: "m",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    let k = d.len();
    let count = checked_sequence_count(k, m)?;
    let mut probs = Vec::with_capacity(count);
    for rank in 0..count {
        let mut mass = 1.0f64;
        let mut r = rank;
        for _ in 0..m {
            mass *= d.prob(r % k);
            r /= k;
        }
        probs.push(mass);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Internal("product masses strayed beyond 1e-10 of 1"));
    }
    for p in &mut probs {
        *p /= total;
    }
    let names = flat_symbol_names(d.symbols(), k, m, count);
    let flat = FiniteDistribution::new(names, probs)?;
    Ok(SequenceDistribution::from_flat(k, m, flat))
}

/// P^⊗m of the block's base source.
pub fn product_source(block: &BlockModel) -> Result<SequenceDistribution> {
    product_power(block.base(), block.m())
}

/// Canonical mean reward of a multiset of symbol counts. Summing in symbol
/// order (not draw order) makes equal multisets score bit-identically, so
/// reward ties are exact under permutation.
pub(crate) fn mean_reward_of_counts(counts: &[u32], reward: &RewardFunction, m: usize) -> f64 {
    let mut acc = 0.0f64;
    for (j, &c) in counts.iter().enumerate() {
        if c > 0 {
            acc += c as f64 * reward.value(j);
        }
    }
    acc / m as f64
}

/// Mean per-symbol reward of a sequence, (1/m)·Σ r(x_i).
pub fn sequence_reward(block: &BlockModel, x_m: &[usize]) -> Result<f64> {
    if x_m.len() != block.m() {
        return Err(Error::LengthMismatch {
            left: x_m.len(),
            right: block.m(),
        });
    }
    let k = block.k();
    let mut counts = vec![0u32; k];
    for &d in x_m {
        if d >= k {
            return Err(Error::UnknownSymbol {
                index: d,
                alphabet: k,
            });
        }
        counts[d] += 1;
    }
    Ok(mean_reward_of_counts(&counts, block.reward(), block.m()))
}

/// Rewards for every sequence in rank order, through the same canonical
/// summation as [`sequence_reward`].
pub fn flat_sequence_rewards(block: &BlockModel) -> Result<RewardFunction> {
    let count = block.sequence_count()?;
    let k = block.k();
    let mut values = Vec::with_capacity(count);
    let mut counts = vec![0u32; k];
    for rank in 0..count {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut r = rank;
        for _ in 0..block.m() {
            counts[r % k] += 1;
            r /= k;
        }
        values.push(mean_reward_of_counts(&counts, block.reward(), block.m()));
    }
    RewardFunction::new(values)
}

/// Tilt of the product source by sequence reward at temperature λ. Equals
/// the m-fold product of tilt(base, r, m·λ): tilting the block factorizes
/// because the mean reward is additive across positions.
pub fn blockwise_tilt(block: &BlockModel, lam: Temperature) -> Result<SequenceDistribution> {
    let source = product_source(block)?;
    let rewards = flat_sequence_rewards(block)?;
    let tilted = tilt(source.flat(), &rewards, lam)?;
    Ok(SequenceDistribution::from_flat(block.k(), block.m(), tilted))
}

/// Exact blockwise soft best-of-n: the flat K^m alphabet fed through the
/// composition engine.
pub fn exact_blockwise_soft_bon(
    block: &BlockModel,
    lam: Temperature,
    n: u32,
    budget: &EnumerationBudget,
) -> Result<SequenceDistribution> {
    let source = product_source(block)?;
    let rewards = flat_sequence_rewards(block)?;
    let law = exact_soft_bon(source.flat(), &rewards, lam, n, budget)?;
    Ok(SequenceDistribution::from_flat(block.k(), block.m(), law))
}

/// Matched-operating-point comparison of symbolwise vs blockwise selection.
///
/// Both routes target P*⊗m at per-symbol temperature λ′. Symbolwise runs
/// soft best-of-n per symbol at λ′ and takes the m-fold product; blockwise
/// runs one soft best-of-n over whole sequences at λ = λ′/m (the temperature
/// at which blockwise tilting factorizes to the same target). `matched_n`
/// restates the tolerance ε as the blockwise candidate count needed to match
/// a per-symbol KL of ε.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolwiseBlockwiseComparison {
    pub m: usize,
    pub n: u32,
    pub lambda_prime: f64,
    pub eps: f64,
    pub kl_symbolwise: f64,
    pub kl_blockwise: f64,
    pub matched_n: f64,
}

pub fn compare_symbolwise_blockwise(
    block: &BlockModel,
    lam_prime: Temperature,
    n: u32,
    eps: f64,
    budget: &EnumerationBudget,
) -> Result<SymbolwiseBlockwiseComparison> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfDomain {
            param: "eps",
            constraint: "positive and finite",
            value: eps,
        });
    }
    let m = block.m();
    let target = product_power(&tilt(block.base(), block.reward(), lam_prime)?, m)?;
    let per_symbol = exact_soft_bon(block.base(), block.reward(), lam_prime, n, budget)?;
    let symbolwise = product_power(&per_symbol, m)?;
    let block_lam = Temperature::new(lam_prime.lambda() / m as f64)?;
    let blockwise = exact_blockwise_soft_bon(block, block_lam, n, budget)?;
    let kl_symbolwise = crate::dist::kl_divergence(target.flat(), symbolwise.flat())?;
    let kl_blockwise = crate::dist::kl_divergence(target.flat(), blockwise.flat())?;
    let matched_n = crate::audit::sample_complexity_match(lam_prime, eps, m)?;
    Ok(SymbolwiseBlockwiseComparison {
        m,
        n,
        lambda_prime: lam_prime.lambda(),
        eps,
        kl_symbolwise,
        kl_blockwise,
        matched_n,
    })
}

/// Expected sequence reward under a sequence distribution.
pub fn expected_sequence_reward(block: &BlockModel, d: &SequenceDistribution) -> Result<f64> {
    let rewards = flat_sequence_rewards(block)?;
    expected_reward(d.flat(), &rewards)
}
