//! Exact output distributions of best-of-n and soft best-of-n selection.
//!
//! Soft best-of-n draws n i.i.d. candidates from P and returns candidate i
//! with probability softmax(r(x_i)/λ). The exact output law is computed by
//! enumerating count vectors of the n−1 companion draws with multinomial
//! log-weights. Companions are grouped by distinct reward level rather than
//! by symbol: selection only sees rewards, so symbols sharing a reward level
//! are interchangeable, and the composition count drops from C(n−2+K, K−1)
//! to C(n−2+G, G−1) for G distinct levels. Product alphabets built from a
//! few per-symbol rewards collapse to G ≪ K, which is what makes length-m
//! sequence models enumerable at all.
//!
//! Best-of-n (argmax with uniform tie-breaking over sample indices) gets a
//! closed form through the reward-level CDF; uniform index tie-breaking
//! makes it the exact λ → 0 limit of soft selection.

use crate::dist::{check_pair, logaddexp, logsumexp, FiniteDistribution, RewardFunction, Temperature};
use crate::{Error, Result};

/// Which selection rule a policy applies to its n candidate draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStrategy {
    BestOfN,
    SoftBestOfN,
}

/// A candidate-count n plus selection rule; λ only matters for soft selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPolicy {
    strategy: SelectionStrategy,
    n: u32,
    lam: Option<Temperature>,
}

impl SamplingPolicy {
    pub fn best_of_n(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDraws);
        }
        Ok(SamplingPolicy {
            strategy: SelectionStrategy::BestOfN,
            n,
            lam: None,
        })
    }

    pub fn soft_best_of_n(n: u32, lam: Temperature) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDraws);
        }
        Ok(SamplingPolicy {
            strategy: SelectionStrategy::SoftBestOfN,
            n,
            lam: Some(lam),
        })
    }

    pub fn strategy(&self) -> SelectionStrategy {
        self.strategy
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lam(&self) -> Option<Temperature> {
        self.lam
    }

    /// Exact output law of this policy on the given instance.
    pub fn exact(
        &self,
        p: &FiniteDistribution,
        r: &RewardFunction,
        budget: &EnumerationBudget,
    ) -> Result<FiniteDistribution> {
        match self.strategy {
            SelectionStrategy::BestOfN => exact_bon(p, r, self.n),
            SelectionStrategy::SoftBestOfN => {
                let lam = self.lam.ok_or(Error::Internal("soft policy without λ"))?;
                exact_soft_bon(p, r, lam, self.n, budget)
            }
        }
    }
}

/// Cap on enumerated companion count-vectors. Exceeding it is an error, not
/// a silent fallback, so exactness claims stay honest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_terms: u64,
}

impl EnumerationBudget {
    pub const DEFAULT_MAX_TERMS: u64 = 5_000_000;

    pub fn new(max_terms: u64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::OutOfDomain {
                param: "max_terms",
                constraint: "at least 1",
                value: 0.0,
            });
        }
        Ok(EnumerationBudget { max_terms })
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

/// Positive-mass symbols bucketed by exactly-equal reward value, ascending.
struct RewardLevels {
    /// distinct reward values (−0.0 normalized to +0.0)
    values: Vec<f64>,
    /// total base mass per level, all strictly positive
    mass: Vec<f64>,
    /// per-symbol level index; None for zero-mass symbols
    group_of: Vec<Option<usize>>,
}

fn reward_levels(p: &FiniteDistribution, r: &RewardFunction) -> RewardLevels {
    // +0.0 collapses −0.0 so bitwise search agrees with == equality
    let mut values: Vec<f64> = p
        .probs()
        .iter()
        .zip(r.values())
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(_, &ri)| ri + 0.0)
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut mass = vec![0.0f64; values.len()];
    let mut group_of = Vec::with_capacity(p.len());
    for (&pi, &ri) in p.probs().iter().zip(r.values()) {
        if pi > 0.0 {
            let g = values
                .binary_search_by(|probe| probe.total_cmp(&(ri + 0.0)))
                .expect("level present by construction");
            mass[g] += pi;
            group_of.push(Some(g));
        } else {
            group_of.push(None);
        }
    }
    RewardLevels {
        values,
        mass,
        group_of,
    }
}

/// C(companions + groups − 1, groups − 1), saturating at u128::MAX.
fn composition_count(companions: u64, groups: u64) -> u128 {
    let k = (groups - 1) as u128;
    let n = companions as u128 + k;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // stays integral: after step i, acc = C(n−k+i, i)
        acc = match acc.checked_mul(n - k + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// ln k! for k = 0..=t, accumulated with Kahan compensation so table error
/// stays near one ulp even for large t.
fn ln_factorials(t: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(t + 1);
    table.push(0.0);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 1..=t {
        let term = (k as f64).ln() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        table.push(sum);
    }
    table
}

fn for_each_composition<F: FnMut(&[u32])>(total: u32, parts: usize, f: &mut F) {
    fn rec<F: FnMut(&[u32])>(remaining: u32, idx: usize, c: &mut [u32], f: &mut F) {
        if idx + 1 == c.len() {
            c[idx] = remaining;
            f(c);
            return;
        }
        for v in 0..=remaining {
            c[idx] = v;
            rec(remaining - v, idx + 1, c, f);
        }
    }
    debug_assert!(parts >= 1);
    let mut c = vec![0u32; parts];
    rec(total, 0, &mut c, f);
}

/// Exact output law of soft best-of-n selection.
///
/// For each symbol x, P_{n,λ}(x) = P(x)·e^{r(x)/λ}·E[n / (e^{r(x)/λ} +
/// Σ_{i<n} e^{r(X_i)/λ})] with the expectation over the n−1 companion draws,
/// evaluated by enumerating companion count vectors per reward level with
/// multinomial log-weights. Entirely log-domain; the result is renormalized
/// after checking its total lands within 1e-10 of 1.
pub fn exact_soft_bon(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
    budget: &EnumerationBudget,
) -> Result<FiniteDistribution> {
    check_pair(p, r)?;
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if n == 1 {
        return Ok(p.clone());
    }
    let levels = reward_levels(p, r);
    let groups = levels.values.len();
    let companions = (n - 1) as u64;
    let required = composition_count(companions, groups as u64);
    if required > budget.max_terms as u128 {
        return Err(Error::EnumerationOverflow {
            required,
            max_terms: budget.max_terms,
        });
    }

    let t = (n - 1) as usize;
    let lnfact = ln_factorials(t);
    let ln_n = (n as f64).ln();
    let lamv = lam.lambda();
    let log_mass: Vec<f64> = levels.mass.iter().map(|&m| m.ln()).collect();

    // gap[g][h] = exp((v_g − v_h)/λ), a companion's softmax weight relative
    // to an output candidate at level h. Only scaled differences ever enter,
    // so precision survives |r|/λ far beyond f64 ulp; overflow to ∞ and
    // underflow to 0 are the correct limits.
    let mut gap = vec![0.0f64; groups * groups];
    for g in 0..groups {
        for h in 0..groups {
            gap[g * groups + h] = ((levels.values[g] - levels.values[h]) / lamv).exp();
        }
    }

    // s[h] accumulates E[n / (1 + Σ_g c_g·gap[g][h])] per output level
    let mut s = vec![0.0f64; groups];
    for_each_composition(n - 1, groups, &mut |c| {
        let mut logw = lnfact[t];
        for (g, &cg) in c.iter().enumerate() {
            if cg > 0 {
                logw += cg as f64 * log_mass[g] - lnfact[cg as usize];
            }
        }
        for h in 0..groups {
            let mut rel = 0.0f64;
            for (g, &cg) in c.iter().enumerate() {
                if cg > 0 {
                    rel += cg as f64 * gap[g * groups + h];
                }
            }
            s[h] += (logw + ln_n - rel.ln_1p()).exp();
        }
    });

    let mut out = Vec::with_capacity(p.len());
    for (i, &pi) in p.probs().iter().enumerate() {
        match levels.group_of[i] {
            Some(g) => out.push(pi * s[g]),
            None => out.push(0.0),
        }
    }
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Internal(
            "soft best-of-n enumeration total strayed beyond 1e-10 of 1",
        ));
    }
    Ok(p.with_probs(out.into_iter().map(|x| x / total).collect()))
}

/// Exact output law of best-of-n selection with uniform tie-breaking over
/// sample indices: P_BoN(y) = [F(r(y))ⁿ − F⁻(r(y))ⁿ]·P(y)/P(r = r(y)) with F
/// the reward-level CDF. Uniform index ties split a level's win probability
/// proportionally to base mass, which is exactly the λ → 0 soft limit.
pub fn exact_bon(p: &FiniteDistribution, r: &RewardFunction, n: u32) -> Result<FiniteDistribution> {
    check_pair(p, r)?;
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if n == 1 {
        return Ok(p.clone());
    }
    let e = i32::try_from(n).map_err(|_| Error::OutOfDomain {
        param: "n",
        constraint: "at most 2^31 − 1",
        value: n as f64,
    })?;
    let levels = reward_levels(p, r);
    let groups = levels.values.len();
    // F at each level, top pinned to exactly 1 so the telescoping total is 1
    let mut cdf = Vec::with_capacity(groups);
    let mut acc = 0.0f64;
    for &m in &levels.mass {
        acc += m;
        cdf.push(acc);
    }
    cdf[groups - 1] = 1.0;
    let mut factor = Vec::with_capacity(groups);
    let mut below = 0.0f64;
    for (&f, &mass) in cdf.iter().zip(&levels.mass) {
        let hi = f.powi(e);
        factor.push((hi - below) / mass);
        below = hi;
    }
    let out: Vec<f64> = p
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &pi)| match levels.group_of[i] {
            Some(g) => pi * factor[g],
            None => 0.0,
        })
        .collect();
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Internal(
            "best-of-n law total strayed beyond 1e-12 of 1",
        ));
    }
    Ok(p.with_probs(out.into_iter().map(|x| x / total).collect()))
}

/// Jensen lower bound on the soft best-of-n law, per symbol:
/// P(x)e^{r(x)/λ} / ((1/n)e^{r(x)/λ} + ((n−1)/n)·E_P[e^{r(X)/λ}]).
/// Returns a sub-probability vector, not a distribution.
pub fn soft_bon_jensen_lower_bound(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
) -> Result<Vec<f64>> {
    check_pair(p, r)?;
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if n == 1 {
        return Ok(p.probs().to_vec());
    }
    let lamv = lam.lambda();
    // shift-invariant bound; anchoring the top scaled reward at 0 keeps
    // precision at extreme temperatures
    let shift = p
        .probs()
        .iter()
        .zip(r.values())
        .filter(|&(&pi, _)| pi > 0.0)
        .map(|(_, &ri)| ri / lamv)
        .fold(f64::NEG_INFINITY, f64::max);
    let log_partition = {
        let terms: Vec<f64> = p
            .probs()
            .iter()
            .zip(r.values())
            .map(|(&pi, &ri)| pi.ln() + ri / lamv - shift)
            .collect();
        logsumexp(&terms)
    };
    let nf = n as f64;
    let rest = ((nf - 1.0) / nf).ln() + log_partition;
    let out = p
        .probs()
        .iter()
        .zip(r.values())
        .map(|(&pi, &ri)| {
            if pi == 0.0 {
                return 0.0;
            }
            let rl = ri / lamv - shift;
            (pi.ln() + rl - logaddexp(rl - nf.ln(), rest)).exp()
        })
        .collect();
    Ok(out)
}

/// Closed-form coefficient for the binary instance P = (1−p, p), r = (0, 1):
/// exact_coefficient = p(1−p)(e^{1/λ}−1)² / (p·e^{1/λ} + (1−p))², and
/// leading_term = exact_coefficient / n. The coefficient equals
/// `cv_squared_exp_reward` of the same instance; the ln1p form below keeps
/// it stable for λ ≪ 1 where e^{1/λ} overflows.
pub fn binary_kl_closed_form(p_success: f64, lam: Temperature, n: u32) -> Result<(f64, f64)> {
    if !p_success.is_finite() || p_success <= 0.0 || p_success >= 1.0 {
        return Err(Error::OutOfDomain {
            param: "p_success",
            constraint: "strictly inside (0, 1)",
            value: p_success,
        });
    }
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let a = 1.0 / lam.lambda();
    let q = 1.0 - p_success;
    // ln[(e^a−1)/(p·e^a+q)] = ln1p(−e^{−a}) − ln(p + q·e^{−a}); the a's cancel
    let ratio = (-(-a).exp()).ln_1p() - (p_success + q * (-a).exp()).ln();
    let exact_coefficient = ((p_success * q).ln() + 2.0 * ratio).exp();
    Ok((exact_coefficient / n as f64, exact_coefficient))
}
