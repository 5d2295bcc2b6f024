//! Machine-checkable bound audits.
//!
//! Every closed-form guarantee is evaluated as an inequality on a concrete
//! instance and returned as a [`BoundReport`] with a stable input digest, so
//! regressions show up as flipped `holds` flags rather than silent drift.
//! Exact quantities come from the enumeration engine; Monte Carlo audits add
//! three binomial standard errors of slack to their right-hand side.
//!
//! Two right-hand sides below intentionally deviate from their advertised
//! closed forms, which are wrong as printed and fail against exact
//! enumeration:
//!
//! * The blockwise KL bound uses the product-moment identity. With
//!   cv² the per-symbol squared coefficient of variation of exp(r(X)/(mλ)),
//!   the flat sequence alphabet has squared CV exactly (1+cv²)^m − 1, so the
//!   audited bound is ln(1 + ((1+cv²)^m − 1)/n). The often-quoted
//!   (cv²)^m/n variant is neither an upper bound (it fails for small cv)
//!   nor consistent at m = 1 with anything.
//! * Its sinh companion substitutes cv² ≤ sinh²(1/(2mλ)) for unit-range
//!   rewards, giving (cosh^{2m}(1/(2mλ)) − 1)/n, which reduces exactly to
//!   the symbolwise sinh bound at m = 1. The flat form sinh^{2m}(1/(mλ))/n
//!   fails exact enumeration already at m = 2, λ = 5, n = 1.
//!
//! The symbolwise tail audit uses the Chernoff–Hoeffding lower tail for a
//! sum of m independent [0,1] rewards with mean m·p_n, whose exponent is
//! δ²/(2·m·p_n). The inverted exponent (δ²/2)·m·p_n would claim tails like
//! 1e-38 where the true tail is 0.17.

use crate::blockwise::{blockwise_tilt, exact_blockwise_soft_bon, BlockModel};
use crate::dist::{
    cv_squared_exp_reward, expected_reward, kl_divergence, log_partition, tilt,
    FiniteDistribution, RewardFunction, Temperature,
};
use crate::exact::{exact_soft_bon, EnumerationBudget};
use crate::sampler::{Categorical, RngSeed};
use crate::{Error, Result};

/// Slack for declaring an audited inequality satisfied.
pub const HOLDS_TOL: f64 = 1e-12;

/// One audited inequality: `holds` ⇔ lhs ≤ rhs + 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub instance_digest: u64,
}

impl BoundReport {
    fn new(bound_name: &str, lhs: f64, rhs: f64, instance_digest: u64) -> Self {
        BoundReport {
            bound_name: bound_name.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            holds: lhs <= rhs + HOLDS_TOL,
            instance_digest,
        }
    }
}

/// FNV-1a over a canonical encoding of audit inputs. Stable across runs and
/// platforms; float bits are hashed, not printed decimals.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Digest(u64);

impl Digest {
    pub(crate) fn new(name: &str) -> Self {
        let mut d = Digest(0xcbf29ce484222325);
        d.str(name);
        d
    }

    fn bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100000001b3);
        }
    }

    pub(crate) fn str(&mut self, s: &str) -> &mut Self {
        self.bytes(s.as_bytes());
        self.bytes(&[0xff]);
        self
    }

    pub(crate) fn f64(&mut self, x: f64) -> &mut Self {
        self.bytes(&x.to_bits().to_le_bytes());
        self
    }

    pub(crate) fn u64(&mut self, x: u64) -> &mut Self {
        self.bytes(&x.to_le_bytes());
        self
    }

    pub(crate) fn instance(&mut self, p: &FiniteDistribution, r: &RewardFunction) -> &mut Self {
        for s in p.symbols() {
            self.str(s);
        }
        for &x in p.probs() {
            self.f64(x);
        }
        for &x in r.values() {
            self.f64(x);
        }
        self
    }

    pub(crate) fn block(&mut self, block: &BlockModel) -> &mut Self {
        self.instance(block.base(), block.reward());
        self.u64(block.m() as u64);
        self
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

/// Least-squares power-law fit on a (n, value) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub grid: Vec<(u32, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits ln value = slope·ln n + intercept. Needs ≥ 4 points with strictly
/// increasing n and strictly positive values; callers filter exact zeros.
pub fn fit_rate(grid: &[(u32, f64)]) -> Result<RateFit> {
    if grid.len() < 4 {
        return Err(Error::ShortGrid {
            needed: 4,
            got: grid.len(),
        });
    }
    for w in grid.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::BadGrid);
        }
    }
    for &(n, v) in grid {
        if n == 0 {
            return Err(Error::BadGrid);
        }
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::OutOfDomain {
                param: "value",
                constraint: "strictly positive and finite",
                value: v,
            });
        }
    }
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .map(|&(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    let count = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        if ss_res.abs() < 1e-18 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        grid: grid.to_vec(),
        slope,
        intercept,
        r_squared,
    })
}

fn default_budget() -> EnumerationBudget {
    EnumerationBudget::default()
}

/// rhs of the KL upper bound: ln(1 + CV²/n).
pub fn kl_upper_rhs(p: &FiniteDistribution, r: &RewardFunction, lam: Temperature, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    Ok((cv_squared_exp_reward(p, r, lam)? / n as f64).ln_1p())
}

/// rhs of the sinh-form KL upper bound for unit-range rewards: sinh²(1/(2λ))/n.
pub fn sinh_upper_rhs(lam: Temperature, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let s = (1.0 / (2.0 * lam.lambda())).sinh();
    Ok(s * s / n as f64)
}

pub(crate) fn kl_upper_report_given(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
    star: &FiniteDistribution,
    law: &FiniteDistribution,
) -> Result<BoundReport> {
    let lhs = kl_divergence(star, law)?;
    let rhs = kl_upper_rhs(p, r, lam, n)?;
    let digest = Digest::new("kl_upper")
        .instance(p, r)
        .f64(lam.lambda())
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new("kl_upper", lhs, rhs, digest))
}

/// KL(P*_λ ‖ P_{n,λ}) against ln(1 + CV²/n), both exact.
pub fn audit_kl_upper(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
) -> Result<BoundReport> {
    let star = tilt(p, r, lam)?;
    let law = exact_soft_bon(p, r, lam, n, &default_budget())?;
    kl_upper_report_given(p, r, lam, n, &star, &law)
}

pub(crate) fn sinh_upper_report_given(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
    star: &FiniteDistribution,
    law: &FiniteDistribution,
) -> Result<BoundReport> {
    r.check_unit_range(p.symbols())?;
    let lhs = kl_divergence(star, law)?;
    let rhs = sinh_upper_rhs(lam, n)?;
    // for unit-range rewards the sinh form can never undercut the CV form
    if rhs < kl_upper_rhs(p, r, lam, n)? - 1e-12 {
        return Err(Error::Internal("sinh bound fell below the CV bound"));
    }
    let digest = Digest::new("kl_upper_sinh")
        .instance(p, r)
        .f64(lam.lambda())
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new("kl_upper_sinh", lhs, rhs, digest))
}

/// Same lhs as [`audit_kl_upper`], looser reward-free rhs sinh²(1/(2λ))/n.
/// Requires rewards in [0,1].
pub fn audit_sinh_upper(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
) -> Result<BoundReport> {
    r.check_unit_range(p.symbols())?;
    let star = tilt(p, r, lam)?;
    let law = exact_soft_bon(p, r, lam, n, &default_budget())?;
    sinh_upper_report_given(p, r, lam, n, &star, &law)
}

/// Smallest temperature at which n candidates are guaranteed within KL ε of
/// the tilt, for unit-range rewards: 1/ln(1 + 4nε).
pub fn lambda_threshold(n: u32, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfDomain {
            param: "eps",
            constraint: "positive and finite",
            value: eps,
        });
    }
    Ok(1.0 / (4.0 * n as f64 * eps).ln_1p())
}

/// Soundness check of [`lambda_threshold`]: the exact KL at λ = threshold
/// must land at or below ε.
pub fn audit_lambda_threshold(
    p: &FiniteDistribution,
    r: &RewardFunction,
    n: u32,
    eps: f64,
) -> Result<BoundReport> {
    r.check_unit_range(p.symbols())?;
    let lam = Temperature::new(lambda_threshold(n, eps)?)?;
    let star = tilt(p, r, lam)?;
    let law = exact_soft_bon(p, r, lam, n, &default_budget())?;
    let lhs = kl_divergence(&star, &law)?;
    let digest = Digest::new("kl_at_lambda_threshold")
        .instance(p, r)
        .f64(eps)
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new("kl_at_lambda_threshold", lhs, eps, digest))
}

/// rhs of the relative-reward bound, M/(M+n) with
/// M = e^{1/λ}/E_P[e^{r/λ}] − 1, computed as 1/(1 + n/M) so M → ∞ degrades
/// gracefully to 1.
pub fn relative_reward_rhs(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let m = (1.0 / lam.lambda() - log_partition(p, r, lam)?).exp_m1();
    if m <= 0.0 {
        // constant reward 1 everywhere: zero relative gap, zero bound
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + n as f64 / m))
}

pub(crate) fn relative_reward_report_given(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
    star: &FiniteDistribution,
    law: &FiniteDistribution,
) -> Result<BoundReport> {
    r.check_unit_range(p.symbols())?;
    let er_star = expected_reward(star, r)?;
    if er_star <= 0.0 {
        return Err(Error::DegenerateInstance {
            reason: "expected tilted reward is zero",
        });
    }
    let er_law = expected_reward(law, r)?;
    // the ratio is scale-free: dividing rewards by λ changes nothing
    let lhs = (er_star - er_law) / er_star;
    let rhs = relative_reward_rhs(p, r, lam, n)?;
    let digest = Digest::new("relative_reward")
        .instance(p, r)
        .f64(lam.lambda())
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new("relative_reward", lhs, rhs, digest))
}

/// Relative expected-reward gap of the n-draw law against the tilt,
/// (E_{P*}[r] − E_{P_n}[r])/E_{P*}[r], audited against M/(M+n). Requires
/// unit-range rewards and a nonzero expected tilted reward.
pub fn audit_relative_reward(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
    n: u32,
) -> Result<BoundReport> {
    r.check_unit_range(p.symbols())?;
    let star = tilt(p, r, lam)?;
    let law = exact_soft_bon(p, r, lam, n, &default_budget())?;
    relative_reward_report_given(p, r, lam, n, &star, &law)
}

/// Per-symbol squared CV of exp(r(X)/(mλ)), the moment entering both
/// blockwise bounds.
fn block_symbol_cv(block: &BlockModel, lam: Temperature) -> Result<f64> {
    let per_symbol_lam = Temperature::new(lam.lambda() * block.m() as f64)?;
    cv_squared_exp_reward(block.base(), block.reward(), per_symbol_lam)
}

/// rhs of the blockwise KL bound: ln(1 + ((1+cv²)^m − 1)/n), where the flat
/// alphabet's squared CV is (1+cv²)^m − 1 by independence across positions.
pub fn blockwise_kl_rhs(block: &BlockModel, lam: Temperature, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let cv = block_symbol_cv(block, lam)?;
    let flat_cv = (block.m() as f64 * cv.ln_1p()).exp_m1();
    Ok((flat_cv / n as f64).ln_1p())
}

/// rhs of the blockwise sinh bound: (cosh^{2m}(1/(2mλ)) − 1)/n. Reduces to
/// sinh²(1/(2λ))/n at m = 1.
pub fn blockwise_sinh_rhs(block: &BlockModel, lam: Temperature, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    let m = block.m() as f64;
    let x = 1.0 / (2.0 * m * lam.lambda());
    let flat_cv = (2.0 * m * x.cosh().ln()).exp_m1();
    Ok(flat_cv / n as f64)
}

fn blockwise_lhs(block: &BlockModel, lam: Temperature, n: u32) -> Result<f64> {
    let star = blockwise_tilt(block, lam)?;
    let law = exact_blockwise_soft_bon(block, lam, n, &default_budget())?;
    kl_divergence(star.flat(), law.flat())
}

/// Blockwise KL bound audit over the full sequence alphabet. Requires
/// unit-range per-symbol rewards.
pub fn audit_blockwise_kl(block: &BlockModel, lam: Temperature, n: u32) -> Result<BoundReport> {
    block.reward().check_unit_range(block.base().symbols())?;
    let lhs = blockwise_lhs(block, lam, n)?;
    let rhs = blockwise_kl_rhs(block, lam, n)?;
    let digest = Digest::new("blockwise_kl_upper")
        .block(block)
        .f64(lam.lambda())
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new("blockwise_kl_upper", lhs, rhs, digest))
}

/// Sinh companion of [`audit_blockwise_kl`].
pub fn audit_blockwise_sinh(block: &BlockModel, lam: Temperature, n: u32) -> Result<BoundReport> {
    block.reward().check_unit_range(block.base().symbols())?;
    let lhs = blockwise_lhs(block, lam, n)?;
    let rhs = blockwise_sinh_rhs(block, lam, n)?;
    if rhs < blockwise_kl_rhs(block, lam, n)? - 1e-12 {
        return Err(Error::Internal("blockwise sinh bound fell below the CV bound"));
    }
    let digest = Digest::new("blockwise_kl_upper_sinh")
        .block(block)
        .f64(lam.lambda())
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new("blockwise_kl_upper_sinh", lhs, rhs, digest))
}

/// Blockwise analog of [`lambda_threshold`]: 2/ln(1 + 4(nε)^{1/m}).
pub fn blockwise_lambda_threshold(n: u32, eps: f64, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfDomain {
            param: "eps",
            constraint: "positive and finite",
            value: eps,
        });
    }
    if m == 0 {
        return Err(Error::OutOfDomain {
            param: "m",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    let root = ((n as f64 * eps).ln() / m as f64).exp();
    Ok(2.0 / (4.0 * root).ln_1p())
}

/// Soundness check: blockwise KL at λ = blockwise threshold lands ≤ ε.
pub fn audit_blockwise_lambda_threshold(
    block: &BlockModel,
    n: u32,
    eps: f64,
) -> Result<BoundReport> {
    block.reward().check_unit_range(block.base().symbols())?;
    let lam = Temperature::new(blockwise_lambda_threshold(n, eps, block.m())?)?;
    let lhs = blockwise_lhs(block, lam, n)?;
    let digest = Digest::new("blockwise_kl_at_lambda_threshold")
        .block(block)
        .f64(eps)
        .u64(n as u64)
        .finish();
    Ok(BoundReport::new(
        "blockwise_kl_at_lambda_threshold",
        lhs,
        eps,
        digest,
    ))
}

/// Candidate count for blockwise selection to match a symbolwise operating
/// point at per-symbol temperature λ′ and tolerance ε:
/// (1/ε)·((e^{2/λ′} − 1)/4)^m.
pub fn sample_complexity_match(lambda_prime: Temperature, eps: f64, m: usize) -> Result<f64> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfDomain {
            param: "eps",
            constraint: "positive and finite",
            value: eps,
        });
    }
    if m == 0 {
        return Err(Error::OutOfDomain {
            param: "m",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    let base = (2.0 / lambda_prime.lambda()).exp_m1() / 4.0;
    Ok(base.powi(m as i32) / eps)
}

/// 1 − (1 − n^{−α})ⁿ, the tail ceiling for best-of-n over sequences before
/// statistical slack.
pub fn bon_ceiling_rhs_core(n: u32, alpha: f64) -> f64 {
    1.0 - (1.0 - (n as f64).powf(-alpha)).powi(n as i32)
}

/// Monte Carlo audit of the sequence-level best-of-n reward ceiling:
/// Pr(r(Yᵐ) ≥ μ + sqrt(α·ln n/(2m))) under blockwise BoN stays below
/// 1 − (1 − n^{−α})ⁿ plus three binomial standard errors.
pub fn audit_blockwise_bon_ceiling(
    block: &BlockModel,
    n: u32,
    alpha: f64,
    draws: u64,
    seed: RngSeed,
) -> Result<BoundReport> {
    block.reward().check_unit_range(block.base().symbols())?;
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::OutOfDomain {
            param: "alpha",
            constraint: "positive and finite",
            value: alpha,
        });
    }
    if draws == 0 {
        return Err(Error::OutOfDomain {
            param: "draws",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    let m = block.m();
    let mu = expected_reward(block.base(), block.reward())?;
    let threshold = mu + (alpha * (n as f64).ln() / (2.0 * m as f64)).sqrt();
    let cat = Categorical::new(block.base());
    let mut counts = vec![0u32; block.k()];
    let mut hits = 0u64;
    for i in 0..draws {
        let mut rng = seed.substream(i).rng();
        let mut best = f64::NEG_INFINITY;
        for _ in 0..n {
            counts.iter_mut().for_each(|c| *c = 0);
            for _ in 0..m {
                counts[cat.sample(&mut rng)] += 1;
            }
            let reward = crate::blockwise::mean_reward_of_counts(&counts, block.reward(), m);
            if reward > best {
                best = reward;
            }
        }
        if best >= threshold {
            hits += 1;
        }
    }
    let lhs = hits as f64 / draws as f64;
    let se = (lhs * (1.0 - lhs) / draws as f64).sqrt();
    let rhs = bon_ceiling_rhs_core(n, alpha) + 3.0 * se;
    let digest = Digest::new("bon_reward_ceiling")
        .block(block)
        .f64(alpha)
        .u64(n as u64)
        .u64(draws)
        .u64(seed.seed)
        .u64(seed.stream)
        .finish();
    Ok(BoundReport::new("bon_reward_ceiling", lhs, rhs, digest))
}

/// Closed forms for position-wise best-of-n on a binary-reward source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolwiseAnalysis {
    /// per-position success probability 1 − (1−μ)ⁿ
    pub p_n: f64,
    /// Chernoff–Hoeffding lower-tail bound exp(−δ²/(2·m·p_n)) for
    /// Pr((1/m)·Σ r(Y_i) ≤ p_n − δ/m)
    pub chernoff_tail: f64,
}

pub fn symbolwise_reward_analysis(
    mu: f64,
    n: u32,
    m: usize,
    delta: f64,
) -> Result<SymbolwiseAnalysis> {
    if !mu.is_finite() || mu <= 0.0 || mu >= 1.0 {
        return Err(Error::OutOfDomain {
            param: "mu",
            constraint: "strictly inside (0, 1)",
            value: mu,
        });
    }
    if n == 0 {
        return Err(Error::ZeroDraws);
    }
    if m == 0 {
        return Err(Error::OutOfDomain {
            param: "m",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::OutOfDomain {
            param: "delta",
            constraint: "positive and finite",
            value: delta,
        });
    }
    let p_n = 1.0 - (1.0 - mu).powi(n as i32);
    let chernoff_tail = (-delta * delta / (2.0 * m as f64 * p_n)).exp();
    Ok(SymbolwiseAnalysis { p_n, chernoff_tail })
}

/// Monte Carlo audit of [`SymbolwiseAnalysis::chernoff_tail`] through the
/// real symbolwise sampler on the binary instance P = (1−μ, μ), r = (0, 1).
pub fn audit_symbolwise_chernoff(
    mu: f64,
    n: u32,
    m: usize,
    delta: f64,
    draws: u64,
    seed: RngSeed,
) -> Result<BoundReport> {
    if draws == 0 {
        return Err(Error::OutOfDomain {
            param: "draws",
            constraint: "at least 1",
            value: 0.0,
        });
    }
    let analysis = symbolwise_reward_analysis(mu, n, m, delta)?;
    let block = BlockModel::new(
        FiniteDistribution::from_probs(vec![1.0 - mu, mu])?,
        RewardFunction::new(vec![0.0, 1.0])?,
        m,
    )?;
    // tail event in integer counts: Σ r(Y_i) ≤ m·p_n − δ
    let cutoff = m as f64 * analysis.p_n - delta;
    let mut tail_hits = 0u64;
    for i in 0..draws {
        let seq = crate::sampler::sample_symbolwise_bon(&block, n, seed.substream(i))?;
        let successes = seq.iter().filter(|&&x| x == 1).count();
        if successes as f64 <= cutoff {
            tail_hits += 1;
        }
    }
    let lhs = tail_hits as f64 / draws as f64;
    let se = (lhs * (1.0 - lhs) / draws as f64).sqrt();
    let rhs = analysis.chernoff_tail + 3.0 * se;
    let digest = Digest::new("symbolwise_chernoff_tail")
        .f64(mu)
        .f64(delta)
        .u64(n as u64)
        .u64(m as u64)
        .u64(draws)
        .u64(seed.seed)
        .u64(seed.stream)
        .finish();
    Ok(BoundReport::new("symbolwise_chernoff_tail", lhs, rhs, digest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(probs: &[f64]) -> FiniteDistribution {
        FiniteDistribution::from_probs(probs.to_vec()).unwrap()
    }

    fn rew(values: &[f64]) -> RewardFunction {
        RewardFunction::new(values.to_vec()).unwrap()
    }

    fn lam(x: f64) -> Temperature {
        Temperature::new(x).unwrap()
    }

    fn binary() -> (FiniteDistribution, RewardFunction) {
        (dist(&[0.5, 0.5]), rew(&[0.0, 1.0]))
    }

    #[test]
    fn kl_upper_binary_frozen_values() {
        let (p, r) = binary();
        let report = audit_kl_upper(&p, &r, lam(1.0), 2).unwrap();
        // lhs cross-checked by 40-digit arithmetic, rhs = ln(1 + tanh²(1/2)/2)
        assert!((report.lhs - 0.029637484818345106).abs() < 1e-12);
        assert!((report.rhs - 0.10145140519708684).abs() < 1e-12);
        assert!(report.holds);
        assert!((report.margin - (report.rhs - report.lhs)).abs() < 1e-16);
    }

    #[test]
    fn kl_upper_constant_reward_is_tight_zero() {
        // selection is uniform over equal scores, so both sides collapse to
        // rounding noise
        let p = dist(&[0.3, 0.7]);
        let r = rew(&[0.4, 0.4]);
        let report = audit_kl_upper(&p, &r, lam(1.0), 8).unwrap();
        assert!(report.lhs.abs() < 1e-13);
        assert!(report.rhs.abs() < 1e-13);
        assert!(report.holds);
    }

    #[test]
    fn sinh_upper_binary_frozen_values() {
        let (p, r) = binary();
        let report = audit_sinh_upper(&p, &r, lam(1.0), 2).unwrap();
        // sinh(1/2)²/2
        assert!((report.rhs - 0.13577015870381096).abs() < 1e-12);
        assert!(report.holds);
        let bad = rew(&[0.0, 1.5]);
        match audit_sinh_upper(&p, &bad, lam(1.0), 2).unwrap_err() {
            Error::RewardOutOfRange { symbol, value } => {
                assert_eq!(symbol, "s1");
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sinh_never_undercuts_cv_bound() {
        let p = dist(&[0.6, 0.3, 0.1]);
        let r = rew(&[0.1, 0.6, 1.0]);
        for l in [0.25, 0.5, 1.0, 3.0] {
            for n in [1u32, 2, 8] {
                let cv = kl_upper_rhs(&p, &r, lam(l), n).unwrap();
                let sh = sinh_upper_rhs(lam(l), n).unwrap();
                assert!(cv <= sh + 1e-12, "λ={l} n={n}");
            }
        }
    }

    #[test]
    fn lambda_threshold_frozen_and_sound() {
        // 1/ln 5
        let t = lambda_threshold(10, 0.1).unwrap();
        assert!((t - 0.6213349345596119).abs() < 1e-15);
        assert!(lambda_threshold(1_000_000, 10.0).unwrap() < 0.06);
        let (p, r) = binary();
        let report = audit_lambda_threshold(&p, &r, 10, 0.1).unwrap();
        assert!(report.holds, "lhs={} above ε", report.lhs);
        assert!(matches!(lambda_threshold(0, 0.1), Err(Error::ZeroDraws)));
        assert!(matches!(
            lambda_threshold(10, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn relative_reward_binary_frozen_values() {
        let (p, r) = binary();
        let report = audit_relative_reward(&p, &r, lam(1.0), 2).unwrap();
        // M = e/((1+e)/2) − 1, rhs = M/(M+2)
        assert!((report.rhs - 0.1876909699026188).abs() < 1e-12);
        assert!((report.lhs - 0.1580301397071395).abs() < 1e-12);
        assert!(report.holds);
    }

    #[test]
    fn relative_reward_single_draw_boundary() {
        // n = 1: the bound is exactly tight on binary unit-reward instances
        let (p, r) = binary();
        let report = audit_relative_reward(&p, &r, lam(1.0), 1).unwrap();
        assert!(report.margin.abs() < 1e-15, "margin {}", report.margin);
        assert!(report.holds);
    }

    #[test]
    fn relative_reward_edge_instances() {
        let p = dist(&[0.4, 0.6]);
        let flat = rew(&[0.5, 0.5]);
        let report = audit_relative_reward(&p, &flat, lam(0.7), 3).unwrap();
        assert!(report.lhs.abs() < 1e-15);
        assert!(report.holds);
        let zero = rew(&[0.0, 0.0]);
        assert!(matches!(
            audit_relative_reward(&p, &zero, lam(0.7), 3),
            Err(Error::DegenerateInstance { .. })
        ));
    }

    #[test]
    fn fit_rate_synthetic_slopes() {
        let inverse: Vec<(u32, f64)> = [4u32, 8, 16, 32, 64]
            .iter()
            .map(|&n| (n, 3.7 / n as f64))
            .collect();
        let fit = fit_rate(&inverse).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3.7f64.ln()).abs() < 1e-12);
        let square: Vec<(u32, f64)> = [4u32, 8, 16, 32, 64]
            .iter()
            .map(|&n| (n, 0.2 / (n as f64 * n as f64)))
            .collect();
        assert!((fit_rate(&square).unwrap().slope + 2.0).abs() < 1e-12);
        assert!(matches!(
            fit_rate(&inverse[..3]),
            Err(Error::ShortGrid { needed: 4, got: 3 })
        ));
        assert!(matches!(
            fit_rate(&[(4, 1.0), (4, 0.5), (8, 0.2), (16, 0.1)]),
            Err(Error::BadGrid)
        ));
        assert!(matches!(
            fit_rate(&[(2, 1.0), (4, 0.5), (8, 0.0), (16, 0.1)]),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn blockwise_bounds_hold_on_hand_instance() {
        let block = BlockModel::new(dist(&[0.5, 0.5]), rew(&[0.0, 1.0]), 2).unwrap();
        let kl = audit_blockwise_kl(&block, lam(1.0), 2).unwrap();
        assert!(kl.holds, "lhs={} rhs={}", kl.lhs, kl.rhs);
        assert!(kl.lhs > 0.0);
        let sh = audit_blockwise_sinh(&block, lam(1.0), 2).unwrap();
        assert!(sh.holds);
        assert!(sh.rhs >= kl.rhs - 1e-12);
    }

    #[test]
    fn blockwise_reduces_to_symbolwise_at_m1() {
        let p = dist(&[0.6, 0.4]);
        let r = rew(&[0.2, 0.9]);
        let block = BlockModel::new(p.clone(), r.clone(), 1).unwrap();
        let whole = audit_blockwise_kl(&block, lam(0.8), 4).unwrap();
        let flat = audit_kl_upper(&p, &r, lam(0.8), 4).unwrap();
        assert!((whole.lhs - flat.lhs).abs() < 1e-12);
        assert!((whole.rhs - flat.rhs).abs() < 1e-12);
        let whole_sinh = audit_blockwise_sinh(&block, lam(0.8), 4).unwrap();
        let flat_sinh = audit_sinh_upper(&p, &r, lam(0.8), 4).unwrap();
        assert!((whole_sinh.rhs - flat_sinh.rhs).abs() < 1e-15);
    }

    #[test]
    fn blockwise_threshold_frozen_and_growing() {
        // m=1 collapses to 2·lambda_threshold: 2/ln 5
        let t1 = blockwise_lambda_threshold(10, 0.1, 1).unwrap();
        assert!((t1 - 1.2426698691192237).abs() < 1e-15);
        // nε > 1 makes the threshold climb with block length
        let mut last = 0.0;
        for m in 1..=6 {
            let t = blockwise_lambda_threshold(20, 0.1, m).unwrap();
            assert!(t > last, "m={m}: {t} vs {last}");
            last = t;
        }
        let block = BlockModel::new(dist(&[0.5, 0.5]), rew(&[0.0, 1.0]), 2).unwrap();
        let report = audit_blockwise_lambda_threshold(&block, 8, 0.1).unwrap();
        assert!(report.holds, "lhs={}", report.lhs);
    }

    #[test]
    fn sample_complexity_frozen_value() {
        // 10·((e²−1)/4)⁴
        let v = sample_complexity_match(lam(1.0), 0.1, 4).unwrap();
        assert!((v - 65.08888628413791).abs() < 1e-10);
        assert!(matches!(
            sample_complexity_match(lam(1.0), 0.1, 0),
            Err(Error::OutOfDomain { .. })
        ));
        // λ′ below 2/ln 5 means the per-block factor exceeds 1
        let mut last = 0.0;
        for m in 1..=5 {
            let v = sample_complexity_match(lam(1.0), 0.1, m).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn bon_ceiling_core_and_audit() {
        // 1 − 0.99¹⁰⁰
        assert!((bon_ceiling_rhs_core(100, 1.0) - 0.6339676587267709).abs() < 1e-15);
        assert!(bon_ceiling_rhs_core(100_000, 2.0) < 1e-4);
        let block = BlockModel::new(dist(&[0.5, 0.5]), rew(&[0.0, 1.0]), 20).unwrap();
        let report =
            audit_blockwise_bon_ceiling(&block, 100, 1.0, 20_000, RngSeed::new(11, 0)).unwrap();
        assert!(report.holds, "lhs={} rhs={}", report.lhs, report.rhs);
        // the hit rate is far below the ceiling on this instance
        assert!(report.lhs < 0.2);
        assert!(report.lhs > 0.05);
    }

    #[test]
    fn symbolwise_analysis_frozen_values() {
        let a = symbolwise_reward_analysis(0.3, 5, 4, 1.0).unwrap();
        // 1 − 0.7⁵
        assert!((a.p_n - 0.83193).abs() < 1e-12);
        let b = symbolwise_reward_analysis(0.5, 3, 50, 2.0).unwrap();
        assert_eq!(b.p_n, 0.875);
        // exp(−4/(2·50·0.875))
        assert!((b.chernoff_tail - 0.9553148703077865).abs() < 1e-12);
        assert!((symbolwise_reward_analysis(0.3, 1, 2, 1.0).unwrap().p_n - 0.3).abs() < 1e-15);
        assert!(matches!(
            symbolwise_reward_analysis(1.0, 3, 2, 1.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn chernoff_tail_audit_holds() {
        let report =
            audit_symbolwise_chernoff(0.5, 3, 50, 2.0, 20_000, RngSeed::new(13, 0)).unwrap();
        assert!(report.holds);
        // the true tail is ≈ 0.166, well under the 0.955 bound
        assert!(report.lhs > 0.1 && report.lhs < 0.25, "lhs={}", report.lhs);
    }

    #[test]
    fn digests_are_stable_and_input_sensitive() {
        let (p, r) = binary();
        let a = audit_kl_upper(&p, &r, lam(1.0), 2).unwrap();
        let b = audit_kl_upper(&p, &r, lam(1.0), 2).unwrap();
        assert_eq!(a.instance_digest, b.instance_digest);
        let c = audit_kl_upper(&p, &r, lam(1.0), 4).unwrap();
        assert_ne!(a.instance_digest, c.instance_digest);
        let shifted = dist(&[0.5000000001, 0.4999999999]);
        let d = audit_kl_upper(&shifted, &r, lam(1.0), 2).unwrap();
        assert_ne!(a.instance_digest, d.instance_digest);
        let e = audit_sinh_upper(&p, &r, lam(1.0), 2).unwrap();
        assert_ne!(a.instance_digest, e.instance_digest);
    }
}
