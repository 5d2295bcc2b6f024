//! Finite distributions, bounded rewards, and exponential tilting.
//!
//! Everything here is log-domain with max-shift, so temperatures down to
//! 1e-9 with rewards of magnitude ≤ 1 stay finite. Divergences use natural
//! logarithms throughout.

use crate::{Error, Result};
use std::collections::HashSet;

/// Absolute tolerance for "sums to 1" checks on user-supplied probabilities.
pub(crate) const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability distribution over a finite, named alphabet.
///
/// Construction validates entries and normalization, then rescales by the
/// computed sum so internal kernels can rely on an exact unit total. The
/// rescale moves each entry by at most the validation tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    symbols: Vec<String>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(symbols: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if symbols.len() != probs.len() {
            return Err(Error::LengthMismatch {
                left: symbols.len(),
                right: probs.len(),
            });
        }
        let mut seen = HashSet::with_capacity(symbols.len());
        for s in &symbols {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateSymbol { symbol: s.clone() });
            }
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(FiniteDistribution { symbols, probs })
    }

    /// Convenience constructor naming symbols `s0, s1, ...`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let symbols = (0..probs.len()).map(|i| format!("s{i}")).collect();
        FiniteDistribution::new(symbols, probs)
    }

    /// Same alphabet, new masses. Callers must pass a normalized vector.
    pub(crate) fn with_probs(&self, probs: Vec<f64>) -> FiniteDistribution {
        debug_assert_eq!(probs.len(), self.probs.len());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        FiniteDistribution {
            symbols: self.symbols.clone(),
            probs,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    fn check_same_alphabet(&self, other: &FiniteDistribution) -> Result<()> {
        if self.symbols.len() != other.symbols.len() {
            return Err(Error::LengthMismatch {
                left: self.symbols.len(),
                right: other.symbols.len(),
            });
        }
        if self.symbols != other.symbols {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }
}

/// Real-valued rewards aligned with a distribution's alphabet by index.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardFunction {
    values: Vec<f64>,
}

impl RewardFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteReward { index, value });
            }
        }
        Ok(RewardFunction { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Errors unless every reward lies in [0, 1], naming the first offender.
    pub(crate) fn check_unit_range(&self, symbols: &[String]) -> Result<()> {
        for (i, &value) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::RewardOutOfRange {
                    symbol: symbols[i].clone(),
                    value,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_pair(p: &FiniteDistribution, r: &RewardFunction) -> Result<()> {
    if p.len() != r.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: r.len(),
        });
    }
    Ok(())
}

/// A strictly positive, finite tilting temperature λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperature {
    lambda: f64,
}

impl Temperature {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidTemperature { lambda });
        }
        Ok(Temperature { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }
}

/// log(Σ exp(x_i)) with max-shift; −∞ iff every entry is −∞.
pub(crate) fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + sum.ln()
}

/// log(exp(a) + exp(b)) without overflow.
pub(crate) fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Normalized exp of log-weights with max-shift. At least one entry must be
/// finite; the result sums to 1 within 1e-12 regardless of weight spread.
pub fn softmax_from_log_weights(log_weights: &[f64]) -> Vec<f64> {
    let lse = logsumexp(log_weights);
    debug_assert!(lse.is_finite(), "softmax needs one finite log-weight");
    let raw: Vec<f64> = log_weights.iter().map(|&w| (w - lse).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// The log-partition value ln E_P[exp(r(X)/λ)].
pub fn log_partition(p: &FiniteDistribution, r: &RewardFunction, lam: Temperature) -> Result<f64> {
    check_pair(p, r)?;
    let terms: Vec<f64> = p
        .probs()
        .iter()
        .zip(r.values())
        .map(|(&pi, &ri)| pi.ln() + ri / lam.lambda())
        .collect();
    Ok(logsumexp(&terms))
}

/// Exponential tilt P*_λ(x) = P(x)·exp(r(x)/λ) / E_P[exp(r(X)/λ)].
///
/// Zero-mass symbols stay at exactly zero; everything else is computed with
/// a max-shift so λ as small as 1e-9 with |r| ≤ 1 stays finite.
pub fn tilt(p: &FiniteDistribution, r: &RewardFunction, lam: Temperature) -> Result<FiniteDistribution> {
    check_pair(p, r)?;
    let logs: Vec<f64> = p
        .probs()
        .iter()
        .zip(r.values())
        .map(|(&pi, &ri)| pi.ln() + ri / lam.lambda())
        .collect();
    let lse = logsumexp(&logs);
    if !lse.is_finite() {
        return Err(Error::Internal("tilt normalizer is not finite"));
    }
    let raw: Vec<f64> = logs.iter().map(|&x| (x - lse).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(p.with_probs(raw.into_iter().map(|w| w / total).collect()))
}

/// KL divergence D(P‖Q) in nats. Conventions: terms with P(x)=0 contribute 0;
/// any x with P(x)>0 and Q(x)=0 yields +∞. Rounding can leave a tiny negative
/// total for near-identical inputs, which is clamped to 0.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    p.check_same_alphabet(q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += pi * (pi / qi).ln();
    }
    Ok(acc.max(0.0))
}

/// Total variation distance ½·Σ|P(x) − Q(x)|.
pub fn tv_distance(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    p.check_same_alphabet(q)?;
    let sum: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| (pi - qi).abs())
        .sum();
    Ok(0.5 * sum)
}

pub fn expected_reward(p: &FiniteDistribution, r: &RewardFunction) -> Result<f64> {
    check_pair(p, r)?;
    Ok(p.probs().iter().zip(r.values()).map(|(&pi, &ri)| pi * ri).sum())
}

/// Squared coefficient of variation of exp(r(X)/λ) under P,
/// Var/mean² = E[e^{2r/λ}]/E[e^{r/λ}]² − 1, clamped at 0.
pub fn cv_squared_exp_reward(
    p: &FiniteDistribution,
    r: &RewardFunction,
    lam: Temperature,
) -> Result<f64> {
    check_pair(p, r)?;
    let l1 = log_partition(p, r, lam)?;
    let terms: Vec<f64> = p
        .probs()
        .iter()
        .zip(r.values())
        .map(|(&pi, &ri)| pi.ln() + 2.0 * ri / lam.lambda())
        .collect();
    let l2 = logsumexp(&terms);
    Ok((l2 - 2.0 * l1).exp_m1().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(p1: f64) -> FiniteDistribution {
        FiniteDistribution::from_probs(vec![1.0 - p1, p1]).unwrap()
    }

    fn unit_reward() -> RewardFunction {
        RewardFunction::new(vec![0.0, 1.0]).unwrap()
    }

    fn lam(x: f64) -> Temperature {
        Temperature::new(x).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert!(matches!(
            FiniteDistribution::from_probs(vec![]),
            Err(Error::EmptyAlphabet)
        ));
        assert!(matches!(
            FiniteDistribution::from_probs(vec![0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            FiniteDistribution::from_probs(vec![-0.1, 1.1]),
            Err(Error::InvalidProbability { index: 0, .. })
        ));
        assert!(matches!(
            FiniteDistribution::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]),
            Err(Error::DuplicateSymbol { .. })
        ));
        assert!(matches!(
            FiniteDistribution::new(vec!["a".into()], vec![0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            RewardFunction::new(vec![0.0, f64::NAN]),
            Err(Error::NonFiniteReward { index: 1, .. })
        ));
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                Temperature::new(bad),
                Err(Error::InvalidTemperature { .. })
            ));
        }
        Temperature::new(1e-9).unwrap();
    }

    #[test]
    fn binary_tilt_matches_closed_form() {
        let t = tilt(&binary(0.5), &unit_reward(), lam(1.0)).unwrap();
        // 1/(1+e) and e/(1+e)
        assert!((t.prob(0) - 0.2689414213699951).abs() < 1e-15);
        assert!((t.prob(1) - 0.7310585786300049).abs() < 1e-15);
    }

    #[test]
    fn tilt_preserves_zero_mass_and_support() {
        let p = FiniteDistribution::from_probs(vec![0.5, 0.5, 0.0]).unwrap();
        let r = RewardFunction::new(vec![0.0, 0.2, 5.0]).unwrap();
        let t = tilt(&p, &r, lam(0.5)).unwrap();
        assert_eq!(t.prob(2), 0.0);
        assert!((t.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tilt_limits() {
        let p = binary(0.5);
        let r = unit_reward();
        let hot = tilt(&p, &r, lam(1e9)).unwrap();
        assert!((hot.prob(1) - 0.5).abs() < 1e-9);
        let cold = tilt(&p, &r, lam(1e-6)).unwrap();
        assert!(cold.prob(1) > 1.0 - 1e-12);
        assert!(cold.probs().iter().all(|x| x.is_finite()));
        // max-shift keeps λ = 1e-9 finite too
        let colder = tilt(&p, &r, lam(1e-9)).unwrap();
        assert!(colder.probs().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn kl_conventions() {
        let p = binary(0.5);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let q = FiniteDistribution::from_probs(vec![1.0, 0.0]).unwrap();
        assert_eq!(kl_divergence(&p, &q).unwrap(), f64::INFINITY);
        // zero-mass terms on the left contribute nothing
        assert_eq!(kl_divergence(&q, &p).unwrap(), std::f64::consts::LN_2);
        let other = FiniteDistribution::new(vec!["x".into(), "y".into()], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            kl_divergence(&p, &other),
            Err(Error::AlphabetMismatch)
        ));
    }

    #[test]
    fn fig_instance_expected_reward() {
        let p = FiniteDistribution::from_probs(vec![0.75, 0.2, 0.05]).unwrap();
        let r = RewardFunction::new(vec![0.016, 0.164, 0.820]).unwrap();
        // 0.75·0.016 + 0.2·0.164 + 0.05·0.820, hand-checked
        assert!((expected_reward(&p, &r).unwrap() - 0.0858).abs() < 1e-15);
    }

    #[test]
    fn cv_squared_binary_closed_form() {
        let got = cv_squared_exp_reward(&binary(0.5), &unit_reward(), lam(1.0)).unwrap();
        // ((e−1)/(e+1))² = tanh²(1/2)
        assert!((got - 0.21355226703407282).abs() < 1e-15);
        let flat = RewardFunction::new(vec![0.3, 0.3]).unwrap();
        assert_eq!(
            cv_squared_exp_reward(&binary(0.5), &flat, lam(1.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn softmax_handles_extreme_spread() {
        let probs = softmax_from_log_weights(&[1e6, 0.0, -1e6]);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((probs[0] - 1.0).abs() < 1e-12);
    }
}
