//! Desk-scale executable checks of the impossibility argument and the
//! list/cover/entropy claims: a pigeonhole collision finder over k-subsets,
//! the uniform witness prior built from a colliding pair, the list-mass
//! product bound, approximate cover sizes, and an empirical Huffman tail
//! check.

use serde::Serialize;
use thiserror::Error;

use crate::hashing::SeedStream;
use crate::prior::{ItemSet, Prior, PriorError};

/// Enumeration ceiling for the collision finder.
pub const MAX_ENUMERATION: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("enumerating C({n}, {k}) = {count} subsets exceeds the {MAX_ENUMERATION} ceiling")]
    EnumerationInfeasible { n: u64, k: usize, count: u64 },
    #[error("sets must have equal cardinality, got {0} and {1}")]
    UnequalCardinality(usize, usize),
    #[error("cannot pad to 2k = {want} items: universe has only {n}")]
    PaddingImpossible { want: usize, n: u64 },
    #[error("outcome probabilities invalid: {0}")]
    InvalidDistribution(String),
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Prior(#[from] PriorError),
}

/// Exact binomial coefficient, saturating far above the enumeration ceiling.
fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Enumerates all k-subsets of [1, n] in colexicographic order and returns
/// the first pair with equal m-bit encodings under the black-box encoder,
/// as (earlier, later) in enumeration order. With 2^m < C(n, k) a pair is
/// guaranteed by pigeonhole; None means the encoder was injective on the
/// enumeration.
pub fn find_collision<F>(
    mut encoder: F,
    n: u64,
    k: usize,
    m: u32,
) -> Result<Option<(ItemSet, ItemSet)>, BoundsError>
where
    F: FnMut(&ItemSet) -> u64,
{
    let count = binomial(n, k as u64);
    if count > MAX_ENUMERATION {
        return Err(BoundsError::EnumerationInfeasible { n, k, count });
    }
    let mask = if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut seen: std::collections::HashMap<u64, ItemSet> =
        std::collections::HashMap::with_capacity(count as usize);
    let mut current: Vec<u64> = (1..=k as u64).collect();
    if k as u64 > n {
        return Ok(None);
    }
    loop {
        let set = ItemSet::new(current.clone()).expect("colex state is increasing");
        let word = encoder(&set) & mask;
        if let Some(first) = seen.get(&word) {
            // Verified: both sets share an encoding by construction.
            return Ok(Some((first.clone(), set)));
        }
        seen.insert(word, set);

        // Next combination in colex order.
        let mut idx = 0;
        loop {
            if idx == k {
                return Ok(None);
            }
            let ceiling = if idx + 1 < k { current[idx + 1] } else { n + 1 };
            if current[idx] + 1 < ceiling {
                current[idx] += 1;
                for (j, slot) in current.iter_mut().enumerate().take(idx) {
                    *slot = j as u64 + 1;
                }
                break;
            }
            idx += 1;
        }
    }
}

/// The witness distribution of the impossibility argument: uniform over
/// S1 ∪ S2, padded with the lowest-index unused items to exactly 2k support
/// points, zero elsewhere.
pub fn uniform_union_prior(s1: &ItemSet, s2: &ItemSet, n: u64) -> Result<Prior, BoundsError> {
    if s1.len() != s2.len() {
        return Err(BoundsError::UnequalCardinality(s1.len(), s2.len()));
    }
    let k = s1.len();
    let want = 2 * k;
    if want as u64 > n {
        return Err(BoundsError::PaddingImpossible { want, n });
    }
    let mut support: std::collections::BTreeSet<u64> = s1.iter().chain(s2.iter()).collect();
    let mut candidate = 1u64;
    while support.len() < want {
        if !support.contains(&candidate) {
            support.insert(candidate);
        }
        candidate += 1;
    }
    let mut probs = vec![0.0; n as usize];
    for &item in &support {
        probs[(item - 1) as usize] = 1.0 / want as f64;
    }
    Ok(Prior::new(probs)?)
}

/// The product (1 + mu(1)) (1 + mu(2)) ... (1 + mu(N)); upper-bounds the
/// total list mass of Huffman-qualifying sets and is itself at most e.
pub fn list_mass(mu: &Prior) -> f64 {
    mu.probs().iter().map(|&p| 1.0 + p).product()
}

/// A distribution over an arbitrary finite outcome space, keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericPrior {
    outcomes: Vec<(u64, f64)>,
}

impl GenericPrior {
    /// Positive probabilities, unique ids, sum 1 within 1e-9.
    pub fn new(outcomes: Vec<(u64, f64)>) -> Result<Self, BoundsError> {
        if outcomes.is_empty() {
            return Err(BoundsError::InvalidDistribution("no outcomes".into()));
        }
        let mut ids = std::collections::HashSet::new();
        let mut sum = 0.0;
        for &(id, p) in &outcomes {
            if !ids.insert(id) {
                return Err(BoundsError::InvalidDistribution(format!(
                    "duplicate id {id}"
                )));
            }
            if !p.is_finite() || p <= 0.0 {
                return Err(BoundsError::InvalidDistribution(format!(
                    "outcome {id} has probability {p}"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(BoundsError::InvalidDistribution(format!("sum {sum} != 1")));
        }
        Ok(GenericPrior { outcomes })
    }

    pub fn outcomes(&self) -> &[(u64, f64)] {
        &self.outcomes
    }

    pub fn entropy(&self) -> f64 {
        -self
            .outcomes
            .iter()
            .map(|&(_, p)| p * p.log2())
            .sum::<f64>()
    }
}

/// The delta-approximate cover size: the minimal m such that the 2^m
/// highest-mass outcomes (greedy, ties broken by id order) capture mass at
/// least 1 - delta. Greedy-by-mass is optimal for this objective.
pub fn cover_size(sigma: &GenericPrior, delta: f64) -> Result<u32, BoundsError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundsError::InvalidDelta(delta));
    }
    let mut ranked = sigma.outcomes.to_vec();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let target = 1.0 - delta;
    let mut mass = 0.0;
    let mut needed = 0usize;
    for &(_, p) in &ranked {
        if mass + 1e-12 >= target {
            break;
        }
        mass += p;
        needed += 1;
    }
    // Minimal m with 2^m >= needed.
    Ok((needed.max(1) as u64).next_power_of_two().ilog2())
}

/// Report of the cover-size vs entropy comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    pub cover_bits: u32,
    pub entropy_bits: f64,
    pub delta: f64,
    /// H(sigma)/delta, the claimed upper bound.
    pub bound: f64,
    pub pass: bool,
}

/// Computes both sides of the cover-size bound and whether it holds.
pub fn check_cover_entropy(sigma: &GenericPrior, delta: f64) -> Result<CoverReport, BoundsError> {
    let cover_bits = cover_size(sigma, delta)?;
    let entropy_bits = sigma.entropy();
    let bound = entropy_bits / delta;
    Ok(CoverReport {
        cover_bits,
        entropy_bits,
        delta,
        bound,
        pass: (cover_bits as f64) <= bound + 1e-9,
    })
}

/// Report of the empirical Huffman tail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    /// The entropy budget served, k * H(mu).
    pub entropy_budget: f64,
    /// The Huffman budget derived from the claim's displayed formula.
    pub huffman_budget: f64,
    /// Additive slack term of the formula.
    pub slack_term: f64,
    pub trials: u64,
    pub fraction_within: f64,
    /// 1 - delta_h minus three binomial sigmas.
    pub threshold: f64,
    pub pass: bool,
    /// Set when the implied entropy budget is non-positive, making the claim
    /// vacuous at this scale; reported rather than asserted.
    pub vacuous: bool,
}

/// Samples S ~ mu^k and measures how often the Huffman weight stays within
/// the budget the entropy-to-Huffman claim prescribes for epsilon and
/// delta_h. The claim guarantees a fraction of at least 1 - delta_h.
pub fn huffman_tail_check(
    mu: &Prior,
    k: usize,
    delta_h: f64,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<TailReport, BoundsError> {
    if trials == 0 {
        return Err(BoundsError::NoTrials);
    }
    if !(delta_h > 0.0 && delta_h < 1.0) {
        return Err(BoundsError::InvalidDelta(delta_h));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(BoundsError::InvalidDistribution(format!(
            "epsilon {epsilon} <= 0"
        )));
    }
    let n = mu.n() as f64;
    let entropy_budget = k as f64 * mu.entropy();
    let slack_term =
        (1.0 / (2.0 * epsilon) + 1.0 / 3.0) * (2.0 * n * n / delta_h).log2() * (2.0 / delta_h).ln();
    let scale = (1.0 + epsilon) / (1.0 - delta_h / (2.0 * n));
    let huffman_budget = scale * entropy_budget + slack_term;
    // The inverse map: the entropy budget this Huffman budget serves.
    let implied_entropy = ((huffman_budget - slack_term) / scale).floor();

    let mut stream = SeedStream::new(seed);
    let mut within = 0u64;
    for _ in 0..trials {
        let set = mu.sample_set(k, stream.next_u64());
        if mu.huffman_weight(&set)? <= huffman_budget + 1e-9 {
            within += 1;
        }
    }
    let fraction_within = within as f64 / trials as f64;
    let sigma = (delta_h * (1.0 - delta_h) / trials as f64).sqrt();
    let threshold = 1.0 - delta_h - 3.0 * sigma;
    Ok(TailReport {
        entropy_budget,
        huffman_budget,
        slack_term,
        trials,
        fraction_within,
        threshold,
        pass: fraction_within >= threshold,
        vacuous: implied_entropy <= 0.0,
    })
}
