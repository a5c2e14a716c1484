//! Prior distributions over \[N\]: class-M normalization, the doubly-exponential
//! bucket partition, entropy, Huffman weight, and deterministic sampling.
//!
//! Items are 1-based throughout. A [`Prior`] is any probability vector; a
//! [`ClassMPrior`] additionally certifies 1/(4N) <= mu(i) < 1/2 for every
//! item, which is what the multi-level decoder requires.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::hashing::SeedStream;

/// Normalization tolerance: probabilities must sum to 1 within this bound.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriorError {
    #[error("prior must have at least {min} items, got {got}")]
    TooFewItems { min: usize, got: usize },
    #[error("probability at index {index} is invalid: {value}")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1 within tolerance")]
    NotNormalized { sum: f64 },
    #[error("item {item} outside universe [1, {n}]")]
    ItemOutOfRange { item: u64, n: u64 },
    #[error("item {item} has zero probability")]
    ZeroProbabilityMember { item: u64 },
    #[error("prior is not in class M: item {item} has probability {value}")]
    NotInClassM { item: u64, value: f64 },
    #[error("item list is not strictly increasing at position {0}")]
    NotStrictlyIncreasing(usize),
    #[error("cannot parse prior: {0}")]
    Parse(String),
}

/// A sorted, deduplicated set of items from [1, N].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ItemSet {
    items: Vec<u64>,
}

impl ItemSet {
    pub fn empty() -> Self {
        ItemSet { items: Vec::new() }
    }

    /// Requires a strictly increasing sequence.
    pub fn new(items: Vec<u64>) -> Result<Self, PriorError> {
        for i in 1..items.len() {
            if items[i] <= items[i - 1] {
                return Err(PriorError::NotStrictlyIncreasing(i));
            }
        }
        Ok(ItemSet { items })
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: u64) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.items.iter().copied()
    }

    /// Symmetric difference, the natural operation under XOR-linear encodings.
    pub fn symmetric_difference(&self, other: &ItemSet) -> ItemSet {
        let a: BTreeSet<u64> = self.items.iter().copied().collect();
        let b: BTreeSet<u64> = other.items.iter().copied().collect();
        ItemSet::from_iter(a.symmetric_difference(&b).copied())
    }
}

/// Builds from arbitrary items, sorting and deduplicating.
impl FromIterator<u64> for ItemSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let set: BTreeSet<u64> = iter.into_iter().collect();
        ItemSet {
            items: set.into_iter().collect(),
        }
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for item in &self.items {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{item}")?;
            first = false;
        }
        Ok(())
    }
}

/// A probability vector over [1, N].
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    probs: Vec<f64>,
}

impl Prior {
    /// Validates non-negativity and normalization within tolerance.
    pub fn new(probs: Vec<f64>) -> Result<Self, PriorError> {
        if probs.is_empty() {
            return Err(PriorError::TooFewItems { min: 1, got: 0 });
        }
        let mut sum = 0.0;
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(PriorError::InvalidProbability { index, value });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(PriorError::NotNormalized { sum });
        }
        Ok(Prior { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Prior {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Zipf with exponent s: probabilities proportional to 1/i^s.
    pub fn zipf(n: usize, s: f64) -> Self {
        let mut probs: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-s)).collect();
        let sum: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= sum;
        }
        Prior { probs }
    }

    /// Dyadic: 1/2, 1/4, ..., with the final probability doubled so the
    /// vector sums to exactly 1.
    pub fn dyadic(n: usize) -> Self {
        let mut probs: Vec<f64> = (0..n).map(|i| (2.0f64).powi(-(i as i32 + 1))).collect();
        if n >= 1 {
            probs[n - 1] = (2.0f64).powi(-(n as i32 - 1)).min(1.0);
        }
        Prior { probs }
    }

    /// Parses the text prior format: either a single generator line
    /// (`uniform:N`, `zipf:N:s`, `dyadic:N`) or one decimal probability per
    /// line. Renormalizes and returns the applied correction |sum - 1|.
    pub fn parse(text: &str) -> Result<(Self, f64), PriorError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.is_empty() {
            return Err(PriorError::Parse("empty prior source".into()));
        }
        if lines.len() == 1 && lines[0].contains(':') {
            return Ok((Self::parse_generator(lines[0])?, 0.0));
        }
        let mut probs = Vec::with_capacity(lines.len());
        for (idx, line) in lines.iter().enumerate() {
            let value: f64 = line.parse().map_err(|_| {
                PriorError::Parse(format!("line {}: not a number: {line:?}", idx + 1))
            })?;
            if !value.is_finite() || value < 0.0 {
                return Err(PriorError::InvalidProbability { index: idx, value });
            }
            probs.push(value);
        }
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 {
            return Err(PriorError::NotNormalized { sum });
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok((Prior { probs }, (sum - 1.0).abs()))
    }

    fn parse_generator(spec: &str) -> Result<Self, PriorError> {
        let parts: Vec<&str> = spec.split(':').collect();
        let parse_n = |s: &str| -> Result<usize, PriorError> {
            let n: usize = s
                .parse()
                .map_err(|_| PriorError::Parse(format!("bad universe size {s:?}")))?;
            if n == 0 {
                return Err(PriorError::TooFewItems { min: 1, got: 0 });
            }
            Ok(n)
        };
        match parts.as_slice() {
            ["uniform", n] => Ok(Self::uniform(parse_n(n)?)),
            ["dyadic", n] => Ok(Self::dyadic(parse_n(n)?)),
            ["zipf", n, s] => {
                let exponent: f64 = s
                    .parse()
                    .map_err(|_| PriorError::Parse(format!("bad zipf exponent {s:?}")))?;
                if !exponent.is_finite() {
                    return Err(PriorError::Parse(format!("bad zipf exponent {s:?}")));
                }
                Ok(Self::zipf(parse_n(n)?, exponent))
            }
            _ => Err(PriorError::Parse(format!("unknown generator {spec:?}"))),
        }
    }

    pub fn n(&self) -> u64 {
        self.probs.len() as u64
    }

    /// Probability of a 1-based item.
    pub fn prob(&self, item: u64) -> Result<f64, PriorError> {
        if item == 0 || item > self.n() {
            return Err(PriorError::ItemOutOfRange { item, n: self.n() });
        }
        Ok(self.probs[(item - 1) as usize])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Shannon entropy in bits, with 0 * lg 0 = 0.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }

    /// Huffman weight of a set: sum over members of lg(1/mu(i)).
    pub fn huffman_weight(&self, set: &ItemSet) -> Result<f64, PriorError> {
        let mut total = 0.0;
        for item in set.iter() {
            let p = self.prob(item)?;
            if p <= 0.0 {
                return Err(PriorError::ZeroProbabilityMember { item });
            }
            total += -p.log2();
        }
        Ok(total)
    }

    /// Draws `k` items i.i.d. by inverse CDF with a deterministic seeded
    /// stream, returning the set of distinct items (|result| <= k).
    pub fn sample_set(&self, k: usize, seed: u64) -> ItemSet {
        let mut cdf = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += p;
            cdf.push(acc);
        }
        let mut stream = SeedStream::new(seed);
        let mut items = BTreeSet::new();
        for _ in 0..k {
            let u = stream.next_f64();
            let idx = cdf.partition_point(|&c| c <= u).min(self.probs.len() - 1);
            items.insert(idx as u64 + 1);
        }
        ItemSet::from_iter(items)
    }

    /// Transforms any prior over N >= 4 items into class M: probabilities
    /// above 1/3 are clamped to 1/3, the rest are raised to at least 1/(2N),
    /// and the result is renormalized. For unclamped items the Huffman cost
    /// at most doubles: lg(1/mu''(i)) <= 2 lg(1/mu(i)).
    pub fn normalize_to_m(&self) -> Result<ClassMPrior, PriorError> {
        let n = self.probs.len();
        if n < 4 {
            return Err(PriorError::TooFewItems { min: 4, got: n });
        }
        let floor = 1.0 / (2.0 * n as f64);
        let intermediate: Vec<f64> = self
            .probs
            .iter()
            .map(|&p| {
                if p > 1.0 / 3.0 {
                    1.0 / 3.0
                } else {
                    p.max(floor)
                }
            })
            .collect();
        let zeta: f64 = intermediate.iter().sum();
        let probs: Vec<f64> = intermediate.iter().map(|&p| p / zeta).collect();
        ClassMPrior::certify(Prior { probs })
    }
}

/// A prior certified to lie in class M: 1/(4N) <= mu(i) < 1/2 for all items.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMPrior {
    inner: Prior,
}

impl ClassMPrior {
    /// Checks the class-M bounds with exact threshold semantics (>= lower,
    /// strictly < upper).
    pub fn certify(prior: Prior) -> Result<Self, PriorError> {
        let n = prior.n() as f64;
        let lower = 1.0 / (4.0 * n);
        for (idx, &p) in prior.probs.iter().enumerate() {
            if !(p >= lower && p < 0.5) {
                return Err(PriorError::NotInClassM {
                    item: idx as u64 + 1,
                    value: p,
                });
            }
        }
        Ok(ClassMPrior { inner: prior })
    }

    pub fn prior(&self) -> &Prior {
        &self.inner
    }

    /// Number of buckets T: the smallest t >= 1 with 2^(2^t) >= 4N.
    pub fn bucket_count(&self) -> u32 {
        level_count(self.inner.n())
    }

    /// The unique level t in [1, T] with 2^(-2^t) <= mu(i) < 2^(-2^(t-1)).
    pub fn bucket_of(&self, item: u64) -> Result<u32, PriorError> {
        let p = self.inner.prob(item)?;
        let t_max = self.bucket_count();
        for t in 1..=t_max {
            if p >= (2.0f64).powi(-(1i32 << t)) {
                return Ok(t);
            }
        }
        // Unreachable for certified priors: p >= 1/(4N) >= 2^(-2^T).
        Ok(t_max)
    }

    /// Items of each bucket, indexed by level - 1.
    pub fn buckets(&self) -> Vec<Vec<u64>> {
        let t_max = self.bucket_count() as usize;
        let mut buckets = vec![Vec::new(); t_max];
        for item in 1..=self.inner.n() {
            let t = self.bucket_of(item).expect("item in range");
            buckets[(t - 1) as usize].push(item);
        }
        buckets
    }
}

impl std::ops::Deref for ClassMPrior {
    type Target = Prior;

    fn deref(&self) -> &Prior {
        &self.inner
    }
}

/// T = ceil(lg lg 4N): the smallest t >= 1 with 2^(2^t) >= 4N.
pub(crate) fn level_count(n: u64) -> u32 {
    let target = 4u128 * n as u128;
    let mut t = 1u32;
    loop {
        let exp = 1u32 << t;
        if exp >= 128 || (1u128 << exp) >= target {
            return t;
        }
        t += 1;
    }
}
