//! Syndrome coding of sparse binary vectors with the Reed-Solomon
//! parity-check map, and exact recovery via Berlekamp-Massey plus Chien
//! search.
//!
//! Position p in [0, D) is identified by the locator alpha^p, where alpha is
//! the canonical primitive element; D <= 2^w - 1 keeps the map injective. The
//! syndrome of a support is the field sum of the columns (X, X^2, ..., X^2k)
//! over its locators X. Because the encoded vector is binary, all error
//! magnitudes are 1, so no Forney step is needed; instead every decode is
//! verified by re-encoding before it is returned.

use thiserror::Error;

use crate::bits::{BitReader, BitWriter};
use crate::gf::{FieldElement, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsError {
    #[error("position domain {domain} not in [1, {max}] for GF(2^{degree})")]
    DomainOutOfRange { domain: u64, max: u64, degree: u8 },
    #[error("sparsity budget must satisfy 1 <= k and 2k <= D (k = {k}, D = {domain})")]
    InvalidSparsity { k: usize, domain: u64 },
    #[error("position {position} outside [0, {domain})")]
    PositionOutOfRange { position: u64, domain: u64 },
    #[error("syndrome lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("connection polynomial must satisfy lambda(0) = 1")]
    InvalidConnectionPolynomial,
    #[error("syndrome truncated")]
    Truncated,
}

/// Decode failures are expected outcomes, not bugs: the residual was denser
/// than the sparsity budget, or the syndrome was not a valid encoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeFailure {
    #[error("connection polynomial degree {degree} exceeds sparsity budget {budget}")]
    SparsityExceeded { degree: usize, budget: usize },
    #[error("found {roots} roots for a degree-{degree} connection polynomial")]
    RootDeficit { roots: usize, degree: usize },
    #[error("re-encoding the candidate support does not reproduce the syndrome")]
    VerificationFailed,
}

/// Per-level codec: field, position-domain size D, and sparsity budget k.
/// The syndrome map is the parity-check matrix of a [D, D-2k, 2k+1] RS code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsCodec {
    spec: FieldSpec,
    domain: u64,
    sparsity: usize,
}

impl RsCodec {
    pub fn new(spec: FieldSpec, domain: u64, sparsity: usize) -> Result<Self, RsError> {
        if domain == 0 || domain > spec.order() {
            return Err(RsError::DomainOutOfRange {
                domain,
                max: spec.order(),
                degree: spec.degree(),
            });
        }
        if sparsity == 0 || 2 * sparsity as u64 > domain {
            return Err(RsError::InvalidSparsity {
                k: sparsity,
                domain,
            });
        }
        Ok(RsCodec {
            spec,
            domain,
            sparsity,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    /// Number of field elements per syndrome, 2k.
    pub fn syndrome_len(&self) -> usize {
        2 * self.sparsity
    }

    fn check_position(&self, position: u64) -> Result<(), RsError> {
        if position >= self.domain {
            return Err(RsError::PositionOutOfRange {
                position,
                domain: self.domain,
            });
        }
        Ok(())
    }

    /// The locator alpha^p of position p; injective over [0, D).
    pub fn locator(&self, position: u64) -> Result<FieldElement, RsError> {
        self.check_position(position)?;
        Ok(self.spec.alpha().pow(position))
    }

    /// The p-th parity-check column (X, X^2, ..., X^2k) with X = locator(p).
    pub fn encode_position(&self, position: u64) -> Result<Syndrome, RsError> {
        let x = self.locator(position)?.value();
        let mut values = Vec::with_capacity(self.syndrome_len());
        let mut power = 1u64;
        for _ in 0..self.syndrome_len() {
            power = self.spec.mul_raw(power, x);
            values.push(power);
        }
        Ok(Syndrome {
            spec: self.spec,
            values,
        })
    }

    /// Field sum of the columns of all support positions; the empty support
    /// encodes to the all-zero syndrome.
    pub fn encode_support(&self, support: &SparseSupport) -> Result<Syndrome, RsError> {
        let mut acc = Syndrome::zero(self.spec, self.sparsity);
        for position in support.iter() {
            acc.xor_assign(&self.encode_position(position)?)?;
        }
        Ok(acc)
    }

    /// All positions p in [0, D) whose inverse locator is a root of lambda,
    /// sorted. Scans the full domain (cost O(D * deg lambda)); this is the
    /// complexity hotspot of the desk-scale pipeline.
    pub fn chien_search(&self, lambda: &Poly) -> Result<SparseSupport, RsError> {
        if lambda.spec != self.spec {
            return Err(RsError::SpecMismatch);
        }
        if lambda.coeff(0) != 1 {
            return Err(RsError::InvalidConnectionPolynomial);
        }
        // Evaluate lambda(alpha^-p) incrementally: coefficient j picks up a
        // factor alpha^-j per step.
        let inv_alpha = self
            .spec
            .inv_raw(self.spec.alpha().value())
            .expect("alpha is nonzero");
        let degree = lambda.degree();
        let mut steps = Vec::with_capacity(degree + 1);
        let mut factor = 1u64;
        for _ in 0..=degree {
            steps.push(factor);
            factor = self.spec.mul_raw(factor, inv_alpha);
        }
        let mut terms: Vec<u64> = (0..=degree).map(|j| lambda.coeff(j)).collect();
        let mut positions = Vec::new();
        for p in 0..self.domain {
            let value = terms.iter().fold(0u64, |acc, &t| acc ^ t);
            if value == 0 {
                positions.push(p);
            }
            for (term, &step) in terms.iter_mut().zip(&steps) {
                *term = self.spec.mul_raw(*term, step);
            }
        }
        Ok(SparseSupport { positions })
    }

    /// Whether position p's inverse locator is a root of lambda, via the
    /// reversed polynomial: lambda(alpha^-p) = 0 iff rev(lambda)(alpha^p) = 0.
    /// This is the O(deg lambda + w) point query the multi-level decoder uses
    /// where the domain is far too large to scan.
    pub fn has_root_at(&self, lambda: &Poly, position: u64) -> Result<bool, RsError> {
        if lambda.spec != self.spec {
            return Err(RsError::SpecMismatch);
        }
        self.check_position(position)?;
        let x = self.spec.pow_raw(2, position);
        let mut acc = 0u64;
        for j in 0..=lambda.degree() {
            acc = self.spec.mul_raw(acc, x) ^ lambda.coeff(j);
        }
        Ok(acc == 0)
    }

    /// Recovers the unique support of size <= k whose encoding is `syndrome`,
    /// or reports failure. Every candidate is verified by re-encoding; a
    /// support whose re-encoding differs from the input is never returned.
    pub fn decode(&self, syndrome: &Syndrome) -> Result<SparseSupport, DecodeFailure> {
        debug_assert_eq!(syndrome.len(), self.syndrome_len());
        debug_assert_eq!(syndrome.spec, self.spec);
        let lambda = berlekamp_massey(syndrome);
        if lambda.degree() > self.sparsity {
            return Err(DecodeFailure::SparsityExceeded {
                degree: lambda.degree(),
                budget: self.sparsity,
            });
        }
        let support = self
            .chien_search(&lambda)
            .expect("lambda from BM has lambda(0) = 1");
        if support.len() != lambda.degree() {
            return Err(DecodeFailure::RootDeficit {
                roots: support.len(),
                degree: lambda.degree(),
            });
        }
        let reencoded = self
            .encode_support(&support)
            .expect("chien positions are in-domain");
        if reencoded != *syndrome {
            return Err(DecodeFailure::VerificationFailed);
        }
        Ok(support)
    }
}

/// A strictly increasing list of positions in [0, D).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseSupport {
    positions: Vec<u64>,
}

impl SparseSupport {
    pub fn empty() -> Self {
        SparseSupport {
            positions: Vec::new(),
        }
    }

    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.positions.iter().copied()
    }
}

/// Builds from arbitrary positions, sorting and deduplicating.
impl FromIterator<u64> for SparseSupport {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut positions: Vec<u64> = iter.into_iter().collect();
        positions.sort_unstable();
        positions.dedup();
        SparseSupport { positions }
    }
}

/// A length-2k sequence of field elements: the linear measurement of one
/// level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndrome {
    spec: FieldSpec,
    values: Vec<u64>,
}

impl Syndrome {
    pub fn zero(spec: FieldSpec, sparsity: usize) -> Self {
        Syndrome {
            spec,
            values: vec![0; 2 * sparsity],
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        self.values
            .iter()
            .map(|&v| self.spec.element(v).expect("values fit the field"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Elementwise characteristic-2 addition in place.
    pub fn xor_assign(&mut self, rhs: &Syndrome) -> Result<(), RsError> {
        if self.spec != rhs.spec {
            return Err(RsError::SpecMismatch);
        }
        if self.values.len() != rhs.values.len() {
            return Err(RsError::LengthMismatch(self.values.len(), rhs.values.len()));
        }
        for (a, &b) in self.values.iter_mut().zip(&rhs.values) {
            *a ^= b;
        }
        Ok(())
    }

    /// Serializes as s_1 .. s_2k in order, each element exactly w bits
    /// MSB-first, no padding between elements.
    pub(crate) fn write_bits(&self, writer: &mut BitWriter) {
        let w = self.spec.degree();
        for &v in &self.values {
            writer.push_bits(v, w);
        }
    }

    pub(crate) fn read_bits(
        reader: &mut BitReader<'_>,
        spec: FieldSpec,
        sparsity: usize,
    ) -> Result<Self, RsError> {
        let w = spec.degree();
        let mut values = Vec::with_capacity(2 * sparsity);
        for _ in 0..2 * sparsity {
            values.push(reader.read_bits(w).ok_or(RsError::Truncated)?);
        }
        Ok(Syndrome { spec, values })
    }
}

/// Elementwise XOR of two syndromes. Satisfies
/// xor(encode(A), encode(B)) = encode(A symmetric-difference B).
pub fn xor_syndromes(a: &Syndrome, b: &Syndrome) -> Result<Syndrome, RsError> {
    let mut out = a.clone();
    out.xor_assign(b)?;
    Ok(out)
}

/// A polynomial over one field, coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    spec: FieldSpec,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(spec: FieldSpec, mut coeffs: Vec<u64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        Poly { spec, coeffs }
    }

    pub fn one(spec: FieldSpec) -> Self {
        Poly {
            spec,
            coeffs: vec![1],
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of x^j (zero beyond the degree).
    pub fn coeff(&self, j: usize) -> u64 {
        self.coeffs.get(j).copied().unwrap_or(0)
    }

    pub fn eval(&self, x: FieldElement) -> Result<FieldElement, RsError> {
        if x.spec() != self.spec {
            return Err(RsError::SpecMismatch);
        }
        let mut acc = 0u64;
        for j in (0..self.coeffs.len()).rev() {
            acc = self.spec.mul_raw(acc, x.value()) ^ self.coeffs[j];
        }
        Ok(self.spec.element(acc).expect("reduced value"))
    }
}

/// Massey's LFSR synthesis: the minimal-degree connection polynomial with
/// lambda(0) = 1 reproducing the syndrome sequence. For the syndrome of a
/// support s with |s| <= k this is exactly the locator polynomial
/// prod_{p in s} (1 - locator(p) x).
pub fn berlekamp_massey(syndrome: &Syndrome) -> Poly {
    let spec = syndrome.spec;
    let s = &syndrome.values;
    let mut lambda = vec![1u64];
    let mut prev = vec![1u64];
    let mut lfsr_len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = 1u64;
    for n in 0..s.len() {
        let mut disc = s[n];
        for j in 1..=lfsr_len {
            let lj = lambda.get(j).copied().unwrap_or(0);
            disc ^= spec.mul_raw(lj, s[n - j]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let scale = spec.mul_raw(disc, spec.inv_raw(prev_disc).expect("nonzero"));
        if 2 * lfsr_len <= n {
            let keep = lambda.clone();
            xor_scaled_shifted(spec, &mut lambda, &prev, scale, shift);
            lfsr_len = n + 1 - lfsr_len;
            prev = keep;
            prev_disc = disc;
            shift = 1;
        } else {
            xor_scaled_shifted(spec, &mut lambda, &prev, scale, shift);
            shift += 1;
        }
    }
    Poly::new(spec, lambda)
}

/// lambda(x) += scale * x^shift * other(x); subtraction is XOR in char 2.
fn xor_scaled_shifted(
    spec: FieldSpec,
    lambda: &mut Vec<u64>,
    other: &[u64],
    scale: u64,
    shift: usize,
) {
    if lambda.len() < other.len() + shift {
        lambda.resize(other.len() + shift, 0);
    }
    for (j, &c) in other.iter().enumerate() {
        lambda[j + shift] ^= spec.mul_raw(scale, c);
    }
}
