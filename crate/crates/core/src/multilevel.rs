//! The multi-level scheme: per-level parameter derivation, the oblivious
//! linear encoder, and the peeling decoder that consumes the prior.
//!
//! The encoder hashes every item into each level's position domain and
//! accumulates the level's Reed-Solomon syndrome; the decoder works level by
//! level, recovering the connection polynomial of the residual syndrome,
//! testing the hash position of every bucket item against its roots, and
//! XOR-ing decoded items out of all later levels. Parameters are derived by
//! exact integer arithmetic from (N, m*, delta) so both endpoints agree
//! bit-for-bit.

use serde::Serialize;
use thiserror::Error;

use crate::bits::{BitReader, BitWriter};
use crate::gf::FieldSpec;
use crate::hashing::{hash, HashCtx};
use crate::prior::{level_count, ClassMPrior, ItemSet, PriorError};
use crate::rs::{berlekamp_massey, RsCodec, RsError, Syndrome};

/// Magic bytes of the message file format.
pub const MESSAGE_MAGIC: [u8; 4] = *b"ASC1";
/// Current message file version.
pub const MESSAGE_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 8 + 4 + 4 + 4 + 8 + 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultilevelError {
    #[error("universe size must be at least 4, got {0}")]
    UniverseTooSmall(u64),
    #[error("huffman budget must be at least 4, got {0}")]
    BudgetTooSmall(u32),
    #[error("error budget must be a rational in (0, 1), got {num}/{den}")]
    InvalidErrorBudget { num: u32, den: u32 },
    #[error("universe too large for 64-bit field cap (level {level} needs degree {degree})")]
    UniverseTooLarge { level: u32, degree: u32 },
    #[error("parameter derivation overflowed 128-bit arithmetic at level {0}")]
    ArithmeticOverflow(u32),
    #[error("level {level} infeasible: sparsity {sparsity} does not fit domain {domain}")]
    LevelInfeasible {
        level: u32,
        sparsity: u64,
        domain: u64,
    },
    #[error("item {item} outside universe [1, {n}]")]
    ItemOutOfRange { item: u64, n: u64 },
    #[error("message has {got} bits, scheme requires {want}")]
    MessageLengthMismatch { got: u64, want: u64 },
    #[error("prior covers {got} items, scheme requires {want}")]
    PriorMismatch { got: u64, want: u64 },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported message version {0}")]
    BadVersion(u8),
    #[error("file truncated: need {want} header bytes, got {got}")]
    Truncated { want: usize, got: usize },
    #[error("payload length mismatch: header declares {header} bits, scheme requires {derived}")]
    PayloadLengthMismatch { header: u64, derived: u64 },
    #[error("payload length mismatch: need {want} bytes after the header, got {got}")]
    PayloadTruncated { want: usize, got: usize },
    #[error("nonzero padding bits after payload")]
    NonZeroPadding,
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Prior(#[from] PriorError),
}

/// An exact rational error budget delta = num/den with 0 < num < den.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: u32,
    pub den: u32,
}

impl Rational {
    pub fn new(num: u32, den: u32) -> Result<Self, MultilevelError> {
        if num == 0 || den == 0 || num >= den {
            return Err(MultilevelError::InvalidErrorBudget { num, den });
        }
        Ok(Rational { num, den })
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Derived per-level parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelParams {
    /// Level index t, 1-based.
    pub level: u32,
    /// Hash domain size D_t.
    pub hash_domain: u64,
    /// Field degree w_t = ceil(lg(D_t + 1)).
    pub field_degree: u8,
    /// Sparsity budget k_t.
    pub sparsity: u32,
    /// Level message bits m_t = 2 * k_t * w_t.
    pub message_bits: u64,
}

impl LevelParams {
    pub(crate) fn spec(&self) -> FieldSpec {
        FieldSpec::canonical(self.field_degree).expect("derived degree is in range")
    }

    pub(crate) fn codec(&self) -> RsCodec {
        RsCodec::new(self.spec(), self.hash_domain, self.sparsity as usize)
            .expect("derived level parameters form a valid codec")
    }

    pub fn hash_ctx(&self, seed: u64) -> HashCtx {
        HashCtx::new(seed, self.level, self.hash_domain)
    }
}

/// Full scheme parameters, derived deterministically from (N, m*, delta).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeParams {
    universe_size: u64,
    huffman_budget: u32,
    error_budget: Rational,
    levels: Vec<LevelParams>,
    total_bits: u64,
}

impl SchemeParams {
    /// Derives T = ceil(lg lg 4N) levels. For each level t the hash domain is
    ///
    ///   D_t = ceil( T * den * (b_t^2 * 2^(2t-1) + m*^2) / (num * 2^(2t)) )
    ///
    /// with b_t = min(2^(2^t), N) the worst-case bucket cardinality, computed
    /// in exact 128-bit integer arithmetic. The sparsity budget is
    /// k_t = min(ceil(m*/2^(t-1)), ceil(4m*/floor(lg m*))) and the level
    /// message is m_t = 2 k_t w_t bits.
    pub fn derive(n: u64, m_star: u32, delta: Rational) -> Result<Self, MultilevelError> {
        if n < 4 {
            return Err(MultilevelError::UniverseTooSmall(n));
        }
        if m_star < 4 {
            return Err(MultilevelError::BudgetTooSmall(m_star));
        }
        let t_levels = level_count(n);
        let lg_m_star = m_star.ilog2() as u64; // >= 2 since m* >= 4
        let mut levels = Vec::with_capacity(t_levels as usize);
        let mut total_bits = 0u64;
        for t in 1..=t_levels {
            let overflow = MultilevelError::ArithmeticOverflow(t);
            // b_t = min(2^(2^t), N)
            let bucket_bound: u128 = if 1u32 << t >= 64 {
                n as u128
            } else {
                (1u128 << (1u32 << t)).min(n as u128)
            };
            let pair_term = bucket_bound
                .checked_mul(bucket_bound)
                .and_then(|b2| b2.checked_mul(1u128 << (2 * t - 1)))
                .ok_or(overflow.clone())?;
            let numerator = pair_term
                .checked_add((m_star as u128) * (m_star as u128))
                .and_then(|s| s.checked_mul(t_levels as u128))
                .and_then(|s| s.checked_mul(delta.den as u128))
                .ok_or(overflow)?;
            let denominator = (delta.num as u128) << (2 * t);
            let domain = numerator.div_ceil(denominator);

            // w_t = ceil(lg(D_t + 1)), so D_t <= 2^w_t - 1.
            let degree = (domain + 1).next_power_of_two().ilog2();
            if degree > 63 {
                return Err(MultilevelError::UniverseTooLarge { level: t, degree });
            }
            let sparsity = (m_star as u64)
                .div_ceil(1u64 << (t - 1))
                .min((4 * m_star as u64).div_ceil(lg_m_star));
            if 2 * sparsity > domain as u64 {
                return Err(MultilevelError::LevelInfeasible {
                    level: t,
                    sparsity,
                    domain: domain as u64,
                });
            }
            let message_bits = 2 * sparsity * degree as u64;
            total_bits += message_bits;
            levels.push(LevelParams {
                level: t,
                hash_domain: domain as u64,
                field_degree: degree as u8,
                sparsity: sparsity as u32,
                message_bits,
            });
        }
        Ok(SchemeParams {
            universe_size: n,
            huffman_budget: m_star,
            error_budget: delta,
            levels,
            total_bits,
        })
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    pub fn huffman_budget(&self) -> u32 {
        self.huffman_budget
    }

    pub fn error_budget(&self) -> Rational {
        self.error_budget
    }

    /// Level count T.
    pub fn level_count(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[LevelParams] {
        &self.levels
    }

    /// Total message length in bits, sum of the per-level blocks.
    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    fn check_items(&self, set: &ItemSet) -> Result<(), MultilevelError> {
        for item in set.iter() {
            if item == 0 || item > self.universe_size {
                return Err(MultilevelError::ItemOutOfRange {
                    item,
                    n: self.universe_size,
                });
            }
        }
        Ok(())
    }
}

/// The concatenated multi-level bit string, packed MSB-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    bit_len: u64,
    bytes: Vec<u8>,
}

impl Message {
    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Packed payload bytes; pad bits beyond `bit_len` are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    fn from_syndromes(syndromes: &[Syndrome]) -> Message {
        let mut writer = BitWriter::new();
        for syn in syndromes {
            syn.write_bits(&mut writer);
        }
        let (bytes, bit_len) = writer.finish();
        Message { bit_len, bytes }
    }

    fn to_syndromes(&self, params: &SchemeParams) -> Result<Vec<Syndrome>, MultilevelError> {
        if self.bit_len != params.total_bits {
            return Err(MultilevelError::MessageLengthMismatch {
                got: self.bit_len,
                want: params.total_bits,
            });
        }
        let mut reader = BitReader::new(&self.bytes, self.bit_len);
        let mut syndromes = Vec::with_capacity(params.levels.len());
        for level in &params.levels {
            syndromes.push(Syndrome::read_bits(
                &mut reader,
                level.spec(),
                level.sparsity as usize,
            )?);
        }
        Ok(syndromes)
    }

    /// Bitwise XOR; both messages must have equal length.
    pub fn xor(&self, rhs: &Message) -> Result<Message, MultilevelError> {
        if self.bit_len != rhs.bit_len {
            return Err(MultilevelError::MessageLengthMismatch {
                got: rhs.bit_len,
                want: self.bit_len,
            });
        }
        let bytes = self
            .bytes
            .iter()
            .zip(&rhs.bytes)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Message {
            bit_len: self.bit_len,
            bytes,
        })
    }
}

/// Encodes a set obliviously: the output depends on (params, seed, S) only.
/// Linear over symmetric difference by construction.
pub fn encode(params: &SchemeParams, seed: u64, set: &ItemSet) -> Result<Message, MultilevelError> {
    params.check_items(set)?;
    let mut syndromes = Vec::with_capacity(params.levels.len());
    for level in &params.levels {
        let codec = level.codec();
        let ctx = level.hash_ctx(seed);
        let mut acc = Syndrome::zero(codec.spec(), codec.sparsity());
        for item in set.iter() {
            let position = hash(&ctx, item);
            acc.xor_assign(&codec.encode_position(position)?)?;
        }
        syndromes.push(acc);
    }
    Ok(Message::from_syndromes(&syndromes))
}

/// Toggles membership of one item: msg XOR encode({item}).
pub fn update(
    params: &SchemeParams,
    seed: u64,
    msg: &Message,
    item: u64,
) -> Result<Message, MultilevelError> {
    let single = encode(params, seed, &ItemSet::from_iter([item]))?;
    msg.xor(&single)
}

/// Per-level decoder diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelDiagnostics {
    pub level: u32,
    /// Degree of the connection polynomial of the residual syndrome.
    pub connection_degree: usize,
    /// Sparsity budget k_t the degree is checked against.
    pub sparsity_budget: u32,
    /// Set when the residual was denser than the budget; the level then
    /// contributes nothing and decoding continues.
    pub decode_failed: bool,
    /// Items this level added to the output.
    pub decoded_count: usize,
    /// Set when re-encoding the final output does not reproduce this level's
    /// block of the received message.
    pub reencode_mismatch: bool,
}

/// Decode outcome report. `clean` means no level failed and the re-encoding
/// of the output reproduces the received message exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeDiagnostics {
    pub levels: Vec<LevelDiagnostics>,
    pub clean: bool,
}

/// The peeling decoder. Splits the message into level syndromes; per level,
/// synthesizes the connection polynomial of the residual, admits every bucket
/// item whose hash position is a root, and XORs admitted items out of all
/// later levels. A level whose residual exceeds its sparsity budget is
/// flagged and skipped (best effort); the final output is re-encoded and
/// compared against the received message, per level, so a wrong answer is
/// always accompanied by a diagnostic flag.
pub fn decode(
    params: &SchemeParams,
    seed: u64,
    mu: &ClassMPrior,
    msg: &Message,
) -> Result<(ItemSet, DecodeDiagnostics), MultilevelError> {
    if mu.n() != params.universe_size {
        return Err(MultilevelError::PriorMismatch {
            got: mu.n(),
            want: params.universe_size,
        });
    }
    let mut residual = msg.to_syndromes(params)?;
    let buckets = mu.buckets();
    debug_assert_eq!(buckets.len(), params.levels.len());

    let mut decoded: Vec<u64> = Vec::new();
    let mut level_reports = Vec::with_capacity(params.levels.len());
    for (idx, level) in params.levels.iter().enumerate() {
        let codec = level.codec();
        let lambda = berlekamp_massey(&residual[idx]);
        let mut report = LevelDiagnostics {
            level: level.level,
            connection_degree: lambda.degree(),
            sparsity_budget: level.sparsity,
            decode_failed: false,
            decoded_count: 0,
            reencode_mismatch: false,
        };
        if lambda.degree() > level.sparsity as usize {
            report.decode_failed = true;
            level_reports.push(report);
            continue;
        }
        let ctx = level.hash_ctx(seed);
        for &item in &buckets[idx] {
            let position = hash(&ctx, item);
            if !codec.has_root_at(&lambda, position)? {
                continue;
            }
            decoded.push(item);
            report.decoded_count += 1;
            // Peel the item's contribution out of every later level.
            for (later_idx, later) in params.levels.iter().enumerate().skip(idx + 1) {
                let later_codec = later.codec();
                let later_pos = hash(&later.hash_ctx(seed), item);
                residual[later_idx].xor_assign(&later_codec.encode_position(later_pos)?)?;
            }
        }
        level_reports.push(report);
    }

    let result = ItemSet::from_iter(decoded);
    let reencoded = encode(params, seed, &result)?.to_syndromes(params)?;
    let received = msg.to_syndromes(params)?;
    let mut clean = true;
    for (idx, report) in level_reports.iter_mut().enumerate() {
        report.reencode_mismatch = reencoded[idx] != received[idx];
        clean &= !report.decode_failed && !report.reencode_mismatch;
    }
    Ok((
        result,
        DecodeDiagnostics {
            levels: level_reports,
            clean,
        },
    ))
}

/// Everything `verify_roundtrip` measures about one encode/decode cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub huffman_weight: f64,
    /// Whether the set satisfies the Huffman condition for this budget.
    pub within_budget: bool,
    pub decoded_exactly: bool,
    pub message_bits: u64,
    /// total_bits / max(huffman_weight, 1).
    pub expansion_ratio: f64,
    pub diagnostics: DecodeDiagnostics,
}

/// Convenience composition: Huffman filter, encode, decode, compare.
pub fn verify_roundtrip(
    params: &SchemeParams,
    seed: u64,
    mu: &ClassMPrior,
    set: &ItemSet,
) -> Result<RoundtripReport, MultilevelError> {
    let weight = mu.huffman_weight(set)?;
    let msg = encode(params, seed, set)?;
    let (decoded, diagnostics) = decode(params, seed, mu, &msg)?;
    Ok(RoundtripReport {
        huffman_weight: weight,
        within_budget: weight <= params.huffman_budget as f64 + 1e-9,
        decoded_exactly: decoded == *set,
        message_bits: msg.bit_len(),
        expansion_ratio: msg.bit_len() as f64 / weight.max(1.0),
        diagnostics,
    })
}

/// Per-level outcome of the collision/sparsity events that make the peeling
/// decoder deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelEvents {
    pub level: u32,
    /// The hash is injective on the whole bucket B_t.
    pub bucket_injective: bool,
    /// No bucket item shares a position with any item of S from a later
    /// bucket. This is checked for all of B_t, not just S ∩ B_t: a collision
    /// between an unsent bucket item and a later-level member would also
    /// misfire the decoder, so the weaker pairing is not decoding-sufficient.
    pub no_cross_collision: bool,
    /// |S ∩ (B_t ∪ ... ∪ B_T)| <= k_t.
    pub sparsity_within_budget: bool,
}

/// Outcome of the decoding-sufficiency events for one (seed, set) instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventsReport {
    pub levels: Vec<LevelEvents>,
    /// When set, the peeling decoder provably returns exactly S.
    pub all_hold: bool,
}

/// Checks, directly from (params, seed, mu, S), the per-level collision and
/// sparsity events under which decoding is deterministic. Whenever
/// `all_hold`, decode(encode(S)) = S exactly.
pub fn decoding_events(
    params: &SchemeParams,
    seed: u64,
    mu: &ClassMPrior,
    set: &ItemSet,
) -> Result<EventsReport, MultilevelError> {
    if mu.n() != params.universe_size {
        return Err(MultilevelError::PriorMismatch {
            got: mu.n(),
            want: params.universe_size,
        });
    }
    params.check_items(set)?;
    let buckets = mu.buckets();
    let t_levels = params.levels.len();
    // Bucket index of every member of S.
    let member_levels: Vec<(u64, u32)> = set
        .iter()
        .map(|item| Ok::<_, MultilevelError>((item, mu.bucket_of(item)?)))
        .collect::<Result<_, _>>()?;

    let mut levels = Vec::with_capacity(t_levels);
    let mut all_hold = true;
    for (idx, level) in params.levels.iter().enumerate() {
        let ctx = level.hash_ctx(seed);
        let mut bucket_positions = std::collections::HashSet::with_capacity(buckets[idx].len());
        let mut bucket_injective = true;
        for &item in &buckets[idx] {
            if !bucket_positions.insert(hash(&ctx, item)) {
                bucket_injective = false;
            }
        }
        let mut no_cross_collision = true;
        for &(item, item_level) in &member_levels {
            if item_level > level.level && bucket_positions.contains(&hash(&ctx, item)) {
                no_cross_collision = false;
            }
        }
        let tail_count = member_levels
            .iter()
            .filter(|&&(_, l)| l >= level.level)
            .count();
        let sparsity_within_budget = tail_count <= level.sparsity as usize;
        all_hold &= bucket_injective && no_cross_collision && sparsity_within_budget;
        levels.push(LevelEvents {
            level: level.level,
            bucket_injective,
            no_cross_collision,
            sparsity_within_budget,
        });
    }
    Ok(EventsReport { levels, all_hold })
}

/// Serializes a message file: magic, version, then big-endian N (8 bytes),
/// m* (4), delta numerator (4), delta denominator (4), seed (8), payload bit
/// length (8), and the payload packed MSB-first, zero-padded to a byte
/// boundary. The prior is never part of the file.
pub fn write_message_file(params: &SchemeParams, seed: u64, msg: &Message) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + msg.bytes.len());
    out.extend_from_slice(&MESSAGE_MAGIC);
    out.push(MESSAGE_VERSION);
    out.extend_from_slice(&params.universe_size.to_be_bytes());
    out.extend_from_slice(&params.huffman_budget.to_be_bytes());
    out.extend_from_slice(&params.error_budget.num.to_be_bytes());
    out.extend_from_slice(&params.error_budget.den.to_be_bytes());
    out.extend_from_slice(&seed.to_be_bytes());
    out.extend_from_slice(&msg.bit_len.to_be_bytes());
    out.extend_from_slice(&msg.bytes);
    out
}

/// A parsed message file with the scheme parameters re-derived from its
/// header.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageFile {
    pub params: SchemeParams,
    pub seed: u64,
    pub message: Message,
}

/// Parses and validates a message file. The header's (N, m*, delta) are fed
/// back through [`SchemeParams::derive`] and the payload length must equal
/// the derived total_bits exactly.
pub fn read_message_file(bytes: &[u8]) -> Result<MessageFile, MultilevelError> {
    if bytes.len() < HEADER_LEN {
        return Err(MultilevelError::Truncated {
            want: HEADER_LEN,
            got: bytes.len(),
        });
    }
    if bytes[0..4] != MESSAGE_MAGIC {
        return Err(MultilevelError::BadMagic);
    }
    if bytes[4] != MESSAGE_VERSION {
        return Err(MultilevelError::BadVersion(bytes[4]));
    }
    let take_u64 = |at: usize| u64::from_be_bytes(bytes[at..at + 8].try_into().unwrap());
    let take_u32 = |at: usize| u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap());
    let n = take_u64(5);
    let m_star = take_u32(13);
    let num = take_u32(17);
    let den = take_u32(21);
    let seed = take_u64(25);
    let bit_len = take_u64(33);

    let params = SchemeParams::derive(n, m_star, Rational::new(num, den)?)?;
    if bit_len != params.total_bits {
        return Err(MultilevelError::PayloadLengthMismatch {
            header: bit_len,
            derived: params.total_bits,
        });
    }
    let payload_len = bit_len.div_ceil(8) as usize;
    if bytes.len() != HEADER_LEN + payload_len {
        return Err(MultilevelError::PayloadTruncated {
            want: payload_len,
            got: bytes.len() - HEADER_LEN,
        });
    }
    let payload = bytes[HEADER_LEN..].to_vec();
    // Pad bits past the payload length must be zero.
    if bit_len % 8 != 0 {
        let last = payload[payload_len - 1];
        let mask = 0xFFu8 >> (bit_len % 8);
        if last & mask != 0 {
            return Err(MultilevelError::NonZeroPadding);
        }
    }
    Ok(MessageFile {
        params,
        seed,
        message: Message {
            bit_len,
            bytes: payload,
        },
    })
}
