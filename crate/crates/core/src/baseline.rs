//! The information-theoretic baseline: a seeded random linear code over F_2
//! with maximum-likelihood list decoding.
//!
//! Code columns are never materialized as a matrix; column i is generated on
//! demand from (seed, i) with the shared mixing recipe under a distinct
//! domain-separation tag, one 64-bit block per 64 message bits. Decoding is a
//! deliberate linear scan over the list: its cost in the list length is
//! exactly the point of the construction.

use std::fmt;

use thiserror::Error;

use crate::hashing::keyed_mix;
use crate::prior::ItemSet;

/// Domain-separation tag mixed into the seed for column generation, keeping
/// baseline columns independent of the multi-level hash values.
const COLUMN_TAG: u64 = 0x726C_636F_6465_3031; // "rlcode01"

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("message length must be at least 1 bit")]
    EmptyMessage,
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("item {item} outside universe [1, {n}]")]
    ItemOutOfRange { item: u64, n: u64 },
    #[error("bit string has {got} bits, code uses {want}")]
    LengthMismatch { got: u32, want: u32 },
    #[error("list contains duplicate sets (lines {0} and {1})")]
    DuplicateSet(usize, usize),
    #[error("cannot parse set list: {0}")]
    Parse(String),
}

/// An m-bit string stored MSB-first in 64-bit blocks; unused tail bits are
/// kept zero so equality and hashing are well defined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: u32,
    blocks: Vec<u64>,
}

impl BitString {
    pub fn zero(bits: u32) -> Self {
        BitString {
            bits,
            blocks: vec![0; bits.div_ceil(64) as usize],
        }
    }

    pub fn len(&self) -> u32 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Bit j, 0-based from the most significant end.
    pub fn bit(&self, j: u32) -> bool {
        debug_assert!(j < self.bits);
        self.blocks[(j / 64) as usize] >> (63 - j % 64) & 1 == 1
    }

    pub fn xor(&self, rhs: &BitString) -> Result<BitString, BaselineError> {
        if self.bits != rhs.bits {
            return Err(BaselineError::LengthMismatch {
                got: rhs.bits,
                want: self.bits,
            });
        }
        Ok(BitString {
            bits: self.bits,
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    fn xor_assign(&mut self, rhs: &BitString) {
        debug_assert_eq!(self.bits, rhs.bits);
        for (a, &b) in self.blocks.iter_mut().zip(&rhs.blocks) {
            *a ^= b;
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.bits {
            write!(f, "{}", self.bit(j) as u8)?;
        }
        Ok(())
    }
}

/// A seeded random linear code C in F_2^(m x N) with on-demand columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomCode {
    seed: u64,
    message_bits: u32,
    universe_size: u64,
}

impl RandomCode {
    pub fn new(seed: u64, message_bits: u32, universe_size: u64) -> Result<Self, BaselineError> {
        if message_bits == 0 {
            return Err(BaselineError::EmptyMessage);
        }
        if universe_size == 0 {
            return Err(BaselineError::EmptyUniverse);
        }
        Ok(RandomCode {
            seed,
            message_bits,
            universe_size,
        })
    }

    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    /// Column c_i: successive 64-bit blocks keyed by block index, truncated
    /// to m bits.
    pub fn column(&self, item: u64) -> Result<BitString, BaselineError> {
        if item == 0 || item > self.universe_size {
            return Err(BaselineError::ItemOutOfRange {
                item,
                n: self.universe_size,
            });
        }
        let n_blocks = self.message_bits.div_ceil(64);
        let mut blocks = Vec::with_capacity(n_blocks as usize);
        for block_idx in 0..n_blocks {
            blocks.push(keyed_mix(
                self.seed ^ COLUMN_TAG,
                block_idx as u64 + 1,
                item,
            ));
        }
        let tail = self.message_bits % 64;
        if tail != 0 {
            *blocks.last_mut().unwrap() &= u64::MAX << (64 - tail);
        }
        Ok(BitString {
            bits: self.message_bits,
            blocks,
        })
    }

    /// Enc(S) = C * 1_S: the XOR of the member columns.
    pub fn encode(&self, set: &ItemSet) -> Result<BitString, BaselineError> {
        let mut acc = BitString::zero(self.message_bits);
        for item in set.iter() {
            acc.xor_assign(&self.column(item)?);
        }
        Ok(acc)
    }

    /// Maximum-likelihood list decoding: the first set in the list whose
    /// encoding equals `received`, or None (NoMatch). Cost is one encoding
    /// per list entry up to the first match.
    pub fn ml_decode<'a>(
        &self,
        list: &'a SetList,
        received: &BitString,
    ) -> Result<Option<&'a ItemSet>, BaselineError> {
        if received.len() != self.message_bits {
            return Err(BaselineError::LengthMismatch {
                got: received.len(),
                want: self.message_bits,
            });
        }
        for set in list.sets() {
            if self.encode(set)? == *received {
                return Ok(Some(set));
            }
        }
        Ok(None)
    }
}

/// Failure-probability upper bound for one listed set:
/// (|L| - 1) * 2^(-m).
pub fn error_bound(list_len: u64, message_bits: u32) -> f64 {
    (list_len.saturating_sub(1)) as f64 * (2.0f64).powi(-(message_bits as i32))
}

/// Failure-probability upper bound for the whole list:
/// |L| * (|L| - 1) * 2^(-m).
pub fn forall_error_bound(list_len: u64, message_bits: u32) -> f64 {
    list_len as f64 * (list_len.saturating_sub(1)) as f64 * (2.0f64).powi(-(message_bits as i32))
}

/// An ordered list of sets; position is decoding priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetList {
    sets: Vec<ItemSet>,
}

impl SetList {
    /// Rejects duplicate sets.
    pub fn new(sets: Vec<ItemSet>) -> Result<Self, BaselineError> {
        let mut seen = std::collections::HashMap::new();
        for (idx, set) in sets.iter().enumerate() {
            if let Some(&first) = seen.get(set) {
                return Err(BaselineError::DuplicateSet(first + 1, idx + 1));
            }
            seen.insert(set.clone(), idx);
        }
        Ok(SetList { sets })
    }

    pub fn sets(&self) -> &[ItemSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Parses the list file format: one set per line as comma-separated item
    /// indices, line order = priority order. A blank line is the empty set.
    pub fn parse(text: &str) -> Result<Self, BaselineError> {
        let mut sets = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                sets.push(ItemSet::empty());
                continue;
            }
            let mut items = Vec::new();
            for tok in line.split(',') {
                let item: u64 = tok.trim().parse().map_err(|_| {
                    BaselineError::Parse(format!("line {}: bad item {tok:?}", line_no + 1))
                })?;
                items.push(item);
            }
            sets.push(ItemSet::from_iter(items));
        }
        Self::new(sets)
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        for set in &self.sets {
            out.push_str(&set.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::SeedStream;

    #[test]
    fn empty_set_encodes_to_zero() {
        let code = RandomCode::new(0, 64, 100).unwrap();
        assert!(code.encode(&ItemSet::empty()).unwrap().is_zero());
    }

    #[test]
    fn encode_is_linear() {
        let code = RandomCode::new(7, 48, 64).unwrap();
        let mut stream = SeedStream::new(11);
        for _ in 0..100 {
            let a = ItemSet::from_iter((0..3).map(|_| stream.next_below(64) + 1));
            let b = ItemSet::from_iter((0..3).map(|_| stream.next_below(64) + 1));
            let lhs = code
                .encode(&a)
                .unwrap()
                .xor(&code.encode(&b).unwrap())
                .unwrap();
            assert_eq!(lhs, code.encode(&a.symmetric_difference(&b)).unwrap());
        }
    }

    #[test]
    fn column_is_pinned_recipe() {
        // Golden: block 1 of column 1 under seed 0 is the keyed mix of
        // (COLUMN_TAG, 1, 1); the column of a singleton set equals rl_encode.
        let code = RandomCode::new(0, 64, 4).unwrap();
        let col = code.column(1).unwrap();
        assert_eq!(col.blocks[0], keyed_mix(COLUMN_TAG, 1, 1));
        assert_eq!(code.encode(&ItemSet::from_iter([1])).unwrap(), col);
        // Tail bits beyond m are masked to zero.
        let short = RandomCode::new(0, 7, 4).unwrap();
        assert_eq!(short.column(1).unwrap().blocks[0] & (u64::MAX >> 7), 0);
    }

    #[test]
    fn ml_decode_first_match_wins() {
        let code = RandomCode::new(3, 16, 8).unwrap();
        let empty = ItemSet::empty();
        let one = ItemSet::from_iter([1]);
        let list = SetList::new(vec![empty.clone(), one]).unwrap();
        let decoded = code.ml_decode(&list, &BitString::zero(16)).unwrap();
        assert_eq!(decoded, Some(&empty));
    }

    #[test]
    fn ml_decode_examples() {
        let code = RandomCode::new(0, 32, 8).unwrap();
        let s1 = ItemSet::from_iter([1]);
        let s2 = ItemSet::from_iter([2]);
        assert_ne!(code.column(1).unwrap(), code.column(2).unwrap());
        let list = SetList::new(vec![s1, s2.clone()]).unwrap();
        let y = code.encode(&s2).unwrap();
        assert_eq!(code.ml_decode(&list, &y).unwrap(), Some(&s2));

        // A message matching no listed encoding is NoMatch.
        let mut other = BitString::zero(32);
        other.blocks[0] = 0xDEAD_BEEF_0000_0000;
        while list.sets().iter().any(|s| code.encode(s).unwrap() == other) {
            other.blocks[0] ^= 1 << 32;
        }
        assert_eq!(code.ml_decode(&list, &other).unwrap(), None);
    }

    #[test]
    fn list_order_decides_realized_collisions() {
        // With m = 2 bits, two of three sets collide under some seed; both
        // encodings must then decode to whichever set is listed first.
        let early = ItemSet::from_iter([1]);
        let late = ItemSet::from_iter([2]);
        let seed = (0..200u64)
            .find(|&s| {
                let code = RandomCode::new(s, 2, 4).unwrap();
                code.encode(&early).unwrap() == code.encode(&late).unwrap()
            })
            .expect("a 2-bit collision exists within 200 seeds");
        let code = RandomCode::new(seed, 2, 4).unwrap();
        let list = SetList::new(vec![early.clone(), late.clone()]).unwrap();
        let y_late = code.encode(&late).unwrap();
        assert_eq!(code.ml_decode(&list, &y_late).unwrap(), Some(&early));
        let y_early = code.encode(&early).unwrap();
        assert_eq!(code.ml_decode(&list, &y_early).unwrap(), Some(&early));
    }

    #[test]
    fn no_match_iff_no_listed_encoding() {
        // Exhaustive over all 16 possible 4-bit messages.
        let code = RandomCode::new(9, 4, 6).unwrap();
        let list = SetList::parse("1,2\n3\n4,5,6\n\n2,6\n").unwrap();
        let encodings: Vec<BitString> = list
            .sets()
            .iter()
            .map(|s| code.encode(s).unwrap())
            .collect();
        for word in 0u64..16 {
            let y = BitString {
                bits: 4,
                blocks: vec![word << 60],
            };
            let decoded = code.ml_decode(&list, &y).unwrap();
            let listed = encodings.iter().position(|e| *e == y);
            match (decoded, listed) {
                (None, None) => {}
                (Some(s), Some(idx)) => assert_eq!(s, &list.sets()[idx]),
                other => panic!("mismatch for word {word:04b}: {other:?}"),
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(error_bound(1, 16), 0.0);
        assert!((error_bound(256, 16) - 255.0 / 65536.0).abs() < 1e-15);
        assert_eq!(error_bound(2, 1), 0.5);
        assert_eq!(forall_error_bound(1, 16), 0.0);
        assert!((forall_error_bound(16, 16) - 240.0 / 65536.0).abs() < 1e-15);
        assert_eq!(forall_error_bound(2, 2), 0.5);
    }

    #[test]
    fn list_parse_and_duplicates() {
        let list = SetList::parse("1,2,3\n\n5\n").unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(list.sets()[0].items(), &[1, 2, 3]);
        assert!(list.sets()[1].is_empty());
        assert_eq!(list.sets()[2].items(), &[5]);
        assert_eq!(SetList::parse(&list.format()).unwrap(), list);

        assert!(matches!(
            SetList::parse("1,2\n2,1\n"),
            Err(BaselineError::DuplicateSet(1, 2))
        ));
        assert!(SetList::parse("1,x\n").is_err());
    }

    #[test]
    fn code_validation() {
        assert!(RandomCode::new(0, 0, 4).is_err());
        assert!(RandomCode::new(0, 4, 0).is_err());
        let code = RandomCode::new(0, 4, 4).unwrap();
        assert!(matches!(
            code.encode(&ItemSet::from_iter([5])),
            Err(BaselineError::ItemOutOfRange { item: 5, n: 4 })
        ));
    }
}
