//! Oblivious linear compression of item sets with decoder-side priors.
//!
//! An encoder must report a small subset of a universe \[N\] to a decoder that
//! alone knows a prior over the items. The encoder never sees the prior, so
//! its output is a pure function of the scheme parameters, a shared seed, and
//! the set itself. This crate provides:
//!
//! - [`multilevel`]: the main scheme. Items are hashed per level into domains
//!   sized for doubly-exponentially decaying probability buckets, each level
//!   carrying a Reed-Solomon syndrome of the hashed indicator vector; the
//!   decoder recovers buckets in order of decreasing probability and peels
//!   decoded items out of later levels.
//! - [`rs`]: the per-level sensing primitive. Syndromes of sparse binary
//!   vectors under the RS parity-check map, decoded exactly by
//!   Berlekamp-Massey synthesis plus Chien search, with mandatory re-encode
//!   verification.
//! - [`gf`]: canonical GF(2^w) arithmetic for 2 <= w <= 63.
//! - [`hashing`]: the normative seeded hash recipe both endpoints share.
//! - [`prior`]: priors over \[N\], class-M normalization, buckets, entropy,
//!   Huffman weights, and deterministic sampling.
//! - [`baseline`]: the random-linear-code baseline with maximum-likelihood
//!   list decoding and its error bounds.
//! - [`bounds`]: executable desk-scale checks of the impossibility argument
//!   and the list-mass / cover-size / Huffman-tail claims.
//!
//! ```
//! use asymset_core::{decode, encode, ItemSet, Prior, Rational, SchemeParams};
//!
//! // Both endpoints derive identical parameters from (N, m*, delta).
//! let params = SchemeParams::derive(1024, 64, Rational::new(1, 10)?)?;
//!
//! // The encoder never sees a prior.
//! let set = ItemSet::from_iter([3, 99, 512]);
//! let message = encode(&params, 7, &set)?;
//!
//! // The decoder holds one, normalized into class M.
//! let mu = Prior::zipf(1024, 1.0).normalize_to_m()?;
//! let (recovered, diagnostics) = decode(&params, 7, &mu, &message)?;
//! assert_eq!(recovered, set);
//! assert!(diagnostics.clean);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod baseline;
mod bits;
pub mod bounds;
pub mod gf;
pub mod hashing;
pub mod multilevel;
pub mod prior;
pub mod rs;

pub use gf::{FieldElement, FieldSpec, GfError};
pub use hashing::{hash, HashCtx, SeedStream};
pub use multilevel::{
    decode, decoding_events, encode, read_message_file, update, verify_roundtrip,
    write_message_file, Message, MessageFile, MultilevelError, Rational, SchemeParams,
};
pub use prior::{ClassMPrior, ItemSet, Prior, PriorError};
pub use rs::{
    berlekamp_massey, xor_syndromes, DecodeFailure, RsCodec, RsError, SparseSupport, Syndrome,
};
