//! Arithmetic in binary extension fields GF(2^w), 2 <= w <= 63.
//!
//! Every degree has exactly one canonical field: the one whose modulus is the
//! lexicographically smallest primitive polynomial of that degree. The table
//! below was produced by an exhaustive primitivity scan and is frozen so that
//! independent implementations agree bit-for-bit on every field element.

use thiserror::Error;

/// Smallest supported extension degree.
pub const MIN_DEGREE: u8 = 2;
/// Largest supported extension degree; elements must fit a 64-bit word.
pub const MAX_DEGREE: u8 = 63;

/// Lexicographically smallest primitive polynomial of degree w over GF(2),
/// encoded as a (w+1)-bit integer with the MSB set. Index is w - 2.
const CANONICAL_MODULI: [u64; 62] = [
    0x7,                // w = 2
    0xB,                // w = 3
    0x13,               // w = 4
    0x25,               // w = 5
    0x43,               // w = 6
    0x83,               // w = 7
    0x11D,              // w = 8
    0x211,              // w = 9
    0x409,              // w = 10
    0x805,              // w = 11
    0x1053,             // w = 12
    0x201B,             // w = 13
    0x402B,             // w = 14
    0x8003,             // w = 15
    0x1002D,            // w = 16
    0x20009,            // w = 17
    0x40027,            // w = 18
    0x80027,            // w = 19
    0x100009,           // w = 20
    0x200005,           // w = 21
    0x400003,           // w = 22
    0x800021,           // w = 23
    0x100001B,          // w = 24
    0x2000009,          // w = 25
    0x4000047,          // w = 26
    0x8000027,          // w = 27
    0x10000009,         // w = 28
    0x20000005,         // w = 29
    0x40000053,         // w = 30
    0x80000009,         // w = 31
    0x1000000AF,        // w = 32
    0x200000053,        // w = 33
    0x4000000E7,        // w = 34
    0x800000005,        // w = 35
    0x1000000077,       // w = 36
    0x200000003F,       // w = 37
    0x4000000063,       // w = 38
    0x8000000011,       // w = 39
    0x10000000039,      // w = 40
    0x20000000009,      // w = 41
    0x4000000003F,      // w = 42
    0x80000000059,      // w = 43
    0x100000000065,     // w = 44
    0x20000000001B,     // w = 45
    0x40000000012F,     // w = 46
    0x800000000021,     // w = 47
    0x10000000000B7,    // w = 48
    0x2000000000071,    // w = 49
    0x400000000001D,    // w = 50
    0x800000000004B,    // w = 51
    0x10000000000009,   // w = 52
    0x20000000000047,   // w = 53
    0x4000000000007D,   // w = 54
    0x80000000000047,   // w = 55
    0x100000000000095,  // w = 56
    0x20000000000002D,  // w = 57
    0x400000000000063,  // w = 58
    0x80000000000007B,  // w = 59
    0x1000000000000003, // w = 60
    0x2000000000000027, // w = 61
    0x4000000000000069, // w = 62
    0x8000000000000003, // w = 63
];

/// Errors from field construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("extension degree {0} outside supported range [{MIN_DEGREE}, {MAX_DEGREE}]")]
    DegreeOutOfRange(u8),
    #[error("value {value:#x} does not fit in GF(2^{degree})")]
    ValueOutOfRange { value: u64, degree: u8 },
    #[error("operands belong to different fields (GF(2^{0}) vs GF(2^{1}))")]
    SpecMismatch(u8, u8),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// A binary extension field, identified by its degree and modulus polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    degree: u8,
    modulus: u64,
}

impl FieldSpec {
    /// The canonical field of degree `w`: modulus is the lexicographically
    /// smallest primitive polynomial of that degree.
    pub fn canonical(w: u8) -> Result<Self, GfError> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&w) {
            return Err(GfError::DegreeOutOfRange(w));
        }
        Ok(FieldSpec {
            degree: w,
            modulus: CANONICAL_MODULI[(w - MIN_DEGREE) as usize],
        })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// The modulus polynomial as a (w+1)-bit integer with the MSB set.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The multiplicative group order, 2^w - 1.
    pub fn order(&self) -> u64 {
        (1u64 << self.degree) - 1
    }

    pub fn element(&self, value: u64) -> Result<FieldElement, GfError> {
        if value >> self.degree != 0 {
            return Err(GfError::ValueOutOfRange {
                value,
                degree: self.degree,
            });
        }
        Ok(FieldElement { value, spec: *self })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            spec: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            spec: *self,
        }
    }

    /// The canonical primitive element: the class of x, value 2.
    pub fn alpha(&self) -> FieldElement {
        FieldElement {
            value: 2,
            spec: *self,
        }
    }

    /// Polynomial product modulo the field modulus, by shift-and-XOR with
    /// on-the-fly reduction. This is the normative multiplication route;
    /// any table-driven variant must reproduce it exactly.
    pub(crate) fn mul_raw(&self, mut a: u64, mut b: u64) -> u64 {
        let top = 1u64 << self.degree;
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    /// Square-and-multiply exponentiation; pow(a, 0) = 1 for every a.
    pub(crate) fn pow_raw(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, a);
            }
            a = self.mul_raw(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse by Fermat: a^(2^w - 2). Returns None for zero.
    pub(crate) fn inv_raw(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        Some(self.pow_raw(a, self.order() - 1))
    }
}

/// An element of a specific GF(2^w). Operations on elements of different
/// specs are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    spec: FieldSpec,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_spec(&self, rhs: &FieldElement) -> Result<(), GfError> {
        if self.spec != rhs.spec {
            return Err(GfError::SpecMismatch(self.spec.degree, rhs.spec.degree));
        }
        Ok(())
    }

    /// Characteristic-2 addition: bitwise XOR. add(a, a) = 0.
    ///
    /// Not `std::ops::Add`: mixed-spec operands must surface an error, which
    /// the trait signature cannot carry.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.same_spec(&rhs)?;
        Ok(FieldElement {
            value: self.value ^ rhs.value,
            spec: self.spec,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        self.same_spec(&rhs)?;
        Ok(FieldElement {
            value: self.spec.mul_raw(self.value, rhs.value),
            spec: self.spec,
        })
    }

    pub fn inv(self) -> Result<FieldElement, GfError> {
        let value = self.spec.inv_raw(self.value).ok_or(GfError::ZeroInverse)?;
        Ok(FieldElement {
            value,
            spec: self.spec,
        })
    }

    pub fn pow(self, e: u64) -> FieldElement {
        FieldElement {
            value: self.spec.pow_raw(self.value, e),
            spec: self.spec,
        }
    }
}
