//! MSB-first bit packing helpers shared by the syndrome and message codecs.
//!
//! Bit i of a stream lives in byte i/8 at bit position 7 - (i mod 8). Streams
//! are zero-padded to a byte boundary only at the outermost (file) layer.

/// Appends fields of up to 64 bits each, most significant bit first.
#[derive(Debug, Default)]
pub(crate) struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the low `width` bits of `value`, MSB first. `width` <= 64 and
    /// any higher bits of `value` must be zero.
    pub fn push_bits(&mut self, value: u64, width: u8) {
        debug_assert!(width as u32 <= 64);
        debug_assert!(width == 64 || value >> width == 0);
        for k in (0..width).rev() {
            let bit = (value >> k) & 1;
            let byte_idx = (self.bit_len / 8) as usize;
            if byte_idx == self.bytes.len() {
                self.bytes.push(0);
            }
            self.bytes[byte_idx] |= (bit as u8) << (7 - (self.bit_len % 8));
            self.bit_len += 1;
        }
    }

    /// The packed bytes; trailing pad bits in the last byte are zero.
    pub fn finish(self) -> (Vec<u8>, u64) {
        (self.bytes, self.bit_len)
    }
}

/// Reads fields of up to 64 bits each, MSB first, from a packed byte slice.
#[derive(Debug)]
pub(crate) struct BitReader<'a> {
    bytes: &'a [u8],
    bit_len: u64,
    cursor: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], bit_len: u64) -> Self {
        debug_assert!(bit_len.div_ceil(8) as usize <= bytes.len());
        BitReader {
            bytes,
            bit_len,
            cursor: 0,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.bit_len - self.cursor
    }

    /// Read `width` bits; None once the declared bit length is exhausted.
    pub fn read_bits(&mut self, width: u8) -> Option<u64> {
        if self.remaining() < width as u64 {
            return None;
        }
        let mut value = 0u64;
        for _ in 0..width {
            let byte = self.bytes[(self.cursor / 8) as usize];
            let bit = (byte >> (7 - (self.cursor % 8))) & 1;
            value = (value << 1) | bit as u64;
            self.cursor += 1;
        }
        Some(value)
    }
}
