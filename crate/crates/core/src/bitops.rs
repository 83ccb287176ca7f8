//! Bit-level primitives shared by the cipher cores.
//!
//! Bits are numbered the way the DES standard (FIPS PUB 46) numbers them:
//! bit 1 is the most significant bit of the first octet.

use crate::{Error, Result};

/// A bit string of 1..=128 bits, stored right-aligned in a `u128`.
///
/// Bit 1 is the most significant of the `width` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    width: usize,
    bits: u128,
}

impl BitVector {
    pub fn new(width: usize, bits: u128) -> Result<Self> {
        if width == 0 || width > 128 {
            return Err(Error::InvalidArgument(format!(
                "bit width {width} outside 1..=128"
            )));
        }
        if width < 128 && bits >> width != 0 {
            return Err(Error::InvalidArgument(format!(
                "value does not fit in {width} bits"
            )));
        }
        Ok(BitVector { width, bits })
    }

    /// Loads octets big-endian: bit 1 is mask 0x80 of `octets[0]`.
    pub fn from_octets(octets: &[u8]) -> Result<Self> {
        if octets.is_empty() || octets.len() > 16 {
            return Err(Error::InvalidArgument(format!(
                "{} octets cannot form a bit vector",
                octets.len()
            )));
        }
        let bits = octets.iter().fold(0u128, |acc, &b| acc << 8 | b as u128);
        Ok(BitVector {
            width: octets.len() * 8,
            bits,
        })
    }

    /// Renders the bits left-aligned into octets; trailing pad bits are zero.
    pub fn to_octets(&self) -> Vec<u8> {
        let len = self.width.div_ceil(8);
        let aligned = self.bits << (len * 8 - self.width);
        (0..len)
            .map(|i| (aligned >> (8 * (len - 1 - i))) as u8)
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// Bit at 1-based `position`.
    pub fn bit(&self, position: usize) -> bool {
        assert!(
            (1..=self.width).contains(&position),
            "bit {position} outside 1..={}",
            self.width
        );
        (self.bits >> (self.width - position)) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }
}

/// A bit-selection table: output bit `k` is input bit `entries[k - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationTable {
    pub name: &'static str,
    pub input_width: usize,
    pub entries: &'static [u8],
}

impl PermutationTable {
    pub const fn new(name: &'static str, input_width: usize, entries: &'static [u8]) -> Self {
        PermutationTable {
            name,
            input_width,
            entries,
        }
    }

    pub fn output_width(&self) -> usize {
        self.entries.len()
    }

    /// Checks every entry lies in `1..=input_width`.
    pub fn validate(&self) -> Result<()> {
        match self
            .entries
            .iter()
            .find(|&&e| e == 0 || e as usize > self.input_width)
        {
            Some(&e) => Err(Error::InvalidArgument(format!(
                "table {} references bit {e} of a {}-bit input",
                self.name, self.input_width
            ))),
            None => Ok(()),
        }
    }

    /// True when the table is a permutation of `1..=input_width`.
    pub fn is_bijective(&self) -> bool {
        if self.output_width() != self.input_width {
            return false;
        }
        let mut seen = vec![false; self.input_width + 1];
        for &e in self.entries {
            let e = e as usize;
            if e == 0 || e > self.input_width || seen[e] {
                return false;
            }
            seen[e] = true;
        }
        true
    }

    /// Inverse table of a bijective table.
    pub fn inverse_entries(&self) -> Option<Vec<u8>> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0u8; self.input_width];
        for (k, &e) in self.entries.iter().enumerate() {
            inv[e as usize - 1] = (k + 1) as u8;
        }
        Some(inv)
    }
}

/// Applies `table` to `input`, one bit at a time.
pub fn permute(input: BitVector, table: &PermutationTable) -> Result<BitVector> {
    if input.width != table.input_width {
        return Err(Error::WidthMismatch {
            table: table.name,
            expected: table.input_width,
            actual: input.width,
        });
    }
    let bits = table.entries.iter().fold(0u128, |acc, &src| {
        acc << 1 | ((input.bits >> (input.width - src as usize)) & 1)
    });
    BitVector::new(table.output_width(), bits)
}

/// Circular left rotation of the low `width` bits of `value`.
pub fn rotl(value: u32, width: u32, n: u32) -> Result<u32> {
    if !(width == 28 || width == 32) || n >= width {
        return Err(Error::Rotation { width, shift: n });
    }
    Ok(rotl_unchecked(value, width, n))
}

#[inline]
pub(crate) fn rotl_unchecked(value: u32, width: u32, n: u32) -> u32 {
    if width == 32 {
        return value.rotate_left(n);
    }
    let mask = (1u32 << width) - 1;
    let value = value & mask;
    if n == 0 {
        value
    } else {
        ((value << n) | (value >> (width - n))) & mask
    }
}

pub fn hex_decode(text: &str) -> Result<Vec<u8>> {
    hex::decode(text).map_err(|e| match e {
        hex::FromHexError::InvalidHexCharacter { c, index } => Error::Hex {
            offset: index,
            reason: format!("invalid character {c:?}"),
        },
        hex::FromHexError::OddLength => Error::Hex {
            offset: text.len(),
            reason: "odd number of digits".into(),
        },
        other => Error::Hex {
            offset: 0,
            reason: other.to_string(),
        },
    })
}

/// Lowercase hex rendering.
pub fn hex_encode(octets: &[u8]) -> String {
    hex::encode(octets)
}

/// A bit-selection table compiled into per-octet lookup tables.
///
/// Applying it ORs together one table entry per input octet, which is
/// equivalent to [`permute`] for tables whose input width is a multiple of 8
/// and whose output fits in 64 bits.
#[derive(Clone)]
pub(crate) struct CompiledPermutation {
    octets: usize,
    tables: Vec<[u64; 256]>,
}

impl CompiledPermutation {
    pub(crate) fn new(table: &PermutationTable) -> Self {
        assert!(table.input_width % 8 == 0 && table.input_width <= 64);
        assert!(table.output_width() <= 64);
        let octets = table.input_width / 8;
        let tables = (0..octets)
            .map(|i| {
                let mut t = [0u64; 256];
                for (b, slot) in t.iter_mut().enumerate() {
                    let shifted = (b as u128) << (8 * (octets - 1 - i));
                    let input = BitVector::new(table.input_width, shifted).expect("fits");
                    *slot = permute(input, table).expect("width checked").bits() as u64;
                }
                t
            })
            .collect();
        CompiledPermutation { octets, tables }
    }

    #[inline]
    pub(crate) fn apply(&self, input: u64) -> u64 {
        let mut out = 0;
        for (i, t) in self.tables.iter().enumerate() {
            out |= t[((input >> (8 * (self.octets - 1 - i))) & 0xff) as usize];
        }
        out
    }
}
