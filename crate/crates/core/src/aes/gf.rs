//! Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.

use std::ops::{Add, Mul};

/// The low byte of the AES reduction polynomial (0x11b).
pub const REDUCTION: u8 = 0x1b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    /// Multiplication by x.
    #[inline]
    pub const fn xtime(self) -> Gf256 {
        let shifted = self.0 << 1;
        Gf256(if self.0 & 0x80 != 0 {
            shifted ^ REDUCTION
        } else {
            shifted
        })
    }

    /// Multiplicative inverse, with 0 mapped to 0.
    ///
    /// Computed as a^254, since a^255 = 1 for every nonzero a.
    pub fn inverse(self) -> Gf256 {
        let mut result = Gf256::ONE;
        let mut base = self;
        let mut exp = 254u8;
        while exp != 0 {
            if exp & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            exp >>= 1;
        }
        result
    }
}

impl Add for Gf256 {
    type Output = Gf256;

    #[inline]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;

    /// Carry-less product, reducing after every shift.
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        let mut a = self;
        let mut b = rhs.0;
        let mut acc = 0u8;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a.0;
            }
            a = a.xtime();
            b >>= 1;
        }
        Gf256(acc)
    }
}

pub fn gf_add(a: u8, b: u8) -> u8 {
    (Gf256(a) + Gf256(b)).0
}

pub fn gf_mul(a: u8, b: u8) -> u8 {
    (Gf256(a) * Gf256(b)).0
}
