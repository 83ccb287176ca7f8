//! Triple-DES in EDE form: `E_k3(D_k2(E_k1(x)))`.

use crate::des::{Des, DesKey};
use crate::{BlockCipher, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyingOption {
    /// Three independent keys.
    ThreeKey,
    /// `k1 == k3`, `k2` independent.
    TwoKey,
    /// `k1 == k2 == k3`; collapses to single DES.
    OneKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdesKey {
    option: KeyingOption,
    k1: DesKey,
    k2: DesKey,
    k3: DesKey,
}

impl TdesKey {
    pub fn three_key(k1: DesKey, k2: DesKey, k3: DesKey) -> Self {
        TdesKey {
            option: KeyingOption::ThreeKey,
            k1,
            k2,
            k3,
        }
    }

    pub fn two_key(k1: DesKey, k2: DesKey) -> Self {
        TdesKey {
            option: KeyingOption::TwoKey,
            k1,
            k2,
            k3: k1,
        }
    }

    pub fn one_key(k: DesKey) -> Self {
        TdesKey {
            option: KeyingOption::OneKey,
            k1: k,
            k2: k,
            k3: k,
        }
    }

    /// 24 octets `k1 || k2 || k3`, 16 octets `k1 || k2` (k3 := k1), or 8 octets.
    pub fn from_slice(octets: &[u8]) -> Result<Self> {
        let part = |i: usize| DesKey::from_slice(&octets[8 * i..8 * i + 8]);
        match octets.len() {
            24 => Ok(TdesKey::three_key(part(0)?, part(1)?, part(2)?)),
            16 => Ok(TdesKey::two_key(part(0)?, part(1)?)),
            8 => Ok(TdesKey::one_key(part(0)?)),
            n => Err(Error::KeyLength {
                algorithm: "tdes",
                expected: "8, 16 or 24".into(),
                actual: n,
            }),
        }
    }

    pub fn option(&self) -> KeyingOption {
        self.option
    }

    pub fn keys(&self) -> [DesKey; 3] {
        [self.k1, self.k2, self.k3]
    }

    pub fn effective_key_bits(&self) -> u32 {
        match self.option {
            KeyingOption::ThreeKey => 168,
            KeyingOption::TwoKey => 112,
            KeyingOption::OneKey => 56,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tdes {
    d1: Des,
    d2: Des,
    d3: Des,
}

impl Tdes {
    pub fn new(key: &TdesKey) -> Result<Self> {
        Ok(Tdes {
            d1: Des::new(&key.k1)?,
            d2: Des::new(&key.k2)?,
            d3: Des::new(&key.k3)?,
        })
    }

    #[inline]
    pub fn encrypt_u64(&self, block: u64) -> u64 {
        self.d3
            .encrypt_u64(self.d2.decrypt_u64(self.d1.encrypt_u64(block)))
    }

    #[inline]
    pub fn decrypt_u64(&self, block: u64) -> u64 {
        self.d1
            .decrypt_u64(self.d2.encrypt_u64(self.d3.decrypt_u64(block)))
    }
}

impl BlockCipher for Tdes {
    fn block_octets(&self) -> usize {
        8
    }

    fn encrypt_block(&self, block: &mut [u8]) {
        let out = self.encrypt_u64(u64::from_be_bytes(block[..8].try_into().unwrap()));
        block[..8].copy_from_slice(&out.to_be_bytes());
    }

    fn decrypt_block(&self, block: &mut [u8]) {
        let out = self.decrypt_u64(u64::from_be_bytes(block[..8].try_into().unwrap()));
        block[..8].copy_from_slice(&out.to_be_bytes());
    }
}

pub fn encrypt_block(key: &TdesKey, block: [u8; 8]) -> Result<[u8; 8]> {
    Ok(Tdes::new(key)?.encrypt_u64(u64::from_be_bytes(block)).to_be_bytes())
}

pub fn decrypt_block(key: &TdesKey, block: [u8; 8]) -> Result<[u8; 8]> {
    Ok(Tdes::new(key)?.decrypt_u64(u64::from_be_bytes(block)).to_be_bytes())
}
