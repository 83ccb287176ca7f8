//! Data Encryption Standard (DES) block cipher.
//!
//! 16-round Feistel network over 64-bit blocks with a 56-bit effective key.

pub mod tables;

use std::sync::OnceLock;

use crate::bitops::{self, BitVector, CompiledPermutation};
use crate::{BlockCipher, Error, Result};

/// How the eight parity bits of a DES key are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParityPolicy {
    #[default]
    Ignore,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesKey {
    octets: [u8; 8],
    parity: ParityPolicy,
}

impl DesKey {
    /// A key whose parity bits are ignored.
    pub fn new(octets: [u8; 8]) -> Self {
        DesKey {
            octets,
            parity: ParityPolicy::Ignore,
        }
    }

    pub fn with_policy(octets: [u8; 8], parity: ParityPolicy) -> Result<Self> {
        let key = DesKey { octets, parity };
        key.check_parity()?;
        Ok(key)
    }

    pub fn from_slice(octets: &[u8]) -> Result<Self> {
        let octets: [u8; 8] = octets.try_into().map_err(|_| Error::KeyLength {
            algorithm: "des",
            expected: "8".into(),
            actual: octets.len(),
        })?;
        Ok(DesKey::new(octets))
    }

    /// Builds a key from its 56 effective bits, setting odd parity on each octet.
    ///
    /// Effective bit 1 is the most significant bit of `effective` (bit 55).
    pub fn from_effective(effective: u64) -> Self {
        assert!(effective >> 56 == 0, "effective key exceeds 56 bits");
        let mut octets = [0u8; 8];
        for (i, o) in octets.iter_mut().enumerate() {
            let seven = ((effective >> (49 - 7 * i)) & 0x7f) as u8;
            *o = with_odd_parity(seven << 1);
        }
        DesKey::new(octets)
    }

    /// The 56 non-parity bits, concatenated in key order.
    pub fn effective(&self) -> u64 {
        self.octets
            .iter()
            .fold(0u64, |acc, &o| acc << 7 | (o >> 1) as u64)
    }

    pub fn octets(&self) -> &[u8; 8] {
        &self.octets
    }

    pub fn parity_policy(&self) -> ParityPolicy {
        self.parity
    }

    pub fn complement(&self) -> Self {
        DesKey {
            octets: self.octets.map(|o| !o),
            parity: ParityPolicy::Ignore,
        }
    }

    fn check_parity(&self) -> Result<()> {
        if self.parity == ParityPolicy::Ignore {
            return Ok(());
        }
        match self.octets.iter().position(|o| o.count_ones() % 2 == 0) {
            Some(index) => Err(Error::Parity {
                index,
                octet: self.octets[index],
            }),
            None => Ok(()),
        }
    }

    /// True when the schedule consists of 16 identical subkeys.
    pub fn is_weak(&self) -> bool {
        let schedule = key_schedule_unchecked(self);
        schedule.rounds.iter().all(|&k| k == schedule.rounds[0])
    }
}

fn with_odd_parity(octet: u8) -> u8 {
    let high = octet & 0xfe;
    if high.count_ones() % 2 == 0 {
        high | 1
    } else {
        high
    }
}

/// The sixteen 48-bit round keys, in encryption order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesSubkeys {
    rounds: [u64; 16],
}

impl DesSubkeys {
    pub fn rounds(&self) -> &[u64; 16] {
        &self.rounds
    }

    pub fn reversed(&self) -> DesSubkeys {
        let mut rounds = self.rounds;
        rounds.reverse();
        DesSubkeys { rounds }
    }
}

/// Left and right 32-bit halves of the Feistel state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesRoundState {
    pub left: u32,
    pub right: u32,
}

impl DesRoundState {
    /// One Feistel round: L <- R, R <- L xor f(R, K).
    #[inline]
    pub fn round(self, subkey: u64) -> Self {
        DesRoundState {
            left: self.right,
            right: self.left ^ f(self.right, subkey),
        }
    }
}

struct Engine {
    ip: CompiledPermutation,
    ip_inv: CompiledPermutation,
    e: CompiledPermutation,
    pc1: CompiledPermutation,
    pc2: CompiledPermutation,
    /// S-box i output for each 6-bit input, already routed through P.
    sp: [[u32; 64]; 8],
}

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| {
        let mut sp = [[0u32; 64]; 8];
        for (i, sbox) in tables::SBOXES.iter().enumerate() {
            for (x, slot) in sp[i].iter_mut().enumerate() {
                let s = sbox_lookup(sbox, x as u8) as u128;
                let placed = BitVector::new(32, s << (28 - 4 * i)).expect("32-bit");
                *slot = bitops::permute(placed, &tables::P).expect("P").bits() as u32;
            }
        }
        Engine {
            ip: CompiledPermutation::new(&tables::IP),
            ip_inv: CompiledPermutation::new(&tables::IP_INV),
            e: CompiledPermutation::new(&tables::E),
            pc1: CompiledPermutation::new(&tables::PC1),
            pc2: CompiledPermutation::new(&tables::PC2),
            sp,
        }
    })
}

/// Row is selected by the outer bits (1 and 6), column by bits 2..5.
fn sbox_lookup(sbox: &[u8; 64], six: u8) -> u8 {
    let row = ((six >> 4) & 0b10) | (six & 1);
    let col = (six >> 1) & 0x0f;
    sbox[(row * 16 + col) as usize]
}

/// Derives the 16 round keys via PC-1, the rotation schedule and PC-2.
pub fn key_schedule(key: &DesKey) -> Result<DesSubkeys> {
    key.check_parity()?;
    Ok(key_schedule_unchecked(key))
}

fn key_schedule_unchecked(key: &DesKey) -> DesSubkeys {
    let eng = engine();
    let cd = eng.pc1.apply(u64::from_be_bytes(key.octets));
    let mut c = (cd >> 28) as u32;
    let mut d = (cd & 0x0fff_ffff) as u32;
    let mut rounds = [0u64; 16];
    for (slot, &shift) in rounds.iter_mut().zip(tables::SHIFTS.iter()) {
        c = bitops::rotl_unchecked(c, 28, shift);
        d = bitops::rotl_unchecked(d, 28, shift);
        *slot = eng.pc2.apply((c as u64) << 28 | d as u64);
    }
    DesSubkeys { rounds }
}

/// The round function: E-expansion, subkey XOR, S-boxes, P.
#[inline]
pub fn f(right: u32, subkey: u64) -> u32 {
    let eng = engine();
    let x = eng.e.apply(right as u64) ^ subkey;
    let mut out = 0;
    for (i, sp) in eng.sp.iter().enumerate() {
        out |= sp[((x >> (42 - 6 * i)) & 0x3f) as usize];
    }
    out
}

/// Applies IP, sixteen rounds with the given subkey order, the final swap and IP^-1.
#[inline]
pub fn crypt_u64(block: u64, subkeys: &[u64; 16]) -> u64 {
    let eng = engine();
    let permuted = eng.ip.apply(block);
    let mut state = DesRoundState {
        left: (permuted >> 32) as u32,
        right: permuted as u32,
    };
    for &k in subkeys {
        state = state.round(k);
    }
    eng.ip_inv
        .apply((state.right as u64) << 32 | state.left as u64)
}

/// A DES key with its expanded schedule.
#[derive(Debug, Clone, Copy)]
pub struct Des {
    encrypt: DesSubkeys,
    decrypt: DesSubkeys,
}

impl Des {
    pub fn new(key: &DesKey) -> Result<Self> {
        let encrypt = key_schedule(key)?;
        Ok(Des {
            decrypt: encrypt.reversed(),
            encrypt,
        })
    }

    pub fn subkeys(&self) -> &DesSubkeys {
        &self.encrypt
    }

    #[inline]
    pub fn encrypt_u64(&self, block: u64) -> u64 {
        crypt_u64(block, &self.encrypt.rounds)
    }

    #[inline]
    pub fn decrypt_u64(&self, block: u64) -> u64 {
        crypt_u64(block, &self.decrypt.rounds)
    }
}

impl BlockCipher for Des {
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

pub fn encrypt_block(key: &DesKey, block: [u8; 8]) -> Result<[u8; 8]> {
    Ok(Des::new(key)?.encrypt_u64(u64::from_be_bytes(block)).to_be_bytes())
}

pub fn decrypt_block(key: &DesKey, block: [u8; 8]) -> Result<[u8; 8]> {
    Ok(Des::new(key)?.decrypt_u64(u64::from_be_bytes(block)).to_be_bytes())
}
