//! AES (Rijndael with a 128-bit block) for 128, 192 and 256-bit keys.

pub mod gf;

use std::sync::OnceLock;

pub use gf::{gf_add, gf_mul, Gf256};

use crate::{BlockCipher, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AesVariant {
    Aes128,
    Aes192,
    Aes256,
}

impl AesVariant {
    pub fn key_octets(self) -> usize {
        match self {
            AesVariant::Aes128 => 16,
            AesVariant::Aes192 => 24,
            AesVariant::Aes256 => 32,
        }
    }

    /// Number of rounds (Nr).
    pub fn rounds(self) -> usize {
        match self {
            AesVariant::Aes128 => 10,
            AesVariant::Aes192 => 12,
            AesVariant::Aes256 => 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AesKey {
    octets: Vec<u8>,
    variant: AesVariant,
}

impl AesKey {
    pub fn new(octets: &[u8]) -> Result<Self> {
        let variant = match octets.len() {
            16 => AesVariant::Aes128,
            24 => AesVariant::Aes192,
            32 => AesVariant::Aes256,
            n => {
                return Err(Error::KeyLength {
                    algorithm: "aes",
                    expected: "16, 24 or 32".into(),
                    actual: n,
                })
            }
        };
        Ok(AesKey {
            octets: octets.to_vec(),
            variant,
        })
    }

    pub fn variant(&self) -> AesVariant {
        self.variant
    }

    pub fn octets(&self) -> &[u8] {
        &self.octets
    }
}

struct SBoxes {
    forward: [u8; 256],
    inverse: [u8; 256],
}

/// Inversion in GF(2^8) followed by the affine map
/// b' = b ^ rotl(b,1) ^ rotl(b,2) ^ rotl(b,3) ^ rotl(b,4) ^ 0x63.
fn sboxes() -> &'static SBoxes {
    static TABLES: OnceLock<SBoxes> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut forward = [0u8; 256];
        let mut inverse = [0u8; 256];
        for x in 0..=255u8 {
            let b = Gf256(x).inverse().0;
            let s = b
                ^ b.rotate_left(1)
                ^ b.rotate_left(2)
                ^ b.rotate_left(3)
                ^ b.rotate_left(4)
                ^ 0x63;
            forward[x as usize] = s;
            inverse[s as usize] = x;
        }
        SBoxes { forward, inverse }
    })
}

pub fn sbox(b: u8) -> u8 {
    sboxes().forward[b as usize]
}

pub fn inv_sbox(b: u8) -> u8 {
    sboxes().inverse[b as usize]
}

/// The 4x4 state, stored column-major: `cells[r + 4c]` is row r, column c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AesState {
    cells: [u8; 16],
}

impl AesState {
    pub fn load(block: &[u8; 16]) -> Self {
        AesState { cells: *block }
    }

    pub fn store(&self) -> [u8; 16] {
        self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row + 4 * col]
    }

    fn add_round_key(&mut self, key: &[u8; 16]) {
        for (c, k) in self.cells.iter_mut().zip(key) {
            *c ^= k;
        }
    }

    fn sub_bytes(&mut self) {
        let s = &sboxes().forward;
        for c in &mut self.cells {
            *c = s[*c as usize];
        }
    }

    fn inv_sub_bytes(&mut self) {
        let s = &sboxes().inverse;
        for c in &mut self.cells {
            *c = s[*c as usize];
        }
    }

    /// Row r rotates left by r positions.
    fn shift_rows(&mut self) {
        let old = self.cells;
        for r in 1..4 {
            for c in 0..4 {
                self.cells[r + 4 * c] = old[r + 4 * ((c + r) % 4)];
            }
        }
    }

    fn inv_shift_rows(&mut self) {
        let old = self.cells;
        for r in 1..4 {
            for c in 0..4 {
                self.cells[r + 4 * ((c + r) % 4)] = old[r + 4 * c];
            }
        }
    }

    fn mix_columns(&mut self) {
        for col in self.cells.chunks_exact_mut(4) {
            let c: [u8; 4] = col.try_into().unwrap();
            col.copy_from_slice(&mix_column(c));
        }
    }

    fn inv_mix_columns(&mut self) {
        for col in self.cells.chunks_exact_mut(4) {
            let c: [u8; 4] = col.try_into().unwrap();
            col.copy_from_slice(&inv_mix_column(c));
        }
    }
}

/// Multiplies a column by {03}x^3 + {01}x^2 + {01}x + {02}.
pub fn mix_column(c: [u8; 4]) -> [u8; 4] {
    let [a0, a1, a2, a3] = c.map(Gf256);
    let x2 = |a: Gf256| a.xtime();
    let x3 = |a: Gf256| a.xtime() + a;
    [
        (x2(a0) + x3(a1) + a2 + a3).0,
        (a0 + x2(a1) + x3(a2) + a3).0,
        (a0 + a1 + x2(a2) + x3(a3)).0,
        (x3(a0) + a1 + a2 + x2(a3)).0,
    ]
}

/// Multiplies a column by {0b}x^3 + {0d}x^2 + {09}x + {0e}.
pub fn inv_mix_column(c: [u8; 4]) -> [u8; 4] {
    let a = c.map(Gf256);
    let m = |k: u8, x: Gf256| Gf256(k) * x;
    let row = |i: usize| {
        (m(0x0e, a[i]) + m(0x0b, a[(i + 1) % 4]) + m(0x0d, a[(i + 2) % 4]) + m(0x09, a[(i + 3) % 4]))
            .0
    };
    [row(0), row(1), row(2), row(3)]
}

fn sub_word(w: [u8; 4]) -> [u8; 4] {
    w.map(sbox)
}

/// Expands the cipher key into Nr + 1 round keys.
pub fn key_expansion(key: &AesKey) -> Vec<[u8; 16]> {
    let nk = key.octets.len() / 4;
    let nr = key.variant.rounds();
    let total = 4 * (nr + 1);
    let mut words: Vec<[u8; 4]> = key
        .octets
        .chunks_exact(4)
        .map(|c| c.try_into().unwrap())
        .collect();
    let mut rcon = Gf256::ONE;
    for i in nk..total {
        let mut temp = words[i - 1];
        if i % nk == 0 {
            temp.rotate_left(1);
            temp = sub_word(temp);
            temp[0] ^= rcon.0;
            rcon = rcon.xtime();
        } else if nk > 6 && i % nk == 4 {
            temp = sub_word(temp);
        }
        let prev = words[i - nk];
        words.push([
            prev[0] ^ temp[0],
            prev[1] ^ temp[1],
            prev[2] ^ temp[2],
            prev[3] ^ temp[3],
        ]);
    }
    words
        .chunks_exact(4)
        .map(|w| {
            let mut rk = [0u8; 16];
            for (dst, word) in rk.chunks_exact_mut(4).zip(w) {
                dst.copy_from_slice(word);
            }
            rk
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Aes {
    variant: AesVariant,
    round_keys: Vec<[u8; 16]>,
}

impl Aes {
    pub fn new(key: &AesKey) -> Self {
        Aes {
            variant: key.variant,
            round_keys: key_expansion(key),
        }
    }

    pub fn variant(&self) -> AesVariant {
        self.variant
    }

    pub fn round_keys(&self) -> &[[u8; 16]] {
        &self.round_keys
    }

    pub fn encrypt(&self, block: &[u8; 16]) -> [u8; 16] {
        let nr = self.round_keys.len() - 1;
        let mut state = AesState::load(block);
        state.add_round_key(&self.round_keys[0]);
        for rk in &self.round_keys[1..nr] {
            state.sub_bytes();
            state.shift_rows();
            state.mix_columns();
            state.add_round_key(rk);
        }
        state.sub_bytes();
        state.shift_rows();
        state.add_round_key(&self.round_keys[nr]);
        state.store()
    }

    pub fn decrypt(&self, block: &[u8; 16]) -> [u8; 16] {
        let nr = self.round_keys.len() - 1;
        let mut state = AesState::load(block);
        state.add_round_key(&self.round_keys[nr]);
        state.inv_shift_rows();
        state.inv_sub_bytes();
        for rk in self.round_keys[1..nr].iter().rev() {
            state.add_round_key(rk);
            state.inv_mix_columns();
            state.inv_shift_rows();
            state.inv_sub_bytes();
        }
        state.add_round_key(&self.round_keys[0]);
        state.store()
    }
}

impl BlockCipher for Aes {
    fn block_octets(&self) -> usize {
        16
    }

    fn encrypt_block(&self, block: &mut [u8]) {
        let out = self.encrypt(block[..16].try_into().unwrap());
        block[..16].copy_from_slice(&out);
    }

    fn decrypt_block(&self, block: &mut [u8]) {
        let out = self.decrypt(block[..16].try_into().unwrap());
        block[..16].copy_from_slice(&out);
    }
}

pub fn encrypt_block(key: &AesKey, block: [u8; 16]) -> [u8; 16] {
    Aes::new(key).encrypt(&block)
}

pub fn decrypt_block(key: &AesKey, block: [u8; 16]) -> [u8; 16] {
    Aes::new(key).decrypt(&block)
}
