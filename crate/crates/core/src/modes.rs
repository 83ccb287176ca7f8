//! ECB, CBC and CTR over any of the block ciphers, with PKCS#7 padding for
//! the block-aligned modes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aes::{Aes, AesKey};
use crate::des::{Des, DesKey};
use crate::tdes::{Tdes, TdesKey};
use crate::{Algorithm, BlockCipher, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ecb,
    Cbc,
    Ctr,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Ecb, Mode::Cbc, Mode::Ctr];

    pub fn needs_iv(self) -> bool {
        !matches!(self, Mode::Ecb)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Ecb => "ecb",
            Mode::Cbc => "cbc",
            Mode::Ctr => "ctr",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ecb" => Ok(Mode::Ecb),
            "cbc" => Ok(Mode::Cbc),
            "ctr" => Ok(Mode::Ctr),
            _ => Err(Error::UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpec {
    pub mode: Mode,
    pub iv: Option<Vec<u8>>,
}

impl ModeSpec {
    pub fn ecb() -> Self {
        ModeSpec {
            mode: Mode::Ecb,
            iv: None,
        }
    }

    pub fn cbc(iv: &[u8]) -> Self {
        ModeSpec {
            mode: Mode::Cbc,
            iv: Some(iv.to_vec()),
        }
    }

    pub fn ctr(iv: &[u8]) -> Self {
        ModeSpec {
            mode: Mode::Ctr,
            iv: Some(iv.to_vec()),
        }
    }

    pub fn new(mode: Mode, iv: Option<Vec<u8>>) -> Self {
        ModeSpec { mode, iv }
    }

    fn checked_iv(&self, block: usize) -> Result<Option<&[u8]>> {
        match (self.mode.needs_iv(), self.iv.as_deref()) {
            (false, None) => Ok(None),
            (false, Some(_)) => Err(Error::Iv("ecb does not take an IV".into())),
            (true, None) => Err(Error::Iv(format!("{} requires an IV", self.mode))),
            (true, Some(iv)) if iv.len() != block => Err(Error::Iv(format!(
                "expected {block} octets, got {}",
                iv.len()
            ))),
            (true, Some(iv)) => Ok(Some(iv)),
        }
    }
}

/// Parsed key material for one of the supported ciphers.
#[derive(Debug, Clone)]
pub enum KeyMaterial {
    Des(DesKey),
    Tdes(TdesKey),
    Aes(AesKey),
}

impl KeyMaterial {
    pub fn parse(algorithm: Algorithm, key: &[u8]) -> Result<Self> {
        let aes = |expected: usize, name: &'static str| {
            if key.len() != expected {
                return Err(Error::KeyLength {
                    algorithm: name,
                    expected: expected.to_string(),
                    actual: key.len(),
                });
            }
            AesKey::new(key).map(KeyMaterial::Aes)
        };
        match algorithm {
            Algorithm::Des => DesKey::from_slice(key).map(KeyMaterial::Des),
            Algorithm::Tdes => TdesKey::from_slice(key).map(KeyMaterial::Tdes),
            Algorithm::Aes128 => aes(16, "aes128"),
            Algorithm::Aes192 => aes(24, "aes192"),
            Algorithm::Aes256 => aes(32, "aes256"),
        }
    }
}

#[derive(Debug, Clone)]
enum Cipher {
    Des(Des),
    Tdes(Tdes),
    Aes(Aes),
}

/// A keyed cipher ready for use under a mode.
#[derive(Debug, Clone)]
pub struct CipherSuite {
    algorithm: Algorithm,
    cipher: Cipher,
}

impl CipherSuite {
    pub fn new(algorithm: Algorithm, key: &[u8]) -> Result<Self> {
        let cipher = match KeyMaterial::parse(algorithm, key)? {
            KeyMaterial::Des(k) => Cipher::Des(Des::new(&k)?),
            KeyMaterial::Tdes(k) => Cipher::Tdes(Tdes::new(&k)?),
            KeyMaterial::Aes(k) => Cipher::Aes(Aes::new(&k)),
        };
        Ok(CipherSuite { algorithm, cipher })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn block_bits(&self) -> usize {
        self.block_octets() * 8
    }
}

impl BlockCipher for CipherSuite {
    fn block_octets(&self) -> usize {
        self.algorithm.block_octets()
    }

    #[inline]
    fn encrypt_block(&self, block: &mut [u8]) {
        match &self.cipher {
            Cipher::Des(c) => c.encrypt_block(block),
            Cipher::Tdes(c) => c.encrypt_block(block),
            Cipher::Aes(c) => c.encrypt_block(block),
        }
    }

    #[inline]
    fn decrypt_block(&self, block: &mut [u8]) {
        match &self.cipher {
            Cipher::Des(c) => c.decrypt_block(block),
            Cipher::Tdes(c) => c.decrypt_block(block),
            Cipher::Aes(c) => c.decrypt_block(block),
        }
    }
}

pub fn pad_pkcs7(message: &[u8], block_octets: usize) -> Vec<u8> {
    assert!((1..=255).contains(&block_octets), "block size out of range");
    let n = block_octets - message.len() % block_octets;
    let mut out = Vec::with_capacity(message.len() + n);
    out.extend_from_slice(message);
    out.resize(message.len() + n, n as u8);
    out
}

pub fn unpad_pkcs7(message: &[u8], block_octets: usize) -> Result<Vec<u8>> {
    if message.is_empty() || message.len() % block_octets != 0 {
        return Err(Error::Length(format!(
            "padded message of {} octets is not a positive multiple of {block_octets}",
            message.len()
        )));
    }
    let n = *message.last().unwrap() as usize;
    if n == 0 || n > block_octets {
        return Err(Error::Padding);
    }
    let (body, pad) = message.split_at(message.len() - n);
    if pad.iter().any(|&b| b as usize != n) {
        return Err(Error::Padding);
    }
    Ok(body.to_vec())
}

/// Big-endian increment over the whole block, wrapping at 2^(8 * len).
fn increment(counter: &mut [u8]) {
    for b in counter.iter_mut().rev() {
        let (v, carry) = b.overflowing_add(1);
        *b = v;
        if !carry {
            break;
        }
    }
}

/// The counter block for block index `index`: IV + index, big-endian.
pub fn counter_block(iv: &[u8], index: u64) -> Vec<u8> {
    let mut out = iv.to_vec();
    let mut carry = index as u128;
    for b in out.iter_mut().rev() {
        if carry == 0 {
            break;
        }
        let sum = *b as u128 + (carry & 0xff);
        *b = sum as u8;
        carry = (carry >> 8) + (sum >> 8);
    }
    out
}

fn check_aligned(len: usize, block: usize) -> Result<()> {
    if len % block != 0 {
        return Err(Error::Length(format!(
            "{len} octets is not a multiple of the {block}-octet block"
        )));
    }
    Ok(())
}

fn ctr_apply(suite: &CipherSuite, iv: &[u8], data: &mut [u8]) {
    let bs = suite.block_octets();
    let mut counter = iv.to_vec();
    let mut keystream = vec![0u8; bs];
    for chunk in data.chunks_mut(bs) {
        keystream.copy_from_slice(&counter);
        suite.encrypt_block(&mut keystream);
        for (d, k) in chunk.iter_mut().zip(&keystream) {
            *d ^= k;
        }
        increment(&mut counter);
    }
}

/// Encrypts in place without padding. ECB and CBC need block-aligned input.
pub fn encrypt_in_place(suite: &CipherSuite, spec: &ModeSpec, data: &mut [u8]) -> Result<()> {
    let bs = suite.block_octets();
    let iv = spec.checked_iv(bs)?;
    match spec.mode {
        Mode::Ecb => {
            check_aligned(data.len(), bs)?;
            for block in data.chunks_exact_mut(bs) {
                suite.encrypt_block(block);
            }
        }
        Mode::Cbc => {
            check_aligned(data.len(), bs)?;
            let mut prev = iv.unwrap().to_vec();
            for block in data.chunks_exact_mut(bs) {
                for (b, p) in block.iter_mut().zip(&prev) {
                    *b ^= p;
                }
                suite.encrypt_block(block);
                prev.copy_from_slice(block);
            }
        }
        Mode::Ctr => ctr_apply(suite, iv.unwrap(), data),
    }
    Ok(())
}

pub fn decrypt_in_place(suite: &CipherSuite, spec: &ModeSpec, data: &mut [u8]) -> Result<()> {
    let bs = suite.block_octets();
    let iv = spec.checked_iv(bs)?;
    match spec.mode {
        Mode::Ecb => {
            check_aligned(data.len(), bs)?;
            for block in data.chunks_exact_mut(bs) {
                suite.decrypt_block(block);
            }
        }
        Mode::Cbc => {
            check_aligned(data.len(), bs)?;
            let mut prev = iv.unwrap().to_vec();
            let mut saved = vec![0u8; bs];
            for block in data.chunks_exact_mut(bs) {
                saved.copy_from_slice(block);
                suite.decrypt_block(block);
                for (b, p) in block.iter_mut().zip(&prev) {
                    *b ^= p;
                }
                std::mem::swap(&mut prev, &mut saved);
            }
        }
        Mode::Ctr => ctr_apply(suite, iv.unwrap(), data),
    }
    Ok(())
}

/// Unpadded encryption returning a new buffer.
pub fn encrypt_raw(suite: &CipherSuite, spec: &ModeSpec, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = data.to_vec();
    encrypt_in_place(suite, spec, &mut out)?;
    Ok(out)
}

pub fn decrypt_raw(suite: &CipherSuite, spec: &ModeSpec, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = data.to_vec();
    decrypt_in_place(suite, spec, &mut out)?;
    Ok(out)
}

/// Encrypts a message; ECB and CBC apply PKCS#7 padding, CTR does not.
pub fn mode_encrypt(suite: &CipherSuite, spec: &ModeSpec, plaintext: &[u8]) -> Result<Vec<u8>> {
    let mut buf = match spec.mode {
        Mode::Ecb | Mode::Cbc => pad_pkcs7(plaintext, suite.block_octets()),
        Mode::Ctr => plaintext.to_vec(),
    };
    encrypt_in_place(suite, spec, &mut buf)?;
    Ok(buf)
}

pub fn mode_decrypt(suite: &CipherSuite, spec: &ModeSpec, ciphertext: &[u8]) -> Result<Vec<u8>> {
    let bs = suite.block_octets();
    if spec.mode != Mode::Ctr && (ciphertext.is_empty() || ciphertext.len() % bs != 0) {
        return Err(Error::Length(format!(
            "{} ciphertext of {} octets is not a positive multiple of {bs}",
            spec.mode,
            ciphertext.len()
        )));
    }
    let mut buf = ciphertext.to_vec();
    decrypt_in_place(suite, spec, &mut buf)?;
    match spec.mode {
        Mode::Ecb | Mode::Cbc => unpad_pkcs7(&buf, bs),
        Mode::Ctr => Ok(buf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitops::hex_decode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_suite(rng: &mut ChaCha8Rng, algorithm: Algorithm) -> CipherSuite {
        let len = *algorithm.key_lengths().last().unwrap();
        let key: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        CipherSuite::new(algorithm, &key).unwrap()
    }

    fn random_iv(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.gen()).collect()
    }

    #[test]
    fn padding_examples() {
        assert_eq!(pad_pkcs7(&[], 8), vec![8u8; 8]);
        let seven = [1u8, 2, 3, 4, 5, 6, 7];
        let mut expect = seven.to_vec();
        expect.push(1);
        assert_eq!(pad_pkcs7(&seven, 8), expect);
        assert!(unpad_pkcs7(&[8u8; 8], 8).unwrap().is_empty());
        assert_eq!(unpad_pkcs7(&[9, 9, 9, 9, 9, 3, 3, 3], 8).unwrap(), vec![9; 5]);
        assert_eq!(unpad_pkcs7(&[1, 1, 1, 1, 1, 1, 1, 0], 8), Err(Error::Padding));
        assert_eq!(unpad_pkcs7(&[1, 1, 1, 1, 1, 2, 1, 3], 8), Err(Error::Padding));
        assert_eq!(unpad_pkcs7(&[9; 8], 8), Err(Error::Padding));
    }

    #[test]
    fn padding_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..1000 {
            let len = rng.gen_range(0..=1024);
            let m: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let bs = if rng.gen() { 8 } else { 16 };
            let padded = pad_pkcs7(&m, bs);
            assert!(!padded.is_empty() && padded.len() % bs == 0);
            assert_eq!(unpad_pkcs7(&padded, bs).unwrap(), m);
        }
    }

    #[test]
    fn single_block_ecb_is_block_encryption() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for alg in Algorithm::ALL {
            let suite = random_suite(&mut rng, alg);
            let block = random_iv(&mut rng, alg.block_octets());
            let mut expect = block.clone();
            suite.encrypt_block(&mut expect);
            assert_eq!(encrypt_raw(&suite, &ModeSpec::ecb(), &block).unwrap(), expect);
        }
    }

    #[test]
    fn cbc_zero_iv_first_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let suite = random_suite(&mut rng, Algorithm::Aes128);
        let m = random_iv(&mut rng, 48);
        let c = mode_encrypt(&suite, &ModeSpec::cbc(&[0; 16]), &m).unwrap();
        let mut first = m[..16].to_vec();
        suite.encrypt_block(&mut first);
        assert_eq!(&c[..16], &first[..]);
    }

    #[test]
    fn ctr_is_self_inverse_and_length_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let suite = random_suite(&mut rng, Algorithm::Aes128);
        let spec = ModeSpec::ctr(&random_iv(&mut rng, 16));
        for len in [0, 1, 15, 16, 17] {
            let m = random_iv(&mut rng, len);
            let c = mode_encrypt(&suite, &spec, &m).unwrap();
            assert_eq!(c.len(), len);
            assert_eq!(mode_encrypt(&suite, &spec, &c).unwrap(), m);
        }
    }

    #[test]
    fn ctr_blocks_are_position_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let suite = random_suite(&mut rng, Algorithm::Des);
        let mut iv = random_iv(&mut rng, 8);
        iv[7] = 0xfe;
        iv[6] = 0xff;
        let m = random_iv(&mut rng, 64);
        let c = mode_encrypt(&suite, &ModeSpec::ctr(&iv), &m).unwrap();
        // Evaluate blocks out of order from the counter formula.
        for i in (0..8).rev() {
            let mut ks = counter_block(&iv, i as u64);
            suite.encrypt_block(&mut ks);
            for j in 0..8 {
                assert_eq!(c[8 * i + j], m[8 * i + j] ^ ks[j]);
            }
        }
    }

    #[test]
    fn counter_wraps_at_block_width() {
        let mut c = vec![0xff; 4];
        increment(&mut c);
        assert_eq!(c, vec![0; 4]);
        assert_eq!(counter_block(&[0, 0, 0xff, 0xff], 1), vec![0, 1, 0, 0]);
    }

    #[test]
    fn round_trip_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for alg in Algorithm::ALL {
            for mode in Mode::ALL {
                for _ in 0..20 {
                    let suite = random_suite(&mut rng, alg);
                    let iv = mode.needs_iv().then(|| random_iv(&mut rng, alg.block_octets()));
                    let spec = ModeSpec::new(mode, iv);
                    let len = rng.gen_range(0..=1024);
                    let m = random_iv(&mut rng, len);
                    let c = mode_encrypt(&suite, &spec, &m).unwrap();
                    assert_eq!(mode_decrypt(&suite, &spec, &c).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn cbc_corruption_is_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let suite = random_suite(&mut rng, Algorithm::Aes128);
        let spec = ModeSpec::cbc(&random_iv(&mut rng, 16));
        let m = random_iv(&mut rng, 16 * 6);
        let c = encrypt_raw(&suite, &spec, &m).unwrap();
        for i in 0..6 {
            let mut bad = c.clone();
            bad[16 * i + 3] ^= 0x40;
            let p = decrypt_raw(&suite, &spec, &bad).unwrap();
            for blk in 0..6 {
                let same = p[16 * blk..16 * blk + 16] == m[16 * blk..16 * blk + 16];
                assert_eq!(same, blk != i && blk != i + 1, "block {blk} after corrupting {i}");
            }
        }
    }

    #[test]
    fn ecb_leaks_repeats_cbc_does_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let suite = random_suite(&mut rng, Algorithm::Aes128);
        let block = random_iv(&mut rng, 16);
        let m = [block.clone(), block].concat();
        let e = encrypt_raw(&suite, &ModeSpec::ecb(), &m).unwrap();
        assert_eq!(e[..16], e[16..]);
        let c = encrypt_raw(&suite, &ModeSpec::cbc(&random_iv(&mut rng, 16)), &m).unwrap();
        assert_ne!(c[..16], c[16..]);
    }

    #[test]
    fn iv_rules() {
        let suite = CipherSuite::new(Algorithm::Des, &[1; 8]).unwrap();
        assert!(matches!(
            mode_encrypt(&suite, &ModeSpec::new(Mode::Cbc, None), b"x"),
            Err(Error::Iv(_))
        ));
        assert!(matches!(
            mode_encrypt(&suite, &ModeSpec::cbc(&[0; 16]), b"x"),
            Err(Error::Iv(_))
        ));
        assert!(matches!(
            mode_encrypt(&suite, &ModeSpec::new(Mode::Ecb, Some(vec![0; 8])), b"x"),
            Err(Error::Iv(_))
        ));
        assert!(matches!(
            mode_decrypt(&suite, &ModeSpec::ecb(), &[0; 7]),
            Err(Error::Length(_))
        ));
    }

    #[test]
    fn sp800_38a_cbc_aes128() {
        let suite = CipherSuite::new(
            Algorithm::Aes128,
            &hex_decode("2b7e151628aed2a6abf7158809cf4f3c").unwrap(),
        )
        .unwrap();
        let spec = ModeSpec::cbc(&hex_decode("000102030405060708090a0b0c0d0e0f").unwrap());
        let pt = hex_decode("6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51").unwrap();
        let ct = encrypt_raw(&suite, &spec, &pt).unwrap();
        assert_eq!(
            crate::bitops::hex_encode(&ct),
            "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2"
        );
    }
}
