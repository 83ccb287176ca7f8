//! Block-cipher workbench: from-scratch DES, Triple-DES and AES cores,
//! ECB/CBC/CTR modes, a key-space comparison engine with exact arithmetic,
//! a known-answer-test harness, a throughput benchmark and a restricted
//! keyspace DES brute-force search.

pub mod aes;
pub mod bench;
pub mod bitops;
pub mod cracker;
pub mod des;
mod error;
pub mod factors;
pub mod kat;
pub mod modes;
pub mod report;
pub mod tdes;

pub use error::{Error, Result};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Cipher variants known to the workbench.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Des,
    Tdes,
    Aes128,
    Aes192,
    Aes256,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Des,
        Algorithm::Tdes,
        Algorithm::Aes128,
        Algorithm::Aes192,
        Algorithm::Aes256,
    ];

    pub fn block_octets(self) -> usize {
        match self {
            Algorithm::Des | Algorithm::Tdes => 8,
            _ => 16,
        }
    }

    pub fn block_bits(self) -> usize {
        self.block_octets() * 8
    }

    /// Accepted raw key lengths in octets.
    pub fn key_lengths(self) -> &'static [usize] {
        match self {
            Algorithm::Des => &[8],
            Algorithm::Tdes => &[8, 16, 24],
            Algorithm::Aes128 => &[16],
            Algorithm::Aes192 => &[24],
            Algorithm::Aes256 => &[32],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Des => "des",
            Algorithm::Tdes => "tdes",
            Algorithm::Aes128 => "aes128",
            Algorithm::Aes192 => "aes192",
            Algorithm::Aes256 => "aes256",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "des" => Ok(Algorithm::Des),
            "tdes" | "3des" | "des3" | "des-ede3" => Ok(Algorithm::Tdes),
            "aes128" | "aes-128" => Ok(Algorithm::Aes128),
            "aes192" | "aes-192" => Ok(Algorithm::Aes192),
            "aes256" | "aes-256" => Ok(Algorithm::Aes256),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// A keyed block cipher operating in place on exactly one block.
pub trait BlockCipher {
    fn block_octets(&self) -> usize;
    fn encrypt_block(&self, block: &mut [u8]);
    fn decrypt_block(&self, block: &mut [u8]);
}
