//! Nine-factor comparison of DES, 3DES and AES.
//!
//! Key-space sizes, printable-key counts and exhaustive-search times are
//! computed exactly with big integers and rationals. Every factor also
//! carries the published comparison table's wording, and cells where the
//! published figure disagrees with the computed one are flagged.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::report::{self, ReportFormat};
use crate::{Error, Result};

pub const SECONDS_PER_MINUTE: u64 = 60;
pub const SECONDS_PER_HOUR: u64 = 3_600;
pub const SECONDS_PER_DAY: u64 = 86_400;
/// Julian year.
pub const SECONDS_PER_YEAR: u64 = 31_557_600;

/// 50 billion keys per second.
pub const DEFAULT_RATE: u64 = 50_000_000_000;

/// Printable ASCII characters, 0x20..=0x7e.
pub const PRINTABLE_ASCII: u32 = 95;

/// The published comparison table, tab separated, columns AES, 3DES, DES.
pub const PUBLISHED_TABLE: &str = "\
Factors\tAES\t3DES\tDES
Key Length\t128, 192, or 256 bits\t(k1, k2 and k3) 168 bits (k1 and k2 is same) 112 bits\t56 bits
Cipher Type\tSymmetric block cipher\tSymmetric block cipher\tSymmetric block cipher
Block Size\t128, 192, or 256 bits\t64 bits\t64 bits
Developed\t2000\t1978\t1977
Cryptanalysis resistance\tStrong against differential, truncated differential, linear, interpolation and square attacks\tVulnerable to differential, Brute Force attacker could be analyze plaint text using differential cryptanalysis.\tVulnerable to differential and linear cryptanalysis; weak substitution tables
Security\tConsidered secure\tone only weak which is Exit in DES.\tProven inadequate
Possible Keys\t2^{128} , 2^{192} , or 2^{256}\t2^{112} or 2^{168}\t2^{56}
Possible ASCII printable character keys\t95^{16} , 95^{24} , or 95^{32}\t95^{14} or 95^{21}\t95^7
Time required to check all possible keys at 50 billion keys per second**\tFor a 128-bit key: 5×10^{21} years\tFor a 112-bit key: 800 Days\tFor a 56-bit key: 400 Days";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CipherFamily {
    Des,
    Tdes,
    Aes,
}

impl CipherFamily {
    pub const ALL: [CipherFamily; 3] = [CipherFamily::Des, CipherFamily::Tdes, CipherFamily::Aes];

    pub fn name(self) -> &'static str {
        match self {
            CipherFamily::Des => "des",
            CipherFamily::Tdes => "tdes",
            CipherFamily::Aes => "aes",
        }
    }

    /// Column heading used in the published table.
    pub fn heading(self) -> &'static str {
        match self {
            CipherFamily::Des => "DES",
            CipherFamily::Tdes => "3DES",
            CipherFamily::Aes => "AES",
        }
    }
}

impl fmt::Display for CipherFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CipherFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "des" => Ok(CipherFamily::Des),
            "tdes" | "3des" => Ok(CipherFamily::Tdes),
            "aes" => Ok(CipherFamily::Aes),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// The nine rows, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    KeyLength,
    CipherType,
    BlockSize,
    Developed,
    CryptanalysisResistance,
    Security,
    PossibleKeys,
    PrintableAsciiKeys,
    BruteForceTime,
}

impl Factor {
    pub const ALL: [Factor; 9] = [
        Factor::KeyLength,
        Factor::CipherType,
        Factor::BlockSize,
        Factor::Developed,
        Factor::CryptanalysisResistance,
        Factor::Security,
        Factor::PossibleKeys,
        Factor::PrintableAsciiKeys,
        Factor::BruteForceTime,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Factor::KeyLength => "key_length",
            Factor::CipherType => "cipher_type",
            Factor::BlockSize => "block_size",
            Factor::Developed => "developed",
            Factor::CryptanalysisResistance => "cryptanalysis_resistance",
            Factor::Security => "security",
            Factor::PossibleKeys => "possible_keys",
            Factor::PrintableAsciiKeys => "printable_ascii_keys",
            Factor::BruteForceTime => "brute_force_time",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Factor::KeyLength => "Key Length",
            Factor::CipherType => "Cipher Type",
            Factor::BlockSize => "Block Size",
            Factor::Developed => "Developed",
            Factor::CryptanalysisResistance => "Cryptanalysis resistance",
            Factor::Security => "Security",
            Factor::PossibleKeys => "Possible Keys",
            Factor::PrintableAsciiKeys => "Possible ASCII printable character keys",
            Factor::BruteForceTime => "Time required to check all possible keys",
        }
    }
}

/// Size of a key space of `bits` bits: exactly 2^bits.
pub fn possible_keys(bits: u32) -> BigUint {
    BigUint::one() << bits as usize
}

/// Keys typed as `bits / 8` printable ASCII characters: exactly 95^(bits/8).
pub fn printable_ascii_keys(bits: u32) -> Result<BigUint> {
    if bits == 0 || bits % 8 != 0 {
        return Err(Error::UndefinedFactor(format!(
            "printable-character keys need a positive multiple of 8 bits, got {bits}"
        )));
    }
    Ok(Pow::pow(BigUint::from(PRINTABLE_ASCII), bits / 8))
}

/// Exhaustive-search cost for a key space at a fixed rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceEstimate {
    pub bits: u32,
    pub key_count: BigUint,
    pub rate_keys_per_second: u64,
    /// Portion of the key space searched, in (0, 1].
    pub fraction: BigRational,
    /// `key_count * fraction / rate`, exactly.
    pub seconds: BigRational,
    pub human: String,
}

impl BruteForceEstimate {
    pub fn years(&self) -> BigRational {
        &self.seconds / BigRational::from_integer(SECONDS_PER_YEAR.into())
    }
}

pub fn brute_force_time(bits: u32, rate: u64, fraction: &BigRational) -> Result<BruteForceEstimate> {
    if rate == 0 {
        return Err(Error::InvalidArgument("rate must be at least 1 key/s".into()));
    }
    if !fraction.is_positive() || fraction > &BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "fraction {fraction} outside (0, 1]"
        )));
    }
    let key_count = possible_keys(bits);
    let seconds = BigRational::from_integer(BigInt::from(key_count.clone())) * fraction
        / BigRational::from_integer(BigInt::from(rate));
    Ok(BruteForceEstimate {
        bits,
        human: human_duration(&seconds),
        key_count,
        rate_keys_per_second: rate,
        fraction: fraction.clone(),
        seconds,
    })
}

/// Renders seconds in the largest unit whose value is at least 1, to three
/// significant figures.
pub fn human_duration(seconds: &BigRational) -> String {
    let units = [
        (SECONDS_PER_YEAR, "years"),
        (SECONDS_PER_DAY, "days"),
        (SECONDS_PER_HOUR, "hours"),
        (SECONDS_PER_MINUTE, "minutes"),
    ];
    for (size, name) in units {
        let value = seconds / BigRational::from_integer(size.into());
        if value >= BigRational::one() {
            return format!("{} {name}", sig3(&value));
        }
    }
    format!("{} seconds", sig3(seconds))
}

fn pow10(e: u32) -> BigInt {
    Pow::pow(BigInt::from(10u8), e)
}

/// Decimal exponent and three-digit mantissa (100..=999) of a positive
/// rational, rounded half up.
pub fn sig3_parts(x: &BigRational) -> (i64, u32) {
    assert!(x.is_positive(), "sig3 of non-positive value");
    let ten = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(pow10(e as u32))
        } else {
            BigRational::new(BigInt::one(), pow10((-e) as u32))
        }
    };
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    while &ten(e) > x {
        e -= 1;
    }
    while &ten(e + 1) <= x {
        e += 1;
    }
    let scaled = x * ten(2 - e);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut mantissa = (scaled + half).floor().to_integer().to_u32().expect("3 digits");
    if mantissa == 1000 {
        mantissa = 100;
        e += 1;
    }
    (e, mantissa)
}

/// Three significant figures: plain for 1 <= x < 1000, otherwise `d.dd×10^e`.
pub fn sig3(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let (e, m) = sig3_parts(x);
    let digits = m.to_string();
    match e {
        0 => format!("{}.{}", &digits[..1], &digits[1..]),
        1 => format!("{}.{}", &digits[..2], &digits[2..]),
        2 => digits,
        _ => format!("{}.{}×10^{e}", &digits[..1], &digits[1..]),
    }
}

/// Exact decimal when the denominator has only factors 2 and 5, else `n/d`.
pub fn exact_decimal(x: &BigRational) -> String {
    if x.denom().is_one() {
        return x.numer().to_string();
    }
    let mut d = x.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = 0u32;
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_multiple_of(&two) {
        d /= &two;
        twos += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    places += twos.max(fives);
    let scaled = (x * BigRational::from_integer(pow10(places))).to_integer();
    let neg = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    if s.len() <= places as usize {
        s = format!("{}{s}", "0".repeat(places as usize + 1 - s.len()));
    }
    let (int, frac) = s.split_at(s.len() - places as usize);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

fn approx_int(n: &BigUint) -> String {
    sig3(&BigRational::from_integer(BigInt::from(n.clone())))
}

/// What the published table asserts in a cell, read as a checkable value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PublishedClaim {
    Bits(Vec<u32>),
    Year(u32),
    PowersOfTwo(Vec<u32>),
    PowersOf95(Vec<u32>),
    Duration { bits: u32, seconds: BigRational },
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublishedCell {
    pub verbatim: &'static str,
    pub claim: PublishedClaim,
}

fn published_cells(family: CipherFamily) -> BTreeMap<Factor, PublishedCell> {
    use PublishedClaim::*;
    let cell = |verbatim, claim| PublishedCell { verbatim, claim };
    let secs = |n: u64, unit: u64| BigRational::from_integer(BigInt::from(n) * BigInt::from(unit));
    let cells = match family {
        CipherFamily::Aes => vec![
            (Factor::KeyLength, cell("128, 192, or 256 bits", Bits(vec![128, 192, 256]))),
            (Factor::CipherType, cell("Symmetric block cipher", Text)),
            (Factor::BlockSize, cell("128, 192, or 256 bits", Bits(vec![128, 192, 256]))),
            (Factor::Developed, cell("2000", Year(2000))),
            (
                Factor::CryptanalysisResistance,
                cell(
                    "Strong against differential, truncated differential, linear, interpolation and square attacks",
                    Text,
                ),
            ),
            (Factor::Security, cell("Considered secure", Text)),
            (
                Factor::PossibleKeys,
                cell("2^{128} , 2^{192} , or 2^{256}", PowersOfTwo(vec![128, 192, 256])),
            ),
            (
                Factor::PrintableAsciiKeys,
                cell("95^{16} , 95^{24} , or 95^{32}", PowersOf95(vec![16, 24, 32])),
            ),
            (
                Factor::BruteForceTime,
                cell(
                    "For a 128-bit key: 5×10^{21} years",
                    Duration {
                        bits: 128,
                        seconds: BigRational::from_integer(
                            BigInt::from(5) * pow10(21) * BigInt::from(SECONDS_PER_YEAR),
                        ),
                    },
                ),
            ),
        ],
        CipherFamily::Tdes => vec![
            (
                Factor::KeyLength,
                cell(
                    "(k1, k2 and k3) 168 bits (k1 and k2 is same) 112 bits",
                    Bits(vec![112, 168]),
                ),
            ),
            (Factor::CipherType, cell("Symmetric block cipher", Text)),
            (Factor::BlockSize, cell("64 bits", Bits(vec![64]))),
            (Factor::Developed, cell("1978", Year(1978))),
            (
                Factor::CryptanalysisResistance,
                cell(
                    "Vulnerable to differential, Brute Force attacker could be analyze plaint text using differential cryptanalysis.",
                    Text,
                ),
            ),
            (Factor::Security, cell("one only weak which is Exit in DES.", Text)),
            (
                Factor::PossibleKeys,
                cell("2^{112} or 2^{168}", PowersOfTwo(vec![112, 168])),
            ),
            (
                Factor::PrintableAsciiKeys,
                cell("95^{14} or 95^{21}", PowersOf95(vec![14, 21])),
            ),
            (
                Factor::BruteForceTime,
                cell(
                    "For a 112-bit key: 800 Days",
                    Duration {
                        bits: 112,
                        seconds: secs(800, SECONDS_PER_DAY),
                    },
                ),
            ),
        ],
        CipherFamily::Des => vec![
            (Factor::KeyLength, cell("56 bits", Bits(vec![56]))),
            (Factor::CipherType, cell("Symmetric block cipher", Text)),
            (Factor::BlockSize, cell("64 bits", Bits(vec![64]))),
            (Factor::Developed, cell("1977", Year(1977))),
            (
                Factor::CryptanalysisResistance,
                cell(
                    "Vulnerable to differential and linear cryptanalysis; weak substitution tables",
                    Text,
                ),
            ),
            (Factor::Security, cell("Proven inadequate", Text)),
            (Factor::PossibleKeys, cell("2^{56}", PowersOfTwo(vec![56]))),
            (Factor::PrintableAsciiKeys, cell("95^7", PowersOf95(vec![7]))),
            (
                Factor::BruteForceTime,
                cell(
                    "For a 56-bit key: 400 Days",
                    Duration {
                        bits: 56,
                        seconds: secs(400, SECONDS_PER_DAY),
                    },
                ),
            ),
        ],
    };
    cells.into_iter().collect()
}

/// All nine factors for one cipher family.
#[derive(Debug, Clone)]
pub struct FactorProfile {
    pub algorithm: CipherFamily,
    pub key_length_bits: Vec<u32>,
    pub cipher_type: String,
    pub block_size_bits: Vec<u32>,
    pub developed_year: u32,
    pub cryptanalysis_resistance: String,
    pub security_status: String,
    pub possible_keys: Vec<(u32, BigUint)>,
    pub printable_ascii_keys: Vec<(u32, BigUint)>,
    pub brute_force: Vec<BruteForceEstimate>,
    pub published: BTreeMap<Factor, PublishedCell>,
}

/// One rendered cell: computed value (when computable) beside the published wording.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorCell {
    pub factor: Factor,
    /// Short rendering for tables.
    pub display: String,
    /// Exact rendering; `None` for rows carried only as published text.
    pub computed: Option<String>,
    pub paper_reported: &'static str,
    pub discrepancy: bool,
}

pub fn factor_profile(algorithm: CipherFamily, rate: u64) -> Result<FactorProfile> {
    let (key_length_bits, block, year) = match algorithm {
        CipherFamily::Des => (vec![56], 64, 1977),
        CipherFamily::Tdes => (vec![112, 168], 64, 1978),
        CipherFamily::Aes => (vec![128, 192, 256], 128, 2000),
    };
    let published = published_cells(algorithm);
    let possible_keys = key_length_bits.iter().map(|&b| (b, possible_keys(b))).collect();
    let printable_ascii_keys = key_length_bits
        .iter()
        .map(|&b| Ok((b, printable_ascii_keys(b)?)))
        .collect::<Result<_>>()?;
    let brute_force = key_length_bits
        .iter()
        .map(|&b| brute_force_time(b, rate, &BigRational::one()))
        .collect::<Result<_>>()?;
    Ok(FactorProfile {
        algorithm,
        cipher_type: "Symmetric block cipher".into(),
        block_size_bits: vec![block],
        developed_year: year,
        cryptanalysis_resistance: published[&Factor::CryptanalysisResistance].verbatim.into(),
        security_status: published[&Factor::Security].verbatim.into(),
        key_length_bits,
        possible_keys,
        printable_ascii_keys,
        brute_force,
        published,
    })
}

/// Relative tolerance matching three-significant-figure rendering.
fn durations_agree(computed: &BigRational, claimed: &BigRational) -> bool {
    let diff = (computed - claimed).abs();
    diff * BigRational::from_integer(BigInt::from(200)) <= claimed.clone()
}

fn join_bits(bits: &[u32]) -> String {
    let list: Vec<String> = bits.iter().map(u32::to_string).collect();
    format!("{} bits", list.join(", "))
}

impl FactorProfile {
    pub fn estimate(&self, bits: u32) -> Option<&BruteForceEstimate> {
        self.brute_force.iter().find(|e| e.bits == bits)
    }

    fn discrepancy(&self, factor: Factor) -> bool {
        let sorted = |v: &[u32]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        match &self.published[&factor].claim {
            PublishedClaim::Text => false,
            PublishedClaim::Year(y) => *y != self.developed_year,
            PublishedClaim::Bits(b) => {
                let computed = match factor {
                    Factor::BlockSize => &self.block_size_bits,
                    _ => &self.key_length_bits,
                };
                sorted(b) != sorted(computed)
            }
            PublishedClaim::PowersOfTwo(exps) => {
                let mut claimed: Vec<BigUint> = exps.iter().map(|&e| possible_keys(e)).collect();
                let mut computed: Vec<BigUint> =
                    self.possible_keys.iter().map(|(_, n)| n.clone()).collect();
                claimed.sort();
                computed.sort();
                claimed != computed
            }
            PublishedClaim::PowersOf95(exps) => {
                let mut claimed: Vec<BigUint> = exps
                    .iter()
                    .map(|&e| Pow::pow(BigUint::from(PRINTABLE_ASCII), e))
                    .collect();
                let mut computed: Vec<BigUint> =
                    self.printable_ascii_keys.iter().map(|(_, n)| n.clone()).collect();
                claimed.sort();
                computed.sort();
                claimed != computed
            }
            PublishedClaim::Duration { bits, seconds } => match self.estimate(*bits) {
                Some(est) => !durations_agree(&est.seconds, seconds),
                None => true,
            },
        }
    }

    pub fn cell(&self, factor: Factor) -> FactorCell {
        let published = &self.published[&factor];
        let (display, computed) = match factor {
            Factor::KeyLength => {
                let s = join_bits(&self.key_length_bits);
                (s.clone(), Some(s))
            }
            Factor::CipherType => (self.cipher_type.clone(), Some(self.cipher_type.clone())),
            Factor::BlockSize => {
                let s = join_bits(&self.block_size_bits);
                (s.clone(), Some(s))
            }
            Factor::Developed => {
                let s = self.developed_year.to_string();
                (s.clone(), Some(s))
            }
            Factor::CryptanalysisResistance | Factor::Security => {
                (published.verbatim.to_string(), None)
            }
            Factor::PossibleKeys => {
                let display = self
                    .possible_keys
                    .iter()
                    .map(|(b, n)| format!("2^{b} ≈ {}", approx_int(n)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let exact = self
                    .possible_keys
                    .iter()
                    .map(|(b, n)| format!("2^{b} = {n}"))
                    .collect::<Vec<_>>()
                    .join("; ");
                (display, Some(exact))
            }
            Factor::PrintableAsciiKeys => {
                let display = self
                    .printable_ascii_keys
                    .iter()
                    .map(|(b, n)| format!("95^{} ≈ {}", b / 8, approx_int(n)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let exact = self
                    .printable_ascii_keys
                    .iter()
                    .map(|(b, n)| format!("95^{} = {n}", b / 8))
                    .collect::<Vec<_>>()
                    .join("; ");
                (display, Some(exact))
            }
            Factor::BruteForceTime => {
                let display = self
                    .brute_force
                    .iter()
                    .map(|e| format!("{}-bit key: {}", e.bits, e.human))
                    .collect::<Vec<_>>()
                    .join("; ");
                let exact = self
                    .brute_force
                    .iter()
                    .map(|e| format!("{}-bit key: {} s ({})", e.bits, exact_decimal(&e.seconds), e.human))
                    .collect::<Vec<_>>()
                    .join("; ");
                (display, Some(exact))
            }
        };
        FactorCell {
            factor,
            display,
            computed,
            paper_reported: published.verbatim,
            discrepancy: self.discrepancy(factor),
        }
    }

    pub fn cells(&self) -> Vec<FactorCell> {
        Factor::ALL.iter().map(|&f| self.cell(f)).collect()
    }
}

fn rate_label(rate: u64) -> String {
    format!(
        "{} at {} keys/s",
        Factor::BruteForceTime.label(),
        sig3(&BigRational::from_integer(rate.into()))
    )
}

/// Nine-row comparison of the given families at `rate` keys per second.
pub fn compare_report(algorithms: &[CipherFamily], rate: u64, format: ReportFormat) -> Result<String> {
    if algorithms.is_empty() {
        return Err(Error::InvalidArgument("no algorithms to compare".into()));
    }
    let profiles = algorithms
        .iter()
        .map(|&a| factor_profile(a, rate))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<Vec<FactorCell>> = profiles.iter().map(FactorProfile::cells).collect();
    match format {
        ReportFormat::Json => {
            let mut root = Map::new();
            for (profile, cells) in profiles.iter().zip(&grid) {
                let mut factors = Map::new();
                for c in cells {
                    factors.insert(
                        c.factor.key().into(),
                        json!({
                            "computed": c.computed,
                            "display": c.display,
                            "paper_reported": c.paper_reported,
                            "discrepancy": c.discrepancy,
                        }),
                    );
                }
                root.insert(profile.algorithm.name().into(), Value::Object(factors));
            }
            Ok(serde_json::to_string_pretty(&Value::Object(root)).expect("json") + "\n")
        }
        ReportFormat::Csv => {
            let mut rows = vec![std::iter::once("factor".to_string())
                .chain(profiles.iter().map(|p| p.algorithm.heading().to_string()))
                .collect::<Vec<_>>()];
            for (i, factor) in Factor::ALL.iter().enumerate() {
                let label = match factor {
                    Factor::BruteForceTime => rate_label(rate),
                    f => f.label().to_string(),
                };
                rows.push(
                    std::iter::once(label)
                        .chain(grid.iter().map(|cells| cells[i].display.clone()))
                        .collect(),
                );
            }
            Ok(report::to_csv(rows))
        }
        ReportFormat::Text => {
            let header: Vec<String> = std::iter::once("Factor".to_string())
                .chain(profiles.iter().map(|p| p.algorithm.heading().to_string()))
                .collect();
            let mut notes = Vec::new();
            let mut rows = Vec::new();
            for (i, factor) in Factor::ALL.iter().enumerate() {
                let label = match factor {
                    Factor::BruteForceTime => rate_label(rate),
                    f => f.label().to_string(),
                };
                let mut row = vec![label];
                for (profile, cells) in profiles.iter().zip(&grid) {
                    let c = &cells[i];
                    let mut text = c.display.clone();
                    if c.computed.is_none() {
                        text.push_str(" (as published)");
                    }
                    if c.discrepancy {
                        notes.push(format!(
                            "[{}] {} / {}: published \"{}\"; computed {}",
                            notes.len() + 1,
                            profile.algorithm.heading(),
                            factor.label(),
                            c.paper_reported,
                            c.display
                        ));
                        text.push_str(&format!(" [{}]", notes.len()));
                    }
                    row.push(text);
                }
                rows.push(row);
            }
            let mut out = format!(
                "Comparison of {} (exhaustive search at {} keys/s)\n\n",
                header[1..].join(", "),
                rate
            );
            out.push_str(&report::text_table(&header, &rows, 34));
            if !notes.is_empty() {
                out.push_str("\nDiscrepancies with the published table:\n");
                for n in notes {
                    out.push_str(&n);
                    out.push('\n');
                }
            }
            Ok(out)
        }
    }
}

/// Parses a keys-per-second rate such as `50000000000`, `5e10` or `2.5e9`.
///
/// The value must be an integer of at least 1.
pub fn parse_rate(text: &str) -> Result<u64> {
    let bad = || Error::InvalidArgument(format!("invalid rate `{text}`"));
    let t = text.trim().replace('_', "");
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m.to_string(), e.parse::<i32>().map_err(|_| bad())?),
        None => (t.clone(), 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((&mantissa, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let exp = exp - frac.len() as i32;
    let value = if exp >= 0 {
        Ratio::from_integer(digits * pow10(exp as u32))
    } else {
        Ratio::new(digits, pow10((-exp) as u32))
    };
    if !value.is_integer() || value < BigRational::one() {
        return Err(bad());
    }
    value.to_integer().to_u64().ok_or_else(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: u64, d: u64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn key_counts() {
        assert_eq!(possible_keys(56), BigUint::from(72_057_594_037_927_936u64));
        assert_eq!(possible_keys(0), BigUint::one());
        assert_eq!(possible_keys(112), BigUint::from(1u128 << 112));
        assert_eq!(possible_keys(40 + 16), possible_keys(40) * possible_keys(16));
        assert_eq!(printable_ascii_keys(8).unwrap(), BigUint::from(95u32));
        assert_eq!(
            printable_ascii_keys(56).unwrap(),
            BigUint::from(95u64.pow(7))
        );
        assert!(matches!(printable_ascii_keys(12), Err(Error::UndefinedFactor(_))));
        assert!(printable_ascii_keys(0).is_err());
    }

    #[test]
    fn des_at_published_rate() {
        let e = brute_force_time(56, DEFAULT_RATE, &BigRational::one()).unwrap();
        assert_eq!(exact_decimal(&e.seconds), "1441151.88075855872");
        assert_eq!(e.human, "16.7 days");
    }

    #[test]
    fn single_key_takes_one_over_rate() {
        let e = brute_force_time(0, 1000, &BigRational::one()).unwrap();
        assert_eq!(e.seconds, rat(1, 1000));
        assert_eq!(e.human, "1.00×10^-3 seconds");
        let e = brute_force_time(0, 1, &BigRational::one()).unwrap();
        assert_eq!(e.human, "1.00 seconds");
    }

    #[test]
    fn aes128_years() {
        let e = brute_force_time(128, DEFAULT_RATE, &BigRational::one()).unwrap();
        assert_eq!(e.human, "2.16×10^20 years");
    }

    #[test]
    fn fraction_halves_time() {
        let full = brute_force_time(40, 7, &BigRational::one()).unwrap();
        let half = brute_force_time(40, 7, &rat(1, 2)).unwrap();
        assert_eq!(half.seconds * BigRational::from_integer(2.into()), full.seconds);
        assert!(brute_force_time(40, 7, &rat(3, 2)).is_err());
        assert!(brute_force_time(40, 7, &BigRational::zero()).is_err());
        assert!(brute_force_time(40, 0, &BigRational::one()).is_err());
    }

    #[test]
    fn monotone_in_bits_and_rate() {
        let one = BigRational::one();
        for bits in [0u32, 8, 56, 100, 168, 256] {
            for rate in [1u64, 10, 1_000_000, DEFAULT_RATE] {
                let t = brute_force_time(bits, rate, &one).unwrap().seconds;
                assert!(brute_force_time(bits + 1, rate, &one).unwrap().seconds > t);
                assert!(brute_force_time(bits, rate + 1, &one).unwrap().seconds < t);
            }
        }
    }

    #[test]
    fn sig3_rendering() {
        assert_eq!(sig3(&rat(16_680, 1000)), "16.7");
        assert_eq!(sig3(&rat(9995, 10)), "1.00×10^3");
        assert_eq!(sig3(&rat(1, 3)), "3.33×10^-1");
        assert_eq!(sig3(&rat(5, 1)), "5.00");
        assert_eq!(sig3(&rat(123, 1)), "123");
        assert_eq!(sig3(&rat(9_995, 1000)), "10.0");
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(exact_decimal(&rat(1, 8)), "0.125");
        assert_eq!(exact_decimal(&rat(1, 3)), "1/3");
        assert_eq!(exact_decimal(&rat(10, 1)), "10");
    }

    #[test]
    fn rate_parsing() {
        assert_eq!(parse_rate("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_rate("50000000000").unwrap(), DEFAULT_RATE);
        assert_eq!(parse_rate("2.5e9").unwrap(), 2_500_000_000);
        assert_eq!(parse_rate("5E10").unwrap(), DEFAULT_RATE);
        for bad in ["", "abc", "0", "1.5", "1e-3", "-4", "e5"] {
            assert!(parse_rate(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn profiles() {
        let des = factor_profile(CipherFamily::Des, DEFAULT_RATE).unwrap();
        assert_eq!(des.key_length_bits, vec![56]);
        assert_eq!(des.block_size_bits, vec![64]);
        assert_eq!(des.developed_year, 1977);
        assert_eq!(des.possible_keys[0].1, possible_keys(56));
        let tdes = factor_profile(CipherFamily::Tdes, DEFAULT_RATE).unwrap();
        assert_eq!(tdes.key_length_bits, vec![112, 168]);
        assert_eq!(tdes.developed_year, 1978);
        let aes = factor_profile(CipherFamily::Aes, DEFAULT_RATE).unwrap();
        assert_eq!(aes.block_size_bits, vec![128]);
        assert_eq!(aes.developed_year, 2000);
        let block = aes.cell(Factor::BlockSize);
        assert_eq!(block.paper_reported, "128, 192, or 256 bits");
        assert!(block.discrepancy);
        assert!(!aes.cell(Factor::KeyLength).discrepancy);
        assert!(!tdes.cell(Factor::KeyLength).discrepancy);
        assert!(!tdes.cell(Factor::PrintableAsciiKeys).discrepancy);
        for p in [&des, &tdes, &aes] {
            assert!(p.cell(Factor::BruteForceTime).discrepancy);
            assert!(!p.cell(Factor::PossibleKeys).discrepancy);
        }
    }

    #[test]
    fn published_duration_agrees_at_matching_rate() {
        // 2^56 keys in exactly 400 days needs 2^56 / (400 * 86400) keys/s.
        let rate = (possible_keys(56) / BigUint::from(400u64 * SECONDS_PER_DAY))
            .to_u64()
            .unwrap();
        let des = factor_profile(CipherFamily::Des, rate).unwrap();
        assert!(!des.cell(Factor::BruteForceTime).discrepancy);
    }

    #[test]
    fn every_published_string_lands_in_exactly_one_cell() {
        let profiles: Vec<FactorProfile> = CipherFamily::ALL
            .iter()
            .map(|&f| factor_profile(f, DEFAULT_RATE).unwrap())
            .collect();
        let mut lines = PUBLISHED_TABLE.lines();
        let columns: Vec<CipherFamily> = lines
            .next()
            .unwrap()
            .split('\t')
            .skip(1)
            .map(|h| h.parse().unwrap())
            .collect();
        let mut rows = 0;
        for (line, factor) in lines.zip(Factor::ALL) {
            rows += 1;
            let cells: Vec<&str> = line.split('\t').collect();
            assert_eq!(cells.len(), 4);
            for (&family, &text) in columns.iter().zip(&cells[1..]) {
                let owners: Vec<_> = profiles
                    .iter()
                    .flat_map(|p| p.cells().into_iter().map(move |c| (p.algorithm, c)))
                    .filter(|(a, c)| *a == family && c.factor == factor && c.paper_reported == text)
                    .collect();
                assert_eq!(owners.len(), 1, "{family} {factor:?}: {text}");
            }
        }
        assert_eq!(rows, 9);
    }

    #[test]
    fn report_shapes() {
        let all = CipherFamily::ALL;
        let text = compare_report(&all, DEFAULT_RATE, ReportFormat::Text).unwrap();
        assert!(text.contains("400 Days"));
        assert!(text.contains("16.7 days"));
        let csv = compare_report(&all, DEFAULT_RATE, ReportFormat::Csv).unwrap();
        for f in Factor::ALL {
            assert!(csv.contains(f.label()), "{}", f.label());
        }
        assert_eq!(csv.lines().count(), 10);
        let json: Value =
            serde_json::from_str(&compare_report(&[CipherFamily::Des], 1_000_000, ReportFormat::Json).unwrap())
                .unwrap();
        assert_eq!(json["des"]["brute_force_time"]["discrepancy"], true);
        assert!(json["des"]["brute_force_time"]["display"]
            .as_str()
            .unwrap()
            .contains("2.28×10^3 years"));
        assert!(compare_report(&[], DEFAULT_RATE, ReportFormat::Text).is_err());
    }
}
