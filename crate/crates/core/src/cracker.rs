//! Exhaustive DES key search over a keyspace restricted by a template.
//!
//! Free bits are numbered 1..=56 over the effective key, bit 1 being the
//! most significant (the high bit of the first key octet).

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bitops::{hex_decode, hex_encode};
use crate::des::{self, Des, DesKey};
use crate::factors::{self, BruteForceEstimate};
use crate::report::ReportFormat;
use crate::{Error, Result};

pub const MAX_FREE_BITS: usize = 28;
pub const EFFECTIVE_BITS: u32 = 56;

/// Candidates tested between checks of the shared stop index.
const STRIDE: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrackJob {
    pub known_plaintext: u64,
    pub known_ciphertext: u64,
    /// Effective key bits; values at free positions are ignored.
    pub template: u64,
    /// Sorted, distinct, each in 1..=56.
    pub free_bits: Vec<u8>,
    pub workers: usize,
}

/// Job document accepted from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrackJobDocument {
    pub plaintext: String,
    pub ciphertext: String,
    pub template_hex: String,
    pub free_bit_positions: Vec<u8>,
    #[serde(default = "one_worker")]
    pub workers: usize,
}

fn one_worker() -> usize {
    1
}

fn block(hex: &str, what: &str) -> Result<u64> {
    let octets = hex_decode(hex)?;
    let arr: [u8; 8] = octets.as_slice().try_into().map_err(|_| {
        Error::CrackJob(format!("{what} must be 8 octets, got {}", octets.len()))
    })?;
    Ok(u64::from_be_bytes(arr))
}

fn mask(position: u8) -> u64 {
    1u64 << (EFFECTIVE_BITS - position as u32)
}

impl CrackJob {
    pub fn new(
        known_plaintext: u64,
        known_ciphertext: u64,
        template: &DesKey,
        free_bits: &[u8],
        workers: usize,
    ) -> Result<Self> {
        let mut free: Vec<u8> = free_bits.to_vec();
        free.sort_unstable();
        free.dedup();
        if free.len() != free_bits.len() {
            return Err(Error::CrackJob("free bit positions repeat".into()));
        }
        if let Some(&p) = free.iter().find(|&&p| p == 0 || p as u32 > EFFECTIVE_BITS) {
            return Err(Error::CrackJob(format!(
                "free bit position {p} outside 1..=56"
            )));
        }
        if free.len() > MAX_FREE_BITS {
            return Err(Error::CrackRefused(format!(
                "{} free bits means 2^{} candidates; at most {MAX_FREE_BITS} free bits are searched \
                 (use the extrapolation for larger spaces)",
                free.len(),
                free.len()
            )));
        }
        if workers == 0 {
            return Err(Error::CrackJob("workers must be at least 1".into()));
        }
        let free_mask = free.iter().fold(0u64, |m, &p| m | mask(p));
        Ok(CrackJob {
            known_plaintext,
            known_ciphertext,
            template: template.effective() & !free_mask,
            free_bits: free,
            workers,
        })
    }

    /// Frees the `n` least significant effective bits.
    pub fn lowest_free_bits(n: usize) -> Vec<u8> {
        (EFFECTIVE_BITS as usize + 1 - n..=EFFECTIVE_BITS as usize)
            .map(|p| p as u8)
            .collect()
    }

    pub fn from_document(doc: &CrackJobDocument) -> Result<Self> {
        let template = DesKey::new(block(&doc.template_hex, "template")?.to_be_bytes());
        CrackJob::new(
            block(&doc.plaintext, "plaintext")?,
            block(&doc.ciphertext, "ciphertext")?,
            &template,
            &doc.free_bit_positions,
            doc.workers,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CrackJobDocument = serde_json::from_str(text)
            .map_err(|e| Error::CrackJob(format!("job document: {e}")))?;
        CrackJob::from_document(&doc)
    }

    pub fn candidate_count(&self) -> u64 {
        1u64 << self.free_bits.len()
    }

    /// Maps a candidate index to its effective key. The most significant
    /// index bit lands in the most significant free position, so the
    /// mapping is monotonic.
    pub fn candidate(&self, index: u64) -> u64 {
        let f = self.free_bits.len();
        self.free_bits
            .iter()
            .enumerate()
            .fold(self.template, |k, (i, &p)| {
                if index >> (f - 1 - i) & 1 == 1 {
                    k | mask(p)
                } else {
                    k
                }
            })
    }

    fn matches(&self, effective: u64) -> bool {
        let des = Des::new(&DesKey::from_effective(effective)).expect("parity is set");
        des.encrypt_u64(self.known_plaintext) == self.known_ciphertext
    }
}

fn schedule(effective: u64) -> [u64; 16] {
    *des::key_schedule(&DesKey::from_effective(effective))
        .expect("parity is set")
        .rounds()
}

fn xor(a: &[u64; 16], b: &[u64; 16]) -> [u64; 16] {
    std::array::from_fn(|i| a[i] ^ b[i])
}

/// The key schedule is linear in the effective key bits, so a candidate's
/// round keys are the template's XOR the contributions of its set free bits.
struct Schedules {
    low_bits: usize,
    /// Round keys for every combination of the low index bits.
    low: Vec<[u64; 16]>,
    /// Contribution of each high index bit, least significant first.
    high: Vec<[u64; 16]>,
    template: [u64; 16],
}

impl Schedules {
    const LOW_BITS: usize = 8;

    fn new(job: &CrackJob) -> Self {
        let f = job.free_bits.len();
        // index bit j drives free position free_bits[f - 1 - j]
        let contribution = |j: usize| schedule(mask(job.free_bits[f - 1 - j]));
        let low_bits = f.min(Self::LOW_BITS);
        let unit: Vec<[u64; 16]> = (0..low_bits).map(contribution).collect();
        let low = (0..1usize << low_bits)
            .map(|v| {
                (0..low_bits)
                    .filter(|j| v >> j & 1 == 1)
                    .fold([0u64; 16], |acc, j| xor(&acc, &unit[j]))
            })
            .collect();
        Schedules {
            low_bits,
            low,
            high: (low_bits..f).map(contribution).collect(),
            template: schedule(job.template),
        }
    }

    fn base(&self, high_index: u64) -> [u64; 16] {
        self.high
            .iter()
            .enumerate()
            .filter(|(j, _)| high_index >> j & 1 == 1)
            .fold(self.template, |acc, (_, c)| xor(&acc, c))
    }
}

#[derive(Debug, Clone)]
pub struct CrackResult {
    pub found: Option<DesKey>,
    pub keys_tested: u64,
    pub elapsed: Duration,
    pub measured_rate: u64,
    /// Full 56-bit space at `measured_rate`.
    pub extrapolation: BruteForceEstimate,
}

/// Searches every candidate, split into contiguous ranges across workers,
/// and returns the smallest matching effective key.
pub fn crack(job: &CrackJob) -> Result<CrackResult> {
    let total = job.candidate_count();
    let workers = (job.workers as u64).min(total);
    let best = AtomicU64::new(u64::MAX);
    let tested = AtomicU64::new(0);
    let start = Instant::now();
    let schedules = Schedules::new(job);
    std::thread::scope(|s| {
        for w in 0..workers {
            let (lo, hi) = (total * w / workers, total * (w + 1) / workers);
            let (best, tested, sched) = (&best, &tested, &schedules);
            s.spawn(move || {
                let low_mask = (1u64 << sched.low_bits) - 1;
                let mut base_for = u64::MAX;
                let mut base = sched.template;
                let mut idx = lo;
                while idx < hi && idx < best.load(Ordering::Acquire) {
                    let chunk = idx;
                    let end = (idx + STRIDE).min(hi);
                    let mut hit = None;
                    while idx < end {
                        let cand = idx;
                        idx += 1;
                        if cand >> sched.low_bits != base_for {
                            base_for = cand >> sched.low_bits;
                            base = sched.base(base_for);
                        }
                        let keys = xor(&base, &sched.low[(cand & low_mask) as usize]);
                        if des::crypt_u64(job.known_plaintext, &keys) == job.known_ciphertext {
                            hit = Some(cand);
                            break;
                        }
                    }
                    tested.fetch_add(idx - chunk, Ordering::Relaxed);
                    if let Some(h) = hit {
                        best.fetch_min(h, Ordering::AcqRel);
                        break;
                    }
                }
            });
        }
    });
    let elapsed = start.elapsed();
    let keys_tested = tested.into_inner();
    let found = match best.into_inner() {
        u64::MAX => None,
        idx => {
            let key = job.candidate(idx);
            debug_assert!(job.matches(key));
            Some(DesKey::from_effective(key))
        }
    };
    let measured_rate = measured_rate(keys_tested, elapsed);
    Ok(CrackResult {
        found,
        keys_tested,
        elapsed,
        measured_rate,
        extrapolation: extrapolate(measured_rate, EFFECTIVE_BITS)?,
    })
}

/// Whole keys per second, at least 1.
pub fn measured_rate(keys: u64, elapsed: Duration) -> u64 {
    let nanos = elapsed.as_nanos().max(1);
    ((keys as u128 * 1_000_000_000 / nanos) as u64).max(1)
}

/// Time to search a full `bits`-bit space at `rate`.
pub fn extrapolate(rate: u64, bits: u32) -> Result<BruteForceEstimate> {
    factors::brute_force_time(bits, rate, &num_rational::BigRational::one())
}

#[derive(Serialize)]
struct ResultDoc<'a> {
    found: Option<String>,
    found_effective: Option<String>,
    keys_tested: u64,
    seconds: f64,
    measured_rate: u64,
    extrapolated_bits: u32,
    extrapolated_seconds: String,
    extrapolated_human: &'a str,
}

impl CrackResult {
    pub fn render(&self, format: ReportFormat) -> String {
        let found = self.found.map(|k| hex_encode(k.octets()));
        let found_effective = self.found.map(|k| format!("{:014x}", k.effective()));
        let doc = ResultDoc {
            found,
            found_effective,
            keys_tested: self.keys_tested,
            seconds: self.elapsed.as_secs_f64(),
            measured_rate: self.measured_rate,
            extrapolated_bits: self.extrapolation.bits,
            extrapolated_seconds: factors::exact_decimal(&self.extrapolation.seconds),
            extrapolated_human: &self.extrapolation.human,
        };
        match format {
            ReportFormat::Json => serde_json::to_string_pretty(&doc).expect("json") + "\n",
            ReportFormat::Csv => crate::report::to_csv([
                vec![
                    "found",
                    "keys_tested",
                    "seconds",
                    "measured_rate",
                    "extrapolated_bits",
                    "extrapolated_seconds",
                ]
                .into_iter()
                .map(String::from)
                .collect::<Vec<_>>(),
                vec![
                    doc.found.clone().unwrap_or_default(),
                    doc.keys_tested.to_string(),
                    format!("{:.6}", doc.seconds),
                    doc.measured_rate.to_string(),
                    doc.extrapolated_bits.to_string(),
                    doc.extrapolated_seconds.clone(),
                ],
            ]),
            ReportFormat::Text => {
                let mut out = String::new();
                match &doc.found {
                    Some(k) => {
                        let _ = writeln!(out, "recovered key: {k}");
                    }
                    None => out.push_str("no key in the candidate set matches\n"),
                }
                let _ = writeln!(
                    out,
                    "keys tested: {} in {:.3} s ({} keys/s)",
                    doc.keys_tested, doc.seconds, doc.measured_rate
                );
                let _ = writeln!(
                    out,
                    "full {}-bit search at this software rate: {}",
                    doc.extrapolated_bits, doc.extrapolated_human
                );
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plant(rng: &mut ChaCha8Rng, free: usize, workers: usize) -> (CrackJob, u64) {
        let key = rng.gen::<u64>() >> 8;
        let pt: u64 = rng.gen();
        let ct = Des::new(&DesKey::from_effective(key)).unwrap().encrypt_u64(pt);
        let job = CrackJob::new(
            pt,
            ct,
            &DesKey::from_effective(key),
            &CrackJob::lowest_free_bits(free),
            workers,
        )
        .unwrap();
        (job, key)
    }

    #[test]
    fn candidate_mapping_is_monotonic() {
        let job = CrackJob::new(0, 0, &DesKey::from_effective(0), &[3, 17, 56], 1).unwrap();
        let keys: Vec<u64> = (0..8).map(|i| job.candidate(i)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(job.candidate(0b100), 1 << 53);
        assert_eq!(job.candidate(0b001), 1);
    }

    #[test]
    fn template_bits_at_free_positions_are_cleared() {
        let job = CrackJob::new(0, 0, &DesKey::from_effective((1 << 56) - 1), &[56], 1).unwrap();
        assert_eq!(job.candidate(0), (1 << 56) - 2);
    }

    #[test]
    fn schedule_is_linear_in_key_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (a, b) = (rng.gen::<u64>() >> 8, rng.gen::<u64>() >> 8);
            assert_eq!(schedule(a ^ b), xor(&schedule(a), &schedule(b)));
        }
        assert_eq!(schedule(0), [0; 16]);
    }

    #[test]
    fn zero_free_bits_single_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (job, key) = plant(&mut rng, 0, 1);
        let r = crack(&job).unwrap();
        assert_eq!(r.found.unwrap().effective(), key);
        assert_eq!(r.keys_tested, 1);
    }

    #[test]
    fn exhaustive_miss() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (mut job, key) = plant(&mut rng, 8, 3);
        // flip a fixed bit so the planted key is outside the set
        job.template ^= 1 << 40;
        assert_ne!(job.template & (1 << 40), key & (1 << 40));
        let r = crack(&job).unwrap();
        assert!(r.found.is_none());
        assert_eq!(r.keys_tested, 256);
    }

    #[test]
    fn plant_and_recover() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let free = rng.gen_range(4..=12);
            let workers = rng.gen_range(1..=4);
            let (job, key) = plant(&mut rng, free, workers);
            let r = crack(&job).unwrap();
            let k = r.found.expect("planted key lies in the set");
            assert!(job.matches(k.effective()));
            assert!(k.effective() <= key);
            assert!(r.keys_tested <= job.candidate_count());
        }
    }

    #[test]
    fn worker_count_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (job, _) = plant(&mut rng, 12, 1);
        let mut miss = job.clone();
        miss.known_ciphertext ^= 1;
        let base = crack(&job).unwrap().found.unwrap();
        let base_miss = crack(&miss).unwrap();
        for w in [2, 4, 8] {
            assert_eq!(crack(&CrackJob { workers: w, ..job.clone() }).unwrap().found, Some(base));
            let m = crack(&CrackJob { workers: w, ..miss.clone() }).unwrap();
            assert_eq!(m.found, base_miss.found);
            assert_eq!(m.keys_tested, base_miss.keys_tested);
        }
    }

    #[test]
    fn refusals_and_validation() {
        let t = DesKey::from_effective(0);
        assert!(matches!(
            CrackJob::new(0, 0, &t, &CrackJob::lowest_free_bits(29), 1),
            Err(Error::CrackRefused(_))
        ));
        assert!(CrackJob::new(0, 0, &t, &[0], 1).is_err());
        assert!(CrackJob::new(0, 0, &t, &[57], 1).is_err());
        assert!(CrackJob::new(0, 0, &t, &[5, 5], 1).is_err());
        assert!(CrackJob::new(0, 0, &t, &[5], 0).is_err());
        let doc = r#"{"plaintext":"0011","ciphertext":"0000000000000000","template_hex":"0000000000000000","free_bit_positions":[56]}"#;
        assert!(matches!(CrackJob::from_json(doc), Err(Error::CrackJob(_))));
    }

    #[test]
    fn json_document() {
        let doc = r#"{"plaintext":"0123456789abcdef","ciphertext":"85e813540f0ab405",
            "template_hex":"133457799bbcdf01","free_bit_positions":[50,51,52,53,54,55,56],"workers":2}"#;
        let job = CrackJob::from_json(doc).unwrap();
        assert_eq!(job.workers, 2);
        assert_eq!(job.candidate_count(), 128);
        let found = crack(&job).unwrap().found.unwrap();
        assert_eq!(hex_encode(found.octets()), "133457799bbcdff1");
    }

    #[test]
    fn extrapolation_examples() {
        let e = extrapolate(1_000_000, 56).unwrap();
        assert_eq!(
            e.seconds,
            BigRational::new(BigInt::from(1u64 << 56), BigInt::from(1_000_000))
        );
        assert_eq!(e.human, "2.28×10^3 years");
        assert_eq!(
            extrapolate(50_000_000_000, 56).unwrap(),
            factors::brute_force_time(56, 50_000_000_000, &BigRational::one()).unwrap()
        );
        assert_eq!(extrapolate(1, 0).unwrap().seconds, BigRational::one());
    }

    #[test]
    fn rate_floor() {
        assert_eq!(measured_rate(10, Duration::from_secs(4)), 2);
        assert_eq!(measured_rate(0, Duration::from_secs(1)), 1);
    }
}
