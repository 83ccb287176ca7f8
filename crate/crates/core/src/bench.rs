//! Single-threaded throughput measurement and relative-performance reports.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::modes::{self, CipherSuite, Mode, ModeSpec};
use crate::report::{self, ReportFormat};
use crate::{Algorithm, Error, Result};

pub const DEFAULT_SEED: u64 = 0x5e_ed0f_b10c;

#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    pub min_duration: Duration,
    pub warmup: Duration,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            min_duration: Duration::from_secs(1),
            warmup: Duration::from_millis(100),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub payload_octets: usize,
    pub iterations: u64,
    #[serde(rename = "seconds", serialize_with = "as_secs")]
    pub elapsed: Duration,
    /// `payload_octets * iterations / elapsed`.
    #[serde(rename = "octets_per_second")]
    pub throughput: f64,
    /// Fold of the final ciphertext; keeps the work observable.
    pub checksum: u64,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

struct Workload {
    suite: CipherSuite,
    spec: ModeSpec,
    buffer: Vec<u8>,
}

impl Workload {
    /// Key, IV and initial buffer all come from `seed`; ECB/CBC payloads are
    /// rounded up to whole blocks.
    fn new(algorithm: Algorithm, mode: Mode, payload: usize, seed: u64) -> Result<Self> {
        let bs = algorithm.block_octets();
        if payload < bs {
            return Err(Error::InvalidArgument(format!(
                "payload of {payload} octets is smaller than one {bs}-octet block"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let key_len = *algorithm.key_lengths().last().unwrap();
        let key: Vec<u8> = (0..key_len).map(|_| rng.gen()).collect();
        let iv = mode
            .needs_iv()
            .then(|| (0..bs).map(|_| rng.gen()).collect::<Vec<u8>>());
        let len = match mode {
            Mode::Ctr => payload,
            _ => payload.div_ceil(bs) * bs,
        };
        let mut buffer = vec![0u8; len];
        rng.fill(&mut buffer[..]);
        Ok(Workload {
            suite: CipherSuite::new(algorithm, &key)?,
            spec: ModeSpec::new(mode, iv),
            buffer,
        })
    }

    fn step(&mut self) {
        modes::encrypt_in_place(&self.suite, &self.spec, &mut self.buffer)
            .expect("workload is block aligned");
    }

    fn checksum(&self) -> u64 {
        // FNV-1a
        self.buffer.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }
}

/// Runs exactly `iterations` chained encryptions and returns the checksum.
pub fn workload_checksum(
    algorithm: Algorithm,
    mode: Mode,
    payload_octets: usize,
    iterations: u64,
    seed: u64,
) -> Result<u64> {
    let mut w = Workload::new(algorithm, mode, payload_octets, seed)?;
    for _ in 0..iterations {
        w.step();
    }
    Ok(w.checksum())
}

/// Encrypts a buffer repeatedly, each pass over the previous output, until
/// `min_duration` has elapsed on the monotonic clock.
pub fn measure(
    algorithm: Algorithm,
    mode: Mode,
    payload_octets: usize,
    config: &BenchConfig,
) -> Result<BenchResult> {
    let mut warm = Workload::new(algorithm, mode, payload_octets, config.seed)?;
    let start = Instant::now();
    while start.elapsed() < config.warmup {
        warm.step();
    }
    std::hint::black_box(warm.checksum());

    let mut w = Workload::new(algorithm, mode, payload_octets, config.seed)?;
    let mut iterations = 0u64;
    let start = Instant::now();
    let elapsed = loop {
        w.step();
        iterations += 1;
        let e = start.elapsed();
        if e >= config.min_duration {
            break e;
        }
    };
    let octets = w.buffer.len();
    Ok(BenchResult {
        algorithm,
        mode,
        payload_octets: octets,
        iterations,
        elapsed,
        throughput: octets as f64 * iterations as f64 / elapsed.as_secs_f64(),
        checksum: std::hint::black_box(w.checksum()),
    })
}

/// Measures each algorithm in turn, never concurrently.
pub fn measure_all(
    algorithms: &[Algorithm],
    mode: Mode,
    payload_octets: usize,
    config: &BenchConfig,
) -> Result<Vec<BenchResult>> {
    algorithms
        .iter()
        .map(|&a| measure(a, mode, payload_octets, config))
        .collect()
}

/// Throughput ratios between the families, where both sides were measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ratios {
    pub des_over_tdes: Option<f64>,
    pub aes_over_tdes: Option<f64>,
}

pub const DES_TDES_BAND: (f64, f64) = (2.0, 5.0);

fn find(results: &[BenchResult], pick: impl Fn(Algorithm) -> bool) -> Option<&BenchResult> {
    results.iter().find(|r| pick(r.algorithm))
}

pub fn ratios(results: &[BenchResult]) -> Ratios {
    let tdes = find(results, |a| a == Algorithm::Tdes);
    let des = find(results, |a| a == Algorithm::Des);
    let aes = find(results, |a| a == Algorithm::Aes128)
        .or_else(|| find(results, |a| matches!(a, Algorithm::Aes192 | Algorithm::Aes256)));
    Ratios {
        des_over_tdes: des.zip(tdes).map(|(d, t)| d.throughput / t.throughput),
        aes_over_tdes: aes.zip(tdes).map(|(a, t)| a.throughput / t.throughput),
    }
}

impl Ratios {
    pub fn aes_beats_tdes(&self) -> Option<bool> {
        self.aes_over_tdes.map(|r| r > 1.0)
    }

    pub fn tdes_cost_in_band(&self) -> Option<bool> {
        self.des_over_tdes
            .map(|r| (DES_TDES_BAND.0..=DES_TDES_BAND.1).contains(&r))
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "reproduced on this machine"
    } else {
        "paper claim NOT reproduced on this machine"
    }
}

pub fn bench_report(results: &[BenchResult], format: ReportFormat) -> Result<String> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("no benchmark results".into()));
    }
    let mut sorted = results.to_vec();
    sorted.sort_by(|a, b| b.throughput.total_cmp(&a.throughput));
    let r = ratios(&sorted);
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(&sorted).expect("json") + "\n"),
        ReportFormat::Csv => {
            let mut rows = vec![[
                "algorithm",
                "mode",
                "payload",
                "iterations",
                "seconds",
                "octets_per_second",
            ]
            .map(String::from)
            .to_vec()];
            for b in &sorted {
                rows.push(vec![
                    b.algorithm.to_string(),
                    b.mode.to_string(),
                    b.payload_octets.to_string(),
                    b.iterations.to_string(),
                    format!("{:.6}", b.elapsed.as_secs_f64()),
                    format!("{:.0}", b.throughput),
                ]);
            }
            Ok(report::to_csv(rows))
        }
        ReportFormat::Text => {
            let header: Vec<String> = ["algorithm", "mode", "payload", "iterations", "seconds", "MiB/s"]
                .map(String::from)
                .to_vec();
            let rows: Vec<Vec<String>> = sorted
                .iter()
                .map(|b| {
                    vec![
                        b.algorithm.to_string(),
                        b.mode.to_string(),
                        b.payload_octets.to_string(),
                        b.iterations.to_string(),
                        format!("{:.3}", b.elapsed.as_secs_f64()),
                        format!("{:.2}", b.throughput / (1024.0 * 1024.0)),
                    ]
                })
                .collect();
            let mut out = report::text_table(&header, &rows, 40);
            out.push('\n');
            if let Some(x) = r.des_over_tdes {
                let _ = writeln!(
                    out,
                    "des/tdes throughput ratio: {x:.2} (expected within {:.1}..{:.1}: {})",
                    DES_TDES_BAND.0,
                    DES_TDES_BAND.1,
                    verdict(r.tdes_cost_in_band().unwrap())
                );
            }
            if let Some(x) = r.aes_over_tdes {
                let _ = writeln!(
                    out,
                    "aes/tdes throughput ratio: {x:.2} (AES faster than 3DES: {})",
                    verdict(r.aes_beats_tdes().unwrap())
                );
            }
            Ok(out)
        }
    }
}
