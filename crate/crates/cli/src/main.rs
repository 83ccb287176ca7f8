use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use cipherbench::aes::{AesKey, AesVariant};
use cipherbench::bench::{self, BenchConfig};
use cipherbench::bitops::{hex_decode, hex_encode};
use cipherbench::cracker::{self, CrackJob};
use cipherbench::des::DesKey;
use cipherbench::factors::{self, CipherFamily};
use cipherbench::kat;
use cipherbench::modes::{self, CipherSuite, Mode, ModeSpec};
use cipherbench::report::ReportFormat;
use cipherbench::{Algorithm, Error};
use clap::{Args, Parser, Subcommand};
use rand::RngCore;

/// DES, 3DES and AES workbench: encryption, known-answer tests, the
/// factor comparison, throughput benchmarks and a restricted key search.
#[derive(Parser)]
#[command(name = "cipherbench", version)]
struct Cli {
    /// Report format for compare, bench and crack.
    #[arg(long, global = true, env = "CIPHERBENCH_FORMAT", default_value = "text")]
    format: ReportFormat,

    /// More diagnostics on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a file or standard input.
    Encrypt(CryptArgs),
    /// Decrypt a file or standard input.
    Decrypt(CryptArgs),
    /// Run known-answer test files.
    Kat {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print the nine-factor comparison of DES, 3DES and AES.
    Compare {
        /// Comma-separated subset of des, 3des, aes.
        #[arg(long, value_delimiter = ',', default_value = "des,3des,aes")]
        algos: Vec<CipherFamily>,
        /// Exhaustive-search rate in keys per second, e.g. 1e6.
        #[arg(long, default_value = "50e9")]
        rate: String,
    },
    /// Measure single-threaded throughput.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "des,tdes,aes128")]
        algos: Vec<Algorithm>,
        #[arg(long, default_value = "ctr")]
        mode: Mode,
        /// Octets encrypted per pass.
        #[arg(long, default_value_t = 1 << 20)]
        payload: usize,
        /// Minimum measurement time per algorithm, in seconds.
        #[arg(long, default_value_t = 1.0)]
        seconds: f64,
        #[arg(long, default_value_t = bench::DEFAULT_SEED)]
        seed: u64,
    },
    /// Search a restricted DES keyspace for a known plaintext/ciphertext pair.
    Crack(CrackArgs),
}

#[derive(Args)]
struct CryptArgs {
    /// des, tdes, aes128, aes192, aes256, or aes to size by the key.
    #[arg(long)]
    algo: String,
    #[arg(long)]
    mode: Mode,
    /// Key as hex.
    #[arg(long)]
    key: String,
    /// IV as hex (cbc and ctr).
    #[arg(long, conflicts_with = "random_iv")]
    iv: Option<String>,
    /// Generate a fresh IV and print it to stderr.
    #[arg(long)]
    random_iv: bool,
    /// Input file; standard input when absent.
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CrackArgs {
    /// JSON job document; replaces the other job flags.
    #[arg(long, conflicts_with_all = ["plaintext", "ciphertext", "template", "free_bits", "free_positions"])]
    job: Option<PathBuf>,
    #[arg(long, required_unless_present = "job")]
    plaintext: Option<String>,
    #[arg(long, required_unless_present = "job")]
    ciphertext: Option<String>,
    /// Key template as 8 octets of hex; free bits are ignored.
    #[arg(long, required_unless_present = "job")]
    template: Option<String>,
    /// Free the N least significant effective key bits.
    #[arg(long, conflicts_with = "free_positions")]
    free_bits: Option<usize>,
    /// Comma-separated effective bit positions, 1 (most significant) to 56.
    #[arg(long, value_delimiter = ',')]
    free_positions: Option<Vec<u8>>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

/// A failure with its exit status: 2 for bad invocations, 1 otherwise.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            status: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            status: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Padding | Error::Length(_) | Error::KatValidation { .. } | Error::CrackJob(_) => {
                Failure::runtime(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) => read_file(p),
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::runtime(format!("reading standard input: {e}")))?;
            Ok(buf)
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Failure::usage(format!("{}: file not found", path.display())),
        _ => Failure::runtime(format!("{}: {e}", path.display())),
    })
}

fn write_output(path: Option<&Path>, data: &[u8]) -> Result<(), Failure> {
    let result = match path {
        Some(p) => fs::write(p, data),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data).and_then(|_| out.flush())
        }
    };
    result.map_err(|e| Failure::runtime(format!("writing output: {e}")))
}

fn resolve_algorithm(name: &str, key: &[u8]) -> Result<Algorithm, Failure> {
    if !name.eq_ignore_ascii_case("aes") {
        return Ok(name.parse()?);
    }
    Ok(match AesKey::new(key)?.variant() {
        AesVariant::Aes128 => Algorithm::Aes128,
        AesVariant::Aes192 => Algorithm::Aes192,
        AesVariant::Aes256 => Algorithm::Aes256,
    })
}

fn crypt(args: &CryptArgs, encrypt: bool, verbose: u8) -> Outcome {
    let key = hex_decode(&args.key)?;
    let algo = resolve_algorithm(&args.algo, &key)?;
    let suite = CipherSuite::new(algo, &key)?;
    let iv = match (&args.iv, args.random_iv) {
        (Some(hex), _) => Some(hex_decode(hex)?),
        (None, true) => {
            if !encrypt {
                return Err(Failure::usage("--random-iv only makes sense when encrypting"));
            }
            let mut iv = vec![0u8; algo.block_octets()];
            rand::thread_rng().fill_bytes(&mut iv);
            eprintln!("iv: {}", hex_encode(&iv));
            Some(iv)
        }
        (None, false) => None,
    };
    if args.mode.needs_iv() && iv.is_none() {
        return Err(Failure::usage(format!(
            "{} mode needs --iv or --random-iv",
            args.mode
        )));
    }
    let spec = ModeSpec::new(args.mode, iv);
    let input = read_input(args.input.as_deref())?;
    let output = if encrypt {
        modes::mode_encrypt(&suite, &spec, &input)?
    } else {
        modes::mode_decrypt(&suite, &spec, &input)?
    };
    if verbose > 0 {
        eprintln!(
            "{} {} octets -> {} octets ({}/{})",
            if encrypt { "encrypted" } else { "decrypted" },
            input.len(),
            output.len(),
            algo,
            args.mode
        );
    }
    write_output(args.output.as_deref(), &output)?;
    Ok(0)
}

fn run_kat(paths: &[PathBuf]) -> Outcome {
    let mut failed = 0;
    for path in paths {
        let bytes = read_file(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| Failure::usage(format!("{}: not UTF-8", path.display())))?;
        let file = kat::parse_kat(&path.display().to_string(), &text)?;
        let summary = kat::run_kats(&file);
        print!("{}", summary.render());
        failed += summary.failed();
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn compare(algos: &[CipherFamily], rate: &str, format: ReportFormat) -> Outcome {
    let rate = factors::parse_rate(rate)?;
    print!("{}", factors::compare_report(algos, rate, format)?);
    Ok(0)
}

fn run_bench(
    algos: &[Algorithm],
    mode: Mode,
    payload: usize,
    seconds: f64,
    seed: u64,
    format: ReportFormat,
    verbose: u8,
) -> Outcome {
    let min_duration = Duration::try_from_secs_f64(seconds)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Failure::usage(format!("--seconds must be positive, got {seconds}")))?;
    let config = BenchConfig {
        min_duration,
        seed,
        ..Default::default()
    };
    let mut results = Vec::new();
    for &algo in algos {
        let r = bench::measure(algo, mode, payload, &config)?;
        if verbose > 0 {
            eprintln!("{algo}: {} passes, checksum {:016x}", r.iterations, r.checksum);
        }
        results.push(r);
    }
    print!("{}", bench::bench_report(&results, format)?);
    Ok(0)
}

fn block(hex: &str, what: &str) -> Result<u64, Failure> {
    let octets = hex_decode(hex)?;
    let arr: [u8; 8] = octets
        .as_slice()
        .try_into()
        .map_err(|_| Failure::usage(format!("{what} must be 8 octets of hex")))?;
    Ok(u64::from_be_bytes(arr))
}

fn crack(args: &CrackArgs, format: ReportFormat) -> Outcome {
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let job = match &args.job {
        Some(path) => {
            let text = String::from_utf8(read_file(path)?)
                .map_err(|_| Failure::usage(format!("{}: not UTF-8", path.display())))?;
            let mut job = CrackJob::from_json(&text).map_err(|e| Failure::usage(e.to_string()))?;
            if let Some(w) = args.workers {
                job.workers = w.max(1);
            }
            job
        }
        None => {
            let free = match (&args.free_positions, args.free_bits) {
                (Some(p), _) => p.clone(),
                (None, Some(n)) if n <= 56 => CrackJob::lowest_free_bits(n),
                (None, Some(n)) => return Err(Failure::usage(format!("--free-bits {n} exceeds 56"))),
                (None, None) => return Err(Failure::usage("give --free-bits or --free-positions")),
            };
            let template = DesKey::new(block(args.template.as_deref().unwrap_or_default(), "template")?.to_be_bytes());
            CrackJob::new(
                block(args.plaintext.as_deref().unwrap_or_default(), "plaintext")?,
                block(args.ciphertext.as_deref().unwrap_or_default(), "ciphertext")?,
                &template,
                &free,
                args.workers.unwrap_or(default_workers),
            )
            .map_err(|e| Failure::usage(e.to_string()))?
        }
    };
    let result = cracker::crack(&job)?;
    print!("{}", result.render(format));
    Ok(if result.found.is_some() { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Encrypt(args) => crypt(args, true, cli.verbose),
        Command::Decrypt(args) => crypt(args, false, cli.verbose),
        Command::Kat { paths } => run_kat(paths),
        Command::Compare { algos, rate } => compare(algos, rate, cli.format),
        Command::Bench {
            algos,
            mode,
            payload,
            seconds,
            seed,
        } => run_bench(algos, *mode, *payload, *seconds, *seed, cli.format, cli.verbose),
        Command::Crack(args) => crack(args, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("cipherbench: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
