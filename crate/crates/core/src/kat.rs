//! Known-answer tests: a small line-oriented vector format and a runner.
//!
//! ```text
//! # comment
//! [ALGO=aes128] [MODE=cbc]
//! COUNT = 0
//! KEY = 2b7e151628aed2a6abf7158809cf4f3c
//! IV = 000102030405060708090a0b0c0d0e0f
//! PLAINTEXT = 6bc1bee22e409f96e93d7e117393172a
//! CIPHERTEXT = 7649abac8119b246cee98e9b12e9197d
//! DIRECTION = both
//! ```
//!
//! A blank line ends a case. Section headers set the algorithm and mode for
//! the cases that follow.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::bitops::{hex_decode, hex_encode};
use crate::modes::{self, CipherSuite, Mode, ModeSpec};
use crate::{Algorithm, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    Encrypt,
    Decrypt,
    #[default]
    Both,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "encrypt" => Ok(Direction::Encrypt),
            "decrypt" => Ok(Direction::Decrypt),
            "both" => Ok(Direction::Both),
            _ => Err(Error::InvalidArgument(format!("unknown direction `{s}`"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Encrypt => "encrypt",
            Direction::Decrypt => "decrypt",
            Direction::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatCase {
    /// Position of the case in its file, from 0.
    pub id: usize,
    /// The `COUNT` label, if the file gave one.
    pub count: Option<u64>,
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub key: Vec<u8>,
    pub iv: Option<Vec<u8>>,
    pub plaintext: Vec<u8>,
    pub ciphertext: Vec<u8>,
    pub direction: Direction,
}

impl KatCase {
    fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::KatValidation {
            case: self.id,
            message,
        };
        let lengths = self.algorithm.key_lengths();
        if !lengths.contains(&self.key.len()) {
            let expected: Vec<String> = lengths.iter().map(usize::to_string).collect();
            return Err(fail(format!(
                "{} key must be {} octets, got {}",
                self.algorithm,
                expected.join("/"),
                self.key.len()
            )));
        }
        let bs = self.algorithm.block_octets();
        match (self.mode.needs_iv(), &self.iv) {
            (true, None) => return Err(fail(format!("{} case needs an IV", self.mode))),
            (false, Some(_)) => return Err(fail("ecb case must not carry an IV".into())),
            (true, Some(iv)) if iv.len() != bs => {
                return Err(fail(format!("IV must be {bs} octets, got {}", iv.len())))
            }
            _ => {}
        }
        if self.plaintext.len() != self.ciphertext.len() {
            return Err(fail(format!(
                "plaintext is {} octets but ciphertext is {}",
                self.plaintext.len(),
                self.ciphertext.len()
            )));
        }
        if self.mode != Mode::Ctr && self.plaintext.len() % bs != 0 {
            return Err(fail(format!(
                "{} data must be a multiple of {bs} octets",
                self.mode
            )));
        }
        Ok(())
    }

    fn spec(&self) -> ModeSpec {
        ModeSpec::new(self.mode, self.iv.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatFile {
    pub source: String,
    pub cases: Vec<KatCase>,
}

#[derive(Default)]
struct Pending {
    start_line: usize,
    count: Option<u64>,
    key: Option<Vec<u8>>,
    iv: Option<Vec<u8>>,
    plaintext: Option<Vec<u8>>,
    ciphertext: Option<Vec<u8>>,
    direction: Option<Direction>,
}

impl Pending {
    fn is_empty(&self) -> bool {
        self.count.is_none()
            && self.key.is_none()
            && self.iv.is_none()
            && self.plaintext.is_none()
            && self.ciphertext.is_none()
            && self.direction.is_none()
    }
}

fn parse_header(line: &str, number: usize, algo: &mut Option<Algorithm>, mode: &mut Option<Mode>) -> Result<()> {
    let err = |message: String| Error::KatParse {
        line: number,
        message,
    };
    let mut rest = line.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.split_once(']'))
            .ok_or_else(|| err(format!("malformed section header `{line}`")))?;
        let (body, tail) = inner;
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| err(format!("expected KEY=VALUE in `[{body}]`")))?;
        let v = v.trim();
        match k.trim().to_ascii_uppercase().as_str() {
            "ALGO" => *algo = Some(v.parse().map_err(|e: Error| err(e.to_string()))?),
            "MODE" => *mode = Some(v.parse().map_err(|e: Error| err(e.to_string()))?),
            other => return Err(err(format!("unknown section key `{other}`"))),
        }
        rest = tail.trim_start();
    }
    Ok(())
}

pub fn parse_kat(source: &str, text: &str) -> Result<KatFile> {
    let mut cases = Vec::new();
    let mut algo: Option<Algorithm> = None;
    let mut mode: Option<Mode> = None;
    let mut pending = Pending::default();

    let finish = |pending: &mut Pending, algo: Option<Algorithm>, mode: Option<Mode>, cases: &mut Vec<KatCase>| -> Result<()> {
        if pending.is_empty() {
            return Ok(());
        }
        let p = std::mem::take(pending);
        let line = p.start_line;
        let missing = |what: &str| Error::KatParse {
            line,
            message: format!("case is missing {what}"),
        };
        let case = KatCase {
            id: cases.len(),
            count: p.count,
            algorithm: algo.ok_or_else(|| missing("an [ALGO=...] section"))?,
            mode: mode.ok_or_else(|| missing("a [MODE=...] section"))?,
            key: p.key.ok_or_else(|| missing("KEY"))?,
            iv: p.iv,
            plaintext: p.plaintext.ok_or_else(|| missing("PLAINTEXT"))?,
            ciphertext: p.ciphertext.ok_or_else(|| missing("CIPHERTEXT"))?,
            direction: p.direction.unwrap_or_default(),
        };
        case.validate()?;
        cases.push(case);
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            finish(&mut pending, algo, mode, &mut cases)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            finish(&mut pending, algo, mode, &mut cases)?;
            parse_header(line, number, &mut algo, &mut mode)?;
            continue;
        }
        let err = |message: String| Error::KatParse {
            line: number,
            message,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `NAME = value`, got `{line}`")))?;
        let (k, v) = (k.trim().to_ascii_uppercase(), v.trim());
        if pending.is_empty() {
            pending.start_line = number;
        }
        let hex = |v: &str| hex_decode(v).map_err(|e| err(format!("{k}: {e}")));
        let slot_taken = |taken: bool| {
            if taken {
                Err(err(format!("duplicate {k} in one case")))
            } else {
                Ok(())
            }
        };
        match k.as_str() {
            "COUNT" => {
                slot_taken(pending.count.is_some())?;
                pending.count = Some(v.parse().map_err(|_| err(format!("bad COUNT `{v}`")))?);
            }
            "KEY" => {
                slot_taken(pending.key.is_some())?;
                pending.key = Some(hex(v)?);
            }
            "IV" => {
                slot_taken(pending.iv.is_some())?;
                pending.iv = Some(hex(v)?);
            }
            "PLAINTEXT" => {
                slot_taken(pending.plaintext.is_some())?;
                pending.plaintext = Some(hex(v)?);
            }
            "CIPHERTEXT" => {
                slot_taken(pending.ciphertext.is_some())?;
                pending.ciphertext = Some(hex(v)?);
            }
            "DIRECTION" => {
                slot_taken(pending.direction.is_some())?;
                pending.direction = Some(v.parse().map_err(|e: Error| err(e.to_string()))?);
            }
            _ => return Err(err(format!("unknown field `{k}`"))),
        }
    }
    finish(&mut pending, algo, mode, &mut cases)?;
    Ok(KatFile {
        source: source.to_string(),
        cases,
    })
}

impl KatFile {
    /// Renders the file back into the line format, one section per run of
    /// cases sharing an algorithm and mode.
    pub fn serialize(&self) -> String {
        let mut out = format!("# {}\n", self.source);
        let mut section = None;
        for c in &self.cases {
            if section != Some((c.algorithm, c.mode)) {
                section = Some((c.algorithm, c.mode));
                let _ = writeln!(out, "\n[ALGO={}] [MODE={}]", c.algorithm, c.mode);
            }
            out.push('\n');
            if let Some(n) = c.count {
                let _ = writeln!(out, "COUNT = {n}");
            }
            let _ = writeln!(out, "KEY = {}", hex_encode(&c.key));
            if let Some(iv) = &c.iv {
                let _ = writeln!(out, "IV = {}", hex_encode(iv));
            }
            let _ = writeln!(out, "PLAINTEXT = {}", hex_encode(&c.plaintext));
            let _ = writeln!(out, "CIPHERTEXT = {}", hex_encode(&c.ciphertext));
            let _ = writeln!(out, "DIRECTION = {}", c.direction);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub id: usize,
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub encrypt_ok: Option<bool>,
    pub decrypt_ok: Option<bool>,
    /// Expected-versus-actual hex for every failed direction.
    pub failures: Vec<String>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatSummary {
    pub source: String,
    pub outcomes: Vec<CaseOutcome>,
}

impl KatSummary {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.outcomes.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{} case {} ({}/{}): {}",
                self.source,
                o.id,
                o.algorithm,
                o.mode,
                if o.passed() { "PASS" } else { "FAIL" }
            );
            for f in &o.failures {
                let _ = writeln!(out, "    {f}");
            }
        }
        let _ = writeln!(
            out,
            "{}: {} cases, {} passed, {} failed",
            self.source,
            self.outcomes.len(),
            self.passed(),
            self.failed()
        );
        out
    }
}

fn diff_line(what: &str, expected: &[u8], actual: &[u8]) -> String {
    format!(
        "{what}: expected {} got {}",
        hex_encode(expected),
        hex_encode(actual)
    )
}

fn run_case(case: &KatCase) -> CaseOutcome {
    let mut outcome = CaseOutcome {
        id: case.id,
        algorithm: case.algorithm,
        mode: case.mode,
        encrypt_ok: None,
        decrypt_ok: None,
        failures: Vec::new(),
    };
    let suite = match CipherSuite::new(case.algorithm, &case.key) {
        Ok(s) => s,
        Err(e) => {
            outcome.failures.push(format!("key setup: {e}"));
            return outcome;
        }
    };
    let spec = case.spec();
    if matches!(case.direction, Direction::Encrypt | Direction::Both) {
        match modes::encrypt_raw(&suite, &spec, &case.plaintext) {
            Ok(ct) => {
                let ok = ct == case.ciphertext;
                outcome.encrypt_ok = Some(ok);
                if !ok {
                    outcome.failures.push(diff_line("encrypt", &case.ciphertext, &ct));
                }
            }
            Err(e) => {
                outcome.encrypt_ok = Some(false);
                outcome.failures.push(format!("encrypt: {e}"));
            }
        }
    }
    if matches!(case.direction, Direction::Decrypt | Direction::Both) {
        match modes::decrypt_raw(&suite, &spec, &case.ciphertext) {
            Ok(pt) => {
                let ok = pt == case.plaintext;
                outcome.decrypt_ok = Some(ok);
                if !ok {
                    outcome.failures.push(diff_line("decrypt", &case.plaintext, &pt));
                }
            }
            Err(e) => {
                outcome.decrypt_ok = Some(false);
                outcome.failures.push(format!("decrypt: {e}"));
            }
        }
    }
    outcome
}

/// Runs every case; cases run in parallel and are reported in id order.
pub fn run_kats(file: &KatFile) -> KatSummary {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(file.cases.len().max(1));
    let chunk = file.cases.len().div_ceil(workers).max(1);
    let mut outcomes: Vec<CaseOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = file
            .cases
            .chunks(chunk)
            .map(|cases| s.spawn(move || cases.iter().map(run_case).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("kat worker panicked"))
            .collect()
    });
    outcomes.sort_by_key(|o| o.id);
    KatSummary {
        source: file.source.clone(),
        outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_DES: &str = "\
# two DES cases
[ALGO=des] [MODE=ecb]
COUNT = 0
KEY = 133457799bbcdff1
PLAINTEXT = 0123456789abcdef
CIPHERTEXT = 85e813540f0ab405

COUNT = 1
KEY = 0123456789ABCDEF
PLAINTEXT = 4e6f772069732074
CIPHERTEXT = 3fa40e8a984d4815
DIRECTION = encrypt
";

    #[test]
    fn parses_two_cases() {
        let f = parse_kat("two", TWO_DES).unwrap();
        assert_eq!(f.cases.len(), 2);
        assert_eq!(f.cases[0].id, 0);
        assert_eq!(f.cases[1].id, 1);
        assert_eq!(f.cases[1].direction, Direction::Encrypt);
        assert_eq!(f.cases[0].direction, Direction::Both);
        assert!(run_kats(&f).all_passed());
    }

    #[test]
    fn bad_hex_names_the_line() {
        let text = "[ALGO=des] [MODE=ecb]\nKEY = zz34567799bbcdff\n";
        match parse_kat("bad", text).unwrap_err() {
            Error::KatParse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn short_des_key_is_rejected() {
        let text = "[ALGO=des] [MODE=ecb]\nKEY = 01020304050607\nPLAINTEXT = 0000000000000000\nCIPHERTEXT = 0000000000000000\n";
        let err = parse_kat("short", text).unwrap_err();
        assert!(matches!(err, Error::KatValidation { case: 0, .. }));
        assert!(err.to_string().contains('8'), "{err}");
    }

    #[test]
    fn corrupted_case_fails_with_diff() {
        let text = TWO_DES.replace("85e813540f0ab405", "85e813540f0ab404");
        let s = run_kats(&parse_kat("bad", &text).unwrap());
        assert_eq!(s.failed(), 1);
        assert!(!s.outcomes[0].passed());
        assert!(s.outcomes[0].failures[0].contains("85e813540f0ab404"));
        assert!(s.outcomes[0].failures[0].contains("85e813540f0ab405"));
    }

    #[test]
    fn empty_file() {
        let s = run_kats(&parse_kat("empty", "").unwrap());
        assert_eq!(s.outcomes.len(), 0);
        assert!(s.all_passed());
    }

    #[test]
    fn serialize_round_trip() {
        let f = parse_kat("two", TWO_DES).unwrap();
        let again = parse_kat("two", &f.serialize()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn structural_errors() {
        assert!(parse_kat("x", "KEY = 00\n").is_err());
        assert!(parse_kat("x", "[ALGO=rot13]\n").is_err());
        assert!(parse_kat("x", "[ALGO=des] [MODE=ecb]\nFOO = 1\n").is_err());
        assert!(parse_kat("x", "[ALGO=des] [MODE=ecb]\nKEY 00\n").is_err());
        let no_iv = "[ALGO=aes128] [MODE=cbc]\nKEY = 000102030405060708090a0b0c0d0e0f\nPLAINTEXT = 00112233445566778899aabbccddeeff\nCIPHERTEXT = 00112233445566778899aabbccddeeff\n";
        assert!(matches!(parse_kat("x", no_iv), Err(Error::KatValidation { .. })));
    }
}
