//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # thermalization run
//! initial = ududu-++-dudud
//! sequence = bb1
//! t_prime = -pi/2
//! cycles = 30
//! ```
//!
//! Values given with `--set key=value` replace file values. Numbers accept
//! multiples and fractions of `pi` (`pi/2`, `-pi/3`, `2pi/3`, `0.5*pi`).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::PathBuf;

use fragqsp::qsp::{bb1_phases, PhaseSequence};
use fragqsp::PseudospinString;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridMode {
    /// Uniform grid of `grid` points in `x` over `[0, pi]`.
    Dense,
    /// One row per sector `lambda = 1..=N/2`.
    Sectors,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedSequence {
    pub name: String,
    pub phases: PhaseSequence<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Number of fermion sites, twice the pseudospin length.
    pub l: usize,
    pub initial: Vec<PseudospinString>,
    pub j: f64,
    pub h: f64,
    pub t_prime: f64,
    pub sequences: Vec<NamedSequence>,
    pub cycles: usize,
    pub grid: usize,
    pub grid_mode: GridMode,
    pub burn_in: usize,
    pub max_fragment_dim: usize,
    pub dense_max_dim: usize,
    /// Largest fragment for which the diagonal ensemble is computed.
    pub ensemble_max_dim: usize,
    /// Worker threads, 0 for the rayon default. Not part of the hash.
    pub threads: usize,
    pub out: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "L",
    "initial",
    "J",
    "h",
    "t_prime",
    "sequence",
    "cycles",
    "grid",
    "grid_mode",
    "burn_in",
    "max_fragment_dim",
    "dense_max_dim",
    "ensemble_max_dim",
    "threads",
    "out",
];

/// Raw key/value pairs with the line each came from (`None` for overrides).
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<&'static str, (String, Option<usize>)>,
}

fn canonical_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| k.eq_ignore_ascii_case(key))
}

fn split_pair(text: &str, line: Option<usize>) -> Result<(&'static str, String), CliError> {
    let (key, value) =
        text.split_once('=').ok_or_else(|| CliError::config(line, format!("expected key = value, got {text:?}")))?;
    let key = key.trim();
    let canonical = canonical_key(key).ok_or_else(|| CliError::config(line, format!("unknown key {key:?}")))?;
    Ok((canonical, value.trim().to_string()))
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line_no = Some(n + 1);
            let content = line.split_once('#').map_or(line, |(before, _)| before).trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = split_pair(content, line_no)?;
            if let Some((_, Some(prev))) = raw.entries.get(key) {
                return Err(CliError::config(line_no, format!("duplicate key {key:?} (first set on line {prev})")));
            }
            raw.entries.insert(key, (value, line_no));
        }
        Ok(raw)
    }

    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = split_pair(assignment, None)?;
        self.entries.insert(key, (value, None));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parsed<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some((value, line)) => parse(value).map_err(|e| CliError::config(line, format!("{key}: {e}"))),
        }
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let count = |s: &str| s.parse::<usize>().map_err(|e| format!("{e} ({s:?})"));
        let real = |s: &str| parse_real(s);

        let l_given = self.parsed("L", None, |s| count(s).map(Some))?;
        let initial = self.parsed("initial", None, |s| {
            s.split(',')
                .map(|item| item.trim().parse::<PseudospinString>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
        })?;
        let (l, initial) = match (l_given, initial) {
            (None, None) => (28, vec![PseudospinString::neel(14).expect("even length")]),
            (Some(l), None) => {
                let seed = PseudospinString::neel(l / 2).ok().filter(|_| l % 2 == 0);
                let seed = seed.ok_or_else(|| {
                    CliError::config(self.get("L").and_then(|x| x.1), format!("L = {l} must be even and positive"))
                })?;
                (l, vec![seed])
            }
            (given, Some(seeds)) => {
                let l = 2 * seeds[0].0.len();
                let line = self.get("initial").and_then(|x| x.1);
                if seeds.iter().any(|s| 2 * s.0.len() != l) {
                    return Err(CliError::config(line, "all initial strings must have the same length"));
                }
                if let Some(lg) = given {
                    if lg != l {
                        return Err(CliError::config(
                            self.get("L").and_then(|x| x.1),
                            format!("L = {lg} but initial strings imply L = {l}"),
                        ));
                    }
                }
                (l, seeds)
            }
        };

        let sequences = self.parsed("sequence", vec![named("bb1")?], parse_sequences)?;
        let grid_mode = self.parsed("grid_mode", GridMode::Dense, |s| match s {
            "dense" => Ok(GridMode::Dense),
            "sectors" => Ok(GridMode::Sectors),
            _ => Err(format!("expected dense or sectors, got {s:?}")),
        })?;
        let config = ExperimentConfig {
            l,
            initial,
            j: self.parsed("J", 1.0, real)?,
            h: self.parsed("h", 1.0, real)?,
            t_prime: self.parsed("t_prime", -FRAC_PI_2, real)?,
            sequences,
            cycles: self.parsed("cycles", 30, count)?,
            grid: self.parsed("grid", 1001, count)?,
            grid_mode,
            burn_in: self.parsed("burn_in", 0, count)?,
            max_fragment_dim: self.parsed("max_fragment_dim", fragqsp::fragment::DEFAULT_CAPACITY, count)?,
            dense_max_dim: self.parsed("dense_max_dim", 4096, count)?,
            ensemble_max_dim: self.parsed("ensemble_max_dim", 1024, count)?,
            threads: self.parsed("threads", 0, count)?,
            out: self.get("out").map(|(v, _)| PathBuf::from(v)),
        };
        if config.h == 0.0 {
            return Err(CliError::config(self.get("h").and_then(|x| x.1), "h must be nonzero"));
        }
        if config.grid < 2 {
            return Err(CliError::config(self.get("grid").and_then(|x| x.1), "grid needs at least 2 points"));
        }
        Ok(config)
    }
}

fn named(name: &str) -> Result<NamedSequence, CliError> {
    parse_one_sequence(name, 0).map_err(|e| CliError::config(None, e))
}

fn parse_one_sequence(text: &str, index: usize) -> Result<NamedSequence, String> {
    let text = text.trim();
    let mut name = text.to_string();
    let phases = match text {
        "trivial" => PhaseSequence::trivial(),
        "bb1" => bb1_phases(),
        _ => {
            let inner = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(text);
            let values = inner.split(',').map(parse_real).collect::<Result<Vec<_>, _>>()?;
            name = format!("seq{}", index + 1);
            PhaseSequence::new(values).map_err(|e| e.to_string())?
        }
    };
    Ok(NamedSequence { name, phases })
}

/// `;`-separated list of sequences; explicit lists are named `seq1`, `seq2`, ...
pub fn parse_sequences(text: &str) -> Result<Vec<NamedSequence>, String> {
    text.split(';').enumerate().map(|(i, t)| parse_one_sequence(t, i)).collect()
}

/// A float, optionally a multiple or fraction of `pi`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("not a number: {text:?}");
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let v = sign * value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut raw = RawConfig::parse(text)?;
        for o in overrides {
            raw.set(o)?;
        }
        raw.resolve()
    }

    /// Pseudospin length `N`.
    pub fn n(&self) -> usize {
        self.l / 2
    }

    pub fn sequence(&self) -> &NamedSequence {
        &self.sequences[0]
    }

    /// Resolved parameters in a fixed order; execution-only keys are left out.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let seeds: Vec<String> = self.initial.iter().map(|p| p.to_string()).collect();
        let seqs: Vec<String> = self
            .sequences
            .iter()
            .map(|q| {
                let ph: Vec<String> = q.phases.phases().iter().map(|p| format!("{p:e}")).collect();
                format!("{}=[{}]", q.name, ph.join(","))
            })
            .collect();
        let _ = writeln!(s, "L={}", self.l);
        let _ = writeln!(s, "initial={}", seeds.join(","));
        let _ = writeln!(s, "J={:e}", self.j);
        let _ = writeln!(s, "h={:e}", self.h);
        let _ = writeln!(s, "t_prime={:e}", self.t_prime);
        let _ = writeln!(s, "sequence={}", seqs.join(";"));
        let _ = writeln!(s, "cycles={}", self.cycles);
        let _ = writeln!(s, "grid={}", self.grid);
        let _ = writeln!(s, "grid_mode={:?}", self.grid_mode);
        let _ = writeln!(s, "burn_in={}", self.burn_in);
        let _ = writeln!(s, "max_fragment_dim={}", self.max_fragment_dim);
        let _ = writeln!(s, "dense_max_dim={}", self.dense_max_dim);
        let _ = writeln!(s, "ensemble_max_dim={}", self.ensemble_max_dim);
        s
    }

    pub fn hash(&self, command: &str) -> String {
        let digest = Sha256::digest(format!("command={command}\n{}", self.canonical()).as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut acc, b| {
            let _ = write!(acc, "{b:02x}");
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_real("-pi/2").unwrap(), -FRAC_PI_2);
        assert_eq!(parse_real("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real(" 1.25 ").unwrap(), 1.25);
        assert!(parse_real("pie").is_err());
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn defaults_are_the_l28_bb1_run() {
        let c = ExperimentConfig::from_text("", &[]).unwrap();
        assert_eq!(c.l, 28);
        assert_eq!(c.initial[0].to_string(), "ududududududud");
        assert_eq!(c.sequence().phases, bb1_phases());
        assert_eq!((c.j, c.h, c.t_prime, c.cycles), (1.0, 1.0, -FRAC_PI_2, 30));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::from_text("# c\nJ = 1\nbogus = 2\n", &[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = ExperimentConfig::from_text("initial = udxd\n", &[]).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let err = ExperimentConfig::from_text("L = 6\ninitial = udud\n", &[]).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn overrides_replace_file_values() {
        let c = ExperimentConfig::from_text("cycles = 5\n", &["cycles=7".into(), "sequence=trivial; [0, pi/2]".into()])
            .unwrap();
        assert_eq!(c.cycles, 7);
        assert_eq!(c.sequences.len(), 2);
        assert_eq!(c.sequences[1].phases.phases(), &[0.0, FRAC_PI_2]);
    }

    #[test]
    fn hash_ignores_execution_keys() {
        let a = ExperimentConfig::from_text("threads = 1\n", &[]).unwrap();
        let b = ExperimentConfig::from_text("threads = 4\nout = x.csv\n", &[]).unwrap();
        assert_eq!(a.hash("response"), b.hash("response"));
        assert_ne!(a.hash("response"), a.hash("transition"));
    }
}
