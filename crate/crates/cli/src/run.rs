use std::f64::consts::PI;
use std::fmt::Write as _;

use fragqsp::bdg::{
    evolve_correlation, neel_transition_probability, return_probability, sectors, single_particle_unitary,
    CorrelationMatrix,
};
use fragqsp::evolve::{schedule_from_phases, DriveEngine, PropagatorConfig};
use fragqsp::fragment::{build_fragment_with_capacity, partition_regions_confirmed};
use fragqsp::observables::{diagonal_ensemble_profile, krylov_profile, time_average, SeededRun, StroboscopicRecord};
use fragqsp::qsp::compose_qsp;
use fragqsp::{ConservedCharges, DriveScheduleF64, PseudospinString, RegionPartition};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, GridMode, NamedSequence};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerances applied by `compare`.
pub const PROBABILITY_TOL: f64 = 1e-10;
pub const SIGMA_Z_TOL: f64 = 1e-9;

/// Rendered artifact plus a verification failure, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub failure: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

/// Shortest round-trip form, switching to exponent notation outside `[1e-4, 1e6)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn header(config: &ExperimentConfig, command: &str) -> String {
    format!("# fragqsp {VERSION}\n# command: {command}\n# config_sha256: {}\n", config.hash(command))
}

fn propagator_config(config: &ExperimentConfig) -> PropagatorConfig {
    PropagatorConfig { dense_max_dim: config.dense_max_dim, ..PropagatorConfig::default() }
}

fn schedule(config: &ExperimentConfig, seq: &NamedSequence) -> Result<DriveScheduleF64, CliError> {
    Ok(schedule_from_phases(&seq.phases, config.j, config.h, config.t_prime)?)
}

fn seeded_run(config: &ExperimentConfig, seed: &PseudospinString) -> Result<SeededRun<f64>, CliError> {
    SeededRun::new(seed, config.max_fragment_dim, propagator_config(config)).map_err(|e| match e {
        fragqsp::Error::Capacity { limit } => {
            CliError::Capacity(format!("fragment of {seed} has more than max_fragment_dim = {limit} states"))
        }
        other => other.into(),
    })
}

/// Run `f` on a pool with `config.threads` workers.
pub fn with_pool<R: Send>(config: &ExperimentConfig, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::config(None, format!("threads: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub seed: PseudospinString,
    pub dim: usize,
    pub charges: ConservedCharges,
    pub partition: RegionPartition,
}

pub fn census(config: &ExperimentConfig) -> Result<Vec<CensusRow>, CliError> {
    config
        .initial
        .par_iter()
        .map(|seed| {
            let basis = build_fragment_with_capacity(seed.encode(), config.max_fragment_dim).map_err(|e| match e {
                fragqsp::Error::Capacity { limit } => {
                    CliError::Capacity(format!("fragment of {seed} has more than max_fragment_dim = {limit} states"))
                }
                other => other.into(),
            })?;
            Ok(CensusRow {
                seed: seed.clone(),
                dim: basis.dim(),
                charges: basis.charges(),
                partition: partition_regions_confirmed(seed, &basis),
            })
        })
        .collect()
}

pub fn run_fragment(config: &ExperimentConfig) -> Result<Output, CliError> {
    let rows = with_pool(config, || census(config))??;
    let mut s = header(config, "fragment");
    s.push_str("seed,L,dim,n_tot,c,n_even,n_odd,regions,integrable\n");
    for r in rows {
        let c = r.charges;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            config.l,
            r.dim,
            c.n_tot,
            c.c_com,
            c.n_even,
            c.n_odd,
            r.partition,
            r.partition.is_integrable()
        );
    }
    Ok(Output::ok(s))
}

/// `|P|^2` and `|Q|^2 (1 - a^2)` for each sequence at one signal value.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseRow {
    pub lambda: Option<usize>,
    pub x: f64,
    pub a: f64,
    pub p2: Vec<f64>,
    pub q2: Vec<f64>,
}

fn response_row(config: &ExperimentConfig, lambda: Option<usize>, x: f64, a: f64) -> Result<ResponseRow, CliError> {
    let (mut p2, mut q2) = (Vec::new(), Vec::new());
    for seq in &config.sequences {
        let u = compose_qsp(&seq.phases, a)?;
        p2.push(u.m[0][0].norm_sqr());
        q2.push(u.m[0][1].norm_sqr());
    }
    Ok(ResponseRow { lambda, x, a, p2, q2 })
}

/// Signal `a(x) = cos(2 J t' cos x)` on a uniform `x` grid or at the sector momenta.
pub fn response(config: &ExperimentConfig) -> Result<Vec<ResponseRow>, CliError> {
    match config.grid_mode {
        GridMode::Dense => (0..config.grid)
            .into_par_iter()
            .map(|k| {
                let x = PI * k as f64 / (config.grid - 1) as f64;
                let a = (2.0 * config.j * config.t_prime * x.cos()).cos();
                response_row(config, None, x, a)
            })
            .collect(),
        GridMode::Sectors => sectors(config.n(), config.j, config.t_prime)?
            .iter()
            .map(|s| response_row(config, Some(s.lambda), s.momentum(config.n()), s.signal))
            .collect(),
    }
}

pub fn run_response(config: &ExperimentConfig) -> Result<Output, CliError> {
    let rows = with_pool(config, || response(config))??;
    let mut s = header(config, "response");
    let mut cols: Vec<String> = Vec::new();
    if config.grid_mode == GridMode::Sectors {
        cols.push("lambda".into());
    }
    cols.extend(["x".into(), "a".into()]);
    cols.extend(config.sequences.iter().map(|q| format!("p2_{}", q.name)));
    cols.extend(config.sequences.iter().map(|q| format!("q2_{}", q.name)));
    let _ = writeln!(s, "{}", cols.join(","));
    for r in rows {
        let mut fields: Vec<String> = r.lambda.map(|l| l.to_string()).into_iter().collect();
        fields.extend([fmt_f64(r.x), fmt_f64(r.a)]);
        fields.extend(r.p2.iter().chain(&r.q2).map(|&v| fmt_f64(v)));
        let _ = writeln!(s, "{}", fields.join(","));
    }
    Ok(Output::ok(s))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRow {
    pub lambda: usize,
    pub x: f64,
    pub a: f64,
    pub p2: f64,
    pub cumulative: f64,
}

pub fn transition(config: &ExperimentConfig) -> Result<Vec<TransitionRow>, CliError> {
    let n = config.n();
    let phases = &config.sequence().phases;
    let mut cumulative = 1.0;
    sectors(n, config.j, config.t_prime)?
        .iter()
        .map(|s| {
            let p2 = neel_transition_probability(std::slice::from_ref(s), phases)?;
            cumulative *= p2;
            Ok(TransitionRow { lambda: s.lambda, x: s.momentum(n), a: s.signal, p2, cumulative })
        })
        .collect()
}

pub fn run_transition(config: &ExperimentConfig) -> Result<Output, CliError> {
    let rows = transition(config)?;
    let mut s = header(config, "transition");
    s.push_str("lambda,x,a,p2,cumulative\n");
    for r in rows {
        let _ =
            writeln!(s, "{},{},{},{},{}", r.lambda, fmt_f64(r.x), fmt_f64(r.a), fmt_f64(r.p2), fmt_f64(r.cumulative));
    }
    Ok(Output::ok(s))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: String,
    pub n: usize,
    pub fragment_dim: usize,
    pub sequence: String,
    pub ed_probability: f64,
    /// Slater-determinant value from the single-particle unitary.
    pub determinant_probability: f64,
    /// Product over sectors; only defined for the Néel seed.
    pub sector_product: Option<f64>,
    pub probability_abs_diff: f64,
    pub cycles: usize,
    pub sigma_z_max_abs_diff: f64,
    pub probability_tolerance: f64,
    pub sigma_z_tolerance: f64,
    pub passed: bool,
}

pub fn compare(config: &ExperimentConfig) -> Result<CompareReport, CliError> {
    let seed = &config.initial[0];
    if let Some(m) = seed.symbols().iter().position(|p| p.is_fracton()) {
        return Err(CliError::config(
            None,
            format!(
                "compare needs a spin-only seed; {seed} has a fracton at pseudospin {}, where the chain is not \
                 a free-fermion model and no analytic reference exists",
                m + 1
            ),
        ));
    }
    let n = seed.len();
    let seq = config.sequence();
    let sched = schedule(config, seq)?;
    let run = seeded_run(config, seed)?;

    let evolved = run.engine.apply(&sched, &run.initial)?;
    let ed_probability = run.initial.inner(&evolved).norm_sqr();
    let u = single_particle_unitary(&sched, n);
    let determinant_probability = return_probability(&u, seed)?;
    let sector_product = if *seed == PseudospinString::neel(n)? {
        Some(neel_transition_probability(&sectors(n, config.j, config.t_prime)?, &seq.phases)?)
    } else {
        None
    };
    let probability_abs_diff = sector_product
        .iter()
        .chain(std::iter::once(&determinant_probability))
        .map(|p| (p - ed_probability).abs())
        .fold(0.0, f64::max);

    let record = run.stroboscopic(&sched, config.cycles)?;
    let mut c = CorrelationMatrix::<f64>::from_spins(seed)?;
    let mut sigma_z_max_abs_diff: f64 = 0.0;
    for l in 0..=config.cycles {
        for m in 1..=n {
            sigma_z_max_abs_diff = sigma_z_max_abs_diff.max((c.sigma_z(m) - record.at(l, m)).abs());
        }
        c = evolve_correlation(&c, &u)?;
    }

    let passed = probability_abs_diff < PROBABILITY_TOL && sigma_z_max_abs_diff < SIGMA_Z_TOL;
    Ok(CompareReport {
        tool: "fragqsp".into(),
        version: VERSION.into(),
        config_sha256: config.hash("compare"),
        seed: seed.to_string(),
        n,
        fragment_dim: run.basis.dim(),
        sequence: seq.name.clone(),
        ed_probability,
        determinant_probability,
        sector_product,
        probability_abs_diff,
        cycles: config.cycles,
        sigma_z_max_abs_diff,
        probability_tolerance: PROBABILITY_TOL,
        sigma_z_tolerance: SIGMA_Z_TOL,
        passed,
    })
}

pub fn run_compare(config: &ExperimentConfig) -> Result<Output, CliError> {
    let report = compare(config)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let failure = (!report.passed).then(|| {
        format!(
            "probability diff {:e} (tol {:e}), sigma_z diff {:e} (tol {:e})",
            report.probability_abs_diff, PROBABILITY_TOL, report.sigma_z_max_abs_diff, SIGMA_Z_TOL
        )
    });
    Ok(Output { text, failure })
}

pub struct Thermalization {
    pub seed: PseudospinString,
    pub fragment_dim: usize,
    pub record: StroboscopicRecord<f64>,
    pub time_avg: Vec<f64>,
    /// Present when the fragment is small enough for a dense Floquet unitary.
    pub diag_ensemble: Option<Vec<f64>>,
    pub krylov: Vec<f64>,
}

impl Thermalization {
    pub fn last(&self) -> &[f64] {
        self.record.last()
    }

    /// `max |time_avg - krylov|` over the 1-based sites `first..=last`.
    pub fn krylov_gap(&self, first: usize, last: usize) -> f64 {
        (first..=last).map(|m| (self.time_avg[m - 1] - self.krylov[m - 1]).abs()).fold(0.0, f64::max)
    }
}

pub fn thermalization(config: &ExperimentConfig, with_ensemble: bool) -> Result<Thermalization, CliError> {
    let seed = config.initial[0].clone();
    let sched = schedule(config, config.sequence())?;
    let run = seeded_run(config, &seed)?;
    let record = run.stroboscopic(&sched, config.cycles)?;
    let time_avg = time_average(&record, config.burn_in)?;
    let dim = run.basis.dim();
    let diag_ensemble = if with_ensemble && dim <= config.ensemble_max_dim && dim <= config.dense_max_dim {
        let u = DriveEngine::floquet_unitary(&run.engine, &sched)?;
        Some(diagonal_ensemble_profile(&u, &run.initial, &run.basis)?)
    } else {
        None
    };
    Ok(Thermalization { seed, fragment_dim: dim, record, time_avg, diag_ensemble, krylov: krylov_profile(&run.basis) })
}

pub fn render_stroboscopic(config: &ExperimentConfig, th: &Thermalization) -> String {
    let mut s = header(config, "stroboscopic");
    let _ = writeln!(s, "# seed: {} fragment_dim: {}", th.seed, th.fragment_dim);
    s.push_str("l,m,value\n");
    for (l, m, v) in th.record.rows() {
        let _ = writeln!(s, "{l},{m},{}", fmt_f64(v));
    }
    s
}

pub fn render_ensemble(config: &ExperimentConfig, th: &Thermalization) -> String {
    let mut s = header(config, "ensemble");
    let _ = writeln!(s, "# seed: {} fragment_dim: {} cycles: {}", th.seed, th.fragment_dim, th.record.cycles());
    if th.diag_ensemble.is_none() {
        let _ = writeln!(s, "# diag_ensemble skipped: fragment_dim above ensemble_max_dim or dense_max_dim");
    }
    s.push_str("m,final,time_avg,diag_ensemble,krylov_avg\n");
    for m in 0..th.krylov.len() {
        let diag = th.diag_ensemble.as_ref().map(|d| fmt_f64(d[m])).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            m + 1,
            fmt_f64(th.last()[m]),
            fmt_f64(th.time_avg[m]),
            diag,
            fmt_f64(th.krylov[m])
        );
    }
    s
}

pub fn run_stroboscopic(config: &ExperimentConfig) -> Result<Output, CliError> {
    Ok(Output::ok(render_stroboscopic(config, &thermalization(config, false)?)))
}

pub fn run_ensemble(config: &ExperimentConfig) -> Result<Output, CliError> {
    Ok(Output::ok(render_ensemble(config, &thermalization(config, true)?)))
}
