//! Command-line front end: experiment configs, file formats, and the
//! subcommand drivers. Everything emits CSV; plotting is external.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bosonic::{
    configuration_count, exact_distribution, sample_exact, ENUMERATION_GUARD,
};
use crate::bounds::{
    lattice_tail_sum, lemma1_bound, lemma_s2_check, localization_check, lr_envelope_check,
    scaled_lattice_sum, timescales, tvd, BoundParams,
};
use crate::classical::{dp_distribution, markov_matrix, sample_dp_with};
use crate::compiler::{circuit_to_schedule, clements_decompose, depth_report, reconstruct};
use crate::dynamics::{
    anderson_hopping, evolve, random_hopping, validate_schedule, HoppingSchedule, Segment,
};
use crate::lattice::{build_lattice, initial_configuration, LatticeSpec};
use crate::{Error, Result};

/// Where the hopping matrix of an experiment comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSource {
    /// All adjacent hops 1, no disorder.
    Clean,
    /// Disordered diagonal, uniform in [-W, W].
    Anderson { w: f64 },
    /// Random valid hopping matrix.
    Random,
    /// Schedule read from a file (applied as-is, ignoring the time grid).
    File { path: String },
}

/// Parsed experiment configuration (plain key-value lines).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub beta: f64,
    pub c1: f64,
    pub d: usize,
    pub source: ScheduleSource,
    pub times: Vec<f64>,
    pub seed: u64,
    pub params: BoundParams,
    /// Disorder seeds for averaged checks.
    pub seeds: Vec<u64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut beta = 2.0;
        let mut c1 = 1.0;
        let mut d = 1usize;
        let mut source = ScheduleSource::Clean;
        let mut w = 0.0;
        let mut schedule_file = None;
        let mut times = vec![1.0];
        let mut seed = 0u64;
        let mut v = None;
        let mut xi = 1.0;
        let mut seeds = vec![0u64];

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Config(format!("line {}: missing value", lineno + 1)))?;
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value}", lineno + 1));
            match key {
                "n" => n = Some(value.parse().map_err(|_| bad("n"))?),
                "beta" => beta = value.parse().map_err(|_| bad("beta"))?,
                "c1" => c1 = value.parse().map_err(|_| bad("c1"))?,
                "d" => d = value.parse().map_err(|_| bad("d"))?,
                "schedule" => {
                    source = match value {
                        "clean" => ScheduleSource::Clean,
                        "anderson" => ScheduleSource::Anderson { w },
                        "random" => ScheduleSource::Random,
                        "file" => ScheduleSource::File { path: String::new() },
                        other => {
                            return Err(Error::Config(format!(
                                "line {}: unknown schedule source {other}",
                                lineno + 1
                            )))
                        }
                    }
                }
                "w" => w = value.parse().map_err(|_| bad("w"))?,
                "schedule_file" => schedule_file = Some(value.to_string()),
                "times" => {
                    times = value
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad("times")))
                        .collect::<Result<Vec<f64>>>()?
                }
                "seed" => seed = value.parse().map_err(|_| bad("seed"))?,
                "seeds" => {
                    seeds = value
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad("seeds")))
                        .collect::<Result<Vec<u64>>>()?
                }
                "v" => v = Some(value.parse().map_err(|_| bad("v"))?),
                "xi" => xi = value.parse().map_err(|_| bad("xi"))?,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other}",
                        lineno + 1
                    )))
                }
            }
        }
        let n = n.ok_or_else(|| Error::Config("missing required key n".into()))?;
        if let ScheduleSource::Anderson { .. } = source {
            source = ScheduleSource::Anderson { w };
        }
        if let ScheduleSource::File { .. } = source {
            let path = schedule_file
                .ok_or_else(|| Error::Config("schedule file requires schedule_file".into()))?;
            source = ScheduleSource::File { path };
        }
        if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("times must be strictly increasing".into()));
        }
        let params = BoundParams {
            v: v.unwrap_or_else(|| crate::bounds::default_velocity(d)),
            xi,
        };
        Ok(ExperimentConfig {
            n,
            beta,
            c1,
            d,
            source,
            times,
            seed,
            params,
            seeds,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Build the lattice and fail fast on every guard before any heavy work.
    pub fn prepare(&self) -> Result<LatticeSpec> {
        let spec = build_lattice(self.n, self.beta, self.c1, self.d)?;
        let count = configuration_count(spec.m, self.n as u32);
        if count > ENUMERATION_GUARD {
            return Err(Error::EnumerationGuard(count, ENUMERATION_GUARD));
        }
        if self.n > crate::bosonic::BOSON_GUARD {
            return Err(Error::TooManyBosons(self.n, crate::bosonic::BOSON_GUARD));
        }
        Ok(spec)
    }

    /// The hopping matrix for one disorder seed.
    pub fn hopping(&self, spec: &LatticeSpec, seed: u64) -> Result<DMatrix<Complex64>> {
        match &self.source {
            ScheduleSource::Clean => Ok(anderson_hopping(spec, 0.0, 0)),
            ScheduleSource::Anderson { w } => Ok(anderson_hopping(spec, *w, seed)),
            ScheduleSource::Random => Ok(random_hopping(spec, seed)),
            ScheduleSource::File { path } => {
                let sched = read_schedule(Path::new(path))?;
                let seg = sched
                    .segments
                    .first()
                    .ok_or_else(|| Error::Config("schedule file has no segments".into()))?;
                Ok(seg.j.clone())
            }
        }
    }
}

// --- file formats ---------------------------------------------------------

/// Matrix file: first line the size, then rows of `re,im` entries.
pub fn format_matrix(m: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    writeln!(out, "{}", m.nrows()).unwrap();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{},{}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn parse_matrix_lines<'a, I: Iterator<Item = &'a str>>(
    lines: &mut I,
) -> Result<DMatrix<Complex64>> {
    let size_line = lines
        .next()
        .ok_or_else(|| Error::Parse("missing matrix size line".into()))?;
    let m: usize = size_line
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad matrix size: {size_line}")))?;
    let mut data = Vec::with_capacity(m * m);
    for i in 0..m {
        let row_line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing matrix row {i}")))?;
        let entries: Vec<&str> = row_line.split_whitespace().collect();
        if entries.len() != m {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {m}",
                entries.len()
            )));
        }
        for entry in entries {
            let (re, im) = entry
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad entry: {entry}")))?;
            let re: f64 = re.parse().map_err(|_| Error::Parse(format!("bad entry: {entry}")))?;
            let im: f64 = im.parse().map_err(|_| Error::Parse(format!("bad entry: {entry}")))?;
            data.push(Complex64::new(re, im));
        }
    }
    Ok(DMatrix::from_row_slice(m, m, &data))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<Complex64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    parse_matrix_lines(&mut lines)
}

/// Schedule file: repeated (duration line, matrix block).
pub fn format_schedule(sched: &HoppingSchedule) -> String {
    let mut out = String::new();
    for seg in &sched.segments {
        writeln!(out, "{}", seg.duration).unwrap();
        out.push_str(&format_matrix(&seg.j));
    }
    out
}

pub fn read_schedule(path: &Path) -> Result<HoppingSchedule> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let mut segments = Vec::new();
    while lines.peek().is_some() {
        let dur_line = lines.next().unwrap();
        let duration: f64 = dur_line
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad duration: {dur_line}")))?;
        let j = parse_matrix_lines(&mut lines)?;
        segments.push(Segment { duration, j });
    }
    if segments.is_empty() {
        return Err(Error::Parse("schedule file has no segments".into()));
    }
    Ok(HoppingSchedule::new(segments))
}

// --- subcommands ----------------------------------------------------------

/// One row per (n, t) grid point comparing D_U against D_DP.
pub fn cmd_phase_diagram(config: &ExperimentConfig) -> Result<String> {
    let spec = config.prepare()?;
    let r = initial_configuration(&spec);
    let j = config.hopping(&spec, config.seed)?;
    let (t_easy, t_hard_scale) =
        timescales(config.n, config.beta, config.c1, config.d, &config.params)?;
    let length = spec.length_scale;

    let mut out = String::from("n,m,L,t,vt_over_L,tvd,lemma1_bound,t_easy,t_hard_scale\n");
    for &t in &config.times {
        let sched = HoppingSchedule::single(j.clone(), t);
        let prop = evolve(&sched)?;
        let du = exact_distribution(&prop, &r)?;
        let ddp = dp_distribution(&markov_matrix(&prop)?, &r)?;
        let dist = tvd(&du, &ddp)?;
        let bound = lemma1_bound(length, config.params.v * t, config.params.xi, config.d);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            config.n,
            spec.m,
            length,
            t,
            config.params.v * t / length,
            dist,
            bound,
            t_easy,
            t_hard_scale
        )
        .unwrap();
    }
    Ok(out)
}

/// Bound-check battery; the returned flag is true iff every row passed.
pub fn cmd_check(config: &ExperimentConfig) -> Result<(String, bool)> {
    let spec = config.prepare()?;
    let r = initial_configuration(&spec);
    let mut out = String::from("check,param,value,measured,envelope,ratio,pass\n");
    let mut all_pass = true;
    let emit = |out: &mut String,
                    check: &str,
                    param: &str,
                    value: f64,
                    measured: f64,
                    envelope: f64,
                    ratio: f64,
                    pass: bool| {
        writeln!(
            out,
            "{check},{param},{value},{measured},{envelope},{ratio},{pass}"
        )
        .unwrap();
        pass
    };

    for &seed in &config.seeds {
        let j = config.hopping(&spec, seed)?;
        for &t in &config.times {
            let sched = HoppingSchedule::single(j.clone(), t);
            let prop = evolve(&sched)?;
            let report = lr_envelope_check(&prop, t, &config.params, &spec)?;
            let pass = report.violations.is_empty();
            all_pass &= emit(
                &mut out,
                "lr_envelope",
                "t",
                t,
                report.max_excess,
                0.0,
                report.violations.len() as f64,
                pass,
            );

            let loc = localization_check(&prop, &spec)?;
            all_pass &= emit(
                &mut out,
                "localization_fit",
                "t",
                t,
                loc.fitted_xi,
                loc.zero_violation_xi,
                0.0,
                loc.zero_violation_xi.is_finite() && loc.zero_violation_xi > 0.0,
            );

            let s2 = lemma_s2_check(&prop, &r, &spec, &config.params, t)?;
            all_pass &= emit(
                &mut out,
                "lemma_s2",
                "t",
                t,
                s2.max_c,
                s2.envelope,
                s2.ratio,
                s2.ratio.is_finite(),
            );
        }
    }

    for &l in &[5.0f64, 10.0, 20.0, 40.0] {
        let (sum, ratio) = lattice_tail_sum(l, config.params.xi, config.d);
        all_pass &= emit(
            &mut out,
            "lemma_s3",
            "L",
            l,
            sum,
            config.params.xi * l.powf(config.d as f64 - 1.0) * (-l / config.params.xi).exp(),
            ratio,
            ratio.is_finite() && ratio > 0.0,
        );
    }
    for &l in &[2.0f64, 4.0, 8.0] {
        let (sum, ratio) = scaled_lattice_sum(l, config.params.xi, config.d);
        all_pass &= emit(
            &mut out,
            "lemma_s4",
            "L",
            l,
            sum,
            (-2.0 * l / config.params.xi).exp(),
            ratio,
            ratio.is_finite() && ratio > 0.0,
        );
    }
    Ok((out, all_pass))
}

/// Outputs of a compile run, ready to be written to files.
pub struct CompileOutput {
    pub circuit_text: String,
    pub schedule_text: String,
    pub report_text: String,
    pub reconstruction_error: f64,
}

pub fn cmd_compile(u: &DMatrix<Complex64>, n: usize, beta: f64, d: usize) -> Result<CompileOutput> {
    let circuit = clements_decompose(u)?;
    let rec = reconstruct(&circuit)?;
    let err = (&rec - u).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sched = circuit_to_schedule(&circuit)?;
    let report = depth_report(&circuit, n, beta, d)?;
    let mut report_text = String::new();
    writeln!(report_text, "layers,{}", report.layers).unwrap();
    writeln!(report_text, "gates,{}", report.gate_count).unwrap();
    writeln!(report_text, "schedule_time,{}", report.schedule_time).unwrap();
    writeln!(report_text, "t_hard_scale,{}", report.t_hard_scale).unwrap();
    writeln!(report_text, "reconstruction_error,{err:e}").unwrap();
    Ok(CompileOutput {
        circuit_text: circuit.serialize(),
        schedule_text: format_schedule(&sched),
        report_text,
        reconstruction_error: err,
    })
}

/// Propagator for the configured schedule at the last grid time.
pub fn cmd_evolve(config: &ExperimentConfig) -> Result<String> {
    let spec = config.prepare()?;
    let t = *config.times.last().unwrap();
    let prop = match &config.source {
        ScheduleSource::File { path } => {
            let sched = read_schedule(Path::new(path))?;
            if !validate_schedule(&sched, &spec)?.is_empty() {
                return Err(Error::InvalidSchedule(
                    "schedule violates lattice constraints".into(),
                ));
            }
            evolve(&sched)?
        }
        _ => {
            let j = config.hopping(&spec, config.seed)?;
            evolve(&HoppingSchedule::single(j, t))?
        }
    };
    Ok(format_matrix(&prop.r))
}

/// Sample streams, one occupation vector per line.
pub fn cmd_sample(
    config: &ExperimentConfig,
    sampler: &str,
    count: usize,
) -> Result<String> {
    let spec = config.prepare()?;
    let r = initial_configuration(&spec);
    let t = *config.times.last().unwrap();
    let j = config.hopping(&spec, config.seed)?;
    let prop = evolve(&HoppingSchedule::single(j, t))?;
    let samples = match sampler {
        "exact" => {
            let dist = exact_distribution(&prop, &r)?;
            sample_exact(&dist, config.seed, count)?
        }
        "dp" => {
            use rand::SeedableRng;
            let p = markov_matrix(&prop)?;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(config.seed);
            (0..count).map(|_| sample_dp_with(&p, &r, &mut rng)).collect()
        }
        other => return Err(Error::Config(format!("unknown sampler: {other}"))),
    };
    let mut out = String::new();
    for s in samples {
        writeln!(out, "{}", s.to_key()).unwrap();
    }
    Ok(out)
}

/// TVD between D_U and D_DP at each grid time.
pub fn cmd_tvd(config: &ExperimentConfig) -> Result<String> {
    let spec = config.prepare()?;
    let r = initial_configuration(&spec);
    let j = config.hopping(&spec, config.seed)?;
    let mut out = String::from("t,tvd\n");
    for &t in &config.times {
        let prop = evolve(&HoppingSchedule::single(j.clone(), t))?;
        let du = exact_distribution(&prop, &r)?;
        let ddp = dp_distribution(&markov_matrix(&prop)?, &r)?;
        writeln!(out, "{},{}", t, tvd(&du, &ddp)?).unwrap();
    }
    Ok(out)
}

/// Map an error to the documented process exit code (1 validation,
/// 2 guard exceeded).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EnumerationGuard(..)
        | Error::FockGuard(..)
        | Error::PermanentTooLarge(..)
        | Error::TooManyBosons(..) => 2,
        _ => 1,
    }
}
