//! Command-line interface.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use surfmatch_core::bounds::{bound_table, parse_rational, path_count_bound, to_f64, BoundReport};
use surfmatch_core::decoder::ShotDecoder;
use surfmatch_core::lattice::build_lattice;
use surfmatch_core::oracles::{combination_count, enumerate_volume_paths, exhaustive_fault_sweep, sampled_fault_sweep, DEFAULT_SWEEP_CAP};
use surfmatch_core::{Layout, MemoryBasis, MemoryCircuit};

use crate::error::{CliError, Result};
use crate::formats;
use crate::montecarlo::{self, RunConfig, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// One Monte Carlo run at a single distance and p.
    Montecarlo,
    /// Monte Carlo over every distance and p given.
    Sweep,
    /// The logical error bound for each n and eps.
    Bounds,
    /// The detection lattice of one circuit.
    LatticeExport,
    /// Exhaustive or sampled decoding of every low-weight fault combination.
    SweepVerify,
    /// Re-run the shots of a failure dump.
    Replay,
    /// Crossing-path counts in the n^3 bulk volume against the 3n^2 11^(m-1) bound.
    Paths,
    /// The qubit layout as a text map.
    Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Z,
    X,
}

impl From<Basis> for MemoryBasis {
    fn from(b: Basis) -> Self {
        match b {
            Basis::Z => MemoryBasis::Z,
            Basis::X => MemoryBasis::X,
        }
    }
}

const AFTER_HELP: &str = "\
CSV columns by mode:
  montecarlo, sweep  distance,rounds,basis,p,shots,failures,rate,ci_low,ci_high,seed,increased_with_d
                     ci_low/ci_high: 95% Wilson interval. increased_with_d (sweep): 1 when the
                     interval lies entirely above that of the next smaller distance at the same p,
                     0 otherwise, empty for the smallest distance.
  bounds             n,eps,eps_float,bound   (bound is `diverges` for eps >= 1/484)
  lattice-export     degree,count            (--format text writes the full lattice)
  sweep-verify       distance,rounds,basis,weight,method,combinations,failures
  replay             shot,failed,events_match,failure_match,sample_match
  paths              n,m,count,face_t,face_row,face_col,bound

Exit status: 0 success, 1 usage or input error, 2 internal invariant violation.
Timing (wall time, shots/s) goes to stderr, so output files are reproducible.";

#[derive(Debug, Parser)]
#[command(name = "surfmatch", version, about = "Surface-code memory experiments with an exact unit-weight matching decoder")]
#[command(after_help = AFTER_HELP)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "montecarlo")]
    pub mode: Mode,
    /// Code distance; repeat for sweeps.
    #[arg(long = "distance", short = 'd')]
    pub distances: Vec<u32>,
    /// Error-detection rounds (default: the distance).
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Physical error rate; repeat for sweeps.
    #[arg(long = "p")]
    pub ps: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, value_enum, default_value = "z")]
    pub basis: Basis,
    /// RNG seed; required by montecarlo, sweep and sampled sweep-verify.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write every failing shot as a replayable fault record to this file.
    #[arg(long)]
    pub dump_failures: Option<PathBuf>,
    /// Input file for replay.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Lattice kind for lattice-export (default: the memory basis).
    #[arg(long, value_enum)]
    pub kind: Option<Basis>,
    /// Bound parameter eps (fraction, decimal or scientific); repeatable.
    #[arg(long)]
    pub eps: Vec<String>,
    /// Volume side n for bounds and paths; repeatable.
    #[arg(long = "n")]
    pub ns: Vec<u32>,
    /// Path length m for paths and the text bound report; repeatable.
    #[arg(long = "m")]
    pub ms: Vec<u32>,
    /// Line coefficient c (eps = c p) for the threshold in the text bound report.
    #[arg(long, default_value = "14/5")]
    pub coefficient: String,
    /// Highest fault weight for sweep-verify.
    #[arg(long, default_value_t = 2)]
    pub max_weight: u32,
    /// Samples per weight for sweep-verify; 0 runs exhaustively.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn seed(cli: &Cli) -> Result<u64> {
    cli.seed.ok_or_else(|| usage(format!("--seed is required for --mode {:?}", cli.mode).to_lowercase()))
}

fn one_distance(cli: &Cli) -> Result<u32> {
    match cli.distances.as_slice() {
        [d] => Ok(*d),
        [] => Err(usage("--distance is required")),
        _ => Err(usage("this mode takes a single --distance")),
    }
}

fn check_ps(ps: &[f64]) -> Result<()> {
    if ps.is_empty() {
        return Err(usage("--p is required"));
    }
    match ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(usage(format!("--p must lie in [0, 1], got {p}"))),
        None => Ok(()),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn stats_text(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let s = &r.stats;
        let c = &s.config;
        let (lo, hi) = s.interval();
        out.push_str(&format!(
            "d={} rounds={} basis={} p={} shots={} seed={}: {} failures, rate {:.4e} (95% CI {:.4e} .. {:.4e}){}\n",
            c.distance,
            c.rounds,
            c.basis,
            c.p,
            c.shots,
            c.seed,
            s.failures,
            s.rate(),
            lo,
            hi,
            if r.increased == Some(true) { ", higher than the next smaller distance" } else { "" },
        ));
    }
    out
}

fn run_montecarlo(cli: &Cli) -> Result<()> {
    let seed = seed(cli)?;
    check_ps(&cli.ps)?;
    let rows = if cli.mode == Mode::Montecarlo {
        let d = one_distance(cli)?;
        if cli.ps.len() != 1 {
            return Err(usage("montecarlo takes a single --p; use --mode sweep for grids"));
        }
        let config =
            RunConfig { distance: d, rounds: cli.rounds.unwrap_or(d), basis: cli.basis.into(), p: cli.ps[0], shots: cli.shots, seed };
        vec![SweepRow { stats: montecarlo::run_config(config, cli.workers)?, increased: None }]
    } else {
        if cli.distances.is_empty() {
            return Err(usage("--distance is required"));
        }
        montecarlo::run_sweep(&cli.distances, &cli.ps, cli.rounds, cli.basis.into(), cli.shots, seed, cli.workers)?
    };
    for r in &rows {
        let s = &r.stats;
        eprintln!(
            "d={} p={}: {} shots in {:.3} s ({:.0} shots/s)",
            s.config.distance,
            s.config.p,
            s.config.shots,
            s.wall.as_secs_f64(),
            s.shots_per_sec()
        );
        if r.increased == Some(true) {
            eprintln!("warning: failure rate at d={} p={} is above the next smaller distance", s.config.distance, s.config.p);
        }
    }
    if let Some(path) = &cli.dump_failures {
        let mut records = Vec::new();
        for r in &rows {
            let c = &r.stats.config;
            let decoder = ShotDecoder::new(MemoryCircuit::for_distance(c.distance, c.rounds, c.basis)?)?;
            for &shot in &r.stats.failing {
                let rec = montecarlo::record_shot(&decoder, c, shot)?;
                if !rec.failed {
                    return Err(CliError::Internal(format!("shot {shot} failed in the run but not on regeneration")));
                }
                records.push(rec);
            }
        }
        fs::write(path, formats::write_fault_records(&records, |r| Layout::new(r.distance).ok()))?;
    }
    let text = match cli.format {
        Format::Csv => montecarlo::stats_csv(&rows)?,
        Format::Text => stats_text(&rows),
    };
    emit(cli, &text)
}

fn parse_eps(cli: &Cli) -> Result<Vec<surfmatch_core::bounds::BigRational>> {
    let raw: Vec<&str> = if cli.eps.is_empty() { vec!["1/10000"] } else { cli.eps.iter().map(String::as_str).collect() };
    raw.iter().map(|s| parse_rational(s).ok_or_else(|| usage(format!("bad --eps `{s}`")))).collect()
}

fn run_bounds(cli: &Cli) -> Result<()> {
    let epss = parse_eps(cli)?;
    let ns: Vec<u32> = if cli.ns.is_empty() { (1..=10).collect() } else { cli.ns.clone() };
    if ns.contains(&0) {
        return Err(usage("--n must be at least 1"));
    }
    let text = match cli.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "eps", "eps_float", "bound"])?;
            for (n, eps, b) in bound_table(&ns, &epss)? {
                let bound = b.map_or("diverges".to_string(), |b| format!("{:.6e}", to_f64(&b)));
                w.write_record([n.to_string(), eps.to_string(), format!("{:e}", to_f64(&eps)), bound])?;
            }
            formats::into_string(w)?
        }
        Format::Text => {
            let c = parse_rational(&cli.coefficient).ok_or_else(|| usage(format!("bad --coefficient `{}`", cli.coefficient)))?;
            let mut out = String::new();
            for eps in &epss {
                for &n in &ns {
                    let m = cli.ms.first().copied().unwrap_or(n + 1);
                    out.push_str(&BoundReport::new(n, m, eps.clone(), c.clone())?.to_string());
                    out.push_str("\n\n");
                }
            }
            out
        }
    };
    emit(cli, &text)
}

fn circuit(cli: &Cli) -> Result<MemoryCircuit> {
    let d = one_distance(cli)?;
    Ok(MemoryCircuit::for_distance(d, cli.rounds.unwrap_or(d), cli.basis.into())?)
}

fn run_lattice_export(cli: &Cli) -> Result<()> {
    let c = circuit(cli)?;
    let kind = cli.kind.map_or(c.basis().kind(), |k| MemoryBasis::from(k).kind());
    let lattice = build_lattice(&c, kind)?;
    let text = match cli.format {
        Format::Csv => formats::degree_csv(&lattice)?,
        Format::Text => formats::export_lattice(&lattice),
    };
    emit(cli, &text)
}

fn run_sweep_verify(cli: &Cli) -> Result<()> {
    let c = circuit(cli)?;
    if cli.max_weight == 0 {
        return Err(usage("--max-weight must be at least 1"));
    }
    let mut rows = Vec::new();
    if cli.samples == 0 {
        let total: u128 = (1..=cli.max_weight).map(|w| combination_count(&c, w)).sum();
        if total > DEFAULT_SWEEP_CAP as u128 {
            return Err(usage(format!("{total} fault combinations exceed the exhaustive cap of {DEFAULT_SWEEP_CAP}; pass --samples")));
        }
        for census in exhaustive_fault_sweep(&c, cli.max_weight, DEFAULT_SWEEP_CAP)? {
            rows.push(("exhaustive", census));
        }
    } else {
        let seed = seed(cli)?;
        for w in 1..=cli.max_weight {
            rows.push(("sampled", sampled_fault_sweep(&c, w, cli.samples, seed)?));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["distance", "rounds", "basis", "weight", "method", "combinations", "failures"])?;
    for (method, census) in &rows {
        w.write_record([
            c.distance().to_string(),
            c.rounds().to_string(),
            c.basis().to_string(),
            census.weight.to_string(),
            method.to_string(),
            census.combinations.to_string(),
            census.failures.to_string(),
        ])?;
    }
    emit(cli, &formats::into_string(w)?)?;
    // The decoder corrects every combination of fewer than d/2 faults.
    if let Some((_, bad)) = rows.iter().find(|(_, r)| 2 * r.weight < c.distance() && r.failures > 0) {
        return Err(CliError::Internal(format!("{} weight-{} fault sets caused a logical failure", bad.failures, bad.weight)));
    }
    Ok(())
}

fn run_replay(cli: &Cli) -> Result<()> {
    let path = cli.input.as_ref().ok_or_else(|| usage("--input is required for replay"))?;
    let text = fs::read_to_string(path)?;
    let records = formats::parse_fault_records(&path.display().to_string(), &text)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["shot", "failed", "events_match", "failure_match", "sample_match"])?;
    let mut bad = 0;
    for r in montecarlo::replay_all(&records)? {
        bad += !r.reproduced() as usize;
        w.write_record(
            [r.shot as u64, r.failed as u64, r.events_match as u64, r.failure_match as u64, r.sample_match as u64].map(|v| v.to_string()),
        )?;
    }
    emit(cli, &formats::into_string(w)?)?;
    if bad > 0 {
        return Err(CliError::Internal(format!("{bad} of {} records did not reproduce", records.len())));
    }
    Ok(())
}

fn run_paths(cli: &Cli) -> Result<()> {
    let ns: Vec<u32> = if cli.ns.is_empty() { (1..=3).collect() } else { cli.ns.clone() };
    let ms: Vec<u32> = if cli.ms.is_empty() { (1..=7).collect() } else { cli.ms.clone() };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "m", "count", "face_t", "face_row", "face_col", "bound"])?;
    for &n in &ns {
        for &m in &ms {
            let e = enumerate_volume_paths(n, m)?;
            let mut rec = vec![n.to_string(), m.to_string(), e.count.to_string()];
            rec.extend(e.per_face.iter().map(u64::to_string));
            rec.push(path_count_bound(n, m)?.to_string());
            w.write_record(rec)?;
        }
    }
    emit(cli, &formats::into_string(w)?)
}

fn run_layout(cli: &Cli) -> Result<()> {
    emit(cli, &formats::layout_map(&Layout::new(one_distance(cli)?)?))
}

pub fn run(cli: &Cli) -> Result<()> {
    match cli.mode {
        Mode::Montecarlo | Mode::Sweep => run_montecarlo(cli),
        Mode::Bounds => run_bounds(cli),
        Mode::LatticeExport => run_lattice_export(cli),
        Mode::SweepVerify => run_sweep_verify(cli),
        Mode::Replay => run_replay(cli),
        Mode::Paths => run_paths(cli),
        Mode::Layout => run_layout(cli),
    }
}
