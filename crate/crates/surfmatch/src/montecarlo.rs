//! Seeded Monte Carlo estimation of the logical failure rate.
//!
//! Shot `i` always draws its faults from stream `i` of the seed and shots are
//! grouped into fixed chunks reduced in order, so the worker count changes
//! only the wall time.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use surfmatch_core::decoder::ShotDecoder;
use surfmatch_core::noise::{FaultSampler, FaultSet};
use surfmatch_core::syndrome::simulate;
use surfmatch_core::{MemoryBasis, MemoryCircuit};

use crate::error::{CliError, Result};
use crate::formats::FaultRecord;

/// Shots per work item.
pub const CHUNK: u64 = 2048;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence for `failures` out of `shots`.
pub fn wilson(failures: u64, shots: u64) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let n = shots as f64;
    let phat = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub distance: u32,
    pub rounds: u32,
    pub basis: MemoryBasis,
    pub p: f64,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ShotStats {
    pub config: RunConfig,
    pub failures: u64,
    /// Indices of the failing shots, ascending.
    pub failing: Vec<u64>,
    pub wall: Duration,
}

impl ShotStats {
    pub fn rate(&self) -> f64 {
        if self.config.shots == 0 {
            0.0
        } else {
            self.failures as f64 / self.config.shots as f64
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson(self.failures, self.config.shots)
    }

    pub fn shots_per_sec(&self) -> f64 {
        self.config.shots as f64 / self.wall.as_secs_f64().max(1e-9)
    }
}

/// A thread pool of `workers` threads, or rayon's default size for `None`.
pub fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

/// Runs `config.shots` shots through `decoder`, which must match the configured circuit.
pub fn run_monte_carlo(decoder: &ShotDecoder, config: RunConfig, pool: &rayon::ThreadPool) -> Result<ShotStats> {
    let c = decoder.circuit();
    if (c.distance(), c.rounds(), c.basis()) != (config.distance, config.rounds, config.basis) {
        return Err(CliError::Internal("decoder does not match the run configuration".into()));
    }
    let sampler = FaultSampler::new(c, config.p)?;
    let start = Instant::now();
    let chunks = config.shots.div_ceil(CHUNK);
    let per_chunk: Vec<Result<Vec<u64>>> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut failing = Vec::new();
                for shot in k * CHUNK..((k + 1) * CHUNK).min(config.shots) {
                    if decoder.fails(&sampler.sample(config.seed, shot))? {
                        failing.push(shot);
                    }
                }
                Ok(failing)
            })
            .collect()
    });
    let mut failing = Vec::new();
    for chunk in per_chunk {
        failing.extend(chunk?);
    }
    Ok(ShotStats { config, failures: failing.len() as u64, failing, wall: start.elapsed() })
}

/// Convenience wrapper building the circuit and decoder.
pub fn run_config(config: RunConfig, workers: Option<usize>) -> Result<ShotStats> {
    let circuit = MemoryCircuit::for_distance(config.distance, config.rounds, config.basis)?;
    let decoder = ShotDecoder::new(circuit)?;
    run_monte_carlo(&decoder, config, &pool(workers)?)
}

/// Regenerates shot `shot` of `config` as a replayable record.
pub fn record_shot(decoder: &ShotDecoder, config: &RunConfig, shot: u64) -> Result<FaultRecord> {
    let faults = FaultSampler::new(decoder.circuit(), config.p)?.sample(config.seed, shot);
    record_faults(decoder, config, shot, faults)
}

fn record_faults(decoder: &ShotDecoder, config: &RunConfig, shot: u64, faults: FaultSet) -> Result<FaultRecord> {
    let (events, _) = simulate(decoder.circuit(), &faults);
    Ok(FaultRecord {
        distance: config.distance,
        rounds: config.rounds,
        basis: config.basis,
        p: config.p,
        seed: config.seed,
        shot,
        failed: decoder.fails_simulated(&faults)?,
        faults: faults.as_slice().to_vec(),
        events: events.events().to_vec(),
    })
}

/// Outcome of re-running one dumped record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub shot: u64,
    pub failed: bool,
    pub events_match: bool,
    pub failure_match: bool,
    /// The faults equal what the seed regenerates for this shot.
    pub sample_match: bool,
}

impl Replay {
    pub fn reproduced(&self) -> bool {
        self.events_match && self.failure_match && self.sample_match
    }
}

/// Re-simulates and re-decodes a record through the full frame simulation.
pub fn replay(record: &FaultRecord) -> Result<Replay> {
    Ok(replay_all(std::slice::from_ref(record))?.remove(0))
}

/// [`replay`] for many records, building each circuit's decoder once.
pub fn replay_all(records: &[FaultRecord]) -> Result<Vec<Replay>> {
    let mut decoders: BTreeMap<(u32, u32, MemoryBasis), ShotDecoder> = BTreeMap::new();
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let key = (record.distance, record.rounds, record.basis);
        if !decoders.contains_key(&key) {
            let circuit = MemoryCircuit::for_distance(record.distance, record.rounds, record.basis)?;
            decoders.insert(key, ShotDecoder::new(circuit)?);
        }
        let decoder = &decoders[&key];
        let faults = FaultSet::new(decoder.circuit(), record.faults.clone())?;
        let sampled = FaultSampler::new(decoder.circuit(), record.p)?.sample(record.seed, record.shot);
        let config =
            RunConfig { distance: record.distance, rounds: record.rounds, basis: record.basis, p: record.p, shots: 0, seed: record.seed };
        let again = record_faults(decoder, &config, record.shot, faults.clone())?;
        if again.failed != decoder.fails(&faults)? {
            return Err(CliError::Internal("fast and simulated decoding disagree".into()));
        }
        out.push(Replay {
            shot: record.shot,
            failed: again.failed,
            events_match: again.events == record.events,
            failure_match: again.failed == record.failed,
            sample_match: sampled == faults,
        });
    }
    Ok(out)
}

/// One cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub stats: ShotStats,
    /// Compared with the next smaller distance at the same `p`: `Some(true)`
    /// when this distance fails significantly more often (disjoint intervals).
    pub increased: Option<bool>,
}

/// Runs every `(distance, p)` pair, distances ascending and `p` in the given order.
///
/// Rounds equal the distance when `rounds` is `None`.
pub fn run_sweep(
    distances: &[u32],
    ps: &[f64],
    rounds: Option<u32>,
    basis: MemoryBasis,
    shots: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let mut ds = distances.to_vec();
    ds.sort_unstable();
    ds.dedup();
    let pool = pool(workers)?;
    let mut rows: Vec<SweepRow> = Vec::new();
    for (i, &d) in ds.iter().enumerate() {
        let circuit = MemoryCircuit::for_distance(d, rounds.unwrap_or(d), basis)?;
        let decoder = ShotDecoder::new(circuit)?;
        for (j, &p) in ps.iter().enumerate() {
            let config = RunConfig { distance: d, rounds: rounds.unwrap_or(d), basis, p, shots, seed };
            let stats = run_monte_carlo(&decoder, config, &pool)?;
            let increased = (i > 0).then(|| {
                let prev = &rows[(i - 1) * ps.len() + j].stats;
                stats.interval().0 > prev.interval().1
            });
            rows.push(SweepRow { stats, increased });
        }
    }
    Ok(rows)
}

/// Sweep or single-run rows as CSV. Timing is left out so equal runs give equal bytes.
pub fn stats_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["distance", "rounds", "basis", "p", "shots", "failures", "rate", "ci_low", "ci_high", "seed", "increased_with_d"])?;
    for r in rows {
        let s = &r.stats;
        let c = &s.config;
        let (lo, hi) = s.interval();
        w.write_record([
            c.distance.to_string(),
            c.rounds.to_string(),
            c.basis.to_string(),
            c.p.to_string(),
            c.shots.to_string(),
            s.failures.to_string(),
            format!("{:.6e}", s.rate()),
            format!("{lo:.6e}"),
            format!("{hi:.6e}"),
            c.seed.to_string(),
            match r.increased {
                None => String::new(),
                Some(b) => (b as u8).to_string(),
            },
        ])?;
    }
    crate::formats::into_string(w)
}
