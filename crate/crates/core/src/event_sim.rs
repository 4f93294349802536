//! Monte Carlo time-tag generation and coincidence counting.
//!
//! Each setting combination is simulated as an independent run: pair emission
//! times follow a Poisson process, each pair's `{o, e, u}` outcome is drawn
//! from the joint outcome distribution, and only ordinary-port detections are
//! time-tagged (one detector per side). Background singles are independent
//! Poisson processes per arm and can only contribute accidental
//! coincidences.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{ReducedCounts, SettingPair, SettingsQuad};
use crate::error::{Error, Result};
use crate::quantum_model::{outcome_distribution, ArmParams, Side, SourceParams};

const NS_PER_S: f64 = 1e9;

/// Sorted ordinary-port detection times of one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    pub side: Side,
    pub pair: SettingPair,
    timestamps: Vec<u64>,
    duration_ns: u64,
}

fn check_sorted(ts: &[u64]) -> Result<()> {
    match ts.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(Error::InvalidStream(format!(
            "timestamps not sorted at index {}: {} after {}",
            i + 1,
            ts[i + 1],
            ts[i]
        ))),
        None => Ok(()),
    }
}

impl EventStream {
    pub fn new(side: Side, pair: SettingPair, timestamps: Vec<u64>, duration_ns: u64) -> Result<Self> {
        check_sorted(&timestamps)?;
        if let Some(&last) = timestamps.last() {
            if last >= duration_ns {
                return Err(Error::InvalidStream(format!(
                    "timestamp {last} outside [0, {duration_ns})"
                )));
            }
        }
        Ok(Self {
            side,
            pair,
            timestamps,
            duration_ns,
        })
    }

    pub fn timestamps(&self) -> &[u64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn duration_ns(&self) -> u64 {
        self.duration_ns
    }

    /// `events_<pair>_<A|B>.csv`
    pub fn file_name(side: Side, pair: SettingPair) -> String {
        let s = match side {
            Side::A => "A",
            Side::B => "B",
        };
        format!("events_{}_{s}.csv", pair.label())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(["timestamp_ns"])?;
        for t in &self.timestamps {
            w.write_record([t.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Reads a timestamp file; `duration_ns` defaults to one past the last event.
    pub fn read_csv(path: impl AsRef<Path>, side: Side, pair: SettingPair, duration_ns: Option<u64>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::Reader::from_reader(BufReader::new(file));
        let header = r.headers()?.clone();
        if header.len() != 1 || &header[0] != "timestamp_ns" {
            return Err(Error::InvalidStream(format!(
                "{}: expected header `timestamp_ns`",
                path.display()
            )));
        }
        let mut ts = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let t = rec[0]
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidStream(format!("{}: bad timestamp {:?}: {e}", path.display(), &rec[0])))?;
            ts.push(t);
        }
        let duration = duration_ns.unwrap_or_else(|| ts.last().map_or(0, |t| t + 1));
        Self::new(side, pair, ts, duration)
    }
}

/// Everything needed to simulate a four-setting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: SourceParams,
    pub arm_a: ArmParams,
    pub arm_b: ArmParams,
    pub settings: SettingsQuad,
    /// Measurement time per setting combination.
    pub duration_s: f64,
    pub seed: u64,
    /// Detection times are shifted by a uniform integer in `[-jitter, jitter]`.
    pub timing_jitter_ns: u64,
    pub window_ns: u64,
    /// Constant delay of Bob's arm.
    pub delay_b_ns: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.arm_a.validate()?;
        self.arm_b.validate()?;
        self.settings.validate()?;
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::param("duration_s", format!("{} must be > 0", self.duration_s)));
        }
        if self.window_ns == 0 {
            return Err(Error::param("window_ns", "must be > 0"));
        }
        Ok(())
    }

    pub fn duration_ns(&self) -> u64 {
        (self.duration_s * NS_PER_S).round() as u64
    }

    /// Expected number of produced pairs per setting combination.
    pub fn pairs_per_setting(&self) -> f64 {
        self.source.pair_rate_hz * self.duration_s
    }
}

/// Alice and Bob streams of one setting combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamPair {
    pub a: EventStream,
    pub b: EventStream,
}

/// Streams of all four setting combinations, indexed by [`SettingPair`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStreams {
    pub pairs: [StreamPair; 4],
}

impl RunStreams {
    pub fn get(&self, pair: SettingPair) -> &StreamPair {
        &self.pairs[pair as usize]
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for sp in &self.pairs {
            for s in [&sp.a, &sp.b] {
                s.write_csv(dir.join(EventStream::file_name(s.side, s.pair)))?;
            }
        }
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>, duration_ns: Option<u64>) -> Result<Self> {
        let dir = dir.as_ref();
        let read =
            |side, pair| EventStream::read_csv(dir.join(EventStream::file_name(side, pair)), side, pair, duration_ns);
        let mut pairs = Vec::with_capacity(4);
        for pair in SettingPair::ALL {
            pairs.push(StreamPair {
                a: read(Side::A, pair)?,
                b: read(Side::B, pair)?,
            });
        }
        Ok(Self {
            pairs: pairs.try_into().expect("four setting pairs"),
        })
    }

    /// Splits every stream into `k` consecutive blocks; block `i` of the
    /// result holds block `i` of each stream.
    pub fn split(&self, k: usize) -> Result<Vec<RunStreams>> {
        let mut per_pair = Vec::with_capacity(4);
        for sp in &self.pairs {
            per_pair.push((split_into_blocks(&sp.a, k)?, split_into_blocks(&sp.b, k)?));
        }
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let pairs: Vec<StreamPair> = per_pair
                .iter()
                .map(|(a, b)| StreamPair {
                    a: a[i].clone(),
                    b: b[i].clone(),
                })
                .collect();
            out.push(RunStreams {
                pairs: pairs.try_into().expect("four setting pairs"),
            });
        }
        Ok(out)
    }
}

fn setting_rng(seed: u64, pair: SettingPair) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pair as u64);
    rng
}

fn jittered<R: Rng>(rng: &mut R, t: u64, offset: u64, jitter: u64, duration_ns: u64) -> u64 {
    let shift = if jitter > 0 {
        rng.random_range(-(jitter as i64)..=jitter as i64)
    } else {
        0
    };
    let t = (t + offset) as i64 + shift;
    t.clamp(0, duration_ns as i64 - 1) as u64
}

fn add_background<R: Rng>(rng: &mut R, ts: &mut Vec<u64>, rate_hz: f64, duration_s: f64, duration_ns: u64) {
    let mean = rate_hz * duration_s;
    if mean <= 0.0 || duration_ns == 0 {
        return;
    }
    let n = Poisson::new(mean).expect("positive mean").sample(rng) as u64;
    ts.extend((0..n).map(|_| rng.random_range(0..duration_ns)));
}

/// Simulates one setting combination. Deterministic in `(config.seed, pair)`.
pub fn simulate_setting(config: &RunConfig, pair: SettingPair) -> Result<StreamPair> {
    config.validate()?;
    let duration_ns = config.duration_ns();
    let (alpha, beta) = config.settings.angles(pair);
    let rho = config.source.density_matrix()?;
    let cdf = outcome_distribution(&rho, &config.arm_a, &config.arm_b, alpha, beta).cumulative();
    let mut rng = setting_rng(config.seed, pair);

    let mut ts_a = Vec::new();
    let mut ts_b = Vec::new();
    if config.source.pair_rate_hz > 0.0 {
        let gap = Exp::new(config.source.pair_rate_hz * 1e-9).expect("positive rate");
        let mut t = 0.0f64;
        loop {
            t += gap.sample(&mut rng);
            if t >= duration_ns as f64 {
                break;
            }
            let emitted = t as u64;
            let u: f64 = rng.random::<f64>() * cdf[8];
            let cell = cdf.iter().position(|&c| u < c).unwrap_or(8);
            // cell = 3 * alice + bob over {o, e, u}; only o is recorded.
            if cell / 3 == 0 {
                ts_a.push(jittered(&mut rng, emitted, 0, config.timing_jitter_ns, duration_ns));
            }
            if cell % 3 == 0 {
                ts_b.push(jittered(
                    &mut rng,
                    emitted,
                    config.delay_b_ns,
                    config.timing_jitter_ns,
                    duration_ns,
                ));
            }
        }
    }
    add_background(
        &mut rng,
        &mut ts_a,
        config.arm_a.background_rate_hz,
        config.duration_s,
        duration_ns,
    );
    add_background(
        &mut rng,
        &mut ts_b,
        config.arm_b.background_rate_hz,
        config.duration_s,
        duration_ns,
    );
    ts_a.sort_unstable();
    ts_b.sort_unstable();

    Ok(StreamPair {
        a: EventStream::new(Side::A, pair, ts_a, duration_ns)?,
        b: EventStream::new(Side::B, pair, ts_b, duration_ns)?,
    })
}

/// Simulates all four setting combinations concurrently.
pub fn simulate_run(config: &RunConfig) -> Result<RunStreams> {
    config.validate()?;
    let pairs: Vec<StreamPair> = SettingPair::ALL
        .par_iter()
        .map(|&p| simulate_setting(config, p))
        .collect::<Result<_>>()?;
    Ok(RunStreams {
        pairs: pairs.try_into().expect("four setting pairs"),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoincidenceResult {
    pub count: u64,
    /// Matched `(index in A, index in B)` pairs, increasing in both.
    pub matches: Vec<(usize, usize)>,
}

/// Greedy earliest-first matching in one forward merge pass.
pub fn match_sorted(a: &[u64], b: &[u64], window_ns: u64) -> Result<CoincidenceResult> {
    check_sorted(a)?;
    check_sorted(b)?;
    let mut matches = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].abs_diff(b[j]) <= window_ns {
            matches.push((i, j));
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok(CoincidenceResult {
        count: matches.len() as u64,
        matches,
    })
}

pub fn find_coincidences(a: &EventStream, b: &EventStream, window_ns: u64) -> Result<CoincidenceResult> {
    match_sorted(a.timestamps(), b.timestamps(), window_ns)
}

/// Ordinary-port counts of a run: singles are stream lengths, coincidences
/// come from [`find_coincidences`].
pub fn accumulate_counts(run: &RunStreams, window_ns: u64) -> Result<ReducedCounts> {
    let coinc = |p: SettingPair| -> Result<u64> {
        let sp = run.get(p);
        Ok(find_coincidences(&sp.a, &sp.b, window_ns)?.count)
    };
    let counts = ReducedCounts::new(
        coinc(SettingPair::A1B1)?,
        run.get(SettingPair::A1B2).a.len() as u64,
        coinc(SettingPair::A1B2)?,
        run.get(SettingPair::A2B1).b.len() as u64,
        coinc(SettingPair::A2B1)?,
        coinc(SettingPair::A2B2)?,
    );
    counts.validate()?;
    Ok(counts)
}

/// Splits a stream into `k` consecutive windows of `duration / k` ns (the
/// last block also takes the remainder); timestamps are rebased per block.
pub fn split_into_blocks(stream: &EventStream, k: usize) -> Result<Vec<EventStream>> {
    if k < 1 {
        return Err(Error::param("blocks", "need at least one block"));
    }
    let width = stream.duration_ns / k as u64;
    let mut blocks = Vec::with_capacity(k);
    let mut rest = stream.timestamps();
    for i in 0..k {
        let start = width * i as u64;
        let (end, len) = if i + 1 == k {
            (u64::MAX, stream.duration_ns - start)
        } else {
            (start + width, width)
        };
        let n = rest.partition_point(|&t| t < end);
        let ts = rest[..n].iter().map(|t| t - start).collect();
        rest = &rest[n..];
        blocks.push(EventStream {
            side: stream.side,
            pair: stream.pair,
            timestamps: ts,
            duration_ns: len,
        });
    }
    Ok(blocks)
}

/// Per-block reduced counts of a run split into `k` time blocks.
pub fn blocked_counts(run: &RunStreams, k: usize, window_ns: u64) -> Result<Vec<ReducedCounts>> {
    run.split(k)?
        .par_iter()
        .map(|block| accumulate_counts(block, window_ns))
        .collect()
}
