//! Event logs as bearer-request streams: parsing, windowing and per-window
//! exponential fits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::arrival::{KsReport, MIN_SIGNIFICANT_SAMPLES};
use crate::error::{Error, Result};
use crate::stream::{Event, EventStream};

/// What [`parse_trace`] kept and dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseReport {
    pub valid: usize,
    pub rejected: usize,
    /// Events sharing their timestamp with the previous one (kept).
    pub duplicates: usize,
    /// 1-based line numbers of the first rejected rows.
    pub rejected_lines: Vec<u64>,
}

const MAX_REPORTED_LINES: usize = 20;

/// Reads a `timestamp_s[,source_id]` CSV file.
pub fn parse_trace(path: &Path) -> Result<(EventStream, ParseReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trace_reader(file)
}

pub fn parse_trace_reader<R: Read>(reader: R) -> Result<(EventStream, ParseReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(format!("unreadable trace header: {e}")))?
        .clone();
    if headers.get(0) != Some("timestamp_s") {
        return Err(Error::Input(format!(
            "trace header must start with timestamp_s, got {:?}",
            headers.get(0).unwrap_or("")
        )));
    }
    let mut report = ParseReport::default();
    let mut events = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let parsed = row.ok().and_then(|r| parse_row(&r));
        match parsed {
            Some(e) => events.push(e),
            None => {
                report.rejected += 1;
                if report.rejected_lines.len() < MAX_REPORTED_LINES {
                    report.rejected_lines.push(line);
                }
            }
        }
    }
    if events.is_empty() {
        return Err(Error::Input(format!(
            "trace has no valid rows ({} rejected)",
            report.rejected
        )));
    }
    let stream = EventStream::from_events(events)?;
    report.valid = stream.len();
    report.duplicates = stream
        .events()
        .windows(2)
        .filter(|w| w[0].time == w[1].time)
        .count();
    Ok((stream, report))
}

fn parse_row(row: &csv::StringRecord) -> Option<Event> {
    if row.len() > 2 {
        return None;
    }
    let time: f64 = row.get(0)?.parse().ok()?;
    if !(time >= 0.0 && time.is_finite()) {
        return None;
    }
    let source = match row.get(1) {
        None | Some("") => None,
        Some(s) => Some(s.parse().ok()?),
    };
    Some(Event { time, source })
}

/// One analysis window `[start, end)` of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceWindow {
    pub start: f64,
    pub end: f64,
    pub n_events: usize,
    /// `(n - 1) / Σ gaps`; `None` with fewer than two distinct timestamps.
    pub lambda_hat: Option<f64>,
    /// Gaps against `Exp(λ̂)`; needs at least two gaps.
    pub ks: Option<KsReport>,
    pub low_confidence: bool,
}

impl TraceWindow {
    pub fn ks_pass_1pct(&self) -> Option<bool> {
        self.ks.as_ref().map(KsReport::pass_1pct)
    }
}

fn fit_window(start: f64, end: f64, times: &[f64]) -> Result<TraceWindow> {
    let n = times.len();
    let span = if n >= 2 { times[n - 1] - times[0] } else { 0.0 };
    let lambda_hat = (span > 0.0).then(|| (n - 1) as f64 / span);
    let ks = match lambda_hat {
        Some(rate) if n >= 3 => {
            let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
            gaps.sort_by(f64::total_cmp);
            Some(KsReport::new(&gaps, |x| -(-rate * x).exp_m1())?)
        }
        _ => None,
    };
    Ok(TraceWindow {
        start,
        end,
        n_events: n,
        lambda_hat,
        ks,
        low_confidence: n < MIN_SIGNIFICANT_SAMPLES,
    })
}

/// Partitions the trace into windows of `window_length` aligned to
/// multiples of it, from the window holding the first event to the one
/// holding the last.
pub fn window_and_fit(stream: &EventStream, window_length: f64) -> Result<Vec<TraceWindow>> {
    if !(window_length > 0.0 && window_length.is_finite()) {
        return Err(Error::Domain(format!(
            "window length must be > 0, got {window_length}"
        )));
    }
    let (Some(first), Some(last)) = (stream.events().first(), stream.events().last()) else {
        return Ok(Vec::new());
    };
    let k0 = (first.time / window_length).floor();
    let k1 = (last.time / window_length).floor();
    let count = (k1 - k0) as usize + 1;
    window_and_fit_range(stream, k0 * window_length, window_length, count)
}

/// Fits exactly `count` windows starting at `start`; events outside are
/// ignored.
pub fn window_and_fit_range(
    stream: &EventStream,
    start: f64,
    window_length: f64,
    count: usize,
) -> Result<Vec<TraceWindow>> {
    if !(window_length > 0.0 && window_length.is_finite()) {
        return Err(Error::Domain(format!(
            "window length must be > 0, got {window_length}"
        )));
    }
    let times: Vec<f64> = stream.timestamps().collect();
    (0..count)
        .map(|i| {
            let lo = start + i as f64 * window_length;
            let hi = start + (i + 1) as f64 * window_length;
            let a = times.partition_point(|&t| t < lo);
            let b = times.partition_point(|&t| t < hi);
            fit_window(lo, hi, &times[a..b])
        })
        .collect()
}

/// Measured rate of one window, as consumed by the scaling loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub start: f64,
    pub length: f64,
    pub lambda: f64,
}

/// `(start, λ̂)` per window; windows without a fit contribute rate 0.
pub fn replay_rate_series(windows: &[TraceWindow]) -> Vec<RatePoint> {
    windows
        .iter()
        .map(|w| RatePoint {
            start: w.start,
            length: w.end - w.start,
            lambda: w.lambda_hat.unwrap_or(0.0),
        })
        .collect()
}

/// Writes `window_start_s,n_events,lambda_hat,ks_stat,ks_pass_1pct`; fields
/// without a fit are left empty.
pub fn write_window_report<W: Write>(mut out: W, windows: &[TraceWindow]) -> std::io::Result<()> {
    writeln!(out, "window_start_s,n_events,lambda_hat,ks_stat,ks_pass_1pct")?;
    for w in windows {
        let lambda = w.lambda_hat.map(|l| format!("{l:?}")).unwrap_or_default();
        let (stat, pass) = match &w.ks {
            Some(k) => (format!("{:?}", k.statistic), k.pass_1pct().to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(out, "{:?},{},{lambda},{stat},{pass}", w.start, w.n_events)?;
    }
    out.flush()
}

/// Piecewise-constant rate profile for synthetic traces.
#[derive(Debug, Clone, PartialEq)]
pub struct DiurnalProfile {
    pub start: f64,
    pub window_length: f64,
    /// Requests per second in each window.
    pub rates: Vec<f64>,
}

impl DiurnalProfile {
    /// Eight one-hour windows from 5 AM with a morning ramp peaking at 10 AM.
    pub fn morning() -> Self {
        Self {
            start: 5.0 * 3600.0,
            window_length: 3600.0,
            rates: vec![0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 7.0, 6.0],
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rates: self.rates.iter().map(|r| r * factor).collect(),
            ..self.clone()
        }
    }

    /// Poisson arrivals at each window's rate.
    pub fn generate(&self, seed: u64) -> Result<EventStream> {
        if !(self.window_length > 0.0) {
            return Err(Error::Domain("window length must be > 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut times = Vec::new();
        for (i, &rate) in self.rates.iter().enumerate() {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::Domain(format!("window {i} has rate {rate}")));
            }
            if rate == 0.0 {
                continue;
            }
            let lo = self.start + i as f64 * self.window_length;
            let hi = lo + self.window_length;
            let gap = Exp::new(rate).map_err(|e| Error::Domain(e.to_string()))?;
            let mut t = lo;
            loop {
                t += gap.sample(&mut rng);
                if t >= hi {
                    break;
                }
                times.push(t);
            }
        }
        EventStream::from_timestamps(times)
    }
}
