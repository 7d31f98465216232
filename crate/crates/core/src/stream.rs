//! Timestamped bearer-request streams and their on-disk formats.
//!
//! CSV carries a `timestamp_s,source_id` header (the id column may be empty).
//! The binary form is a little-endian `u64` event count followed by that many
//! little-endian `f64` timestamps in seconds; source ids are not stored.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub source: Option<u64>,
}

/// Time-ordered bearer requests.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventStream {
    events: Vec<Event>,
}

impl EventStream {
    /// Builds a stream, sorting stably by timestamp.
    pub fn from_events(mut events: Vec<Event>) -> Result<Self> {
        if let Some(bad) = events.iter().find(|e| !e.time.is_finite()) {
            return Err(Error::Input(format!("non-finite timestamp {}", bad.time)));
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        Ok(Self { events })
    }

    pub fn from_timestamps(times: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::from_events(
            times
                .into_iter()
                .map(|time| Event { time, source: None })
                .collect(),
        )
    }

    /// Homogeneous Poisson arrivals of intensity `rate` on `[0, horizon)`.
    pub fn poisson(rate: f64, horizon: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!("rate must be > 0, got {rate}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be > 0, got {horizon}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gap = Exp::new(rate).map_err(|e| Error::Domain(e.to_string()))?;
        let mut t = 0.0;
        let mut events = Vec::with_capacity((rate * horizon * 1.01) as usize + 16);
        loop {
            t += gap.sample(&mut rng);
            if t >= horizon {
                break;
            }
            events.push(Event { time: t, source: None });
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn timestamps(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.time)
    }

    /// Consecutive differences between timestamps.
    pub fn gaps(&self) -> Vec<f64> {
        self.events
            .windows(2)
            .map(|w| w[1].time - w[0].time)
            .collect()
    }

    /// Events with `start <= t < end`.
    pub fn slice(&self, start: f64, end: f64) -> EventStream {
        let lo = self.events.partition_point(|e| e.time < start);
        let hi = self.events.partition_point(|e| e.time < end);
        EventStream {
            events: self.events[lo..hi].to_vec(),
        }
    }

    /// Same events with every timestamp shifted by `-origin`.
    pub fn rebased(&self, origin: f64) -> EventStream {
        EventStream {
            events: self
                .events
                .iter()
                .map(|e| Event {
                    time: e.time - origin,
                    source: e.source,
                })
                .collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let wrap = |e: csv::Error| Error::Input(e.to_string());
        w.write_record(["timestamp_s", "source_id"]).map_err(wrap)?;
        for e in &self.events {
            let id = e.source.map(|s| s.to_string()).unwrap_or_default();
            w.write_record([format!("{:?}", e.time), id]).map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::Input(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(BufWriter::new(file)).map_err(|e| match e {
            Error::Input(msg) => Error::io(path, std::io::Error::other(msg)),
            other => other,
        })
    }

    pub fn write_binary<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(&(self.events.len() as u64).to_le_bytes())?;
        for e in &self.events {
            writer.write_all(&e.time.to_le_bytes())?;
        }
        writer.flush()
    }

    pub fn read_binary<R: Read>(mut reader: R) -> Result<Self> {
        let mut word = [0u8; 8];
        reader
            .read_exact(&mut word)
            .map_err(|e| Error::Input(format!("missing length prefix: {e}")))?;
        let n = u64::from_le_bytes(word);
        let mut times = Vec::with_capacity(n.min(1 << 24) as usize);
        for i in 0..n {
            reader
                .read_exact(&mut word)
                .map_err(|e| Error::Input(format!("truncated stream at event {i}: {e}")))?;
            times.push(f64::from_le_bytes(word));
        }
        Self::from_timestamps(times)
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(BufReader::new(file))
    }
}
