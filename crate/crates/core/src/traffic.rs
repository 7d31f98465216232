//! Per-source regular/alarm traffic and the aggregate bearer-request stream.
//!
//! Each source divides the period `T` into `N` slots of length `δ`. In slot
//! `n` a source in Regular moves to Alarm with probability
//! `60 (n/N)^2 (1 - n/N)^3 / N`, i.e. the Beta(3,4) density sampled on the
//! slot grid. Alarm always returns to Regular in the next slot. Each alarm
//! visit produces one bearer request with probability `tx_probability`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1};

use crate::error::{Error, Result};
use crate::stream::{Event, EventStream};

/// Give up on a next-alarm search after this many whole periods.
const MAX_PERIODS: u64 = 1_000;

/// Probability of at least one Poisson(λ_A) packet in an alarm slot.
pub fn tx_probability_for_rate(alarm_rate: f64) -> f64 {
    -(-alarm_rate).exp_m1()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    period: f64,
    slot: f64,
    n_slots: u64,
    alarm_rate: f64,
    regular_rate: f64,
    tx_probability: f64,
}

impl TrafficParams {
    /// Slot grid with `N = round(T/δ)` slots, one packet per alarm slot on
    /// average and no regular-state traffic.
    pub fn new(period: f64, slot: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::config("period_s", format!("must be > 0, got {period}")));
        }
        if !(slot.is_finite() && slot > 0.0) {
            return Err(Error::config("slot_s", format!("must be > 0, got {slot}")));
        }
        let n = (period / slot).round();
        if n < 100.0 {
            return Err(Error::config(
                "slot_s",
                format!("period/slot = {n} slots, at least 100 are required"),
            ));
        }
        if n > u32::MAX as f64 {
            return Err(Error::config("slot_s", format!("{n} slots is too fine a grid")));
        }
        let params = Self {
            period,
            slot,
            n_slots: n as u64,
            alarm_rate: 1.0,
            regular_rate: 0.0,
            tx_probability: tx_probability_for_rate(1.0),
        };
        // The largest per-slot probability is ~2.07/N; reject anything above 1.
        let peak = (0..=params.n_slots)
            .map(|k| beta_shape(k as f64 / params.n_slots as f64) / params.n_slots as f64)
            .fold(0.0, f64::max);
        if peak > 1.0 {
            return Err(Error::config("slot_s", "slot grid yields a probability above 1"));
        }
        Ok(params)
    }

    /// Sets λ_A and the matching `1 - e^{-λ_A}` transmission probability.
    pub fn with_alarm_rate(mut self, alarm_rate: f64) -> Result<Self> {
        if !(alarm_rate.is_finite() && alarm_rate > 0.0) {
            return Err(Error::config("alarm_rate", format!("must be > 0, got {alarm_rate}")));
        }
        self.alarm_rate = alarm_rate;
        self.tx_probability = tx_probability_for_rate(alarm_rate);
        Ok(self)
    }

    pub fn with_tx_probability(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::config("tx_probability", format!("must be in (0, 1], got {p}")));
        }
        self.tx_probability = p;
        Ok(self)
    }

    /// Packets per second emitted while in Regular (independent Poisson).
    pub fn with_regular_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::config("regular_rate", format!("must be >= 0, got {rate}")));
        }
        self.regular_rate = rate;
        Ok(self)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn slot(&self) -> f64 {
        self.slot
    }

    pub fn n_slots(&self) -> u64 {
        self.n_slots
    }

    pub fn alarm_rate(&self) -> f64 {
        self.alarm_rate
    }

    pub fn regular_rate(&self) -> f64 {
        self.regular_rate
    }

    pub fn tx_probability(&self) -> f64 {
        self.tx_probability
    }

    /// Converts an offset in seconds into a slot offset in `[0, N)`.
    pub fn offset_to_slots(&self, offset: f64) -> u64 {
        ((offset / self.slot).round() as u64) % self.n_slots
    }
}

fn beta_shape(x: f64) -> f64 {
    60.0 * x * x * (1.0 - x).powi(3)
}

/// Per-slot Regular→Alarm probability `f_b(n)`.
pub fn beta_pmf(n: u64, params: &TrafficParams) -> Result<f64> {
    let big_n = params.n_slots;
    if n > big_n {
        return Err(Error::Domain(format!("slot {n} outside [0, {big_n}]")));
    }
    let ratio = 1.0 / big_n as f64;
    Ok(beta_shape(n as f64 * ratio) * ratio)
}

/// Beta(3,4) density over one period, in s⁻¹.
pub fn beta_pdf(x: f64, period: f64) -> Result<f64> {
    if !(period > 0.0) {
        return Err(Error::Domain(format!("period must be > 0, got {period}")));
    }
    if !(0.0..=period).contains(&x) {
        return Err(Error::Domain(format!("time {x} outside [0, {period}]")));
    }
    Ok(beta_shape(x / period) / period)
}

/// Per-slot alarm probabilities over one period, with cumulative
/// log-survival sums for inverse-transform sampling.
#[derive(Debug, Clone)]
pub struct HazardGrid {
    probs: Vec<f64>,
    /// `cum[j] = Σ_{i<j} -ln(1 - p_i)` over slots with `p_i < 1`.
    cum: Vec<f64>,
    /// Slots where the transition is certain.
    certain: Vec<u64>,
}

impl HazardGrid {
    /// The sampled Beta(3,4) hazard of `params`.
    pub fn beta(params: &TrafficParams) -> Result<Self> {
        let probs = (0..params.n_slots)
            .map(|n| beta_pmf(n, params))
            .collect::<Result<Vec<_>>>()?;
        Self::from_probabilities(probs)
    }

    /// Any per-slot hazard with values in `[0, 1]`.
    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("empty hazard grid".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Domain(format!("hazard value {p} outside [0, 1]")));
        }
        let mut cum = Vec::with_capacity(probs.len() + 1);
        let mut certain = Vec::new();
        let mut acc = 0.0;
        cum.push(acc);
        for (i, &p) in probs.iter().enumerate() {
            if p >= 1.0 {
                certain.push(i as u64);
            } else {
                acc += -(-p).ln_1p();
            }
            cum.push(acc);
        }
        Ok(Self {
            probs,
            cum,
            certain,
        })
    }

    pub fn len(&self) -> u64 {
        self.probs.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability at a local slot index, wrapping modulo `N`.
    pub fn prob(&self, local: u64) -> f64 {
        self.probs[(local % self.len()) as usize]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// First slot `m > current_slot` whose Bernoulli trial at local slot
    /// `(m + offset) mod N` succeeds.
    ///
    /// Draws one Exp(1) variate and inverts the cumulative log-survival, so
    /// the cost is a binary search per period crossed instead of a trial per
    /// slot.
    pub fn sample_next_alarm<R: Rng + ?Sized>(
        &self,
        current_slot: u64,
        offset: u64,
        rng: &mut R,
    ) -> Result<u64> {
        let e: f64 = Exp1.sample(rng);
        self.next_alarm_for_budget(current_slot, offset, e)
    }

    /// Deterministic core of [`sample_next_alarm`](Self::sample_next_alarm):
    /// the first slot where the accumulated hazard reaches `budget`.
    pub fn next_alarm_for_budget(&self, current_slot: u64, offset: u64, budget: f64) -> Result<u64> {
        let n = self.len();
        let total = self.cum[n as usize];
        let mut slot = current_slot + 1;
        let mut local = (slot + offset % n) % n;
        let mut remaining = budget;
        let mut periods = 0u64;
        loop {
            let base = self.cum[local as usize];
            let target = base + remaining;
            let tail = &self.cum[local as usize + 1..];
            let idx = tail.partition_point(|&c| c < target) as u64;
            let mut hazard_hit = (idx < n - local).then_some(local + idx);
            // A zero-probability slot can only be hit through rounding.
            while let Some(j) = hazard_hit {
                if j < n && self.probs[j as usize] == 0.0 {
                    hazard_hit = (j + 1 < n).then_some(j + 1);
                } else {
                    break;
                }
            }
            let ci = self.certain.partition_point(|&c| c < local);
            let certain_hit = self.certain.get(ci).copied();
            let hit = match (hazard_hit, certain_hit) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            if let Some(j) = hit {
                return Ok(slot + (j - local));
            }
            remaining = target - total;
            slot += n - local;
            local = 0;
            periods += 1;
            if self.certain.is_empty() {
                if total <= 0.0 {
                    return Err(Error::Numerical("hazard grid is identically zero".into()));
                }
                let whole = (remaining / total).floor();
                if whole >= 1.0 {
                    if whole > MAX_PERIODS as f64 {
                        periods = MAX_PERIODS + 1;
                    } else {
                        remaining -= whole * total;
                        slot += whole as u64 * n;
                        periods += whole as u64;
                    }
                }
            }
            if periods > MAX_PERIODS {
                return Err(Error::Numerical(format!(
                    "no alarm within {MAX_PERIODS} periods; hazard per period = {total:e}"
                )));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Regular,
    Alarm,
}

/// Slot-level state of one source, used for step-by-step simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceState {
    pub mode: Mode,
    pub group_id: usize,
}

impl SourceState {
    pub fn new(group_id: usize) -> Self {
        Self {
            mode: Mode::Regular,
            group_id,
        }
    }

    /// Advances one slot. `u` is a uniform draw in `[0, 1)`; returns true on
    /// a transition into Alarm.
    pub fn step(&mut self, alarm_prob: f64, u: f64) -> bool {
        match self.mode {
            Mode::Alarm => {
                self.mode = Mode::Regular;
                false
            }
            Mode::Regular if u < alarm_prob => {
                self.mode = Mode::Alarm;
                true
            }
            Mode::Regular => false,
        }
    }
}

/// Groups of synchronized sources; group `g` runs its period shifted by
/// `offsets[g]` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct SourcePopulation {
    group_size: usize,
    offsets: Vec<f64>,
}

impl SourcePopulation {
    pub fn new(group_size: usize, offsets: Vec<f64>, period: f64) -> Result<Self> {
        if group_size == 0 {
            return Err(Error::config("group_size", "must be >= 1"));
        }
        if offsets.is_empty() {
            return Err(Error::config("n_groups", "must be >= 1"));
        }
        if let Some(w) = offsets.iter().find(|w| !(0.0..period).contains(*w)) {
            return Err(Error::config(
                "offsets_s",
                format!("offset {w} outside [0, {period})"),
            ));
        }
        Ok(Self {
            group_size,
            offsets,
        })
    }

    /// Offsets drawn i.i.d. Uniform[0, T) per group.
    pub fn uniform(group_size: usize, n_groups: usize, period: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let offsets = (0..n_groups)
            .map(|_| rng.random::<f64>() * period)
            .collect();
        Self::new(group_size, offsets, period)
    }

    /// Offsets `g T / n_groups`.
    pub fn evenly_spaced(group_size: usize, n_groups: usize, period: f64) -> Result<Self> {
        let offsets = (0..n_groups)
            .map(|g| g as f64 * period / n_groups.max(1) as f64)
            .collect();
        Self::new(group_size, offsets, period)
    }

    /// Every group with zero offset.
    pub fn synchronized(group_size: usize, n_groups: usize, period: f64) -> Result<Self> {
        Self::new(group_size, vec![0.0; n_groups], period)
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn n_groups(&self) -> usize {
        self.offsets.len()
    }

    /// Total number of sources Q.
    pub fn total_sources(&self) -> usize {
        self.group_size * self.offsets.len()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn group_of(&self, source: usize) -> usize {
        source / self.group_size
    }

    pub fn offset_of(&self, source: usize) -> f64 {
        self.offsets[self.group_of(source)]
    }
}

/// Outcome of [`RequestGenerator::generate`].
#[derive(Debug, Clone)]
pub struct Generated {
    pub stream: EventStream,
    pub alarm_count: u64,
}

/// Reusable generator; building the hazard grid is the expensive part.
#[derive(Debug, Clone)]
pub struct RequestGenerator {
    params: TrafficParams,
    grid: HazardGrid,
}

impl RequestGenerator {
    pub fn new(params: TrafficParams) -> Result<Self> {
        let grid = HazardGrid::beta(&params)?;
        Ok(Self { params, grid })
    }

    pub fn params(&self) -> &TrafficParams {
        &self.params
    }

    pub fn grid(&self) -> &HazardGrid {
        &self.grid
    }

    /// Simulates every source over `[0, horizon)`.
    ///
    /// Source `q` uses its own ChaCha stream, so the result depends only on
    /// `(population, params, horizon, seed)`.
    pub fn generate(
        &self,
        population: &SourcePopulation,
        horizon: f64,
        seed: u64,
    ) -> Result<Generated> {
        let period = self.params.period;
        if !(horizon >= period) {
            return Err(Error::config(
                "horizon_s",
                format!("horizon {horizon} s is shorter than the period {period} s"),
            ));
        }
        let slot = self.params.slot;
        let tx = self.params.tx_probability;
        let mut events = Vec::new();
        let mut alarm_count = 0u64;
        for q in 0..population.total_sources() {
            let offset = self.params.offset_to_slots(population.offset_of(q));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(q as u64);
            // Source starts in Regular at slot 0.
            let mut current = 0u64;
            loop {
                let m = self.grid.sample_next_alarm(current, offset, &mut rng)?;
                let t = m as f64 * slot;
                if t >= horizon {
                    break;
                }
                alarm_count += 1;
                if rng.random::<f64>() < tx {
                    events.push(Event {
                        time: t,
                        source: Some(q as u64),
                    });
                }
                // Alarm at m forces Regular at m + 1.
                current = m + 1;
            }
            if self.params.regular_rate > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((1u64 << 63) | q as u64);
                let exp = Exp::new(self.params.regular_rate)
                    .map_err(|e| Error::config("regular_rate", e.to_string()))?;
                let mut t = exp.sample(&mut rng);
                while t < horizon {
                    events.push(Event {
                        time: t,
                        source: Some(q as u64),
                    });
                    t += exp.sample(&mut rng);
                }
            }
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.source.cmp(&b.source)));
        Ok(Generated {
            stream: EventStream::from_events(events)?,
            alarm_count,
        })
    }
}

/// Bearer requests of every source over `[0, horizon)`.
pub fn generate_requests(
    population: &SourcePopulation,
    params: &TrafficParams,
    horizon: f64,
    seed: u64,
) -> Result<EventStream> {
    Ok(RequestGenerator::new(params.clone())?
        .generate(population, horizon, seed)?
        .stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(n: u64) -> TrafficParams {
        TrafficParams::new(10.0, 10.0 / n as f64).unwrap()
    }

    #[test]
    fn pmf_reference_values() {
        let p = TrafficParams::new(1.0, 0.01).unwrap();
        assert_eq!(p.n_slots(), 100);
        // n/N = 0.5: 60 * 0.25 * 0.125 / 100
        assert_abs_diff_eq!(beta_pmf(50, &p).unwrap(), 0.01875, epsilon = 1e-15);
        assert_eq!(beta_pmf(0, &p).unwrap(), 0.0);
        assert_eq!(beta_pmf(100, &p).unwrap(), 0.0);
        assert!(matches!(beta_pmf(101, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn pmf_sums_to_one_on_fine_grid() {
        let p = params(1_000_000);
        let total: f64 = (1..=p.n_slots()).map(|n| beta_pmf(n, &p).unwrap()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn pdf_reference_values() {
        assert_abs_diff_eq!(beta_pdf(5.0, 10.0).unwrap(), 0.1875, epsilon = 1e-15);
        assert_eq!(beta_pdf(0.0, 10.0).unwrap(), 0.0);
        assert!(beta_pdf(-0.1, 10.0).is_err());
        assert!(beta_pdf(10.1, 10.0).is_err());
        // Simpson quadrature
        let n = 10_000;
        let h = 10.0 / n as f64;
        let mut s = beta_pdf(0.0, 10.0).unwrap() + beta_pdf(10.0, 10.0).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * beta_pdf(i as f64 * h, 10.0).unwrap();
        }
        assert_abs_diff_eq!(s * h / 3.0, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn params_validation() {
        assert!(TrafficParams::new(0.0, 0.01).is_err());
        assert!(TrafficParams::new(1.0, 0.02).is_err()); // 50 slots
        let p = TrafficParams::new(10.0, 1e-5).unwrap();
        assert_eq!(p.n_slots(), 1_000_000);
        assert_abs_diff_eq!(p.tx_probability(), 1.0 - (-1f64).exp(), epsilon = 1e-15);
        assert!(p.clone().with_tx_probability(0.0).is_err());
        assert!(p.clone().with_tx_probability(1.0).is_ok());
        assert!(p.with_regular_rate(-1.0).is_err());
    }

    #[test]
    fn deterministic_hazard_hits_its_slot() {
        let mut probs = vec![0.0; 200];
        probs[37] = 1.0;
        let grid = HazardGrid::from_probabilities(probs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for start in [0u64, 36, 37, 38, 199, 1_000] {
            let m = grid.sample_next_alarm(start, 0, &mut rng).unwrap();
            assert_eq!(m % 200, 37);
            assert!(m > start && m - start <= 200, "start {start} -> {m}");
        }
        // offset 10: local = (m + 10) % 200 == 37
        let m = grid.sample_next_alarm(0, 10, &mut rng).unwrap();
        assert_eq!(m, 27);
    }

    #[test]
    fn zero_hazard_is_an_error() {
        let grid = HazardGrid::from_probabilities(vec![0.0; 100]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            grid.sample_next_alarm(0, 0, &mut rng),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn inversion_matches_slot_by_slot_search() {
        let p = params(1_000);
        let grid = HazardGrid::beta(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let start: u64 = rng.random_range(0..5_000);
            let offset: u64 = rng.random_range(0..1_000);
            let budget: f64 = Exp1.sample(&mut rng);
            let mut acc = 0.0;
            let mut m = start;
            let expected = loop {
                m += 1;
                acc += -(-grid.prob(m + offset)).ln_1p();
                if acc >= budget {
                    break m;
                }
            };
            let got = grid.next_alarm_for_budget(start, offset, budget).unwrap();
            assert!(got.abs_diff(expected) <= 1, "{got} vs {expected}");
        }
    }

    #[test]
    fn mean_inter_alarm_time_is_one_period() {
        let p = params(10_000);
        let grid = HazardGrid::beta(&p).unwrap();
        for offset in [0u64, 3_333, 9_999] {
            let mut rng = ChaCha8Rng::seed_from_u64(offset);
            let mut cur = 0u64;
            let mut first = None;
            let mut last = 0;
            let samples = 100_000;
            for _ in 0..samples {
                let m = grid.sample_next_alarm(cur, offset, &mut rng).unwrap();
                assert!(m > cur);
                first.get_or_insert(m);
                last = m;
                cur = m + 1;
            }
            let mean_slots = (last - first.unwrap()) as f64 / (samples - 1) as f64;
            let mean_s = mean_slots * p.slot();
            assert!((mean_s - 10.0).abs() < 0.2, "offset {offset}: {mean_s}");
        }
    }

    #[test]
    fn per_slot_frequency_matches_pmf_within_three_sigma() {
        // Slot stepping over 10^5 periods on a 100-slot grid is the oracle.
        let p = TrafficParams::new(1.0, 0.01).unwrap();
        let grid = HazardGrid::beta(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let periods = 100_000u64;
        let mut counts = vec![0u64; 100];
        let mut cur = 0u64;
        loop {
            let m = grid.sample_next_alarm(cur, 0, &mut rng).unwrap();
            if m >= periods * 100 {
                break;
            }
            counts[(m % 100) as usize] += 1;
            cur = m + 1;
        }
        for n in 1..100u64 {
            let f = beta_pmf(n, &p).unwrap();
            // Occupancy of Regular before slot n lowers the rate by f_b(n-1).
            let expected = f * (1.0 - beta_pmf(n - 1, &p).unwrap());
            let mean = expected * periods as f64;
            let sd = (periods as f64 * expected * (1.0 - expected)).sqrt();
            let got = counts[n as usize] as f64;
            assert!((got - mean).abs() <= 3.0 * sd + 1.0, "slot {n}: {got} vs {mean}±{sd}");
        }
    }

    #[test]
    fn slot_stepping_never_alarms_twice_in_a_row() {
        let mut s = SourceState::new(0);
        assert!(s.step(1.0, 0.0));
        assert_eq!(s.mode, Mode::Alarm);
        assert!(!s.step(1.0, 0.0));
        assert_eq!(s.mode, Mode::Regular);
        assert!(s.step(1.0, 0.5));
    }

    #[test]
    fn single_source_all_alarms_transmit() {
        let p = params(10_000).with_tx_probability(1.0).unwrap();
        let pop = SourcePopulation::synchronized(1, 1, 10.0).unwrap();
        let g = RequestGenerator::new(p).unwrap();
        let out = g.generate(&pop, 1_000.0, 3).unwrap();
        assert_eq!(out.stream.len() as u64, out.alarm_count);
        // consecutive alarms are at least two slots apart
        for w in out.stream.events().windows(2) {
            assert!(w[1].time - w[0].time >= 2.0 * 1e-3 - 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic_and_sorted() {
        let p = params(10_000);
        let pop = SourcePopulation::uniform(5, 4, 10.0, 9).unwrap();
        let a = generate_requests(&pop, &p, 50.0, 11).unwrap();
        let b = generate_requests(&pop, &p, 50.0, 11).unwrap();
        let c = generate_requests(&pop, &p, 50.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.events().windows(2).all(|w| w[0].time <= w[1].time));
        assert!(a.timestamps().all(|t| (0.0..50.0).contains(&t)));
    }

    #[test]
    fn horizon_shorter_than_period_is_rejected() {
        let p = params(1_000);
        let pop = SourcePopulation::synchronized(1, 1, 10.0).unwrap();
        assert!(matches!(
            generate_requests(&pop, &p, 5.0, 0),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn regular_traffic_adds_poisson_stream() {
        let p = params(1_000).with_regular_rate(2.0).unwrap();
        let pop = SourcePopulation::synchronized(1, 2, 10.0).unwrap();
        let s = generate_requests(&pop, &p, 1_000.0, 5).unwrap();
        let rate = s.len() as f64 / 1_000.0;
        // 2 sources x (2 + 0.632/10) per second
        assert!((rate - 2.0 * (2.0 + 0.0632)).abs() < 0.3, "{rate}");
    }

    #[test]
    fn population_validation() {
        assert!(SourcePopulation::new(0, vec![0.0], 10.0).is_err());
        assert!(SourcePopulation::new(1, vec![], 10.0).is_err());
        assert!(SourcePopulation::new(1, vec![10.0], 10.0).is_err());
        let pop = SourcePopulation::evenly_spaced(50, 10, 10.0).unwrap();
        assert_eq!(pop.total_sources(), 500);
        assert_eq!(pop.offset_of(149), 2.0);
    }
}
