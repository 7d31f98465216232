use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Entry {
    tag: f64,
    seq: u64,
    job: u64,
    work: f64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap pops the smallest finish tag first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .tag
            .total_cmp(&self.tag)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Egalitarian processor-sharing server.
///
/// Every resident job receives `C/k` when `k` jobs are present, so all of
/// them gain attained service at the same rate. The server tracks that
/// common attained service as a virtual clock `V`; a job of size `w`
/// arriving at virtual time `V₀` leaves when `V` reaches `V₀ + w`.
#[derive(Debug, Clone)]
pub struct PsServer {
    capacity: f64,
    now: f64,
    virtual_time: f64,
    jobs: BinaryHeap<Entry>,
    next_seq: u64,
    busy_time: f64,
    work_completed: f64,
    job_time: f64,
}

impl PsServer {
    pub fn new(capacity: f64) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::Domain(format!("capacity must be > 0, got {capacity}")));
        }
        Ok(Self {
            capacity,
            now: 0.0,
            virtual_time: 0.0,
            jobs: BinaryHeap::new(),
            next_seq: 0,
            busy_time: 0.0,
            work_completed: 0.0,
            job_time: 0.0,
        })
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Time up to which the server state has been evolved.
    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Total time with at least one job present.
    pub fn busy_time(&self) -> f64 {
        self.busy_time
    }

    /// Sum of the sizes of all departed jobs.
    pub fn work_completed(&self) -> f64 {
        self.work_completed
    }

    /// Integral of the number of resident jobs over time.
    pub fn job_time_integral(&self) -> f64 {
        self.job_time
    }

    /// Adds a job at the current server time. Call [`advance`](Self::advance)
    /// to the arrival instant first.
    pub fn arrive(&mut self, job: u64, work: f64) {
        debug_assert!(work > 0.0);
        if self.jobs.is_empty() {
            self.virtual_time = 0.0;
        }
        self.jobs.push(Entry {
            tag: self.virtual_time + work,
            seq: self.next_seq,
            job,
            work,
        });
        self.next_seq += 1;
    }

    fn step_to_next(&self) -> Option<(f64, f64)> {
        let head = self.jobs.peek()?;
        let k = self.jobs.len() as f64;
        let dv = (head.tag - self.virtual_time).max(0.0);
        Some((self.now + dv * k / self.capacity, head.tag))
    }

    /// Instant of the next departure if nothing else arrives.
    pub fn next_completion(&self) -> Option<f64> {
        self.step_to_next().map(|(t, _)| t)
    }

    /// Evolves the server to `until`, appending `(job, completion time)` for
    /// every departure at or before `until` in departure order.
    pub fn advance(&mut self, until: f64, completed: &mut Vec<(u64, f64)>) {
        debug_assert!(until >= self.now, "advance backwards: {} -> {until}", self.now);
        while let Some((t, tag)) = self.step_to_next() {
            if t > until {
                break;
            }
            let dt = t - self.now;
            let k = self.jobs.len() as f64;
            self.busy_time += dt;
            self.job_time += dt * k;
            self.now = t;
            self.virtual_time = tag;
            let head = self.jobs.pop().expect("peeked");
            self.work_completed += head.work;
            completed.push((head.job, t));
        }
        if until > self.now {
            let dt = until - self.now;
            if !self.jobs.is_empty() {
                let k = self.jobs.len() as f64;
                self.busy_time += dt;
                self.job_time += dt * k;
                self.virtual_time += dt * self.capacity / k;
            }
            self.now = until;
        }
        if self.jobs.is_empty() {
            self.virtual_time = 0.0;
        }
    }

    /// Remaining work of a resident job.
    pub fn residual(&self, job: u64) -> Option<f64> {
        self.jobs
            .iter()
            .find(|e| e.job == job)
            .map(|e| (e.tag - self.virtual_time).max(0.0))
    }
}
