//! Jump-chain simulators. Only the order of events matters for `N`, `K`, `I`
//! and `L`, so holding times are never drawn unless asked for.

use std::collections::BTreeSet;

use serde::Serialize;

use super::rng::RngStream;
use super::trace::{Event, EventTrace};
use crate::error::{Error, Result};
use crate::laws::{ServerLoad, StableRate};

/// Default runaway guard on the number of events in one run.
pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

/// Lower limit of the default warmup, in arrivals.
pub const MIN_WARMUP: u64 = 10_000;

/// Default warmup for the station process: the larger of [`MIN_WARMUP`] and
/// five relaxation times of the M/M/1 queue, `1/(1-√λ)²`, expressed in
/// arrivals.
pub fn default_station_warmup(rate: StableRate) -> u64 {
    let lambda = rate.lambda();
    let relax = lambda / (1.0 - lambda.sqrt()).powi(2);
    MIN_WARMUP.max((5.0 * relax).ceil() as u64)
}

/// Default warmup for the ranked-server process: the larger of
/// [`MIN_WARMUP`] and five mean service times (`5λ` arrivals).
pub fn default_ranked_warmup(load: ServerLoad) -> u64 {
    MIN_WARMUP.max((5.0 * load.lambda()).ceil() as u64)
}

/// `N` and `K` of one busy period, without the event list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BusySummary {
    pub n: u64,
    pub k: u64,
    pub events: u64,
}

/// Busy-period sampler for the M/M/1 embedded chain: while customers are
/// present the next event is an arrival with probability `λ/(1+λ)`.
#[derive(Debug, Clone, Copy)]
pub struct BusyPeriodSampler {
    arrival_prob: f64,
    event_cap: u64,
}

impl BusyPeriodSampler {
    pub fn new(rate: StableRate) -> Result<Self> {
        rate.require_subcritical("busy-period simulation")?;
        Ok(Self { arrival_prob: rate.arrival_prob(), event_cap: DEFAULT_EVENT_CAP })
    }

    pub fn with_event_cap(mut self, cap: u64) -> Self {
        self.event_cap = cap;
        self
    }

    fn run(&self, rng: &mut RngStream, mut record: impl FnMut(Event)) -> Result<BusySummary> {
        record(Event::Arrival);
        let (mut level, mut k, mut n, mut events) = (1u64, 1u64, 0u64, 1u64);
        while level > 0 {
            if events >= self.event_cap {
                return Err(Error::EventCap { cap: self.event_cap });
            }
            events += 1;
            if rng.bernoulli(self.arrival_prob) {
                level += 1;
                k = k.max(level);
                record(Event::Arrival);
            } else {
                level -= 1;
                n += 1;
                record(Event::Departure);
            }
        }
        Ok(BusySummary { n, k, events })
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<EventTrace> {
        let mut events = Vec::new();
        self.run(rng, |e| events.push(e))?;
        EventTrace::new(events).map_err(|e| Error::Internal(format!("sampler produced a bad trace: {e}")))
    }

    pub fn sample_summary(&self, rng: &mut RngStream) -> Result<BusySummary> {
        self.run(rng, |_| {})
    }
}

pub fn sample_busy_period(rng: &mut RngStream, rate: StableRate) -> Result<EventTrace> {
    BusyPeriodSampler::new(rate)?.sample(rng)
}

/// Event epochs for a busy-period trace: the first arrival at time 0 and
/// exponential holding times of rate `1+λ` between events.
pub fn attach_holding_times(rng: &mut RngStream, trace: &EventTrace, rate: StableRate) -> Vec<f64> {
    let total = 1.0 + rate.lambda();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(trace.len());
    out.push(t);
    for _ in 1..trace.len() {
        t += rng.exponential(total);
        out.push(t);
    }
    out
}

/// Waiting stations `W_1, W_2, ...` in front of one server. An arrival to an
/// idle server goes straight into service; otherwise it takes the first
/// vacant station. At a service completion the occupant of the first
/// occupied station moves into service.
#[derive(Debug, Clone, Default)]
pub struct StationState {
    occupied: BTreeSet<u64>,
    server_busy: bool,
}

impl StationState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn server_busy(&self) -> bool {
        self.server_busy
    }

    pub fn occupied(&self) -> usize {
        self.occupied.len()
    }

    /// Customers present, counting the one in service.
    pub fn customers(&self) -> u64 {
        self.occupied.len() as u64 + u64::from(self.server_busy)
    }

    pub fn first_vacant(&self) -> u64 {
        first_gap(self.occupied.iter().copied())
    }

    /// Admit an arrival and return its station index (0 if served at once).
    pub fn arrive(&mut self) -> u64 {
        if !self.server_busy {
            self.server_busy = true;
            return 0;
        }
        let i = self.first_vacant();
        self.occupied.insert(i);
        i
    }

    pub fn depart(&mut self) -> Result<()> {
        if !self.server_busy {
            return Err(Error::Internal("departure from an idle server".into()));
        }
        if self.occupied.pop_first().is_none() {
            self.server_busy = false;
        }
        Ok(())
    }
}

/// Smallest positive integer missing from an increasing sequence.
fn first_gap(sorted: impl Iterator<Item = u64>) -> u64 {
    let mut want = 1;
    for x in sorted {
        if x != want {
            break;
        }
        want += 1;
    }
    want
}

/// Station index `I` seen by each arrival after the first `warmup` arrivals;
/// `arrivals` counts the warmup too.
pub fn run_station_process(rng: &mut RngStream, rate: StableRate, arrivals: u64, warmup: u64) -> Result<Vec<u32>> {
    run_station_process_capped(rng, rate, arrivals, warmup, DEFAULT_EVENT_CAP)
}

pub fn run_station_process_capped(
    rng: &mut RngStream,
    rate: StableRate,
    arrivals: u64,
    warmup: u64,
    event_cap: u64,
) -> Result<Vec<u32>> {
    rate.require_subcritical("the station process")?;
    if warmup >= arrivals {
        return Err(Error::domain(format!("warmup ({warmup}) must be below arrivals ({arrivals})")));
    }
    let p = rate.arrival_prob();
    let mut state = StationState::new();
    let mut out = Vec::with_capacity((arrivals - warmup) as usize);
    let (mut seen, mut events, mut level) = (0u64, 0u64, 0u64);
    while seen < arrivals {
        if events >= event_cap {
            return Err(Error::EventCap { cap: event_cap });
        }
        events += 1;
        if level == 0 || rng.bernoulli(p) {
            let i = state.arrive();
            level += 1;
            seen += 1;
            if seen > warmup {
                out.push(i as u32);
            }
        } else {
            state.depart()?;
            level -= 1;
        }
        debug_assert_eq!(state.occupied() as u64, level.saturating_sub(1));
    }
    Ok(out)
}

/// Numbered servers `S_1, S_2, ...` with unlimited supply. Keeps a flag per
/// server plus a dense list of the busy ones so a uniform busy server can be
/// picked in O(1).
#[derive(Debug, Clone, Default)]
pub struct ServerBank {
    busy: Vec<bool>,
    list: Vec<usize>,
    position: Vec<usize>,
}

impl ServerBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn busy_count(&self) -> usize {
        self.list.len()
    }

    pub fn is_busy(&self, server: usize) -> bool {
        server >= 1 && self.busy.get(server - 1).copied().unwrap_or(false)
    }

    pub fn first_idle(&self) -> usize {
        self.busy.iter().position(|b| !b).unwrap_or(self.busy.len()) + 1
    }

    /// Engage the first idle server and return its index.
    pub fn engage(&mut self) -> usize {
        let s = self.first_idle();
        if s > self.busy.len() {
            self.busy.push(false);
            self.position.push(0);
        }
        self.busy[s - 1] = true;
        self.position[s - 1] = self.list.len();
        self.list.push(s);
        s
    }

    /// Release the busy server at `slot` in the busy list.
    fn release_slot(&mut self, slot: usize) {
        let s = self.list.swap_remove(slot);
        self.busy[s - 1] = false;
        if let Some(&moved) = self.list.get(slot) {
            self.position[moved - 1] = slot;
        }
    }

    pub fn release(&mut self, server: usize) -> Result<()> {
        if !self.is_busy(server) {
            return Err(Error::Internal(format!("server {server} is not busy")));
        }
        self.release_slot(self.position[server - 1]);
        Ok(())
    }

    pub fn release_random(&mut self, rng: &mut RngStream) -> Result<usize> {
        if self.list.is_empty() {
            return Err(Error::Internal("no busy server to release".into()));
        }
        let slot = rng.index(self.list.len());
        let s = self.list[slot];
        self.release_slot(slot);
        Ok(s)
    }
}

/// Ranked-server index `L` found by each arrival after `warmup` arrivals in
/// the M/M/∞ jump chain: with `j` busy servers the next event is an arrival
/// with probability `λ/(λ+j)`, otherwise a uniformly chosen busy server
/// finishes.
pub fn run_ranked_servers(rng: &mut RngStream, load: ServerLoad, arrivals: u64, warmup: u64) -> Result<Vec<u32>> {
    run_ranked_servers_capped(rng, load, arrivals, warmup, DEFAULT_EVENT_CAP)
}

pub fn run_ranked_servers_capped(
    rng: &mut RngStream,
    load: ServerLoad,
    arrivals: u64,
    warmup: u64,
    event_cap: u64,
) -> Result<Vec<u32>> {
    if warmup >= arrivals {
        return Err(Error::domain(format!("warmup ({warmup}) must be below arrivals ({arrivals})")));
    }
    let lambda = load.lambda();
    let mut bank = ServerBank::new();
    let mut out = Vec::with_capacity((arrivals - warmup) as usize);
    let (mut seen, mut events) = (0u64, 0u64);
    while seen < arrivals {
        if events >= event_cap {
            return Err(Error::EventCap { cap: event_cap });
        }
        events += 1;
        let j = bank.busy_count() as f64;
        if rng.bernoulli(lambda / (lambda + j)) {
            let l = bank.engage();
            seen += 1;
            if seen > warmup {
                out.push(l as u32);
            }
        } else {
            bank.release_random(rng)?;
        }
    }
    Ok(out)
}

/// Empirical ruin frequency of `Q` over independent walks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub walks: u64,
}

/// `P` starts with `v` units and `Q` with `w`; `P` wins each unit bet with
/// probability `p`. Play continues until one side is broke.
pub fn gamblers_ruin_sim(rng: &mut RngStream, p: f64, v: u64, w: u64, walks: u64) -> Result<RuinEstimate> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("win probability must satisfy 0 < p < 1, got {p}")));
    }
    if v == 0 || w == 0 || walks == 0 {
        return Err(Error::domain("v, w and the number of walks must all be positive"));
    }
    let total = v + w;
    let mut ruined = 0u64;
    for _ in 0..walks {
        let mut capital = v;
        let mut steps = 0u64;
        while capital > 0 && capital < total {
            if steps >= DEFAULT_EVENT_CAP {
                return Err(Error::EventCap { cap: DEFAULT_EVENT_CAP });
            }
            steps += 1;
            if rng.bernoulli(p) {
                capital += 1;
            } else {
                capital -= 1;
            }
        }
        if capital == total {
            ruined += 1;
        }
    }
    let probability = ruined as f64 / walks as f64;
    let std_error = (probability * (1.0 - probability) / walks as f64).sqrt();
    Ok(RuinEstimate { probability, std_error, walks })
}
