//! Interval graphs of busy periods.
//!
//! Each customer contributes the interval from its arrival event to its
//! departure event (its sojourn, counted in event positions). Two customers
//! are adjacent when their intervals overlap. The vertex count is `N` and the
//! clique and chromatic numbers are both `K`, whatever the service
//! discipline; the edges themselves depend on the discipline.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::{Event, EventTrace, StationState};

/// Which waiting customer a service completion releases next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discipline {
    /// First come, first served.
    Fcfs,
    /// Last come, first served, without preemption: a customer in service
    /// always finishes.
    Lcfs,
    /// Waiting stations `W_1, W_2, ...`: arrivals take the first vacant
    /// station, and the occupant of the first occupied station is served next.
    OrderedStation,
}

impl Discipline {
    pub const ALL: [Discipline; 3] = [Discipline::Fcfs, Discipline::Lcfs, Discipline::OrderedStation];
}

/// Sojourn of one customer, in 1-based event positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub arrival_pos: usize,
    pub departure_pos: usize,
}

impl Interval {
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.arrival_pos < other.departure_pos && other.arrival_pos < self.departure_pos
    }
}

/// Customer intervals indexed by service order: entry `j` belongs to the
/// `(j+1)`-th customer to depart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CustomerIntervals {
    intervals: Vec<Interval>,
}

impl CustomerIntervals {
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Largest number of simultaneously present customers, by a sweep over
    /// the endpoints.
    pub fn clique_number(&self) -> usize {
        let mut endpoints: Vec<(usize, i32)> = Vec::with_capacity(2 * self.len());
        for iv in &self.intervals {
            endpoints.push((iv.arrival_pos, 1));
            endpoints.push((iv.departure_pos, -1));
        }
        endpoints.sort_unstable();
        let (mut level, mut best) = (0i32, 0i32);
        for (_, step) in endpoints {
            level += step;
            best = best.max(level);
        }
        best as usize
    }
}

/// Who is waiting, under each discipline.
enum Waiting {
    Queue(VecDeque<usize>),
    Stack(Vec<usize>),
    Stations { state: StationState, occupant: BTreeMap<u64, usize> },
}

/// Match every departure in `trace` to a customer under `discipline`.
pub fn assign_service(trace: &EventTrace, discipline: Discipline) -> Result<CustomerIntervals> {
    let mut waiting = match discipline {
        Discipline::Fcfs => Waiting::Queue(VecDeque::new()),
        Discipline::Lcfs => Waiting::Stack(Vec::new()),
        Discipline::OrderedStation => Waiting::Stations { state: StationState::new(), occupant: BTreeMap::new() },
    };
    let mut arrival_of: Vec<usize> = Vec::new();
    let mut in_service: Option<usize> = None;
    let mut intervals = Vec::with_capacity(trace.n() as usize);
    let malformed = |pos: usize| Error::MalformedTrace(format!("departure at event {pos} with nobody in service"));

    for (idx, event) in trace.events().iter().enumerate() {
        let pos = idx + 1;
        match event {
            Event::Arrival => {
                let c = arrival_of.len();
                arrival_of.push(pos);
                if let Waiting::Stations { state, occupant } = &mut waiting {
                    let station = state.arrive();
                    if station > 0 {
                        occupant.insert(station, c);
                    } else {
                        in_service = Some(c);
                    }
                    continue;
                }
                if in_service.is_none() {
                    in_service = Some(c);
                } else {
                    match &mut waiting {
                        Waiting::Queue(q) => q.push_back(c),
                        Waiting::Stack(s) => s.push(c),
                        Waiting::Stations { .. } => unreachable!(),
                    }
                }
            }
            Event::Departure => {
                let c = in_service.take().ok_or_else(|| malformed(pos))?;
                intervals.push(Interval { arrival_pos: arrival_of[c], departure_pos: pos });
                in_service = match &mut waiting {
                    Waiting::Queue(q) => q.pop_front(),
                    Waiting::Stack(s) => s.pop(),
                    Waiting::Stations { state, occupant } => {
                        state.depart()?;
                        occupant.pop_first().map(|(_, next)| next)
                    }
                };
            }
        }
    }
    Ok(CustomerIntervals { intervals })
}

/// Interval graph on service-order labels `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalGraph {
    n: usize,
    /// Sorted pairs `(u, v)` with `u < v`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    /// Arrival position of each vertex, for left-endpoint orderings.
    arrival_pos: Vec<usize>,
}

impl IntervalGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of vertex `v` (1-based), ascending.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v - 1]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u - 1].binary_search(&v).is_ok()
    }

    /// Greedy colouring along increasing left endpoints, using only the
    /// graph's edges. Returns the colour (from 0) of each vertex.
    pub fn greedy_coloring(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (1..=self.n).collect();
        order.sort_by_key(|&v| self.arrival_pos[v - 1]);
        let mut colour = vec![usize::MAX; self.n];
        for v in order {
            let mut used: Vec<usize> =
                self.neighbours(v).iter().map(|&u| colour[u - 1]).filter(|&c| c != usize::MAX).collect();
            used.sort_unstable();
            used.dedup();
            let free = used.iter().enumerate().find(|(i, c)| i != *c).map(|(i, _)| i).unwrap_or(used.len());
            colour[v - 1] = free;
        }
        colour
    }

    /// `"u v"` per line, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph busy_period {\n");
        for v in 1..=self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Edges by a sweep over event positions: an arriving customer becomes
/// adjacent to everyone present at that moment.
pub fn build_graph(intervals: &CustomerIntervals) -> IntervalGraph {
    let n = intervals.len();
    let mut endpoints: Vec<(usize, bool, usize)> = Vec::with_capacity(2 * n);
    for (j, iv) in intervals.intervals().iter().enumerate() {
        endpoints.push((iv.arrival_pos, true, j + 1));
        endpoints.push((iv.departure_pos, false, j + 1));
    }
    endpoints.sort_unstable();
    let mut present: Vec<usize> = Vec::new();
    let mut edges = Vec::new();
    for (_, is_arrival, v) in endpoints {
        if is_arrival {
            edges.extend(present.iter().map(|&u| (u.min(v), u.max(v))));
            present.push(v);
        } else if let Some(i) = present.iter().position(|&u| u == v) {
            present.swap_remove(i);
        }
    }
    edges.sort_unstable();
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adjacency[u - 1].push(v);
        adjacency[v - 1].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let arrival_pos = intervals.intervals().iter().map(|iv| iv.arrival_pos).collect();
    IntervalGraph { n, edges, adjacency, arrival_pos }
}

pub fn clique_number(intervals: &CustomerIntervals) -> usize {
    intervals.clique_number()
}

/// Colours used by the greedy colouring of the graph; an internal error if
/// that differs from the clique number, which cannot happen for an interval
/// graph coloured along left endpoints.
pub fn chromatic_number(intervals: &CustomerIntervals, graph: &IntervalGraph) -> Result<usize> {
    let colours = graph.greedy_coloring().into_iter().max().map_or(0, |c| c + 1);
    let clique = intervals.clique_number();
    if colours != clique {
        return Err(Error::Internal(format!(
            "greedy colouring used {colours} colours but the clique number is {clique}"
        )));
    }
    Ok(colours)
}

/// Everything reported for one trace and discipline.
#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub discipline: Discipline,
    pub n: usize,
    pub edge_count: usize,
    pub clique_number: usize,
    pub chromatic_number: usize,
}

pub fn analyze(trace: &EventTrace, discipline: Discipline) -> Result<(IntervalGraph, GraphSummary)> {
    let intervals = assign_service(trace, discipline)?;
    let graph = build_graph(&intervals);
    let chromatic = chromatic_number(&intervals, &graph)?;
    let summary = GraphSummary {
        discipline,
        n: graph.n(),
        edge_count: graph.edges().len(),
        clique_number: intervals.clique_number(),
        chromatic_number: chromatic,
    };
    Ok((graph, summary))
}
