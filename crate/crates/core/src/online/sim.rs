use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::EvaluationResult;
use crate::tape::{MiniBatch, RequestSet, Tape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// Travel to a file boundary without reading.
    Move { to: u64 },
    ReadFile(usize),
    ExecuteMiniBatch(MiniBatch),
    /// Wait for the next release.
    Idle,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move { to } => write!(f, "Move({to})"),
            Action::ReadFile(g) => write!(f, "ReadFile({g})"),
            Action::ExecuteMiniBatch(b) => write!(f, "ExecuteMiniBatch{b}"),
            Action::Idle => write!(f, "Idle"),
        }
    }
}

pub trait Policy {
    fn name(&self) -> &str;
    fn decide(&mut self, state: &SimState<'_>) -> Action;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Move,
    ReadStart,
    ReadEnd,
    BatchStart,
    BatchEnd,
    Service,
    Idle,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Move => "move",
            EventKind::ReadStart => "read_start",
            EventKind::ReadEnd => "read_end",
            EventKind::BatchStart => "batch_start",
            EventKind::BatchEnd => "batch_end",
            EventKind::Service => "service",
            EventKind::Idle => "idle",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub time: u64,
    pub kind: EventKind,
    pub payload: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimTrace {
    pub events: Vec<TraceEvent>,
    pub per_request_service: Vec<Option<u64>>,
}

impl SimTrace {
    /// One `time<TAB>kind<TAB>payload` line per event.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!("{}\t{}\t{}\n", e.time, e.kind, e.payload));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct SimOptions {
    pub record_events: bool,
    /// FIFO keys replacing release times; same length as the request set.
    pub priorities: Option<Vec<u64>>,
}

/// Read-only view handed to policies.
pub struct SimState<'a> {
    tape: &'a Tape,
    files: Vec<usize>,
    releases: Vec<u64>,
    future: BTreeSet<(u64, usize)>,
    pending_by_file: Vec<Vec<usize>>,
    pending_count: Vec<u64>,
    pending_files: BTreeSet<usize>,
    fifo: BTreeSet<(u64, u64, usize)>,
    keys: Vec<(u64, u64)>,
    total_pending: usize,
    service: Vec<Option<u64>>,
    clock: u64,
    head: u64,
}

impl<'a> SimState<'a> {
    pub fn tape(&self) -> &'a Tape {
        self.tape
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn head(&self) -> u64 {
        self.head
    }

    /// Released, unserviced requests per file.
    pub fn pending_counts(&self) -> &[u64] {
        &self.pending_count
    }

    pub fn pending_files(&self) -> &BTreeSet<usize> {
        &self.pending_files
    }

    pub fn total_pending(&self) -> usize {
        self.total_pending
    }

    pub fn has_future_releases(&self) -> bool {
        !self.future.is_empty()
    }

    pub fn next_release(&self) -> Option<u64> {
        self.future.first().map(|&(t, _)| t)
    }

    /// File of the pending request with the smallest FIFO key.
    pub fn oldest_pending_file(&self) -> Option<usize> {
        self.fifo.first().map(|&(_, _, id)| self.files[id])
    }

    pub fn leftmost_pending(&self) -> Option<usize> {
        self.pending_files.first().copied()
    }

    pub fn rightmost_pending(&self) -> Option<usize> {
        self.pending_files.last().copied()
    }

    pub fn service_time(&self, id: usize) -> Option<u64> {
        self.service[id]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepReport {
    pub action: Action,
    pub start: u64,
    pub end: u64,
    /// Instant during the action at which the head stood on boundary m.
    pub at_end_of_tape: Option<u64>,
}

pub struct Simulator<'a> {
    state: SimState<'a>,
    events: Option<Vec<TraceEvent>>,
    rng: ChaCha8Rng,
    total: u64,
    stalls: usize,
}

const MAX_STALLS: usize = 16;

impl<'a> Simulator<'a> {
    pub fn new(tape: &'a Tape, requests: &RequestSet, seed: u64, opts: SimOptions) -> Result<Self> {
        if let Some(p) = &opts.priorities {
            if p.len() != requests.len() {
                return Err(Error::Precondition(format!(
                    "{} priorities for {} requests",
                    p.len(),
                    requests.len()
                )));
            }
        }
        let nf = tape.num_files();
        let mut sim = Simulator {
            state: SimState {
                tape,
                files: Vec::with_capacity(requests.len()),
                releases: Vec::with_capacity(requests.len()),
                future: BTreeSet::new(),
                pending_by_file: vec![Vec::new(); nf],
                pending_count: vec![0; nf],
                pending_files: BTreeSet::new(),
                fifo: BTreeSet::new(),
                keys: Vec::with_capacity(requests.len()),
                total_pending: 0,
                service: Vec::with_capacity(requests.len()),
                clock: 0,
                head: tape.length_m(),
            },
            events: opts.record_events.then(Vec::new),
            rng: ChaCha8Rng::seed_from_u64(seed),
            total: 0,
            stalls: 0,
        };
        for (i, r) in requests.requests().iter().enumerate() {
            let key = opts.priorities.as_ref().map_or(r.release, |p| p[i]);
            sim.push_request(r.file, r.release, key);
        }
        sim.absorb(0);
        Ok(sim)
    }

    fn push_request(&mut self, file: usize, release: u64, key: u64) -> usize {
        let s = &mut self.state;
        let id = s.files.len();
        s.files.push(file);
        s.releases.push(release);
        s.keys.push((key, self.rng.random()));
        s.service.push(None);
        s.future.insert((release, id));
        id
    }

    /// Adds a request mid-run; releases in the past become pending at once.
    pub fn inject(&mut self, file: usize, release: u64) -> Result<usize> {
        if file >= self.state.tape.num_files() {
            return Err(Error::Precondition(format!("file {file} out of range")));
        }
        let id = self.push_request(file, release, release);
        self.absorb(self.state.clock);
        Ok(id)
    }

    pub fn state(&self) -> &SimState<'a> {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.total_pending == 0 && self.state.future.is_empty()
    }

    fn log(&mut self, time: u64, kind: EventKind, payload: impl FnOnce() -> String) {
        if let Some(ev) = &mut self.events {
            ev.push(TraceEvent {
                time,
                kind,
                payload: payload(),
            });
        }
    }

    fn absorb(&mut self, t: u64) {
        while let Some(&(rel, id)) = self.state.future.first() {
            if rel > t {
                break;
            }
            self.state.future.pop_first();
            let s = &mut self.state;
            let f = s.files[id];
            s.pending_by_file[f].push(id);
            s.pending_count[f] += 1;
            s.pending_files.insert(f);
            s.fifo.insert((s.keys[id].0, s.keys[id].1, id));
            s.total_pending += 1;
        }
    }

    fn service_file(&mut self, g: usize, t: u64) {
        self.absorb(t);
        let ids = std::mem::take(&mut self.state.pending_by_file[g]);
        if ids.is_empty() {
            return;
        }
        for &id in &ids {
            let s = &mut self.state;
            s.service[id] = Some(t);
            s.fifo.remove(&(s.keys[id].0, s.keys[id].1, id));
            self.total += t - s.releases[id];
            let rel = s.releases[id];
            self.log(t, EventKind::Service, || {
                format!("request={id} file={g} release={rel}")
            });
        }
        let s = &mut self.state;
        s.total_pending -= ids.len();
        s.pending_count[g] = 0;
        s.pending_files.remove(&g);
    }

    fn fault(&self, action: Action, message: &str) -> Error {
        Error::SimulationFault {
            time: self.state.clock,
            head: self.state.head,
            message: format!("{action}: {message}"),
        }
    }

    /// Applies one policy decision. `None` once every request is serviced.
    pub fn step(&mut self, policy: &mut dyn Policy) -> Result<Option<StepReport>> {
        if self.is_finished() {
            return Ok(None);
        }
        let action = policy.decide(&self.state);
        let start = self.state.clock;
        let tape = self.state.tape;
        let m = tape.length_m();
        let mut at_end = None;
        match action {
            Action::Move { to } => {
                if to > m || !tape.is_file_boundary(to) {
                    return Err(self.fault(action, "target is not a file boundary"));
                }
                let from = self.state.head;
                self.state.clock += from.abs_diff(to);
                self.state.head = to;
                self.log(start, EventKind::Move, || format!("from={from} to={to}"));
                if to == m {
                    at_end = Some(self.state.clock);
                }
                self.absorb(self.state.clock);
            }
            Action::ReadFile(g) => {
                if g >= tape.num_files() || tape.file(g).start() != self.state.head {
                    return Err(self.fault(action, "head is not at the file's start"));
                }
                self.log(start, EventKind::ReadStart, || format!("file={g}"));
                self.service_file(g, start);
                self.state.clock += tape.file(g).size;
                self.state.head = tape.file(g).end();
                let end = self.state.clock;
                self.log(end, EventKind::ReadEnd, || format!("file={g}"));
                if self.state.head == m {
                    at_end = Some(end);
                }
                self.absorb(end);
            }
            Action::ExecuteMiniBatch(b) => {
                let nf = tape.num_files();
                if b.left_file >= nf
                    || b.right_file >= nf
                    || b.right_file < b.left_file
                    || tape.file(b.left_file).start() != self.state.head
                {
                    return Err(self.fault(action, "batch does not start at the head"));
                }
                self.log(start, EventKind::BatchStart, || {
                    format!("left={} right={}", b.left_file, b.right_file)
                });
                let base = tape.file(b.left_file).left;
                for g in b.left_file..=b.right_file {
                    let t = start + tape.file(g).left - base;
                    self.log(t, EventKind::ReadStart, || format!("file={g}"));
                    self.service_file(g, t);
                }
                let size = tape.batch_size(b);
                if tape.file(b.right_file).end() == m {
                    at_end = Some(start + size);
                }
                self.state.clock += 2 * size;
                let end = self.state.clock;
                self.log(end, EventKind::BatchEnd, || {
                    format!("left={} right={}", b.left_file, b.right_file)
                });
                self.absorb(end);
            }
            Action::Idle => {
                let Some(next) = self.state.next_release() else {
                    return Err(self.fault(action, "requests pending and no future releases"));
                };
                self.log(start, EventKind::Idle, || format!("until={next}"));
                self.state.clock = next;
                self.absorb(next);
            }
        }
        if self.state.clock == start {
            self.stalls += 1;
            if self.stalls > MAX_STALLS {
                return Err(self.fault(action, "policy makes no progress"));
            }
        } else {
            self.stalls = 0;
        }
        Ok(Some(StepReport {
            action,
            start,
            end: self.state.clock,
            at_end_of_tape: at_end,
        }))
    }

    pub fn run(&mut self, policy: &mut dyn Policy) -> Result<()> {
        while self.step(policy)?.is_some() {}
        Ok(())
    }

    pub fn total_response(&self) -> u64 {
        self.total
    }

    pub fn finish(self) -> (EvaluationResult, SimTrace) {
        let s = self.state;
        let complete = s.service.iter().all(|x| x.is_some());
        (
            EvaluationResult {
                total_response: self.total,
                service_times: s.service.clone(),
                makespan: s.clock,
                complete,
            },
            SimTrace {
                events: self.events.unwrap_or_default(),
                per_request_service: s.service,
            },
        )
    }
}

/// Runs `policy` until every request is serviced, recording a full trace.
pub fn simulate(
    tape: &Tape,
    requests: &RequestSet,
    policy: &mut dyn Policy,
    seed: u64,
) -> Result<(EvaluationResult, SimTrace)> {
    simulate_with(
        tape,
        requests,
        policy,
        seed,
        SimOptions {
            record_events: true,
            priorities: None,
        },
    )
}

pub fn simulate_with(
    tape: &Tape,
    requests: &RequestSet,
    policy: &mut dyn Policy,
    seed: u64,
    opts: SimOptions,
) -> Result<(EvaluationResult, SimTrace)> {
    let mut sim = Simulator::new(tape, requests, seed, opts)?;
    sim.run(policy)?;
    Ok(sim.finish())
}
