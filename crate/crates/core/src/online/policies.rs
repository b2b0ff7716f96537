use std::fmt;
use std::str::FromStr;

use super::sim::{Action, Policy, SimState};
use crate::error::{Error, Result};
use crate::offline::{best_batch_at, fgs, log_window, SolverContext};
use crate::tape::MiniBatch;

/// Serves the oldest pending request next, reading nothing on the way.
#[derive(Debug, Default)]
pub struct Ltfs;

impl Policy for Ltfs {
    fn name(&self) -> &str {
        "ltfs"
    }

    fn decide(&mut self, s: &SimState<'_>) -> Action {
        let Some(target) = s.oldest_pending_file() else {
            return Action::Idle;
        };
        let start = s.tape().file(target).start();
        if s.head() == start {
            Action::ReadFile(target)
        } else {
            Action::Move { to: start }
        }
    }
}

/// LTFS that also reads pending files it crosses while moving right.
#[derive(Debug, Default)]
pub struct LtfsPlus;

impl Policy for LtfsPlus {
    fn name(&self) -> &str {
        "ltfs-plus"
    }

    fn decide(&mut self, s: &SimState<'_>) -> Action {
        let Some(target) = s.oldest_pending_file() else {
            return Action::Idle;
        };
        let tape = s.tape();
        let start = tape.file(target).start();
        let h = s.head();
        if h > start {
            return Action::Move { to: start };
        }
        if h == start {
            return Action::ReadFile(target);
        }
        let g = tape.file_starting_at(h).expect("head sits on a file boundary");
        if s.pending_counts()[g] > 0 {
            Action::ReadFile(g)
        } else {
            Action::Move {
                to: tape.file(g).end(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReplanInner {
    Sss,
    Gs,
    Fgs,
    LogNfgs,
}

impl ReplanInner {
    pub fn id(self) -> &'static str {
        match self {
            ReplanInner::Sss => "sss",
            ReplanInner::Gs => "gs",
            ReplanInner::Fgs => "fgs",
            ReplanInner::LogNfgs => "log_nfgs",
        }
    }
}

impl FromStr for ReplanInner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sss" => Ok(ReplanInner::Sss),
            "gs" => Ok(ReplanInner::Gs),
            "fgs" => Ok(ReplanInner::Fgs),
            "log_nfgs" | "log-nfgs" | "lognfgs" => Ok(ReplanInner::LogNfgs),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Left,
    Right { target: usize },
}

/// Leftward sweeps that re-plan mini-batches at every file boundary,
/// alternating with rightward reading passes.
#[derive(Debug)]
pub struct Replan {
    inner: ReplanInner,
    name: String,
    phase: Phase,
    batch_done_at: Option<u64>,
}

impl Replan {
    pub fn new(inner: ReplanInner) -> Replan {
        let suffix = match inner {
            ReplanInner::LogNfgs => "lognfgs",
            other => other.id(),
        };
        Replan {
            inner,
            name: format!("replan-{suffix}"),
            phase: Phase::Left,
            batch_done_at: None,
        }
    }

    fn batch_at(&self, s: &SimState<'_>, g: usize) -> Option<MiniBatch> {
        let counts = s.pending_counts();
        match self.inner {
            ReplanInner::Sss => None,
            // GS batches every requested file except the leftmost one.
            ReplanInner::Gs => (counts[g] > 0 && s.leftmost_pending() != Some(g))
                .then(|| MiniBatch::atomic(g)),
            ReplanInner::Fgs => {
                if counts[g] == 0 || s.leftmost_pending() == Some(g) {
                    return None;
                }
                let ctx = self.context(s);
                fgs(&ctx).batch_at(g)
            }
            ReplanInner::LogNfgs => {
                let ctx = self.context(s);
                let b1 = fgs(&ctx);
                best_batch_at(&ctx, &b1, g, log_window(s.tape().num_files()))
            }
        }
    }

    fn context<'s>(&self, s: &'s SimState<'_>) -> SolverContext<'s> {
        SolverContext::from_counts(s.tape(), s.pending_counts())
            .and_then(|c| c.with_head(s.head()))
            .expect("simulator state is consistent")
    }
}

impl Policy for Replan {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&mut self, s: &SimState<'_>) -> Action {
        let tape = s.tape();
        let (Some(lp), Some(rp)) = (s.leftmost_pending(), s.rightmost_pending()) else {
            self.phase = Phase::Left;
            self.batch_done_at = None;
            return Action::Idle;
        };
        let h = s.head();
        loop {
            match self.phase {
                Phase::Left => {
                    if h <= tape.file(lp).start() {
                        self.phase = Phase::Right { target: rp };
                        continue;
                    }
                    if self.batch_done_at != Some(h) {
                        if let Some(g) = tape.file_starting_at(h) {
                            if let Some(b) = self.batch_at(s, g) {
                                self.batch_done_at = Some(h);
                                return Action::ExecuteMiniBatch(b);
                            }
                        }
                    }
                    self.batch_done_at = None;
                    let prev = tape.file_ending_at(h).expect("head is right of a file");
                    return Action::Move {
                        to: tape.file(prev).start(),
                    };
                }
                Phase::Right { target } => {
                    let target = if self.inner == ReplanInner::Sss {
                        target.max(rp)
                    } else {
                        target
                    };
                    if h >= tape.file(target).end() {
                        self.phase = Phase::Left;
                        continue;
                    }
                    self.phase = Phase::Right { target };
                    let g = tape.file_starting_at(h).expect("head sits on a file boundary");
                    return Action::ReadFile(g);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OnlinePolicy {
    Ltfs,
    LtfsPlus,
    Replan(ReplanInner),
}

impl OnlinePolicy {
    pub const ALL: [OnlinePolicy; 6] = [
        OnlinePolicy::Ltfs,
        OnlinePolicy::LtfsPlus,
        OnlinePolicy::Replan(ReplanInner::Sss),
        OnlinePolicy::Replan(ReplanInner::Gs),
        OnlinePolicy::Replan(ReplanInner::Fgs),
        OnlinePolicy::Replan(ReplanInner::LogNfgs),
    ];

    pub fn id(self) -> &'static str {
        match self {
            OnlinePolicy::Ltfs => "ltfs",
            OnlinePolicy::LtfsPlus => "ltfs-plus",
            OnlinePolicy::Replan(ReplanInner::Sss) => "replan-sss",
            OnlinePolicy::Replan(ReplanInner::Gs) => "replan-gs",
            OnlinePolicy::Replan(ReplanInner::Fgs) => "replan-fgs",
            OnlinePolicy::Replan(ReplanInner::LogNfgs) => "replan-lognfgs",
        }
    }

    pub fn build(self) -> Box<dyn Policy + Send> {
        match self {
            OnlinePolicy::Ltfs => Box::new(Ltfs),
            OnlinePolicy::LtfsPlus => Box::new(LtfsPlus),
            OnlinePolicy::Replan(inner) => Box::new(Replan::new(inner)),
        }
    }
}

impl fmt::Display for OnlinePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for OnlinePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OnlinePolicy::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

pub fn policy_ltfs() -> Ltfs {
    Ltfs
}

pub fn policy_ltfs_plus() -> LtfsPlus {
    LtfsPlus
}

pub fn policy_replan(inner: &str) -> Result<Replan> {
    Ok(Replan::new(inner.parse()?))
}
