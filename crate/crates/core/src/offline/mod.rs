//! Offline schedulers: all releases are treated as 0.

mod cost;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{EvalOptions, OfflineEvaluator};
use crate::tape::{MiniBatch, RequestSet, Schedule, Tape};

pub(crate) use cost::CostModel;

pub const DEFAULT_ORACLE_FILES: usize = 8;

/// Instance seen by an offline solver: per-file counts and a head position.
#[derive(Debug, Clone)]
pub struct SolverContext<'a> {
    tape: &'a Tape,
    counts: Cow<'a, [u64]>,
    head_start: u64,
}

impl<'a> SolverContext<'a> {
    pub fn new(tape: &'a Tape, requests: &'a RequestSet) -> SolverContext<'a> {
        SolverContext {
            tape,
            counts: Cow::Borrowed(requests.counts()),
            head_start: tape.length_m(),
        }
    }

    pub fn from_counts(tape: &'a Tape, counts: impl Into<Cow<'a, [u64]>>) -> Result<Self> {
        let counts = counts.into();
        if counts.len() != tape.num_files() {
            return Err(Error::Precondition(format!(
                "{} counts given for {} files",
                counts.len(),
                tape.num_files()
            )));
        }
        Ok(SolverContext {
            tape,
            counts,
            head_start: tape.length_m(),
        })
    }

    pub fn with_head(mut self, h: u64) -> Result<Self> {
        if h > self.tape.length_m() || !self.tape.is_file_boundary(h) {
            return Err(Error::Precondition(format!(
                "head start {h} is not a file boundary"
            )));
        }
        self.head_start = h;
        Ok(self)
    }

    pub fn tape(&self) -> &'a Tape {
        self.tape
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn head_start(&self) -> u64 {
        self.head_start
    }

    /// Files whose read starts at or left of the head; only these may open a batch.
    pub fn eligible(&self) -> usize {
        self.tape.files_starting_at_or_before(self.head_start)
    }

    fn n(&self, f: usize) -> u64 {
        self.counts[f]
    }

    /// v(schedule) for this context.
    pub fn value(&self, schedule: &Schedule) -> u64 {
        CostModel::new(self.tape, &self.counts, self.head_start, schedule).total()
    }

    fn requests(&self) -> RequestSet {
        RequestSet::from_counts(self.tape, &self.counts).expect("counts match tape")
    }

    fn eval_opts(&self) -> EvalOptions {
        EvalOptions {
            head_start: Some(self.head_start),
            wait_for_release: false,
        }
    }

    fn check_file(&self, f: usize) -> Result<()> {
        if f >= self.tape.num_files() {
            return Err(Error::Precondition(format!("file {f} out of range")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpportunityCost {
    pub exact_delta: i64,
    pub closed_form_delta: i64,
}

pub fn sss(_ctx: &SolverContext<'_>) -> Schedule {
    Schedule::empty()
}

fn leftmost_requested(ctx: &SolverContext<'_>) -> Option<usize> {
    ctx.counts().iter().position(|&n| n > 0)
}

pub fn gs(ctx: &SolverContext<'_>) -> Schedule {
    let lp = leftmost_requested(ctx);
    Schedule::new(
        (0..ctx.eligible())
            .filter(|&f| ctx.n(f) > 0 && Some(f) != lp)
            .map(MiniBatch::atomic)
            .collect(),
    )
}

/// Both sides of the inclusion inequality for atomic (f,f) against `b1`.
fn inequality_sides(ctx: &SolverContext<'_>, b1: &Schedule, f: usize) -> (u128, u128) {
    let tape = ctx.tape;
    let left_sizes: u64 = b1
        .batches()
        .iter()
        .filter(|b| b.left_file < f)
        .map(|b| tape.batch_size(*b))
        .sum();
    let covered = b1.covered_files();
    let before: u64 = ctx.counts()[..f].iter().sum();
    let after: u64 = (f + 1..tape.num_files())
        .filter(|g| !covered.contains(g))
        .map(|g| ctx.n(g))
        .sum();
    let file = tape.file(f);
    let lhs = ctx.n(f) as u128 * (file.left + left_sizes) as u128;
    let rhs = file.size as u128 * (before + after) as u128;
    (lhs, rhs)
}

pub fn include_condition(ctx: &SolverContext<'_>, partial: &Schedule, f: usize) -> Result<bool> {
    ctx.check_file(f)?;
    if partial.batches().iter().any(|b| b.contains(f)) {
        return Err(Error::Precondition(format!(
            "file {f} is already covered by the schedule"
        )));
    }
    let (lhs, rhs) = inequality_sides(ctx, partial, f);
    Ok(lhs > rhs)
}

pub fn remove_condition(ctx: &SolverContext<'_>, schedule: &Schedule, f: usize) -> Result<bool> {
    ctx.check_file(f)?;
    if !schedule.contains(MiniBatch::atomic(f)) {
        return Err(Error::Precondition(format!(
            "atomic batch ({f},{f}) is not in the schedule"
        )));
    }
    let mut rest = schedule.clone();
    rest.remove_left(f);
    let (lhs, rhs) = inequality_sides(ctx, &rest, f);
    Ok(lhs < rhs)
}

/// GS followed by removal sweeps until no atomic batch satisfies the removal test.
pub fn fgs(ctx: &SolverContext<'_>) -> Schedule {
    let tape = ctx.tape;
    let nf = tape.num_files();
    let mut batched = vec![false; nf];
    for b in gs(ctx).batches() {
        batched[b.left_file] = true;
    }
    loop {
        let mut unbatched_total: u64 = (0..nf).filter(|&g| !batched[g]).map(|g| ctx.n(g)).sum();
        let mut removed = false;
        let mut left_sizes = 0u64;
        let mut before = 0u64;
        let mut unbatched_left = 0u64;
        for f in 0..nf {
            let n = ctx.n(f);
            if batched[f] {
                let file = tape.file(f);
                let after = unbatched_total - unbatched_left;
                let lhs = n as u128 * (file.left + left_sizes) as u128;
                let rhs = file.size as u128 * (before + after) as u128;
                if lhs < rhs {
                    batched[f] = false;
                    removed = true;
                    unbatched_total += n;
                    unbatched_left += n;
                } else {
                    left_sizes += file.size;
                }
            } else {
                unbatched_left += n;
            }
            before += n;
        }
        if !removed {
            break;
        }
    }
    Schedule::new(
        (0..nf)
            .filter(|&f| batched[f])
            .map(MiniBatch::atomic)
            .collect(),
    )
}

/// Delta of adding `b` to `schedule`, by evaluation differencing, plus the
/// closed-form estimate.
pub fn opportunity_cost(
    ctx: &SolverContext<'_>,
    schedule: &Schedule,
    b: MiniBatch,
) -> Result<OpportunityCost> {
    ctx.check_file(b.left_file)?;
    ctx.check_file(b.right_file)?;
    if b.right_file < b.left_file {
        return Err(Error::Precondition(format!("batch {b} is reversed")));
    }
    if schedule.batch_at(b.left_file).is_some() {
        return Err(Error::Precondition(format!(
            "schedule already has a batch starting at file {}",
            b.left_file
        )));
    }
    let rs = ctx.requests();
    let ev = OfflineEvaluator::new(ctx.tape, &rs);
    let before = ev.total(schedule, ctx.eval_opts())?;
    let mut with = schedule.clone();
    with.insert(b);
    let after = ev.total(&with, ctx.eval_opts())?;
    Ok(OpportunityCost {
        exact_delta: after as i64 - before as i64,
        closed_form_delta: closed_form_delta(ctx, schedule, b),
    })
}

fn closed_form_delta(ctx: &SolverContext<'_>, b1: &Schedule, b: MiniBatch) -> i64 {
    let tape = ctx.tape;
    let covered = b1.covered_files();
    let sb = tape.batch_size(b) as i64;
    let before: u64 = ctx.counts()[..b.left_file].iter().sum();
    let after: u64 = (b.right_file + 1..tape.num_files())
        .filter(|g| !covered.contains(g))
        .map(|g| ctx.n(g))
        .sum();
    let lb = tape.file(b.left_file).left as i64;
    let mut gain = 0i64;
    for f in b.left_file..=b.right_file {
        if covered.contains(&f) {
            continue;
        }
        let lf = tape.file(f).left;
        let left_sizes: u64 = b1
            .batches()
            .iter()
            .filter(|x| tape.file(x.left_file).left < lf)
            .map(|x| tape.batch_size(*x))
            .sum();
        gain += ctx.n(f) as i64 * (lb + left_sizes as i64);
    }
    sb * (before + after) as i64 - gain
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

pub fn nfgs(ctx: &SolverContext<'_>) -> Schedule {
    nfgs_windowed(ctx, None)
}

/// NFGS restricted to batches spanning at most ⌈log2 |F|⌉ further files.
pub fn log_nfgs(ctx: &SolverContext<'_>) -> Schedule {
    nfgs_windowed(ctx, Some(ceil_log2(ctx.tape.num_files())))
}

fn nfgs_windowed(ctx: &SolverContext<'_>, window: Option<usize>) -> Schedule {
    let tape = ctx.tape;
    let nf = tape.num_files();
    let mut b1 = fgs(ctx);
    let mut model: Option<CostModel> = None;
    let mut out = Vec::new();
    for f in 0..ctx.eligible() {
        let last = match window {
            Some(w) => (f + w).min(nf - 1),
            None => nf - 1,
        };
        if last == f {
            continue;
        }
        let prior = b1.batch_at(f);
        let reduced_model;
        let base = match prior {
            Some(_) => {
                let mut reduced = b1.clone();
                reduced.remove_left(f);
                reduced_model = CostModel::new(tape, &ctx.counts, ctx.head_start, &reduced);
                &reduced_model
            }
            None => model.get_or_insert_with(|| {
                CostModel::new(tape, &ctx.counts, ctx.head_start, &b1)
            }),
        };
        base.deltas(f, last, &mut out);
        let mut best: Option<(i64, usize)> = None;
        for (j, &d) in out.iter().enumerate().skip(1) {
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, f + j));
            }
        }
        // The prior batch stays unless the candidate also beats it.
        let keep = prior.map_or(0, |p| out[p.right_file - f]).min(0);
        if let Some((d, r)) = best {
            if d < 0 && d < keep {
                b1.remove_left(f);
                b1.insert(MiniBatch::new(f, r));
                model = None;
            }
        }
    }
    b1
}

/// Cheapest batch opening at `f` against `b1` without its batch at `f`,
/// over right endpoints `f..=f+window` (atomic included). `None` unless it
/// strictly lowers v.
pub(crate) fn best_batch_at(
    ctx: &SolverContext<'_>,
    b1: &Schedule,
    f: usize,
    window: usize,
) -> Option<MiniBatch> {
    let mut reduced = b1.clone();
    reduced.remove_left(f);
    let model = CostModel::new(ctx.tape, &ctx.counts, ctx.head_start, &reduced);
    let last = (f + window).min(ctx.tape.num_files() - 1);
    let mut out = Vec::new();
    model.deltas(f, last, &mut out);
    let (j, &d) = out.iter().enumerate().min_by_key(|&(j, &d)| (d, j))?;
    (d < 0).then(|| MiniBatch::new(f, f + j))
}

pub(crate) fn log_window(files: usize) -> usize {
    ceil_log2(files)
}

/// Exhaustive search over one optional right endpoint per eligible file.
pub fn oracle_exact(ctx: &SolverContext<'_>, max_files: usize) -> Result<(Schedule, u64)> {
    let nf = ctx.tape.num_files();
    if nf > max_files {
        return Err(Error::InstanceTooLarge {
            files: nf,
            limit: max_files,
        });
    }
    let rs = ctx.requests();
    let ev = OfflineEvaluator::new(ctx.tape, &rs);
    let opts = ctx.eval_opts();
    let eligible = ctx.eligible();
    let mut best: Option<(Schedule, u64)> = None;
    let mut stack: Vec<MiniBatch> = Vec::new();

    fn walk(
        f: usize,
        eligible: usize,
        nf: usize,
        stack: &mut Vec<MiniBatch>,
        best: &mut Option<(Schedule, u64)>,
        visit: &mut dyn FnMut(&[MiniBatch], &mut Option<(Schedule, u64)>),
    ) {
        if f == eligible {
            visit(stack, best);
            return;
        }
        walk(f + 1, eligible, nf, stack, best, visit);
        for r in f..nf {
            stack.push(MiniBatch::new(f, r));
            walk(f + 1, eligible, nf, stack, best, visit);
            stack.pop();
        }
    }

    let mut visit = |batches: &[MiniBatch], best: &mut Option<(Schedule, u64)>| {
        let s = Schedule::new(batches.to_vec());
        let v = ev.total(&s, opts).expect("enumerated schedules are valid");
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            *best = Some((s, v));
        }
    };
    walk(0, eligible, nf, &mut stack, &mut best, &mut visit);
    Ok(best.expect("the empty schedule is always enumerated"))
}

/// Optimal schedule when all files have equal size and at most one request each.
pub fn uniform_case_solver(ctx: &SolverContext<'_>) -> Result<Schedule> {
    let files = ctx.tape.files();
    if files.iter().any(|f| f.size != files[0].size) {
        return Err(Error::NotApplicable("file sizes differ".into()));
    }
    if let Some(f) = ctx.counts().iter().position(|&n| n > 1) {
        return Err(Error::NotApplicable(format!(
            "file {f} has more than one request"
        )));
    }
    if ctx.counts().iter().all(|&n| n == 1) {
        return Ok(Schedule::empty());
    }
    Ok(Schedule::new(
        (0..ctx.eligible())
            .filter(|&f| ctx.n(f) == 1)
            .map(MiniBatch::atomic)
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OfflineAlgorithm {
    Sss,
    Gs,
    Fgs,
    Nfgs,
    LogNfgs,
}

impl OfflineAlgorithm {
    pub const ALL: [OfflineAlgorithm; 5] = [
        OfflineAlgorithm::Sss,
        OfflineAlgorithm::Gs,
        OfflineAlgorithm::Fgs,
        OfflineAlgorithm::Nfgs,
        OfflineAlgorithm::LogNfgs,
    ];

    pub fn id(self) -> &'static str {
        match self {
            OfflineAlgorithm::Sss => "sss",
            OfflineAlgorithm::Gs => "gs",
            OfflineAlgorithm::Fgs => "fgs",
            OfflineAlgorithm::Nfgs => "nfgs",
            OfflineAlgorithm::LogNfgs => "log-nfgs",
        }
    }

    pub fn solve(self, ctx: &SolverContext<'_>) -> Schedule {
        match self {
            OfflineAlgorithm::Sss => sss(ctx),
            OfflineAlgorithm::Gs => gs(ctx),
            OfflineAlgorithm::Fgs => fgs(ctx),
            OfflineAlgorithm::Nfgs => nfgs(ctx),
            OfflineAlgorithm::LogNfgs => log_nfgs(ctx),
        }
    }
}

impl fmt::Display for OfflineAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for OfflineAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OfflineAlgorithm::ALL
            .into_iter()
            .find(|a| a.id() == s || (s == "log_nfgs" && *a == OfflineAlgorithm::LogNfgs))
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}
