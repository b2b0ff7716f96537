//! Closed-form service times for all-zero releases, and O(1)-per-candidate
//! deltas for adding one batch.

use crate::tape::{MiniBatch, Schedule, Tape};

const NONE: usize = usize::MAX;

/// Per-file service times of one schedule, releases taken as 0.
pub(crate) struct CostModel<'a> {
    tape: &'a Tape,
    counts: &'a [u64],
    origin: u64,
    batches: Vec<MiniBatch>,
    /// Left file of the batch that services each file, or `NONE` for Phase 2.
    serving: Vec<usize>,
    svc: Vec<u64>,
    total: u64,
    e: u64,
    lp: Option<usize>,
    lb: Option<usize>,
    n_phase2: u64,
}

impl<'a> CostModel<'a> {
    pub fn new(tape: &'a Tape, counts: &'a [u64], origin: u64, schedule: &Schedule) -> Self {
        let files = tape.files();
        let nf = files.len();
        let mut serving = vec![NONE; nf];
        let mut svc = vec![0u64; nf];
        let mut total = 0u64;
        let mut s_right = 0u64;
        for b in schedule.execution_order() {
            let first = &files[b.left_file];
            let t0 = origin - first.start() + 2 * s_right;
            for g in b.left_file..=b.right_file {
                if serving[g] == NONE {
                    serving[g] = b.left_file;
                    svc[g] = t0 + files[g].left - first.left;
                    total += counts[g] * svc[g];
                }
            }
            s_right += tape.batch_size(*b);
        }
        let s_tot = s_right;
        let lp = (0..nf).find(|&g| counts[g] > 0 && serving[g] == NONE);
        let lb = schedule.batches().first().map(|b| b.left_file);
        let mut e = origin;
        if let Some(p) = lp {
            e = e.min(files[p].start());
        }
        if let Some(b) = lb {
            e = e.min(files[b].start());
        }
        let mut n_phase2 = 0;
        if lp.is_some() {
            for g in 0..nf {
                if serving[g] == NONE && counts[g] > 0 {
                    svc[g] = origin + files[g].start() - 2 * e + 2 * s_tot;
                    total += counts[g] * svc[g];
                    n_phase2 += counts[g];
                }
            }
        }
        CostModel {
            tape,
            counts,
            origin,
            batches: schedule.batches().to_vec(),
            serving,
            svc,
            total,
            e,
            lp,
            lb,
            n_phase2,
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `out[j]` = v(B ∪ {(f, f+j)}) − v(B) for `f+j` up to `last`.
    /// The model's schedule must have no batch starting at `f`.
    pub fn deltas(&self, f: usize, last: usize, out: &mut Vec<i64>) {
        debug_assert!(self.batches.iter().all(|b| b.left_file != f));
        out.clear();
        let files = self.tape.files();
        let first = &files[f];
        let s_right: u64 = self
            .batches
            .iter()
            .filter(|b| b.left_file > f)
            .map(|b| self.tape.batch_size(*b))
            .sum();
        let tb = self.origin - first.start() + 2 * s_right;
        let n_lb: u64 = (0..files.len())
            .filter(|&g| self.serving[g] != NONE && self.serving[g] < f)
            .map(|g| self.counts[g])
            .sum();
        let shift = self.lp.is_none_or(|p| p >= f) && self.lb.is_none_or(|b| b > f);
        let de = if shift { self.e - first.start() } else { 0 } as i64;

        let mut acc = 0i64;
        let mut lb_in = 0u64;
        let mut p2_in = 0u64;
        for g in f..=last {
            let n = self.counts[g];
            let sv = self.serving[g];
            if n > 0 && (sv == NONE || sv < f) {
                let new = tb + files[g].left - first.left;
                acc += n as i64 * (new as i64 - self.svc[g] as i64);
                if sv == NONE {
                    p2_in += n;
                } else {
                    lb_in += n;
                }
            }
            let sb = (files[g].right - first.left + 1) as i64;
            let delta = acc
                + 2 * sb * (n_lb - lb_in) as i64
                + (2 * sb + 2 * de) * (self.n_phase2 - p2_in) as i64;
            out.push(delta);
        }
    }
}
