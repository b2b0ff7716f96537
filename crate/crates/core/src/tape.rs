//! Tape geometry, requests and Phase-1 schedules.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A contiguous run of blocks holding one file. Blocks are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FileExtent {
    pub index: usize,
    pub left: u64,
    pub right: u64,
    pub size: u64,
}

impl FileExtent {
    /// Boundary the head sits on right before reading this file.
    pub fn start(&self) -> u64 {
        self.left - 1
    }

    /// Boundary the head sits on right after reading this file.
    pub fn end(&self) -> u64 {
        self.right
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tape {
    files: Vec<FileExtent>,
    length_m: u64,
}

/// Lays files out back to back starting at block 1.
pub fn build_tape(sizes: &[u64]) -> Result<Tape> {
    Tape::new(sizes)
}

impl Tape {
    pub fn new(sizes: &[u64]) -> Result<Tape> {
        if sizes.is_empty() {
            return Err(Error::InvalidGeometry("a tape needs at least one file".into()));
        }
        let mut files = Vec::with_capacity(sizes.len());
        let mut next = 1u64;
        for (index, &size) in sizes.iter().enumerate() {
            if size == 0 {
                return Err(Error::InvalidGeometry(format!("file {index} has size 0")));
            }
            let right = next
                .checked_add(size - 1)
                .ok_or_else(|| Error::InvalidGeometry("tape length overflows".into()))?;
            files.push(FileExtent {
                index,
                left: next,
                right,
                size,
            });
            next = right + 1;
        }
        Ok(Tape {
            length_m: next - 1,
            files,
        })
    }

    pub fn files(&self) -> &[FileExtent] {
        &self.files
    }

    pub fn file(&self, f: usize) -> &FileExtent {
        &self.files[f]
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn length_m(&self) -> u64 {
        self.length_m
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.files.iter().map(|f| f.size).collect()
    }

    /// True for the boundaries between files, plus 0 and m.
    pub fn is_file_boundary(&self, p: u64) -> bool {
        p == self.length_m || self.file_starting_at(p).is_some()
    }

    /// File whose read starts at boundary `p`.
    pub fn file_starting_at(&self, p: u64) -> Option<usize> {
        let i = self.files.partition_point(|f| f.start() < p);
        (i < self.files.len() && self.files[i].start() == p).then_some(i)
    }

    /// File whose read ends at boundary `p`.
    pub fn file_ending_at(&self, p: u64) -> Option<usize> {
        let i = self.files.partition_point(|f| f.end() < p);
        (i < self.files.len() && self.files[i].end() == p).then_some(i)
    }

    /// Number of files whose start boundary is at or left of `h`.
    pub fn files_starting_at_or_before(&self, h: u64) -> usize {
        self.files.partition_point(|f| f.start() <= h)
    }

    /// Blocks covered by the batch, from l(f) to r(f').
    pub fn batch_size(&self, b: MiniBatch) -> u64 {
        self.files[b.right_file].right - self.files[b.left_file].left + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Request {
    pub file: usize,
    pub release: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestSet {
    requests: Vec<Request>,
    per_file_count: Vec<u64>,
}

impl RequestSet {
    pub fn new(tape: &Tape, requests: Vec<Request>) -> Result<RequestSet> {
        let mut per_file_count = vec![0u64; tape.num_files()];
        for (index, r) in requests.iter().enumerate() {
            if r.file >= tape.num_files() {
                return Err(Error::InvalidRequest {
                    index,
                    file: r.file,
                    files: tape.num_files(),
                });
            }
            per_file_count[r.file] += 1;
        }
        Ok(RequestSet {
            requests,
            per_file_count,
        })
    }

    /// `counts[f]` requests on each file, all released at 0.
    pub fn from_counts(tape: &Tape, counts: &[u64]) -> Result<RequestSet> {
        if counts.len() != tape.num_files() {
            return Err(Error::Precondition(format!(
                "{} counts given for {} files",
                counts.len(),
                tape.num_files()
            )));
        }
        let mut requests = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
        for (file, &n) in counts.iter().enumerate() {
            requests.extend((0..n).map(|_| Request { file, release: 0 }));
        }
        Ok(RequestSet {
            requests,
            per_file_count: counts.to_vec(),
        })
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn count(&self, f: usize) -> u64 {
        self.per_file_count[f]
    }

    pub fn counts(&self) -> &[u64] {
        &self.per_file_count
    }

    /// Same requests with every release set to 0.
    pub fn zero_releases(&self) -> RequestSet {
        RequestSet {
            requests: self
                .requests
                .iter()
                .map(|r| Request {
                    file: r.file,
                    release: 0,
                })
                .collect(),
            per_file_count: self.per_file_count.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MiniBatch {
    pub left_file: usize,
    pub right_file: usize,
}

impl MiniBatch {
    pub fn new(left_file: usize, right_file: usize) -> MiniBatch {
        MiniBatch {
            left_file,
            right_file,
        }
    }

    pub fn atomic(f: usize) -> MiniBatch {
        MiniBatch::new(f, f)
    }

    pub fn is_atomic(&self) -> bool {
        self.left_file == self.right_file
    }

    pub fn contains(&self, f: usize) -> bool {
        self.left_file <= f && f <= self.right_file
    }
}

impl fmt::Display for MiniBatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left_file, self.right_file)
    }
}

/// True iff the covered file ranges intersect and neither contains the other.
pub fn partially_overlaps(a: MiniBatch, b: MiniBatch) -> bool {
    let intersect = a.left_file <= b.right_file && b.left_file <= a.right_file;
    let a_in_b = b.left_file <= a.left_file && a.right_file <= b.right_file;
    let b_in_a = a.left_file <= b.left_file && b.right_file <= a.right_file;
    intersect && !a_in_b && !b_in_a
}

/// Phase-1 mini-batch set. Stored sorted, so equality ignores input order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    batches: Vec<MiniBatch>,
}

impl Schedule {
    pub fn new(mut batches: Vec<MiniBatch>) -> Schedule {
        batches.sort();
        batches.dedup();
        Schedule { batches }
    }

    pub fn empty() -> Schedule {
        Schedule::default()
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Schedule {
        Schedule::new(pairs.iter().map(|&(l, r)| MiniBatch::new(l, r)).collect())
    }

    pub fn batches(&self) -> &[MiniBatch] {
        &self.batches
    }

    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    /// Batches in execution order: decreasing left file.
    pub fn execution_order(&self) -> impl Iterator<Item = &MiniBatch> {
        self.batches.iter().rev()
    }

    pub fn batch_at(&self, left_file: usize) -> Option<MiniBatch> {
        let i = self.batches.partition_point(|b| b.left_file < left_file);
        self.batches
            .get(i)
            .copied()
            .filter(|b| b.left_file == left_file)
    }

    pub fn contains(&self, b: MiniBatch) -> bool {
        self.batches.binary_search(&b).is_ok()
    }

    pub fn insert(&mut self, b: MiniBatch) {
        if let Err(i) = self.batches.binary_search(&b) {
            self.batches.insert(i, b);
        }
    }

    pub fn remove_left(&mut self, left_file: usize) -> Option<MiniBatch> {
        let i = self.batches.partition_point(|b| b.left_file < left_file);
        if self.batches.get(i).is_some_and(|b| b.left_file == left_file) {
            Some(self.batches.remove(i))
        } else {
            None
        }
    }

    /// Files covered by at least one batch.
    pub fn covered_files(&self) -> BTreeSet<usize> {
        self.batches
            .iter()
            .flat_map(|b| b.left_file..=b.right_file)
            .collect()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.batches.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    SharedLeftFile { left_file: usize },
    IndexOutOfRange { batch: MiniBatch, files: usize },
    Reversed { batch: MiniBatch },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::SharedLeftFile { left_file } => {
                write!(f, "several batches share left file {left_file}")
            }
            ScheduleViolation::IndexOutOfRange { batch, files } => {
                write!(f, "batch {batch} is out of range for a {files}-file tape")
            }
            ScheduleViolation::Reversed { batch } => {
                write!(f, "batch {batch} ends left of where it starts")
            }
        }
    }
}

/// Lists every structural problem of `schedule` on `tape`; empty means valid.
pub fn validate_schedule(tape: &Tape, schedule: &Schedule) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    let n = tape.num_files();
    for b in schedule.batches() {
        if b.left_file >= n || b.right_file >= n {
            out.push(ScheduleViolation::IndexOutOfRange {
                batch: *b,
                files: n,
            });
        } else if b.right_file < b.left_file {
            out.push(ScheduleViolation::Reversed { batch: *b });
        }
    }
    for w in schedule.batches().windows(2) {
        if w[0].left_file == w[1].left_file
            && !out.iter().any(|v| {
                matches!(v, ScheduleViolation::SharedLeftFile { left_file } if *left_file == w[0].left_file)
            })
        {
            out.push(ScheduleViolation::SharedLeftFile {
                left_file: w[0].left_file,
            });
        }
    }
    out
}

pub(crate) fn check_schedule(tape: &Tape, schedule: &Schedule) -> Result<()> {
    let v = validate_schedule(tape, schedule);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_layout() {
        let t = build_tape(&[2, 3, 1]).unwrap();
        let spans: Vec<_> = t.files().iter().map(|f| (f.left, f.right)).collect();
        assert_eq!(spans, vec![(1, 2), (3, 5), (6, 6)]);
        assert_eq!(t.length_m(), 6);
    }

    #[test]
    fn single_file() {
        let t = build_tape(&[1]).unwrap();
        assert_eq!((t.file(0).left, t.file(0).right), (1, 1));
        assert_eq!(t.length_m(), 1);
    }

    #[test]
    fn two_file_family() {
        let m = 10;
        let t = build_tape(&[1, m - 1]).unwrap();
        assert_eq!((t.file(0).left, t.file(0).right), (1, 1));
        assert_eq!((t.file(1).left, t.file(1).right), (2, m));
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(matches!(build_tape(&[]), Err(Error::InvalidGeometry(_))));
        assert!(matches!(build_tape(&[2, 0]), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn boundary_lookup() {
        let t = build_tape(&[2, 3, 1]).unwrap();
        assert_eq!(t.file_starting_at(0), Some(0));
        assert_eq!(t.file_starting_at(2), Some(1));
        assert_eq!(t.file_starting_at(5), Some(2));
        assert_eq!(t.file_starting_at(6), None);
        assert_eq!(t.file_starting_at(3), None);
        assert_eq!(t.file_ending_at(6), Some(2));
        assert_eq!(t.file_ending_at(2), Some(0));
        assert_eq!(t.file_ending_at(0), None);
        assert!(t.is_file_boundary(6));
        assert!(!t.is_file_boundary(4));
        assert_eq!(t.files_starting_at_or_before(6), 3);
        assert_eq!(t.files_starting_at_or_before(4), 2);
        assert_eq!(t.batch_size(MiniBatch::new(0, 1)), 5);
    }

    #[test]
    fn overlap_predicate() {
        let mb = MiniBatch::new;
        assert!(partially_overlaps(mb(0, 2), mb(1, 3)));
        assert!(partially_overlaps(mb(1, 3), mb(0, 2)));
        assert!(!partially_overlaps(mb(0, 2), mb(1, 1)));
        assert!(!partially_overlaps(mb(0, 0), mb(1, 1)));
    }

    #[test]
    fn schedule_validation() {
        let two = build_tape(&[1, 1]).unwrap();
        assert!(validate_schedule(&two, &Schedule::from_pairs(&[(1, 1)])).is_empty());

        let three = build_tape(&[1, 1, 1]).unwrap();
        let v = validate_schedule(&three, &Schedule::from_pairs(&[(1, 1), (1, 2)]));
        assert_eq!(v, vec![ScheduleViolation::SharedLeftFile { left_file: 1 }]);

        let v = validate_schedule(&three, &Schedule::from_pairs(&[(4, 4)]));
        assert!(matches!(v[..], [ScheduleViolation::IndexOutOfRange { .. }]));
    }

    #[test]
    fn schedule_is_a_set() {
        let a = Schedule::from_pairs(&[(2, 2), (0, 1)]);
        let b = Schedule::from_pairs(&[(0, 1), (2, 2), (2, 2)]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{(0,1),(2,2)}");
        assert_eq!(a.batch_at(2), Some(MiniBatch::atomic(2)));
        assert_eq!(a.batch_at(1), None);
        let order: Vec<_> = a.execution_order().map(|b| b.left_file).collect();
        assert_eq!(order, vec![2, 0]);
    }

    #[test]
    fn request_counts() {
        let t = build_tape(&[2, 3, 1]).unwrap();
        let rs = RequestSet::new(
            &t,
            vec![
                Request { file: 0, release: 3 },
                Request { file: 2, release: 0 },
                Request { file: 2, release: 9 },
            ],
        )
        .unwrap();
        assert_eq!(rs.counts(), &[1, 0, 2]);
        assert!(RequestSet::new(&t, vec![Request { file: 3, release: 0 }]).is_err());
        assert!(rs.zero_releases().requests().iter().all(|r| r.release == 0));
    }
}
