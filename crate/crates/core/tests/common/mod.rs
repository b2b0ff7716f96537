#![allow(dead_code)]

use ltsp_core::{build_tape, Request, RequestSet, Tape};
use proptest::prelude::*;

/// Tape sizes and per-file request counts.
pub fn small_counts(max_files: usize, max_size: u64, max_n: u64) -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (1..=max_files).prop_flat_map(move |n| {
        (
            proptest::collection::vec(1..=max_size, n),
            proptest::collection::vec(0..=max_n, n),
        )
    })
}

/// Tape sizes and (file, release) requests.
pub fn online_instance(
    max_files: usize,
    max_size: u64,
    max_requests: usize,
    horizon: u64,
) -> impl Strategy<Value = (Vec<u64>, Vec<(usize, u64)>)> {
    (1..=max_files).prop_flat_map(move |n| {
        (
            proptest::collection::vec(1..=max_size, n),
            proptest::collection::vec((0..n, 0..=horizon), 0..=max_requests),
        )
    })
}

pub fn counts_instance(sizes: &[u64], counts: &[u64]) -> (Tape, RequestSet) {
    let tape = build_tape(sizes).unwrap();
    let rs = RequestSet::from_counts(&tape, counts).unwrap();
    (tape, rs)
}

pub fn release_instance(sizes: &[u64], reqs: &[(usize, u64)]) -> (Tape, RequestSet) {
    let tape = build_tape(sizes).unwrap();
    let rs = RequestSet::new(
        &tape,
        reqs.iter()
            .map(|&(file, release)| Request { file, release })
            .collect(),
    )
    .unwrap();
    (tape, rs)
}
