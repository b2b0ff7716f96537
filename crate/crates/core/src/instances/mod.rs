//! Instance generators and the `ltsp 1` file format.

mod format;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::tape::{build_tape, Request, RequestSet, Tape};

pub use format::{parse_instance, read_instance, render_instance, write_instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticParams {
    pub n_files: usize,
    pub k: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub tape: Tape,
    pub requests: RequestSet,
    /// Mean inter-arrival time drawn for each file.
    pub lambdas: Vec<u64>,
    /// Release horizon k·m.
    pub horizon: u64,
}

/// Sizes uniform in 1..=20, per-file Poisson arrivals over the horizon k·m.
pub fn gen_synthetic(params: &SyntheticParams) -> Result<(Tape, RequestSet)> {
    let inst = gen_synthetic_detailed(params)?;
    Ok((inst.tape, inst.requests))
}

pub fn gen_synthetic_detailed(params: &SyntheticParams) -> Result<SyntheticInstance> {
    if params.n_files == 0 || params.k == 0 {
        return Err(Error::Precondition(
            "synthetic instances need at least one file and k >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sizes: Vec<u64> = (0..params.n_files)
        .map(|_| rng.random_range(1..=20))
        .collect();
    let tape = build_tape(&sizes)?;
    let horizon = params.k * tape.length_m();
    let (lo, hi) = lambda_range(horizon);
    let mut lambdas = Vec::with_capacity(params.n_files);
    let mut requests = Vec::new();
    for file in 0..params.n_files {
        let lambda = rng.random_range(lo..=hi);
        lambdas.push(lambda);
        let draws = horizon.div_ceil(lambda);
        let poisson = Poisson::new(lambda as f64).expect("lambda is positive");
        let mut release = 0u64;
        for _ in 0..draws {
            release += poisson.sample(&mut rng) as u64;
            if release > horizon {
                break;
            }
            requests.push(Request { file, release });
        }
    }
    requests.sort_by_key(|r| (r.release, r.file));
    let requests = RequestSet::new(&tape, requests)?;
    Ok(SyntheticInstance {
        tape,
        requests,
        lambdas,
        horizon,
    })
}

/// Inclusive bounds for λ: ⌊H/50⌋..⌊H/5⌋, kept at least 1.
pub fn lambda_range(horizon: u64) -> (u64, u64) {
    let lo = (horizon / 50).max(1);
    let hi = (horizon / 5).max(lo);
    (lo, hi)
}

fn exact_sqrt(m: u64) -> Option<u64> {
    let r = (m as f64).sqrt().round() as u64;
    (r.checked_mul(r) == Some(m)).then_some(r)
}

/// Family on which the batch-free schedule is Θ(√m) worse than one merged batch.
pub fn gen_sss_pathological(m: u64) -> Result<(Tape, RequestSet)> {
    let r = exact_sqrt(m)
        .filter(|_| m >= 16)
        .ok_or_else(|| Error::Precondition(format!("{m} is not a perfect square >= 16")))?;
    let mut sizes = vec![1, m - r];
    sizes.extend(std::iter::repeat_n(1, (r - 2) as usize));
    let tape = build_tape(&sizes)?;
    let mut counts = vec![1u64; sizes.len()];
    counts[1] = 0;
    let requests = RequestSet::from_counts(&tape, &counts)?;
    Ok((tape, requests))
}

/// Two files where every atomic batch is taken but batching loses a factor near 3.
pub fn gen_gs_tightness(m: u64) -> Result<(Tape, RequestSet)> {
    if m < 3 {
        return Err(Error::Precondition(format!("m must be at least 3, got {m}")));
    }
    let tape = build_tape(&[1, m - 1])?;
    let requests = RequestSet::from_counts(&tape, &[m - 1, 1])?;
    Ok((tape, requests))
}

/// Tape [k, k²] used by the adaptive adversary.
pub fn gen_online_adversary_base(k: u64) -> Result<Tape> {
    if k < 2 {
        return Err(Error::Precondition(format!("k must be at least 2, got {k}")));
    }
    build_tape(&[k, k * k])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnapsackItem {
    pub value: u64,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInput {
    pub items: Vec<KnapsackItem>,
    pub capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackMeta {
    /// File holding each item, indexed like the input items.
    pub item_files: Vec<usize>,
    pub dummy_file: usize,
    pub artificial_files: Vec<usize>,
    /// Factor applied to weights and capacity (1 or 2) so halves are integral.
    pub scale: u64,
    /// Capacity after scaling; bounds the extra Phase-1 time of a plan.
    pub budget: u64,
    /// Release time of every dummy-file request.
    pub dummy_release: u64,
}

impl KnapsackMeta {
    /// Items whose files appear in `files`.
    pub fn items_of(&self, files: &[usize]) -> Vec<usize> {
        (0..self.item_files.len())
            .filter(|&o| files.contains(&self.item_files[o]))
            .collect()
    }

    /// Extra Phase-1 time of reading these items' files atomically.
    pub fn phase1_cost(&self, tape: &Tape, items: &[usize]) -> u64 {
        items
            .iter()
            .map(|&o| 2 * tape.file(self.item_files[o]).size)
            .sum()
    }
}

impl KnapsackInput {
    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() || self.capacity == 0 {
            return Err(Error::Precondition(
                "knapsack input needs items and a positive capacity".into(),
            ));
        }
        if self.items.iter().any(|i| i.value == 0 || i.weight == 0) {
            return Err(Error::Precondition(
                "item values and weights must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the release-time instance whose best Phase-1 plans pick a best knapsack packing.
pub fn knapsack_to_ltspr(input: &KnapsackInput) -> Result<(Tape, RequestSet, KnapsackMeta)> {
    input.validate()?;
    let scale = if input.items.iter().all(|i| i.weight % 2 == 0) {
        1
    } else {
        2
    };
    let cap = input.capacity * scale;
    let n_items = input.items.len() as u64;
    let value_sum: u64 = input.items.iter().map(|i| i.value).sum();
    let half_weights: u64 = input.items.iter().map(|i| i.weight * scale / 2).sum();
    let w_total = cap * (n_items - 1) + half_weights;
    let s_d = cap * value_sum / 2 + 1;
    let release = w_total + s_d + cap;
    let n_d = 3 * value_sum * release;

    let mut sizes = vec![s_d];
    let mut counts = vec![n_d];
    let mut item_files = vec![0usize; input.items.len()];
    let mut artificial_files = Vec::new();
    for o in (0..input.items.len()).rev() {
        item_files[o] = sizes.len();
        sizes.push(input.items[o].weight * scale / 2);
        counts.push(input.items[o].value);
        if o > 0 {
            artificial_files.push(sizes.len());
            sizes.push(cap);
            counts.push(0);
        }
    }
    let tape = build_tape(&sizes)?;
    let mut requests = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    for (file, &n) in counts.iter().enumerate() {
        let r = if file == 0 { release } else { 0 };
        requests.extend((0..n).map(|_| Request { file, release: r }));
    }
    let requests = RequestSet::new(&tape, requests)?;
    Ok((
        tape,
        requests,
        KnapsackMeta {
            item_files,
            dummy_file: 0,
            artificial_files,
            scale,
            budget: cap,
            dummy_release: release,
        },
    ))
}

/// Best knapsack value by subset enumeration.
pub fn knapsack_brute_force(input: &KnapsackInput) -> (u64, Vec<usize>) {
    let n = input.items.len();
    let mut best = (0u64, Vec::new());
    for mask in 0u64..(1 << n) {
        let (mut v, mut w) = (0, 0);
        for o in 0..n {
            if mask >> o & 1 == 1 {
                v += input.items[o].value;
                w += input.items[o].weight;
            }
        }
        if w <= input.capacity && v > best.0 {
            best = (v, (0..n).filter(|o| mask >> o & 1 == 1).collect());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_is_deterministic() {
        let p = SyntheticParams {
            n_files: 50,
            k: 3,
            seed: 9,
        };
        let a = gen_synthetic(&p).unwrap();
        let b = gen_synthetic(&p).unwrap();
        assert_eq!(a, b);
        let c = gen_synthetic(&SyntheticParams { seed: 10, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synthetic_respects_bounds() {
        let p = SyntheticParams {
            n_files: 300,
            k: 1,
            seed: 4,
        };
        let inst = gen_synthetic_detailed(&p).unwrap();
        assert!(inst.tape.files().iter().all(|f| (1..=20).contains(&f.size)));
        assert_eq!(inst.horizon, inst.tape.length_m());
        let (lo, hi) = lambda_range(inst.horizon);
        assert_eq!(lo, inst.horizon / 50);
        assert_eq!(hi, inst.horizon / 5);
        assert!(inst.lambdas.iter().all(|l| (lo..=hi).contains(l)));
        assert!(inst.requests.requests().iter().all(|r| r.release <= inst.horizon));
        let per_file = inst.requests.len() as f64 / 300.0;
        assert!((5.0..=50.0).contains(&per_file), "{per_file}");
        let rs = inst.requests.requests();
        assert!(rs.windows(2).all(|w| (w[0].release, w[0].file) <= (w[1].release, w[1].file)));
    }

    #[test]
    fn sss_family_shapes() {
        let (t, r) = gen_sss_pathological(16).unwrap();
        assert_eq!(t.sizes(), vec![1, 12, 1, 1]);
        assert_eq!(r.counts(), &[1, 0, 1, 1]);
        assert_eq!(t.length_m(), 15);
        for i in 3..=4u64 {
            assert_eq!(t.file(i as usize - 1).left, 16 - 4 + i - 1);
        }
        assert!(gen_sss_pathological(20).is_err());
        assert!(gen_sss_pathological(9).is_err());
    }

    #[test]
    fn gs_family_shapes() {
        let (t, r) = gen_gs_tightness(3).unwrap();
        assert_eq!(t.sizes(), vec![1, 2]);
        assert_eq!(r.counts(), &[2, 1]);
        assert!(gen_gs_tightness(2).is_err());
    }

    #[test]
    fn adversary_tape() {
        assert_eq!(gen_online_adversary_base(10).unwrap().sizes(), vec![10, 100]);
        assert_eq!(gen_online_adversary_base(2).unwrap().sizes(), vec![2, 4]);
        for k in 2..30 {
            assert_eq!(gen_online_adversary_base(k).unwrap().length_m(), k * k + k);
        }
        assert!(gen_online_adversary_base(1).is_err());
    }

    #[test]
    fn knapsack_layout() {
        let input = KnapsackInput {
            items: vec![
                KnapsackItem { value: 3, weight: 4 },
                KnapsackItem { value: 5, weight: 6 },
            ],
            capacity: 6,
        };
        let (t, r, meta) = knapsack_to_ltspr(&input).unwrap();
        assert_eq!(t.sizes(), vec![25, 3, 6, 2]);
        assert_eq!(r.counts(), &[1008, 5, 0, 3]);
        assert_eq!(t.length_m(), 36);
        assert_eq!(meta.dummy_release, 42);
        assert_eq!(meta.item_files, vec![3, 1]);
        assert_eq!(meta.artificial_files, vec![2]);
        assert_eq!(meta.scale, 1);
        assert!(r
            .requests()
            .iter()
            .all(|q| q.release == if q.file == 0 { 42 } else { 0 }));
    }

    #[test]
    fn knapsack_odd_weights_are_doubled() {
        let input = KnapsackInput {
            items: vec![KnapsackItem { value: 2, weight: 3 }],
            capacity: 5,
        };
        let (t, _, meta) = knapsack_to_ltspr(&input).unwrap();
        assert_eq!(meta.scale, 2);
        assert_eq!(meta.budget, 10);
        assert_eq!(t.sizes()[1], 3);
        assert_eq!(meta.phase1_cost(&t, &[0]), 6);
    }

    #[test]
    fn brute_force_knapsack() {
        let input = KnapsackInput {
            items: vec![
                KnapsackItem { value: 3, weight: 4 },
                KnapsackItem { value: 5, weight: 6 },
                KnapsackItem { value: 4, weight: 2 },
            ],
            capacity: 6,
        };
        assert_eq!(knapsack_brute_force(&input), (7, vec![0, 2]));
    }
}
