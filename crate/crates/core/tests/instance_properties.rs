mod common;

use common::release_instance;
use ltsp_core::instances::{
    gen_synthetic, knapsack_to_ltspr, parse_instance, render_instance, KnapsackInput,
    KnapsackItem, SyntheticParams,
};
use proptest::prelude::*;

#[test]
fn synthetic_golden() {
    let (tape, rs) = gen_synthetic(&SyntheticParams { n_files: 4, k: 1, seed: 1 }).unwrap();
    let expected = include_str!("data/synthetic_4_1_1.ltsp");
    assert_eq!(render_instance(&tape, &rs), expected);
}

fn knapsack() -> impl Strategy<Value = KnapsackInput> {
    (
        proptest::collection::vec((1u64..=10, 1u64..=10), 1..=8),
        1u64..=25,
    )
        .prop_map(|(items, capacity)| KnapsackInput {
            items: items
                .into_iter()
                .map(|(value, weight)| KnapsackItem { value, weight })
                .collect(),
            capacity,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn write_then_read_is_identity(
        sizes in proptest::collection::vec(1u64..=1000, 1..12),
        reqs in proptest::collection::vec((0usize..12, 0u64..1_000_000), 0..30),
    ) {
        let nf = sizes.len();
        let reqs: Vec<_> = reqs.into_iter().map(|(f, r)| (f % nf, r)).collect();
        let (tape, rs) = release_instance(&sizes, &reqs);
        let text = render_instance(&tape, &rs);
        let (t2, r2) = parse_instance(&text).unwrap();
        prop_assert_eq!(&t2, &tape);
        prop_assert_eq!(&r2, &rs);
        prop_assert_eq!(render_instance(&t2, &r2), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generator_is_byte_deterministic(n_files in 1usize..60, k in 1u64..=5, seed in any::<u64>()) {
        let p = SyntheticParams { n_files, k, seed };
        let (a, ra) = gen_synthetic(&p).unwrap();
        let (b, rb) = gen_synthetic(&p).unwrap();
        prop_assert_eq!(render_instance(&a, &ra), render_instance(&b, &rb));
        let horizon = k * a.length_m();
        prop_assert!(ra.requests().iter().all(|r| r.release <= horizon));
    }

    #[test]
    fn knapsack_budget_matches_capacity(input in knapsack(), mask in any::<u16>()) {
        let (tape, _, meta) = knapsack_to_ltspr(&input).unwrap();
        let chosen: Vec<usize> = (0..input.items.len()).filter(|o| mask >> o & 1 == 1).collect();
        let files: Vec<usize> = chosen.iter().map(|&o| meta.item_files[o]).collect();
        prop_assert_eq!(meta.items_of(&files), chosen.clone());
        let weight: u64 = chosen.iter().map(|&o| input.items[o].weight).sum();
        prop_assert_eq!(
            meta.phase1_cost(&tape, &chosen) <= meta.budget,
            weight <= input.capacity
        );
    }
}
