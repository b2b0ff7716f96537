//! Online scheduling: requests become visible at their release times.

mod adversary;
mod policies;
mod sim;

pub use adversary::{adversary_lower_bound, reference_cost, AdversaryOutcome};
pub use policies::{
    policy_ltfs, policy_ltfs_plus, policy_replan, Ltfs, LtfsPlus, OnlinePolicy, Replan,
    ReplanInner,
};
pub use sim::{
    simulate, simulate_with, Action, EventKind, Policy, SimOptions, SimState, SimTrace,
    Simulator, StepReport, TraceEvent,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::{build_tape, Request, RequestSet, Tape};

    fn t1() -> Tape {
        build_tape(&[2, 3, 1]).unwrap()
    }

    fn reqs(t: &Tape, v: &[(usize, u64)]) -> RequestSet {
        RequestSet::new(
            t,
            v.iter()
                .map(|&(file, release)| Request { file, release })
                .collect(),
        )
        .unwrap()
    }

    fn total(p: OnlinePolicy, v: &[(usize, u64)]) -> (u64, Vec<Option<u64>>) {
        let t = t1();
        let r = reqs(&t, v);
        let (res, trace) = simulate(&t, &r, p.build().as_mut(), 0).unwrap();
        assert_eq!(res.service_times, trace.per_request_service);
        (res.total_response, res.service_times)
    }

    #[test]
    fn ltfs_hand_example() {
        let (tot, svc) = total(OnlinePolicy::Ltfs, &[(0, 0), (2, 2), (2, 4)]);
        assert_eq!(tot, 22);
        let resp: Vec<u64> = svc
            .iter()
            .zip([0, 2, 4])
            .map(|(s, r)| s.unwrap() - r)
            .collect();
        assert_eq!(resp, vec![6, 9, 7]);
    }

    #[test]
    fn ltfs_plus_reads_in_passing() {
        let v = [(0, 0), (2, 1), (1, 7)];
        assert_eq!(total(OnlinePolicy::Ltfs, &v).0, 25);
        assert_eq!(total(OnlinePolicy::LtfsPlus, &v).0, 17);
    }

    #[test]
    fn replan_hand_examples() {
        let v = [(0, 0), (2, 0)];
        let fgs = OnlinePolicy::Replan(ReplanInner::Fgs);
        assert_eq!(total(fgs, &v), (9, vec![Some(8), Some(1)]));
        assert_eq!(total(OnlinePolicy::Replan(ReplanInner::Sss), &v).0, 17);
        assert_eq!(total(OnlinePolicy::Replan(ReplanInner::Gs), &v).0, 9);
    }

    #[test]
    fn replan_fgs_batches_at_t1() {
        let t = t1();
        let r = reqs(&t, &[(0, 0), (2, 0)]);
        let mut p = OnlinePolicy::Replan(ReplanInner::Fgs).build();
        let (_, trace) = simulate(&t, &r, p.as_mut(), 0).unwrap();
        let batch = trace
            .events
            .iter()
            .find(|e| e.kind == EventKind::BatchStart)
            .unwrap();
        assert_eq!((batch.time, batch.payload.as_str()), (1, "left=2 right=2"));
    }

    #[test]
    fn single_request_direct_move() {
        let t = t1();
        for f in 0..3 {
            let r = reqs(&t, &[(f, 0)]);
            let (res, _) = simulate(&t, &r, &mut Ltfs, 3).unwrap();
            assert_eq!(res.total_response, t.length_m() - t.file(f).left + 1);
        }
    }

    #[test]
    fn idle_until_release() {
        let t = t1();
        let r = reqs(&t, &[(2, 40)]);
        for p in OnlinePolicy::ALL {
            let (res, trace) = simulate(&t, &r, p.build().as_mut(), 0).unwrap();
            assert_eq!(res.total_response, 1, "{p}");
            assert_eq!(trace.events[0].kind, EventKind::Idle);
        }
    }

    #[test]
    fn trace_dump_format() {
        let t = t1();
        let r = reqs(&t, &[(0, 0)]);
        let (_, trace) = simulate(&t, &r, &mut Ltfs, 0).unwrap();
        let dump = trace.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines[0], "0\tmove\tfrom=6 to=0");
        assert_eq!(lines[1], "6\tread_start\tfile=0");
        assert_eq!(lines[2], "6\tservice\trequest=0 file=0 release=0");
        assert_eq!(lines[3], "8\tread_end\tfile=0");
    }

    struct Bad;
    impl Policy for Bad {
        fn name(&self) -> &str {
            "bad"
        }
        fn decide(&mut self, _: &SimState<'_>) -> Action {
            Action::ReadFile(0)
        }
    }

    #[test]
    fn illegal_action_faults() {
        let t = t1();
        let r = reqs(&t, &[(0, 0)]);
        let err = simulate(&t, &r, &mut Bad, 0).unwrap_err();
        assert!(err.to_string().contains("ReadFile(0)"), "{err}");
    }

    #[test]
    fn adversary_reference_point() {
        let out = adversary_lower_bound(&mut Ltfs, 10, 0).unwrap();
        assert_eq!(out.alg_cost, 1200);
        assert_eq!(out.trigger, Some(200));
        // park-left template: wait from 110 to 200, then read both files
        assert_eq!(out.reference_cost, 200 + 10);
        assert!((out.ratio - 1200.0 / 210.0).abs() < 1e-12);
    }

    #[test]
    fn adversary_small_k() {
        for p in OnlinePolicy::ALL {
            let out = adversary_lower_bound(p.build().as_mut(), 2, 0).unwrap();
            assert!(out.ratio.is_finite() && out.ratio >= 1.0, "{p}: {out:?}");
        }
    }

    #[test]
    fn policy_ids() {
        for p in OnlinePolicy::ALL {
            assert_eq!(p.id().parse::<OnlinePolicy>().unwrap(), p);
            assert_eq!(p.build().name(), p.id());
        }
        assert!(policy_replan("nfgs").is_err());
        assert!(policy_replan("log_nfgs").is_ok());
    }
}
