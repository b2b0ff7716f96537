use super::sim::{Policy, SimOptions, Simulator};
use crate::error::Result;
use crate::instances::gen_online_adversary_base;
use crate::tape::{Request, RequestSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryOutcome {
    pub alg_cost: u64,
    pub reference_cost: u64,
    pub ratio: f64,
    /// Release time of the burst on the first file, if it was triggered.
    pub trigger: Option<u64>,
}

/// Cost of the better of two fixed plans once the burst time `t` is known:
/// read the big file first then come back, or park at the tape start and
/// wait for the burst.
pub fn reference_cost(k: u64, t: u64) -> u64 {
    let m = k * k + k;
    let serve_first = k * k + k * (2 * k * k + m).saturating_sub(t);
    let arrive = m.max(t);
    let wait_left = k * (arrive - t) + arrive + k;
    serve_first.min(wait_left)
}

/// Plays the two-file adversary against `policy`: one request on the big
/// file at 0, then k requests on the small file the moment the head first
/// reaches the end of the tape after serving it.
pub fn adversary_lower_bound(policy: &mut dyn Policy, k: u64, seed: u64) -> Result<AdversaryOutcome> {
    let tape = gen_online_adversary_base(k)?;
    let requests = RequestSet::new(&tape, vec![Request { file: 1, release: 0 }])?;
    let mut sim = Simulator::new(&tape, &requests, seed, SimOptions::default())?;
    let cutoff = 10 * k * k;
    let mut trigger = None;
    while trigger.is_none() {
        let Some(report) = sim.step(policy)? else {
            // finished without ever returning to the tape end
            break;
        };
        let served = sim.state().service_time(0);
        match (served, report.at_end_of_tape) {
            (Some(s), Some(t)) if t >= s => {
                for _ in 0..k {
                    sim.inject(0, t)?;
                }
                trigger = Some(t);
            }
            (None, _) if sim.state().clock() >= cutoff => {
                return Ok(AdversaryOutcome {
                    alg_cost: sim.state().clock(),
                    reference_cost: k * k,
                    ratio: sim.state().clock() as f64 / (k * k) as f64,
                    trigger: None,
                });
            }
            _ => {}
        }
    }
    sim.run(policy)?;
    let alg_cost = sim.total_response();
    let reference = match trigger {
        Some(t) => reference_cost(k, t),
        None => k * k,
    };
    Ok(AdversaryOutcome {
        alg_cost,
        reference_cost: reference,
        ratio: alg_cost as f64 / reference as f64,
        trigger,
    })
}
