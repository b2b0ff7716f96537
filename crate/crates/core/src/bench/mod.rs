//! Benchmark harness: relative objective tables, timings and signed-rank tests.

mod config;
mod stats;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::evaluate_offline;
use crate::instances::{gen_synthetic, read_instance, SyntheticParams};
use crate::offline::{OfflineAlgorithm, SolverContext};
use crate::online::{simulate_with, OnlinePolicy, SimOptions};
use crate::tape::{RequestSet, Tape};

pub use config::{parse_config, read_config, BenchConfig, Workload};
pub use stats::wilcoxon_signed_rank;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    /// Offline solver on release-zeroed requests.
    Offline(OfflineAlgorithm),
    /// LTFS or LTFS+ with every request visible at 0, FIFO by original release.
    OfflineFifo { plus: bool },
    Online(OnlinePolicy),
}

impl AlgorithmId {
    pub fn id(self) -> &'static str {
        match self {
            AlgorithmId::Offline(a) => a.id(),
            AlgorithmId::OfflineFifo { plus: false } => "off-ltfs",
            AlgorithmId::OfflineFifo { plus: true } => "off-ltfs-plus",
            AlgorithmId::Online(p) => p.id(),
        }
    }

    pub fn all() -> Vec<AlgorithmId> {
        let mut v: Vec<AlgorithmId> = OfflineAlgorithm::ALL
            .into_iter()
            .map(AlgorithmId::Offline)
            .collect();
        v.push(AlgorithmId::OfflineFifo { plus: false });
        v.push(AlgorithmId::OfflineFifo { plus: true });
        v.extend(OnlinePolicy::ALL.into_iter().map(AlgorithmId::Online));
        v
    }

    /// Objective of this algorithm on one instance, and the seconds spent deciding.
    pub fn run(self, tape: &Tape, requests: &RequestSet, seed: u64) -> Result<(u64, f64)> {
        match self {
            AlgorithmId::Offline(a) => {
                let zeroed = requests.zero_releases();
                let ctx = SolverContext::new(tape, &zeroed);
                let t0 = Instant::now();
                let schedule = a.solve(&ctx);
                let secs = t0.elapsed().as_secs_f64();
                let v = evaluate_offline(tape, &zeroed, &schedule)?.total_response;
                Ok((v, secs))
            }
            AlgorithmId::OfflineFifo { plus } => {
                let zeroed = requests.zero_releases();
                let opts = SimOptions {
                    record_events: false,
                    priorities: Some(requests.requests().iter().map(|r| r.release).collect()),
                };
                let p = if plus {
                    OnlinePolicy::LtfsPlus
                } else {
                    OnlinePolicy::Ltfs
                };
                let t0 = Instant::now();
                let (res, _) = simulate_with(tape, &zeroed, p.build().as_mut(), seed, opts)?;
                Ok((res.total_response, t0.elapsed().as_secs_f64()))
            }
            AlgorithmId::Online(p) => {
                let t0 = Instant::now();
                let (res, _) =
                    simulate_with(tape, requests, p.build().as_mut(), seed, SimOptions::default())?;
                Ok((res.total_response, t0.elapsed().as_secs_f64()))
            }
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "log_nfgs" { "log-nfgs" } else { s };
        AlgorithmId::all()
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmResult {
    pub algorithm: AlgorithmId,
    /// `None` when the algorithm was skipped for this configuration.
    pub objectives: Option<Vec<Option<u64>>>,
    pub seconds: Vec<f64>,
    pub faults: Vec<String>,
    pub budget_overruns: usize,
}

impl AlgorithmResult {
    pub fn sum(&self) -> Option<u64> {
        self.objectives
            .as_ref()
            .map(|v| v.iter().flatten().sum())
    }

    pub fn mean_seconds(&self) -> Option<f64> {
        (!self.seconds.is_empty()).then(|| self.seconds.iter().sum::<f64>() / self.seconds.len() as f64)
    }

    pub fn max_seconds(&self) -> Option<f64> {
        self.seconds.iter().copied().reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigResult {
    pub label: String,
    pub instances: usize,
    pub results: Vec<AlgorithmResult>,
}

impl ConfigResult {
    pub fn result(&self, a: AlgorithmId) -> Option<&AlgorithmResult> {
        self.results.iter().find(|r| r.algorithm == a)
    }

    pub fn is_partial(&self) -> bool {
        self.results.iter().any(|r| !r.faults.is_empty())
    }

    /// scale · sum(a) / sum(baseline), over instances where both succeeded.
    pub fn relative(&self, a: AlgorithmId, baseline: AlgorithmId, scale: f64) -> Option<f64> {
        let xs = self.result(a)?.objectives.as_ref()?;
        let bs = self.result(baseline)?.objectives.as_ref()?;
        let (mut sa, mut sb) = (0u128, 0u128);
        for (x, b) in xs.iter().zip(bs) {
            if let (Some(x), Some(b)) = (x, b) {
                sa += *x as u128;
                sb += *b as u128;
            }
        }
        if a == baseline {
            return Some(scale);
        }
        (sb > 0).then(|| scale * sa as f64 / sb as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairStat {
    pub scope: String,
    pub a: AlgorithmId,
    pub b: AlgorithmId,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub scale: f64,
    pub baseline: AlgorithmId,
    pub algorithms: Vec<AlgorithmId>,
    pub configs: Vec<ConfigResult>,
    pub pairs: Vec<PairStat>,
    pub time_budget: Option<f64>,
}

/// Per-instance seed, stable across runs and independent of scheduling order.
pub fn instance_seed(base: u64, n_files: usize, k: u64, index: usize) -> u64 {
    let mut x = base ^ 0x9e37_79b9_7f4a_7c15;
    for v in [n_files as u64, k, index as u64] {
        x = splitmix(x ^ v);
    }
    x
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct InstanceOutcome {
    per_algo: Vec<Option<std::result::Result<(u64, f64), String>>>,
}

fn load_instance(w: &Workload, i: usize, base_seed: u64) -> Result<(Tape, RequestSet, u64)> {
    match w {
        Workload::Synthetic { n_files, k, .. } => {
            let seed = instance_seed(base_seed, *n_files, *k, i);
            let (t, r) = gen_synthetic(&SyntheticParams {
                n_files: *n_files,
                k: *k,
                seed,
            })?;
            Ok((t, r, seed))
        }
        Workload::Files { paths, .. } => {
            let (t, r) = read_instance(&paths[i])?;
            Ok((t, r, instance_seed(base_seed, 0, 0, i)))
        }
    }
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Precondition(format!("worker pool: {e}")))?;
    let mut configs = Vec::new();
    for w in &config.workloads {
        let enabled: Vec<bool> = config
            .algorithms
            .iter()
            .map(|a| config.limit(*a).is_none_or(|lim| w.n_files() <= lim))
            .collect();
        let outcomes: Vec<InstanceOutcome> = pool.install(|| {
            (0..w.instances())
                .into_par_iter()
                .map(|i| match load_instance(w, i, config.seed) {
                    Ok((tape, reqs, seed)) => InstanceOutcome {
                        per_algo: config
                            .algorithms
                            .iter()
                            .zip(&enabled)
                            .map(|(a, &on)| {
                                on.then(|| a.run(&tape, &reqs, seed).map_err(|e| e.to_string()))
                            })
                            .collect(),
                    },
                    Err(e) => InstanceOutcome {
                        per_algo: enabled
                            .iter()
                            .map(|&on| on.then(|| Err(format!("instance {i}: {e}"))))
                            .collect(),
                    },
                })
                .collect()
        });
        let results = config
            .algorithms
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let mut r = AlgorithmResult {
                    algorithm: a,
                    objectives: enabled[j].then(Vec::new),
                    seconds: Vec::new(),
                    faults: Vec::new(),
                    budget_overruns: 0,
                };
                for (i, o) in outcomes.iter().enumerate() {
                    match &o.per_algo[j] {
                        None => {}
                        Some(Ok((v, s))) => {
                            r.objectives.as_mut().unwrap().push(Some(*v));
                            r.seconds.push(*s);
                            if config.time_budget.is_some_and(|b| *s > b) {
                                r.budget_overruns += 1;
                            }
                        }
                        Some(Err(e)) => {
                            r.objectives.as_mut().unwrap().push(None);
                            r.faults.push(format!("instance {i}: {e}"));
                        }
                    }
                }
                r
            })
            .collect();
        configs.push(ConfigResult {
            label: w.label(),
            instances: w.instances(),
            results,
        });
    }
    let pairs = pair_stats(&config.algorithms, &configs);
    Ok(BenchReport {
        scale: config.scale,
        baseline: config.baseline,
        algorithms: config.algorithms.clone(),
        configs,
        pairs,
        time_budget: config.time_budget,
    })
}

fn pair_stats(algos: &[AlgorithmId], configs: &[ConfigResult]) -> Vec<PairStat> {
    let mut out = Vec::new();
    let mut scopes: Vec<(String, Vec<&ConfigResult>)> =
        configs.iter().map(|c| (c.label.clone(), vec![c])).collect();
    if configs.len() > 1 {
        scopes.push(("all".into(), configs.iter().collect()));
    }
    for (scope, cs) in scopes {
        for (i, &a) in algos.iter().enumerate() {
            for &b in &algos[i + 1..] {
                let mut pairs = Vec::new();
                for c in &cs {
                    let (Some(xa), Some(xb)) = (
                        c.result(a).and_then(|r| r.objectives.as_ref()),
                        c.result(b).and_then(|r| r.objectives.as_ref()),
                    ) else {
                        continue;
                    };
                    for (x, y) in xa.iter().zip(xb) {
                        if let (Some(x), Some(y)) = (x, y) {
                            pairs.push((*x as f64, *y as f64));
                        }
                    }
                }
                if pairs.is_empty() {
                    continue;
                }
                out.push(PairStat {
                    scope: scope.clone(),
                    a,
                    b,
                    wins_a: pairs.iter().filter(|(x, y)| x < y).count(),
                    wins_b: pairs.iter().filter(|(x, y)| x > y).count(),
                    ties: pairs.iter().filter(|(x, y)| x == y).count(),
                    p_value: wilcoxon_signed_rank(&pairs).ok(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

fn table(
    report: &BenchReport,
    format: TableFormat,
    cell: impl Fn(&ConfigResult, AlgorithmId) -> Option<f64>,
) -> String {
    let mut out = String::new();
    let names: Vec<&str> = report.algorithms.iter().map(|a| a.id()).collect();
    match format {
        TableFormat::Csv => {
            out.push_str("configuration,");
            out.push_str(&names.join(","));
            out.push('\n');
        }
        TableFormat::Markdown => {
            out.push_str(&format!("| Instance | {} |\n", names.join(" | ")));
            out.push_str(&format!("|---|{}\n", "---:|".repeat(names.len())));
        }
    }
    for c in &report.configs {
        let vals: Vec<Option<f64>> = report.algorithms.iter().map(|&a| cell(c, a)).collect();
        let best = vals
            .iter()
            .flatten()
            .map(|v| format!("{v:.2}"))
            .min_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
        let cells: Vec<String> = vals
            .iter()
            .map(|v| match v {
                None => "-".to_string(),
                Some(v) => {
                    let s = format!("{v:.2}");
                    match (format, Some(&s) == best.as_ref()) {
                        (TableFormat::Csv, true) => format!("{s}*"),
                        (TableFormat::Markdown, true) => format!("**{s}**"),
                        _ => s,
                    }
                }
            })
            .collect();
        let label = if c.is_partial() {
            format!("{} (partial)", c.label)
        } else {
            c.label.clone()
        };
        match format {
            TableFormat::Csv => out.push_str(&format!("{label},{}\n", cells.join(","))),
            TableFormat::Markdown => out.push_str(&format!("| {label} | {} |\n", cells.join(" | "))),
        }
    }
    out
}

/// One row per configuration, one column per algorithm; lowest value marked.
pub fn relative_table(report: &BenchReport, format: TableFormat) -> String {
    table(report, format, |c, a| c.relative(a, report.baseline, report.scale))
}

/// Mean decision time per instance, in seconds.
pub fn times_table(report: &BenchReport, format: TableFormat) -> String {
    let mut s = String::new();
    let names: Vec<&str> = report.algorithms.iter().map(|a| a.id()).collect();
    match format {
        TableFormat::Csv => s.push_str(&format!("configuration,{}\n", names.join(","))),
        TableFormat::Markdown => {
            s.push_str(&format!("| Instance | {} |\n", names.join(" | ")));
            s.push_str(&format!("|---|{}\n", "---:|".repeat(names.len())));
        }
    }
    for c in &report.configs {
        let cells: Vec<String> = report
            .algorithms
            .iter()
            .map(|&a| {
                let r = c.result(a);
                match r.and_then(|r| r.mean_seconds()) {
                    None => "-".into(),
                    Some(m) if r.is_some_and(|r| r.budget_overruns > 0) => format!("{m:.4}!"),
                    Some(m) => format!("{m:.4}"),
                }
            })
            .collect();
        match format {
            TableFormat::Csv => s.push_str(&format!("{},{}\n", c.label, cells.join(","))),
            TableFormat::Markdown => s.push_str(&format!("| {} | {} |\n", c.label, cells.join(" | "))),
        }
    }
    s
}

pub fn pairs_csv(report: &BenchReport) -> String {
    let mut s = String::from("scope,a,b,wins_a,wins_b,ties,p_value\n");
    for p in &report.pairs {
        let pv = p.p_value.map_or("-".to_string(), |v| format!("{v:.3e}"));
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.scope, p.a, p.b, p.wins_a, p.wins_b, p.ties, pv
        ));
    }
    s
}

pub fn faults_text(report: &BenchReport) -> String {
    let mut s = String::new();
    for c in &report.configs {
        for r in &c.results {
            for f in &r.faults {
                s.push_str(&format!("{}\t{}\t{}\n", c.label, r.algorithm, f));
            }
        }
    }
    s
}

/// Writes relative/times/pairs tables into `dir` and returns the paths.
pub fn write_report(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("relative.csv", relative_table(report, TableFormat::Csv)),
        ("relative.md", relative_table(report, TableFormat::Markdown)),
        ("times.csv", times_table(report, TableFormat::Csv)),
        ("pairs.csv", pairs_csv(report)),
        ("faults.txt", faults_text(report)),
    ];
    let mut out = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_report(sums: &[(AlgorithmId, u64)], partial: bool) -> BenchReport {
        let results = sums
            .iter()
            .map(|&(a, s)| AlgorithmResult {
                algorithm: a,
                objectives: Some(vec![Some(s)]),
                seconds: vec![0.0],
                faults: if partial && a == sums[0].0 {
                    vec!["boom".into()]
                } else {
                    vec![]
                },
                budget_overruns: 0,
            })
            .collect();
        BenchReport {
            scale: 100.0,
            baseline: sums[0].0,
            algorithms: sums.iter().map(|s| s.0).collect(),
            configs: vec![ConfigResult {
                label: "20-1".into(),
                instances: 1,
                results,
            }],
            pairs: vec![],
            time_budget: None,
        }
    }

    #[test]
    fn ids_round_trip() {
        for a in AlgorithmId::all() {
            assert_eq!(a.id().parse::<AlgorithmId>().unwrap(), a);
        }
        assert!(matches!(
            "bogus".parse::<AlgorithmId>(),
            Err(Error::UnknownAlgorithm(t)) if t == "bogus"
        ));
    }

    #[test]
    fn relative_cells() {
        let base = AlgorithmId::OfflineFifo { plus: true };
        let fgs = AlgorithmId::Offline(OfflineAlgorithm::Fgs);
        let r = fake_report(&[(base, 100), (fgs, 50)], false);
        let csv = relative_table(&r, TableFormat::Csv);
        assert_eq!(csv, "configuration,off-ltfs-plus,fgs\n20-1,100.00,50.00*\n");
        let md = relative_table(&r, TableFormat::Markdown);
        assert!(md.contains("| 20-1 | 100.00 | **50.00** |"), "{md}");
    }

    #[test]
    fn baseline_only_is_scale() {
        let base = AlgorithmId::Offline(OfflineAlgorithm::Sss);
        let r = fake_report(&[(base, 12345)], false);
        assert_eq!(
            relative_table(&r, TableFormat::Csv),
            "configuration,sss\n20-1,100.00*\n"
        );
    }

    #[test]
    fn partial_rows_are_flagged() {
        let base = AlgorithmId::Offline(OfflineAlgorithm::Sss);
        let gs = AlgorithmId::Offline(OfflineAlgorithm::Gs);
        let r = fake_report(&[(base, 10), (gs, 20)], true);
        assert!(relative_table(&r, TableFormat::Csv).contains("20-1 (partial),"));
    }

    #[test]
    fn seeds_are_spread() {
        let a = instance_seed(1, 20000, 1, 0);
        assert_eq!(a, instance_seed(1, 20000, 1, 0));
        assert_ne!(a, instance_seed(1, 20000, 1, 1));
        assert_ne!(a, instance_seed(1, 20000, 3, 0));
        assert_ne!(a, instance_seed(2, 20000, 1, 0));
    }
}
