use std::path::{Path, PathBuf};

use super::AlgorithmId;
use crate::error::{Error, Result};

/// One row of a benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Synthetic { n_files: usize, k: u64, instances: usize },
    /// Instance files; per-algorithm size limits do not apply.
    Files { label: String, paths: Vec<PathBuf> },
}

impl Workload {
    pub fn label(&self) -> String {
        match self {
            Workload::Synthetic { n_files, k, .. } => format!("{n_files}-{k}"),
            Workload::Files { label, .. } => label.clone(),
        }
    }

    pub fn instances(&self) -> usize {
        match self {
            Workload::Synthetic { instances, .. } => *instances,
            Workload::Files { paths, .. } => paths.len(),
        }
    }

    pub fn n_files(&self) -> usize {
        match self {
            Workload::Synthetic { n_files, .. } => *n_files,
            Workload::Files { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub workloads: Vec<Workload>,
    pub seed: u64,
    pub algorithms: Vec<AlgorithmId>,
    pub baseline: AlgorithmId,
    pub scale: f64,
    /// Seconds per solve; overruns are reported, never enforced.
    pub time_budget: Option<f64>,
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
    /// Skip an algorithm on synthetic configurations with more files than this.
    pub limits: Vec<(AlgorithmId, usize)>,
}

impl BenchConfig {
    pub fn new(workloads: Vec<Workload>, algorithms: Vec<AlgorithmId>, baseline: AlgorithmId) -> Self {
        BenchConfig {
            workloads,
            seed: 0,
            algorithms,
            baseline,
            scale: 100.0,
            time_budget: None,
            parallelism: 0,
            limits: Vec::new(),
        }
    }

    pub fn limit(&self, a: AlgorithmId) -> Option<usize> {
        self.limits.iter().find(|(b, _)| *b == a).map(|l| l.1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if !self.algorithms.contains(&self.baseline) {
            return bad(format!("baseline {} is not among the algorithms", self.baseline));
        }
        if !(self.scale > 0.0) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if self.workloads.is_empty() {
            return bad("no configurations".into());
        }
        if let Some(w) = self.workloads.iter().find(|w| w.instances() == 0) {
            return bad(format!("configuration {} has no instances", w.label()));
        }
        if self.limit(self.baseline).is_some() {
            return bad("the baseline cannot have a size limit".into());
        }
        Ok(())
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty())
}

/// Parses flat `key = value` lines; `#` starts a comment.
/// Relative `load` paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<BenchConfig> {
    let mut cfg = BenchConfig::new(Vec::new(), Vec::new(), AlgorithmId::OfflineFifo { plus: true });
    let mut specs: Vec<(usize, u64, Option<usize>)> = Vec::new();
    let mut instances = 10usize;
    let mut loads: Vec<PathBuf> = Vec::new();
    let mut baseline = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let num = |v: &str| v.parse::<u64>().map_err(|_| err(format!("`{v}` is not a non-negative integer")));
        match key {
            "configurations" => {
                for item in list(value) {
                    let parts: Vec<&str> = item.split('-').collect();
                    let (n, k, c) = match parts.as_slice() {
                        [n, k] => (num(n)?, num(k)?, None),
                        [n, k, c] => (num(n)?, num(k)?, Some(num(c)? as usize)),
                        _ => return Err(err(format!("configuration `{item}` is not N-K or N-K-COUNT"))),
                    };
                    specs.push((n as usize, k, c));
                }
            }
            "instances" => instances = num(value)? as usize,
            "seed" => cfg.seed = num(value)?,
            "algorithms" => {
                cfg.algorithms = list(value)
                    .map(|a| a.parse().map_err(|e: Error| err(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "baseline" => baseline = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
            "scale" => {
                cfg.scale = value
                    .parse()
                    .map_err(|_| err(format!("`{value}` is not a number")))?
            }
            "time_budget" => {
                cfg.time_budget = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("`{value}` is not a number")))?,
                )
            }
            "parallelism" => cfg.parallelism = num(value)? as usize,
            "load" => loads.extend(list(value).map(|p| base_dir.join(p))),
            _ => match key.strip_prefix("limit.") {
                Some(a) => {
                    let a: AlgorithmId = a.parse().map_err(|e: Error| err(e.to_string()))?;
                    cfg.limits.push((a, num(value)? as usize));
                }
                None => return Err(err(format!("unknown key `{key}`"))),
            },
        }
    }
    cfg.baseline = baseline.ok_or_else(|| Error::Parse {
        line: text.lines().count(),
        message: "missing `baseline`".into(),
    })?;
    cfg.workloads = specs
        .into_iter()
        .map(|(n_files, k, c)| Workload::Synthetic {
            n_files,
            k,
            instances: c.unwrap_or(instances),
        })
        .collect();
    if !loads.is_empty() {
        cfg.workloads.push(Workload::Files {
            label: "loaded".into(),
            paths: loads,
        });
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: impl AsRef<Path>) -> Result<BenchConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
