use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ltsp_core::instances::{self, SyntheticParams};
use ltsp_core::offline::{oracle_exact, uniform_case_solver, DEFAULT_ORACLE_FILES};
use ltsp_core::online::{self, OnlinePolicy, SimOptions};
use ltsp_core::{
    Error, MiniBatch, OfflineAlgorithm, Request, RequestSet, Schedule, SolverContext,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SimulationFault { .. } | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Tape", frozen)]
struct PyTape {
    inner: ltsp_core::Tape,
}

#[pymethods]
impl PyTape {
    #[new]
    fn new(sizes: Vec<u64>) -> PyResult<Self> {
        Ok(PyTape {
            inner: ltsp_core::build_tape(&sizes).map_err(to_py)?,
        })
    }

    #[getter]
    fn length(&self) -> u64 {
        self.inner.length_m()
    }

    #[getter]
    fn num_files(&self) -> usize {
        self.inner.num_files()
    }

    fn sizes(&self) -> Vec<u64> {
        self.inner.sizes()
    }

    /// (left, right) boundaries of file `f`.
    fn extent(&self, f: usize) -> PyResult<(u64, u64)> {
        if f >= self.inner.num_files() {
            return Err(PyValueError::new_err(format!("file {f} out of range")));
        }
        let e = self.inner.file(f);
        Ok((e.left, e.right))
    }

    fn __repr__(&self) -> String {
        format!("Tape(files={}, m={})", self.inner.num_files(), self.inner.length_m())
    }
}

fn request_set(tape: &PyTape, requests: Vec<(usize, u64)>) -> PyResult<RequestSet> {
    RequestSet::new(
        &tape.inner,
        requests
            .into_iter()
            .map(|(file, release)| Request { file, release })
            .collect(),
    )
    .map_err(to_py)
}

fn pairs(rs: &RequestSet) -> Vec<(usize, u64)> {
    rs.requests().iter().map(|r| (r.file, r.release)).collect()
}

fn batches(s: &Schedule) -> Vec<(usize, usize)> {
    s.batches().iter().map(|b| (b.left_file, b.right_file)).collect()
}

/// Synthetic instance as (tape, [(file, release)]).
#[pyfunction]
fn gen_synthetic(n_files: usize, k: u64, seed: u64) -> PyResult<(PyTape, Vec<(usize, u64)>)> {
    let (tape, rs) = instances::gen_synthetic(&SyntheticParams { n_files, k, seed }).map_err(to_py)?;
    Ok((PyTape { inner: tape }, pairs(&rs)))
}

#[pyfunction]
fn read_instance(path: &str) -> PyResult<(PyTape, Vec<(usize, u64)>)> {
    let (tape, rs) = instances::read_instance(path).map_err(to_py)?;
    Ok((PyTape { inner: tape }, pairs(&rs)))
}

#[pyfunction]
fn write_instance(path: &str, tape: &PyTape, requests: Vec<(usize, u64)>) -> PyResult<()> {
    let rs = request_set(tape, requests)?;
    instances::write_instance(path, &tape.inner, &rs).map_err(to_py)
}

/// Schedule of an offline solver on release-zeroed requests.
#[pyfunction]
fn solve(algo: &str, tape: &PyTape, requests: Vec<(usize, u64)>) -> PyResult<Vec<(usize, usize)>> {
    let rs = request_set(tape, requests)?.zero_releases();
    let ctx = SolverContext::new(&tape.inner, &rs);
    let s = match algo {
        "oracle" => oracle_exact(&ctx, DEFAULT_ORACLE_FILES).map_err(to_py)?.0,
        "uniform" => uniform_case_solver(&ctx).map_err(to_py)?,
        other => other.parse::<OfflineAlgorithm>().map_err(to_py)?.solve(&ctx),
    };
    Ok(batches(&s))
}

/// Total response time of a schedule; releases are honoured as given.
#[pyfunction]
#[pyo3(signature = (tape, requests, schedule, wait_for_release = false))]
fn evaluate(
    tape: &PyTape,
    requests: Vec<(usize, u64)>,
    schedule: Vec<(usize, usize)>,
    wait_for_release: bool,
) -> PyResult<u64> {
    let rs = request_set(tape, requests)?;
    let s = Schedule::new(
        schedule
            .into_iter()
            .map(|(l, r)| MiniBatch::new(l, r))
            .collect(),
    );
    let opts = ltsp_core::EvalOptions {
        head_start: None,
        wait_for_release,
    };
    ltsp_core::evaluate_offline_with(&tape.inner, &rs, &s, opts)
        .map(|r| r.total_response)
        .map_err(to_py)
}

/// Total response time of an online policy; returns (total, trace text).
#[pyfunction]
#[pyo3(signature = (policy, tape, requests, seed = 0, trace = false))]
fn simulate(
    policy: &str,
    tape: &PyTape,
    requests: Vec<(usize, u64)>,
    seed: u64,
    trace: bool,
) -> PyResult<(u64, Option<String>)> {
    let rs = request_set(tape, requests)?;
    let mut p = policy.parse::<OnlinePolicy>().map_err(to_py)?.build();
    let opts = SimOptions {
        record_events: trace,
        priorities: None,
    };
    let (res, tr) = online::simulate_with(&tape.inner, &rs, p.as_mut(), seed, opts).map_err(to_py)?;
    Ok((res.total_response, trace.then(|| tr.dump())))
}

/// (alg_cost, reference_cost, ratio) against the two-file adversary.
#[pyfunction]
#[pyo3(signature = (policy, k, seed = 0))]
fn adversary(policy: &str, k: u64, seed: u64) -> PyResult<(u64, u64, f64)> {
    let mut p = policy.parse::<OnlinePolicy>().map_err(to_py)?.build();
    let o = online::adversary_lower_bound(p.as_mut(), k, seed).map_err(to_py)?;
    Ok((o.alg_cost, o.reference_cost, o.ratio))
}

#[pyfunction]
fn wilcoxon_signed_rank(pairs: Vec<(f64, f64)>) -> PyResult<f64> {
    ltsp_core::bench::wilcoxon_signed_rank(&pairs).map_err(to_py)
}

#[pymodule]
fn ltsp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTape>()?;
    m.add_function(wrap_pyfunction!(gen_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(read_instance, m)?)?;
    m.add_function(wrap_pyfunction!(write_instance, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(adversary, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon_signed_rank, m)?)?;
    Ok(())
}
