//! Library side of the CLI subcommands. Each function returns plain data;
//! `main` handles argument parsing and file output.

use std::time::Instant;

use serde::Serialize;
use wirecut::channels::{corrupted_pauli_decomposition, pauli_decomposition, randomized_decomposition, verify_identity};
use wirecut::clifford::{verify_2design, DesignMode};
use wirecut::config::{IDENTITY_RESIDUAL_TOL, UNBIASED_TOL};
use wirecut::cutting::{estimate, exact_cut_expectation, sample_cut, CutMethod, CutPlan, Estimate, ShotConfig};
use wirecut::qaoa::{
    generate_clustered_graph, optimize_params, ClusteredGraphSpec, Evaluator, Graph, OptimizeResult,
    OptimizerConfig, QAOAParams,
};
use wirecut::rng::derive_seed;
use wirecut::sim::{exact_expectation, exact_expectation_with_cap, Circuit, DiagonalObservable};

use crate::error::{BenchError, Result};
use crate::instances::{self, Instance, EXACT_QUBIT_CAP};
use crate::table::{ResultRow, ResultTable};

/// Default shots grid of the convergence benchmark.
pub const DEFAULT_SHOTS_GRID: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

/// Independent repetitions per point of the convergence benchmark.
pub const DEFAULT_REPETITIONS: usize = 20;

pub fn require_seed(seed: Option<u64>, command: &str) -> Result<u64> {
    seed.ok_or_else(|| BenchError::Validation(format!("{command} is stochastic and needs --seed")))
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(BenchError::Validation("shots must be at least 1".into()));
    }
    Ok(())
}

fn timed_estimate(
    circuit: &Circuit,
    plan: &CutPlan,
    obs: &DiagonalObservable,
    cfg: ShotConfig,
) -> Result<(Estimate, f64)> {
    check_shots(cfg.shots)?;
    let t = Instant::now();
    let est = estimate(circuit, plan, obs, cfg)?;
    Ok((est, t.elapsed().as_secs_f64()))
}

pub fn gen_graph(spec: &ClusteredGraphSpec) -> Result<Graph> {
    Ok(generate_clustered_graph(spec)?)
}

/// Exact cost as a one-row table.
pub fn exact(graph: &Graph, params: &QAOAParams) -> Result<ResultTable> {
    if graph.num_vertices() > EXACT_QUBIT_CAP {
        return Err(BenchError::Validation(format!(
            "exact simulation is capped at {EXACT_QUBIT_CAP} qubits, graph has {}",
            graph.num_vertices()
        )));
    }
    let c = wirecut::qaoa::build_qaoa_circuit(graph, params, wirecut::qaoa::EdgeOrder::Natural)?;
    let obs = wirecut::qaoa::maxcut_cost_operator(graph)?;
    let t = Instant::now();
    let cost = exact_expectation_with_cap(&c, &obs, EXACT_QUBIT_CAP)?;
    let wall_time = t.elapsed().as_secs_f64();
    let mut table = ResultTable::new();
    table.push(ResultRow {
        experiment: "exact".into(),
        k_total: 0,
        p: params.depth(),
        method: "exact".into(),
        shots: 0,
        mean: cost,
        stderr: 0.0,
        variance: 0.0,
        exact: Some(cost),
        wall_time,
    });
    Ok(table)
}

pub fn cut_estimate(inst: &Instance, method: CutMethod, shots: u64, seed: u64, workers: usize) -> Result<ResultTable> {
    let c = inst.circuit()?;
    let plan = inst.plan(method)?;
    let (est, wall_time) = timed_estimate(&c, &plan, &inst.observable()?, ShotConfig::new(shots, seed).workers(workers))?;
    let mut table = ResultTable::new();
    table.push(ResultRow {
        experiment: inst.name.clone(),
        k_total: plan.total_wires(),
        p: inst.depth(),
        method: method.name().into(),
        shots,
        mean: est.mean,
        stderr: est.stderr,
        variance: est.variance(),
        exact: inst.exact()?,
        wall_time,
    });
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceMeta {
    pub experiment: String,
    pub seed: u64,
    pub repetitions: usize,
    pub stderr_definition: &'static str,
    pub variance_definition: &'static str,
}

/// Convergence benchmark: for each method and shot count, `repetitions`
/// independent estimates. `mean` is the average of the repetition means and
/// `stderr` their standard deviation (the spread of a single estimate), or
/// the estimator standard error when `repetitions == 1`.
pub fn bench_variance(
    inst: &Instance,
    methods: &[CutMethod],
    shots_grid: &[u64],
    repetitions: usize,
    seed: u64,
    workers: usize,
) -> Result<(ResultTable, VarianceMeta)> {
    if repetitions == 0 {
        return Err(BenchError::Validation("repetitions must be at least 1".into()));
    }
    let c = inst.circuit()?;
    let obs = inst.observable()?;
    let exact = inst.exact()?;
    let mut table = ResultTable::new();
    for (mi, &method) in methods.iter().enumerate() {
        let plan = inst.plan(method)?;
        for (gi, &shots) in shots_grid.iter().enumerate() {
            let mut means = Vec::with_capacity(repetitions);
            let mut variances = Vec::with_capacity(repetitions);
            let mut wall = 0.0;
            let mut single = None;
            for rep in 0..repetitions {
                let label = ((mi as u64) << 40) | ((gi as u64) << 20) | rep as u64;
                let cfg = ShotConfig::new(shots, derive_seed(seed, label)).workers(workers);
                let (est, t) = timed_estimate(&c, &plan, &obs, cfg)?;
                means.push(est.mean);
                variances.push(est.variance());
                wall += t;
                single = Some(est);
            }
            let r = repetitions as f64;
            let mean = means.iter().sum::<f64>() / r;
            let stderr = if repetitions > 1 {
                (means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
            } else {
                single.expect("one repetition").stderr
            };
            table.push(ResultRow {
                experiment: inst.name.clone(),
                k_total: plan.total_wires(),
                p: inst.depth(),
                method: method.name().into(),
                shots,
                mean,
                stderr,
                variance: variances.iter().sum::<f64>() / r,
                exact,
                wall_time: wall / r,
            });
        }
    }
    let meta = VarianceMeta {
        experiment: inst.name.clone(),
        seed,
        repetitions,
        stderr_definition: if repetitions > 1 {
            "sample standard deviation of the repetition means"
        } else {
            "standard error of the single estimate"
        },
        variance_definition: "per-shot sample variance averaged over repetitions",
    };
    Ok((table, meta))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutsizeMeta {
    pub seed: u64,
    pub instances: Vec<String>,
    /// Pooled fit of `log2 variance` against `k_total`, per method.
    pub slopes: Vec<(String, f64)>,
}

impl CutsizeMeta {
    pub fn slope(&self, method: CutMethod) -> Option<f64> {
        self.slopes.iter().find(|(m, _)| m == method.name()).map(|s| s.1)
    }
}

/// Cut-size benchmark over [`instances::cutsize_suite`]. Fails with a
/// numerical error if a sample variance exceeds the squared per-shot bound.
pub fn bench_cutsize(methods: &[CutMethod], shots: u64, seed: u64, workers: usize) -> Result<(ResultTable, CutsizeMeta)> {
    let suite = instances::cutsize_suite()?;
    let mut table = ResultTable::new();
    let mut points: Vec<Vec<(f64, f64)>> = vec![Vec::new(); methods.len()];
    for (ii, (_, inst)) in suite.iter().enumerate() {
        let c = inst.circuit()?;
        let obs = inst.observable()?;
        let exact = inst.exact()?;
        for (mi, &method) in methods.iter().enumerate() {
            let plan = inst.plan(method)?;
            let cfg = ShotConfig::new(shots, derive_seed(seed, ((ii as u64) << 8) | mi as u64)).workers(workers);
            let (est, wall_time) = timed_estimate(&c, &plan, &obs, cfg)?;
            let var = est.variance();
            let n = est.shots as f64;
            let cap = plan.per_shot_bound().powi(2) * n / (n - 1.0).max(1.0);
            if !var.is_finite() || var > cap {
                return Err(BenchError::Numerical(format!(
                    "{} {}: variance {var} exceeds bound² {cap}",
                    inst.name,
                    method.name()
                )));
            }
            points[mi].push((plan.total_wires() as f64, var.log2()));
            table.push(ResultRow {
                experiment: inst.name.clone(),
                k_total: plan.total_wires(),
                p: inst.depth(),
                method: method.name().into(),
                shots,
                mean: est.mean,
                stderr: est.stderr,
                variance: var,
                exact,
                wall_time,
            });
        }
    }
    let meta = CutsizeMeta {
        seed,
        instances: suite.iter().map(|(_, i)| i.name.clone()).collect(),
        slopes: methods
            .iter()
            .zip(&points)
            .map(|(m, p)| (m.name().to_string(), fit_slope(p)))
            .collect(),
    };
    Ok((table, meta))
}

pub fn qaoa_opt(graph: &Graph, p: usize, evaluator: &Evaluator, config: &OptimizerConfig) -> Result<OptimizeResult> {
    if p == 0 {
        return Err(BenchError::Validation("p must be at least 1".into()));
    }
    if let Evaluator::CutEstimated { shots, .. } = evaluator {
        check_shots(*shots)?;
    }
    Ok(optimize_params(graph, p, evaluator, config)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitReport {
    pub shots: u64,
    /// Exact cost `μ` of the intact circuit.
    pub mu: f64,
    /// Samples with `f(x) ≤ μ` (lower cost is better).
    pub hits: u64,
    pub hit_rate: f64,
    /// Total cut wires.
    pub k: usize,
    pub num_edges: usize,
    /// `1/(5^k M)`.
    pub bound: f64,
    /// `bound − 5·sqrt(bound(1 − bound)/shots)`.
    pub threshold: f64,
    pub pass: bool,
}

/// Bitstrings drawn from the cut circuit, or from the intact circuit when
/// `method` is `None`, and the hit-rate report against the exact mean.
pub fn sample(
    inst: &Instance,
    method: Option<CutMethod>,
    shots: u64,
    seed: u64,
    workers: usize,
) -> Result<(Vec<u64>, HitReport)> {
    check_shots(shots)?;
    let c = inst.circuit()?;
    let plan = match method {
        Some(m) => inst.plan(m)?,
        None => CutPlan::uncut(&c)?,
    };
    let obs = inst.observable()?;
    let mu = exact_expectation(&c, &obs)?;
    let xs = sample_cut(&c, &plan, ShotConfig::new(shots, seed).workers(workers))?;
    let hits = xs.iter().filter(|&&x| obs.evaluate(x) <= mu + UNBIASED_TOL).count() as u64;
    let k = plan.total_wires();
    let m = inst.graph.num_edges();
    let bound = 1.0 / (5f64.powi(k as i32) * m as f64);
    let threshold = bound - 5.0 * (bound * (1.0 - bound) / shots as f64).sqrt();
    let hit_rate = hits as f64 / shots as f64;
    Ok((
        xs,
        HitReport {
            shots,
            mu,
            hits,
            hit_rate,
            k,
            num_edges: m,
            bound,
            threshold,
            pass: hit_rate >= threshold,
        },
    ))
}

/// Bitstrings from an arbitrary circuit and plan, without a hit-rate report.
pub fn sample_circuit(circuit: &Circuit, plan: &CutPlan, shots: u64, seed: u64, workers: usize) -> Result<Vec<u64>> {
    check_shots(shots)?;
    Ok(sample_cut(circuit, plan, ShotConfig::new(shots, seed).workers(workers))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ScalingRow {
    pub workers: usize,
    pub shots: u64,
    pub mean: f64,
    pub stderr: f64,
    pub wall_time: Option<f64>,
    pub speedup: Option<f64>,
}

/// Strong scaling of the randomized estimator on the convergence instance.
/// Speedups are relative to the first entry of `workers`.
pub fn scaling(workers: &[usize], shots: u64, seed: u64) -> Result<Vec<ScalingRow>> {
    if workers.is_empty() || workers.contains(&0) {
        return Err(BenchError::Validation("workers list must be non-empty and positive".into()));
    }
    let inst = instances::convergence_instance()?;
    let c = inst.circuit()?;
    let plan = inst.plan(CutMethod::Randomized)?;
    let obs = inst.observable()?;
    let mut rows: Vec<ScalingRow> = Vec::new();
    for &w in workers {
        let (est, t) = timed_estimate(&c, &plan, &obs, ShotConfig::new(shots, seed).workers(w))?;
        let base = rows.first().and_then(|r| r.wall_time).unwrap_or(t);
        rows.push(ScalingRow {
            workers: w,
            shots,
            mean: est.mean,
            stderr: est.stderr,
            wall_time: Some(t),
            speedup: Some(base / t),
        });
    }
    if rows.iter().any(|r| r.mean.to_bits() != rows[0].mean.to_bits()) {
        return Err(BenchError::Numerical("estimates differ across worker counts".into()));
    }
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let within: Vec<&ScalingRow> = rows.iter().filter(|r| r.workers <= cores).collect();
    for pair in within.windows(2) {
        if pair[1].workers > pair[0].workers && pair[1].speedup < pair[0].speedup {
            log::warn!(
                "speedup fell from {:.2} at {} workers to {:.2} at {} workers",
                pair[0].speedup.unwrap_or(0.0),
                pair[0].workers,
                pair[1].speedup.unwrap_or(0.0),
                pair[1].workers
            );
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}: {:.3e} (tolerance {:.0e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                )
            })
            .collect()
    }
}

/// Seed of the sampled 2-design check in the self-test.
pub const SELFTEST_SEED: u64 = 2024;

/// Small circuits for the unbiasedness part of the self-test: the sample
/// instance and, per `(k, p)`, the first `r=2, n=2` graph whose partition
/// overlap is `k`.
fn selftest_instances() -> Result<Vec<Instance>> {
    let mut out = vec![instances::sample_instance()?];
    for (k, p) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let (seed, graph) = (0..100)
            .map(|s| Ok::<_, BenchError>((s, instances::clustered(2, 2, k, s)?)))
            .find(|r| matches!(r, Ok((_, g)) if instances::default_partition(g).is_ok_and(|pt| pt.kappa() == k)))
            .ok_or_else(|| BenchError::Validation(format!("no r=2, n=2 graph with overlap {k}")))??;
        let params = QAOAParams::new(vec![0.3, 0.8][..p].to_vec(), vec![0.7, 0.2][..p].to_vec())?;
        out.push(Instance::new(format!("selftest-r2n2k{k}-p{p}-s{seed}"), graph, params)?);
    }
    Ok(out)
}

/// Channel identities for `d ∈ {2, 4, 8}`, the Pauli identity (or its
/// corrupted variant), the Clifford 2-design checks and exact unbiasedness
/// of the randomized estimator on small instances.
pub fn selftest(negative_control: bool) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    for k in 1..=3 {
        let r = verify_identity(&randomized_decomposition(k)?)?;
        checks.push(Check::at_most(
            format!("randomized identity residual d={}", 1 << k),
            r,
            IDENTITY_RESIDUAL_TOL,
        ));
    }
    let (name, decomp) = if negative_control {
        ("pauli identity residual (corrupted table)", corrupted_pauli_decomposition())
    } else {
        ("pauli identity residual", pauli_decomposition())
    };
    checks.push(Check::at_most(name, verify_identity(&decomp)?, IDENTITY_RESIDUAL_TOL));
    checks.push(Check::at_most(
        "pauli one-norm minus 4",
        (decomp.one_norm - 4.0).abs(),
        0.0,
    ));
    checks.push(Check::at_most(
        "2-design deviation k=1 exhaustive",
        verify_2design(1, DesignMode::Exhaustive)?,
        IDENTITY_RESIDUAL_TOL,
    ));
    checks.push(Check::at_most(
        "2-design deviation k=2 sampled (1e5 draws)",
        verify_2design(
            2,
            DesignMode::Sampled {
                samples: 100_000,
                seed: SELFTEST_SEED,
            },
        )?,
        0.02,
    ));
    for inst in selftest_instances()? {
        let c = inst.circuit()?;
        let plan = inst.plan(CutMethod::Randomized)?;
        let obs = inst.observable()?;
        let cut = exact_cut_expectation(&c, &plan, &obs)?;
        let full = exact_expectation(&c, &obs)?;
        checks.push(Check::at_most(
            format!("unbiasedness {} ({} cut wires)", inst.name, plan.total_wires()),
            (cut - full).abs(),
            UNBIASED_TOL,
        ));
    }
    Ok(SelftestReport { checks })
}
