use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use wirecut::cutting::{CutMethod, CutPlan};
use wirecut::qaoa::{ClusteredGraphSpec, Evaluator, Graph, Init, OptimizerConfig, QAOAParams};
use wirecut::sim::Circuit;
use wirecut_bench::commands::{self, DEFAULT_REPETITIONS};
use wirecut_bench::instances::{self, default_partition, Instance};
use wirecut_bench::{BenchError, Format, ResultTable, Result};

#[derive(Parser, Debug)]
#[command(name = "wirecut", version, about = "Wire-cutting benchmarks for clustered QAOA circuits")]
struct Cli {
    /// Master seed; required by every stochastic command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for shot execution.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write zero wall times so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// Built-in instance: `convergence` (9 qubits, p=2) or `sample` (4 qubits, p=1).
    #[arg(long, conflicts_with = "graph")]
    instance: Option<String>,
    /// Graph JSON file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Parameters JSON file; a depth-one grid search is used when absent.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a clustered graph as JSON.
    GenGraph {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.7)]
        p_intra: f64,
        #[arg(long, default_value_t = 0.3)]
        p_sep: f64,
    },
    /// Exact QAOA cost (at most 13 qubits).
    Exact {
        #[command(flatten)]
        inst: InstanceArgs,
    },
    /// One cut-estimator run.
    CutEstimate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value = "randomized")]
        method: CutMethod,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
    },
    /// Estimate spread against shot count, both methods.
    BenchVariance {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, value_delimiter = ',', default_value = "randomized,pauli")]
        methods: Vec<CutMethod>,
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
        shots_grid: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        repetitions: usize,
    },
    /// Per-shot variance against cut size on the built-in suite.
    BenchCutsize {
        #[arg(long, value_delimiter = ',', default_value = "randomized,pauli")]
        methods: Vec<CutMethod>,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
    },
    /// Optimise QAOA parameters; writes the cost trace.
    QaoaOpt {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// `exact`, `randomized` or `pauli`.
        #[arg(long, default_value = "exact")]
        evaluator: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        learning_rate: f64,
        /// Shots per evaluation for the cut-estimated evaluators.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// Grid resolution of the initial depth-one search.
        #[arg(long, default_value_t = 12)]
        grid: usize,
        /// Where to write the optimised parameters (CSV format only).
        #[arg(long)]
        params_out: Option<PathBuf>,
    },
    /// Sample bitstrings from a cut circuit and report the hit rate.
    Sample {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Circuit JSON file, sampled without a hit-rate report.
        #[arg(long, conflicts_with_all = ["instance", "graph"], requires = "plan")]
        circuit: Option<PathBuf>,
        /// Cut plan JSON file for `--circuit`.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value = "randomized")]
        method: CutMethod,
        /// Sample the intact circuit instead.
        #[arg(long)]
        no_cut: bool,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Hit-rate report file; standard error when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Speedup of the shot pool across worker counts.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        workers_list: Vec<usize>,
        #[arg(long, default_value_t = 200_000)]
        shots: u64,
    },
    /// Channel identities, 2-design and unbiasedness checks.
    Selftest {
        /// Use the corrupted Pauli table; the identity check must fail.
        #[arg(long)]
        negative_control: bool,
    },
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| BenchError::io(path.display().to_string(), e))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| BenchError::io(p.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| BenchError::io("stdout", e)),
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Writes `meta` next to `out` as `<out>.meta.json`, or logs it.
fn emit_meta<T: Serialize>(out: Option<&Path>, meta: &T) -> Result<()> {
    match out {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".meta.json");
            emit(Some(Path::new(&name)), &json_bytes(meta)?)
        }
        None => {
            log::info!("{}", serde_json::to_string(meta)?);
            Ok(())
        }
    }
}

fn load_instance(args: &InstanceArgs) -> Result<Instance> {
    let params = args
        .params
        .as_deref()
        .map(|p| Ok::<_, BenchError>(QAOAParams::from_json(&read_file(p)?)?))
        .transpose()?;
    let mut inst = match (&args.instance, &args.graph) {
        (Some(name), None) => match name.as_str() {
            "convergence" => instances::convergence_instance()?,
            "sample" => instances::sample_instance()?,
            other => return Err(BenchError::Validation(format!("unknown instance {other:?}"))),
        },
        (None, Some(path)) => {
            let graph = Graph::from_json(&read_file(path)?)?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let params = match &params {
                Some(p) => p.clone(),
                None => instances::grid_params(&graph)?,
            };
            Instance::new(name, graph, params)?
        }
        _ => return Err(BenchError::Validation("give exactly one of --instance or --graph".into())),
    };
    if let Some(p) = params {
        inst.params = p;
    }
    Ok(inst)
}

fn write_table(cli: &Cli, mut table: ResultTable) -> Result<()> {
    if cli.no_timing {
        table.strip_timing();
    }
    emit(cli.out.as_deref(), table.to_string(cli.format)?.as_bytes())
}

fn bitstring_bytes(xs: &[u64], n: usize, format: Format) -> Result<Vec<u8>> {
    let strings: Vec<String> = xs.iter().map(|&x| format!("{x:0n$b}")).collect();
    match format {
        Format::Csv => {
            let mut s = String::from("bitstring\n");
            for b in &strings {
                s.push_str(b);
                s.push('\n');
            }
            Ok(s.into_bytes())
        }
        Format::Json => json_bytes(&strings),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::GenGraph {
            r,
            n,
            k,
            p_intra,
            p_sep,
        } => {
            let seed = commands::require_seed(cli.seed, "gen-graph")?;
            let spec = ClusteredGraphSpec {
                r: *r,
                n: *n,
                k: *k,
                p_intra: *p_intra,
                p_sep: *p_sep,
                seed,
            };
            let mut s = commands::gen_graph(&spec)?.to_json();
            s.push('\n');
            emit(out, s.as_bytes())
        }
        Command::Exact { inst } => {
            let inst = load_instance(inst)?;
            write_table(cli, commands::exact(&inst.graph, &inst.params)?)
        }
        Command::CutEstimate { inst, method, shots } => {
            let seed = commands::require_seed(cli.seed, "cut-estimate")?;
            let inst = load_instance(inst)?;
            write_table(cli, commands::cut_estimate(&inst, *method, *shots, seed, cli.workers)?)
        }
        Command::BenchVariance {
            inst,
            methods,
            shots_grid,
            repetitions,
        } => {
            let seed = commands::require_seed(cli.seed, "bench-variance")?;
            let inst = load_instance(inst)?;
            let (table, meta) = commands::bench_variance(&inst, methods, shots_grid, *repetitions, seed, cli.workers)?;
            write_table(cli, table)?;
            emit_meta(out, &meta)
        }
        Command::BenchCutsize { methods, shots } => {
            let seed = commands::require_seed(cli.seed, "bench-cutsize")?;
            let (table, meta) = commands::bench_cutsize(methods, *shots, seed, cli.workers)?;
            write_table(cli, table)?;
            emit_meta(out, &meta)
        }
        Command::QaoaOpt {
            inst,
            p,
            evaluator,
            steps,
            learning_rate,
            shots,
            grid,
            params_out,
        } => {
            let inst = load_instance(inst)?;
            let evaluator = match evaluator.as_str() {
                "exact" => Evaluator::Exact,
                m => Evaluator::CutEstimated {
                    partition: default_partition(&inst.graph)?,
                    method: m.parse().map_err(BenchError::Validation)?,
                    shots: *shots,
                    seed: commands::require_seed(cli.seed, "qaoa-opt with a cut-estimated evaluator")?,
                    workers: cli.workers,
                },
            };
            let config = OptimizerConfig {
                steps: *steps,
                learning_rate: *learning_rate,
                init: Init::Grid { points: *grid },
                ..OptimizerConfig::default()
            };
            let res = commands::qaoa_opt(&inst.graph, *p, &evaluator, &config)?;
            match cli.format {
                Format::Csv => {
                    let mut s = String::from("step,cost\n");
                    for (i, c) in res.trace.iter().enumerate() {
                        s.push_str(&format!("{i},{c}\n"));
                    }
                    emit(out, s.as_bytes())?;
                    let mut params = res.params.to_json();
                    params.push('\n');
                    match params_out {
                        Some(p) => emit(Some(p), params.as_bytes()),
                        None => {
                            eprintln!("{}", params.trim_end());
                            Ok(())
                        }
                    }
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        params: &'a QAOAParams,
                        cost: f64,
                        trace: &'a [f64],
                    }
                    emit(
                        out,
                        &json_bytes(&Out {
                            params: &res.params,
                            cost: res.cost,
                            trace: &res.trace,
                        })?,
                    )
                }
            }
        }
        Command::Sample {
            inst,
            circuit,
            plan,
            method,
            no_cut,
            shots,
            report,
        } => {
            let seed = commands::require_seed(cli.seed, "sample")?;
            if let Some(cpath) = circuit {
                let c = Circuit::from_json(&read_file(cpath)?)?;
                let ppath = plan.as_deref().expect("clap enforces --plan");
                let plan = CutPlan::from_json(&read_file(ppath)?, &c)?;
                let xs = commands::sample_circuit(&c, &plan, *shots, seed, cli.workers)?;
                return emit(out, &bitstring_bytes(&xs, c.num_qubits(), cli.format)?);
            }
            let inst = load_instance(inst)?;
            let method = if *no_cut { None } else { Some(*method) };
            let (xs, rep) = commands::sample(&inst, method, *shots, seed, cli.workers)?;
            emit(out, &bitstring_bytes(&xs, inst.graph.num_vertices(), cli.format)?)?;
            let rep_bytes = json_bytes(&rep)?;
            match report {
                Some(p) => emit(Some(p), &rep_bytes)?,
                None => std::io::stderr()
                    .write_all(&rep_bytes)
                    .map_err(|e| BenchError::io("stderr", e))?,
            }
            if !rep.pass {
                return Err(BenchError::Numerical(format!(
                    "hit rate {} below threshold {}",
                    rep.hit_rate, rep.threshold
                )));
            }
            Ok(())
        }
        Command::Scaling { workers_list, shots } => {
            let seed = commands::require_seed(cli.seed, "scaling")?;
            let mut rows = commands::scaling(workers_list, *shots, seed)?;
            if cli.no_timing {
                for r in &mut rows {
                    r.wall_time = None;
                    r.speedup = None;
                }
            }
            let bytes = match cli.format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.into_inner().map_err(|e| BenchError::io("csv output", e.into_error()))?
                }
                Format::Json => json_bytes(&rows)?,
            };
            emit(out, &bytes)
        }
        Command::Selftest { negative_control } => {
            let rep = commands::selftest(*negative_control)?;
            let bytes = match cli.format {
                Format::Csv => {
                    let mut s = rep.lines().join("\n");
                    s.push('\n');
                    s.into_bytes()
                }
                Format::Json => json_bytes(&rep)?,
            };
            emit(out, &bytes)?;
            if !rep.passed() {
                return Err(BenchError::Numerical("self-test failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
