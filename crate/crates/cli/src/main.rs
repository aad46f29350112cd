//! Command-line front end for mixed-order spectral clustering.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mosc::bench::{run_benchmark, write_report, BenchConfig};
use mosc::clustering::{spectral_order, ClusterOptions, ClusterRun, Method, Splitter};
use mosc::cuts::{CutContext, CutCriterion, SweepCurve};
use mosc::extract::extract_paired_communities;
use mosc::io::{cached_triangles, partition_from_labels, read_communities, read_graph, read_labels_file, write_labels};
use mosc::metrics::{evaluate, ocut, EvalReport, Structure};
use mosc::selection::{auto_lambda_density, oracle_lambda, select_by_cut, LambdaGrid, OracleMetric, Selection, Task};
use mosc::{enumerate_triangles, Graph, Partition, TriangleIndex};

#[derive(Parser)]
#[command(name = "mosc", version, about = "Mixed-order spectral clustering of networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct GraphArgs {
    /// Edge list: one whitespace-separated pair of integer ids per line.
    #[arg(long)]
    graph: PathBuf,
    /// Binary triangle cache; reused when it matches the edge list.
    #[arg(long)]
    triangle_cache: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, default_value = "gl")]
    method: Method,
    /// Mixing parameter in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Count triangles and report graph statistics.
    Triangles {
        graph: PathBuf,
        #[arg(long)]
        triangle_cache: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Cluster a graph.
    Cluster {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "gl")]
        method: Method,
        /// A value in [0, 1], `auto`, or `oracle` (needs --truth).
        #[arg(long, default_value = "0.5")]
        lambda: String,
        /// Cut criterion tag, `km` for 2-means, or `all`.
        #[arg(long, default_value = "all")]
        criterion: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Comma-separated lambda grid for `auto` and `oracle`.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Metric the oracle optimizes: n, e, t or nmi.
        #[arg(long, default_value = "n")]
        oracle_metric: OracleMetric,
        /// Write `node cluster` lines of the first run here.
        #[arg(long)]
        labels_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Sweep one criterion along the spectral ordering.
    Sweep {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "con2")]
        criterion: CutCriterion,
        /// Print the per-prefix curve as CSV instead of a summary.
        #[arg(long)]
        emit_curve: bool,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Score a clustering against a ground truth.
    Eval {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Smallest ground-truth error over all prefixes of the spectral ordering.
    Ocut {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value = "n")]
        metric: Structure,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Build two-community networks from a community list.
    ExtractPairs {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        communities: PathBuf,
        #[arg(long, default_value_t = 500)]
        top: usize,
        #[arg(long, default_value_t = 200)]
        max_size: usize,
        /// Write `pair_<i>.txt` and `pair_<i>.truth` files here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a benchmark suite described by a TOML file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

struct Loaded {
    graph: Graph,
    triangles: TriangleIndex,
    truth: Option<Partition>,
    self_loops: usize,
    duplicates: usize,
}

fn load(args: &GraphArgs, truth: Option<&Path>) -> anyhow::Result<Loaded> {
    load_path(&args.graph, args.triangle_cache.as_deref(), truth)
}

fn load_path(path: &Path, cache: Option<&Path>, truth: Option<&Path>) -> anyhow::Result<Loaded> {
    let loaded = read_graph(path).with_context(|| format!("reading {}", path.display()))?;
    let (mut graph, stats) = (loaded.graph.clone(), loaded.stats);
    let truth_labels = truth.map(read_labels_file).transpose()?;
    let extra = truth_labels.as_ref().is_some_and(|l| l.iter().any(|(id, _)| graph.internal_id(*id).is_none()));
    if let Some(labels) = &truth_labels {
        graph = graph.with_nodes(labels.iter().map(|(id, _)| *id));
    }
    let triangles = match cache {
        Some(c) if !extra => cached_triangles(&loaded, c)?.0,
        _ => enumerate_triangles(&graph),
    };
    let truth = truth_labels.map(|l| partition_from_labels(&graph, &l)).transpose()?;
    Ok(Loaded { graph, triangles, truth, self_loops: stats.self_loops, duplicates: stats.duplicates })
}

fn labels_json(graph: &Graph, p: &Partition) -> Value {
    Value::Array(p.labels().iter().enumerate().map(|(v, &l)| json!([graph.original_id(v), l])).collect())
}

fn run_json(graph: &Graph, run: &ClusterRun, eval: Option<&EvalReport>, selection: Option<&Selection>) -> Value {
    json!({
        "method": run.method,
        "lambda": run.lambda,
        "criterion": run.splitter,
        "criterion_value": run.criterion_value,
        "k": run.partition.k(),
        "sizes": run.partition.sizes(),
        "labels": labels_json(graph, &run.partition),
        "eval": eval,
        "selection": selection.map(|s| &s.report),
        "eigen": run.eigen,
        "kmeans_wcss": run.kmeans_wcss,
        "seed": run.seed,
        "notes": run.notes,
    })
}

fn print(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
fn cluster(
    g: &Loaded,
    method: Method,
    lambda: &str,
    criterion: &str,
    k: usize,
    seed: u64,
    grid: Option<Vec<f64>>,
    oracle_metric: OracleMetric,
) -> anyhow::Result<Vec<(ClusterRun, Option<Selection>)>> {
    let opts = ClusterOptions::seeded(seed);
    let grid = match grid {
        Some(v) => LambdaGrid::new(v)?,
        None => LambdaGrid::default(),
    };
    let splitters: Vec<Splitter> = if k > 2 {
        vec![Splitter::KMeans]
    } else if criterion.eq_ignore_ascii_case("all") {
        Splitter::all()
    } else {
        vec![criterion.parse()?]
    };
    let (graph, ti) = (&g.graph, &g.triangles);
    let task = |s: Splitter| if k > 2 { Task::Multiway(k) } else { Task::Bipartition(s) };
    let mut out = Vec::new();
    match lambda.to_ascii_lowercase().as_str() {
        "auto" => {
            for s in splitters {
                let sel = match s {
                    Splitter::Sweep(c) => {
                        let runs = grid.values().iter().map(|&l| (l, task(s).run(graph, ti, method, l, &opts))).collect();
                        select_by_cut(runs, c)?
                    }
                    Splitter::KMeans => auto_lambda_density(graph, ti, method, task(s), &grid, &opts)?,
                };
                out.push((sel.run.clone(), Some(sel)));
            }
        }
        "oracle" => {
            let Some(truth) = &g.truth else { bail!(mosc::Error::Config("--lambda oracle needs --truth".into())) };
            for s in splitters {
                let sel = oracle_lambda(graph, ti, method, task(s), truth, oracle_metric, &grid, &opts)?;
                out.push((sel.run.clone(), Some(sel)));
            }
        }
        value => {
            let x: f64 = value.parse().map_err(|_| mosc::Error::Domain(format!("invalid --lambda {lambda:?}")))?;
            if k > 2 {
                out.push((task(Splitter::KMeans).run(graph, ti, method, x, &opts)?, None));
            } else {
                let so = spectral_order(graph, ti, method, x, &opts)?;
                let runs = mosc::clustering::split_order(graph, ti, &so, &splitters, &opts)?;
                let single = runs.len() == 1;
                for r in runs {
                    match r {
                        Ok(run) => out.push((run, None)),
                        Err(e) if single => return Err(e.into()),
                        Err(e) => log::warn!("{e}"),
                    }
                }
            }
        }
    }
    Ok(out)
}

fn sweep_curve(g: &Loaded, solver: &SolverArgs, c: CutCriterion) -> anyhow::Result<SweepCurve> {
    let opts = ClusterOptions::seeded(solver.seed);
    let so = spectral_order(&g.graph, &g.triangles, solver.method, solver.lambda, &opts)?;
    let ctx = CutContext::new(&g.graph, &g.triangles, so.lambda)?;
    Ok(mosc::sweep_cut(&so.order, c, &ctx)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Triangles { graph, triangle_cache, out } => {
            let g = load_path(&graph, triangle_cache.as_deref(), None)?;
            let (n, m, t) = (g.graph.n(), g.graph.m(), g.triangles.len());
            match out {
                Format::Json => print(&serde_json::to_string_pretty(&json!({
                    "nodes": n,
                    "edges": m,
                    "triangles": t,
                    "triangles_per_node": t as f64 / n as f64,
                    "self_loops_dropped": g.self_loops,
                    "duplicate_edges_dropped": g.duplicates,
                }))?)?,
                Format::Csv => print(&format!("nodes,edges,triangles\n{n},{m},{t}"))?,
            }
        }
        Command::Cluster { graph, method, lambda, criterion, k, truth, seed, grid, oracle_metric, labels_out, out } => {
            let g = load(&graph, truth.as_deref())?;
            let runs = cluster(&g, method, &lambda, &criterion, k, seed, grid, oracle_metric)?;
            let evals = runs
                .iter()
                .map(|(r, _)| g.truth.as_ref().map(|t| evaluate(t, &r.partition, &g.graph, &g.triangles)).transpose())
                .collect::<Result<Vec<_>, _>>()?;
            if let (Some(path), Some((first, _))) = (&labels_out, runs.first()) {
                let mut buf = Vec::new();
                write_labels(&mut buf, &g.graph, &first.partition)?;
                fs::write(path, buf)?;
            }
            match out {
                Format::Json => {
                    let list: Vec<Value> = runs
                        .iter()
                        .zip(&evals)
                        .map(|((r, s), e)| run_json(&g.graph, r, e.as_ref(), s.as_ref()))
                        .collect();
                    print(&serde_json::to_string_pretty(&json!({ "nodes": g.graph.n(), "runs": list }))?)?;
                }
                Format::Csv => {
                    let mut text = String::from("method,lambda,criterion,criterion_value,k,eps_n,eps_e,eps_t,nmi\n");
                    for ((r, _), e) in runs.iter().zip(&evals) {
                        text.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{}\n",
                            r.method,
                            r.lambda,
                            r.splitter,
                            opt(r.criterion_value),
                            r.partition.k(),
                            opt(e.as_ref().map(|e| e.eps_n)),
                            opt(e.as_ref().map(|e| e.eps_e)),
                            opt(e.as_ref().map(|e| e.eps_t)),
                            opt(e.as_ref().map(|e| e.nmi)),
                        ));
                    }
                    print(&text)?;
                }
            }
        }
        Command::Sweep { graph, solver, criterion, emit_curve, out } => {
            let g = load(&graph, None)?;
            let curve = sweep_curve(&g, &solver, criterion)?;
            if emit_curve || out == Format::Csv {
                print(&curve.to_csv())?;
            } else {
                let set: Vec<u64> = curve.order[..curve.best_u].iter().map(|&v| g.graph.original_id(v)).collect();
                print(&serde_json::to_string_pretty(&json!({
                    "criterion": curve.criterion,
                    "best_u": curve.best_u,
                    "best_value": curve.best_value,
                    "set": set,
                    "order": curve.order.iter().map(|&v| g.graph.original_id(v)).collect::<Vec<_>>(),
                    "values": curve.values,
                }))?)?;
            }
        }
        Command::Eval { graph, truth, labels, out } => {
            let mut g = load(&graph, Some(&truth))?;
            let cand_labels = read_labels_file(&labels)?;
            let before = g.graph.n();
            g.graph = g.graph.with_nodes(cand_labels.iter().map(|(id, _)| *id));
            if g.graph.n() != before {
                bail!(mosc::Error::Domain("labels file names nodes missing from the graph and truth".into()));
            }
            let cand = partition_from_labels(&g.graph, &cand_labels)?;
            let report = evaluate(g.truth.as_ref().expect("truth loaded"), &cand, &g.graph, &g.triangles)?;
            match out {
                Format::Json => print(&serde_json::to_string_pretty(&report)?)?,
                Format::Csv => print(&report.to_csv())?,
            }
        }
        Command::Ocut { graph, solver, truth, metric, out } => {
            let g = load(&graph, Some(&truth))?;
            let opts = ClusterOptions::seeded(solver.seed);
            let so = spectral_order(&g.graph, &g.triangles, solver.method, solver.lambda, &opts)?;
            let report = ocut(&so.order, g.truth.as_ref().expect("truth loaded"), metric, &g.graph, &g.triangles)?;
            match out {
                Format::Json => print(&serde_json::to_string_pretty(&report)?)?,
                Format::Csv => print(&report.to_csv())?,
            }
        }
        Command::ExtractPairs { graph, communities, top, max_size, out_dir } => {
            let g = read_graph(&graph.graph)?.graph;
            let comms = read_communities(std::io::BufReader::new(fs::File::open(&communities)?))?;
            let ex = extract_paired_communities(&g, &comms, top, max_size)?;
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir)?;
                for (i, p) in ex.pairs.iter().enumerate() {
                    let mut edges = String::new();
                    for (u, v) in p.graph.edges() {
                        edges.push_str(&format!("{} {}\n", p.graph.original_id(u), p.graph.original_id(v)));
                    }
                    fs::write(dir.join(format!("pair_{i}.txt")), edges)?;
                    let mut truth = Vec::new();
                    write_labels(&mut truth, &p.graph, &p.truth)?;
                    fs::write(dir.join(format!("pair_{i}.truth")), truth)?;
                }
            }
            let sizes: Vec<usize> = ex.pairs.iter().map(|p| p.graph.n()).collect();
            print(&serde_json::to_string_pretty(&json!({
                "pairs": ex.pairs.len(),
                "min_nodes": sizes.iter().min(),
                "max_nodes": sizes.iter().max(),
                "provenance": ex.pairs.iter().map(|p| &p.provenance).collect::<Vec<_>>(),
                "skipped": ex.skipped,
            }))?)?;
        }
        Command::Bench { config, out_dir } => {
            let mut cfg = BenchConfig::from_path(&config)?;
            if let Some(dir) = out_dir {
                cfg.out_dir = dir;
            }
            let report = run_benchmark(&cfg)?;
            write_report(&report, &cfg.out_dir)?;
            print(&serde_json::to_string_pretty(&json!({
                "out_dir": cfg.out_dir,
                "grid_rows": report.grid.len(),
                "failures": report.failures.len(),
                "best": report.best,
            }))?)?;
        }
    }
    Ok(())
}

fn error_record(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_record("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = e.chain().find_map(|c| c.downcast_ref::<mosc::Error>()).map_or_else(
                || if e.chain().any(|c| c.is::<std::io::Error>()) { "io" } else { "other" },
                |m| m.kind(),
            );
            let message = e.chain().map(|c| c.to_string()).collect::<Vec<_>>().join(": ");
            eprintln!("{}", error_record(kind, &message));
            ExitCode::FAILURE
        }
    }
}
