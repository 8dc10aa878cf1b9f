//! `graphonlab`: batch front end for the library. Every subcommand prints one
//! JSON document on stdout, except `check`, which prints a table.
//!
//! Exit codes: 0 success, 1 invalid input (or a failed `check`), 2 when the
//! answer is undecided or an enumeration budget was exceeded.

mod check;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graphonlab::cutdist::{cut_distance, l1_distance, DistanceOptions, EXHAUSTIVE_PERMUTATIONS};
use graphonlab::cutnorm::{cut_norm_with, CutOptions, PartModel, Variant, EXHAUSTIVE_LIMIT};
use graphonlab::extremal::{gnp_half_check, hadamard_kernel, paley_graph, weak_topology_demo};
use graphonlab::homdensity::{dt_distance, hom_density, injective_density};
use graphonlab::io::{graph_to_value, parse_graph, parse_kernel_or_graph, parse_multigraph};
use graphonlab::sampling::{
    convergence_experiment, entropy_rate, exact_distribution, exact_entropy, sample_graph, DensityStatistic,
};
use graphonlab::spectral::{eigenvalues, opnorm22, schatten, spectral_checks};
use graphonlab::structure::{compose, equivalent, purify, r_metrics, twins, Equivalence, DEFAULT_TOL};
use graphonlab::{Error, StepGraphon, StepKernel};
use output::num;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "graphonlab", version, about = "Cut norms, cut distances and graph limit computations on step kernels")]
struct Cli {
    /// Worker threads (falls back to GRAPHONLAB_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Statistic {
    Injective,
    Hom,
}

#[derive(Subcommand)]
enum Command {
    /// Cut norm of a kernel with its maximizing selectors
    Cutnorm {
        /// 1-5, c (complex) or h (Hilbert)
        #[arg(long, default_value = "1")]
        variant: String,
        /// Vector dimension for the Hilbert variant
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Required when the computation is randomized
        #[arg(long)]
        seed: Option<u64>,
        /// Treat parts as atoms: sets are unions of whole parts
        #[arg(long)]
        atoms: bool,
        file: PathBuf,
    },
    /// Cut distance bracket between two kernels
    Cutdist {
        #[command(flatten)]
        dist: DistArgs,
        /// Cut norm variant applied to the coupled difference
        #[arg(long, default_value = "1")]
        variant: String,
    },
    /// L1 distance bracket between two kernels
    L1dist {
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Homomorphism density t(F, W)
    Homdensity {
        /// Probe graph (Graph JSON, optionally with "mult")
        #[arg(long)]
        probe: PathBuf,
        /// Injective density; the target must be a graph file
        #[arg(long)]
        injective: bool,
        file: PathBuf,
    },
    /// Density distance over all graphs up to a vertex count
    Dt {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        a: PathBuf,
        b: PathBuf,
    },
    /// Draw one W-random graph
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        file: PathBuf,
    },
    /// Exact law of the W-random graph on n vertices
    Distribution {
        #[arg(long)]
        n: usize,
        file: PathBuf,
    },
    /// Exact entropy of the W-random graph on n vertices (natural log)
    Entropy {
        #[arg(long)]
        n: usize,
        file: PathBuf,
    },
    /// Per-pair entropy rate of W-random graphs
    EntropyRate { file: PathBuf },
    /// Sampled densities against the limit value
    Converge {
        #[arg(long)]
        probe: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ns: Vec<usize>,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "injective")]
        statistic: Statistic,
        file: PathBuf,
    },
    /// Eigenvalues, Schatten norms and the spectral inequalities
    Spectra {
        #[arg(long, value_delimiter = ',', default_value = "2,4")]
        p: Vec<f64>,
        file: PathBuf,
    },
    /// Merge twin parts into a pure kernel
    Purify {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        file: PathBuf,
    },
    /// Decide whether two kernels are equivalent
    Equivalent {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        a: PathBuf,
        b: PathBuf,
    },
    /// Twin classes of parts
    Twins {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        file: PathBuf,
    },
    /// The kernel W o W
    Compose { file: PathBuf },
    /// Row metrics r_W and r_{W o W}
    Rmetrics { file: PathBuf },
    /// Extremal instances
    #[command(subcommand)]
    Examples(Example),
    /// Run the invariant suite on seeded random instances
    Check {
        #[arg(long)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct DistArgs {
    /// Grid size for the permutation search
    #[arg(long)]
    m: Option<usize>,
    /// Restarts of the local search on large grids
    #[arg(long, default_value_t = 8)]
    budget: usize,
    /// Required when the grid is too large for exhaustive search
    #[arg(long)]
    seed: Option<u64>,
    a: PathBuf,
    b: PathBuf,
}

#[derive(Subcommand)]
enum Example {
    /// Hadamard kernel of order 2^k
    Hadamard {
        #[arg(long)]
        k: u32,
    },
    /// Paley graph on Z_q
    Paley {
        #[arg(long)]
        q: u64,
    },
    /// Interleaved bipartite sequence against its weak limit
    Weakdemo {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        ns: Vec<usize>,
    },
    /// Discrepancy of one G(n, 1/2) draw
    Gnp {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExceeded { .. }) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_kernel(path: &Path) -> Result<StepKernel, Failure> {
    parse_kernel_or_graph(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_graphon(path: &Path) -> Result<StepGraphon, Failure> {
    StepGraphon::try_from_kernel(load_kernel(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn variant(s: &str) -> Result<Variant, Failure> {
    s.parse().map_err(Failure::from)
}

fn need_seed(seed: Option<u64>, why: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| invalid(format!("{why}; pass --seed")))
}

fn distance_options(d: &DistArgs, a: &StepKernel, b: &StepKernel, v: Variant) -> Result<DistanceOptions, Failure> {
    let m = d.m.unwrap_or_else(|| graphonlab::cutdist::default_grid(a, b));
    let seed = if m > EXHAUSTIVE_PERMUTATIONS {
        need_seed(d.seed, &format!("a grid of {m} cells uses randomized search"))?
    } else {
        d.seed.unwrap_or(0)
    };
    Ok(DistanceOptions { m: Some(m), budget: d.budget, seed, variant: v })
}

/// Vertex pairs in row-major order, matching the bits of a distribution key.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn dispatch(cmd: Command) -> Result<Value, Failure> {
    Ok(match cmd {
        Command::Cutnorm { variant: v, d, restarts, seed, atoms, file } => {
            let k = load_kernel(&file)?;
            let v = variant(&v)?;
            let randomized = matches!(v, Variant::Complex | Variant::Hilbert) || k.parts() > EXHAUSTIVE_LIMIT;
            let seed = if randomized {
                need_seed(seed, "this cut norm is computed by randomized search")?
            } else {
                seed.unwrap_or(0)
            };
            if v == Variant::Hilbert && !(1..=k.parts()).contains(&d) {
                return Err(invalid(format!("dimension {d} outside 1..={}", k.parts())));
            }
            let model = if atoms { PartModel::Atoms } else { PartModel::Atomless };
            let opts = CutOptions { restarts, seed, model, hilbert_dim: d, ..Default::default() };
            output::witness(&cut_norm_with(&k, v, &opts))
        }
        Command::Cutdist { dist, variant: v } => {
            let (a, b) = (load_kernel(&dist.a)?, load_kernel(&dist.b)?);
            let opts = distance_options(&dist, &a, &b, variant(&v)?)?;
            let br = cut_distance(&a, &b, &opts)?;
            output::bracket(&br, &br.coupling(&a, &b).to_rows())
        }
        Command::L1dist { dist } => {
            let (a, b) = (load_kernel(&dist.a)?, load_kernel(&dist.b)?);
            let opts = distance_options(&dist, &a, &b, Variant::One)?;
            let br = l1_distance(&a, &b, &opts)?;
            output::bracket(&br, &br.coupling(&a, &b).to_rows())
        }
        Command::Homdensity { probe, injective, file } => {
            let f = parse_multigraph(&read(&probe)?)?;
            let value = if injective {
                injective_density(&f, &parse_graph(&read(&file)?)?)?
            } else {
                hom_density(&f, &load_kernel(&file)?)?
            };
            json!({ "value": num(value) })
        }
        Command::Dt { max_vertices, a, b } => {
            json!({ "value": num(dt_distance(&load_kernel(&a)?, &load_kernel(&b)?, max_vertices)?) })
        }
        Command::Sample { n, seed, file } => {
            let s = sample_graph(&load_graphon(&file)?, n, seed);
            json!({ "graph": graph_to_value(&s.graph), "types": s.types, "seed": s.seed })
        }
        Command::Distribution { n, file } => {
            let dist = exact_distribution(&load_graphon(&file)?, n)?;
            let ps = pairs(n);
            let outcomes: Vec<Value> = dist
                .iter()
                .map(|(&key, &p)| {
                    let edges: Vec<[usize; 2]> =
                        ps.iter().enumerate().filter(|(b, _)| key >> b & 1 == 1).map(|(_, &(i, j))| [i, j]).collect();
                    json!({ "edges": edges, "probability": num(p) })
                })
                .collect();
            json!({ "n": n, "outcomes": outcomes })
        }
        Command::Entropy { n, file } => {
            let e = exact_entropy(&load_graphon(&file)?, n)?;
            let per = if n >= 2 { num(e / (n * (n - 1) / 2) as f64) } else { Value::Null };
            json!({ "value": num(e), "per_pair": per })
        }
        Command::EntropyRate { file } => json!({ "value": num(entropy_rate(&load_graphon(&file)?)) }),
        Command::Converge { probe, ns, reps, seed, statistic, file } => {
            let w = load_graphon(&file)?;
            let f = parse_multigraph(&read(&probe)?)?;
            let stat = match statistic {
                Statistic::Injective => DensityStatistic::Injective,
                Statistic::Hom => DensityStatistic::Homomorphism,
            };
            let rows = convergence_experiment(&w, &f, &ns, reps, seed, stat)?;
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "n": r.n, "reps": r.reps, "mean": num(r.mean), "stderr": num(r.stderr) }))
                .collect();
            json!({ "limit": num(hom_density(&f, &w)?), "rows": rows, "seed": seed })
        }
        Command::Spectra { p, file } => {
            let w = load_kernel(&file)?;
            let sp = p
                .iter()
                .map(|&q| Ok(json!({ "p": num(q), "value": num(schatten(&w, q)?) })))
                .collect::<Result<Vec<Value>, Error>>()?;
            let sandwich: Vec<f64> = p.iter().copied().filter(|&q| q >= 2.0).collect();
            // the inequalities need |W| <= 1
            let checks = if w.max_abs() <= 1.0 {
                output::checks(&spectral_checks(&w, &sandwich)?.checks)
            } else {
                Value::Null
            };
            json!({
                "eigenvalues": output::nums(&eigenvalues(&w)),
                "schatten": sp,
                "opnorm22": num(opnorm22(&w)),
                "checks": checks,
            })
        }
        Command::Purify { tol, file } => {
            let p = purify(&load_kernel(&file)?, tol)?;
            json!({ "pure": output::kernel(&p.pure), "classes": p.classes, "map": p.quotient_map.map() })
        }
        Command::Equivalent { tol, a, b } => {
            let e = equivalent(&load_kernel(&a)?, &load_kernel(&b)?, tol)?;
            let out = output::equivalence(&e);
            if let Equivalence::Undecided { .. } = e {
                println!("{out}");
                return Err(Failure { code: 2, message: "undecided: purified kernels are too large".into() });
            }
            out
        }
        Command::Twins { tol, file } => json!({ "classes": twins(&load_kernel(&file)?, tol) }),
        Command::Compose { file } => output::kernel(&compose(&load_kernel(&file)?)),
        Command::Rmetrics { file } => {
            let (r, rr) = r_metrics(&load_kernel(&file)?);
            json!({ "rW": output::matrix(&r), "rWW": output::matrix(&rr) })
        }
        Command::Examples(ex) => match ex {
            Example::Hadamard { k } => output::kernel(&hadamard_kernel(k)?),
            Example::Paley { q } => graph_to_value(&paley_graph(q)?),
            Example::Weakdemo { ns } => {
                let rows: Vec<Value> = weak_topology_demo::<f64>(&ns)?
                    .iter()
                    .map(|r| {
                        json!({
                            "n": r.n,
                            "t_K3": num(r.triangle_density),
                            "t_K2": num(r.edge_density),
                            "cutdist_upper": num(r.cut_distance_upper),
                            "limit_t_K3": num(r.limit_triangle_density),
                        })
                    })
                    .collect();
                json!({ "rows": rows })
            }
            Example::Gnp { n, seed } => {
                if n > EXHAUSTIVE_LIMIT {
                    return Err(invalid(format!("n = {n} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}")));
                }
                let c = gnp_half_check::<f64>(n, seed)?;
                json!({
                    "n": c.n,
                    "seed": c.seed,
                    "cn4": num(c.cn4),
                    "bound": num(c.bound),
                    "pass": c.pass,
                    "failure_probability": num(c.failure_probability),
                })
            }
        },
        Command::Check { .. } => unreachable!("handled before dispatch"),
    })
}

fn run_check(seed: u64) -> ExitCode {
    let rows = check::suite(seed);
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &rows {
        let status = if r.pass() { "PASS" } else { "FAIL" };
        println!("{status}  {:<width$}  {:>4} instances  {} failures", r.name, r.instances, r.failures.len());
        for f in r.failures.iter().take(3) {
            println!("      {f}");
        }
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    println!("{} of {} checks passed", rows.len() - failed, rows.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("GRAPHONLAB_THREADS") {
        Ok(s) if !s.trim().is_empty() => {
            s.trim().parse().map(Some).map_err(|_| invalid(format!("GRAPHONLAB_THREADS={s} is not a count")))
        }
        _ => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let pool = threads(cli.threads).and_then(|n| match n {
        Some(0) => Err(invalid("--threads must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| invalid(e.to_string())),
        None => Ok(()),
    });
    if let Err(f) = pool {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    if let Command::Check { seed } = cli.command {
        return run_check(seed);
    }
    match dispatch(cli.command) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
