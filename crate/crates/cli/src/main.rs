mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use gpkn_core::bollobas::{
    classic_lhs, decimal_string, fraction_string, lemma5_lhs, permutation_oracle, RawSystem,
};
use gpkn_core::combinatorics::parse_family_file;
use gpkn_core::families::{
    is_maximal, max_le1_almost_intersecting_bruteforce, random_maximal_system, star, system_stats,
    theorem4_bound, validate_system,
};
use gpkn_core::geodesy::{check_gp_direct, gp_solve_exact};
use gpkn_core::kneser::{self, single_source_distances};
use gpkn_core::theorems::{run_claim, verify_all, write_reports, Claim, ClaimArgs, Status};
use gpkn_core::{
    DistanceMatrix, KSet, KneserParams, Rational, SetPairSystem, SimpleGraph, VerificationReport,
};

use config::{CliConfig, Overrides};

/// General-position sets in Kneser graphs: distances, exact solvers and
/// verification runs.
#[derive(Parser, Debug)]
#[command(name = "gpkn", version)]
struct Cli {
    /// Directory for cached Kneser distance matrices.
    #[arg(long, env = "GPKN_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    /// Directory receiving verification reports and summary.csv.
    #[arg(long, env = "GPKN_REPORT_DIR", global = true)]
    report_dir: Option<PathBuf>,
    /// `key = value` settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest C(n,k) for all-pairs BFS.
    #[arg(long, global = true)]
    bfs_cap: Option<u64>,
    /// Largest C(n,k) for star checks during verification.
    #[arg(long, global = true)]
    star_cap: Option<u64>,
    /// Largest graph order for the exact solver.
    #[arg(long, global = true)]
    solver_cap: Option<usize>,
    /// Largest C(n,k) for the counterexample path BFS.
    #[arg(long, global = true)]
    counterexample_cap: Option<u64>,
    /// Solver time limit in seconds; the result is then only a lower bound.
    #[arg(long, global = true)]
    time_limit: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two vertices.
    Dist {
        #[command(flatten)]
        source: Source,
        /// Comma list (Kneser) or 0-based index (graph file).
        u: String,
        v: String,
    },
    /// General-position check or exact gp.
    Gp {
        #[command(subcommand)]
        action: GpAction,
    },
    /// Run verification claims and write reports.
    Verify(VerifyArgs),
    /// Set-pair inequalities on a JSON system.
    Bollobas {
        #[command(subcommand)]
        action: BollobasAction,
    },
    /// Family systems and intersecting families.
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Kneser graph Kn(N,K).
    #[arg(long, num_args = 2, value_names = ["N", "K"])]
    kneser: Option<Vec<u32>>,
    /// Edge-list file: `order=<int>` then `u v` lines.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GpAction {
    /// Check a vertex set for general position.
    Check {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        set: SetSpec,
    },
    /// Compute gp(G) and a canonical optimal set.
    Solve {
        #[command(flatten)]
        source: Source,
        /// Known lower bound to seed the search.
        #[arg(long)]
        hint: Option<usize>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SetSpec {
    /// Star centred at this element (Kneser only).
    #[arg(long)]
    star: Option<u32>,
    /// Family file; all of its sets form the vertex set (Kneser only).
    #[arg(long)]
    family: Option<PathBuf>,
    /// `1,2;3,4` for Kneser sets, `0,3,5` for graph vertices.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Claim id, or `all`.
    claim: String,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    /// Largest k swept by `verify all`.
    #[arg(long, default_value_t = 5)]
    max_k: u32,
}

#[derive(Subcommand, Debug)]
enum BollobasAction {
    /// Left-hand side and validity.
    Check {
        file: PathBuf,
        /// Use the generalised (pairs and triples) form for a pairs-only file.
        #[arg(long)]
        generalised: bool,
    },
    /// Permutation double-counting oracle.
    Oracle { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum FamiliesAction {
    /// Largest (<=1)-almost intersecting family in C([n],k).
    BruteForce {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Check a family file against the three system conditions.
    Validate { file: PathBuf },
    /// Random maximal system.
    Random {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Also write the system in family-file format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    Refuted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.chain().any(|c| {
                c.downcast_ref::<gpkn_core::Error>()
                    .is_some_and(|e| e.is_resource())
            });
            ExitCode::from(if resource { 3 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let flags = Overrides {
        cache_dir: cli.cache_dir,
        report_dir: cli.report_dir,
        threads: cli.threads,
        seed: cli.seed,
        bfs_cap: cli.bfs_cap,
        star_cap: cli.star_cap,
        solver_cap: cli.solver_cap,
        counterexample_cap: cli.counterexample_cap,
        time_limit: cli.time_limit,
    };
    let cfg = CliConfig::resolve(flags, cli.config.as_deref())?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    match cli.command {
        Command::Dist { source, u, v } => cmd_dist(&cfg, &source, &u, &v),
        Command::Gp { action } => cmd_gp(&cfg, action),
        Command::Verify(args) => cmd_verify(&cfg, args),
        Command::Bollobas { action } => cmd_bollobas(action),
        Command::Families { action } => cmd_families(&cfg, action),
    }
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

enum Graph {
    Kneser(KneserParams),
    File(SimpleGraph),
}

impl Graph {
    fn load(source: &Source) -> Result<Self> {
        if let Some(nk) = &source.kneser {
            return Ok(Graph::Kneser(KneserParams::new(nk[0], nk[1])?));
        }
        let path = source.graph.as_ref().expect("clap enforces one source");
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Graph::File(SimpleGraph::parse_edge_list(&text)?))
    }

    fn distances(&self, cfg: &CliConfig) -> Result<DistanceMatrix> {
        Ok(match self {
            Graph::Kneser(p) => match &cfg.cache_dir {
                Some(dir) => kneser::load_or_compute(dir, *p, cfg.caps.bfs)?,
                None => kneser::all_pairs_distances_capped(*p, cfg.caps.bfs)?,
            },
            Graph::File(g) => g.distances()?,
        })
    }

    fn vertex(&self, text: &str) -> Result<usize> {
        match self {
            Graph::Kneser(p) => {
                let s = KSet::parse_list(text, p.n())?;
                if s.k() != p.k() {
                    bail!("{s} is not a {}-set", p.k());
                }
                Ok(p.rank(s)? as usize)
            }
            Graph::File(g) => {
                let v: usize = text
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("bad vertex '{text}'"))?;
                if v >= g.order() {
                    bail!("vertex {v} outside 0..{}", g.order());
                }
                Ok(v)
            }
        }
    }

    fn label(&self, v: usize) -> Result<Value> {
        Ok(match self {
            Graph::Kneser(p) => serde_json::to_value(p.vertex(v as u64)?)?,
            Graph::File(_) => json!(v),
        })
    }
}

fn cmd_dist(cfg: &CliConfig, source: &Source, u: &str, v: &str) -> Result<Outcome> {
    let g = Graph::load(source)?;
    let (a, b) = (g.vertex(u)?, g.vertex(v)?);
    let d = match &g {
        Graph::Kneser(p) => single_source_distances(*p, p.vertex(a as u64)?, cfg.caps.bfs)?[b],
        Graph::File(graph) => graph.distances()?.get(a, b),
    };
    eprintln!("d({}, {}) = {d}", g.label(a)?, g.label(b)?);
    emit(&d)?;
    Ok(Outcome::Ok)
}

fn vertex_set(g: &Graph, spec: &SetSpec) -> Result<Vec<usize>> {
    if let Some(x) = spec.star {
        let Graph::Kneser(p) = g else {
            bail!("--star needs --kneser")
        };
        return star(p.n(), p.k(), x)?
            .iter()
            .map(|&s| Ok(p.rank(s)? as usize))
            .collect();
    }
    if let Some(path) = &spec.family {
        let Graph::Kneser(p) = g else {
            bail!("--family needs --kneser")
        };
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let sys = parse_family_file(&text)?;
        if (sys.n(), sys.k()) != (p.n(), p.k()) {
            bail!(
                "family file is over ({}, {}), graph is Kn({}, {})",
                sys.n(),
                sys.k(),
                p.n(),
                p.k()
            );
        }
        return sys.all_sets().map(|s| Ok(p.rank(s)? as usize)).collect();
    }
    let text = spec.set.as_deref().expect("clap enforces one set spec");
    match g {
        Graph::Kneser(_) => text.split(';').map(|s| g.vertex(s)).collect(),
        Graph::File(_) => text.split(',').map(|s| g.vertex(s)).collect(),
    }
}

fn cmd_gp(cfg: &CliConfig, action: GpAction) -> Result<Outcome> {
    match action {
        GpAction::Check { source, set } => {
            let g = Graph::load(&source)?;
            let members = vertex_set(&g, &set)?;
            let dm = g.distances(cfg)?;
            let verdict = check_gp_direct(&dm, &members)?;
            match verdict.witness() {
                None => {
                    eprintln!("{} vertices in general position", members.len());
                    emit(&json!({"status": "pass", "size": members.len()}))?;
                }
                Some(w) => {
                    let (x, z, y) = (g.label(w.x)?, g.label(w.z)?, g.label(w.y)?);
                    eprintln!("blocked: {z} lies on a geodesic from {x} to {y}");
                    emit(&json!({
                        "status": "blocked",
                        "size": members.len(),
                        "witness": {"x": x, "z": z, "y": y},
                        "distances": {"xz": dm.get(w.x, w.z), "zy": dm.get(w.z, w.y), "xy": dm.get(w.x, w.y)},
                    }))?;
                }
            }
            Ok(Outcome::Ok)
        }
        GpAction::Solve { source, hint } => {
            let g = Graph::load(&source)?;
            let order = match &g {
                Graph::Kneser(p) => p.order() as usize,
                Graph::File(graph) => graph.order(),
            };
            if order > cfg.solver_cap {
                return Err(gpkn_core::Error::Resource(format!(
                    "exact solver limited to order {}, got {order}",
                    cfg.solver_cap
                ))
                .into());
            }
            let dm = g.distances(cfg)?;
            let sol = gp_solve_exact(&dm, hint, &cfg.solve_limits())?;
            let set = sol
                .set
                .iter()
                .map(|&v| g.label(v))
                .collect::<Result<Vec<_>>>()?;
            eprintln!(
                "gp = {}{}",
                sol.size,
                if sol.optimal {
                    ""
                } else {
                    " (lower bound, time limit hit)"
                }
            );
            emit(&json!({"gp": sol.size, "optimal": sol.optimal, "set": set}))?;
            Ok(Outcome::Ok)
        }
    }
}

fn cmd_verify(cfg: &CliConfig, args: VerifyArgs) -> Result<Outcome> {
    let ctx = cfg.verify_context();
    let reports = if args.claim == "all" {
        verify_all(args.max_k, args.trials.unwrap_or(100), cfg.seed, &ctx)?
    } else {
        let claim: Claim = args.claim.parse()?;
        let claim_args = ClaimArgs {
            n: args.n,
            k: args.k,
            m: args.m,
            trials: args.trials,
            seed: cfg.seed,
        };
        run_claim(claim, &claim_args, &ctx)?
    };
    write_reports(&cfg.report_dir, &reports)?;
    print_table(&reports);
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let summary = json!({
        "report_dir": cfg.report_dir,
        "verified": count(Status::Verified),
        "refuted": count(Status::Refuted),
        "skipped": count(Status::Skipped),
        "reports": reports.iter().map(|r| {
            let mut row = json!({"claim": r.claim, "params": r.params, "status": r.status});
            if let Some(reason) = &r.reason {
                row["reason"] = json!(reason);
            }
            row
        }).collect::<Vec<_>>(),
    });
    emit(&summary)?;
    Ok(if count(Status::Refuted) > 0 {
        Outcome::Refuted
    } else {
        Outcome::Ok
    })
}

fn print_table(reports: &[VerificationReport]) {
    let width = reports.iter().map(|r| r.claim.len()).max().unwrap_or(5);
    for r in reports {
        let note = r
            .reason
            .as_deref()
            .map(|s| format!("  ({s})"))
            .unwrap_or_default();
        eprintln!(
            "{:<width$}  {:<24}  {:<8}  {:>6} ms{note}",
            r.claim,
            r.params_label(),
            r.status.to_string(),
            r.runtime_ms
        );
    }
}

fn display(r: &Rational) -> String {
    format!("{} (≈ {})", fraction_string(r), decimal_string(r, 6))
}

fn read_system(path: &Path) -> Result<RawSystem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(RawSystem::from_json(&text)?)
}

fn cmd_bollobas(action: BollobasAction) -> Result<Outcome> {
    let one = Rational::from_integer(1.into());
    match action {
        BollobasAction::Check { file, generalised } => {
            let raw = read_system(&file)?;
            let (form, lhs) = if raw.triples.is_empty() && !generalised {
                ("classic", classic_lhs(&raw.pairs)?)
            } else {
                ("generalised", lemma5_lhs(&SetPairSystem::from_raw(raw)?))
            };
            let text = display(&lhs);
            let verdict = if lhs == one {
                "tight"
            } else if lhs < one {
                "at most 1"
            } else {
                "exceeds 1"
            };
            eprintln!("{form}: {text}, {verdict}");
            emit(&json!({
                "form": form,
                "lhs": fraction_string(&lhs),
                "decimal": decimal_string(&lhs, 6),
                "display": text,
                "at_most_one": lhs <= one,
                "tight": lhs == one,
            }))?;
            Ok(Outcome::Ok)
        }
        BollobasAction::Oracle { file } => {
            let sys = SetPairSystem::from_raw(read_system(&file)?)?;
            let report = permutation_oracle(&sys)?;
            eprintln!(
                "{} permutations; counts {}; at most one j: {}; lhs {}",
                report.permutations,
                if report.counts_match {
                    "match"
                } else {
                    "differ"
                },
                report.at_most_one,
                display(&report.lhs)
            );
            let mut out = serde_json::to_value(&report)?;
            out["display"] = json!(display(&report.lhs));
            emit(&out)?;
            Ok(Outcome::Ok)
        }
    }
}

fn cmd_families(cfg: &CliConfig, action: FamiliesAction) -> Result<Outcome> {
    match action {
        FamiliesAction::BruteForce { n, k } => {
            let best = max_le1_almost_intersecting_bruteforce(n, k)?;
            eprintln!(
                "max (<=1)-almost intersecting family in C([{n}],{k}): {}",
                best.max_size
            );
            emit(&best)?;
        }
        FamiliesAction::Validate { file } => {
            let text =
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let sys = parse_family_file(&text)?;
            match validate_system(&sys) {
                Ok(()) => {
                    let bound = theorem4_bound(&sys)?;
                    eprintln!("valid: total {} against bound {}", bound.total, bound.bound);
                    emit(&json!({"valid": true, "stats": system_stats(&sys), "bound": bound}))?;
                }
                Err(v) => {
                    eprintln!("invalid: {v}");
                    emit(&json!({"valid": false, "violation": v}))?;
                }
            }
        }
        FamiliesAction::Random { n, k, out } => {
            let sys = random_maximal_system(n, k, cfg.seed)?;
            if let Some(path) = out {
                fs::write(&path, gpkn_core::combinatorics::serialize_family_file(&sys))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let stats = system_stats(&sys);
            eprintln!("h = {}, t = {}, total = {}", stats.h, stats.t, stats.total);
            emit(&json!({
                "n": n,
                "k": k,
                "seed": cfg.seed,
                "maximal": is_maximal(&sys)?,
                "stats": stats,
                "families": sys.families().iter().map(|f| f.to_lists()).collect::<Vec<_>>(),
            }))?;
        }
    }
    Ok(Outcome::Ok)
}
