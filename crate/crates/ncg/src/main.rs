//! Command-line surface: verify a profile, analyze its structure, run the
//! bound checks, and execute search campaigns.
//!
//! Exit codes: `verify` returns 0 for an exact equilibrium, 1 for a refuted
//! one, 2 when the exact check is over budget (a greedy verdict is printed
//! and labeled), 64 for unparseable input. `bounds` and `search` return 1
//! when any check reports a violation (the falsification alarm) and 2 for
//! over-budget requests.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use ncg::biconnected::{biconnected_components, subtree_weights};
use ncg::bounds::{
    component_diameter_size_bound, consistency_report, degree_lower_bound,
    degree_upper_diameter_bound, degree_upper_size_bound, BoundReport, Verdict, CSV_HEADER,
};
use ncg::canon::profile_digest;
use ncg::game::{is_exact_ne, is_greedy_ne, GameConfig, GameError, NeVerdict, Witness};
use ncg::graph::DistanceMatrix;
use ncg::precise::component_size_bound;
use ncg::profile::{parse_game_file, CommGraph, StrategyProfile};
use ncg::rational::{parse_positive_rational, rational_string};
use ncg::search::{
    conjecture_scan, conjecture_scan_pruned, find_all_ne, CampaignCell, CampaignReport,
    EquilibriumCatalog, SearchError, SearchMode, SearchSpec,
};

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_PARSE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "ncg",
    version,
    about = "Network creation game engine: exact equilibrium verification, \
             structural analysis, bound checking and equilibrium search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Human,
    Csv,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Verify whether a profile file is an exact Nash equilibrium.
    Verify {
        file: PathBuf,
        /// Override the file's edge price ("p/q" or integer).
        #[arg(long)]
        alpha: Option<String>,
        /// Largest n for which the exact check runs.
        #[arg(long, default_value_t = ncg::game::DEFAULT_EXACT_BUDGET)]
        max_exact_n: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Structural report: components, diameters, degrees, weights.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Bound checks on a profile file, the component-size constant for an
    /// epsilon, or a raw evaluator.
    Bounds {
        file: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
        /// Compute the component-size constant for this margin.
        #[arg(long)]
        epsilon: Option<String>,
        /// Raw evaluator: NAME ARGS... (see `--eval help`).
        #[arg(long, num_args = 1.., allow_hyphen_values = false)]
        eval: Option<Vec<String>>,
        #[arg(long, default_value_t = ncg::game::DEFAULT_EXACT_BUDGET)]
        max_exact_n: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Search for equilibria over an alpha grid and write campaign artifacts.
    Search {
        #[arg(long)]
        n: usize,
        /// Comma-separated exact rationals, e.g. "1/2,2,5".
        #[arg(long, value_delimiter = ',', required = true)]
        alpha_grid: Vec<String>,
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Worker threads (default: NCG_WORKERS or the available cores, max 8).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for catalog.jsonl and campaign.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Keep one representative per isomorphism class of the underlying
        /// undirected graph during enumeration.
        #[arg(long)]
        prune_isomorphic: bool,
        /// Post-hoc catalog dedup: none, profile (ownership-aware) or graph.
        #[arg(long, default_value = "none")]
        dedup: String,
        #[arg(long, default_value_t = ncg::game::DEFAULT_EXACT_BUDGET)]
        max_exact_n: usize,
        #[arg(long, default_value_t = 200)]
        max_rounds: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify {
            file,
            alpha,
            max_exact_n,
            format,
        } => cmd_verify(&file, alpha.as_deref(), max_exact_n, format),
        Command::Analyze { file, format } => cmd_analyze(&file, format),
        Command::Bounds {
            file,
            alpha,
            epsilon,
            eval,
            max_exact_n,
            format,
        } => cmd_bounds(
            file.as_deref(),
            alpha.as_deref(),
            epsilon.as_deref(),
            eval.as_deref(),
            max_exact_n,
            format,
        ),
        Command::Search {
            n,
            alpha_grid,
            mode,
            workers,
            seed,
            out,
            prune_isomorphic,
            dedup,
            max_exact_n,
            max_rounds,
            restarts,
        } => cmd_search(SearchArgs {
            n,
            alpha_grid,
            mode,
            workers,
            seed,
            out,
            prune_isomorphic,
            dedup,
            max_exact_n,
            max_rounds,
            restarts,
        }),
    };
    ExitCode::from(code)
}

fn load_game(
    path: &Path,
    alpha_override: Option<&str>,
) -> Result<(StrategyProfile, BigRational), u8> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    let game = match parse_game_file(&text) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    let alpha = match alpha_override {
        Some(text) => match parse_positive_rational(text) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: --alpha: {e}");
                return Err(EXIT_PARSE);
            }
        },
        None => game.alpha,
    };
    Ok((game.profile, alpha))
}

fn strategy_text(strategy: &BTreeSet<usize>) -> String {
    let items: Vec<String> = strategy.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn witness_json(witness: &Witness) -> serde_json::Value {
    serde_json::json!({
        "player": witness.deviation.player,
        "strategy": witness.deviation.strategy.iter().copied().collect::<Vec<usize>>(),
        "delta": witness.delta.to_string(),
    })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(path: &Path, alpha: Option<&str>, budget: usize, format: Format) -> u8 {
    let (profile, alpha) = match load_game(path, alpha) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let cfg = match GameConfig::new(profile.n(), alpha) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let digest = profile_digest(&profile);

    match is_exact_ne(&profile, &cfg, budget) {
        Ok(verdict) => {
            print_verify(&digest, &cfg, &verdict, true, format);
            if verdict.is_ne {
                EXIT_OK
            } else {
                EXIT_REFUTED
            }
        }
        Err(GameError::BudgetExceeded { .. }) => {
            let verdict = is_greedy_ne(&profile, &cfg).expect("greedy check is total");
            print_verify(&digest, &cfg, &verdict, false, format);
            EXIT_BUDGET
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PARSE
        }
    }
}

fn print_verify(digest: &str, cfg: &GameConfig, verdict: &NeVerdict, exact: bool, format: Format) {
    let label = match (exact, verdict.is_ne) {
        (true, true) => "exact-ne",
        (true, false) => "not-ne",
        (false, true) => "greedy-ne",
        (false, false) => "greedy-violated",
    };
    match format {
        Format::Human => {
            println!("digest: {digest}");
            println!("n: {}  alpha: {}", cfg.n, rational_string(&cfg.alpha));
            if exact {
                println!("verdict: {label}");
            } else {
                println!("verdict: {label} (exact check over budget; greedy deviations only)");
            }
            if let Some(w) = &verdict.witness {
                println!(
                    "witness: player {} -> {}  delta {}",
                    w.deviation.player,
                    strategy_text(&w.deviation.strategy),
                    w.delta
                );
            }
        }
        Format::Csv => {
            println!("digest,n,alpha,verdict,witness_player,witness_strategy,delta");
            let (wp, ws, wd) = match &verdict.witness {
                Some(w) => (
                    w.deviation.player.to_string(),
                    strategy_text(&w.deviation.strategy),
                    w.delta.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            println!(
                "{digest},{},{},{label},{wp},\"{ws}\",{wd}",
                cfg.n,
                rational_string(&cfg.alpha)
            );
        }
        Format::Structured => {
            let value = serde_json::json!({
                "digest": digest,
                "n": cfg.n,
                "alpha": rational_string(&cfg.alpha),
                "verdict": label,
                "exact": exact,
                "witness": verdict.witness.as_ref().map(witness_json),
            });
            println!("{value}");
        }
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn connected_components(graph: &CommGraph) -> Vec<Vec<usize>> {
    let n = graph.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut nodes = Vec::new();
        seen[start] = true;
        while let Some(u) = stack.pop() {
            nodes.push(u);
            for &v in graph.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        nodes.sort_unstable();
        components.push(nodes);
    }
    components
}

fn analyze_section(profile: &StrategyProfile, nodes: &[usize]) -> serde_json::Value {
    // Relabel the component so the analysis runs on a standalone graph.
    let index: std::collections::BTreeMap<usize, usize> =
        nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let purchases: Vec<(usize, usize)> = profile
        .purchases()
        .filter(|(o, t)| index.contains_key(o) && index.contains_key(t))
        .map(|(o, t)| (index[&o], index[&t]))
        .collect();
    let sub = StrategyProfile::build(nodes.len(), &purchases).expect("component subprofile");
    let graph = sub.graph();
    let dm = DistanceMatrix::of(&graph);
    let decomposition = biconnected_components(&graph);
    let tree = !decomposition.has_nontrivial();
    let diameter = dm.diameter().expect("component is connected");
    let back = |i: usize| nodes[i];

    let cut: Vec<usize> = decomposition
        .cut_vertices
        .iter()
        .map(|&v| back(v))
        .collect();
    let mut comps = Vec::new();
    for h in decomposition.nontrivial() {
        let weights = subtree_weights(&graph, h).expect("connected component");
        let members: Vec<usize> = h.nodes.iter().map(|&v| back(v)).collect();
        let weight_list: Vec<(usize, usize)> = h
            .nodes
            .iter()
            .map(|&v| (back(v), weights.weight(v)))
            .collect();
        comps.push(serde_json::json!({
            "nodes": members,
            "n_H": h.size(),
            "d_H": h.diameter,
            "avg_degree": rational_string(&h.avg_degree()),
            "weights": weight_list,
        }));
    }
    serde_json::json!({
        "nodes": nodes,
        "size": nodes.len(),
        "edges": graph.edge_count(),
        "diameter": diameter,
        "tree": tree,
        "cut_vertices": cut,
        "nontrivial_components": comps,
    })
}

fn cmd_analyze(path: &Path, format: Format) -> u8 {
    let (profile, alpha) = match load_game(path, None) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let graph = profile.graph();
    let components = connected_components(&graph);
    let sections: Vec<serde_json::Value> = components
        .iter()
        .map(|nodes| analyze_section(&profile, nodes))
        .collect();
    let doc = serde_json::json!({
        "digest": profile_digest(&profile),
        "n": profile.n(),
        "alpha": rational_string(&alpha),
        "connected": components.len() == 1,
        "reciprocal_pairs": profile.reciprocal_pairs(),
        "sections": sections,
    });
    match format {
        Format::Structured => println!("{doc}"),
        Format::Csv => {
            println!("section,nodes,edges,diameter,tree,n_H,d_H,avg_degree");
            for (i, section) in sections.iter().enumerate() {
                let comps = section["nontrivial_components"].as_array().unwrap();
                if comps.is_empty() {
                    println!(
                        "{i},{},{},{},{},,,",
                        section["size"], section["edges"], section["diameter"], section["tree"]
                    );
                } else {
                    for c in comps {
                        println!(
                            "{i},{},{},{},{},{},{},{}",
                            section["size"],
                            section["edges"],
                            section["diameter"],
                            section["tree"],
                            c["n_H"],
                            c["d_H"],
                            c["avg_degree"].as_str().unwrap()
                        );
                    }
                }
            }
        }
        Format::Human => {
            let list = |value: &serde_json::Value| -> String {
                let items: Vec<String> = value
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                format!("[{}]", items.join(","))
            };
            println!("digest: {}", doc["digest"].as_str().unwrap());
            println!(
                "n: {}  alpha: {}  connected: {}",
                doc["n"],
                rational_string(&alpha),
                doc["connected"]
            );
            for (i, section) in sections.iter().enumerate() {
                if sections.len() > 1 {
                    println!("component {i}: nodes {}", list(&section["nodes"]));
                }
                println!(
                    "  size={} edges={} diameter={} tree={}",
                    section["size"], section["edges"], section["diameter"], section["tree"]
                );
                let cut = section["cut_vertices"].as_array().unwrap();
                if !cut.is_empty() {
                    println!("  cut vertices: {}", list(&section["cut_vertices"]));
                }
                let comps = section["nontrivial_components"].as_array().unwrap();
                if comps.is_empty() {
                    println!("  no nontrivial biconnected component");
                }
                for c in comps {
                    println!(
                        "  H: nodes={} n_H={} d_H={} deg(H)={}",
                        list(&c["nodes"]),
                        c["n_H"],
                        c["d_H"],
                        c["avg_degree"].as_str().unwrap()
                    );
                    let weights: Vec<String> = c["weights"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|pair| format!("{}->{}", pair[0], pair[1]))
                        .collect();
                    println!("     weights: {}", weights.join(" "));
                }
            }
        }
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn cmd_bounds(
    file: Option<&Path>,
    alpha: Option<&str>,
    epsilon: Option<&str>,
    eval: Option<&[String]>,
    budget: usize,
    format: Format,
) -> u8 {
    if let Some(args) = eval {
        return cmd_eval(args);
    }
    if let Some(text) = epsilon {
        let eps = match parse_positive_rational(text) {
            Ok(e) => e,
            Err(e) => {
                eprintln!("error: --epsilon: {e}");
                return EXIT_PARSE;
            }
        };
        let k = component_size_bound(&eps).expect("epsilon is positive");
        match format {
            Format::Structured => println!(
                "{}",
                serde_json::json!({"epsilon": rational_string(&eps), "component_size_constant": k.to_string()})
            ),
            _ => println!(
                "component-size-constant(epsilon={}) = {k}",
                rational_string(&eps)
            ),
        }
        return EXIT_OK;
    }
    let Some(path) = file else {
        eprintln!("error: bounds needs a FILE, --epsilon or --eval");
        return EXIT_PARSE;
    };
    let (profile, alpha) = match load_game(path, alpha) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let cfg = match GameConfig::new(profile.n(), alpha) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };

    let (verified, banner) = match is_exact_ne(&profile, &cfg, budget) {
        Ok(v) if v.is_ne => (true, None),
        Ok(v) => {
            let w = v.witness.expect("refuted verdict carries a witness");
            (
                false,
                Some(format!(
                    "input is NOT a Nash equilibrium (player {} improves by {}); \
                     values are reported without verdicts",
                    w.deviation.player, w.delta
                )),
            )
        }
        Err(GameError::BudgetExceeded { n, budget }) => {
            let greedy = is_greedy_ne(&profile, &cfg).expect("greedy check is total");
            (
                false,
                Some(format!(
                    "exact verification over budget (n={n} > {budget}); greedy verdict: {}; \
                     values are reported without verdicts",
                    if greedy.is_ne {
                        "greedy-ne"
                    } else {
                        "greedy-violated"
                    }
                )),
            )
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };

    let reports = match consistency_report(&profile, &cfg, verified) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let violations = ncg::bounds::violation_count(&reports);
    print_reports(&reports, banner.as_deref(), format);
    if violations > 0 {
        EXIT_REFUTED
    } else {
        EXIT_OK
    }
}

fn print_reports(reports: &[BoundReport], banner: Option<&str>, format: Format) {
    match format {
        Format::Csv => {
            if let Some(b) = banner {
                println!("# warning: {b}");
            }
            println!("{CSV_HEADER}");
            for r in reports {
                println!("{}", r.csv_row());
            }
        }
        Format::Structured => {
            let value = serde_json::json!({
                "warning": banner,
                "reports": reports.iter().map(BoundReport::to_json).collect::<Vec<_>>(),
            });
            println!("{value}");
        }
        Format::Human => {
            if let Some(b) = banner {
                println!("WARNING: {b}");
            }
            for r in reports {
                println!("{}", r.human_line());
            }
            let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
            println!(
                "summary: {} holds, {} violated, {} vacuous, {} unverified",
                count(Verdict::Holds),
                count(Verdict::Violated),
                count(Verdict::Vacuous),
                count(Verdict::Unverified)
            );
        }
    }
}

fn cmd_eval(args: &[String]) -> u8 {
    let usage = "evaluators:\n\
         degree-upper-diameter <n> <alpha> <n_H> <d_H>\n\
         degree-upper-size <n> <alpha> <n_H>\n\
         component-diameter-size <n_H>\n\
         degree-lower\n\
         component-size-constant <epsilon>";
    let fail = |msg: &str| -> u8 {
        eprintln!("error: {msg}\n{usage}");
        EXIT_PARSE
    };
    let name = args[0].as_str();
    let parse_usize = |s: &String| s.parse::<usize>().map_err(|e| e.to_string());
    let parse_u32 = |s: &String| s.parse::<u32>().map_err(|e| e.to_string());
    match name {
        "help" => {
            println!("{usage}");
            EXIT_OK
        }
        "degree-upper-diameter" => {
            if args.len() != 5 {
                return fail("degree-upper-diameter takes n alpha n_H d_H");
            }
            let (Ok(n), Ok(alpha), Ok(n_h), Ok(d_h)) = (
                parse_usize(&args[1]),
                parse_positive_rational(&args[2]).map_err(|e| e.to_string()),
                parse_usize(&args[3]),
                parse_u32(&args[4]),
            ) else {
                return fail("bad arguments");
            };
            match degree_upper_diameter_bound(n, &alpha, n_h, d_h) {
                Some(bound) => println!(
                    "degree-upper-diameter(n={n}, alpha={}, n_H={n_h}, d_H={d_h}) = {} (~{})",
                    rational_string(&alpha),
                    rational_string(&bound),
                    ncg::rational::rational_f64(&bound)
                ),
                None => println!("inapplicable (needs alpha > n, n_H >= 3, d_H >= 1)"),
            }
            EXIT_OK
        }
        "degree-upper-size" => {
            if args.len() != 4 {
                return fail("degree-upper-size takes n alpha n_H");
            }
            let (Ok(n), Ok(alpha), Ok(n_h)) = (
                parse_usize(&args[1]),
                parse_positive_rational(&args[2]).map_err(|e| e.to_string()),
                parse_usize(&args[3]),
            ) else {
                return fail("bad arguments");
            };
            match degree_upper_size_bound(n, &alpha, n_h) {
                Some(bound) => println!(
                    "degree-upper-size(n={n}, alpha={}, n_H={n_h}) = {bound}",
                    rational_string(&alpha)
                ),
                None => println!("inapplicable (needs alpha > n, n_H >= 3)"),
            }
            EXIT_OK
        }
        "component-diameter-size" => {
            if args.len() != 2 {
                return fail("component-diameter-size takes n_H");
            }
            let Ok(n_h) = parse_usize(&args[1]) else {
                return fail("bad arguments");
            };
            println!(
                "component-diameter-size(n_H={n_h}) = {}",
                component_diameter_size_bound(n_h)
            );
            EXIT_OK
        }
        "degree-lower" => {
            println!("degree-lower = {}", rational_string(&degree_lower_bound()));
            EXIT_OK
        }
        "component-size-constant" => {
            if args.len() != 2 {
                return fail("component-size-constant takes epsilon");
            }
            let Ok(eps) = parse_positive_rational(&args[1]) else {
                return fail("epsilon must be a positive rational");
            };
            let k = component_size_bound(&eps).expect("epsilon is positive");
            println!(
                "component-size-constant(epsilon={}) = {k}",
                rational_string(&eps)
            );
            EXIT_OK
        }
        other => fail(&format!("unknown evaluator {other:?}")),
    }
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

struct SearchArgs {
    n: usize,
    alpha_grid: Vec<String>,
    mode: String,
    workers: Option<usize>,
    seed: u64,
    out: PathBuf,
    prune_isomorphic: bool,
    dedup: String,
    max_exact_n: usize,
    max_rounds: usize,
    restarts: usize,
}

fn default_workers() -> usize {
    if let Ok(value) = std::env::var("NCG_WORKERS") {
        if let Ok(w) = value.parse::<usize>() {
            return w.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|p| p.get().min(8))
        .unwrap_or(1)
}

fn cmd_search(args: SearchArgs) -> u8 {
    let mode: SearchMode = match args.mode.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let mut grid = Vec::new();
    for text in &args.alpha_grid {
        match parse_positive_rational(text) {
            Ok(a) => grid.push(a),
            Err(e) => {
                eprintln!("error: --alpha-grid: {e}");
                return EXIT_PARSE;
            }
        }
    }
    let workers = args.workers.unwrap_or_else(default_workers).max(1);
    let spec = SearchSpec {
        n: args.n,
        alpha_grid: grid.clone(),
        mode,
        prune_isomorphic: args.prune_isomorphic,
        workers,
        seed: args.seed,
        max_rounds: args.max_rounds,
        restarts: args.restarts,
        exact_budget: args.max_exact_n,
    };

    let result: Result<(CampaignReport, EquilibriumCatalog), SearchError> = if mode
        == SearchMode::Exhaustive
    {
        let cells: Vec<(usize, BigRational)> = grid.iter().map(|a| (args.n, a.clone())).collect();
        if args.prune_isomorphic {
            conjecture_scan_pruned(&cells, args.max_exact_n, args.seed)
        } else {
            conjecture_scan(&cells, workers, args.max_exact_n, args.seed)
        }
    } else {
        find_all_ne(&spec).map(|catalog| {
            let report = campaign_from_catalog(&spec, &catalog);
            (report, catalog)
        })
    };

    let (report, mut catalog) = match result {
        Ok(r) => r,
        Err(SearchError::TooLarge(n)) => {
            eprintln!("error: {}", SearchError::TooLarge(n));
            return EXIT_BUDGET;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    match args.dedup.as_str() {
        "none" => {}
        "profile" => catalog.dedup_isomorphic(true),
        "graph" => catalog.dedup_isomorphic(false),
        other => {
            eprintln!("error: --dedup must be none, profile or graph, got {other:?}");
            return EXIT_PARSE;
        }
    }

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return EXIT_PARSE;
    }
    let catalog_path = args.out.join("catalog.jsonl");
    let campaign_path = args.out.join("campaign.csv");
    let mut csv = format!(
        "# ncg search seed={} mode={} n={} prune={} dedup={}\n",
        args.seed,
        mode.as_str(),
        args.n,
        args.prune_isomorphic,
        args.dedup
    );
    csv.push_str(&report.csv());
    if let Err(e) = std::fs::write(&campaign_path, &csv) {
        eprintln!("error: cannot write {}: {e}", campaign_path.display());
        return EXIT_PARSE;
    }
    if let Err(e) = std::fs::write(&catalog_path, catalog.to_jsonl()) {
        eprintln!("error: cannot write {}: {e}", catalog_path.display());
        return EXIT_PARSE;
    }

    println!(
        "# ncg search seed={} workers={workers} mode={} n={}",
        args.seed,
        mode.as_str(),
        args.n
    );
    for cell in &report.cells {
        println!(
            "n={} alpha={}: checked={} ne={} tree={} nontree={} max_nH={} violations={}",
            cell.n,
            rational_string(&cell.alpha),
            cell.profiles_checked,
            cell.ne_count,
            cell.tree_ne_count,
            cell.nontree_ne_count,
            cell.max_component_size,
            cell.violations
        );
    }
    for line in report.headlines() {
        println!("HEADLINE: {line}");
    }
    println!(
        "catalog: {} ({} entries)",
        catalog_path.display(),
        catalog.entries.len()
    );
    println!("campaign: {}", campaign_path.display());
    let violations = report.total_violations();
    println!("violations: {violations}");
    if violations > 0 {
        EXIT_REFUTED
    } else {
        EXIT_OK
    }
}

/// Campaign rows for non-exhaustive catalogs: one row per alpha value with
/// the entry counts; profiles_checked counts dynamics attempts.
fn campaign_from_catalog(spec: &SearchSpec, catalog: &EquilibriumCatalog) -> CampaignReport {
    let attempts = match spec.mode {
        SearchMode::Exhaustive => unreachable!("exhaustive campaigns come from the scanners"),
        SearchMode::Dynamics => 1,
        SearchMode::RandomRestart => spec.restarts as u64,
    };
    let cells = spec
        .alpha_grid
        .iter()
        .map(|alpha| {
            let entries: Vec<_> = catalog
                .entries
                .iter()
                .filter(|e| e.alpha == rational_string(alpha))
                .collect();
            let tree = entries.iter().filter(|e| e.tree).count();
            CampaignCell {
                n: spec.n,
                alpha: alpha.clone(),
                profiles_checked: attempts,
                ne_count: entries.len(),
                tree_ne_count: tree,
                nontree_ne_count: entries.len() - tree,
                max_component_size: entries
                    .iter()
                    .map(|e| e.max_component_size())
                    .max()
                    .unwrap_or(0),
                violations: entries.iter().map(|e| e.violations).sum(),
                headline: entries
                    .iter()
                    .filter(|e| !e.tree && *alpha > ncg::rational::rational_from_usize(spec.n))
                    .map(|e| e.digest.clone())
                    .collect(),
            }
        })
        .collect();
    CampaignReport { cells }
}
