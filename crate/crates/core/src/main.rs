use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use planar_wd::canvas::Canvas;
use planar_wd::coloring::{
    color_via_sequence, coloring_count_lower_bound, count_colorings, validate_assignment, validate_coloring,
};
use planar_wd::generator::generate_plane_graph;
use planar_wd::io;
use planar_wd::local_girth::local_girth_function;
use planar_wd::ops::{average_availability, OpError, Simulator};
use planar_wd::search::{exact_search, SearchOptions, SearchOutcome};
use planar_wd::solver::{CanvasSolution, SolveError, Solver, SolverConfig};

#[derive(Parser)]
#[command(name = "planar-wd", version, about = "Weak degeneracy of plane graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-vertex girth and girth class.
    Girth { graph: PathBuf },
    /// Minimal local girth weights.
    Localf { graph: PathBuf },
    /// Sequence removing the whole graph from its local girth weights.
    Solve {
        graph: PathBuf,
        /// Weights to lift the sequence to; must dominate the local girth weights.
        #[arg(long)]
        f: Option<PathBuf>,
        /// Print one `step` line per reduction on stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Check a sequence and report availabilities.
    Run { graph: PathBuf, weights: PathBuf, sequence: PathBuf },
    /// Validate a canvas and look for an exceptional configuration.
    CanvasCheck { canvas: PathBuf },
    /// Sequence removing everything outside the path of a canvas.
    CanvasSolve {
        canvas: PathBuf,
        #[arg(long)]
        trace: bool,
    },
    /// Exhaustive search for a removal sequence.
    WdExact {
        graph: PathBuf,
        weights: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        no_prune: bool,
    },
    /// Colour along a sequence.
    Color { graph: PathBuf, weights: PathBuf, sequence: PathBuf, assignment: PathBuf },
    /// Count colourings by brute force.
    Count { graph: PathBuf, assignment: PathBuf },
    /// Product of availabilities along a sequence.
    Bound { graph: PathBuf, weights: PathBuf, sequence: PathBuf },
    /// Random plane graph.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        keep: f64,
    },
}

/// Exit status with a message for stderr.
enum Fail {
    Negative(String),
    Input(String),
    Internal(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Negative(_) => 1,
            Fail::Input(_) => 2,
            Fail::Internal(_) => 3,
        }
    }
}

type Out = Result<(), Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load<T, E: std::fmt::Display>(path: &Path, parse: impl Fn(&str) -> Result<T, E>) -> Result<T, Fail> {
    parse(&read(path)?).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn from_solve(e: SolveError) -> Fail {
    match e {
        SolveError::NotACanvas(_) | SolveError::MissingWeight(_) | SolveError::BelowLocalGirth { .. } => {
            Fail::Input(e.to_string())
        }
        SolveError::Stuck { .. } | SolveError::Internal(_) => Fail::Internal(e.to_string()),
    }
}

/// Sequence errors are negative results; missing weights are bad input.
fn from_op(e: OpError) -> Fail {
    match e {
        OpError::MissingWeight(_) | OpError::NotDominating => Fail::Input(e.to_string()),
        _ => Fail::Negative(e.to_string()),
    }
}

fn print_trace(s: &Solver, on: bool) {
    if on {
        for t in &s.trace {
            eprintln!("{t}");
        }
        for d in &s.defects {
            eprintln!("defect {d}");
        }
    }
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Girth { graph } => {
            let g = load(&graph, io::parse_graph)?;
            let girths = g.girths();
            for v in g.vertices() {
                println!("{v} {} {}", girths[v], girths[v].class());
            }
        }
        Cmd::Localf { graph } => {
            let g = load(&graph, io::parse_graph)?;
            print!("{}", io::write_weights(&local_girth_function(&g)));
        }
        Cmd::Solve { graph, f, trace } => {
            let g = load(&graph, io::parse_graph)?;
            let f = f.map(|p| load(&p, io::parse_weights)).transpose()?;
            let (s, r) = Solver::new(SolverConfig::default()).solve_planar(&g, f.as_ref());
            print_trace(&s, trace);
            print!("{}", io::write_sequence(&r.map_err(from_solve)?));
        }
        Cmd::Run { graph, weights, sequence } => {
            let g = load(&graph, io::parse_graph)?;
            let f = load(&weights, io::parse_weights)?;
            let seq = load(&sequence, io::parse_sequence)?;
            let avg = average_availability(&g, &f, &seq).map_err(from_op)?;
            let mut sim = Simulator::new(&g, &f, &Default::default()).map_err(from_op)?;
            sim.run(&seq).map_err(|e| from_op(e.into()))?;
            for (op, a) in seq.iter().zip(&avg.availabilities) {
                println!("{op} availability {a}");
            }
            println!("average availability {:.6}", avg.mean());
            if !sim.is_empty() {
                let left: Vec<String> = sim.remaining().iter().map(|v| v.to_string()).collect();
                return Err(Fail::Negative(format!("vertices left: {}", left.join(" "))));
            }
            println!("ok");
        }
        Cmd::CanvasCheck { canvas } => {
            let k: Canvas = load(&canvas, io::parse_canvas)?;
            let violations = k.validate();
            if !violations.is_empty() {
                for v in &violations {
                    println!("violation {v}");
                }
                return Err(Fail::Input(format!("{} canvas condition(s) violated", violations.len())));
            }
            match k.exception_unchecked() {
                Some(x) => {
                    println!("exception {x}");
                    return Err(Fail::Negative(format!("exception {x}")));
                }
                None => println!("canvas ok"),
            }
        }
        Cmd::CanvasSolve { canvas, trace } => {
            let k: Canvas = load(&canvas, io::parse_canvas)?;
            let (s, r) = Solver::new(SolverConfig::default()).solve_canvas(&k);
            print_trace(&s, trace);
            match r.map_err(from_solve)? {
                CanvasSolution::Removed(seq) => print!("{}", io::write_sequence(&seq)),
                CanvasSolution::Exception(x) => {
                    println!("exception {x}");
                    return Err(Fail::Negative(format!("exception {x}")));
                }
            }
        }
        Cmd::WdExact { graph, weights, budget, no_prune } => {
            let g = load(&graph, io::parse_graph)?;
            let f = load(&weights, io::parse_weights)?;
            if let Some(v) = g.vertices().find(|&v| !f.contains(v)) {
                return Err(Fail::Input(format!("vertex {v} has no weight")));
            }
            let (out, stats) = exact_search(&g, &f, SearchOptions { node_budget: budget, prune: !no_prune });
            eprintln!("nodes {} memo hits {}", stats.nodes, stats.memo_hits);
            match out {
                SearchOutcome::Found(seq) => print!("{}", io::write_sequence(&seq)),
                SearchOutcome::ExhaustedNo => {
                    println!("not weakly degenerate");
                    return Err(Fail::Negative("no sequence exists".into()));
                }
                SearchOutcome::BudgetExceeded => {
                    println!("budget exceeded");
                    return Err(Fail::Internal("search budget exhausted".into()));
                }
            }
        }
        Cmd::Color { graph, weights, sequence, assignment } => {
            let g = load(&graph, io::parse_graph)?;
            let f = load(&weights, io::parse_weights)?;
            let seq = load(&sequence, io::parse_sequence)?;
            let ca = load(&assignment, |t| io::parse_assignment(t, &g))?;
            let bad = validate_assignment(&g, &ca);
            if let Some(b) = bad.first() {
                return Err(Fail::Input(b.to_string()));
            }
            let phi = color_via_sequence(&g, &ca, &f, &seq).map_err(|e| Fail::Negative(e.to_string()))?;
            if let Some(v) = validate_coloring(&g, &ca, &phi).first() {
                return Err(Fail::Internal(format!("colouring check failed: {v}")));
            }
            for (v, c) in &phi {
                println!("color {v} {c}");
            }
        }
        Cmd::Count { graph, assignment } => {
            let g = load(&graph, io::parse_graph)?;
            let ca = load(&assignment, |t| io::parse_assignment(t, &g))?;
            if let Some(b) = validate_assignment(&g, &ca).first() {
                return Err(Fail::Input(b.to_string()));
            }
            println!("{}", count_colorings(&g, &ca));
        }
        Cmd::Bound { graph, weights, sequence } => {
            let g = load(&graph, io::parse_graph)?;
            let f = load(&weights, io::parse_weights)?;
            let seq = load(&sequence, io::parse_sequence)?;
            let (product, mean) = coloring_count_lower_bound(&g, &f, &seq).map_err(from_op)?;
            println!("{product}");
            println!("average availability {mean:.6}");
        }
        Cmd::Gen { seed, n, keep } => {
            if n < 3 || !(0.0..=1.0).contains(&keep) {
                return Err(Fail::Input("need n >= 3 and 0 <= keep <= 1".into()));
            }
            print!("{}", io::write_graph(&generate_plane_graph(seed, n, keep)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Fail::Negative(m) | Fail::Input(m) | Fail::Internal(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
