//! The `netctrl` binary: parse a graph file, run one analysis, print a
//! summary, and optionally emit a versioned JSON report.
//!
//! Exit codes are part of the interface: 0 = analysis completed with a
//! positive verdict, 1 = completed with a negative verdict, 2 = input error
//! (malformed graph lines are reported with their line number), 3 = a
//! search budget or iteration limit was hit.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use netctrl::adjust::{adjust_weights, apply_plan, verify_plan, AdjustOptions, AdjustmentPlan};
use netctrl::graph::DirectedGraph;
use netctrl::leaders::{
    min_leader_bounds, minimal_leader_sets, slc_candidates, LeaderSearchOptions, LeaderSet,
};
use netctrl::regular::{
    regular_leader_lower_bound, regular_never_slc, regular_slc_by_agent1, regular_structural,
};
use netctrl::spectral::{eigen_decompose, Spectrum};
use netctrl::structural::{
    certify_by_random_weights, min_structural_leaders, structurally_controllable,
};
use netctrl::{Error, Tolerances};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "netctrl", version, about = "Controllability analysis of weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Absolute singular-value cutoff for all rank decisions
    #[arg(long, global = true, value_name = "t")]
    tol: Option<f64>,
    /// Seed for randomized weight certification
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report to this file
    #[arg(long, global = true, value_name = "out")]
    json: Option<PathBuf>,
    /// Suppress the human-readable summary
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectrum, single-leader verdict, and structural summary
    Analyze { file: PathBuf },
    /// Search for minimum-cardinality controllable leader sets
    Leaders {
        file: PathBuf,
        /// Agents that must be part of every set (comma separated)
        #[arg(long, value_delimiter = ',', value_name = "a,b")]
        require: Vec<usize>,
        /// Collect every minimum set instead of the first one found
        #[arg(long)]
        all: bool,
    },
    /// Structural controllability from a fixed leader set
    Structural {
        file: PathBuf,
        /// The leader agents (comma separated)
        #[arg(long, required = true, value_delimiter = ',', value_name = "a,b")]
        leaders: Vec<usize>,
        /// Also search for a random-weight controllability witness
        #[arg(long, value_name = "trials")]
        certify: Option<usize>,
    },
    /// Minimal edge-weight adjustment restoring single-leader controllability
    Adjust {
        file: PathBuf,
        /// Initial perturbation step
        #[arg(long, value_name = "t")]
        theta: Option<f64>,
        /// Force this spanning-tree root instead of probing all of them
        #[arg(long, value_name = "r")]
        root: Option<usize>,
    },
    /// Exact walk-count tests for unit-weight in-degree-regular graphs
    Regular { file: PathBuf },
}

// ---------------------------------------------------------------------------
// Report schema (field order is the serialization order; keep it stable)

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    tool_version: String,
    command: String,
    seed: u64,
    tolerances: TolerancesEcho,
    graph: GraphEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<Vec<EigenLine>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analysis: Option<AnalysisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    leader_search: Option<LeaderSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structural: Option<StructuralSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjustment: Option<AdjustSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regular: Option<RegularSection>,
    verdict: VerdictLine,
}

#[derive(Serialize)]
struct TolerancesEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    rank_cutoff: Option<f64>,
    zero_entry: f64,
}

#[derive(Serialize)]
struct GraphEcho {
    n: usize,
    edge_count: usize,
    in_degree_regular: bool,
    /// Canonical edge-list text; re-parsing it reproduces the graph exactly.
    text: String,
}

#[derive(Serialize)]
struct EigenLine {
    re: f64,
    im: f64,
    alg_mult: usize,
    geo_mult: usize,
}

#[derive(Serialize)]
struct AnalysisSection {
    cyclic: bool,
    single_leader_controllable: bool,
    slc_candidates: Vec<usize>,
    min_leaders_lower_bound: usize,
    min_leaders_upper_bound: usize,
    spanning_tree_roots: Vec<usize>,
    min_structural_leaders: usize,
    structural_witness: Vec<usize>,
}

#[derive(Serialize)]
struct LeaderSection {
    required: Vec<usize>,
    enumerate_all: bool,
    lower_bound: usize,
    upper_bound: usize,
    cardinality: usize,
    sets: Vec<Vec<usize>>,
    candidates_tested: usize,
}

#[derive(Serialize)]
struct StructuralSection {
    leaders: Vec<usize>,
    controllable: bool,
    unreached: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certification: Option<CertifySection>,
}

#[derive(Serialize)]
struct CertifySection {
    trials: usize,
    witness_found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_text: Option<String>,
}

#[derive(Serialize)]
struct AdjustSection {
    root: usize,
    initial_rank: usize,
    deficiency: usize,
    edges: Vec<AdjustedEdgeLine>,
    iterations: usize,
    theta_final: f64,
    final_rank: usize,
    verified_rank: usize,
    /// Canonical text of the adjusted graph.
    adjusted_text: String,
    adjusted_spectrum: Vec<EigenLine>,
    /// Smallest leader-1 component over all adjusted left eigenvectors.
    min_leader1_component: f64,
}

#[derive(Serialize)]
struct AdjustedEdgeLine {
    src: usize,
    dst: usize,
    old_weight: f64,
    new_weight: f64,
}

#[derive(Serialize)]
struct RegularSection {
    in_degree: usize,
    slc_by_agent1: bool,
    never_slc: bool,
    structural: bool,
    leader_lower_bound: usize,
}

#[derive(Serialize)]
struct VerdictLine {
    positive: bool,
    summary: String,
}

/// Round to 12 significant digits so reports are byte-stable and free of
/// trailing float noise. Maps -0.0 to 0.0.
fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        format!("{x:.11e}").parse().expect("formatted float reparses")
    }
}

fn eigen_lines(s: &Spectrum) -> Vec<EigenLine> {
    s.eigs
        .iter()
        .map(|e| EigenLine {
            re: sig12(e.lambda.re),
            im: sig12(e.lambda.im),
            alg_mult: e.alg_mult,
            geo_mult: e.geo_mult,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Failure-to-exit-code mapping

enum Failure {
    /// Exit 2: the input (file, flags, graph contract) is at fault.
    Input(String),
    /// Exit 1: analysis completed, the answer is "no" (e.g. no spanning tree).
    Negative(String),
    /// Exit 3: a budget, iteration, or numeric limit stopped the analysis.
    Limit(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Input(_) => 2,
            Failure::Limit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Negative(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoSpanningTree => Failure::Negative(e.to_string()),
            Error::BudgetExceeded { .. }
            | Error::IterationLimitExceeded { .. }
            | Error::WalkCountOverflow(_)
            | Error::EigensolverFailure
            | Error::SpectrumMismatch(_)
            | Error::NotAnEigenvalue { .. } => Failure::Limit(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------

pub fn run<I, S>(argv: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let full = std::iter::once(OsString::from("netctrl")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output; those exit 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };

    let tol = Tolerances { rank: cli.tol, ..Tolerances::default() };
    match dispatch(&cli, &tol) {
        Ok(report) => {
            if let Some(path) = &cli.json {
                let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
                text.push('\n');
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            if !cli.quiet {
                print!("{}", render(&report));
            }
            if report.verdict.positive {
                0
            } else {
                1
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<Report, Failure> {
    let (file, command) = match &cli.cmd {
        Cmd::Analyze { file } => (file, "analyze"),
        Cmd::Leaders { file, .. } => (file, "leaders"),
        Cmd::Structural { file, .. } => (file, "structural"),
        Cmd::Adjust { file, .. } => (file, "adjust"),
        Cmd::Regular { file } => (file, "regular"),
    };
    let g = load_graph(file)?;

    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        seed: cli.seed,
        tolerances: TolerancesEcho { rank_cutoff: tol.rank, zero_entry: tol.zero_entry },
        graph: GraphEcho {
            n: g.n(),
            edge_count: g.edge_count(),
            in_degree_regular: g.is_in_degree_regular(),
            text: g.to_text(),
        },
        spectrum: None,
        analysis: None,
        leader_search: None,
        structural: None,
        adjustment: None,
        regular: None,
        verdict: VerdictLine { positive: false, summary: String::new() },
    };

    match &cli.cmd {
        Cmd::Analyze { .. } => {
            let l = g.laplacian();
            let s = eigen_decompose(&l, tol)?;
            let candidates = slc_candidates(&l, &s, tol);
            let (lo, hi) = min_leader_bounds(&s);
            let (k, witness) = min_structural_leaders(&g);
            let slc = !candidates.is_empty();
            report.spectrum = Some(eigen_lines(&s));
            report.analysis = Some(AnalysisSection {
                cyclic: s.is_cyclic(),
                single_leader_controllable: slc,
                slc_candidates: candidates,
                min_leaders_lower_bound: lo,
                min_leaders_upper_bound: hi,
                spanning_tree_roots: g.spanning_tree_roots(),
                min_structural_leaders: k,
                structural_witness: witness.agents().to_vec(),
            });
            report.verdict = VerdictLine {
                positive: slc,
                summary: if slc {
                    "single-leader controllable".into()
                } else {
                    "not controllable from any single leader".into()
                },
            };
        }
        Cmd::Leaders { require, all, .. } => {
            let l = g.laplacian();
            let s = eigen_decompose(&l, tol)?;
            let (lo, hi) = min_leader_bounds(&s);
            let opts = LeaderSearchOptions {
                required: require.clone(),
                enumerate_all: *all,
                ..LeaderSearchOptions::default()
            };
            let found = minimal_leader_sets(&l, &s, &opts, tol)?;
            let positive = found.cardinality > 0;
            report.spectrum = Some(eigen_lines(&s));
            report.leader_search = Some(LeaderSection {
                required: require.clone(),
                enumerate_all: *all,
                lower_bound: lo,
                upper_bound: hi,
                cardinality: found.cardinality,
                sets: found.sets.iter().map(|s| s.agents().to_vec()).collect(),
                candidates_tested: found.tested,
            });
            report.verdict = VerdictLine {
                positive,
                summary: if positive {
                    format!("minimum controllable leader sets have {} agents", found.cardinality)
                } else {
                    "no controllable leader set within the cardinality cap".into()
                },
            };
        }
        Cmd::Structural { leaders, certify, .. } => {
            let set = LeaderSet::new(g.n(), leaders.iter().copied())?;
            let ok = structurally_controllable(&g, &set)?;
            let reached = g.reachable_set(set.agents())?;
            let unreached: Vec<usize> = (1..=g.n()).filter(|v| !reached.contains(v)).collect();
            let certification = match certify {
                Some(trials) => {
                    let witness = certify_by_random_weights(&g, &set, *trials, cli.seed, tol)?;
                    Some(CertifySection {
                        trials: *trials,
                        witness_found: witness.is_some(),
                        witness_text: witness.map(|h| h.to_text()),
                    })
                }
                None => None,
            };
            report.structural = Some(StructuralSection {
                leaders: set.agents().to_vec(),
                controllable: ok,
                unreached,
                certification,
            });
            report.verdict = VerdictLine {
                positive: ok,
                summary: if ok {
                    "structurally controllable from the given leaders".into()
                } else {
                    "leaders do not reach every agent".into()
                },
            };
        }
        Cmd::Adjust { theta, root, .. } => {
            let opts = AdjustOptions {
                theta0: theta.unwrap_or(AdjustOptions::default().theta0),
                root: *root,
                ..AdjustOptions::default()
            };
            let plan = adjust_weights(&g, &opts, tol)?;
            let verified = verify_plan(&g, &plan, tol)?;
            let adjusted = apply_plan(&g, &plan)?;
            let adjusted_l = adjusted.laplacian();
            let s0 = eigen_decompose(&g.laplacian(), tol)?;
            let s1 = eigen_decompose(&adjusted_l, tol)?;
            let min_w1 = s1
                .eigs
                .iter()
                .map(|e| {
                    (0..e.geo_mult)
                        .map(|k| e.left_basis[(k, 0)].norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            report.spectrum = Some(eigen_lines(&s0));
            report.adjustment = Some(section_for_plan(&plan, &verified, &adjusted, &s1, min_w1));
            report.verdict = VerdictLine {
                positive: true,
                summary: format!(
                    "rank {} -> {} by adjusting {} edge(s) from root {}",
                    plan.initial_rank,
                    verified.rank,
                    plan.adjusted_edges.len(),
                    plan.root
                ),
            };
        }
        Cmd::Regular { .. } => {
            let in_degree = g.in_degree_regular_degree()?;
            let slc1 = regular_slc_by_agent1(&g)?;
            report.regular = Some(RegularSection {
                in_degree,
                slc_by_agent1: slc1,
                never_slc: regular_never_slc(&g)?,
                structural: regular_structural(&g)?,
                leader_lower_bound: regular_leader_lower_bound(&g)?,
            });
            report.verdict = VerdictLine {
                positive: slc1,
                summary: if slc1 {
                    "controllable from agent 1 (exact walk-count test)".into()
                } else {
                    "not controllable from agent 1 (exact walk-count test)".into()
                },
            };
        }
    }
    Ok(report)
}

fn section_for_plan(
    plan: &AdjustmentPlan,
    verified: &netctrl::leaders::Verdict,
    adjusted: &DirectedGraph,
    adjusted_spectrum: &Spectrum,
    min_w1: f64,
) -> AdjustSection {
    AdjustSection {
        root: plan.root,
        initial_rank: plan.initial_rank,
        deficiency: plan.relabel_permutation.len() - plan.initial_rank,
        edges: plan
            .adjusted_edges
            .iter()
            .map(|e| AdjustedEdgeLine {
                src: e.src,
                dst: e.dst,
                old_weight: sig12(e.old_weight),
                new_weight: sig12(e.new_weight),
            })
            .collect(),
        iterations: plan.iterations,
        theta_final: sig12(plan.theta_final),
        final_rank: plan.final_rank,
        verified_rank: verified.rank,
        adjusted_text: adjusted.to_text(),
        adjusted_spectrum: eigen_lines(adjusted_spectrum),
        min_leader1_component: sig12(min_w1),
    }
}

fn load_graph(path: &Path) -> Result<DirectedGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    DirectedGraph::from_text(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Human-readable rendering

fn render(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "graph: n={}, edges={}, in-degree-regular={}",
        r.graph.n, r.graph.edge_count, r.graph.in_degree_regular
    );
    if let Some(spec) = &r.spectrum {
        let _ = writeln!(out, "eigenvalues (alg, geo):");
        for e in spec {
            let _ = writeln!(out, "  {:>18} ({}, {})", fmt_complex(e.re, e.im), e.alg_mult, e.geo_mult);
        }
    }
    if let Some(a) = &r.analysis {
        let _ = writeln!(out, "cyclic: {}", a.cyclic);
        let _ = writeln!(
            out,
            "single-leader controllable: {} (candidates: {})",
            a.single_leader_controllable,
            fmt_set(&a.slc_candidates)
        );
        let _ = writeln!(
            out,
            "minimum leaders within [{}, {}]",
            a.min_leaders_lower_bound, a.min_leaders_upper_bound
        );
        let _ = writeln!(out, "spanning-tree roots: {}", fmt_set(&a.spanning_tree_roots));
        let _ = writeln!(
            out,
            "structural minimum: {} leader(s), e.g. {}",
            a.min_structural_leaders,
            fmt_set(&a.structural_witness)
        );
    }
    if let Some(l) = &r.leader_search {
        let _ = writeln!(
            out,
            "bounds [{}, {}], tested {} candidate set(s)",
            l.lower_bound, l.upper_bound, l.candidates_tested
        );
        for s in &l.sets {
            let _ = writeln!(out, "  controllable: {}", fmt_set(s));
        }
    }
    if let Some(s) = &r.structural {
        let _ = writeln!(
            out,
            "leaders {} reach {}",
            fmt_set(&s.leaders),
            if s.unreached.is_empty() {
                "every agent".to_string()
            } else {
                format!("all but {}", fmt_set(&s.unreached))
            }
        );
        if let Some(c) = &s.certification {
            let _ = writeln!(
                out,
                "certification over {} trial(s): witness {}",
                c.trials,
                if c.witness_found { "found" } else { "not found" }
            );
        }
    }
    if let Some(a) = &r.adjustment {
        let _ = writeln!(
            out,
            "root {}: rank {} of {}, deficiency {}",
            a.root,
            a.initial_rank,
            a.initial_rank + a.deficiency,
            a.deficiency
        );
        for e in &a.edges {
            let _ = writeln!(
                out,
                "  edge {} -> {}: weight {} becomes {}",
                e.src, e.dst, e.old_weight, e.new_weight
            );
        }
        let _ = writeln!(
            out,
            "final rank {} (verified {}) after {} iteration(s)",
            a.final_rank, a.verified_rank, a.iterations
        );
    }
    if let Some(reg) = &r.regular {
        let _ = writeln!(out, "in-degree: {}", reg.in_degree);
        let _ = writeln!(out, "controllable from agent 1: {}", reg.slc_by_agent1);
        let _ = writeln!(out, "no single leader can work: {}", reg.never_slc);
        let _ = writeln!(out, "structurally controllable from one agent: {}", reg.structural);
        let _ = writeln!(out, "leader count lower bound: {}", reg.leader_lower_bound);
    }
    let _ = writeln!(out, "verdict: {}", r.verdict.summary);
    out
}

fn fmt_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:.6}")
    } else if im > 0.0 {
        format!("{re:.6}+{im:.6}i")
    } else {
        format!("{re:.6}-{:.6}i", -im)
    }
}

fn fmt_set(v: &[usize]) -> String {
    if v.is_empty() {
        "{}".to_string()
    } else {
        format!("{{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }
}
