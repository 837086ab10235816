use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use redpow::ctmc::{check_reversibility, single_automaton_check, Model, ModelJson, SolveMode};
use redpow::cycles::{certify_minimum, greedy_mcb};
use redpow::power::{edge_count, omega_count, power_betti, upsilon_count, vertex_count};
use redpow::{
    betti, bfs_spanning_tree, build_reduced_power, theorem1_basis_with, verify_square_space, Graph,
    GraphJson, Provenance,
};

/// Reduced graph powers, their cycle bases, and reversibility of chains of
/// indistinguishable automata.
///
/// Exit codes: 0 success (reversible), 2 violations found, 1 error or oracle
/// disagreement. REDPOW_SEED is reserved; every command is deterministic.
#[derive(Parser)]
#[command(name = "redpow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the reduced k-th power of a graph.
    Power(GraphArgs),
    /// Build the square basis of the reduced power and check it against a
    /// greedy minimum cycle basis.
    Mcb(GraphArgs),
    /// Verify sizes, independence and projection of the square families.
    VerifySquares(GraphArgs),
    /// Kolmogorov and detailed-balance checks for the chain of k automata.
    CheckReversibility(ModelArgs),
    /// Kolmogorov check for one isolated automaton.
    CheckSingle(ModelArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph JSON: {"vertices": [...], "edges": [[u, v], ...]}
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    /// Spanning-tree root label (default: first vertex)
    #[arg(long)]
    root: Option<String>,
    /// Write the JSON result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the reduced power as DOT
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Enumerate up to this many simple cycles for an exhaustive minimality
    /// certificate
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct ModelArgs {
    /// Model JSON: {"graph": {...}, "k": 3, "rates": {"a->b": {...}, ...}}
    #[arg(long)]
    model: PathBuf,
    /// Override the number of automata from the model file
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve the steady state in exact rational arithmetic
    #[arg(long)]
    exact: bool,
}

const EXIT_VIOLATIONS: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Power(a) => cmd_power(&a),
        Command::Mcb(a) => cmd_mcb(&a),
        Command::VerifySquares(a) => cmd_verify_squares(&a),
        Command::CheckReversibility(a) => cmd_check_reversibility(&a),
        Command::CheckSingle(a) => cmd_check_single(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read file", path.display()))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), e))
}

fn load_graph(path: &Path) -> Result<Graph> {
    let json: GraphJson = parse_json(path, &read(path)?)?;
    Graph::from_json(&json).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_model(path: &Path, k: Option<usize>) -> Result<Model> {
    let mut json: ModelJson = parse_json(path, &read(path)?)?;
    if let Some(k) = k {
        json.k = k;
    }
    Model::from_json(&json).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn root_index(g: &Graph, root: &Option<String>) -> Result<usize> {
    match root {
        None => Ok(0),
        Some(label) => g
            .index_of(label)
            .ok_or_else(|| anyhow!("root `{label}` is not a vertex of the graph")),
    }
}

fn emit(out: &Option<PathBuf>, report: &Value, summary: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("{}: cannot write", path.display()))?;
            print!("{summary}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn require_k2(k: usize) -> Result<()> {
    if k < 2 {
        bail!("k = {k} is not supported here (need k >= 2)");
    }
    Ok(())
}

fn cmd_power(a: &GraphArgs) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    let rp = build_reduced_power(&g, a.k)?;
    let (v, e) = (g.vertex_count(), g.edge_count());
    let (nv, ne) = (vertex_count(v, a.k)?, edge_count(e, v, a.k)?);
    let (bv, be) = (
        rp.graph().vertex_count() as u64,
        rp.graph().edge_count() as u64,
    );
    let summary = format!(
        "k = {}: {bv} states (closed form {nv}), {be} edges (closed form {ne})\n",
        a.k
    );
    if let Some(path) = &a.dot {
        fs::write(path, rp.to_dot())
            .with_context(|| format!("{}: cannot write", path.display()))?;
    }
    match &a.out {
        Some(path) => {
            fs::write(path, rp.to_json_string())
                .with_context(|| format!("{}: cannot write", path.display()))?;
            print!("{summary}");
        }
        None => println!("{}", rp.to_json_string()),
    }
    if (bv, be) != (nv, ne) {
        eprintln!("error: built counts disagree with closed forms");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_mcb(a: &GraphArgs) -> Result<u8> {
    require_k2(a.k)?;
    let g = load_graph(&a.graph)?;
    let rp = build_reduced_power(&g, a.k)?;
    let tree = bfs_spanning_tree(&g, root_index(&g, &a.root)?)?;
    let t1 = theorem1_basis_with(&rp, &tree, None)?;
    let greedy = greedy_mcb(rp.graph())?;
    let total = t1.basis.total_length();
    let greedy_total = greedy.total_length();
    let (v, e) = (g.vertex_count(), g.edge_count());
    let beta = power_betti(e, v, a.k)?;
    let ups = upsilon_count(v, a.k)?;
    let oms = omega_count(betti(&g)?, v, a.k)?;

    let mut notes = vec![format!(
        "{} elements = cycle-space dimension {beta} of the reduced power: {} embedded base cycles, \
         {} upsilon squares (closed form {ups}), {} omega squares (closed form {oms})",
        t1.basis.len(),
        t1.base_mcb.len(),
        t1.upsilon_len,
        t1.omega_len
    )];
    let mut oracle_ok =
        t1.basis.len() as u64 == beta && t1.upsilon_len as u64 == ups && t1.omega_len as u64 == oms;
    if t1.certified {
        if total != greedy_total {
            oracle_ok = false;
            notes.push(format!(
                "greedy oracle disagrees: total {greedy_total} vs {total}"
            ));
        }
    } else {
        notes.push(format!(
            "base graph has triangles; minimality is not claimed (greedy total {greedy_total}, \
             square basis total {total})"
        ));
    }
    let exhaustive = match a.budget {
        Some(budget) => match certify_minimum(rp.graph(), &t1.basis, budget) {
            Err(e @ redpow::Error::BudgetExceeded { .. }) => {
                notes.push(format!("exhaustive certificate skipped: {e}"));
                None
            }
            Err(e) => return Err(e.into()),
            Ok(witness) => {
                if let Some(c) = &witness {
                    let labels: Vec<&str> =
                        c.vertices().iter().map(|&x| rp.state_label(x)).collect();
                    notes.push(format!(
                        "not minimum: cycle {} escapes shorter elements",
                        labels.join(" ")
                    ));
                    if t1.certified {
                        oracle_ok = false;
                    }
                }
                Some(witness.is_none())
            }
        },
        None => None,
    };
    let labels = g.labels();
    let mut square_names = t1.squares.iter().map(|s| s.describe(labels));
    let elements: Vec<Value> = t1
        .basis
        .elements()
        .iter()
        .map(|c| {
            let mut el = json!({
                "provenance": c.provenance(),
                "length": c.len(),
                "vertices": c.vertices().iter().map(|&x| rp.state_label(x)).collect::<Vec<_>>(),
            });
            if matches!(c.provenance(), Provenance::Upsilon | Provenance::Omega) {
                el["square"] = json!(square_names.next());
            }
            el
        })
        .collect();
    let certified = t1.certified && oracle_ok;
    let report = json!({
        "k": a.k,
        "kind": t1.basis.kind(),
        "root": g.label(tree.root()),
        "embedding": t1.embedding.format(labels),
        "certified": certified,
        "total_length": total,
        "greedy_total_length": greedy_total,
        "exhaustive_certificate": exhaustive,
        "upsilon": t1.upsilon_len,
        "omega": t1.omega_len,
        "notes": notes,
        "elements": elements,
    });
    if let Some(path) = &a.dot {
        fs::write(path, rp.to_dot())
            .with_context(|| format!("{}: cannot write", path.display()))?;
    }
    emit(
        &a.out,
        &report,
        &format!(
            "{} elements, total length {total}, certified {certified}\n",
            t1.basis.len()
        ),
    )?;
    Ok(if oracle_ok { 0 } else { 1 })
}

fn cmd_verify_squares(a: &GraphArgs) -> Result<u8> {
    require_k2(a.k)?;
    let g = load_graph(&a.graph)?;
    let rp = build_reduced_power(&g, a.k)?;
    let tree = bfs_spanning_tree(&g, root_index(&g, &a.root)?)?;
    let report = verify_square_space(&rp, &tree)?;
    let summary: String = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {}: expected {}, got {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.actual
            )
        })
        .collect();
    emit(&a.out, &serde_json::to_value(&report)?, &summary)?;
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn cmd_check_reversibility(a: &ModelArgs) -> Result<u8> {
    let model = load_model(&a.model, a.k)?;
    let root = root_index(&model.graph, &a.root)?;
    let mode = if a.exact {
        SolveMode::Exact
    } else {
        SolveMode::Float
    };
    let report = check_reversibility(&model, mode, Some(root))?;
    let violations = report.master.violations().count();
    let summary = format!(
        "{} states, {} cycles checked, {violations} violations; detailed balance {}; reversible {}\n",
        report.states.len(),
        report.master.checks.len(),
        if report.detailed_balance.balanced { "holds" } else { "fails" },
        report.reversible
    );
    emit(&a.out, &serde_json::to_value(&report)?, &summary)?;
    if !report.oracles_agree {
        eprintln!("error: Kolmogorov and detailed-balance verdicts disagree");
        return Ok(1);
    }
    Ok(if report.reversible {
        0
    } else {
        EXIT_VIOLATIONS
    })
}

fn cmd_check_single(a: &ModelArgs) -> Result<u8> {
    let model = load_model(&a.model, a.k)?;
    let report = single_automaton_check(&model.graph, &model.rates)?;
    let summary = format!(
        "{} cycles checked, {} violations\n",
        report.checks.len(),
        report.violations().count()
    );
    emit(&a.out, &serde_json::to_value(&report)?, &summary)?;
    Ok(if report.reversible {
        0
    } else {
        EXIT_VIOLATIONS
    })
}
