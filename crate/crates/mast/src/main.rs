//! Command line front end: agreement-subtree sizes of Newick trees, input
//! generators, the longest-common-subsequence reduction, and a small
//! benchmark driver.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mast::mast::{mast_leafset, mast_size, unify_labels, Config, Counters};
use mast::oracle::{caterpillar, check_agreement, lcs_caterpillar, lcs_dp, random_tree, rr_bruteforce, star};
use mast::tree::{parse_newick, to_newick, EvoTree, LabelIndex};

#[derive(Parser)]
#[command(name = "mast", about = "Maximum agreement subtrees of rooted evolutionary trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the agreement subtree size of two Newick trees
    Mast(MastArgs),
    /// Generate a random or structured tree as Newick
    Gen(GenArgs),
    /// Turn two sequences into caterpillar trees whose agreement size is
    /// their longest common subsequence length plus two
    Lcs2mast(LcsArgs),
    /// Time the solver over a grid of sizes and emit CSV
    Bench(BenchArgs),
}

#[derive(Args)]
struct MastArgs {
    /// First tree: a file path or a literal Newick string
    tree1: String,
    /// Second tree: a file path or a literal Newick string
    tree2: String,
    /// Also report the leaf names of one maximum agreement subtree
    #[arg(long)]
    witness: bool,
    /// Check the witness is a genuine agreement set of the reported size
    #[arg(long)]
    verify: bool,
    /// Cross-check the size against the quadratic reference solver
    #[arg(long)]
    oracle: bool,
    /// Emit the full report as JSON
    #[arg(long)]
    json: bool,
    /// Contract unary internal vertices while parsing
    #[arg(long)]
    contract: bool,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of leaves
    #[arg(long)]
    n: usize,
    /// Maximum number of children per vertex (random shape only)
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Shape::Random)]
    shape: Shape,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Random,
    Caterpillar,
    Star,
}

#[derive(Args)]
struct LcsArgs {
    /// First sequence, comma separated symbols
    seq1: String,
    /// Second sequence, comma separated symbols
    seq2: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Leaf counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1024,2048,4096")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Number of seeds per size
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    size: u64,
    n_leaves_1: usize,
    n_leaves_2: usize,
    common_labels: usize,
    counters: Counters,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Mast(a) => cmd_mast(a),
        Command::Gen(a) => cmd_gen(a).map(|()| true),
        Command::Lcs2mast(a) => cmd_lcs(a).map(|()| true),
        Command::Bench(a) => cmd_bench(a).map(|()| true),
    }
}

/// Reads a tree argument: the contents of the file if one exists at that
/// path, otherwise the argument itself as Newick.
fn load_tree(arg: &str, contract: bool) -> Result<(EvoTree, LabelIndex), String> {
    let text = match std::fs::read_to_string(arg) {
        Ok(s) => s,
        Err(_) if arg.contains('(') || arg.contains(';') => arg.to_string(),
        Err(e) => return Err(format!("cannot read {arg}: {e}")),
    };
    parse_newick(text.trim(), contract).map_err(|e| format!("parsing {arg}: {e}"))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("writing output: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_mast(a: MastArgs) -> Result<bool, String> {
    let (t1, idx1) = load_tree(&a.tree1, a.contract)?;
    let (t2, idx2) = load_tree(&a.tree2, a.contract)?;
    let (u1, u2, union) = unify_labels(&t1, &idx1, &t2, &idx2);
    let common = u1.labels().iter().filter(|&&l| u2.leaf_of_label(l).is_some()).count();
    let (size, counters) = mast_size(&u1, &u2, &Config::default());

    let mut report = RunReport {
        size,
        n_leaves_1: u1.n_leaves(),
        n_leaves_2: u2.n_leaves(),
        common_labels: common,
        counters,
        witness: None,
        witness_valid: None,
        oracle_size: None,
        oracle_agrees: None,
    };
    if a.witness || a.verify {
        let labels = mast_leafset(&u1, &u2);
        if a.verify {
            report.witness_valid =
                Some(labels.len() as u64 == size && check_agreement(&u1, &u2, &labels));
        }
        report.witness = Some(labels.iter().map(|&l| union.name(l).to_string()).collect());
    }
    if a.oracle {
        let want = rr_bruteforce(&u1, &u2);
        report.oracle_size = Some(want);
        report.oracle_agrees = Some(want == size);
    }
    let ok = report.witness_valid.unwrap_or(true) && report.oracle_agrees.unwrap_or(true);

    let text = if a.json {
        let mut s = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        s.push('\n');
        s
    } else {
        let mut s = format!("mast {size}\n");
        if let Some(w) = &report.witness {
            let _ = writeln!(s, "witness {}", w.join(","));
        }
        if let Some(v) = report.witness_valid {
            let _ = writeln!(s, "witness_valid {v}");
        }
        if let Some(o) = report.oracle_size {
            let _ = writeln!(s, "oracle {o}");
        }
        s
    };
    emit(&a.out, &text)?;
    Ok(ok)
}

/// Leaf names sorted the same way label ids are: zero padded decimals.
fn numeric_index(n: usize) -> LabelIndex {
    let width = n.saturating_sub(1).to_string().len();
    LabelIndex::from_names((0..n).map(|i| format!("t{i:0width$}")).collect())
}

fn cmd_gen(a: GenArgs) -> Result<(), String> {
    if a.n < 2 {
        return Err("need at least 2 leaves".into());
    }
    let t = match a.shape {
        Shape::Random => random_tree(a.n, a.d.max(2), a.seed),
        Shape::Caterpillar => caterpillar(a.n),
        Shape::Star => star(a.n),
    };
    let idx = numeric_index(a.n);
    emit(&a.out, &format!("{}\n", to_newick(&t, &idx)))
}

fn cmd_lcs(a: LcsArgs) -> Result<(), String> {
    let split = |s: &str| -> Vec<String> {
        s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
    };
    let w1 = split(&a.seq1);
    let w2 = split(&a.seq2);
    let mut alphabet: Vec<String> = w1.iter().chain(&w2).cloned().collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    let encode = |w: &[String]| -> Result<Vec<usize>, String> {
        let ids: Vec<usize> =
            w.iter().map(|x| alphabet.binary_search(x).expect("symbol in alphabet")).collect();
        let mut seen = ids.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != ids.len() {
            return Err("sequences must not repeat symbols".into());
        }
        Ok(ids)
    };
    let s1 = encode(&w1)?;
    let s2 = encode(&w2)?;
    let m = alphabet.len();
    let t1 = lcs_caterpillar(&s1, m);
    let t2 = lcs_caterpillar(&s2, m);
    // label l < m is symbol l; labels m, m+1 are the shared sentinels
    let mut names: Vec<String> = alphabet.clone();
    let pad = |x: &str| format!("zz_{x}"); // sort after real symbols
    names.push(pad("s1"));
    names.push(pad("s2"));
    debug_assert!(names.windows(2).all(|w| w[0] < w[1]) || {
        let mut s = names.clone();
        s.sort_unstable();
        s == names
    });
    let idx = LabelIndex::from_names(names.clone());
    if idx.names() != names.as_slice() {
        return Err("symbol names must sort before the zz_ sentinels".into());
    }
    let lcs = lcs_dp(&s1, &s2);
    let text = format!(
        "{}\n{}\n# lcs {} mast {}\n",
        to_newick(&t1, &idx),
        to_newick(&t2, &idx),
        lcs,
        lcs + 2
    );
    emit(&a.out, &text)
}

fn cmd_bench(a: BenchArgs) -> Result<(), String> {
    let mut csv = String::from("n,d,seed,micros,mast,pairs_geb,intersecting,rake_rounds\n");
    for &n in &a.n {
        for seed in 0..a.seeds {
            let t1 = random_tree(n, a.d, 2 * seed + 1);
            let t2 = random_tree(n, a.d, 2 * seed + 2);
            let start = Instant::now();
            let (size, c) = mast_size(&t1, &t2, &Config::default());
            let micros = start.elapsed().as_micros();
            let _ = writeln!(
                csv,
                "{n},{},{seed},{micros},{size},{},{},{}",
                a.d, c.pairs_geb, c.intersecting, c.rake_rounds
            );
        }
    }
    emit(&a.out, &csv)
}
