use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ybs_cli::report::{analyze, flag_lines, DEFAULT_MAX_GROUP};
use ybs_cli::{export_dot, parse_ybs, write_ybs};
use ybs_core::construct::{self, LinearParams, StuActions};
use ybs_core::enumerate::{census, census_tsv, enumerate_square_free, min_order_scan};
use ybs_core::perm::Permutation;
use ybs_core::retract::{mpl, retract};
use ybs_core::{classify, EnumerateOptions, QuadraticSet};

const EXIT_NEGATIVE: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "ybs", version, about = "Square-free set-theoretic solutions of the Yang-Baxter equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print property flags; exit 0 for a square-free solution, 2 otherwise
    Verify { file: String },
    /// Full report: flags, orbits, mpl, group order and solvable lengths
    Analyze {
        file: String,
        /// Largest group whose elements are listed (abelian invariants)
        #[arg(long, default_value_t = DEFAULT_MAX_GROUP)]
        max_group: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write the k-th retraction
    Retract {
        file: String,
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Build a solution from one of the families
    Construct {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, default_value = "-", global = true)]
        output: String,
    },
    /// Exhaustive list of square-free solutions of order n
    Enumerate {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        up_to_iso: bool,
        /// Keep only solutions of this multipermutation level
        #[arg(long)]
        mpl: Option<usize>,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        shards: Option<usize>,
        /// Permit n = 8
        #[arg(long)]
        allow_8: bool,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Least order with a solution of the given mpl
    Minorder {
        #[arg(long)]
        mpl: usize,
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        shards: Option<usize>,
    },
    /// Tab-separated counts per order; exit 3 if an irretractable solution turns up
    Census {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        shards: Option<usize>,
    },
    /// Graphviz export of the action graph
    Graph {
        file: String,
        #[arg(long)]
        loops: bool,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Trivial solution on n points
    Trivial { n: usize },
    /// The family X_m with mpl m on 2^(m-1)+1 points
    Gi { m: usize },
    /// The doubling family
    Easy { m: usize },
    /// Canonical doubling of a solution
    Double { file: String },
    /// Wreath product X0 ≀ Y
    Wreath { x0: String, y: String },
    /// Extension by an automorphism, given in cycle notation
    ExtendTau { file: String, tau: String },
    /// mpl-2 solution whose group has the given cyclic orders
    AbelianMpl2 {
        #[arg(required = true, num_args = 1..)]
        orders: Vec<u64>,
    },
    /// (Z/N)^k with left actions a ↦ ωx + (1 − ω)a
    Linear {
        modulus: u64,
        omega: u64,
        #[arg(default_value_t = 1)]
        rank: usize,
    },
    /// Union A ∪ B with cross actions; missing actions are trivial
    Stu {
        a: String,
        b: String,
        /// Action of each element of A on B, in cycle notation over B's labels
        #[arg(long, num_args = 1..)]
        a_on_b: Vec<String>,
        /// Action of each element of B on A, in cycle notation over A's labels
        #[arg(long, num_args = 1..)]
        b_on_a: Vec<String>,
    },
    /// Built-in examples
    Example { name: ExampleName },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Gap12,
    Jump26,
    Three,
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load(path: &str) -> Result<QuadraticSet> {
    let text = read_input(path)?;
    parse_ybs(&text).with_context(|| format!("parsing {path}"))
}

/// Writes all of `text` at once: stdout for `-`, otherwise a sibling temp file renamed into place.
fn write_output(path: &str, text: &str) -> Result<()> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
        return Ok(());
    }
    let target = Path::new(path);
    let dir = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = target.file_name().with_context(|| format!("{path} is not a file path"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, target).with_context(|| format!("renaming into {path}"))?;
    Ok(())
}

fn parse_perm(text: &str, labels: &[String]) -> Result<Permutation> {
    Permutation::parse_cycles_with(text, labels).with_context(|| format!("bad permutation `{text}`"))
}

fn actions(given: &[String], count: usize, labels: &[String], what: &str) -> Result<Vec<Permutation>> {
    if given.is_empty() {
        return Ok(vec![Permutation::identity(labels.len()); count]);
    }
    if given.len() != count {
        bail!("{what}: expected {count} permutations, got {}", given.len());
    }
    given.iter().map(|t| parse_perm(t, labels)).collect()
}

fn build(family: &Family) -> Result<(QuadraticSet, bool)> {
    let q = match family {
        Family::Trivial { n } => construct::trivial_solution(*n)?,
        Family::Gi { m } => construct::gi_x(*m)?,
        Family::Easy { m } => construct::easy_family(*m)?,
        Family::Double { file } => construct::canonical_doubling(&load(file)?)?,
        Family::Wreath { x0, y } => construct::wreath_product(&load(x0)?, &load(y)?)?,
        Family::ExtendTau { file, tau } => {
            let q = load(file)?;
            let tau = parse_perm(tau, &q.labels())?;
            construct::extend_by_automorphism(&q, &tau)?
        }
        Family::AbelianMpl2 { orders } => construct::abelian_mpl2(orders)?,
        Family::Linear { modulus, omega, rank } => construct::linear_solution(LinearParams::new(*modulus, *omega, *rank)?)?,
        Family::Stu { a, b, a_on_b, b_on_a } => {
            let (qa, qb) = (load(a)?, load(b)?);
            let acts = StuActions {
                a_on_b: actions(a_on_b, qa.n(), &qb.labels(), "--a-on-b")?,
                b_on_a: actions(b_on_a, qb.n(), &qa.labels(), "--b-on-a")?,
            };
            let u = construct::stu_union(&qa, &qb, &acts)?;
            return Ok((u.set, u.is_solution));
        }
        Family::Example { name } => match name {
            ExampleName::Gap12 => construct::gap_example(),
            ExampleName::Jump26 => construct::jump_example(),
            ExampleName::Three => construct::three_element(),
        },
    };
    Ok((q, true))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { file } => {
            let q = load(&file)?;
            let flags = classify(&q);
            let ok = flags.is_square_free_solution();
            let mut text = format!("square-free solution: {}\n", if ok { "yes" } else { "no" });
            text.push_str(&flag_lines(&flags, &q.labels()));
            write_output("-", &text)?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NEGATIVE) });
        }
        Command::Analyze { file, max_group, json } => {
            let report = analyze(&load(&file)?, max_group);
            let problems = report.inconsistencies();
            if !problems.is_empty() {
                bail!("internal inconsistency in report: {}", problems.join("; "));
            }
            write_output("-", &if json { report.to_json() + "\n" } else { report.to_text() })?;
        }
        Command::Retract { file, k, output } => {
            let mut q = load(&file)?;
            for _ in 0..k {
                q = retract(&q)?.quotient;
            }
            write_output(&output, &write_ybs(&q))?;
        }
        Command::Construct { family, output } => {
            let (q, is_solution) = build(&family)?;
            write_output(&output, &write_ybs(&q))?;
            if !is_solution {
                eprintln!("warning: the assembled set is not a solution (braid relation fails)");
                return Ok(ExitCode::from(EXIT_NEGATIVE));
            }
        }
        Command::Enumerate { n, up_to_iso, mpl: level, count_only, shards, allow_8, output } => {
            let opts = EnumerateOptions { shards, allow_8 };
            let mut sets = enumerate_square_free(n, up_to_iso, &opts)?;
            if let Some(m) = level {
                sets.retain(|q| mpl(q).ok().flatten() == Some(m));
            }
            let text = if count_only {
                format!("{}\n", sets.len())
            } else {
                let docs: Vec<String> = sets
                    .iter()
                    .enumerate()
                    .map(|(i, q)| format!("# solution {} of {}\n{}", i + 1, sets.len(), write_ybs(q)))
                    .collect();
                docs.join("\n")
            };
            write_output(&output, &text)?;
        }
        Command::Minorder { mpl: target, max_n, shards } => {
            let found = min_order_scan(target, max_n, &EnumerateOptions { shards, allow_8: false })?;
            write_output("-", &found.map_or("none\n".to_string(), |n| format!("{n}\n")))?;
        }
        Command::Census { max_n, shards } => {
            let rows = census(max_n, &EnumerateOptions { shards, allow_8: false })?;
            write_output("-", &census_tsv(&rows))?;
            let bad: Vec<_> = rows.iter().filter(|r| r.irretractable > 0).collect();
            if !bad.is_empty() {
                for r in &bad {
                    eprintln!("IRRETRACTABLE square-free solutions at n = {}: {}", r.n, r.irretractable);
                    for left in &r.irretractable_examples {
                        let rows: Vec<String> = left.chunks(r.n).map(|row| format!("{row:?}")).collect();
                        eprintln!("  left rows (0-based): {}", rows.join(" "));
                    }
                }
                return Ok(ExitCode::from(EXIT_COUNTEREXAMPLE));
            }
        }
        Command::Graph { file, loops, output } => {
            let dot = export_dot(&load(&file)?, loops)?;
            write_output(&output, &dot)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
