use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use tv_core::arcs::arc_constraints;
use tv_core::engine::resolve;
use tv_core::fpt::nice_decomposition;
use tv_core::treewidth::greedy_fill_in;
use tv_core::tvcore::budget_from_env;
use tv_core::{compute, Engine, ExactField, Triangulation};

#[derive(Parser)]
#[command(name = "tv", version, about = "Turaev–Viro invariants of closed 3-manifold triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate TV_{r,q} exactly.
    Compute {
        file: PathBuf,
        #[arg(long)]
        r: i64,
        #[arg(long, default_value_t = 1)]
        q: i64,
        #[arg(long, default_value = "auto")]
        engine: Engine,
    },
    /// Check closedness, connectivity, orientability and the Euler characteristic.
    Validate { file: PathBuf },
    /// Print the GreedyFillIn width and the nice tree decomposition.
    Treewidth { file: PathBuf },
    /// Normal-arc polytope export.
    Arcs {
        #[command(subcommand)]
        command: ArcsCommand,
    },
    /// Time engines over every `.tri` file in a directory and write CSV.
    Bench {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        q: i64,
        #[arg(long, value_delimiter = ',', default_value = "backtrack,fpt")]
        engines: Vec<Engine>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ArcsCommand {
    Export {
        file: PathBuf,
        #[arg(long)]
        r: usize,
        /// Leave out the upper bounds and print the cone.
        #[arg(long)]
        cone: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(file: &Path) -> Result<Triangulation> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    text.parse().with_context(|| format!("parsing {}", file.display()))
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run_compute(file: &Path, r: i64, q: i64, engine: Engine) -> Result<ExitCode> {
    let field = match ExactField::new(r, q) {
        Ok(f) => f,
        Err(e) => return Ok(usage_error(e)),
    };
    if engine == Engine::HomologyR3 && r != 3 {
        return Ok(usage_error("engine homology-r3 needs --r 3"));
    }
    let tri = read(file)?;
    let out = compute(&tri, &field, engine, budget_from_env())?;
    let (re, im) = out.value.approx_complex();
    println!("{}", out.value.serialize());
    println!("value {}", out.value);
    println!("approx {re:.12}");
    println!("imag {im:.3e}");
    println!("engine {}", out.engine);
    Ok(ExitCode::SUCCESS)
}

fn run_validate(file: &Path) -> Result<ExitCode> {
    let report = read(file)?.validate();
    print!("{report}");
    println!("{}", if report.is_valid() { "valid" } else { "invalid" });
    Ok(if report.is_valid() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_treewidth(file: &Path) -> Result<ExitCode> {
    let tri = read(file)?;
    tri.require_closed()?;
    let td = greedy_fill_in(&tri.dual_graph());
    println!("heuristic width {} ({} bags)", td.width(), td.len());
    print!("{}", nice_decomposition(&tri).to_text());
    Ok(ExitCode::SUCCESS)
}

fn run_arcs_export(file: &Path, r: usize, cone: bool, out: Option<&Path>) -> Result<ExitCode> {
    if r < 3 {
        return Ok(usage_error("--r must be at least 3"));
    }
    let tri = read(file)?;
    let text = arc_constraints(&tri, (!cone).then_some(r))?.to_text();
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

struct Fixture {
    name: String,
    tri: Triangulation,
    edges: usize,
    width: usize,
}

fn load_fixtures(dir: &Path) -> Result<Vec<Fixture>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tri"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .tri files in {}", dir.display());
    }
    let mut out = Vec::new();
    for p in paths {
        let name = p.file_stem().unwrap().to_string_lossy().into_owned();
        let tri = match read(&p).and_then(|t| t.require_closed().map(|_| t).map_err(Into::into)) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("skipping {name}: {e:#}");
                continue;
            }
        };
        let edges = tri.skeleton().num_edges();
        let width = greedy_fill_in(&tri.dual_graph()).width();
        out.push(Fixture { name, tri, edges, width });
    }
    Ok(out)
}

fn run_bench(dir: &Path, rs: &[i64], q: i64, engines: &[Engine], out: &Path) -> Result<ExitCode> {
    let fixtures = load_fixtures(dir)?;
    let budget = budget_from_env();
    let mut csv = String::from("name,n,edges,width,r,q,engine,ms,stat,digest,approx\n");
    let mut disagreements = 0;
    for fx in &fixtures {
        for &r in rs {
            let field = match ExactField::new(r, q) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("{} r={r} q={q}: {e}", fx.name);
                    continue;
                }
            };
            let mut digests = Vec::new();
            for &engine in engines {
                let used = resolve(&fx.tri, r, engine);
                let start = Instant::now();
                let result = compute(&fx.tri, &field, engine, budget);
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let prefix = format!("{},{},{},{},{r},{q},{used}", fx.name, fx.tri.size(), fx.edges, fx.width);
                match result {
                    Ok(c) => {
                        let digest = hex::encode(Sha256::digest(c.value.serialize().as_bytes()));
                        let approx = c.value.approx_complex().0;
                        csv.push_str(&format!("{prefix},{ms:.3},{},{digest},{approx:.12}\n", c.stat));
                        digests.push((used, digest));
                    }
                    Err(e) => {
                        eprintln!("{} r={r} q={q} {used}: {e}", fx.name);
                        csv.push_str(&format!("{prefix},{ms:.3},error,,\n"));
                    }
                }
            }
            if digests.windows(2).all(|w| w[0].1 == w[1].1) {
                if digests.len() > 1 {
                    eprintln!("{} r={r} q={q}: {} engines agree", fx.name, digests.len());
                }
            } else {
                disagreements += 1;
                let list: Vec<String> = digests.iter().map(|(e, d)| format!("{e}={}", &d[..12])).collect();
                eprintln!("{} r={r} q={q}: DIGEST MISMATCH {}", fx.name, list.join(" "));
            }
        }
    }
    let mut file = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    file.write_all(csv.as_bytes())?;
    if disagreements > 0 {
        eprintln!("{disagreements} cells with disagreeing engines");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute { file, r, q, engine } => run_compute(file, *r, *q, *engine),
        Command::Validate { file } => run_validate(file),
        Command::Treewidth { file } => run_treewidth(file),
        Command::Arcs { command: ArcsCommand::Export { file, r, cone, out } } => {
            run_arcs_export(file, *r, *cone, out.as_deref())
        }
        Command::Bench { dir, r, q, engines, out } => run_bench(dir, r, *q, engines, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
