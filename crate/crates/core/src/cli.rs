//! The `packinglab` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::arithmetic::{vinberg_test, VinbergVerdict, DEFAULT_MAX_CYCLE};
use crate::coxeter::{gram_from_diagram, CoxeterDiagram, GramMatrix};
use crate::error::{Error, Result};
use crate::exactnum::QuadExt;
use crate::fixtures;
use crate::geometrize::{geometrize, PipelineOptions, TargetSpec};
use crate::localglobal::{bends_generators, missing_bends, residue_orbit};
use crate::orbit::{bends_list, certify_integral, generate, OrbitConfig, Packing, WallSystem, DEFAULT_FRONTIER_CAP};
use crate::render::{render_svg, Viewport};
use crate::structure::enumerate_decompositions;

#[derive(Debug, Parser)]
#[command(name = "packinglab", version, about = "Exact tools for crystallographic sphere packings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Gram matrix of a Coxeter diagram.
    Parse { file: PathBuf },
    /// List every cluster/cocluster decomposition.
    Decompose { file: PathBuf },
    /// Enumerate a packing up to a bend bound.
    Orbit(OrbitArgs),
    /// Check that every bend in a packing is an integer.
    Certify { packing: PathBuf },
    /// Search for a cyclic product of 2G that is not an integer.
    Arith {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_CYCLE)]
        max_len: usize,
    },
    /// Solve for walls meeting a target spec and recover them exactly.
    Geometrize(GeometrizeArgs),
    /// Draw a planar packing as SVG.
    Render(RenderArgs),
    /// Bend residues mod m and admissible bends missing below a bound.
    LgScan {
        packing: PathBuf,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long)]
        bound: BigInt,
    },
    /// List or export the bundled fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Debug, Args)]
struct OrbitArgs {
    system: PathBuf,
    #[arg(long)]
    bound: QuadExt,
    #[arg(long, default_value_t = 256)]
    max_word: usize,
    /// Also reflect in the packing spheres themselves.
    #[arg(long = "super")]
    superpacking: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
    frontier_cap: usize,
    #[arg(long, default_value = "packing.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GeometrizeArgs {
    target: PathBuf,
    /// Discriminant of the quadratic field for recovered coordinates.
    #[arg(long, default_value_t = 0)]
    d: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 64)]
    denom: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    attempts: u64,
    /// Write the system here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    packing: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    labels: bool,
    #[arg(long, default_value_t = 800)]
    size: u32,
    #[arg(long, default_value_t = 0.5)]
    min_radius: f64,
    /// Viewport center as `x,y`; fitted to the packing when omitted.
    #[arg(long, value_parser = parse_point, requires = "half_width")]
    center: Option<[f64; 2]>,
    #[arg(long, requires = "center")]
    half_width: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum FixtureAction {
    List,
    /// Print one fixture.
    Show { name: String },
    /// Write fixtures (all when none are named) into a directory.
    Export {
        names: Vec<String>,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

fn parse_point(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [x, y] => Ok([x.trim().parse().map_err(|_| "bad x")?, y.trim().parse().map_err(|_| "bad y")?]),
        _ => Err("expected x,y".into()),
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 on a domain error (reported as JSON on `err`), 2 on bad usage.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let report = json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(err, "{report}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// A Gram matrix from a `.cox` diagram, a Gram JSON file or a system file.
fn load_gram(path: &Path) -> Result<GramMatrix> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "cox") {
        return gram_from_diagram(&CoxeterDiagram::parse(&text)?);
    }
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("gram").is_some() {
        GramMatrix::from_json(serde_json::from_value(value)?)
    } else {
        WallSystem::from_json(serde_json::from_value(value)?)?.gram()
    }
}

fn load_packing(path: &Path) -> Result<(Packing, Option<WallSystem>)> {
    Packing::from_json(serde_json::from_str(&read(path)?)?)
}

#[derive(Serialize)]
struct ArithReport {
    verdict: &'static str,
    /// 1-based wall indices.
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_len: Option<usize>,
}

fn braces(idx: &[usize]) -> String {
    let inner: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Parse { file } => {
            let d = CoxeterDiagram::parse(&read(&file)?)?;
            emit(out, &gram_from_diagram(&d)?.to_json())
        }
        Command::Decompose { file } => {
            let all = enumerate_decompositions(&load_gram(&file)?)?;
            if all.is_empty() {
                writeln!(out, "no decomposition found for this presentation")?;
            }
            for d in all {
                writeln!(out, "C={} Chat={}", braces(&d.cluster), braces(&d.cocluster))?;
            }
            Ok(())
        }
        Command::Orbit(a) => {
            let ws = WallSystem::parse(&read(&a.system)?)?;
            let cfg = OrbitConfig { bound: a.bound, max_word: a.max_word, frontier_cap: a.frontier_cap, jobs: a.jobs.max(1) };
            let p = generate(&ws, &cfg, a.superpacking)?;
            write_file(&a.out, &serde_json::to_string_pretty(&p.to_json(Some(&ws)))?)?;
            let bends: Vec<String> = bends_list(&p).iter().map(QuadExt::to_string).collect();
            writeln!(out, "spheres {}", p.len())?;
            writeln!(out, "saturated {}", p.saturated)?;
            writeln!(out, "bends {}", bends.join(" "))?;
            Ok(())
        }
        Command::Certify { packing } => emit(out, &certify_integral(&load_packing(&packing)?.0)),
        Command::Arith { file, max_len } => {
            let verdict = vinberg_test(&load_gram(&file)?, max_len)?;
            let report = match verdict {
                VinbergVerdict::NonArithmetic { cycle, product } => ArithReport {
                    verdict: "NonArithmetic",
                    cycle: Some(cycle.iter().map(|i| i + 1).collect()),
                    product: Some(product.to_string()),
                    max_len: None,
                },
                VinbergVerdict::PassesUpTo { max_len } => {
                    ArithReport { verdict: "PassesUpTo", cycle: None, product: None, max_len: Some(max_len) }
                }
            };
            emit(out, &report)
        }
        Command::Geometrize(a) => {
            let t = TargetSpec::parse(&read(&a.target)?)?;
            let mut opts = PipelineOptions { d: a.d, denom_bound: a.denom, seed: a.seed, attempts: a.attempts, ..Default::default() };
            opts.solver.tol = a.tol;
            let r = geometrize(&t, &opts)?;
            let text = r.system.to_string_pretty();
            match a.out {
                Some(path) => write_file(&path, &(text + "\n")),
                None => Ok(writeln!(out, "{text}")?),
            }
        }
        Command::Render(a) => {
            if a.size == 0 {
                return Err(Error::Format("size must be positive".into()));
            }
            let (p, _) = load_packing(&a.packing)?;
            let vp = match (a.center, a.half_width) {
                (Some(c), Some(w)) => Viewport::new(c, w, a.size, a.min_radius)?,
                _ => Viewport { min_radius_px: a.min_radius, ..Viewport::fit(&p, a.size) },
            };
            let svg = render_svg(&p, &vp, a.labels)?;
            match a.out {
                Some(path) => write_file(&path, &svg),
                None => Ok(out.write_all(svg.as_bytes())?),
            }
        }
        Command::LgScan { packing, modulus, bound } => {
            let (p, ws) = load_packing(&packing)?;
            let ws = ws.ok_or_else(|| Error::Format("packing file carries no wall system".into()))?;
            let cluster_bends: Vec<QuadExt> = ws.cluster_walls().iter().map(|w| w.bend().clone()).collect();
            let ro = residue_orbit(&bends_generators(&ws)?, &cluster_bends, modulus)?;
            let bends: Vec<BigInt> = bends_list(&p)
                .iter()
                .map(|b| b.to_integer().ok_or_else(|| Error::NonIntegralInput(format!("bend {b}"))))
                .collect::<Result<_>>()?;
            let inadmissible: Vec<String> = bends.iter().filter(|b| !ro.admits(b)).map(BigInt::to_string).collect();
            let missing: Vec<String> = missing_bends(&bends, &ro, &bound).iter().map(BigInt::to_string).collect();
            emit(
                out,
                &json!({
                    "modulus": ro.modulus,
                    "residues": ro.residues,
                    "states": ro.states,
                    "inadmissible": inadmissible,
                    "missing": missing,
                }),
            )
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => {
                for f in fixtures::ALL {
                    writeln!(out, "{}\t{}\t{}", f.name, f.file, f.description)?;
                }
                Ok(())
            }
            FixtureAction::Show { name } => Ok(out.write_all(fixtures::get(&name)?.contents.as_bytes())?),
            FixtureAction::Export { names, dir } => {
                let chosen: Vec<&fixtures::Fixture> = if names.is_empty() {
                    fixtures::ALL.iter().collect()
                } else {
                    names.iter().map(|n| fixtures::get(n)).collect::<Result<_>>()?
                };
                fs::create_dir_all(&dir)?;
                for f in chosen {
                    write_file(&dir.join(f.file), f.contents)?;
                    writeln!(out, "{}", dir.join(f.file).display())?;
                }
                Ok(())
            }
        },
    }
}
