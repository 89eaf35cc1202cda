//! The `gpd` command-line tool.
//!
//! Exit codes: 0 success, 1 a cross-validation relation failed, 2 parse or
//! validation error, 3 the `Con` enumeration cap was hit.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use gpd_core::betti::{betti_corner, betti_gpd, betti_gpd_int, betti_koszul};
use gpd_core::complexes::homology_module;
use gpd_core::gridmod::{random_module, RandomKind};
use gpd_core::{Error, Field, Grid, GridModule};

use crate::check::{run_checks, CheckError};
use crate::engine::{diagram_par, rank_invariant_par, Families};
use crate::format::{parse_bifiltration, parse_module, print_module};
use crate::json::{barcode_json, betti_json, diagram_json, rank_json, to_text, DiagramJson};
use crate::svg;

#[derive(Parser, Debug)]
#[command(
    name = "gpd",
    version,
    about = "Generalized persistence diagrams and bigraded Betti numbers of grid modules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    Int,
    Con,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Koszul,
    Gpd,
    GpdInt,
    Corner,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    IntervalSum,
    Presentation,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generalized rank invariant over intervals or connected regions.
    Rank {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, value_enum, default_value = "int")]
        family: FamilyArg,
        /// Enumerate connected regions even above the size cap.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generalized persistence diagram.
    Dgm {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, value_enum, default_value = "int")]
        family: FamilyArg,
        /// Write zero entries too.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bigraded Betti numbers.
    Betti {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, value_enum, default_value = "koszul")]
        method: Method,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree-k homology module of a bifiltration.
    Homology {
        #[arg(long)]
        bif: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every cross-validation on a module.
    Check {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Seeded random module.
    Random {
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        grid: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Barcode sidecar for interval sums; defaults to `<out>.barcode.json`.
        #[arg(long)]
        barcode: Option<PathBuf>,
    },
    /// SVG picture of an Int diagram.
    Plot {
        #[arg(long)]
        dgm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Relation(String),
    Input(String),
    Cap(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Relation(_) => 1,
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Relation(m) | CliError::Input(m) | CliError::Cap(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ConCapExceeded { .. } => CliError::Cap(format!("{e}; pass --force to enumerate anyway")),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_module(path: &Path) -> Result<GridModule, CliError> {
    parse_module(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory, or to stdout.
fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn family(
    families: &Families,
    grid: Grid,
    which: FamilyArg,
    force: bool,
) -> Result<std::sync::Arc<gpd_core::posets::RegionFamily>, CliError> {
    Ok(match which {
        FamilyArg::Int => families.int(grid),
        FamilyArg::Con => families.con(grid, force)?,
    })
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let families = Families::new();
    match cli.command {
        Command::Rank {
            module,
            family: which,
            force,
            out,
        } => {
            let m = load_module(&module)?;
            let f = family(&families, m.grid(), which, force)?;
            let rk = rank_invariant_par(&m, f)?;
            write_output(out.as_deref(), &to_text(&rank_json(&rk)))
        }
        Command::Dgm {
            module,
            family: which,
            all,
            force,
            out,
        } => {
            let m = load_module(&module)?;
            let f = family(&families, m.grid(), which, force)?;
            let (_, d) = diagram_par(&m, f)?;
            write_output(out.as_deref(), &to_text(&diagram_json(&d, all)))
        }
        Command::Betti {
            module,
            method,
            force,
            out,
        } => {
            let m = load_module(&module)?;
            let table = match method {
                Method::Koszul => betti_koszul(&m),
                Method::Gpd => betti_gpd(&diagram_par(&m, families.con(m.grid(), force)?)?.1)?,
                Method::GpdInt => betti_gpd_int(&diagram_par(&m, families.int(m.grid()))?.1)?,
                Method::Corner => betti_corner(&diagram_par(&m, families.int(m.grid()))?.1)?,
            };
            write_output(out.as_deref(), &to_text(&betti_json(&table)))
        }
        Command::Homology {
            bif,
            degree,
            field,
            out,
        } => {
            let text = read(&bif)?;
            let b = parse_bifiltration(&text).map_err(|e| CliError::Input(format!("{}: {e}", bif.display())))?;
            if let Some(v) = b.validate().first() {
                return Err(CliError::Input(format!("{}: invalid bifiltration: {v}", bif.display())));
            }
            let field = Field::new(field)?;
            let m = homology_module(&b, degree, field)?;
            write_output(out.as_deref(), &print_module(&m))
        }
        Command::Check { module, force } => {
            let m = load_module(&module)?;
            match run_checks(&m, &families, force) {
                Ok(report) => {
                    println!("ok: {}", report.passed.join(", "));
                    if !report.con_checked {
                        println!("note: Con checks skipped (grid above the enumeration cap)");
                    }
                    Ok(())
                }
                Err(CheckError::Failed(f)) => Err(CliError::Relation(f.to_string())),
                Err(CheckError::Core(e)) => Err(e.into()),
            }
        }
        Command::Random {
            grid,
            seed,
            kind,
            field,
            out,
            barcode,
        } => {
            let grid = Grid::new(grid[0], grid[1]);
            let field = Field::new(field)?;
            let kind = match kind {
                KindArg::IntervalSum => RandomKind::IntervalSum,
                KindArg::Presentation => RandomKind::Presentation,
            };
            let (m, code) = random_module(seed, grid, field, kind);
            write_output(out.as_deref(), &print_module(&m))?;
            if let Some(code) = code {
                let sidecar = barcode.or_else(|| {
                    out.as_ref().map(|o| {
                        let mut s = o.clone().into_os_string();
                        s.push(".barcode.json");
                        PathBuf::from(s)
                    })
                });
                if let Some(path) = sidecar {
                    write_output(Some(&path), &to_text(&barcode_json(grid, &code)))?;
                }
            }
            Ok(())
        }
        Command::Plot { dgm, out } => {
            let text = read(&dgm)?;
            let doc: DiagramJson =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", dgm.display())))?;
            if doc.poset != "int" {
                return Err(CliError::Input(format!(
                    "{}: plot needs an int diagram (corner types are defined on intervals), got `{}`",
                    dgm.display(),
                    doc.poset
                )));
            }
            let grid = Grid::new(doc.grid[0], doc.grid[1]);
            let entries = doc
                .entries
                .iter()
                .map(|e| {
                    let i = e.region.to_interval().map_err(CliError::Input)?;
                    i.check_grid(grid)?;
                    Ok((i, e.value))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            write_output(out.as_deref(), &svg::render(grid, &entries))
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gpd: {}", e.message());
            e.code()
        }
    }
}
