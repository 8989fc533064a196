//! `unicrit`: experiment drivers and exporters.
//!
//! Every flag can also be set through an environment variable named
//! `UNICRIT_<FLAG>` (for example `UNICRIT_GRID=512x512`).
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 solver
//! failure, 3 negative margin under `--strict`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unicrit_core::dynamics::{GreenField, GreenKind};
use unicrit_core::experiments::{self, ExperimentConfig, Report};
use unicrit_core::measures::{parse_complex, SphereGrid, TestFunction, BUILTIN_FAMILY};
use unicrit_core::rootfind::superattracting_parameters;
use unicrit_core::Error;

#[derive(Parser, Debug)]
#[command(name = "unicrit", version, about = "Equidistribution diagnostics for z^d + λ")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Degree d ≥ 2.
    #[arg(short = 'd', long = "degree", global = true, default_value_t = 2, env = "UNICRIT_D")]
    d: u32,
    /// Quadrature grid, `N_UxN_THETA`.
    #[arg(long, global = true, default_value = "1024x1024", value_parser = parse_grid, env = "UNICRIT_GRID")]
    grid: SphereGrid,
    #[arg(long, global = true, default_value_t = 1, env = "UNICRIT_SEED")]
    seed: u64,
    /// Multiplier applied to the sampled lower estimate of C_Bf.
    #[arg(long, global = true, default_value_t = 1.5, env = "UNICRIT_SAFETY")]
    safety: f64,
    /// Output format; csv for tables, pgm for greenfield when absent.
    #[arg(long, global = true, value_enum, env = "UNICRIT_FORMAT")]
    format: Option<Format>,
    /// Output file; standard output when absent (except for greenfield PGM).
    #[arg(long, global = true, env = "UNICRIT_OUT")]
    out: Option<PathBuf>,
    /// Exit with code 3 when any margin is negative.
    #[arg(long, global = true, env = "UNICRIT_STRICT")]
    strict: bool,
    /// Escape-time iteration budget.
    #[arg(long, global = true, default_value_t = unicrit_core::dynamics::DEFAULT_ITERATIONS, env = "UNICRIT_ITERATIONS")]
    iterations: usize,
    /// Boundary samples used for the C_Bf estimate.
    #[arg(long, global = true, default_value_t = 1000, env = "UNICRIT_CBF_SAMPLES")]
    cbf_samples: usize,
    /// Sphere nodes scanned per boundary sample in the C_Bf estimate.
    #[arg(long, global = true, default_value_t = 2048, env = "UNICRIT_CBF_NODES")]
    cbf_nodes: usize,
    /// Largest polynomial degree handed to the root finders.
    #[arg(long, global = true, default_value_t = 8192, env = "UNICRIT_ROOT_CAP")]
    root_cap: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pgm,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// g of the connectedness locus
    Param,
    /// h = g + log[·,∞]
    H,
    /// dynamical Green function of f_λ
    Dynamical,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Roots of F_n (centers of period-n hyperbolic components).
    Centers {
        #[arg(short = 'n', long, default_value_t = 3, env = "UNICRIT_N")]
        n: u32,
    },
    /// Discrepancy of the critical-orbit divisors against the bifurcation measure.
    Theorem1 {
        /// Largest period.
        #[arg(short = 'n', long, default_value_t = 10, env = "UNICRIT_N")]
        n: u32,
        /// Test functions, comma separated; defaults to the built-in family.
        #[arg(long, env = "UNICRIT_PHI")]
        phi: Option<String>,
    },
    /// Discrepancy of multiplier divisors and their circle averages.
    Theorem2 {
        /// Largest period; periods 2..=n are used unless `--periods` is given.
        #[arg(short = 'n', long, default_value_t = 6, env = "UNICRIT_N")]
        n: u32,
        #[arg(long, value_delimiter = ',', env = "UNICRIT_PERIODS")]
        periods: Vec<u32>,
        /// Circle radii for the averaged divisors.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1", env = "UNICRIT_RADII")]
        radii: Vec<f64>,
        /// Test functions, comma separated; defaults to the built-in family.
        #[arg(long, env = "UNICRIT_PHI")]
        phi: Option<String>,
    },
    /// C_Bf, C_0, C_0*, the H_1 inradius and the t_n, t_n* tables as JSON.
    Constants {
        /// Length of the t_n tables.
        #[arg(short = 'n', long, default_value_t = 10, env = "UNICRIT_N")]
        n: u32,
    },
    /// Samples a Green function on the grid (PGM plus JSON sidecar, or CSV).
    Greenfield {
        #[arg(long, value_enum, default_value_t = Kind::Param, env = "UNICRIT_KIND")]
        kind: Kind,
        /// Parameter for `--kind dynamical`, e.g. `-1` or `-0.12+0.74i`.
        #[arg(long, default_value = "0", env = "UNICRIT_LAMBDA")]
        lambda: String,
    },
}

fn parse_grid(s: &str) -> Result<SphereGrid, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid `{s}` is not of the form NxM"))?;
    let n_u = a.trim().parse::<usize>().map_err(|e| format!("grid rows: {e}"))?;
    let n_theta = b.trim().parse::<usize>().map_err(|e| format!("grid columns: {e}"))?;
    SphereGrid::new(n_u, n_theta).map_err(|e| e.to_string())
}

fn config(c: &Common) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        grid: c.grid,
        seed: c.seed,
        safety: c.safety,
        cbf_samples: c.cbf_samples,
        cbf_sphere_nodes: c.cbf_nodes,
        iterations: c.iterations,
        ..ExperimentConfig::default()
    };
    cfg.aberth.root_cap = c.root_cap;
    cfg.aberth.seed = c.seed;
    cfg
}

/// Splits on commas outside parentheses, so `bump(0,0.5),sz` is two ids.
fn split_ids(list: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in list.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(list[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(list[start..].trim());
    out
}

fn test_functions(ids: Option<&str>) -> Result<Vec<TestFunction>, Error> {
    match ids {
        None => BUILTIN_FAMILY.iter().map(|id| TestFunction::parse(id)).collect(),
        Some(list) => split_ids(list).into_iter().map(TestFunction::parse).collect(),
    }
}

enum Failure {
    Input(String),
    Solver(String),
    Strict(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. }
            | Error::BisectionFailed(_)
            | Error::DegenerateParameter(_)
            | Error::Overflow { .. }
            | Error::NonFiniteNode { .. }
            | Error::NonFiniteStencil { .. } => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_report(report: &Report, c: &Common) -> Result<(), Failure> {
    let mut w = sink(&c.out)?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => writeln!(w, "{}", report.to_json()?)?,
        Format::Csv => report.write_csv(&mut w)?,
        Format::Pgm => return Err(Failure::Input("pgm output is only available for greenfield".into())),
    }
    w.flush()?;

    let failed: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.status.starts_with("FAILED"))
        .collect();
    let negative: Vec<_> = report.negative_rows().collect();
    for r in &negative {
        eprintln!(
            "NEGATIVE MARGIN: d={} n={} phi={} discrepancy={} bound={} margin={}",
            r.d, r.n, r.phi, r.discrepancy, r.bound, r.margin
        );
    }
    if !failed.is_empty() {
        for r in &failed {
            eprintln!("d={} n={} phi={}: {}", r.d, r.n, r.phi, r.status);
        }
        return Err(Failure::Solver(format!("{} rows failed", failed.len())));
    }
    if c.strict && !negative.is_empty() {
        return Err(Failure::Strict(negative.len()));
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let cfg = config(c);
    match &cli.command {
        Command::Centers { n } => {
            let roots = superattracting_parameters(c.d, *n, &cfg.aberth)?;
            let mut w = sink(&c.out)?;
            match c.format.unwrap_or(Format::Csv) {
                Format::Csv => roots.write_csv(&mut w)?,
                Format::Json => writeln!(w, "{}", roots.to_json())?,
                Format::Pgm => return Err(Failure::Input("centers supports csv or json".into())),
            }
            w.flush()?;
            eprintln!(
                "count={} min_separation={:e} max_residual={:e}",
                roots.total_multiplicity(),
                roots.min_separation(),
                roots.max_residual()
            );
        }
        Command::Theorem1 { n, phi } => {
            let phis = test_functions(phi.as_deref())?;
            let report = experiments::theorem1(c.d, *n, &phis, &cfg)?;
            emit_report(&report, c)?;
        }
        Command::Theorem2 { n, periods, radii, phi } => {
            let phis = test_functions(phi.as_deref())?;
            let ns: Vec<u32> = if periods.is_empty() { (2..=*n).collect() } else { periods.clone() };
            let report = experiments::theorem2(c.d, &ns, radii, &phis, &cfg)?;
            emit_report(&report, c)?;
        }
        Command::Constants { n } => {
            let table = experiments::constants_table(c.d, *n, &cfg)?;
            let mut w = sink(&c.out)?;
            let json = serde_json_string(&table)?;
            writeln!(w, "{json}")?;
            w.flush()?;
        }
        Command::Greenfield { kind, lambda } => {
            let kind = match kind {
                Kind::Param => GreenKind::Parameter,
                Kind::H => GreenKind::H,
                Kind::Dynamical => {
                    let l = parse_complex(lambda).ok_or_else(|| Failure::Input(format!("cannot parse `{lambda}`")))?;
                    GreenKind::Dynamical { re: l.re, im: l.im }
                }
            };
            let field = GreenField::compute(c.d, kind, c.grid, c.iterations)?;
            match c.format.unwrap_or(Format::Pgm) {
                Format::Csv => {
                    let mut w = sink(&c.out)?;
                    field.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Pgm | Format::Json => {
                    let out = c.out.clone().unwrap_or_else(|| PathBuf::from("greenfield.pgm"));
                    let mut w = BufWriter::new(File::create(&out)?);
                    let meta = field.write_pgm(&mut w)?;
                    w.flush()?;
                    let side = sidecar_path(&out);
                    std::fs::write(&side, serde_json_string(&meta)?)?;
                    eprintln!("wrote {} and {}", out.display(), side.display());
                }
            }
            eprintln!("sup_abs={}", field.sup_abs());
        }
    }
    Ok(())
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Strict(count)) => {
            eprintln!("{count} rows with negative margin (--strict)");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("64x32").unwrap();
        assert_eq!((g.n_u, g.n_theta), (64, 32));
        assert!(parse_grid("64").is_err());
        assert!(parse_grid("0x4").is_err());
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["unicrit", "theorem1"]).unwrap();
        assert_eq!(cli.common.d, 2);
        assert_eq!((cli.common.grid.n_u, cli.common.grid.n_theta), (1024, 1024));
        assert_eq!(cli.common.seed, 1);
        assert_eq!(cli.common.safety, 1.5);
        assert_eq!(cli.common.format, None);
        assert!(!cli.common.strict);
    }

    #[test]
    fn flags_after_subcommand() {
        let cli = Cli::try_parse_from(["unicrit", "theorem2", "-d", "3", "--radii", "0.25,1", "--periods", "2,4"]).unwrap();
        assert_eq!(cli.common.d, 3);
        match cli.command {
            Command::Theorem2 { radii, periods, .. } => {
                assert_eq!(radii, vec![0.25, 1.0]);
                assert_eq!(periods, vec![2, 4]);
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn builtin_family_is_default() {
        assert_eq!(test_functions(None).unwrap().len(), BUILTIN_FAMILY.len());
        assert!(test_functions(Some("bump(1,")).is_err());
    }

    #[test]
    fn id_lists_respect_parentheses() {
        assert_eq!(split_ids("bump(0,0.5), sz,bump(-1,0.4)"), ["bump(0,0.5)", "sz", "bump(-1,0.4)"]);
        assert_eq!(test_functions(Some("one,bump(inf,0.7)")).unwrap().len(), 2);
    }
}
