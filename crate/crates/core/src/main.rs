//! Command-line front end: closed-form mode computation, dense
//! verification, motion tables, energies, wave-function values, and the
//! analytic-vs-dense benchmark.
//!
//! Exit codes: 0 success, 1 verification failure, 2 malformed JSON,
//! 3 validation failure, 4 other runtime errors.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use snmodes::basis::SymmetryBasis;
use snmodes::error::Error;
use snmodes::motion::{
    lewis_structure, normal_mode_motion, symmetry_motion, ModeMotion, Scaling,
};
use snmodes::output;
use snmodes::spectral::{Mu, SpectralSolution};
use snmodes::system::{Sector, Species, SystemSpec};
use snmodes::verify::{verify_report_with, DEFAULT_CLUSTER_TOL};
use snmodes::wavefunction::{energy_first_order, ln_phi0, phi0, Occupancy};

#[derive(Parser)]
#[command(
    name = "snmodes",
    version,
    about = "Analytic normal modes of symmetric confined N-body systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Path to the system JSON record ('-' reads standard input).
    #[arg(long, short = 'i')]
    input: Option<String>,
    /// Inline system JSON record.
    #[arg(long, conflicts_with = "input")]
    spec_json: Option<String>,
}

#[derive(Args)]
struct OutputArg {
    /// Output path (standard output when omitted).
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Frequencies, mixing angles, and multiplicities from the closed forms.
    Modes {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArg,
        /// Include per-mode coefficient vectors over symmetry coordinates.
        #[arg(long)]
        coefficients: bool,
        /// Write the dense product matrix as row-major CSV.
        #[arg(long, value_name = "PATH")]
        emit_fg: Option<PathBuf>,
        /// Write the dense Hessian matrix as row-major CSV.
        #[arg(long, value_name = "PATH")]
        emit_f: Option<PathBuf>,
        /// Write the dense kinetic matrix as row-major CSV.
        #[arg(long, value_name = "PATH")]
        emit_g: Option<PathBuf>,
        /// Write the twelve invariant scalars as JSON.
        #[arg(long, value_name = "PATH")]
        emit_blocks: Option<PathBuf>,
        /// Write one symmetry block as CSV; spec is SPECIES:SECTOR:PATH
        /// with SPECIES in {trivial, standard, two-row} and SECTOR in
        /// {r, gamma}. Repeatable.
        #[arg(long, value_name = "SPEC")]
        emit_w: Vec<String>,
    },
    /// Run every structural identity against the dense oracle.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArg,
        /// Seed for the randomized round-trip draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative clustering tolerance (falls back to SNMODES_TOL, then 1e-7).
        #[arg(long)]
        cluster_tol: Option<f64>,
        /// Print per-check wall times to standard error.
        #[arg(long)]
        timings: bool,
    },
    /// Displacement table of one normal mode or symmetry coordinate.
    Motion {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArg,
        /// Root label of a normal mode: 0+, 0-, 1+, 1-, 1, or 2.
        #[arg(long, conflicts_with_all = ["species", "sector"])]
        mode: Option<String>,
        /// Species of a symmetry coordinate: trivial, standard, two-row.
        #[arg(long, requires = "sector")]
        species: Option<String>,
        /// Sector of a symmetry coordinate: r or gamma.
        #[arg(long)]
        sector: Option<String>,
        /// 1-based index within the manifold.
        #[arg(long, default_value_t = 1)]
        xi: usize,
        /// Coordinate value to excite.
        #[arg(long, default_value_t = 1.0)]
        value: f64,
        /// Emit scaled (primed) displacements instead of physical ones.
        #[arg(long)]
        scaled: bool,
        /// Add the equilibrium configuration to the displacement.
        #[arg(long, conflicts_with = "scaled")]
        total: bool,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Energy through first order for an occupancy.
    Energy {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArg,
        /// Path to the occupancy JSON array [{"mu","n","count"}, ...].
        #[arg(long)]
        occupancy: Option<PathBuf>,
    },
    /// Zeroth-order wave-function value at a point (or grid).
    Phi0 {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArg,
        #[arg(long)]
        occupancy: Option<PathBuf>,
        /// JSON array of P normal-coordinate values.
        #[arg(long, conflicts_with = "y_file")]
        q_file: Option<PathBuf>,
        /// JSON array of P internal displacements (projected first).
        #[arg(long)]
        y_file: Option<PathBuf>,
        /// JSON array of internal-displacement points; emits CSV of |Phi0|^2.
        #[arg(long, conflicts_with_all = ["q_file", "y_file"])]
        grid: Option<PathBuf>,
    },
    /// Closed-form vs dense timing across particle counts.
    Bench {
        #[command(flatten)]
        output: OutputArg,
        /// Particle counts, comma separated.
        #[arg(long = "N", value_delimiter = ',', default_value = "16,32,64")]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the dense solves concurrently.
        #[arg(long)]
        parallel: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

#[derive(Debug)]
enum CliError {
    Json(String),
    Lib(Error),
    Io(std::io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Json(msg) => write!(f, "malformed JSON: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Json(_) => 2,
        CliError::Lib(Error::Validation { .. }) => 3,
        _ => 4,
    }
}

impl InputArgs {
    fn load(&self) -> Result<SystemSpec, CliError> {
        let text = match (&self.input, &self.spec_json) {
            (Some(path), None) if path == "-" => {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf)?;
                buf
            }
            (Some(path), None) => fs::read_to_string(path)?,
            (None, Some(inline)) => inline.clone(),
            _ => {
                return Err(CliError::Usage(
                    "provide exactly one of --input or --spec-json".into(),
                ))
            }
        };
        let raw: SystemSpec =
            serde_json::from_str(&text).map_err(|e| CliError::Json(e.to_string()))?;
        Ok(raw.validated()?)
    }
}

fn write_out(target: &OutputArg, content: &str) -> Result<(), CliError> {
    match &target.output {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(format!("{}: {e}", path.display())))
}

fn load_occupancy(path: &Option<PathBuf>) -> Result<Occupancy, CliError> {
    match path {
        Some(p) => read_json_file(p),
        None => Ok(Occupancy::ground()),
    }
}

fn parse_species(text: &str) -> Result<Species, CliError> {
    match text {
        "trivial" | "0" => Ok(Species::Trivial),
        "standard" | "1" => Ok(Species::Standard),
        "two-row" | "2" => Ok(Species::TwoRow),
        other => Err(CliError::Usage(format!(
            "unknown species '{other}' (expected trivial, standard, or two-row)"
        ))),
    }
}

fn parse_sector(text: &str) -> Result<Sector, CliError> {
    match text {
        "r" | "radial" => Ok(Sector::Radial),
        "gamma" | "angular" => Ok(Sector::Angular),
        other => Err(CliError::Usage(format!(
            "unknown sector '{other}' (expected r or gamma)"
        ))),
    }
}

fn parse_mu(text: &str) -> Result<Mu, CliError> {
    text.parse().map_err(CliError::Usage)
}

fn vector_from_json(path: &PathBuf, expected: usize) -> Result<DVector<f64>, CliError> {
    let values: Vec<f64> = read_json_file(path)?;
    if values.len() != expected {
        return Err(CliError::Usage(format!(
            "{} holds {} values, expected {expected}",
            path.display(),
            values.len()
        )));
    }
    Ok(DVector::from_vec(values))
}

fn cluster_tol_default() -> f64 {
    std::env::var("SNMODES_TOL")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CLUSTER_TOL)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Modes {
            input,
            output,
            coefficients,
            emit_fg,
            emit_f,
            emit_g,
            emit_blocks,
            emit_w,
        } => {
            let spec = input.load()?;
            let solution = SpectralSolution::solve(&spec)?;
            let mut doc = output::modes_json(&spec, &solution);
            if coefficients {
                let basis = SymmetryBasis::new(spec.n)?;
                let vecs: Vec<Vec<f64>> = solution
                    .coefficient_vectors(&basis)
                    .into_iter()
                    .map(|v| v.iter().copied().collect())
                    .collect();
                doc["coefficient_vectors"] = serde_json::to_value(vecs).expect("serializable");
            }
            if let Some(path) = emit_fg {
                fs::write(path, output::matrix_csv(&snmodes::assembly::assemble_fg(&spec).assembled()))?;
            }
            if let Some(path) = emit_f {
                fs::write(path, output::matrix_csv(&snmodes::assembly::assemble_f(&spec).assembled()))?;
            }
            if let Some(path) = emit_g {
                fs::write(path, output::matrix_csv(&snmodes::assembly::assemble_g(&spec).assembled()))?;
            }
            if let Some(path) = emit_blocks {
                fs::write(path, serde_json::to_string_pretty(&output::blocks_json(&spec)).expect("serializable"))?;
            }
            if !emit_w.is_empty() {
                let basis = SymmetryBasis::new(spec.n)?;
                for request in emit_w {
                    let parts: Vec<&str> = request.splitn(3, ':').collect();
                    if parts.len() != 3 {
                        return Err(CliError::Usage(format!(
                            "--emit-w expects SPECIES:SECTOR:PATH, got '{request}'"
                        )));
                    }
                    let species = parse_species(parts[0])?;
                    let sector = parse_sector(parts[1])?;
                    fs::write(parts[2], output::w_block_csv(&basis, species, sector)?)?;
                }
            }
            write_out(&output, &format!("{:#}\n", doc))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            input,
            output,
            seed,
            cluster_tol,
            timings,
        } => {
            let spec = input.load()?;
            let tol = cluster_tol.unwrap_or_else(cluster_tol_default);
            let report = verify_report_with(&spec, seed, tol)?;
            if timings {
                for check in &report.checks {
                    eprintln!("{:>10.4} ms  {}", check.seconds * 1e3, check.name);
                }
            }
            let doc = output::verify_json(&spec, &report);
            write_out(&output, &format!("{:#}\n", doc))?;
            if report.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verification failed: {:?}", report.failed_names());
                Ok(ExitCode::from(1))
            }
        }

        Command::Motion {
            input,
            output,
            mode,
            species,
            sector,
            xi,
            value,
            scaled,
            total,
            format,
        } => {
            let spec = input.load()?;
            let basis = SymmetryBasis::new(spec.n)?;
            let scaling = if scaled { Scaling::Scaled } else { Scaling::Unscaled };
            let mut motion: ModeMotion = match (&mode, &species, &sector) {
                (Some(mu), None, None) => {
                    let solution = SpectralSolution::solve(&spec)?;
                    normal_mode_motion(&spec, &basis, &solution, parse_mu(mu)?, xi, value, scaling)?
                }
                (None, Some(sp), Some(sec)) => symmetry_motion(
                    &spec,
                    &basis,
                    parse_species(sp)?,
                    parse_sector(sec)?,
                    xi,
                    value,
                    scaling,
                )?,
                _ => {
                    return Err(CliError::Usage(
                        "select either --mode MU or --species S --sector r|gamma".into(),
                    ))
                }
            };
            if total {
                let mut base = lewis_structure(&spec);
                base.add_assign(&motion);
                motion = base;
            }
            match format.as_str() {
                "csv" => write_out(&output, &output::motion_csv(&spec, &motion)?)?,
                "json" => {
                    let doc = serde_json::json!({
                        "spec": spec,
                        "r": motion.r.iter().copied().collect::<Vec<f64>>(),
                        "gamma": motion.gamma.iter().copied().collect::<Vec<f64>>(),
                    });
                    write_out(&output, &format!("{:#}\n", doc))?;
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown format '{other}' (expected csv or json)"
                    )))
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Energy {
            input,
            output,
            occupancy,
        } => {
            let spec = input.load()?;
            let occ = load_occupancy(&occupancy)?;
            let solution = SpectralSolution::solve(&spec)?;
            let energy = energy_first_order(&spec, &solution, &occ)?;
            let doc = serde_json::json!({
                "spec": spec,
                "occupancy": occ,
                "energy": energy,
            });
            write_out(&output, &format!("{:#}\n", doc))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Phi0 {
            input,
            output,
            occupancy,
            q_file,
            y_file,
            grid,
        } => {
            let spec = input.load()?;
            let occ = load_occupancy(&occupancy)?;
            let solution = SpectralSolution::solve(&spec)?;
            let p = spec.p();
            if let Some(grid_path) = grid {
                let basis = SymmetryBasis::new(spec.n)?;
                let points: Vec<Vec<f64>> = read_json_file(&grid_path)?;
                let mut csv = format!(
                    "# spec {}\nindex,phi0,phi0_squared\n",
                    serde_json::to_string(&spec).expect("serializable")
                );
                for (idx, point) in points.iter().enumerate() {
                    if point.len() != p {
                        return Err(CliError::Usage(format!(
                            "grid point {idx} has {} values, expected {p}",
                            point.len()
                        )));
                    }
                    let y = DVector::from_vec(point.clone());
                    let q = solution.project_internal(&y, &basis)?;
                    let value = phi0(&q, &solution, &occ)?;
                    csv.push_str(&format!("{idx},{:.17e},{:.17e}\n", value, value * value));
                }
                write_out(&output, &csv)?;
                return Ok(ExitCode::SUCCESS);
            }
            let q = match (&q_file, &y_file) {
                (Some(path), None) => vector_from_json(path, p)?,
                (None, Some(path)) => {
                    let y = vector_from_json(path, p)?;
                    let basis = SymmetryBasis::new(spec.n)?;
                    solution.project_internal(&y, &basis)?
                }
                (None, None) => DVector::zeros(p),
                _ => unreachable!("clap forbids both"),
            };
            let value = phi0(&q, &solution, &occ)?;
            let (ln_abs, sign) = ln_phi0(&q, &solution, &occ)?;
            let doc = serde_json::json!({
                "spec": spec,
                "occupancy": occ,
                "phi0": value,
                "phi0_squared": value * value,
                "ln_abs": ln_abs,
                "sign": sign,
            });
            write_out(&output, &format!("{:#}\n", doc))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Bench {
            output,
            n_values,
            seed,
            parallel,
        } => {
            if n_values.iter().any(|&n| n < 2) {
                return Err(CliError::Usage("bench requires N >= 2".into()));
            }
            let points = snmodes::bench::run(&n_values, seed, parallel)?;
            let slope = snmodes::bench::dense_slope(&points);
            let mut specs = serde_json::Map::new();
            for &n in &n_values {
                let mut rng =
                    <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ n as u64);
                specs.insert(
                    n.to_string(),
                    serde_json::to_value(snmodes::verify::random_spec(n, &mut rng))
                        .expect("serializable"),
                );
            }
            eprintln!("{:>6} {:>8} {:>14} {:>14} {:>12}", "N", "P", "analytic [s]", "dense [s]", "speedup");
            for b in &points {
                eprintln!(
                    "{:>6} {:>8} {:>14.3e} {:>14.3e} {:>12.1}",
                    b.n, b.p, b.t_analytic_s, b.t_dense_s, b.speedup
                );
            }
            if let Some(s) = slope {
                eprintln!("dense log-log slope vs P: {s:.2}");
            }
            let doc = serde_json::json!({
                "seed": seed,
                "specs": specs,
                "points": points,
                "dense_slope": slope,
            });
            write_out(&output, &format!("{:#}\n", doc))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
