//! `chiraltop`: classification lookups, model generation, the spectral
//! pipeline and invariant reports from the command line.
//!
//! Exit codes: 0 ok, 2 usage, 3 outside the tabulated or proved range,
//! 4 bad model parameters, 5 validation failure, 6 unresolved invariant,
//! 7 boundary mismatch.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use chiraltop::basespace::{make_grid, BaseGrid, SpaceKind};
use chiraltop::chiralbundle::HRef;
use chiraltop::classify::{classify_space, match_report, pi_classifying, pi_unitary, Rank};
use chiraltop::error::{Error, FailureClass};
use chiraltop::invariants::{compute_report, z2_witten, Framing, ReportOptions, Z2Entry};
use chiraltop::modelzoo::{build, list_models, ModelOutput, ModelSpec};
use chiraltop::policy::NumericPolicy;
use chiraltop::spectral::{
    assemble_chiral_bundle, auto_contour, chiral_split, fermi_projection_eig, fermi_projection_riesz,
    validate_system,
};
use chiraltop::io;

/// `println!` that exits quietly when the reader has gone away.
macro_rules! out {
    ($($arg:tt)*) => {
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(usage(format!("cannot write to stdout: {e}")));
        }
    };
}

#[derive(Parser)]
#[command(name = "chiraltop", version, about = "Topology of chiral vector bundles on sampled base spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Numeric policy overrides, `key=value,key=value`.
    #[arg(long, global = true, default_value = "")]
    policy: String,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "CHIRALTOP_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Classification group of rank-m chiral bundles over a sphere or torus.
    Classify {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        json: bool,
    },
    /// Homotopy groups of U(m) or of the classifying space.
    Homotopy {
        /// A positive integer or `inf`.
        #[arg(long)]
        rank: String,
        #[arg(long)]
        degree: usize,
        /// Use the classifying space instead of U(m).
        #[arg(long)]
        classifying: bool,
        #[arg(long)]
        json: bool,
    },
    /// List the model catalog.
    Models {
        #[arg(long)]
        json: bool,
    },
    /// Sample a model and write it (.cqs, .cbd or .cmf, by model type).
    Model {
        #[arg(long)]
        name: String,
        #[arg(long, default_value = "")]
        params: String,
        /// Grid shape, e.g. `128` or `24x24x24`.
        #[arg(long)]
        grid: String,
        /// Base space; defaults to the model's first base of matching dimension.
        #[arg(long, value_enum)]
        space: Option<Space>,
        #[arg(long)]
        emit: PathBuf,
    },
    /// Spectral pipeline: .cqs system to .cbd bundle.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "identity")]
        href: HrefMode,
        /// Per-point m×m reference maps (.cmf, full support) for `--href supplied`.
        #[arg(long)]
        href_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "eig")]
        projector: ProjectorMode,
        /// Quadrature nodes of the Riesz contour.
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Invariant report of a .cbd bundle.
    Invariants {
        #[arg(long)]
        input: PathBuf,
        /// Cycle degrees to evaluate, e.g. `1,3`; all by default.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        /// Transverse offset of torus cycles, e.g. `0,3,0`.
        #[arg(long, value_delimiter = ',')]
        offset: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "auto")]
        framing: FramingMode,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Boundary map and extension for the z2 entry.
        #[arg(long, requires = "z2_extension")]
        z2_map: Option<PathBuf>,
        #[arg(long, requires = "z2_map")]
        z2_extension: Option<PathBuf>,
    },
    /// Witten sign of f: S⁴ → SU(2) from a supplied extension into SU(3).
    Z2 {
        /// Boundary map (.cmf on a ball5 grid).
        #[arg(long)]
        map: PathBuf,
        /// Extension F over the ball (.cmf, full support).
        #[arg(long)]
        extension: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Sphere,
    Torus,
    Ball5,
}

impl From<Space> for SpaceKind {
    fn from(s: Space) -> Self {
        match s {
            Space::Sphere => SpaceKind::Sphere,
            Space::Torus => SpaceKind::Torus,
            Space::Ball5 => SpaceKind::Ball5,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HrefMode {
    Identity,
    #[value(name = "self")]
    SelfRef,
    Supplied,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectorMode {
    Eig,
    Riesz,
}

#[derive(Clone, Copy, ValueEnum)]
enum FramingMode {
    Auto,
    Constant,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            FailureClass::Usage => 2,
            FailureClass::Range => 3,
            FailureClass::Params => 4,
            FailureClass::Validation => 5,
            FailureClass::Unresolved => 6,
            FailureClass::Boundary => 7,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn parse_shape(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(['x', ','])
        .map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("bad grid shape `{s}`"))))
        .collect()
}

/// Grid for a model: explicit space, or the first catalog base of the right
/// dimension.
fn model_grid(name: &str, shape: &[usize], space: Option<Space>) -> Result<BaseGrid, Failure> {
    let d = shape.len();
    let kind = match space {
        Some(s) => s.into(),
        None => {
            let info = list_models().into_iter().find(|m| m.name == name);
            let base = info.and_then(|m| {
                m.bases.iter().find(|b| b.ends_with(&d.to_string()) || **b == "any").map(|b| b.to_string())
            });
            match base.as_deref() {
                Some(b) if b.starts_with("sphere") => SpaceKind::Sphere,
                Some(b) if b.starts_with("ball5") => SpaceKind::Ball5,
                _ => SpaceKind::Torus,
            }
        }
    };
    Ok(make_grid(kind, d, shape)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let policy = NumericPolicy::default().with_overrides(&cli.global.policy)?;
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    match cli.command {
        Command::Classify { space, dim, rank, json } => {
            let g = classify_space(space.into(), dim, rank)?;
            if json {
                out!("{}", serde_json::to_string(&g).expect("group serializes"));
            } else {
                out!("{g}");
            }
        }
        Command::Homotopy { rank, degree, classifying, json } => {
            let m: Rank = rank.parse()?;
            let g = if classifying { pi_classifying(m, degree)? } else { pi_unitary(m, degree)? };
            if json {
                out!("{}", serde_json::to_string(&g).expect("group serializes"));
            } else {
                out!("{g}");
            }
        }
        Command::Models { json } => {
            let models = list_models();
            if json {
                out!("{}", serde_json::to_string_pretty(&models).expect("catalog serializes"));
            } else {
                for m in models {
                    let params: Vec<String> = m.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
                    out!("{:<16} {:<40} {}", m.name, m.bases.join(","), params.join(","));
                    out!("{:<16} realizes {}", "", m.realizes);
                }
            }
        }
        Command::Model { name, params, grid, space, emit } => {
            let spec = ModelSpec::parse(&name, &params)?;
            let grid = model_grid(&name, &parse_shape(&grid)?, space)?;
            match build(&spec, &grid)? {
                ModelOutput::System(s) => io::write_system(&emit, &s)?,
                ModelOutput::Bundle(b) => io::write_bundle(&emit, &b)?,
                ModelOutput::Map(f) => io::write_mesh_map(&emit, &f)?,
            }
        }
        Command::Split { input, output, href, href_file, projector, nodes } => {
            let sys = io::read_system(&input)?;
            let href = match (href, href_file) {
                (HrefMode::Identity, _) => HRef::IdentityInFrames,
                (HrefMode::SelfRef, _) => HRef::SelfReference,
                (HrefMode::Supplied, Some(path)) => HRef::Supplied(io::read_mesh_map(path)?.values),
                (HrefMode::Supplied, None) => return Err(usage("--href supplied needs --href-file")),
            };
            validate_system(&sys, &policy)?;
            let p = match projector {
                ProjectorMode::Eig => fermi_projection_eig(&sys, &policy)?,
                ProjectorMode::Riesz => {
                    fermi_projection_riesz(&sys, auto_contour(&sys, &policy)?, nodes, &policy)?
                }
            };
            let split = chiral_split(&sys, &p, &policy)?;
            let b = assemble_chiral_bundle(&split, &href, &policy)?;
            io::write_bundle(&output, &b)?;
        }
        Command::Invariants { input, degrees, offset, framing, report, z2_map, z2_extension } => {
            let b = io::read_bundle(&input)?;
            chiraltop::chiralbundle::validate(&b, &policy).into_result()?;
            let options = ReportOptions {
                framing: match framing {
                    FramingMode::Auto => Framing::Auto,
                    FramingMode::Constant => Framing::ConstantFrameRequired,
                },
                degrees,
                offset,
            };
            let mut r = compute_report(&b, &options, &policy)?;
            if let (Some(map), Some(ext)) = (z2_map, z2_extension) {
                let (f, big) = (io::read_mesh_map(map)?, io::read_mesh_map(ext)?);
                r.z2 = Some(match z2_witten(&f, &big, &policy) {
                    Ok(z) => Z2Entry::Resolved(z),
                    Err(e) if e.class() == FailureClass::Unresolved => Z2Entry::Unresolved(e.to_string()),
                    Err(e) => return Err(e.into()),
                });
            }
            match report {
                Some(path) => {
                    io::write_report(&path, &r)?;
                    if b.grid.kind() != SpaceKind::Ball5 {
                        if let Ok(label) = match_report(&r, b.grid.kind(), b.grid.dim(), b.rank) {
                            out!("class {label}");
                        }
                    }
                }
                None => out!("{}", io::report_to_string(&r)),
            }
            if r.has_unresolved() {
                return Err(Failure { code: 6, message: "report contains unresolved entries".into() });
            }
        }
        Command::Z2 { map, extension, json } => {
            let Some(extension) = extension else {
                return Err(usage(
                    "z2 needs an extension F: D5 -> SU(3) of the boundary map (--extension <file.cmf>); \
                     no extension is constructed automatically",
                ));
            };
            let (f, big) = (io::read_mesh_map(map)?, io::read_mesh_map(extension)?);
            let z = z2_witten(&f, &big, &policy)?;
            if json {
                out!(
                    "{}",
                    json!({"epsilon": z.epsilon, "cs5": z.cs5, "residual": z.residual,
                           "boundary_residual": z.boundary_residual})
                );
            } else {
                out!("epsilon = {:+}  (cs5 = {:.6}, residual {:.2e})", z.epsilon, z.cs5, z.residual);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
