//! Command-line driver: spectra, Cheeger constants, certificates, sweeps,
//! and the scripted studies. Exit codes: 0 success, 1 verification failure,
//! 2 input error.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use steklov::certificate::{
    certificate_from_json, certificate_to_json, certify_graph, certify_mesh, threshold_table_csv,
    verify_chain, Certificate,
};
use steklov::cheeger::{
    enumerate_constants_with_cap, sweep_cuts, CheegerConstants, ConstraintVariant,
    DEFAULT_ENUMERATION_CAP,
};
use steklov::complex::{BoundaryComplex, Dimension, SteklovNetwork};
use steklov::error::Error;
use steklov::experiments::{
    bound_violation_survey, convergence_study, dumbbell_study, scaling_study, thin_product_study,
    ConvergenceShape, StudyReport,
};
use steklov::fem::{
    assemble_p1_with, cell_average_field, coarsen_complex, grid_blocks, load_mesh_from,
    make_annulus, make_cylinder, make_disk, make_dumbbell, make_rectangle, mesh_to_complex_with,
    save_mesh_to, vertex_field_csv, TriangleMesh,
};
use steklov::graph_io::{graph_to_pair, parse_graph};
use steklov::report::{cut_table_csv, spectrum_values_csv, spectrum_vectors_csv};
use steklov::solver::{steklov_spectrum, Eigenpair};

#[derive(Parser)]
#[command(
    name = "steklov",
    about = "Steklov spectra, Cheeger-type constants, and lower-bound certificates",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Output directory for emitted files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Constraint variant for the isoperimetric side.
    #[arg(long, value_enum, global = true)]
    variant: Option<VariantArg>,
    /// Cell-count cap for exact enumeration.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Inequality tolerance for certificate verification.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap for studies and enumeration.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Which artifact kinds to emit.
    #[arg(long, value_delimiter = ',', global = true)]
    emit: Option<Vec<EmitKind>>,
    /// JSON file of default option values; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Volume,
    Boundary,
}

impl From<VariantArg> for ConstraintVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Volume => ConstraintVariant::VolumeHalf,
            VariantArg::Boundary => ConstraintVariant::BoundaryHalf,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitKind {
    Csv,
    Json,
}

/// Resolved run configuration after merging flags over --config defaults.
struct RunConfig {
    out: PathBuf,
    variant: ConstraintVariant,
    cap: usize,
    tolerance: f64,
    seed: u64,
    emit_csv: bool,
    emit_json: bool,
}

impl RunConfig {
    fn resolve(opts: &GlobalOpts) -> Result<Self, Error> {
        #[derive(serde::Deserialize, Default)]
        #[serde(deny_unknown_fields)]
        struct FileConfig {
            out: Option<PathBuf>,
            variant: Option<String>,
            cap: Option<usize>,
            tolerance: Option<f64>,
            seed: Option<u64>,
            jobs: Option<usize>,
            emit: Option<Vec<String>>,
        }
        let file: FileConfig = match &opts.config {
            None => FileConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::GraphInput(format!("config: {e}")))?
            }
        };
        let variant = match (&opts.variant, file.variant.as_deref()) {
            (Some(v), _) => (*v).into(),
            (None, Some("volume")) => ConstraintVariant::VolumeHalf,
            (None, Some("boundary")) => ConstraintVariant::BoundaryHalf,
            (None, Some(other)) => {
                return Err(Error::GraphInput(format!("config: unknown variant {other}")))
            }
            (None, None) => ConstraintVariant::VolumeHalf,
        };
        let emit: Vec<EmitKind> = match (&opts.emit, file.emit) {
            (Some(kinds), _) => kinds.clone(),
            (None, Some(names)) => names
                .iter()
                .map(|n| match n.as_str() {
                    "csv" => Ok(EmitKind::Csv),
                    "json" => Ok(EmitKind::Json),
                    other => Err(Error::GraphInput(format!("config: unknown emit kind {other}"))),
                })
                .collect::<Result<_, _>>()?,
            (None, None) => vec![EmitKind::Csv, EmitKind::Json],
        };
        let cap = opts.cap.or(file.cap).unwrap_or(DEFAULT_ENUMERATION_CAP);
        let tolerance = opts.tolerance.or(file.tolerance).unwrap_or(1e-8);
        if !(tolerance > 0.0) {
            return Err(Error::GraphInput(format!("tolerance must be positive, got {tolerance}")));
        }
        if cap < 1 {
            return Err(Error::GraphInput("cap must be at least 1".into()));
        }
        if let Some(jobs) = opts.jobs.or(file.jobs) {
            if jobs < 1 {
                return Err(Error::GraphInput("jobs must be at least 1".into()));
            }
            // ignore failure if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
        }
        Ok(RunConfig {
            out: opts.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            variant,
            cap,
            tolerance,
            seed: opts.seed.or(file.seed).unwrap_or(0),
            emit_csv: emit.contains(&EmitKind::Csv),
            emit_json: emit.contains(&EmitKind::Json),
        })
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InstanceArg {
    /// JSON graph instance.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// SMESH 1 mesh instance.
    #[arg(long)]
    mesh: Option<PathBuf>,
}

enum Instance {
    Graph { net: SteklovNetwork, complex: BoundaryComplex },
    Mesh { mesh: Box<TriangleMesh>, topo: Box<steklov::fem::Topology> },
}

impl InstanceArg {
    fn load(&self) -> Result<Instance, Error> {
        if let Some(path) = &self.graph {
            let text = std::fs::read_to_string(path)?;
            let (net, complex) = graph_to_pair(&parse_graph(&text)?)?;
            Ok(Instance::Graph { net, complex })
        } else {
            let mesh = load_mesh_from(self.mesh.as_ref().unwrap())?;
            let topo = mesh.topology()?;
            Ok(Instance::Mesh { mesh: Box::new(mesh), topo: Box::new(topo) })
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the first k Steklov eigenvalues and eigenvectors.
    Solve {
        #[command(flatten)]
        instance: InstanceArg,
        /// Number of eigenvalues (capped at the boundary vertex count).
        #[arg(short, default_value_t = 4)]
        k: usize,
    },
    /// Exact Cheeger constants h and h' with witnesses.
    Cheeger {
        #[command(flatten)]
        instance: InstanceArg,
        /// Coarsen a mesh complex onto an NX,NY block grid before
        /// enumeration.
        #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
        coarsen: Option<Vec<usize>>,
    },
    /// Build and verify the lower-bound certificate for sigma_1.
    Certify {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Superlevel-set cut table of a cell field (default: the first
    /// eigenfield).
    Sweep {
        #[command(flatten)]
        instance: InstanceArg,
        /// CSV file "cell_id,value" with one row per cell.
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Replay the verification of a stored certificate file.
    Verify {
        /// certificate.json produced by `certify`.
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Check the metric scaling laws on an instance.
    ScaleTest {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, value_delimiter = ',', default_value = "2,5")]
        lambdas: Vec<f64>,
        /// Ambient dimension for the scaling exponents.
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
        coarsen: Option<Vec<usize>>,
    },
    /// Thin cylinder study: sigma_1 and h' decay linearly in the height.
    ThinLimit {
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        circumference: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
        a_list: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
    },
    /// Dumbbell study: all three quantities decay with the neck width.
    Dumbbell {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.1")]
        w_list: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        l: f64,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
    },
    /// Refinement study: disk eigenvalue order, or the exact interval chain.
    Converge {
        #[arg(long, value_enum, default_value_t = ShapeArg::Disk)]
        shape: ShapeArg,
        /// Mesh sizes for the disk, element counts for the path.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
    },
    /// Random abstract graphs: how often the bound fails off the FEM model.
    GraphSurvey {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Generate a mesh file for one of the built-in shapes.
    MakeMesh {
        #[arg(long, value_enum)]
        shape: MeshShape,
        /// Target edge length.
        #[arg(long)]
        h: f64,
        /// Shape parameters: disk none; annulus R_IN R_OUT; rectangle W HT;
        /// cylinder CIRC HEIGHT; dumbbell R W L.
        #[arg(long, value_delimiter = ',')]
        params: Vec<f64>,
        /// Output path for the SMESH file.
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Disk,
    Path,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeshShape {
    Disk,
    Annulus,
    Rectangle,
    Cylinder,
    Dumbbell,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidNetwork(_)
        | Error::InvalidComplex(_)
        | Error::NonpositiveScale(_)
        | Error::GraphInput(_)
        | Error::TooManyEigenvalues { .. }
        | Error::PencilTooLarge { .. }
        | Error::EnumerationTooLarge { .. }
        | Error::MeshParse { .. }
        | Error::Mesh(_)
        | Error::MeshGenerator(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(&cli.global) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn ensure_out(cfg: &RunConfig) -> Result<(), Error> {
    std::fs::create_dir_all(&cfg.out)?;
    Ok(())
}

fn write_if(cfg: &RunConfig, emit: bool, name: &str, text: &str) -> Result<Option<PathBuf>, Error> {
    if !emit {
        return Ok(None);
    }
    ensure_out(cfg)?;
    let path = cfg.out.join(name);
    std::fs::write(&path, text)?;
    Ok(Some(path))
}

/// First positive eigenpair of an instance, with its cell field.
fn sigma1_pair(instance: &Instance) -> Result<(Eigenpair, Vec<f64>), Error> {
    match instance {
        Instance::Graph { net, .. } => {
            let spectrum = steklov_spectrum(net, 2)?;
            let pair = spectrum.eigenpair(1);
            let cells = pair.field.clone();
            Ok((pair, cells))
        }
        Instance::Mesh { mesh, topo } => {
            let net = assemble_p1_with(mesh, topo)?;
            let spectrum = steklov_spectrum(&net, 2)?;
            let pair = spectrum.eigenpair(1);
            let cells = cell_average_field(mesh, topo, &pair.field);
            Ok((pair, cells))
        }
    }
}

fn instance_complex(instance: &Instance) -> Result<BoundaryComplex, Error> {
    match instance {
        Instance::Graph { complex, .. } => Ok(complex.clone()),
        Instance::Mesh { mesh, topo } => mesh_to_complex_with(mesh, topo),
    }
}

fn print_constants(k: &CheegerConstants) {
    let witness = |w: &Option<steklov::cheeger::CutResult>| match w {
        Some(cut) => format!("{:?}", cut.subset),
        None => "(none)".into(),
    };
    println!("h      = {}  witness {}", k.h, witness(&k.h_witness));
    println!("h'     = {}  witness {}", k.hprime, witness(&k.hprime_witness));
}

fn emit_study(report: &StudyReport, cfg: &RunConfig) -> Result<(), Error> {
    ensure_out(cfg)?;
    let (json_path, csv_path) = report.emit(&cfg.out)?;
    if !cfg.emit_json {
        std::fs::remove_file(&json_path)?;
    } else {
        println!("wrote {}", json_path.display());
    }
    if !cfg.emit_csv {
        std::fs::remove_file(&csv_path)?;
    } else {
        println!("wrote {}", csv_path.display());
    }
    Ok(())
}

fn study_exit(report: &StudyReport) -> ExitCode {
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|(_, &ok)| !ok)
        .map(|(name, _)| name.as_str())
        .collect();
    for (name, ok) in &report.checks {
        println!("check {name}: {}", if *ok { "pass" } else { "FAIL" });
    }
    for (name, fit) in &report.fits {
        println!("fit {name}: slope {:.6} r2 {:.8}", fit.slope, fit.r2);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        ExitCode::from(1)
    }
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<ExitCode, Error> {
    match cmd {
        Command::Solve { instance, k } => {
            let inst = instance.load()?;
            let (spectrum, mesh_ctx) = match &inst {
                Instance::Graph { net, .. } => (steklov_spectrum(net, k)?, None),
                Instance::Mesh { mesh, topo } => {
                    let net = assemble_p1_with(mesh, topo)?;
                    (steklov_spectrum(&net, k)?, Some((mesh, topo)))
                }
            };
            for (i, v) in spectrum.eigenvalues.iter().enumerate() {
                println!("sigma_{i} = {v}");
            }
            if let Some(p) = write_if(cfg, cfg.emit_csv, "spectrum_values.csv", &spectrum_values_csv(&spectrum))? {
                println!("wrote {}", p.display());
            }
            if let Some(p) = write_if(cfg, cfg.emit_csv, "spectrum_vectors.csv", &spectrum_vectors_csv(&spectrum))? {
                println!("wrote {}", p.display());
            }
            if let Some((mesh, topo)) = mesh_ctx {
                if spectrum.eigenvalues.len() > 1 {
                    let csv = vertex_field_csv(mesh, topo, &spectrum.extensions[1]);
                    if let Some(p) = write_if(cfg, cfg.emit_csv, "eigenfunction_1.csv", &csv)? {
                        println!("wrote {}", p.display());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cheeger { instance, coarsen } => {
            let inst = instance.load()?;
            let complex = instance_complex(&inst)?;
            let complex = match (&inst, coarsen) {
                (Instance::Mesh { mesh, .. }, Some(grid)) => {
                    let blocks = grid_blocks(mesh, grid[0], grid[1]);
                    coarsen_complex(&complex, &blocks)
                }
                (Instance::Graph { .. }, Some(_)) => {
                    return Err(Error::GraphInput("--coarsen applies to mesh instances".into()))
                }
                (_, None) => complex,
            };
            let k = enumerate_constants_with_cap(&complex, cfg.variant, cfg.cap)?;
            print_constants(&k);
            if let Some(p) =
                write_if(cfg, cfg.emit_json, "cheeger.json", &serde_json::to_string_pretty(&k)?)?
            {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { instance } => {
            let inst = instance.load()?;
            let cert = match &inst {
                Instance::Graph { net, complex } => {
                    let spectrum = steklov_spectrum(net, 2)?;
                    let pair = spectrum.eigenpair(1);
                    let exact = if complex.cell_count() <= cfg.cap {
                        Some(enumerate_constants_with_cap(complex, cfg.variant, cfg.cap)?)
                    } else {
                        None
                    };
                    certify_graph(net, complex, &pair, cfg.variant, exact.as_ref())?
                }
                Instance::Mesh { mesh, topo } => {
                    let net = assemble_p1_with(mesh, topo)?;
                    let spectrum = steklov_spectrum(&net, 2)?;
                    let pair = spectrum.eigenpair(1);
                    let complex = mesh_to_complex_with(mesh, topo)?;
                    certify_mesh(mesh, topo, &complex, &pair, cfg.variant)?
                }
            };
            report_certificate(&cert, cfg)
        }
        Command::Verify { certificate } => {
            let text = std::fs::read_to_string(&certificate)?;
            let cert = certificate_from_json(&text)?;
            let verdict = verify_chain(&cert, cfg.tolerance);
            for step in &verdict.steps {
                println!(
                    "{} {}: residual {}",
                    if step.pass { "pass" } else { "FAIL" },
                    step.name,
                    step.residual
                );
            }
            println!("bound {} <= sigma1 {}: {}", cert.bound, cert.sigma1, verdict.hard_pass);
            Ok(if verdict.hard_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep { instance, field } => {
            let inst = instance.load()?;
            let complex = instance_complex(&inst)?;
            let cells = match field {
                Some(path) => read_field_csv(&path, complex.cell_count())?,
                None => sigma1_pair(&inst)?.1,
            };
            let outcome = sweep_cuts(&complex, &cells, cfg.variant);
            println!("{} admissible cuts", outcome.cuts.len());
            if let Some(i) = outcome.best_h {
                println!("best h ratio      = {}", outcome.cuts[i].h_ratio);
            }
            if let Some(i) = outcome.best_hprime {
                println!("best h' ratio     = {}", outcome.cuts[i].hprime_ratio);
            }
            if let Some(p) = write_if(cfg, cfg.emit_csv, "cut_table.csv", &cut_table_csv(&outcome.cuts))? {
                println!("wrote {}", p.display());
            }
            if let Some(p) =
                write_if(cfg, cfg.emit_json, "cuts.json", &serde_json::to_string_pretty(&outcome)?)?
            {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ScaleTest { instance, lambdas, dim, coarsen } => {
            let inst = instance.load()?;
            let complex = instance_complex(&inst)?;
            let (net, blocks) = match &inst {
                Instance::Graph { net, .. } => (net.clone(), None),
                Instance::Mesh { mesh, topo } => {
                    let grid = coarsen.unwrap_or_else(|| vec![5, 4]);
                    (assemble_p1_with(mesh, topo)?, Some(grid_blocks(mesh, grid[0], grid[1])))
                }
            };
            let report = scaling_study(
                &net,
                &complex,
                blocks.as_deref(),
                Dimension::new(dim)?,
                &lambdas,
                cfg.variant,
            )?;
            emit_study(&report, cfg)?;
            Ok(study_exit(&report))
        }
        Command::ThinLimit { circumference, a_list, h } => {
            let report = thin_product_study(circumference, &a_list, h)?;
            emit_study(&report, cfg)?;
            Ok(study_exit(&report))
        }
        Command::Dumbbell { r, w_list, l, h } => {
            let report = dumbbell_study(r, &w_list, l, h)?;
            emit_study(&report, cfg)?;
            Ok(study_exit(&report))
        }
        Command::Converge { shape, levels } => {
            let shape = match shape {
                ShapeArg::Disk => ConvergenceShape::Disk,
                ShapeArg::Path => ConvergenceShape::IntervalChain,
            };
            let report = convergence_study(shape, &levels)?;
            emit_study(&report, cfg)?;
            Ok(study_exit(&report))
        }
        Command::GraphSurvey { count } => {
            let report = bound_violation_survey(cfg.seed, count)?;
            println!(
                "built {} instances, {} bound violations",
                report.params["built"], report.params["violations"]
            );
            emit_study(&report, cfg)?;
            Ok(study_exit(&report))
        }
        Command::MakeMesh { shape, h, params, path } => {
            let want = |n: usize| -> Result<(), Error> {
                if params.len() != n {
                    return Err(Error::MeshGenerator(format!(
                        "shape expects {n} parameters, got {}",
                        params.len()
                    )));
                }
                Ok(())
            };
            let mesh = match shape {
                MeshShape::Disk => {
                    want(0)?;
                    make_disk(h)?
                }
                MeshShape::Annulus => {
                    want(2)?;
                    make_annulus(params[0], params[1], h)?
                }
                MeshShape::Rectangle => {
                    want(2)?;
                    make_rectangle(params[0], params[1], h)?
                }
                MeshShape::Cylinder => {
                    want(2)?;
                    make_cylinder(params[0], params[1], h)?
                }
                MeshShape::Dumbbell => {
                    want(3)?;
                    make_dumbbell(params[0], params[1], params[2], h)?
                }
            };
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            save_mesh_to(&mesh, &path)?;
            println!(
                "wrote {} ({} vertices, {} triangles)",
                path.display(),
                mesh.vertex_count(),
                mesh.triangle_count()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn report_certificate(cert: &Certificate, cfg: &RunConfig) -> Result<ExitCode, Error> {
    if let Some(p) = write_if(cfg, cfg.emit_json, "certificate.json", &certificate_to_json(cert)?)? {
        println!("wrote {}", p.display());
    }
    if let Some(p) = write_if(cfg, cfg.emit_csv, "threshold_table.csv", &threshold_table_csv(cert))? {
        println!("wrote {}", p.display());
    }
    println!("h_eff = {}, h'_eff = {}", cert.h_eff, cert.hprime_eff);
    if let (Some(h), Some(hp)) = (cert.exact_h, cert.exact_hprime) {
        println!("exact h = {h}, exact h' = {hp}");
    }
    println!("bound {} <= sigma1 {}", cert.bound, cert.sigma1);
    for step in cert.verdict.steps.iter().filter(|s| !s.pass) {
        println!("step {}: FAIL (residual {})", step.name, step.residual);
    }
    if cert.verdict.hard_pass {
        println!("certificate verified");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("certificate verification failed");
        Ok(ExitCode::from(1))
    }
}

fn read_field_csv(path: &Path, cells: usize) -> Result<Vec<f64>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut field = vec![f64::NAN; cells];
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.starts_with("cell")) {
            continue;
        }
        let mut parts = line.split(',');
        let badline = || Error::GraphInput(format!("{}:{}: expected 'cell_id,value'", path.display(), idx + 1));
        let cell: usize = parts.next().ok_or_else(badline)?.trim().parse().map_err(|_| badline())?;
        let value: f64 = parts.next().ok_or_else(badline)?.trim().parse().map_err(|_| badline())?;
        if cell >= cells {
            return Err(Error::GraphInput(format!(
                "{}:{}: cell id {cell} out of range ({cells} cells)",
                path.display(),
                idx + 1
            )));
        }
        field[cell] = value;
    }
    if let Some(missing) = field.iter().position(|v| v.is_nan()) {
        return Err(Error::GraphInput(format!("field file misses a value for cell {missing}")));
    }
    Ok(field)
}
