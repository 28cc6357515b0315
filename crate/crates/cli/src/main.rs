use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use morse_graph::bench::{lattice_instance, time_stages};
use morse_graph::complex::{GridSpec, ScalarField, SimplicialComplex};
use morse_graph::noise_model::{self, NoiseParams};
use morse_graph::{io, morse_oracle, persistence, reconstruct, Filtration};

const EXIT_ERROR: u8 = 1;
const EXIT_MODEL_VIOLATION: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "morse-graph",
    version,
    about = "Reconstruct hidden graphs from density fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a grid and print its simplex counts.
    Build(BuildArgs),
    /// Dump the persistence pairs of a density field.
    Pairs(PairsArgs),
    /// Reconstruct the graph with the spanning-forest algorithm.
    Reconstruct(ReconstructArgs),
    /// Reconstruct the graph with explicit Morse cancellation.
    Oracle(ReconstructArgs),
    /// Generate a synthetic noise-model instance around a hidden graph.
    Generate(GenerateArgs),
    /// Check a reconstructed graph against ground truth.
    Verify(VerifyArgs),
    /// Threshold a density field and summarize the superlevel set.
    Threshold(ThresholdArgs),
    /// Time persistence and both reconstruction stages.
    Bench(BenchArgs),
}

#[derive(Args)]
struct FieldInput {
    /// Density field file (text, or binary with a `.hdr` sidecar).
    #[arg(long)]
    input: PathBuf,
    /// Work on the raw field instead of its negation.
    #[arg(long)]
    no_negate: bool,
    /// Raise every density value below this floor to the floor before use.
    #[arg(long)]
    prune: Option<f64>,
}

impl FieldInput {
    fn load(&self) -> anyhow::Result<(GridSpec, ScalarField)> {
        let (grid, field) = io::read_field(&self.input)
            .with_context(|| format!("reading {}", self.input.display()))?;
        let field = match self.prune {
            Some(t) => field.floored(t),
            None => field,
        };
        Ok((grid, field))
    }
}

#[derive(Args)]
struct BuildArgs {
    /// Vertex counts per axis.
    #[arg(long, num_args = 2..=3, required = true)]
    dims: Vec<usize>,
}

#[derive(Args)]
struct PairsArgs {
    #[command(flatten)]
    field: FieldInput,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ReconstructArgs {
    #[command(flatten)]
    field: FieldInput,
    /// Persistence threshold δ.
    #[arg(long)]
    delta: f64,
    /// Graph output file (standard output when absent).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, num_args = 2..=3, required = true)]
    dims: Vec<usize>,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    w: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hidden-graph file (`n x y [z]` / `a i j` lines).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    field_out: PathBuf,
    #[arg(long)]
    mask_out: Option<PathBuf>,
    #[arg(long)]
    truth_out: Option<PathBuf>,
    /// Write the field as little-endian f64 with a `.hdr` sidecar.
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reconstructed graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Ground-truth graph file.
    #[arg(long)]
    truth: PathBuf,
    /// Neighbourhood mask file.
    #[arg(long)]
    mask: PathBuf,
    /// With --beta and --nu, warn when δ is outside the guaranteed range.
    #[arg(long, requires_all = ["beta", "nu"])]
    delta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    input: PathBuf,
    /// Keep vertices with density at least this value.
    #[arg(long)]
    t: f64,
    /// Mask output file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BenchArgs {
    /// Density field; a synthetic lattice instance is generated when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Side length of the synthetic square grid.
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, default_value_t = 3.0)]
    delta: f64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => Ok(other?),
        },
    }
}

fn check_delta(delta: f64) -> anyhow::Result<()> {
    if delta.is_nan() || delta < 0.0 {
        bail!("--delta must be >= 0, got {delta}");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Build(args) => {
            let grid = GridSpec::new(&args.dims)?;
            let k = SimplicialComplex::from_grid(&grid);
            println!("vertices {}", k.vertex_count());
            println!("edges {}", k.edge_count());
            println!("triangles {}", k.triangle_count());
            println!("euler {}", k.euler_characteristic());
        }
        Command::Pairs(args) => {
            let (grid, field) = args.field.load()?;
            let k = SimplicialComplex::from_grid(&grid);
            let f = Filtration::lower_star(&k, &field, !args.field.no_negate)?;
            let pairs = persistence::compute_pairs(&k, &f)?;
            write_output(args.output.as_deref(), &io::format_pairs(&pairs))?;
        }
        Command::Reconstruct(args) => reconstruct_cmd(&args, false)?,
        Command::Oracle(args) => reconstruct_cmd(&args, true)?,
        Command::Generate(args) => {
            let grid = GridSpec::new(&args.dims)?;
            let text = fs::read_to_string(&args.graph)
                .with_context(|| format!("reading {}", args.graph.display()))?;
            let graph = io::parse_hidden_graph(&text)?;
            let params = NoiseParams {
                beta: args.beta,
                nu: args.nu,
                w: args.w,
                seed: args.seed,
            };
            let inst = noise_model::generate_instance(&grid, &graph, &params)?;
            if args.binary {
                io::write_field_binary(&args.field_out, &grid, &inst.field)?;
            } else {
                io::write_field(&args.field_out, &grid, &inst.field)?;
            }
            if let Some(p) = &args.mask_out {
                write_output(Some(p), &io::format_mask(&grid, &inst.mask))?;
            }
            if let Some(p) = &args.truth_out {
                let k = SimplicialComplex::from_grid(&grid);
                write_output(Some(p), &io::format_truth(&k, &inst.truth))?;
            }
        }
        Command::Verify(args) => return verify_cmd(&args),
        Command::Threshold(args) => {
            let (grid, field) = io::read_field(&args.input)
                .with_context(|| format!("reading {}", args.input.display()))?;
            let k = SimplicialComplex::from_grid(&grid);
            let res = noise_model::threshold_baseline(&k, &field, args.t);
            let kept = res.inside.iter().filter(|&&b| b).count();
            println!("vertices {kept}");
            println!("components {}", res.components);
            println!("betti1 {}", res.betti1);
            if let Some(p) = &args.output {
                let mask = noise_model::NeighborhoodMask::new(res.inside);
                write_output(Some(p), &io::format_mask(&grid, &mask))?;
            }
        }
        Command::Bench(args) => {
            check_delta(args.delta)?;
            let (grid, field) = match &args.input {
                Some(p) => io::read_field(p).with_context(|| format!("reading {}", p.display()))?,
                None => {
                    let (grid, inst) = lattice_instance(&[args.size, args.size], args.seed)?;
                    (grid, inst.field)
                }
            };
            let k = SimplicialComplex::from_grid(&grid);
            let times = time_stages(&k, &field, args.delta, true, args.reps)?;
            println!(
                "bench vertices {} edges {} triangles {} delta {} runs {}",
                k.vertex_count(),
                k.edge_count(),
                k.triangle_count(),
                args.delta,
                args.reps.max(1)
            );
            println!("pre-process {:.6}", times.persistence.as_secs_f64());
            println!("oracle-stage {:.6}", times.oracle.as_secs_f64());
            println!("simplified-stage {:.6}", times.simplified.as_secs_f64());
            println!("speedup {:.3}", times.speedup());
        }
    }
    Ok(0)
}

fn reconstruct_cmd(args: &ReconstructArgs, oracle: bool) -> anyhow::Result<()> {
    check_delta(args.delta)?;
    let (grid, field) = args.field.load()?;
    let k = SimplicialComplex::from_grid(&grid);
    let f = Filtration::lower_star(&k, &field, !args.field.no_negate)?;
    let pairs = persistence::compute_pairs(&k, &f)?;
    let graph = if oracle {
        morse_oracle::oracle_reconstruct_with_pairs(&k, &f, &pairs, args.delta)?
    } else {
        reconstruct::reconstruct_with_pairs(&k, &f, &pairs, args.delta)?
    };
    write_output(args.output.as_deref(), &io::format_graph(&k, &graph))
}

fn verify_cmd(args: &VerifyArgs) -> anyhow::Result<u8> {
    let read = |p: &Path| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let ghat = io::parse_graph(&read(&args.graph)?)?;
    let truth = io::parse_graph(&read(&args.truth)?)?;
    let (_, mask) = io::parse_mask(&read(&args.mask)?)?;

    if let (Some(delta), Some(beta), Some(nu)) = (args.delta, args.beta, args.nu) {
        let params = NoiseParams { beta, nu, w: 1.0, seed: 0 };
        if !params.delta_in_range(delta) {
            eprintln!("warning: delta {delta} is outside [{nu}, {}); guarantees do not apply", beta - nu);
        }
    }

    let (gb, tb) = (ghat.betti1(), truth.betti1());
    let checks = [
        ("betti1", gb == tb, format!("reconstructed {gb}, truth {tb}")),
        (
            "containment",
            noise_model::contains_graph(&ghat.vertex_ids(), &ghat.edges, &mask),
            format!("{} vertices, {} edges", ghat.vertices.len(), ghat.edges.len()),
        ),
        (
            "truth-in-mask",
            noise_model::contains_graph(&truth.vertex_ids(), &truth.edges, &mask),
            format!("{} truth vertices", truth.vertices.len()),
        ),
    ];
    let mut ok = true;
    for (name, pass, detail) in checks {
        println!("{} {name} ({detail})", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    }
    Ok(if ok { 0 } else { EXIT_VERIFY_FAILED })
}

fn main() -> ExitCode {
    // Usage errors exit 1; code 2 is reserved for noise-model violations.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let model = matches!(
                err.downcast_ref::<morse_graph::Error>(),
                Some(morse_graph::Error::NoiseModelViolation(_))
            );
            ExitCode::from(if model { EXIT_MODEL_VIOLATION } else { EXIT_ERROR })
        }
    }
}
