//! Command-line driver for vector-field molecule studies.

mod commands;
mod config;
mod corpus_io;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use vecfield::corpus::CorpusSpec;

use commands::{parse_dims, parse_f64_list, parse_vec3};
use config::{parse_element_set, ConfigFile, FieldArgs, ProviderKind, ReconArgs};

#[derive(Parser)]
#[command(
    name = "vecfield",
    version,
    about = "Vector-field molecule toolkit: field export, reconstruction, sweeps, metrics",
    after_help = "The VECFIELD_SEED environment variable overrides the default seed; \
an explicit --seed flag overrides both. A --config file supplies flat key = value \
defaults that command-line flags take precedence over."
)]
struct Cli {
    /// Flat TOML config file (key = value) merged under command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed; default 42 unless VECFIELD_SEED is set.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the analytic field on a planar slice and write CSV rows
    /// x,y,z,element,vx,vy,vz,magnitude.
    FieldSlice {
        /// Input XYZ file.
        #[arg(long)]
        input: PathBuf,
        /// Plane center point "X,Y,Z" (default: molecule centroid).
        #[arg(long)]
        point: Option<String>,
        /// Plane normal "X,Y,Z" (default 0,0,1).
        #[arg(long, default_value = "0,0,1")]
        normal: String,
        /// Half-extent of the square window in Angstrom.
        #[arg(long, default_value_t = 5.0)]
        half_extent: f64,
        /// Samples per axis.
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Reconstruct every molecule of a corpus from its own field and report
    /// success rate and RMSD as JSON.
    Roundtrip {
        /// Directory of XYZ files.
        #[arg(long)]
        corpus: PathBuf,
        /// Field source: analytic, grid:L:SPACING, noisy:SIGMA, or
        /// spurious:GHOSTS:STRENGTH.
        #[arg(long, default_value = "analytic")]
        provider: String,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-molecule trajectory CSV dumps.
        #[arg(long)]
        dump_trajectories: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        recon: ReconArgs,
    },
    /// Compare field variants across providers; one CSV row per pair.
    FieldCompare {
        /// Directory of XYZ files.
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated variants (gaussian-clip, gaussian, tanh).
        #[arg(long, default_value = "gaussian-clip,gaussian,tanh")]
        variants: String,
        /// Comma-separated provider specs.
        #[arg(long, default_value = "analytic")]
        providers: String,
        /// Seeds per (variant, provider) cell.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        recon: ReconArgs,
    },
    /// Sweep one parameter over a value list, reporting reconstruction and
    /// distribution metrics per value.
    Sweep {
        /// Directory of XYZ files.
        #[arg(long)]
        corpus: PathBuf,
        /// Swept parameter: eps_db, t_max, or sigma_noise.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        recon: ReconArgs,
    },
    /// Dump the cosine schedule as CSV and run the oracle reverse-chain
    /// self-check.
    DiffusionDemo {
        /// Diffusion steps T.
        #[arg(long, default_value_t = 1000)]
        t_steps: usize,
        /// Cosine schedule offset.
        #[arg(long, default_value_t = 0.008)]
        s: f64,
        /// Latent shape "ROWSxCOLS".
        #[arg(long, default_value = "8x4")]
        dims: String,
        /// Schedule CSV path.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Summary JSON path (stdout when omitted).
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Evaluate a generated corpus against a reference corpus.
    Metrics {
        /// Directory of generated XYZ files.
        #[arg(long)]
        generated: PathBuf,
        /// Directory of reference XYZ files.
        #[arg(long)]
        reference: PathBuf,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional fixed-column CSV output path.
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Generate a synthetic corpus of random molecules.
    GenCorpus {
        /// Output directory for XYZ files.
        #[arg(long)]
        out: PathBuf,
        /// Number of molecules.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        min_atoms: usize,
        #[arg(long, default_value_t = 30)]
        max_atoms: usize,
        /// Element set: qm9 or geom.
        #[arg(long, default_value = "qm9")]
        elements: String,
        /// Minimum pairwise distance in Angstrom.
        #[arg(long, default_value_t = 1.0)]
        min_dist: f64,
        /// Minimum distance between same-element atoms in Angstrom.
        #[arg(long, default_value_t = 1.5)]
        min_same_dist: f64,
        /// Minimum distance between non-bonded atoms in Angstrom.
        #[arg(long, default_value_t = 1.7)]
        min_nonbonded_dist: f64,
        /// Packing density as cube volume per atom (Angstrom^3).
        #[arg(long, default_value_t = 8.0)]
        volume_per_atom: f64,
    },
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let cfg_file = ConfigFile::load(cli.config.as_deref())?;
    let seed = config::resolve_seed(cli.seed, &cfg_file)?;

    match cli.command {
        Command::FieldSlice {
            input,
            point,
            normal,
            half_extent,
            resolution,
            out,
            field,
        } => {
            let (params, elements) = field.resolve(&cfg_file)?;
            let point = point.as_deref().map(parse_vec3).transpose()?;
            let normal = parse_vec3(&normal)?;
            commands::cmd_field_slice(
                &input,
                point,
                normal,
                half_extent,
                resolution,
                out.as_deref(),
                params,
                &elements,
            )
        }
        Command::Roundtrip {
            corpus,
            provider,
            out,
            dump_trajectories,
            field,
            recon,
        } => {
            let (params, elements) = field.resolve(&cfg_file)?;
            let cfg = recon.resolve(&cfg_file, &elements)?;
            let kind = ProviderKind::parse(&provider)?;
            commands::cmd_roundtrip(
                &corpus,
                &kind,
                out.as_deref(),
                dump_trajectories.as_deref(),
                params,
                &elements,
                &cfg,
                seed,
            )
        }
        Command::FieldCompare {
            corpus,
            variants,
            providers,
            seeds,
            out,
            field,
            recon,
        } => {
            let (params, elements) = field.resolve(&cfg_file)?;
            let cfg = recon.resolve(&cfg_file, &elements)?;
            let variants: Vec<String> =
                variants.split(',').map(|s| s.trim().to_string()).collect();
            let providers: Vec<String> =
                providers.split(',').map(|s| s.trim().to_string()).collect();
            commands::cmd_field_compare(
                &corpus,
                &variants,
                &providers,
                seeds.max(1),
                out.as_deref(),
                params,
                &elements,
                &cfg,
                seed,
            )
        }
        Command::Sweep {
            corpus,
            parameter,
            values,
            out,
            field,
            recon,
        } => {
            let (params, elements) = field.resolve(&cfg_file)?;
            let cfg = recon.resolve(&cfg_file, &elements)?;
            let values = parse_f64_list(&values)?;
            commands::cmd_sweep(
                &corpus,
                &parameter,
                &values,
                out.as_deref(),
                params,
                &elements,
                &cfg,
                seed,
            )
        }
        Command::DiffusionDemo {
            t_steps,
            s,
            dims,
            out_csv,
            out_json,
        } => {
            let dims = parse_dims(&dims)?;
            commands::cmd_diffusion_demo(
                t_steps,
                s,
                dims,
                out_csv.as_deref(),
                out_json.as_deref(),
                seed,
            )
        }
        Command::Metrics {
            generated,
            reference,
            out,
            out_csv,
        } => commands::cmd_metrics(&generated, &reference, out.as_deref(), out_csv.as_deref()),
        Command::GenCorpus {
            out,
            count,
            min_atoms,
            max_atoms,
            elements,
            min_dist,
            min_same_dist,
            min_nonbonded_dist,
            volume_per_atom,
        } => {
            let spec = CorpusSpec {
                elements: parse_element_set(&elements)?,
                min_atoms,
                max_atoms,
                min_distance: min_dist,
                min_same_element_distance: min_same_dist,
                min_nonbonded_distance: min_nonbonded_dist,
                volume_per_atom,
            };
            commands::cmd_gen_corpus(&out, count, &spec, seed)
        }
    }
}
