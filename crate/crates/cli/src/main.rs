use clap::{Parser, Subcommand};
use elastic_scatter_cli::{run, Experiment, RunOptions};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "elastic-scatter", version, about = "Desk-scale elastic scattering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for sweep points.
    #[arg(long)]
    workers: Option<usize>,
    /// Output path prefix (overrides the config).
    #[arg(long)]
    out: Option<String>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Far fields and small-support criteria of constant disk sources over epsilon.
    SweepSmall(Common),
    /// Manufactured non-radiating sources: far-field nullity and constant calibration.
    NonradiatingAudit(Common),
    /// Probe identities, PDE residuals and paraboloid integrals against Monte Carlo.
    CgoVerify(Common),
    /// Integral identity on cap domains.
    IdentityCheck(Common),
    /// Identity terms against their structural bounds across K.
    KpointDecay(Common),
    /// Medium scattering solves and contraction bounds.
    MediumDemo(Common),
    /// Far-field difference of two disjoint small scatterers.
    Distinguish(Common),
}

fn main() {
    let cli = Cli::parse();
    let (exp, common) = match cli.command {
        Command::SweepSmall(c) => (Experiment::SweepSmall, c),
        Command::NonradiatingAudit(c) => (Experiment::NonradiatingAudit, c),
        Command::CgoVerify(c) => (Experiment::CgoVerify, c),
        Command::IdentityCheck(c) => (Experiment::IdentityCheck, c),
        Command::KpointDecay(c) => (Experiment::KpointDecay, c),
        Command::MediumDemo(c) => (Experiment::MediumDemo, c),
        Command::Distinguish(c) => (Experiment::Distinguish, c),
    };
    let opts = RunOptions {
        workers: common.workers,
        out: common.out,
        seed: common.seed,
    };
    match run(exp, &common.config, &opts) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
