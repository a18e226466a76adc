mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Certified rate computation and verification for semigroups generated
/// by accretive operators.
#[derive(Parser)]
#[command(name = "accretive", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute rate-certificate tables from a problem spec.
    Certify {
        #[command(subcommand)]
        family: CertifyFamily,
    },
    /// Verify a certificate (or the negative controls) on the instance.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Claim to verify (plant_main, reich_main, resolvent_roc,
        /// semigroup_roc, res_cauchy, res_semi_comb, miyadera,
        /// reich_phi_inf, reich_res_cauchy, negative_controls).
        #[arg(long)]
        claim: String,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid_per_decade: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full axiom/invariant suite on the instance.
    Axioms {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the trajectory t ↦ S(t)x as CSV.
    Evolve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        #[arg(long)]
        grid_per_decade: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CertifyFamily {
    /// Small-time rates: CSV columns (eps, phi1, phi2, phi3, phi4, Phi).
    Plant {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.1")]
        eps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Large-time rates: CSV columns (eps, phi_inf, phi2, Phi).
    Reich {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25")]
        eps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Certify { family } => match family {
            CertifyFamily::Plant { spec, eps, out } => commands::certify_plant(&spec, &eps, out),
            CertifyFamily::Reich { spec, eps, out } => commands::certify_reich(&spec, &eps, out),
        },
        Command::Verify {
            spec,
            claim,
            eps,
            seed,
            grid_per_decade,
            out,
        } => commands::verify(&spec, &claim, eps, seed, grid_per_decade, out),
        Command::Axioms { spec, seed, out } => commands::axioms(&spec, seed, out),
        Command::Evolve {
            spec,
            t_max,
            delta,
            grid_per_decade,
            out,
        } => commands::evolve(&spec, t_max, delta, grid_per_decade, out),
    };
    match outcome {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
