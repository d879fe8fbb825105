use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbitlab::commands::{self, Failure, Format, OrbitArgs, SurveyArgs};
use orbitlab::Config;
use orbitlab_core::Method;

#[derive(Parser)]
#[command(name = "orbitlab", version, about = "Finite orbits of x -> 2x, 3x (mod 1)")]
struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for every file the command writes.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the orbits partitioning {1/n, ..., (n-1)/n}.
    Decompose {
        n: u64,
        #[arg(long, default_value = "cosets")]
        method: Method,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Survey unit-level orbits for every n in from..=to coprime to 6.
    Survey {
        from: u64,
        to: u64,
        /// Write distances_<n>.csv for this denominator (repeatable).
        #[arg(long = "histogram", value_name = "N")]
        histogram_ns: Vec<u64>,
        /// Upper edge of the distance histograms; larger distances land in the last bin.
        #[arg(long, default_value_t = 0.2)]
        hist_upper: f64,
        /// Denominators per batch between store appends.
        #[arg(long, default_value_t = 64)]
        chunk: usize,
    },
    /// Report on the orbit of k/n and write its artifacts.
    Orbit {
        k: u64,
        n: u64,
        /// Write hist_<n>_<rep>.csv.
        #[arg(long)]
        histogram: bool,
        /// Write cdf_<n>_<rep>.csv.
        #[arg(long)]
        cdf: bool,
        /// Write sym_<n>_<rep>.pgm.
        #[arg(long)]
        bitmap: bool,
        /// Write sym_<n>_<rep>.pbm.
        #[arg(long)]
        pbm: bool,
        /// Bitmap side length.
        #[arg(long, default_value_t = orbitlab_core::symbolic::DEFAULT_SIZE)]
        size: usize,
        /// Print counts near 0, 1/2, 1/3, 2/3, 1/4, 3/4.
        #[arg(long)]
        shadow: bool,
        /// Also report the image under x -> qx.
        #[arg(long, value_name = "Q")]
        pushforward: Option<u64>,
    },
    /// Run the golden checks; exits 1 if any fails.
    Verify {
        /// Skip checks that need denominators above 100000.
        #[arg(long)]
        quick: bool,
    },
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    cfg.apply_env().map_err(Failure::Usage)?;
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let res = match cli.command {
        Command::Decompose { n, method, format } => {
            commands::decompose_cmd(n, method, format, &mut out)
        }
        Command::Survey {
            from,
            to,
            histogram_ns,
            hist_upper,
            chunk,
        } => {
            let args = SurveyArgs {
                from,
                to,
                histogram_ns,
                hist_upper,
                chunk,
            };
            commands::survey_cmd(&cfg, &args, &mut out)
        }
        Command::Orbit {
            k,
            n,
            histogram,
            cdf,
            bitmap,
            pbm,
            size,
            shadow,
            pushforward,
        } => {
            let args = OrbitArgs {
                k,
                n,
                histogram,
                cdf,
                bitmap,
                pbm,
                size,
                shadow,
                pushforward,
            };
            commands::orbit_cmd(&cfg, &args, &mut out)
        }
        Command::Verify { quick } => commands::verify_cmd(quick, &mut out),
    };
    out.flush()?;
    res
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
