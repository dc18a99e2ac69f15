//! The `ocofdm` command line: sweep, single, plot and replay.
//!
//! Exit codes: 0 success, 1 runtime failure (including a failed CRC on
//! replay), 2 configuration, schema or malformed-input errors.

mod commands;
pub mod config;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_plot, cmd_replay, cmd_single, cmd_sweep, SingleOptions};
pub use config::RunConfig;
pub use plot::PlotKind;

use crate::decode::ReceiverKind;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Schema(_) | Error::MalformedFile(_) | Error::Json(_) => EXIT_CONFIG,
        Error::BadOversampling(_) | Error::TapDelayExceedsCp { .. } | Error::BadTapProfile => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

#[derive(Parser, Debug)]
#[command(name = "ocofdm", version, about = "Oversampled OFDM receiver simulator")]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// More progress output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Seed override; `OO_SEED` is used when neither this nor the config sets one.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `--key=value` overrides of configuration keys.
    #[arg(skip)]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    pub fn all_overrides(&self) -> Vec<String> {
        let mut v = self.overrides.clone();
        if let Some(s) = self.seed {
            v.push(format!("--seed={s}"));
        }
        v
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a Monte-Carlo sweep and write the sweep and power-savings CSVs.
    Sweep(ConfigArgs),
    /// One transmit, channel and receive pass with diagnostic dumps.
    Single {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Write the detection metric as lag,metric CSV.
        #[arg(long)]
        dump_corr: bool,
        /// Write every compensated copy per symbol and subcarrier.
        #[arg(long)]
        dump_copies: bool,
        /// Write copy-averaged constellation points.
        #[arg(long)]
        dump_constellation: bool,
        /// Disable channel noise.
        #[arg(long)]
        noiseless: bool,
    },
    /// Render an SVG from a sweep CSV.
    Plot {
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "ber")]
        kind: PlotKindArg,
        /// Output file; defaults to the CSV path with the kind and `.svg`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Target PRR for the savings plot.
        #[arg(long, default_value_t = 0.9)]
        target: f64,
        /// Receiver compared against the baseline for the savings plot.
        #[arg(long, default_value = "tfi_joint")]
        receiver: String,
    },
    /// Decode a recorded sample file described by its JSON sidecar.
    Replay {
        samples: PathBuf,
        /// Sidecar path; defaults to `<samples>.json`.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Receiver settings; defaults apply without one.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Receiver; defaults to tfi_joint when the capture is oversampled.
        #[arg(long)]
        receiver: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PlotKindArg {
    Ber,
    Prr,
    Sync,
    Savings,
}

impl From<PlotKindArg> for PlotKind {
    fn from(k: PlotKindArg) -> Self {
        match k {
            PlotKindArg::Ber => PlotKind::Ber,
            PlotKindArg::Prr => PlotKind::Prr,
            PlotKindArg::Sync => PlotKind::Sync,
            PlotKindArg::Savings => PlotKind::Savings,
        }
    }
}

fn parse_receiver(s: &str) -> Result<ReceiverKind, Error> {
    ReceiverKind::parse(s).ok_or_else(|| Error::Config(format!("unknown receiver `{s}`")))
}

fn long_flags(cmd: &clap::Command, out: &mut Vec<String>) {
    out.extend(cmd.get_arguments().filter_map(|a| a.get_long().map(str::to_string)));
    for sub in cmd.get_subcommands() {
        long_flags(sub, out);
    }
}

/// Separates `--key=value` config overrides from the arguments clap knows.
fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<String>) {
    let mut known = Vec::new();
    long_flags(&Cli::command(), &mut known);
    let (mut kept, mut overrides) = (Vec::new(), Vec::new());
    for (i, a) in args.into_iter().enumerate() {
        let key = a.strip_prefix("--").and_then(|b| b.split_once('=')).map(|(k, _)| k);
        match key {
            Some(k) if i > 0 && !known.iter().any(|n| n == k) => overrides.push(a),
            _ => kept.push(a),
        }
    }
    (kept, overrides)
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    let args: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let (args, overrides) = split_overrides(args);
    let cli = match Cli::try_parse_from(args) {
        Ok(mut c) => {
            match &mut c.command {
                Command::Sweep(a) | Command::Single { cfg: a, .. } => a.overrides = overrides,
                _ if !overrides.is_empty() => {
                    eprintln!("error: unexpected argument `{}`", overrides[0]);
                    return EXIT_CONFIG;
                }
                _ => {}
            }
            c
        }
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.jobs {
        // Fails only when a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(&a.config, &a.all_overrides(), verbose),
        Command::Single { cfg, dump_corr, dump_copies, dump_constellation, noiseless } => cmd_single(
            &cfg.config,
            &cfg.all_overrides(),
            &SingleOptions { dump_corr, dump_copies, dump_constellation, noiseless },
            verbose,
        ),
        Command::Plot { csv, kind, out, target, receiver } => {
            parse_receiver(&receiver).and_then(|r| cmd_plot(&csv, kind.into(), out.as_deref(), target, r))
        }
        Command::Replay { samples, sidecar, config, receiver } => match receiver.as_deref().map(parse_receiver).transpose() {
            Ok(r) => cmd_replay(&samples, sidecar.as_deref(), config.as_deref(), r),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
