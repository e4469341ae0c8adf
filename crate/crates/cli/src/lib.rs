//! Command-line front end: argument parsing, settings resolution, and the
//! stage commands that read and write pipeline artifacts.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod stages;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

use hiflab_core::evaluation::SweepDimension;
use hiflab_core::Preset;

use crate::config::Overrides;
use crate::error::{CliError, CliResult};
use crate::output::{Outputs, Stamp};
use crate::plot::PlotKind;
use crate::stages::Ctx;

pub const ALL_DIMENSIONS: [SweepDimension; 3] =
    [SweepDimension::Impedance, SweepDimension::InceptionAngle, SweepDimension::Location];

#[derive(Debug, Parser)]
#[command(name = "hiflab", version, about = "High-impedance fault simulation, ranking, and detection")]
pub struct Cli {
    /// TOML settings file layered over the preset.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Scale preset: desk or paper.
    #[arg(long, global = true)]
    pub preset: Option<Preset>,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "hiflab-out")]
    pub out: PathBuf,
    /// Treat unknown config keys as errors.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the training and holdout scenario catalogs.
    Simulate {
        /// Also write the first N training waveforms as record files.
        #[arg(long, default_value_t = 0)]
        waveforms: usize,
    },
    /// Extract per-event features, or per-window features of one record.
    Extract {
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// A record CSV written by `simulate --waveforms`.
        #[arg(long, conflicts_with = "catalog")]
        record: Option<PathBuf>,
    },
    /// Rank channels by MDL importance.
    Rank {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Run the relay logic over every scenario in a catalog.
    Detect {
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Write bit traces for the first N records.
        #[arg(long, default_value_t = 0)]
        traces: usize,
    },
    /// Cross-validate the classifiers on the effective feature set.
    Evaluate {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        holdout: Option<PathBuf>,
    },
    /// Importance curves along one scenario dimension.
    Sweep {
        /// impedance, inception_angle, or location; all when omitted.
        #[arg(long)]
        dimension: Option<SweepDimension>,
    },
    /// Every stage in order.
    Pipeline {
        /// Restrict the sweep stage to one dimension.
        #[arg(long)]
        dimension: Option<SweepDimension>,
    },
    /// Turn an artifact into a plot-ready CSV table.
    ExportPlot {
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long)]
        input: PathBuf,
        /// Destination file; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a config file without running anything.
    ValidateConfig { path: PathBuf },
    /// Print the resolved settings.
    ShowConfig,
}

fn dims(d: Option<SweepDimension>) -> Vec<SweepDimension> {
    d.map_or_else(|| ALL_DIMENSIONS.to_vec(), |d| vec![d])
}

/// Execute one parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    let over = Overrides { preset: cli.preset, seed: cli.seed };
    if let Command::ValidateConfig { path } = &cli.command {
        let table = config::read_table(path)?;
        let loaded = config::resolve(Some((table, path)), over)?;
        if !loaded.unknown_keys.is_empty() {
            let list = loaded.unknown_keys.join(", ");
            if cli.strict {
                return Err(CliError::Usage(format!("unknown config keys: {list}")));
            }
            eprintln!("warning: ignoring unknown config keys: {list}");
        }
        println!("{}: ok (preset {}, digest {})", path.display(), loaded.settings.preset, loaded.settings.digest());
        return Ok(());
    }
    let settings = config::load(cli.config.as_deref(), over, cli.strict)?.settings;
    if let Command::ShowConfig = cli.command {
        print!("{}", config::dump(&settings)?);
        return Ok(());
    }
    let stamp = Stamp { seed: settings.seed, config_digest: settings.digest() };
    if let Command::ExportPlot { kind, input, output } = &cli.command {
        let table = plot::export(*kind, input, &settings)?;
        match output {
            Some(path) => {
                let mut sink = Outputs::new(path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(".".as_ref()), stamp)?;
                let text = format!("{}{table}", sink.stamp().header());
                sink.write_raw(path, text.as_bytes())?;
            }
            None => print!("{table}"),
        }
        return Ok(());
    }
    let mut ctx = Ctx { out: Outputs::new(&cli.out, stamp)?, settings };
    let result = dispatch(&mut ctx, cli.command);
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            Ok(())
        }
        Err(e) => {
            ctx.out.rollback();
            Err(e)
        }
    }
}

fn dispatch(ctx: &mut Ctx, command: Command) -> CliResult<Vec<String>> {
    let one = |r: CliResult<String>| r.map(|s| vec![s]);
    match command {
        Command::Simulate { waveforms } => {
            stages::write_manifest(ctx)?;
            one(stages::simulate(ctx, waveforms))
        }
        Command::Extract { catalog, record } => one(stages::extract(ctx, catalog.as_deref(), record.as_deref())),
        Command::Rank { features, catalog } => one(stages::rank(ctx, features.as_deref(), catalog.as_deref())),
        Command::Detect { catalog, traces } => one(stages::detect(ctx, catalog.as_deref(), traces)),
        Command::Evaluate { features, report, holdout } => {
            one(stages::evaluate(ctx, features.as_deref(), report.as_deref(), holdout.as_deref()))
        }
        Command::Sweep { dimension } => one(stages::sweep(ctx, &dims(dimension))),
        Command::Pipeline { dimension } => stages::pipeline(ctx, &dims(dimension)),
        Command::ExportPlot { .. } | Command::ValidateConfig { .. } | Command::ShowConfig => {
            Err(CliError::Internal("command handled before dispatch".into()))
        }
    }
}
