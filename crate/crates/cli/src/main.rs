use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shearkit::commands::{self, FieldFormat};
use shearkit::config::{Config, Overrides, CONFIG_ENV};
use shearkit::document::DistributionDoc;
use shearkit::error::{CliError, Result, EXIT_CODES};
use shearkit::formats::{load_field, load_volume, save_volume};
use shearkit::table::render;

const AFTER_HELP: &str = "Configuration precedence, lowest first: built-in defaults, the file named by \
SHEARKIT_CONFIG (read only when --config is absent), the --config file, then flags.";

#[derive(Parser)]
#[command(name = "shearkit", version, about = "Continuous shearlet transform toolkit")]
#[command(after_help = format!("{AFTER_HELP}\n\n{EXIT_CODES}"))]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input file (.fld or .cvol, depending on the command).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for the default. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Format of field outputs; inferred from the extension when absent.
    #[arg(long, global = true, value_enum)]
    format: Option<FieldFormat>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Report admissibility, moments and spatial decay of the generator;
    /// --output receives the decay table as CSV.
    Gen,
    /// Transform a .fld field into a .cvol volume plus a seminorm table.
    Analyze {
        /// Seminorm CSV path; defaults to the output path with a .seminorms.csv suffix.
        #[arg(long)]
        seminorms: Option<PathBuf>,
        /// Largest weight order k1, k2, l, m in the table.
        #[arg(long, default_value_t = 2)]
        max_order: u32,
    },
    /// Synthesize a field from a .cvol volume.
    Synthesize,
    /// Analyze and resynthesize a field, reporting the defects.
    Roundtrip,
    /// Pair a distribution with a test field through its shearlet coefficients.
    Desingularize {
        /// Distribution JSON document.
        #[arg(long)]
        distribution: PathBuf,
    },
    /// Run the acceptance criteria.
    Selftest,
    /// Print the effective configuration as JSON.
    Config,
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| CliError::ConfigInvalid(format!("--{flag} is required for this command")))
}

fn run(cli: &Cli, cfg: &Config) -> Result<()> {
    let c = &cli.common;
    match &cli.cmd {
        Cmd::Gen => {
            let r = commands::gen(cfg)?;
            print!("{}", r.text);
            if let Some(out) = &c.output {
                std::fs::write(out, render(&r.decay)).map_err(|e| CliError::io(out, e))?;
            }
        }
        Cmd::Analyze { seminorms, max_order } => {
            let f = load_field(need(&c.input, "input")?)?;
            let out = need(&c.output, "output")?;
            let a = commands::analyze(cfg, &f, *max_order)?;
            save_volume(out, &a.volume)?;
            let table = seminorms.clone().unwrap_or_else(|| out.with_extension("seminorms.csv"));
            std::fs::write(&table, render(&a.seminorms)).map_err(|e| CliError::io(&table, e))?;
            println!("wrote {} ({} coefficients) and {} ({} seminorms)", out.display(), a.volume.values.len(), table.display(), a.seminorms.len());
        }
        Cmd::Synthesize => {
            let v = load_volume(need(&c.input, "input")?)?;
            let out = need(&c.output, "output")?;
            let f = commands::synthesize_volume(cfg, &v)?;
            commands::write_field(out, &f, FieldFormat::for_path(c.format, out))?;
            println!("wrote {}", out.display());
        }
        Cmd::Roundtrip => {
            let f = load_field(need(&c.input, "input")?)?;
            let (back, report) = commands::roundtrip(cfg, &f)?;
            print!("{}", report.text());
            if let Some(out) = &c.output {
                commands::write_field(out, &back, FieldFormat::for_path(c.format, out))?;
            }
            report.check()?;
        }
        Cmd::Desingularize { distribution } => {
            let test = load_field(need(&c.input, "input")?)?;
            let d = DistributionDoc::load(distribution)?;
            print!("{}", commands::desingularize(cfg, &d, &test)?);
        }
        Cmd::Selftest => {
            commands::selftest(cfg, |line| println!("{line}"))?;
        }
        Cmd::Config => println!("{}", cfg.to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let overrides = Overrides { seed: cli.common.seed, threads: cli.common.threads };
    let result = Config::resolve(cli.common.config.as_deref(), env.as_deref(), &overrides).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| CliError::ConfigInvalid(format!("thread pool: {e}")))?;
        pool.install(|| run(&cli, &cfg))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
