use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nlew::scan::{
    cmd_certify, cmd_decompose, cmd_detect, cmd_sepmax, reproduce, write_intervals_csv,
    CertifyRequest, DecomposeRequest, ReproduceSettings, SepMaxRequest, SweepConfig,
};
use nlew::Error;

#[derive(Parser)]
#[command(name = "nlew", version, about = "Nonlinear entanglement witness sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a state family and extract detection intervals.
    Detect,
    /// Check a witness on seeded separable samples and the state zoo.
    Certify,
    /// Maximize Tr(W^2 rho) over product states.
    Sepmax,
    /// Expand an operator over local Pauli or Gell-Mann products.
    Decompose,
    /// Run every published-value checkpoint.
    Reproduce,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::Unknown { .. }
        | Error::ParameterCount { .. }
        | Error::ParameterOutOfRange { .. }
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn need_config(cli: &Cli) -> Result<&Path, Error> {
    cli.config.as_deref().ok_or_else(|| Error::Config {
        field: "--config".into(),
        message: "this subcommand needs a JSON configuration".into(),
    })
}

fn save_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Error> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(path)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Detect => {
            let mut cfg = SweepConfig::load(need_config(cli)?)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let outcome = cmd_detect(&cfg, &cli.out)?;
            let intervals = cli.out.join("intervals.csv");
            write_intervals_csv(&outcome.report.summary, fs::File::create(&intervals)?)?;
            match cli.format {
                Format::Json => print_json(&outcome.report.summary)?,
                Format::Csv => write_intervals_csv(&outcome.report.summary, io::stdout().lock())?,
            }
            eprintln!(
                "wrote {}, {}, {}",
                outcome.csv_path.display(),
                outcome.json_path.display(),
                intervals.display()
            );
            Ok(true)
        }
        Command::Certify => {
            let mut req = CertifyRequest::load(need_config(cli)?)?;
            if let Some(s) = cli.seed {
                req.seed = s;
            }
            let report = cmd_certify(&req)?;
            save_json(&cli.out, "certify.json", &report)?;
            match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout().lock());
                    w.write_record(["passed", "samples"])?;
                    w.write_record([report.passed().to_string(), req.samples.to_string()])?;
                    w.flush()?;
                }
            }
            Ok(report.passed())
        }
        Command::Sepmax => {
            let mut req = SepMaxRequest::load(need_config(cli)?)?;
            if let Some(s) = cli.seed {
                req.settings.seed = s;
            }
            let report = cmd_sepmax(&req)?;
            save_json(&cli.out, "sepmax.json", &report)?;
            match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => {
                    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                    let mut w = csv::Writer::from_writer(io::stdout().lock());
                    w.write_record(["witness", "max_value", "closed_form", "reported", "restarts", "converged"])?;
                    w.write_record([
                        report.witness.clone().unwrap_or_default(),
                        report.result.max_value.to_string(),
                        opt(report.closed_form),
                        opt(report.reported),
                        report.result.restarts_used.to_string(),
                        report.result.converged.to_string(),
                    ])?;
                    w.flush()?;
                }
            }
            Ok(true)
        }
        Command::Decompose => {
            let req = DecomposeRequest::load(need_config(cli)?)?;
            let report = cmd_decompose(&req)?;
            save_json(&cli.out, "decompose.json", &report)?;
            report.result.write_csv(fs::File::create(cli.out.join("decompose.csv"))?)?;
            match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => report.result.write_csv(io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Reproduce => {
            let mut settings = match &cli.config {
                Some(p) => {
                    let text = fs::read_to_string(p)?;
                    serde_json::from_str::<ReproduceSettings>(&text).map_err(|e| Error::Config {
                        field: "config".into(),
                        message: e.to_string(),
                    })?
                }
                None => ReproduceSettings::default(),
            };
            if let Some(s) = cli.seed {
                settings.seed = s;
            }
            let report = reproduce(&settings);
            save_json(&cli.out, "reproduce.json", &report)?;
            fs::write(cli.out.join("reproduce.txt"), report.table())?;
            match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => print!("{}", report.table()),
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
