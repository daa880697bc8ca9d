use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ppsnd_bench::run::{load_records, save_records, write_csv};
use ppsnd_bench::{run_bench, summarize, BenchConfig, BenchError};
use ppsnd_core::protocol::ProtocolKind;
use ppsnd_sim::{Scenario, ScenarioError};

const CONFIG_ERROR: u8 = 2;
const SIM_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "ppsnd", version, about = "Secure neighbor discovery benchmarks and simulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Proto {
    Snd,
    Ppsnd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time the cryptographic path of complete sessions.
    Bench {
        #[arg(long, value_enum)]
        protocol: Proto,
        #[arg(long, default_value_t = 2048)]
        bits: u64,
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean and 95% interval per protocol, role and key size.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Plot-ready CSV; defaults to `<in>.summary.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one scenario file and write its trace.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
}

fn summary_path(input: &Path) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(".summary.csv");
    PathBuf::from(s)
}

fn bench(protocol: Proto, bits: u64, trials: u32, seed: u64, out: &Path) -> Result<(), BenchError> {
    let protocol = match protocol {
        Proto::Snd => ProtocolKind::Snd,
        Proto::Ppsnd => ProtocolKind::PpSnd,
    };
    let config = BenchConfig::new(protocol, bits, trials, seed)?;
    let records = run_bench(&config)?;
    save_records(&records, out)?;
    eprintln!("{} records written to {}", records.len(), out.display());
    Ok(())
}

fn summarize_cmd(input: &Path, out: Option<PathBuf>) -> Result<(), BenchError> {
    let rows = summarize(&load_records(input)?)?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{:<6} {:<10} {:>5} {:>6} {:>12} {:>12} {:>12}", "proto", "role", "bits", "n", "mean_ms", "ci95_low", "ci95_high")?;
    for r in &rows {
        writeln!(
            stdout,
            "{:<6} {:<10} {:>5} {:>6} {:>12.4} {:>12.4} {:>12.4}",
            r.protocol.to_string(),
            format!("{:?}", r.role).to_lowercase(),
            r.key_bits,
            r.n,
            r.mean_ms,
            r.ci95_low_ms,
            r.ci95_high_ms
        )?;
    }
    let out = out.unwrap_or_else(|| summary_path(input));
    write_csv(&rows, File::create(&out)?)?;
    eprintln!("summary written to {}", out.display());
    Ok(())
}

fn simulate(scenario: &Path, trace: &Path) -> Result<(), ScenarioError> {
    let built = Scenario::load(scenario)?.run()?;
    let mut w = BufWriter::new(File::create(trace)?);
    w.write_all(built.world.trace_jsonl().as_bytes())?;
    w.flush()?;
    for (label, &id) in &built.ids {
        for r in built.world.results(id) {
            let d = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
            println!("{label}\t{:?}\td_tof={}\td_loc={}", r.outcome, d(r.d_tof_m), d(r.d_he_m));
        }
    }
    println!("trace sha256 {}", hex::encode(built.world.trace_digest()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.cmd {
        Cmd::Bench { protocol, bits, trials, seed, out } => {
            bench(protocol, bits, trials, seed, &out).map_err(|e| (e.is_config(), e.to_string()))
        }
        Cmd::Summarize { input, out } => summarize_cmd(&input, out).map_err(|e| (e.is_config(), e.to_string())),
        Cmd::Simulate { scenario, trace } => simulate(&scenario, &trace).map_err(|e| (e.is_config(), e.to_string())),
    };
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err((config, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(if config { CONFIG_ERROR } else { SIM_ERROR })
        }
    }
}
