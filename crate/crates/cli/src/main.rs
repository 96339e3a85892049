use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qmetric_core::fidelity::{evaluate, FidelityMeasure};
use qmetric_core::harness::format::sig12;
use qmetric_core::harness::{
    parse_seed, reproduce, run_suite, write_report, ExampleId, RunConfig, Status,
};
use qmetric_core::io::{read_channel, read_state, write_state};
use qmetric_core::metrics::{g_metric, pg_metric, trace_metric, MetricReport};
use qmetric_core::states::random_density;
use qmetric_core::{DensityMatrix, Error};

#[derive(Parser)]
#[command(name = "qmetric", version, about = "Fidelity-based distances between quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure between two state files.
    Metric {
        #[arg(long, value_enum)]
        measure: Measure,
        a: PathBuf,
        b: PathBuf,
        /// Run configuration (only the optimizer settings are used).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run every registered property and write a JSON report.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print published values next to computed ones.
    Reproduce {
        #[arg(long, value_parser = parse_example)]
        id: ExampleId,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a seeded random density matrix.
    RandomState {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_parser = parse_seed_arg)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a Kraus channel to a state.
    ApplyChannel {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    #[value(name = "F")]
    F,
    #[value(name = "G")]
    G,
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    #[value(name = "Dtr")]
    Dtr,
    #[value(name = "Dpg")]
    Dpg,
    #[value(name = "Dg")]
    Dg,
}

fn parse_example(s: &str) -> Result<ExampleId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_seed_arg(s: &str) -> Result<u64, String> {
    parse_seed(s).map_err(|e| e.to_string())
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, Error> {
    let config = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    config.with_env_seed()
}

fn print_state(label: &str, rho: &DensityMatrix) {
    println!("{label}:");
    let m = rho.matrix();
    for i in 0..m.dim() {
        let row: Vec<String> = (0..m.dim())
            .map(|j| {
                let z = m.get(i, j);
                format!("({}, {})", sig12(z.re), sig12(z.im))
            })
            .collect();
        println!("  [{}]", row.join(", "));
    }
}

fn print_report(report: &MetricReport) {
    println!("value: {}", sig12(report.value));
    if let Some(w) = &report.witness {
        print_state("witness", w);
    }
    let d = &report.diagnostics;
    println!("restarts: {}", d.restarts);
    println!("iterations: {}", d.iterations);
    println!("residual: {}", sig12(d.residual));
}

fn cmd_metric(measure: Measure, a: &PathBuf, b: &PathBuf, config: Option<&PathBuf>) -> Result<(), Error> {
    let config = load_config(config)?;
    let rho = read_state(a)?;
    let sigma = read_state(b)?;
    let fidelity = |m: FidelityMeasure| -> Result<(), Error> {
        let v = evaluate(m, &rho, &sigma)?;
        println!("measure: {m}");
        println!("value: {}", sig12(v.value));
        Ok(())
    };
    match measure {
        Measure::F => fidelity(FidelityMeasure::F),
        Measure::G => fidelity(FidelityMeasure::G),
        Measure::A => fidelity(FidelityMeasure::A),
        Measure::B => fidelity(FidelityMeasure::B),
        Measure::C => fidelity(FidelityMeasure::C),
        Measure::Dtr => {
            let v = trace_metric(&rho, &sigma)?;
            println!("measure: Dtr");
            println!("value: {}", sig12(v));
            Ok(())
        }
        Measure::Dpg => {
            println!("measure: Dpg");
            print_report(&pg_metric(&rho, &sigma)?);
            Ok(())
        }
        Measure::Dg => {
            println!("measure: Dg");
            print_report(&g_metric(&rho, &sigma, &config.optimizer)?);
            Ok(())
        }
    }
}

fn cmd_verify(config: Option<&PathBuf>, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let mut config = load_config(config)?;
    if let Some(out) = out {
        config.output_path = out;
    }
    let start = Instant::now();
    let report = run_suite(&config)?;
    write_report(&config.output_path, &report)?;
    for v in &report.verdicts {
        println!(
            "{:<10} {:<42} samples {:>5}  worst_margin {}  tolerance {}",
            v.status.to_string(),
            v.property_id,
            v.samples,
            sig12(v.worst_margin),
            sig12(v.tolerance),
        );
    }
    let s = report.summary;
    println!(
        "pass {}  fail {}  report_only {}  seed {:#x}  elapsed {} s  report {}",
        s.pass,
        s.fail,
        s.report_only,
        report.seed,
        sig12(start.elapsed().as_secs_f64()),
        config.output_path.display(),
    );
    let failed = report.verdicts.iter().any(|v| v.status == Status::Fail);
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_reproduce(id: ExampleId, config: Option<&PathBuf>) -> Result<ExitCode, Error> {
    let config = load_config(config)?;
    let r = reproduce(id, &config)?;
    print!("{r}");
    Ok(if r.holds() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Metric {
            measure,
            a,
            b,
            config,
        } => cmd_metric(measure, &a, &b, config.as_ref()).map(|()| ExitCode::SUCCESS),
        Command::Verify { config, out } => cmd_verify(config.as_ref(), out),
        Command::Reproduce { id, config } => cmd_reproduce(id, config.as_ref()),
        Command::RandomState {
            dim,
            rank,
            seed,
            out,
        } => {
            let rho = random_density(dim, rank, seed)?;
            write_state(&out, &rho)?;
            println!("purity: {}", sig12(rho.purity()));
            Ok(ExitCode::SUCCESS)
        }
        Command::ApplyChannel {
            channel,
            state,
            out,
        } => {
            let phi = read_channel(&channel)?;
            let rho = read_state(&state)?;
            let image = phi.apply(&rho)?;
            write_state(&out, &image)?;
            println!("dim: {}", image.dim());
            println!("purity: {}", sig12(image.purity()));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
