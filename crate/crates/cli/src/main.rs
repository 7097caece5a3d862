use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nightsched::{
    cmd_evaluate, cmd_schedule, cmd_simple_ga, file_digest, gen_scenario_equatorial,
    load_instance, load_schedule_file, CliError, ScheduleArgs, SimpleGaArgs,
};

/// Night observation scheduling for a robotic telescope: a Pareto search
/// over five schedule merits plus a simple visibility-ratio GA baseline.
#[derive(Parser)]
#[command(name = "nightsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Pareto-optimal night schedules with NSGA-II.
    Schedule {
        /// Problem instance JSON file.
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        population: usize,
        #[arg(long, default_value_t = 100)]
        generations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Crossover probability per offspring.
        #[arg(long = "crossover-p", default_value_t = 0.9)]
        crossover_p: f64,
        /// Mutation probability per offspring.
        #[arg(long = "mutation-p", default_value_t = 0.2)]
        mutation_p: f64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the elitist roulette-wheel baseline on the visibility ratio.
    SimpleGa {
        /// Problem instance JSON file.
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        population: usize,
        #[arg(long, default_value_t = 100)]
        generations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long = "mutation-p", default_value_t = 0.2)]
        mutation_p: f64,
        /// Fraction of the population kept (and mated) as the elite.
        #[arg(long, default_value_t = 0.1)]
        elite: f64,
        /// Repeat with seeds seed, seed+1, ...; emits the run index as the
        /// first column.
        #[arg(long)]
        runs: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the equatorial flat-field scenario instance.
    GenScenario {
        #[arg(long, default_value_t = 24)]
        count: usize,
        /// Site latitude, degrees.
        #[arg(long, default_value_t = 36.0)]
        lat: f64,
        #[arg(long = "night-hours", default_value_t = 12.0)]
        night_hours: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the instance here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a schedule file against an instance.
    Evaluate {
        /// Problem instance JSON file.
        instance: PathBuf,
        /// Schedule file: one `start ticket loops` row per entry.
        schedule: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_out(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(path: &Option<PathBuf>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "<stdout>".into()),
        source,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Schedule {
            instance,
            population,
            generations,
            seed,
            crossover_p,
            mutation_p,
            out,
        } => {
            let digest = file_digest(&instance)?;
            let problem = load_instance(&instance)?;
            let args = ScheduleArgs {
                population,
                generations,
                seed,
                crossover_p,
                mutation_p,
            };
            let mut sink = open_out(out.as_ref()).map_err(io_err(&out))?;
            cmd_schedule(&problem, &digest, &args, &mut sink)
                .and_then(|()| sink.flush())
                .map_err(io_err(&out))?;
        }
        Command::SimpleGa {
            instance,
            population,
            generations,
            seed,
            mutation_p,
            elite,
            runs,
            out,
        } => {
            let digest = file_digest(&instance)?;
            let problem = load_instance(&instance)?;
            let args = SimpleGaArgs {
                population,
                generations,
                seed,
                mutation_p,
                elite,
                runs,
            };
            let mut sink = open_out(out.as_ref()).map_err(io_err(&out))?;
            cmd_simple_ga(&problem, &digest, &args, &mut sink)
                .and_then(|()| sink.flush())
                .map_err(io_err(&out))?;
        }
        Command::GenScenario {
            count,
            lat,
            night_hours,
            seed,
            out,
        } => {
            let instance = gen_scenario_equatorial(count, lat, night_hours, seed);
            let text =
                serde_json::to_string_pretty(&instance).expect("instance always serializes");
            let mut sink = open_out(out.as_ref()).map_err(io_err(&out))?;
            writeln!(sink, "{text}")
                .and_then(|()| sink.flush())
                .map_err(io_err(&out))?;
        }
        Command::Evaluate {
            instance,
            schedule,
            out,
        } => {
            let digest = file_digest(&instance)?;
            let problem = load_instance(&instance)?;
            let sched = load_schedule_file(&schedule, &problem)?;
            let mut sink = open_out(out.as_ref()).map_err(io_err(&out))?;
            cmd_evaluate(&problem, &digest, &sched, &mut sink)
                .and_then(|()| sink.flush())
                .map_err(io_err(&out))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("nightsched: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
