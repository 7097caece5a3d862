//! The four commands, writing gnuplot-friendly space-separated reports:
//! comment lines start with `#`, data lines carry a stream tag (GEN, PARETO,
//! SCHED, MERIT, ...) so one file feeds several plots via filtering.

use std::io::{self, Write};

use nightsched_core::constraints::total_violations;
use nightsched_core::evolve::{run_nsga2, run_simple_ga, GAParams, RankedIndividual};
use nightsched_core::merit::objective_vector;
use nightsched_core::model::{account_usage, is_feasible, Schedule};
use nightsched_core::{ProblemInstance, RNG_ALGORITHM};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parameters of the `schedule` command.
#[derive(Debug, Clone)]
pub struct ScheduleArgs {
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
    pub crossover_p: f64,
    pub mutation_p: f64,
}

/// Runs the NSGA-II search and writes the full report: per-generation
/// averages, the Pareto front (raw minimization-oriented distance and
/// account deviation), and each front member's schedule.
pub fn cmd_schedule<W: Write>(
    instance: &ProblemInstance,
    digest: &str,
    args: &ScheduleArgs,
    out: &mut W,
) -> io::Result<()> {
    let params = GAParams {
        population_size: args.population,
        generations: args.generations,
        crossover_probability: args.crossover_p,
        mutation_probability: args.mutation_p,
        rng_seed: args.seed,
        ..GAParams::default()
    };
    writeln!(out, "# nightsched schedule v{VERSION}")?;
    writeln!(
        out,
        "# rng={RNG_ALGORITHM} seed={} population={} generations={} crossover_p={} mutation_p={}",
        args.seed, args.population, args.generations, args.crossover_p, args.mutation_p
    )?;
    writeln!(
        out,
        "# instance {digest} targets={} tickets={}",
        instance.targets().len(),
        instance.tickets().len()
    )?;
    writeln!(out, "# GEN g avg_alt avg_dist avg_AD avg_tdiv avg_odiv best_violations")?;
    writeln!(out, "# PARETO alt dist AD tdiv odiv")?;
    writeln!(out, "# SCHED member start ticket loops")?;

    let outcome = run_nsga2(instance, &params);
    for row in &outcome.stats {
        writeln!(
            out,
            "GEN {} {} {} {} {} {} {}",
            row.generation,
            row.avg_altitude,
            row.avg_distance,
            row.avg_account_dev,
            row.avg_target_diversity,
            row.avg_observation_diversity,
            row.best_violations
        )?;
    }
    for member in &outcome.pareto_front {
        write_pareto_row(member, out)?;
    }
    for (index, member) in outcome.pareto_front.iter().enumerate() {
        for entry in &member.schedule.entries {
            writeln!(
                out,
                "SCHED {index} {} {} {}",
                entry.start.unix(),
                instance
                    .ticket(entry.ticket)
                    .expect("front schedules resolve")
                    .id,
                entry.loops
            )?;
        }
    }
    Ok(())
}

/// Undoes the stored negation without ever printing a negative zero.
fn raw(negated: f64) -> f64 {
    -negated + 0.0
}

fn write_pareto_row<W: Write>(member: &RankedIndividual, out: &mut W) -> io::Result<()> {
    let v = member.objectives;
    writeln!(
        out,
        "PARETO {} {} {} {} {}",
        v.altitude,
        raw(v.distance_neg),
        raw(v.account_neg),
        v.target_diversity,
        v.observation_diversity
    )
}

/// Parameters of the `simple-ga` command.
#[derive(Debug, Clone)]
pub struct SimpleGaArgs {
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
    pub mutation_p: f64,
    pub elite: f64,
    /// When set, repeats with seeds seed, seed+1, ... and prefixes each GEN
    /// row with the run index.
    pub runs: Option<usize>,
}

/// Runs the visibility-ratio baseline GA and writes its convergence rows.
pub fn cmd_simple_ga<W: Write>(
    instance: &ProblemInstance,
    digest: &str,
    args: &SimpleGaArgs,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "# nightsched simple-ga v{VERSION}")?;
    writeln!(
        out,
        "# rng={RNG_ALGORITHM} seed={} population={} generations={} mutation_p={} elite={} runs={}",
        args.seed,
        args.population,
        args.generations,
        args.mutation_p,
        args.elite,
        args.runs.unwrap_or(1)
    )?;
    writeln!(
        out,
        "# instance {digest} targets={} tickets={}",
        instance.targets().len(),
        instance.tickets().len()
    )?;
    match args.runs {
        None => writeln!(out, "# GEN g avg_fitness max_fitness")?,
        Some(_) => writeln!(out, "# GEN run g avg_fitness max_fitness")?,
    }
    let base = GAParams {
        population_size: args.population,
        generations: args.generations,
        mutation_probability: args.mutation_p,
        elite_fraction: args.elite,
        ..GAParams::default()
    };
    match args.runs {
        None => {
            let outcome = run_simple_ga(
                instance,
                &GAParams {
                    rng_seed: args.seed,
                    ..base
                },
            );
            for row in &outcome.stats {
                writeln!(out, "GEN {} {} {}", row.generation, row.avg_fitness, row.max_fitness)?;
            }
        }
        Some(runs) => {
            for run in 0..runs {
                let outcome = run_simple_ga(
                    instance,
                    &GAParams {
                        rng_seed: args.seed + run as u64,
                        ..base.clone()
                    },
                );
                for row in &outcome.stats {
                    writeln!(
                        out,
                        "GEN {run} {} {} {}",
                        row.generation, row.avg_fitness, row.max_fitness
                    )?;
                }
            }
        }
    }
    Ok(())
}

/// Evaluates a schedule against an instance: the five merits in the PARETO
/// row orientation, the violation counters, the feasibility verdict and the
/// observed account shares. Infeasible schedules are reported, not
/// rejected.
pub fn cmd_evaluate<W: Write>(
    instance: &ProblemInstance,
    digest: &str,
    schedule: &Schedule,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "# nightsched evaluate v{VERSION}")?;
    writeln!(
        out,
        "# instance {digest} entries={}",
        schedule.len()
    )?;
    writeln!(out, "# MERIT alt dist AD tdiv odiv")?;
    writeln!(out, "# VIOLATIONS visibility schedule_time unobserved obs_count total")?;
    let v = objective_vector(instance, schedule);
    writeln!(
        out,
        "MERIT {} {} {} {} {}",
        v.altitude,
        raw(v.distance_neg),
        raw(v.account_neg),
        v.target_diversity,
        v.observation_diversity
    )?;
    let report = total_violations(instance, schedule, &instance.night);
    writeln!(
        out,
        "VIOLATIONS {} {} {} {} {}",
        report.visibility, report.schedule_time, report.unobserved, report.obs_count, report.total
    )?;
    let verdict = is_feasible(instance, schedule).expect("schedule resolved at load");
    match verdict.violated {
        None => writeln!(out, "FEASIBLE true")?,
        Some(condition) => writeln!(out, "FEASIBLE false condition={}", condition.number())?,
    }
    let usage = account_usage(instance, schedule).expect("schedule resolved at load");
    write!(out, "ACCOUNTS")?;
    for share in &usage.observed {
        write!(out, " {share}")?;
    }
    writeln!(out)?;
    Ok(())
}
