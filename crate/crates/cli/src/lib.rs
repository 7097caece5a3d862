//! Command-line surface of the night scheduler: instance ingestion, the
//! built-in equatorial scenario, command execution and report formatting.
//! The `nightsched` binary is a thin argv wrapper over this library.

pub mod commands;
pub mod io;
pub mod scenario;

pub use commands::{cmd_evaluate, cmd_schedule, cmd_simple_ga, ScheduleArgs, SimpleGaArgs};
pub use io::{digest_label, file_digest, load_instance, load_schedule_file, CliError};
pub use scenario::gen_scenario_equatorial;
