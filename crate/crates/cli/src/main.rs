use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use hall_lab::output::ManifestInfo;
use hall_lab::{run, write_outputs, CliError, Command, ExperimentConfig, EXIT_ALARM, EXIT_OK};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Bulk,
    Edge,
    Topology,
    Harper,
    Diagnose,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Bulk => Command::Bulk,
            Cmd::Edge => Command::Edge,
            Cmd::Topology => Command::Topology,
            Cmd::Harper => Command::Harper,
            Cmd::Diagnose => Command::Diagnose,
        }
    }
}

/// Lattice Hall conductance experiments.
///
/// Exit status: 0 success, 2 configuration error, 3 numerical alarm.
#[derive(Debug, Parser)]
#[command(name = "hall-lab", version)]
struct Args {
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "HALL_LAB_THREADS")]
    threads: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: &Args) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    hall_core::init_sequential_kernels();

    let cmd: Command = args.command.into();
    let start = Instant::now();
    let out = pool.install(|| run(cmd, &cfg))?;
    let name = cfg.name.clone().unwrap_or_else(|| cmd.name().to_string());
    let info = ManifestInfo {
        command: cmd.name(),
        threads: pool.current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
        alarms: &out.alarms,
    };
    let (csv, _) = write_outputs(&args.out, &name, &out.table, &cfg, &info)?;
    eprintln!("wrote {} ({} rows)", csv.display(), out.table.rows.len());
    for a in &out.alarms {
        eprintln!("alarm: {a}");
    }
    Ok(if out.alarms.is_empty() {
        EXIT_OK
    } else {
        EXIT_ALARM
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hall-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
