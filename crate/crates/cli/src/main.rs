use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tcollapse_cli::commands::{self, ProbeKind};
use tcollapse_cli::settings::parse_override;
use tcollapse_cli::{CliResult, Settings};

/// Monotone-rearrangement solver for 1D isothermal Navier-Stokes(-Poisson)
/// in material coordinates.
#[derive(Parser)]
#[command(name = "tcollapse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheme; writes states.csv and fields.csv.
    Run(Common),
    /// Solve the coupled parabolic reference problem; writes reference.csv.
    Reference(Common),
    /// Run the scheme and compare it with the heat or reference target.
    Compare(Common),
    /// Refinement study over `ladder`; writes ladder.csv.
    Converge(Common),
    /// Check that the rest state is preserved; writes drift.csv.
    Fixedpoint(Common),
    /// Stability, envelope, weak-residual and entropy diagnostics.
    Probe {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        kind: ProbeKind,
    },
}

#[derive(Args)]
struct Common {
    /// INI configuration file (`key = value` lines).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Start from a named preset: heat, fixedpoint or nsp.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    forcing: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    anchor: Option<String>,
    #[arg(long = "T")]
    t: Option<String>,
    #[arg(long = "save_stride")]
    save_stride: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "init_xi")]
    init_xi: Option<String>,
    #[arg(long = "init_Z")]
    init_z: Option<String>,
    #[arg(long = "J")]
    j: Option<String>,
    /// Override any other configuration key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn settings(&self) -> CliResult<Settings> {
        let named = [
            ("preset", &self.preset),
            ("h", &self.h),
            ("epsilon", &self.epsilon),
            ("lambda", &self.lambda),
            ("L", &self.l),
            ("M", &self.m),
            ("noise", &self.noise),
            ("forcing", &self.forcing),
            ("beta", &self.beta),
            ("anchor", &self.anchor),
            ("T", &self.t),
            ("save_stride", &self.save_stride),
            ("seed", &self.seed),
            ("init_xi", &self.init_xi),
            ("init_Z", &self.init_z),
            ("J", &self.j),
        ];
        let mut overrides: Vec<(String, String)> = named
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        for s in &self.set {
            overrides.push(parse_override(s)?);
        }
        Settings::load(self.config.as_deref(), &overrides)
    }
}

fn dispatch(cmd: &Command) -> CliResult<Vec<String>> {
    match cmd {
        Command::Run(c) => commands::cmd_run(&c.settings()?, &c.out),
        Command::Reference(c) => commands::cmd_reference(&c.settings()?, &c.out),
        Command::Compare(c) => commands::cmd_compare(&c.settings()?, &c.out),
        Command::Converge(c) => commands::cmd_converge(&c.settings()?, &c.out),
        Command::Fixedpoint(c) => commands::cmd_fixedpoint(&c.settings()?, &c.out),
        Command::Probe { common, kind } => {
            commands::cmd_probe(&common.settings()?, &common.out, *kind)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tcollapse: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
