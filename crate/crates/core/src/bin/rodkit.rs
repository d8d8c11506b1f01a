use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kirchhoff_rod::energy::{PenaltyMode, PenaltyParams};
use kirchhoff_rod::frames::{apply_twist, default_bishop, DEFAULT_STEPS_PER_SEGMENT};
use kirchhoff_rod::harness::{converge, counterexample_spacing, DEFAULT_N_LIST};
use kirchhoff_rod::io::{read_rod, write_rod, write_spline_csv};
use kirchhoff_rod::{
    build_spline, build_twist, recovery_rod, total_energy, AnalyticCurve, Error, MaterialParams, Result,
    TwistProfile,
};

#[derive(Parser)]
#[command(name = "rodkit", version, about = "Discrete Kirchhoff rod toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equal-chord recovery rod of an analytic curve
    Discretize {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value = "zero")]
        twist: String,
        #[arg(long)]
        n: usize,
        /// Output path; `.json` selects JSON, anything else plain text
        #[arg(long)]
        out: PathBuf,
    },
    /// Energy report of a rod file, as JSON on stdout
    Energy {
        #[arg(long)]
        rod: PathBuf,
        #[arg(long = "L")]
        length: f64,
        #[command(flatten)]
        energy: EnergyArgs,
    },
    /// Bishop or material frames along the rod's spline, as CSV
    Frames {
        #[arg(long)]
        rod: PathBuf,
        #[arg(long = "L")]
        length: f64,
        #[arg(long, default_value_t = DEFAULT_STEPS_PER_SEGMENT)]
        steps: usize,
        /// Skip the twist rotation and write the Bishop frames
        #[arg(long)]
        bishop_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples of the rod's spline and its first two derivatives, as CSV
    SampleSpline {
        #[arg(long)]
        rod: PathBuf,
        #[arg(long = "L")]
        length: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy convergence table over a sweep of N
    Converge {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value = "zero")]
        twist: String,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_N_LIST)]
        n_list: Vec<usize>,
        #[command(flatten)]
        energy: EnergyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spacing counterexample report, as JSON on stdout
    Counterexample {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        energy: EnergyArgs,
    },
}

#[derive(Args)]
struct CurveArgs {
    /// line, arc or helix
    #[arg(long)]
    curve: String,
    /// line: L; arc: R,L; helix: a,b,L
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    params: Vec<f64>,
}

impl CurveArgs {
    fn build(&self) -> Result<AnalyticCurve> {
        AnalyticCurve::from_params(&self.curve, &self.params)
    }
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 2.0)]
    ej: f64,
    #[arg(long, default_value_t = 2.0)]
    gj1: f64,
    /// Use the 0/∞ indicator penalty instead of the soft one
    #[arg(long)]
    hard_penalty: bool,
}

impl EnergyArgs {
    fn penalty(&self) -> Result<PenaltyParams> {
        let mode = if self.hard_penalty { PenaltyMode::Hard } else { PenaltyMode::Soft };
        Ok(PenaltyParams::new(self.alpha, self.beta)?.with_mode(mode))
    }

    fn material(&self) -> Result<MaterialParams> {
        MaterialParams::new(self.ej, self.gj1)
    }
}

fn check_length(length: f64) -> Result<f64> {
    if length.is_finite() && length > 0.0 {
        Ok(length)
    } else {
        Err(Error::InvalidParameter(format!("L must be positive, got {length}")))
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Discretize { curve, twist, n, out } => {
            let rod = recovery_rod(&curve.build()?, &TwistProfile::from_name(&twist)?, n)?;
            write_rod(&out, &rod)
        }
        Command::Energy { rod, length, energy } => {
            let framed = read_rod(&rod)?;
            let n = framed.rod().edge_count();
            let report = total_energy(&framed, n, check_length(length)?, &energy.penalty()?, &energy.material()?)?;
            print_json(&report)
        }
        Command::Frames { rod, length, steps, bishop_only, out } => {
            let framed = read_rod(&rod)?;
            let length = check_length(length)?;
            let spline = build_spline(framed.rod(), length)?;
            let mut field = default_bishop(&spline, steps)?;
            if !bishop_only {
                field = apply_twist(&field, &build_twist(&framed, length)?)?;
            }
            let mut w = output(out.as_deref())?;
            field.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::SampleSpline { rod, length, samples, out } => {
            let framed = read_rod(&rod)?;
            let spline = build_spline(framed.rod(), check_length(length)?)?;
            let mut w = output(out.as_deref())?;
            write_spline_csv(&spline, samples, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Converge { curve, twist, n_list, energy, out } => {
            let table = converge(
                &curve.build()?,
                &TwistProfile::from_name(&twist)?,
                &n_list,
                &energy.penalty()?,
                &energy.material()?,
            )?;
            let mut w = output(out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Counterexample { n, energy } => print_json(&counterexample_spacing(n, &energy.penalty()?)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rodkit: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
