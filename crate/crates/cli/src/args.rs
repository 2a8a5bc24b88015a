use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dispersive_core::fit::Observable;
use dispersive_core::InteractionModel;

#[derive(Debug, Parser)]
#[command(
    name = "dispersive",
    version,
    about = "Dispersive shifts, rates and master-equation runs for a multi-level qubit coupled to a resonator"
)]
pub struct Cli {
    /// Parameter file (flat JSON)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the interaction model of the config
    #[arg(long, global = true, value_parser = InteractionModel::from_str)]
    pub model: Option<InteractionModel>,
    /// Number of qubit levels
    #[arg(long, global = true)]
    pub nq: Option<usize>,
    /// Fock truncation
    #[arg(long, global = true)]
    pub nr: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic and exact dispersive shifts over a sweep
    Shifts(SweepArgs),
    /// Fourth-order prefactors and, with baths configured, rates
    Rates {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Photon number for driven effective rates
        #[arg(long)]
        photons: Option<f64>,
    },
    /// Exact-diagonalization energies over a sweep (no resonance exclusion)
    Exact {
        #[arg(long, value_parser = Sweep::from_str)]
        sweep: Option<Sweep>,
        /// Also dump the Hamiltonian of the base config as CSV
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Fit g0 to exact-diagonalization data
    Fit(FitArgs),
    /// Integrate the master equation
    Evolve(EvolveArgs),
    /// Steady state of the master equation
    Steady(SteadyArgs),
    /// SVG line plot of CSV columns
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// VAR:START:STOP:COUNT with VAR one of detuning, coupling, temperature
    #[arg(long, value_parser = Sweep::from_str)]
    pub sweep: Option<Sweep>,
    /// Drop points with |Δ0| below this many g0
    #[arg(long)]
    pub exclude_window: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with a delta0_ghz column; generated from exact diagonalization when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = Observable::from_str, default_value = "resonator")]
    pub observable: Observable,
    /// Data column; defaults to exact_pull or exact_qshift
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, value_parser = Sweep::from_str)]
    pub sweep: Option<Sweep>,
    #[arg(long)]
    pub exclude_window: Option<f64>,
    /// Residual curve CSV
    #[arg(long)]
    pub residuals: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Dressed,
    Bare,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// Final time in ns
    #[arg(long)]
    pub tmax: f64,
    /// ground, fock:K:N or thermal:T
    #[arg(long, default_value = "ground")]
    pub init: String,
    #[arg(long, value_enum, default_value = "dressed")]
    pub mode: ModeArg,
    #[arg(long)]
    pub photons: Option<f64>,
    /// Sampling interval in ns
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SteadyArgs {
    #[arg(long, value_enum, default_value = "dressed")]
    pub mode: ModeArg,
    #[arg(long)]
    pub photons: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    /// Comma-separated column names
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<String>,
    #[arg(long)]
    pub log_y: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Detuning,
    Coupling,
    Temperature,
}

impl SweepVar {
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::Detuning => "delta0_ghz",
            SweepVar::Coupling => "g0_ghz",
            SweepVar::Temperature => "temperature_ghz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for Sweep {
    /// Δ0 from −3 to 3 GHz at 161 points.
    fn default() -> Self {
        Self { var: SweepVar::Detuning, start: -3.0, stop: 3.0, count: 161 }
    }
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + i as f64 * step).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, count] = parts[..] else {
            return Err(format!("expected VAR:START:STOP:COUNT, got `{s}`"));
        };
        let var = match var {
            "detuning" => SweepVar::Detuning,
            "coupling" => SweepVar::Coupling,
            "temperature" => SweepVar::Temperature,
            other => return Err(format!("unknown sweep variable `{other}`")),
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let count: usize = count.parse().map_err(|e| format!("`{count}`: {e}"))?;
        if count < 2 {
            return Err(format!("sweep needs at least 2 points, got {count}"));
        }
        Ok(Self { var, start: num(start)?, stop: num(stop)?, count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        let s: Sweep = "coupling:0.05:0.15:11".parse().unwrap();
        assert_eq!(s.var, SweepVar::Coupling);
        assert_eq!(s.values().len(), 11);
        assert!("detuning:-1:1:1".parse::<Sweep>().is_err());
        assert!("phase:0:1:3".parse::<Sweep>().is_err());
        assert!("detuning:0:1".parse::<Sweep>().is_err());
        assert!(Sweep::default().values()[80].abs() < 1e-12);
    }
}
