use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plan_core::formulation::{MethodKind, PolicyKind};
use plan_lp::Mode;

#[derive(Debug, Parser)]
#[command(name = "plan", version, about = "Multi-year investment planning with simple, vintage and compact formulations")]
#[command(after_help = "PLAN_SEED is reserved and ignored: every command is deterministic.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and solve one formulation; writes solution.json.
    Solve(SolveArgs),
    /// Report model sizes without solving.
    Size(SizeArgs),
    /// Solve several formulations and tabulate objective gaps; writes comparison.json.
    Compare(CompareArgs),
    /// Write the LP file of one formulation without solving.
    Emit(EmitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Simple,
    Vintage,
    Compact,
}

impl From<MethodArg> for MethodKind {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Simple => MethodKind::Simple,
            MethodArg::Vintage => MethodKind::Vintage,
            MethodArg::Compact => MethodKind::Compact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    #[value(alias = "operational-year-profile")]
    Operational,
    #[value(alias = "min-over-active-vintages")]
    Min,
    #[value(alias = "mean-over-active-vintages")]
    Mean,
    #[value(alias = "max-over-active-vintages")]
    Max,
    #[value(alias = "capacity-weighted")]
    Weighted,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Operational => PolicyKind::Operational,
            PolicyArg::Min => PolicyKind::Min,
            PolicyArg::Mean => PolicyKind::Mean,
            PolicyArg::Max => PolicyKind::Max,
            PolicyArg::Weighted => PolicyKind::Weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ModeArg {
    #[default]
    Continuous,
    Integer,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Continuous => Mode::Continuous,
            ModeArg::Integer => Mode::Integer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_name = "DIR")]
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Collapse policy; compact only (default operational).
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
    #[arg(long, value_name = "DIR", default_value = "./out")]
    pub out: PathBuf,
    /// Also write the LP file here before solving.
    #[arg(long, value_name = "PATH")]
    pub emit_lp: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    #[arg(long, value_name = "DIR")]
    pub scenario: PathBuf,
    /// One method; all three when omitted.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_name = "DIR")]
    pub scenario: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "simple,vintage,compact")]
    pub methods: Vec<MethodArg>,
    /// Collapse policy for compact (default operational).
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
    #[arg(long, value_name = "DIR", default_value = "./out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    #[arg(long, value_name = "DIR")]
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// LP file to write.
    #[arg(long, value_name = "PATH", default_value = "./out/model.lp")]
    pub out: PathBuf,
}
