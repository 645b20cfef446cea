//! `ironwood`: TTP provisioning, key exchange, benchmarking and the
//! security-level calculator.
//!
//! Exit codes: 0 success, 2 usage, 3 validation or confirmation failure,
//! 4 I/O, 5 network.

mod commands;
mod error;
mod inspect;
mod keyfiles;
mod net;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ironwood",
    version,
    about = "Ironwood braid-group key agreement"
)]
struct Cli {
    /// RNG seed; every non-network command is deterministic under a fixed seed.
    #[arg(long, global = true, env = "IRONWOOD_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trusted-third-party provisioning.
    #[command(subcommand)]
    Ttp(TtpCommand),
    /// Run key exchanges in process or over TCP.
    #[command(subcommand)]
    Exchange(ExchangeCommand),
    /// Operation-count linearity sweep.
    Bench(BenchArgs),
    /// Brute-force security levels for (q, N, L).
    SecurityLevel(SecurityArgs),
    /// Describe a key record or message frame.
    Inspect(InspectArgs),
}

#[derive(Debug, Subcommand)]
pub enum TtpCommand {
    /// Generate system parameters, conjugate sets, T-values and a signing key.
    Init(InitArgs),
    /// Issue a device key and certificate.
    ProvisionDevice(ProvisionArgs),
    /// Write the home-device secret and the certificate verifier.
    ExportHd(ExportHdArgs),
}

#[derive(Debug, Args)]
pub struct InitArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// `gf<2^m>` or `f<p>`.
    #[arg(long, default_value = "gf256")]
    pub field: String,
    /// Conjugates per set.
    #[arg(long, default_value_t = 32)]
    pub conjugates: usize,
    #[arg(long, default_value_t = 64)]
    pub z_length: usize,
    #[arg(long, default_value_t = 64)]
    pub word_length: usize,
    #[arg(long, default_value_t = 0.5)]
    pub pure_fraction: f64,
    #[arg(long, default_value = "ttp")]
    pub signer_id: String,
    /// Output directory for `params.irwk` and `ttp.irwk`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProvisionArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub ttp: PathBuf,
    /// Device identity bound into the certificate.
    #[arg(long)]
    pub id: String,
    /// Conjugate factors in the device braid.
    #[arg(long, default_value_t = 40)]
    pub beta_factors: usize,
    /// Device key file.
    #[arg(long)]
    pub out: PathBuf,
    /// Standalone certificate record.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportHdArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub ttp: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub verifier_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExchangeCommand {
    /// In-process handshakes between one HD and one device.
    Run(RunArgs),
    /// HD side over TCP, one session per connection.
    Serve(ServeArgs),
    /// Device side over TCP.
    Connect(ConnectArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SessionArgs {
    /// Conjugate factors in β.
    #[arg(long, default_value_t = 43)]
    pub beta_factors: usize,
    /// Extra pure factors in β'.
    #[arg(long, default_value_t = 26)]
    pub pure_insertions: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub hd_key: PathBuf,
    #[arg(long)]
    pub device_key: PathBuf,
    /// Verifier record (or the TTP secret).
    #[arg(long)]
    pub verifier: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[command(flatten)]
    pub session: SessionArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub hd_key: PathBuf,
    #[arg(long)]
    pub verifier: PathBuf,
    #[arg(long, default_value = "127.0.0.1:7878")]
    pub listen: String,
    /// Stop after this many connections.
    #[arg(long)]
    pub max_sessions: Option<usize>,
    #[command(flatten)]
    pub session: SessionArgs,
}

#[derive(Debug, Args)]
pub struct ConnectArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub device_key: PathBuf,
    #[arg(long)]
    pub connect: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 16)]
    pub runs: usize,
    #[arg(long, default_value_t = 500)]
    pub min_len: usize,
    #[arg(long, default_value_t = 8000)]
    pub max_len: usize,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value = "gf256")]
    pub field: String,
    /// Write per-run records as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SecurityArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: u32,
    /// Braid length.
    #[arg(long)]
    pub l: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub file: PathBuf,
    /// Needed to decode records and frames that depend on (N, q).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Hex-encoded JSON dump; not a canonical format.
    #[arg(long)]
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed;
    let result = match cli.command {
        Command::Ttp(TtpCommand::Init(a)) => commands::ttp_init(&a, seed),
        Command::Ttp(TtpCommand::ProvisionDevice(a)) => commands::ttp_provision(&a, seed),
        Command::Ttp(TtpCommand::ExportHd(a)) => commands::ttp_export_hd(&a),
        Command::Exchange(ExchangeCommand::Run(a)) => commands::exchange_run(&a, seed),
        Command::Exchange(ExchangeCommand::Serve(a)) => net::serve(&a, seed),
        Command::Exchange(ExchangeCommand::Connect(a)) => net::connect(&a),
        Command::Bench(a) => commands::bench(&a, seed),
        Command::SecurityLevel(a) => commands::security_level(&a),
        Command::Inspect(a) => inspect::inspect(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.kind as u8)
        }
    }
}
