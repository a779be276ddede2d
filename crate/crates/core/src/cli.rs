// Copyright 2026 The tcverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line surface.
//!
//! Every subcommand prints a JSON report to stdout and, with `--output`,
//! also writes it to a file. Exit codes:
//!
//! | code | meaning                                                       |
//! |------|---------------------------------------------------------------|
//! | 0    | success                                                       |
//! | 1    | finding: soundness flag raised, or ZK distance over threshold |
//! | 2    | usage error (bad flags, unknown variant or strategy)          |
//! | 3    | file or I/O error                                             |
//! | 4    | invalid instance or file format                               |
//! | 5    | size cap exceeded                                             |
//! | 6    | networked session aborted                                     |
//! | 7    | other failure                                                 |
//!
//! `--seed` falls back to the `TCVERIFY_SEED` environment variable.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::net::{SocketAddr, TcpListener};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    adversary_sweep, estimate_pacc, exact_pacc, parallel_repetition, sampled_tvd_threshold, standard_family, tvd, view_distribution,
    ViewMode, ViewSource,
};
use crate::error::Error;
use crate::hamiltonian::{PromiseLabel, XZHamiltonian};
use crate::instance::{parse_instance, serialize_instance};
use crate::net::{serve_party, CenterConfig, PartyConfig, ProverConfig, VerifierConfig, DEFAULT_TIMEOUT};
use crate::protocol::{run_protocol, ProverAnswer, ProverStrategy, Variant};
use crate::quantum::StateVector;
use crate::rng::RandomSource;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INSTANCE: i32 = 4;
pub const EXIT_CAP: i32 = 5;
pub const EXIT_SESSION: i32 = 6;
pub const EXIT_OTHER: i32 = 7;

/// TVD threshold for exact-mode zero-knowledge checks.
pub const EXACT_TVD_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "tcverify", version, about = "Trusted-center verification protocol lab")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Seed for all randomness.
    #[arg(long, env = "TCVERIFY_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write the report here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single trial and print its transcript record.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, default_value = "honest", value_parser = parse_strategy)]
        strategy: StrategySpec,
        /// Append the record as one JSON line to this transcript file.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Monte Carlo acceptance probability.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, default_value = "honest", value_parser = parse_strategy)]
        strategy: StrategySpec,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Exact acceptance probability (N <= 3).
    Exact {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, default_value = "honest", value_parser = parse_strategy)]
        strategy: StrategySpec,
    },
    /// Adversary sweep against the spectral ceiling; exits 1 if any
    /// strategy's lower confidence bound exceeds it.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_variant, default_value = "main")]
        variant: Variant,
        #[arg(long, default_value_t = 2_000)]
        trials: u64,
        /// Number of random submitted states added to the family.
        #[arg(long, default_value_t = 20)]
        random_states: usize,
    },
    /// Distance between the honest verifier view and the simulator output.
    ZkCheck {
        #[command(flatten)]
        common: Common,
        /// Sample instead of enumerating exactly.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Parallel repetition of the main protocol.
    Amplify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "honest", value_parser = parse_strategy)]
        strategy: StrategySpec,
        #[arg(long)]
        k: usize,
        /// Defaults to 1 - (alpha + beta)/2 from the instance.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Write an instance file from a preset.
    GenInstance {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Qubit count for `random`.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, env = "TCVERIFY_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run one party of the networked protocol.
    Party(PartyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// Single term (1,2) with s = -1; ground state |Φ+⟩, energy 0.
    BellMinus,
    /// Single term (1,2) with s = +1; ground state the singlet, energy 0.
    BellPlus,
    /// Random valid instance with `--n` qubits.
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Role {
    Center,
    Prover,
    Verifier,
}

#[derive(Debug, Args)]
struct PartyArgs {
    #[arg(long, value_enum)]
    role: Role,
    /// Instance file (prover and verifier only).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Qubit count (center only).
    #[arg(long)]
    n: Option<usize>,
    /// Address to listen on (prover and verifier); port 0 picks a free port.
    /// The bound address is printed as `listening <addr>` on stdout.
    #[arg(long)]
    listen: Option<String>,
    #[arg(long)]
    prover_addr: Option<SocketAddr>,
    #[arg(long)]
    verifier_addr: Option<SocketAddr>,
    #[arg(long, default_value = "honest", value_parser = parse_strategy)]
    strategy: StrategySpec,
    #[arg(long)]
    zk: bool,
    #[arg(long, default_value_t = 1)]
    sessions: u64,
    #[arg(long, env = "TCVERIFY_SEED", default_value_t = 0)]
    seed: u64,
    /// Per-message timeout in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs_f64())]
    timeout: f64,
    /// Verifier log (one JSON line per session); stdout if absent.
    #[arg(long)]
    log: Option<PathBuf>,
}

/// A prover strategy as written on the command line:
///
/// * `honest`
/// * `basis:<bits>`: teleport the computational basis state `|bits⟩`
/// * `random-state:<seed>`: teleport a Haar-random state
/// * `flip:<xbits>:<zbits>`: honest, then XOR masks into `(x, z)`
/// * `constant:<xbits>:<zbits>`: fixed answer
/// * `zeros`: constant all-zero answer
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    Honest,
    Basis(Vec<u8>),
    RandomState(u64),
    Flip(Vec<u8>, Vec<u8>),
    Constant(Vec<u8>, Vec<u8>),
    Zeros,
}

fn parse_bits(s: &str) -> Result<Vec<u8>, String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("`{s}` is not a bit string")),
        })
        .collect()
}

pub fn parse_strategy(s: &str) -> Result<StrategySpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["honest"] => Ok(StrategySpec::Honest),
        ["zeros"] => Ok(StrategySpec::Zeros),
        ["basis", bits] => Ok(StrategySpec::Basis(parse_bits(bits)?)),
        ["random-state", seed] => seed
            .parse()
            .map(StrategySpec::RandomState)
            .map_err(|e| format!("bad seed `{seed}`: {e}")),
        ["flip", x, z] => Ok(StrategySpec::Flip(parse_bits(x)?, parse_bits(z)?)),
        ["constant", x, z] => Ok(StrategySpec::Constant(parse_bits(x)?, parse_bits(z)?)),
        _ => Err(format!(
            "unknown strategy `{s}` (expected honest, zeros, basis:<bits>, random-state:<seed>, flip:<x>:<z>, constant:<x>:<z>)"
        )),
    }
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

impl StrategySpec {
    pub fn build(&self, n: usize) -> Result<ProverStrategy, Error> {
        Ok(match self {
            StrategySpec::Honest => ProverStrategy::Honest,
            StrategySpec::Basis(bits) => {
                if bits.len() != n {
                    return Err(Error::IncompatibleStrategy(format!("basis state needs {n} bits")));
                }
                ProverStrategy::HonestWithState(StateVector::from_bits(bits))
            }
            StrategySpec::RandomState(seed) => {
                ProverStrategy::HonestWithState(StateVector::random(n, &mut RandomSource::new(*seed)))
            }
            StrategySpec::Flip(x, z) => ProverStrategy::ByproductFlip { x_mask: x.clone(), z_mask: z.clone() },
            StrategySpec::Constant(x, z) => ProverStrategy::Constant(ProverAnswer { x: x.clone(), z: z.clone() }),
            StrategySpec::Zeros => ProverStrategy::Constant(ProverAnswer::zeros(n)),
        })
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::InvalidInstance(_) | Error::InstanceFormat(_) | Error::Json(_) => EXIT_INSTANCE,
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Session(_) | Error::Wire(_) => EXIT_SESSION,
        Error::InvalidArgument(_) | Error::IncompatibleStrategy(_) | Error::ModeMismatch(_) => EXIT_USAGE,
        _ => EXIT_OTHER,
    }
}

fn load_instance(path: &PathBuf) -> Result<XZHamiltonian, Error> {
    let bytes = fs::read(path)?;
    parse_instance(&bytes)
}

fn emit(report: &impl Serialize, output: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(report)?;
    writeln!(out, "{text}")?;
    if let Some(path) = output {
        fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// writing reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn cli_run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Run { common, variant, strategy, transcript } => {
            let ham = load_instance(&common.instance)?;
            let strategy = strategy.build(ham.n_qubits)?;
            let record = run_protocol(variant, &ham, &strategy, &mut RandomSource::new(common.seed))?;
            if let Some(path) = transcript {
                let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
                writeln!(file, "{}", serde_json::to_string(&record)?)?;
            }
            emit(&record, common.output.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Estimate { common, variant, strategy, trials } => {
            let ham = load_instance(&common.instance)?;
            let strategy = strategy.build(ham.n_qubits)?;
            let estimate = estimate_pacc(variant, &ham, &strategy, trials, common.seed)?;
            let report = json!({
                "command": "estimate",
                "variant": variant,
                "strategy": strategy.label(),
                "estimate": estimate,
            });
            emit(&report, common.output.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Exact { common, variant, strategy } => {
            let ham = load_instance(&common.instance)?;
            let strategy = strategy.build(ham.n_qubits)?;
            let p = exact_pacc(variant, &ham, &strategy)?;
            let report = json!({
                "command": "exact",
                "variant": variant,
                "strategy": strategy.label(),
                "p_acc": p,
            });
            emit(&report, common.output.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { common, variant, trials, random_states } => {
            let ham = load_instance(&common.instance)?;
            let mut rng = RandomSource::substream(common.seed, u64::MAX);
            let family = standard_family(ham.n_qubits, random_states, &mut rng);
            let report = adversary_sweep(variant, &ham, &family, trials, common.seed)?;
            emit(&report, common.output.as_ref(), out)?;
            if report.any_flagged {
                writeln!(err, "soundness finding: a lower confidence bound exceeds the ceiling {}", report.ceiling)?;
                return Ok(EXIT_FINDING);
            }
            Ok(EXIT_OK)
        }
        Command::ZkCheck { common, sampled, trials } => {
            let ham = load_instance(&common.instance)?;
            let (distance, threshold, mode) = if sampled {
                let honest = view_distribution(
                    ViewSource::VirtualZkHonest,
                    &ham,
                    ViewMode::Sampled { trials, seed: common.seed },
                )?;
                let sim = view_distribution(
                    ViewSource::Simulator,
                    &ham,
                    ViewMode::Sampled { trials, seed: common.seed.wrapping_add(1) },
                )?;
                let threshold = sampled_tvd_threshold(&honest, &sim, trials);
                (tvd(&honest, &sim)?, threshold, "sampled")
            } else {
                let honest = view_distribution(ViewSource::VirtualZkHonest, &ham, ViewMode::Exact)?;
                let sim = view_distribution(ViewSource::Simulator, &ham, ViewMode::Exact)?;
                (tvd(&honest, &sim)?, EXACT_TVD_THRESHOLD, "exact")
            };
            let pass = distance <= threshold;
            let report = json!({
                "command": "zk-check",
                "mode": mode,
                "tvd": distance,
                "threshold": threshold,
                "pass": pass,
            });
            emit(&report, common.output.as_ref(), out)?;
            Ok(if pass { EXIT_OK } else { EXIT_FINDING })
        }
        Command::Amplify { common, strategy, k, threshold, trials } => {
            let ham = load_instance(&common.instance)?;
            let strategy = strategy.build(ham.n_qubits)?;
            let threshold = threshold.or_else(|| ham.midpoint_threshold()).ok_or_else(|| {
                Error::InvalidArgument("no --threshold given and the instance has no alpha/beta".into())
            })?;
            let estimate = parallel_repetition(&ham, &strategy, k, threshold, trials, common.seed)?;
            let report = json!({
                "command": "amplify",
                "strategy": strategy.label(),
                "k": k,
                "threshold": threshold,
                "estimate": estimate,
            });
            emit(&report, common.output.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::GenInstance { preset, n, seed, output } => {
            let ham = match preset {
                Preset::BellMinus => XZHamiltonian::bell(-1).with_promise(0.1, 0.3, PromiseLabel::Yes)?,
                Preset::BellPlus => XZHamiltonian::bell(1).with_promise(0.1, 0.3, PromiseLabel::Yes)?,
                Preset::Random => {
                    if n < 2 {
                        return Err(Error::InvalidArgument("random instances need --n >= 2".into()));
                    }
                    XZHamiltonian::random(n, &mut RandomSource::new(seed))
                }
            };
            let text = serialize_instance(&ham);
            write!(out, "{text}")?;
            if let Some(path) = output {
                fs::write(path, &text)?;
            }
            Ok(EXIT_OK)
        }
        Command::Party(args) => run_party(args, out),
    }
}

fn run_party(args: PartyArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let timeout = Duration::from_secs_f64(args.timeout);
    let missing = |what: &str| Error::InvalidArgument(format!("--role {:?} needs {what}", args.role));
    let listener = match (&args.listen, args.role) {
        (Some(addr), Role::Prover | Role::Verifier) => {
            let l = TcpListener::bind(addr)?;
            writeln!(out, "listening {}", l.local_addr()?)?;
            out.flush()?;
            Some(l)
        }
        (None, Role::Prover | Role::Verifier) => return Err(missing("--listen")),
        _ => None,
    };
    let config = match args.role {
        Role::Center => PartyConfig::Center(CenterConfig {
            n_qubits: args.n.ok_or_else(|| missing("--n"))?,
            zk: args.zk,
            prover: args.prover_addr.ok_or_else(|| missing("--prover-addr"))?,
            verifier: args.verifier_addr.ok_or_else(|| missing("--verifier-addr"))?,
            sessions: args.sessions,
            seed: args.seed,
            timeout,
        }),
        Role::Prover => {
            let instance = load_instance(args.instance.as_ref().ok_or_else(|| missing("--instance"))?)?;
            PartyConfig::Prover(ProverConfig {
                strategy: args.strategy.build(instance.n_qubits)?,
                instance,
                verifier: args.verifier_addr.ok_or_else(|| missing("--verifier-addr"))?,
                sessions: args.sessions,
                seed: args.seed,
                timeout,
            })
        }
        Role::Verifier => PartyConfig::Verifier(VerifierConfig {
            instance: load_instance(args.instance.as_ref().ok_or_else(|| missing("--instance"))?)?,
            zk: args.zk,
            sessions: args.sessions,
            seed: args.seed,
            timeout,
        }),
    };
    let summary = match &args.log {
        Some(path) => serve_party(&config, listener.as_ref(), &mut fs::File::create(path)?)?,
        None => serve_party(&config, listener.as_ref(), &mut io::stdout().lock())?,
    };
    let report = json!({ "role": format!("{:?}", args.role).to_lowercase(), "summary": summary });
    if args.log.is_some() || args.role != Role::Verifier {
        emit(&report, None, out)?;
    }
    Ok(EXIT_OK)
}
