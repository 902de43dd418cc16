//! `bsm`: run sessions, attacks and bound checks from the command line.
//!
//! Exit codes: 0 success, 1 protocol reject or abort, 2 usage error,
//! 3 failed bound check.

use std::path::PathBuf;
use std::process::ExitCode;

use bsm_core::app::{run_party, run_session, OutputFormat, Protocol, Role, SessionConfig, SocketTransport, TransportKind};
use bsm_core::app::session::PartyOutcome;
use bsm_core::codes::LinearCode;
use bsm_core::harness::{self, AttackReport, BindingSetup, DistanceReport, HidingSetup, IhStrategy, LemmaCheck, OffBranchSetup};
use bsm_core::infomath::{commit_delta_threshold, ot_gv_delta_threshold, zyablov_delta};
use bsm_core::{BitString, Error, IndexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "bsm", version, about = "Noisy bounded-storage commitment and oblivious transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error-rate thresholds for a given entropy gap.
    Feasibility(FeasibilityArgs),
    /// Run a commitment session.
    Commit(SessionArgs),
    /// Run an oblivious-transfer session.
    Ot(SessionArgs),
    /// Run one adversary experiment against its bound.
    Attack(AttackArgs),
    /// Check the combinatorial and probabilistic lemmas.
    Lemmas(CheckArgs),
    /// Quick end-to-end check of every component.
    Selftest(CheckArgs),
}

#[derive(Args)]
struct FeasibilityArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    gamma: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SessionArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Fuzzy-extractor code: hamming74, repetition:N, identity:N, random:LEN:DIM:SEED.
    #[arg(long)]
    code: Option<String>,
    /// Receiver's choice bit.
    #[arg(long)]
    choice: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    /// memory or socket.
    #[arg(long)]
    transport: Option<String>,
    /// Play one party, accepting the peer on this address.
    #[arg(long, conflicts_with = "connect")]
    listen: Option<String>,
    /// Play one party, connecting to the peer at this address.
    #[arg(long)]
    connect: Option<String>,
    /// alice or bob; defaults to alice when listening and bob when connecting.
    #[arg(long)]
    role: Option<String>,
    /// Emit one JSON record per phase.
    #[arg(long)]
    json: bool,
    /// Flat key=value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the merged configuration and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackName {
    Binding,
    BindingInverted,
    Hiding,
    HidingStored,
    Offbranch,
    OffbranchStored,
    IhHonest,
    IhGreedy,
}

#[derive(Args)]
struct AttackArgs {
    name: AttackName,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::Config(_) | Error::Domain { .. } | Error::InvalidCode(_) | Error::SampleTooLarge { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Feasibility(a) => feasibility(&a),
        Command::Commit(a) => session(Protocol::Commit, &a),
        Command::Ot(a) => session(Protocol::Ot, &a),
        Command::Attack(a) => attack(&a),
        Command::Lemmas(a) => lemmas(&a),
        Command::Selftest(a) => selftest(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn feasibility(a: &FeasibilityArgs) -> Outcome {
    let gap = a.alpha - a.gamma;
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Failure::Usage(format!("need 0 < α − γ ≤ 1, got {gap}")));
    }
    let commit = commit_delta_threshold(gap)?;
    let gv = ot_gv_delta_threshold(gap)?;
    let mut rows = Vec::new();
    for i in 1..10 {
        let rate = i as f64 / 10.0;
        // the fuzzy extractor keeps entropy only when R > 1 − (α − γ)
        let usable = rate > 1.0 - gap;
        rows.push((rate, zyablov_delta(rate, 0.0)?, usable));
    }
    if a.json {
        println!("{}", json!({ "alpha": a.alpha, "gamma": a.gamma, "commit": commit, "ot_gv": gv }));
        for (rate, delta, usable) in rows {
            println!("{}", json!({ "rate": rate, "zyablov": delta, "usable": usable }));
        }
    } else {
        println!("alpha={} gamma={} gap={gap:.4}", a.alpha, a.gamma);
        println!("commit    delta < {commit:.6}");
        println!("ot-gv     delta < {gv:.6}");
        println!("ot-zyablov");
        println!("  rate  delta     usable");
        for (rate, delta, usable) in rows {
            println!("  {rate:.1}   {delta:.6}  {}", if usable { "yes" } else { "no" });
        }
    }
    Ok(0)
}

fn merged_config(protocol: Protocol, a: &SessionArgs) -> Result<SessionConfig, Failure> {
    let mut cfg = SessionConfig::defaults(protocol);
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.load(&text)?;
        cfg.protocol = protocol;
    }
    let mut set = |key: &str, value: Option<String>| -> Result<(), Failure> {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
        Ok(())
    };
    set("n", a.n.map(|v| v.to_string()))?;
    set("ell", a.ell.map(|v| v.to_string()))?;
    set("alpha", a.alpha.map(|v| v.to_string()))?;
    set("gamma", a.gamma.map(|v| v.to_string()))?;
    set("delta", a.delta.map(|v| v.to_string()))?;
    set("zeta", a.zeta.map(|v| v.to_string()))?;
    set("code", a.code.clone())?;
    set("choice", a.choice.map(|v| v.to_string()))?;
    set("seed", a.seed.map(|v| v.to_string()))?;
    set("transport", a.transport.clone())?;
    set("role", a.role.clone())?;
    set("address", a.listen.clone().or_else(|| a.connect.clone()))?;
    if a.json {
        cfg.output = OutputFormat::JsonLines;
    }
    if a.listen.is_some() || a.connect.is_some() {
        cfg.transport = TransportKind::Socket;
        if cfg.role.is_none() {
            cfg.role = Some(if a.listen.is_some() { Role::Alice } else { Role::Bob });
        }
    }
    Ok(cfg)
}

fn emit(format: OutputFormat, records: &[serde_json::Value]) {
    for r in records {
        match format {
            OutputFormat::JsonLines => println!("{r}"),
            OutputFormat::Human => {
                let line: Vec<String> = r
                    .as_object()
                    .into_iter()
                    .flatten()
                    .map(|(k, v)| match v {
                        serde_json::Value::String(s) => format!("{k}={s}"),
                        serde_json::Value::Bool(b) => format!("{k}={}", *b as u8),
                        other => format!("{k}={other}"),
                    })
                    .collect();
                println!("{}", line.join(" "));
            }
        }
    }
}

fn session(protocol: Protocol, a: &SessionArgs) -> Outcome {
    let cfg = merged_config(protocol, a)?;
    if a.dump_config {
        print!("{}", cfg.dump());
        return Ok(0);
    }
    cfg.validate()?;
    if a.listen.is_none() && a.connect.is_none() {
        let out = run_session(&cfg)?;
        emit(cfg.output, &out.records());
        return Ok(if out.success() { 0 } else { 1 });
    }
    let role = cfg.role.expect("set when listening or connecting");
    let mut transport = match (&a.listen, &a.connect) {
        (Some(addr), _) => SocketTransport::accept(&std::net::TcpListener::bind(addr).map_err(Error::from)?)?,
        (_, Some(addr)) => SocketTransport::connect_retry(addr)?,
        _ => unreachable!(),
    };
    let report = run_party(&cfg, role, &mut transport)?;
    let (ok, result) = match &report.outcome {
        PartyOutcome::Committer { accept, reason, .. } => {
            (*accept, json!({ "phase": "result", "accept": *accept as u8, "reason": reason.as_str() }))
        }
        PartyOutcome::Verifier(v) => (
            v.accept,
            json!({ "phase": "result", "accept": v.accept as u8, "reason": v.reason.as_str(), "mismatches": v.mismatches }),
        ),
        PartyOutcome::Sender { abort, .. } => {
            (abort.is_none(), json!({ "phase": "result", "abort": abort.map(|r| r.as_str()) }))
        }
        PartyOutcome::Receiver { abort, output, d, .. } => (
            abort.is_none() && matches!(output, Some(Some(_))),
            json!({
                "phase": "result",
                "abort": abort.map(|r| r.as_str()),
                "d": d.map(|d| d as u8),
                "output": output.clone().flatten().map(|s| s.to_string()),
            }),
        ),
    };
    let t = &report.transcript;
    emit(
        cfg.output,
        &[
            json!({ "phase": "transcript", "party": role.to_string(), "frames": t.frames.len(), "bytes": t.byte_count(), "sha256": t.digest() }),
            result,
        ],
    );
    Ok(if ok { 0 } else { 1 })
}

fn print_line(json_out: bool, line: &impl std::fmt::Display, value: serde_json::Value) {
    if json_out {
        println!("{value}");
    } else {
        println!("{line}");
    }
}

fn report_attack(json_out: bool, r: &AttackReport) -> bool {
    print_line(json_out, r, serde_json::to_value(r).expect("serializable"));
    r.pass
}

fn report_distance(json_out: bool, r: &DistanceReport) -> bool {
    print_line(json_out, r, serde_json::to_value(r).expect("serializable"));
    r.pass
}

fn report_lemma(json_out: bool, r: &LemmaCheck) -> bool {
    print_line(json_out, r, serde_json::to_value(r).expect("serializable"));
    r.pass
}

fn offbranch_setup(stored: usize) -> Result<OffBranchSetup, Error> {
    let n = 10;
    Ok(OffBranchSetup {
        n,
        a: IndexSet::new(n, vec![0, 1, 2, 3, 5, 6, 7, 8])?,
        c_on: IndexSet::new(8, vec![0, 2, 4, 6])?,
        c_off: IndexSet::new(8, vec![1, 3, 5, 7])?,
        code: LinearCode::repetition(2)?,
        payload_len: 1,
        stored: IndexSet::new(n, (0..stored).collect())?,
        stored_value: BitString::zeros(stored),
    })
}

fn attack(a: &AttackArgs) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let pass = match a.name {
        AttackName::Binding => {
            let setup = BindingSetup { k: 16, digest_len: 24, sigma: 0.125 };
            report_attack(a.json, &harness::binding_attack(setup, a.trials.unwrap_or(200), &mut rng)?)
        }
        AttackName::BindingInverted => {
            // ω < 2h(σ) pushes the bound above one, so the check is that the attack wins
            let setup = BindingSetup { k: 16, digest_len: 4, sigma: 0.125 };
            let r = harness::binding_attack(setup, a.trials.unwrap_or(200), &mut rng)?;
            report_attack(a.json, &r);
            let broken = r.rate >= 0.5;
            print_line(a.json, &format!("inverted=1 broken={}", broken as u8), json!({ "inverted": true, "broken": broken }));
            broken
        }
        AttackName::Hiding => report_distance(a.json, &harness::hiding_distance(&HidingSetup::prefix(12, 6, 1, 2, 0)?, 0, 1)?),
        AttackName::HidingStored => {
            report_distance(a.json, &harness::hiding_distance(&HidingSetup::prefix(12, 6, 1, 2, 4)?, 0, 1)?)
        }
        AttackName::Offbranch => report_distance(a.json, &harness::ot_offbranch_distance(&offbranch_setup(0)?)?),
        AttackName::OffbranchStored => report_distance(a.json, &harness::ot_offbranch_distance(&offbranch_setup(10)?)?),
        AttackName::IhHonest => report_attack(
            a.json,
            &harness::ih_target_attack(12, 6, a.trials.unwrap_or(10_000), IhStrategy::Honest, &mut rng)?,
        ),
        AttackName::IhGreedy => report_attack(
            a.json,
            &harness::ih_target_attack(12, 6, a.trials.unwrap_or(10_000), IhStrategy::Greedy, &mut rng)?,
        ),
    };
    Ok(if pass { 0 } else { 3 })
}

fn lemmas(a: &CheckArgs) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let mut pass = report_attack(a.json, &harness::lemma_birthday(4096, 16, 10_000, &mut rng)?);
    let (up, low) = harness::lemma_subset_hd(4096, 256, 0.1, 0.05, 10_000, &mut rng)?;
    pass &= report_attack(a.json, &up);
    pass &= report_attack(a.json, &low);
    pass &= report_lemma(a.json, &harness::lemma_binom_bound(24));
    pass &= report_lemma(a.json, &harness::lemma_entropy_hd(10)?);
    Ok(if pass { 0 } else { 3 })
}

fn selftest(a: &CheckArgs) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let mut all = true;
    for protocol in [Protocol::Commit, Protocol::Ot] {
        let cfg = SessionConfig { seed: a.seed, ..SessionConfig::defaults(protocol) };
        let mem = run_session(&cfg)?;
        let sock = run_session(&SessionConfig { transport: TransportKind::Socket, ..cfg.clone() })?;
        let ok = mem.success() && mem == sock;
        all &= ok;
        print_line(
            a.json,
            &format!("name=session-{protocol} success={} transports-agree={} pass={ok}", mem.success() as u8, (mem == sock) as u8),
            json!({ "name": format!("session-{protocol}"), "pass": ok }),
        );
    }
    let binding = harness::binding_attack(BindingSetup { k: 16, digest_len: 24, sigma: 0.125 }, 50, &mut rng)?;
    all &= report_attack(a.json, &binding);
    all &= report_distance(a.json, &harness::hiding_distance(&HidingSetup::prefix(10, 4, 1, 1, 2)?, 0, 1)?);
    all &= report_attack(a.json, &harness::lemma_birthday(4096, 16, 1000, &mut rng)?);
    all &= report_lemma(a.json, &harness::lemma_binom_bound(16));
    Ok(if all { 0 } else { 3 })
}
