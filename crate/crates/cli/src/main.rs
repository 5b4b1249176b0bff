//! `nostra`: anchor document digests in a simulated append-only ledger
//! and verify documents offline from stamp + ledger alone.
//!
//! Machine-readable output (canonical JSON) goes to stdout, diagnostics
//! to stderr. Exit codes: 0 success/accept, 1 negative result (reject,
//! corrupt audit, transaction not found), 2 operational error.
//!
//! Environment: `NOSTRA_LEDGER` and `NOSTRA_KEYS` back the `--ledger` and
//! `--keys` flags; `NOSTRA_TIME` (unix seconds) pins the clock so runs
//! are reproducible.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use nostra_core::canon::to_canonical_json;
use nostra_core::certchain::{KeyDirectory, KeyRing};
use nostra_core::clock::{Clock, FixedClock, SystemClock};
use nostra_core::crypto::{Digest, HashAlgorithmId, KeyPair};
use nostra_core::ledger::Ledger;
use nostra_core::nostrify::{
    issue_batch, issue_certified, issue_chained, stamp_path_for, Document, Stamp,
};
use nostra_core::verify::verify_document;

#[derive(Parser)]
#[command(name = "nostra", version, about = "Anchor document digests in a ledger; verify offline")]
struct Cli {
    /// Ledger file (newline-delimited JSON blocks).
    #[arg(long, global = true, env = "NOSTRA_LEDGER", default_value = "ledger.jsonl")]
    ledger: PathBuf,

    /// Directory of `<name>.key` / `<name>.pub` files.
    #[arg(long, global = true, env = "NOSTRA_KEYS", default_value = "keys")]
    keys: PathBuf,

    /// Digest algorithm.
    #[arg(long, global = true, default_value = "sha2-256")]
    algo: String,

    /// Directory for written stamp files (default: beside each document).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an issuer key pair.
    Keygen {
        /// Base name for the `<name>.key` / `<name>.pub` pair.
        name: String,
        /// 32-byte hex seed for a deterministic key.
        #[arg(long)]
        seed: Option<String>,
        /// Overwrite existing key files.
        #[arg(long)]
        force: bool,
    },
    /// Anchor documents and write one stamp file per document.
    Issue {
        /// Issuance shape: 1 batch, 2 chained portfolio, 3 org hierarchy.
        #[arg(long)]
        case: u8,
        /// Issuer key name (cases 1 and 2).
        #[arg(long)]
        issuer: Option<String>,
        /// Certifying organization key names, innermost first (case 3).
        #[arg(long, value_delimiter = ',')]
        orgs: Vec<String>,
        /// Existing stamp files to re-anchor (case 2, repeatable).
        #[arg(long = "prior")]
        priors: Vec<PathBuf>,
        /// Documents to anchor.
        documents: Vec<PathBuf>,
    },
    /// Check one document against its stamp and the ledger.
    Verify {
        document: PathBuf,
        /// Stamp file (default: `<document>.stamp.json`).
        stamp: Option<PathBuf>,
    },
    /// Inspect the ledger.
    Ledger {
        #[command(subcommand)]
        action: LedgerAction,
    },
    /// Measure issuance and verification timings on synthetic documents.
    Bench {
        /// Issuance shape to measure: 1 or 3.
        #[arg(long, default_value_t = 1)]
        case: u8,
        #[arg(long, default_value_t = 1)]
        users: u32,
        /// Documents per user (case 1) or in total (case 3).
        #[arg(long, default_value_t = 4)]
        docs: u32,
        #[arg(long, default_value_t = 5)]
        runs: u32,
        /// Organizations per chain (case 3 only).
        #[arg(long, default_value_t = 3)]
        orgs: u32,
        /// Size of each synthetic document.
        #[arg(long, default_value_t = 100_000)]
        doc_bytes: usize,
    },
}

#[derive(Subcommand)]
enum LedgerAction {
    /// Print every block as one JSON line.
    Show,
    /// Walk the chain and report the first inconsistency.
    Audit,
    /// Print one transaction by id.
    Tx { id: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Resolved file locations shared by the commands.
struct Paths {
    ledger: PathBuf,
    keys: PathBuf,
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<u8> {
    cli.algo
        .parse::<HashAlgorithmId>()
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let Cli {
        ledger,
        keys,
        out,
        command,
        ..
    } = cli;
    let paths = Paths { ledger, keys, out };
    match command {
        Command::Keygen { name, seed, force } => cmd_keygen(&paths.keys, &name, seed, force),
        Command::Issue {
            case,
            issuer,
            orgs,
            priors,
            documents,
        } => cmd_issue(&paths, case, issuer, orgs, priors, documents),
        Command::Verify { document, stamp } => cmd_verify(&paths, &document, stamp),
        Command::Ledger { action } => cmd_ledger(&paths.ledger, action),
        Command::Bench {
            case,
            users,
            docs,
            runs,
            orgs,
            doc_bytes,
        } => cmd_bench(case, users, docs, runs, orgs, doc_bytes),
    }
}

/// `NOSTRA_TIME` pins timestamps for reproducible runs.
fn make_clock() -> Result<Box<dyn Clock>> {
    match std::env::var("NOSTRA_TIME") {
        Ok(v) => {
            let t: u64 = v
                .parse()
                .with_context(|| format!("NOSTRA_TIME must be unix seconds, got {v:?}"))?;
            Ok(Box::new(FixedClock(t)))
        }
        Err(_) => Ok(Box::new(SystemClock)),
    }
}

fn load_keypair(keys_dir: &Path, name: &str) -> Result<KeyPair> {
    let path = keys_dir.join(format!("{name}.key"));
    let contents = fs::read_to_string(&path)
        .with_context(|| format!("no key for issuer {name:?} ({})", path.display()))?;
    let seed = hex::decode(contents.trim())
        .with_context(|| format!("{} is not hex", path.display()))?;
    KeyPair::from_seed(&seed).with_context(|| format!("{} holds a bad seed", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", to_canonical_json(value)?);
    Ok(())
}

fn cmd_keygen(keys_dir: &Path, name: &str, seed: Option<String>, force: bool) -> Result<u8> {
    fs::create_dir_all(keys_dir)
        .with_context(|| format!("cannot create keys directory {}", keys_dir.display()))?;
    let keypair = match seed {
        Some(s) => {
            let bytes = hex::decode(s.trim()).context("--seed must be hex")?;
            KeyPair::from_seed(&bytes).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        None => KeyPair::generate(),
    };
    let key_file = keys_dir.join(format!("{name}.key"));
    let pub_file = keys_dir.join(format!("{name}.pub"));
    if !force && (key_file.exists() || pub_file.exists()) {
        bail!("key files for {name:?} already exist (use --force to overwrite)");
    }
    fs::write(&key_file, format!("{}\n", hex::encode(keypair.seed_bytes())))?;
    fs::write(&pub_file, format!("{}\n", keypair.public().to_hex()))?;

    #[derive(Serialize)]
    struct KeygenOut<'a> {
        key_file: String,
        key_id: String,
        name: &'a str,
        pub_file: String,
    }
    print_json(&KeygenOut {
        key_file: key_file.display().to_string(),
        key_id: keypair.key_id().to_hex(),
        name,
        pub_file: pub_file.display().to_string(),
    })?;
    Ok(0)
}

/// Exclusive advisory lock on `<ledger>.lock` for the whole issuance, so
/// concurrent `issue` invocations serialize instead of interleaving.
struct LedgerLock {
    _file: fs::File,
}

impl LedgerLock {
    fn acquire(ledger_path: &Path) -> Result<LedgerLock> {
        let mut name = ledger_path
            .file_name()
            .map(|n| n.to_os_string())
            .unwrap_or_default();
        name.push(".lock");
        let lock_path = ledger_path.with_file_name(name);
        let file = fs::OpenOptions::new()
            .create(true)
            .write(true)
            .open(&lock_path)
            .with_context(|| format!("cannot open lock file {}", lock_path.display()))?;
        file.lock()
            .with_context(|| format!("cannot lock {}", lock_path.display()))?;
        Ok(LedgerLock { _file: file })
    }
}

fn read_document(path: &Path) -> Result<Document> {
    let bytes =
        fs::read(path).with_context(|| format!("cannot read document {}", path.display()))?;
    Ok(Document::new(path.display().to_string(), bytes))
}

/// Where a freshly issued stamp for `origin` goes: into `--out` if given,
/// otherwise beside the document.
fn stamp_target(out: Option<&Path>, origin: &Path) -> PathBuf {
    match out {
        Some(dir) => {
            let sidecar = stamp_path_for(origin);
            let name = sidecar.file_name().expect("sidecar path has a file name");
            dir.join(name)
        }
        None => stamp_path_for(origin),
    }
}

/// A re-anchored prior stamp replaces its old file (or lands in `--out`).
fn prior_target(out: Option<&Path>, stamp_path: &Path) -> PathBuf {
    match (out, stamp_path.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => stamp_path.to_path_buf(),
    }
}

/// Label the prior's document by stripping the stamp suffix back off.
fn prior_label(stamp_path: &Path) -> String {
    let s = stamp_path.display().to_string();
    s.strip_suffix(".stamp.json").unwrap_or(&s).to_string()
}

fn cmd_issue(
    paths: &Paths,
    case: u8,
    issuer: Option<String>,
    orgs: Vec<String>,
    priors: Vec<PathBuf>,
    documents: Vec<PathBuf>,
) -> Result<u8> {
    if documents.is_empty() {
        bail!("at least one document is required");
    }
    match case {
        1 | 2 => {
            if orgs.len() > 1 || (orgs.len() == 1 && issuer.is_some()) {
                bail!("--orgs only applies to --case 3");
            }
            if case == 1 && !priors.is_empty() {
                bail!("--prior only applies to --case 2");
            }
            if case == 2 && priors.is_empty() {
                bail!("--case 2 requires at least one --prior stamp");
            }
        }
        3 => {
            if orgs.is_empty() {
                bail!("--case 3 requires --orgs");
            }
            if !priors.is_empty() {
                bail!("--prior only applies to --case 2");
            }
            if documents.len() != 1 {
                bail!("--case 3 anchors exactly one document");
            }
        }
        other => bail!("--case must be 1, 2 or 3, got {other}"),
    }

    let clock = make_clock()?;
    let docs: Vec<Document> = documents
        .iter()
        .map(|p| read_document(p))
        .collect::<Result<_>>()?;
    if let Some(dir) = &paths.out {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    }

    let _lock = LedgerLock::acquire(&paths.ledger)?;
    let mut ledger = if paths.ledger.exists() {
        Ledger::load(&paths.ledger)
            .with_context(|| format!("cannot load ledger {}", paths.ledger.display()))?
    } else {
        Ledger::new()
    };

    // Targets line up with receipt order: new documents, then priors.
    let out = paths.out.as_deref();
    let mut targets: Vec<PathBuf> = documents.iter().map(|p| stamp_target(out, p)).collect();

    let receipt = match case {
        1 | 2 => {
            let name = issuer.as_deref().context("--issuer is required")?;
            let keypair = load_keypair(&paths.keys, name)?;
            if case == 1 {
                issue_batch(&keypair, &docs, &mut ledger, clock.as_ref())?
            } else {
                let mut prior_pairs = Vec::with_capacity(priors.len());
                for path in &priors {
                    let stamp = Stamp::load(path)
                        .with_context(|| format!("cannot load prior stamp {}", path.display()))?;
                    prior_pairs.push((prior_label(path), stamp));
                    targets.push(prior_target(out, path));
                }
                issue_chained(&keypair, &docs, &prior_pairs, &mut ledger, clock.as_ref())?
            }
        }
        _ => {
            let mut org_keys = Vec::with_capacity(orgs.len());
            for name in &orgs {
                let keypair = load_keypair(&paths.keys, name)?;
                let locator = keypair.key_id().to_hex();
                org_keys.push((keypair, locator));
            }
            issue_certified(&docs[0], &org_keys, &mut ledger, clock.as_ref())?
        }
    };

    ledger
        .append_latest_to(&paths.ledger)
        .with_context(|| format!("cannot write ledger {}", paths.ledger.display()))?;

    #[derive(Serialize)]
    struct StampOut {
        document: String,
        stamp_file: String,
    }
    #[derive(Serialize)]
    struct IssueOut {
        stamps: Vec<StampOut>,
        tx_id: String,
    }
    let mut stamps = Vec::with_capacity(receipt.stamps.len());
    for ((label, stamp), target) in receipt.stamps.iter().zip(&targets) {
        stamp
            .save(target)
            .with_context(|| format!("cannot write stamp {}", target.display()))?;
        stamps.push(StampOut {
            document: label.clone(),
            stamp_file: target.display().to_string(),
        });
    }
    print_json(&IssueOut {
        stamps,
        tx_id: receipt.tx_id.to_hex(),
    })?;
    Ok(0)
}

fn cmd_verify(paths: &Paths, document: &Path, stamp: Option<PathBuf>) -> Result<u8> {
    let stamp_path = stamp.unwrap_or_else(|| stamp_path_for(document));
    let bytes = fs::read(document)
        .with_context(|| format!("cannot read document {}", document.display()))?;
    let stamp = Stamp::load(&stamp_path)
        .with_context(|| format!("cannot load stamp {}", stamp_path.display()))?;
    let ledger = Ledger::load(&paths.ledger)
        .with_context(|| format!("cannot load ledger {}", paths.ledger.display()))?;
    let resolver = KeyDirectory::new(&paths.keys);
    let verdict = verify_document(&bytes, &stamp, &ledger, &resolver);
    print_json(&verdict)?;
    Ok(if verdict.is_accept() { 0 } else { 1 })
}

fn cmd_ledger(ledger_path: &Path, action: LedgerAction) -> Result<u8> {
    let ledger = Ledger::load(ledger_path)
        .with_context(|| format!("cannot load ledger {}", ledger_path.display()))?;
    match action {
        LedgerAction::Show => {
            print!("{}", ledger.to_lines());
            Ok(0)
        }
        LedgerAction::Audit => {
            let outcome = ledger.audit();
            print_json(&outcome)?;
            Ok(if outcome.is_ok() { 0 } else { 1 })
        }
        LedgerAction::Tx { id } => {
            let tx_id = Digest::from_hex(&id).map_err(|e| anyhow::anyhow!("bad tx id: {e}"))?;
            match ledger.query(&tx_id) {
                Some(tx) => {
                    print_json(tx)?;
                    Ok(0)
                }
                None => {
                    #[derive(Serialize)]
                    struct NotFound<'a> {
                        error: &'a str,
                        tx_id: String,
                    }
                    print_json(&NotFound {
                        error: "tx_not_found",
                        tx_id: tx_id.to_hex(),
                    })?;
                    Ok(1)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct BenchStats {
    mean_s: f64,
    min_s: f64,
    max_s: f64,
    per_run_s: Vec<f64>,
}

impl BenchStats {
    fn from(samples: Vec<f64>) -> BenchStats {
        let n = samples.len().max(1) as f64;
        BenchStats {
            mean_s: samples.iter().sum::<f64>() / n,
            min_s: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max_s: samples.iter().copied().fold(0.0, f64::max),
            per_run_s: samples,
        }
    }
}

#[derive(Serialize)]
struct MemoryReport {
    peak_rss_kb: u64,
    note: &'static str,
}

#[derive(Serialize)]
struct BenchReport {
    case: u8,
    users: u32,
    docs: u32,
    runs: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    orgs: Option<u32>,
    doc_bytes: usize,
    /// Wall time to anchor everything in one run.
    add: BenchStats,
    /// Mean wall time to verify one document, per run.
    verify: BenchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    memory: Option<MemoryReport>,
}

/// Peak resident set size in kB, best effort (Linux `/proc`).
fn peak_rss_kb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn synthetic_doc(user: u32, index: u32, len: usize) -> Document {
    let mut bytes = vec![0u8; len.max(1)];
    for (i, b) in bytes.iter_mut().enumerate() {
        *b = (i as u32)
            .wrapping_mul(31)
            .wrapping_add(user.wrapping_mul(renumber(index)))
            .to_le_bytes()[0];
    }
    // A distinct header keeps every document's digest unique.
    let header = format!("bench:{user}:{index}:");
    let head = header.len().min(bytes.len());
    bytes[..head].copy_from_slice(&header.as_bytes()[..head]);
    Document::new(format!("bench-{user}-{index}"), bytes)
}

fn renumber(i: u32) -> u32 {
    i.wrapping_mul(2_654_435_761).wrapping_add(97)
}

fn cmd_bench(case: u8, users: u32, docs: u32, runs: u32, orgs: u32, doc_bytes: usize) -> Result<u8> {
    if runs < 1 {
        bail!("--runs must be at least 1");
    }
    if users < 1 || docs < 1 || orgs < 1 {
        bail!("--users, --docs and --orgs must be at least 1");
    }
    if case != 1 && case != 3 {
        bail!("--case must be 1 or 3 for bench");
    }

    let clock = FixedClock(1_750_000_000);
    let mut add_samples = Vec::with_capacity(runs as usize);
    let mut verify_samples = Vec::with_capacity(runs as usize);

    for _ in 0..runs {
        let mut ledger = Ledger::new();
        let mut ring = KeyRing::new();
        // (bytes, stamp) pairs to verify afterwards.
        let mut workload: Vec<(Vec<u8>, Stamp)> = Vec::new();

        let started = Instant::now();
        if case == 1 {
            for u in 0..users {
                let keypair =
                    KeyPair::from_seed(&[(u % 251) as u8 + 1; 32]).expect("fixed-length seed");
                ring.insert_by_key_id(keypair.public().clone());
                let documents: Vec<Document> =
                    (0..docs).map(|d| synthetic_doc(u, d, doc_bytes)).collect();
                let receipt = issue_batch(&keypair, &documents, &mut ledger, &clock)
                    .map_err(|e| anyhow::anyhow!("bench issuance failed: {e}"))?;
                for (doc, (_, stamp)) in documents.into_iter().zip(receipt.stamps) {
                    workload.push((doc.bytes, stamp));
                }
            }
        } else {
            let org_keys: Vec<(KeyPair, String)> = (0..orgs)
                .map(|o| {
                    let kp = KeyPair::from_seed(&[(o % 251) as u8 + 1; 32])
                        .expect("fixed-length seed");
                    let locator = kp.key_id().to_hex();
                    ring.insert_by_key_id(kp.public().clone());
                    (kp, locator)
                })
                .collect();
            for d in 0..docs {
                let doc = synthetic_doc(0, d, doc_bytes);
                let receipt = issue_certified(&doc, &org_keys, &mut ledger, &clock)
                    .map_err(|e| anyhow::anyhow!("bench issuance failed: {e}"))?;
                workload.push((doc.bytes, receipt.stamps.into_iter().next().expect("one stamp").1));
            }
        }
        add_samples.push(started.elapsed().as_secs_f64());

        let started = Instant::now();
        for (bytes, stamp) in &workload {
            let verdict = verify_document(bytes, stamp, &ledger, &ring);
            if !verdict.is_accept() {
                bail!("bench verification rejected: {}", verdict.cause);
            }
        }
        verify_samples.push(started.elapsed().as_secs_f64() / workload.len() as f64);
    }

    let report = BenchReport {
        case,
        users,
        docs,
        runs,
        orgs: (case == 3).then_some(orgs),
        doc_bytes,
        add: BenchStats::from(add_samples),
        verify: BenchStats::from(verify_samples),
        memory: peak_rss_kb().map(|peak_rss_kb| MemoryReport {
            peak_rss_kb,
            note: "peak RSS, best effort; not comparable across platforms",
        }),
    };
    print_json(&report)?;
    Ok(0)
}
