//! Command-line front end used by the `nonsplit` binary.
//!
//! Exit codes: 0 success, 1 a checked property failed (the witness is printed),
//! 2 usage, parse or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::covering::{find_cover_m, find_single_cover, loglog_center, product_range, CoverCertificate};
use crate::error::{Error, Result};
use crate::experiment::{
    async_exhaustive, async_randomized, default_horizon, rooted_product_campaign, run_experiment, verify_lemmas,
    AsyncSummary, ExperimentSpec, GeneratorKind, LemmaCampaign,
};
use crate::nodeset::NodeSet;
use crate::pattern::{AsyncPolicy, CommunicationPattern, Horizon};
use crate::radius::{broadcast_time, check_no_broadcaster_prefix, dynamic_radius, rooted_product_nonsplit_check};
use crate::{NodeId, Round};

#[derive(Parser, Debug)]
#[command(
    name = "nonsplit",
    version,
    about = "Broadcast and covering tools for dynamic networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct PatternArgs {
    /// Pattern file (`n` line, then `round t` blocks of edges).
    #[arg(long, conflicts_with = "gen")]
    pattern: Option<PathBuf>,
    /// Built-in generator.
    #[arg(long = "gen", value_enum)]
    gen: Option<GeneratorKind>,
    #[arg(long)]
    n: Option<usize>,
    /// Required for randomized generators.
    #[arg(long)]
    seed: Option<u64>,
    /// Crash budget for `async` (default `⌊(n - 1) / 2⌋`).
    #[arg(long)]
    f: Option<usize>,
    /// Extra-edge probability for the random generators.
    #[arg(long, default_value_t = 0.0)]
    prob: f64,
    #[arg(long, default_value = "uniform-random-quorums")]
    policy: AsyncPolicy,
}

impl PatternArgs {
    fn load(&self) -> Result<CommunicationPattern> {
        if let Some(path) = &self.pattern {
            return CommunicationPattern::from_text(&read(path)?);
        }
        let kind = self
            .gen
            .ok_or_else(|| Error::InvalidConfig("one of --pattern or --gen is required".into()))?;
        let n = match (kind, self.n) {
            (GeneratorKind::Figure1, _) => 6,
            (_, Some(n)) => n,
            (_, None) => return Err(Error::InvalidConfig(format!("--gen {} needs --n", kind.label()))),
        };
        let seed = match (kind.is_randomized(), self.seed) {
            (true, None) => return Err(Error::InvalidConfig(format!("--gen {} needs --seed", kind.label()))),
            (_, s) => s.unwrap_or(0),
        };
        let f = self.f.unwrap_or(n.saturating_sub(1) / 2);
        kind.build(n, seed, f, self.prob, self.policy)
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Rounds to inspect when none are given: the stored length, else `n`.
fn default_rounds(p: &CommunicationPattern) -> Round {
    match p.horizon() {
        Horizon::Finite(h) => h,
        Horizon::Unbounded => p.n().max(1),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Broadcast time of every node and the dynamic radius, as CSV.
    Radius {
        #[command(flatten)]
        pattern: PatternArgs,
        /// Default: stored length, else `max(2⌈log₂ n⌉, certified time, n)`.
        #[arg(long)]
        horizon: Option<Round>,
    },
    /// Checks that every graph in rounds `1..=rounds` is nonsplit.
    CheckNonsplit {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        rounds: Option<Round>,
    },
    /// Checks that every graph in rounds `1..=rounds` is rooted.
    CheckRooted {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        rounds: Option<Round>,
    },
    /// Prints the product `G_t1 ∘ ... ∘ G_(t2-1)`.
    Product {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        t1: Round,
        #[arg(long)]
        t2: Round,
    },
    /// Writes `rounds` rounds of a pattern in the text format.
    Generate {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        rounds: Round,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finds at most `m` nodes at `t1` covering `W` at `t2` and prints the certificate.
    Cover {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long = "W", value_delimiter = ',', required = true)]
        w: Vec<NodeId>,
        #[arg(long)]
        t1: Round,
        #[arg(long)]
        t2: Round,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replays a certificate against a pattern.
    VerifyCert {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Runs the certified `O(log log n)` pipeline and prints its center and time.
    LoglogCenter {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Prints, for each node `j`, a node it has not reached before round `k`.
    ConsensusWitness {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        k: Round,
    },
    /// Asynchronous rounds: radius at most 2 when `n > 2f`.
    AsyncVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: usize,
        #[arg(long, default_value = "uniform-random-quorums")]
        policy: AsyncPolicy,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate every two-round prefix instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Products of `n - 1` rooted graphs are nonsplit: a stored pattern or random trials.
    RootedProduct {
        #[arg(long, conflicts_with_all = ["n", "trials", "seed"])]
        pattern: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs a TOML experiment grid and writes CSV.
    Experiment {
        spec: PathBuf,
        /// Overrides `output` in the spec; `-` for stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized checks of the covering and arithmetic lemmas.
    VerifyLemmas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Transitivity instances; other counts scale from it.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

fn write_or_print(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text)?,
        _ => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn print_async(out: &mut dyn Write, s: &AsyncSummary) -> Result<i32> {
    writeln!(
        out,
        "max_radius={}, prefixes_checked={}",
        s.max_radius, s.prefixes_checked
    )?;
    for v in &s.violations {
        writeln!(out, "violation: {v}")?;
    }
    Ok(if s.violations.is_empty() { 0 } else { 1 })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Radius { pattern, horizon } => {
            let p = pattern.load()?;
            let horizon = horizon.unwrap_or_else(|| match p.horizon() {
                Horizon::Finite(h) => h,
                Horizon::Unbounded => default_horizon(p.n()),
            });
            out.write_all(dynamic_radius(&p, horizon)?.to_csv().as_bytes())?;
            Ok(0)
        }
        Command::CheckNonsplit { pattern, rounds } => {
            let p = pattern.load()?;
            let rounds = rounds.unwrap_or_else(|| default_rounds(&p));
            for t in 1..=rounds {
                if let Some((i, j)) = p.graph_at(t)?.split_witness() {
                    writeln!(out, "split: round {t}, nodes {i} and {j} have no common in-neighbor")?;
                    return Ok(1);
                }
            }
            writeln!(out, "nonsplit: rounds 1..={rounds}")?;
            Ok(0)
        }
        Command::CheckRooted { pattern, rounds } => {
            let p = pattern.load()?;
            let rounds = rounds.unwrap_or_else(|| default_rounds(&p));
            for t in 1..=rounds {
                if !p.graph_at(t)?.is_rooted() {
                    writeln!(out, "not rooted: round {t}")?;
                    return Ok(1);
                }
            }
            writeln!(out, "rooted: rounds 1..={rounds}")?;
            Ok(0)
        }
        Command::Product { pattern, t1, t2 } => {
            let p = pattern.load()?;
            out.write_all(product_range(&p, t1, t2)?.to_text().as_bytes())?;
            Ok(0)
        }
        Command::Generate {
            pattern,
            rounds,
            out: path,
        } => {
            let p = pattern.load()?;
            write_or_print(out, path.as_deref(), &p.to_text(rounds)?)?;
            Ok(0)
        }
        Command::Cover {
            pattern,
            w,
            t1,
            t2,
            m,
            out: path,
        } => {
            let p = pattern.load()?;
            let target = NodeSet::from_ids(p.n(), w)?;
            let found = if m == 1 {
                find_single_cover(&p, &target, t1, t2).map(|(_, c)| c)
            } else {
                find_cover_m(&p, &target, t1, t2, m).map(|(_, c)| c)
            };
            match found {
                Ok(cert) => {
                    write_or_print(out, path.as_deref(), &cert.to_text())?;
                    Ok(0)
                }
                Err(Error::NotNonsplit(t)) => {
                    let (i, j) = p.graph_at(t)?.split_witness().unwrap_or((0, 0));
                    writeln!(out, "split: round {t}, nodes {i} and {j} have no common in-neighbor")?;
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyCert { pattern, cert } => {
            let p = pattern.load()?;
            let cert = CoverCertificate::from_text(&read(&cert)?, p.n())?;
            match cert.verify(&p) {
                Ok(()) => {
                    writeln!(
                        out,
                        "valid: {} at {} covers {} at {}",
                        cert.source(),
                        cert.t1(),
                        cert.target(),
                        cert.t2()
                    )?;
                    Ok(0)
                }
                Err(e) => {
                    writeln!(out, "invalid: {e}")?;
                    Ok(1)
                }
            }
        }
        Command::LoglogCenter { pattern, cert_out } => {
            let p = pattern.load()?;
            let (u, time, cert) = match loglog_center(&p) {
                Err(Error::NotNonsplit(t)) => {
                    let (i, j) = p.graph_at(t)?.split_witness().unwrap_or((0, 0));
                    writeln!(out, "split: round {t}, nodes {i} and {j} have no common in-neighbor")?;
                    return Ok(1);
                }
                r => r?,
            };
            if let Some(path) = cert_out {
                std::fs::write(path, cert.to_text())?;
            }
            let bt = broadcast_time(&p, u, time)?;
            writeln!(out, "center={u} certified_time={time} broadcast_time={bt}")?;
            Ok(if cert.verify(&p).is_ok() && bt.resolved().is_some_and(|b| b <= time) {
                0
            } else {
                1
            })
        }
        Command::ConsensusWitness { pattern, k } => {
            let p = pattern.load()?;
            match check_no_broadcaster_prefix(&p, k) {
                Ok(map) => {
                    for (j, i) in map {
                        writeln!(out, "{j} -> {i}")?;
                    }
                    Ok(0)
                }
                Err(Error::BroadcasterExists(j)) => {
                    writeln!(out, "node {j} is a broadcaster before round {k}")?;
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::AsyncVerify {
            n,
            f,
            policy,
            trials,
            seed,
            exhaustive,
        } => {
            if n <= 2 * f {
                return Err(Error::InvalidConfig(format!("need n > 2f, got n={n} f={f}")));
            }
            let summary = if exhaustive {
                async_exhaustive(n, f)?
            } else {
                async_randomized(n, f, policy, trials, seed)?
            };
            print_async(out, &summary)
        }
        Command::RootedProduct {
            pattern,
            n,
            trials,
            seed,
        } => {
            if let Some(path) = pattern {
                let p = CommunicationPattern::from_text(&read(&path)?)?;
                let rounds = p.n().saturating_sub(1).max(1);
                let check = rooted_product_nonsplit_check(&p.window(1, 1 + rounds)?)?;
                return Ok(match check.split_witness {
                    None => {
                        writeln!(out, "nonsplit")?;
                        0
                    }
                    Some((i, j)) => {
                        writeln!(out, "split: nodes {i} and {j} have no common in-neighbor")?;
                        1
                    }
                });
            }
            let n = n.ok_or_else(|| Error::InvalidConfig("one of --pattern or --n is required".into()))?;
            let summary = rooted_product_campaign(n, trials, seed)?;
            writeln!(out, "n={n} trials={trials} split={}", summary.violations.len())?;
            for (s, (i, j)) in &summary.violations {
                writeln!(out, "split: seed {s}, nodes {i} and {j}")?;
            }
            Ok(if summary.violations.is_empty() { 0 } else { 1 })
        }
        Command::Experiment { spec, out: path } => {
            let spec = ExperimentSpec::from_toml(&read(&spec)?)?;
            let table = run_experiment(&spec)?;
            write_or_print(out, path.as_deref().or(spec.output.as_deref()), &table.to_csv())?;
            for v in &table.violations {
                writeln!(out, "violation: {v}")?;
            }
            Ok(if table.violations.is_empty() { 0 } else { 1 })
        }
        Command::VerifyLemmas { seed, trials } => {
            let campaign = LemmaCampaign {
                seed,
                transitivity: trials,
                arithmetic: trials * 10,
                heavy_preimage: (trials / 50).max(1),
                certificates: (trials / 100).max(1),
                async_rounds: (trials / 20).max(1),
            };
            let mut code = 0;
            for check in verify_lemmas(&campaign)? {
                let status = if check.passed() { "ok" } else { "FAILED" };
                writeln!(out, "{}: {} instances, {status}", check.name, check.instances)?;
                for v in check.violations.iter().take(5) {
                    writeln!(out, "  counterexample: {v}")?;
                }
                if !check.passed() {
                    code = 1;
                }
            }
            Ok(code)
        }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
