//! Reproducible campaigns: experiment grids, async and rooted-product checks, and the
//! randomized lemma suite behind `verify-lemmas`.
//!
//! Every campaign is a pure function of its seed. Rows may be computed in
//! parallel but are sorted before they are returned.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::covering::{
    ceil_log2, ceil_log2_ratio, covers, covers_over, find_cover_m, find_single_cover, heavy_preimage_node,
    loglog_center, product_range, small_cover_loglog, LoglogParams, SubsetAssignment,
};
use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::pattern::{all_async_graphs, AsyncAdversaryConfig, AsyncPolicy, CenterSchedule, CommunicationPattern};
use crate::radius::{broadcast_time, dynamic_radius, rooted_product_nonsplit_check, BroadcastTime};
use crate::{NodeId, Round};

/// Horizon used when none is given: `max(2⌈log₂ n⌉, loglog certified time, n)`.
pub fn default_horizon(n: usize) -> Round {
    let log_bound = 2 * ceil_log2(n.max(1) as u64) as usize;
    log_bound.max(LoglogParams::for_n(n).certified_time()).max(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Figure1,
    Complete,
    /// Star with rotating center.
    Star,
    Line,
    RandomNonsplit,
    RandomRooted,
    Async,
}

impl GeneratorKind {
    /// Builds a pattern of this family. `f` and `policy` only matter for `Async`;
    /// `prob` is the extra-edge probability of the random families.
    pub fn build(self, n: usize, seed: u64, f: usize, prob: f64, policy: AsyncPolicy) -> Result<CommunicationPattern> {
        match self {
            GeneratorKind::Figure1 => Ok(CommunicationPattern::figure1()),
            GeneratorKind::Complete => CommunicationPattern::complete(n),
            GeneratorKind::Star => CommunicationPattern::star(n, CenterSchedule::Rotating),
            GeneratorKind::Line => CommunicationPattern::line(n),
            GeneratorKind::RandomNonsplit => CommunicationPattern::random_nonsplit(n, seed, prob),
            GeneratorKind::RandomRooted => CommunicationPattern::random_rooted_with_extra(n, seed, prob),
            GeneratorKind::Async => CommunicationPattern::asynchronous(AsyncAdversaryConfig::new(n, f, seed, policy)?),
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            GeneratorKind::RandomNonsplit | GeneratorKind::RandomRooted | GeneratorKind::Async
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            GeneratorKind::Figure1 => "figure1",
            GeneratorKind::Complete => "complete",
            GeneratorKind::Star => "star",
            GeneratorKind::Line => "line",
            GeneratorKind::RandomNonsplit => "random-nonsplit",
            GeneratorKind::RandomRooted => "random-rooted",
            GeneratorKind::Async => "async",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum NodeCounts {
    List(Vec<usize>),
    Range {
        from: usize,
        to: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl NodeCounts {
    pub fn values(&self) -> Vec<usize> {
        match self {
            NodeCounts::List(v) => v.clone(),
            NodeCounts::Range { from, to, step } => (*from..=*to).step_by((*step).max(1)).collect(),
        }
    }
}

/// Crash budget: a fixed `f`, or `"half"` for `⌊(n - 1) / 2⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum CrashBudget {
    Fixed(usize),
    Named(String),
}

impl CrashBudget {
    fn resolve(&self, n: usize) -> Result<usize> {
        match self {
            CrashBudget::Fixed(f) => Ok(*f),
            CrashBudget::Named(s) if s == "half" => Ok(n.saturating_sub(1) / 2),
            CrashBudget::Named(s) => Err(Error::InvalidConfig(format!("unknown crash budget `{s}`"))),
        }
    }
}

/// One experiment grid, usually read from TOML.
///
/// ```toml
/// name = "nonsplit-scaling"
/// generator = "random-nonsplit"
/// n = [4, 8, 16, 32, 64]
/// seeds = 50
/// base_seed = 1
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub generator: GeneratorKind,
    pub n: NodeCounts,
    #[serde(default)]
    pub f: Option<CrashBudget>,
    #[serde(default)]
    pub prob: f64,
    #[serde(default)]
    pub policies: Vec<String>,
    pub seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub horizon: Option<Round>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Run the certified `O(log log n)` pipeline on nonsplit families.
    #[serde(default = "yes")]
    pub loglog: bool,
    /// Adds a `wall_ms` column, which makes the output nondeterministic.
    #[serde(default)]
    pub timing: bool,
}

fn yes() -> bool {
    true
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.values().is_empty() {
            return Err(Error::InvalidConfig("empty node-count grid".into()));
        }
        if self.n.values().contains(&0) {
            return Err(Error::EmptyGraph);
        }
        if self.seeds == 0 {
            return Err(Error::InvalidConfig("seeds must be at least 1".into()));
        }
        if self.horizon == Some(0) {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        self.policies()?;
        Ok(())
    }

    fn policies(&self) -> Result<Vec<AsyncPolicy>> {
        if self.policies.is_empty() {
            return Ok(vec![AsyncPolicy::UniformRandomQuorums]);
        }
        self.policies.iter().map(|p| p.parse()).collect()
    }
}

/// Certified-pipeline column of an experiment row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoglogCell {
    Time(Round),
    NotApplicable,
    BudgetExceeded,
    Failed(String),
}

impl std::fmt::Display for LoglogCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoglogCell::Time(t) => write!(f, "{t}"),
            LoglogCell::NotApplicable => f.write_str("na"),
            LoglogCell::BudgetExceeded => f.write_str("budget_exceeded"),
            LoglogCell::Failed(_) => f.write_str("error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub generator: String,
    pub n: usize,
    pub f: Option<usize>,
    pub seed: u64,
    pub dynamic_radius: BroadcastTime,
    pub log2_bound: u32,
    pub loglog: LoglogCell,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentTable {
    pub name: String,
    pub timing: bool,
    pub rows: Vec<ExperimentRow>,
    /// Property violations found while running; never silently dropped.
    pub violations: Vec<String>,
}

impl ExperimentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment={}", self.name);
        out.push_str("generator,n,f,seed,dynamic_radius,log2_bound,loglog_time");
        out.push_str(if self.timing { ",wall_ms\n" } else { "\n" });
        for r in &self.rows {
            let f = r.f.map(|f| f.to_string()).unwrap_or_default();
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                r.generator, r.n, f, r.seed, r.dynamic_radius, r.log2_bound, r.loglog
            );
            if self.timing {
                let _ = write!(out, ",{:.3}", r.wall_ms.unwrap_or(0.0));
            }
            out.push('\n');
        }
        out
    }
}

struct Job {
    label: String,
    kind: GeneratorKind,
    n: usize,
    f: Option<usize>,
    policy: Option<AsyncPolicy>,
    seed: u64,
}

fn build_pattern(job: &Job, prob: f64) -> Result<CommunicationPattern> {
    let policy = job.policy.unwrap_or(AsyncPolicy::UniformRandomQuorums);
    job.kind.build(job.n, job.seed, job.f.unwrap_or(0), prob, policy)
}

fn is_nonsplit_family(job: &Job) -> bool {
    match job.kind {
        GeneratorKind::Figure1 | GeneratorKind::Complete | GeneratorKind::Star | GeneratorKind::RandomNonsplit => true,
        GeneratorKind::Async => job.n > 2 * job.f.unwrap_or(0),
        GeneratorKind::Line | GeneratorKind::RandomRooted => job.n <= 2,
    }
}

fn run_job(job: &Job, spec: &ExperimentSpec) -> Result<(ExperimentRow, Vec<String>)> {
    let started = Instant::now();
    let p = build_pattern(job, spec.prob)?;
    let n = p.n();
    let horizon = spec.horizon.unwrap_or_else(|| default_horizon(n));
    let report = dynamic_radius(&p, horizon)?;
    let log2_bound = ceil_log2(n as u64);
    let tag = format!("{} n={} seed={}", job.label, n, job.seed);
    let mut violations = Vec::new();

    let nonsplit = is_nonsplit_family(job);
    if nonsplit && report.dynamic_radius > BroadcastTime::At(log2_bound as usize) {
        violations.push(format!(
            "{tag}: dynamic radius {} exceeds ⌈log₂ n⌉ = {log2_bound}",
            report.dynamic_radius
        ));
    }
    if job.kind == GeneratorKind::Async && nonsplit && report.dynamic_radius > BroadcastTime::At(2) {
        violations.push(format!(
            "{tag}: asynchronous-round radius {} exceeds 2",
            report.dynamic_radius
        ));
    }
    if job.kind == GeneratorKind::Line && report.dynamic_radius != BroadcastTime::At(n - 1) {
        violations.push(format!(
            "{tag}: line radius {} differs from n - 1",
            report.dynamic_radius
        ));
    }

    let loglog = if !(spec.loglog && nonsplit) {
        LoglogCell::NotApplicable
    } else {
        match loglog_center(&p) {
            Ok((u, time, cert)) => {
                if let Err(e) = cert.verify(&p) {
                    violations.push(format!("{tag}: pipeline certificate rejected: {e}"));
                }
                match broadcast_time(&p, u, time)? {
                    BroadcastTime::At(bt) if bt <= time => {}
                    other => violations.push(format!("{tag}: center {u} has broadcast time {other} > {time}")),
                }
                LoglogCell::Time(time)
            }
            Err(Error::BudgetExceeded { .. }) => LoglogCell::BudgetExceeded,
            Err(e) => {
                violations.push(format!("{tag}: pipeline failed on a nonsplit pattern: {e}"));
                LoglogCell::Failed(e.to_string())
            }
        }
    };
    let row = ExperimentRow {
        generator: job.label.clone(),
        n,
        f: job.f,
        seed: job.seed,
        dynamic_radius: report.dynamic_radius,
        log2_bound,
        loglog,
        wall_ms: spec.timing.then(|| started.elapsed().as_secs_f64() * 1e3),
    };
    Ok((row, violations))
}

/// Runs every `(n, seed[, policy])` cell of the grid. Seeds are `base_seed + k`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentTable> {
    spec.validate()?;
    let policies = spec.policies()?;
    let mut jobs = Vec::new();
    for n in spec.n.values() {
        let f = match (&spec.f, spec.generator) {
            (Some(b), _) => Some(b.resolve(n)?),
            (None, GeneratorKind::Async) => Some(n.saturating_sub(1) / 2),
            (None, _) => None,
        };
        let variants: Vec<Option<AsyncPolicy>> = if spec.generator == GeneratorKind::Async {
            policies.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        for policy in variants {
            for k in 0..spec.seeds as u64 {
                let label = match policy {
                    Some(p) => format!("async:{}", p.name()),
                    None => spec.generator.label().to_string(),
                };
                jobs.push(Job {
                    label,
                    kind: spec.generator,
                    n,
                    f,
                    policy,
                    seed: spec.base_seed.wrapping_add(k),
                });
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|job| run_job(job, spec))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(results.len());
    let mut violations = Vec::new();
    for (row, v) in results {
        rows.push(row);
        violations.extend(v);
    }
    rows.sort_by(|a, b| (a.n, a.seed, &a.generator).cmp(&(b.n, b.seed, &b.generator)));
    violations.sort();
    Ok(ExperimentTable {
        name: spec.name.clone(),
        timing: spec.timing,
        rows,
        violations,
    })
}

/// Outcome of an asynchronous-round campaign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsyncSummary {
    pub max_radius: BroadcastTime,
    pub prefixes_checked: usize,
    /// Descriptions of patterns whose radius exceeded 2.
    pub violations: Vec<String>,
}

/// Largest `n` for which [`async_exhaustive`] enumerates all two-round prefixes.
pub const EXHAUSTIVE_ASYNC_MAX_N: usize = 3;

/// Dynamic radius over every two-round prefix `(G_1, G_2)` with in-degrees `>= n - f`.
pub fn async_exhaustive(n: usize, f: usize) -> Result<AsyncSummary> {
    if n > EXHAUSTIVE_ASYNC_MAX_N {
        return Err(Error::InvalidConfig(format!(
            "exhaustive enumeration is limited to n <= {EXHAUSTIVE_ASYNC_MAX_N}"
        )));
    }
    let graphs = all_async_graphs(n, f)?;
    let mut summary = AsyncSummary {
        max_radius: BroadcastTime::At(0),
        prefixes_checked: 0,
        violations: Vec::new(),
    };
    for (a, g1) in graphs.iter().enumerate() {
        for (b, g2) in graphs.iter().enumerate() {
            let p = CommunicationPattern::stored(vec![g1.clone(), g2.clone()])?;
            let r = dynamic_radius(&p, 2)?.dynamic_radius;
            summary.max_radius = summary.max_radius.max(r);
            summary.prefixes_checked += 1;
            if r > BroadcastTime::At(2) {
                summary
                    .violations
                    .push(format!("prefix ({a}, {b}): G1 = {g1:?}, G2 = {g2:?}"));
            }
        }
    }
    Ok(summary)
}

/// `trials` seeded async patterns (`seed = base_seed + k`), radius evaluated with horizon 3.
pub fn async_randomized(
    n: usize,
    f: usize,
    policy: AsyncPolicy,
    trials: usize,
    base_seed: u64,
) -> Result<AsyncSummary> {
    let radii = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let p = CommunicationPattern::asynchronous(AsyncAdversaryConfig::new(n, f, seed, policy)?)?;
            Ok((seed, dynamic_radius(&p, 3)?.dynamic_radius))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = AsyncSummary {
        max_radius: BroadcastTime::At(0),
        prefixes_checked: trials,
        violations: Vec::new(),
    };
    for (seed, r) in radii {
        summary.max_radius = summary.max_radius.max(r);
        if r > BroadcastTime::At(2) {
            summary
                .violations
                .push(format!("n={n} f={f} policy={policy} seed={seed}: radius {r}"));
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedSummary {
    pub n: usize,
    pub trials: usize,
    /// `(seed, split pair)` for every product that was not nonsplit.
    pub violations: Vec<(u64, (NodeId, NodeId))>,
}

/// Products of `n - 1` consecutive random rooted graphs, one pattern per seed.
pub fn rooted_product_campaign(n: usize, trials: usize, base_seed: u64) -> Result<RootedSummary> {
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let p = CommunicationPattern::random_rooted(n, seed)?;
            let graphs = p.window(1, 1 + (n - 1).max(1))?;
            Ok((seed, rooted_product_nonsplit_check(&graphs)?.split_witness))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RootedSummary {
        n,
        trials,
        violations: results
            .into_iter()
            .filter_map(|(seed, w)| w.map(|w| (seed, w)))
            .collect(),
    })
}

/// One named check of the lemma campaign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub instances: usize,
    pub violations: Vec<String>,
}

impl LemmaCheck {
    fn new(name: &'static str) -> Self {
        LemmaCheck {
            name,
            instances: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Instance counts for [`verify_lemmas`].
#[derive(Debug, Clone, Copy)]
pub struct LemmaCampaign {
    pub seed: u64,
    pub transitivity: usize,
    pub arithmetic: usize,
    pub heavy_preimage: usize,
    pub certificates: usize,
    pub async_rounds: usize,
}

impl LemmaCampaign {
    pub fn new(seed: u64) -> Self {
        LemmaCampaign {
            seed,
            transitivity: 10_000,
            arithmetic: 100_000,
            heavy_preimage: 200,
            certificates: 100,
            async_rounds: 500,
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> NodeSet {
    let mut s = NodeSet::empty(n);
    for i in 1..=n {
        if rng.gen_bool(p) {
            s.insert(i).expect("in range");
        }
    }
    if s.is_empty() {
        s.insert(rng.gen_range(1..=n)).expect("in range");
    }
    s
}

/// Nodes of `pool` that `u` covers in `g`, thinned at random.
fn random_covered_subset(rng: &mut ChaCha8Rng, u: &NodeSet, g: &crate::CommunicationGraph) -> NodeSet {
    let mut out = NodeSet::empty(g.n());
    for j in 1..=g.n() {
        if g.in_neighbors(j).intersects(u) && rng.gen_bool(0.6) {
            out.insert(j).expect("in range");
        }
    }
    out
}

/// Transitivity over random nonsplit patterns. Premises are made to hold by drawing
/// `W` among the nodes `U` covers and `X` among the nodes `W` covers.
pub fn transitivity_check(seed: u64, instances: usize) -> Result<LemmaCheck> {
    let mut check = LemmaCheck::new("transitivity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while check.instances < instances {
        let n = rng.gen_range(2..=12);
        let p = CommunicationPattern::random_nonsplit(n, rng.gen(), rng.gen_range(0.0..0.2))?;
        let t1 = rng.gen_range(1..=4);
        let t2 = t1 + rng.gen_range(0..=3);
        let t3 = t2 + rng.gen_range(0..=3);
        let u = random_subset(&mut rng, n, 0.3);
        let w = random_covered_subset(&mut rng, &u, &product_range(&p, t1, t2)?);
        let x = random_covered_subset(&mut rng, &w, &product_range(&p, t2, t3)?);
        if !(covers_over(&u, t1, &w, t2, &p)? && covers_over(&w, t2, &x, t3, &p)?) {
            check.record(false, || format!("premise construction failed at n={n}"));
            continue;
        }
        let ok = covers_over(&u, t1, &x, t3, &p)?;
        check.record(ok, || format!("n={n} t=({t1},{t2},{t3}) U={u} W={w} X={x}"));
    }
    Ok(check)
}

pub fn reflexivity_check(seed: u64, instances: usize) -> Result<LemmaCheck> {
    let mut check = LemmaCheck::new("reflexivity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.gen_range(1..=12);
        let p = CommunicationPattern::random_rooted(n, rng.gen())?;
        let u = random_subset(&mut rng, n, 0.4);
        let t = rng.gen_range(1..=20);
        let ok = covers_over(&u, t, &u, t, &p)?;
        check.record(ok, || format!("n={n} t={t} U={u}"));
    }
    Ok(check)
}

/// `⌈log₂ x⌉ = ⌈log₂ ⌈x⌉⌉` on random rationals `x = a / b >= 1`.
pub fn ceil_log2_of_ceiling_check(seed: u64, instances: usize) -> LemmaCheck {
    let mut check = LemmaCheck::new("ceil-log2-of-ceiling");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let b: u64 = rng.gen_range(1..=1_000_000);
        let scale: u32 = rng.gen_range(0..20);
        let a: u64 = b + rng.gen_range(0..=b.saturating_mul(1 << scale));
        let lhs = ceil_log2_ratio(a, b);
        let rhs = ceil_log2(a.div_ceil(b));
        check.record(lhs == rhs, || format!("x = {a}/{b}: {lhs} vs {rhs}"));
    }
    check
}

/// `⌈log₂(m + n)⌉ >= ⌈log₂ m⌉ + 1` for positive `m, n` with `|m - n| <= 1`.
pub fn two_sets_check(seed: u64, instances: usize) -> LemmaCheck {
    let mut check = LemmaCheck::new("two-sets-log-bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let m: u64 = if rng.gen_bool(0.5) {
            rng.gen_range(1..=64)
        } else {
            rng.gen_range(1..=1u64 << 40)
        };
        let n = match rng.gen_range(0..3) {
            0 => m,
            1 => m + 1,
            _ => (m - 1).max(1),
        };
        let ok = ceil_log2(m + n) > ceil_log2(m);
        check.record(ok, || format!("m={m} n={n}"));
    }
    check
}

/// Union of `f`-preimages of each node, by a direct scan (independent of
/// [`heavy_preimage_node`]'s accumulation).
fn exhaustive_preimage_unions(f: &SubsetAssignment, restricted: &NodeSet) -> Vec<BTreeSet<NodeId>> {
    let members = restricted.to_vec();
    (1..=f.n())
        .map(|w| {
            members
                .iter()
                .copied()
                .combinations(f.subset_size())
                .filter(|a| f.get(a) == Some(w))
                .flatten()
                .collect()
        })
        .collect()
}

/// Argmax against an exhaustive scan for `n <= 10`, plus the `k / e⁴` floor when `n >= 8`
/// and the subset size is `⌊ln n⌋`.
pub fn heavy_preimage_check(seed: u64, instances: usize) -> Result<LemmaCheck> {
    let mut check = LemmaCheck::new("heavy-preimage");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = (-4.0f64).exp();
    for _ in 0..instances {
        let n = rng.gen_range(2..=10);
        let lemma_regime = n >= 8 && rng.gen_bool(0.7);
        let s = if lemma_regime {
            LoglogParams::for_n(n).subset_size
        } else {
            rng.gen_range(1..=n.min(3))
        };
        let skew = rng.gen_range(1..=n);
        let fseed: u64 = rng.gen();
        let f = SubsetAssignment::from_fn(n, s, |a| {
            let mut r = ChaCha8Rng::seed_from_u64(
                fseed ^ a.iter().fold(0u64, |h, &x| h.wrapping_mul(31).wrapping_add(x as u64)),
            );
            Ok(r.gen_range(1..=skew))
        })?;
        let mut restricted = random_subset(&mut rng, n, 0.8);
        while restricted.len() < s {
            restricted.insert(rng.gen_range(1..=n))?;
        }
        let (w, union) = heavy_preimage_node(&f, &restricted)?;
        let unions = exhaustive_preimage_unions(&f, &restricted);
        let best = unions.iter().map(BTreeSet::len).max().unwrap_or(0);
        let first_best = unions.iter().position(|u| u.len() == best).map(|i| i + 1);
        let argmax_ok = Some(w) == first_best && union.to_vec() == unions[w - 1].iter().copied().collect::<Vec<_>>();
        check.record(argmax_ok, || {
            format!("n={n} s={s}: got {w}, exhaustive argmax {first_best:?}")
        });
        if lemma_regime {
            let k = restricted.len() as f64;
            let bound_ok = union.len() as f64 >= k * floor;
            check.record(bound_ok, || format!("n={n} k={k}: union {} below k/e^4", union.len()));
        }
    }
    Ok(check)
}

/// Replays certificates from all four constructive operations on random nonsplit patterns.
pub fn certificate_check(seed: u64, instances: usize) -> Result<LemmaCheck> {
    let mut check = LemmaCheck::new("certificates");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let n = rng.gen_range(2..=16);
        let pseed: u64 = rng.gen();
        let p = CommunicationPattern::random_nonsplit(n, pseed, rng.gen_range(0.0..0.1))?;
        let w = random_subset(&mut rng, n, 0.5);
        let t1 = rng.gen_range(1..=3);
        let t2 = t1 + ceil_log2(w.len() as u64) as usize + rng.gen_range(0..=2);
        let (u, cert) = find_single_cover(&p, &w, t1, t2)?;
        let ok = cert.verify(&p).is_ok() && covers(&NodeSet::singleton(n, u)?, &w, &product_range(&p, t1, t2)?);
        check.record(ok, || format!("single cover n={n} seed={pseed}"));

        let m = rng.gen_range(1..=w.len());
        let t2m = t1 + ceil_log2_ratio(w.len() as u64, m as u64) as usize;
        let (us, cert) = find_cover_m(&p, &w, t1, t2m, m)?;
        let ok = us.len() <= m && cert.verify(&p).is_ok() && covers(&us, &w, &product_range(&p, t1, t2m)?);
        check.record(ok, || format!("cover m={m} n={n} seed={pseed}"));

        if i % 10 == 0 {
            let big = rng.gen_range(8..=16);
            let q = CommunicationPattern::random_nonsplit(big, pseed, 0.0)?;
            let (a, cert) = small_cover_loglog(&q, t1)?;
            let ok = a.len() <= LoglogParams::for_n(big).size_bound && cert.verify(&q).is_ok();
            check.record(ok, || format!("small cover n={big} seed={pseed}"));
            let (u, time, cert) = loglog_center(&q)?;
            let ok = cert.verify(&q).is_ok() && broadcast_time(&q, u, time)?.resolved().is_some_and(|bt| bt <= time);
            check.record(ok, || format!("loglog center n={big} seed={pseed}"));
        }
    }
    Ok(check)
}

/// In-degree `>= n - f` for every generated async round, and nonsplitness when `n > 2f`.
pub fn async_in_degree_check(seed: u64, instances: usize) -> Result<LemmaCheck> {
    let mut check = LemmaCheck::new("async-in-degree");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.gen_range(1..=20);
        let f = rng.gen_range(0..n);
        let policy = AsyncPolicy::ALL[rng.gen_range(0..3)];
        let cfg = AsyncAdversaryConfig::new(n, f, rng.gen(), policy)?;
        let p = CommunicationPattern::asynchronous(cfg)?;
        let t = rng.gen_range(1..=10);
        let g = p.graph_at(t)?;
        let degrees_ok = (1..=n).all(|i| g.in_degree(i) >= n - f && g.has_edge(i, i));
        let nonsplit_ok = n <= 2 * f || g.is_nonsplit();
        check.record(degrees_ok && nonsplit_ok, || format!("{cfg:?} round {t}"));
    }
    Ok(check)
}

/// The full randomized lemma suite.
pub fn verify_lemmas(c: &LemmaCampaign) -> Result<Vec<LemmaCheck>> {
    let s = c.seed;
    Ok(vec![
        transitivity_check(s, c.transitivity)?,
        reflexivity_check(s.wrapping_add(1), c.transitivity / 10)?,
        ceil_log2_of_ceiling_check(s.wrapping_add(2), c.arithmetic),
        two_sets_check(s.wrapping_add(3), c.arithmetic),
        heavy_preimage_check(s.wrapping_add(4), c.heavy_preimage)?,
        certificate_check(s.wrapping_add(5), c.certificates)?,
        async_in_degree_check(s.wrapping_add(6), c.async_rounds)?,
    ])
}
