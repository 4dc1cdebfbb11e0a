//! Communication patterns and deterministic generators.
//!
//! A pattern is either a stored finite list of rounds or a generator that
//! synthesizes any requested round on demand. Randomized generators draw every
//! round (and, for the asynchronous adversary, every node of a round) from its
//! own ChaCha8 stream seeded with [`substream_seed`]`(seed, round, node)`, so
//! `graph_at(t)` is a pure function of the generator parameters and `t`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::graph::{next_content, CommunicationGraph};
use crate::nodeset::NodeSet;
use crate::{NodeId, Round};

/// The 6-node nonsplit digraph of radius 3 (self-loops implied).
pub const FIGURE1_EDGES: [(NodeId, NodeId); 12] = [
    (1, 2),
    (2, 3),
    (4, 5),
    (5, 6),
    (6, 1),
    (3, 4),
    (1, 4),
    (4, 1),
    (2, 5),
    (5, 2),
    (3, 6),
    (6, 3),
];

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the ChaCha8 substream for `(seed, round, node)`; `node = 0` is the per-round stream.
pub fn substream_seed(seed: u64, round: u64, node: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ round) ^ node)
}

fn substream(seed: u64, round: Round, node: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, round as u64, node as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Finite(Round),
    Unbounded,
}

impl Horizon {
    pub fn covers(self, t: Round) -> bool {
        match self {
            Horizon::Finite(h) => t <= h,
            Horizon::Unbounded => true,
        }
    }
}

/// Which node is the star center in round `t`.
#[derive(Clone)]
pub enum CenterSchedule {
    Fixed(NodeId),
    /// `c_t = ((t - 1) mod n) + 1`.
    Rotating,
    /// Cycles through the listed centers.
    Cycle(Vec<NodeId>),
    Custom(Arc<dyn Fn(Round) -> NodeId + Send + Sync>),
}

impl CenterSchedule {
    fn center(&self, n: usize, t: Round) -> NodeId {
        match self {
            CenterSchedule::Fixed(c) => *c,
            CenterSchedule::Rotating => (t - 1) % n + 1,
            CenterSchedule::Cycle(cs) => cs[(t - 1) % cs.len()],
            CenterSchedule::Custom(f) => f(t),
        }
    }
}

impl fmt::Debug for CenterSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CenterSchedule::Fixed(c) => write!(f, "Fixed({c})"),
            CenterSchedule::Rotating => f.write_str("Rotating"),
            CenterSchedule::Cycle(cs) => write!(f, "Cycle({cs:?})"),
            CenterSchedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// How the asynchronous-round adversary picks each node's quorum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsyncPolicy {
    /// Uniform `(n - f)`-subset containing the node itself, drawn per node and round.
    UniformRandomQuorums,
    /// A seed-chosen set of `f` crashed senders is missing from every other in-neighborhood.
    CrashFixedSet,
    /// Round-robin excluded `f`-set.
    RotatingExclusion,
}

impl AsyncPolicy {
    pub const ALL: [AsyncPolicy; 3] = [
        AsyncPolicy::UniformRandomQuorums,
        AsyncPolicy::CrashFixedSet,
        AsyncPolicy::RotatingExclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AsyncPolicy::UniformRandomQuorums => "uniform-random-quorums",
            AsyncPolicy::CrashFixedSet => "crash-fixed-set",
            AsyncPolicy::RotatingExclusion => "rotating-exclusion",
        }
    }
}

impl fmt::Display for AsyncPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AsyncPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random-quorums" | "uniform" => Ok(AsyncPolicy::UniformRandomQuorums),
            "crash-fixed-set" | "crash" => Ok(AsyncPolicy::CrashFixedSet),
            "rotating-exclusion" | "rotating" => Ok(AsyncPolicy::RotatingExclusion),
            other => Err(Error::InvalidConfig(format!("unknown async policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AsyncAdversaryConfig {
    pub n: usize,
    pub f: usize,
    pub seed: u64,
    pub policy: AsyncPolicy,
}

impl AsyncAdversaryConfig {
    pub fn new(n: usize, f: usize, seed: u64, policy: AsyncPolicy) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if f >= n {
            return Err(Error::InvalidConfig(format!(
                "crash budget f = {f} must be below n = {n}"
            )));
        }
        Ok(AsyncAdversaryConfig { n, f, seed, policy })
    }

    fn crashed_set(&self) -> Vec<NodeId> {
        let mut rng = substream(self.seed, 0, 0);
        let mut ids: Vec<NodeId> = (1..=self.n).collect();
        ids.shuffle(&mut rng);
        ids.truncate(self.f);
        ids.sort_unstable();
        ids
    }

    fn round_graph(&self, t: Round) -> CommunicationGraph {
        let n = self.n;
        let mut in_sets = Vec::with_capacity(n);
        match self.policy {
            AsyncPolicy::UniformRandomQuorums => {
                for i in 1..=n {
                    let mut rng = substream(self.seed, t, i);
                    let others: Vec<NodeId> = (1..=n).filter(|&j| j != i).collect();
                    let mut set = NodeSet::singleton(n, i).expect("in range");
                    for &j in others.choose_multiple(&mut rng, n - self.f - 1) {
                        set.insert(j).expect("in range");
                    }
                    in_sets.push(set);
                }
            }
            AsyncPolicy::CrashFixedSet | AsyncPolicy::RotatingExclusion => {
                let excluded = if self.policy == AsyncPolicy::CrashFixedSet {
                    self.crashed_set()
                } else {
                    let offset = (self.seed % n as u64) as usize;
                    (0..self.f).map(|k| (offset + (t - 1) * self.f + k) % n + 1).collect()
                };
                let mut base = NodeSet::full(n);
                for &e in &excluded {
                    base.remove(e);
                }
                for i in 1..=n {
                    let mut set = base.clone();
                    set.insert(i).expect("in range");
                    in_sets.push(set);
                }
            }
        }
        CommunicationGraph::from_in_neighborhoods(&in_sets).expect("well-formed quorums")
    }
}

/// Every graph on `[n]` whose in-neighborhoods contain the node itself and have size at least `n - f`.
pub fn all_async_graphs(n: usize, f: usize) -> Result<Vec<CommunicationGraph>> {
    AsyncAdversaryConfig::new(n, f, 0, AsyncPolicy::UniformRandomQuorums)?;
    let per_node: Vec<Vec<NodeSet>> = (1..=n)
        .map(|i| {
            let others: Vec<NodeId> = (1..=n).filter(|&j| j != i).collect();
            (n - f - 1..=n - 1)
                .flat_map(|k| others.iter().copied().combinations(k))
                .map(|extra| NodeSet::from_ids(n, extra.into_iter().chain([i])).expect("in range"))
                .collect()
        })
        .collect();
    Ok(per_node
        .into_iter()
        .multi_cartesian_product()
        .map(|sets| CommunicationGraph::from_in_neighborhoods(&sets).expect("well-formed"))
        .collect())
}

#[derive(Debug, Clone)]
pub enum Generator {
    /// The same graph every round.
    Constant(Arc<CommunicationGraph>),
    Star(CenterSchedule),
    RandomNonsplit {
        seed: u64,
        extra_edge_prob: f64,
    },
    RandomRooted {
        seed: u64,
        extra_edge_prob: f64,
    },
    Async(AsyncAdversaryConfig),
}

#[derive(Debug, Clone)]
enum Source {
    Stored(Vec<CommunicationGraph>),
    Generated(Generator),
}

/// A sequence `G_1, G_2, ...` of communication graphs on a fixed node count.
#[derive(Debug, Clone)]
pub struct CommunicationPattern {
    n: usize,
    source: Source,
}

impl CommunicationPattern {
    /// Finite pattern with horizon `graphs.len()`.
    pub fn stored(graphs: Vec<CommunicationGraph>) -> Result<Self> {
        let n = graphs.first().ok_or(Error::EmptyGraph)?.n();
        for g in &graphs {
            if g.n() != n {
                return Err(Error::SizeMismatch { left: n, right: g.n() });
            }
        }
        Ok(CommunicationPattern {
            n,
            source: Source::Stored(graphs),
        })
    }

    pub fn constant(graph: CommunicationGraph) -> Self {
        CommunicationPattern {
            n: graph.n(),
            source: Source::Generated(Generator::Constant(Arc::new(graph))),
        }
    }

    pub fn figure1() -> Self {
        Self::constant(CommunicationGraph::new(6, &FIGURE1_EDGES).expect("valid edges"))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Ok(Self::constant(CommunicationGraph::complete(n)?))
    }

    pub fn star(n: usize, schedule: CenterSchedule) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let check = |c: NodeId| {
            if c == 0 || c > n {
                Err(Error::InvalidNode(c))
            } else {
                Ok(())
            }
        };
        match &schedule {
            CenterSchedule::Fixed(c) => check(*c)?,
            CenterSchedule::Cycle(cs) => {
                if cs.is_empty() {
                    return Err(Error::InvalidConfig("empty center cycle".into()));
                }
                cs.iter().try_for_each(|&c| check(c))?;
            }
            _ => {}
        }
        Ok(CommunicationPattern {
            n,
            source: Source::Generated(Generator::Star(schedule)),
        })
    }

    /// The line `1 -> 2 -> ... -> n` every round.
    pub fn line(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Ok(Self::constant(CommunicationGraph::new(n, &edges)?))
    }

    pub fn random_nonsplit(n: usize, seed: u64, extra_edge_prob: f64) -> Result<Self> {
        check_prob(extra_edge_prob)?;
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(CommunicationPattern {
            n,
            source: Source::Generated(Generator::RandomNonsplit { seed, extra_edge_prob }),
        })
    }

    pub fn random_rooted(n: usize, seed: u64) -> Result<Self> {
        Self::random_rooted_with_extra(n, seed, 0.0)
    }

    pub fn random_rooted_with_extra(n: usize, seed: u64, extra_edge_prob: f64) -> Result<Self> {
        check_prob(extra_edge_prob)?;
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(CommunicationPattern {
            n,
            source: Source::Generated(Generator::RandomRooted { seed, extra_edge_prob }),
        })
    }

    pub fn asynchronous(cfg: AsyncAdversaryConfig) -> Result<Self> {
        let cfg = AsyncAdversaryConfig::new(cfg.n, cfg.f, cfg.seed, cfg.policy)?;
        Ok(CommunicationPattern {
            n: cfg.n,
            source: Source::Generated(Generator::Async(cfg)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> Horizon {
        match &self.source {
            Source::Stored(gs) => Horizon::Finite(gs.len()),
            Source::Generated(_) => Horizon::Unbounded,
        }
    }

    pub fn generator(&self) -> Option<&Generator> {
        match &self.source {
            Source::Generated(g) => Some(g),
            Source::Stored(_) => None,
        }
    }

    /// The round-`t` graph, `t >= 1`.
    pub fn graph_at(&self, t: Round) -> Result<CommunicationGraph> {
        if t == 0 {
            return Err(Error::InvalidInterval { t1: 0, t2: 0 });
        }
        if !self.horizon().covers(t) {
            return Err(Error::HorizonExceeded(t));
        }
        let n = self.n;
        match &self.source {
            Source::Stored(gs) => Ok(gs[t - 1].clone()),
            Source::Generated(Generator::Constant(g)) => Ok(g.as_ref().clone()),
            Source::Generated(Generator::Star(schedule)) => {
                let c = schedule.center(n, t);
                if c == 0 || c > n {
                    return Err(Error::InvalidNode(c));
                }
                let edges: Vec<_> = (1..=n).map(|j| (c, j)).collect();
                CommunicationGraph::new(n, &edges)
            }
            Source::Generated(Generator::RandomNonsplit { seed, extra_edge_prob }) => {
                Ok(random_nonsplit_round(n, *seed, t, *extra_edge_prob))
            }
            Source::Generated(Generator::RandomRooted { seed, extra_edge_prob }) => {
                Ok(random_rooted_round(n, *seed, t, *extra_edge_prob))
            }
            Source::Generated(Generator::Async(cfg)) => Ok(cfg.round_graph(t)),
        }
    }

    /// Graphs `G_{t1}, ..., G_{t2-1}`.
    pub fn window(&self, t1: Round, t2: Round) -> Result<Vec<CommunicationGraph>> {
        if t1 == 0 || t2 < t1 {
            return Err(Error::InvalidInterval { t1, t2 });
        }
        (t1..t2).map(|t| self.graph_at(t)).collect()
    }

    /// Text form of rounds `1..=rounds`: one `round <t>` block per graph.
    pub fn to_text(&self, rounds: Round) -> Result<String> {
        let mut out = String::new();
        for t in 1..=rounds {
            out.push_str(&format!("round {t}\n"));
            out.push_str(&self.graph_at(t)?.to_text());
        }
        Ok(out)
    }

    /// Stored text form of the whole pattern; generated patterns need [`Self::to_text`].
    pub fn stored_text(&self) -> Option<String> {
        match self.horizon() {
            Horizon::Finite(h) => self.to_text(h).ok(),
            Horizon::Unbounded => None,
        }
    }

    /// Parses `round <t>` blocks; rounds must be `1..=H` in order.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        let mut graphs = Vec::new();
        while let Some((lineno, line)) = next_content(&mut lines) {
            let mut parts = line.split_whitespace();
            let t: Round = match (parts.next(), parts.next(), parts.next()) {
                (Some("round"), Some(t), None) => t
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad round index `{t}`")))?,
                _ => return Err(parse_err(lineno, format!("expected `round <t>`, got `{line}`"))),
            };
            if t != graphs.len() + 1 {
                return Err(parse_err(
                    lineno,
                    format!("expected round {}, found round {t}", graphs.len() + 1),
                ));
            }
            graphs.push(CommunicationGraph::parse_lines(&mut lines)?);
        }
        if graphs.is_empty() {
            return Err(parse_err(0, "pattern has no rounds"));
        }
        Self::stored(graphs)
    }
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn sprinkle(rows: &mut [FixedBitSet], rng: &mut ChaCha8Rng, p: f64) {
    if p <= 0.0 {
        return;
    }
    let n = rows.len();
    for row in rows.iter_mut() {
        for v in 0..n {
            if !row.contains(v) && rng.gen_bool(p) {
                row.insert(v);
            }
        }
    }
}

fn loop_rows(n: usize) -> Vec<FixedBitSet> {
    (0..n)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert(i);
            row
        })
        .collect()
}

/// Every unordered pair gets a uniformly drawn common parent, then extra edges with probability `p`.
fn random_nonsplit_round(n: usize, seed: u64, t: Round, p: f64) -> CommunicationGraph {
    let mut rng = substream(seed, t, 0);
    let mut rows = loop_rows(n);
    for i in 0..n {
        for j in i + 1..n {
            let k = rng.gen_range(0..n);
            rows[k].insert(i);
            rows[k].insert(j);
        }
    }
    sprinkle(&mut rows, &mut rng, p);
    CommunicationGraph::from_out_rows(rows)
}

/// Uniform root, then each node in a shuffled order attaches to an already attached node.
fn random_rooted_round(n: usize, seed: u64, t: Round, p: f64) -> CommunicationGraph {
    let mut rng = substream(seed, t, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut rows = loop_rows(n);
    for pos in 1..n {
        let parent = order[rng.gen_range(0..pos)];
        rows[parent].insert(order[pos]);
    }
    sprinkle(&mut rows, &mut rng, p);
    CommunicationGraph::from_out_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_pattern_indexing() {
        let g = CommunicationGraph::identity(3).unwrap();
        let h = CommunicationGraph::complete(3).unwrap();
        let p = CommunicationPattern::stored(vec![g.clone(), h.clone()]).unwrap();
        assert_eq!(p.graph_at(2).unwrap(), h);
        assert_eq!(p.graph_at(1).unwrap(), g);
        assert!(matches!(p.graph_at(3), Err(Error::HorizonExceeded(3))));
        assert!(p.graph_at(0).is_err());
    }

    #[test]
    fn stored_rejects_mixed_sizes() {
        let r = CommunicationPattern::stored(vec![
            CommunicationGraph::identity(3).unwrap(),
            CommunicationGraph::identity(4).unwrap(),
        ]);
        assert!(matches!(r, Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn figure1_every_round() {
        let p = CommunicationPattern::figure1();
        for t in [1, 2, 17] {
            let g = p.graph_at(t).unwrap();
            assert!(g.is_nonsplit());
            assert_eq!(g.static_radius().value(), Some(3));
            assert_eq!(g.in_neighbors(1).to_vec(), vec![1, 4, 6]);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let patterns = [
            CommunicationPattern::random_nonsplit(12, 7, 0.1).unwrap(),
            CommunicationPattern::random_rooted(12, 7).unwrap(),
            CommunicationPattern::asynchronous(
                AsyncAdversaryConfig::new(9, 4, 7, AsyncPolicy::UniformRandomQuorums).unwrap(),
            )
            .unwrap(),
        ];
        for p in &patterns {
            for t in 1..5 {
                assert_eq!(p.graph_at(t).unwrap(), p.clone().graph_at(t).unwrap());
            }
            assert_ne!(p.graph_at(1).unwrap(), p.graph_at(2).unwrap());
        }
    }

    #[test]
    fn star_schedules() {
        let p = CommunicationPattern::star(4, CenterSchedule::Rotating).unwrap();
        for t in 1..=8 {
            assert_eq!(p.graph_at(t).unwrap().broadcasters().to_vec(), vec![(t - 1) % 4 + 1]);
            assert!(p.graph_at(t).unwrap().is_nonsplit());
        }
        assert!(matches!(
            CommunicationPattern::star(4, CenterSchedule::Fixed(5)),
            Err(Error::InvalidNode(5))
        ));
        let bad = CommunicationPattern::star(4, CenterSchedule::Custom(Arc::new(|_| 9))).unwrap();
        assert!(matches!(bad.graph_at(1), Err(Error::InvalidNode(9))));
    }

    #[test]
    fn line_pattern() {
        let g = CommunicationPattern::line(3).unwrap().graph_at(1).unwrap();
        assert_eq!(g.root(), Some(1));
        assert_eq!(g.split_witness(), Some((1, 3)));
    }

    #[test]
    fn random_nonsplit_properties() {
        for seed in 0..20 {
            let p = CommunicationPattern::random_nonsplit(10, seed, 0.0).unwrap();
            for t in 1..4 {
                assert!(p.graph_at(t).unwrap().is_nonsplit());
            }
        }
        let full = CommunicationPattern::random_nonsplit(6, 3, 1.0).unwrap();
        assert_eq!(full.graph_at(1).unwrap(), CommunicationGraph::complete(6).unwrap());
        assert!(CommunicationPattern::random_nonsplit(6, 3, 1.5).is_err());
    }

    #[test]
    fn random_rooted_properties() {
        for seed in 0..20 {
            let p = CommunicationPattern::random_rooted(9, seed).unwrap();
            for t in 1..4 {
                let g = p.graph_at(t).unwrap();
                assert!(g.is_rooted());
                assert_eq!(g.edge_count(), 9 + 8);
            }
            let two = CommunicationPattern::random_rooted(2, seed).unwrap();
            assert!(two.graph_at(1).unwrap().is_nonsplit());
        }
    }

    #[test]
    fn async_in_degree_and_nonsplit() {
        for policy in AsyncPolicy::ALL {
            for (n, f) in [(5, 2), (7, 3), (6, 2), (4, 0)] {
                let cfg = AsyncAdversaryConfig::new(n, f, 11, policy).unwrap();
                let p = CommunicationPattern::asynchronous(cfg).unwrap();
                for t in 1..6 {
                    let g = p.graph_at(t).unwrap();
                    for i in 1..=n {
                        assert!(g.in_degree(i) >= n - f);
                        assert!(g.has_edge(i, i));
                    }
                    assert!(g.is_nonsplit());
                }
            }
        }
        let f0 = CommunicationPattern::asynchronous(
            AsyncAdversaryConfig::new(5, 0, 1, AsyncPolicy::UniformRandomQuorums).unwrap(),
        )
        .unwrap();
        assert_eq!(f0.graph_at(3).unwrap(), CommunicationGraph::complete(5).unwrap());
        assert!(matches!(
            AsyncAdversaryConfig::new(3, 3, 0, AsyncPolicy::CrashFixedSet),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn async_enumeration_n3_f1() {
        let all = all_async_graphs(3, 1).unwrap();
        assert_eq!(all.len(), 27);
        assert!(all.iter().all(|g| g.is_nonsplit()));
        assert_eq!(all_async_graphs(3, 0).unwrap().len(), 1);
    }

    #[test]
    fn policy_names_parse() {
        for p in AsyncPolicy::ALL {
            assert_eq!(p.name().parse::<AsyncPolicy>().unwrap(), p);
        }
        assert!("bogus".parse::<AsyncPolicy>().is_err());
    }

    #[test]
    fn pattern_text_round_trip() {
        let p = CommunicationPattern::random_nonsplit(5, 2, 0.2).unwrap();
        let text = p.to_text(3).unwrap();
        let back = CommunicationPattern::from_text(&text).unwrap();
        assert_eq!(back.horizon(), Horizon::Finite(3));
        assert_eq!(back.stored_text().unwrap(), text);
        for t in 1..=3 {
            assert_eq!(back.graph_at(t).unwrap(), p.graph_at(t).unwrap());
        }
    }

    #[test]
    fn pattern_text_requires_contiguous_rounds() {
        let text = "round 1\nn 2\nround 3\nn 2\n";
        assert!(matches!(
            CommunicationPattern::from_text(text),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
