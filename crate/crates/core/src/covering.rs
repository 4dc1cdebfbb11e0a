//! The covering relation over time intervals and constructive covers.
//!
//! `U` at time `t1` covers `W` at time `t2` when every node of `W` has an
//! in-neighbor from `U` in `G_{t1} ∘ ... ∘ G_{t2-1}`. Every constructive
//! operation here returns a [`CoverCertificate`]: one explicit path per target
//! node, replayable hop by hop against the pattern.
//!
//! The pipeline for nonsplit patterns has two phases. [`small_cover_loglog`]
//! finds a set of `O(log n)` nodes covering `[n]` within `⌈log₂ ln n⌉` rounds by
//! repeatedly picking the node whose preimage under a subset-to-cover map is
//! heaviest. [`find_single_cover`] then funnels that set into one node with the
//! halving recursion, and [`loglog_center`] chains both certificates.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{parse_err, Error, Result};
use crate::graph::CommunicationGraph;
use crate::nodeset::NodeSet;
use crate::pattern::CommunicationPattern;
use crate::{NodeId, Round};

/// Enumeration cap for `C(n, ⌊ln n⌋)` in [`small_cover_loglog`].
pub const DEFAULT_SUBSET_BUDGET: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_SUBSET_BUDGET`].
pub const SUBSET_BUDGET_ENV: &str = "NONSPLIT_SUBSET_BUDGET";

pub fn subset_budget() -> u128 {
    std::env::var(SUBSET_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SUBSET_BUDGET)
}

/// `⌈log₂ x⌉` for an integer `x >= 1`, i.e. the least `k` with `x <= 2^k`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1, "ceil_log2 of zero");
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `max(0, ⌈log₂(num / den)⌉)`: the least `k >= 0` with `num <= den · 2^k`.
pub fn ceil_log2_ratio(num: u64, den: u64) -> u32 {
    assert!(den >= 1, "zero denominator");
    let mut k = 0;
    let mut cap = den as u128;
    while (num as u128) > cap {
        cap <<= 1;
        k += 1;
    }
    k
}

/// Exact `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Whether every node of `w` has an in-neighbor in `u` within `g`.
pub fn covers(u: &NodeSet, w: &NodeSet, g: &CommunicationGraph) -> bool {
    w.iter().all(|j| g.in_neighbors(j).intersects(u))
}

/// `G_{t1} ∘ ... ∘ G_{t2-1}`; the identity when `t1 == t2`.
pub fn product_range(p: &CommunicationPattern, t1: Round, t2: Round) -> Result<CommunicationGraph> {
    check_interval(t1, t2)?;
    let mut acc = CommunicationGraph::identity(p.n())?;
    for t in t1..t2 {
        acc = acc.product(&p.graph_at(t)?)?;
    }
    Ok(acc)
}

pub fn covers_over(u: &NodeSet, t1: Round, w: &NodeSet, t2: Round, p: &CommunicationPattern) -> Result<bool> {
    u.check_universe(p.n())?;
    w.check_universe(p.n())?;
    Ok(covers(u, w, &product_range(p, t1, t2)?))
}

/// Splits `n` into `m` near-equal positive parts, larger parts first.
pub fn partition_sizes(n: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || n < m {
        return Err(Error::InvalidPartition { n, m });
    }
    let (k, r) = (n / m, n % m);
    Ok((0..m).map(|i| if i < r { k + 1 } else { k }).collect())
}

fn check_interval(t1: Round, t2: Round) -> Result<()> {
    if t1 == 0 || t2 < t1 {
        return Err(Error::InvalidInterval { t1, t2 });
    }
    Ok(())
}

/// Witness that `source` at time `t1` covers `target` at time `t2`.
///
/// For each target `j`, `paths[j]` lists `t2 - t1 + 1` nodes starting in `source`
/// and ending at `j`; hop `s` must be an edge of `G_{t1 + s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverCertificate {
    source: NodeSet,
    t1: Round,
    target: NodeSet,
    t2: Round,
    paths: BTreeMap<NodeId, Vec<NodeId>>,
}

impl CoverCertificate {
    pub fn new(source: NodeSet, t1: Round, target: NodeSet, t2: Round, paths: BTreeMap<NodeId, Vec<NodeId>>) -> Self {
        CoverCertificate {
            source,
            t1,
            target,
            t2,
            paths,
        }
    }

    pub fn source(&self) -> &NodeSet {
        &self.source
    }

    pub fn target(&self) -> &NodeSet {
        &self.target
    }

    pub fn t1(&self) -> Round {
        self.t1
    }

    pub fn t2(&self) -> Round {
        self.t2
    }

    pub fn path(&self, j: NodeId) -> Option<&[NodeId]> {
        self.paths.get(&j).map(Vec::as_slice)
    }

    /// `(source node, path)` witnessing target `j`.
    pub fn witness(&self, j: NodeId) -> Option<(NodeId, &[NodeId])> {
        self.path(j).map(|p| (p[0], p))
    }

    pub fn paths(&self) -> impl Iterator<Item = (NodeId, &[NodeId])> {
        self.paths.iter().map(|(&j, p)| (j, p.as_slice()))
    }

    /// Replays every path against the pattern's graphs.
    pub fn verify(&self, p: &CommunicationPattern) -> Result<()> {
        let n = p.n();
        self.source.check_universe(n)?;
        self.target.check_universe(n)?;
        check_interval(self.t1, self.t2)?;
        let graphs = p.window(self.t1, self.t2)?;
        let bad = |msg: String| Err(Error::InvalidCertificate(msg));
        for j in self.target.iter() {
            let Some(path) = self.paths.get(&j) else {
                return bad(format!("no path for target {j}"));
            };
            if path.len() != self.t2 - self.t1 + 1 {
                return bad(format!(
                    "path for {j} has {} nodes, expected {}",
                    path.len(),
                    self.t2 - self.t1 + 1
                ));
            }
            if !self.source.contains(path[0]) {
                return bad(format!("path for {j} starts at {} outside the source set", path[0]));
            }
            if path[path.len() - 1] != j {
                return bad(format!("path for {j} ends at {}", path[path.len() - 1]));
            }
            for (s, hop) in path.windows(2).enumerate() {
                if !graphs[s].has_edge(hop[0], hop[1]) {
                    return bad(format!(
                        "path for {j}: ({}, {}) is not an edge of round {}",
                        hop[0],
                        hop[1],
                        self.t1 + s
                    ));
                }
            }
        }
        if let Some(extra) = self.paths.keys().find(|&&j| !self.target.contains(j)) {
            return bad(format!("path for {extra}, which is not a target"));
        }
        Ok(())
    }

    /// Chains `self` (U at t1 covers W at t2) with `next` (W at t2 covers X at t3).
    pub fn compose(&self, next: &CoverCertificate) -> Result<CoverCertificate> {
        if self.t2 != next.t1 {
            return Err(Error::InvalidCertificate(format!(
                "cannot chain a certificate ending at {} with one starting at {}",
                self.t2, next.t1
            )));
        }
        let mut paths = BTreeMap::new();
        for (&j, tail) in &next.paths {
            let head = self
                .paths
                .get(&tail[0])
                .ok_or_else(|| Error::InvalidCertificate(format!("intermediate node {} is not covered", tail[0])))?;
            let mut path = head.clone();
            path.extend_from_slice(&tail[1..]);
            paths.insert(j, path);
        }
        Ok(CoverCertificate {
            source: self.source.clone(),
            t1: self.t1,
            target: next.target.clone(),
            t2: next.t2,
            paths,
        })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the text form; `n` is the pattern's node count.
    pub fn from_text(text: &str, n: usize) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty certificate"))?;
        let (t1, t2) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["cover", a, b] => (parse_id(ln, a)?, parse_id(ln, b)?),
            _ => return Err(parse_err(ln, format!("expected `cover <t1> <t2>`, got `{header}`"))),
        };
        let mut set_line = |label: &str| -> Result<NodeSet> {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("missing `{label}` line")))?;
            let rest = line
                .strip_prefix(label)
                .ok_or_else(|| parse_err(ln, format!("expected `{label}`, got `{line}`")))?;
            NodeSet::from_ids(n, parse_ids(ln, rest)?)
        };
        let source = set_line("U:")?;
        let target = set_line("W:")?;
        let mut paths = BTreeMap::new();
        for (ln, line) in lines {
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| parse_err(ln, format!("expected `path <j>: ...`, got `{line}`")))?;
            let j = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["path", j] => parse_id(ln, j)?,
                _ => return Err(parse_err(ln, format!("expected `path <j>`, got `{head}`"))),
            };
            if paths.insert(j, parse_ids(ln, rest)?).is_some() {
                return Err(parse_err(ln, format!("duplicate path for {j}")));
            }
        }
        Ok(CoverCertificate {
            source,
            t1,
            target,
            t2,
            paths,
        })
    }
}

fn parse_id(ln: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| parse_err(ln, format!("bad integer `{s}`")))
}

fn parse_ids(ln: usize, s: &str) -> Result<Vec<NodeId>> {
    s.split_whitespace().map(|x| parse_id(ln, x)).collect()
}

fn join_ids<'a>(ids: impl IntoIterator<Item = &'a NodeId>) -> String {
    ids.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for CoverCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cover {} {}", self.t1, self.t2)?;
        writeln!(f, "U: {}", self.source)?;
        writeln!(f, "W: {}", self.target)?;
        for (j, path) in &self.paths {
            writeln!(f, "path {j}: {}", join_ids(path))?;
        }
        Ok(())
    }
}

/// Materialized graphs `G_{t1}, ..., G_{t1 + len - 1}`.
struct Window<'a> {
    t1: Round,
    graphs: &'a [CommunicationGraph],
}

impl Window<'_> {
    fn graph(&self, t: Round) -> &CommunicationGraph {
        &self.graphs[t - self.t1]
    }
}

/// Paths are built back to front: `rev_path[0]` is the target.
type RevPaths = Vec<(NodeId, Vec<NodeId>)>;

/// Halving recursion over sorted `w`. Slack is spent first via the winner's self-loop.
fn single_cover_rec(win: &Window<'_>, w: &[NodeId], t1: Round, t2: Round) -> Result<(NodeId, RevPaths)> {
    let required = ceil_log2(w.len() as u64) as usize;
    let available = t2 - t1;
    if available < required {
        return Err(Error::InsufficientDepth { required, available });
    }
    if available == 0 {
        return Ok((w[0], vec![(w[0], vec![w[0]])]));
    }
    if available > required {
        let (u, mut paths) = single_cover_rec(win, w, t1 + 1, t2)?;
        for (_, p) in &mut paths {
            p.push(u);
        }
        return Ok((u, paths));
    }
    let half = w.len().div_ceil(2);
    let (j1, mut paths) = single_cover_rec(win, &w[..half], t1 + 1, t2)?;
    let (j2, paths2) = single_cover_rec(win, &w[half..], t1 + 1, t2)?;
    let g = win.graph(t1);
    let i = g
        .in_neighbors(j1)
        .first_common(&g.in_neighbors(j2))
        .ok_or(Error::NotNonsplit(t1))?;
    paths.extend(paths2);
    for (_, p) in &mut paths {
        p.push(i);
    }
    Ok((i, paths))
}

fn finish_paths(rev: RevPaths) -> BTreeMap<NodeId, Vec<NodeId>> {
    rev.into_iter()
        .map(|(j, mut p)| {
            p.reverse();
            (j, p)
        })
        .collect()
}

fn check_target(p: &CommunicationPattern, w: &NodeSet, t1: Round, t2: Round) -> Result<()> {
    w.check_universe(p.n())?;
    check_interval(t1, t2)?;
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

/// A single node `u` such that `{u}` at time `t1` covers `w` at time `t2`.
///
/// Needs `t2 - t1 >= ⌈log₂ |w|⌉` and a common in-neighbor for every pair the
/// recursion merges; fails with [`Error::NotNonsplit`] naming the round otherwise.
pub fn find_single_cover(
    p: &CommunicationPattern,
    w: &NodeSet,
    t1: Round,
    t2: Round,
) -> Result<(NodeId, CoverCertificate)> {
    check_target(p, w, t1, t2)?;
    let required = ceil_log2(w.len() as u64) as usize;
    if t2 - t1 < required {
        return Err(Error::InsufficientDepth {
            required,
            available: t2 - t1,
        });
    }
    let graphs = p.window(t1, t2)?;
    let win = Window { t1, graphs: &graphs };
    let (u, rev) = single_cover_rec(&win, &w.to_vec(), t1, t2)?;
    let source = NodeSet::singleton(p.n(), u)?;
    Ok((u, CoverCertificate::new(source, t1, w.clone(), t2, finish_paths(rev))))
}

/// At most `m` nodes that at time `t1` cover `w` at time `t2`, given `t2 - t1 >= ⌈log₂(|w| / m)⌉`.
pub fn find_cover_m(
    p: &CommunicationPattern,
    w: &NodeSet,
    t1: Round,
    t2: Round,
    m: usize,
) -> Result<(NodeSet, CoverCertificate)> {
    check_target(p, w, t1, t2)?;
    if m == 0 {
        return Err(Error::InvalidPartition { n: w.len(), m });
    }
    let m = m.min(w.len());
    let required = ceil_log2_ratio(w.len() as u64, m as u64) as usize;
    if t2 - t1 < required {
        return Err(Error::InsufficientDepth {
            required,
            available: t2 - t1,
        });
    }
    let graphs = p.window(t1, t2)?;
    let win = Window { t1, graphs: &graphs };
    let members = w.to_vec();
    let mut source = NodeSet::empty(p.n());
    let mut rev = Vec::with_capacity(members.len());
    let mut offset = 0;
    for size in partition_sizes(members.len(), m)? {
        let (u, part) = single_cover_rec(&win, &members[offset..offset + size], t1, t2)?;
        source.insert(u)?;
        rev.extend(part);
        offset += size;
    }
    Ok((
        source.clone(),
        CoverCertificate::new(source, t1, w.clone(), t2, finish_paths(rev)),
    ))
}

/// A map `f` from every `subset_size`-subset of `[n]` to a node.
#[derive(Debug, Clone)]
pub struct SubsetAssignment {
    n: usize,
    subset_size: usize,
    entries: Vec<(NodeSet, NodeId)>,
}

impl SubsetAssignment {
    /// Evaluates `f` on every subset in lexicographic order, in parallel.
    pub fn from_fn<F>(n: usize, subset_size: usize, f: F) -> Result<Self>
    where
        F: Fn(&[NodeId]) -> Result<NodeId> + Sync,
    {
        if subset_size == 0 || subset_size > n {
            return Err(Error::TooSmall { size: n, subset_size });
        }
        let subsets: Vec<Vec<NodeId>> = (1..=n).combinations(subset_size).collect();
        let entries = subsets
            .par_iter()
            .map(|a| {
                let v = f(a)?;
                if v == 0 || v > n {
                    return Err(Error::InvalidNode(v));
                }
                Ok((NodeSet::from_ids(n, a.iter().copied())?, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetAssignment {
            n,
            subset_size,
            entries,
        })
    }

    /// Builds from explicit `(subset, value)` pairs; totality is checked where it is used.
    pub fn from_entries(n: usize, subset_size: usize, entries: Vec<(Vec<NodeId>, NodeId)>) -> Result<Self> {
        let entries = entries
            .into_iter()
            .map(|(a, v)| {
                if a.len() != subset_size || a.iter().collect::<std::collections::BTreeSet<_>>().len() != subset_size {
                    return Err(Error::InvalidConfig(format!("{a:?} is not a {subset_size}-subset")));
                }
                if v == 0 || v > n {
                    return Err(Error::InvalidNode(v));
                }
                Ok((NodeSet::from_ids(n, a)?, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetAssignment {
            n,
            subset_size,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subset_size(&self) -> usize {
        self.subset_size
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, subset: &[NodeId]) -> Option<NodeId> {
        let key = NodeSet::from_ids(self.n, subset.iter().copied()).ok()?;
        self.entries.iter().find(|(a, _)| *a == key).map(|&(_, v)| v)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&NodeSet, NodeId)> {
        self.entries.iter().map(|(a, v)| (a, *v))
    }
}

/// The node `w` maximizing `|⋃ {A ⊆ restricted_to : f(A) = w}|`, ties to the smallest id,
/// together with that union.
pub fn heavy_preimage_node(f: &SubsetAssignment, restricted_to: &NodeSet) -> Result<(NodeId, NodeSet)> {
    restricted_to.check_universe(f.n)?;
    let size = restricted_to.len();
    if size < f.subset_size {
        return Err(Error::TooSmall {
            size,
            subset_size: f.subset_size,
        });
    }
    let mut unions: Vec<NodeSet> = vec![NodeSet::empty(f.n); f.n];
    let mut seen = 0u128;
    for (a, v) in f.entries() {
        if a.is_subset(restricted_to) {
            unions[v - 1].union_with(a);
            seen += 1;
        }
    }
    if seen != binomial(size as u64, f.subset_size as u64) {
        let missing = restricted_to
            .iter()
            .combinations(f.subset_size)
            .find(|a| f.get(a).is_none())
            .unwrap_or_default();
        return Err(Error::MissingAssignment(missing));
    }
    let mut best = 0;
    for (i, u) in unions.iter().enumerate() {
        if u.len() > unions[best].len() {
            best = i;
        }
    }
    Ok((best + 1, unions.swap_remove(best)))
}

/// Subset size, depth and size bound of the late-phase cover for `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoglogParams {
    /// `⌊ln n⌋`
    pub subset_size: usize,
    /// `max(0, ⌈log₂ ln n⌉)`
    pub depth: usize,
    /// `⌈1 + ln n / ln(e⁴/(e⁴−1))⌉`: most heavy-preimage picks before the survivors run out.
    pub max_picks: usize,
    /// `max_picks + ⌊ln n⌋`, bounding the returned set including the leftover survivors.
    pub size_bound: usize,
}

impl LoglogParams {
    pub fn for_n(n: usize) -> Self {
        let ln_n = (n as f64).ln();
        let subset_size = ln_n.floor() as usize;
        let depth = if ln_n > 0.0 {
            ln_n.log2().ceil().max(0.0) as usize
        } else {
            0
        };
        let shrink = -(1.0 - (-4.0f64).exp()).ln();
        let max_picks = (1.0 + ln_n / shrink).ceil() as usize;
        LoglogParams {
            subset_size,
            depth,
            max_picks,
            size_bound: max_picks + subset_size,
        }
    }

    /// Start time of the late phase in [`loglog_center`]: `1 + ⌈log₂ size_bound⌉`.
    pub fn late_phase_start(&self) -> Round {
        1 + ceil_log2(self.size_bound as u64) as usize
    }

    /// Time by which [`loglog_center`] certifies a broadcaster.
    pub fn certified_time(&self) -> Round {
        self.late_phase_start() + self.depth
    }
}

/// A set of at most [`LoglogParams::size_bound`] nodes that at time `t` covers `[n]` at
/// time `t + ⌈log₂ ln n⌉`, using [`DEFAULT_SUBSET_BUDGET`] or the environment override.
pub fn small_cover_loglog(p: &CommunicationPattern, t: Round) -> Result<(NodeSet, CoverCertificate)> {
    small_cover_loglog_with_budget(p, t, subset_budget())
}

pub fn small_cover_loglog_with_budget(
    p: &CommunicationPattern,
    t: Round,
    budget: u128,
) -> Result<(NodeSet, CoverCertificate)> {
    let n = p.n();
    let params = LoglogParams::for_n(n);
    let t2 = t + params.depth;
    let all = NodeSet::full(n);
    if n < 8 {
        return find_cover_m(p, &all, t, t2, params.size_bound);
    }
    let s = params.subset_size;
    let subsets = binomial(n as u64, s as u64);
    if subsets > budget {
        return Err(Error::BudgetExceeded { subsets, budget });
    }
    check_interval(t, t2)?;
    let graphs = p.window(t, t2)?;
    let win = Window { t1: t, graphs: &graphs };
    let f = SubsetAssignment::from_fn(n, s, |a| single_cover_rec(&win, a, t, t2).map(|(u, _)| u))?;

    let mut survivors = all.clone();
    let mut picks: Vec<(NodeId, NodeSet, NodeSet)> = Vec::new();
    while survivors.len() >= s {
        let (v, union) = heavy_preimage_node(&f, &survivors)?;
        picks.push((v, union.clone(), survivors.clone()));
        survivors.difference_with(&union);
    }

    let mut result = survivors.clone();
    let mut rev: RevPaths = survivors.iter().map(|j| (j, vec![j; params.depth + 1])).collect();
    for (v, union, pool) in &picks {
        result.insert(*v)?;
        let mut pending = union.clone();
        for (a, fv) in f.entries() {
            if pending.is_empty() {
                break;
            }
            if fv != *v || !a.is_subset(pool) || !a.intersects(&pending) {
                continue;
            }
            let (u, paths) = single_cover_rec(&win, &a.to_vec(), t, t2)?;
            debug_assert_eq!(u, *v);
            for (j, path) in paths {
                if pending.contains(j) {
                    pending.remove(j);
                    rev.push((j, path));
                }
            }
        }
    }
    let cert = CoverCertificate::new(result.clone(), t, all, t2, finish_paths(rev));
    Ok((result, cert))
}

/// A node `u` and time `T` such that `u` at time 1 covers `[n]` at time `T`, so the
/// dynamic radius is at most `T`. Requires every graph in rounds `1..T` to be nonsplit.
pub fn loglog_center(p: &CommunicationPattern) -> Result<(NodeId, Round, CoverCertificate)> {
    loglog_center_with_budget(p, subset_budget())
}

pub fn loglog_center_with_budget(p: &CommunicationPattern, budget: u128) -> Result<(NodeId, Round, CoverCertificate)> {
    let params = LoglogParams::for_n(p.n());
    let t = params.late_phase_start();
    let (late_set, late) = small_cover_loglog_with_budget(p, t, budget)?;
    let (u, early) = find_single_cover(p, &late_set, 1, t)?;
    let cert = early.compose(&late)?;
    Ok((u, cert.t2(), cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{CenterSchedule, FIGURE1_EDGES};

    fn set(n: usize, ids: &[NodeId]) -> NodeSet {
        NodeSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    /// Nodes reached from `u` by walks of exactly `k` steps (self-loops allowed), brute force.
    fn k_step_reach(g: &CommunicationGraph, u: NodeId, k: usize) -> Vec<NodeId> {
        let mut reach = vec![u];
        for _ in 0..k {
            reach = (1..=g.n())
                .filter(|&v| reach.iter().any(|&x| g.has_edge(x, v)))
                .collect();
        }
        reach
    }

    #[test]
    fn log_helpers() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2_ratio(7, 2), 2);
        assert_eq!(ceil_log2_ratio(8, 2), 2);
        assert_eq!(ceil_log2_ratio(9, 2), 3);
        assert_eq!(ceil_log2_ratio(1, 4), 0);
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(32, 3), 4960);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn covers_examples() {
        let id = CommunicationGraph::identity(5).unwrap();
        let w = set(5, &[2, 4]);
        assert!(covers(&w, &w, &id));
        let star = CommunicationGraph::new(5, &[(3, 1), (3, 2), (3, 4), (3, 5)]).unwrap();
        assert!(covers(&set(5, &[3]), &NodeSet::full(5), &star));
        let fig = CommunicationGraph::new(6, &FIGURE1_EDGES).unwrap();
        assert!(!covers(&set(6, &[2]), &set(6, &[1]), &fig));
    }

    #[test]
    fn product_range_edges() {
        let p = CommunicationPattern::random_nonsplit(6, 4, 0.0).unwrap();
        assert_eq!(
            product_range(&p, 5, 5).unwrap(),
            CommunicationGraph::identity(6).unwrap()
        );
        assert_eq!(product_range(&p, 1, 2).unwrap(), p.graph_at(1).unwrap());
        let fig = CommunicationPattern::figure1();
        assert!(!product_range(&fig, 1, 4).unwrap().broadcasters().is_empty());
        assert!(product_range(&fig, 1, 3).unwrap().broadcasters().is_empty());
        let stored = CommunicationPattern::stored(vec![p.graph_at(1).unwrap()]).unwrap();
        assert!(matches!(product_range(&stored, 1, 3), Err(Error::HorizonExceeded(2))));
    }

    #[test]
    fn covers_over_reflexive_and_figure1_center() {
        let fig = CommunicationPattern::figure1();
        let g = fig.graph_at(1).unwrap();
        for u in 1..=6 {
            let expected = k_step_reach(&g, u, 3).len() == 6;
            assert_eq!(
                covers_over(&set(6, &[u]), 1, &NodeSet::full(6), 4, &fig).unwrap(),
                expected
            );
            assert!(covers_over(&set(6, &[u]), 3, &set(6, &[u]), 3, &fig).unwrap());
        }
        assert!(covers_over(&set(6, &[1]), 1, &NodeSet::full(6), 4, &fig).unwrap());
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_sizes(7, 3).unwrap(), vec![3, 2, 2]);
        assert_eq!(partition_sizes(9, 1).unwrap(), vec![9]);
        assert_eq!(partition_sizes(6, 6).unwrap(), vec![1; 6]);
        assert!(matches!(
            partition_sizes(2, 3),
            Err(Error::InvalidPartition { n: 2, m: 3 })
        ));
        for n in 1..60u64 {
            for m in 1..=n {
                let parts = partition_sizes(n as usize, m as usize).unwrap();
                assert_eq!(parts.iter().sum::<usize>(), n as usize);
                for &x in &parts {
                    assert!(ceil_log2(x as u64) <= ceil_log2_ratio(n, m));
                }
            }
        }
    }

    #[test]
    fn single_cover_base_case() {
        let p = CommunicationPattern::figure1();
        let (u, cert) = find_single_cover(&p, &set(6, &[5]), 2, 2).unwrap();
        assert_eq!(u, 5);
        assert_eq!(cert.path(5).unwrap(), &[5]);
        cert.verify(&p).unwrap();
    }

    #[test]
    fn single_cover_figure1_pair() {
        let p = CommunicationPattern::figure1();
        let (u, cert) = find_single_cover(&p, &set(6, &[1, 5]), 1, 2).unwrap();
        assert_eq!(u, 4);
        cert.verify(&p).unwrap();
        assert_eq!(cert.to_text(), "cover 1 2\nU: 4\nW: 1 5\npath 1: 4 1\npath 5: 4 5\n");
    }

    #[test]
    fn single_cover_figure1_all() {
        let p = CommunicationPattern::figure1();
        let (u, cert) = find_single_cover(&p, &NodeSet::full(6), 1, 4).unwrap();
        cert.verify(&p).unwrap();
        assert_eq!(k_step_reach(&p.graph_at(1).unwrap(), u, 3).len(), 6);
    }

    #[test]
    fn single_cover_slack_uses_self_loops_first() {
        let p = CommunicationPattern::figure1();
        let (u, cert) = find_single_cover(&p, &set(6, &[1, 5]), 1, 4).unwrap();
        assert_eq!(u, 4);
        assert_eq!(cert.path(1).unwrap(), &[4, 4, 4, 1]);
        cert.verify(&p).unwrap();
    }

    #[test]
    fn single_cover_errors() {
        let p = CommunicationPattern::figure1();
        assert!(matches!(
            find_single_cover(&p, &NodeSet::full(6), 1, 3),
            Err(Error::InsufficientDepth {
                required: 3,
                available: 2
            })
        ));
        assert!(matches!(
            find_single_cover(&p, &NodeSet::empty(6), 1, 3),
            Err(Error::EmptySet)
        ));
        let split = CommunicationPattern::constant(CommunicationGraph::identity(4).unwrap());
        assert!(matches!(
            find_single_cover(&split, &set(4, &[1, 2]), 2, 3),
            Err(Error::NotNonsplit(2))
        ));
    }

    #[test]
    fn cover_m_examples() {
        let p = CommunicationPattern::random_nonsplit(16, 9, 0.0).unwrap();
        let w = NodeSet::full(16);
        let (u, cert) = find_cover_m(&p, &w, 3, 3, 16).unwrap();
        assert_eq!(u, w);
        cert.verify(&p).unwrap();
        let (single, c1) = find_single_cover(&p, &w, 1, 5).unwrap();
        let (m1, cm) = find_cover_m(&p, &w, 1, 5, 1).unwrap();
        assert_eq!(m1.to_vec(), vec![single]);
        assert_eq!(c1, cm);
        let (four, c4) = find_cover_m(&p, &w, 1, 3, 4).unwrap();
        assert!(four.len() <= 4);
        c4.verify(&p).unwrap();
        let g = product_range(&p, 1, 3).unwrap();
        assert!(covers(&four, &w, &g));
        assert!(matches!(
            find_cover_m(&p, &w, 1, 2, 4),
            Err(Error::InsufficientDepth {
                required: 2,
                available: 1
            })
        ));
        // m above |W| is clamped
        let (all, _) = find_cover_m(&p, &set(16, &[2, 7]), 1, 1, 10).unwrap();
        assert_eq!(all.to_vec(), vec![2, 7]);
    }

    #[test]
    fn certificate_rejects_tampering() {
        let p = CommunicationPattern::figure1();
        let (_, cert) = find_single_cover(&p, &NodeSet::full(6), 1, 4).unwrap();
        let mut text = cert.to_text();
        let back = CoverCertificate::from_text(&text, 6).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_text(), text);
        // Redirect one path through a non-edge: 2 -> 6 is not in the graph.
        text = text.replace("W: 1 2 3 4 5 6", "W: 1 2 3 4 5 6\n# tampered");
        let mut paths: Vec<_> = cert.paths().map(|(j, p)| (j, p.to_vec())).collect();
        paths[5].1 = vec![paths[5].1[0], 2, 2, 6];
        let bad = CoverCertificate::new(
            cert.source().clone(),
            1,
            cert.target().clone(),
            4,
            paths.into_iter().collect(),
        );
        assert!(matches!(bad.verify(&p), Err(Error::InvalidCertificate(_))));
        assert_eq!(CoverCertificate::from_text(&text, 6).unwrap(), cert);
    }

    #[test]
    fn certificate_parse_errors() {
        assert!(CoverCertificate::from_text("", 3).is_err());
        assert!(CoverCertificate::from_text("cover 1\nU: 1\nW: 1\n", 3).is_err());
        assert!(CoverCertificate::from_text("cover 1 1\nU: 4\nW: 1\n", 3).is_err());
        assert!(CoverCertificate::from_text("cover 1 1\nU: 1\nW: 1\npath 1: 1\npath 1: 1\n", 3).is_err());
    }

    #[test]
    fn compose_chains_paths() {
        let p = CommunicationPattern::random_nonsplit(8, 2, 0.0).unwrap();
        let all = NodeSet::full(8);
        let (mid, late) = find_cover_m(&p, &all, 3, 5, 2).unwrap();
        let (_, early) = find_single_cover(&p, &mid, 1, 3).unwrap();
        let chained = early.compose(&late).unwrap();
        assert_eq!((chained.t1(), chained.t2()), (1, 5));
        chained.verify(&p).unwrap();
        assert!(late.compose(&early).is_err());
    }

    #[test]
    fn heavy_preimage_examples() {
        let all4 = NodeSet::full(4);
        let constant = SubsetAssignment::from_fn(4, 2, |_| Ok(3)).unwrap();
        assert_eq!(heavy_preimage_node(&constant, &all4).unwrap(), (3, all4.clone()));
        let ident = SubsetAssignment::from_fn(4, 1, |a| Ok(a[0])).unwrap();
        let (w, u) = heavy_preimage_node(&ident, &all4).unwrap();
        assert_eq!((w, u.len()), (1, 1));
        assert!(matches!(
            heavy_preimage_node(&constant, &set(4, &[2])),
            Err(Error::TooSmall {
                size: 1,
                subset_size: 2
            })
        ));
        let partial = SubsetAssignment::from_entries(4, 1, vec![(vec![1], 1), (vec![2], 1)]).unwrap();
        assert!(matches!(
            heavy_preimage_node(&partial, &all4),
            Err(Error::MissingAssignment(_))
        ));
        assert_eq!(
            heavy_preimage_node(&partial, &set(4, &[1, 2])).unwrap().1.to_vec(),
            vec![1, 2]
        );
    }

    #[test]
    fn heavy_preimage_restricted() {
        // f(A) = max(A): restricted to {1,2,3}, node 3 collects {1,2,3}.
        let f = SubsetAssignment::from_fn(5, 2, |a| Ok(*a.iter().max().unwrap())).unwrap();
        let (w, u) = heavy_preimage_node(&f, &set(5, &[1, 2, 3])).unwrap();
        assert_eq!((w, u.to_vec()), (3, vec![1, 2, 3]));
        assert_eq!(f.get(&[2, 4]), Some(4));
        assert_eq!(f.len(), 10);
    }

    #[test]
    fn loglog_params_values() {
        let p8 = LoglogParams::for_n(8);
        assert_eq!((p8.subset_size, p8.depth), (2, 2));
        assert_eq!(p8.max_picks, 114);
        assert_eq!(p8.size_bound, 116);
        assert_eq!(p8.late_phase_start(), 8);
        let p32 = LoglogParams::for_n(32);
        assert_eq!((p32.subset_size, p32.depth, p32.size_bound), (3, 2, 192));
        assert_eq!(LoglogParams::for_n(2).depth, 0);
        assert_eq!(LoglogParams::for_n(1).depth, 0);
        assert_eq!(LoglogParams::for_n(3).depth, 1);
    }

    #[test]
    fn small_cover_n8_constant() {
        let g = CommunicationPattern::random_nonsplit(8, 5, 0.0)
            .unwrap()
            .graph_at(1)
            .unwrap();
        let p = CommunicationPattern::constant(g);
        let (a, cert) = small_cover_loglog(&p, 3).unwrap();
        assert_eq!((cert.t1(), cert.t2()), (3, 5));
        assert!(a.len() <= LoglogParams::for_n(8).size_bound);
        cert.verify(&p).unwrap();
    }

    #[test]
    fn small_cover_star_and_complete() {
        let star = CommunicationPattern::star(10, CenterSchedule::Fixed(4)).unwrap();
        let (a, cert) = small_cover_loglog(&star, 1).unwrap();
        cert.verify(&star).unwrap();
        assert!(a.len() <= LoglogParams::for_n(10).size_bound);
        let complete = CommunicationPattern::complete(12).unwrap();
        let (a, cert) = small_cover_loglog(&complete, 2).unwrap();
        cert.verify(&complete).unwrap();
        assert_eq!(a.to_vec(), vec![1]);
    }

    #[test]
    fn small_cover_budget_guard() {
        let p = CommunicationPattern::random_nonsplit(16, 1, 0.0).unwrap();
        assert!(matches!(
            small_cover_loglog_with_budget(&p, 1, 10),
            Err(Error::BudgetExceeded {
                subsets: 120,
                budget: 10
            })
        ));
    }

    #[test]
    fn loglog_center_figure1_degenerate() {
        let p = CommunicationPattern::figure1();
        let (u, time, cert) = loglog_center(&p).unwrap();
        assert_eq!(time, LoglogParams::for_n(6).certified_time());
        cert.verify(&p).unwrap();
        assert_eq!(cert.source().to_vec(), vec![u]);
        assert_eq!(k_step_reach(&p.graph_at(1).unwrap(), u, 3).len(), 6);
    }

    #[test]
    fn loglog_center_random_16() {
        let p = CommunicationPattern::random_nonsplit(16, 21, 0.0).unwrap();
        let (u, time, cert) = loglog_center(&p).unwrap();
        cert.verify(&p).unwrap();
        assert!(product_range(&p, 1, time).unwrap().broadcasters().contains(u));
    }
}
