//! Communication graphs: directed graphs on `[n]` that always carry every self-loop.
//!
//! Rows are kept as bit-vectors in both directions. The product `G ∘ H` is
//! computed row-wise: the out-row of `i` in `G ∘ H` is the union of the
//! `H`-out-rows of the `G`-out-neighbors of `i`.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{parse_err, Error, Result};
use crate::nodeset::NodeSet;
use crate::NodeId;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CommunicationGraph {
    n: usize,
    out_rows: Vec<FixedBitSet>,
    in_rows: Vec<FixedBitSet>,
}

/// Result of [`CommunicationGraph::static_radius`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaticRadius {
    Finite {
        radius: usize,
        center: NodeId,
    },
    /// No node reaches every other node.
    Unbounded,
}

impl StaticRadius {
    pub fn value(self) -> Option<usize> {
        match self {
            StaticRadius::Finite { radius, .. } => Some(radius),
            StaticRadius::Unbounded => None,
        }
    }
}

impl CommunicationGraph {
    /// Builds a graph from 1-based edges. Missing self-loops are added.
    pub fn new(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut out_rows = identity_rows(n);
        for &(u, v) in edges {
            for id in [u, v] {
                if id == 0 || id > n {
                    return Err(Error::InvalidNode(id));
                }
            }
            out_rows[u - 1].insert(v - 1);
        }
        Ok(Self::from_out_rows(out_rows))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    /// Graph in which every node has an edge to every node.
    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let rows = (0..n)
            .map(|_| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert_range(..);
                row
            })
            .collect();
        Ok(Self::from_out_rows(rows))
    }

    /// Builds a graph from per-node in-neighborhoods (index `i` holds `In_{i+1}`).
    pub fn from_in_neighborhoods(in_sets: &[NodeSet]) -> Result<Self> {
        let n = in_sets.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut out_rows = identity_rows(n);
        for (j, set) in in_sets.iter().enumerate() {
            set.check_universe(n)?;
            for i in set.iter() {
                out_rows[i - 1].insert(j);
            }
        }
        Ok(Self::from_out_rows(out_rows))
    }

    /// Rows must already contain the diagonal.
    pub(crate) fn from_out_rows(out_rows: Vec<FixedBitSet>) -> Self {
        let n = out_rows.len();
        let mut in_rows: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for (i, row) in out_rows.iter().enumerate() {
            debug_assert!(row.contains(i), "missing self-loop at {}", i + 1);
            for j in row.ones() {
                in_rows[j].insert(i);
            }
        }
        CommunicationGraph { n, out_rows, in_rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u >= 1 && v >= 1 && u <= self.n && v <= self.n && self.out_rows[u - 1].contains(v - 1)
    }

    pub fn out_neighbors(&self, i: NodeId) -> NodeSet {
        NodeSet::from_bits(self.out_rows[i - 1].clone())
    }

    pub fn in_neighbors(&self, i: NodeId) -> NodeSet {
        NodeSet::from_bits(self.in_rows[i - 1].clone())
    }

    pub fn out_degree(&self, i: NodeId) -> usize {
        self.out_rows[i - 1].count_ones(..)
    }

    pub fn in_degree(&self, i: NodeId) -> usize {
        self.in_rows[i - 1].count_ones(..)
    }

    /// All edges, self-loops included, sorted by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.ones().map(move |v| (u + 1, v + 1)))
    }

    pub fn edge_count(&self) -> usize {
        self.out_rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Relational composition: `(i, j)` is an edge iff `i -> k` in `self` and `k -> j` in `other`.
    pub fn product(&self, other: &CommunicationGraph) -> Result<CommunicationGraph> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let out_rows = self
            .out_rows
            .iter()
            .map(|row| {
                let mut acc = FixedBitSet::with_capacity(self.n);
                for k in row.ones() {
                    acc.union_with(&other.out_rows[k]);
                }
                acc
            })
            .collect();
        Ok(Self::from_out_rows(out_rows))
    }

    pub fn transpose(&self) -> CommunicationGraph {
        CommunicationGraph {
            n: self.n,
            out_rows: self.in_rows.clone(),
            in_rows: self.out_rows.clone(),
        }
    }

    /// Smallest pair `(i, j)`, `i < j`, without a common in-neighbor; `None` iff nonsplit.
    pub fn split_witness(&self) -> Option<(NodeId, NodeId)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.in_rows[i].is_disjoint(&self.in_rows[j]) {
                    return Some((i + 1, j + 1));
                }
            }
        }
        None
    }

    pub fn is_nonsplit(&self) -> bool {
        self.split_witness().is_none()
    }

    /// Nodes with an edge to every node.
    pub fn broadcasters(&self) -> NodeSet {
        let mut set = NodeSet::empty(self.n);
        for (i, row) in self.out_rows.iter().enumerate() {
            if row.is_full() {
                set.insert(i + 1).expect("in range");
            }
        }
        set
    }

    /// Nodes reachable from `i` along directed paths (including `i`).
    pub fn reachable_from(&self, i: NodeId) -> NodeSet {
        self.bfs_layers(i).0
    }

    /// Smallest-id node reaching all nodes, if any.
    pub fn root(&self) -> Option<NodeId> {
        (1..=self.n).find(|&i| self.reachable_from(i).is_full())
    }

    pub fn is_rooted(&self) -> bool {
        self.root().is_some()
    }

    /// Eccentricity of `i`: the longest shortest-path length to any node, or `None` if some
    /// node is unreachable.
    pub fn eccentricity(&self, i: NodeId) -> Option<usize> {
        let (seen, depth) = self.bfs_layers(i);
        seen.is_full().then_some(depth)
    }

    /// `min_u max_v ℓ(u, v)`, center with smallest id on ties.
    pub fn static_radius(&self) -> StaticRadius {
        let mut best: Option<(usize, NodeId)> = None;
        for u in 1..=self.n {
            if let Some(ecc) = self.eccentricity(u) {
                if best.is_none_or(|(r, _)| ecc < r) {
                    best = Some((ecc, u));
                }
            }
        }
        match best {
            Some((radius, center)) => StaticRadius::Finite { radius, center },
            None => StaticRadius::Unbounded,
        }
    }

    fn bfs_layers(&self, i: NodeId) -> (NodeSet, usize) {
        let mut seen = FixedBitSet::with_capacity(self.n);
        seen.insert(i - 1);
        let mut frontier = seen.clone();
        let mut depth = 0;
        loop {
            let mut next = FixedBitSet::with_capacity(self.n);
            for k in frontier.ones() {
                next.union_with(&self.out_rows[k]);
            }
            next.difference_with(&seen);
            if next.is_clear() {
                break;
            }
            seen.union_with(&next);
            frontier = next;
            depth += 1;
        }
        (NodeSet::from_bits(seen), depth)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the line-oriented graph format; see [`FromStr`].
    pub fn from_text(text: &str) -> Result<Self> {
        text.parse()
    }

    pub(crate) fn parse_lines<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<Self>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let (header_line, header) = next_content(lines).ok_or_else(|| parse_err(0, "missing `n <count>` header"))?;
        let n = parse_header(header_line, header)?;
        let mut edges = Vec::new();
        while let Some(&(lineno, raw)) = lines.peek() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                lines.next();
                continue;
            }
            if line.starts_with("round") || line.starts_with('n') {
                break;
            }
            lines.next();
            let mut parts = line.split_whitespace();
            let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(lineno, format!("expected `<u> <v>`, got `{line}`")));
            };
            let u: NodeId = u.parse().map_err(|_| parse_err(lineno, format!("bad node id `{u}`")))?;
            let v: NodeId = v.parse().map_err(|_| parse_err(lineno, format!("bad node id `{v}`")))?;
            if u == 0 || u > n || v == 0 || v > n {
                return Err(Error::InvalidNode(if u == 0 || u > n { u } else { v }));
            }
            edges.push((u, v));
        }
        Self::new(n, &edges)
    }
}

pub(crate) fn next_content<'a, I>(lines: &mut std::iter::Peekable<I>) -> Option<(usize, &'a str)>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    for (lineno, raw) in lines.by_ref() {
        let line = raw.trim();
        if !line.is_empty() && !line.starts_with('#') {
            return Some((lineno, line));
        }
    }
    None
}

fn parse_header(lineno: usize, line: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("n"), Some(count), None) => {
            let n: usize = count
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad node count `{count}`")))?;
            if n == 0 {
                return Err(Error::EmptyGraph);
            }
            Ok(n)
        }
        _ => Err(parse_err(lineno, format!("expected `n <count>`, got `{line}`"))),
    }
}

fn identity_rows(n: usize) -> Vec<FixedBitSet> {
    (0..n)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert(i);
            row
        })
        .collect()
}

impl fmt::Debug for CommunicationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CommunicationGraph")
            .field("n", &self.n)
            .field("edges", &self.edges().filter(|(u, v)| u != v).collect::<Vec<_>>())
            .finish()
    }
}

/// `n <count>` followed by one `<u> <v>` line per non-loop edge, sorted.
impl fmt::Display for CommunicationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (u, v) in self.edges() {
            if u != v {
                writeln!(f, "{u} {v}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for CommunicationGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        let g = Self::parse_lines(&mut lines)?;
        if let Some((lineno, line)) = next_content(&mut lines) {
            return Err(parse_err(lineno, format!("unexpected `{line}` after graph")));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIGURE1_EDGES: [(usize, usize); 12] = [
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

    fn figure1() -> CommunicationGraph {
        CommunicationGraph::new(6, &FIGURE1_EDGES).unwrap()
    }

    fn line(n: usize) -> CommunicationGraph {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        CommunicationGraph::new(n, &edges).unwrap()
    }

    fn star(n: usize, c: NodeId) -> CommunicationGraph {
        let edges: Vec<_> = (1..=n).map(|j| (c, j)).collect();
        CommunicationGraph::new(n, &edges).unwrap()
    }

    /// Paths of length exactly two (self-loops make this cover shorter paths too).
    fn two_step_oracle(g: &CommunicationGraph, u: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        for v in 1..=g.n() {
            if (1..=g.n()).any(|k| g.has_edge(u, k) && g.has_edge(k, v)) {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn constructor_adds_self_loops() {
        let g = CommunicationGraph::new(2, &[]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 1), (2, 2)]);
        let f = figure1();
        assert_eq!(f.edge_count(), 18);
        for i in 1..=6 {
            assert!(f.has_edge(i, i));
        }
    }

    #[test]
    fn constructor_rejects_out_of_range() {
        assert!(matches!(
            CommunicationGraph::new(3, &[(1, 5)]),
            Err(Error::InvalidNode(5))
        ));
        assert!(matches!(
            CommunicationGraph::new(3, &[(0, 1)]),
            Err(Error::InvalidNode(0))
        ));
        assert!(matches!(CommunicationGraph::new(0, &[]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = CommunicationGraph::new(2, &[(1, 2), (1, 2), (1, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn figure1_neighborhoods() {
        let f = figure1();
        assert_eq!(f.in_neighbors(1).to_vec(), vec![1, 4, 6]);
        assert_eq!(f.out_neighbors(1).to_vec(), vec![1, 2, 4]);
        for i in 1..=6 {
            for j in 1..=6 {
                assert_eq!(f.in_neighbors(i).contains(j), f.out_neighbors(j).contains(i));
            }
        }
    }

    #[test]
    fn figure1_product_matches_path_enumeration() {
        let f = figure1();
        let ff = f.product(&f).unwrap();
        for u in 1..=6 {
            assert_eq!(ff.out_neighbors(u).to_vec(), two_step_oracle(&f, u));
        }
        let mut expected = NodeSet::empty(6);
        for k in [1, 2, 4] {
            expected.union_with(&f.out_neighbors(k));
        }
        assert_eq!(ff.out_neighbors(1), expected);
    }

    #[test]
    fn identity_is_two_sided() {
        let f = figure1();
        let id = CommunicationGraph::identity(6).unwrap();
        assert_eq!(id.product(&f).unwrap(), f);
        assert_eq!(f.product(&id).unwrap(), f);
        assert_eq!(CommunicationGraph::identity(3).unwrap().edge_count(), 3);
        assert_eq!(CommunicationGraph::identity(1).unwrap().edge_count(), 1);
    }

    #[test]
    fn product_size_mismatch() {
        let a = CommunicationGraph::identity(3).unwrap();
        let b = CommunicationGraph::identity(4).unwrap();
        assert!(matches!(a.product(&b), Err(Error::SizeMismatch { left: 3, right: 4 })));
    }

    #[test]
    fn nonsplit_examples() {
        assert!(figure1().is_nonsplit());
        assert!(star(5, 3).is_nonsplit());
        let id2 = CommunicationGraph::identity(2).unwrap();
        assert_eq!(id2.split_witness(), Some((1, 2)));
        assert_eq!(line(3).split_witness(), Some((1, 3)));
    }

    #[test]
    fn broadcaster_examples() {
        assert_eq!(star(5, 3).broadcasters().to_vec(), vec![3]);
        assert!(CommunicationGraph::identity(4).unwrap().broadcasters().is_empty());
        let f = figure1();
        let f3 = f.product(&f).unwrap().product(&f).unwrap();
        let b = f3.broadcasters();
        assert!(!b.is_empty());
        // three-step reachability by brute force
        for u in 1..=6 {
            let mut reach = vec![u];
            for _ in 0..3 {
                let mut next = Vec::new();
                for v in 1..=6 {
                    if reach.iter().any(|&k| f.has_edge(k, v)) {
                        next.push(v);
                    }
                }
                reach = next;
            }
            assert_eq!(b.contains(u), reach.len() == 6);
        }
        assert!(f.product(&f).unwrap().broadcasters().is_empty());
    }

    #[test]
    fn rooted_examples() {
        assert_eq!(line(3).root(), Some(1));
        let two_components = CommunicationGraph::new(4, &[(1, 2), (3, 4), (4, 3)]).unwrap();
        assert!(!two_components.is_rooted());
        assert_eq!(figure1().root(), Some(1));
        for i in 1..=6 {
            assert!(figure1().reachable_from(i).is_full());
        }
    }

    #[test]
    fn static_radius_examples() {
        assert_eq!(figure1().static_radius().value(), Some(3));
        assert_eq!(
            CommunicationGraph::complete(5).unwrap().static_radius().value(),
            Some(1)
        );
        assert_eq!(
            CommunicationGraph::complete(1).unwrap().static_radius().value(),
            Some(0)
        );
        assert_eq!(line(4).static_radius(), StaticRadius::Finite { radius: 3, center: 1 });
        assert_eq!(
            CommunicationGraph::identity(2).unwrap().static_radius(),
            StaticRadius::Unbounded
        );
    }

    #[test]
    fn transpose_examples() {
        let id = CommunicationGraph::identity(4).unwrap();
        assert_eq!(id.transpose(), id);
        assert_eq!(figure1().transpose().transpose(), figure1());
        let rev = CommunicationGraph::new(3, &[(3, 2), (2, 1)]).unwrap();
        assert_eq!(line(3).transpose(), rev);
    }

    #[test]
    fn text_round_trip() {
        let f = figure1();
        let text = f.to_text();
        assert!(text.starts_with("n 6\n1 2\n1 4\n"));
        let back: CommunicationGraph = text.parse().unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_parse_comments_and_errors() {
        let g: CommunicationGraph = "# comment\nn 3\n1 2\n\n# more\n2 3\n".parse().unwrap();
        assert_eq!(g, line(3));
        assert!(matches!(
            "1 2\n".parse::<CommunicationGraph>(),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            "n 2\n1 3\n".parse::<CommunicationGraph>(),
            Err(Error::InvalidNode(3))
        ));
        assert!(matches!(
            "n 2\n1 x\n".parse::<CommunicationGraph>(),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
