//! Broadcast times, dynamic radius and the consensus lower-bound witness.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::CommunicationGraph;
use crate::nodeset::NodeSet;
use crate::pattern::CommunicationPattern;
use crate::{NodeId, Round};

/// A broadcast time, or the horizon that was searched without finding one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BroadcastTime {
    At(Round),
    Unresolved(Round),
}

impl BroadcastTime {
    pub fn resolved(self) -> Option<Round> {
        match self {
            BroadcastTime::At(t) => Some(t),
            BroadcastTime::Unresolved(_) => None,
        }
    }
}

/// `inf` for unresolved times.
impl fmt::Display for BroadcastTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BroadcastTime::At(t) => write!(f, "{t}"),
            BroadcastTime::Unresolved(_) => f.write_str("inf"),
        }
    }
}

/// Least `t <= horizon` such that `i` is a broadcaster in `G_1 ∘ ... ∘ G_t`.
///
/// Keeps the reach-set of `i` and right-multiplies it by each round's graph.
pub fn broadcast_time(p: &CommunicationPattern, i: NodeId, horizon: Round) -> Result<BroadcastTime> {
    let mut reach = NodeSet::singleton(p.n(), i)?;
    for t in 0..=horizon {
        if t > 0 {
            let g = p.graph_at(t)?;
            let mut next = NodeSet::empty(p.n());
            for k in reach.iter() {
                next.union_with(&g.out_neighbors(k));
            }
            reach = next;
        }
        if reach.is_full() {
            return Ok(BroadcastTime::At(t));
        }
    }
    Ok(BroadcastTime::Unresolved(horizon))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusReport {
    pub n: usize,
    pub horizon: Round,
    /// Index `i - 1` holds node `i`.
    pub broadcast_times: Vec<BroadcastTime>,
    pub dynamic_radius: BroadcastTime,
    /// Smallest-id node attaining the radius.
    pub center: Option<NodeId>,
}

impl RadiusReport {
    pub fn broadcast_time(&self, i: NodeId) -> BroadcastTime {
        self.broadcast_times[i - 1]
    }

    /// `node,broadcast_time` rows followed by `#` footer lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,broadcast_time\n");
        for (i, t) in self.broadcast_times.iter().enumerate() {
            out.push_str(&format!("{},{t}\n", i + 1));
        }
        out.push_str(&format!("# dynamic_radius={}\n", self.dynamic_radius));
        match self.center {
            Some(c) => out.push_str(&format!("# center={c}\n")),
            None => out.push_str("# center=none\n"),
        }
        out.push_str(&format!("# horizon={}\n", self.horizon));
        out
    }
}

/// All broadcast times up to `horizon`, via prefix products `G_1 ∘ ... ∘ G_t`.
///
/// Stops once every node is resolved.
pub fn dynamic_radius(p: &CommunicationPattern, horizon: Round) -> Result<RadiusReport> {
    let n = p.n();
    let mut times = vec![BroadcastTime::Unresolved(horizon); n];
    let mut prefix = CommunicationGraph::identity(n)?;
    let mut pending = n;
    for t in 0..=horizon {
        if t > 0 {
            prefix = prefix.product(&p.graph_at(t)?)?;
        }
        for i in prefix.broadcasters().iter() {
            if times[i - 1].resolved().is_none() {
                times[i - 1] = BroadcastTime::At(t);
                pending -= 1;
            }
        }
        if pending == 0 {
            break;
        }
    }
    let best = times
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.resolved().map(|t| (t, i + 1)))
        .min();
    Ok(RadiusReport {
        n,
        horizon,
        broadcast_times: times,
        dynamic_radius: best.map_or(BroadcastTime::Unresolved(horizon), |(t, _)| BroadcastTime::At(t)),
        center: best.map(|(_, c)| c),
    })
}

/// For every node `j`, a node `i'` not reached by `j` in `G_1 ∘ ... ∘ G_{k-1}`.
///
/// Such a map exists exactly when the dynamic radius is at least `k`; it shows
/// that no deterministic consensus algorithm can have every process decided
/// before time `k`, since flipping `j`'s input leaves `i'` in the same state.
pub fn check_no_broadcaster_prefix(p: &CommunicationPattern, k: Round) -> Result<BTreeMap<NodeId, NodeId>> {
    if k == 0 {
        return Err(Error::InvalidInterval { t1: 1, t2: 0 });
    }
    let prefix = crate::covering::product_range(p, 1, k)?;
    let mut witnesses = BTreeMap::new();
    for j in 1..=p.n() {
        match prefix.out_neighbors(j).first_missing() {
            Some(i) => {
                witnesses.insert(j, i);
            }
            None => return Err(Error::BroadcasterExists(j)),
        }
    }
    Ok(witnesses)
}

/// Outcome of [`rooted_product_nonsplit_check`].
#[derive(Debug, Clone)]
pub struct RootedProductCheck {
    pub product: CommunicationGraph,
    /// A pair without a common in-neighbor, if the product is split.
    pub split_witness: Option<(NodeId, NodeId)>,
}

impl RootedProductCheck {
    pub fn is_nonsplit(&self) -> bool {
        self.split_witness.is_none()
    }
}

/// Multiplies the first `n - 1` graphs (all must be rooted) and checks the product is nonsplit.
pub fn rooted_product_nonsplit_check(graphs: &[CommunicationGraph]) -> Result<RootedProductCheck> {
    let n = graphs.first().ok_or(Error::EmptyGraph)?.n();
    if graphs.len() < n - 1 {
        return Err(Error::TooFewGraphs {
            required: n - 1,
            got: graphs.len(),
        });
    }
    let mut product = CommunicationGraph::identity(n)?;
    for (idx, g) in graphs.iter().enumerate().take(n - 1) {
        if g.n() != n {
            return Err(Error::SizeMismatch { left: n, right: g.n() });
        }
        if !g.is_rooted() {
            return Err(Error::NotRooted(idx));
        }
        product = product.product(g)?;
    }
    let split_witness = product.split_witness();
    Ok(RootedProductCheck { product, split_witness })
}
