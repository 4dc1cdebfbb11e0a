//! Asynchronous rounds with quorum waiting: every adversary policy yields
//! radius at most 2 when fewer than half the processes crash.

use nonsplit::experiment::{async_exhaustive, async_randomized};
use nonsplit::radius::dynamic_radius;
use nonsplit::{AsyncAdversaryConfig, AsyncPolicy, CommunicationPattern};

fn main() -> nonsplit::Result<()> {
    let summary = async_exhaustive(3, 1)?;
    println!(
        "n=3 f=1: max_radius={}, prefixes_checked={}",
        summary.max_radius, summary.prefixes_checked
    );

    for policy in AsyncPolicy::ALL {
        let s = async_randomized(15, 7, policy, 100, 0)?;
        println!(
            "n=15 f=7 {policy}: max radius {} over {} seeds",
            s.max_radius, s.prefixes_checked
        );
    }

    let cfg = AsyncAdversaryConfig::new(9, 4, 1, AsyncPolicy::CrashFixedSet)?;
    let p = CommunicationPattern::asynchronous(cfg)?;
    let g = p.graph_at(1)?;
    println!(
        "round 1 in-degrees: {:?}",
        (1..=9).map(|i| g.in_degree(i)).collect::<Vec<_>>()
    );
    print!("{}", dynamic_radius(&p, 3)?.to_csv());
    Ok(())
}
