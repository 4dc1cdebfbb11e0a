//! Indistinguishability witnesses: before round k = radius, every node has
//! someone it has not reached yet.

use nonsplit::radius::{check_no_broadcaster_prefix, dynamic_radius};
use nonsplit::{CommunicationPattern, Error};

fn main() -> nonsplit::Result<()> {
    let p = CommunicationPattern::random_nonsplit(12, 3, 0.0)?;
    let k = dynamic_radius(&p, 10)?
        .dynamic_radius
        .resolved()
        .expect("nonsplit patterns resolve");
    println!("dynamic radius {k}");
    for (j, i) in check_no_broadcaster_prefix(&p, k)? {
        println!("  node {j} has not reached node {i} by round {}", k - 1);
    }
    match check_no_broadcaster_prefix(&p, k + 1) {
        Err(Error::BroadcasterExists(j)) => println!("by round {k}, node {j} reaches everyone"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
