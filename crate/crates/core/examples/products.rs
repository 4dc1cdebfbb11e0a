//! Graph products, broadcasters and the nonsplit test on a rotating star.

use nonsplit::covering::product_range;
use nonsplit::{CenterSchedule, CommunicationGraph, CommunicationPattern};

fn main() -> nonsplit::Result<()> {
    let a = CommunicationGraph::new(4, &[(1, 2), (2, 3)])?;
    let b = CommunicationGraph::new(4, &[(3, 4)])?;
    let ab = a.product(&b)?;
    println!(
        "A∘B edges: {:?}",
        ab.edges().filter(|(u, v)| u != v).collect::<Vec<_>>()
    );
    println!(
        "A∘B nonsplit: {}, split pair: {:?}",
        ab.is_nonsplit(),
        ab.split_witness()
    );

    let star = CommunicationPattern::star(5, CenterSchedule::Cycle(vec![3, 1]))?;
    for t2 in 2..=4 {
        let prod = product_range(&star, 1, t2)?;
        println!("rounds 1..{t2}: broadcasters {}", prod.broadcasters());
    }
    Ok(())
}
