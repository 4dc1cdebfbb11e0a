//! The six-node nonsplit graph: static radius, dynamic radius of the constant
//! pattern, and the text format.

use nonsplit::radius::dynamic_radius;
use nonsplit::CommunicationPattern;

fn main() -> nonsplit::Result<()> {
    let p = CommunicationPattern::figure1();
    let g = p.graph_at(1)?;
    print!("{}", g.to_text());
    println!("nonsplit: {}", g.is_nonsplit());
    println!("static radius: {:?}", g.static_radius());

    let report = dynamic_radius(&p, 6)?;
    print!("{}", report.to_csv());
    Ok(())
}
