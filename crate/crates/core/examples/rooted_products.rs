//! Products of n - 1 rooted graphs are nonsplit; a line shows the linear lower bound.

use nonsplit::experiment::rooted_product_campaign;
use nonsplit::radius::{dynamic_radius, rooted_product_nonsplit_check};
use nonsplit::CommunicationPattern;

fn main() -> nonsplit::Result<()> {
    let p = CommunicationPattern::random_rooted(6, 9)?;
    let graphs = p.window(1, 6)?;
    let check = rooted_product_nonsplit_check(&graphs)?;
    println!("product of 5 rooted graphs nonsplit: {}", check.is_nonsplit());
    print!("{}", check.product.to_text());

    for n in [4, 8, 12] {
        let s = rooted_product_campaign(n, 500, 1)?;
        println!("n={n}: {} trials, {} split products", s.trials, s.violations.len());
    }

    for n in [4, 16, 64] {
        let r = dynamic_radius(&CommunicationPattern::line(n)?, n)?;
        println!("line n={n}: radius {}", r.dynamic_radius);
    }
    Ok(())
}
