//! Single covers and m-covers with replayable certificates.

use nonsplit::covering::{ceil_log2, ceil_log2_ratio, find_cover_m, find_single_cover, CoverCertificate};
use nonsplit::{CommunicationPattern, NodeSet};

fn main() -> nonsplit::Result<()> {
    let n = 20;
    let p = CommunicationPattern::random_nonsplit(n, 42, 0.0)?;
    let all = NodeSet::full(n);

    let depth = ceil_log2(n as u64) as usize;
    let (u, cert) = find_single_cover(&p, &all, 1, 1 + depth)?;
    cert.verify(&p)?;
    println!("node {u} at round 1 covers all {n} nodes at round {}", 1 + depth);
    println!("path to node {n}: {:?}", cert.path(n).unwrap_or_default());

    for m in [2, 5, 10] {
        let t2 = 1 + ceil_log2_ratio(n as u64, m as u64) as usize;
        let (us, cert) = find_cover_m(&p, &all, 1, t2, m)?;
        cert.verify(&p)?;
        println!("m={m}: {{{us}}} covers [n] over rounds 1..{t2}");
    }

    let fig = CommunicationPattern::figure1();
    let w = NodeSet::from_ids(6, [1, 5])?;
    let (_, cert) = find_single_cover(&fig, &w, 1, 2)?;
    let text = cert.to_text();
    print!("{text}");
    assert_eq!(CoverCertificate::from_text(&text, 6)?.to_text(), text);
    Ok(())
}
