//! The certified two-phase construction: a single cover of a small set, then a
//! small cover of everything built from heavy preimages.

use nonsplit::covering::{ceil_log2, loglog_center, small_cover_loglog, LoglogParams};
use nonsplit::radius::broadcast_time;
use nonsplit::CommunicationPattern;

fn main() -> nonsplit::Result<()> {
    for n in [8, 16, 32] {
        let params = LoglogParams::for_n(n);
        let p = CommunicationPattern::random_nonsplit(n, 7, 0.0)?;

        let (a, late) = small_cover_loglog(&p, params.late_phase_start())?;
        late.verify(&p)?;
        println!(
            "n={n}: |A|={} (bound {}), late phase rounds {}..{}",
            a.len(),
            params.size_bound,
            late.t1(),
            late.t2()
        );

        let (u, time, cert) = loglog_center(&p)?;
        cert.verify(&p)?;
        println!(
            "  center {u}: certified time {time}, actual broadcast time {}, ceil(log2 n) = {}",
            broadcast_time(&p, u, time)?,
            ceil_log2(n as u64)
        );
    }
    Ok(())
}
