//! Single-crossing certificates between auction pairs.
//!
//! ```sh
//! cargo run --example single_crossing
//! ```

use ambirev::auction::{AuctionKind, Transfer};
use ambirev::compare::{check_nwscc, check_rrc, check_scc, check_wscc, RRC_DEFAULT_TOL};
use ambirev::measure::{MarginalCdf, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let cdf = MarginalCdf::uniform();
    let reference = ReferenceBelief::iid(&cdf, 400)?;
    let kinds = [
        AuctionKind::FirstPrice,
        AuctionKind::SecondPrice,
        AuctionKind::AllPay,
        AuctionKind::WarOfAttrition,
    ];
    let transfers: Vec<Transfer> = kinds
        .iter()
        .map(|&k| Transfer::build(k, &cdf, &reference))
        .collect::<ambirev::Result<_>>()?;

    println!("ordered pair crossing certificates (uniform IID reference):");
    println!("x     y     wscc   scc    nwscc  rrc");
    for (i, x) in transfers.iter().enumerate() {
        for (j, y) in transfers.iter().enumerate() {
            if i == j {
                continue;
            }
            let wscc = check_wscc(x, y)?;
            let scc = check_scc(x, y)?;
            let nwscc = check_nwscc(x, y)?;
            let rrc = check_rrc(x, y, &reference, RRC_DEFAULT_TOL);
            println!(
                "{:<5} {:<5} {:<6} {:<6} {:<6} {}",
                kinds[i].label(),
                kinds[j].label(),
                wscc.holds,
                scc.holds,
                nwscc.holds,
                rrc.holds
            );
        }
    }

    // thresholds: where the first-price payment crosses the second-price
    // payment, per own type
    let report = check_wscc(&transfers[0], &transfers[1])?;
    println!("\nfirst vs second price: crossing threshold by type");
    println!("(the threshold tracks the first-price bid)");
    for &theta in &[0.2, 0.4, 0.6, 0.8] {
        let k = (theta * 400.0) as usize;
        println!(
            "  theta = {theta:.1}: threshold {:.5}, bid {:.5}",
            report.thresholds[k],
            transfers[0].bid().value_at(k)
        );
    }

    // a failing pair records a witness
    let fail = check_wscc(&transfers[1], &transfers[2])?;
    println!(
        "\nsecond price vs all-pay holds: {} (witness: {:?})",
        fail.holds,
        fail.witness.map(|w| (w.type_index, w.below_index, w.above_index))
    );
    Ok(())
}
