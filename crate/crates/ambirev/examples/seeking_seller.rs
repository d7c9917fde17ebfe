//! The ambiguity-seeking seller: best-case revenue reverses the ranking.
//!
//! ```sh
//! cargo run --example seeking_seller
//! ```

use std::sync::Arc;

use ambirev::ambiguity::{best_case_revenue, AmbiguitySet, AmbiguitySpec};
use ambirev::auction::{AuctionKind, Transfer};
use ambirev::compare::{check_nwscc, check_rrc, RRC_DEFAULT_TOL};
use ambirev::measure::{MarginalCdf, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let cdf = MarginalCdf::uniform();
    let reference = Arc::new(ReferenceBelief::iid(&cdf, 150)?);
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

    println!("best-case revenues, uniform IID reference, KL ball:");
    println!("eta     first    second   all-pay  war");
    for eta in [0.0, 0.05, 0.2, 0.5] {
        let set = AmbiguitySet::new(
            AmbiguitySpec::parse(&format!("kl:{eta}:joint"))?,
            Arc::clone(&reference),
        )?;
        let values: Vec<f64> = transfers
            .iter()
            .map(|t| best_case_revenue(&set, &t.total_grid()).map(|s| s.value))
            .collect::<ambirev::Result<_>>()?;
        println!(
            "{eta:<7} {:.5}  {:.5}  {:.5}  {:.5}",
            values[0], values[1], values[2], values[3]
        );
    }

    println!("\nmirrored crossing certificates for the reversed pairs:");
    for (x, y) in [(3usize, 1usize), (3, 2), (1, 0), (2, 0)] {
        let nwscc = check_nwscc(&transfers[x], &transfers[y])?.holds;
        let rrc = check_rrc(&transfers[x], &transfers[y], &reference, RRC_DEFAULT_TOL).holds;
        println!(
            "  ({}, {}): nwscc {nwscc}, rrc {rrc}",
            kinds[x].label(),
            kinds[y].label()
        );
    }
    println!("\nthe war of attrition now tops the table and first price is last");
    Ok(())
}
