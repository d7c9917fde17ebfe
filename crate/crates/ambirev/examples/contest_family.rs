//! Simple contests between the first-price and all-pay corners: the
//! worst case falls as the loser's bid fraction grows.
//!
//! ```sh
//! cargo run --example contest_family
//! ```

use std::sync::Arc;

use ambirev::ambiguity::{worst_case_revenue, AmbiguitySet, AmbiguitySpec};
use ambirev::auction::{AuctionKind, Transfer};
use ambirev::measure::{MarginalCdf, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let cdf = MarginalCdf::uniform();
    let reference = Arc::new(ReferenceBelief::iid(&cdf, 150)?);
    let set = AmbiguitySet::new(AmbiguitySpec::parse("kl:0.2:joint")?, Arc::clone(&reference))?;

    println!("simple contest worst case, uniform IID reference, kl:0.2:");
    println!("kappa   worst case");
    let mut prev = f64::INFINITY;
    for kappa in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let t = Transfer::build(AuctionKind::SimpleContest(kappa), &cdf, &reference)?.total_grid();
        let value = worst_case_revenue(&set, &t)?.value;
        let marker = if value <= prev { "" } else { "  <- rose!" };
        println!("{kappa:<7} {value:.6}{marker}");
        prev = value;
    }

    let fpa = Transfer::build(AuctionKind::FirstPrice, &cdf, &reference)?.total_grid();
    let apa = Transfer::build(AuctionKind::AllPay, &cdf, &reference)?.total_grid();
    println!(
        "\nendpoints: first price {:.6}, all-pay {:.6}",
        worst_case_revenue(&set, &fpa)?.value,
        worst_case_revenue(&set, &apa)?.value
    );
    Ok(())
}
