//! The four-auction worst-case ranking under growing ambiguity.
//!
//! ```sh
//! cargo run --example rank_auctions
//! ```

use std::sync::Arc;

use ambirev::ambiguity::{AmbiguitySet, AmbiguitySpec};
use ambirev::compare::rank_auctions;
use ambirev::auction::AuctionKind;
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
    println!("worst-case revenues, uniform IID reference, KL ball:");
    println!("eta     first    second   all-pay  war      certified pairs");
    for eta in [0.0, 0.05, 0.2, 0.5] {
        let set = AmbiguitySet::new(
            AmbiguitySpec::parse(&format!("kl:{eta}:joint"))?,
            Arc::clone(&reference),
        )?;
        let table = rank_auctions(&kinds, &set, &cdf)?;
        let value = |k: AuctionKind| {
            table
                .auctions
                .iter()
                .find(|a| a.kind == k)
                .unwrap()
                .solution
                .value
        };
        let certified = table
            .certificates
            .iter()
            .filter(|c| c.certified)
            .count();
        println!(
            "{eta:<7} {:.5}  {:.5}  {:.5}  {:.5}  {certified}/{}",
            value(AuctionKind::FirstPrice),
            value(AuctionKind::SecondPrice),
            value(AuctionKind::AllPay),
            value(AuctionKind::WarOfAttrition),
            table.certificates.len()
        );
    }
    println!(
        "\nthe first-price auction tops the ranking and the war of attrition \
         sits at the bottom; second-price vs all-pay flips with the marginal family"
    );
    Ok(())
}
