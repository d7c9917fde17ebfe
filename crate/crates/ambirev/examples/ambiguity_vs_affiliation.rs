//! Ambiguity against affiliation: the first- vs second-price sign over a
//! coarse (eta, zeta) grid.
//!
//! ```sh
//! cargo run --example ambiguity_vs_affiliation
//! ```

use std::sync::Arc;

use ambirev::ambiguity::{worst_case_revenue, AmbiguitySet, AmbiguitySpec, Domain, Family};
use ambirev::auction::{AuctionKind, Transfer};
use ambirev::measure::{MarginalCdf, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let etas = [0.01, 0.1, 0.25, 0.5, 1.0];
    let zetas = [0.0, 0.2, 0.4, 0.6, 0.8];
    let cdf = MarginalCdf::uniform();
    let n = 100;

    println!("sign of R(first) - R(second) on the band reference:");
    println!("rows: zeta (affiliation), columns: eta (ambiguity)");
    print!("        ");
    for eta in etas {
        print!("{eta:>7}");
    }
    println!();
    for &zeta in &zetas {
        let reference = Arc::new(ReferenceBelief::band(zeta, n)?);
        let t_fpa =
            Transfer::build(AuctionKind::AffiliatedFirstPrice, &cdf, &reference)?.total_grid();
        let t_spa = Transfer::build(AuctionKind::SecondPrice, &cdf, &reference)?.total_grid();
        print!("zeta={zeta:<4}");
        for &eta in &etas {
            let set = AmbiguitySet::new(
                AmbiguitySpec::new(Family::Kl, eta, Domain::Joint)?,
                Arc::clone(&reference),
            )?;
            let a = worst_case_revenue(&set, &t_fpa)?.value;
            let b = worst_case_revenue(&set, &t_spa)?.value;
            let sign = if a > b { "I" } else { "II" };
            print!("{sign:>7}");
        }
        println!();
    }
    println!(
        "\nI: ambiguity dominates (first price ahead), II: affiliation \
         dominates (second price ahead)"
    );
    Ok(())
}
