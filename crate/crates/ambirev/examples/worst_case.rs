//! Worst-case revenue solves across the ambiguity families.
//!
//! ```sh
//! cargo run --example worst_case
//! ```

use std::sync::Arc;

use ambirev::ambiguity::{worst_case_revenue, AmbiguitySet, AmbiguitySpec};
use ambirev::auction::{AuctionKind, Transfer};
use ambirev::measure::{MarginalCdf, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let cdf = MarginalCdf::uniform();
    let reference = Arc::new(ReferenceBelief::iid(&cdf, 150)?);
    let spa = Transfer::build(AuctionKind::SecondPrice, &cdf, &reference)?.total_grid();
    let expected = reference.joint().expectation_with(spa.values());
    println!("second-price auction, uniform IID reference on 150x150 cells");
    println!("reference expected revenue: {expected:.6}\n");

    for spec_text in [
        "kl:0.2:joint",
        "phi:chi2:0.2:joint",
        "blr:1:1:0.5:joint",
        "contam:0.3:joint",
        "kl:0.2:iid",
        "kl:0.2:ind",
    ] {
        let spec = AmbiguitySpec::parse(spec_text)?;
        let set = AmbiguitySet::new(spec, Arc::clone(&reference))?;
        let sol = worst_case_revenue(&set, &spa)?;
        println!(
            "{spec_text:<20} value {:.6}  divergence {:.4}  tau {:>9}  monotone {}  certified {}",
            sol.value,
            sol.achieved_divergence,
            sol.dual_tau
                .map(|t| format!("{t:.3e}"))
                .unwrap_or_else(|| "-".into()),
            sol.monotone_minimizer,
            sol.certified,
        );
    }

    // the minimizer underweights high types: inspect the first-axis
    // marginal of the KL solution
    let set = AmbiguitySet::new(AmbiguitySpec::parse("kl:0.2:joint")?, Arc::clone(&reference))?;
    let sol = worst_case_revenue(&set, &spa)?;
    let marginal = sol.minimizer.marginal(0);
    println!("\nKL minimizer marginal mass by decile:");
    let n = marginal.grid().n();
    for d in 0..10 {
        let lo = d * n / 10;
        let hi = (d + 1) * n / 10;
        let mass: f64 = marginal.mass()[lo..hi].iter().sum();
        println!(
            "  [{:.1}, {:.1}): {:.4} (reference {:.4})",
            d as f64 / 10.0,
            (d + 1) as f64 / 10.0,
            mass,
            (hi - lo) as f64 / n as f64
        );
    }
    Ok(())
}
