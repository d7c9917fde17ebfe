//! Divergence-penalized (multiplier) preferences and the Gibbs identity.
//!
//! ```sh
//! cargo run --example divergence_preference
//! ```

use ambirev::ambiguity::divergence_preference_value;
use ambirev::auction::{AuctionKind, Transfer};
use ambirev::measure::{MarginalCdf, Phi, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let cdf = MarginalCdf::uniform();
    let reference = ReferenceBelief::iid(&cdf, 200)?;
    let t = Transfer::build(AuctionKind::SecondPrice, &cdf, &reference)?.total_grid();
    let e_p = reference.joint().expectation_with(t.values());
    println!("second-price auction, uniform IID reference");
    println!("reference expected revenue: {e_p:.6}\n");

    println!("penalized value against the closed-form tilt:");
    println!("eta     value     -(1/eta) log E[exp(-eta T)]");
    for eta in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let sol = divergence_preference_value(&reference, &t, eta, Phi::Kl)?;
        let closed: f64 = {
            let sum: f64 = t
                .values()
                .iter()
                .zip(reference.joint().mass())
                .map(|(&v, &m)| m * (-eta * v).exp())
                .sum();
            -sum.ln() / eta
        };
        println!("{eta:<7} {:.6}  {closed:.6}", sol.value);
    }

    // eta -> 0 recovers the reference expectation; the flag marks the limit
    let zero = divergence_preference_value(&reference, &t, 0.0, Phi::Kl)?;
    println!(
        "\neta = 0 limit: value {:.6}, flagged: {}",
        zero.value, zero.eta_zero_limit
    );

    // other generators run through the conjugate solver
    for phi in [Phi::ChiSquared, Phi::Hellinger] {
        let sol = divergence_preference_value(&reference, &t, 1.0, phi)?;
        println!("phi = {:<10} value {:.6}", phi.name(), sol.value);
    }
    Ok(())
}
