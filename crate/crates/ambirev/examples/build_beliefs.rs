//! Construct reference beliefs and query their basic diagnostics.
//!
//! ```sh
//! cargo run --example build_beliefs
//! ```

use ambirev::measure::{
    divergence1, hazard_condition_check, Density1D, Grid1D, MarginalCdf, MonotoneCdf, Phi,
    ReferenceBelief,
};

fn main() -> ambirev::Result<()> {
    // an IID reference from the power family F(z) = z^1.5
    let cdf = MarginalCdf::parse("power(1.5)")?;
    let reference = ReferenceBelief::iid(&cdf, 8)?;
    println!("IID reference on an 8-cell grid, marginal masses:");
    for (node, mass) in reference
        .grid()
        .nodes()
        .iter()
        .zip(reference.marginal(0).mass())
    {
        println!("  theta = {node:.4}  mass = {mass:.5}");
    }
    println!("is IID: {}", reference.is_iid(1e-12));

    // the band belief: uniform on |theta - theta'| <= 1 - zeta
    let band = ReferenceBelief::band(0.5, 8)?;
    println!("\nband belief (zeta = 0.5) support pattern:");
    for i in 0..8 {
        let row: String = (0..8)
            .map(|j| if band.joint().at(i, j) > 0.0 { '#' } else { '.' })
            .collect();
        println!("  {row}");
    }
    println!(
        "affiliation violations: {:?}",
        band.affiliation_violation(1e-12)?
    );

    // divergences between two marginals
    let grid = Grid1D::new(8)?;
    let p = Density1D::uniform(grid.clone());
    let q = Density1D::from_cdf(grid, &|z| z * z)?;
    for phi in [Phi::Kl, Phi::ChiSquared, Phi::Hellinger] {
        println!(
            "D_{}(q || uniform) = {:.6}",
            phi.name(),
            divergence1(&q, &p, phi)?
        );
    }

    // the monotone-virtual-hazard condition behind the second-price /
    // war-of-attrition ranking
    let check = hazard_condition_check(reference.marginal(0));
    println!("\ntheta * f / (1 - F) nondecreasing: {}", check.holds);

    // right-continuous quantiles
    let h = MonotoneCdf::from_density(&q);
    println!("quantile of F(z)=z^2 at 0.25: {:.4}", h.inverse_sup(0.25)?);
    Ok(())
}
