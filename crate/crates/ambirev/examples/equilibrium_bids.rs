//! Equilibrium bid curves and transfer tables for the auction formats.
//!
//! ```sh
//! cargo run --example equilibrium_bids
//! ```

use ambirev::auction::{
    bid_apa, bid_fpa, bid_fpa_affiliated, bid_simple_contest, bid_spa, bid_war, AuctionKind,
    Transfer,
};
use ambirev::measure::{Grid1D, MarginalCdf, ReferenceBelief};

fn main() -> ambirev::Result<()> {
    let grid = Grid1D::new(400)?;
    let cdf = MarginalCdf::uniform();

    let fpa = bid_fpa(&cdf, &grid);
    let spa = bid_spa(&grid);
    let apa = bid_apa(&cdf, &grid);
    let war = bid_war(&cdf, &grid);
    let contest = bid_simple_contest(&cdf, &grid, 0.5)?;

    println!("uniform marginal bid curves:");
    println!("theta    first    second   all-pay  war      contest(1/2)");
    for &theta in &[0.1, 0.3, 0.5, 0.7, 0.9] {
        println!(
            "{theta:.2}     {:.5}  {:.5}  {:.5}  {:.5}  {:.5}",
            fpa.eval(theta),
            spa.eval(theta),
            apa.eval(theta),
            war.eval(theta),
            contest.eval(theta)
        );
    }
    println!("war bid at theta = 1: {}", war.eval(1.0));

    // the war bid crosses the identity exactly once
    let cross = grid
        .nodes()
        .iter()
        .position(|&t| war.eval(t) > t)
        .expect("crossing exists");
    println!(
        "war bid crosses the 45-degree line near theta = {:.4}",
        grid.node(cross)
    );

    // transfers: winner-pay tie rule vs sunk bids
    let reference = ReferenceBelief::iid(&cdf, 5)?;
    println!("\ntransfer samples on a 5-cell grid (types 0.7 vs 0.3):");
    for kind in [
        AuctionKind::FirstPrice,
        AuctionKind::SecondPrice,
        AuctionKind::AllPay,
        AuctionKind::WarOfAttrition,
    ] {
        let t = Transfer::build(kind, &cdf, &reference)?;
        println!(
            "  {:<4} winner pays {:.5}, loser pays {:.5}",
            kind.label(),
            t.payment(3, 1),
            t.payment(1, 3)
        );
    }

    // affiliated first-price equilibrium on the band belief
    let band = ReferenceBelief::band(0.5, 200)?;
    let affiliated = bid_fpa_affiliated(&band)?;
    println!("\naffiliated first-price bids (zeta = 0.5) vs the IID bid theta/2:");
    for &theta in &[0.25, 0.5, 0.75] {
        println!(
            "  theta = {theta:.2}: affiliated {:.5}, iid {:.5}",
            affiliated.eval(theta),
            theta / 2.0
        );
    }
    Ok(())
}
