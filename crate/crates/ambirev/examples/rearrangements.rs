//! Rearrangement constructions: ratio transport against a payoff and the
//! per-axis decreasing rearrangement of product beliefs.
//!
//! ```sh
//! cargo run --example rearrangements
//! ```

use ambirev::measure::{Density1D, Density2D, Grid1D};
use ambirev::rearrange::{
    anti_comonotone_rearrangement, brute_force_min, decreasing_rearrangement_1d, expectation,
    independent_decreasing_rearrangement, is_rearrangement, EnumeratedSet,
};

fn main() -> ambirev::Result<()> {
    // 1-D: sort the likelihood ratio downward
    let mu = vec![1.0 / 3.0; 3];
    let nu = vec![0.2, 0.3, 0.5];
    let sorted = decreasing_rearrangement_1d(&nu, &mu)?;
    println!("decreasing rearrangement of {nu:?}: {sorted:?}");
    println!(
        "is a rearrangement: {}",
        is_rearrangement(&sorted, &nu, &mu)?
    );

    // 2-D: mass on the upper-right quadrant moved against T = max
    let n = 6usize;
    let grid = Grid1D::new(n)?;
    let cells = n * n;
    let p = vec![1.0 / cells as f64; cells];
    let mut q = vec![0.0; cells];
    let mut t = vec![0.0; cells];
    for i in 0..n {
        for j in 0..n {
            t[i * n + j] = grid.node(i).max(grid.node(j));
            if grid.node(i) > 0.5 && grid.node(j) > 0.5 {
                q[i * n + j] = 4.0 / cells as f64;
            }
        }
    }
    let qt = anti_comonotone_rearrangement(&q, &t, &p)?;
    println!("\npayoff T = max(theta, theta'), base uniform:");
    println!(
        "  E[T] before: {:.5}   after: {:.5}",
        expectation(&q, &t),
        expectation(&qt, &t)
    );
    println!("  rearranged mass pattern (# where positive):");
    for i in 0..n {
        let row: String = (0..n)
            .map(|j| if qt[i * n + j] > 0.0 { '#' } else { '.' })
            .collect();
        println!("    {row}");
    }

    // the construction attains the enumerated minimum on small grids
    let small_q = vec![0.30, 0.25, 0.20, 0.15, 0.07, 0.03];
    let small_t = vec![0.9, 0.5, 0.3, 0.8, 0.4, 0.1];
    let best = brute_force_min(
        &EnumeratedSet::PermutationClosure {
            seed: small_q.clone(),
        },
        &small_t,
        &vec![1.0 / 6.0; 6],
    )?;
    let constructed = anti_comonotone_rearrangement(&small_q, &small_t, &vec![1.0 / 6.0; 6])?;
    println!(
        "\nenumerated minimum {:.6} vs constructed {:.6}",
        best.value,
        expectation(&constructed, &small_t)
    );

    // product beliefs stay products
    let g = Grid1D::new(4)?;
    let p_marg = Density1D::uniform(g.clone());
    let q_marg = Density1D::new(g.clone(), vec![0.1, 0.2, 0.3, 0.4])?;
    let q2 = Density2D::product(&q_marg, &q_marg)?;
    let p2 = Density2D::product(&p_marg, &p_marg)?;
    let q_star = independent_decreasing_rearrangement(&q2, &p2)?;
    println!(
        "\nIID rearrangement marginal: {:?}",
        q_star.marginal(0).mass()
    );
    println!("product residual: {:.2e}", q_star.product_residual());
    Ok(())
}
