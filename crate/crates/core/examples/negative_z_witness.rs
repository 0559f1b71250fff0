//! Pinched spectra on which the Simons polynomial Z is negative, and the
//! empirical constants in the lower bound for Z.

use kpflow::lab::{explore_bound_z, witness_negative_z_search};

fn main() {
    for m in [7, 15] {
        match witness_negative_z_search(m, 0.01, 10_000, 7) {
            Some((s, used)) => println!(
                "m = {m}: after {used} samples, H = {:.4}, |A|² = {:.4}, Z = {:.4}\n  λ = {:?}",
                s.mean_curvature,
                s.norm_a2,
                s.simons_z,
                s.lambdas()
            ),
            None => println!("m = {m}: no witness"),
        }
        println!("  {:>8} {:>14}", "gamma", "K");
        for row in explore_bound_z(m, 0.01, 0.01, &[0.01, 0.1, 1.0, 10.0], 50_000, 7) {
            println!("  {:>8} {:>14.6e}", row.gamma, row.k_empirical);
        }
    }
}
