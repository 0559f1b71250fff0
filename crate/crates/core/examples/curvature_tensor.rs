//! Builds the curvature tensor of CP^4 and HP^4 and checks it by contraction.

use kpflow::ambient::{curvature_coupling, curvature_tensor, make_space, random_adapted_frame, Field, HSampler};

fn main() {
    for field in [Field::Complex, Field::Quaternionic] {
        let space = make_space(field, 4).unwrap();
        let tensor = curvature_tensor(&space);
        println!("{}: real dim {}, hypersurface dim {}", space.label(), space.dim(), space.m);
        println!("  nonzero components  {}", tensor.nnz());
        println!("  Einstein constant   {} (defect {:.1e})", space.einstein, tensor.einstein_defect());
        println!("  symmetry defect     {:.1e}", tensor.symmetry_defects().max());

        let frame = random_adapted_frame(&space, 1, &HSampler::Gaussian { scale: 1.0 }).unwrap();
        let c = curvature_coupling(&tensor, &frame).unwrap();
        let m = space.m as f64;
        let tr = frame.h.trace();
        let ao2 = frame.h.norm_squared() - tr * tr / m;
        println!("  random frame: T = {:.6}, m|Å|² = {:.6}, N = {:.6}", c.tangential, m * ao2, c.normal);
    }
}
