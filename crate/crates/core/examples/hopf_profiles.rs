//! Principal curvatures of geodesic spheres and tubes, checked against the
//! radial Riccati equation, and the radii where each family is pinched.

use kpflow::ambient::{make_space, Field};
use kpflow::profiles::{pinched_interval, radial_riccati_oracle, EquivariantFamily};

fn main() {
    let r = 0.6;
    for field in [Field::Complex, Field::Quaternionic] {
        let space = make_space(field, 4).unwrap();
        let mut families = vec![EquivariantFamily::sphere(space)];
        families.extend((1..space.n).map(|k| EquivariantFamily::tube(space, k).unwrap()));
        for fam in families {
            println!("{} (m = {}, r̄ = {})", fam.label(), space.m, space.einstein);
            for &(class, mult) in &fam.multiplicities {
                let oracle = radial_riccati_oracle(class.radial_curvature(), r, class.initial_condition()).unwrap();
                println!(
                    "  {class:?} x{mult}: closed form {:.12}, Riccati {:.12}",
                    class.value(r),
                    oracle
                );
            }
            let s = fam.spectrum_at(r).unwrap();
            println!(
                "  at r = {r}: H = {:.6}, -dH/dr = {:.6}, |A|² + r̄ = {:.6}",
                s.mean_curvature,
                -fam.dh_dr(r).unwrap(),
                s.norm_a2 + space.einstein
            );
            let intervals = pinched_interval(&fam, 0.01, 2000);
            println!("  pinched radii (eps = 0.01): {intervals:?}");
        }
    }
}
