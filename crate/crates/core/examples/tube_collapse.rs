//! Tubes around CP^k in CP^4 collapsing onto their core.

use kpflow::ambient::{make_space, Field};
use kpflow::flow::{evolve, gap_ratio, StopPolicy};
use kpflow::profiles::EquivariantFamily;
use kpflow::spectrum::{AlphaChoice, PinchingParams};

fn main() {
    let space = make_space(Field::Complex, 4).unwrap();
    let params = PinchingParams::new(space.m, 0.01, 0.01, 0.01, AlphaChoice::Midpoint).unwrap();
    for k in 1..space.n {
        let family = EquivariantFamily::tube(space, k).unwrap();
        let traj = evolve(&family, 0.2, &params, &StopPolicy::default()).unwrap();
        println!("{}: {} samples, singular time {:.10}", family.label(), traj.samples.len(), traj.t_singular_estimate);
        println!("  {:>12} {:>14} {:>14} {:>14}", "H", "|λ1|/H", "gap ratio", "Q");
        for target in [1e1, 1e2, 1e3, 1e4, 1e5, 1e6] {
            if let Some(s) = traj.samples.iter().find(|s| s.h >= target) {
                let l1 = s.spectrum.lambdas()[0].abs() / s.h;
                println!("  {:>12.4e} {:>14.6e} {:>14.6e} {:>14.6e}", s.h, l1, gap_ratio(&s.spectrum), s.q);
            }
        }
    }
}
