//! Pinching quantities of a few hand-picked spectra.

use kpflow::spectrum::{
    alpha_window, cylindrical_gap, identity_2001_sides, pinched, q_value, two_convexity_check, w_and_f, AlphaChoice,
    PinchingParams, ShapeSpectrum,
};

fn main() {
    let params = PinchingParams::new(7, 0.01, 0.01, 0.1, AlphaChoice::Midpoint).unwrap();
    let w = alpha_window(7, params.eta);
    println!("m = 7: alpha window ({:.6}, {:.6}), alpha = {:.6}, beta = {}", w.lo, w.hi, params.alpha, params.beta);

    let mut witness = vec![0.2; 6];
    witness.push(-1.0);
    let spectra = [
        ("umbilic", vec![1.0; 7]),
        ("negative-Z witness", witness),
        ("one large curvature", vec![3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ("near cylinder", vec![0.01, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0]),
        ("large and pinched", vec![90.0, 100.0, 100.0, 100.0, 100.0, 100.0, 110.0]),
    ];
    for (name, l) in spectra {
        let s = ShapeSpectrum::new(l).unwrap();
        let wf = w_and_f(&s, &params).unwrap();
        let (lhs, rhs) = identity_2001_sides(&s);
        println!("{name}:");
        println!("  H = {:.4}, |A|² = {:.4}, |Å|² = {:.4}, Z = {:.4}", s.mean_curvature, s.norm_a2, s.norm_ao2, s.simons_z);
        println!("  pinched = {}, Q = {:.4}", pinched(&s), q_value(&s, params.epsilon));
        println!("  W = {:.4}, f_sigma_eta = {:.4}, W^sigma = {:.4}", wf.w, wf.f_sigma_eta, wf.w.powf(params.sigma));
        println!("  identity sides {lhs:.6} / {rhs:.6}");
        let gap = cylindrical_gap(&s, params.eta);
        println!("  |λ1| ≤ ηH: {}, gap = {:.4}", gap.hypothesis, gap.gap);
        if let Ok(c) = two_convexity_check(&s, params.epsilon) {
            println!("  two-convexity margin {:.4}, threshold met {}", c.margin, c.threshold_met);
        }
    }
}
