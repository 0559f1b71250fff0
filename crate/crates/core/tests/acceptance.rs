//! Acceptance criteria. Every test prints one `PASS`/`FAIL` line and then
//! asserts the criterion together with its runtime budget.

use std::f64::consts::FRAC_PI_4;
use std::time::{Duration, Instant};

use kpflow::ambient::{curvature_tensor, make_space, AmbientSpace, Field};
use kpflow::flow::{comparison_lower_bound, evolution_residuals, evolve, gap_ratio, StopPolicy};
use kpflow::lab::{
    certify_f_bound, certify_identity_2001, certify_norm_ao2, certify_stima_i, certify_two_convexity,
    is_negative_z_witness, stima_i_umbilic, witness_negative_z_search, ParamsGrid,
};
use kpflow::profiles::{radial_riccati_oracle, EquivariantFamily, DOMAIN_MARGIN};
use kpflow::spectrum::{alpha_window, dimension_gate, AlphaChoice, PinchingParams, ShapeSpectrum};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;
const EPSILONS: [f64; 3] = [1e-3, 1e-2, 1e-1];

fn verdict(id: u32, pass: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let ok = pass && elapsed < budget;
    println!(
        "criterion {id:>2}: {} ({:.3} s of {:.0} s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(elapsed < budget, "criterion {id} exceeded its runtime budget");
}

fn cp4() -> AmbientSpace {
    make_space(Field::Complex, 4).unwrap()
}

fn hp4() -> AmbientSpace {
    make_space(Field::Quaternionic, 4).unwrap()
}

#[test]
fn criterion_01_einstein_constants() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for (space, expected) in [(cp4(), 10.0), (hp4(), 24.0)] {
        let ricci = curvature_tensor(&space).ricci();
        let d = space.dim();
        let mut err: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { expected } else { 0.0 };
                err = err.max((ricci[(i, j)] - target).abs());
            }
        }
        worst = worst.max(err);
        detail += &format!("{}: r̄ = {expected}, max |Ric - r̄ g| = {err:.1e}; ", space.label());
    }
    verdict(1, worst <= 1e-12, start.elapsed(), Duration::from_secs(1), &detail);
}

#[test]
fn criterion_02_sectional_range() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pass = true;
    let mut detail = String::new();
    for space in [cp4(), hp4()] {
        let tensor = curvature_tensor(&space);
        let d = space.dim();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..10_000 {
            let x = kpflow::ambient::gaussian_vector(d, &mut rng);
            let mut y = kpflow::ambient::gaussian_vector(d, &mut rng);
            let xn = x.normalize();
            y -= &xn * xn.dot(&y);
            let k = tensor.sectional_curvature(&xn, &y.normalize()).unwrap();
            lo = lo.min(k);
            hi = hi.max(k);
        }
        pass &= lo >= 1.0 - 1e-10 && hi <= 4.0 + 1e-10;

        let e = |i: usize| DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
        let j_aligned = &tensor.structures()[0] * e(0);
        let aligned = tensor.sectional_curvature(&e(0), &j_aligned).unwrap();
        // first coordinate of the next block is orthogonal to every J_s e_0
        let orthogonal = tensor.sectional_curvature(&e(0), &e(space.a)).unwrap();
        pass &= (aligned - 4.0).abs() <= 1e-10 && (orthogonal - 1.0).abs() <= 1e-10;
        detail += &format!(
            "{}: sampled [{lo:.6}, {hi:.6}], J-aligned {aligned}, J-orthogonal {orthogonal}; ",
            space.label()
        );
    }
    verdict(2, pass, start.elapsed(), Duration::from_secs(5), &detail);
}

#[test]
fn criterion_03_stima_i() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for space in [cp4(), hp4()] {
        let r = certify_stima_i(&space, 100_000, SEED);
        let u = stima_i_umbilic(&space, 1000, SEED);
        pass &= r.trials == 100_000 && r.violations == 0 && r.min_slack >= -1e-9;
        pass &= u.violations == 0 && u.min_slack >= -1e-10;
        detail += &format!(
            "{}: {} trials, {} violations, min slack {:.3e}, umbilic |slack| ≤ {:.1e}; ",
            space.label(),
            r.trials,
            r.violations,
            r.min_slack,
            -u.min_slack
        );
    }
    verdict(3, pass, start.elapsed(), Duration::from_secs(60), &detail);
}

#[test]
fn criterion_04_dimension_gate() {
    let start = Instant::now();
    let mut pass = true;
    let mut rows = Vec::new();
    for field in [Field::Complex, Field::Quaternionic] {
        for n in 3..=6 {
            let space = make_space(field, n).unwrap();
            for eps in EPSILONS {
                let gate = dimension_gate(&space, eps);
                pass &= gate.pass == (n >= 4);
                if eps == EPSILONS[1] {
                    rows.push(format!("{}:{}", space.label(), gate.pass));
                }
            }
        }
    }
    verdict(4, pass, start.elapsed(), Duration::from_secs(1), &rows.join(" "));
}

#[test]
fn criterion_05_alpha_window() {
    let start = Instant::now();
    let empty: Vec<usize> = (4..=50).filter(|&m| !alpha_window(m, 0.0).nonempty).collect();
    let w7 = alpha_window(7, 0.0);
    let exact = (w7.lo - 2.0 / 35.0).abs() <= 1e-15 && (w7.hi - 1.0 / 6.0).abs() <= 1e-15;
    let w4 = alpha_window(4, 0.0);
    let detail = format!(
        "m = 7: lo = {}, hi = {}; empty for m in {empty:?} (m = 4: lo = {}, hi = {})",
        w7.lo, w7.hi, w4.lo, w4.hi
    );
    verdict(5, exact && empty.is_empty(), start.elapsed(), Duration::from_secs(1), &detail);
}

#[test]
fn criterion_06_spectral_identities() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for m in [7, 15] {
        let a = certify_identity_2001(m, 100_000, SEED);
        let b = certify_norm_ao2(m, 100_000, SEED);
        pass &= a.violations == 0 && b.violations == 0 && a.min_slack >= -1e-10 && b.min_slack >= -1e-10;
        detail += &format!(
            "m = {m}: identity residual ≤ {:.1e}, |Å|² residual ≤ {:.1e}; ",
            -a.min_slack, -b.min_slack
        );
    }
    verdict(6, pass, start.elapsed(), Duration::from_secs(10), &detail);
}

#[test]
fn criterion_07_two_convexity() {
    let start = Instant::now();
    let r = certify_two_convexity(7, 1e-2, 1_000_000, SEED);
    let pass = r.trials == 1_000_000 && r.violations == 0 && r.min_slack >= -1e-10;
    let detail = format!("m = 7, ε = 0.01: {} samples, min margin {:.3e}", r.trials, r.min_slack);
    verdict(7, pass, start.elapsed(), Duration::from_secs(60), &detail);
}

#[test]
fn criterion_08_f_below_w_sigma() {
    let start = Instant::now();
    let grid = ParamsGrid::default();
    let points = grid.epsilons.len() * grid.etas.len() * grid.sigmas.len();
    let per_point = 100_000u64.div_ceil(points as u64);
    let (mut trials, mut violations, mut min_slack) = (0, 0, f64::INFINITY);
    for m in [7, 15] {
        for &eps in &grid.epsilons {
            for &eta in &grid.etas {
                for &sigma in &grid.sigmas {
                    let params = PinchingParams::new(m, eps, eta, sigma, AlphaChoice::Midpoint).unwrap();
                    let r = certify_f_bound(&params, per_point, SEED);
                    trials += r.trials;
                    violations += r.violations;
                    min_slack = min_slack.min(r.min_slack);
                }
            }
        }
    }
    let pass = trials >= 100_000 && violations == 0 && min_slack >= -1e-10;
    let detail = format!("{trials} samples with Q ≤ 0, {violations} violations, min slack {min_slack:.3e}");
    verdict(8, pass, start.elapsed(), Duration::from_secs(10), &detail);
}

#[test]
fn criterion_09_negative_z() {
    let start = Instant::now();
    let mut l = vec![0.2; 6];
    l.push(-1.0);
    let hand = ShapeSpectrum::new(l).unwrap();
    let hand_ok = kpflow::spectrum::pinched(&hand)
        && is_negative_z_witness(&hand, 1e-2)
        && (hand.simons_z + 1.728).abs() < 1e-12
        && !is_negative_z_witness(&ShapeSpectrum::umbilic(7, 1.0).unwrap(), 1e-2);
    let mut pass = hand_ok;
    let mut detail = format!("hand witness Z = {:.6}; ", hand.simons_z);
    for m in [7, 15] {
        match witness_negative_z_search(m, 1e-2, 10_000, SEED) {
            Some((s, used)) => detail += &format!("m = {m}: Z = {:.4} after {used} samples; ", s.simons_z),
            None => {
                pass = false;
                detail += &format!("m = {m}: no witness; ");
            }
        }
    }
    verdict(9, pass, start.elapsed(), Duration::from_secs(5), &detail);
}

fn all_families() -> Vec<EquivariantFamily> {
    let mut out = Vec::new();
    for (field, ns) in [(Field::Complex, 2..=6), (Field::Quaternionic, 2..=5)] {
        for n in ns {
            let space = make_space(field, n).unwrap();
            out.push(EquivariantFamily::sphere(space));
            for k in 1..n {
                out.push(EquivariantFamily::tube(space, k).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_10_profiles() {
    let start = Instant::now();
    let (lo, hi) = (DOMAIN_MARGIN, std::f64::consts::FRAC_PI_2 - DOMAIN_MARGIN);
    let mut profile_err: f64 = 0.0;
    let families = all_families();
    for fam in &families {
        for i in 0..1000 {
            let r = lo + (hi - lo) * (i as f64 + 0.5) / 1000.0;
            let s = fam.spectrum_at(r).unwrap();
            let rhs = s.norm_a2 + fam.space.einstein;
            let lhs = -fam.dh_dr(r).unwrap();
            profile_err = profile_err.max((lhs - rhs).abs() / rhs.abs());
        }
    }
    let mut riccati_err: f64 = 0.0;
    for fam in &families[..4] {
        for &(class, _) in &fam.multiplicities {
            for i in 0..40 {
                let r = 0.01 + (hi - 0.02) * i as f64 / 40.0;
                let oracle = radial_riccati_oracle(class.radial_curvature(), r, class.initial_condition()).unwrap();
                let closed = class.value(r);
                riccati_err = riccati_err.max((oracle - closed).abs() / closed.abs().max(1.0));
            }
        }
    }
    let pass = profile_err <= 1e-10 && riccati_err <= 1e-8;
    let detail = format!(
        "{} families: profile rel err {profile_err:.1e}, Riccati err {riccati_err:.1e}",
        families.len()
    );
    verdict(10, pass, start.elapsed(), Duration::from_secs(10), &detail);
}

#[test]
fn criterion_11_sphere_flow() {
    let start = Instant::now();
    let space = cp4();
    let fam = EquivariantFamily::sphere(space);
    let params = PinchingParams::new(7, 1e-2, 1e-2, 1e-2, AlphaChoice::Midpoint).unwrap();
    let traj = evolve(&fam, FRAC_PI_4, &params, &StopPolicy::default()).unwrap();
    let h0 = traj.samples[0].h;

    let mut comparison_gap = f64::INFINITY;
    let mut comparison_ok = true;
    for s in &traj.samples {
        match comparison_lower_bound(h0, 7, s.t) {
            Ok(bound) => comparison_gap = comparison_gap.min(s.h - bound),
            Err(_) => comparison_ok = false,
        }
    }
    let a = comparison_ok && comparison_gap >= -1e-8;
    let b = traj.t_singular_estimate <= 7.0 / 72.0;
    let q0 = traj.samples[0].q;
    let max_q = traj.samples.iter().map(|s| s.q).fold(f64::NEG_INFINITY, f64::max);
    let c = q0 < 0.0 && max_q <= 1e-10;
    let res = evolution_residuals(&traj, &curvature_tensor(&space)).unwrap();
    let d = res.res_h <= 1e-6 && res.res_a2 <= 1e-6 && res.res_vol <= 1e-6;
    let detail = format!(
        "H(0) = {h0}, {} samples to H = {:.3e}; (a) min H - bound {comparison_gap:.3e}; (b) T ≈ {:.10} vs {:.10}; \
         (c) Q(0) = {q0:.4}, max Q = {max_q:.3e}; (d) resH {:.1e}, resA2 {:.1e}, resVol {:.1e}",
        traj.samples.len(),
        traj.last().h,
        traj.t_singular_estimate,
        7.0 / 72.0,
        res.res_h,
        res.res_a2,
        res.res_vol
    );
    verdict(11, a && b && c && d, start.elapsed(), Duration::from_secs(30), &detail);
}

#[test]
fn criterion_12_cylindrical_regime() {
    let start = Instant::now();
    let space = cp4();
    let fam = EquivariantFamily::tube(space, 1).unwrap();
    let params = PinchingParams::new(7, 1e-2, 1e-2, 1e-2, AlphaChoice::Midpoint).unwrap();
    let traj = evolve(&fam, 0.3, &params, &StopPolicy::default()).unwrap();
    let late: Vec<_> = traj.samples.iter().filter(|s| s.h >= 1e3).collect();
    let lambda1 = late
        .iter()
        .map(|s| s.spectrum.lambdas()[0].abs() / s.h)
        .fold(0.0, f64::max);
    let gap = late.iter().map(|s| gap_ratio(&s.spectrum)).fold(0.0, f64::max);
    let pass = !late.is_empty() && lambda1 <= 1e-3 && gap <= 1e-4;
    let detail = format!(
        "{} samples with H ≥ 1e3 (final H = {:.3e}): max |λ1|/H = {lambda1:.3e}, max gap ratio = {gap:.3e}",
        late.len(),
        traj.last().h
    );
    verdict(12, pass, start.elapsed(), Duration::from_secs(30), &detail);
}
