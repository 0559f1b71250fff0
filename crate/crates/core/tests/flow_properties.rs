use kpflow::ambient::{curvature_tensor, make_space, Field};
use kpflow::flow::{comparison_lower_bound, evolution_residuals, evolve, monitor_report, StopPolicy, Termination};
use kpflow::profiles::{pinched_interval, EquivariantFamily};
use kpflow::spectrum::{AlphaChoice, PinchingParams};

fn params(m: usize) -> PinchingParams {
    PinchingParams::new(m, 1e-2, 1e-2, 1e-2, AlphaChoice::Midpoint).unwrap()
}

fn capped(cap: f64) -> StopPolicy {
    StopPolicy {
        curvature_cap: cap,
        ..StopPolicy::default()
    }
}

fn families() -> Vec<EquivariantFamily> {
    let mut out = Vec::new();
    for (field, n) in [(Field::Complex, 4), (Field::Complex, 5), (Field::Quaternionic, 4)] {
        let space = make_space(field, n).unwrap();
        out.push(EquivariantFamily::sphere(space));
        for k in 1..n {
            out.push(EquivariantFamily::tube(space, k).unwrap());
        }
    }
    out
}

#[test]
fn trajectories_are_monotone_and_beat_the_comparison_solution() {
    for fam in families() {
        let m = fam.space.m;
        let traj = evolve(&fam, 0.1, &params(m), &capped(1e5)).unwrap();
        assert_eq!(traj.termination, Termination::CurvatureCap, "{}", fam.label());
        let h0 = traj.samples[0].h;
        for w in traj.samples.windows(2) {
            assert!(w[1].t > w[0].t && w[1].r < w[0].r && w[1].h > 0.0);
        }
        for s in &traj.samples {
            let bound = comparison_lower_bound(h0, m, s.t).unwrap();
            assert!(s.h >= bound - 1e-8, "{}: H = {} < {bound}", fam.label(), s.h);
        }
        assert!(traj.t_singular_estimate <= m as f64 / (2.0 * h0 * h0) + 1e-8);
    }
}

#[test]
fn pinching_is_preserved_from_pinched_radii() {
    for fam in families() {
        let m = fam.space.m;
        for (a, b) in pinched_interval(&fam, 1e-2, 400) {
            for r0 in [a + 0.25 * (b - a), 0.5 * (a + b), a + 0.75 * (b - a)] {
                let traj = evolve(&fam, r0, &params(m), &capped(1e5)).unwrap();
                let summary = monitor_report(&traj, &traj.params);
                assert!(summary.q_initial < 0.0);
                assert!(summary.max_q <= 1e-10, "{} from r0 = {r0}: max Q = {}", fam.label(), summary.max_q);
            }
        }
    }
}

#[test]
fn geodesic_spheres_are_pinched_near_the_centre() {
    for space in [make_space(Field::Complex, 4).unwrap(), make_space(Field::Quaternionic, 4).unwrap()] {
        let intervals = pinched_interval(&EquivariantFamily::sphere(space), 1e-2, 400);
        assert!(!intervals.is_empty());
        assert!(intervals[0].0 < 1e-5);
    }
}

#[test]
fn residuals_vanish_on_every_family() {
    for fam in families() {
        let m = fam.space.m;
        let traj = evolve(&fam, 0.1, &params(m), &capped(1e4)).unwrap();
        let res = evolution_residuals(&traj, &curvature_tensor(&fam.space)).unwrap();
        assert!(res.res_h <= 1e-6, "{}: {res:?}", fam.label());
        assert!(res.res_a2 <= 1e-6, "{}: {res:?}", fam.label());
        assert!(res.res_vol <= 1e-6, "{}: {res:?}", fam.label());
        assert!(res.grad_a2_min >= -1e-6, "{}: {res:?}", fam.label());
        if fam.space.field == Field::Complex {
            let expected = 2.0 * (m as f64 - 1.0);
            assert!((res.grad_a2_min - expected).abs() < 1e-6, "{}: {res:?}", fam.label());
            assert!((res.grad_a2_max - expected).abs() < 1e-6, "{}: {res:?}", fam.label());
        }
    }
}

#[test]
fn halving_the_step_reduces_the_mean_curvature_residual_fourfold() {
    let space = make_space(Field::Complex, 4).unwrap();
    let fam = EquivariantFamily::sphere(space);
    let tensor = curvature_tensor(&space);
    let res = |resolution: f64| {
        let stop = StopPolicy {
            curvature_cap: 1e4,
            resolution,
            ..StopPolicy::default()
        };
        let traj = evolve(&fam, std::f64::consts::FRAC_PI_4, &params(7), &stop).unwrap();
        evolution_residuals(&traj, &tensor).unwrap().res_h
    };
    let coarse = res(2e-3);
    let fine = res(1e-3);
    println!("resH {coarse:e} -> {fine:e}, ratio {}", coarse / fine);
    assert!(coarse / fine >= 4.0, "ratio {}", coarse / fine);
}

#[test]
fn shrinking_sphere_becomes_umbilic() {
    let space = make_space(Field::Complex, 4).unwrap();
    let traj = evolve(&EquivariantFamily::sphere(space), 1.0, &params(7), &StopPolicy::default()).unwrap();
    for s in traj.samples.iter().filter(|s| s.h >= 1e3) {
        assert!((s.norm_a2 / (s.h * s.h) - 1.0 / 7.0).abs() <= 1e-3);
    }
}

#[test]
fn time_cap_stops_early() {
    let space = make_space(Field::Quaternionic, 3).unwrap();
    let stop = StopPolicy {
        time_cap: 1e-3,
        ..StopPolicy::default()
    };
    let traj = evolve(&EquivariantFamily::sphere(space), 0.7, &params(11), &stop).unwrap();
    assert_eq!(traj.termination, Termination::TimeCap);
    assert!((traj.last().t - 1e-3).abs() < 1e-12);
}
