//! Mean curvature flow of equivariant families.
//!
//! A geodesic sphere or tube of radius `r` moves with normal speed `H(r)`
//! towards its focal set, so the flow is the scalar ODE `dr/dt = -H(r)`.
//! The volume is carried along through `d(log μ)/dt = -H²`.

use crate::ambient::{curvature_coupling, CurvatureTensor};
use crate::error::{Error, Result};
use crate::ode::{integrate, Control, StepControl};
use crate::profiles::EquivariantFamily;
use crate::spectrum::{pinched_eps, w_and_f, PinchingParams, ShapeSpectrum};

/// When to stop integrating and how finely to resolve the blow-up.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StopPolicy {
    pub curvature_cap: f64,
    pub radius_floor: f64,
    pub time_cap: f64,
    /// Steps are capped by `resolution · r / H`.
    pub resolution: f64,
}

impl Default for StopPolicy {
    fn default() -> Self {
        StopPolicy {
            curvature_cap: 1e6,
            radius_floor: 1e-6,
            time_cap: f64::INFINITY,
            resolution: 2.5e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Termination {
    CurvatureCap,
    RadiusFloor,
    TimeCap,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FlowSample {
    pub t: f64,
    /// Exact step that produced this sample (0 for the initial sample). Kept
    /// because `t` itself loses resolution close to the singular time.
    pub dt: f64,
    pub r: f64,
    pub spectrum: ShapeSpectrum,
    pub q: f64,
    pub f_sigma_eta: f64,
    pub h: f64,
    pub norm_a2: f64,
    pub log_volume: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FlowTrajectory {
    pub family: EquivariantFamily,
    pub params: PinchingParams,
    pub samples: Vec<FlowSample>,
    pub t_singular_estimate: f64,
    pub termination: Termination,
}

impl FlowTrajectory {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectories hold the initial sample")
    }
}

fn sample(
    family: &EquivariantFamily,
    params: &PinchingParams,
    t: f64,
    dt: f64,
    r: f64,
    log_volume: f64,
) -> Result<FlowSample> {
    let spectrum = family.spectrum_at(r)?;
    let q = pinched_eps(&spectrum, params);
    let f_sigma_eta = w_and_f(&spectrum, params)?.f_sigma_eta;
    Ok(FlowSample {
        t,
        dt,
        r,
        q,
        f_sigma_eta,
        h: spectrum.mean_curvature,
        norm_a2: spectrum.norm_a2,
        spectrum,
        log_volume,
    })
}

/// Mean curvature without the domain check, `NaN` for `r ≤ 0` so that the
/// integrator rejects the step.
fn raw_mean_curvature(family: &EquivariantFamily, r: f64) -> f64 {
    if r <= 0.0 {
        return f64::NAN;
    }
    family
        .multiplicities
        .iter()
        .map(|&(class, count)| count as f64 * class.value(r))
        .sum()
}

/// Flows `family` from radius `r0` with the default step control.
pub fn evolve(
    family: &EquivariantFamily,
    r0: f64,
    params: &PinchingParams,
    stop: &StopPolicy,
) -> Result<FlowTrajectory> {
    evolve_with(family, r0, params, stop, &StepControl::default())
}

pub fn evolve_with(
    family: &EquivariantFamily,
    r0: f64,
    params: &PinchingParams,
    stop: &StopPolicy,
    control: &StepControl,
) -> Result<FlowTrajectory> {
    if params.m != family.space.m {
        return Err(Error::DimensionMismatch {
            expected: family.space.m,
            got: params.m,
        });
    }
    let h0 = family.mean_curvature_profile(r0)?;
    if !(h0 > 0.0) {
        return Err(Error::NonPositiveMeanCurvature(h0));
    }
    let mut samples = vec![sample(family, params, 0.0, 0.0, r0, 0.0)?];
    let mut termination = None;
    let mut failure = None;
    let mut t_acc = 0.0;

    let control = StepControl {
        initial_step: control.initial_step.min(stop.resolution * r0 / h0),
        ..*control
    };
    integrate(
        |_, y: &[f64; 2]| {
            let h = raw_mean_curvature(family, y[0]);
            [-h, -h * h]
        },
        0.0,
        [r0, 0.0],
        &control,
        |t, y| {
            let h = raw_mean_curvature(family, y[0]);
            let cap = stop.resolution * y[0] / h.abs();
            cap.min(stop.time_cap - t)
        },
        |acc| {
            t_acc += acc.h;
            let r = acc.y[0];
            if r <= stop.radius_floor || !family.contains(r) {
                termination = Some(Termination::RadiusFloor);
                return Control::Stop;
            }
            match sample(family, params, t_acc, acc.h, r, acc.y[1]) {
                Ok(s) => {
                    let h = s.h;
                    samples.push(s);
                    if h >= stop.curvature_cap {
                        termination = Some(Termination::CurvatureCap);
                        Control::Stop
                    } else if t_acc >= stop.time_cap {
                        termination = Some(Termination::TimeCap);
                        Control::Stop
                    } else {
                        Control::Continue
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    Control::Stop
                }
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let termination = termination.ok_or_else(|| Error::Integration("integration ended without a stop condition".into()))?;
    let t_singular_estimate = singular_time_estimate(&samples);
    Ok(FlowTrajectory {
        family: family.clone(),
        params: *params,
        samples,
        t_singular_estimate,
        termination,
    })
}

/// Least-squares fit of `t = T - κ r²` over the last decade of `H`.
fn singular_time_estimate(samples: &[FlowSample]) -> f64 {
    let h_last = samples.last().map(|s| s.h).unwrap_or(f64::NAN);
    let mut tail: Vec<&FlowSample> = samples.iter().filter(|s| s.h >= 0.1 * h_last).collect();
    if tail.len() < 3 {
        tail = samples.iter().collect();
    }
    let n = tail.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for s in &tail {
        let x = s.r * s.r;
        sx += x;
        sy += s.t;
        sxx += x * x;
        sxy += x * s.t;
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return samples.last().map(|s| s.t).unwrap_or(f64::NAN);
    }
    let slope = (n * sxy - sx * sy) / denom;
    (sy - slope * sx) / n
}

/// `H0 (1 - 2 H0² t / m)^{-1/2}`, the solution of `h' = h³/m` with `h(0) = H0`.
pub fn comparison_lower_bound(h0: f64, m: usize, t: f64) -> Result<f64> {
    if !(h0 > 0.0) {
        return Err(Error::InvalidParameter(format!("H0 = {h0} must be positive")));
    }
    let blowup = m as f64 / (2.0 * h0 * h0);
    if t >= blowup {
        return Err(Error::BeyondBlowup { t, blowup });
    }
    Ok(h0 / (1.0 - t / blowup).sqrt())
}

pub const GRAD_RESOLVED_MAGNITUDE: f64 = 1e8;

/// Relative residuals of the evolution equations along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Residuals {
    /// `max |dH/dt - H(|A|² + r̄)| / (1 + |dH/dt|)`.
    pub res_h: f64,
    /// `max |d|A|²/dt - (2|A|²(|A|² + r̄) - 4T - 2|∇A|²)| / (1 + |d|A|²/dt|)`.
    pub res_a2: f64,
    /// `max |d(log μ)/dt + H²| / (1 + H²)`.
    pub res_vol: f64,
    /// Range of `|∇A|² = -Z - N - 2T` (Simons' identity with `Δ|A|² = 0`)
    /// over samples where `|Z| + |N| + 2|T| ≤` [`GRAD_RESOLVED_MAGNITUDE`].
    /// Beyond that the three terms cancel to below double precision.
    pub grad_a2_min: f64,
    pub grad_a2_max: f64,
}

/// Second-order derivative estimate at the middle of three unevenly spaced
/// samples, from the step lengths `h1 = t_k - t_{k-1}` and `h2 = t_{k+1} - t_k`.
pub fn central_difference(prev: f64, mid: f64, next: f64, h1: f64, h2: f64) -> f64 {
    (h1 * h1 * next - h2 * h2 * prev + (h2 * h2 - h1 * h1) * mid) / (h1 * h2 * (h1 + h2))
}

/// Checks the evolution equations for `H`, `|A|²` and `dμ` by central
/// differences of the stored samples.
///
/// The hypersurfaces are homogeneous, so `ΔH = Δ|A|² = 0`. They are not
/// parallel: `|∇A|²` is taken from Simons' identity,
/// `0 = 2|∇A|² + 2Z + 2N + 4T`, with `T`, `N` the tangential and normal
/// curvature couplings contracted from the full tensor in the adapted frame.
pub fn evolution_residuals(trajectory: &FlowTrajectory, tensor: &CurvatureTensor) -> Result<Residuals> {
    let s = &trajectory.samples;
    if s.len() < 3 {
        return Err(Error::InsufficientSamples(s.len()));
    }
    let family = &trajectory.family;
    if tensor.space != family.space {
        return Err(Error::DimensionMismatch {
            expected: family.space.dim(),
            got: tensor.dim,
        });
    }
    let einstein = family.space.einstein;
    let mut out = Residuals {
        res_h: 0.0,
        res_a2: 0.0,
        res_vol: 0.0,
        grad_a2_min: f64::INFINITY,
        grad_a2_max: f64::NEG_INFINITY,
    };
    for k in 1..s.len() - 1 {
        let (a, b, c) = (&s[k - 1], &s[k], &s[k + 1]);
        let (h1, h2) = (b.dt, c.dt);

        let dh = central_difference(a.h, b.h, c.h, h1, h2);
        let rhs_h = b.h * (b.norm_a2 + einstein);
        out.res_h = out.res_h.max((dh - rhs_h).abs() / (1.0 + dh.abs()));

        let coupling = curvature_coupling(tensor, &family.adapted_frame(b.r)?)?;
        let grad_a2 = -b.spectrum.simons_z - coupling.normal - 2.0 * coupling.tangential;
        let magnitude = b.spectrum.simons_z.abs() + coupling.normal.abs() + 2.0 * coupling.tangential.abs();
        if magnitude <= GRAD_RESOLVED_MAGNITUDE {
            out.grad_a2_min = out.grad_a2_min.min(grad_a2);
            out.grad_a2_max = out.grad_a2_max.max(grad_a2);
        }
        let da2 = central_difference(a.norm_a2, b.norm_a2, c.norm_a2, h1, h2);
        let rhs_a2 = 2.0 * b.norm_a2 * (b.norm_a2 + einstein) - 4.0 * coupling.tangential - 2.0 * grad_a2;
        out.res_a2 = out.res_a2.max((da2 - rhs_a2).abs() / (1.0 + da2.abs()));

        let dvol = central_difference(a.log_volume, b.log_volume, c.log_volume, h1, h2);
        out.res_vol = out.res_vol.max((dvol + b.h * b.h).abs() / (1.0 + b.h * b.h));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub h: f64,
    pub value: f64,
}

/// Pinching and cylindrical monitors along a trajectory.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MonitorSummary {
    pub q_initial: f64,
    pub max_q: f64,
    /// Smallest `C'` with `|A|² - H²/(m-1) ≤ η H² + C'` on every sample.
    pub c_prime: f64,
    /// `|λ_1| / H`.
    pub lambda1_ratio: Vec<TracePoint>,
    /// `max_{i,j≥2} (λ_i - λ_j)² / H²`.
    pub gap_ratio: Vec<TracePoint>,
    /// `λ_1 + λ_2 - ε H / (4(m - 2 + ε))`.
    pub two_convexity_margin: Vec<TracePoint>,
    /// `|A|² / H²` at the last sample.
    pub final_norm_ratio: f64,
}

pub fn monitor_report(trajectory: &FlowTrajectory, params: &PinchingParams) -> MonitorSummary {
    let m = trajectory.family.space.m as f64;
    let mut summary = MonitorSummary {
        q_initial: trajectory.samples[0].q,
        max_q: f64::NEG_INFINITY,
        c_prime: f64::NEG_INFINITY,
        lambda1_ratio: Vec::with_capacity(trajectory.samples.len()),
        gap_ratio: Vec::with_capacity(trajectory.samples.len()),
        two_convexity_margin: Vec::with_capacity(trajectory.samples.len()),
        final_norm_ratio: f64::NAN,
    };
    for s in &trajectory.samples {
        let l = s.spectrum.lambdas();
        let h2 = s.h * s.h;
        summary.max_q = summary.max_q.max(pinched_eps(&s.spectrum, params));
        summary.c_prime = summary.c_prime.max(s.norm_a2 - h2 / (m - 1.0) - params.eta * h2);
        let point = |value| TracePoint { t: s.t, h: s.h, value };
        summary.lambda1_ratio.push(point(l[0].abs() / s.h));
        summary.gap_ratio.push(point(gap_ratio(&s.spectrum)));
        summary.two_convexity_margin.push(point(
            l[0] + l[1] - params.epsilon * s.h / (4.0 * (m - 2.0 + params.epsilon)),
        ));
    }
    let last = trajectory.last();
    summary.final_norm_ratio = last.norm_a2 / (last.h * last.h);
    summary
}

/// `max_{i,j≥2} (λ_i - λ_j)² / H²`.
pub fn gap_ratio(spectrum: &ShapeSpectrum) -> f64 {
    let l = spectrum.lambdas();
    let spread = l[l.len() - 1] - l[1];
    spread * spread / (spectrum.mean_curvature * spectrum.mean_curvature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{curvature_tensor, make_space, Field};
    use crate::spectrum::AlphaChoice;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn params(m: usize) -> PinchingParams {
        PinchingParams::new(m, 0.01, 0.01, 0.01, AlphaChoice::Midpoint).unwrap()
    }

    #[test]
    fn comparison_bound_values() {
        assert_eq!(comparison_lower_bound(6.0, 7, 0.0).unwrap(), 6.0);
        assert_relative_eq!(
            comparison_lower_bound(6.0, 7, 7.0 / 144.0).unwrap(),
            6.0 * 2f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(matches!(
            comparison_lower_bound(6.0, 7, 7.0 / 72.0),
            Err(Error::BeyondBlowup { .. })
        ));
    }

    #[test]
    fn central_difference_is_exact_on_quadratics() {
        let f = |t: f64| 3.0 * t * t - 2.0 * t + 1.0;
        let (t0, h1, h2) = (0.4, 0.013, 0.029);
        let d = central_difference(f(t0 - h1), f(t0), f(t0 + h2), h1, h2);
        assert_relative_eq!(d, 6.0 * t0 - 2.0, epsilon = 1e-11);
    }

    #[test]
    fn sphere_flow_collapses() {
        let space = make_space(Field::Complex, 4).unwrap();
        let fam = EquivariantFamily::sphere(space);
        let traj = evolve(&fam, FRAC_PI_4, &params(7), &StopPolicy::default()).unwrap();
        assert_eq!(traj.termination, Termination::CurvatureCap);
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t && w[1].r < w[0].r));
        assert!(traj.t_singular_estimate <= 7.0 / 72.0);
        assert!(traj.t_singular_estimate >= traj.last().t);
    }

    #[test]
    fn rejects_non_mean_convex_start() {
        let space = make_space(Field::Complex, 4).unwrap();
        let fam = EquivariantFamily::sphere(space);
        assert!(matches!(
            evolve(&fam, 1.5, &params(7), &StopPolicy::default()),
            Err(Error::NonPositiveMeanCurvature(_))
        ));
    }

    #[test]
    fn volume_matches_jacobi_fields() {
        let space = make_space(Field::Quaternionic, 4).unwrap();
        let fam = EquivariantFamily::tube(space, 1).unwrap();
        let stop = StopPolicy {
            curvature_cap: 1e3,
            ..StopPolicy::default()
        };
        let traj = evolve(&fam, 0.4, &params(15), &stop).unwrap();
        let base = fam.log_volume(0.4).unwrap();
        for s in traj.samples.iter().step_by(97) {
            let closed = fam.log_volume(s.r).unwrap() - base;
            assert!((s.log_volume - closed).abs() <= 1e-8 * (1.0 + closed.abs()));
        }
    }

    #[test]
    fn residuals_need_samples() {
        let space = make_space(Field::Complex, 4).unwrap();
        let fam = EquivariantFamily::sphere(space);
        let mut traj = evolve(
            &fam,
            FRAC_PI_4,
            &params(7),
            &StopPolicy {
                curvature_cap: 50.0,
                ..StopPolicy::default()
            },
        )
        .unwrap();
        traj.samples.truncate(2);
        let tensor = curvature_tensor(&space);
        assert_eq!(evolution_residuals(&traj, &tensor), Err(Error::InsufficientSamples(2)));
    }

    #[test]
    fn gradient_norm_of_cp_families_is_two_m_minus_two() {
        // |∇A|² = 2(m-1) on Hopf hypersurfaces of CP^n with these spectra
        let space = make_space(Field::Complex, 4).unwrap();
        let tensor = curvature_tensor(&space);
        for fam in [EquivariantFamily::sphere(space), EquivariantFamily::tube(space, 1).unwrap()] {
            // Z, N and T grow like H⁴, so the difference is only resolved at moderate H
            let stop = StopPolicy {
                curvature_cap: 30.0,
                ..StopPolicy::default()
            };
            let traj = evolve(&fam, 0.5, &params(7), &stop).unwrap();
            let res = evolution_residuals(&traj, &tensor).unwrap();
            assert!((res.grad_a2_min - 12.0).abs() < 1e-8, "{res:?}");
            assert!((res.grad_a2_max - 12.0).abs() < 1e-8, "{res:?}");
        }
    }
}
