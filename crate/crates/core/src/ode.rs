//! Embedded Runge–Kutta 5(4) pair of Dormand and Prince with adaptive steps.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-size control parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: 1e-4,
            min_step: 1e-300,
            max_steps: 5_000_000,
        }
    }
}

/// An accepted step: `t` and `y` are the values at the end of the step `h`.
#[derive(Debug, Clone, Copy)]
pub struct Accepted<const N: usize> {
    pub t: f64,
    pub h: f64,
    pub y: [f64; N],
}

/// Returned by the step observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Integrates `y' = f(t, y)` from `(t0, y0)`.
///
/// `max_step(t, y)` caps the next step; `observe` sees every accepted step and
/// may stop the integration. Steps that produce non-finite stages are retried
/// with a quarter of the step. Returns the number of accepted steps.
pub fn integrate<const N: usize, F, M, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    control: &StepControl,
    mut max_step: M,
    mut observe: O,
) -> Result<usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    M: FnMut(f64, &[f64; N]) -> f64,
    O: FnMut(&Accepted<N>) -> Control,
{
    let mut t = t0;
    let mut y = y0;
    let mut h = control.initial_step;
    let mut accepted = 0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut total = 0usize;
    loop {
        total += 1;
        if total > control.max_steps {
            return Err(Error::Integration(format!(
                "step budget of {} exhausted at t = {t}",
                control.max_steps
            )));
        }
        let cap = max_step(t, &y);
        if cap.is_finite() && cap > 0.0 {
            h = h.min(cap);
        }
        if h < control.min_step || h.is_nan() {
            return Err(Error::Integration(format!("step size underflow (h = {h:e}) at t = {t}")));
        }

        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        // stage 7 is evaluated at the fifth-order solution (FSAL)
        let mut y_new = y;
        for i in 0..N {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[6][j] * kj[i];
            }
            y_new[i] += h * acc;
        }
        let mut err: f64 = 0.0;
        let mut finite = true;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let scale = control.atol + control.rtol * y[i].abs().max(y_new[i].abs());
            let ratio = (e / scale).abs();
            if !ratio.is_finite() || !y_new[i].is_finite() {
                finite = false;
            }
            err = err.max(ratio);
        }
        if !finite {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            let step = h;
            t += step;
            y = y_new;
            k[0] = k[6];
            accepted += 1;
            let decision = observe(&Accepted { t, h: step, y });
            if decision == Control::Stop {
                return Ok(accepted);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= factor;
        }
    }
}

/// Integrates to the fixed end point `t1` and returns `y(t1)`.
pub fn solve_to<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, control: &StepControl) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if t1 == t0 {
        return Ok(y0);
    }
    let mut last = y0;
    let mut reached = false;
    integrate(
        f,
        t0,
        y0,
        control,
        |t, _| t1 - t,
        |acc| {
            last = acc.y;
            if acc.t >= t1 - 1e-15 * t1.abs().max(1.0) {
                reached = true;
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    if !reached {
        return Err(Error::Integration("did not reach the end point".into()));
    }
    Ok(last)
}
