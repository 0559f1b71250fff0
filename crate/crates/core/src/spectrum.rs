//! Scalar functionals of a principal-curvature spectrum.
//!
//! Everything here is pure algebra on `λ_1 ≤ … ≤ λ_m`: the pinching quantity
//! `Q`, the weighted function `f_{σ,η}`, the Simons polynomial `Z`, the
//! two-convexity implication, the cylindrical gap and the dimension checks that
//! force `n ≥ 4`.

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};

/// Sorted principal curvatures together with their symmetric functions.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShapeSpectrum {
    lambdas: Vec<f64>,
    /// `H = Σ λ_i`.
    pub mean_curvature: f64,
    /// `|A|² = Σ λ_i²`.
    pub norm_a2: f64,
    /// `Σ λ_i³`.
    pub trace_a3: f64,
    /// `|Å|² = |A|² - H²/m`.
    pub norm_ao2: f64,
    /// `Z = H Σ λ_i³ - |A|⁴`, evaluated as `Σ_{i<j} λ_i λ_j (λ_i - λ_j)²`
    /// so that it stays accurate when `|A|⁴` is large.
    pub simons_z: f64,
}

impl ShapeSpectrum {
    /// Sorts `lambdas` ascending. At least three curvatures are required since
    /// every functional here divides by `m - 2`.
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() < 3 {
            return Err(Error::SpectrumTooShort {
                needed: 3,
                got: lambdas.len(),
            });
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter("non-finite principal curvature".into()));
        }
        lambdas.sort_by(f64::total_cmp);
        let m = lambdas.len() as f64;
        let mean_curvature: f64 = lambdas.iter().sum();
        let norm_a2: f64 = lambdas.iter().map(|l| l * l).sum();
        let trace_a3: f64 = lambdas.iter().map(|l| l * l * l).sum();
        let mut simons_z = 0.0;
        for (i, &a) in lambdas.iter().enumerate() {
            for &b in &lambdas[i + 1..] {
                simons_z += a * b * (a - b) * (a - b);
            }
        }
        Ok(ShapeSpectrum {
            norm_ao2: norm_a2 - mean_curvature * mean_curvature / m,
            simons_z,
            lambdas,
            mean_curvature,
            norm_a2,
            trace_a3,
        })
    }

    /// `m` copies of `t`.
    pub fn umbilic(m: usize, t: f64) -> Result<Self> {
        Self::new(vec![t; m])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn m(&self) -> usize {
        self.lambdas.len()
    }

    /// `(1/m) Σ_{i<j} (λ_i - λ_j)²`, the pairwise form of `|Å|²`.
    pub fn norm_ao2_pairwise(&self) -> f64 {
        let m = self.m();
        let mut acc = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                let d = self.lambdas[i] - self.lambdas[j];
                acc += d * d;
            }
        }
        acc / m as f64
    }

    /// Spectrum of the rescaled hypersurface, `λ ↦ s λ`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.lambdas.iter().map(|l| s * l).collect())
    }
}

/// How `α` is picked inside its admissible window.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum AlphaChoice {
    /// Midpoint of the window intersected with `[0, ∞)`.
    Midpoint,
    Value(f64),
}

/// Pinching constants for a hypersurface dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PinchingParams {
    pub m: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `a_ε = 1/(m - 2 + ε)`.
    pub a_eps: f64,
    /// `b_ε = 4(1 - ε)`.
    pub b_eps: f64,
}

impl PinchingParams {
    pub fn new(m: usize, epsilon: f64, eta: f64, sigma: f64, alpha: AlphaChoice) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidParameter(format!("m = {m} < 3")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} not in (0, 1)")));
        }
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta = {eta} must be positive")));
        }
        if !(0.0..1.0).contains(&sigma) {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} not in [0, 1)")));
        }
        let window = alpha_window(m, eta);
        let lo = window.lo.max(0.0);
        let alpha = match alpha {
            AlphaChoice::Midpoint => {
                if lo >= window.hi {
                    return Err(Error::InvalidParameter(format!(
                        "alpha window ({}, {}) has no non-negative point for m = {m}, eta = {eta}",
                        window.lo, window.hi
                    )));
                }
                0.5 * (lo + window.hi)
            }
            AlphaChoice::Value(v) => {
                if !(v > window.lo && v < window.hi && v >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "alpha = {v} outside [0, ∞) ∩ ({}, {})",
                        window.lo, window.hi
                    )));
                }
                v
            }
        };
        let b_eps = 4.0 * (1.0 - epsilon);
        Ok(PinchingParams {
            m,
            epsilon,
            eta,
            sigma,
            alpha,
            beta: b_eps,
            a_eps: 1.0 / (m as f64 - 2.0 + epsilon),
            b_eps,
        })
    }
}

/// `H > 0` and `|A|² < H²/(m-2) + 4`, strict.
pub fn pinched(spectrum: &ShapeSpectrum) -> bool {
    let h = spectrum.mean_curvature;
    let m = spectrum.m() as f64;
    h > 0.0 && spectrum.norm_a2 < h * h / (m - 2.0) + 4.0
}

/// `Q = |A|² - a_ε H² - b_ε`.
pub fn pinched_eps(spectrum: &ShapeSpectrum, params: &PinchingParams) -> f64 {
    q_value(spectrum, params.epsilon)
}

/// `Q` for a bare `ε`.
pub fn q_value(spectrum: &ShapeSpectrum, epsilon: f64) -> f64 {
    let m = spectrum.m() as f64;
    let h = spectrum.mean_curvature;
    spectrum.norm_a2 - h * h / (m - 2.0 + epsilon) - 4.0 * (1.0 - epsilon)
}

/// `H > 0` and `Q ≤ 0`: the preserved form of the pinching condition.
pub fn is_pinched_eps(spectrum: &ShapeSpectrum, epsilon: f64) -> bool {
    spectrum.mean_curvature > 0.0 && q_value(spectrum, epsilon) <= 0.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPinching {
    /// `W = α H² + β`.
    pub w: f64,
    /// `f_{0,η}`.
    pub f0: f64,
    /// `f_{σ,η} = (|A|² - (1/(m-1) + η) H²) / W^{1-σ}`.
    pub f_sigma_eta: f64,
}

pub fn w_and_f(spectrum: &ShapeSpectrum, params: &PinchingParams) -> Result<WeightedPinching> {
    let h2 = spectrum.mean_curvature * spectrum.mean_curvature;
    let m = spectrum.m() as f64;
    let w = params.alpha * h2 + params.beta;
    if !(w > 0.0) {
        return Err(Error::NonPositiveWeight(w));
    }
    let numerator = spectrum.norm_a2 - (1.0 / (m - 1.0) + params.eta) * h2;
    Ok(WeightedPinching {
        w,
        f0: numerator / w,
        f_sigma_eta: numerator / w.powf(1.0 - params.sigma),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoConvexity {
    /// `λ_1 + λ_2 - ε H / (4 (m - 2 + ε))`.
    pub margin: f64,
    /// `H² ≥ 8 (m - 2)(m - 2 + ε) / ε`.
    pub threshold_met: bool,
    pub bound_holds: bool,
}

/// Tolerance on the two-convexity margin.
pub const TWO_CONVEXITY_TOL: f64 = 1e-10;

/// Checks that pinching forces `λ_1 + λ_2 ≥ ε H / (4(m-2+ε))` once `H` is large.
pub fn two_convexity_check(spectrum: &ShapeSpectrum, epsilon: f64) -> Result<TwoConvexity> {
    if !is_pinched_eps(spectrum, epsilon) {
        return Err(Error::NotPinched(format!(
            "H = {}, Q = {}",
            spectrum.mean_curvature,
            q_value(spectrum, epsilon)
        )));
    }
    let m = spectrum.m() as f64;
    let h = spectrum.mean_curvature;
    let l = spectrum.lambdas();
    let margin = l[0] + l[1] - epsilon * h / (4.0 * (m - 2.0 + epsilon));
    let threshold_met = h * h >= 8.0 * (m - 2.0) * (m - 2.0 + epsilon) / epsilon;
    Ok(TwoConvexity {
        margin,
        threshold_met,
        bound_holds: !threshold_met || margin >= -TWO_CONVEXITY_TOL,
    })
}

/// Both sides of
/// `|A|² - H²/(m-1) = (1/(m-1)) (Σ_{1<i<j} (λ_i - λ_j)² + λ_1 (m λ_1 - 2H))`.
pub fn identity_2001_sides(spectrum: &ShapeSpectrum) -> (f64, f64) {
    let l = spectrum.lambdas();
    let m = l.len();
    let mf = m as f64;
    let h = spectrum.mean_curvature;
    let lhs = spectrum.norm_a2 - h * h / (mf - 1.0);
    let mut pairs = 0.0;
    for i in 1..m {
        for j in i + 1..m {
            let d = l[i] - l[j];
            pairs += d * d;
        }
    }
    let rhs = (pairs + l[0] * (mf * l[0] - 2.0 * h)) / (mf - 1.0);
    (lhs, rhs)
}

/// `|LHS - RHS|` of the identity above.
pub fn identity_2001_residual(spectrum: &ShapeSpectrum) -> f64 {
    let (lhs, rhs) = identity_2001_sides(spectrum);
    (lhs - rhs).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalGap {
    /// `|λ_1| ≤ η H`.
    pub hypothesis: bool,
    /// `max_{i,j ≥ 2} (λ_i - λ_j)²`.
    pub gap: f64,
}

pub fn cylindrical_gap(spectrum: &ShapeSpectrum, eta: f64) -> CylindricalGap {
    let l = spectrum.lambdas();
    let spread = l[l.len() - 1] - l[1];
    CylindricalGap {
        hypothesis: l[0].abs() <= eta * spectrum.mean_curvature,
        gap: spread * spread,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AlphaWindow {
    pub lo: f64,
    pub hi: f64,
    pub nonempty: bool,
}

/// `2/(m(m-2)) - η < α < 3/(m+2) - 1/(m-1) - η`.
pub fn alpha_window(m: usize, eta: f64) -> AlphaWindow {
    let mf = m as f64;
    let lo = 2.0 / (mf * (mf - 2.0)) - eta;
    let hi = 3.0 / (mf + 2.0) - 1.0 / (mf - 1.0) - eta;
    AlphaWindow {
        lo,
        hi,
        nonempty: lo < hi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DimensionGate {
    /// `2 b_ε - 4m < -4/a_ε`.
    pub ineq1: bool,
    /// `2 r̄ < 4/a_ε`.
    pub ineq2: bool,
    pub pass: bool,
}

/// The two reaction-term inequalities that make the pinching cone invariant.
pub fn dimension_gate(space: &AmbientSpace, epsilon: f64) -> DimensionGate {
    let m = space.m as f64;
    let inv_a = m - 2.0 + epsilon;
    let b = 4.0 * (1.0 - epsilon);
    let ineq1 = 2.0 * b - 4.0 * m < -4.0 * inv_a;
    let ineq2 = 2.0 * space.einstein < 4.0 * inv_a;
    DimensionGate {
        ineq1,
        ineq2,
        pass: ineq1 && ineq2,
    }
}
