//! Homogeneous Hopf hypersurfaces of `KP^n`: geodesic spheres and tubes around
//! totally geodesic `KP^k`.
//!
//! Along a normal geodesic each principal curvature solves the Riccati equation
//! `s' = -(s² + K)` with `K` the ambient curvature of the plane spanned by the
//! normal and the principal direction. With the initial behaviour of a sphere
//! cap or a totally geodesic core this gives three branches:
//!
//! | branch          | `K` | start          | profile      |
//! |-----------------|-----|----------------|--------------|
//! | `Spherical`     | 1   | `s ~ 1/r`      | `cot r`      |
//! | `CoreTangent`   | 1   | `s(0) = 0`     | `-tan r`     |
//! | `Hopf`          | 4   | `s ~ 1/r`      | `2 cot 2r`   |
//!
//! [`radial_riccati_oracle`] integrates the equation directly so the closed
//! forms can be checked against it.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::ambient::{AmbientSpace, FrameConfig};
use crate::error::{Error, Result};
use crate::ode::{integrate, Control, StepControl};
use crate::spectrum::{is_pinched_eps, q_value, ShapeSpectrum};

/// Distance kept from the focal radii `0` and `π/2`.
pub const DOMAIN_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PrincipalClass {
    /// `cot r`: directions orthogonal to `ν K` reached from a point or
    /// normal to the core.
    Spherical,
    /// `-tan r`: directions parallel to the core.
    CoreTangent,
    /// `2 cot 2r`: the structure directions `J_s ν`.
    Hopf,
}

impl PrincipalClass {
    pub fn value(self, r: f64) -> f64 {
        match self {
            PrincipalClass::Spherical => 1.0 / r.tan(),
            PrincipalClass::CoreTangent => -r.tan(),
            PrincipalClass::Hopf => 2.0 / (2.0 * r).tan(),
        }
    }

    /// `d/dr` of [`value`](Self::value).
    pub fn derivative(self, r: f64) -> f64 {
        match self {
            PrincipalClass::Spherical => -1.0 / r.sin().powi(2),
            PrincipalClass::CoreTangent => -1.0 / r.cos().powi(2),
            PrincipalClass::Hopf => -4.0 / (2.0 * r).sin().powi(2),
        }
    }

    /// Ambient sectional curvature of the plane `(ν, e)`.
    pub fn radial_curvature(self) -> f64 {
        match self {
            PrincipalClass::Hopf => 4.0,
            _ => 1.0,
        }
    }

    /// Log-length of the Jacobi field whose logarithmic derivative is the
    /// principal curvature.
    pub fn log_jacobi(self, r: f64) -> f64 {
        match self {
            PrincipalClass::Spherical => r.sin().ln(),
            PrincipalClass::CoreTangent => r.cos().ln(),
            PrincipalClass::Hopf => (0.5 * (2.0 * r).sin()).ln(),
        }
    }

    pub fn initial_condition(self) -> RiccatiStart {
        match self {
            PrincipalClass::CoreTangent => RiccatiStart::FocalCore,
            _ => RiccatiStart::SphereCap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FamilyKind {
    GeodesicSphere,
    /// Tube around a totally geodesic `KP^k`, `0 < k < n`.
    TubeAroundKPk(usize),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EquivariantFamily {
    pub space: AmbientSpace,
    pub kind: FamilyKind,
    pub r_domain: (f64, f64),
    /// Principal classes in frame order with their multiplicities.
    pub multiplicities: Vec<(PrincipalClass, usize)>,
}

impl EquivariantFamily {
    pub fn new(space: AmbientSpace, kind: FamilyKind) -> Result<Self> {
        let a = space.a;
        let n = space.n;
        let multiplicities = match kind {
            FamilyKind::GeodesicSphere => vec![
                (PrincipalClass::Hopf, a - 1),
                (PrincipalClass::Spherical, space.m - a + 1),
            ],
            FamilyKind::TubeAroundKPk(k) => {
                if k == 0 || k >= n {
                    return Err(Error::InvalidParameter(format!(
                        "tube core dimension k = {k} must satisfy 0 < k < n = {n}"
                    )));
                }
                vec![
                    (PrincipalClass::Hopf, a - 1),
                    (PrincipalClass::CoreTangent, a * k),
                    (PrincipalClass::Spherical, a * (n - k - 1)),
                ]
            }
        };
        Ok(EquivariantFamily {
            space,
            kind,
            r_domain: (DOMAIN_MARGIN, FRAC_PI_2 - DOMAIN_MARGIN),
            multiplicities,
        })
    }

    pub fn sphere(space: AmbientSpace) -> Self {
        Self::new(space, FamilyKind::GeodesicSphere).expect("spheres exist in every KP^n")
    }

    pub fn tube(space: AmbientSpace, k: usize) -> Result<Self> {
        Self::new(space, FamilyKind::TubeAroundKPk(k))
    }

    pub fn label(&self) -> String {
        match self.kind {
            FamilyKind::GeodesicSphere => format!("sphere@{}", self.space.label()),
            FamilyKind::TubeAroundKPk(k) => format!("tube(k={k})@{}", self.space.label()),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.r_domain.0 && r < self.r_domain.1
    }

    fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                r,
                lo: self.r_domain.0,
                hi: self.r_domain.1,
            })
        }
    }

    fn weighted_sum(&self, f: impl Fn(PrincipalClass) -> f64) -> f64 {
        self.multiplicities
            .iter()
            .map(|&(class, count)| count as f64 * f(class))
            .sum()
    }

    /// Principal curvatures in frame order (not sorted).
    pub fn principal_curvatures(&self, r: f64) -> Result<Vec<f64>> {
        self.check(r)?;
        Ok(self
            .multiplicities
            .iter()
            .flat_map(|&(class, count)| std::iter::repeat_n(class.value(r), count))
            .collect())
    }

    pub fn spectrum_at(&self, r: f64) -> Result<ShapeSpectrum> {
        ShapeSpectrum::new(self.principal_curvatures(r)?)
    }

    pub fn mean_curvature_profile(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.weighted_sum(|c| c.value(r)))
    }

    pub fn dh_dr(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.weighted_sum(|c| c.derivative(r)))
    }

    /// `log` of the hypersurface volume up to an additive constant.
    pub fn log_volume(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.weighted_sum(|c| c.log_jacobi(r)))
    }

    /// Principal frame at the base point of the model space: `ν = e_0`, then
    /// the structure directions `J_s ν`, then the remaining `K`-lines (core
    /// tangent lines first). `h` is diagonal.
    pub fn adapted_frame(&self, r: f64) -> Result<FrameConfig> {
        let lambdas = self.principal_curvatures(r)?;
        let d = self.space.dim();
        let m = self.space.m;
        let normal = DVector::from_fn(d, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let frame = DMatrix::from_fn(d, m, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
        let h = DMatrix::from_diagonal(&DVector::from_vec(lambdas));
        FrameConfig::new(&self.space, normal, frame, h)
    }
}

/// Initial behaviour of a Riccati solution at `r → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RiccatiStart {
    /// `s ~ 1/r`: the normal geodesics emanate from a point.
    SphereCap,
    /// `s(0) = 0`: the direction is tangent to a totally geodesic core.
    FocalCore,
}

const RICCATI_START: f64 = 1e-4;
const RICCATI_BLOWUP: f64 = 1e10;

/// Integrates `s' = -(s² + K)` from a small radius to `r`.
pub fn radial_riccati_oracle(curv_k: f64, r: f64, start: RiccatiStart) -> Result<f64> {
    if !(curv_k > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("need K > 0 and r > 0 (K = {curv_k}, r = {r})")));
    }
    let r0 = RICCATI_START.min(0.5 * r);
    let k = curv_k;
    // series of the regular solution through r0³
    let s0 = match start {
        RiccatiStart::SphereCap => 1.0 / r0 - k * r0 / 3.0 - k * k * r0.powi(3) / 45.0,
        RiccatiStart::FocalCore => -k * r0 - k * k * r0.powi(3) / 3.0,
    };
    let control = StepControl {
        rtol: 1e-13,
        atol: 1e-13,
        initial_step: 1e-7,
        ..StepControl::default()
    };
    let mut last = s0;
    let mut reached = false;
    let mut blown = false;
    integrate(
        |_, s: &[f64; 1]| [-(s[0] * s[0] + k)],
        r0,
        [s0],
        &control,
        |t, _| r - t,
        |acc| {
            last = acc.y[0];
            if acc.y[0].abs() > RICCATI_BLOWUP {
                blown = true;
                return Control::Stop;
            }
            if acc.t >= r - 1e-15 {
                reached = true;
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )
    .map_err(|_| Error::PoleCrossing(r))?;
    if blown || !reached {
        return Err(Error::PoleCrossing(r));
    }
    Ok(last)
}

/// Maximal sub-intervals of the domain where `H > 0` and `Q < 0`, from a scan
/// on `grid` points with boundaries refined by bisection to `1e-8`.
pub fn pinched_interval(family: &EquivariantFamily, epsilon: f64, grid: usize) -> Vec<(f64, f64)> {
    if grid < 2 {
        return Vec::new();
    }
    let (lo, hi) = family.r_domain;
    let inside = |r: f64| -> bool {
        family
            .spectrum_at(r)
            .map(|s| is_pinched_eps(&s, epsilon) && q_value(&s, epsilon) < 0.0)
            .unwrap_or(false)
    };
    let point = |i: usize| {
        if i == grid - 1 {
            hi - 1e-12
        } else {
            lo + 1e-12 + (hi - lo) * i as f64 / (grid - 1) as f64
        }
    };
    let refine = |mut a: f64, mut b: f64| {
        // invariant: inside(a) != inside(b)
        let a_in = inside(a);
        while b - a > 1e-8 {
            let mid = 0.5 * (a + b);
            if inside(mid) == a_in {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };

    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev_r = point(0);
    let mut prev_in = inside(prev_r);
    if prev_in {
        start = Some(lo);
    }
    for i in 1..grid {
        let r = point(i);
        let now = inside(r);
        if now != prev_in {
            let edge = refine(prev_r, r);
            if now {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                out.push((s, edge));
            }
        }
        prev_r = r;
        prev_in = now;
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out
}
