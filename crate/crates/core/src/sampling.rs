//! Seeded spectrum samplers.
//!
//! Pinched spectra are drawn directly rather than by rejection: writing
//! `λ = (H/m) 1 + ρ u` with `u` a unit trace-free direction, the condition
//! `Q ≤ 0` is exactly `ρ² ≤ (a_ε - 1/m) H² + b_ε`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectrum::ShapeSpectrum;

/// Where in the pinched set a sample is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// `|Å|²` uniform over the admissible range.
    Bulk,
    /// `|Å|²` within `10⁻³` of the admissible range's lower end.
    NearUmbilic,
    /// `|Å|²` within `10⁻⁶` (relative) of the pinching boundary `Q = 0`.
    NearBoundary,
}

impl Stratum {
    /// 50% bulk, 25% near-umbilic, 25% near-boundary.
    pub fn for_index(i: u64) -> Self {
        match i % 4 {
            0 | 1 => Stratum::Bulk,
            2 => Stratum::NearUmbilic,
            _ => Stratum::NearBoundary,
        }
    }
}

/// Independent `N(0, scale²)` curvatures.
pub fn gaussian_spectrum<R: Rng + ?Sized>(m: usize, scale: f64, rng: &mut R) -> ShapeSpectrum {
    let v: Vec<f64> = (0..m)
        .map(|_| { let z: f64 = StandardNormal.sample(rng); scale * z })
        .collect();
    ShapeSpectrum::new(v).expect("m >= 3 and finite draws")
}

/// Uniformly distributed unit vector orthogonal to `(1, …, 1)`.
pub fn trace_free_direction<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        let mean = v.iter().sum::<f64>() / m as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// A spectrum with `Q ≤ 0` for this `ε` and `H` uniform in `h_range`.
pub fn pinched_spectrum<R: Rng + ?Sized>(
    m: usize,
    epsilon: f64,
    h_range: (f64, f64),
    stratum: Stratum,
    rng: &mut R,
) -> ShapeSpectrum {
    let mf = m as f64;
    let h = if h_range.1 > h_range.0 {
        rng.gen_range(h_range.0..h_range.1)
    } else {
        h_range.0
    };
    let budget = (1.0 / (mf - 2.0 + epsilon) - 1.0 / mf) * h * h + 4.0 * (1.0 - epsilon);
    let fraction = match stratum {
        Stratum::Bulk => rng.gen::<f64>(),
        Stratum::NearUmbilic => 1e-3 * rng.gen::<f64>(),
        Stratum::NearBoundary => 1.0 - 1e-6 * rng.gen::<f64>(),
    };
    let radius = (budget * fraction).sqrt();
    let u = trace_free_direction(m, rng);
    let v = u.iter().map(|x| h / mf + radius * x).collect();
    ShapeSpectrum::new(v).expect("m >= 3 and finite draws")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::q_value;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pinched_sampler_lands_in_the_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..2000 {
            let s = pinched_spectrum(7, 0.05, (0.0, 200.0), Stratum::for_index(i), &mut rng);
            let q = q_value(&s, 0.05);
            assert!(q <= 1e-9 * (1.0 + s.norm_a2), "q = {q}");
        }
    }

    #[test]
    fn near_boundary_is_near_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = pinched_spectrum(15, 0.01, (10.0, 10.0), Stratum::NearBoundary, &mut rng);
        let q = q_value(&s, 0.01);
        assert!(q <= 1e-10 && q > -1e-4, "q = {q}");
        assert!((s.mean_curvature - 10.0).abs() < 1e-12);
    }

    #[test]
    fn trace_free_direction_is_unit_and_trace_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = trace_free_direction(9, &mut rng);
        assert!(u.iter().sum::<f64>().abs() < 1e-14);
        assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
