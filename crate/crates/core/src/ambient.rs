//! Riemannian geometry of `KP^n(4)` at a single point.
//!
//! `KP^n` is homogeneous, so every frame-local quantity can be computed in one
//! model tangent space `R^{a n} = K^n` carrying the metric and the structure
//! endomorphisms (one complex structure `J` for `C`, a quaternionic triple
//! `I, J, K` with `IJ = K` for `H`). The curvature tensor is assembled from the
//! space-form expression in the metric and the `J_s`.
//!
//! Index convention: `R̄_{ABCD} = <R(e_A, e_B) e_D, e_C>`, so `R̄_{ABAB}` is the
//! sectional curvature of the plane `e_A ∧ e_B` (this is the convention in which
//! the pinching evolution equations are written).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Tolerance for exact linear-algebra identities of the tensor.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for quantities behind one contraction chain.
pub const CONTRACTION_TOL: f64 = 1e-10;

/// The division algebra the projective space is built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Field {
    Complex,
    Quaternionic,
}

impl Field {
    /// Real dimension `a` of the algebra.
    pub fn real_dim(self) -> usize {
        match self {
            Field::Complex => 2,
            Field::Quaternionic => 4,
        }
    }

    /// Short prefix used in space labels (`cp4`, `hp4`).
    pub fn prefix(self) -> &'static str {
        match self {
            Field::Complex => "cp",
            Field::Quaternionic => "hp",
        }
    }
}

/// `KP^n` with holomorphic (resp. quaternionic) sectional curvature 4.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AmbientSpace {
    pub field: Field,
    /// Projective dimension.
    pub n: usize,
    /// Real dimension of the field.
    pub a: usize,
    /// Dimension of a real hypersurface, `a n - 1`.
    pub m: usize,
    /// Einstein constant `r̄` with `Ric = r̄ g`.
    pub einstein: f64,
}

/// Builds `KP^n`, rejecting `n < 2`.
pub fn make_space(field: Field, n: usize) -> Result<AmbientSpace> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let a = field.real_dim();
    let m = a * n - 1;
    let einstein = match field {
        Field::Complex => (m + 3) as f64,
        Field::Quaternionic => (m + 9) as f64,
    };
    Ok(AmbientSpace {
        field,
        n,
        a,
        m,
        einstein,
    })
}

impl AmbientSpace {
    pub fn new(field: Field, n: usize) -> Result<Self> {
        make_space(field, n)
    }

    /// Real dimension of the ambient manifold.
    pub fn dim(&self) -> usize {
        self.a * self.n
    }

    /// Label such as `cp4` or `hp3`.
    pub fn label(&self) -> String {
        format!("{}{}", self.field.prefix(), self.n)
    }

    /// Parses a label such as `cp4` or `HP3`.
    pub fn parse(label: &str) -> Result<Self> {
        let lower = label.trim().to_ascii_lowercase();
        let (field, rest) = if let Some(rest) = lower.strip_prefix("cp") {
            (Field::Complex, rest)
        } else if let Some(rest) = lower.strip_prefix("hp") {
            (Field::Quaternionic, rest)
        } else {
            return Err(Error::Config(format!("unknown space `{label}` (expected cpN or hpN)")));
        };
        let n: usize = rest
            .parse()
            .map_err(|_| Error::Config(format!("bad projective dimension in `{label}`")))?;
        make_space(field, n).map_err(|e| Error::Config(e.to_string()))
    }

    /// Structure endomorphisms `J_s` as `dim × dim` matrices with
    /// `J[(C, B)] = <J e_B, e_C>`. One for `C`, three for `H`.
    ///
    /// Coordinates are grouped in blocks of `a` per `K`-line; the quaternionic
    /// triple is left multiplication by `i, j, k` on `(1, i, j, k)` coordinates.
    pub fn structures(&self) -> Vec<DMatrix<f64>> {
        let d = self.dim();
        // (images of e0..e3 as (index, sign)) for each unit
        let blocks: Vec<Vec<(usize, f64)>> = match self.field {
            Field::Complex => vec![vec![(1, 1.0), (0, -1.0)]],
            Field::Quaternionic => vec![
                vec![(1, 1.0), (0, -1.0), (3, 1.0), (2, -1.0)],
                vec![(2, 1.0), (3, -1.0), (0, -1.0), (1, 1.0)],
                vec![(3, 1.0), (2, 1.0), (1, -1.0), (0, -1.0)],
            ],
        };
        blocks
            .iter()
            .map(|images| {
                let mut j = DMatrix::zeros(d, d);
                for line in 0..self.n {
                    let base = line * self.a;
                    for (src, &(dst, sign)) in images.iter().enumerate() {
                        j[(base + dst, base + src)] = sign;
                    }
                }
                j
            })
            .collect()
    }
}

/// Rank-4 curvature tensor of `KP^n` in the standard orthonormal basis.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    pub space: AmbientSpace,
    pub dim: usize,
    /// Dense components, row-major in `(A, B, C, D)`.
    pub components: Vec<f64>,
    structures: Vec<DMatrix<f64>>,
    nonzeros: Vec<(usize, usize, usize, usize, f64)>,
}

/// Builds the symmetric-space curvature tensor of `space`.
pub fn curvature_tensor(space: &AmbientSpace) -> CurvatureTensor {
    let d = space.dim();
    let js = space.structures();
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut components = vec![0.0; d * d * d * d];
    let mut nonzeros = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    // <R(e_a, e_b) e_c, e_dd> for
                    // R(X,Y)Z = <Y,Z>X - <X,Z>Y
                    //   + sum_s <J_s Y, Z> J_s X - <J_s X, Z> J_s Y + 2 <X, J_s Y> J_s Z
                    let mut std = delta(b, c) * delta(a, dd) - delta(a, c) * delta(b, dd);
                    for j in &js {
                        std += j[(c, b)] * j[(dd, a)] - j[(c, a)] * j[(dd, b)]
                            + 2.0 * j[(a, b)] * j[(dd, c)];
                    }
                    // R̄_{a b c dd} = <R(e_a,e_b) e_dd, e_c> = -<R(e_a,e_b) e_c, e_dd>
                    let value = -std;
                    if value != 0.0 {
                        components[((a * d + b) * d + c) * d + dd] = value;
                        nonzeros.push((a, b, c, dd, value));
                    }
                }
            }
        }
    }
    CurvatureTensor {
        space: *space,
        dim: d,
        components,
        structures: js,
        nonzeros,
    }
}

/// Largest violations of the algebraic curvature-tensor identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryDefects {
    pub antisym_first: f64,
    pub antisym_second: f64,
    pub pair: f64,
    pub bianchi: f64,
}

impl SymmetryDefects {
    pub fn max(&self) -> f64 {
        self.antisym_first
            .max(self.antisym_second)
            .max(self.pair)
            .max(self.bianchi)
    }
}

impl CurvatureTensor {
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.components[((a * n + b) * n + c) * n + d]
    }

    pub fn structures(&self) -> &[DMatrix<f64>] {
        &self.structures
    }

    /// Number of non-zero components.
    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    /// `Σ R̄_{ABCD} M1_{AC} M2_{BD}`.
    ///
    /// Every contraction used by the evolution equations has this shape once the
    /// frame quantities are lifted to the ambient tangent space.
    pub fn contract(&self, m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> f64 {
        self.nonzeros
            .iter()
            .map(|&(a, b, c, d, v)| v * m1[(a, c)] * m2[(b, d)])
            .sum()
    }

    /// Ricci tensor `Ric_{BD} = Σ_A R̄_{ABAD}`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut ric = DMatrix::zeros(d, d);
        for &(a, b, c, dd, v) in &self.nonzeros {
            if a == c {
                ric[(b, dd)] += v;
            }
        }
        ric
    }

    /// Largest deviation of `Ric` from `r̄ g`.
    pub fn einstein_defect(&self) -> f64 {
        let ric = self.ricci();
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { self.space.einstein } else { 0.0 };
                worst = worst.max((ric[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn symmetry_defects(&self) -> SymmetryDefects {
        let d = self.dim;
        let mut out = SymmetryDefects {
            antisym_first: 0.0,
            antisym_second: 0.0,
            pair: 0.0,
            bianchi: 0.0,
        };
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for dd in 0..d {
                        let r = self.get(a, b, c, dd);
                        out.antisym_first = out.antisym_first.max((r + self.get(b, a, c, dd)).abs());
                        out.antisym_second = out.antisym_second.max((r + self.get(a, b, dd, c)).abs());
                        out.pair = out.pair.max((r - self.get(c, dd, a, b)).abs());
                        let cyclic = r + self.get(b, c, a, dd) + self.get(c, a, b, dd);
                        out.bianchi = out.bianchi.max(cyclic.abs());
                    }
                }
            }
        }
        out
    }

    /// `R̄(X, Y, X, Y) / (|X|²|Y|² - <X,Y>²)`.
    pub fn sectional_curvature(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let xx = x.dot(x);
        let yy = y.dot(y);
        let xy = x.dot(y);
        let gram = xx * yy - xy * xy;
        if gram <= 1e-14 * xx.max(1.0) * yy.max(1.0) {
            return Err(Error::DependentVectors(gram));
        }
        let m1 = x * x.transpose();
        let m2 = y * y.transpose();
        Ok(self.contract(&m1, &m2) / gram)
    }

    /// `1 + 3 Σ_s <J_s Y, X>²`, the closed form for an orthonormal pair.
    pub fn sectional_closed_form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        1.0 + 3.0
            * self
                .structures
                .iter()
                .map(|j| {
                    let p = (j * y).dot(x);
                    p * p
                })
                .sum::<f64>()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }
}

/// A unit normal, an orthonormal tangent frame and second-fundamental-form
/// components `h_ij` in that frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    pub normal: DVector<f64>,
    /// `dim × m`, one tangent vector per column.
    pub tangent_frame: DMatrix<f64>,
    pub h: DMatrix<f64>,
    /// `hopf_angles[s][i] = |<J_s ν, e_i>|`.
    pub hopf_angles: Vec<Vec<f64>>,
}

impl FrameConfig {
    /// Validates orthonormality of `{ν, e_i}` and exact symmetry of `h`.
    pub fn new(
        space: &AmbientSpace,
        normal: DVector<f64>,
        tangent_frame: DMatrix<f64>,
        h: DMatrix<f64>,
    ) -> Result<Self> {
        let d = space.dim();
        let m = space.m;
        if normal.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: normal.len() });
        }
        if tangent_frame.nrows() != d || tangent_frame.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: d * m,
                got: tangent_frame.nrows() * tangent_frame.ncols(),
            });
        }
        if h.nrows() != m || h.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, got: h.nrows() });
        }
        if h != h.transpose() {
            return Err(Error::InvalidParameter("h is not symmetric".into()));
        }
        let mut full = DMatrix::zeros(d, m + 1);
        full.set_column(0, &normal);
        full.view_mut((0, 1), (d, m)).copy_from(&tangent_frame);
        let gram = full.transpose() * &full;
        let defect = (gram - DMatrix::identity(m + 1, m + 1)).amax();
        if defect > EXACT_TOL {
            return Err(Error::InvalidParameter(format!(
                "frame is not orthonormal (defect {defect:e})"
            )));
        }
        let hopf_angles = space
            .structures()
            .iter()
            .map(|j| {
                let jn = j * &normal;
                (0..m).map(|i| jn.dot(&tangent_frame.column(i)).abs()).collect()
            })
            .collect();
        Ok(FrameConfig {
            normal,
            tangent_frame,
            h,
            hopf_angles,
        })
    }

    pub fn m(&self) -> usize {
        self.h.nrows()
    }

    /// `E h Eᵀ`: the second fundamental form as an ambient bilinear form.
    pub fn lifted(&self, frame_matrix: &DMatrix<f64>) -> DMatrix<f64> {
        &self.tangent_frame * frame_matrix * self.tangent_frame.transpose()
    }

    /// Same geometric configuration with the tangent frame rotated by `rot`
    /// (`e'_j = Σ_i e_i rot_ij`) and `h` conjugated to match.
    pub fn rotated(&self, space: &AmbientSpace, rot: &DMatrix<f64>) -> Result<Self> {
        let frame = &self.tangent_frame * rot;
        let h = symmetrize(&(rot.transpose() * &self.h * rot));
        FrameConfig::new(space, self.normal.clone(), frame, h)
    }
}

/// Tangential and normal curvature couplings of a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    /// `h^{ij} h_j^p R̄_{pli}^l - h^{ij} h^{lp} R̄_{pilj}`.
    pub tangential: f64,
    /// `H h^{ij} R̄_{0i0j} - |A|² R̄_{0l0}^l`.
    pub normal: f64,
}

/// Contracts the curvature tensor against the second fundamental form of a frame.
pub fn curvature_coupling(tensor: &CurvatureTensor, frame: &FrameConfig) -> Result<Coupling> {
    if frame.normal.len() != tensor.dim {
        return Err(Error::DimensionMismatch {
            expected: tensor.dim,
            got: frame.normal.len(),
        });
    }
    if frame.m() + 1 != tensor.dim {
        return Err(Error::DimensionMismatch {
            expected: tensor.dim - 1,
            got: frame.m(),
        });
    }
    let h2 = &frame.h * &frame.h;
    let lifted_h = frame.lifted(&frame.h);
    let lifted_h2 = frame.lifted(&h2);
    let projector = &frame.tangent_frame * frame.tangent_frame.transpose();
    let nn = &frame.normal * frame.normal.transpose();

    let tangential = tensor.contract(&lifted_h2, &projector) - tensor.contract(&lifted_h, &lifted_h);
    let mean = frame.h.trace();
    let norm_a2 = h2.trace();
    let normal = mean * tensor.contract(&nn, &lifted_h) - norm_a2 * tensor.contract(&nn, &projector);
    Ok(Coupling { tangential, normal })
}

/// How `h` is drawn for a random frame.
#[derive(Debug, Clone, PartialEq)]
pub enum HSampler {
    /// Symmetrised gaussian matrix with entry scale `scale`.
    Gaussian { scale: f64 },
    /// `O diag(λ) Oᵀ` with Haar-random `O`; the spectrum is prescribed.
    Spectrum(Vec<f64>),
}

/// Random unit normal, random orthonormal completion and `h` from `sampler`.
pub fn random_adapted_frame(space: &AmbientSpace, seed: u64, sampler: &HSampler) -> Result<FrameConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_adapted_frame_with(space, &mut rng, sampler)
}

/// [`random_adapted_frame`] drawing from a caller-owned generator.
pub fn random_adapted_frame_with<R: rand::Rng + ?Sized>(
    space: &AmbientSpace,
    rng: &mut R,
    sampler: &HSampler,
) -> Result<FrameConfig> {
    let d = space.dim();
    let m = space.m;
    let mut normal = gaussian_vector(d, rng);
    normal /= normal.norm();

    let mut basis = gaussian_matrix(d, d, rng);
    basis.set_column(0, &normal);
    let q = haar_from(basis);
    // first column of q is ±normal; make it exactly the normal direction
    let sign = q.column(0).dot(&normal).signum();
    let normal = q.column(0) * sign;
    let tangent = q.columns(1, m).into_owned();

    let h = match sampler {
        HSampler::Gaussian { scale } => {
            let g = gaussian_matrix(m, m, rng) * *scale;
            symmetrize(&g)
        }
        HSampler::Spectrum(lambdas) => {
            if lambdas.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: lambdas.len(),
                });
            }
            let rot = random_rotation(m, rng);
            let diag = DMatrix::from_diagonal(&DVector::from_column_slice(lambdas));
            symmetrize(&(&rot * diag * rot.transpose()))
        }
    };
    FrameConfig::new(space, normal.into_owned(), tangent, h)
}

/// Haar-distributed orthogonal `m × m` matrix.
pub fn random_rotation<R: rand::Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    haar_from(gaussian_matrix(m, m, rng))
}

/// Gaussian vector with independent standard normal entries.
pub fn gaussian_vector<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(len, |_, _| StandardNormal.sample(rng))
}

fn gaussian_matrix<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    // fill row by row so the draw order does not depend on storage layout
    let mut out = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out[(i, j)] = StandardNormal.sample(rng);
        }
    }
    out
}

/// Orthogonal factor of a QR decomposition with the sign of `diag(R)` fixed
/// positive.
fn haar_from(mat: DMatrix<f64>) -> DMatrix<f64> {
    let qr = mat.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            let flipped = -q.column(j);
            q.set_column(j, &flipped);
        }
    }
    q
}

/// `(M + Mᵀ) / 2`, exactly symmetric in floating point.
pub fn symmetrize(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mat.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (mat[(i, j)] + mat[(j, i)]))
}
