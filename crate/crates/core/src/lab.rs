//! Randomised certification of the pointwise inequalities.
//!
//! Claims come in three tiers. Certified claims are proved statements: a single
//! violation means the implementation is wrong. Exploratory claims estimate
//! constants that are only known to exist. Informational rows record facts
//! about one parameter point that are reported but never gate anything.
//!
//! Trials are split into fixed batches of [`BATCH`]; batch `b` draws from
//! ChaCha8 stream `b` of the run seed, so reports depend only on
//! `(seed, trials)` and not on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{
    curvature_coupling, curvature_tensor, gaussian_vector, make_space, random_adapted_frame_with, AmbientSpace,
    CurvatureTensor, Field, FrameConfig, HSampler,
};
use crate::profiles::{pinched_interval, EquivariantFamily};
use crate::sampling::{gaussian_spectrum, pinched_spectrum, Stratum};
use crate::spectrum::{
    alpha_window, dimension_gate, identity_2001_residual, is_pinched_eps, q_value, two_convexity_check, w_and_f,
    AlphaChoice, PinchingParams, ShapeSpectrum,
};

/// Trials per seeded batch.
pub const BATCH: u64 = 4096;
/// Slack tolerance for claims contracted through the curvature tensor.
pub const CONTRACTION_SLACK_TOL: f64 = 1e-9;
/// Slack tolerance for identities in the principal curvatures alone.
pub const SPECTRUM_SLACK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Certified,
    Exploratory,
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub claim_id: String,
    pub tier: Tier,
    pub trials: u64,
    /// Trials with `slack < -tolerance`.
    pub violations: u64,
    pub min_slack: f64,
    pub tolerance: f64,
    /// Principal curvatures (or curvatures of `h`) at the smallest slack.
    pub witness: Option<Vec<f64>>,
    pub seed: u64,
    pub detail: Option<String>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.tier != Tier::Certified || self.violations == 0
    }
}

/// True when every certified report has zero violations.
pub fn suite_passes(reports: &[TrialReport]) -> bool {
    reports.iter().all(TrialReport::passed)
}

#[derive(Debug, Clone)]
struct Tally {
    trials: u64,
    violations: u64,
    min_slack: f64,
    witness: Option<Vec<f64>>,
}

impl Tally {
    fn empty() -> Self {
        Tally {
            trials: 0,
            violations: 0,
            min_slack: f64::INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, tolerance: f64, witness: impl FnOnce() -> Vec<f64>) {
        self.trials += 1;
        if slack < -tolerance || slack.is_nan() {
            self.violations += 1;
        }
        if slack < self.min_slack || (slack.is_nan() && !self.min_slack.is_nan()) {
            self.min_slack = slack;
            self.witness = Some(witness());
        }
    }

    // left-biased on ties so merging in batch order is deterministic
    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.violations += other.violations;
        if other.min_slack < self.min_slack || (other.min_slack.is_nan() && !self.min_slack.is_nan()) {
            self.min_slack = other.min_slack;
            self.witness = other.witness;
        }
        self
    }
}

/// Generator for trial batch `batch` of a run.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs `trial(index, rng, tally)` `trials` times over seeded batches.
fn run_batched<F>(trials: u64, seed: u64, trial: F) -> Tally
where
    F: Fn(u64, &mut ChaCha8Rng, &mut Tally) + Sync,
{
    let batches = trials.div_ceil(BATCH);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let mut tally = Tally::empty();
            let end = ((b + 1) * BATCH).min(trials);
            for i in b * BATCH..end {
                trial(i, &mut rng, &mut tally);
            }
            tally
        })
        .collect();
    tallies.into_iter().fold(Tally::empty(), Tally::merge)
}

fn report(claim_id: impl Into<String>, tier: Tier, tally: Tally, tolerance: f64, seed: u64) -> TrialReport {
    TrialReport {
        claim_id: claim_id.into(),
        tier,
        trials: tally.trials,
        violations: tally.violations,
        min_slack: tally.min_slack,
        tolerance,
        witness: tally.witness,
        seed,
        detail: None,
    }
}

fn frame_spectrum(frame: &FrameConfig) -> Vec<f64> {
    let mut l: Vec<f64> = frame.h.clone().symmetric_eigenvalues().iter().copied().collect();
    l.sort_by(f64::total_cmp);
    l
}

fn norm_ao2_of(frame: &FrameConfig) -> f64 {
    let m = frame.m() as f64;
    let trace = frame.h.trace();
    frame.h.norm_squared() - trace * trace / m
}

/// Slack of `T ≥ m|Å|²` for one frame.
pub fn stima_slack(tensor: &CurvatureTensor, frame: &FrameConfig) -> crate::Result<f64> {
    let coupling = curvature_coupling(tensor, frame)?;
    Ok(coupling.tangential - frame.m() as f64 * norm_ao2_of(frame))
}

/// Mean curvatures for pinched draws are uniform on this range.
pub const PINCHED_H_RANGE: (f64, f64) = (0.0, 50.0);
/// `ε` used by the pinched-spectrum half of the frame sampler.
pub const SAMPLER_EPSILON: f64 = 0.01;

/// Certifies `T ≥ m|Å|²` on random adapted frames.
///
/// Even trials draw a gaussian `h`; odd trials conjugate a pinched spectrum by
/// a Haar rotation, cycling through the sampling strata.
pub fn certify_stima_i(space: &AmbientSpace, trials: u64, seed: u64) -> TrialReport {
    let tensor = curvature_tensor(space);
    let m = space.m;
    let tally = run_batched(trials, seed, |i, rng, tally| {
        let sampler = if i % 2 == 0 {
            HSampler::Gaussian { scale: 1.0 }
        } else {
            let s = pinched_spectrum(m, SAMPLER_EPSILON, PINCHED_H_RANGE, Stratum::for_index(i / 2), rng);
            HSampler::Spectrum(s.lambdas().to_vec())
        };
        let frame = random_adapted_frame_with(space, rng, &sampler).expect("sampler matches the space");
        let slack = stima_slack(&tensor, &frame).expect("frame matches the tensor");
        tally.record(slack, CONTRACTION_SLACK_TOL, || frame_spectrum(&frame));
    });
    report(format!("stima_i[{}]", space.label()), Tier::Certified, tally, CONTRACTION_SLACK_TOL, seed)
}

/// Equality case: the coupling of an umbilic `h = t I` on random frames.
pub fn stima_i_umbilic(space: &AmbientSpace, trials: u64, seed: u64) -> TrialReport {
    let tensor = curvature_tensor(space);
    let m = space.m;
    let tally = run_batched(trials, seed, |_, rng, tally| {
        let t: f64 = rng.gen_range(-10.0..10.0);
        let frame =
            random_adapted_frame_with(space, rng, &HSampler::Spectrum(vec![t; m])).expect("sampler matches the space");
        let slack = stima_slack(&tensor, &frame).expect("frame matches the tensor");
        // equality: both signs of the slack count
        tally.record(-slack.abs(), 1e-10, || frame_spectrum(&frame));
    });
    report(format!("stima_i_umbilic[{}]", space.label()), Tier::Certified, tally, 1e-10, seed)
}

/// Spectrum for trial `i` of the pointwise claims: gaussian or pinched,
/// alternating, with the pinched half cycling through the strata.
fn mixed_spectrum(m: usize, i: u64, rng: &mut ChaCha8Rng) -> ShapeSpectrum {
    if i.is_multiple_of(2) {
        gaussian_spectrum(m, 1.0, rng)
    } else {
        pinched_spectrum(m, SAMPLER_EPSILON, PINCHED_H_RANGE, Stratum::for_index(i / 2), rng)
    }
}

/// `|A|² - H²/(m-1) = (1/(m-1))(Σ_{1<i<j}(λ_i-λ_j)² + λ_1(mλ_1 - 2H))`.
pub fn certify_identity_2001(m: usize, trials: u64, seed: u64) -> TrialReport {
    let tally = run_batched(trials, seed, |i, rng, tally| {
        let s = mixed_spectrum(m, i, rng);
        tally.record(-identity_2001_residual(&s), SPECTRUM_SLACK_TOL, || s.lambdas().to_vec());
    });
    report(format!("identity_2001[m={m}]"), Tier::Certified, tally, SPECTRUM_SLACK_TOL, seed)
}

/// `|A|² - H²/m = (1/m) Σ_{i<j} (λ_i - λ_j)²`.
pub fn certify_norm_ao2(m: usize, trials: u64, seed: u64) -> TrialReport {
    let tally = run_batched(trials, seed, |i, rng, tally| {
        let s = mixed_spectrum(m, i, rng);
        let residual = (s.norm_ao2 - s.norm_ao2_pairwise()).abs();
        tally.record(-residual, SPECTRUM_SLACK_TOL, || s.lambdas().to_vec());
    });
    report(format!("norm_ao2_identity[m={m}]"), Tier::Certified, tally, SPECTRUM_SLACK_TOL, seed)
}

/// `f_{σ,η} ≤ W^σ` on spectra with `Q ≤ 0`.
pub fn certify_f_bound(params: &PinchingParams, trials: u64, seed: u64) -> TrialReport {
    let m = params.m;
    let tally = run_batched(trials, seed, |i, rng, tally| {
        let s = pinched_spectrum(m, params.epsilon, PINCHED_H_RANGE, Stratum::for_index(i), rng);
        if q_value(&s, params.epsilon) > 0.0 {
            return;
        }
        let wf = w_and_f(&s, params).expect("alpha, beta >= 0 make W positive");
        let slack = wf.w.powf(params.sigma) - wf.f_sigma_eta;
        tally.record(slack, SPECTRUM_SLACK_TOL, || s.lambdas().to_vec());
    });
    let mut r = report(
        format!("f_le_w_sigma[m={m},eps={},eta={},sigma={}]", params.epsilon, params.eta, params.sigma),
        Tier::Certified,
        tally,
        SPECTRUM_SLACK_TOL,
        seed,
    );
    r.detail = Some(format!("alpha = {}, beta = {}", params.alpha, params.beta));
    r
}

/// `H²` from which pinching forces two-convexity.
pub fn two_convexity_threshold(m: usize, epsilon: f64) -> f64 {
    let mf = m as f64;
    8.0 * (mf - 2.0) * (mf - 2.0 + epsilon) / epsilon
}

/// `λ_1 + λ_2 ≥ εH/(4(m-2+ε))` on pinched spectra past the curvature threshold.
///
/// `H` is drawn uniformly between the threshold and ten times it.
pub fn certify_two_convexity(m: usize, epsilon: f64, trials: u64, seed: u64) -> TrialReport {
    let h_min = two_convexity_threshold(m, epsilon).sqrt();
    let tally = run_batched(trials, seed, |i, rng, tally| {
        let s = pinched_spectrum(m, epsilon, (h_min, 10.0 * h_min), Stratum::for_index(i), rng);
        let Ok(check) = two_convexity_check(&s, epsilon) else {
            return;
        };
        if !check.threshold_met {
            return;
        }
        tally.record(check.margin, SPECTRUM_SLACK_TOL, || s.lambdas().to_vec());
    });
    report(
        format!("two_convexity[m={m},eps={epsilon}]"),
        Tier::Certified,
        tally,
        SPECTRUM_SLACK_TOL,
        seed,
    )
}

/// `H > 0`, `Q ≤ 0` and `Z < 0`.
pub fn is_negative_z_witness(s: &ShapeSpectrum, epsilon: f64) -> bool {
    is_pinched_eps(s, epsilon) && s.simons_z < 0.0
}

/// Pinched spectrum with `Z < 0`, searching at most `budget` samples with
/// `H` uniform on `(0, 1)`.
pub fn witness_negative_z(m: usize, epsilon: f64, budget: u64, seed: u64) -> Option<ShapeSpectrum> {
    witness_negative_z_search(m, epsilon, budget, seed).map(|(s, _)| s)
}

/// As [`witness_negative_z`], also returning how many samples were drawn.
pub fn witness_negative_z_search(m: usize, epsilon: f64, budget: u64, seed: u64) -> Option<(ShapeSpectrum, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..budget {
        let s = pinched_spectrum(m, epsilon, (0.0, 1.0), Stratum::for_index(i), &mut rng);
        if is_negative_z_witness(&s, epsilon) {
            return Some((s, i + 1));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundZRow {
    pub gamma: f64,
    /// `max (γH²(|A|² - H²/(m-1) - ηH²) - Z) / (H³ + 1)` over the samples.
    pub k_empirical: f64,
    pub samples: u64,
    pub argmax: Vec<f64>,
}

/// `(γH²(|A|² - H²/(m-1) - ηH²) - Z) / (H³ + 1)`: the `K` one spectrum forces.
pub fn bound_z_candidate(s: &ShapeSpectrum, gamma: f64, eta: f64) -> f64 {
    let m = s.m() as f64;
    let h = s.mean_curvature;
    let h2 = h * h;
    (gamma * h2 * (s.norm_a2 - h2 / (m - 1.0) - eta * h2) - s.simons_z) / (h2 * h + 1.0)
}

/// Empirical constants `K` in `Z ≥ γH²(|A|² - H²/(m-1) - ηH²) - K(H³ + 1)`.
///
/// Half of the samples have `H` up to 4 times the two-convexity threshold, the
/// other half `H ∈ (0, 1)` where `Z` can be negative.
pub fn explore_bound_z(
    m: usize,
    epsilon: f64,
    eta: f64,
    gamma_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<BoundZRow> {
    let h_high = 4.0 * two_convexity_threshold(m, epsilon).sqrt();
    gamma_grid
        .iter()
        .map(|&gamma| {
            let tally = run_batched(trials, seed, |i, rng, tally| {
                let range = if i % 2 == 0 { (0.0, h_high) } else { (0.0, 1.0) };
                let s = pinched_spectrum(m, epsilon, range, Stratum::for_index(i / 2), rng);
                if !is_pinched_eps(&s, epsilon) {
                    return;
                }
                let k = bound_z_candidate(&s, gamma, eta);
                // the tally keeps minima, so record -k
                tally.record(-k, f64::INFINITY, || s.lambdas().to_vec());
            });
            BoundZRow {
                gamma,
                k_empirical: -tally.min_slack,
                samples: tally.trials,
                argmax: tally.witness.unwrap_or_default(),
            }
        })
        .collect()
}

/// `(ε, η, σ)` points of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ParamsGrid {
    pub epsilons: Vec<f64>,
    pub etas: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl Default for ParamsGrid {
    fn default() -> Self {
        ParamsGrid {
            epsilons: vec![1e-3, 1e-2, 1e-1],
            etas: vec![1e-3, 1e-2, 1e-1],
            sigmas: vec![0.0, 0.01, 0.1],
        }
    }
}

impl ParamsGrid {
    pub fn is_empty(&self) -> bool {
        self.epsilons.is_empty() || self.etas.is_empty() || self.sigmas.is_empty()
    }
}

fn informational(claim_id: String, pass: bool, slack: f64, seed: u64, detail: String) -> TrialReport {
    TrialReport {
        claim_id,
        tier: Tier::Informational,
        trials: 1,
        violations: u64::from(!pass),
        min_slack: slack,
        tolerance: 0.0,
        witness: None,
        seed,
        detail: Some(detail),
    }
}

/// Scans `dimension_gate` over `n = 2..=8` for both fields: passes exactly
/// when `n ≥ 4`.
pub fn dimension_gate_scan(epsilons: &[f64], seed: u64) -> TrialReport {
    let mut tally = Tally::empty();
    let mut failures = Vec::new();
    for field in [Field::Complex, Field::Quaternionic] {
        for n in 2..=8 {
            let space = make_space(field, n).expect("n >= 2");
            for &eps in epsilons {
                let gate = dimension_gate(&space, eps);
                let agrees = gate.pass == (n >= 4);
                if !agrees {
                    failures.push(format!("{} eps={eps}", space.label()));
                }
                tally.record(if agrees { 1.0 } else { -1.0 }, 0.0, || vec![n as f64, eps]);
            }
        }
    }
    let mut r = report("dimension_gate_scan", Tier::Certified, tally, 0.0, seed);
    r.witness = None;
    r.detail = Some(if failures.is_empty() {
        "gate passes exactly for n >= 4, n = 2..8".into()
    } else {
        format!("disagreements: {}", failures.join(", "))
    });
    r
}

/// Scans `alpha_window` over `m = 3..=50`: nonempty exactly when `m ≥ 5`.
pub fn alpha_window_scan(etas: &[f64], seed: u64) -> TrialReport {
    let mut tally = Tally::empty();
    for m in 3..=50usize {
        for &eta in etas {
            let w = alpha_window(m, eta);
            let agrees = w.nonempty == (m >= 5);
            tally.record(if agrees { 1.0 } else { -1.0 }, 0.0, || vec![m as f64, eta]);
        }
    }
    let mut r = report("alpha_window_scan", Tier::Certified, tally, 0.0, seed);
    r.witness = None;
    r.detail = Some("window nonempty exactly for m >= 5, m = 3..50".into());
    r
}

/// Einstein constant, tensor symmetries and the sectional curvature range.
pub fn certify_ambient(space: &AmbientSpace, pairs: u64, seed: u64) -> Vec<TrialReport> {
    let tensor = curvature_tensor(space);
    let label = space.label();
    let mut einstein = Tally::empty();
    einstein.record(-tensor.einstein_defect(), crate::ambient::EXACT_TOL, Vec::new);
    let mut symmetries = Tally::empty();
    symmetries.record(-tensor.symmetry_defects().max(), crate::ambient::EXACT_TOL, Vec::new);

    let d = space.dim();
    let sectional = run_batched(pairs, seed, |_, rng, tally| {
        let x = gaussian_vector(d, rng);
        let y = gaussian_vector(d, rng);
        let k = tensor.sectional_curvature(&x, &y).expect("gaussian pairs are independent");
        let slack = (k - 1.0).min(4.0 - k);
        tally.record(slack, crate::ambient::CONTRACTION_TOL, || vec![k]);
    });

    let mut reports = vec![
        report(format!("einstein_constant[{label}]"), Tier::Certified, einstein, crate::ambient::EXACT_TOL, seed),
        report(format!("tensor_symmetries[{label}]"), Tier::Certified, symmetries, crate::ambient::EXACT_TOL, seed),
        report(format!("sectional_range[{label}]"), Tier::Certified, sectional, crate::ambient::CONTRACTION_TOL, seed),
    ];
    reports[0].witness = None;
    reports[1].witness = None;
    reports[0].detail = Some(format!("r̄ = {}", space.einstein));
    reports
}

/// Exploratory rows: pinched `r`-intervals of every tube family.
pub fn tube_interval_reports(space: &AmbientSpace, epsilons: &[f64], seed: u64) -> Vec<TrialReport> {
    let mut out = Vec::new();
    let families = std::iter::once(EquivariantFamily::sphere(*space))
        .chain((1..space.n).filter_map(|k| EquivariantFamily::tube(*space, k).ok()));
    for family in families {
        for &eps in epsilons {
            let intervals = pinched_interval(&family, eps, 2000);
            let detail = if intervals.is_empty() {
                "no pinched radii".to_string()
            } else {
                intervals.iter().map(|(a, b)| format!("({a:.9}, {b:.9})")).collect::<Vec<_>>().join(" ")
            };
            out.push(TrialReport {
                claim_id: format!("pinched_interval[{},eps={eps}]", family.label()),
                tier: Tier::Exploratory,
                trials: 2000,
                violations: 0,
                min_slack: f64::NAN,
                tolerance: 0.0,
                witness: None,
                seed,
                detail: Some(detail),
            });
        }
    }
    out
}

/// Every claim for one space over a parameter grid.
pub fn run_suite(space: &AmbientSpace, grid: &ParamsGrid, trials: u64, seed: u64) -> Vec<TrialReport> {
    let m = space.m;
    let mut reports = certify_ambient(space, trials.min(10_000), seed);
    reports.push(certify_stima_i(space, trials, seed));
    reports.push(stima_i_umbilic(space, trials.min(1000), seed));
    reports.push(certify_identity_2001(m, trials, seed));
    reports.push(certify_norm_ao2(m, trials, seed));
    for &eps in &grid.epsilons {
        reports.push(certify_two_convexity(m, eps, trials, seed));
    }
    for &eps in &grid.epsilons {
        for &eta in &grid.etas {
            for &sigma in &grid.sigmas {
                match PinchingParams::new(m, eps, eta, sigma, AlphaChoice::Midpoint) {
                    Ok(params) => reports.push(certify_f_bound(&params, trials, seed)),
                    Err(e) => reports.push(informational(
                        format!("f_le_w_sigma[m={m},eps={eps},eta={eta},sigma={sigma}]"),
                        false,
                        f64::NAN,
                        seed,
                        format!("parameters rejected: {e}"),
                    )),
                }
            }
        }
    }
    reports.push(dimension_gate_scan(&grid.epsilons, seed));
    reports.push(alpha_window_scan(&grid.etas, seed));
    for &eps in &grid.epsilons {
        let gate = dimension_gate(space, eps);
        let margin = 4.0 * (m as f64 - 2.0 + eps) - 2.0 * space.einstein;
        reports.push(informational(
            format!("dimension_gate[{},eps={eps}]", space.label()),
            gate.pass,
            margin,
            seed,
            format!("ineq1 = {}, ineq2 = {}", gate.ineq1, gate.ineq2),
        ));
    }
    for &eta in &grid.etas {
        let w = alpha_window(m, eta);
        reports.push(informational(
            format!("alpha_window[m={m},eta={eta}]"),
            w.nonempty,
            w.hi - w.lo,
            seed,
            format!("lo = {}, hi = {}", w.lo, w.hi),
        ));
    }
    let z = witness_negative_z_search(m, grid.epsilons[0], 10_000, seed);
    reports.push(TrialReport {
        claim_id: format!("negative_z_witness[m={m},eps={}]", grid.epsilons[0]),
        tier: Tier::Exploratory,
        trials: z.as_ref().map_or(10_000, |(_, n)| *n),
        violations: 0,
        min_slack: z.as_ref().map_or(f64::NAN, |(s, _)| s.simons_z),
        tolerance: 0.0,
        witness: z.map(|(s, _)| s.lambdas().to_vec()),
        seed,
        detail: None,
    });
    for row in explore_bound_z(m, grid.epsilons[0], grid.etas[0], &[0.1, 1.0], trials.min(20_000), seed) {
        reports.push(TrialReport {
            claim_id: format!("bound_z[m={m},gamma={}]", row.gamma),
            tier: Tier::Exploratory,
            trials: row.samples,
            violations: 0,
            min_slack: -row.k_empirical,
            tolerance: 0.0,
            witness: Some(row.argmax),
            seed,
            detail: Some(format!("K = {}", row.k_empirical)),
        });
    }
    reports.extend(tube_interval_reports(space, &grid.epsilons, seed));
    reports
}
