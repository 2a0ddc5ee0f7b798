//! Numeric fiber analysis: Fourier computation of `L`, dimension and rank
//! diagnostics, commutativity verdicts and the brute-force projection oracle.
//!
//! Everything here treats the catalog's closed forms as claims to be checked:
//! [`compute_l_numeric`] obtains the fiber kernel directly from the base
//! kernel by a Fourier integral along the group, [`reconstruct_k`] inverts it
//! back, [`fiber_dimension`] integrates the fiber diagonal over `Y`, and
//! [`commutativity_report`] bundles the residuals into one verdict per
//! frequency.  The projection oracle realizes the explicit projection formula
//! as a literal triple-nested integral and is priced accordingly.

#[cfg(test)]
mod tests;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{CatalogError, Frequency, GroupAxis, GroupModel, KernelModel};
use crate::quadrature::{
    fourier_coefficient, fourier_integral, integrate, integrate_2d, Domain1D, IntegralResult,
    QuadSpec, QuadratureError, WeightedMeasure,
};

/// Seed for the deterministic sample pairs of the default verification grid.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Default number of `(y, v)` sample pairs in verification grids.
pub const DEFAULT_PAIR_COUNT: usize = 12;

/// Errors from fiber-level computations.
#[derive(Debug, Error)]
pub enum FiberError {
    /// Model-level failures (domains, frequencies, parameters).
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    /// Quadrature failures.
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    /// The Gram matrix of the provided samples is not numerically Hermitian
    /// positive semidefinite.
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
}

/// Commutativity verdict for one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// One-dimensional fiber within tolerance: the invariant algebra
    /// restricted to this fiber is abelian.
    Commutative,
    /// Fiber dimension exceeds one (or the Schwarz equality fails).
    NonCommutative,
    /// The frequency carries no fiber at all.
    OutsideOmega,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Commutative => "commutative",
            Verdict::NonCommutative => "non-commutative",
            Verdict::OutsideOmega => "outside-omega",
        };
        f.write_str(s)
    }
}

/// Per-frequency diagnostic bundle produced by [`commutativity_report`].
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    /// The frequency this row describes.
    pub xi: Frequency,
    /// Value of the dimension integral `∫_Y L_{ξ,y}(y) dλ(y)`.
    pub numeric_dimension: f64,
    /// The model's declared fiber dimension `d_ξ`.
    pub declared_dimension: usize,
    /// Worst deviation of `∫ |q_j|² dλ` from 1 over the declared sections
    /// (0 outside Ω, where there are none).
    pub normalization_residual: f64,
    /// Worst Schwarz-equality residual over the sample pairs.
    pub schwarz_residual_max: f64,
    /// Worst reproducing-identity residual over the sample pairs.
    pub repro_residual_max: f64,
    /// Worst disagreement between the numeric Fourier integral and the
    /// closed-form fiber over the sample pairs.
    pub fourier_residual_max: f64,
    /// Verdict derived from dimension and Schwarz residual.
    pub commutative_verdict: Verdict,
    /// Whether every quadrature involved met its tolerance.  A failed
    /// frequency keeps its row (with NaN for the unobtainable numbers)
    /// instead of aborting the batch.
    pub converged: bool,
}

/// Tolerances feeding the verdict of a [`FiberReport`].
#[derive(Clone, Copy, Debug)]
pub struct VerdictTolerances {
    /// Allowed deviation of the numeric dimension from 1.
    pub dimension: f64,
    /// Allowed Schwarz residual.
    pub schwarz: f64,
}

impl Default for VerdictTolerances {
    fn default() -> Self {
        // One order looser than the quadrature defaults.
        Self { dimension: 1e-6, schwarz: 1e-8 }
    }
}

// ---------------------------------------------------------------------------
// Group-level integral helpers (1-D and 2-D product groups).
// ---------------------------------------------------------------------------

/// Fourier transform along the whole group: `∫_G conj(E(u, ξ)) f(u) dν(u)`
/// (a Fourier coefficient on the circle).  Product groups are handled as
/// iterated one-dimensional transforms with the inner level tightened.
fn fourier_along_group<F>(
    group: &GroupModel,
    mut f: F,
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(&[f64]) -> Complex64,
{
    match group.axes() {
        [GroupAxis::Line(conv)] => {
            let conv = *conv;
            fourier_integral(|u| f(&[u]), xi.components()[0], conv, spec)
        }
        [GroupAxis::Circle] => {
            let k = xi.as_integer().expect("circle frequencies are validated as integers");
            fourier_coefficient(|u| f(&[u]), k, spec)
        }
        [GroupAxis::Line(c1), GroupAxis::Line(c2)] => {
            let (c1, c2) = (*c1, *c2);
            let (x1, x2) = (xi.components()[0], xi.components()[1]);
            let inner_spec = spec.tightened(10.0);
            let f = std::cell::RefCell::new(f);
            let state = std::cell::RefCell::new(InnerState::default());
            let outer = fourier_integral(
                |u2| {
                    let mut f = f.borrow_mut();
                    let inner = fourier_integral(|u1| (f)(&[u1, u2]), x1, c1, &inner_spec);
                    state.borrow_mut().absorb(inner)
                },
                x2,
                c2,
                spec,
            );
            state.into_inner().combine(outer)
        }
        axes => unreachable!("no catalog group has {} axes", axes.len()),
    }
}

/// Plain (non-oscillatory) integral over the group's Haar measure.
fn integrate_over_group<F>(
    group: &GroupModel,
    mut f: F,
    spec: &QuadSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let axes: Vec<WeightedMeasure> = group.axes().iter().map(|a| a.haar()).collect();
    match axes.as_slice() {
        [m] => integrate(|u| f(&[u]), m, spec),
        [m1, m2] => integrate_2d(|a, b| f(&[a, b]), m1, m2, spec),
        _ => unreachable!(),
    }
}

/// Integral over the model's fiber domain `Y` against `λ`.
pub(crate) fn integrate_over_y<F>(
    model: &KernelModel,
    mut f: F,
    spec: &QuadSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let axes = model.y_measure_axes();
    match axes.as_slice() {
        [m] => integrate(|y| f(&[y]), m, spec),
        [m1, m2] => integrate_2d(|a, b| f(&[a, b]), m1, m2, spec),
        _ => unreachable!(),
    }
}

/// Accumulator for the inner level of an iterated Fourier transform.  The
/// outer level is another Fourier integral (constant weight ≤ 1), so the
/// worst absolute inner error is already on the right scale.
#[derive(Default)]
struct InnerState {
    worst_error: f64,
    all_converged: bool,
    evaluations: u64,
    failure: Option<QuadratureError>,
    started: bool,
}

impl InnerState {
    fn absorb(&mut self, inner: Result<IntegralResult, QuadratureError>) -> Complex64 {
        if !self.started {
            self.started = true;
            self.all_converged = true;
        }
        match inner {
            Ok(r) => {
                self.worst_error = self.worst_error.max(r.error_estimate);
                self.all_converged &= r.converged;
                self.evaluations += r.evaluations;
                r.value
            }
            Err(e) => {
                if self.failure.is_none() {
                    self.failure = Some(e);
                }
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    }

    fn combine(
        self,
        outer: Result<IntegralResult, QuadratureError>,
    ) -> Result<IntegralResult, QuadratureError> {
        if let Some(e) = self.failure {
            return Err(e);
        }
        let outer = outer?;
        // Convergence is the AND of the per-level gates; the combined estimate
        // is reported but does not re-gate against the final value, which can
        // be small by cancellation in oscillatory transforms.
        Ok(IntegralResult {
            value: outer.value,
            error_estimate: outer.error_estimate + self.worst_error,
            converged: outer.converged && self.all_converged,
            evaluations: outer.evaluations + self.evaluations,
        })
    }
}

// ---------------------------------------------------------------------------
// Core operations.
// ---------------------------------------------------------------------------

/// Fiber kernel by direct Fourier integration of the base kernel:
/// `L_{ξ,y}(v) = ∫_G conj(E(u, ξ)) K₀(u, v, y) dν(u)`.
///
/// This is the definition, evaluated with no knowledge of the closed form;
/// agreement with [`KernelModel::eval_l`] is the library's central check.
pub fn compute_l_numeric(
    model: &KernelModel,
    xi: &Frequency,
    y: &[f64],
    v: &[f64],
    spec: &QuadSpec,
) -> Result<IntegralResult, FiberError> {
    // Surface domain errors eagerly instead of from inside the integrand.
    model.eval_l(xi, y, v)?;
    let (y, v) = (y.to_vec(), v.to_vec());
    let res = fourier_along_group(
        model.group(),
        |u| model.eval_k0(u, &v, &y).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        xi,
        spec,
    )?;
    Ok(res)
}

/// Fourier inversion of the closed-form fiber:
/// `∫_Ω L_ξ(y, v) E(x, ξ) dν̂(ξ)`, a sum over `ℤ` for circle models.
///
/// Equals `K_{0,y}(x, v)` within tolerance, closing the loop between the
/// catalog's kernel and fiber forms.
pub fn reconstruct_k(
    model: &KernelModel,
    x: &[f64],
    y: &[f64],
    v: &[f64],
    spec: &QuadSpec,
) -> Result<IntegralResult, FiberError> {
    let group = model.group();
    let dim = group.dim();
    if x.len() != dim {
        return Err(CatalogError::DomainViolation(format!(
            "x has dimension {}, expected {dim}",
            x.len()
        ))
        .into());
    }
    let (y, v) = (y.to_vec(), v.to_vec());
    // Validate the fiber coordinates once up front.
    model.eval_l(&probe_frequency(group), &y, &v)?;
    let l = |xi: &Frequency| {
        model.eval_l(xi, &y, &v).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let res = match group.axes() {
        [GroupAxis::Line(conv)] => {
            // ∫ L(ξ) e^{+iβxξ} dν̂(ξ) is the transform at frequency −x.
            fourier_integral(|s| l(&Frequency::scalar(s)), -x[0], *conv, spec)?
        }
        [GroupAxis::Circle] => {
            let x0 = x[0];
            let lattice = WeightedMeasure::lebesgue(Domain1D::IntegerLattice);
            integrate(
                |k| l(&Frequency::integer(k as i64)) * Complex64::cis(x0 * k),
                &lattice,
                spec,
            )?
        }
        [GroupAxis::Line(c1), GroupAxis::Line(c2)] => {
            let (c1, c2) = (*c1, *c2);
            let (x1, x2) = (x[0], x[1]);
            let inner_spec = spec.tightened(10.0);
            let state = std::cell::RefCell::new(InnerState::default());
            let outer = fourier_integral(
                |s2| {
                    let inner = fourier_integral(
                        |s1| l(&Frequency::vector(vec![s1, s2])),
                        -x1,
                        c1,
                        &inner_spec,
                    );
                    state.borrow_mut().absorb(inner)
                },
                -x2,
                c2,
                spec,
            );
            state.into_inner().combine(outer)?
        }
        axes => unreachable!("no catalog group has {} axes", axes.len()),
    };
    Ok(res)
}

/// A throwaway in-Ω frequency used only to trigger coordinate validation.
fn probe_frequency(group: &GroupModel) -> Frequency {
    match group.axes() {
        [GroupAxis::Circle] => Frequency::integer(0),
        axes => Frequency::vector(vec![1.0; axes.len()]),
    }
}

/// Dimension integral `∫_Y L_{ξ,y}(y) dλ(y)`.
///
/// Near an integer for every catalog model: the declared `d_ξ` on `Ω` and 0
/// outside.
pub fn fiber_dimension(
    model: &KernelModel,
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<IntegralResult, FiberError> {
    // Validate the frequency once against a fixed in-domain point.
    let origin = vec![model.typical_y_range()[0].0; model.y_dim()];
    model.eval_l(xi, &origin, &origin)?;
    let res = integrate_over_y(
        model,
        |y| model.eval_l(xi, y, y).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        spec,
    )?;
    Ok(res)
}

/// Worst relative Schwarz-equality residual over a grid of `(y, v)` pairs:
/// `| |L_{ξ,y}(v)|² − L_{ξ,y}(y) L_{ξ,v}(v) |`, divided by the product scale
/// where it exceeds `1e−30` (absolute below, avoiding 0/0 in kernel tails).
///
/// Zero (to rounding) exactly when the fiber is rank one on the grid.
pub fn schwarz_residual(
    model: &KernelModel,
    xi: &Frequency,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64, FiberError> {
    require_in_omega(model, xi)?;
    schwarz_residual_unchecked(model, xi, pairs)
}

fn schwarz_residual_unchecked(
    model: &KernelModel,
    xi: &Frequency,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64, FiberError> {
    let mut worst = 0.0f64;
    for (y, v) in pairs {
        let lyv = model.eval_l(xi, y, v)?;
        let lyy = model.eval_l(xi, y, y)?.re;
        let lvv = model.eval_l(xi, v, v)?.re;
        let scale = lyy * lvv;
        let gap = (lyv.norm_sqr() - scale).abs();
        let residual = if scale.abs() > 1e-30 { gap / scale.abs() } else { gap };
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// Residual of the reproducing identity
/// `L_{ξ,y}(v) = ∫_Y L_{ξ,y}(w) conj(L_{ξ,v}(w)) dλ(w)` (absolute value of
/// the difference).
pub fn repro_residual(
    model: &KernelModel,
    xi: &Frequency,
    y: &[f64],
    v: &[f64],
    spec: &QuadSpec,
) -> Result<f64, FiberError> {
    require_in_omega(model, xi)?;
    let (direct, integral) = repro_parts(model, xi, y, v, spec)?;
    Ok((direct - integral.value).norm())
}

fn repro_parts(
    model: &KernelModel,
    xi: &Frequency,
    y: &[f64],
    v: &[f64],
    spec: &QuadSpec,
) -> Result<(Complex64, IntegralResult), FiberError> {
    let direct = model.eval_l(xi, y, v)?;
    let (y, v) = (y.to_vec(), v.to_vec());
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let integral = integrate_over_y(
        model,
        |w| {
            let a = model.eval_l(xi, &y, w).unwrap_or(nan);
            if a == Complex64::new(0.0, 0.0) {
                return a;
            }
            a * model.eval_l(xi, &v, w).unwrap_or(nan).conj()
        },
        spec,
    )?;
    Ok((direct, integral))
}

/// Numerical rank of the Gram matrix `[L_{ξ,y_i}(y_j)]` over the samples:
/// the count of singular values above `threshold · σ_max`.
///
/// An independent estimator of the fiber dimension that never integrates.
/// Errors with [`FiberError::DegenerateSamples`] when the matrix fails to be
/// Hermitian positive semidefinite beyond rounding, which indicates repeated
/// or invalid sample points.
pub fn gram_rank(
    model: &KernelModel,
    xi: &Frequency,
    y_samples: &[Vec<f64>],
    threshold: f64,
) -> Result<usize, FiberError> {
    let n = y_samples.len();
    let mut gram = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // Base point y_i, evaluation point y_j.
            gram[(i, j)] = model.eval_l(xi, &y_samples[i], &y_samples[j])?;
        }
    }
    let scale = gram.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(0);
    }
    let asymmetry = (&gram - gram.adjoint()).iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if asymmetry > 1e-10 * scale {
        return Err(FiberError::DegenerateSamples(format!(
            "Gram matrix asymmetry {asymmetry:.3e} exceeds 1e-10 of scale {scale:.3e}"
        )));
    }
    let eigen = nalgebra::SymmetricEigen::new(gram.clone());
    let min_eig = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-10 * scale {
        return Err(FiberError::DegenerateSamples(format!(
            "Gram matrix has negative eigenvalue {min_eig:.3e} at scale {scale:.3e}"
        )));
    }
    let svd = gram.svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    Ok(svd.singular_values.iter().filter(|&&s| s > threshold * sigma_max).count())
}

/// The direct fiber projection `(P̂_ξ h)(v) = ∫_Y h(w) conj(L_{ξ,v}(w)) dλ(w)`.
pub fn projection_direct<H>(
    model: &KernelModel,
    xi: &Frequency,
    h: H,
    v: &[f64],
    spec: &QuadSpec,
) -> Result<Complex64, FiberError>
where
    H: Fn(&[f64]) -> Complex64,
{
    require_in_omega(model, xi)?;
    let v = v.to_vec();
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let res = integrate_over_y(
        model,
        |w| {
            let hw = h(w);
            if hw == Complex64::new(0.0, 0.0) {
                return hw;
            }
            hw * model.eval_l(xi, &v, w).unwrap_or(nan).conj()
        },
        spec,
    )?;
    Ok(res.value)
}

/// Brute-force realization of the explicit projection formula
/// `((F⊗I) P (f⊗h))(ξ, v) / (F₁f)(ξ)` with the Gaussian `f(x) = e^{−‖x‖²/2}`,
/// whose Fourier transform never vanishes.
///
/// `P` is the reproducing projection of `L²(G×Y, ν⊗λ)` onto the kernel
/// space, written out as its integral against the kernel — nothing about the
/// fiber decomposition enters, which is what makes the value an independent
/// oracle for [`projection_direct`].  The cost is a triple-nested quadrature;
/// use it at a few points only.  On the circle the group transform collapses
/// to a single Fourier coefficient and no auxiliary `f` is needed.
pub fn projection_fiber_oracle<H>(
    model: &KernelModel,
    xi: &Frequency,
    h: H,
    v: &[f64],
    spec: &QuadSpec,
) -> Result<Complex64, FiberError>
where
    H: Fn(&[f64]) -> Complex64,
{
    require_in_omega(model, xi)?;
    let group = model.group().clone();
    let v = v.to_vec();
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let zero = Complex64::new(0.0, 0.0);

    if matches!(group.axes(), [GroupAxis::Circle]) {
        // Compact group: the x-transform of the convolution collapses onto
        // one Fourier coefficient of the base kernel.
        let res = integrate_over_y(
            model,
            |w| {
                let hw = h(w);
                if hw == zero {
                    return hw;
                }
                let coeff = fourier_along_group(
                    &group,
                    |u| model.eval_k0(u, &v, w).unwrap_or(nan),
                    xi,
                    spec,
                );
                hw * coeff.map(|r| r.value).unwrap_or(nan)
            },
            spec,
        )?;
        return Ok(res.value);
    }

    let gauss = |u: &[f64]| -> Complex64 {
        Complex64::new((-0.5 * u.iter().map(|c| c * c).sum::<f64>()).exp(), 0.0)
    };
    // (F₁ f)(ξ), by the same numeric transform used for the numerator.
    let denom = fourier_along_group(&group, |u| gauss(u), xi, spec)?;
    // Inner u-integrals and the oscillatory x-transform run slightly tighter
    // than the outer w-integral so their noise stays subordinate.
    let mid_spec = spec.tightened(4.0);
    let numer = integrate_over_y(
        model,
        |w| {
            let hw = h(w);
            if hw == zero {
                return hw;
            }
            let w = w.to_vec();
            // F₁ at ξ of x ↦ ∫_G f(u) K_{u,w}(x, v) dν(u), with
            // K_{u,w}(x, v) = K₀(x − u, v, w).
            let transform = fourier_along_group(
                &group,
                |x| {
                    let x = x.to_vec();
                    let smoothed = integrate_over_group(
                        &group,
                        |u| {
                            let g = gauss(u);
                            if g == zero {
                                return zero;
                            }
                            let diff: Vec<f64> =
                                x.iter().zip(u).map(|(xj, uj)| xj - uj).collect();
                            g * model.eval_k0(&diff, &v, &w).unwrap_or(nan)
                        },
                        &mid_spec,
                    );
                    smoothed.map(|r| r.value).unwrap_or(nan)
                },
                xi,
                &mid_spec,
            );
            hw * transform.map(|r| r.value).unwrap_or(nan)
        },
        spec,
    )?;
    Ok(numer.value / denom.value)
}

fn require_in_omega(model: &KernelModel, xi: &Frequency) -> Result<(), FiberError> {
    if !model.omega_contains(xi) {
        return Err(CatalogError::FrequencyOutsideOmega {
            xi: xi.to_string(),
            model: model.id(),
        }
        .into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Default verification grids.
// ---------------------------------------------------------------------------

/// The default frequency grid: `{0.25, 0.5, 1, 2, 4}` on continuous duals
/// (pairs `(s, s/2)` on `ℝ²`) and `{−4, …, 4}` on `ℤ`.
pub fn default_xi_grid(model: &KernelModel) -> Vec<Frequency> {
    let axes = model.group().axes();
    if matches!(axes, [GroupAxis::Circle]) {
        return (-4..=4).map(Frequency::integer).collect();
    }
    let base = [0.25, 0.5, 1.0, 2.0, 4.0];
    match axes.len() {
        1 => base.iter().map(|&s| Frequency::scalar(s)).collect(),
        _ => base.iter().map(|&s| Frequency::vector(vec![s, s / 2.0])).collect(),
    }
}

/// Deterministic Latin-hypercube `(y, v)` pairs from the model's typical
/// coordinate box.
pub fn default_yv_pairs(model: &KernelModel, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = model.typical_y_range();
    let dim = ranges.len();
    // One stratified axis per coordinate of y and of v.
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(2 * dim);
    for (lo, hi) in ranges.iter().cycle().take(2 * dim) {
        let mut strata: Vec<usize> = (0..count).collect();
        strata.shuffle(&mut rng);
        let width = (hi - lo) / count as f64;
        let samples = strata
            .into_iter()
            .map(|s| lo + (s as f64 + rng.gen_range(0.0..1.0)) * width)
            .collect();
        axes.push(samples);
    }
    (0..count)
        .map(|i| {
            let y = (0..dim).map(|d| axes[d][i]).collect();
            let v = (0..dim).map(|d| axes[dim + d][i]).collect();
            (y, v)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// The aggregated report.
// ---------------------------------------------------------------------------

/// One [`FiberReport`] per frequency, sorted by frequency.
///
/// Residuals are taken over `yv_pairs`; quadrature failures at one frequency
/// degrade that row (`converged = false`, NaN for missing numbers) without
/// aborting the batch.  The per-frequency loop runs in parallel.
pub fn commutativity_report(
    model: &KernelModel,
    xi_grid: &[Frequency],
    yv_pairs: &[(Vec<f64>, Vec<f64>)],
    spec: &QuadSpec,
    tols: &VerdictTolerances,
) -> Vec<FiberReport> {
    let mut reports: Vec<FiberReport> = xi_grid
        .par_iter()
        .map(|xi| single_report(model, xi, yv_pairs, spec, tols))
        .collect();
    reports.sort_by(|a, b| a.xi.lex_cmp(&b.xi));
    reports
}

fn single_report(
    model: &KernelModel,
    xi: &Frequency,
    yv_pairs: &[(Vec<f64>, Vec<f64>)],
    spec: &QuadSpec,
    tols: &VerdictTolerances,
) -> FiberReport {
    let declared = model.fiber_count(xi);
    let in_omega = model.omega_contains(xi);
    let mut converged = true;

    let numeric_dimension = match fiber_dimension(model, xi, spec) {
        Ok(r) => {
            converged &= r.converged;
            r.value.re
        }
        Err(_) => {
            converged = false;
            f64::NAN
        }
    };

    // Section normalizations, only where sections exist.
    let mut normalization_residual = 0.0f64;
    for j in 1..=declared {
        let norm = integrate_over_y(
            model,
            |w| {
                let q = match model.eval_q(xi, j, w) {
                    Ok(q) => q,
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                };
                q.conj() * q
            },
            spec,
        );
        match norm {
            Ok(r) => {
                converged &= r.converged;
                normalization_residual = normalization_residual.max((r.value.re - 1.0).abs());
            }
            Err(_) => {
                converged = false;
                normalization_residual = f64::NAN;
            }
        }
    }

    let schwarz_residual_max = match schwarz_residual_unchecked(model, xi, yv_pairs) {
        Ok(r) => r,
        Err(_) => {
            converged = false;
            f64::NAN
        }
    };

    let mut repro_residual_max = 0.0f64;
    let mut fourier_residual_max = 0.0f64;
    for (y, v) in yv_pairs {
        match repro_parts(model, xi, y, v, spec) {
            Ok((direct, integral)) => {
                converged &= integral.converged;
                repro_residual_max = repro_residual_max.max((direct - integral.value).norm());
            }
            Err(_) => {
                converged = false;
                repro_residual_max = f64::NAN;
            }
        }
        match compute_l_numeric(model, xi, y, v, spec) {
            Ok(numeric) => {
                converged &= numeric.converged;
                let closed = model
                    .eval_l(xi, y, v)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                fourier_residual_max = fourier_residual_max.max((numeric.value - closed).norm());
            }
            Err(_) => {
                converged = false;
                fourier_residual_max = f64::NAN;
            }
        }
    }

    let commutative_verdict = if !in_omega {
        Verdict::OutsideOmega
    } else if (numeric_dimension - 1.0).abs() <= tols.dimension
        && schwarz_residual_max <= tols.schwarz
    {
        Verdict::Commutative
    } else {
        Verdict::NonCommutative
    };

    FiberReport {
        xi: xi.clone(),
        numeric_dimension,
        declared_dimension: declared,
        normalization_residual,
        schwarz_residual_max,
        repro_residual_max,
        fourier_residual_max,
        commutative_verdict,
        converged,
    }
}
