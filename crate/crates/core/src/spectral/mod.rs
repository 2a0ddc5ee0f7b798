//! Spectral functions of Toeplitz operators, the diagonalizing transform on
//! kernel functions, the explicit inverse map, Berezin transforms and
//! spectrum estimates.
//!
//! A Toeplitz operator with symbol `ψ` never appears as a matrix here: its
//! complete spectral datum is the function `γ_ψ(ξ) = ∫_Y ψ |q_ξ|² dλ`
//! (a `d_ξ×d_ξ` matrix family on matrix fibers), and every operation in this
//! module either computes `γ` directly, recovers it along an independent
//! route for cross-checking, or consumes it (Berezin transform, spectrum
//! bounds).


use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{CatalogError, Frequency, KernelModel, SymbolSpec};
use crate::fiber::{self, compute_l_numeric, FiberError};
use crate::quadrature::{
    integrate, integrate_2d, IntegralResult, QuadSpec, QuadratureError, WeightedMeasure,
};

/// Errors from spectral computations.
#[derive(Debug, Error)]
pub enum SpectralError {
    /// Model-level failures (domains, frequencies, parameters, symbols).
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    /// Quadrature failures.
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    /// Failures in the underlying fiber computations.
    #[error(transparent)]
    Fiber(#[from] FiberError),
    /// A scalar operation was applied to a matrix fiber.
    #[error("fiber at ξ = {xi} has dimension {d}; use the matrix variant")]
    NonScalarFiber { xi: String, d: usize },
    /// The section vanishes at the requested anchor point.
    #[error("anchor is degenerate: |q_ξ| = {magnitude:.3e} < 1e-8 at the anchor point")]
    AnchorDegenerate { magnitude: f64 },
    /// The anchor matrix is numerically singular.
    #[error("anchor matrix is numerically singular (condition number {cond:.3e} > 1e8)")]
    SingularAnchorMatrix { cond: f64 },
    /// The diagonal kernel value in the Berezin denominator is too small.
    #[error("Berezin denominator underflow: diagonal kernel value {value:.3e} < 1e-30")]
    DenominatorUnderflow { value: f64 },
}

/// A `d×d` complex matrix value (`d ≥ 1`), as produced by the matrix-fiber
/// operations.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixValue {
    entries: DMatrix<Complex64>,
}

impl MatrixValue {
    fn new(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.nrows() >= 1 && entries.is_square(), "matrix values are square, d ≥ 1");
        Self { entries }
    }

    /// Matrix dimension `d`.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry at row `j`, column `k` (zero-based).
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    /// The underlying matrix.
    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_entry_gap(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_residual(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute deviation from the identity matrix.
    pub fn identity_residual(&self) -> f64 {
        let d = self.dim();
        (&self.entries - DMatrix::<Complex64>::identity(d, d))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()).scale(0.5);
        let mut eig: Vec<f64> =
            nalgebra::SymmetricEigen::new(h).eigenvalues.iter().cloned().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// Row-major copy of the entries (for serialization front ends).
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim()).map(|j| (0..self.dim()).map(|k| self.entries[(j, k)]).collect()).collect()
    }
}

/// Scalar-or-matrix value of a spectral function at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralValue {
    /// Value on a one-dimensional fiber.
    Scalar(Complex64),
    /// Value on a matrix fiber.
    Matrix(MatrixValue),
}

/// A spectral-function sample: the frequency and the value there.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSample {
    /// The frequency.
    pub xi: Frequency,
    /// `γ(ξ)` (scalar, or `d_ξ×d_ξ` on matrix fibers).
    pub value: SpectralValue,
}

/// Serializable view of a [`SpectralValue`]: every entry as `[re, im]`,
/// scalars as a 1×1 matrix.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct SpectralValueView {
    entries: Vec<Vec<[f64; 2]>>,
}

impl SpectralValue {
    /// Serializable row-major view.
    pub fn view(&self) -> SpectralValueView {
        let rows = match self {
            SpectralValue::Scalar(c) => vec![vec![[c.re, c.im]]],
            SpectralValue::Matrix(m) => m
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        };
        SpectralValueView { entries: rows }
    }
}

// ---------------------------------------------------------------------------
// Spectral functions γ.
// ---------------------------------------------------------------------------

/// Spectral function of the Toeplitz operator with symbol `ψ` on a
/// one-dimensional fiber: `γ_ψ(ξ) = ∫_Y ψ(v) |q_ξ(v)|² dλ(v)`.
///
/// Since `|q_ξ|² dλ` is a probability measure, `γ_ψ(ξ)` is an average of
/// `ψ`; for real `ψ` it lies between `inf ψ` and `sup ψ`.
pub fn gamma_scalar(
    model: &KernelModel,
    psi: &SymbolSpec,
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<Complex64, SpectralError> {
    let d = require_fiber(model, xi)?;
    if d != 1 {
        return Err(SpectralError::NonScalarFiber { xi: xi.to_string(), d });
    }
    psi.validate()?;
    let res = fiber::integrate_over_y(
        model,
        |w| {
            let q = model.eval_q(xi, 1, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            if q == Complex64::new(0.0, 0.0) {
                return q;
            }
            psi.eval(w) * q.norm_sqr()
        },
        spec,
    )?;
    Ok(res.value)
}

/// Matrix spectral function on a `d_ξ`-dimensional fiber: entries
/// `γ_{jk}(ξ) = ∫_Y ψ(v) conj(q_{j,ξ}(v)) q_{k,ξ}(v) dλ(v)`.
///
/// Reduces to [`gamma_scalar`] when `d_ξ = 1`; `ψ ≡ 1` gives the identity by
/// orthonormality of the sections.
pub fn gamma_matrix(
    model: &KernelModel,
    psi: &SymbolSpec,
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<MatrixValue, SpectralError> {
    let d = require_fiber(model, xi)?;
    psi.validate()?;
    let mut entries = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let res = fiber::integrate_over_y(
                model,
                |w| {
                    let qj =
                        model.eval_q(xi, j + 1, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    let qk =
                        model.eval_q(xi, k + 1, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    if qj == Complex64::new(0.0, 0.0) || qk == Complex64::new(0.0, 0.0) {
                        return Complex64::new(0.0, 0.0);
                    }
                    psi.eval(w) * qj.conj() * qk
                },
                spec,
            )?;
            entries[(j, k)] = res.value;
            if k != j {
                // For complex ψ the lower triangle is an independent
                // integral; recompute instead of assuming Hermitian.
                let res = fiber::integrate_over_y(
                    model,
                    |w| {
                        let qj = model
                            .eval_q(xi, j + 1, w)
                            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                        let qk = model
                            .eval_q(xi, k + 1, w)
                            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                        if qj == Complex64::new(0.0, 0.0) || qk == Complex64::new(0.0, 0.0) {
                            return Complex64::new(0.0, 0.0);
                        }
                        psi.eval(w) * qk.conj() * qj
                    },
                    spec,
                )?;
                entries[(k, j)] = res.value;
            }
        }
    }
    Ok(MatrixValue::new(entries))
}

// ---------------------------------------------------------------------------
// The transform R on kernel functions.
// ---------------------------------------------------------------------------

/// Applies the diagonalizing transform to the kernel function `K_{0,y}` at a
/// scalar fiber: `(R K_{0,y})(ξ) = ∫_Y L_{ξ,y}(w) conj(q_ξ(w)) dλ(w)`,
/// with the fiber kernel obtained *numerically* from the base kernel.
///
/// Equals `conj(q_ξ(y))`, which is what makes the transform explicit; the
/// numeric route keeps the check independent of the closed-form fiber.
pub fn apply_r_to_kernel(
    model: &KernelModel,
    y: &[f64],
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<Complex64, SpectralError> {
    let d = require_fiber(model, xi)?;
    if d != 1 {
        return Err(SpectralError::NonScalarFiber { xi: xi.to_string(), d });
    }
    Ok(apply_r_components(model, y, xi, spec)?[0])
}

/// Matrix-fiber analogue of [`apply_r_to_kernel`]: the column vector
/// `conj(Q_ξ(y))`, component `j` being `∫_Y L_{ξ,y}(w) conj(q_{j,ξ}(w)) dλ(w)`.
pub fn apply_r_to_kernel_vector(
    model: &KernelModel,
    y: &[f64],
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<Vec<Complex64>, SpectralError> {
    require_fiber(model, xi)?;
    apply_r_components(model, y, xi, spec)
}

fn apply_r_components(
    model: &KernelModel,
    y: &[f64],
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<Vec<Complex64>, SpectralError> {
    let d = model.fiber_count(xi);
    // The numeric fiber kernel is expensive; compute it once per quadrature
    // node and share it across the component integrals.
    let memo: RefCell<HashMap<Vec<u64>, Complex64>> = RefCell::new(HashMap::new());
    let l_numeric = |w: &[f64]| -> Complex64 {
        let key: Vec<u64> = w.iter().map(|c| c.to_bits()).collect();
        if let Some(&v) = memo.borrow().get(&key) {
            return v;
        }
        let value = compute_l_numeric(model, xi, y, w, spec)
            .map(|r| r.value)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        memo.borrow_mut().insert(key, value);
        value
    };
    let mut out = Vec::with_capacity(d);
    for j in 1..=d {
        let res = fiber::integrate_over_y(
            model,
            |w| {
                let q = model.eval_q(xi, j, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                if q == Complex64::new(0.0, 0.0) {
                    return Complex64::new(0.0, 0.0);
                }
                l_numeric(w) * q.conj()
            },
            spec,
        )?;
        out.push(res.value);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The explicit inverse map.
// ---------------------------------------------------------------------------

/// Recovers the spectral function of a Toeplitz operator from its action on
/// one kernel function:
/// `σ(ξ) = [∫_Y ψ(v) L_{ξ,y}(v) conj(q_ξ(v)) dλ(v)] / conj(q_ξ(y))`.
///
/// An independent route to the same number as [`gamma_scalar`]; the two are
/// compared for cross-validation.  The anchor `y` must not be a zero of the
/// section (`|q_ξ(y)| ≥ 1e−8` enforced).
pub fn lambda_inverse_toeplitz(
    model: &KernelModel,
    psi: &SymbolSpec,
    xi: &Frequency,
    y_anchor: &[f64],
    spec: &QuadSpec,
) -> Result<Complex64, SpectralError> {
    let d = require_fiber(model, xi)?;
    if d != 1 {
        return Err(SpectralError::NonScalarFiber { xi: xi.to_string(), d });
    }
    psi.validate()?;
    let anchor_q = model.eval_q(xi, 1, y_anchor)?;
    if anchor_q.norm() < 1e-8 {
        return Err(SpectralError::AnchorDegenerate { magnitude: anchor_q.norm() });
    }
    let y_anchor = y_anchor.to_vec();
    let res = fiber::integrate_over_y(
        model,
        |w| {
            let l =
                model.eval_l(xi, &y_anchor, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            if l == Complex64::new(0.0, 0.0) {
                return l;
            }
            let q = model.eval_q(xi, 1, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            psi.eval(w) * l * q.conj()
        },
        spec,
    )?;
    Ok(res.value / anchor_q.conj())
}

/// Matrix-fiber inverse map: recovers `σ(ξ) = γ_ψ(ξ)` by solving the linear
/// system `σ · A = B` against the anchor matrix `A = [conj(Q_ξ(y_i))]`
/// (columns indexed by anchors), where column `i` of `B` is
/// `∫_Y ψ(v) L_{ξ,y_i}(v) conj(Q_ξ(v)) dλ(v)`.
///
/// Requires exactly `d_ξ` anchors making `A` well conditioned; the condition
/// number is checked against `1e8`.
pub fn lambda_inverse_matrix(
    model: &KernelModel,
    psi: &SymbolSpec,
    xi: &Frequency,
    y_anchors: &[Vec<f64>],
    spec: &QuadSpec,
) -> Result<MatrixValue, SpectralError> {
    let d = require_fiber(model, xi)?;
    psi.validate()?;
    if y_anchors.len() != d {
        return Err(CatalogError::DomainViolation(format!(
            "need exactly {d} anchors for a {d}-dimensional fiber, got {}",
            y_anchors.len()
        ))
        .into());
    }
    let anchor = anchor_matrix(model, xi, y_anchors)?;
    check_condition(&anchor)?;
    let mut b = DMatrix::<Complex64>::zeros(d, d);
    for (i, y) in y_anchors.iter().enumerate() {
        for j in 0..d {
            let res = fiber::integrate_over_y(
                model,
                |w| {
                    let l = model.eval_l(xi, y, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    if l == Complex64::new(0.0, 0.0) {
                        return l;
                    }
                    let q =
                        model.eval_q(xi, j + 1, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    psi.eval(w) * l * q.conj()
                },
                spec,
            )?;
            b[(j, i)] = res.value;
        }
    }
    // σ A = B  ⇔  Aᵀ σᵀ = Bᵀ, solved columnwise by LU.
    let lu = anchor.transpose().lu();
    let sigma_t = lu
        .solve(&b.transpose())
        .ok_or(SpectralError::SingularAnchorMatrix { cond: f64::INFINITY })?;
    Ok(MatrixValue::new(sigma_t.transpose()))
}

/// The anchor matrix `A[j,i] = conj(q_{j,ξ}(y_i))`.
fn anchor_matrix(
    model: &KernelModel,
    xi: &Frequency,
    y_anchors: &[Vec<f64>],
) -> Result<DMatrix<Complex64>, SpectralError> {
    let d = y_anchors.len();
    let mut a = DMatrix::<Complex64>::zeros(d, d);
    for (i, y) in y_anchors.iter().enumerate() {
        for j in 0..d {
            a[(j, i)] = model.eval_q(xi, j + 1, y)?.conj();
        }
    }
    Ok(a)
}

fn check_condition(a: &DMatrix<Complex64>) -> Result<(), SpectralError> {
    let svd = a.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(cond <= 1e8) {
        return Err(SpectralError::SingularAnchorMatrix { cond });
    }
    Ok(())
}

/// Deterministic anchor points for [`lambda_inverse_matrix`]: quantiles of
/// the fiber probability measure `|q_{1,ξ}|² dλ` along an evenly spaced
/// ladder from 20% to 80%, widening automatically (10–90%, then 5–95%) when
/// the resulting anchor matrix is ill conditioned.
///
/// `λ` itself need not be finite, so quantiles are taken in the fiber's own
/// ground-state distribution, which is a probability measure for every
/// model.
pub fn default_matrix_anchors(
    model: &KernelModel,
    xi: &Frequency,
    spec: &QuadSpec,
) -> Result<Vec<Vec<f64>>, SpectralError> {
    let d = require_fiber(model, xi)?;
    for (lo, hi) in [(0.2, 0.8), (0.1, 0.9), (0.05, 0.95)] {
        let probabilities: Vec<f64> = if d == 1 {
            vec![0.5]
        } else {
            (0..d).map(|i| lo + (hi - lo) * i as f64 / (d - 1) as f64).collect()
        };
        let anchors: Result<Vec<Vec<f64>>, SpectralError> = probabilities
            .iter()
            .map(|&p| ground_state_quantile(model, xi, p, spec).map(|y| vec![y]))
            .collect();
        let anchors = anchors?;
        let a = anchor_matrix(model, xi, &anchors)?;
        if check_condition(&a).is_ok() {
            return Ok(anchors);
        }
    }
    Err(SpectralError::SingularAnchorMatrix { cond: f64::INFINITY })
}

/// The `p`-quantile of the probability measure `|q_{1,ξ}|² dλ` on a
/// one-dimensional fiber coordinate, by bisection on the distribution
/// function.
fn ground_state_quantile(
    model: &KernelModel,
    xi: &Frequency,
    p: f64,
    spec: &QuadSpec,
) -> Result<f64, SpectralError> {
    debug_assert!(model.y_dim() == 1, "quantile anchors apply to scalar fiber coordinates");
    let cdf = |t: f64| -> Result<f64, SpectralError> {
        let res = fiber::integrate_over_y(
            model,
            |w| {
                if w[0] > t {
                    return Complex64::new(0.0, 0.0);
                }
                let q = model.eval_q(xi, 1, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                Complex64::new(q.norm_sqr(), 0.0)
            },
            spec,
        )?;
        Ok(res.value.re)
    };
    // Bracket the quantile, growing the upper end until the mass exceeds p.
    let (range_lo, range_hi) = model.typical_y_range()[0];
    let mut lo = range_lo - (range_hi - range_lo);
    let mut hi = range_hi;
    for _ in 0..60 {
        if cdf(hi)? >= p {
            break;
        }
        hi += range_hi - range_lo;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * (1.0 + hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Berezin transform.
// ---------------------------------------------------------------------------

/// Berezin transform of the Toeplitz operator with symbol `ψ`, evaluated at
/// fiber coordinate `y`:
///
/// `Ber(T_ψ)(y) = ∫_Ω tr(γ_ψ(ξ) Q_ξ(y) Q_ξ(y)*) dν̂(ξ) / ∫_Ω L_{ξ,y}(y) dν̂(ξ)`.
///
/// The value is independent of the group coordinate by construction (it
/// never enters).  On scalar fibers the trace pairing reduces to
/// `γ_ψ(ξ) |q_ξ(y)|²`; the denominator is the diagonal kernel value
/// `K₀(0, y, y)` by Fourier inversion.  `γ` is evaluated lazily and memoized
/// per quadrature node within one call.
pub fn berezin(
    model: &KernelModel,
    psi: &SymbolSpec,
    y: &[f64],
    spec: &QuadSpec,
) -> Result<Complex64, SpectralError> {
    psi.validate()?;
    let origin = vec![0.0; model.group().dim()];
    let diagonal = model.eval_k0(&origin, y, y)?.re;
    if diagonal.abs() < 1e-30 {
        return Err(SpectralError::DenominatorUnderflow { value: diagonal });
    }
    let memo: RefCell<HashMap<Vec<u64>, Complex64>> = RefCell::new(HashMap::new());
    let numerator = integrate_over_omega(model, spec, |xi| {
        if !model.omega_contains(xi) {
            return Complex64::new(0.0, 0.0);
        }
        let weight = section_pairing(model, xi, y, psi, spec, &memo);
        weight.unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })?;
    let denominator = integrate_over_omega(model, spec, |xi| {
        model.eval_l(xi, y, y).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })?;
    if denominator.value.norm() < 1e-30 {
        return Err(SpectralError::DenominatorUnderflow { value: denominator.value.norm() });
    }
    Ok(numerator.value / denominator.value)
}

/// `tr(γ_ψ(ξ) Q_ξ(y) Q*) = Σ_{jk} conj(q_j(y)) γ_{jk}(ξ) q_k(y)`, with the
/// `γ` factor memoized per frequency node.
fn section_pairing(
    model: &KernelModel,
    xi: &Frequency,
    y: &[f64],
    psi: &SymbolSpec,
    spec: &QuadSpec,
    memo: &RefCell<HashMap<Vec<u64>, Complex64>>,
) -> Result<Complex64, SpectralError> {
    let d = model.fiber_count(xi);
    if d == 1 {
        let key: Vec<u64> = xi.components().iter().map(|c| c.to_bits()).collect();
        // Look up before the `match`: a `Ref` held in an `if let` scrutinee
        // would still be alive when the miss arm re-borrows mutably.
        let cached = memo.borrow().get(&key).copied();
        let gamma = match cached {
            Some(g) => g,
            None => {
                let g = gamma_scalar(model, psi, xi, spec)?;
                memo.borrow_mut().insert(key, g);
                g
            }
        };
        let q = model.eval_q(xi, 1, y)?;
        Ok(gamma * q.norm_sqr())
    } else {
        // Matrix fibers: γ entries share the memo table, keyed by frequency
        // plus a 1-based entry index (so the scalar key never collides).
        let entry_key = |idx: usize| -> Vec<u64> {
            let mut key: Vec<u64> = xi.components().iter().map(|c| c.to_bits()).collect();
            key.push(idx as u64 + 1);
            key
        };
        if !memo.borrow().contains_key(&entry_key(0)) {
            let g = gamma_matrix(model, psi, xi, spec)?;
            let mut memo = memo.borrow_mut();
            for j in 0..d {
                for k in 0..d {
                    memo.insert(entry_key(j * d + k), g.entry(j, k));
                }
            }
        }
        let memo = memo.borrow();
        let mut out = Complex64::new(0.0, 0.0);
        for j in 0..d {
            let qj = model.eval_q(xi, j + 1, y)?;
            for k in 0..d {
                let qk = model.eval_q(xi, k + 1, y)?;
                out += qj.conj() * memo[&entry_key(j * d + k)] * qk;
            }
        }
        Ok(out)
    }
}

/// Plain integral over the dual domain `Ω` against `ν̂` (a lattice sum for
/// circle models).  The integrand sees the full frequency vector.
fn integrate_over_omega<F>(
    model: &KernelModel,
    spec: &QuadSpec,
    mut f: F,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(&Frequency) -> Complex64,
{
    let axes: Vec<WeightedMeasure> = model.omega_measure_axes();
    match axes.as_slice() {
        [m] => integrate(|s| f(&Frequency::scalar(s)), m, spec),
        [m1, m2] => integrate_2d(|a, b| f(&Frequency::vector(vec![a, b])), m1, m2, spec),
        _ => unreachable!("no catalog model has a dual of dimension > 2"),
    }
}

/// Energy of the sections at a fixed fiber coordinate,
/// `∫_Ω Σ_j |q_{j,ξ}(y)|² dν̂(ξ)`.
///
/// By the Plancherel identity for the fiber decomposition this equals the
/// diagonal kernel value `K₀(0, y, y)`; the comparison is a standing
/// cross-check that sections, dual measure and kernel normalization agree.
pub fn section_energy_integral(
    model: &KernelModel,
    y: &[f64],
    spec: &QuadSpec,
) -> Result<IntegralResult, SpectralError> {
    model.eval_k0(&vec![0.0; model.group().dim()], y, y)?;
    let res = integrate_over_omega(model, spec, |xi| {
        if !model.omega_contains(xi) {
            return Complex64::new(0.0, 0.0);
        }
        let mut sum = 0.0;
        for j in 1..=model.fiber_count(xi) {
            match model.eval_q(xi, j, y) {
                Ok(q) => sum += q.norm_sqr(),
                Err(_) => return Complex64::new(f64::NAN, f64::NAN),
            }
        }
        Complex64::new(sum, 0.0)
    })?;
    Ok(res)
}

// ---------------------------------------------------------------------------
// Spectrum estimates.
// ---------------------------------------------------------------------------

/// Inner estimate of the operator spectrum from a frequency grid: the
/// minimum and maximum of `γ_ψ` (of its Hermitian eigenvalues on matrix
/// fibers) over the grid, plus the sup-norm estimate `max |γ|`.
///
/// The essential range over a continuous `Ω` is not finitely computable, so
/// this is explicitly a grid-sampled inner estimate.
pub fn spectrum_range(
    model: &KernelModel,
    psi: &SymbolSpec,
    xi_grid: &[Frequency],
    spec: &QuadSpec,
) -> Result<(f64, f64, f64), SpectralError> {
    psi.validate()?;
    if xi_grid.is_empty() {
        return Err(CatalogError::DomainViolation("spectrum grid is empty".into()).into());
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for xi in xi_grid {
        let d = require_fiber(model, xi)?;
        if d == 1 {
            let g = gamma_scalar(model, psi, xi, spec)?;
            min = min.min(g.re);
            max = max.max(g.re);
        } else {
            let g = gamma_matrix(model, psi, xi, spec)?;
            let eig = g.hermitian_eigenvalues();
            min = min.min(eig[0]);
            max = max.max(eig[eig.len() - 1]);
        }
    }
    Ok((min, max, min.abs().max(max.abs())))
}

fn require_fiber(model: &KernelModel, xi: &Frequency) -> Result<usize, SpectralError> {
    let d = model.fiber_count(xi);
    if d == 0 {
        return Err(CatalogError::FrequencyOutsideOmega {
            xi: xi.to_string(),
            model: model.id(),
        }
        .into());
    }
    Ok(d)
}
