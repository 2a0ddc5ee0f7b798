//! Oscillatory transforms: Fourier integrals along the real line and Fourier
//! coefficients on the circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Engine, IntegralResult, QuadSpec, QuadratureError, MAX_PHASE_RATE};

/// Fourier pairing conventions for a real group axis.
///
/// The convention fixes both the character family and the self-dual Haar
/// normalization, so transform and inverse transform use the same constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourierConvention {
    /// Characters `e^{ixξ}`, Haar measure `dx/√(2π)` on both sides.
    Unitary,
    /// Characters `e^{2πixξ}`, plain Lebesgue measure on both sides.
    Ordinary,
}

impl FourierConvention {
    /// The factor `β` in `E(x, ξ) = e^{iβxξ}`.
    pub fn phase_factor(self) -> f64 {
        match self {
            FourierConvention::Unitary => 1.0,
            FourierConvention::Ordinary => 2.0 * std::f64::consts::PI,
        }
    }

    /// The constant in front of `∫ · dx` implementing the Haar normalization.
    pub fn measure_norm(self) -> f64 {
        match self {
            FourierConvention::Unitary => 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            FourierConvention::Ordinary => 1.0,
        }
    }

    /// The character `E(x, ξ)`.
    pub fn character(self, x: f64, xi: f64) -> Complex64 {
        Complex64::cis(self.phase_factor() * x * xi)
    }
}

/// Fourier transform `∫ conj(E(x, ξ)) f(x) dν(x)` of `f` along the real line,
/// with the character and Haar normalization fixed by `convention`.
///
/// The phase rate `|βξ|` must stay within [`MAX_PHASE_RATE`]; the seed
/// partition is refined to at most half an oscillation period per piece so the
/// embedded error estimate cannot alias entire oscillations away.
pub fn fourier_integral<F>(
    mut f: F,
    xi: f64,
    convention: FourierConvention,
    spec: &QuadSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    if !xi.is_finite() {
        return Err(QuadratureError::InvalidSpec(format!("frequency must be finite, got {xi}")));
    }
    let beta = convention.phase_factor();
    let rate = (beta * xi).abs();
    if rate > MAX_PHASE_RATE {
        return Err(QuadratureError::OscillationBudget { rate, max: MAX_PHASE_RATE });
    }
    let mut engine = Engine::new(spec);
    let w = -beta * xi;
    let mut g = move |x: f64| f(x) * Complex64::cis(w * x);
    let (value, error, floor) = engine.oscillatory_full_line(&mut g, rate)?;
    let norm = convention.measure_norm();
    Ok(IntegralResult::finish(
        value * norm,
        error * norm,
        floor * norm,
        engine.evaluations(),
        spec,
    ))
}

/// Fourier coefficient `(1/2π) ∫₀^{2π} e^{−iξu} f(u) du` of a `2π`-periodic
/// function, by the trapezoidal rule on [`QuadSpec::circle_nodes`] equispaced
/// nodes with a half-grid Richardson error estimate.
///
/// Requests with `|ξ| > circle_nodes / 4` are rejected as aliasing risks: the
/// rule is exact (to rounding) only while coefficient index plus integrand
/// bandwidth stay clear of the grid's Nyquist index.
pub fn fourier_coefficient<F>(
    mut f: F,
    xi: i64,
    spec: &QuadSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    let n = spec.circle_nodes;
    let limit = (n / 4) as i64;
    if xi.abs() > limit {
        return Err(QuadratureError::AliasingSuspected { xi, nodes: n, limit });
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut full = Complex64::new(0.0, 0.0);
    let mut half = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let u = k as f64 * step;
        let v = f(u);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QuadratureError::NonFiniteEvaluation { x: u });
        }
        let term = v * Complex64::cis(-(xi as f64) * u);
        full += term;
        if k % 2 == 0 {
            half += term;
        }
        abs_sum += v.norm();
    }
    let value = full / n as f64;
    let coarse = half / (n / 2) as f64;
    let floor = 8.0 * f64::EPSILON * abs_sum / n as f64;
    let error = (value - coarse).norm().max(floor);
    Ok(IntegralResult::finish(value, error, floor, n as u64, spec))
}
