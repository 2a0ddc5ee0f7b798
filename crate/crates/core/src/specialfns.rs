//! Orthogonal polynomial recurrences and the Mexican-hat wavelet profile.
//!
//! The Laguerre polynomials parameterize the fiber sections of the half-plane
//! kernel families, the Jacobi polynomials `P_n^{(0,1)}` appear in the closed
//! form of the polyanalytic kernel, and the Mexican-hat wavelet drives the
//! affine (wavelet) kernel model.  The wavelet's admissibility constant is
//! calibrated numerically on first use and cached for the process lifetime.

use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::{integrate, Domain1D, QuadSpec, WeightedMeasure};

/// Errors raised by special-function setup.
#[derive(Debug, Error)]
pub enum SpecialFnError {
    /// The numerical calibration of the wavelet admissibility constant did
    /// not converge or produced a nonsensical value.
    #[error("wavelet admissibility normalization failed: {0}")]
    NormalizationFailure(String),
}

/// Laguerre polynomial `L_k(x)` by the three-term recurrence
/// `(k+1) L_{k+1}(x) = (2k+1-x) L_k(x) - k L_{k-1}(x)`.
///
/// ```
/// use rkhsdiag_core::specialfns::laguerre;
/// assert_eq!(laguerre(0, 0.7), 1.0);
/// assert_eq!(laguerre(1, 0.7), 1.0 - 0.7);
/// assert!((laguerre(2, 0.7) - (1.0 - 2.0 * 0.7 + 0.7 * 0.7 / 2.0)).abs() < 1e-15);
/// ```
pub fn laguerre(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => 1.0 - x,
        _ => {
            let mut prev = 1.0;
            let mut curr = 1.0 - x;
            for j in 1..k {
                let jf = j as f64;
                let next = ((2.0 * jf + 1.0 - x) * curr - jf * prev) / (jf + 1.0);
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// Jacobi polynomial `P_n^{(0,1)}(x)` by the three-term recurrence
/// `(n+1)(2n-1) P_n = [(2n+1)(2n-1)x - 1] P_{n-1} - (n-1)(2n+1) P_{n-2}`.
///
/// ```
/// use rkhsdiag_core::specialfns::jacobi01;
/// assert_eq!(jacobi01(1, 0.0), -0.5);
/// assert_eq!(jacobi01(4, 1.0), 1.0);
/// ```
pub fn jacobi01(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 0.5 * (3.0 * x - 1.0),
        _ => {
            let mut prev = 1.0;
            let mut curr = 0.5 * (3.0 * x - 1.0);
            for j in 2..=n {
                let jf = j as f64;
                let next = (((2.0 * jf + 1.0) * (2.0 * jf - 1.0) * x - 1.0) * curr
                    - (jf - 1.0) * (2.0 * jf + 1.0) * prev)
                    / ((jf + 1.0) * (2.0 * jf - 1.0));
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// The Mexican-hat wavelet `ψ(t) = c (1 - t²) e^{-t²/2}` together with its
/// Fourier profile under the `e^{2πitξ}` pairing,
/// `(Fψ)(ξ) = c √(2π) (2πξ)² e^{-2π²ξ²}`.
///
/// The constant `c` normalizes the admissibility integral
/// `∫₀^∞ |(Fψ)(tξ)|² dt/t` to 1, which makes the associated affine kernel
/// fiber have unit norm.  `(Fψ)(0) = 0` exactly.
#[derive(Clone, Copy, Debug)]
pub struct WaveletModel {
    admissibility_constant: f64,
}

impl WaveletModel {
    /// The calibrated normalization constant `c`.
    pub fn admissibility_constant(&self) -> f64 {
        self.admissibility_constant
    }

    /// Time profile `ψ(t)`.
    pub fn time_profile(&self, t: f64) -> f64 {
        // Far outside the Gaussian envelope the value underflows to zero;
        // return it directly so the polynomial factor cannot overflow first.
        if t.abs() > 1e150 {
            return 0.0;
        }
        self.admissibility_constant * (1.0 - t * t) * (-0.5 * t * t).exp()
    }

    /// Frequency profile `(Fψ)(ξ)`; real and even, vanishing at `ξ = 0`.
    pub fn freq_profile(&self, xi: f64) -> f64 {
        self.admissibility_constant * freq_profile_raw(xi)
    }
}

/// The unnormalized (`c = 1`) frequency profile used during calibration.
fn freq_profile_raw(xi: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let s = two_pi * xi;
    if s.abs() > 1e150 {
        return 0.0;
    }
    two_pi.sqrt() * s * s * (-0.5 * s * s).exp()
}

/// The Mexican-hat wavelet with its admissibility constant computed
/// numerically on first use and cached afterwards.
pub fn mexican_hat() -> Result<WaveletModel, SpecialFnError> {
    static CONSTANT: OnceLock<Result<f64, String>> = OnceLock::new();
    let c = CONSTANT.get_or_init(|| {
        // ∫₀^∞ |Fψ_raw(t)|² dt/t in log coordinates; the integrand decays
        // superexponentially in both directions of t = ln x.
        let measure =
            WeightedMeasure::with_density(Domain1D::HalfLine { a: 0.0 }, 1.0, |t| 1.0 / t)
                .with_log_substitution();
        let spec = QuadSpec { abs_tol: 1e-13, rel_tol: 1e-12, ..QuadSpec::default() };
        let r = integrate(
            |t| {
                let v = freq_profile_raw(t);
                Complex64::new(v * v, 0.0)
            },
            &measure,
            &spec,
        )
        .map_err(|e| e.to_string())?;
        if !r.converged {
            return Err(format!(
                "admissibility integral did not converge (error estimate {})",
                r.error_estimate
            ));
        }
        let total = r.value.re;
        if !(total.is_finite() && total > 0.0) {
            return Err(format!("admissibility integral evaluated to {total}"));
        }
        Ok(1.0 / total.sqrt())
    });
    match c {
        Ok(c) => Ok(WaveletModel { admissibility_constant: *c }),
        Err(e) => Err(SpecialFnError::NormalizationFailure(e.clone())),
    }
}
