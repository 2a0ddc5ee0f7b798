//! Numerical diagnostics for translation-invariant reproducing kernel structures.
//!
//! The library studies reproducing kernels `K` on a product `G × Y` of an abelian
//! group axis and a vertical axis that are invariant under translations along `G`.
//! Conjugating by the Fourier transform along `G` turns every such kernel into a
//! field of *fiber kernels* `L_{ξ,·}(·)` indexed by the dual variable `ξ`, and the
//! operator algebra attached to `K` is commutative exactly when every fiber has
//! rank one.  The crate provides:
//!
//! * [`quadrature`] — adaptive complex-valued integration over the measures and
//!   Fourier pairings the kernel catalog needs,
//! * [`specialfns`] — Laguerre and Jacobi recurrences plus the Mexican-hat
//!   wavelet profile with a numerically calibrated admissibility constant,
//! * [`catalog`] — nine built-in kernel families with closed-form kernels,
//!   fiber kernels, fiber sections and (where available) spectral functions,
//! * [`fiber`] — numerical fiber analysis: Fourier extraction of `L`, fiber
//!   dimension, Schwarz and reproducing residuals, Gram rank, and per-frequency
//!   commutativity reports,
//! * [`spectral`] — spectral functions of vertical Toeplitz operators, the
//!   inverse-transform route to the same quantities, Berezin transforms and
//!   spectrum range estimates.
//!
//! All floating point work is `f64`; integration results carry explicit error
//! estimates and convergence flags rather than failing silently.

pub mod catalog;
pub mod fiber;
pub mod quadrature;
pub mod specialfns;
pub mod spectral;

pub use num_complex::Complex64;
