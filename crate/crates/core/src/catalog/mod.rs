//! Catalog of built-in translation-invariant kernel models.
//!
//! Each model describes a reproducing kernel on a product `G × Y` of an
//! abelian group axis and a fiber domain, invariant under translation in the
//! group coordinate: `K_{x,y}(u, v) = K₀(u − x, v, y)`.  The catalog exposes
//! the pieces the rest of the library consumes:
//!
//! * the base kernel `K₀` ([`KernelModel::eval_k`]),
//! * the fiber family `L_ξ(y, v)` obtained by a Fourier transform of `K₀`
//!   along `G` ([`KernelModel::eval_l`]), supported on the set `Ω` of
//!   frequencies where the fiber is nonzero,
//! * normalized sections `q_{j,ξ}` diagonalizing each fiber
//!   ([`KernelModel::eval_q`]), with `L_ξ(y, v) = Σ_j conj(q_j(y)) q_j(v)`,
//! * the reference measures on `Y` and on `Ω` used by every integral, and
//! * closed-form spectral functions `γ_ψ(ξ)` where a printed formula exists
//!   ([`KernelModel::gamma_closed`]), kept as an independent check against
//!   the quadrature route.
//!
//! Seven of the nine families have one-dimensional fibers everywhere on `Ω`
//! (the commutative case); the rank-`n` polynomial family is the
//! non-commutative counterexample, and the degree-`m` variant restricts it
//! back to a single section.  All evaluations are guarded against the extreme
//! probe arguments used by the adaptive quadrature truncation scan: values
//! that mathematically underflow return exactly `0.0`.

mod forms;
pub mod group;
pub mod symbols;


use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::{
    integrate, Domain1D, FourierConvention, IntegralResult, QuadSpec, QuadratureError,
    WeightedMeasure,
};
use crate::specialfns::{SpecialFnError, WaveletModel};

pub use group::{Frequency, GroupAxis, GroupModel};
pub use symbols::{SymbolKind, SymbolSpec};

/// Errors reported by catalog lookups and evaluations.
#[derive(Debug, Error)]
pub enum CatalogError {
    /// The requested model id is not in the catalog.
    #[error("unknown model '{0}'; run `list` for the available ids")]
    UnknownModel(String),
    /// A model parameter was missing, malformed or out of range.
    #[error("invalid model parameter: {0}")]
    InvalidParam(String),
    /// An evaluation point lies outside the model's domain.
    #[error("domain violation: {0}")]
    DomainViolation(String),
    /// The frequency is not in the fiber support `Ω`.
    #[error("frequency {xi} lies outside the fiber support of '{model}'")]
    FrequencyOutsideOmega {
        /// Offending frequency, rendered as text.
        xi: String,
        /// Model id.
        model: &'static str,
    },
    /// A fiber section index outside `1..=d`.
    #[error("fiber index {j} out of range 1..={d}")]
    IndexOutOfRange {
        /// Requested index.
        j: usize,
        /// Fiber dimension at the requested frequency.
        d: usize,
    },
    /// A symbol specification failed validation.
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    /// A special-function precomputation failed.
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
    /// A closed-form quadrature failed.
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Shape of the fiber support `Ω` inside the dual group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaKind {
    /// `(0, ∞)` on a real dual axis.
    PositiveReals,
    /// `ℝ ∖ {0}`.
    NonzeroReals,
    /// All of the dual group (every coordinate unrestricted).
    Everything,
    /// `{0, 1, 2, …}` on an integer dual axis.
    NonnegativeIntegers,
    /// All of `ℤ`.
    AllIntegers,
}

/// A model family together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    /// Analytic model on the upper half-plane picture: `G = ℝ`, `Y = (0, ∞)`.
    VerticalAnalytic,
    /// Harmonic (two-sided) variant of the analytic model.
    VerticalHarmonic,
    /// Rank-one polynomial model of degree `m ≥ 1`; `m = 1` is the analytic
    /// model.
    VerticalTruePoly {
        /// Degree parameter.
        m: usize,
    },
    /// Rank-`n` polynomial model, the non-commutative family; `n = 1` is the
    /// analytic model.
    VerticalPoly {
        /// Fiber rank.
        n: usize,
    },
    /// Continuous-wavelet model with the built-in admissible profile:
    /// `G = ℝ`, `Y = (0, ∞)` with scale measure `dv/v²`.
    WaveletAffine,
    /// Analytic model on the disk picture: `G` = circle, `Y = [0, 1)`.
    RadialAnalytic,
    /// Harmonic variant of the disk model.
    RadialHarmonic,
    /// Conformal strip model: `G = ℝ`, `Y = (0, π)`.
    AngularAnalytic,
    /// Gaussian radial-basis model on `ℝⁿ × ℝⁿ`, `n ∈ {1, 2}`, width `α > 0`.
    GaussianRbf {
        /// Group dimension.
        n: usize,
        /// Width parameter.
        alpha: f64,
    },
}

/// Catalog entry describing one model family for `list`-style output.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ModelInfo {
    /// Canonical id, also the spec-string prefix.
    pub id: &'static str,
    /// Human-readable parameter syntax, empty when the family has none.
    pub parameters: &'static str,
    /// One-line description.
    pub summary: &'static str,
    /// Fiber rank on `Ω` ("1" or the rank parameter).
    pub fiber_rank: &'static str,
    /// Whether [`KernelModel::gamma_closed`] is available.
    pub closed_form_gamma: bool,
}

/// The nine built-in families in canonical order.
pub fn list_models() -> Vec<ModelInfo> {
    vec![
        ModelInfo {
            id: "vertical-analytic",
            parameters: "",
            summary: "analytic kernel on the half-plane picture, line group",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "vertical-harmonic",
            parameters: "",
            summary: "two-sided harmonic variant of the half-plane kernel",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "vertical-true-poly",
            parameters: "m=<1..8> (default 2)",
            summary: "degree-m rank-one polynomial kernel on the half-plane",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "vertical-poly",
            parameters: "n=<1..8> (default 2)",
            summary: "rank-n polynomial kernel, the non-commuting family",
            fiber_rank: "n",
            closed_form_gamma: false,
        },
        ModelInfo {
            id: "wavelet-affine",
            parameters: "",
            summary: "continuous-wavelet kernel with the built-in admissible profile",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "radial-analytic",
            parameters: "",
            summary: "analytic kernel on the disk picture, circle group",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "radial-harmonic",
            parameters: "",
            summary: "two-sided harmonic variant of the disk kernel",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "angular-analytic",
            parameters: "",
            summary: "conformal strip kernel, line group with bounded fiber domain",
            fiber_rank: "1",
            closed_form_gamma: true,
        },
        ModelInfo {
            id: "gaussian-rbf",
            parameters: "n=<1|2>, alpha=<positive> (defaults n=1, alpha=1)",
            summary: "Gaussian radial-basis kernel on ℝⁿ with Gaussian fiber measure",
            fiber_rank: "1",
            closed_form_gamma: false,
        },
    ]
}

/// Looks a model up by spec string, e.g. `"vertical-poly:n=2"`.
///
/// The syntax is `id` or `id:key=value,key=value`; accepted keys are `m`
/// (true-poly degree), `n` (poly rank or radial-basis dimension) and `alpha`
/// (radial-basis width).
pub fn get_model(spec: &str) -> Result<KernelModel, CatalogError> {
    let (id, params) = match spec.split_once(':') {
        Some((id, params)) => (id.trim(), Some(params)),
        None => (spec.trim(), None),
    };
    let mut m = None;
    let mut n = None;
    let mut alpha = None;
    if let Some(params) = params {
        for item in params.split(',') {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                CatalogError::InvalidParam(format!("expected key=value, got '{item}'"))
            })?;
            let value = value.trim();
            match key.trim() {
                "m" => m = Some(parse_count(value, "m")?),
                "n" => n = Some(parse_count(value, "n")?),
                "alpha" => {
                    alpha = Some(value.parse::<f64>().map_err(|_| {
                        CatalogError::InvalidParam(format!("alpha must be a number, got '{value}'"))
                    })?)
                }
                other => {
                    return Err(CatalogError::InvalidParam(format!(
                        "unknown parameter '{other}' (accepted: m, n, alpha)"
                    )))
                }
            }
        }
    }
    let reject_params = |kind: ModelKind| {
        if m.is_some() || n.is_some() || alpha.is_some() {
            Err(CatalogError::InvalidParam(format!(
                "model '{}' takes no parameters",
                kind.id()
            )))
        } else {
            Ok(kind)
        }
    };
    let kind = match id {
        "vertical-analytic" => reject_params(ModelKind::VerticalAnalytic)?,
        "vertical-harmonic" => reject_params(ModelKind::VerticalHarmonic)?,
        "vertical-true-poly" => {
            reject_extras("vertical-true-poly", n, alpha)?;
            ModelKind::VerticalTruePoly { m: m.unwrap_or(2) }
        }
        "vertical-poly" => {
            reject_extras("vertical-poly", m, alpha)?;
            ModelKind::VerticalPoly { n: n.unwrap_or(2) }
        }
        "wavelet-affine" => reject_params(ModelKind::WaveletAffine)?,
        "radial-analytic" => reject_params(ModelKind::RadialAnalytic)?,
        "radial-harmonic" => reject_params(ModelKind::RadialHarmonic)?,
        "angular-analytic" => reject_params(ModelKind::AngularAnalytic)?,
        "gaussian-rbf" => {
            if m.is_some() {
                return Err(CatalogError::InvalidParam(
                    "model 'gaussian-rbf' accepts n and alpha, not m".into(),
                ));
            }
            ModelKind::GaussianRbf { n: n.unwrap_or(1), alpha: alpha.unwrap_or(1.0) }
        }
        other => return Err(CatalogError::UnknownModel(other.to_string())),
    };
    KernelModel::new(kind)
}

fn parse_count(value: &str, key: &str) -> Result<usize, CatalogError> {
    value.parse::<usize>().map_err(|_| {
        CatalogError::InvalidParam(format!("{key} must be a positive integer, got '{value}'"))
    })
}

fn reject_extras<A, B>(id: &str, a: Option<A>, b: Option<B>) -> Result<(), CatalogError> {
    if a.is_some() || b.is_some() {
        return Err(CatalogError::InvalidParam(format!(
            "model '{id}' accepts only its own parameter"
        )));
    }
    Ok(())
}

impl ModelKind {
    /// Canonical id of the family.
    pub fn id(&self) -> &'static str {
        match self {
            ModelKind::VerticalAnalytic => "vertical-analytic",
            ModelKind::VerticalHarmonic => "vertical-harmonic",
            ModelKind::VerticalTruePoly { .. } => "vertical-true-poly",
            ModelKind::VerticalPoly { .. } => "vertical-poly",
            ModelKind::WaveletAffine => "wavelet-affine",
            ModelKind::RadialAnalytic => "radial-analytic",
            ModelKind::RadialHarmonic => "radial-harmonic",
            ModelKind::AngularAnalytic => "angular-analytic",
            ModelKind::GaussianRbf { .. } => "gaussian-rbf",
        }
    }

    /// Parameter values as `(name, value)` pairs, for reports.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelKind::VerticalTruePoly { m } => vec![("m", m as f64)],
            ModelKind::VerticalPoly { n } => vec![("n", n as f64)],
            ModelKind::GaussianRbf { n, alpha } => vec![("n", n as f64), ("alpha", alpha)],
            _ => Vec::new(),
        }
    }
}

/// A fully validated kernel model ready for evaluation.
#[derive(Clone, Debug)]
pub struct KernelModel {
    kind: ModelKind,
    group: GroupModel,
    wavelet: Option<WaveletModel>,
}

impl KernelModel {
    /// Validates parameters and prepares any cached state.
    pub fn new(kind: ModelKind) -> Result<Self, CatalogError> {
        match kind {
            ModelKind::VerticalTruePoly { m } => {
                if !(1..=8).contains(&m) {
                    return Err(CatalogError::InvalidParam(format!(
                        "degree m must lie in 1..=8, got {m}"
                    )));
                }
            }
            ModelKind::VerticalPoly { n } => {
                if !(1..=8).contains(&n) {
                    return Err(CatalogError::InvalidParam(format!(
                        "rank n must lie in 1..=8, got {n}"
                    )));
                }
            }
            ModelKind::GaussianRbf { n, alpha } => {
                if !(n == 1 || n == 2) {
                    return Err(CatalogError::InvalidParam(format!(
                        "dimension n must be 1 or 2, got {n}"
                    )));
                }
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(CatalogError::InvalidParam(format!(
                        "width alpha must be positive and finite, got {alpha}"
                    )));
                }
            }
            _ => {}
        }
        let wavelet = match kind {
            ModelKind::WaveletAffine => Some(crate::specialfns::mexican_hat()?),
            _ => None,
        };
        let group = match kind {
            ModelKind::VerticalAnalytic
            | ModelKind::VerticalHarmonic
            | ModelKind::VerticalTruePoly { .. }
            | ModelKind::VerticalPoly { .. }
            | ModelKind::AngularAnalytic => GroupModel::line(FourierConvention::Unitary),
            ModelKind::WaveletAffine => GroupModel::line(FourierConvention::Ordinary),
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic => GroupModel::circle(),
            ModelKind::GaussianRbf { n, .. } => GroupModel::line_n(FourierConvention::Ordinary, n),
        };
        Ok(Self { kind, group, wavelet })
    }

    /// The family and parameters.
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Canonical id of the family.
    pub fn id(&self) -> &'static str {
        self.kind.id()
    }

    /// The wavelet profile backing the wavelet model, when applicable.
    pub fn wavelet_model(&self) -> Option<&WaveletModel> {
        self.wavelet.as_ref()
    }

    /// The group axis `G`.
    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    /// Dimension of the fiber coordinate `Y` (equal to the group dimension
    /// for every built-in family).
    pub fn y_dim(&self) -> usize {
        self.group().dim()
    }

    /// The reference measure `λ` on `Y`, one factor per coordinate.
    pub fn y_measure_axes(&self) -> Vec<WeightedMeasure> {
        match self.kind {
            ModelKind::VerticalAnalytic
            | ModelKind::VerticalHarmonic
            | ModelKind::VerticalTruePoly { .. }
            | ModelKind::VerticalPoly { .. } => {
                vec![WeightedMeasure::scaled(Domain1D::HalfLine { a: 0.0 }, (2.0 * PI).sqrt())]
            }
            ModelKind::WaveletAffine => {
                vec![WeightedMeasure::with_density(Domain1D::HalfLine { a: 0.0 }, 1.0, |v| {
                    1.0 / (v * v)
                })
                .with_log_substitution()]
            }
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic => {
                vec![WeightedMeasure::with_density(Domain1D::Interval { a: 0.0, b: 1.0 }, 1.0, |v| v)]
            }
            ModelKind::AngularAnalytic => {
                vec![WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: PI })]
            }
            ModelKind::GaussianRbf { n, alpha } => {
                let axis = WeightedMeasure::with_density(
                    Domain1D::FullLine,
                    2.0 * alpha * alpha / PI,
                    move |v| (-4.0 * alpha * alpha * v * v).exp(),
                );
                vec![axis; n]
            }
        }
    }

    /// The measure on the dual group used to integrate over `Ω`, one factor
    /// per coordinate.  Fibers vanish outside `Ω`, so integrands extended by
    /// zero may be integrated over the whole factor.
    pub fn omega_measure_axes(&self) -> Vec<WeightedMeasure> {
        let dual_norm = 1.0 / (2.0 * PI).sqrt();
        match self.kind {
            ModelKind::VerticalAnalytic
            | ModelKind::VerticalTruePoly { .. }
            | ModelKind::VerticalPoly { .. } => {
                vec![WeightedMeasure::scaled(Domain1D::HalfLine { a: 0.0 }, dual_norm)]
            }
            ModelKind::VerticalHarmonic | ModelKind::AngularAnalytic => {
                vec![WeightedMeasure::scaled(Domain1D::FullLine, dual_norm)]
            }
            ModelKind::WaveletAffine => vec![WeightedMeasure::lebesgue(Domain1D::FullLine)],
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic => {
                vec![WeightedMeasure::lebesgue(Domain1D::IntegerLattice)]
            }
            ModelKind::GaussianRbf { n, .. } => {
                vec![WeightedMeasure::lebesgue(Domain1D::FullLine); n]
            }
        }
    }

    /// Shape of the fiber support `Ω`.
    pub fn omega_kind(&self) -> OmegaKind {
        match self.kind {
            ModelKind::VerticalAnalytic
            | ModelKind::VerticalTruePoly { .. }
            | ModelKind::VerticalPoly { .. } => OmegaKind::PositiveReals,
            ModelKind::VerticalHarmonic | ModelKind::WaveletAffine => OmegaKind::NonzeroReals,
            ModelKind::AngularAnalytic | ModelKind::GaussianRbf { .. } => OmegaKind::Everything,
            ModelKind::RadialAnalytic => OmegaKind::NonnegativeIntegers,
            ModelKind::RadialHarmonic => OmegaKind::AllIntegers,
        }
    }

    /// Whether `ξ` is a valid dual point inside `Ω`.
    pub fn omega_contains(&self, xi: &Frequency) -> bool {
        if xi.dim() != self.group().dim() || !xi.components().iter().all(|c| c.is_finite()) {
            return false;
        }
        match self.omega_kind() {
            OmegaKind::PositiveReals => xi.as_scalar().is_some_and(|x| x > 0.0),
            OmegaKind::NonzeroReals => xi.as_scalar().is_some_and(|x| x != 0.0),
            OmegaKind::Everything => true,
            OmegaKind::NonnegativeIntegers => xi.as_integer().is_some_and(|k| k >= 0),
            OmegaKind::AllIntegers => xi.as_integer().is_some(),
        }
    }

    /// Fiber dimension at `ξ`: 0 outside `Ω`, the rank parameter for the
    /// polynomial family, 1 otherwise.
    pub fn fiber_count(&self, xi: &Frequency) -> usize {
        if !self.omega_contains(xi) {
            return 0;
        }
        match self.kind {
            ModelKind::VerticalPoly { n } => n,
            _ => 1,
        }
    }

    /// Largest fiber dimension over `Ω`.
    pub fn max_fiber_rank(&self) -> usize {
        match self.kind {
            ModelKind::VerticalPoly { n } => n,
            _ => 1,
        }
    }

    /// A per-coordinate box of representative `Y` values, used to draw sample
    /// points for diagnostics.
    pub fn typical_y_range(&self) -> Vec<(f64, f64)> {
        match self.kind {
            ModelKind::VerticalAnalytic
            | ModelKind::VerticalHarmonic
            | ModelKind::VerticalTruePoly { .. }
            | ModelKind::VerticalPoly { .. } => vec![(0.05, 2.5)],
            ModelKind::WaveletAffine => vec![(0.05, 2.0)],
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic => vec![(0.1, 0.9)],
            ModelKind::AngularAnalytic => vec![(0.15, PI - 0.15)],
            ModelKind::GaussianRbf { n, .. } => vec![(-1.2, 1.2); n],
        }
    }

    /// Evaluates the reproducing kernel `K_{x,y}(u, v) = K₀(u − x, v, y)`.
    pub fn eval_k(
        &self,
        x: &[f64],
        y: &[f64],
        u: &[f64],
        v: &[f64],
    ) -> Result<Complex64, CatalogError> {
        let dim = self.group.dim();
        check_dim("x", x, dim)?;
        check_dim("u", u, dim)?;
        let t: Vec<f64> = self
            .group
            .axes()
            .iter()
            .zip(x.iter().zip(u))
            .map(|(axis, (&xj, &uj))| match axis {
                GroupAxis::Circle => (uj - xj).rem_euclid(2.0 * PI),
                GroupAxis::Line(_) => uj - xj,
            })
            .collect();
        self.eval_k0(&t, v, y)
    }

    /// Evaluates the base kernel `K₀(u, v, y)`.
    pub fn eval_k0(&self, u: &[f64], v: &[f64], y: &[f64]) -> Result<Complex64, CatalogError> {
        let dim = self.group().dim();
        check_dim("u", u, dim)?;
        self.check_y("y", y)?;
        self.check_y("v", v)?;
        if !u.iter().all(|c| c.is_finite()) {
            return Err(CatalogError::DomainViolation(format!(
                "group offset {u:?} must be finite"
            )));
        }
        let k = match self.kind {
            ModelKind::VerticalAnalytic => {
                self.check_pole(u[0], v[0], y[0])?;
                forms::vertical_analytic_k0(u[0], v[0], y[0])
            }
            ModelKind::VerticalHarmonic => {
                self.check_pole(u[0], v[0], y[0])?;
                forms::vertical_harmonic_k0(u[0], v[0], y[0])
            }
            ModelKind::VerticalTruePoly { m } => {
                self.check_pole(u[0], v[0], y[0])?;
                forms::vertical_true_poly_k0(m, u[0], v[0], y[0])
            }
            ModelKind::VerticalPoly { n } => {
                self.check_pole(u[0], v[0], y[0])?;
                forms::vertical_poly_k0(n, u[0], v[0], y[0])
            }
            ModelKind::WaveletAffine => {
                Complex64::new(forms::wavelet_k0(self.wavelet_ref(), u[0], v[0], y[0]), 0.0)
            }
            ModelKind::RadialAnalytic => forms::radial_analytic_k0(u[0], v[0], y[0]),
            ModelKind::RadialHarmonic => forms::radial_harmonic_k0(u[0], v[0], y[0]),
            ModelKind::AngularAnalytic => {
                self.check_pole(u[0], v[0], y[0])?;
                forms::angular_k0(u[0], v[0], y[0])
            }
            ModelKind::GaussianRbf { alpha, .. } => forms::rbf_k0(alpha, u, v, y),
        };
        Ok(k)
    }

    /// Evaluates the fiber `L_ξ(y, v)`, extended by zero outside `Ω`.
    pub fn eval_l(
        &self,
        xi: &Frequency,
        y: &[f64],
        v: &[f64],
    ) -> Result<Complex64, CatalogError> {
        self.check_frequency(xi)?;
        self.check_y("y", y)?;
        self.check_y("v", v)?;
        let value = match self.kind {
            ModelKind::VerticalAnalytic => {
                forms::vertical_analytic_l(xi.as_scalar().unwrap(), y[0], v[0])
            }
            ModelKind::VerticalHarmonic => {
                forms::vertical_harmonic_l(xi.as_scalar().unwrap(), y[0], v[0])
            }
            ModelKind::VerticalTruePoly { m } => {
                forms::vertical_true_poly_l(m, xi.as_scalar().unwrap(), y[0], v[0])
            }
            ModelKind::VerticalPoly { n } => {
                forms::vertical_poly_l(n, xi.as_scalar().unwrap(), y[0], v[0])
            }
            ModelKind::WaveletAffine => {
                forms::wavelet_l(self.wavelet_ref(), xi.as_scalar().unwrap(), y[0], v[0])
            }
            ModelKind::RadialAnalytic => {
                forms::radial_analytic_l(xi.as_integer().unwrap(), y[0], v[0])
            }
            ModelKind::RadialHarmonic => {
                forms::radial_harmonic_l(xi.as_integer().unwrap(), y[0], v[0])
            }
            ModelKind::AngularAnalytic => forms::angular_l(xi.as_scalar().unwrap(), y[0], v[0]),
            ModelKind::GaussianRbf { alpha, .. } => forms::rbf_l(alpha, xi.components(), y, v),
        };
        Ok(Complex64::new(value, 0.0))
    }

    /// Evaluates the normalized section `q_{j,ξ}(v)`, `1 ≤ j ≤ d_ξ`.
    ///
    /// Sections are orthonormal in `L²(Y, λ)` and diagonalize the fiber:
    /// `L_ξ(y, v) = Σ_j conj(q_{j,ξ}(y)) q_{j,ξ}(v)`.
    pub fn eval_q(
        &self,
        xi: &Frequency,
        j: usize,
        v: &[f64],
    ) -> Result<Complex64, CatalogError> {
        self.check_frequency(xi)?;
        if !self.omega_contains(xi) {
            return Err(CatalogError::FrequencyOutsideOmega {
                xi: xi.to_string(),
                model: self.id(),
            });
        }
        let d = self.fiber_count(xi);
        if j == 0 || j > d {
            return Err(CatalogError::IndexOutOfRange { j, d });
        }
        self.check_y("v", v)?;
        let value = match self.kind {
            ModelKind::VerticalAnalytic => forms::vertical_analytic_q(xi.as_scalar().unwrap(), v[0]),
            ModelKind::VerticalHarmonic => {
                forms::vertical_analytic_q(xi.as_scalar().unwrap().abs(), v[0])
            }
            ModelKind::VerticalTruePoly { m } => {
                forms::vertical_true_poly_q(m, xi.as_scalar().unwrap(), v[0])
            }
            ModelKind::VerticalPoly { .. } => {
                forms::vertical_true_poly_q(j, xi.as_scalar().unwrap(), v[0])
            }
            ModelKind::WaveletAffine => {
                forms::wavelet_q(self.wavelet_ref(), xi.as_scalar().unwrap(), v[0])
            }
            ModelKind::RadialAnalytic => forms::radial_analytic_q(xi.as_integer().unwrap(), v[0]),
            ModelKind::RadialHarmonic => {
                forms::radial_analytic_q(xi.as_integer().unwrap().abs(), v[0])
            }
            ModelKind::AngularAnalytic => forms::angular_q(xi.as_scalar().unwrap(), v[0]),
            ModelKind::GaussianRbf { alpha, .. } => forms::rbf_q(alpha, xi.components(), v),
        };
        Ok(Complex64::new(value, 0.0))
    }

    /// Closed-form spectral function `γ_ψ(ξ)` where the family has a printed
    /// one, evaluated by direct quadrature of that formula.  Returns `None`
    /// for the polynomial and radial-basis families.
    ///
    /// This path shares no code with the section-based route in the spectral
    /// module beyond the underlying quadrature engine, so the two act as
    /// independent checks on each other.
    pub fn gamma_closed(
        &self,
        psi: &SymbolSpec,
        xi: &Frequency,
        spec: &QuadSpec,
    ) -> Option<Result<IntegralResult, CatalogError>> {
        match self.kind {
            ModelKind::VerticalPoly { .. } | ModelKind::GaussianRbf { .. } => None,
            _ => Some(self.gamma_closed_inner(psi, xi, spec)),
        }
    }

    fn gamma_closed_inner(
        &self,
        psi: &SymbolSpec,
        xi: &Frequency,
        spec: &QuadSpec,
    ) -> Result<IntegralResult, CatalogError> {
        self.check_frequency(xi)?;
        if !self.omega_contains(xi) {
            return Err(CatalogError::FrequencyOutsideOmega {
                xi: xi.to_string(),
                model: self.id(),
            });
        }
        psi.validate()?;
        if !self.y_domain_bounded() && !psi.bounded_on_unbounded_domain() {
            return Err(CatalogError::InvalidSymbol(format!(
                "symbol '{}' is unbounded on the fiber domain of '{}'",
                psi.label(),
                self.id()
            )));
        }
        let half_line = WeightedMeasure::lebesgue(Domain1D::HalfLine { a: 0.0 });
        let scaled = |res: IntegralResult, c: f64| IntegralResult {
            value: res.value * c,
            error_estimate: res.error_estimate * c.abs(),
            ..res
        };
        let result = match self.kind {
            ModelKind::VerticalAnalytic | ModelKind::VerticalHarmonic => {
                let s = xi.as_scalar().unwrap().abs();
                let res =
                    integrate(|v| psi.eval(&[v]) * (-2.0 * s * v).exp(), &half_line, spec)?;
                scaled(res, 2.0 * s)
            }
            ModelKind::VerticalTruePoly { m } => {
                let s = xi.as_scalar().unwrap();
                let res = integrate(
                    |v| {
                        let damp = (-2.0 * s * v).exp();
                        if damp == 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let lag = crate::specialfns::laguerre(m - 1, 2.0 * s * v);
                        psi.eval(&[v]) * damp * lag * lag
                    },
                    &half_line,
                    spec,
                )?;
                scaled(res, 2.0 * s)
            }
            ModelKind::WaveletAffine => {
                let s = xi.as_scalar().unwrap();
                let wavelet = self.wavelet_ref().clone();
                let measure = WeightedMeasure::with_density(
                    Domain1D::HalfLine { a: 0.0 },
                    1.0,
                    |v| 1.0 / v,
                )
                .with_log_substitution();
                integrate(
                    |v| {
                        let f = wavelet.freq_profile(v * s);
                        if f == 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        psi.eval(&[v]) * f * f
                    },
                    &measure,
                    spec,
                )?
            }
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic => {
                let k = xi.as_integer().unwrap().abs();
                let unit = WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: 1.0 });
                let res = integrate(
                    |v| psi.eval(&[v]) * v.powi(2 * k as i32 + 1),
                    &unit,
                    spec,
                )?;
                scaled(res, 2.0 * (k + 1) as f64)
            }
            ModelKind::AngularAnalytic => {
                let s = xi.as_scalar().unwrap();
                let strip = WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: PI });
                integrate(
                    |v| psi.eval(&[v]) * Complex64::new(forms::angular_l(s, v, v), 0.0),
                    &strip,
                    spec,
                )?
            }
            ModelKind::VerticalPoly { .. } | ModelKind::GaussianRbf { .. } => unreachable!(),
        };
        Ok(result)
    }

    /// Whether `Y` is a bounded set (decides which symbols are admissible).
    pub fn y_domain_bounded(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic | ModelKind::AngularAnalytic
        )
    }

    fn wavelet_ref(&self) -> &WaveletModel {
        self.wavelet.as_ref().expect("wavelet state present for the wavelet model")
    }

    fn check_frequency(&self, xi: &Frequency) -> Result<(), CatalogError> {
        let dim = self.group().dim();
        if xi.dim() != dim {
            return Err(CatalogError::DomainViolation(format!(
                "frequency {xi} has dimension {}, expected {dim}",
                xi.dim()
            )));
        }
        if !xi.components().iter().all(|c| c.is_finite()) {
            return Err(CatalogError::DomainViolation(format!(
                "frequency {xi} must be finite"
            )));
        }
        if matches!(self.group().axes()[0], GroupAxis::Circle) && xi.as_integer().is_none() {
            return Err(CatalogError::DomainViolation(format!(
                "frequency {xi} is not an integer point of the dual lattice"
            )));
        }
        Ok(())
    }

    fn check_y(&self, name: &str, p: &[f64]) -> Result<(), CatalogError> {
        check_dim(name, p, self.y_dim())?;
        if !p.iter().all(|c| c.is_finite()) {
            return Err(CatalogError::DomainViolation(format!(
                "{name} = {p:?} must be finite"
            )));
        }
        let ok = match self.kind {
            ModelKind::VerticalAnalytic
            | ModelKind::VerticalHarmonic
            | ModelKind::VerticalTruePoly { .. }
            | ModelKind::VerticalPoly { .. }
            | ModelKind::WaveletAffine => p[0] >= 0.0,
            ModelKind::RadialAnalytic | ModelKind::RadialHarmonic => (0.0..1.0).contains(&p[0]),
            ModelKind::AngularAnalytic => (0.0..=PI).contains(&p[0]),
            ModelKind::GaussianRbf { .. } => true,
        };
        if !ok {
            return Err(CatalogError::DomainViolation(format!(
                "{name} = {p:?} lies outside the fiber domain of '{}'",
                self.id()
            )));
        }
        Ok(())
    }

    /// Rejects the isolated kernel poles of the half-plane and strip models.
    fn check_pole(&self, u: f64, v: f64, y: f64) -> Result<(), CatalogError> {
        let s = v + y;
        let pole = match self.kind {
            ModelKind::AngularAnalytic => u == 0.0 && (s == 0.0 || s == 2.0 * PI),
            _ => u == 0.0 && s == 0.0,
        };
        if pole {
            return Err(CatalogError::DomainViolation(format!(
                "kernel pole at offset {u}, heights {y} and {v}"
            )));
        }
        Ok(())
    }
}

fn check_dim(name: &str, p: &[f64], dim: usize) -> Result<(), CatalogError> {
    if p.len() != dim {
        return Err(CatalogError::DomainViolation(format!(
            "{name} has dimension {}, expected {dim}",
            p.len()
        )));
    }
    Ok(())
}
