//! Symbol functions `ψ : Y → ℂ` used to build diagonal operators.
//!
//! The built-in families act on the Euclidean norm `‖v‖`, so the same spec
//! string works for every model regardless of the dimension of `Y`.  Custom
//! behaviour is available through [`SymbolSpec::callback`].

use std::sync::Arc;

use num_complex::Complex64;

use super::CatalogError;

/// The families of symbols accepted by the spectral routines.
#[derive(Clone)]
pub enum SymbolKind {
    /// The constant symbol `ψ ≡ c`.
    Constant { c: f64 },
    /// The indicator of the open interval `(a, b)` in `‖v‖`.
    Indicator { a: f64, b: f64 },
    /// The decaying exponential `ψ(v) = e^{−α‖v‖}`, `α > 0`.
    ExpDecay { alpha: f64 },
    /// The power `ψ(v) = ‖v‖^p`, `p ≥ 0`; only admitted on bounded `Y`.
    Power { p: f64 },
    /// An arbitrary user-supplied function of the full coordinate vector.
    Callback(Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>),
}

/// A validated symbol together with a printable identifier.
#[derive(Clone)]
pub struct SymbolSpec {
    kind: SymbolKind,
    label: String,
}

impl SymbolSpec {
    /// The constant symbol `ψ ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self { kind: SymbolKind::Constant { c }, label: format!("const:{c}") }
    }

    /// The indicator of `(a, b)`.
    pub fn indicator(a: f64, b: f64) -> Self {
        Self { kind: SymbolKind::Indicator { a, b }, label: format!("indicator:{a},{b}") }
    }

    /// The decaying exponential `e^{−α‖v‖}`.
    pub fn exp_decay(alpha: f64) -> Self {
        Self { kind: SymbolKind::ExpDecay { alpha }, label: format!("expdecay:{alpha}") }
    }

    /// The power symbol `‖v‖^p`.
    pub fn power(p: f64) -> Self {
        Self { kind: SymbolKind::Power { p }, label: format!("power:{p}") }
    }

    /// A custom symbol with a caller-chosen label for reports.
    pub fn callback(
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { kind: SymbolKind::Callback(Arc::new(f)), label: label.into() }
    }

    /// Parses the textual form used on the command line:
    /// `const:c`, `indicator:a,b`, `expdecay:alpha` or `power:p`.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let bad = |msg: &str| CatalogError::InvalidSymbol(format!("'{text}': {msg}"));
        let (family, args) = text
            .split_once(':')
            .ok_or_else(|| bad("expected 'family:args', e.g. 'const:1' or 'indicator:0,1'"))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("arguments must be numbers"))?;
        let spec = match (family.trim(), nums.as_slice()) {
            ("const", [c]) => Self::constant(*c),
            ("indicator", [a, b]) => Self::indicator(*a, *b),
            ("expdecay", [alpha]) => Self::exp_decay(*alpha),
            ("power", [p]) => Self::power(*p),
            ("const" | "indicator" | "expdecay" | "power", _) => {
                return Err(bad("wrong number of arguments"))
            }
            _ => return Err(bad("unknown symbol family")),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks parameter ranges; callbacks are accepted as-is.
    pub fn validate(&self) -> Result<(), CatalogError> {
        let bad = |msg: String| Err(CatalogError::InvalidSymbol(msg));
        match self.kind {
            SymbolKind::Constant { c } => {
                if !c.is_finite() {
                    return bad(format!("constant value {c} is not finite"));
                }
            }
            SymbolKind::Indicator { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return bad(format!("indicator bounds ({a}, {b}) must be finite with a < b"));
                }
            }
            SymbolKind::ExpDecay { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return bad(format!("decay rate {alpha} must be positive"));
                }
            }
            SymbolKind::Power { p } => {
                if !(p.is_finite() && p >= 0.0) {
                    return bad(format!("power exponent {p} must be nonnegative"));
                }
            }
            SymbolKind::Callback(_) => {}
        }
        Ok(())
    }

    /// The symbol family and parameters.
    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    /// Printable identifier, used in reports and CSV headers.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether the symbol is guaranteed bounded on an unbounded `Y`.
    /// Power symbols with `p > 0` grow without bound and are rejected there.
    pub fn bounded_on_unbounded_domain(&self) -> bool {
        !matches!(self.kind, SymbolKind::Power { p } if p > 0.0)
    }

    /// Evaluates the symbol at a point of `Y`.
    pub fn eval(&self, v: &[f64]) -> Complex64 {
        match &self.kind {
            SymbolKind::Callback(f) => f(v),
            _ => {
                let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                self.eval_radial(r)
            }
        }
    }

    /// Evaluates a built-in symbol on the radial profile `r = ‖v‖`.
    ///
    /// # Panics
    /// Panics for callback symbols, which have no radial profile.
    pub fn eval_radial(&self, r: f64) -> Complex64 {
        let val = match self.kind {
            SymbolKind::Constant { c } => c,
            SymbolKind::Indicator { a, b } => {
                if a < r && r < b {
                    1.0
                } else {
                    0.0
                }
            }
            SymbolKind::ExpDecay { alpha } => (-alpha * r).exp(),
            SymbolKind::Power { p } => r.powf(p),
            SymbolKind::Callback(_) => panic!("callback symbols have no radial profile"),
        };
        Complex64::new(val, 0.0)
    }
}

impl std::fmt::Debug for SymbolSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolSpec").field("label", &self.label).finish()
    }
}
