//! Group axes, characters and frequency points for the kernel catalog.

use num_complex::Complex64;

use crate::quadrature::{Domain1D, FourierConvention, WeightedMeasure};

/// One coordinate of the group `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupAxis {
    /// A real line with the given Fourier pairing convention.
    Line(FourierConvention),
    /// The circle `[0, 2π)` with normalized Haar measure; dual `ℤ` with
    /// counting measure.
    Circle,
}

impl GroupAxis {
    /// The character `E(x, ξ)` on this axis.
    pub fn character(self, x: f64, xi: f64) -> Complex64 {
        match self {
            GroupAxis::Line(conv) => conv.character(x, xi),
            GroupAxis::Circle => Complex64::cis(x * xi),
        }
    }

    /// Haar measure of the axis (self-dual normalization for lines).
    pub fn haar(self) -> WeightedMeasure {
        match self {
            GroupAxis::Line(conv) => {
                WeightedMeasure::scaled(Domain1D::FullLine, conv.measure_norm())
            }
            GroupAxis::Circle => WeightedMeasure::circle_haar(),
        }
    }

    /// Haar measure of the dual axis.
    pub fn dual_haar(self) -> WeightedMeasure {
        match self {
            GroupAxis::Line(conv) => {
                WeightedMeasure::scaled(Domain1D::FullLine, conv.measure_norm())
            }
            GroupAxis::Circle => WeightedMeasure::lebesgue(Domain1D::IntegerLattice),
        }
    }
}

/// The abelian group axis `G` of a kernel model, as a product of coordinate
/// axes.  All built-in models use a single axis except the radial-basis
/// family, whose group is `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupModel {
    axes: Vec<GroupAxis>,
}

impl GroupModel {
    /// A one-dimensional real group with the given pairing convention.
    pub fn line(conv: FourierConvention) -> Self {
        Self { axes: vec![GroupAxis::Line(conv)] }
    }

    /// `ℝⁿ` with the given pairing convention on every coordinate.
    pub fn line_n(conv: FourierConvention, n: usize) -> Self {
        Self { axes: vec![GroupAxis::Line(conv); n] }
    }

    /// The circle group.
    pub fn circle() -> Self {
        Self { axes: vec![GroupAxis::Circle] }
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// The coordinate axes.
    pub fn axes(&self) -> &[GroupAxis] {
        &self.axes
    }

    /// The character `E(x, ξ) = ∏_j E_j(x_j, ξ_j)`.
    ///
    /// # Panics
    /// Panics when the dimensions of `x` or `xi` do not match the group.
    pub fn character(&self, x: &[f64], xi: &Frequency) -> Complex64 {
        assert_eq!(x.len(), self.dim(), "group point dimension mismatch");
        assert_eq!(xi.dim(), self.dim(), "frequency dimension mismatch");
        let mut out = Complex64::new(1.0, 0.0);
        for ((&axis, &xj), &fj) in self.axes.iter().zip(x).zip(xi.components()) {
            out *= axis.character(xj, fj);
        }
        out
    }
}

/// A point of the dual group.  Components are real numbers; on axes whose
/// dual is `ℤ` the component must be integer-valued.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct Frequency {
    components: Vec<f64>,
}

impl Frequency {
    /// A one-dimensional frequency.
    pub fn scalar(xi: f64) -> Self {
        Self { components: vec![xi] }
    }

    /// A one-dimensional integer frequency (for `ℤ`-valued duals).
    pub fn integer(k: i64) -> Self {
        Self { components: vec![k as f64] }
    }

    /// A multidimensional frequency.
    pub fn vector(components: Vec<f64>) -> Self {
        Self { components }
    }

    /// The coordinate values.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// The value of a one-dimensional frequency.
    pub fn as_scalar(&self) -> Option<f64> {
        match self.components.as_slice() {
            [xi] => Some(*xi),
            _ => None,
        }
    }

    /// The value of a one-dimensional integer-valued frequency.
    pub fn as_integer(&self) -> Option<i64> {
        let xi = self.as_scalar()?;
        if xi.fract() == 0.0 && xi.abs() <= i64::MAX as f64 {
            Some(xi as i64)
        } else {
            None
        }
    }

    /// Lexicographic comparison, used to order report rows.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.components.iter().zip(other.components.iter()) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.components.len().cmp(&other.components.len())
    }
}

impl std::fmt::Display for Frequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.components.as_slice() {
            [xi] => write!(f, "{xi}"),
            comps => {
                let parts: Vec<String> = comps.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}
