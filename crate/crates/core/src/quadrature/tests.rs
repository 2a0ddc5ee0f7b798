use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const ONE: fn(f64) -> Complex64 = |_| Complex64::new(1.0, 0.0);

#[test]
fn interval_moment_weight() {
    // ∫₀¹ v dv = 1/2, phrased as the total mass of the density v on (0, 1).
    let m = WeightedMeasure::with_density(Domain1D::Interval { a: 0.0, b: 1.0 }, 1.0, |v| v);
    let r = integrate(ONE, &m, &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - 0.5).abs() < 1e-12, "got {}", r.value.re);
    assert!(r.value.im.abs() < 1e-14);
}

#[test]
fn half_line_exponential_with_scale() {
    // ∫₀^∞ e^{-2v} √(2π) dv = √(2π)/2 ≈ 1.2533141373155003.
    let m = WeightedMeasure::scaled(Domain1D::HalfLine { a: 0.0 }, (2.0 * PI).sqrt());
    let r = integrate(|v| re((-2.0 * v).exp()), &m, &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - 1.253_314_137_315_500_3).abs() < 1e-10, "got {}", r.value.re);
}

#[test]
fn half_line_shifted_origin() {
    // ∫₂^∞ e^{-v} dv = e^{-2}.
    let m = WeightedMeasure::lebesgue(Domain1D::HalfLine { a: 2.0 });
    let r = integrate(|v| re((-v).exp()), &m, &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - (-2.0f64).exp()).abs() < 1e-12);
}

#[test]
fn full_line_gaussian_weight_total_mass() {
    // ∫_ℝ (2/π) e^{-4v²} dv = 1/√π ≈ 0.5641895835477563.
    let m = WeightedMeasure::with_density(Domain1D::FullLine, 2.0 / PI, |v| (-4.0 * v * v).exp());
    let r = integrate(ONE, &m, &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - 0.564_189_583_547_756_3).abs() < 1e-11, "got {}", r.value.re);
}

#[test]
fn log_substitution_matches_direct_value() {
    // ∫₀^∞ v² e^{-v} dv/v² = 1, with the 1/v² weight handled in log coordinates.
    let m = WeightedMeasure::with_density(Domain1D::HalfLine { a: 0.0 }, 1.0, |v| 1.0 / (v * v))
        .with_log_substitution();
    let f = |v: f64| if v > 1e150 { re(0.0) } else { re(v * v * (-v).exp()) };
    let r = integrate(f, &m, &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - 1.0).abs() < 1e-10, "got {}", r.value.re);
}

#[test]
fn lattice_geometric_sum() {
    // Σ_{k∈ℤ} 2^{-|k|} = 3.
    let m = WeightedMeasure::lebesgue(Domain1D::IntegerLattice);
    let r = integrate(|k| re(0.5f64.powf(k.abs())), &m, &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - 3.0).abs() < 1e-10);
}

#[test]
fn lattice_zero_function_terminates() {
    let m = WeightedMeasure::lebesgue(Domain1D::IntegerLattice);
    let r = integrate(|_| re(0.0), &m, &QuadSpec::default()).unwrap();
    assert_eq!(r.value, Complex64::new(0.0, 0.0));
    assert!(r.converged);
}

#[test]
fn circle_haar_total_mass() {
    let r = integrate(ONE, &WeightedMeasure::circle_haar(), &QuadSpec::default()).unwrap();
    assert!(r.converged);
    assert!((r.value.re - 1.0).abs() < 1e-13);
}

#[test]
fn gaussian_pair_unitary_convention() {
    // f(x) = e^{-x²/2} transforms to e^{-ξ²/2} under e^{ixξ} with dx/√(2π).
    for &xi in &[0.0, 0.5, 1.0, 2.0, -3.0] {
        let r = fourier_integral(
            |x| re((-0.5 * x * x).exp()),
            xi,
            FourierConvention::Unitary,
            &QuadSpec::default(),
        )
        .unwrap();
        assert!(r.converged, "xi = {xi}");
        let want = (-0.5 * xi * xi).exp();
        assert!((r.value.re - want).abs() < 1e-10, "xi = {xi}: got {} want {want}", r.value.re);
        assert!(r.value.im.abs() < 1e-10);
    }
    // Frozen spot value at ξ = 1.
    let r = fourier_integral(
        |x| re((-0.5 * x * x).exp()),
        1.0,
        FourierConvention::Unitary,
        &QuadSpec::default(),
    )
    .unwrap();
    assert!((r.value.re - 0.606_530_659_712_633_4).abs() < 1e-10);
}

#[test]
fn gaussian_pair_ordinary_convention() {
    // f(x) = e^{-πx²} is self-dual under e^{2πixξ} with plain Lebesgue measure.
    for &xi in &[0.0, 0.3, 1.0, -2.0] {
        let r = fourier_integral(
            |x| re((-PI * x * x).exp()),
            xi,
            FourierConvention::Ordinary,
            &QuadSpec::default(),
        )
        .unwrap();
        assert!(r.converged);
        let want = (-PI * xi * xi).exp();
        assert!((r.value.re - want).abs() < 1e-10, "xi = {xi}");
        assert!(r.value.im.abs() < 1e-10);
    }
}

#[test]
fn indicator_transform_at_zero_frequency() {
    // Indicator of [0, 1] under the e^{2πixξ} convention at ξ = 0 integrates to 1.
    let f = |x: f64| if (0.0..=1.0).contains(&x) { re(1.0) } else { re(0.0) };
    let r = fourier_integral(f, 0.0, FourierConvention::Ordinary, &QuadSpec::default()).unwrap();
    assert!((r.value.re - 1.0).abs() < 1e-9, "got {}", r.value.re);
    assert!(r.value.im.abs() < 1e-12);
}

#[test]
fn slow_quadratic_decay_oscillatory_tail() {
    // ∫ e^{-iξu} (-1/π)(u + ic)^{-2} du/√(2π) = √(2/π) ξ e^{-ξc} for ξ > 0:
    // quadratic decay forces the accelerated tail path.
    let c = 0.6;
    for &xi in &[0.25, 1.0, 4.0] {
        let r = fourier_integral(
            |u| {
                let d = Complex64::new(u, c);
                -1.0 / (PI * d * d)
            },
            xi,
            FourierConvention::Unitary,
            &QuadSpec::default(),
        )
        .unwrap();
        let want = (2.0 / PI).sqrt() * xi * (-xi * c).exp();
        assert!(
            (r.value - re(want)).norm() < 1e-8,
            "xi = {xi}: got {} want {want}, err est {}",
            r.value,
            r.error_estimate
        );
    }
    // Negative frequencies must vanish.
    let r = fourier_integral(
        |u| {
            let d = Complex64::new(u, c);
            -1.0 / (PI * d * d)
        },
        -2.0,
        FourierConvention::Unitary,
        &QuadSpec::default(),
    )
    .unwrap();
    assert!(r.value.norm() < 1e-8, "got {}", r.value);
}

#[test]
fn oscillation_budget_is_enforced() {
    let err = fourier_integral(
        |x| re((-x * x).exp()),
        100.0,
        FourierConvention::Unitary,
        &QuadSpec::default(),
    )
    .unwrap_err();
    assert!(matches!(err, QuadratureError::OscillationBudget { .. }));
    // The same frequency is fine well below the budget …
    assert!(fourier_integral(
        |x| re((-x * x).exp()),
        10.0,
        FourierConvention::Unitary,
        &QuadSpec::default()
    )
    .is_ok());
    // … and the 2π-pairing budget triggers at |2πξ| > 64.
    let err = fourier_integral(
        |x| re((-x * x).exp()),
        11.0,
        FourierConvention::Ordinary,
        &QuadSpec::default(),
    )
    .unwrap_err();
    assert!(matches!(err, QuadratureError::OscillationBudget { .. }));
}

#[test]
fn circle_coefficient_of_pure_character() {
    // f(u) = e^{3iu}: coefficient 3 is 1, everything else 0, to rounding.
    let f = |u: f64| Complex64::cis(3.0 * u);
    let spec = QuadSpec::default();
    let c3 = fourier_coefficient(f, 3, &spec).unwrap();
    assert!((c3.value - re(1.0)).norm() < 1e-13);
    assert!(c3.converged);
    let c2 = fourier_coefficient(f, 2, &spec).unwrap();
    assert!(c2.value.norm() < 1e-13);
}

#[test]
fn circle_coefficient_geometric_series() {
    // f(u) = 2/(1 - 0.25 e^{iu})² = 2 Σ_{k≥0} (k+1) 0.25^k e^{iku}; coefficient 1 is 1.
    let f = |u: f64| {
        let z = Complex64::cis(u) * 0.25;
        2.0 / ((1.0 - z) * (1.0 - z))
    };
    let c = fourier_coefficient(f, 1, &QuadSpec::default()).unwrap();
    assert!((c.value - re(1.0)).norm() < 1e-12, "got {}", c.value);
}

#[test]
fn circle_coefficient_doubling_within_error_estimate() {
    // Doubling the node count moves the coefficient by less than the estimate.
    let f = |u: f64| re(u.cos().exp());
    let spec = QuadSpec::default();
    let base = fourier_coefficient(f, 2, &spec).unwrap();
    let double = fourier_coefficient(f, 2, &QuadSpec { circle_nodes: 1024, ..spec }).unwrap();
    assert!((base.value - double.value).norm() <= base.error_estimate);
}

#[test]
fn circle_coefficient_aliasing_guard() {
    let err = fourier_coefficient(|u| re(u.cos()), 200, &QuadSpec::default()).unwrap_err();
    assert!(matches!(err, QuadratureError::AliasingSuspected { limit: 128, .. }));
}

#[test]
fn non_finite_integrand_is_reported() {
    let m = WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: 1.0 });
    let err = integrate(
        |x| if x > 0.5 { re(f64::NAN) } else { re(1.0) },
        &m,
        &QuadSpec::default(),
    )
    .unwrap_err();
    assert!(matches!(err, QuadratureError::NonFiniteEvaluation { .. }));
}

#[test]
fn exhausted_budget_reports_non_convergence() {
    // A kink at an irrational point with a starved subdivision budget: the
    // result must still come back, flagged as not converged.
    let spec = QuadSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-15,
        max_subdivisions: 1,
        ..QuadSpec::default()
    };
    let m = WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: 1.0 });
    let r = integrate(|x| re((x - 0.123_456_7).abs().sqrt()), &m, &spec).unwrap();
    assert!(!r.converged);
    assert!(r.error_estimate > spec.abs_tol);
}

#[test]
fn converged_results_meet_tolerance_invariant() {
    let spec = QuadSpec::default();
    let m = WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: 2.0 });
    let r = integrate(|x| re((x * 1.7).sin() + 2.0), &m, &spec).unwrap();
    assert!(r.converged);
    assert!(r.error_estimate <= spec.abs_tol.max(spec.rel_tol * r.value.norm()));
    assert!(r.evaluations > 0);
}

#[test]
fn integrate_2d_gaussian_product() {
    // ∫∫ e^{-u²-v²} du dv = π.
    let m = WeightedMeasure::lebesgue(Domain1D::FullLine);
    let r = integrate_2d(
        |u, v| re((-u * u - v * v).exp()),
        &m,
        &m,
        &QuadSpec::default(),
    )
    .unwrap();
    assert!(r.converged);
    assert!((r.value.re - PI).abs() < 1e-9, "got {}", r.value.re);
}

#[test]
fn integrate_2d_mixed_domains() {
    // ∫₀¹ ∫₀^∞ v e^{-(1+u)v} dv du = ∫₀¹ (1+u)^{-2} du = 1/2.
    let outer = WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: 1.0 });
    let inner = WeightedMeasure::lebesgue(Domain1D::HalfLine { a: 0.0 });
    let r = integrate_2d(
        |u, v| re(v * (-(1.0 + u) * v).exp()),
        &outer,
        &inner,
        &QuadSpec::default(),
    )
    .unwrap();
    assert!(r.converged);
    assert!((r.value.re - 0.5).abs() < 1e-8, "got {}", r.value.re);
}

#[test]
fn spec_validation_rejects_bad_circle_nodes() {
    for nodes in [0usize, 4, 100, 500] {
        let spec = QuadSpec { circle_nodes: nodes, ..QuadSpec::default() };
        assert!(matches!(spec.validate(), Err(QuadratureError::InvalidSpec(_))), "nodes {nodes}");
    }
    assert!(QuadSpec::default().validate().is_ok());
}

#[test]
fn measure_validation() {
    let bad = WeightedMeasure::lebesgue(Domain1D::Interval { a: 1.0, b: 0.0 });
    assert!(integrate(ONE, &bad, &QuadSpec::default()).is_err());
    let bad_log =
        WeightedMeasure::lebesgue(Domain1D::Interval { a: 0.0, b: 1.0 }).with_log_substitution();
    assert!(integrate(ONE, &bad_log, &QuadSpec::default()).is_err());
}
