use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::catalog::get_model;

fn spec() -> QuadSpec {
    QuadSpec::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// -- Fourier computation of L ----------------------------------------------

#[test]
fn numeric_fiber_matches_closed_form_vertical() {
    let model = get_model("vertical-analytic").unwrap();
    let r = compute_l_numeric(&model, &Frequency::scalar(1.0), &[1.0], &[1.0], &spec()).unwrap();
    assert!(r.converged);
    // Closed form: sqrt(2/π) · 1 · e^{-2} = 0.10798193302637612.
    assert_abs_diff_eq!(r.value.re, 0.107_981_933_026_376_13, epsilon = 1e-8);
    assert_abs_diff_eq!(r.value.im, 0.0, epsilon = 1e-8);
}

#[test]
fn numeric_fiber_vanishes_outside_omega() {
    let model = get_model("vertical-analytic").unwrap();
    let r = compute_l_numeric(&model, &Frequency::scalar(-2.0), &[1.0], &[1.0], &spec()).unwrap();
    assert!(r.value.norm() <= 1e-8);
}

#[test]
fn numeric_fiber_matches_closed_form_radial() {
    let model = get_model("radial-analytic").unwrap();
    let r = compute_l_numeric(&model, &Frequency::integer(3), &[0.5], &[0.4], &spec()).unwrap();
    // 2(ξ+1)(yv)^ξ = 8 · 0.2³ = 0.064.
    assert_abs_diff_eq!(r.value.re, 0.064, epsilon = 1e-10);
    assert_abs_diff_eq!(r.value.im, 0.0, epsilon = 1e-10);
}

#[test]
fn numeric_fiber_matches_closed_form_planar_gaussian() {
    let model = get_model("gaussian-rbf:n=2,alpha=1.0").unwrap();
    let xi = Frequency::vector(vec![0.7, -0.4]);
    let (y, v) = (vec![0.2, -0.1], vec![0.3, 0.4]);
    let r = compute_l_numeric(&model, &xi, &y, &v, &spec()).unwrap();
    let closed = model.eval_l(&xi, &y, &v).unwrap();
    assert!((r.value - closed).norm() <= 1e-7, "gap {:.3e}", (r.value - closed).norm());
}

// -- Fourier inversion ------------------------------------------------------

#[test]
fn reconstruction_recovers_vertical_kernel_at_origin() {
    let model = get_model("vertical-analytic").unwrap();
    let r = reconstruct_k(&model, &[0.0], &[1.0], &[1.0], &spec()).unwrap();
    // K₀(0, 1, 1) = 1/(4π).
    assert_abs_diff_eq!(r.value.re, 1.0 / (4.0 * std::f64::consts::PI), epsilon = 1e-8);
    assert_abs_diff_eq!(r.value.im, 0.0, epsilon = 1e-8);
}

#[test]
fn reconstruction_sums_radial_series() {
    let model = get_model("radial-analytic").unwrap();
    for v in [0.3, 0.6] {
        let r = reconstruct_k(&model, &[0.0], &[0.0], &[v], &spec()).unwrap();
        // At y = 0 only the ξ = 0 term survives: K₀ = 2.
        assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-10);
    }
}

#[test]
fn reconstruction_matches_kernel_off_origin() {
    for id in ["vertical-harmonic", "wavelet-affine", "angular-analytic"] {
        let model = get_model(id).unwrap();
        let (lo, hi) = model.typical_y_range()[0];
        let y = lo + 0.35 * (hi - lo);
        let v = lo + 0.6 * (hi - lo);
        let x = 0.4;
        let r = reconstruct_k(&model, &[x], &[y], &[v], &spec()).unwrap();
        let k = model.eval_k0(&[x], &[v], &[y]).unwrap();
        assert!((r.value - k).norm() <= 1e-6, "{id}: gap {:.3e}", (r.value - k).norm());
    }
}

// -- Dimension integral -----------------------------------------------------

#[test]
fn dimension_is_one_for_scalar_fibers() {
    let model = get_model("vertical-analytic").unwrap();
    let r = fiber_dimension(&model, &Frequency::scalar(1.0), &spec()).unwrap();
    assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-8);
}

#[test]
fn dimension_counts_polynomial_fibers() {
    let model = get_model("vertical-poly:n=2").unwrap();
    let r = fiber_dimension(&model, &Frequency::scalar(1.0), &spec()).unwrap();
    assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-8);
}

#[test]
fn dimension_vanishes_outside_omega() {
    let model = get_model("vertical-analytic").unwrap();
    let r = fiber_dimension(&model, &Frequency::scalar(-1.0), &spec()).unwrap();
    assert!(r.value.re.abs() <= 1e-10);
}

#[test]
fn dimension_is_one_for_planar_gaussian() {
    let model = get_model("gaussian-rbf:n=2,alpha=1.0").unwrap();
    let r = fiber_dimension(&model, &Frequency::vector(vec![0.8, -0.3]), &spec()).unwrap();
    assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-7);
}

// -- Schwarz residual -------------------------------------------------------

#[test]
fn schwarz_residual_detects_higher_rank() {
    let model = get_model("vertical-poly:n=2").unwrap();
    let pairs = vec![(vec![0.2], vec![1.0])];
    let r = schwarz_residual(&model, &Frequency::scalar(1.0), &pairs).unwrap();
    assert!(r > 0.1, "expected a visible Schwarz gap, got {r:.3e}");
}

#[test]
fn schwarz_residual_vanishes_for_rank_one() {
    for id in ["vertical-analytic", "wavelet-affine", "angular-analytic"] {
        let model = get_model(id).unwrap();
        let pairs = default_yv_pairs(&model, 8, 7);
        let r = schwarz_residual(&model, &Frequency::scalar(0.75), &pairs).unwrap();
        assert!(r <= 1e-12, "{id}: residual {r:.3e}");
    }
}

#[test]
fn schwarz_residual_requires_omega_membership() {
    let model = get_model("vertical-analytic").unwrap();
    let pairs = vec![(vec![0.5], vec![1.0])];
    let err = schwarz_residual(&model, &Frequency::scalar(-1.0), &pairs).unwrap_err();
    assert!(matches!(err, FiberError::Catalog(CatalogError::FrequencyOutsideOmega { .. })));
}

// -- Reproducing identity ---------------------------------------------------

#[test]
fn reproducing_identity_holds_in_scalar_fibers() {
    for (id, xi) in [
        ("vertical-analytic", Frequency::scalar(1.25)),
        ("wavelet-affine", Frequency::scalar(-0.8)),
        ("angular-analytic", Frequency::scalar(2.0)),
        ("gaussian-rbf", Frequency::scalar(0.6)),
    ] {
        let model = get_model(id).unwrap();
        let (lo, hi) = model.typical_y_range()[0];
        let y = vec![lo + 0.3 * (hi - lo)];
        let v = vec![lo + 0.7 * (hi - lo)];
        let r = repro_residual(&model, &xi, &y, &v, &spec()).unwrap();
        assert!(r <= 1e-8, "{id}: residual {r:.3e}");
    }
}

#[test]
fn reproducing_identity_holds_in_matrix_fibers() {
    let model = get_model("vertical-poly:n=2").unwrap();
    let r = repro_residual(&model, &Frequency::scalar(1.0), &[0.4], &[1.1], &spec()).unwrap();
    assert!(r <= 1e-8, "residual {r:.3e}");
}

#[test]
fn reproducing_identity_holds_on_the_circle() {
    let model = get_model("radial-harmonic").unwrap();
    let r = repro_residual(&model, &Frequency::integer(-2), &[0.5], &[0.5], &spec()).unwrap();
    assert!(r <= 1e-10, "residual {r:.3e}");
}

// -- Gram rank --------------------------------------------------------------

fn spread_samples(model: &crate::catalog::KernelModel, count: usize) -> Vec<Vec<f64>> {
    let ranges = model.typical_y_range();
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            ranges.iter().map(|(lo, hi)| lo + t * (hi - lo)).collect()
        })
        .collect()
}

#[test]
fn gram_rank_is_one_for_commutative_models() {
    for id in ["vertical-analytic", "vertical-true-poly:m=3", "wavelet-affine"] {
        let model = get_model(id).unwrap();
        let samples = spread_samples(&model, 6);
        let rank = gram_rank(&model, &Frequency::scalar(1.0), &samples, 1e-8).unwrap();
        assert_eq!(rank, 1, "{id}");
    }
}

#[test]
fn gram_rank_matches_declared_matrix_dimension() {
    let model = get_model("vertical-poly:n=3").unwrap();
    let samples = spread_samples(&model, 6);
    let rank = gram_rank(&model, &Frequency::scalar(1.0), &samples, 1e-8).unwrap();
    assert_eq!(rank, 3);
}

#[test]
fn gram_rank_is_zero_outside_omega() {
    let model = get_model("vertical-analytic").unwrap();
    let samples = spread_samples(&model, 5);
    let rank = gram_rank(&model, &Frequency::scalar(-2.0), &samples, 1e-8).unwrap();
    assert_eq!(rank, 0);
}

// -- Projection oracle ------------------------------------------------------

#[test]
fn projection_oracle_reproduces_its_own_section() {
    let model = get_model("vertical-analytic").unwrap();
    let xi = Frequency::scalar(1.0);
    let q = {
        let model = model.clone();
        let xi = xi.clone();
        move |w: &[f64]| model.eval_q(&xi, 1, w).unwrap()
    };
    for v in [0.5, 1.0] {
        let oracle = projection_fiber_oracle(&model, &xi, &q, &[v], &spec()).unwrap();
        let expected = model.eval_q(&xi, 1, &[v]).unwrap();
        assert!(
            (oracle - expected).norm() <= 1e-4,
            "v = {v}: gap {:.3e}",
            (oracle - expected).norm()
        );
    }
}

#[test]
fn projection_oracle_annihilates_orthogonal_input() {
    let model = get_model("vertical-analytic").unwrap();
    let xi = Frequency::scalar(1.0);
    // h(w) = (1 − 2w) q(w) is orthogonal to q for this fiber: the weight
    // ∫ (1 − 2w) |q|² dλ = 1 − 2·E[w] = 0 at ξ = 1 where E[w] = 1/2.
    let h = {
        let model = model.clone();
        let xi = xi.clone();
        move |w: &[f64]| c(1.0 - 2.0 * w[0], 0.0) * model.eval_q(&xi, 1, w).unwrap()
    };
    let direct = projection_direct(&model, &xi, &h, &[0.8], &spec()).unwrap();
    assert!(direct.norm() <= 1e-10, "direct projection should vanish, got {:.3e}", direct.norm());
    let oracle = projection_fiber_oracle(&model, &xi, &h, &[0.8], &spec()).unwrap();
    assert!(oracle.norm() <= 1e-4, "oracle should vanish, got {:.3e}", oracle.norm());
}

#[test]
fn projection_oracle_agrees_on_the_circle() {
    let model = get_model("radial-analytic").unwrap();
    let xi = Frequency::integer(2);
    let h = |w: &[f64]| c(w[0], 0.0);
    let oracle = projection_fiber_oracle(&model, &xi, h, &[0.6], &spec()).unwrap();
    let direct = projection_direct(&model, &xi, h, &[0.6], &spec()).unwrap();
    assert!((oracle - direct).norm() <= 1e-6, "gap {:.3e}", (oracle - direct).norm());
}

#[test]
fn direct_projection_is_idempotent() {
    let model = get_model("vertical-analytic").unwrap();
    let xi = Frequency::scalar(1.5);
    let h = |w: &[f64]| c((-w[0]).exp(), 0.3 * w[0] * (-w[0]).exp());
    let tight = spec().tightened(10.0);
    let once = {
        let model = model.clone();
        let xi = xi.clone();
        let tight = tight.clone();
        move |w: &[f64]| projection_direct(&model, &xi, h, w, &tight).unwrap()
    };
    for v in [0.4, 1.2] {
        let p1 = once(&[v]);
        let p2 = projection_direct(&model, &xi, &once, &[v], &spec()).unwrap();
        assert!((p2 - p1).norm() <= 1e-8, "v = {v}: gap {:.3e}", (p2 - p1).norm());
    }
}

// -- Reports ----------------------------------------------------------------

#[test]
fn report_grid_defaults_are_deterministic() {
    let model = get_model("vertical-analytic").unwrap();
    let a = default_yv_pairs(&model, DEFAULT_PAIR_COUNT, DEFAULT_SEED);
    let b = default_yv_pairs(&model, DEFAULT_PAIR_COUNT, DEFAULT_SEED);
    assert_eq!(a, b);
    let (lo, hi) = model.typical_y_range()[0];
    for (y, v) in &a {
        assert!(y[0] >= lo && y[0] <= hi);
        assert!(v[0] >= lo && v[0] <= hi);
    }
    // Latin design: one sample per stratum on each axis.
    let mut strata: Vec<usize> = a
        .iter()
        .map(|(y, _)| (((y[0] - lo) / (hi - lo)) * a.len() as f64) as usize)
        .collect();
    strata.sort_unstable();
    assert_eq!(strata, (0..a.len()).collect::<Vec<_>>());
}

#[test]
fn report_classifies_commutative_model() {
    let model = get_model("vertical-analytic").unwrap();
    let grid = [Frequency::scalar(-1.0), Frequency::scalar(0.5), Frequency::scalar(2.0)];
    let pairs = default_yv_pairs(&model, 6, DEFAULT_SEED);
    let reports =
        commutativity_report(&model, &grid, &pairs, &spec(), &VerdictTolerances::default());
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[0].commutative_verdict, Verdict::OutsideOmega);
    assert_eq!(reports[0].declared_dimension, 0);
    assert!(reports[0].numeric_dimension.abs() <= 1e-8);
    for r in &reports[1..] {
        assert_eq!(r.commutative_verdict, Verdict::Commutative, "ξ = {}", r.xi);
        assert_eq!(r.declared_dimension, 1);
        assert!(r.converged);
        assert!(r.fourier_residual_max <= 1e-6);
        assert!(r.repro_residual_max <= 1e-6);
        assert!(r.normalization_residual <= 1e-6);
    }
    // Sorted ascending by frequency.
    assert_eq!(reports[0].xi, Frequency::scalar(-1.0));
    assert_eq!(reports[2].xi, Frequency::scalar(2.0));
}

#[test]
fn report_classifies_matrix_model() {
    let model = get_model("vertical-poly:n=2").unwrap();
    let grid = [Frequency::scalar(1.0)];
    let pairs = default_yv_pairs(&model, 6, DEFAULT_SEED);
    let reports =
        commutativity_report(&model, &grid, &pairs, &spec(), &VerdictTolerances::default());
    let r = &reports[0];
    assert_eq!(r.commutative_verdict, Verdict::NonCommutative);
    assert_eq!(r.declared_dimension, 2);
    assert!((r.numeric_dimension - 2.0).abs() <= 1e-6);
    assert!(r.schwarz_residual_max > 1e-2);
    assert!(r.repro_residual_max <= 1e-6);
}

#[test]
fn default_grids_respect_the_dual_group() {
    let radial = get_model("radial-analytic").unwrap();
    let grid = default_xi_grid(&radial);
    assert_eq!(grid.len(), 9);
    assert_eq!(grid[0], Frequency::integer(-4));
    assert_eq!(grid[8], Frequency::integer(4));

    let vertical = get_model("vertical-analytic").unwrap();
    let grid = default_xi_grid(&vertical);
    assert_eq!(grid.len(), 5);
    assert!(grid.iter().all(|f| f.dim() == 1));

    let planar = get_model("gaussian-rbf:n=2,alpha=1.0").unwrap();
    let grid = default_xi_grid(&planar);
    assert!(grid.iter().all(|f| f.dim() == 2));
}

#[test]
fn verdict_serializes_in_kebab_case() {
    assert_eq!(serde_json::to_string(&Verdict::OutsideOmega).unwrap(), "\"outside-omega\"");
    assert_eq!(Verdict::Commutative.to_string(), "commutative");
}

// -- Property checks --------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The dimension integral lands near an integer on every model.
    #[test]
    fn dimension_integral_is_near_integer(idx in 0usize..9, t in 0.1f64..1.0) {
        let ids = [
            "vertical-analytic", "vertical-harmonic", "vertical-true-poly:m=2",
            "vertical-poly:n=2", "wavelet-affine", "radial-analytic",
            "radial-harmonic", "angular-analytic", "gaussian-rbf",
        ];
        let model = get_model(ids[idx]).unwrap();
        let xi = match model.omega_kind() {
            crate::catalog::OmegaKind::NonnegativeIntegers
            | crate::catalog::OmegaKind::AllIntegers => Frequency::integer((t * 4.0) as i64),
            _ => Frequency::scalar(0.25 + 2.0 * t),
        };
        let r = fiber_dimension(&model, &xi, &spec()).unwrap();
        let declared = model.fiber_count(&xi) as f64;
        prop_assert!(
            (r.value.re - declared).abs() <= 1e-6,
            "{}: dimension {} vs declared {}", ids[idx], r.value.re, declared
        );
    }

    /// Fourier agreement between the numeric and closed-form fibers.
    #[test]
    fn numeric_fiber_agrees_with_closed_form(idx in 0usize..9, t1 in 0.05f64..0.95, t2 in 0.05f64..0.95) {
        let ids = [
            "vertical-analytic", "vertical-harmonic", "vertical-true-poly:m=2",
            "vertical-poly:n=2", "wavelet-affine", "radial-analytic",
            "radial-harmonic", "angular-analytic", "gaussian-rbf",
        ];
        let model = get_model(ids[idx]).unwrap();
        let xi = match model.omega_kind() {
            crate::catalog::OmegaKind::NonnegativeIntegers => Frequency::integer(2),
            crate::catalog::OmegaKind::AllIntegers => Frequency::integer(-2),
            _ => Frequency::scalar(1.25),
        };
        let point = |t: f64| -> Vec<f64> {
            model.typical_y_range().iter().map(|(lo, hi)| lo + t * (hi - lo)).collect()
        };
        let (y, v) = (point(t1), point(t2));
        let numeric = compute_l_numeric(&model, &xi, &y, &v, &spec()).unwrap();
        let closed = model.eval_l(&xi, &y, &v).unwrap();
        let tol = 1e-6f64.max(1e-6 * closed.norm());
        prop_assert!(
            (numeric.value - closed).norm() <= tol,
            "{}: numeric {} vs closed {}", ids[idx], numeric.value, closed
        );
    }

    /// Rank-one criteria agree: numeric dimension ≈ 1, tiny Schwarz
    /// residual and Gram rank 1 stand or fall together.
    #[test]
    fn commutativity_criteria_agree(idx in 0usize..9) {
        let ids = [
            "vertical-analytic", "vertical-harmonic", "vertical-true-poly:m=2",
            "vertical-poly:n=3", "wavelet-affine", "radial-analytic",
            "radial-harmonic", "angular-analytic", "gaussian-rbf",
        ];
        let model = get_model(ids[idx]).unwrap();
        let xi = match model.omega_kind() {
            crate::catalog::OmegaKind::NonnegativeIntegers
            | crate::catalog::OmegaKind::AllIntegers => Frequency::integer(1),
            _ => Frequency::scalar(1.0),
        };
        let dim = fiber_dimension(&model, &xi, &spec()).unwrap().value.re;
        let pairs = default_yv_pairs(&model, 6, DEFAULT_SEED);
        let schwarz = schwarz_residual(&model, &xi, &pairs).unwrap();
        let samples = spread_samples(&model, model.fiber_count(&xi) + 3);
        let rank = gram_rank(&model, &xi, &samples, 1e-8).unwrap();
        let by_dimension = (dim - 1.0).abs() <= 1e-6;
        let by_schwarz = schwarz <= 1e-8;
        let by_rank = rank == 1;
        prop_assert_eq!(by_dimension, by_schwarz, "{}: dim {} schwarz {:.3e}", ids[idx], dim, schwarz);
        prop_assert_eq!(by_dimension, by_rank, "{}: dim {} rank {}", ids[idx], dim, rank);
    }
}
