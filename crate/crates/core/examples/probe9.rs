//! Throwaway: cost anatomy of the projection oracle's nesting at several ξ.

use rkhsdiag_core::catalog::{get_model, GroupAxis};
use rkhsdiag_core::quadrature::{fourier_integral, integrate, QuadSpec};
use rkhsdiag_core::Complex64;
use std::cell::Cell;
use std::time::Instant;

fn main() {
    let model = get_model("vertical-analytic").unwrap();
    let axis = model.group().axes()[0];
    let conv = match axis {
        GroupAxis::Line(c) => c,
        _ => unreachable!(),
    };
    let haar = axis.haar();
    let spec = QuadSpec::default();
    let mid = spec.tightened(4.0);
    let (v, w) = (0.4_f64, 0.6_f64);
    let zero = Complex64::new(0.0, 0.0);
    let nan = Complex64::new(f64::NAN, f64::NAN);

    for xi in [0.25_f64, 0.5, 1.0] {
        let outer_evals = Cell::new(0usize);
        let t0 = Instant::now();
        let r = fourier_integral(
            |x| {
                outer_evals.set(outer_evals.get() + 1);
                let sm = integrate(
                    |u| {
                        let g = (-0.5 * u * u).exp();
                        if g == 0.0 {
                            return zero;
                        }
                        Complex64::new(g, 0.0)
                            * model.eval_k0(&[x - u], &[v], &[w]).unwrap_or(nan)
                    },
                    &haar,
                    &mid,
                );
                sm.map(|r| r.value).unwrap_or(nan)
            },
            xi,
            conv,
            &mid,
        )
        .unwrap();
        println!(
            "xi={xi}: transform = {} u-integrals in {:?}, |value| {:.3e}",
            outer_evals.get(),
            t0.elapsed(),
            r.value.norm()
        );
    }

    // Outer w-integral anatomy: count live nodes with a cheap stand-in whose
    // magnitude/decay mimics |transform| ≈ 0.2·e^{−1.57 w}.
    let ym = model.y_measure_axes().remove(0);
    let live = Cell::new(0usize);
    let r = integrate(
        |w: f64| {
            let hw = w * (-w).exp();
            if hw == 0.0 {
                return zero;
            }
            live.set(live.get() + 1);
            Complex64::new(hw * 0.2 * (-1.57 * (0.4 + w)).exp(), 0.0)
        },
        &ym,
        &spec,
    )
    .unwrap();
    println!(
        "outer stand-in: {} live evals, |value| {:.3e}",
        live.get(),
        r.value.norm()
    );
}
