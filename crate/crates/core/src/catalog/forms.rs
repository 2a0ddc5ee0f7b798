//! Closed-form kernel, fiber and section evaluations for the built-in models.
//!
//! Every function here is total on its documented domain: evaluations that
//! mathematically underflow return `0.0` instead of tripping over `0 · ∞` or
//! overflowing intermediates, because the quadrature layer probes integrands
//! at extreme arguments while hunting for truncation points.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::specialfns::{laguerre, WaveletModel};

/// `√(2/π)`, the fiber normalization of the vertical family.
pub(super) const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
/// `(2/π)^{1/4}`, the section normalization of the vertical family.
pub(super) const QUARTIC_2_OVER_PI: f64 = 0.893_243_841_738_002_3;

/// `e^z` with the real part of `z` clamped so the magnitude stays finite
/// even after squaring.
///
/// Used by the radial-basis forms, whose kernels and sections genuinely grow
/// like `e^{α²‖v+y‖²}` away from the Gaussian fiber measure.  Every consumer
/// pairs such a value with that Gaussian weight, which underflows to an exact
/// zero long before a clamp at `e^{350}` can distort a nonzero product (the
/// worst case is the section with `|ξ| ≈ 5α`, whose weighted square peaks
/// right at the edge of the representable density).  The clamp keeps `|q|²`
/// finite so the products stay an honest `0` instead of `∞ · 0 = NaN`.
fn cexp_clamped(z: Complex64) -> Complex64 {
    Complex64::from_polar(z.re.min(350.0).exp(), z.im)
}

/// Real counterpart of [`cexp_clamped`].
fn exp_clamped(t: f64) -> f64 {
    t.min(350.0).exp()
}

// ---------------------------------------------------------------------------
// Vertical family: G = ℝ (symmetric convention), Y = (0, ∞).
// ---------------------------------------------------------------------------

/// Base kernel of the vertical analytic model, `1 / (π c²)` with
/// `c = (y + v) − iu`.
pub(super) fn vertical_analytic_k0(u: f64, v: f64, y: f64) -> Complex64 {
    let ci = Complex64::new(y + v, -u).inv();
    ci * ci / PI
}

/// Base kernel of the vertical harmonic model: twice the real part of the
/// analytic one.
pub(super) fn vertical_harmonic_k0(u: f64, v: f64, y: f64) -> Complex64 {
    let k = vertical_analytic_k0(u, v, y);
    Complex64::new(2.0 * k.re, 0.0)
}

/// Base kernel of the rank-one polynomial model of degree parameter `m`.
///
/// Expanded as `(1/π) Σ_{j,k} w_{jk} (2y·c⁻¹)^j (2v·c⁻¹)^k c⁻²` with the
/// combinatorial weights `w_{jk} = (−1)^{j+k} C(m−1,j) C(m−1,k)
/// (j+k+1)!/(j!k!)`.  The factors `|2y·c⁻¹|` and `|2v·c⁻¹|` are bounded by 2,
/// so the only decaying quantity is `c⁻²` and the sum underflows cleanly far
/// from the diagonal.
pub(super) fn vertical_true_poly_k0(m: usize, u: f64, v: f64, y: f64) -> Complex64 {
    let ci = Complex64::new(y + v, -u).inv();
    let ay = 2.0 * y * ci;
    let av = 2.0 * v * ci;
    let deg = m - 1;
    let ay_pow = power_table(ay, deg);
    let av_pow = power_table(av, deg);
    let fact = factorial_table(2 * deg + 1);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=deg {
        for k in 0..=deg {
            let w = neg_one_pow(j + k) * binomial(&fact, deg, j) * binomial(&fact, deg, k)
                * fact[j + k + 1]
                / (fact[j] * fact[k]);
            sum += w * ay_pow[j] * av_pow[k];
        }
    }
    sum * ci * ci / PI
}

/// Base kernel of the rank-`n` polynomial model in its Jacobi form:
/// `n(−1)^n/π · r^{n−1} d⁻² d⁻^{n−1} P_{n−1}^{(0,1)}(s)` with
/// `d = w − z̄`, `r = (z − w̄)/d` (unimodular) and
/// `s = 2|w − z|²/|w − z̄|² − 1 ∈ [−1, 1]`, where `z = iy`, `w = u + iv`.
pub(super) fn vertical_poly_k0(n: usize, u: f64, v: f64, y: f64) -> Complex64 {
    let d = Complex64::new(u, v + y);
    let di = d.inv();
    let r = Complex64::new(-u, v + y) * di;
    let norm = u.hypot(v + y);
    let s = if norm == 0.0 {
        1.0
    } else {
        let un = u / norm;
        let vm = (v - y) / norm;
        (2.0 * (un * un + vm * vm) - 1.0).clamp(-1.0, 1.0)
    };
    // (z − w̄)^{n−1} / d^{n+1} = r^{n−1} · d⁻², with |r| = 1 exactly.
    let mut r_pow = Complex64::new(1.0, 0.0);
    for _ in 1..n {
        r_pow *= r;
    }
    let sign = neg_one_pow(n) * n as f64 / PI;
    sign * r_pow * di * di * crate::specialfns::jacobi01(n - 1, s)
}

/// Fiber of the vertical analytic model: `√(2/π) ξ e^{−ξ(y+v)}` on `ξ > 0`.
pub(super) fn vertical_analytic_l(xi: f64, y: f64, v: f64) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    SQRT_2_OVER_PI * xi * decayed_exp(-xi * (y + v))
}

/// Fiber of the vertical harmonic model: the analytic fiber in `|ξ|`, `ξ ≠ 0`.
pub(super) fn vertical_harmonic_l(xi: f64, y: f64, v: f64) -> f64 {
    vertical_analytic_l(xi.abs(), y, v)
}

/// Fiber of the rank-one polynomial model:
/// `√(2/π) ξ e^{−ξ(y+v)} L_{m−1}(2ξy) L_{m−1}(2ξv)` on `ξ > 0`.
pub(super) fn vertical_true_poly_l(m: usize, xi: f64, y: f64, v: f64) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    let damp = decayed_exp(-xi * (y + v));
    if damp == 0.0 {
        // The Laguerre arguments 2ξy, 2ξv would overflow the recurrence long
        // after the exponential underflows, so the product is an honest zero.
        return 0.0;
    }
    SQRT_2_OVER_PI * xi * damp * laguerre(m - 1, 2.0 * xi * y) * laguerre(m - 1, 2.0 * xi * v)
}

/// One diagonal entry (index `1 ≤ j ≤ n`) of the rank-`n` polynomial fiber.
pub(super) fn vertical_poly_l_entry(n: usize, j: usize, xi: f64, y: f64, v: f64) -> f64 {
    debug_assert!(1 <= j && j <= n);
    vertical_true_poly_l(j, xi, y, v)
}

/// Full rank-`n` polynomial fiber: `Σ_{j=1}^{n} conj(q_j(y)) q_j(v)`.
pub(super) fn vertical_poly_l(n: usize, xi: f64, y: f64, v: f64) -> f64 {
    (1..=n).map(|j| vertical_poly_l_entry(n, j, xi, y, v)).sum()
}

/// Section of the vertical analytic fiber, `(2/π)^{1/4} √ξ e^{−ξv}`.
pub(super) fn vertical_analytic_q(xi: f64, v: f64) -> f64 {
    QUARTIC_2_OVER_PI * xi.sqrt() * decayed_exp(-xi * v)
}

/// Section of the rank-one polynomial fiber.
pub(super) fn vertical_true_poly_q(m: usize, xi: f64, v: f64) -> f64 {
    let damp = decayed_exp(-xi * v);
    if damp == 0.0 {
        return 0.0;
    }
    QUARTIC_2_OVER_PI * xi.sqrt() * damp * laguerre(m - 1, 2.0 * xi * v)
}

// ---------------------------------------------------------------------------
// Wavelet model: G = ℝ (ordinary convention), Y = (0, ∞), dλ = dv/v².
// ---------------------------------------------------------------------------

/// Base kernel of the wavelet model with the built-in admissible profile.
///
/// With `β = 2π²(v² + y²)`, `ω = 2πu` and `C₀ = 4π²√(2π) c`:
/// `√(vy) C₀² v²y² √(π/β) e^{−ω²/(4β)} [3/(4β²) − 3ω²/(4β³) + ω⁴/(16β⁴)]`.
pub(super) fn wavelet_k0(wavelet: &WaveletModel, u: f64, v: f64, y: f64) -> f64 {
    if v <= 0.0 || y <= 0.0 || v > 1e100 || y > 1e100 {
        // Beyond 1e100 the closed form is ≲ 1e−240 but its intermediates
        // overflow; the kernel extends by zero on the boundary v = 0.
        return 0.0;
    }
    let c0 = 4.0 * PI * PI * (2.0 * PI).sqrt() * wavelet.admissibility_constant();
    let beta = 2.0 * PI * PI * (v * v + y * y);
    let omega = 2.0 * PI * u;
    let w2 = omega * omega;
    let damp_arg = w2 / (4.0 * beta);
    if !(damp_arg <= 1500.0) {
        return 0.0;
    }
    let b2 = beta * beta;
    let poly = 3.0 / (4.0 * b2) - 3.0 * w2 / (4.0 * b2 * beta) + w2 * w2 / (16.0 * b2 * b2);
    (v * y).sqrt() * c0 * c0 * v * v * y * y * (PI / beta).sqrt() * (-damp_arg).exp() * poly
}

/// Fiber of the wavelet model: `√(vy) (Fψ)(yξ) (Fψ)(vξ)`.
pub(super) fn wavelet_l(wavelet: &WaveletModel, xi: f64, y: f64, v: f64) -> f64 {
    if xi == 0.0 || v < 0.0 || y < 0.0 {
        return 0.0;
    }
    let fy = wavelet.freq_profile(y * xi);
    if fy == 0.0 {
        return 0.0;
    }
    let fv = wavelet.freq_profile(v * xi);
    if fv == 0.0 {
        return 0.0;
    }
    (v * y).sqrt() * fy * fv
}

/// Section of the wavelet fiber, `√v (Fψ)(vξ)`.
pub(super) fn wavelet_q(wavelet: &WaveletModel, xi: f64, v: f64) -> f64 {
    let fv = wavelet.freq_profile(v * xi);
    if fv == 0.0 {
        return 0.0;
    }
    v.sqrt() * fv
}

// ---------------------------------------------------------------------------
// Radial family: G = circle, Y = [0, 1), dλ = v dv.
// ---------------------------------------------------------------------------

/// Base kernel of the radial analytic model, `2 / (1 − z)²` with
/// `z = yv e^{iu}`.
pub(super) fn radial_analytic_k0(u: f64, v: f64, y: f64) -> Complex64 {
    let z = Complex64::from_polar(y * v, u);
    let d = Complex64::new(1.0, 0.0) - z;
    2.0 * (d * d).inv()
}

/// Base kernel of the radial harmonic model,
/// `2/(1 − z)² + 2/(1 − z̄)² − 2`.
pub(super) fn radial_harmonic_k0(u: f64, v: f64, y: f64) -> Complex64 {
    let k = radial_analytic_k0(u, v, y);
    Complex64::new(2.0 * k.re - 2.0, 0.0)
}

/// Fiber of the radial analytic model: `2(ξ+1) (yv)^ξ` on `ξ ∈ {0, 1, 2, …}`.
pub(super) fn radial_analytic_l(xi: i64, y: f64, v: f64) -> f64 {
    if xi < 0 {
        return 0.0;
    }
    2.0 * (xi + 1) as f64 * radial_power(y * v, xi)
}

/// Fiber of the radial harmonic model: the analytic fiber in `|ξ|`.
pub(super) fn radial_harmonic_l(xi: i64, y: f64, v: f64) -> f64 {
    radial_analytic_l(xi.abs(), y, v)
}

/// Section of the radial analytic fiber, `√(2(ξ+1)) v^ξ`.
pub(super) fn radial_analytic_q(xi: i64, v: f64) -> f64 {
    (2.0 * (xi + 1) as f64).sqrt() * radial_power(v, xi)
}

/// `x^k` for lattice exponents, with `0⁰ = 1` and clean underflow.
fn radial_power(x: f64, k: i64) -> f64 {
    debug_assert!(k >= 0);
    if k > i32::MAX as i64 {
        // |x| < 1 on the radial domain, so astronomically large exponents
        // are an exact underflow.
        return if x == 1.0 { 1.0 } else { 0.0 };
    }
    x.powi(k as i32)
}

// ---------------------------------------------------------------------------
// Angular model: G = ℝ (symmetric convention), Y = [0, π].
// ---------------------------------------------------------------------------

/// Base kernel of the angular model, `−√(2/π) / (4 sinh²((u + i(v+y))/2))`.
pub(super) fn angular_k0(u: f64, v: f64, y: f64) -> Complex64 {
    let half = Complex64::new(u, v + y) / 2.0;
    if half.re.abs() > 350.0 {
        // sinh² ~ e^{|u|} / 4 here, far past the point where 1/sinh²
        // underflows; bail out before the complex division meets ∞.
        return Complex64::new(0.0, 0.0);
    }
    let s = half.sinh();
    -(2.0f64 / PI).sqrt() / 4.0 * (s * s).inv()
}

/// Normalization `c(ξ) = 2ξ / (1 − e^{−2πξ})` of the angular fiber, extended
/// continuously by `c(0) = 1/π`.
pub(super) fn angular_c(xi: f64) -> f64 {
    if xi == 0.0 {
        return 1.0 / PI;
    }
    let x = 2.0 * PI * xi;
    if x < -700.0 {
        // 1 − e^{−x} overflows; use c(ξ) = −2ξ e^{x} / (1 − e^{x}) → 2|ξ|e^{x}.
        return -2.0 * xi * x.exp();
    }
    2.0 * xi / -(-x).exp_m1()
}

/// Fiber of the angular model: `c(ξ) e^{−ξ(y+v)}` for all real `ξ`.
///
/// For negative `ξ` the normalization decays like `e^{2πξ}` while the
/// exponential grows like `e^{−ξ(y+v)}` with `y + v < 2π`, so the two factors
/// are combined in a single exponent to survive large `|ξ|`.
pub(super) fn angular_l(xi: f64, y: f64, v: f64) -> f64 {
    if xi >= 0.0 {
        return angular_c(xi) * decayed_exp(-xi * (y + v));
    }
    let a = -2.0 * PI * xi;
    let prefactor = -2.0 * xi / -(-a).exp_m1();
    prefactor * decayed_exp(-a - xi * (y + v))
}

/// Section of the angular fiber, `√(c(ξ)) e^{−ξv}` with `v ∈ [0, π]`.
pub(super) fn angular_q(xi: f64, v: f64) -> f64 {
    if xi >= 0.0 {
        return angular_c(xi).sqrt() * decayed_exp(-xi * v);
    }
    let a = -2.0 * PI * xi;
    let prefactor = (-2.0 * xi / -(-a).exp_m1()).sqrt();
    prefactor * decayed_exp(-a / 2.0 - xi * v)
}

// ---------------------------------------------------------------------------
// Radial-basis family: G = ℝⁿ (ordinary convention), Y = ℝⁿ, Gaussian λ.
// ---------------------------------------------------------------------------

/// Base kernel of the Gaussian radial-basis model,
/// `∏_j exp(−α² (u_j + i(v_j + y_j))²)`.
pub(super) fn rbf_k0(alpha: f64, u: &[f64], v: &[f64], y: &[f64]) -> Complex64 {
    let mut exponent = Complex64::new(0.0, 0.0);
    for ((&uj, &vj), &yj) in u.iter().zip(v).zip(y) {
        let c = Complex64::new(uj, vj + yj);
        exponent -= alpha * alpha * c * c;
    }
    cexp_clamped(exponent)
}

/// Fiber of the radial-basis model,
/// `(√π/α)ⁿ exp(−Σ_j [2π(v_j + y_j)ξ_j + π²ξ_j²/α²])`.
pub(super) fn rbf_l(alpha: f64, xi: &[f64], y: &[f64], v: &[f64]) -> f64 {
    let mut exponent = 0.0;
    for ((&fj, &vj), &yj) in xi.iter().zip(v).zip(y) {
        exponent -= 2.0 * PI * (vj + yj) * fj + PI * PI * fj * fj / (alpha * alpha);
    }
    let scale = (PI.sqrt() / alpha).powi(xi.len() as i32);
    scale * exp_clamped(exponent)
}

/// Section of the radial-basis fiber,
/// `(√π/α)^{n/2} exp(−Σ_j [2πv_jξ_j + π²ξ_j²/(2α²)])`.
pub(super) fn rbf_q(alpha: f64, xi: &[f64], v: &[f64]) -> f64 {
    let mut exponent = 0.0;
    for (&fj, &vj) in xi.iter().zip(v) {
        exponent -= 2.0 * PI * vj * fj + PI * PI * fj * fj / (2.0 * alpha * alpha);
    }
    let scale = (PI.sqrt() / alpha).sqrt().powi(xi.len() as i32);
    scale * exp_clamped(exponent)
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

/// `e^t` for `t ≤ 0`-dominated uses: underflows to an exact zero early enough
/// that polynomial cofactors cannot have overflowed yet.
fn decayed_exp(t: f64) -> f64 {
    if t < -745.0 {
        0.0
    } else {
        t.exp()
    }
}

/// `(−1)^k` as a float.
fn neg_one_pow(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `[z⁰, z¹, …, z^deg]`.
fn power_table(z: Complex64, deg: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(deg + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=deg {
        out.push(p);
        p *= z;
    }
    out
}

/// `[0!, 1!, …, n!]` as exact floats (valid through 18!).
fn factorial_table(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = 1.0;
    out.push(1.0);
    for k in 1..=n {
        f *= k as f64;
        out.push(f);
    }
    out
}

/// Binomial coefficient `C(n, k)` from a factorial table.
fn binomial(fact: &[f64], n: usize, k: usize) -> f64 {
    fact[n] / (fact[k] * fact[n - k])
}
