//! Adaptive Gauss–Kronrod engine, truncation heuristics and tail acceleration.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{QuadSpec, QuadratureError};

/// 15-point Kronrod abscissae on `[-1, 1]` (nonnegative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_4,
    0.209_482_141_084_727_828_0,
];

/// Embedded 7-point Gauss weights (for `XGK[1]`, `XGK[3]`, `XGK[5]`, `XGK[7]`).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_9,
    0.417_959_183_673_469_387_8,
];

/// Geometric envelope scan: first probe distance from the origin.
const SCAN_START: f64 = 1e-4;
/// Geometric envelope scan: ratio between consecutive probe distances.
const SCAN_RATIO: f64 = 1.25;
/// Geometric envelope scan: maximum number of probes per side.
const SCAN_STEPS: usize = 280;
/// Truncation cap: beyond this distance slowly decaying integrands are handled
/// by accelerated tail summation instead of brute-force truncation.
const CORE_CAP: f64 = 200.0;
/// Maximum number of tail chunks fed to the epsilon algorithm.
const TAIL_CHUNKS: usize = 28;

/// A scored subinterval in the adaptive heap.
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Roundoff floor `50 ε ∫|f|` of this piece: no refinement can push the
    /// error estimate below it.
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// How accelerated tail chunks advance from the truncation edge.
pub(crate) enum ChunkScheme {
    /// Fixed-length chunks (half periods of an oscillatory factor).
    Arithmetic(f64),
    /// Geometrically growing chunks for monotone tails.
    Geometric(f64),
}

pub(crate) struct Engine<'a> {
    spec: &'a QuadSpec,
    evaluations: u64,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(spec: &'a QuadSpec) -> Self {
        Self { spec, evaluations: 0 }
    }

    pub(crate) fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn eval(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        x: f64,
    ) -> Result<Complex64, QuadratureError> {
        self.evaluations += 1;
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QuadratureError::NonFiniteEvaluation { x });
        }
        Ok(v)
    }

    /// One 15-point Gauss–Kronrod rule on `[a, b]` with a QUADPACK-style
    /// rescaled error estimate.
    fn gk15(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        a: f64,
        b: f64,
    ) -> Result<Segment, QuadratureError> {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut fv = [Complex64::new(0.0, 0.0); 15];
        for (i, &x) in XGK.iter().enumerate() {
            if i == 7 {
                fv[7] = self.eval(f, center)?;
            } else {
                fv[i] = self.eval(f, center - half * x)?;
                fv[14 - i] = self.eval(f, center + half * x)?;
            }
        }
        let mut res_kronrod = Complex64::new(0.0, 0.0);
        let mut res_abs = 0.0;
        for i in 0..8 {
            let pair = if i == 7 { fv[7] } else { fv[i] + fv[14 - i] };
            res_kronrod += WGK[i] * pair;
            res_abs += WGK[i] * if i == 7 { fv[7].norm() } else { fv[i].norm() + fv[14 - i].norm() };
        }
        let mut res_gauss = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let j = 2 * i + 1;
            let pair = if j == 7 { fv[7] } else { fv[j] + fv[14 - j] };
            res_gauss += WG[i] * pair;
        }
        let mean = res_kronrod * 0.5;
        let mut res_asc = 0.0;
        for i in 0..8 {
            let w = WGK[i];
            if i == 7 {
                res_asc += w * (fv[7] - mean).norm();
            } else {
                res_asc += w * ((fv[i] - mean).norm() + (fv[14 - i] - mean).norm());
            }
        }
        let res_abs = res_abs * half.abs();
        let res_asc = res_asc * half.abs();
        let raw = ((res_kronrod - res_gauss) * half).norm();
        let mut error = raw;
        if res_asc != 0.0 && raw != 0.0 {
            error = res_asc * 1.0_f64.min((200.0 * raw / res_asc).powf(1.5));
        }
        let round_off = 50.0 * f64::EPSILON * res_abs;
        let mut floor = 0.0;
        if round_off > f64::MIN_POSITIVE / f64::EPSILON {
            error = error.max(round_off);
            floor = round_off;
        }
        Ok(Segment { a, b, value: res_kronrod * half, error, floor })
    }

    /// Adaptive bisection over a set of seed intervals given by consecutive
    /// boundaries.  Returns the value, the summed error estimate and the
    /// summed roundoff floor of the final partition.
    ///
    /// Refinement stops once the estimate drops to the tolerance *or* to the
    /// partition's aggregate roundoff floor `50 ε ∫|f|`: below that point the
    /// estimate is pure f64 noise (the floor is invariant under refinement,
    /// so further splitting cannot help).
    fn adaptive(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        boundaries: &[f64],
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: u32,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        let mut heap = BinaryHeap::new();
        let mut total = Complex64::new(0.0, 0.0);
        let mut total_err = 0.0;
        let mut total_floor = 0.0;
        for w in boundaries.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let seg = self.gk15(f, w[0], w[1])?;
            total += seg.value;
            total_err += seg.error;
            total_floor += seg.floor;
            heap.push(seg);
        }
        let mut splits = 0u32;
        while total_err > abs_tol.max(rel_tol * total.norm()).max(total_floor)
            && splits < max_subdivisions
        {
            let worst = match heap.pop() {
                Some(s) => s,
                None => break,
            };
            if (worst.b - worst.a) < 8.0 * f64::EPSILON * worst.b.abs().max(worst.a.abs()).max(1.0)
            {
                // Cannot refine further in f64; put it back and stop.
                heap.push(worst);
                break;
            }
            let mid = 0.5 * (worst.a + worst.b);
            let left = self.gk15(f, worst.a, mid)?;
            let right = self.gk15(f, mid, worst.b)?;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            total_floor += left.floor + right.floor - worst.floor;
            heap.push(left);
            heap.push(right);
            splits += 1;
        }
        // Recompute the totals from the final partition to shed accumulation
        // drift from the incremental updates.
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let mut floor = 0.0;
        for seg in heap.iter() {
            value += seg.value;
            error += seg.error;
            floor += seg.floor;
        }
        Ok((value, error, floor))
    }

    pub(crate) fn integrate_interval(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        a: f64,
        b: f64,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        self.adaptive(f, &[a, b], self.spec.abs_tol, self.spec.rel_tol, self.spec.max_subdivisions)
    }

    /// Probe `|f|` along `origin + dir·SCAN_START·SCAN_RATIO^k` and record the
    /// samples for truncation decisions.
    fn scan_side(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        origin: f64,
        dir: f64,
    ) -> Result<Vec<(f64, f64)>, QuadratureError> {
        let mut samples = Vec::with_capacity(SCAN_STEPS);
        let mut dist = SCAN_START;
        for _ in 0..SCAN_STEPS {
            let x = origin + dir * dist;
            let v = self.eval(f, x)?;
            samples.push((dist, v.norm()));
            dist *= SCAN_RATIO;
        }
        Ok(samples)
    }

    /// Distance at which the sampled envelope has durably dropped below
    /// `eps · peak`; `None` when the scan never sees that happen.
    fn cutoff(samples: &[(f64, f64)], peak: f64, eps: f64) -> Option<f64> {
        let threshold = eps * peak;
        match samples.iter().rposition(|&(_, v)| v > threshold) {
            // The whole side is negligible against the global peak.
            None => Some(samples.first().map(|s| s.0).unwrap_or(SCAN_START)),
            // Keep three probe spacings of slack past the last live sample.
            Some(i) => samples.get(i + 3).map(|s| s.0),
        }
    }

    /// Seed boundaries on one side of `origin`, spaced so that consecutive
    /// probe distances grow by at most a factor of 4 (refined near the origin,
    /// coarse far out).
    fn side_boundaries(origin: f64, dir: f64, cut: f64) -> Vec<f64> {
        let mut pts = vec![origin];
        let mut dist = SCAN_START;
        while dist < cut {
            pts.push(origin + dir * dist);
            dist *= 4.0;
        }
        pts.push(origin + dir * cut);
        pts
    }

    pub(crate) fn integrate_half_line(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        a: f64,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        let samples = self.scan_side(f, a, 1.0)?;
        let peak = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v));
        if peak == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0, 0.0));
        }
        let (cut, tail_needed) = match Self::cutoff(&samples, peak, self.spec.truncation_eps) {
            Some(c) => (c, false),
            None => (CORE_CAP, true),
        };
        let mut boundaries = Self::side_boundaries(a, 1.0, cut);
        boundaries.sort_by(f64::total_cmp);
        let (mut value, mut error, floor) = self.adaptive(
            f,
            &boundaries,
            self.spec.abs_tol,
            self.spec.rel_tol,
            self.spec.max_subdivisions,
        )?;
        if tail_needed {
            let (tv, te) = self.tail_sum(f, a + cut, 1.0, ChunkScheme::Geometric(2.0))?;
            value += tv;
            error += te;
        }
        Ok((value, error, floor))
    }

    pub(crate) fn integrate_full_line(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        self.oscillatory_full_line(f, 0.0)
    }

    /// Full-line integration of `f` whose oscillation phase rate (if any) is
    /// `rate`; used both for plain integrals (`rate = 0`) and Fourier
    /// transforms.  The envelope scan caps the truncation radius; beyond the
    /// cap the tails are summed in chunks and extrapolated.
    pub(crate) fn oscillatory_full_line(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        rate: f64,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        let right = self.scan_side(f, 0.0, 1.0)?;
        let left = self.scan_side(f, 0.0, -1.0)?;
        let peak = right
            .iter()
            .chain(left.iter())
            .fold(0.0f64, |m, &(_, v)| m.max(v));
        if peak == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0, 0.0));
        }
        let eps = self.spec.truncation_eps;
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let mut boundaries: Vec<f64> = Vec::new();
        let mut tails: Vec<(f64, f64)> = Vec::new();
        for (samples, dir) in [(&right, 1.0), (&left, -1.0)] {
            let (cut, tail_needed) = match Self::cutoff(samples, peak, eps) {
                // With an oscillatory factor a wide core is expensive (the
                // seeds are split per half period), so cap it and let the
                // accelerated tail cover the remainder.
                Some(c) if rate > 1e-9 && c > CORE_CAP => (CORE_CAP, true),
                Some(c) => (c, false),
                None => (CORE_CAP, true),
            };
            let mut side = Self::side_boundaries(0.0, dir, cut);
            boundaries.append(&mut side);
            if tail_needed {
                tails.push((dir * cut, dir));
            }
        }
        boundaries.sort_by(f64::total_cmp);
        boundaries.dedup();
        let boundaries = Self::refine_for_oscillation(&boundaries, rate);
        let (core_v, core_e, floor) = self.adaptive(
            f,
            &boundaries,
            self.spec.abs_tol,
            self.spec.rel_tol,
            self.spec.max_subdivisions,
        )?;
        value += core_v;
        error += core_e;
        for (edge, dir) in tails {
            let scheme = if rate > 1e-9 {
                ChunkScheme::Arithmetic(std::f64::consts::PI / rate)
            } else {
                ChunkScheme::Geometric(2.0)
            };
            let (tv, te) = self.tail_sum(f, edge, dir, scheme)?;
            value += tv;
            error += te;
        }
        Ok((value, error, floor))
    }

    /// Split every seed interval so no piece spans more than half an
    /// oscillation period.
    fn refine_for_oscillation(boundaries: &[f64], rate: f64) -> Vec<f64> {
        if rate <= 1e-9 {
            return boundaries.to_vec();
        }
        let max_len = std::f64::consts::PI / rate;
        let mut out = Vec::with_capacity(boundaries.len());
        for w in boundaries.windows(2) {
            out.push(w[0]);
            let len = w[1] - w[0];
            if len > max_len {
                let pieces = (len / max_len).ceil() as usize;
                for p in 1..pieces {
                    out.push(w[0] + len * (p as f64) / (pieces as f64));
                }
            }
        }
        if let Some(&last) = boundaries.last() {
            out.push(last);
        }
        out
    }

    /// Sum tail chunks starting at `edge` going in direction `dir` and
    /// extrapolate the partial sums with Wynn's epsilon algorithm.
    pub(crate) fn tail_sum(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
        edge: f64,
        dir: f64,
        scheme: ChunkScheme,
    ) -> Result<(Complex64, f64), QuadratureError> {
        let mut partials = Vec::with_capacity(TAIL_CHUNKS);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pos = edge;
        let mut chunk_scale = 0.0f64;
        for k in 0..TAIL_CHUNKS {
            let len = match scheme {
                ChunkScheme::Arithmetic(h) => h,
                ChunkScheme::Geometric(r) => (pos.abs().max(1.0)) * (r - 1.0),
            };
            let next = pos + dir * len;
            let (lo, hi) = if dir > 0.0 { (pos, next) } else { (next, pos) };
            let (cv, _ce, _cf) =
                self.adaptive(f, &[lo, 0.5 * (lo + hi), hi], self.spec.abs_tol * 0.1, self.spec.rel_tol * 0.1, 40)?;
            sum += cv;
            partials.push(sum);
            chunk_scale = chunk_scale.max(cv.norm());
            pos = next;
            if k >= 4 && cv.norm() < self.spec.truncation_eps * chunk_scale.max(1e-300) {
                break;
            }
        }
        Ok(wynn_epsilon(&partials))
    }

    /// Trapezoidal rule over one period of the circle with a half-grid
    /// Richardson error estimate.
    pub(crate) fn integrate_circle(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        let n = self.spec.circle_nodes;
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let mut full = Complex64::new(0.0, 0.0);
        let mut half = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for k in 0..n {
            let v = self.eval(f, k as f64 * step)?;
            full += v;
            if k % 2 == 0 {
                half += v;
            }
            abs_sum += v.norm();
        }
        let value = full * step;
        let coarse = half * (2.0 * step);
        let floor = 8.0 * f64::EPSILON * abs_sum * step;
        Ok((value, (value - coarse).norm().max(floor), floor))
    }

    /// Weighted counting-measure sum over `ℤ`, spiralling outward from 0 and
    /// truncating once both directions have durably decayed.
    pub(crate) fn integrate_lattice(
        &mut self,
        f: &mut dyn FnMut(f64) -> Complex64,
    ) -> Result<(Complex64, f64, f64), QuadratureError> {
        const MAX_RANGE: i64 = 200_000;
        let mut sum = self.eval(f, 0.0)?;
        let mut peak = sum.norm();
        let mut last = [0.0f64; 2];
        let mut done = [false; 2];
        let mut below = [0usize; 2];
        let mut k: i64 = 1;
        while k <= MAX_RANGE && !(done[0] && done[1]) {
            if peak == 0.0 && k > 8 {
                // Identically zero as far as sampled; nothing to sum.
                break;
            }
            for (side, dir) in [(0usize, 1.0f64), (1usize, -1.0f64)] {
                if done[side] {
                    continue;
                }
                let term = self.eval(f, dir * k as f64)?;
                sum += term;
                let t = term.norm();
                peak = peak.max(t);
                last[side] = t;
                if peak > 0.0 && t <= self.spec.truncation_eps * peak {
                    below[side] += 1;
                    if below[side] >= 3 {
                        done[side] = true;
                    }
                } else {
                    below[side] = 0;
                }
            }
            k += 1;
        }
        let truncation = 4.0 * (last[0] + last[1]);
        let round_off = f64::EPSILON * peak * (2 * k) as f64;
        Ok((sum, truncation + round_off, round_off))
    }
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.  Returns the
/// accelerated limit and a conservative error estimate from the last two
/// stable even-column estimates.
pub(crate) fn wynn_epsilon(partials: &[Complex64]) -> (Complex64, f64) {
    let n = partials.len();
    if n == 0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    if n == 1 {
        return (partials[0], partials[0].norm());
    }
    // `curr` is column `col` of the epsilon table; even columns carry the
    // estimates, odd columns are auxiliary reciprocals.
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut curr: Vec<Complex64> = partials.to_vec();
    let mut best = *partials.last().unwrap();
    let mut prev_best = partials[n - 2];
    let mut col = 0usize;
    'outer: while curr.len() > 1 {
        let mut next = Vec::with_capacity(curr.len() - 1);
        for j in 0..curr.len() - 1 {
            let delta = curr[j + 1] - curr[j];
            if delta.norm() < 1e-300 {
                if col % 2 == 0 {
                    // Two equal estimates: converged to machine level.
                    prev_best = best;
                    best = curr[j + 1];
                }
                break 'outer;
            }
            next.push(prev[j + 1] + 1.0 / delta);
        }
        prev = std::mem::replace(&mut curr, next);
        col += 1;
        if col % 2 == 0 {
            if let Some(&cand) = curr.last() {
                prev_best = best;
                best = cand;
            }
        }
    }
    let err = (best - prev_best).norm();
    (best, err.max(f64::EPSILON * best.norm()))
}
