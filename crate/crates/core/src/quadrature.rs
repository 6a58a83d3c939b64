//! Adaptive Gauss-Kronrod integration on finite panels, semi-infinite
//! integration with algebraic-tail acceleration, and Cauchy principal values.
//!
//! All integrators report an absolute error estimate and the number of
//! integrand evaluations. Panel refinement is driven by a worst-error heap
//! and the final summation order is fixed (sorted by panel position), so
//! results are deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar types an integrand may return.
pub trait QuadScalar: Copy + Add<Output = Self> + Sub<Output = Self> {
    const ZERO: Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadScalar for f64 {
    const ZERO: f64 = 0.0;
    fn scale(self, s: f64) -> f64 {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadScalar for Complex64 {
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);
    fn scale(self, s: f64) -> Complex64 {
        self * s
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

/// Converged value of an improper or principal-value integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult<S> {
    pub value: S,
    pub abs_error: f64,
    pub evaluations: usize,
}

// 7-point Gauss / 15-point Kronrod pair (positive abscissae).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<S: QuadScalar, F: FnMut(f64) -> S>(f: &mut F, a: f64, b: f64) -> (S, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);

    let fc = f(c);
    let mut kronrod = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    let mut resabs = fc.norm() * WGK[7];

    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        let sum = f1 + f2;
        kronrod = kronrod + sum.scale(WGK[j]);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss + sum.scale(WG[j / 2]);
        }
    }

    let value = kronrod.scale(h);
    let raw = (kronrod - gauss).norm() * h.abs();
    // QUADPACK-style error rescaling keeps the estimate conservative without
    // collapsing to zero for smooth integrands.
    let resabs = resabs * h.abs();
    let mut err = raw;
    if raw > 0.0 && resabs > 0.0 {
        let scale = (200.0 * raw / resabs).powf(1.5);
        if scale < 1.0 {
            err = resabs * scale;
        }
    }
    let min_err = 50.0 * f64::EPSILON * resabs;
    if min_err > err {
        err = min_err;
    }
    (value, err)
}

struct Panel<S> {
    a: f64,
    b: f64,
    value: S,
    err: f64,
}

impl<S> PartialEq for Panel<S> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl<S> Eq for Panel<S> {}
impl<S> PartialOrd for Panel<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S> Ord for Panel<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then(other.a.total_cmp(&self.a))
    }
}

/// Adaptive refinement over an initial set of seed panels.
fn adaptive_seeded<S: QuadScalar, F: FnMut(f64) -> S>(
    f: &mut F,
    seeds: &[(f64, f64)],
    tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult<S>> {
    let mut heap: BinaryHeap<Panel<S>> = BinaryHeap::new();
    let mut evals = 0usize;
    let mut total_err = 0.0;

    for &(a, b) in seeds {
        if b <= a {
            continue;
        }
        let (v, e) = gk15(f, a, b);
        evals += 15;
        total_err += e;
        heap.push(Panel { a, b, value: v, err: e });
    }

    while total_err > tol && heap.len() < max_panels {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot refine further.
            heap.push(worst);
            break;
        }
        total_err -= worst.err;
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evals += 30;
        total_err += e1 + e2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }

    let mut panels: Vec<Panel<S>> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = S::ZERO;
    let mut err = 0.0;
    for p in &panels {
        value = value + p.value;
        err += p.err;
    }
    Ok(QuadratureResult { value, abs_error: err, evaluations: evals })
}

/// Adaptive refinement with a fixed panel budget; always returns the best
/// value found, with its achieved error estimate, instead of failing.
pub(crate) fn gk_adaptive_panels<S: QuadScalar, F: FnMut(f64) -> S>(
    mut f: F,
    seeds: &[(f64, f64)],
    tol: f64,
    max_panels: usize,
) -> QuadratureResult<S> {
    adaptive_seeded(&mut f, seeds, tol, max_panels).expect("seeded refinement is infallible")
}

/// Integrate `f` over the finite interval `[a, b]` to absolute tolerance.
pub fn integrate<S: QuadScalar, F: FnMut(f64) -> S>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult<S>> {
    let r = adaptive_seeded(&mut f, &[(a, b)], tol, 4000)?;
    if r.abs_error > tol.max(1e-15) * 8.0 {
        return Err(Error::QuadratureFailure { achieved: r.abs_error, requested: tol });
    }
    Ok(r)
}

/// Integrate over `[a, b]` where the integrand behaves like
/// `(x-a)^{-sigma}` (0 <= sigma < 1) near `a`.
///
/// The substitution x = a + (b-a) u^m with m chosen from `sigma` turns the
/// endpoint singularity into a smooth integrand.
pub fn integrate_endpoint_singular<S: QuadScalar, F: FnMut(f64) -> S>(
    mut f: F,
    a: f64,
    b: f64,
    sigma: f64,
    tol: f64,
) -> Result<QuadratureResult<S>> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::InvalidParam(format!(
            "endpoint singularity exponent {sigma} must lie in [0,1)"
        )));
    }
    let m = ((4.0 / (1.0 - sigma)).ceil() as i32).clamp(2, 16);
    let len = b - a;
    let mf = f64::from(m);
    let mut g = |u: f64| -> S {
        let x = a + len * u.powi(m);
        f(x).scale(mf * len * u.powi(m - 1))
    };
    let r = adaptive_seeded(&mut g, &[(0.0, 1.0)], tol, 4000)?;
    if r.abs_error > tol.max(1e-15) * 8.0 {
        return Err(Error::QuadratureFailure { achieved: r.abs_error, requested: tol });
    }
    Ok(r)
}

/// Options for the semi-infinite and principal-value integrators.
#[derive(Debug, Clone, Copy)]
pub struct TailOpts {
    /// Integrand ~ t^{-origin_exponent} as t -> 0+ (0 disables the
    /// regularizing substitution; log singularities are covered by any
    /// positive value).
    pub origin_exponent: f64,
    /// Characteristic scale of the integrand; panel seeding and the initial
    /// truncation point start from it.
    pub scale_hint: f64,
    pub max_panels: usize,
}

impl Default for TailOpts {
    fn default() -> Self {
        TailOpts { origin_exponent: 0.0, scale_hint: 1.0, max_panels: 4000 }
    }
}

/// Fit an algebraic tail C t^{-p} over the last factor-of-8 of samples and
/// return (tail integral beyond `t_max`, error estimate of that tail).
fn tail_estimate<S: QuadScalar, F: FnMut(f64) -> S>(
    f: &mut F,
    t_max: f64,
    p: f64,
) -> (S, f64, usize) {
    let n = 7;
    let mut sum = S::ZERO;
    let mut norms = [0.0f64; 7];
    let mut vals: Vec<S> = Vec::with_capacity(n);
    for (k, norm) in norms.iter_mut().enumerate() {
        let t = t_max * 0.5f64.powf(k as f64 / 2.0);
        // Per-sample estimate of the tail integral implied by C = f(t) t^p.
        let est = f(t).scale(t * (t / t_max).powf(p - 1.0) / (p - 1.0));
        *norm = est.norm();
        sum = sum + est;
        vals.push(est);
    }
    let mean = sum.scale(1.0 / n as f64);
    let mnorm = mean.norm();
    let spread = norms
        .iter()
        .zip(vals.iter())
        .map(|(_, v)| (*v - mean).norm())
        .fold(0.0f64, f64::max);
    let rel = if mnorm > 0.0 { spread / mnorm } else { 0.0 };
    let err = mnorm * (2.0 * rel + 0.02) + 1e-300;
    (mean, err, n)
}

fn semi_infinite_from<S: QuadScalar, F: FnMut(f64) -> S>(
    f: &mut F,
    from: f64,
    decay: f64,
    tol: f64,
    opts: &TailOpts,
) -> Result<QuadratureResult<S>> {
    if decay <= 1.0 {
        return Err(Error::InvalidParam(format!(
            "tail decay exponent {decay} must exceed 1"
        )));
    }
    let scale = opts.scale_hint.max(from).max(1e-300);
    let mut evals = 0usize;

    // Truncation point: extend until the fitted tail is negligible or the
    // range cap is hit; the tail estimate is added either way.
    let mut t_max = 256.0 * scale;
    let (mut tail, mut tail_err, used) = tail_estimate(f, t_max, decay);
    evals += used;
    while tail.norm() > 0.25 * tol && t_max < scale * 1e15 {
        t_max *= 8.0;
        let (t, e, used) = tail_estimate(f, t_max, decay);
        tail = t;
        tail_err = e;
        evals += used;
    }

    // Origin piece [from, from + scale] with optional singular transform,
    // remaining range seeded by octaves.
    let split = (from + scale).min(t_max);
    let mut value;
    let mut err;
    if from == 0.0 && opts.origin_exponent > 0.0 {
        let r = integrate_endpoint_singular(&mut *f, 0.0, split, opts.origin_exponent, 0.3 * tol)?;
        value = r.value;
        err = r.abs_error;
        evals += r.evaluations;
    } else {
        let r = adaptive_seeded(&mut *f, &[(from, split)], 0.3 * tol, opts.max_panels)?;
        value = r.value;
        err = r.abs_error;
        evals += r.evaluations;
    }

    if split < t_max {
        let mut seeds = Vec::new();
        let mut a = split;
        while a < t_max {
            let b = (a * 2.0).min(t_max);
            seeds.push((a, b));
            a = b;
        }
        let r = adaptive_seeded(&mut *f, &seeds, 0.5 * tol, opts.max_panels)?;
        value = value + r.value;
        err += r.abs_error;
        evals += r.evaluations;
    }

    value = value + tail;
    err += tail_err;
    if err > tol.max(1e-15) * 8.0 {
        return Err(Error::QuadratureFailure { achieved: err, requested: tol });
    }
    Ok(QuadratureResult { value, abs_error: err, evaluations: evals })
}

/// Integrate `f` over (0, infinity). The integrand must decay like
/// t^{-decay} with decay > 1; an algebraic singularity weaker than t^{-1}
/// at the origin is permitted when declared through `opts.origin_exponent`.
pub fn integrate_semi_infinite<S: QuadScalar, F: FnMut(f64) -> S>(
    mut f: F,
    decay: f64,
    tol: f64,
    opts: &TailOpts,
) -> Result<QuadratureResult<S>> {
    semi_infinite_from(&mut f, 0.0, decay, tol, opts)
}

/// Cauchy principal value of the integral of `f` over (0, infinity) where
/// `f` has a simple pole at `pole`.
///
/// The pole is removed by the symmetric pairing f(pole+u) + f(pole-u) on
/// u in (0, delta]; the rest of the axis is integrated as usual.
pub fn principal_value<S: QuadScalar, F: FnMut(f64) -> S>(
    mut f: F,
    pole: f64,
    decay: f64,
    tol: f64,
    delta: Option<f64>,
    opts: &TailOpts,
) -> Result<QuadratureResult<S>> {
    if pole <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "principal-value pole {pole} must be interior to (0, infinity)"
        )));
    }
    let delta = delta.unwrap_or(0.5 * pole).min(0.9 * pole);

    let pair = adaptive_seeded(
        &mut |u: f64| f(pole + u) + f(pole - u),
        &[(0.0, delta)],
        0.3 * tol,
        opts.max_panels,
    )?;

    let left = if opts.origin_exponent > 0.0 {
        integrate_endpoint_singular(&mut f, 0.0, pole - delta, opts.origin_exponent, 0.3 * tol)?
    } else {
        adaptive_seeded(&mut f, &[(0.0, pole - delta)], 0.3 * tol, opts.max_panels)?
    };

    let right = semi_infinite_from(&mut f, pole + delta, decay, 0.4 * tol, opts)?;

    let value = pair.value + left.value + right.value;
    let err = pair.abs_error + left.abs_error + right.abs_error;
    let evals = pair.evaluations + left.evaluations + right.evaluations;
    if err > tol.max(1e-15) * 8.0 {
        return Err(Error::QuadratureFailure { achieved: err, requested: tol });
    }
    Ok(QuadratureResult { value, abs_error: err, evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn finite_polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 4.0 - 4.0 + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_semi_infinite(|t: f64| (-t).exp(), 50.0, 1e-10, &TailOpts::default())
            .unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn lorentzian_tail() {
        let r = integrate_semi_infinite(|t: f64| 1.0 / (1.0 + t * t), 2.0, 1e-9, &TailOpts::default())
            .unwrap();
        assert_abs_diff_eq!(r.value, PI / 2.0, epsilon = 1e-9);
        assert!(r.abs_error <= 1e-9 * 8.0);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate_endpoint_singular(|x: f64| x.powf(-0.5), 0.0, 1.0, 0.5, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn pv_reciprocal_quadratic_vanishes() {
        // PV int_0^inf dt/(t^2-1) = 0
        let r = principal_value(
            |t: f64| 1.0 / (t * t - 1.0),
            1.0,
            2.0,
            1e-10,
            None,
            &TailOpts::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn pv_exponential_matches_ei_identity() {
        // PV int_0^inf e^{-t}/(t-2) dt = -e^{-2} Ei(2), frozen from the
        // exact reduction e^{-2} (E1(2) - 2 int_0^2 sinh(u)/u du).
        let expected = -0.670482709790073281;
        for delta in [0.1, 0.01] {
            let r = principal_value(
                |t: f64| (-t).exp() / (t - 2.0),
                2.0,
                30.0,
                1e-10,
                Some(delta),
                &TailOpts::default(),
            )
            .unwrap();
            assert_abs_diff_eq!(r.value, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn pv_without_pole_in_range_matches_plain() {
        // f regular at the declared pole: PV machinery must agree with the
        // plain semi-infinite integral.
        let f = |t: f64| (-t).exp() * (1.0 + t);
        let plain =
            integrate_semi_infinite(f, 40.0, 1e-10, &TailOpts::default()).unwrap();
        let pv = principal_value(f, 3.0, 40.0, 1e-10, None, &TailOpts::default()).unwrap();
        assert_abs_diff_eq!(pv.value, plain.value, epsilon = pv.abs_error + plain.abs_error);
    }

    #[test]
    fn refinement_stays_within_error_estimates() {
        let f = |t: f64| (1.0 + t * t).ln() / (1.0 + t * t * t * t);
        let coarse = integrate_semi_infinite(f, 4.0, 1e-6, &TailOpts::default()).unwrap();
        let fine = integrate_semi_infinite(f, 4.0, 1e-7, &TailOpts::default()).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.abs_error + fine.abs_error);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate(
            |x: f64| Complex64::new(x.cos(), x.sin()),
            0.0,
            PI,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(r.value.re, 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(r.value.im, 2.0, epsilon = 1e-11);
    }
}
