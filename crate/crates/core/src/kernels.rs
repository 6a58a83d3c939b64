//! Exact covariance kernels of the driving fractional noises and of the
//! state (fractional Ornstein-Uhlenbeck) process.
//!
//! The fOU covariance is the double integral of the fBm kernel against
//! exponential weights. Integrating by parts puts it into a four-term form
//! with continuous integrands for every Hurst exponent,
//!
//!   K_X(s,t) = K_W(s,t) + beta I(s;t) + beta I(t;s) + beta^2 J(s,t),
//!
//! where I and J are single and double exponential averages of K_W. The
//! double term reduces exactly to a one-dimensional integral by the change
//! of variables r = (s-u) - (t-v), so every evaluation below is a short sum
//! of adaptive 1-d quadratures with the |.|^{2h} kink moved to an interval
//! endpoint and smoothed by a power substitution.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::gk_adaptive_panels;

/// Relative tolerance (scaled by K_W(max(s,t), max(s,t))) used by
/// [`fou_cov`] when none is supplied.
pub const FOU_DEFAULT_TOL: f64 = 1e-10;

/// Covariance of fractional Brownian motion with Hurst exponent `h`:
/// (s^{2h} + t^{2h} - |s-t|^{2h}) / 2.
pub fn fbm_cov(s: f64, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParam(format!("hurst exponent {h} outside (0,1)")));
    }
    if s < 0.0 || t < 0.0 || !s.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParam(format!("times ({s},{t}) must be finite and nonnegative")));
    }
    Ok(fbm_cov_unchecked(s, t, h))
}

pub(crate) fn fbm_cov_unchecked(s: f64, t: f64, h: f64) -> f64 {
    if s == 0.0 || t == 0.0 {
        return 0.0;
    }
    let th = 2.0 * h;
    0.5 * (s.powf(th) + t.powf(th) - (s - t).abs().powf(th))
}

/// Covariance of the fractional Ornstein-Uhlenbeck process started at zero,
/// evaluated to the default tolerance.
pub fn fou_cov(s: f64, t: f64, params: &ModelParams) -> Result<f64> {
    fou_cov_tol(s, t, params, FOU_DEFAULT_TOL)
}

/// Covariance of the fOU process with an explicit relative tolerance.
///
/// The tolerance is interpreted relative to K_W(m, m) with m = max(s,t).
pub fn fou_cov_tol(s: f64, t: f64, params: &ModelParams, tol_rel: f64) -> Result<f64> {
    if s < 0.0 || t < 0.0 || !s.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParam(format!("times ({s},{t}) must be finite and nonnegative")));
    }
    if s == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let h = params.h1();
    let beta = params.beta();
    if beta == 0.0 {
        return Ok(fbm_cov_unchecked(s, t, h));
    }
    let m = s.max(t);
    if beta.abs() * (s + t) > 350.0 {
        return Err(Error::Overflow(format!(
            "exp(beta (s+t)) with beta={beta}, s+t={} exceeds double range",
            s + t
        )));
    }

    let scale = m.powf(2.0 * h);
    let tol_abs = (tol_rel * scale).max(1e-300);
    let piece_tol = tol_abs / 10.0;

    let mut err = 0.0;

    let g_s = exp_pow_integral(2.0 * h, s, beta, piece_tol, &mut err);
    let g_t = exp_pow_integral(2.0 * h, t, beta, piece_tol, &mut err);
    let e_s = exp_mean(beta, s);
    let e_t = exp_mean(beta, t);
    let a_st = abs_pow_exp_integral(2.0 * h, s, t, beta, piece_tol, &mut err);
    let a_ts = abs_pow_exp_integral(2.0 * h, t, s, beta, piece_tol, &mut err);
    let d_st = double_exp_integral(2.0 * h, s, t, beta, piece_tol, &mut err);

    let th = 2.0 * h;
    let t1_st = 0.5 * (g_s + t.powf(th) * e_s - a_st);
    let t1_ts = 0.5 * (g_t + s.powf(th) * e_t - a_ts);
    let t2 = 0.5 * (g_s * e_t + e_s * g_t - d_st);

    if err > tol_abs {
        return Err(Error::QuadratureFailure { achieved: err, requested: tol_abs });
    }
    Ok(fbm_cov_unchecked(s, t, h) + beta * (t1_st + t1_ts) + beta * beta * t2)
}

/// E(x) = int_0^x e^{beta(x-u)} du.
fn exp_mean(beta: f64, x: f64) -> f64 {
    (beta * x).exp_m1() / beta
}

/// int_0^{hi} x^a g(x) dx with the power kink smoothed by x = hi u^4.
fn pow_weighted<F: Fn(f64) -> f64>(a: f64, hi: f64, g: F, tol: f64, err: &mut f64) -> f64 {
    if hi <= 0.0 {
        return 0.0;
    }
    let f = |u: f64| {
        let x = hi * u.powi(4);
        x.powf(a) * g(x) * 4.0 * hi * u.powi(3)
    };
    let r = gk_adaptive_panels(f, &[(0.0, 1.0)], tol, 400);
    *err += r.abs_error;
    r.value
}

/// G(x) = int_0^x e^{beta(x-u)} u^a du = int_0^x e^{beta v} (x-v)^a dv.
fn exp_pow_integral(a: f64, x: f64, beta: f64, tol: f64, err: &mut f64) -> f64 {
    // kink of (x-v)^a sits at v = x; substitute w = x - v.
    pow_weighted(a, x, |w| (beta * (x - w)).exp(), tol, err)
}

/// A(s,t) = int_0^s e^{beta(s-u)} |u-t|^a du.
fn abs_pow_exp_integral(a: f64, s: f64, t: f64, beta: f64, tol: f64, err: &mut f64) -> f64 {
    let mut total = 0.0;
    // u in [0, min(s,t)]: w = t - u runs over [t - min(s,t), t].
    let lo = (t - s).max(0.0);
    if lo == 0.0 {
        total += pow_weighted(a, t, |w| (beta * (s - t + w)).exp(), tol, err);
    } else {
        let f = |w: f64| w.powf(a) * (beta * (s - t + w)).exp();
        let r = gk_adaptive_panels(f, &[(lo, t)], tol, 400);
        *err += r.abs_error;
        total += r.value;
    }
    // u in (t, s]: w = u - t.
    if s > t {
        total += pow_weighted(a, s - t, |w| (beta * (s - t - w)).exp(), tol, err);
    }
    total
}

/// D(s,t) = int_0^s int_0^t e^{beta(s-u) + beta(t-v)} |u-v|^a dv du,
/// reduced to one dimension along r = (s-u) - (t-v).
fn double_exp_integral(a: f64, s: f64, t: f64, beta: f64, tol: f64, err: &mut f64) -> f64 {
    let c = s - t;
    let weight = |r: f64| {
        let qa = (-r).max(0.0);
        let qb = (s - r).min(t);
        (beta * r + 2.0 * beta * qa).exp() * (2.0 * beta * (qb - qa)).exp_m1() / (2.0 * beta)
    };

    let mut cuts = vec![-t, s];
    if 0.0 > -t && 0.0 < s {
        cuts.push(0.0);
    }
    if c > -t && c < s {
        cuts.push(c);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (r1, r2) = (w[0], w[1]);
        if r2 - r1 <= 0.0 {
            continue;
        }
        if (r2 - c).abs() < 1e-14 * t.max(s) {
            // kink at right endpoint: x = c - r
            total += pow_weighted(a, r2 - r1, |x| weight(c - x), tol, err);
        } else if (r1 - c).abs() < 1e-14 * t.max(s) {
            // kink at left endpoint: x = r - c
            total += pow_weighted(a, r2 - r1, |x| weight(c + x), tol, err);
        } else {
            let f = |r: f64| (c - r).abs().powf(a) * weight(r);
            let r = gk_adaptive_panels(f, &[(r1, r2)], tol, 400);
            *err += r.abs_error;
            total += r.value;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(h1: f64, beta: f64) -> ModelParams {
        ModelParams::new(h1, 0.5, beta, 1.0, 1.0).unwrap()
    }

    #[test]
    fn fbm_diagonal_and_brownian() {
        assert_abs_diff_eq!(fbm_cov(1.7, 1.7, 0.3).unwrap(), 1.7f64.powf(0.6), epsilon = 1e-14);
        assert_abs_diff_eq!(fbm_cov(0.4, 2.5, 0.5).unwrap(), 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(fbm_cov(3.0, 1.2, 0.5).unwrap(), 1.2, epsilon = 1e-14);
        // direct substitution: (1 + 2^{1.5} - 1)/2 = 2^{0.5}
        assert_abs_diff_eq!(
            fbm_cov(1.0, 2.0, 0.75).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-10
        );
        assert_eq!(fbm_cov(0.0, 2.0, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn fbm_domain_errors() {
        assert!(fbm_cov(1.0, 1.0, 0.0).is_err());
        assert!(fbm_cov(1.0, 1.0, 1.0).is_err());
        assert!(fbm_cov(-1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn fou_reduces_to_fbm_without_drift() {
        let p = params(0.3, 0.0);
        for (s, t) in [(0.5, 0.5), (1.0, 3.0), (2.7, 0.1)] {
            assert_abs_diff_eq!(
                fou_cov(s, t, &p).unwrap(),
                fbm_cov(s, t, 0.3).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn classical_ou_variance() {
        // h = 1/2, beta = -1: Var X_t = (1 - e^{-2t})/2
        let p = params(0.5, -1.0);
        for t in [0.3, 1.0, 5.0] {
            let expected = (1.0 - (-2.0 * t).exp()) / 2.0;
            assert_abs_diff_eq!(fou_cov(t, t, &p).unwrap(), expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn classical_ou_cross_covariance_unstable() {
        // h = 1/2: K_X(s,t) = e^{beta(s+t)} (1 - e^{-2 beta min}) / (2 beta)
        let p = params(0.5, 0.5);
        let (s, t) = (2.0, 3.0);
        let expected = (0.5 * (s + t)).exp() * (1.0 - (-2.0 * 0.5 * s).exp()) / 1.0;
        assert_abs_diff_eq!(fou_cov(s, t, &p).unwrap(), expected, epsilon = 1e-9 * expected);
    }

    #[test]
    fn stationary_variance_long_horizon() {
        // beta < 0, t large: Var -> Gamma(2h+1) / (2|beta|^{2h});
        // Gamma(2.4)/2 evaluated independently.
        let p = params(0.7, -1.0);
        let expected = 0.6210846722521527;
        let got = fou_cov(50.0, 50.0, &p).unwrap();
        assert!((got - expected).abs() / expected < 1e-4, "got {got}");
    }

    #[test]
    fn symmetry() {
        let p = params(0.7, -0.8);
        for (s, t) in [(0.7, 2.2), (1.0, 1.0), (3.3, 0.4)] {
            let a = fou_cov(s, t, &p).unwrap();
            let b = fou_cov(t, s, &p).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_overflowing_drift() {
        let p = params(0.5, 2.0);
        assert!(matches!(fou_cov(100.0, 100.0, &p), Err(Error::Overflow(_))));
    }
}
