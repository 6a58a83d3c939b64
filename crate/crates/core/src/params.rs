use crate::error::{Error, Result};

/// Tolerance for classifying Hurst exponents as equal or as exactly 1/2.
///
/// Regime dispatch uses exact comparisons up to this tolerance; callers who
/// want the white-noise formulas must pass 0.5 exactly.
pub const HURST_EQ_TOL: f64 = 1e-12;

/// Model parameters of the linear system
///
///   X_t = beta ∫_0^t X_s ds + W_t,
///   Y_t = mu   ∫_0^t X_s ds + sqrt(eps) V_t,
///
/// where W and V are independent fractional Brownian motions with Hurst
/// exponents `h1` and `h2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    h1: f64,
    h2: f64,
    beta: f64,
    mu: f64,
    eps: f64,
}

impl ModelParams {
    pub fn new(h1: f64, h2: f64, beta: f64, mu: f64, eps: f64) -> Result<Self> {
        if !(h1 > 0.0 && h1 < 1.0) || !h1.is_finite() {
            return Err(Error::InvalidParam(format!("h1 = {h1} must lie in (0,1)")));
        }
        if !(h2 > 0.0 && h2 < 1.0) || !h2.is_finite() {
            return Err(Error::InvalidParam(format!("h2 = {h2} must lie in (0,1)")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParam(format!("beta = {beta} must be finite")));
        }
        if mu == 0.0 || !mu.is_finite() {
            return Err(Error::InvalidParam(format!("mu = {mu} must be finite and nonzero")));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParam(format!("eps = {eps} must be positive")));
        }
        Ok(Self { h1, h2, beta, mu, eps })
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Effective signal-to-noise gain mu/sqrt(eps).
    pub fn mu_eps(&self) -> f64 {
        self.mu / self.eps.sqrt()
    }

    /// alpha_1 = 2 - 2 h1.
    pub fn alpha1(&self) -> f64 {
        2.0 - 2.0 * self.h1
    }

    /// alpha_2 = 2 - 2 h2.
    pub fn alpha2(&self) -> f64 {
        2.0 - 2.0 * self.h2
    }

    pub fn h1_is_half(&self) -> bool {
        (self.h1 - 0.5).abs() < HURST_EQ_TOL
    }

    pub fn h2_is_half(&self) -> bool {
        (self.h2 - 0.5).abs() < HURST_EQ_TOL
    }

    pub fn equal_hurst(&self) -> bool {
        (self.h1 - self.h2).abs() < HURST_EQ_TOL
    }

    /// Same parameters with a different noise intensity.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.h1, self.h2, self.beta, self.mu, eps)
    }

    /// Same parameters with a different drift.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.h1, self.h2, beta, self.mu, self.eps)
    }
}
