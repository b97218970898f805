//! Closed-form CHSH correlators from the modular spectral construction.
//!
//! Test functions `f, f'` taken in the spectral subspace of the modular
//! operator at `lambda^2` have
//!
//! ```text
//! ||f||^2 = eta^2 (1 + lambda^2)      <f|jf>  = 2 eta^2 lambda
//! ||f'||^2 = eta'^2 (1 + lambda^2)    <f'|jf'> = 2 eta'^2 lambda      <f|jf'> = 0
//! ```
//!
//! and Bob's functions are the modular conjugates `jf, jf'`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub eta: f64,
    pub eta_prime: f64,
    pub lambda: f64,
}

impl SpectralParams {
    pub fn new(eta: f64, eta_prime: f64, lambda: f64) -> Result<Self> {
        let p = SpectralParams { eta, eta_prime, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            v.push(format!("eta must be finite and >= 0, got {}", self.eta));
        }
        if !(self.eta_prime.is_finite() && self.eta_prime >= 0.0) {
            v.push(format!("eta_prime must be finite and >= 0, got {}", self.eta_prime));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            v.push(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid("spectral params", v.join("; ")))
        }
    }
}

/// Norms and modular cross pairings of Alice's two test functions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProductSet {
    pub norm2_f: f64,
    pub norm2_fp: f64,
    /// `<f|jf>`
    pub cross_f: f64,
    /// `<f'|jf'>`
    pub cross_fp: f64,
    /// `<f|jf'> = <f'|jf>`
    pub cross_mixed: f64,
}

impl ProductSet {
    /// Cauchy-Schwarz consistency (with `||jf|| = ||f||`), to a relative slack.
    pub fn is_consistent(&self, slack: f64) -> bool {
        let tol = |x: f64| slack * x.abs().max(1.0);
        self.norm2_f >= 0.0
            && self.norm2_fp >= 0.0
            && self.cross_f.abs() <= self.norm2_f + tol(self.norm2_f)
            && self.cross_fp.abs() <= self.norm2_fp + tol(self.norm2_fp)
            && self.cross_mixed.powi(2)
                <= self.norm2_f * self.norm2_fp + tol(self.norm2_f * self.norm2_fp)
    }
}

pub fn spectral_products(p: SpectralParams) -> ProductSet {
    let (e2, ep2, l) = (p.eta * p.eta, p.eta_prime * p.eta_prime, p.lambda);
    ProductSet {
        norm2_f: e2 * (1.0 + l * l),
        norm2_fp: ep2 * (1.0 + l * l),
        cross_f: 2.0 * e2 * l,
        cross_fp: 2.0 * ep2 * l,
        cross_mixed: 0.0,
    }
}

/// `<W_f W_jf> + <W_f' W_jf> + <W_f W_jf'> - <W_f' W_jf'>` with
/// `<W_u W_v> = exp(-||u + v||^2 / 2)`.
pub fn weyl_chsh_from_products(s: ProductSet) -> f64 {
    let pair = |nu: f64, nv: f64, cross: f64| (-0.5 * (nu + nv + 2.0 * cross)).exp();
    pair(s.norm2_f, s.norm2_f, s.cross_f)
        + pair(s.norm2_fp, s.norm2_f, s.cross_mixed)
        + pair(s.norm2_f, s.norm2_fp, s.cross_mixed)
        - pair(s.norm2_fp, s.norm2_fp, s.cross_fp)
}

pub fn weyl_chsh_closed_form(p: SpectralParams) -> f64 {
    let (e2, ep2, l) = (p.eta * p.eta, p.eta_prime * p.eta_prime, p.lambda);
    (-e2 * (1.0 + l).powi(2)).exp() + 2.0 * (-0.5 * (e2 + ep2) * (1.0 + l * l)).exp()
        - (-ep2 * (1.0 + l).powi(2)).exp()
}

/// Spin-singlet correlator with measurement angles in radians.
pub fn qm_chsh(alpha: f64, alpha_prime: f64, beta: f64, beta_prime: f64) -> f64 {
    (alpha + beta).cos() + (alpha_prime + beta).cos() + (alpha + beta_prime).cos()
        - (alpha_prime + beta_prime).cos()
}

/// Angles `(0, pi/2, -pi/4, pi/4)` reaching `2 sqrt 2`.
pub const BELL_ANGLES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    -std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_4,
];
