//! Two-mode squeezed state `(1 - lambda^2)^{1/2} sum_n lambda^n |n, n>` on a
//! truncated Fock space, and the dichotomic operators
//!
//! ```text
//! A |2n> = e^{i alpha} |2n+1>      A |2n+1> = e^{-i alpha} |2n>
//! ```
//!
//! (likewise `B` on the second mode). Each mode keeps `2K` levels so that
//! every even level has its odd partner and `A^2 = 1` holds exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::qm_chsh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    /// `K`: levels `0..2K` per mode.
    pub pair_count: usize,
    pub lambda: f64,
    /// `(alpha, alpha', beta, beta')` in radians.
    pub angles: [f64; 4],
}

impl FockConfig {
    pub fn new(pair_count: usize, lambda: f64, angles: [f64; 4]) -> Result<Self> {
        let c = FockConfig { pair_count, lambda, angles };
        c.validate()?;
        Ok(c)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.pair_count < 1 {
            v.push("pair_count must be >= 1".to_string());
        }
        if !(0.0..1.0).contains(&self.lambda) {
            v.push(format!("lambda must lie in [0, 1), got {}", self.lambda));
        }
        if self.angles.iter().any(|a| !a.is_finite()) {
            v.push("angles must be finite".to_string());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid("fock config", v.join("; ")))
        }
    }

    pub fn levels(&self) -> usize {
        2 * self.pair_count
    }
}

/// Coefficients `c_n` of `|n, n>` for `n < 2K`, with the untruncated
/// normalization, and the missing weight `1 - sum c_n^2 = lambda^{4K}`.
pub fn state_coefficients(cfg: &FockConfig) -> (Vec<f64>, f64) {
    let norm = (1.0 - cfg.lambda * cfg.lambda).sqrt();
    let mut c = Vec::with_capacity(cfg.levels());
    let mut pow = 1.0;
    for _ in 0..cfg.levels() {
        c.push(norm * pow);
        pow *= cfg.lambda;
    }
    let deficit = cfg.lambda.powi(4 * cfg.pair_count as i32);
    (c, deficit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Image of basis level `n` under the dichotomic operator with angle `angle`:
/// the partner level and its phase. The side only names the mode acted on.
pub fn dichotomic_action(_side: Side, angle: f64, n: usize) -> (usize, Complex64) {
    if n.is_multiple_of(2) {
        (n + 1, Complex64::from_polar(1.0, angle))
    } else {
        (n - 1, Complex64::from_polar(1.0, -angle))
    }
}

/// `<Omega| A(angle_a) (x) B(angle_b) |Omega>` on the truncated space, by
/// summing `c_m c_n <m|A|n> <m|B|n>` over the only nonzero entries.
pub fn correlator_ab(cfg: &FockConfig, angle_a: f64, angle_b: f64) -> f64 {
    let (c, _) = state_coefficients(cfg);
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &cn) in c.iter().enumerate() {
        let (m, pa) = dichotomic_action(Side::A, angle_a, n);
        let (m_b, pb) = dichotomic_action(Side::B, angle_b, n);
        debug_assert_eq!(m, m_b);
        acc += c[m] * cn * pa * pb;
    }
    acc.re
}

fn signed_sum(cfg: &FockConfig, corr: impl Fn(f64, f64) -> f64) -> f64 {
    let [a, ap, b, bp] = cfg.angles;
    corr(a, b) + corr(ap, b) + corr(a, bp) - corr(ap, bp)
}

/// Truncated CHSH value `<AB> + <A'B> + <AB'> - <A'B'>`.
pub fn chsh_squeezed(cfg: &FockConfig) -> f64 {
    signed_sum(cfg, |a, b| correlator_ab(cfg, a, b))
}

/// [`chsh_squeezed`] with the truncated state renormalized to unit norm.
pub fn chsh_squeezed_normalized(cfg: &FockConfig) -> f64 {
    let (_, deficit) = state_coefficients(cfg);
    chsh_squeezed(cfg) / (1.0 - deficit)
}

/// `2 lambda / (1 + lambda^2)` times the spin-singlet combination; `lambda = 1`
/// allowed.
pub fn chsh_analytic(lambda: f64, angles: [f64; 4]) -> f64 {
    let [a, ap, b, bp] = angles;
    2.0 * lambda / (1.0 + lambda * lambda) * qm_chsh(a, ap, b, bp)
}
