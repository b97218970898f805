//! Two-point kernels of the free massive scalar field in 1+1 dimensions.
//!
//! The Wightman function splits into the Hadamard function `H` (real,
//! symmetric) and the Pauli-Jordan commutator function `D_PJ` (real,
//! antisymmetric, causal) as `W = H + (i/2) D_PJ`. With the interval
//! `lambda = t^2 - x^2`:
//!
//! ```text
//! D_PJ(t, x) = -1/2 sign(t) theta(lambda) J0(m sqrt(lambda))
//! H(t, x)    = -1/2 theta(lambda) Y0(m sqrt(lambda)) + 1/pi theta(-lambda) K0(m sqrt(-lambda))
//! ```
//!
//! The Hadamard coefficients above are twice the textbook ones; both
//! normalizations are available through [`KernelConvention`].

use std::f64::consts::FRAC_1_PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_j0, bessel_k0, bessel_y0};

/// Field mass in inverse-length units (`hbar = c = 1`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Mass(f64);

impl Mass {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(Mass(m))
        } else {
            Err(Error::invalid("mass", format!("must be finite and > 0, got {m}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Mass {
    type Error = Error;
    fn try_from(m: f64) -> Result<Self> {
        Mass::new(m)
    }
}

impl From<Mass> for f64 {
    fn from(m: Mass) -> f64 {
        m.0
    }
}

/// A point (or separation) in 1+1 Minkowski spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    #[inline]
    pub const fn new(t: f64, x: f64) -> Self {
        Event { t, x }
    }

    /// Separation `self - other`.
    #[inline]
    pub fn minus(self, other: Event) -> Event {
        Event::new(self.t - other.t, self.x - other.x)
    }
}

/// Normalization of the Hadamard kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelConvention {
    /// `-1/2 Y0` timelike, `1/pi K0` spacelike.
    #[default]
    Paper,
    /// Half of [`KernelConvention::Paper`]: `-1/4 Y0`, `1/(2 pi) K0`.
    Standard,
}

impl KernelConvention {
    #[inline]
    pub fn scale(self) -> f64 {
        match self {
            KernelConvention::Paper => 1.0,
            KernelConvention::Standard => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelConvention::Paper => "paper",
            KernelConvention::Standard => "standard",
        }
    }
}

impl fmt::Display for KernelConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(KernelConvention::Paper),
            "standard" => Ok(KernelConvention::Standard),
            other => Err(Error::invalid(
                "convention",
                format!("expected `paper` or `standard`, got `{other}`"),
            )),
        }
    }
}

/// The Hadamard kernel has a logarithmic singularity on the light cone and
/// refuses to evaluate there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("separation lies exactly on the light cone")]
pub struct OnLightCone;

/// `t^2 - x^2`: positive timelike, negative spacelike, zero on the cone.
#[inline]
pub fn interval(e: Event) -> f64 {
    e.t * e.t - e.x * e.x
}

/// Pauli-Jordan commutator function. Total: `sign(0) = theta(0) = 0`.
#[inline]
pub fn pauli_jordan(e: Event, m: Mass) -> f64 {
    let lambda = interval(e);
    if lambda <= 0.0 || e.t == 0.0 {
        return 0.0;
    }
    -0.5 * e.t.signum() * bessel_j0(m.0 * lambda.sqrt())
}

/// Hadamard function; [`OnLightCone`] when `t^2 = x^2`.
#[inline]
pub fn hadamard(e: Event, m: Mass, conv: KernelConvention) -> Result<f64, OnLightCone> {
    let lambda = interval(e);
    let paper = if lambda > 0.0 {
        -0.5 * bessel_y0(m.0 * lambda.sqrt())
    } else if lambda < 0.0 {
        FRAC_1_PI * bessel_k0(m.0 * (-lambda).sqrt())
    } else {
        return Err(OnLightCone);
    };
    Ok(conv.scale() * paper)
}

/// Vacuum two-point function `H + (i/2) D_PJ`.
#[inline]
pub fn wightman(e: Event, m: Mass, conv: KernelConvention) -> Result<Complex64, OnLightCone> {
    let h = hadamard(e, m, conv)?;
    Ok(Complex64::new(h, 0.5 * pauli_jordan(e, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(v: f64) -> Mass {
        Mass::new(v).unwrap()
    }

    // mpmath, 30 digits
    const K0_1_OVER_PI: f64 = 0.13401624101699427;
    const MINUS_HALF_Y0_SQRT3: f64 = -0.23041774222977135;
    const MINUS_HALF_J0_SQRT3: f64 = -0.18971971252144584;

    #[test]
    fn interval_examples() {
        assert_eq!(interval(Event::new(1.0, 1.0)), 0.0);
        assert_eq!(interval(Event::new(2.0, 1.0)), 3.0);
        assert_eq!(interval(Event::new(0.0, 3.0)), -9.0);
    }

    #[test]
    fn pauli_jordan_examples() {
        assert_eq!(pauli_jordan(Event::new(1.0, 2.0), m(1.0)), 0.0);
        assert_eq!(pauli_jordan(Event::new(0.0, 0.5), m(1.0)), 0.0);
        let v = pauli_jordan(Event::new(2.0, 1.0), m(1.0));
        assert!((v - MINUS_HALF_J0_SQRT3).abs() < 1e-14, "{v}");
    }

    #[test]
    fn hadamard_examples() {
        let e = Event::new(0.0, 1.0);
        let p = hadamard(e, m(1.0), KernelConvention::Paper).unwrap();
        assert!((p - K0_1_OVER_PI).abs() < 1e-14);
        let s = hadamard(e, m(1.0), KernelConvention::Standard).unwrap();
        assert!((s - 0.5 * K0_1_OVER_PI).abs() < 1e-14);
        let t = hadamard(Event::new(2.0, 1.0), m(1.0), KernelConvention::Paper).unwrap();
        assert!((t - MINUS_HALF_Y0_SQRT3).abs() < 1e-14, "{t}");
    }

    #[test]
    fn on_cone_is_signalled() {
        for conv in [KernelConvention::Paper, KernelConvention::Standard] {
            assert_eq!(hadamard(Event::new(1.5, -1.5), m(0.3), conv), Err(OnLightCone));
            assert_eq!(wightman(Event::new(0.0, 0.0), m(0.3), conv), Err(OnLightCone));
        }
    }

    #[test]
    fn wightman_examples() {
        let w = wightman(Event::new(0.0, 1.0), m(1.0), KernelConvention::Paper).unwrap();
        assert!((w.re - K0_1_OVER_PI).abs() < 1e-14 && w.im == 0.0);
        let fwd = wightman(Event::new(2.0, 1.0), m(1.0), KernelConvention::Paper).unwrap();
        assert!((fwd.re - MINUS_HALF_Y0_SQRT3).abs() < 1e-14);
        assert!((fwd.im - 0.5 * MINUS_HALF_J0_SQRT3).abs() < 1e-14);
        let back = wightman(Event::new(-2.0, 1.0), m(1.0), KernelConvention::Paper).unwrap();
        assert_eq!(back, fwd.conj());
    }

    #[test]
    fn mass_validation() {
        assert!(Mass::new(0.0).is_err());
        assert!(Mass::new(-1.0).is_err());
        assert!(Mass::new(f64::NAN).is_err());
        assert!(serde_json::from_str::<Mass>("-2.0").is_err());
        assert_eq!(serde_json::from_str::<Mass>("0.5").unwrap().value(), 0.5);
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("Paper".parse::<KernelConvention>().unwrap(), KernelConvention::Paper);
        assert_eq!("standard".parse::<KernelConvention>().unwrap(), KernelConvention::Standard);
        assert!("textbook".parse::<KernelConvention>().is_err());
    }

    proptest! {
        #[test]
        fn pauli_jordan_is_odd_in_time(t in -20.0..20.0f64, x in -20.0..20.0f64, mass in 0.001..5.0f64) {
            let mass = m(mass);
            prop_assert_eq!(pauli_jordan(Event::new(t, x), mass), -pauli_jordan(Event::new(-t, x), mass));
        }

        #[test]
        fn hadamard_parity(t in -20.0..20.0f64, x in -20.0..20.0f64, mass in 0.001..5.0f64) {
            prop_assume!(t.abs() != x.abs());
            let mass = m(mass);
            let c = KernelConvention::Paper;
            let h = hadamard(Event::new(t, x), mass, c).unwrap();
            prop_assert_eq!(h, hadamard(Event::new(-t, x), mass, c).unwrap());
            prop_assert_eq!(h, hadamard(Event::new(t, -x), mass, c).unwrap());
        }
    }
}
