//! Bessel functions of order zero.
//!
//! `J0` and `Y0` come from `libm` (the FreeBSD/musl rational approximations,
//! accurate to about one ulp). `K0` is evaluated here: the ascending series
//! for small arguments and a trapezoid rule on its integral representation
//! for large ones.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bessel function of the first kind, order zero.
#[inline]
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

/// Bessel function of the second kind, order zero. `NaN` for `x < 0`,
/// `-inf` at `x = 0`.
#[inline]
pub fn bessel_y0(x: f64) -> f64 {
    libm::y0(x)
}

/// Modified Bessel function of the second kind, order zero.
///
/// Defined for `x > 0`; returns `+inf` at zero and `NaN` for negative input.
pub fn bessel_k0(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x <= 2.0 {
        k0_series(x)
    } else {
        k0_integral(x)
    }
}

/// `K0(x) = -(ln(x/2) + gamma) I0(x) + sum_k (x^2/4)^k / (k!)^2 * H_k`.
fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0; // (x^2/4)^k / (k!)^2
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Substituting `cosh t - 1 = 2u^2` and `u = v / sqrt(2x)`:
/// `K0(x) = e^{-x} sqrt(2/x) * int_0^inf exp(-v^2) / sqrt(1 + v^2/(2x)) dv`.
///
/// The integrand is analytic in a strip of half-width `sqrt(2x) >= 2`, so the
/// trapezoid rule converges geometrically; step 1/4 leaves an error far below
/// double precision for `x > 2`.
fn k0_integral(x: f64) -> f64 {
    const STEP: f64 = 0.25;
    const CUTOFF: f64 = 6.5; // exp(-42) relative
    let inv2x = 0.5 / x;
    let mut sum = 0.5; // v = 0 endpoint, half weight
    let mut v = STEP;
    while v <= CUTOFF {
        let v2 = v * v;
        sum += (-v2).exp() / (1.0 + v2 * inv2x).sqrt();
        v += STEP;
    }
    (-x).exp() * (2.0 / x).sqrt() * sum * STEP
}

/// Leading small-argument behaviour `-ln(x/2) - gamma`, shared by `K0` and
/// `-(pi/2) Y0`. Used by tests and by callers that need the massless limit.
pub fn log_singularity(x: f64) -> f64 {
    -(0.5 * x).ln() - EULER_GAMMA
}
