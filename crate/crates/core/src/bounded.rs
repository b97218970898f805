//! Vacuum correlators of the bounded operators `Q(h) = 1 / (1 + phi(h)^2)`.
//!
//! With `1/(1 + x^2) = 1/2 int dk e^{-|k|} e^{ikx}` the correlators reduce to
//! Weyl expectations integrated against a Laplace weight:
//!
//! ```text
//! <Q(f)>       = 1/2 int dk e^{-|k|} e^{-k^2 s11 / 2}
//! <Q(f) Q(g)>  = 1/4 int dk dp e^{-|k| - |p|} e^{-(k^2 s11 + p^2 s22 + 2 k p s12) / 2}
//! ```
//!
//! Both are folded onto the positive quadrant and integrated in `k, p` over
//! `[0, 40]` with adaptive Gauss-Kronrod (7/15) rules; the tail beyond 40
//! is below `e^-40`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{spectral_products, SpectralParams};
use crate::par::map_indexed;
use crate::quadrature::QuadConfig;

const K_MAX: f64 = 40.0;
/// Relative accuracy never looser than this, whatever the config asks for.
const TIGHTEST: f64 = 1e-11;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 Kronrod nodes on `[-1, 1]` with Kronrod and (embedded) Gauss weights.
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for i in 0..15 {
        let (j, sign) = if i < 7 { (i, -1.0) } else { (14 - i, 1.0) };
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[i] = (sign * XGK[j], WGK[j], wg);
    }
    out
}

/// Quadratic-form coefficients `(||f||^2, ||g||^2, <f|g>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFormCoeffs {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
}

impl GaussianFormCoeffs {
    pub fn new(s11: f64, s22: f64, s12: f64) -> Result<Self> {
        let c = GaussianFormCoeffs { s11, s22, s12 };
        let mut v = Vec::new();
        if !(s11.is_finite() && s11 >= 0.0) {
            v.push(format!("s11 must be finite and >= 0, got {s11}"));
        }
        if !(s22.is_finite() && s22 >= 0.0) {
            v.push(format!("s22 must be finite and >= 0, got {s22}"));
        }
        if !s12.is_finite() || s12 * s12 > s11 * s22 * (1.0 + 1e-12) {
            v.push(format!("s12^2 must not exceed s11 s22, got s12 = {s12}"));
        }
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::invalid("gaussian form", v.join("; ")))
        }
    }
}

fn tolerance(cfg: &QuadConfig) -> f64 {
    cfg.target_rel_error.min(TIGHTEST)
}

/// `int_0^40 e^{-k - k^2 s / 2} dk`, bisecting the worst interval.
fn half_line(s: f64, cfg: &QuadConfig) -> f64 {
    let r = rule();
    let panel = |a: f64, b: f64| {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut k, mut g) = (0.0, 0.0);
        for &(x, wk, wg) in &r {
            let t = c + h * x;
            let v = (-t - 0.5 * s * t * t).exp();
            k += wk * v;
            g += wg * v;
        }
        (h * k, h * (k - g).abs(), a, b)
    };
    let mut panels = vec![panel(0.0, K_MAX)];
    let mut evals = 15u64;
    loop {
        let total: f64 = panels.iter().map(|p| p.0).sum();
        let err: f64 = panels.iter().map(|p| p.1).sum();
        if err <= tolerance(cfg) * total.abs() || evals + 30 > cfg.max_evals {
            return total;
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].1.total_cmp(&panels[j].1))
            .unwrap_or(0);
        let (_, _, a, b) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        panels.push(panel(a, m));
        panels.push(panel(m, b));
        evals += 30;
    }
}

struct Square {
    value: f64,
    error: f64,
    lo: [f64; 2],
    hi: [f64; 2],
}

/// `int_0^40 int_0^40 e^{-k - p - (k^2 s11 + p^2 s22 + 2 k p c)/2}`, adaptive
/// quadtree of 15 x 15 Kronrod squares.
fn quadrant(s11: f64, s22: f64, c: f64, cfg: &QuadConfig) -> f64 {
    let r = rule();
    let square = |lo: [f64; 2], hi: [f64; 2]| {
        let (ck, hk) = (0.5 * (lo[0] + hi[0]), 0.5 * (hi[0] - lo[0]));
        let (cp, hp) = (0.5 * (lo[1] + hi[1]), 0.5 * (hi[1] - lo[1]));
        let (mut kk, mut gg) = (0.0, 0.0);
        for &(x, wk1, wg1) in &r {
            let k = ck + hk * x;
            for &(y, wk2, wg2) in &r {
                let p = cp + hp * y;
                let v = (-k - p - 0.5 * (k * k * s11 + p * p * s22 + 2.0 * k * p * c)).exp();
                kk += wk1 * wk2 * v;
                gg += wg1 * wg2 * v;
            }
        }
        let jac = hk * hp;
        Square {
            value: jac * kk,
            error: jac * (kk - gg).abs(),
            lo,
            hi,
        }
    };
    let mut cells = vec![square([0.0, 0.0], [K_MAX, K_MAX])];
    let mut evals = 225u64;
    loop {
        let total: f64 = cells.iter().map(|s| s.value).sum();
        let err: f64 = cells.iter().map(|s| s.error).sum();
        if err <= tolerance(cfg) * total.abs() || evals + 4 * 225 > cfg.max_evals {
            return total;
        }
        let worst = (0..cells.len())
            .max_by(|&i, &j| cells[i].error.total_cmp(&cells[j].error))
            .unwrap_or(0);
        let Square { lo, hi, .. } = cells.swap_remove(worst);
        let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        cells.push(square(lo, mid));
        cells.push(square([mid[0], lo[1]], [hi[0], mid[1]]));
        cells.push(square([lo[0], mid[1]], [mid[0], hi[1]]));
        cells.push(square(mid, hi));
        evals += 4 * 225;
    }
}

/// `<Q(f)>` for `||f||^2 = s11`.
pub fn qtilde_single(s11: f64, cfg: &QuadConfig) -> f64 {
    half_line(s11, cfg)
}

/// `<Q(f) Q(g)>`. The quadrants with `k p < 0` see `-s12`.
pub fn qtilde_pair(c: GaussianFormCoeffs, cfg: &QuadConfig) -> f64 {
    if c.s12 == 0.0 {
        return quadrant(c.s11, c.s22, 0.0, cfg);
    }
    0.5 * (quadrant(c.s11, c.s22, c.s12, cfg) + quadrant(c.s11, c.s22, -c.s12, cfg))
}

/// `<Q(f)Q(jf)> + 2 <Q(f)Q(jf')> - <Q(f')Q(jf')>`. The two mixed terms
/// `<Q(f')Q(jf)>` and `<Q(f)Q(jf')>` have the same norms and vanishing cross
/// pairing, so one is computed and doubled.
pub fn chsh_bounded(p: SpectralParams, cfg: &QuadConfig) -> f64 {
    let s = spectral_products(p);
    let pair = |s11, s22, s12| qtilde_pair(GaussianFormCoeffs { s11, s22, s12 }, cfg);
    let same_f = pair(s.norm2_f, s.norm2_f, s.cross_f);
    let mixed = pair(s.norm2_f, s.norm2_fp, s.cross_mixed);
    let same_fp = pair(s.norm2_fp, s.norm2_fp, s.cross_fp);
    same_f + 2.0 * mixed - same_fp
}

/// CHSH value at every `(eta, eta')` node, `eta` outermost.
pub fn surface_grid(lambda: f64, eta_grid: &[f64], etap_grid: &[f64], cfg: &QuadConfig) -> Result<Vec<(f64, f64, f64)>> {
    let mut params = Vec::with_capacity(eta_grid.len() * etap_grid.len());
    for &e in eta_grid {
        for &ep in etap_grid {
            params.push(SpectralParams::new(e, ep, lambda)?);
        }
    }
    Ok(map_indexed(params.len(), |i| {
        let p = params[i];
        (p.eta, p.eta_prime, chsh_bounded(p, cfg))
    }))
}
