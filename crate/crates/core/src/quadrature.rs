//! Smeared two-point pairings of wedge bumps as 4-dimensional integrals, and
//! the Weyl-operator CHSH correlator assembled from them.
//!
//! `H(f, g) = int d^2x d^2y f(x) H(x - y) g(y)` is integrated over the product
//! of the two (clipped) bounding boxes. Two engines are available:
//!
//! * randomized QMC: [`QMC_REPLICAS`] independently scrambled Sobol' replicas,
//!   value = replica mean, error = standard error of the mean;
//! * adaptive subdivision: a global priority queue of cells with a tensor
//!   3-point Gauss rule, error = |G3 - G2| per cell, cells bisected along the
//!   axis with the largest second difference.
//!
//! The Hadamard kernel is log-singular on the light cone; a sample landing
//! exactly on it contributes zero.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{hadamard, pauli_jordan, Event, KernelConvention, Mass};
use crate::par::map_indexed;
use crate::qmc::Sobol4;
use crate::testfn::{Rect, WedgeBump, WedgeSide};

pub const QMC_REPLICAS: usize = 8;
const QMC_BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadMethod {
    #[default]
    #[serde(alias = "qmc")]
    QuasiMonteCarlo,
    #[serde(alias = "adaptive")]
    AdaptiveSubdivision,
}

impl FromStr for QuadMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qmc" | "quasi_monte_carlo" => Ok(QuadMethod::QuasiMonteCarlo),
            "adaptive" | "adaptive_subdivision" => Ok(QuadMethod::AdaptiveSubdivision),
            other => Err(Error::invalid("quadrature method", format!("unknown `{other}`"))),
        }
    }
}

impl fmt::Display for QuadMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadMethod::QuasiMonteCarlo => "quasi_monte_carlo",
            QuadMethod::AdaptiveSubdivision => "adaptive_subdivision",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub method: QuadMethod,
    /// Integrand evaluations allowed per integral.
    pub max_evals: u64,
    pub target_rel_error: f64,
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            method: QuadMethod::QuasiMonteCarlo,
            max_evals: 1 << 21,
            target_rel_error: 1e-3,
            seed: 0,
        }
    }
}

impl QuadConfig {
    pub fn qmc(max_evals: u64, seed: u64) -> Self {
        QuadConfig {
            max_evals,
            seed,
            ..Default::default()
        }
    }

    pub fn adaptive(max_evals: u64, target_rel_error: f64) -> Self {
        QuadConfig {
            method: QuadMethod::AdaptiveSubdivision,
            max_evals,
            target_rel_error,
            seed: 0,
        }
    }

    /// Every violated invariant, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.max_evals < 1000 {
            v.push(format!("quad.max_evals must be >= 1000, got {}", self.max_evals));
        }
        if !(self.target_rel_error > 0.0 && self.target_rel_error < 1.0) {
            v.push(format!(
                "quad.target_rel_error must lie in (0, 1), got {}",
                self.target_rel_error
            ));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid("quadrature config", v.join("; ")))
        }
    }

    /// Points per QMC replica: the largest power of two fitting the budget.
    pub fn qmc_points_per_replica(&self) -> u64 {
        let per = (self.max_evals / QMC_REPLICAS as u64).max(1);
        1 << (63 - per.leading_zeros())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evals: u64,
    /// `error_estimate <= target_rel_error * |value|` (or an exact zero).
    pub converged: bool,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        IntegralResult {
            value,
            error_estimate: 0.0,
            evals: 0,
            converged: true,
        }
    }

    fn scaled(self, c: f64) -> Self {
        IntegralResult {
            value: c * self.value,
            error_estimate: c.abs() * self.error_estimate,
            ..self
        }
    }
}

fn converged(value: f64, err: f64, tol: f64) -> bool {
    err <= tol * value.abs() || (err == 0.0 && value == 0.0)
}

/// Axis-aligned 4-box `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box4 {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl Box4 {
    pub fn product(a: Rect, b: Rect) -> Self {
        Box4 {
            lo: [a.t0, a.x0, b.t0, b.x0],
            hi: [a.t1, a.x1, b.t1, b.x1],
        }
    }

    pub fn volume(&self) -> f64 {
        (0..4).map(|d| self.hi[d] - self.lo[d]).product()
    }
}

/// Replicated randomized QMC over `domain`.
pub fn integrate_qmc<F>(domain: Box4, integrand: F, cfg: &QuadConfig) -> IntegralResult
where
    F: Fn(&[f64; 4]) -> f64 + Sync + Send,
{
    let n = cfg.qmc_points_per_replica();
    let blocks = n.div_ceil(QMC_BLOCK);
    let vol = domain.volume();
    let width = [0, 1, 2, 3].map(|d| domain.hi[d] - domain.lo[d]);
    let seqs: Vec<Sobol4> = (0..QMC_REPLICAS as u64)
        .map(|r| Sobol4::scrambled(cfg.seed, r))
        .collect();

    let partial = map_indexed(QMC_REPLICAS * blocks as usize, |task| {
        let seq = &seqs[task / blocks as usize];
        let b = (task % blocks as usize) as u64;
        let start = b * QMC_BLOCK;
        let len = QMC_BLOCK.min(n - start);
        let mut acc = 0.0;
        for u in seq.points(start, len) {
            let p = [0, 1, 2, 3].map(|d| domain.lo[d] + width[d] * u[d]);
            acc += integrand(&p);
        }
        acc
    });

    let replicas: Vec<f64> = partial
        .chunks(blocks as usize)
        .map(|c| vol * c.iter().sum::<f64>() / n as f64)
        .collect();
    let r = replicas.len() as f64;
    let mean = replicas.iter().sum::<f64>() / r;
    let var = replicas.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let err = (var / r).sqrt();
    IntegralResult {
        value: mean,
        error_estimate: err,
        evals: n * QMC_REPLICAS as u64,
        converged: converged(mean, err, cfg.target_rel_error),
    }
}

const G3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const G3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
const G2_NODE: f64 = 0.577_350_269_189_625_8;
const CELL_EVALS: u64 = 81 + 16;

struct Cell {
    lo: [f64; 4],
    hi: [f64; 4],
    value: f64,
    error: f64,
    split: usize,
    id: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn eval_cell<F: Fn(&[f64; 4]) -> f64>(lo: [f64; 4], hi: [f64; 4], id: u64, f: &F) -> Cell {
    let mid = [0, 1, 2, 3].map(|d| 0.5 * (lo[d] + hi[d]));
    let half = [0, 1, 2, 3].map(|d| 0.5 * (hi[d] - lo[d]));
    let jac = half.iter().product::<f64>();

    let mut grid = [0.0; 81];
    for (idx, slot) in grid.iter_mut().enumerate() {
        let digits = [idx / 27, (idx / 9) % 3, (idx / 3) % 3, idx % 3];
        let p = [0, 1, 2, 3].map(|d| mid[d] + half[d] * G3_NODES[digits[d]]);
        *slot = f(&p);
    }
    let mut g3 = 0.0;
    let mut variation = [0.0; 4];
    for (idx, v) in grid.iter().enumerate() {
        let digits = [idx / 27, (idx / 9) % 3, (idx / 3) % 3, idx % 3];
        g3 += digits.iter().map(|&k| G3_WEIGHTS[k]).product::<f64>() * v;
        for d in 0..4 {
            if digits[d] == 1 {
                let stride = 3usize.pow(3 - d as u32);
                let second = grid[idx - stride] - 2.0 * v + grid[idx + stride];
                variation[d] += second.abs();
            }
        }
    }
    let mut g2 = 0.0;
    for idx in 0..16usize {
        let p = [0, 1, 2, 3].map(|d| {
            let s = if (idx >> (3 - d)) & 1 == 1 { 1.0 } else { -1.0 };
            mid[d] + half[d] * s * G2_NODE
        });
        g2 += f(&p);
    }
    let split = (0..4)
        .max_by(|&a, &b| variation[a].total_cmp(&variation[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    Cell {
        lo,
        hi,
        value: jac * g3,
        error: jac * (g3 - g2).abs(),
        split,
        id,
    }
}

/// Globally adaptive cubature: repeatedly bisect the cell with the largest
/// error until the relative target or the evaluation budget is reached.
pub fn integrate_adaptive<F>(domain: Box4, integrand: F, cfg: &QuadConfig) -> IntegralResult
where
    F: Fn(&[f64; 4]) -> f64,
{
    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    let root = eval_cell(domain.lo, domain.hi, next_id, &integrand);
    next_id += 1;
    let mut evals = CELL_EVALS;
    let (mut total, mut err) = (root.value, root.error);
    heap.push(root);

    while err > cfg.target_rel_error * total.abs() && evals + 2 * CELL_EVALS <= cfg.max_evals {
        let Some(worst) = heap.pop() else { break };
        let d = worst.split;
        let cut = 0.5 * (worst.lo[d] + worst.hi[d]);
        let mut left_hi = worst.hi;
        left_hi[d] = cut;
        let mut right_lo = worst.lo;
        right_lo[d] = cut;
        let a = eval_cell(worst.lo, left_hi, next_id, &integrand);
        let b = eval_cell(right_lo, worst.hi, next_id + 1, &integrand);
        next_id += 2;
        evals += 2 * CELL_EVALS;
        total += a.value + b.value - worst.value;
        err += a.error + b.error - worst.error;
        heap.push(a);
        heap.push(b);
    }

    // re-sum in creation order so the result does not carry running-sum drift
    let mut cells = heap.into_vec();
    cells.sort_by_key(|c| c.id);
    let value = cells.iter().map(|c| c.value).sum::<f64>();
    let error = cells.iter().map(|c| c.error).sum::<f64>();
    IntegralResult {
        value,
        error_estimate: error,
        evals,
        converged: converged(value, error, cfg.target_rel_error),
    }
}

pub fn integrate<F>(domain: Box4, integrand: F, cfg: &QuadConfig) -> IntegralResult
where
    F: Fn(&[f64; 4]) -> f64 + Sync + Send,
{
    match cfg.method {
        QuadMethod::QuasiMonteCarlo => integrate_qmc(domain, integrand, cfg),
        QuadMethod::AdaptiveSubdivision => integrate_adaptive(domain, integrand, cfg),
    }
}

#[derive(Debug, Clone, Copy)]
enum Pairing {
    Hadamard(KernelConvention),
    PauliJordan,
}

fn smeared(f: &WedgeBump, g: &WedgeBump, m: Mass, pairing: Pairing, cfg: &QuadConfig) -> IntegralResult {
    let amp = f.amplitude * g.amplitude;
    if amp == 0.0 {
        return IntegralResult::exact(0.0);
    }
    // integrate unit-amplitude shapes; bilinearity is then exact
    let (fu, gu) = (f.with_amplitude(1.0), g.with_amplitude(1.0));
    let domain = Box4::product(fu.integration_box(), gu.integration_box());
    let integrand = move |p: &[f64; 4]| {
        let x = Event::new(p[0], p[1]);
        let fv = fu.evaluate(x);
        if fv == 0.0 {
            return 0.0;
        }
        let y = Event::new(p[2], p[3]);
        let gv = gu.evaluate(y);
        if gv == 0.0 {
            return 0.0;
        }
        let sep = x.minus(y);
        let k = match pairing {
            Pairing::Hadamard(conv) => hadamard(sep, m, conv).unwrap_or(0.0),
            Pairing::PauliJordan => pauli_jordan(sep, m),
        };
        fv * k * gv
    };
    integrate(domain, integrand, cfg).scaled(amp)
}

/// `H(f, g)`: the real part of the one-particle inner product.
pub fn hadamard_inner(
    f: &WedgeBump,
    g: &WedgeBump,
    m: Mass,
    conv: KernelConvention,
    cfg: &QuadConfig,
) -> IntegralResult {
    smeared(f, g, m, Pairing::Hadamard(conv), cfg)
}

/// `D_PJ(f, g)`: the smeared commutator `[phi(f), phi(g)] = i D_PJ(f, g)`.
pub fn pj_inner(f: &WedgeBump, g: &WedgeBump, m: Mass, cfg: &QuadConfig) -> IntegralResult {
    smeared(f, g, m, Pairing::PauliJordan, cfg)
}

/// The eight Hadamard pairings entering the Weyl CHSH correlator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerProducts {
    pub ff: IntegralResult,
    pub fpfp: IntegralResult,
    pub gg: IntegralResult,
    pub gpgp: IntegralResult,
    pub fg: IntegralResult,
    pub fpg: IntegralResult,
    pub fgp: IntegralResult,
    pub fpgp: IntegralResult,
}

impl InnerProducts {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &IntegralResult)> {
        [
            ("ff", &self.ff),
            ("fpfp", &self.fpfp),
            ("gg", &self.gg),
            ("gpgp", &self.gpgp),
            ("fg", &self.fg),
            ("fpg", &self.fpg),
            ("fgp", &self.fgp),
            ("fpgp", &self.fpgp),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylChsh {
    pub value: f64,
    pub error_estimate: f64,
    /// Summed over all eight integrals.
    pub evals: u64,
    /// Judged on the correlator itself: `error_estimate <= target_rel_error * |value|`.
    pub converged: bool,
    pub inner_products: InnerProducts,
}

/// `sum_i s_i exp(-1/2 ||a_i + b_i||^2)` with signs `(+, +, +, -)` and
/// `||a + b||^2 = H(a, a) + 2 H(a, b) + H(b, b)`, plus its gradient with
/// respect to `(ff, fpfp, gg, gpgp, fg, fpg, fgp, fpgp)`.
pub fn chsh_from_hadamard(p: [f64; 8]) -> (f64, [f64; 8]) {
    let [ff, fpfp, gg, gpgp, fg, fpg, fgp, fpgp] = p;
    let e1 = (-0.5 * (ff + 2.0 * fg + gg)).exp();
    let e2 = (-0.5 * (fpfp + 2.0 * fpg + gg)).exp();
    let e3 = (-0.5 * (ff + 2.0 * fgp + gpgp)).exp();
    let e4 = (-0.5 * (fpfp + 2.0 * fpgp + gpgp)).exp();
    let value = e1 + e2 + e3 - e4;
    let grad = [
        -0.5 * (e1 + e3),
        -0.5 * (e2 - e4),
        -0.5 * (e1 + e2),
        -0.5 * (e3 - e4),
        -e1,
        -e2,
        -e3,
        e4,
    ];
    (value, grad)
}

/// Numerical CHSH correlator of the Weyl operators `W_f, W_f'` (right wedge)
/// and `W_g, W_g'` (left wedge). Each distinct pairing is integrated once;
/// the error estimate is propagated to first order.
#[allow(clippy::too_many_arguments)]
pub fn chsh_weyl_numeric(
    f: &WedgeBump,
    fp: &WedgeBump,
    g: &WedgeBump,
    gp: &WedgeBump,
    m: Mass,
    conv: KernelConvention,
    cfg: &QuadConfig,
) -> Result<WeylChsh> {
    for (name, b, side) in [
        ("f", f, WedgeSide::Right),
        ("f'", fp, WedgeSide::Right),
        ("g", g, WedgeSide::Left),
        ("g'", gp, WedgeSide::Left),
    ] {
        b.validate()?;
        if b.side != side {
            return Err(Error::WedgeMismatch(format!(
                "{name} must be supported in the {side:?} wedge, got {:?}",
                b.side
            )));
        }
    }
    cfg.validate()?;

    let h = |a: &WedgeBump, b: &WedgeBump| hadamard_inner(a, b, m, conv, cfg);
    let products = InnerProducts {
        ff: h(f, f),
        fpfp: h(fp, fp),
        gg: h(g, g),
        gpgp: h(gp, gp),
        fg: h(f, g),
        fpg: h(fp, g),
        fgp: h(f, gp),
        fpgp: h(fp, gp),
    };
    let vals: Vec<&IntegralResult> = products.iter().map(|(_, r)| r).collect();
    let p: [f64; 8] = std::array::from_fn(|i| vals[i].value);
    let (value, grad) = chsh_from_hadamard(p);
    let error_estimate = vals
        .iter()
        .zip(grad)
        .map(|(r, d)| (d * r.error_estimate).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(WeylChsh {
        value,
        error_estimate,
        evals: vals.iter().map(|r| r.evals).sum(),
        converged: converged(value, error_estimate, cfg.target_rel_error),
        inner_products: products,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Box4 {
        Box4 { lo: [0.0; 4], hi: [1.0; 4] }
    }

    #[test]
    fn method_names() {
        for (s, m) in [("qmc", QuadMethod::QuasiMonteCarlo), ("adaptive", QuadMethod::AdaptiveSubdivision)] {
            assert_eq!(s.parse::<QuadMethod>().unwrap(), m);
            assert_eq!(serde_json::from_str::<QuadMethod>(&format!("\"{s}\"")).unwrap(), m);
            assert_eq!(serde_json::from_str::<QuadMethod>(&format!("\"{m}\"")).unwrap(), m);
        }
        assert!("sobol".parse::<QuadMethod>().is_err());
    }

    #[test]
    fn config_validation_lists_everything() {
        let bad = QuadConfig {
            max_evals: 10,
            target_rel_error: 2.0,
            ..Default::default()
        };
        assert_eq!(bad.violations().len(), 2);
        assert!(QuadConfig::default().validate().is_ok());
        assert_eq!(QuadConfig::qmc(1_000_000, 0).qmc_points_per_replica(), 65536);
        assert_eq!(QuadConfig::qmc(1 << 23, 0).qmc_points_per_replica(), 1 << 20);
    }

    #[test]
    fn qmc_smooth_integral() {
        // prod_d (1 + x_d) over [0,1]^4 = 1.5^4
        let cfg = QuadConfig::qmc(1 << 16, 3);
        let r = integrate_qmc(unit_box(), |p| p.iter().map(|x| 1.0 + x).product(), &cfg);
        assert!((r.value - 5.0625).abs() < 1e-5, "{r:?}");
        assert!(r.error_estimate < 1e-4 && r.evals <= cfg.max_evals);
    }

    #[test]
    fn qmc_log_singular_integral() {
        // int_[0,1]^4 ln|x0 - x2| = -3/2
        let cfg = QuadConfig::qmc(1 << 20, 9);
        let r = integrate_qmc(unit_box(), |p| (p[0] - p[2]).abs().ln(), &cfg);
        assert!((r.value + 1.5).abs() < 5.0 * r.error_estimate.max(1e-6), "{r:?}");
    }

    #[test]
    fn adaptive_polynomial_is_exact() {
        let cfg = QuadConfig::adaptive(10_000, 1e-12);
        let r = integrate_adaptive(
            Box4 { lo: [-1.0, 0.0, 2.0, -3.0], hi: [1.0, 2.0, 3.0, 0.0] },
            |p| p[0] * p[0] * p[1] + p[2] * p[3].powi(3),
            &cfg,
        );
        // (2/3)(2) * 1 * 3 + 2 * 2 * (5/2)(-81/4)
        let exact = (2.0 / 3.0) * 2.0 * 3.0 + 2.0 * 2.0 * 2.5 * (-81.0 / 4.0);
        assert!((r.value - exact).abs() < 1e-10, "{r:?}");
        assert!(r.converged && r.evals == 97);
    }

    #[test]
    fn adaptive_refines_peaked_integrand() {
        let cfg = QuadConfig::adaptive(2_000_000, 5e-4);
        let r = integrate_adaptive(unit_box(), |p| p.iter().map(|x| (-20.0 * (x - 0.3).powi(2)).exp()).product(), &cfg);
        // int_0^1 exp(-20 (x-0.3)^2) dx
        let one = 0.5 * (std::f64::consts::PI / 20.0).sqrt()
            * (libm::erf(0.7 * 20f64.sqrt()) + libm::erf(0.3 * 20f64.sqrt()));
        assert!((r.value - one.powi(4)).abs() < 1e-4 * one.powi(4), "{r:?}");
        assert!(r.converged && (r.value - one.powi(4)).abs() <= r.error_estimate);
    }

    #[test]
    fn chsh_gradient_matches_finite_differences() {
        let p = [0.3, 0.7, 0.1, 1.2, 0.05, 0.02, 0.2, 0.4];
        let (_, grad) = chsh_from_hadamard(p);
        for i in 0..8 {
            let mut hi = p;
            let mut lo = p;
            hi[i] += 1e-6;
            lo[i] -= 1e-6;
            let fd = (chsh_from_hadamard(hi).0 - chsh_from_hadamard(lo).0) / 2e-6;
            assert!((fd - grad[i]).abs() < 1e-8, "{i}");
        }
        assert_eq!(chsh_from_hadamard([0.0; 8]).0, 2.0);
    }

    #[test]
    fn rejects_wedge_mismatch() {
        let r = WedgeBump::right(1.0, 2.0, 1.0).unwrap();
        let l = WedgeBump::left(1.0, 2.0, 1.0).unwrap();
        let m = Mass::new(0.1).unwrap();
        let cfg = QuadConfig::qmc(4096, 0);
        let err = chsh_weyl_numeric(&r, &l, &l, &l, m, KernelConvention::Paper, &cfg).unwrap_err();
        assert!(matches!(err, Error::WedgeMismatch(_)));
        assert!(chsh_weyl_numeric(&r, &r, &l, &r, m, KernelConvention::Paper, &cfg).is_err());
    }

    #[test]
    fn zero_amplitudes_give_classical_two() {
        let r = WedgeBump::right(1.0, 2.0, 0.0).unwrap();
        let l = WedgeBump::left(1.0, 2.0, 0.0).unwrap();
        let m = Mass::new(0.1).unwrap();
        let c = chsh_weyl_numeric(&r, &r, &l, &l, m, KernelConvention::Paper, &QuadConfig::default()).unwrap();
        assert_eq!(c.value, 2.0);
        assert_eq!(c.error_estimate, 0.0);
    }
}
