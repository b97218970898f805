//! Seeded random search with optional coordinate pattern refinement over the
//! parameters of the three correlators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounded::chsh_bounded;
use crate::error::{Error, Result};
use crate::kernels::KernelConvention;
use crate::modular::{weyl_chsh_closed_form, SpectralParams};
use crate::par::map_indexed;
use crate::quadrature::{chsh_weyl_numeric, QuadConfig, WeylChsh};
use crate::table::{BobSign, TableRow, WeylParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
    /// Sample `ln x` uniformly instead of `x`.
    #[serde(default)]
    pub log: bool,
}

impl Bound {
    pub const fn linear(lo: f64, hi: f64) -> Self {
        Bound { lo, hi, log: false }
    }

    pub const fn log(lo: f64, hi: f64) -> Self {
        Bound { lo, hi, log: true }
    }

    fn to_unit(self, x: f64) -> f64 {
        if self.hi == self.lo {
            return 0.0;
        }
        if self.log {
            (x.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln())
        } else {
            (x - self.lo) / (self.hi - self.lo)
        }
    }

    fn at_unit(self, u: f64) -> f64 {
        let x = if self.log {
            (self.lo.ln() + u * (self.hi.ln() - self.lo.ln())).exp()
        } else {
            self.lo + u * (self.hi - self.lo)
        };
        x.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub bounds: Vec<Bound>,
}

impl SearchSpace {
    pub fn new(bounds: Vec<Bound>) -> Result<Self> {
        let s = SearchSpace { bounds };
        let v = s.violations();
        if v.is_empty() {
            Ok(s)
        } else {
            Err(Error::invalid("search space", v.join("; ")))
        }
    }

    /// A space with every coordinate pinned.
    pub fn point(p: &[f64]) -> Self {
        SearchSpace {
            bounds: p.iter().map(|&x| Bound::linear(x, x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (i, b) in self.bounds.iter().enumerate() {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo <= b.hi) {
                v.push(format!("bound {i}: need finite lo <= hi, got [{}, {}]", b.lo, b.hi));
            } else if b.log && b.lo <= 0.0 {
                v.push(format!("bound {i}: log-uniform bound needs lo > 0, got {}", b.lo));
            }
        }
        v
    }

    fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.bounds).all(|(x, b)| (b.lo..=b.hi).contains(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub samples: usize,
    pub seed: u64,
    pub keep_top: usize,
    pub refine: bool,
    pub refine_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            samples: 100_000,
            seed: 0,
            keep_top: 10,
            refine: false,
            refine_iters: 200,
        }
    }
}

impl SearchConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.samples < 1 {
            v.push("search.samples must be >= 1".to_string());
        }
        if self.keep_top < 1 || self.keep_top > self.samples {
            v.push(format!(
                "search.keep_top must lie in [1, samples = {}], got {}",
                self.samples, self.keep_top
            ));
        }
        if self.refine_iters < 1 {
            v.push("search.refine_iters must be >= 1".to_string());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// `(eta, eta', lambda)`
    ModularClosedForm,
    /// `(eta, eta', lambda)`
    BoundedOps { quad: QuadConfig },
    /// The thirteen Weyl parameters; samples are screened with `screen` and
    /// the kept set re-evaluated with `quad`.
    WeylNumeric {
        quad: QuadConfig,
        screen: QuadConfig,
        convention: KernelConvention,
        bob: BobSign,
    },
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::ModularClosedForm => "modular",
            Objective::BoundedOps { .. } => "bounded",
            Objective::WeylNumeric { .. } => "weyl",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::ModularClosedForm | Objective::BoundedOps { .. } => 3,
            Objective::WeylNumeric { .. } => WeylParams::LEN,
        }
    }

    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Objective::ModularClosedForm | Objective::BoundedOps { .. } => &["eta", "eta_prime", "lambda"],
            Objective::WeylNumeric { .. } => &[
                "a", "eta", "b", "sigma", "a_prime", "eta_prime", "b_prime", "sigma_prime",
                "alpha", "alpha_prime", "beta", "beta_prime", "mass",
            ],
        }
    }

    pub fn default_space(&self) -> SearchSpace {
        let bounds = match self {
            Objective::ModularClosedForm | Objective::BoundedOps { .. } => {
                vec![Bound::linear(0.0, 2.0), Bound::linear(0.0, 2.0), Bound::linear(0.0, 1.0)]
            }
            Objective::WeylNumeric { .. } => {
                let decay = Bound::linear(0.01, 5.0);
                let amp = Bound::linear(0.01, 7.0);
                let cutoff = Bound::log(1.0, 600.0);
                vec![
                    decay, amp, decay, amp, decay, amp, decay, amp,
                    cutoff, cutoff, cutoff, cutoff,
                    Bound::log(1e-4, 0.05),
                ]
            }
        };
        SearchSpace { bounds }
    }

    fn eval_with(&self, p: &[f64], quad_override: Option<&QuadConfig>) -> std::result::Result<f64, String> {
        if p.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: p.len() }.to_string());
        }
        match self {
            Objective::ModularClosedForm => {
                let sp = SpectralParams::new(p[0], p[1], p[2]).map_err(|e| e.to_string())?;
                Ok(weyl_chsh_closed_form(sp))
            }
            Objective::BoundedOps { quad } => {
                let sp = SpectralParams::new(p[0], p[1], p[2]).map_err(|e| e.to_string())?;
                Ok(chsh_bounded(sp, quad_override.unwrap_or(quad)))
            }
            Objective::WeylNumeric { quad, convention, bob, .. } => {
                let w = WeylParams::from_slice(p).map_err(|e| e.to_string())?;
                let r = weyl(&w, *convention, *bob, quad_override.unwrap_or(quad)).map_err(|e| e.to_string())?;
                if r.converged {
                    Ok(r.value)
                } else {
                    Err(format!(
                        "quadrature did not converge: {} +- {}",
                        r.value, r.error_estimate
                    ))
                }
            }
        }
    }

    /// Full-accuracy value; `Err` carries the reason a point is unusable.
    pub fn evaluate(&self, p: &[f64]) -> std::result::Result<f64, String> {
        self.eval_with(p, None)
    }

    fn screen(&self, p: &[f64]) -> std::result::Result<f64, String> {
        match self {
            Objective::WeylNumeric { screen, .. } => self.eval_with(p, Some(screen)),
            _ => self.evaluate(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub sample: usize,
    pub params: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Best first.
    pub ranked: Vec<Candidate>,
    pub failures: Vec<Failure>,
    pub evaluated: usize,
}

fn check_dims(obj: &Objective, space: &SearchSpace) -> Result<()> {
    if space.dim() != obj.dim() {
        return Err(Error::Dimension { expected: obj.dim(), got: space.dim() });
    }
    let v = space.violations();
    if !v.is_empty() {
        return Err(Error::invalid("search space", v.join("; ")));
    }
    Ok(())
}

fn rank(mut c: Vec<(usize, Candidate)>) -> Vec<Candidate> {
    c.sort_by(|a, b| b.1.value.total_cmp(&a.1.value).then(a.0.cmp(&b.0)));
    c.into_iter().map(|(_, c)| c).collect()
}

/// Draws every sample up front from the seed, evaluates them in parallel and
/// ranks afterwards, so the outcome does not depend on scheduling.
pub fn random_search(obj: &Objective, space: &SearchSpace, cfg: &SearchConfig) -> Result<SearchOutcome> {
    check_dims(obj, space)?;
    let v = cfg.violations();
    if !v.is_empty() {
        return Err(Error::invalid("search config", v.join("; ")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Vec<f64>> = (0..cfg.samples)
        .map(|_| space.bounds.iter().map(|b| b.at_unit(rng.gen::<f64>())).collect())
        .collect();
    let values = map_indexed(points.len(), |i| obj.screen(&points[i]));

    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (i, (p, v)) in points.into_iter().zip(values).enumerate() {
        match v {
            Ok(value) => ok.push((i, Candidate { params: p, value })),
            Err(reason) => failures.push(Failure { sample: i, params: p, reason }),
        }
    }
    let mut ranked = rank(ok);
    ranked.truncate(cfg.keep_top);

    if matches!(obj, Objective::WeylNumeric { .. }) {
        let full = map_indexed(ranked.len(), |i| obj.evaluate(&ranked[i].params));
        let mut kept = Vec::new();
        for (i, (c, v)) in ranked.into_iter().zip(full).enumerate() {
            match v {
                Ok(value) => kept.push((i, Candidate { params: c.params, value })),
                Err(reason) => failures.push(Failure { sample: i, params: c.params, reason }),
            }
        }
        ranked = rank(kept);
    }
    Ok(SearchOutcome {
        ranked,
        failures,
        evaluated: cfg.samples,
    })
}

/// Coordinate pattern search in the sampling coordinates of `space`: probe
/// `+-step` along each axis, keep strict improvements, halve the step after a
/// sweep without one. Stops after `cfg.refine_iters` sweeps or once the step
/// falls below `1e-6` of the range.
pub fn local_refine(start: &[f64], obj: &Objective, space: &SearchSpace, cfg: &SearchConfig) -> Result<Candidate> {
    check_dims(obj, space)?;
    if !space.contains(start) {
        return Err(Error::invalid("refine start", "point lies outside the search space"));
    }
    let eval = |u: &[f64]| {
        let p: Vec<f64> = u.iter().zip(&space.bounds).map(|(&x, b)| b.at_unit(x)).collect();
        obj.evaluate(&p).ok().map(|v| (p, v))
    };
    let mut u: Vec<f64> = start.iter().zip(&space.bounds).map(|(&x, b)| b.to_unit(x)).collect();
    let (mut best_p, mut best) = match obj.evaluate(start) {
        Ok(v) => (start.to_vec(), v),
        Err(reason) => return Err(Error::invalid("refine start", reason)),
    };
    let active: Vec<usize> = (0..space.dim()).filter(|&d| space.bounds[d].hi > space.bounds[d].lo).collect();
    let mut step = 0.25;
    for _ in 0..cfg.refine_iters {
        if step < 1e-6 || active.is_empty() {
            break;
        }
        let mut improved = false;
        for &d in &active {
            for dir in [1.0, -1.0] {
                let mut trial = u.clone();
                trial[d] = (trial[d] + dir * step).clamp(0.0, 1.0);
                if trial[d] == u[d] {
                    continue;
                }
                if let Some((p, v)) = eval(&trial) {
                    if v > best {
                        best = v;
                        best_p = p;
                        u = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(Candidate { params: best_p, value: best })
}

fn weyl(w: &WeylParams, conv: KernelConvention, bob: BobSign, quad: &QuadConfig) -> Result<WeylChsh> {
    let b = w.bumps(bob)?;
    chsh_weyl_numeric(&b.f, &b.fp, &b.g, &b.gp, b.mass, conv, quad)
}

/// The numerical Weyl correlator at a reference parameter record.
pub fn reproduce_table(row: &TableRow, conv: KernelConvention, bob: BobSign, quad: &QuadConfig) -> Result<WeylChsh> {
    weyl(&row.params, conv, bob, quad)
}
