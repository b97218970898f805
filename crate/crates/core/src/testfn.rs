//! Smooth bump functions supported in the right or left Rindler wedge.
//!
//! On the right wedge
//!
//! ```text
//! f(t, x) = amp * exp(-decay / (x^2 - t^2)) * exp(-1 / (cutoff^2 - x^2)) * exp(-(x^2 + t^2))
//! ```
//!
//! for `cutoff > x > |t|` and zero elsewhere; the left-wedge version is the
//! mirror image `x -> -x`. Both exponentials flatten to zero at the boundary,
//! so the function is smooth and compactly supported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Event;

/// Beyond this radius the Gaussian damping factor is below `exp(-42)`, i.e.
/// under `1e-18` of the amplitude; integration domains are clipped to it.
pub const GAUSSIAN_WINDOW: f64 = 6.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WedgeSide {
    /// `x > |t|`
    Right,
    /// `-x > |t|`
    Left,
}

impl WedgeSide {
    #[inline]
    fn orient(self, x: f64) -> f64 {
        match self {
            WedgeSide::Right => x,
            WedgeSide::Left => -x,
        }
    }
}

/// Parameters of one bump. The decay, cutoff and amplitude are the
/// `(a, alpha, eta)` triple of Alice's functions or `(b, beta, sigma)` of Bob's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeBump {
    pub side: WedgeSide,
    pub decay: f64,
    pub cutoff: f64,
    pub amplitude: f64,
}

/// Closed axis-aligned rectangle `[t0, t1] x [x0, x1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.t1 - self.t0) * (self.x1 - self.x0)
    }

    pub fn contains(&self, e: Event) -> bool {
        (self.t0..=self.t1).contains(&e.t) && (self.x0..=self.x1).contains(&e.x)
    }
}

impl WedgeBump {
    pub fn new(side: WedgeSide, decay: f64, cutoff: f64, amplitude: f64) -> Result<Self> {
        let b = WedgeBump {
            side,
            decay,
            cutoff,
            amplitude,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn right(decay: f64, cutoff: f64, amplitude: f64) -> Result<Self> {
        Self::new(WedgeSide::Right, decay, cutoff, amplitude)
    }

    pub fn left(decay: f64, cutoff: f64, amplitude: f64) -> Result<Self> {
        Self::new(WedgeSide::Left, decay, cutoff, amplitude)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.decay.is_finite() && self.decay > 0.0) {
            problems.push(format!("decay must be finite and > 0, got {}", self.decay));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            problems.push(format!("cutoff must be finite and > 0, got {}", self.cutoff));
        }
        if !self.amplitude.is_finite() {
            problems.push(format!("amplitude must be finite, got {}", self.amplitude));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid("wedge bump", problems.join("; ")))
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Open support: `cutoff > x > |t|` (mirrored for the left wedge).
    #[inline]
    pub fn support_contains(&self, e: Event) -> bool {
        let x = self.side.orient(e.x);
        self.cutoff > x && x > e.t.abs()
    }

    #[inline]
    pub fn evaluate(&self, e: Event) -> f64 {
        if !self.support_contains(e) {
            return 0.0;
        }
        let x = self.side.orient(e.x);
        let (x2, t2) = (x * x, e.t * e.t);
        let exponent = -self.decay / (x2 - t2) - 1.0 / (self.cutoff * self.cutoff - x2) - (x2 + t2);
        self.amplitude * exponent.exp()
    }

    /// Smallest axis-aligned box containing the support.
    pub fn bounding_box(&self) -> Rect {
        let c = self.cutoff;
        match self.side {
            WedgeSide::Right => Rect { t0: -c, t1: c, x0: 0.0, x1: c },
            WedgeSide::Left => Rect { t0: -c, t1: c, x0: -c, x1: 0.0 },
        }
    }

    /// The bounding box clipped to [`GAUSSIAN_WINDOW`]. Outside it the function
    /// is nonzero but below `1e-18 * |amplitude|`.
    pub fn integration_box(&self) -> Rect {
        let c = self.cutoff.min(GAUSSIAN_WINDOW);
        match self.side {
            WedgeSide::Right => Rect { t0: -c, t1: c, x0: 0.0, x1: c },
            WedgeSide::Left => Rect { t0: -c, t1: c, x0: -c, x1: 0.0 },
        }
    }
}

/// Values of `bump` on an `nt x nx` grid over `rect`, row-major in `t`.
/// Rows are `(t, x, value)`.
pub fn sample_grid(bump: &WedgeBump, rect: Rect, nt: usize, nx: usize) -> Vec<(f64, f64, f64)> {
    let step = |lo: f64, hi: f64, n: usize, i: usize| {
        if n <= 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(nt * nx);
    for i in 0..nt {
        let t = step(rect.t0, rect.t1, nt, i);
        for j in 0..nx {
            let x = step(rect.x0, rect.x1, nx, j);
            out.push((t, x, bump.evaluate(Event::new(t, x))));
        }
    }
    out
}
