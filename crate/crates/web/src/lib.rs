//! Browser bindings: three small computations behind the demo page in `www/`.
//!
//! Surfaces come back row-major with `eta` as the row index, over the grid
//! `step * (1..=n)` with `step = 2 / n`.

use wasm_bindgen::prelude::*;

use qftbell::bounded::surface_grid;
use qftbell::modular::{weyl_chsh_closed_form, BELL_ANGLES};
use qftbell::squeezed::{chsh_analytic, chsh_squeezed, FockConfig};
use qftbell::{QuadConfig, SpectralParams};

/// `n` grid nodes spanning `(0, 2]`.
pub fn eta_grid(n: usize) -> Vec<f64> {
    let step = 2.0 / n as f64;
    (1..=n).map(|i| step * i as f64).collect()
}

pub fn modular_surface(lambda: f64, n: usize) -> qftbell::Result<Vec<f64>> {
    let grid = eta_grid(n);
    let mut out = Vec::with_capacity(n * n);
    for &e in &grid {
        for &ep in &grid {
            out.push(weyl_chsh_closed_form(SpectralParams::new(e, ep, lambda)?));
        }
    }
    Ok(out)
}

/// Bounded-operator surface. Each node costs a few adaptive 2D integrals,
/// so keep `n` modest.
pub fn bounded_surface(lambda: f64, n: usize, rel_tol: f64) -> qftbell::Result<Vec<f64>> {
    let grid = eta_grid(n);
    let cfg = QuadConfig {
        target_rel_error: rel_tol,
        ..QuadConfig::default()
    };
    cfg.validate()?;
    let rows = surface_grid(lambda, &grid, &grid, &cfg)?;
    Ok(rows.into_iter().map(|r| r.2).collect())
}

/// Truncated squeezed-state CHSH at maximal angles for `K = 1..=k_max`,
/// followed by the untruncated value as the last entry.
pub fn squeezed_curve(lambda: f64, k_max: usize) -> qftbell::Result<Vec<f64>> {
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 1..=k_max {
        out.push(chsh_squeezed(&FockConfig::new(k, lambda, BELL_ANGLES)?));
    }
    out.push(chsh_analytic(lambda, BELL_ANGLES));
    Ok(out)
}

fn to_js(e: qftbell::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = etaGrid)]
pub fn js_eta_grid(n: usize) -> Vec<f64> {
    eta_grid(n)
}

#[wasm_bindgen(js_name = modularSurface)]
pub fn js_modular_surface(lambda: f64, n: usize) -> Result<Vec<f64>, JsError> {
    modular_surface(lambda, n).map_err(to_js)
}

#[wasm_bindgen(js_name = boundedSurface)]
pub fn js_bounded_surface(lambda: f64, n: usize, rel_tol: f64) -> Result<Vec<f64>, JsError> {
    bounded_surface(lambda, n, rel_tol).map_err(to_js)
}

#[wasm_bindgen(js_name = squeezedCurve)]
pub fn js_squeezed_curve(lambda: f64, k_max: usize) -> Result<Vec<f64>, JsError> {
    squeezed_curve(lambda, k_max).map_err(to_js)
}
