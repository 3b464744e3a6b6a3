//! Browser bindings: every export takes plain strings and numbers and
//! returns a JSON string, so the page needs no bundler.

pub mod ops;

use wasm_bindgen::prelude::*;

fn js<T: ToString>(r: Result<T, nilnet::Error>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// `{svg, points, hull_vertices}` for the level-`level` tile at the origin.
#[wasm_bindgen]
pub fn render_tile(group: &str, level: u32, projection: &str, carnot: bool) -> Result<String, JsError> {
    js(ops::render_tile(group, level, projection, carnot))
}

/// Slope quasicrystal `θ_1 x + θ_2 y ∈ Z - [0, s)` on the plane `z = 0`.
#[wasm_bindgen]
pub fn quasicrystal(theta1: &str, theta2: &str, s: &str, radius: i32) -> Result<String, JsError> {
    js(ops::quasicrystal(theta1, theta2, s, radius))
}

/// Tile of `G(Λ)` containing a point, with the exact residual.
#[wasm_bindgen]
pub fn locate(group: &str, point: &str, lambda: &str) -> Result<String, JsError> {
    js(ops::locate(group, point, lambda))
}
