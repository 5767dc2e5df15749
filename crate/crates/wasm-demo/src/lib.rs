//! Browser demo bindings.
//!
//! Every entry point takes the `g` coefficients of a Σ-pair as JSON `[[re, im], ...]`
//! (`g[k]` multiplies `w^(1−k)`) and returns a JSON string.

use serde::Serialize;
use toda_lab::flows::{self, Method};
use toda_lab::{coords, ConformalPair, Hamiltonian, C64};
use wasm_bindgen::prelude::*;

const MAX_ORDER: usize = 24;
const MAX_POINTS: usize = 4096;
const MAX_STEPS: usize = 200;

#[derive(Serialize)]
struct Curves {
    g: Vec<[f64; 2]>,
    f: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Coordinates {
    order: usize,
    b: [f64; 2],
    t: Vec<[f64; 2]>,
    v: Vec<[f64; 2]>,
    log_tau: f64,
}

#[derive(Serialize)]
struct FlowFrame {
    t: Vec<[f64; 2]>,
    log_tau: f64,
    g: Vec<[f64; 2]>,
}

fn xy(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn parse_g(g_json: &str) -> Result<Vec<C64>, String> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(g_json).map_err(|e| format!("g: {e}"))?;
    if raw.is_empty() {
        return Err("g: needs at least the leading coefficient".into());
    }
    Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

fn sigma_pair(g_json: &str, order: usize) -> Result<ConformalPair, String> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(format!("order must lie in 1..={MAX_ORDER}"));
    }
    ConformalPair::sigma_conjugate(&parse_g(g_json)?, order).map_err(|e| e.to_string())
}

fn circle_image(pair: &ConformalPair, points: usize) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    (0..points)
        .map(|k| {
            let w = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / points as f64);
            (xy(pair.g().eval(w)), xy(pair.f().eval(w)))
        })
        .unzip()
}

fn hamiltonian(mu: i32, nu: i32) -> Result<Hamiltonian, String> {
    Hamiltonian::monomial(mu, nu).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn boundary_json(g_json: &str, points: usize) -> Result<String, String> {
    let points = points.clamp(8, MAX_POINTS);
    let g = parse_g(g_json)?;
    let pair = sigma_pair(g_json, g.len().max(4))?;
    let (g, f) = circle_image(&pair, points);
    to_json(&Curves { g, f })
}

pub fn coordinates_json(g_json: &str, order: usize, mu: i32, nu: i32) -> Result<String, String> {
    let pair = sigma_pair(g_json, order)?;
    let c = coords::coordinates(&pair, &hamiltonian(mu, nu)?, order).map_err(|e| e.to_string())?;
    to_json(&Coordinates {
        order,
        b: xy(pair.b()),
        t: c.t.iter().copied().map(xy).collect(),
        v: c.v.iter().copied().map(xy).collect(),
        log_tau: c.log_tau(),
    })
}

pub fn flow_json(
    g_json: &str,
    order: usize,
    n: i32,
    eps: f64,
    steps: usize,
) -> Result<String, String> {
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    if !eps.is_finite() {
        return Err("eps must be finite".into());
    }
    let pair = sigma_pair(g_json, order)?;
    let h = hamiltonian(1, 1)?;
    let path =
        flows::trajectory(&pair, &h, n, eps, steps, Method::Rk4).map_err(|e| e.to_string())?;
    let frames = path
        .iter()
        .map(|p| {
            let c = coords::coordinates(p, &h, order).map_err(|e| e.to_string())?;
            Ok(FlowFrame {
                t: c.t.iter().copied().map(xy).collect(),
                log_tau: c.log_tau(),
                g: circle_image(p, 256).0,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&frames)
}

/// Images of the unit circle under `g` and `f`.
#[wasm_bindgen]
pub fn boundary(g_json: &str, points: usize) -> Result<String, JsValue> {
    boundary_json(g_json, points).map_err(|e| JsValue::from_str(&e))
}

/// Toda coordinates `t_n`, `v_n` and `log τ` for `H = z1^μ z2^ν`.
#[wasm_bindgen]
pub fn coordinates(g_json: &str, order: usize, mu: i32, nu: i32) -> Result<String, JsValue> {
    coordinates_json(g_json, order, mu, nu).map_err(|e| JsValue::from_str(&e))
}

/// RK4 trajectory along `∂_n` with `H = z1 z2`.
#[wasm_bindgen]
pub fn flow(g_json: &str, order: usize, n: i32, eps: f64, steps: usize) -> Result<String, JsValue> {
    flow_json(g_json, order, n, eps, steps).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const ELLIPSE: &str = "[[1, 0], [0, 0], [0.1, 0]]";

    #[test]
    fn ellipse_boundary() {
        let v: Value = serde_json::from_str(&boundary_json(ELLIPSE, 64).unwrap()).unwrap();
        let g0 = &v["g"][0];
        assert!((g0[0].as_f64().unwrap() - 1.1).abs() < 1e-12);
        assert_eq!(v["f"].as_array().unwrap().len(), 64);
    }

    #[test]
    fn ellipse_coordinates() {
        let v: Value = serde_json::from_str(&coordinates_json(ELLIPSE, 6, 1, 1).unwrap()).unwrap();
        let t0 = &v["t"][6];
        assert!((t0[0].as_f64().unwrap() - 0.99).abs() < 1e-12);
        assert!(v["log_tau"].is_number());
    }

    #[test]
    fn flow_frames() {
        let v: Value = serde_json::from_str(&flow_json(ELLIPSE, 6, 1, 0.01, 3).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 4);
    }

    #[test]
    fn bad_input() {
        assert!(boundary_json("[]", 64).is_err());
        assert!(boundary_json("[[1, 0.5]]", 64).is_err());
        assert!(coordinates_json(ELLIPSE, 0, 1, 1).is_err());
        assert!(flow_json(ELLIPSE, 6, 1, 0.01, 10_000).is_err());
    }
}
