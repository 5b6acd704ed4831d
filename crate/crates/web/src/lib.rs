//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string. The `*_json`
//! functions hold the logic so they can be tested off the browser.

use distp::prelude::*;
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = std::result::Result<String, String>;

fn line(n: usize) -> (std::sync::Arc<Ground>, GroundMetric) {
    let g = Ground::indexed(n);
    let d = GroundMetric::line(g.clone());
    (g, d)
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

fn weights(g: &std::sync::Arc<Ground>, w: &[f64]) -> distp::Result<FiniteDistribution> {
    if w.iter().any(|v| !(*v >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
        return Err(distp::Error::InvalidParameter("weights must be non-negative with a positive sum".into()));
    }
    FiniteDistribution::new(g.clone(), normalized(w))
}

fn json(v: &impl Serialize) -> Out {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct TransportView {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    w1: f64,
    winf: f64,
    northwest_cost: f64,
    optimal: Vec<Vec<f64>>,
    northwest: Vec<Vec<f64>>,
}

/// Optimal and northwest-corner couplings of two weight vectors on `0..n`
/// with `d(i, j) = |i - j|`. Weights are normalized first.
pub fn transport_json(lambda: &[f64], mu: &[f64]) -> Out {
    let run = || -> distp::Result<TransportView> {
        if lambda.len() != mu.len() {
            return Err(distp::Error::DimensionMismatch("both vectors need the same length".into()));
        }
        let (g, d) = line(lambda.len());
        let (l, m) = (weights(&g, lambda)?, weights(&g, mu)?);
        let opt = emd(&l, &m, &d)?;
        let nw = northwest_corner(&l, &m);
        Ok(TransportView {
            w1: opt.cost,
            winf: wasserstein_inf(&l, &m, &d)?.cost,
            northwest_cost: nw.cost(&d.as_cost_matrix()),
            optimal: opt.coupling.to_rows(),
            northwest: nw.to_rows(),
            lambda: l.probs().to_vec(),
            mu: m.probs().to_vec(),
        })
    };
    json(&run().map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct RrView {
    rows: Vec<Vec<f64>>,
    audits: Vec<(String, f64)>,
}

/// k-ary randomized response and its DP audit over all pairs.
pub fn rr_audit_json(k: usize, epsilon: f64) -> Out {
    let run = || -> distp::Result<RrView> {
        let g = Ground::indexed(k);
        let rr = randomized_response(g.clone(), epsilon)?;
        let phi = PointRelation::full(g);
        let mut divs: Vec<Divergence> = FDivergence::TABLE.into_iter().map(Divergence::from).collect();
        divs.insert(0, Divergence::MAX);
        let audits = divs
            .iter()
            .map(|dv| Ok((dv.name(), audit_div_dp(&rr, &phi, dv)?.observed_eps)))
            .collect::<distp::Result<_>>()?;
        Ok(RrView {
            rows: rr.rows().iter().map(|r| r.probs().to_vec()).collect(),
            audits,
        })
    };
    json(&run().map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct TiltPoint {
    tilt: f64,
    epsilon: f64,
    observed: f64,
    bound: f64,
}

#[derive(Serialize)]
struct TiltView {
    kernel: Vec<Vec<f64>>,
    current: TiltPoint,
    curve: Vec<TiltPoint>,
}

fn tilted(lhat: &FiniteDistribution, tilt: f64) -> distp::Result<FiniteDistribution> {
    let n = lhat.len().max(2) as f64 - 1.0;
    let w: Vec<f64> = lhat
        .probs()
        .iter()
        .enumerate()
        .map(|(i, p)| p * (tilt * (2.0 * i as f64 / n - 1.0)).exp())
        .collect();
    FiniteDistribution::new(lhat.ground().clone(), normalized(&w))
}

fn tilt_point(spec: &CouplingMechanismSpec, lhat: &FiniteDistribution, tilt: f64) -> distp::Result<TiltPoint> {
    let actual = vec![("s0".into(), tilted(lhat, tilt)?), ("s1".into(), tilted(lhat, -tilt)?)];
    let report = check_cp_theorem(spec, &actual, TAU_NUM)?;
    let max = report.check("max", "2ε").expect("max check is always present");
    Ok(TiltPoint {
        tilt,
        epsilon: report.epsilon,
        observed: max.observed,
        bound: max.bound,
    })
}

/// Utility-optimal coupling mechanism from `lambda_hat` to `mu` on a line.
/// The actual inputs of two users are `lambda_hat` tilted by `±tilt`; the
/// result tracks the observed D∞ against `2ε` for tilts in `[0, max_tilt]`.
pub fn cp_tilt_json(lambda_hat: &[f64], mu: &[f64], tilt: f64, max_tilt: f64) -> Out {
    let run = || -> distp::Result<TiltView> {
        if lambda_hat.len() != mu.len() {
            return Err(distp::Error::DimensionMismatch("both vectors need the same length".into()));
        }
        let (g, d) = line(lambda_hat.len());
        let (lhat, m) = (weights(&g, lambda_hat)?, weights(&g, mu)?);
        let spec = build_coupling_mechanism(
            m,
            vec![("s0".into(), lhat.clone()), ("s1".into(), lhat.clone())],
            CouplingMode::Optimal(&d),
            Fallback::SampleTarget,
        )?;
        let curve = (0..=40)
            .map(|i| tilt_point(&spec, &lhat, max_tilt * i as f64 / 40.0))
            .collect::<distp::Result<_>>()?;
        let kernel = spec.kernel(&"s0".into())?;
        Ok(TiltView {
            kernel: kernel.rows().iter().map(|r| r.probs().to_vec()).collect(),
            current: tilt_point(&spec, &lhat, tilt)?,
            curve,
        })
    };
    json(&run().map_err(|e| e.to_string())?)
}

#[wasm_bindgen]
pub fn transport(lambda: &[f64], mu: &[f64]) -> Result<String, JsError> {
    transport_json(lambda, mu).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rr_audit(k: usize, epsilon: f64) -> Result<String, JsError> {
    rr_audit_json(k, epsilon).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cp_tilt(lambda_hat: &[f64], mu: &[f64], tilt: f64, max_tilt: f64) -> Result<String, JsError> {
    cp_tilt_json(lambda_hat, mu, tilt, max_tilt).map_err(|e| JsError::new(&e))
}
