//! Browser bindings. Every export returns a JSON string so the page needs no glue
//! beyond `JSON.parse`.

use eigenpath::analysis::{bit_cost_bound, bit_cost_rough, simulate_t_chain, t_mean, SpeedProfile};
use eigenpath::oracles::stream_rng;
use eigenpath::quantum::{grover_gap, grover_path, EigenPath};
use eigenpath::traversal::{enumerate_bit, NodeStatus};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_TRIALS: u32 = 1_000_000;
const HIST_BINS: usize = 30;

fn fail(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Histogram of the T reflection count against its closed-form mean.
#[wasm_bindgen]
pub fn t_chain_stats(p: f64, p0: f64, trials: u32, seed: u64) -> String {
    if !(p > 0.0 && p < 1.0) || !(0.0..=1.0).contains(&p0) {
        return fail("need 0 < p < 1 and 0 <= p0 <= 1");
    }
    let trials = trials.clamp(1, MAX_TRIALS);
    let mut rng = stream_rng(seed, 0);
    let mut hist = vec![0u64; HIST_BINS];
    let mut sum = 0.0;
    for _ in 0..trials {
        let n = simulate_t_chain(p, p0, &mut rng);
        sum += n as f64;
        hist[((n as usize - 1) / 2).min(HIST_BINS - 1)] += 1;
    }
    json!({
        "trials": trials,
        "mean": sum / trials as f64,
        "expected": t_mean(p, p0),
        "transition": 4.0 * p * (1.0 - p),
        // bin k holds n = 2k + 1; the last bin collects the tail
        "histogram": hist,
    })
    .to_string()
}

/// Gap and overlap with the starting state along the Grover path.
#[wasm_bindgen]
pub fn grover_geometry(n_items: u32, samples: u32) -> String {
    if !(2..=4096).contains(&n_items) || samples < 2 {
        return fail("need 2 <= items <= 4096 and at least 2 samples");
    }
    let n = n_items as usize;
    let path = match grover_path(n) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let start = match path.state(0.0) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let mut pts = Vec::with_capacity(samples as usize);
    for k in 0..samples {
        let s = k as f64 / (samples - 1) as f64;
        let overlap = path.state(s).and_then(|x| eigenpath::quantum::overlap_probability(&start, &x));
        match overlap {
            Ok(o) => pts.push(json!({ "s": s, "gap": grover_gap(n, s), "overlap": o })),
            Err(e) => return fail(e),
        }
    }
    json!({ "items": n, "min_gap": path.gap_lower_bound(), "points": pts }).to_string()
}

/// Binary interval tree for a piecewise-constant speed profile on [0, 1]: nodes
/// longer than θ are subdivided.
#[wasm_bindgen]
pub fn bit_tree(speeds: &str, theta: f64) -> String {
    let speeds: Result<Vec<f64>, _> = speeds.split(',').map(|x| x.trim().parse::<f64>()).collect();
    let speeds = match speeds {
        Ok(v) if !v.is_empty() && v.len() <= 64 => v,
        _ => return fail("speeds must be 1 to 64 comma-separated numbers"),
    };
    if !(theta > 0.0) {
        return fail("theta must be positive");
    }
    let prof = match SpeedProfile::stepped(&speeds) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let nodes = match enumerate_bit(0.0, 1.0, |c, d, _| prof.length_at(d) - prof.length_at(c) <= theta, 24) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let subdivided = nodes.iter().filter(|n| n.status == NodeStatus::Subdivided).count();
    json!({
        "length": prof.total(),
        "nodes": nodes.iter().map(|n| json!([n.c, n.d, n.depth, n.status == NodeStatus::Subdivided])).collect::<Vec<_>>(),
        "subdivided": subdivided,
        "integral_bound": bit_cost_bound(&prof, theta, (0.0, 1.0), |_| 1.0),
        "rough_bound": bit_cost_rough(&prof, theta, 1.0),
    })
    .to_string()
}
