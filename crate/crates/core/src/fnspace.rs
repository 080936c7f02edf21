//! Edgewise-linear functions (represented by their vertex values), their
//! norms against the vertex and edge measures, balancing, split intervals and
//! the co-area sweep.
//!
//! Exponents are `f64` with `f64::INFINITY` standing for the sup norm. Every
//! function slice must have one value per vertex; a length mismatch is a
//! programming error and panics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::BadExponent(p))
    }
}

/// Hölder conjugate: 1 <-> inf, otherwise p/(p-1).
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// 1/p with 1/inf = 0.
pub fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn check_len(g: &WeightedGraph, f: &[f64]) {
    assert_eq!(f.len(), g.n(), "function length does not match vertex count");
}

/// (sum |f(v)|^p V(v))^{1/p}, or max |f(v)|.
pub fn lp_norm_vertex(g: &WeightedGraph, f: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    check_len(g, f);
    if p.is_infinite() {
        return Ok(f.iter().fold(0.0, |m, x| f64::max(m, x.abs())));
    }
    // Scaling by the largest value keeps |f|^p finite for large p.
    let m = f.iter().fold(0.0, |m, x| f64::max(m, x.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f
        .iter()
        .zip(g.vertices())
        .map(|(x, v)| (x.abs() / m).powf(p) * v.measure)
        .sum();
    Ok(m * s.powf(1.0 / p))
}

/// Integral over [0, 1] of |b + (c - b)s|^p, in closed form.
pub fn segment_power_mean(b: f64, c: f64, p: f64) -> f64 {
    let scale = b.abs().max(c.abs());
    if scale == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        return (b * b + b * c + c * c) / 3.0;
    }
    let m = c - b;
    if b * c >= 0.0 {
        if p == 1.0 {
            return (b.abs() + c.abs()) / 2.0;
        }
        let mid = (b + c) / 2.0;
        if m.abs() <= 1e-3 * mid.abs() {
            // Near-constant segment: the antiderivative difference would cancel.
            let r2 = (m / mid).powi(2);
            return mid.abs().powf(p)
                * (1.0 + p * (p - 1.0) / 24.0 * r2 + p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 1920.0 * r2 * r2);
        }
        (c.abs().powf(p) * c - b.abs().powf(p) * b) / ((p + 1.0) * m)
    } else {
        // Split at the interior zero; each piece runs from 0 to an endpoint.
        (b.abs().powf(p + 1.0) + c.abs().powf(p + 1.0)) / ((p + 1.0) * m.abs())
    }
}

/// Exact L^p norm of the edgewise-linear extension against the edge measure.
pub fn lp_norm_edge(g: &WeightedGraph, f: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    check_len(g, f);
    if p.is_infinite() {
        return Ok(g
            .edges()
            .iter()
            .fold(0.0, |m, e| m.max(f[e.u].abs()).max(f[e.v].abs())));
    }
    let m = f.iter().fold(0.0, |m, x| f64::max(m, x.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = g
        .edges()
        .iter()
        .map(|e| e.measure() * segment_power_mean(f[e.u] / m, f[e.v] / m, p))
        .sum();
    Ok(m * s.powf(1.0 / p))
}

/// ‖∇f‖_p against the edge measure; |∇f| = |f(v) - f(u)| / l_e on each edge.
pub fn grad_lp_norm(g: &WeightedGraph, f: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    check_len(g, f);
    let slopes = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| (e, (f[e.v] - f[e.u]).abs() / e.length));
    if p.is_infinite() {
        return Ok(slopes.fold(0.0, |m, (_, s)| f64::max(m, s)));
    }
    let slopes: Vec<_> = slopes.collect();
    let m = slopes.iter().fold(0.0, |m, &(_, s)| f64::max(m, s));
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = slopes.iter().map(|&(e, s)| e.measure() * (s / m).powf(p)).sum();
    Ok(m * s.powf(1.0 / p))
}

/// Integral of f against the vertex measure.
pub fn integral_vertex(g: &WeightedGraph, f: &[f64]) -> f64 {
    check_len(g, f);
    f.iter().zip(g.vertices()).map(|(x, v)| x * v.measure).sum()
}

/// Integral of the edgewise-linear extension of f against the edge measure.
pub fn integral_edge(g: &WeightedGraph, f: &[f64]) -> f64 {
    check_len(g, f);
    g.edges().iter().map(|e| e.measure() * (f[e.u] + f[e.v]) / 2.0).sum()
}

/// ‖f̄‖²_{2,E} where f̄ is constant on each edge, equal to the endpoint average.
pub fn edge_average_norm_sq(g: &WeightedGraph, f: &[f64]) -> f64 {
    check_len(g, f);
    g.edges()
        .iter()
        .map(|e| e.measure() * ((f[e.u] + f[e.v]) / 2.0).powi(2))
        .sum()
}

/// Whether f vanishes on every boundary vertex.
pub fn is_dirichlet(g: &WeightedGraph, f: &[f64]) -> bool {
    check_len(g, f);
    g.boundary().iter().all(|&v| f[v] == 0.0)
}

/// The unique a minimising ‖f - a‖_p for p > 1 (midpoint of max and min for
/// p = inf), by bisection on the strictly monotone derivative.
pub fn balance_point(g: &WeightedGraph, f: &[f64], p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::BadExponent(p));
    }
    check_len(g, f);
    if f.is_empty() {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let lo0 = f.iter().copied().fold(f64::INFINITY, f64::min);
    let hi0 = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if p.is_infinite() {
        return Ok((lo0 + hi0) / 2.0);
    }
    // Proportional to -g'(t); decreasing in t.
    let slope = |t: f64| -> f64 {
        f.iter()
            .zip(g.vertices())
            .map(|(&x, v)| {
                let d = x - t;
                v.measure * d.signum() * d.abs().powf(p - 1.0)
            })
            .sum()
    };
    let (mut lo, mut hi) = (lo0, hi0);
    let width = 1e-12 * (1.0 + (hi0 - lo0));
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let s = slope(mid);
        if s == 0.0 {
            return Ok(mid);
        }
        if s > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn distinct_sorted(f: &[f64]) -> Vec<f64> {
    let mut t = f.to_vec();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

/// The interval of minimisers of ‖f - t‖_1 (weighted median interval).
pub fn l1_balance_interval(g: &WeightedGraph, f: &[f64]) -> (f64, f64) {
    check_len(g, f);
    let ts = distinct_sorted(f);
    let cost = |t: f64| -> f64 {
        f.iter()
            .zip(g.vertices())
            .map(|(&x, v)| v.measure * (x - t).abs())
            .sum()
    };
    let costs: Vec<f64> = ts.iter().map(|&t| cost(t)).collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * (best + cost(0.0)).max(f64::MIN_POSITIVE);
    let mins: Vec<f64> = ts
        .iter()
        .zip(&costs)
        .filter(|(_, &c)| c <= best + tol)
        .map(|(&t, _)| t)
        .collect();
    (mins[0], mins[mins.len() - 1])
}

fn half_mass_tol(total: f64) -> f64 {
    total / 2.0 * (1.0 + 1e-12)
}

/// Whether V{f > 0} and V{f < 0} are both at most half the total measure.
pub fn is_split(g: &WeightedGraph, f: &[f64]) -> bool {
    check_len(g, f);
    let half = half_mass_tol(g.total_measure());
    let pos: f64 = (0..g.n()).filter(|&v| f[v] > 0.0).map(|v| g.measure(v)).sum();
    let neg: f64 = (0..g.n()).filter(|&v| f[v] < 0.0).map(|v| g.measure(v)).sum();
    pos <= half && neg <= half
}

/// Endpoints of the interval of t for which f - t is split.
pub fn split_interval(g: &WeightedGraph, f: &[f64]) -> (f64, f64) {
    check_len(g, f);
    let half = half_mass_tol(g.total_measure());
    let ts = distinct_sorted(f);
    let above = |t: f64| -> f64 { (0..g.n()).filter(|&v| f[v] > t).map(|v| g.measure(v)).sum() };
    let below = |t: f64| -> f64 { (0..g.n()).filter(|&v| f[v] < t).map(|v| g.measure(v)).sum() };
    let lo = ts.iter().copied().find(|&t| above(t) <= half).unwrap_or(f64::NAN);
    let hi = ts.iter().rev().copied().find(|&t| below(t) <= half).unwrap_or(f64::NAN);
    (lo, hi)
}

/// Boundary area of the superlevel sets {f > t} as a step function of t.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetSweep {
    /// `(t_k, area)`: the area on `[t_k, t_{k+1})`; the last entry has area 0.
    pub breakpoints: Vec<(f64, f64)>,
}

impl LevelSetSweep {
    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| w[0].1 * (w[1].0 - w[0].0))
            .sum()
    }

    pub fn area_at(&self, t: f64) -> f64 {
        match self.breakpoints.iter().rposition(|&(s, _)| s <= t) {
            Some(k) => self.breakpoints[k].1,
            None => 0.0,
        }
    }
}

pub fn coarea(g: &WeightedGraph, f: &[f64]) -> LevelSetSweep {
    check_len(g, f);
    let ts = distinct_sorted(f);
    let spans: Vec<(f64, f64, f64)> = g
        .edges()
        .iter()
        .filter(|e| f[e.u] != f[e.v])
        .map(|e| (f[e.u].min(f[e.v]), f[e.u].max(f[e.v]), e.weight))
        .collect();
    let mut breakpoints = Vec::with_capacity(ts.len());
    for (k, &t) in ts.iter().enumerate() {
        let area = match ts.get(k + 1) {
            Some(&next) => spans
                .iter()
                .filter(|&&(lo, hi, _)| lo <= t && hi >= next)
                .map(|&(_, _, a)| a)
                .sum(),
            None => 0.0,
        };
        breakpoints.push((t, area));
    }
    LevelSetSweep { breakpoints }
}

/// Vertex values keyed by vertex id, as read from and written to JSON.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexFunction {
    pub values: BTreeMap<String, f64>,
}

impl VertexFunction {
    pub fn from_values(g: &WeightedGraph, f: &[f64]) -> Self {
        check_len(g, f);
        Self {
            values: (0..g.n()).map(|v| (g.id(v).to_string(), f[v])).collect(),
        }
    }

    /// Values in the graph's vertex order; every vertex must be present.
    pub fn to_values(&self, g: &WeightedGraph) -> Result<Vec<f64>> {
        let mut out = vec![f64::NAN; g.n()];
        for (id, &x) in &self.values {
            out[g.index_of(id)?] = x;
        }
        if let Some(v) = out.iter().position(|x| x.is_nan()) {
            return Err(Error::InvalidParameter(format!("no value for vertex `{}`", g.id(v))));
        }
        Ok(out)
    }

    pub fn from_json_str(g: &WeightedGraph, s: &str) -> Result<Vec<f64>> {
        let vf: VertexFunction = serde_json::from_str(s)?;
        vf.to_values(g)
    }
}
