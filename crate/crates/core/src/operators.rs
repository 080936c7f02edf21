//! Gradient, divergence and Laplacian on edgewise-linear data, and the
//! spectral decomposition of the Laplacian.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{l_stats, WeightedGraph};

/// Which vertices carry degrees of freedom: all of them (`Closed`), or only
/// the interior with functions vanishing on the boundary (`Dirichlet`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Closed,
    Dirichlet,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Closed => "closed",
            Mode::Dirichlet => "dirichlet",
        }
    }
}

/// (Δf)(v) = V(v)^{-1} Σ a_e (f(v) - f(u)) / l_e, self-loops omitted.
pub fn laplacian_apply(g: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), g.n());
    let mut out = vec![0.0; g.n()];
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        let flux = e.conductance() * (f[e.u] - f[e.v]);
        out[e.u] += flux;
        out[e.v] -= flux;
    }
    for (v, x) in out.iter_mut().enumerate() {
        *x /= g.measure(v);
    }
    out
}

/// An edgewise-constant field: one signed value per stored edge, oriented
/// from the stored tail `u` to the head `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeField {
    pub values: Vec<f64>,
}

impl EdgeField {
    pub fn zeros(g: &WeightedGraph) -> Self {
        Self {
            values: vec![0.0; g.edges().len()],
        }
    }
}

/// ∇f as an edge field: (f(v) - f(u)) / l_e along each stored edge.
pub fn gradient(g: &WeightedGraph, f: &[f64]) -> EdgeField {
    assert_eq!(f.len(), g.n());
    EdgeField {
        values: g.edges().iter().map(|e| (f[e.v] - f[e.u]) / e.length).collect(),
    }
}

/// ∇·X = -ñ·X, where ñ·X at v sums a_e times the outward component: +X_e at
/// the head, -X_e at the tail. Self-loops are ignored.
pub fn divergence(g: &WeightedGraph, x: &EdgeField) -> Vec<f64> {
    assert_eq!(x.values.len(), g.edges().len());
    let mut out = vec![0.0; g.n()];
    for (e, &xe) in g.edges().iter().zip(&x.values) {
        if e.is_loop() {
            continue;
        }
        out[e.v] -= e.weight * xe;
        out[e.u] += e.weight * xe;
    }
    for (v, d) in out.iter_mut().enumerate() {
        *d /= g.measure(v);
    }
    out
}

/// Σ_v (∇·X)(v) h(v) V(v) + Σ_e a_e X_e (h(v) - h(u)); zero up to rounding.
pub fn green_residual(g: &WeightedGraph, x: &EdgeField, h: &[f64]) -> f64 {
    let div = divergence(g, x);
    let vol: f64 = (0..g.n()).map(|v| div[v] * h[v] * g.measure(v)).sum();
    let edge: f64 = g
        .edges()
        .iter()
        .zip(&x.values)
        .filter(|(e, _)| !e.is_loop())
        .map(|(e, &xe)| e.weight * xe * (h[e.v] - h[e.u]))
        .sum();
    vol + edge
}

/// ⟨f, g⟩ against the vertex measure.
pub fn inner_vertex(g: &WeightedGraph, f: &[f64], h: &[f64]) -> f64 {
    (0..g.n()).map(|v| f[v] * h[v] * g.measure(v)).sum()
}

/// (Df, f) = Σ_v L(v) f(v)² V(v).
pub fn degree_form(g: &WeightedGraph, f: &[f64]) -> f64 {
    let l = l_stats(g, 0).l;
    (0..g.n()).map(|v| l[v] * f[v] * f[v] * g.measure(v)).sum()
}

/// (Af, f) = Σ over non-loop edges of 2 (a_e / l_e) f(u) f(v).
pub fn adjacency_form(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| 2.0 * e.conductance() * f[e.u] * f[e.v])
        .sum()
}

/// Eigenpairs of the Laplacian, eigenfunctions orthonormal against the
/// vertex measure. In Dirichlet mode eigenfunctions vanish on the boundary.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub mode: Mode,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// One full-length vertex function per eigenvalue.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// The vertices carrying degrees of freedom.
    pub active: Vec<usize>,
}

pub fn spectral_decomposition(g: &WeightedGraph, mode: Mode, k: Option<usize>) -> Result<SpectralDecomposition> {
    let active: Vec<usize> = match mode {
        Mode::Closed => (0..g.n()).collect(),
        Mode::Dirichlet => g.interior(),
    };
    if active.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let n = g.n();
    let mut slot = vec![usize::MAX; n];
    for (i, &v) in active.iter().enumerate() {
        slot[v] = i;
    }
    let m = active.len();
    // Symmetrised matrix V^{1/2} M V^{-1/2}.
    let mut s = DMatrix::<f64>::zeros(m, m);
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        let c = e.conductance();
        let (iu, iv) = (slot[e.u], slot[e.v]);
        if iu != usize::MAX {
            s[(iu, iu)] += c / g.measure(e.u);
        }
        if iv != usize::MAX {
            s[(iv, iv)] += c / g.measure(e.v);
        }
        if iu != usize::MAX && iv != usize::MAX {
            let off = c / (g.measure(e.u) * g.measure(e.v)).sqrt();
            s[(iu, iv)] -= off;
            s[(iv, iu)] -= off;
        }
    }
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let take = k.unwrap_or(m).min(m);
    let mut eigenvalues = Vec::with_capacity(take);
    let mut eigenfunctions = Vec::with_capacity(take);
    for &j in order.iter().take(take) {
        let mut phi = vec![0.0; n];
        for (i, &v) in active.iter().enumerate() {
            phi[v] = eig.eigenvectors[(i, j)] / g.measure(v).sqrt();
        }
        let norm = inner_vertex(g, &phi, &phi).sqrt();
        let big = phi.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
        let sign = phi
            .iter()
            .find(|x| x.abs() > 1e-10 * big)
            .map_or(1.0, |x| x.signum());
        phi.iter_mut().for_each(|x| *x *= sign / norm);
        eigenvalues.push(eig.eigenvalues[j]);
        eigenfunctions.push(phi);
    }
    Ok(SpectralDecomposition {
        mode,
        eigenvalues,
        eigenfunctions,
        active,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorNormReport {
    pub l_sup: f64,
    /// Largest Dirichlet eigenvalue, i.e. the operator norm.
    pub norm: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Checks L_sup <= ‖Δ‖ <= 2 L_sup (with a relative tolerance of 1e-12).
pub fn operator_norm_report(g: &WeightedGraph) -> OperatorNormReport {
    let l_sup = l_stats(g, 0).l_sup;
    let norm = match spectral_decomposition(g, Mode::Dirichlet, None) {
        Ok(d) => d.eigenvalues.last().copied().unwrap_or(0.0).max(0.0),
        Err(_) => 0.0,
    };
    let tol = 1e-12 * (1.0 + l_sup);
    OperatorNormReport {
        l_sup,
        norm,
        lower_holds: l_sup <= norm + tol,
        upper_holds: norm <= 2.0 * l_sup + tol,
    }
}
