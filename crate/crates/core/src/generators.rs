//! Graph families: paths, cycles, complete graphs, hypercubes, radial graphs
//! and their doubles, the classical-graph realisation of radial graphs,
//! logarithmic test functions and seeded random graphs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{double, natural_measure, Edge, Vertex, WeightedGraph};

fn need_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter(format!("{what} must be at least 1")))
    } else {
        Ok(())
    }
}

fn unit_vertices(n: usize) -> Vec<Vertex> {
    (1..=n)
        .map(|i| Vertex {
            id: i.to_string(),
            measure: 1.0,
            boundary: false,
        })
        .collect()
}

fn unit_edge(u: usize, v: usize) -> Edge {
    Edge {
        u,
        v,
        weight: 1.0,
        length: 1.0,
    }
}

/// Path 1–2–…–n with traditional measures and no boundary.
pub fn path(n: usize) -> Result<WeightedGraph> {
    need_positive(n, "path length")?;
    let edges = (1..n).map(|i| unit_edge(i - 1, i)).collect();
    WeightedGraph::from_parts(unit_vertices(n), edges)
}

/// Path whose two end vertices are boundary.
pub fn dirichlet_path(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter("a Dirichlet path needs at least 3 vertices".into()));
    }
    let g = path(n)?;
    let mut b = vec![false; n];
    b[0] = true;
    b[n - 1] = true;
    g.with_boundary(&b)
}

/// Cycle on n vertices; n = 1 is a single self-loop and n = 2 a double edge.
pub fn cycle(n: usize) -> Result<WeightedGraph> {
    need_positive(n, "cycle length")?;
    let edges = (0..n).map(|i| unit_edge(i, (i + 1) % n)).collect();
    WeightedGraph::from_parts(unit_vertices(n), edges)
}

pub fn complete(n: usize) -> Result<WeightedGraph> {
    need_positive(n, "vertex count")?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push(unit_edge(u, v));
        }
    }
    WeightedGraph::from_parts(unit_vertices(n), edges)
}

/// d-dimensional hypercube with bit-string ids.
pub fn hypercube(d: usize) -> Result<WeightedGraph> {
    need_positive(d, "dimension")?;
    if d > 20 {
        return Err(Error::InvalidParameter("hypercube dimension above 20".into()));
    }
    let n = 1usize << d;
    let vertices = (0..n)
        .map(|x| Vertex {
            id: format!("{x:0d$b}"),
            measure: 1.0,
            boundary: false,
        })
        .collect();
    let mut edges = Vec::new();
    for x in 0..n {
        for b in 0..d {
            let y = x ^ (1 << b);
            if x < y {
                edges.push(unit_edge(x, y));
            }
        }
    }
    WeightedGraph::from_parts(vertices, edges)
}

/// ν-dimensional radial graph of size n: path 1..n, vertex n boundary,
/// E({i,i+1}) = i^{ν−1}, natural vertex measure.
pub fn radial_graph(n: usize, nu: f64) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter("radial graph needs n >= 2".into()));
    }
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(Error::BadExponent(nu));
    }
    let mut vertices = unit_vertices(n);
    vertices[n - 1].boundary = true;
    let edges = (1..n)
        .map(|i| Edge {
            u: i - 1,
            v: i,
            weight: (i as f64).powf(nu - 1.0),
            length: 1.0,
        })
        .collect();
    natural_measure(&WeightedGraph::from_parts(vertices, edges)?)
}

/// The double of the radial graph with its involution.
pub fn doubled_radial(n: usize, nu: f64) -> Result<(WeightedGraph, Vec<usize>)> {
    double(&radial_graph(n, nu)?)
}

fn radial_index(id: &str) -> Result<(usize, bool)> {
    let (base, mirrored) = match id.strip_suffix('\'') {
        Some(b) => (b, true),
        None => (id, false),
    };
    base.parse::<usize>()
        .ok()
        .filter(|&i| i >= 1)
        .map(|i| (i, mirrored))
        .ok_or_else(|| Error::InvalidParameter(format!("vertex `{id}` is not a radial level")))
}

/// f_m(i) = log(m/i) for i ≤ m, else 0, on a radial graph; on a doubled radial
/// graph the mirrored copy carries −f_m (the odd extension).
pub fn log_test_function(g: &WeightedGraph, m: usize) -> Result<Vec<f64>> {
    let levels = g
        .vertices()
        .iter()
        .map(|v| radial_index(&v.id))
        .collect::<Result<Vec<_>>>()?;
    let n = levels.iter().map(|l| l.0).max().unwrap_or(0);
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("m = {m} outside 1..={n}")));
    }
    Ok(levels
        .iter()
        .map(|&(i, mirrored)| {
            let v = if i <= m { (m as f64 / i as f64).ln() } else { 0.0 };
            if mirrored {
                -v
            } else {
                v
            }
        })
        .collect())
}

/// A traditional graph realising the doubled radial graph, with the weighted
/// quotient it lifts from.
#[derive(Clone, Debug)]
pub struct ClassicalRadial {
    /// Classical ℓ-regular closed graph (all measures, weights and lengths 1).
    pub graph: WeightedGraph,
    /// Weighted doubled path whose level i carries V(i) = k·V(i) vertices.
    pub quotient: WeightedGraph,
    /// Quotient vertex of each classical vertex.
    pub lift: Vec<usize>,
    pub k: u64,
    pub ell: u64,
    /// Level populations V(1..n) before scaling by k.
    pub populations: Vec<u64>,
    /// Complete-bipartite multiplicities E(1..n−1).
    pub multiplicities: Vec<u64>,
}

pub const CLASSICAL_MULTIPLIER_CAP: u64 = 10_000;
pub const CLASSICAL_VERTEX_CAP: u64 = 100_000;
pub const CLASSICAL_EDGE_CAP: u64 = 2_000_000;

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Levels V(i) = ⌊m i^{ν−1}⌋ (i < n), V(n) = 2[V(n−1) − V(n−2) + ⋯];
/// |V_i| = kV(i); E(i) = ℓ A(i)/(kV(i)V(i+1)) with A the alternating sums.
/// The smallest k and ℓ making all counts integral are used.
pub fn classical_radial(n: usize, nu: f64, m: u64) -> Result<ClassicalRadial> {
    if n < 2 {
        return Err(Error::InvalidParameter("classical radial graph needs n >= 2".into()));
    }
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(Error::BadExponent(nu));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("population scale m must be positive".into()));
    }
    let mut pops: Vec<u64> = (1..n).map(|i| (m as f64 * (i as f64).powf(nu - 1.0)).floor() as u64).collect();
    // alt[i] = V(i) − V(i−1) + ⋯ (1-based i stored at i−1).
    let mut alt: Vec<i128> = Vec::with_capacity(n);
    for (i, &p) in pops.iter().enumerate() {
        let prev = if i == 0 { 0 } else { alt[i - 1] };
        alt.push(p as i128 - prev);
    }
    pops.push((2 * alt[n - 2]).max(0) as u64);
    if pops.contains(&0) || alt.iter().any(|&a| a <= 0) {
        return Err(Error::NoMultipliers);
    }
    // Populations are integers, so k = 1 is the smallest valid population
    // multiplier; ℓ clears the denominators of A(i)/(V(i)V(i+1)).
    let k = 1u64;
    let mut ell = BigInt::one();
    let ratios: Vec<BigRational> = (0..n - 1)
        .map(|i| BigRational::new(BigInt::from(alt[i]), big(k) * big(pops[i]) * big(pops[i + 1])))
        .collect();
    for r in &ratios {
        ell = ell.lcm(r.denom());
    }
    let ell = ell.to_u64().filter(|&l| l <= CLASSICAL_MULTIPLIER_CAP).ok_or(Error::NoMultipliers)?;
    let mult: Vec<u64> = ratios
        .iter()
        .map(|r| {
            let e = r * BigRational::from_integer(big(ell));
            debug_assert!(e.is_integer() && e.is_positive());
            e.to_integer().to_u64().unwrap_or(u64::MAX)
        })
        .collect();
    let sizes: Vec<u64> = pops.iter().map(|&p| p * k).collect();
    let total_vertices = 2 * sizes[..n - 1].iter().sum::<u64>() + sizes[n - 1];
    let total_edges: u64 = 2 * (0..n - 1).map(|i| mult[i] * sizes[i] * sizes[i + 1]).sum::<u64>();
    if total_vertices > CLASSICAL_VERTEX_CAP || total_edges > CLASSICAL_EDGE_CAP {
        return Err(Error::NoMultipliers);
    }

    // Quotient: levels 1..n, then mirrored levels 1'..(n−1)'.
    let mut qv: Vec<Vertex> = (0..n)
        .map(|i| Vertex {
            id: (i + 1).to_string(),
            measure: sizes[i] as f64,
            boundary: false,
        })
        .collect();
    qv.extend((0..n - 1).map(|i| Vertex {
        id: format!("{}'", i + 1),
        measure: sizes[i] as f64,
        boundary: false,
    }));
    let mirror = |i: usize| if i == n - 1 { i } else { n + i };
    let mut qe = Vec::new();
    for side in 0..2 {
        for i in 0..n - 1 {
            let (u, v) = if side == 0 { (i, i + 1) } else { (mirror(i), mirror(i + 1)) };
            qe.push(Edge {
                u,
                v,
                weight: (mult[i] * sizes[i] * sizes[i + 1]) as f64,
                length: 1.0,
            });
        }
    }
    let quotient = WeightedGraph::from_parts(qv, qe)?;

    // Classical graph: vertex "i.j" (and "i.j'" on the mirrored side).
    let mut vertices = Vec::new();
    let mut lift = Vec::new();
    let mut first = vec![0usize; 2 * n - 1];
    for q in 0..2 * n - 1 {
        let level = if q < n { q } else { q - n };
        first[q] = vertices.len();
        for j in 1..=sizes[level] {
            let id = if q < n {
                format!("{}.{j}", level + 1)
            } else {
                format!("{}.{j}'", level + 1)
            };
            vertices.push(Vertex {
                id,
                measure: 1.0,
                boundary: false,
            });
            lift.push(q);
        }
    }
    let mut edges = Vec::new();
    for side in 0..2 {
        for i in 0..n - 1 {
            let (qa, qb) = if side == 0 { (i, i + 1) } else { (mirror(i), mirror(i + 1)) };
            for a in 0..sizes[i] as usize {
                for b in 0..sizes[i + 1] as usize {
                    for _ in 0..mult[i] {
                        edges.push(unit_edge(first[qa] + a, first[qb] + b));
                    }
                }
            }
        }
    }
    let graph = WeightedGraph::from_parts(vertices, edges)?;
    Ok(ClassicalRadial {
        graph,
        quotient,
        lift,
        k,
        ell,
        populations: pops,
        multiplicities: mult,
    })
}

impl ClassicalRadial {
    /// Lifts a quotient function to the classical graph (constant on levels).
    pub fn lift_function(&self, f: &[f64]) -> Vec<f64> {
        self.lift.iter().map(|&q| f[q]).collect()
    }
}

/// Shape of a random graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGraphSpec {
    pub vertices: usize,
    /// Edges added on top of a random spanning tree.
    pub extra_edges: usize,
    /// Random vertex measures and edge weights in [0.25, 4).
    pub weighted: bool,
    /// Random lengths in [0.25, 4); unit lengths otherwise.
    pub random_lengths: bool,
    /// Number of boundary vertices.
    pub boundary: usize,
    pub self_loops: bool,
}

impl RandomGraphSpec {
    pub fn traditional(vertices: usize, extra_edges: usize) -> Self {
        Self {
            vertices,
            extra_edges,
            weighted: false,
            random_lengths: false,
            boundary: 0,
            self_loops: false,
        }
    }
}

fn draw(random: bool, rng: &mut impl Rng) -> f64 {
    if random {
        rng.gen_range(0.25..4.0)
    } else {
        1.0
    }
}

/// Connected random multigraph with ids "1".."n".
pub fn random_graph(spec: &RandomGraphSpec, rng: &mut impl Rng) -> Result<WeightedGraph> {
    let n = spec.vertices;
    need_positive(n, "vertex count")?;
    if spec.boundary > n {
        return Err(Error::InvalidParameter("more boundary vertices than vertices".into()));
    }
    let mut vertices = unit_vertices(n);
    for v in &mut vertices {
        v.measure = draw(spec.weighted, rng);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &b in &order[..spec.boundary] {
        vertices[b].boundary = true;
    }
    let mut pairs = Vec::new();
    for i in 1..n {
        pairs.push((order[rng.gen_range(0..i)], order[i]));
    }
    for _ in 0..spec.extra_edges {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n);
        if u == v && !spec.self_loops {
            if n == 1 {
                continue;
            }
            v = (u + 1 + rng.gen_range(0..n - 1)) % n;
        }
        pairs.push((u, v));
    }
    let edges = pairs
        .into_iter()
        .map(|(u, v)| Edge {
            u,
            v,
            weight: draw(spec.weighted, rng),
            length: draw(spec.random_lengths, rng),
        })
        .collect();
    WeightedGraph::from_parts(vertices, edges)
}

/// Seeded convenience wrapper around [`random_graph`].
pub fn seeded_random_graph(spec: &RandomGraphSpec, seed: u64) -> Result<WeightedGraph> {
    random_graph(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The named families used throughout the checks.
pub fn family_suite() -> Vec<(String, WeightedGraph)> {
    let mut out = Vec::new();
    let mut push = |name: String, g: Result<WeightedGraph>| out.push((name, g.expect("family member builds")));
    for n in 3..=12 {
        push(format!("cycle-{n}"), cycle(n));
    }
    for n in 2..=12 {
        push(format!("path-{n}"), path(n));
    }
    for n in 3..=12 {
        push(format!("dirichlet-path-{n}"), dirichlet_path(n));
    }
    for n in 3..=6 {
        push(format!("complete-{n}"), complete(n));
    }
    for d in [3, 4] {
        push(format!("hypercube-{d}"), hypercube(d));
    }
    for nu in [2.0, 3.0, 4.0] {
        for n in [4, 8, 12] {
            push(format!("radial-{n}-{nu}"), radial_graph(n, nu));
            push(format!("doubled-radial-{n}-{nu}"), doubled_radial(n, nu).map(|d| d.0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::half_degrees;

    #[test]
    fn basic_families() {
        let p = path(3).unwrap();
        assert_eq!(p.edges().len(), 2);
        assert_eq!(half_degrees(&p).rho, vec![0.5, 1.0, 0.5]);
        let q = hypercube(3).unwrap();
        assert_eq!((q.n(), q.edges().len()), (8, 12));
        assert!(half_degrees(&q).rho.iter().all(|&r| r == 1.5));
        let c = cycle(1).unwrap();
        assert_eq!(half_degrees(&c).rho, vec![0.5]);
        assert!(path(0).is_err() && hypercube(0).is_err());
    }

    #[test]
    fn radial_measures() {
        let g = radial_graph(4, 2.0).unwrap();
        assert_eq!(g.measures(), vec![0.5, 1.5, 2.5, 1.5]);
        assert!(g.is_boundary(3));
        let g = radial_graph(6, 1.0).unwrap();
        assert!(g.edges().iter().all(|e| e.weight == 1.0));
        assert!(g.measures()[1..5].iter().all(|&m| m == 1.0));
        for nu in [1.5, 2.5, 3.0] {
            let g = radial_graph(12, nu).unwrap();
            assert!(half_degrees(&g).rho.iter().all(|r| (r - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn doubled_radial_is_closed_and_involutive() {
        let (g, inv) = doubled_radial(5, 3.0).unwrap();
        assert!(g.is_closed());
        for v in 0..g.n() {
            assert_eq!(inv[inv[v]], v);
            assert_eq!(g.measure(v), g.measure(inv[v]));
        }
    }

    #[test]
    fn log_function_values() {
        let g = radial_graph(10, 2.0).unwrap();
        let f = log_test_function(&g, 6).unwrap();
        assert_eq!(f[5], 0.0);
        assert!((f[0] - 6f64.ln()).abs() < 1e-15);
        assert!(f[6..].iter().all(|&x| x == 0.0));
        assert!(log_test_function(&g, 11).is_err());
        let (d, inv) = doubled_radial(10, 2.0).unwrap();
        let f = log_test_function(&d, 6).unwrap();
        for v in 0..d.n() {
            assert_eq!(f[inv[v]], -f[v]);
        }
    }

    #[test]
    fn classical_radial_is_regular() {
        let c = classical_radial(4, 2.0, 1).unwrap();
        let l = c.ell as f64;
        assert!(c.graph.is_traditional());
        assert!(half_degrees(&c.graph).rho.iter().all(|&r| r == l / 2.0));
        assert!(half_degrees(&c.quotient).rho.iter().all(|r| (r - l / 2.0).abs() < 1e-12));
        assert_eq!(c.graph.n() as f64, c.quotient.total_measure());
    }

    #[test]
    fn random_graphs_are_connected_and_valid() {
        let spec = RandomGraphSpec {
            vertices: 15,
            extra_edges: 10,
            weighted: true,
            random_lengths: true,
            boundary: 3,
            self_loops: true,
        };
        for seed in 0..20 {
            let g = seeded_random_graph(&spec, seed).unwrap();
            assert!(g.is_connected());
            assert_eq!(g.boundary().len(), 3);
            assert_eq!(g.edges().len(), 24);
        }
        let a = seeded_random_graph(&spec, 5).unwrap();
        let b = seeded_random_graph(&spec, 5).unwrap();
        assert_eq!(a.to_spec(), b.to_spec());
    }

    #[test]
    fn family_suite_builds() {
        let s = family_suite();
        assert!(s.len() > 40);
        assert!(s.iter().all(|(_, g)| g.n() >= 2));
    }
}
