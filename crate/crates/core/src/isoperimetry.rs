//! Exact isoperimetric constants and vertex magnification by enumeration.
//!
//! Admissible sets are vertex-determined: a set S of vertices, whose boundary
//! area is the total weight of non-loop edges with exactly one endpoint in S
//! and whose mass is the vertex measure of S. Connected sets suffice for all
//! three isoperimetric functionals (each is subadditive over disconnected
//! unions), so only connected sets are enumerated. Magnification does not
//! reduce this way and enumerates every subset.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{conjugate, grad_lp_norm, lp_norm_vertex, recip};
use crate::graph::WeightedGraph;
use crate::operators::Mode;

pub const DEFAULT_CAP: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// i = A / V(S)^{1/ν'} over S inside the interior.
    Open,
    /// ĩ = A · min(V(S), V(S^c))^{1/ν - 1} on a closed graph.
    Tilde,
    /// ĩ' = A · (V(S)^{1-ν} + V(S^c)^{1-ν})^{1/ν} on a closed graph.
    TildePrime,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Open => "open",
            Variant::Tilde => "tilde",
            Variant::TildePrime => "tilde_prime",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumOptions {
    pub cap: usize,
    pub force: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            force: false,
        }
    }
}

impl EnumOptions {
    pub fn forced() -> Self {
        Self {
            cap: DEFAULT_CAP,
            force: true,
        }
    }

    pub fn check(&self, size: usize) -> Result<()> {
        if size > self.cap && !self.force {
            Err(Error::EnumerationCap { size, cap: self.cap })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleSet {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    pub area: f64,
    pub vmass: f64,
}

impl AdmissibleSet {
    /// Area and mass recomputed from scratch.
    pub fn of(g: &WeightedGraph, vertices: &[usize]) -> Self {
        let mut inside = vec![false; g.n()];
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &v in &sorted {
            inside[v] = true;
        }
        Self {
            area: boundary_area(g, &inside),
            vmass: sorted.iter().map(|&v| g.measure(v)).sum(),
            vertices: sorted,
        }
    }

    pub fn ids(&self, g: &WeightedGraph) -> Vec<String> {
        self.vertices.iter().map(|&v| g.id(v).to_string()).collect()
    }
}

/// Total weight of non-loop edges with exactly one endpoint marked.
pub fn boundary_area(g: &WeightedGraph, inside: &[bool]) -> f64 {
    g.edges()
        .iter()
        .filter(|e| inside[e.u] != inside[e.v])
        .map(|e| e.weight)
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsoReport {
    pub nu: f64,
    pub variant: Variant,
    /// +inf when there is no admissible set.
    pub value: f64,
    pub witness: Option<AdmissibleSet>,
}

/// The isoperimetric functional of one set; `complement` is V(G) - V(S).
pub fn set_functional(variant: Variant, nu: f64, area: f64, mass: f64, complement: f64) -> f64 {
    match variant {
        Variant::Open => {
            let e = 1.0 - recip(nu);
            if e == 0.0 {
                area
            } else {
                area / mass.powf(e)
            }
        }
        Variant::Tilde => area * mass.min(complement).powf(recip(nu) - 1.0),
        Variant::TildePrime => {
            let base = set_functional(Variant::Tilde, nu, area, mass, complement);
            if nu.is_infinite() {
                return base;
            }
            let (m, big) = if mass <= complement { (mass, complement) } else { (complement, mass) };
            let r = (big / m).powf(1.0 - nu);
            base * (1.0 + r).powf(1.0 / nu)
        }
    }
}

fn validate_nu(nu: f64) -> Result<()> {
    if nu >= 1.0 {
        Ok(())
    } else {
        Err(Error::BadExponent(nu))
    }
}

/// Order by value, then lexicographically by vertex ids.
fn better(g: &WeightedGraph, a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| {
        let ia = a.1.iter().map(|&v| g.id(v));
        let ib = b.1.iter().map(|&v| g.id(v));
        ia.cmp(ib)
    })
}

/// Calls `visit(members, area, mass)` once for every nonempty connected
/// subset of `allowed` whose minimum vertex is `root`, growing sets by
/// canonical extension so that no set is produced twice.
fn connected_sets_from_root(
    g: &WeightedGraph,
    allowed: &[bool],
    root: usize,
    visit: &mut dyn FnMut(&[usize], f64, f64),
) {
    struct State<'a> {
        g: &'a WeightedGraph,
        allowed: &'a [bool],
        root: usize,
        marked: Vec<bool>,
        inside: Vec<bool>,
        members: Vec<usize>,
        area: f64,
        mass: f64,
    }

    impl State<'_> {
        fn push(&mut self, w: usize) {
            for &k in self.g.incident(w) {
                let e = &self.g.edges()[k];
                if e.is_loop() {
                    continue;
                }
                if self.inside[e.other(w)] {
                    self.area -= e.weight;
                } else {
                    self.area += e.weight;
                }
            }
            self.inside[w] = true;
            self.mass += self.g.measure(w);
            self.members.push(w);
        }

        fn pop(&mut self, w: usize, area: f64, mass: f64) {
            self.members.pop();
            self.inside[w] = false;
            self.area = area;
            self.mass = mass;
        }

        fn fresh_neighbors(&mut self, w: usize) -> Vec<usize> {
            let mut out = Vec::new();
            for &k in self.g.incident(w) {
                let u = self.g.edges()[k].other(w);
                if u > self.root && self.allowed[u] && !self.marked[u] {
                    self.marked[u] = true;
                    out.push(u);
                }
            }
            out
        }

        fn extend(&mut self, mut ext: Vec<usize>, visit: &mut dyn FnMut(&[usize], f64, f64)) {
            visit(&self.members, self.area, self.mass);
            while let Some(w) = ext.pop() {
                let fresh = self.fresh_neighbors(w);
                let (area, mass) = (self.area, self.mass);
                self.push(w);
                let mut next = ext.clone();
                next.extend_from_slice(&fresh);
                self.extend(next, visit);
                self.pop(w, area, mass);
                for u in fresh {
                    self.marked[u] = false;
                }
            }
        }
    }

    let n = g.n();
    let mut st = State {
        g,
        allowed,
        root,
        marked: vec![false; n],
        inside: vec![false; n],
        members: Vec::new(),
        area: 0.0,
        mass: 0.0,
    };
    st.marked[root] = true;
    st.push(root);
    let ext = st.fresh_neighbors(root);
    st.extend(ext, visit);
}

/// Visits every nonempty connected subset of `allowed` exactly once
/// (single-threaded; used by tests and hypothesis audits).
pub fn for_each_connected_set(g: &WeightedGraph, allowed: &[bool], visit: &mut dyn FnMut(&[usize], f64, f64)) {
    for r in 0..g.n() {
        if allowed[r] {
            connected_sets_from_root(g, allowed, r, visit);
        }
    }
}

/// Minimum of `score(members, area, mass)` over connected subsets of
/// `allowed`, parallel over roots, with deterministic tie-breaking.
fn min_over_connected_sets<F>(g: &WeightedGraph, allowed: &[bool], score: F) -> Option<(f64, Vec<usize>)>
where
    F: Fn(&[usize], f64, f64) -> Option<f64> + Sync,
{
    let roots: Vec<usize> = (0..g.n()).filter(|&r| allowed[r]).collect();
    roots
        .par_iter()
        .map(|&r| {
            let mut best: Option<(f64, Vec<usize>)> = None;
            connected_sets_from_root(g, allowed, r, &mut |members, area, mass| {
                if let Some(val) = score(members, area, mass) {
                    let improves = match &best {
                        None => true,
                        Some(b) => val < b.0 || (val == b.0 && {
                            let mut s = members.to_vec();
                            s.sort_unstable();
                            better(g, &(val, s), b) == Ordering::Less
                        }),
                    };
                    if improves {
                        let mut s = members.to_vec();
                        s.sort_unstable();
                        best = Some((val, s));
                    }
                }
            });
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => Some(if better(g, &b, &a) == Ordering::Less { b } else { a }),
            },
        )
}

/// I_ν, Ĩ_ν or Ĩ'_ν with a minimising witness.
pub fn iso_constant(g: &WeightedGraph, nu: f64, variant: Variant, opts: EnumOptions) -> Result<IsoReport> {
    validate_nu(nu)?;
    let allowed: Vec<bool> = match variant {
        Variant::Open => (0..g.n()).map(|v| !g.is_boundary(v)).collect(),
        _ => {
            if !g.is_closed() {
                return Err(Error::NotClosed);
            }
            vec![true; g.n()]
        }
    };
    opts.check(allowed.iter().filter(|&&a| a).count())?;
    let total = g.total_measure();
    let n = g.n();
    let best = min_over_connected_sets(g, &allowed, |members, area, mass| match variant {
        Variant::Open => Some(set_functional(variant, nu, area, mass, 0.0)),
        _ if members.len() == n => None,
        _ => Some(set_functional(variant, nu, area, mass, total - mass)),
    });
    Ok(match best {
        None => IsoReport {
            nu,
            variant,
            value: f64::INFINITY,
            witness: None,
        },
        Some((_, members)) => {
            let w = AdmissibleSet::of(g, &members);
            let value = set_functional(variant, nu, w.area, w.vmass, total - w.vmass);
            IsoReport {
                nu,
                variant,
                value,
                witness: Some(w),
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagnificationReport {
    /// min V(Γ(A)) / V(A) - 1; +inf when no set is admissible.
    pub c: f64,
    pub witness: Vec<usize>,
}

/// Vertex magnification. Dirichlet mode ranges over nonempty subsets of the
/// interior; closed mode over nonempty sets of at most half the total
/// measure. Γ(A) is the set of vertices joined to A by an edge.
pub fn magnification(g: &WeightedGraph, mode: Mode, opts: EnumOptions) -> Result<MagnificationReport> {
    let pool: Vec<usize> = match mode {
        Mode::Closed => (0..g.n()).collect(),
        Mode::Dirichlet => g.interior(),
    };
    opts.check(pool.len())?;
    if g.n() > 64 {
        return Err(Error::EnumerationCap { size: g.n(), cap: 64 });
    }
    let nbr: Vec<u64> = pool
        .iter()
        .map(|&v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1u64 << u)))
        .collect();
    // Byte-chunk tables for the measure of a vertex mask.
    let chunks = g.n().div_ceil(8);
    let tables: Vec<[f64; 256]> = (0..chunks)
        .map(|c| {
            let mut t = [0.0; 256];
            for (b, slot) in t.iter_mut().enumerate() {
                *slot = (0..8)
                    .filter(|i| b >> i & 1 == 1 && c * 8 + i < g.n())
                    .map(|i| g.measure(c * 8 + i))
                    .sum();
            }
            t
        })
        .collect();
    let mask_measure = |m: u64| -> f64 { (0..chunks).map(|c| tables[c][((m >> (8 * c)) & 0xff) as usize]).sum() };
    let half = g.total_measure() / 2.0 * (1.0 + 1e-12);
    let limit = if mode == Mode::Closed { half } else { f64::INFINITY };

    struct Search<'a> {
        g: &'a WeightedGraph,
        pool: &'a [usize],
        nbr: &'a [u64],
        limit: f64,
        measure: &'a dyn Fn(u64) -> f64,
        best: Option<(f64, Vec<usize>)>,
        chosen: Vec<usize>,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize, gamma: u64, mass: f64) {
            if i == self.pool.len() {
                if self.chosen.is_empty() || mass > self.limit {
                    return;
                }
                let c = (self.measure)(gamma) / mass - 1.0;
                let cand = (c, self.chosen.clone());
                if self.best.as_ref().is_none_or(|b| better(self.g, &cand, b) == Ordering::Less) {
                    self.best = Some(cand);
                }
                return;
            }
            self.go(i + 1, gamma, mass);
            let v = self.pool[i];
            let m = mass + self.g.measure(v);
            if m <= self.limit {
                self.chosen.push(v);
                self.go(i + 1, gamma | self.nbr[i], m);
                self.chosen.pop();
            }
        }
    }

    let mut s = Search {
        g,
        pool: &pool,
        nbr: &nbr,
        limit,
        measure: &mask_measure,
        best: None,
        chosen: Vec::new(),
    };
    s.go(0, 0, 0.0);
    Ok(match s.best {
        Some((c, witness)) => MagnificationReport { c, witness },
        None => MagnificationReport {
            c: f64::INFINITY,
            witness: Vec::new(),
        },
    })
}

/// s_ν(f) = ‖∇f‖_1 / ‖f‖_{ν'}.
pub fn sobolev_quotient(g: &WeightedGraph, f: &[f64], nu: f64) -> Result<f64> {
    validate_nu(nu)?;
    let den = lp_norm_vertex(g, f, conjugate(nu))?;
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(grad_lp_norm(g, f, 1.0)? / den)
}

/// Measure given to subdivision vertices: positive but negligible.
pub const NEGLIGIBLE_MEASURE: f64 = 1e-300;

/// Refines every edge leaving S at distance `eps` from its S-side endpoint
/// and returns the refined graph with the function equal to 1 on S and 0 at
/// every other vertex (so it ramps over the width-`eps` segments).
pub fn characteristic_approx(g: &WeightedGraph, set: &[usize], eps: f64) -> Result<(WeightedGraph, Vec<f64>)> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty set".into()));
    }
    let mut inside = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        if g.is_boundary(v) {
            return Err(Error::InvalidParameter(format!("vertex `{}` is on the boundary", g.id(v))));
        }
        inside[v] = true;
    }
    let crossing: Vec<usize> = (0..g.edges().len())
        .filter(|&k| {
            let e = &g.edges()[k];
            inside[e.u] != inside[e.v]
        })
        .collect();
    if !(eps > 0.0) || crossing.iter().any(|&k| eps >= g.edges()[k].length) {
        return Err(Error::InvalidParameter(format!("eps {eps} must lie in (0, edge length)")));
    }
    let mut h = g.clone();
    for (j, &k) in crossing.iter().enumerate() {
        let e = &g.edges()[k];
        let offset = if inside[e.u] { eps } else { e.length - eps };
        let mut id = format!("~{j}");
        while h.index_of(&id).is_ok() {
            id.push('~');
        }
        h = h.subdivide_edge(k, offset, &id, NEGLIGIBLE_MEASURE)?.0;
    }
    let mut f = vec![0.0; h.n()];
    for (v, &x) in inside.iter().enumerate() {
        if x {
            f[v] = 1.0;
        }
    }
    Ok((h, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> WeightedGraph {
        let mut b = WeightedGraph::builder();
        for i in 0..n {
            b = b.vertex(i.to_string());
        }
        for i in 0..n {
            b = b.edge(i.to_string(), ((i + 1) % n).to_string());
        }
        b.build().unwrap()
    }

    fn complete(n: usize) -> WeightedGraph {
        let mut b = WeightedGraph::builder();
        for i in 0..n {
            b = b.vertex(i.to_string());
        }
        for i in 0..n {
            for j in i + 1..n {
                b = b.edge(i.to_string(), j.to_string());
            }
        }
        b.build().unwrap()
    }

    fn path3_ends_boundary() -> WeightedGraph {
        WeightedGraph::builder()
            .vertex_with("1", 1.0, true)
            .vertex("2")
            .vertex_with("3", 1.0, true)
            .edge("1", "2")
            .edge("2", "3")
            .build()
            .unwrap()
    }

    #[test]
    fn enumerates_each_connected_set_once() {
        // Connected subsets of a 4-cycle: 4 singles, 4 pairs, 4 triples, 1 whole.
        let g = cycle(4);
        let mut seen = Vec::new();
        for_each_connected_set(&g, &[true; 4], &mut |m, _, _| {
            let mut s = m.to_vec();
            s.sort_unstable();
            seen.push(s);
        });
        let total = seen.len();
        seen.sort();
        seen.dedup();
        assert_eq!(total, 13);
        assert_eq!(seen.len(), 13);
        // K4: every nonempty subset is connected.
        let mut count = 0;
        for_each_connected_set(&complete(4), &[true; 4], &mut |_, _, _| count += 1);
        assert_eq!(count, 15);
    }

    #[test]
    fn incremental_area_matches_recomputation() {
        let g = WeightedGraph::builder()
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .edge_with("a", "b", 2.0, 1.0)
            .edge_with("a", "b", 0.5, 1.0)
            .edge_with("b", "c", 3.0, 1.0)
            .edge("c", "c")
            .build()
            .unwrap();
        for_each_connected_set(&g, &[true; 3], &mut |m, area, mass| {
            let s = AdmissibleSet::of(&g, m);
            assert!((s.area - area).abs() < 1e-14 && (s.vmass - mass).abs() < 1e-14);
        });
    }

    #[test]
    fn c4_tilde_infinity() {
        let r = iso_constant(&cycle(4), f64::INFINITY, Variant::Tilde, EnumOptions::default()).unwrap();
        assert_eq!(r.value, 1.0);
        let w = r.witness.unwrap();
        assert_eq!((w.area, w.vmass), (2.0, 2.0));
        assert_eq!(w.vertices, vec![0, 1]);
    }

    #[test]
    fn path_open_infinity() {
        let r = iso_constant(&path3_ends_boundary(), f64::INFINITY, Variant::Open, EnumOptions::default()).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.witness.unwrap().vertices, vec![1]);
    }

    #[test]
    fn variant_preconditions() {
        assert_eq!(
            iso_constant(&path3_ends_boundary(), 2.0, Variant::Tilde, EnumOptions::default()).unwrap_err(),
            Error::NotClosed
        );
        let big = cycle(30);
        assert!(matches!(
            iso_constant(&big, 2.0, Variant::Tilde, EnumOptions::default()),
            Err(Error::EnumerationCap { size: 30, cap: 22 })
        ));
        assert!(iso_constant(&big, 2.0, Variant::Tilde, EnumOptions::forced()).is_ok());
        assert!(iso_constant(&big, 0.5, Variant::Tilde, EnumOptions::forced()).is_err());
        let lone = WeightedGraph::builder().vertex("x").build().unwrap();
        let r = iso_constant(&lone, 2.0, Variant::Tilde, EnumOptions::default()).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        assert!(r.witness.is_none());
    }

    #[test]
    fn nu_one_extremes() {
        let g = cycle(6);
        let t = iso_constant(&g, 1.0, Variant::Tilde, EnumOptions::default()).unwrap();
        let tp = iso_constant(&g, 1.0, Variant::TildePrime, EnumOptions::default()).unwrap();
        assert_eq!(t.value, 2.0);
        assert_eq!(tp.value, 4.0);
    }

    #[test]
    fn magnification_examples() {
        let r = magnification(&complete(4), Mode::Closed, EnumOptions::default()).unwrap();
        assert_eq!(r.c, 1.0);
        // Γ is the open neighbourhood: alternate vertices of C6 see only each
        // other's complement, so c = 0.
        let r = magnification(&cycle(6), Mode::Closed, EnumOptions::default()).unwrap();
        assert_eq!(r.c, 0.0);
        assert_eq!(r.witness, vec![0, 2, 4]);
        let lone = WeightedGraph::builder().vertex("x").build().unwrap();
        let r = magnification(&lone, Mode::Dirichlet, EnumOptions::default()).unwrap();
        assert_eq!((r.c, r.witness.clone()), (-1.0, vec![0]));
    }

    #[test]
    fn characteristic_approximant() {
        let g = path3_ends_boundary();
        let (h, f) = characteristic_approx(&g, &[1], 1e-6).unwrap();
        assert_eq!(h.n(), 5);
        assert!((grad_lp_norm(&h, &f, 1.0).unwrap() - 2.0).abs() < 1e-9);
        for &nu in &[1.0, 2.0, 3.0, f64::INFINITY] {
            let s = sobolev_quotient(&h, &f, nu).unwrap();
            let iso = iso_constant(&g, nu, Variant::Open, EnumOptions::default()).unwrap();
            assert!((s - iso.value).abs() < 1e-9, "nu={nu}");
        }
        assert!(characteristic_approx(&g, &[1], 1.0).is_err());
        assert!(characteristic_approx(&g, &[0], 0.1).is_err());
    }

    #[test]
    fn quotient_is_scale_invariant() {
        let g = path3_ends_boundary();
        let f = [0.0, 2.5, 0.0];
        let a = sobolev_quotient(&g, &f, 3.0).unwrap();
        let b = sobolev_quotient(&g, &[0.0, 7.0, 0.0], 3.0).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert_eq!(sobolev_quotient(&g, &[0.0; 3], 3.0).unwrap_err(), Error::ZeroDenominator);
    }
}
