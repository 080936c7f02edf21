//! Lower bounds on the first Laplacian eigenvalue from isoperimetric and
//! magnification data, and their comparison against the true eigenvalue.
//!
//! In Dirichlet mode the eigenvalue is the bottom of the Dirichlet spectrum
//! and the isoperimetric data are I_∞ and magnification over interior sets.
//! In closed mode it is the second eigenvalue, with Ĩ_∞ and magnification
//! over sets of at most half the total measure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{half_degrees, WeightedGraph};
use crate::isoperimetry::{iso_constant, magnification, EnumOptions, Variant};
use crate::maxflow::FlowNetwork;
use crate::operators::{inner_vertex, spectral_decomposition, EdgeField, Mode};

/// Slack allowed when comparing a bound against the eigenvalue.
pub const SOUNDNESS_TOL: f64 = 1e-9;

/// First Dirichlet eigenvalue, or the second eigenvalue in closed mode.
pub fn true_lambda(g: &WeightedGraph, mode: Mode) -> Result<f64> {
    let d = spectral_decomposition(g, mode, Some(2))?;
    match mode {
        Mode::Dirichlet => Ok(d.eigenvalues[0]),
        Mode::Closed => d
            .eigenvalues
            .get(1)
            .copied()
            .ok_or_else(|| Error::InvalidParameter("closed mode needs at least two vertices".into())),
    }
}

/// I²/(4ρ_sup).
pub fn dodziuk_value(iso_inf: f64, rho_sup: f64) -> f64 {
    if rho_sup == 0.0 {
        return 0.0;
    }
    iso_inf * iso_inf / (4.0 * rho_sup)
}

/// 2ρ - sqrt(4ρ² - I²), evaluated as I²/(2ρ + sqrt(4ρ² - I²)).
pub fn mohar_value(iso_inf: f64, rho_sup: f64) -> f64 {
    if rho_sup == 0.0 {
        return 0.0;
    }
    let rad = (4.0 * rho_sup * rho_sup - iso_inf * iso_inf).max(0.0).sqrt();
    iso_inf * iso_inf / (2.0 * rho_sup + rad)
}

/// max(c²/(2c²+4), c²/(4+2⌊c⌋+2(c-⌊c⌋)²)) / sup ℓ, and 0 for c <= 0.
pub fn alon_value(c: f64, sup_length: f64) -> f64 {
    if !(c > 0.0) || !c.is_finite() {
        return 0.0;
    }
    let fl = c.floor();
    let fr = c - fl;
    let basic = c * c / (2.0 * c * c + 4.0);
    let refined = c * c / (4.0 + 2.0 * fl + 2.0 * fr * fr);
    basic.max(refined) / sup_length.max(f64::MIN_POSITIVE)
}

/// c²(2+c)/(6+6c+2c²), and 0 for c <= 0.
pub fn bobkov_value(c: f64) -> f64 {
    if !(c > 0.0) || !c.is_finite() {
        return 0.0;
    }
    c * c * (2.0 + c) / (6.0 + 6.0 * c + 2.0 * c * c)
}

/// Whether a_e/ℓ_e = V(u) + V(v) on every non-loop edge (relative 1e-9).
pub fn has_bobkov_measure(g: &WeightedGraph) -> bool {
    g.edges().iter().filter(|e| !e.is_loop()).all(|e| {
        let want = g.measure(e.u) + g.measure(e.v);
        (e.conductance() - want).abs() <= 1e-9 * want
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    pub value: f64,
    pub applicable: bool,
    pub iso_inf: Option<f64>,
    pub c: Option<f64>,
    pub rho_sup: f64,
    pub sup_length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub mode: Mode,
    pub lambda: f64,
    pub bounds: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.name == name)
    }

    /// Every applicable bound is at most λ + 1e-9.
    pub fn is_sound(&self) -> bool {
        self.bounds
            .iter()
            .all(|b| !b.applicable || b.value <= self.lambda + SOUNDNESS_TOL)
    }
}

/// Dodziuk, Mohar, Alon and Bobkov bounds against the true eigenvalue.
pub fn bound_report(g: &WeightedGraph, mode: Mode, opts: EnumOptions) -> Result<BoundReport> {
    if mode == Mode::Closed && !g.is_closed() {
        return Err(Error::NotClosed);
    }
    let lambda = true_lambda(g, mode)?;
    let variant = match mode {
        Mode::Closed => Variant::Tilde,
        Mode::Dirichlet => Variant::Open,
    };
    let iso = iso_constant(g, f64::INFINITY, variant, opts)?.value;
    let rho_sup = half_degrees(g).rho_sup;
    let sup_length = g.sup_length();
    let c = magnification(g, mode, opts)?.c;
    let entry = |name, value, applicable, iso_inf, c| BoundEntry {
        name,
        value,
        applicable,
        iso_inf,
        c,
        rho_sup,
        sup_length,
    };
    let iso_finite = if iso.is_finite() { iso } else { 0.0 };
    let bounds = vec![
        entry("dodziuk", dodziuk_value(iso_finite, rho_sup), iso.is_finite(), Some(iso), None),
        entry(
            "mohar",
            mohar_value(iso_finite, rho_sup),
            iso.is_finite() && g.has_unit_lengths(),
            Some(iso),
            None,
        ),
        entry(
            "alon",
            alon_value(c, sup_length),
            g.is_traditional() && c.is_finite(),
            None,
            Some(c),
        ),
        entry(
            "bobkov",
            bobkov_value(c),
            has_bobkov_measure(g) && c.is_finite(),
            None,
            Some(c),
        ),
    ];
    Ok(BoundReport { mode, lambda, bounds })
}

#[derive(Clone, Debug)]
pub struct NodalReport {
    pub lambda2: f64,
    /// The nodal region of smaller measure.
    pub region: Vec<usize>,
    /// Dirichlet bounds on the region, compared against `lambda2`.
    pub bounds: Vec<BoundEntry>,
}

impl NodalReport {
    pub fn is_sound(&self) -> bool {
        self.bounds
            .iter()
            .all(|b| !b.applicable || b.value <= self.lambda2 + SOUNDNESS_TOL)
    }
}

/// Restricts to the smaller nodal region of a second eigenfunction (zero
/// vertices belong to neither region) and computes Dirichlet bounds there.
pub fn nodal_reduction(g: &WeightedGraph, opts: EnumOptions) -> Result<NodalReport> {
    if !g.is_closed() {
        return Err(Error::NotClosed);
    }
    let d = spectral_decomposition(g, Mode::Closed, Some(2))?;
    if d.eigenvalues.len() < 2 {
        return Err(Error::InvalidParameter("closed mode needs at least two vertices".into()));
    }
    let phi = &d.eigenfunctions[1];
    let big = phi.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    let pos: Vec<usize> = (0..g.n()).filter(|&v| phi[v] > 1e-12 * big).collect();
    let neg: Vec<usize> = (0..g.n()).filter(|&v| phi[v] < -1e-12 * big).collect();
    let mass = |s: &[usize]| s.iter().map(|&v| g.measure(v)).sum::<f64>();
    let region = if mass(&neg) < mass(&pos) { neg } else { pos };
    let sub = g.restricted_to(&region)?;
    let report = bound_report(&sub, Mode::Dirichlet, opts)?;
    Ok(NodalReport {
        lambda2: d.eigenvalues[1],
        region,
        bounds: report.bounds,
    })
}

/// The quantities of the basic technique for a function f and field X:
/// Q1 = ∫X·∇(f²) dE / ∫f² dV, Q2 = ‖fX‖_{2,E} / ‖f‖_{2,V}, and the Rayleigh
/// quotient R. They satisfy Q1 <= 2 Q2 sqrt(R).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicTechnique {
    pub q1: f64,
    pub q2: f64,
    pub rayleigh: f64,
}

impl BasicTechnique {
    pub fn holds(&self) -> bool {
        self.q1 <= 2.0 * self.q2 * self.rayleigh.sqrt() + 1e-12 * (1.0 + self.q1.abs())
    }
}

pub fn basic_technique(g: &WeightedGraph, f: &[f64], x: &EdgeField) -> Result<BasicTechnique> {
    let norm2 = inner_vertex(g, f, f);
    if norm2 == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let mut num1 = 0.0;
    let mut num2 = 0.0;
    let mut grad2 = 0.0;
    for (e, &xe) in g.edges().iter().zip(&x.values) {
        if e.is_loop() {
            continue;
        }
        let (b, c) = (f[e.u], f[e.v]);
        // Along the edge, X·∇(f²) integrates to a_e X_e (f(v)² - f(u)²).
        num1 += e.weight * xe * (c * c - b * b);
        num2 += e.measure() * xe * xe * (b * b + b * c + c * c) / 3.0;
        grad2 += e.conductance() * (c - b) * (c - b);
    }
    Ok(BasicTechnique {
        q1: num1 / norm2,
        q2: (num2 / norm2).sqrt(),
        rayleigh: grad2 / norm2,
    })
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Exact magnification of a set A: the minimum over nonempty A' ⊆ A of
/// V(Γ(A'))/V(A') - 1. This is the largest c for which the Alon network of
/// A is guaranteed to saturate.
pub fn set_magnification_exact(g: &WeightedGraph, set: &[usize]) -> Result<BigRational> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty set".into()));
    }
    if set.len() > 22 {
        return Err(Error::EnumerationCap { size: set.len(), cap: 22 });
    }
    let nbrs: Vec<Vec<usize>> = set.iter().map(|&v| g.neighbors(v)).collect();
    let mut best: Option<BigRational> = None;
    for mask in 1u32..(1u32 << set.len()) {
        let mut gamma = vec![false; g.n()];
        let mut mass = BigRational::zero();
        for (i, &v) in set.iter().enumerate() {
            if mask >> i & 1 == 1 {
                mass += exact(g.measure(v));
                for &u in &nbrs[i] {
                    gamma[u] = true;
                }
            }
        }
        let gm: BigRational = (0..g.n())
            .filter(|&u| gamma[u])
            .map(|u| exact(g.measure(u)))
            .fold(BigRational::zero(), |a, b| a + b);
        let ratio = gm / mass - BigRational::one();
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
        }
    }
    Ok(best.expect("nonempty set"))
}

/// Edgewise-constant field from a saturated magnification network, in exact
/// arithmetic. `values[k]` is X on stored edge k (oriented tail to head); the
/// field points into A, so -∇·X is the net network outflow.
#[derive(Clone, Debug, PartialEq)]
pub struct AlonField {
    pub set: Vec<usize>,
    pub c: BigRational,
    pub values: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlonCertificate {
    /// |X_e| <= 1 (counting-measure setting only).
    pub unit_bound: Option<bool>,
    /// -∇·X >= c on A.
    pub divergence_on_set: bool,
    /// -∇·X <= 0 off A.
    pub divergence_off_set: bool,
    /// Network inflow at each vertex at most V(v).
    pub inflow: bool,
    /// Network outflow at each vertex at most (1+c)V(v), each edge at most V(far end).
    pub outflow: bool,
    /// ρ_sup of the graph reweighted by |X|².
    pub rho_sup_sq: BigRational,
    /// (2+⌊c⌋+(c-⌊c⌋)²) sup ℓ / 2.
    pub rho_limit: BigRational,
    /// rho_sup_sq <= rho_limit (counting-measure setting only).
    pub rho_bound: Option<bool>,
}

impl AlonCertificate {
    pub fn all_hold(&self) -> bool {
        self.unit_bound != Some(false)
            && self.divergence_on_set
            && self.divergence_off_set
            && self.inflow
            && self.outflow
            && self.rho_bound != Some(false)
    }
}

/// Builds Alon's field for the interior set A with magnification parameter
/// `c` (default: the exact magnification of A). Edge weights must be 1.
pub fn alon_field(g: &WeightedGraph, set: &[usize], c: Option<BigRational>) -> Result<AlonField> {
    if g.edges().iter().any(|e| e.weight != 1.0) {
        return Err(Error::InvalidParameter("Alon field needs unit edge weights".into()));
    }
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    for &v in &set {
        if v >= g.n() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        if g.is_boundary(v) {
            return Err(Error::InvalidParameter(format!("vertex `{}` is on the boundary", g.id(v))));
        }
    }
    if set.is_empty() {
        return Ok(AlonField {
            set,
            c: c.unwrap_or_else(BigRational::zero),
            values: vec![BigRational::zero(); g.edges().len()],
        });
    }
    let c = match c {
        Some(c) => c,
        None => set_magnification_exact(g, &set)?,
    };
    if c < -BigRational::one() {
        return Err(Error::InvalidParameter("c must be at least -1".into()));
    }
    let n = g.n();
    let k = set.len();
    let s = 0;
    let t = 1 + k + n;
    let b1 = |i: usize| 1 + i;
    let b2 = |v: usize| 1 + k + v;
    let mut net = FlowNetwork::new(t + 1);
    let one_c = BigRational::one() + &c;
    let mut demand = BigRational::zero();
    for (i, &a) in set.iter().enumerate() {
        let cap = &one_c * exact(g.measure(a));
        demand += &cap;
        net.add_arc(s, b1(i), cap);
    }
    // cross[i] = (target vertex, arc handle) for B1 copy i.
    let mut cross: Vec<Vec<(usize, usize)>> = Vec::with_capacity(k);
    for (i, &a) in set.iter().enumerate() {
        let mut targets = g.neighbors(a);
        if !targets.contains(&a) {
            targets.push(a);
            targets.sort_unstable();
        }
        cross.push(
            targets
                .into_iter()
                .map(|w| (w, net.add_arc(b1(i), b2(w), exact(g.measure(w)))))
                .collect(),
        );
    }
    for v in 0..n {
        net.add_arc(b2(v), t, exact(g.measure(v)));
    }
    if net.max_flow(s, t) != demand {
        return Err(Error::InfeasibleFlow);
    }
    // First stored non-loop edge for each unordered pair.
    let mut first_edge = std::collections::HashMap::new();
    for (idx, e) in g.edges().iter().enumerate() {
        if !e.is_loop() {
            first_edge.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(idx);
        }
    }
    let mut values = vec![BigRational::zero(); g.edges().len()];
    for (i, &a) in set.iter().enumerate() {
        for &(w, arc) in &cross[i] {
            if w == a {
                continue;
            }
            let f = net.flow(arc).clone();
            if f.is_zero() {
                continue;
            }
            let idx = first_edge[&(a.min(w), a.max(w))];
            // Network flow a -> w; X points the other way.
            if g.edges()[idx].u == a {
                values[idx] -= f;
            } else {
                values[idx] += f;
            }
        }
    }
    Ok(AlonField { set, c, values })
}

impl AlonField {
    pub fn to_edge_field(&self) -> EdgeField {
        EdgeField {
            values: self.values.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }

    /// Checks the field's defining properties exactly.
    pub fn certify(&self, g: &WeightedGraph) -> AlonCertificate {
        let n = g.n();
        let vm: Vec<BigRational> = (0..n).map(|v| exact(g.measure(v))).collect();
        let mut inflow = vec![BigRational::zero(); n];
        let mut outflow = vec![BigRational::zero(); n];
        let mut per_edge_ok = true;
        let mut rho_num = vec![BigRational::zero(); n];
        for (e, x) in g.edges().iter().zip(&self.values) {
            if e.is_loop() || x.is_zero() {
                continue;
            }
            // Network flow goes opposite to X: from head to tail when X > 0.
            let (from, to) = if x.is_positive() { (e.v, e.u) } else { (e.u, e.v) };
            let mag = x.abs();
            outflow[from] += &mag;
            inflow[to] += &mag;
            if mag > vm[to] {
                per_edge_ok = false;
            }
            let sq = exact(e.measure()) * &mag * &mag;
            rho_num[e.u] += &sq;
            rho_num[e.v] += &sq;
        }
        let in_set = {
            let mut m = vec![false; n];
            for &v in &self.set {
                m[v] = true;
            }
            m
        };
        let one_c = BigRational::one() + &self.c;
        let mut on = true;
        let mut off = true;
        let mut in_ok = true;
        let mut out_ok = per_edge_ok;
        for v in 0..n {
            // -∇·X = V(v)^{-1} (network outflow - inflow) with unit weights.
            let neg_div = (&outflow[v] - &inflow[v]) / &vm[v];
            if in_set[v] {
                on &= neg_div >= self.c;
            } else {
                off &= !neg_div.is_positive();
            }
            in_ok &= inflow[v] <= vm[v];
            out_ok &= outflow[v] <= &one_c * &vm[v];
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let rho_sup_sq = (0..n)
            .map(|v| &rho_num[v] / (&two * &vm[v]))
            .max()
            .unwrap_or_else(BigRational::zero);
        let fl = self.c.floor();
        let fr = &self.c - &fl;
        let rho_limit = (&two + &fl + &fr * &fr) * exact(g.sup_length()) / &two;
        let traditional = g.is_traditional();
        AlonCertificate {
            unit_bound: traditional.then(|| self.values.iter().all(|x| x.abs() <= BigRational::one())),
            divergence_on_set: on,
            divergence_off_set: off,
            inflow: in_ok,
            outflow: out_ok,
            rho_bound: traditional.then(|| rho_sup_sq <= rho_limit),
            rho_sup_sq,
            rho_limit,
        }
    }
}
