//! Heat kernels of finite graphs via the spectral decomposition, monotone
//! exhaustion, Nash-type diagonal decay, the eigenvalue corollary, the
//! generalised φ-decay estimate and the growing-degree tree example.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fnspace::grad_lp_norm;
use crate::graph::{half_degrees, WeightedGraph};
use crate::isoperimetry::{for_each_connected_set, iso_constant, EnumOptions, Variant};
use crate::operators::{laplacian_apply, spectral_decomposition, Mode, SpectralDecomposition};
use crate::spectral_bounds::SOUNDNESS_TOL;

/// Step for the centred finite differences that validate time derivatives.
pub const FD_STEP: f64 = 1e-5;

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && per_decade > 0);
    let steps = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=steps)
        .map(|i| lo * 10f64.powf(i as f64 / per_decade as f64))
        .collect()
}

/// 32 points per decade over [1e-2, 1e2].
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 32)
}

/// K(x,y,t) = Σ_i e^{-tλ_i} φ_i(x) φ_i(y).
#[derive(Clone, Debug)]
pub struct HeatKernel {
    measures: Vec<f64>,
    decomposition: SpectralDecomposition,
}

pub fn heat_kernel(g: &WeightedGraph, mode: Mode) -> Result<HeatKernel> {
    Ok(HeatKernel {
        measures: g.measures(),
        decomposition: spectral_decomposition(g, mode, None)?,
    })
}

impl HeatKernel {
    pub fn mode(&self) -> Mode {
        self.decomposition.mode
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn n(&self) -> usize {
        self.measures.len()
    }

    /// Vertices where the kernel can be nonzero.
    pub fn active(&self) -> &[usize] {
        &self.decomposition.active
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, &Vec<f64>)> {
        self.decomposition
            .eigenvalues
            .iter()
            .copied()
            .zip(&self.decomposition.eigenfunctions)
    }

    pub fn evaluate(&self, x: usize, y: usize, t: f64) -> f64 {
        self.pairs().map(|(l, phi)| (-t * l).exp() * phi[x] * phi[y]).sum()
    }

    /// ∂_t K(x,y,t).
    pub fn time_derivative(&self, x: usize, y: usize, t: f64) -> f64 {
        self.pairs()
            .map(|(l, phi)| -l * (-t * l).exp() * phi[x] * phi[y])
            .sum()
    }

    pub fn diagonal(&self, t: f64) -> Vec<f64> {
        (0..self.n()).map(|x| self.evaluate(x, x, t)).collect()
    }

    pub fn matrix(&self, t: f64) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|x| (0..self.n()).map(|y| self.evaluate(x, y, t)).collect())
            .collect()
    }

    /// ∫ K(x,y,t) dV(x).
    pub fn mass(&self, y: usize, t: f64) -> f64 {
        (0..self.n())
            .map(|x| self.evaluate(x, y, t) * self.measures[x])
            .sum()
    }

    fn coefficients(&self, f0: &[f64]) -> Vec<f64> {
        assert_eq!(f0.len(), self.n());
        self.decomposition
            .eigenfunctions
            .iter()
            .map(|phi| {
                phi.iter()
                    .zip(f0)
                    .zip(&self.measures)
                    .map(|((p, f), m)| p * f * m)
                    .sum()
            })
            .collect()
    }

    fn expand(&self, coeffs: &[f64], weight: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut u = vec![0.0; self.n()];
        for ((l, phi), c) in self.pairs().zip(coeffs) {
            let w = weight(l) * c;
            for (ux, p) in u.iter_mut().zip(phi) {
                *ux += w * p;
            }
        }
        u
    }

    /// u(x,t) = ∫ K(x,y,t) f0(y) dV(y); boundary values of f0 are ignored
    /// in Dirichlet mode.
    pub fn solve(&self, f0: &[f64], t: f64) -> Vec<f64> {
        let c = self.coefficients(f0);
        self.expand(&c, |l| (-t * l).exp())
    }

    /// ∂_t u(x,t) for the solution started at f0.
    pub fn solve_derivative(&self, f0: &[f64], t: f64) -> Vec<f64> {
        let c = self.coefficients(f0);
        self.expand(&c, |l| -l * (-t * l).exp())
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")))
    }
}

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() == g.n() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: g.n(),
            got: f.len(),
        })
    }
}

/// Solution at time t of the Dirichlet initial value problem.
pub fn heat_solve(g: &WeightedGraph, f0: &[f64], t: f64) -> Result<Vec<f64>> {
    check_len(g, f0)?;
    check_time(t)?;
    Ok(heat_kernel(g, Mode::Dirichlet)?.solve(f0, t))
}

/// sup over active vertices of |u_t + Δu| with u_t from finite differences
/// of the spectral solution (one-sided near t = 0).
pub fn heat_residual(k: &HeatKernel, g: &WeightedGraph, f0: &[f64], t: f64) -> f64 {
    let h = FD_STEP;
    let u = k.solve(f0, t);
    let ut: Vec<f64> = if t >= h {
        let (a, b) = (k.solve(f0, t + h), k.solve(f0, t - h));
        a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    } else {
        let (a, b) = (k.solve(f0, t + h), k.solve(f0, t + 2.0 * h));
        u.iter()
            .zip(a.iter().zip(&b))
            .map(|(u0, (a, b))| (-3.0 * u0 + 4.0 * a - b) / (2.0 * h))
            .collect()
    };
    let lap = laplacian_apply(g, &u);
    k.active()
        .iter()
        .map(|&v| (ut[v] + lap[v]).abs())
        .fold(0.0, f64::max)
}

/// Kernel values of nested Dirichlet subgraphs at fixed probes.
#[derive(Clone, Debug)]
pub struct ExhaustionTable {
    pub probes: Vec<(usize, usize, f64)>,
    /// rows[i][j]: kernel of the i-th set at probe j.
    pub rows: Vec<Vec<f64>>,
    /// Kernel of the whole graph at each probe.
    pub full: Vec<f64>,
    pub monotone: bool,
    pub dominated: bool,
}

pub const EXHAUSTION_TOL: f64 = 1e-12;

pub fn exhaustion_check(g: &WeightedGraph, chain: &[Vec<usize>], probes: &[(usize, usize, f64)]) -> Result<ExhaustionTable> {
    let first = chain
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty exhaustion chain".into()))?;
    let mut inside = vec![false; g.n()];
    for (i, set) in chain.iter().enumerate() {
        let mut next = vec![false; g.n()];
        for &v in set {
            if v >= g.n() || g.is_boundary(v) {
                return Err(Error::InvalidParameter(format!("set {i} leaves the interior")));
            }
            next[v] = true;
        }
        if (0..g.n()).any(|v| inside[v] && !next[v]) {
            return Err(Error::InvalidParameter(format!("set {i} does not contain its predecessor")));
        }
        inside = next;
    }
    for &(x, y, t) in probes {
        check_time(t)?;
        if !first.contains(&x) || !first.contains(&y) {
            return Err(Error::InvalidParameter("probe outside the first set".into()));
        }
    }
    let rows = chain
        .par_iter()
        .map(|set| {
            let k = heat_kernel(&g.restricted_to(set)?, Mode::Dirichlet)?;
            Ok(probes.iter().map(|&(x, y, t)| k.evaluate(x, y, t)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let whole = heat_kernel(g, Mode::Dirichlet)?;
    let full: Vec<f64> = probes.iter().map(|&(x, y, t)| whole.evaluate(x, y, t)).collect();
    let monotone = rows
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| *b >= a - EXHAUSTION_TOL));
    let last = rows.last().expect("nonempty chain");
    let dominated = last.iter().zip(&full).all(|(a, b)| *a <= b + EXHAUSTION_TOL);
    Ok(ExhaustionTable {
        probes: probes.to_vec(),
        rows,
        full,
        monotone,
        dominated,
    })
}

/// Constants of the Nash argument: C = I ρ_sup^{-1/2}/2, C₁ = C γ^{-2/ν},
/// C₂ = (ν/2)^{ν/2} C₁^{-ν}.
pub fn nash_constants(iso: f64, rho_sup: f64, nu: f64, gamma: f64) -> (f64, f64, f64) {
    let c = iso / rho_sup.sqrt() / 2.0;
    let c1 = c * gamma.powf(-2.0 / nu);
    let c2 = ((nu / 2.0) * (nu / 2.0).ln() - nu * c1.ln()).exp();
    (c, c1, c2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NashReport {
    pub nu: f64,
    pub mode: Mode,
    /// I_ν (Dirichlet) or Ĩ_ν (closed).
    pub iso: f64,
    pub rho_sup: f64,
    pub gamma: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    /// False when the isoperimetric constant vanishes (bound infinite).
    pub applicable: bool,
    /// max over active x and the grid of G(x,x,t) t^{ν/2}.
    pub max_scaled: f64,
    pub argmax: Option<(usize, f64)>,
    pub holds: bool,
}

pub const NASH_TOL: f64 = 1e-9;

/// Checks G(x,x,t) ≤ C₂ t^{-ν/2} on a time grid, with G = K in Dirichlet
/// mode and G = K − 1/V(G) on closed graphs.
pub fn nash_diagonal_bound(g: &WeightedGraph, nu: f64, mode: Mode, t_grid: &[f64], opts: EnumOptions) -> Result<NashReport> {
    if !(nu > 2.0 && nu.is_finite()) {
        return Err(Error::BadExponent(nu));
    }
    for &t in t_grid {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid time must be positive, got {t}")));
        }
    }
    let (variant, gamma, shift) = match mode {
        Mode::Dirichlet => (Variant::Open, 1.0, 0.0),
        Mode::Closed => {
            if !g.is_closed() {
                return Err(Error::NotClosed);
            }
            (Variant::Tilde, 2.0, 1.0 / g.total_measure())
        }
    };
    let kernel = heat_kernel(g, mode)?;
    let iso = iso_constant(g, nu, variant, opts)?.value;
    let rho_sup = half_degrees(g).rho_sup;
    let (c, c1, c2) = nash_constants(iso, rho_sup, nu, gamma);
    let applicable = iso > 0.0 && iso.is_finite() && c2.is_finite();
    let best = t_grid
        .par_iter()
        .map(|&t| {
            kernel
                .active()
                .iter()
                .map(|&x| ((kernel.evaluate(x, x, t) - shift) * t.powf(nu / 2.0), x, t))
                .fold(None, |acc: Option<(f64, usize, f64)>, cur| match acc {
                    Some(a) if a.0 >= cur.0 => Some(a),
                    _ => Some(cur),
                })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, usize, f64)>, cur| match acc {
            Some(a) if a.0 >= cur.0 => Some(a),
            _ => Some(cur),
        });
    let max_scaled = best.map_or(f64::NEG_INFINITY, |b| b.0);
    Ok(NashReport {
        nu,
        mode,
        iso,
        rho_sup,
        gamma,
        c,
        c1,
        c2: if applicable { c2 } else { f64::INFINITY },
        applicable,
        max_scaled,
        argmax: best.map(|b| (b.1, b.2)),
        holds: !applicable || max_scaled <= c2 + NASH_TOL,
    })
}

/// (k/V)^{2/ν} 2^{-4/ν} (Ĩ_ν ρ_sup^{-1/2}/2)² / e; ν = ∞ allowed.
pub fn eigenvalue_corollary_value(k: usize, total_measure: f64, nu: f64, iso: f64, rho_sup: f64) -> f64 {
    let e = 2.0 / nu;
    let c = iso / rho_sup.sqrt() / 2.0;
    (k as f64 / total_measure).powf(e) * 2f64.powf(-2.0 * e) * c * c / std::f64::consts::E
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueBound {
    /// Index among nontrivial eigenvalues, starting at 1.
    pub k: usize,
    pub bound: f64,
    pub lambda: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueBoundReport {
    pub nu: f64,
    pub iso_tilde: f64,
    pub rho_sup: f64,
    pub total_measure: f64,
    pub entries: Vec<EigenvalueBound>,
}

impl EigenvalueBoundReport {
    pub fn is_sound(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

/// Lower bounds on the nontrivial eigenvalues of a closed graph.
pub fn eigenvalue_lower_bounds(g: &WeightedGraph, nu: f64, opts: EnumOptions) -> Result<EigenvalueBoundReport> {
    if !(nu > 2.0) {
        return Err(Error::BadExponent(nu));
    }
    if !g.is_closed() {
        return Err(Error::NotClosed);
    }
    let dec = spectral_decomposition(g, Mode::Closed, None)?;
    let iso_tilde = iso_constant(g, nu, Variant::Tilde, opts)?.value;
    let rho_sup = half_degrees(g).rho_sup;
    let total = g.total_measure();
    let entries = dec
        .eigenvalues
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &lambda)| {
            let bound = if iso_tilde.is_finite() {
                eigenvalue_corollary_value(k, total, nu, iso_tilde, rho_sup)
            } else {
                0.0
            };
            EigenvalueBound {
                k,
                bound,
                lambda,
                holds: bound <= lambda + SOUNDNESS_TOL,
            }
        })
        .collect();
    Ok(EigenvalueBoundReport {
        nu,
        iso_tilde,
        rho_sup,
        total_measure: total,
        entries,
    })
}

/// A decay profile φ with F(x) = ∫_x^∞ φ(4/u)²/u du and C = 1/(32 ρ_sup).
#[derive(Clone)]
pub struct DecayProfile {
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// (ν, κ) when φ(x) = κ x^{1/ν}.
    power: Option<(f64, f64)>,
    pub c: f64,
}

impl fmt::Debug for DecayProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecayProfile")
            .field("power", &self.power)
            .field("c", &self.c)
            .finish()
    }
}

const QUAD_REL_TOL: f64 = 1e-10;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(h: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(h: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (h(lm), h(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            rec(h, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(h, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (h(a), h(0.5 * (a + b)), h(b));
    let whole = simpson(a, b, fa, fm, fb);
    rec(h, a, b, fa, fm, fb, whole, tol, 48)
}

impl DecayProfile {
    /// `phi` must be positive and non-decreasing on (0, ∞).
    pub fn new(phi: impl Fn(f64) -> f64 + Send + Sync + 'static, rho_sup: f64) -> Result<Self> {
        Ok(Self {
            phi: Arc::new(phi),
            power: None,
            c: Self::constant(rho_sup)?,
        })
    }

    /// φ(x) = κ x^{1/ν}.
    pub fn power(nu: f64, kappa: f64, rho_sup: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::BadExponent(nu));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("profile scale must be positive, got {kappa}")));
        }
        Ok(Self {
            phi: Arc::new(move |x: f64| kappa * x.powf(1.0 / nu)),
            power: Some((nu, kappa)),
            c: Self::constant(rho_sup)?,
        })
    }

    fn constant(rho_sup: f64) -> Result<f64> {
        if rho_sup > 0.0 && rho_sup.is_finite() {
            Ok(1.0 / (32.0 * rho_sup))
        } else {
            Err(Error::InvalidParameter(format!("rho_sup must be positive, got {rho_sup}")))
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    /// κ² 4^{2/ν} (ν/2) x^{-2/ν} for power profiles.
    pub fn f_closed_form(&self, x: f64) -> Option<f64> {
        self.power
            .map(|(nu, kappa)| kappa * kappa * 4f64.powf(2.0 / nu) * (nu / 2.0) * x.powf(-2.0 / nu))
    }

    /// F(x) by adaptive Simpson in s = ln u, where the integrand becomes
    /// φ(4e^{-s})².
    pub fn f(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("F needs x > 0, got {x}")));
        }
        let phi = self.phi.clone();
        let h = move |s: f64| {
            let p = phi(4.0 * (-s).exp());
            p * p
        };
        let a = x.ln();
        if let Some((nu, kappa)) = self.power {
            // Numeric on a window, analytic tail beyond it.
            let w = 5.0 * nu;
            let head = self.integrate(&h, a, a + w)?;
            let tail = kappa * kappa * 4f64.powf(2.0 / nu) * (nu / 2.0) * (-2.0 * (a + w) / nu).exp();
            return Ok(head + tail);
        }
        let mut total = 0.0;
        let mut lo = a;
        let mut width = 1.0;
        for _ in 0..40 {
            let piece = self.integrate(&h, lo, lo + width)?;
            total += piece;
            lo += width;
            width *= 2.0;
            if piece <= 1e-14 * total && h(lo) * width <= 1e-14 * total {
                return Ok(total);
            }
            if lo - a > 1e4 {
                break;
            }
        }
        Err(Error::Divergent(format!("F({x}) does not converge")))
    }

    fn integrate(&self, h: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
        let rough = adaptive_simpson(h, a, b, f64::INFINITY);
        if !rough.is_finite() {
            return Err(Error::Divergent("non-finite integrand".into()));
        }
        let tol = QUAD_REL_TOL * 1e-2 * rough.abs().max(f64::MIN_POSITIVE);
        Ok(adaptive_simpson(h, a, b, tol))
    }

    /// F^{-1}(y) by bisection in log x (F is strictly decreasing).
    pub fn f_inverse(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter(format!("F^-1 needs y > 0, got {y}")));
        }
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        let mut guard = 0;
        while self.f(lo)? < y {
            lo /= 16.0;
            guard += 1;
            if guard > 250 {
                return Err(Error::InvalidParameter(format!("{y} exceeds the supremum of F")));
            }
        }
        guard = 0;
        while self.f(hi)? > y {
            hi *= 16.0;
            guard += 1;
            if guard > 250 {
                return Err(Error::Divergent(format!("F stays above {y}")));
            }
        }
        for _ in 0..200 {
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
            let mid = (lo * hi).sqrt();
            if self.f(mid)? >= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo * hi).sqrt())
    }

    /// F^{-1}(Ct).
    pub fn bound(&self, t: f64) -> Result<f64> {
        self.f_inverse(self.c * t)
    }
}

/// Verifies A(∂Ω) ≥ V(Ω)/φ(V(Ω)) over connected interior sets.
pub fn audit_decay_hypothesis(g: &WeightedGraph, profile: &DecayProfile, opts: EnumOptions) -> Result<()> {
    let allowed: Vec<bool> = (0..g.n()).map(|v| !g.is_boundary(v)).collect();
    opts.check(allowed.iter().filter(|&&a| a).count())?;
    let mut worst: Option<(f64, Vec<usize>, f64, f64)> = None;
    for_each_connected_set(g, &allowed, &mut |members, area, mass| {
        let required = mass / profile.phi(mass);
        if area < required * (1.0 - 1e-12) {
            let ratio = area / required;
            if worst.as_ref().is_none_or(|w| ratio < w.0) {
                let mut s = members.to_vec();
                s.sort_unstable();
                worst = Some((ratio, s, area, required));
            }
        }
    });
    match worst {
        None => Ok(()),
        Some((_, set, area, required)) => Err(Error::HypothesisViolated {
            witness: set.iter().map(|&v| g.id(v).to_string()).collect(),
            area,
            required,
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayEntry {
    pub x: usize,
    pub t: f64,
    pub kernel: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub c: f64,
    pub entries: Vec<DecayEntry>,
}

impl DecayReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

pub const DECAY_TOL: f64 = 1e-9;

/// K(x,x,t) ≤ F^{-1}(Ct) at each probe (x, t), after auditing the
/// isoperimetric hypothesis.
pub fn general_decay_bound(g: &WeightedGraph, profile: &DecayProfile, probes: &[(usize, f64)], opts: EnumOptions) -> Result<DecayReport> {
    for &(x, t) in probes {
        if x >= g.n() {
            return Err(Error::UnknownVertex(format!("#{x}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("probe time must be positive, got {t}")));
        }
    }
    audit_decay_hypothesis(g, profile, opts)?;
    let kernel = heat_kernel(g, Mode::Dirichlet)?;
    let entries = probes
        .par_iter()
        .map(|&(x, t)| {
            let k = kernel.evaluate(x, x, t);
            let bound = profile.bound(t)?;
            Ok(DecayEntry {
                x,
                t,
                kernel: k,
                bound,
                holds: k <= bound + DECAY_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayReport {
        c: profile.c,
        entries,
    })
}

/// The radially symmetric eigenfunction Δf = −f on the tree whose level-i
/// vertices have ⌊i^{1+α}⌋ children.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeReport {
    pub alpha: f64,
    pub depth: usize,
    /// Children per vertex at levels 1..depth.
    pub branching: Vec<u64>,
    /// f at levels 1..depth.
    pub profile: Vec<f64>,
    pub strictly_increasing: bool,
    /// f(2) ∏_{j=1}^{depth} (1 + 2/n_j).
    pub product_bound: f64,
    pub bounded: bool,
    /// max |Δf + f| over levels 1..depth−1, in exact arithmetic.
    pub max_residual: f64,
    /// The same residual of the rounded profile, relative to the size of
    /// its terms.
    pub max_relative_float_residual: f64,
    /// (t, sup_i e^t f(i)) for the solution u = e^t f.
    pub linf_growth: Vec<(f64, f64)>,
}

fn rational(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn nonuniqueness_tree(alpha: f64, depth: usize) -> Result<TreeReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if depth < 3 {
        return Err(Error::InvalidParameter(format!("depth must be at least 3, got {depth}")));
    }
    let branching: Vec<u64> = (1..=depth)
        .map(|i| (i as f64).powf(1.0 + alpha).floor() as u64)
        .collect();
    let n = |i: usize| rational(branching[i - 1]);
    // exact[i - 1] = f(i).
    let mut exact = vec![BigRational::one(), (rational(1) + n(1)) / n(1)];
    for i in 2..depth {
        let next = ((rational(2) + n(i)) * &exact[i - 1] - &exact[i - 2]) / n(i);
        exact.push(next);
    }
    let f = |i: usize| &exact[i - 1];
    let mut residuals = vec![n(1) * (f(1) - f(2)) + f(1)];
    for i in 2..depth {
        residuals.push(f(i) - f(i - 1) + n(i) * (f(i) - f(i + 1)) + f(i));
    }
    let max_residual = residuals
        .iter()
        .map(|r| r.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let profile: Vec<f64> = exact.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
    let p = |i: usize| profile[i - 1];
    let nf = |i: usize| branching[i - 1] as f64;
    let mut max_relative_float_residual = (nf(1) * (p(1) - p(2)) + p(1)).abs() / ((nf(1) + 1.0) * p(1));
    for i in 2..depth {
        let r = p(i) - p(i - 1) + nf(i) * (p(i) - p(i + 1)) + p(i);
        let scale = (2.0 + nf(i)) * p(i).abs() + p(i - 1).abs();
        max_relative_float_residual = max_relative_float_residual.max(r.abs() / scale);
    }
    let strictly_increasing = exact.windows(2).all(|w| w[1] > w[0]);
    let product_bound = branching
        .iter()
        .map(|&m| 1.0 + 2.0 / m as f64)
        .product::<f64>()
        * p(2);
    let bounded = profile.iter().all(|&x| x <= product_bound * (1.0 + 1e-12));
    let sup = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let linf_growth = [0.0, 1.0, 2.0, 4.0]
        .iter()
        .map(|&t: &f64| (t, t.exp() * sup))
        .collect();
    Ok(TreeReport {
        alpha,
        depth,
        branching,
        profile,
        strictly_increasing,
        product_bound,
        bounded,
        max_residual,
        max_relative_float_residual,
        linf_growth,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub trials: usize,
    /// max |dE/dt + 2‖∇u‖²| / max(1, 2‖∇u‖²) at t = 0.5, E = ∫u² dV.
    pub max_energy_error: f64,
    /// sup |u| for zero initial data.
    pub zero_solution_sup: f64,
    /// Nonnegative nonzero data stays strictly positive on the interior.
    pub positivity: bool,
    pub passed: bool,
}

pub const ENERGY_TOL: f64 = 1e-6;

/// Energy-decay and zero-data checks behind uniqueness on finite graphs.
pub fn finite_uniqueness_check(g: &WeightedGraph, trials: usize, seed: u64) -> Result<UniquenessReport> {
    let kernel = heat_kernel(g, Mode::Dirichlet)?;
    let interior = kernel.active().to_vec();
    let measures = g.measures();
    let energy = |u: &[f64]| -> f64 { u.iter().zip(&measures).map(|(x, m)| x * x * m).sum() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t, h) = (0.5, FD_STEP);
    let mut max_energy_error: f64 = 0.0;
    let mut positivity = true;
    for _ in 0..trials {
        let mut f0 = vec![0.0; g.n()];
        for &v in &interior {
            f0[v] = rng.gen_range(-1.0..1.0);
        }
        let u = kernel.solve(&f0, t);
        let de = (energy(&kernel.solve(&f0, t + h)) - energy(&kernel.solve(&f0, t - h))) / (2.0 * h);
        let dirichlet = grad_lp_norm(g, &u, 2.0)?.powi(2);
        let err = (de + 2.0 * dirichlet).abs() / (2.0 * dirichlet).max(1.0);
        max_energy_error = max_energy_error.max(err);

        let mut pos = vec![0.0; g.n()];
        for &v in &interior {
            pos[v] = rng.gen_range(0.0..1.0);
        }
        let u = kernel.solve(&pos, 1.0);
        positivity &= interior.iter().all(|&v| u[v] > 0.0);
    }
    let zero = kernel.solve(&vec![0.0; g.n()], t);
    let zero_solution_sup = zero.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    Ok(UniquenessReport {
        trials,
        max_energy_error,
        zero_solution_sup,
        positivity,
        passed: max_energy_error <= ENERGY_TOL && zero_solution_sup <= 1e-12 && positivity,
    })
}
