//! The L^p gradient inequalities as executable checks: the general
//! F-inequality, Sobolev (ν > p), Nash, the generalised Nash form, Trudinger,
//! the p > ν sup-norm embedding with its iteration constant, and the
//! logarithmic sharpness experiment on radial graphs.

use crate::error::{Error, Result};
use crate::fnspace::{
    conjugate, grad_lp_norm, integral_vertex, is_dirichlet, is_split, l1_balance_interval, lp_norm_vertex, recip,
};
use crate::generators::{log_test_function, radial_graph};
use crate::graph::{half_degrees, WeightedGraph};
use crate::isoperimetry::{iso_constant, EnumOptions, Variant};
use crate::operators::Mode;

/// Absolute slack, scaled by max(1, |rhs|), allowed when comparing sides.
pub const CHECK_TOL: f64 = 1e-9;

/// Graph data shared by the checks: I_ν (Dirichlet) or Ĩ_ν (closed), ρ_sup
/// and V(G).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityContext {
    pub mode: Mode,
    pub nu: f64,
    pub iso: f64,
    pub rho_sup: f64,
    pub total_measure: f64,
}

impl InequalityContext {
    pub fn new(g: &WeightedGraph, nu: f64, mode: Mode, opts: EnumOptions) -> Result<Self> {
        let variant = match mode {
            Mode::Dirichlet => Variant::Open,
            Mode::Closed => {
                if !g.is_closed() {
                    return Err(Error::NotClosed);
                }
                Variant::Tilde
            }
        };
        let iso = iso_constant(g, nu, variant, opts)?.value;
        Ok(Self::with_iso(g, nu, mode, iso))
    }

    /// Uses a precomputed isoperimetric constant.
    pub fn with_iso(g: &WeightedGraph, nu: f64, mode: Mode, iso: f64) -> Self {
        Self {
            mode,
            nu,
            iso,
            rho_sup: half_degrees(g).rho_sup,
            total_measure: g.total_measure(),
        }
    }
}

/// One evaluated inequality, oriented so that it asserts `lhs ≥ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub nu: f64,
    pub p: Option<f64>,
    pub iso: f64,
    pub rho_sup: f64,
    pub mode: Mode,
    pub split: bool,
    pub passed: bool,
    /// The function, when the check failed.
    pub witness: Option<Vec<f64>>,
}

fn finish(name: &'static str, lhs: f64, rhs: f64, ctx: &InequalityContext, p: Option<f64>, split: bool, f: &[f64]) -> InequalityCheck {
    let passed = lhs >= rhs - CHECK_TOL * rhs.abs().max(1.0);
    InequalityCheck {
        name,
        lhs,
        rhs,
        nu: ctx.nu,
        p,
        iso: ctx.iso,
        rho_sup: ctx.rho_sup,
        mode: ctx.mode,
        split,
        passed,
        witness: (!passed).then(|| f.to_vec()),
    }
}

/// `iso * norm`, treating an infinite constant times a zero norm as zero.
fn scaled(constant: f64, norm: f64) -> f64 {
    if norm == 0.0 {
        0.0
    } else {
        constant * norm
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

/// Dirichlet mode needs f to vanish on the boundary; closed mode needs f split.
/// Returns the split flag.
fn require_hypothesis(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64]) -> Result<bool> {
    check_len(g, f)?;
    let split = is_split(g, f);
    match ctx.mode {
        Mode::Dirichlet if !is_dirichlet(g, f) => {
            Err(Error::InvalidParameter("function does not vanish on the boundary".into()))
        }
        Mode::Closed if !split => Err(Error::InvalidParameter("function is not split".into())),
        _ => Ok(split),
    }
}

/// f − t with t the midpoint of the interval of L¹ balance points, which
/// makes the result split.
pub fn shift_to_split(g: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    let (lo, hi) = l1_balance_interval(g, f);
    let t = 0.5 * (lo + hi);
    f.iter().map(|x| x - t).collect()
}

/// f minus its V-mean.
pub fn shift_to_mean_zero(g: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    let mean = integral_vertex(g, f) / g.total_measure();
    f.iter().map(|x| x - mean).collect()
}

/// I‖F(φ)‖_{ν'} ≤ ρ_sup^{1/p'}‖∇φ‖_p‖F'(φ)‖_{p'} for F(x) = |x|^{r−1}x.
/// Both sides are r-homogeneous, so they are evaluated on φ/‖φ‖_∞ to keep
/// large powers finite.
pub fn general_f_check(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64], r: f64, p: f64) -> Result<InequalityCheck> {
    let pc = conjugate(p);
    // (F')^{p'} ∝ |x|^{(r−1)p'} is convex iff r = 1 or (r−1)p' ≥ 1.
    if !(r >= 1.0) || (r > 1.0 && pc.is_finite() && (r - 1.0) * pc < 1.0) {
        return Err(Error::BadExponent(r));
    }
    crate::fnspace::check_exponent(p)?;
    let split = require_hypothesis(g, ctx, f)?;
    let nuc = conjugate(ctx.nu);
    let sup = lp_norm_vertex(g, f, f64::INFINITY)?;
    let unit: Vec<f64> = f.iter().map(|x| if sup > 0.0 { x / sup } else { 0.0 }).collect();
    let big_f: Vec<f64> = unit.iter().map(|x| x.abs().powf(r)).collect();
    let deriv: Vec<f64> = unit.iter().map(|x| r * x.abs().powf(r - 1.0)).collect();
    let lhs = ctx.rho_sup.powf(recip(pc)) * grad_lp_norm(g, &unit, p)? * lp_norm_vertex(g, &deriv, pc)?;
    let rhs = scaled(ctx.iso, lp_norm_vertex(g, &big_f, nuc)?);
    Ok(finish("general_f", lhs, rhs, ctx, Some(p), split, f))
}

/// c_{ν,p} = I ρ_sup^{−(p−1)/p}(ν−p)/[p(ν−1)].
pub fn sobolev_constant(iso: f64, rho_sup: f64, nu: f64, p: f64) -> f64 {
    iso * rho_sup.powf(-(p - 1.0) / p) * (nu - p) / (p * (nu - 1.0))
}

/// ‖∇f‖_p ≥ c_{ν,p}‖f‖_{pν/(ν−p)} for ν > p ≥ 1.
pub fn sobolev_check(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64], p: f64) -> Result<InequalityCheck> {
    if !(p >= 1.0 && ctx.nu > p && ctx.nu.is_finite()) {
        return Err(Error::BadExponent(p));
    }
    let split = require_hypothesis(g, ctx, f)?;
    let q = p * ctx.nu / (ctx.nu - p);
    let c = sobolev_constant(ctx.iso, ctx.rho_sup, ctx.nu, p);
    let lhs = grad_lp_norm(g, f, p)?;
    let rhs = scaled(c, lp_norm_vertex(g, f, q)?);
    Ok(finish("sobolev", lhs, rhs, ctx, Some(p), split, f))
}

/// ‖∇f‖₂ ≥ (I ρ_sup^{−1/2}/2)‖f‖₂^{1+2/ν}‖f‖₁^{−2/ν}; closed mode accepts
/// mean-zero or split f.
pub fn nash_check(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64]) -> Result<InequalityCheck> {
    if !(ctx.nu > 2.0) {
        return Err(Error::BadExponent(ctx.nu));
    }
    check_len(g, f)?;
    let split = is_split(g, f);
    match ctx.mode {
        Mode::Dirichlet if !is_dirichlet(g, f) => {
            return Err(Error::InvalidParameter("function does not vanish on the boundary".into()))
        }
        Mode::Closed => {
            let l1 = lp_norm_vertex(g, f, 1.0)?;
            if !split && integral_vertex(g, f).abs() > 1e-12 * l1.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidParameter("function is neither mean-zero nor split".into()));
            }
        }
        _ => {}
    }
    let (l1, l2) = (lp_norm_vertex(g, f, 1.0)?, lp_norm_vertex(g, f, 2.0)?);
    let c = ctx.iso / ctx.rho_sup.sqrt() / 2.0;
    let e = 2.0 / ctx.nu;
    let lhs = grad_lp_norm(g, f, 2.0)?;
    let rhs = if l1 == 0.0 { 0.0 } else { scaled(c, l2.powf(1.0 + e) * l1.powf(-e)) };
    Ok(finish("nash", lhs, rhs, ctx, Some(2.0), split, f))
}

/// 32ρ_sup φ(4‖f‖₁²/‖f‖₂²)²‖∇f‖₂² ≥ ‖f‖₂² for a profile φ satisfying
/// A(∂Ω) ≥ V(Ω)/φ(V(Ω)) on admissible sets.
pub fn gennash_check_with(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64], phi: &dyn Fn(f64) -> f64) -> Result<InequalityCheck> {
    if ctx.mode != Mode::Dirichlet {
        return Err(Error::InvalidParameter("the generalised Nash form is stated for Dirichlet functions".into()));
    }
    let split = require_hypothesis(g, ctx, f)?;
    let (l1, l2) = (lp_norm_vertex(g, f, 1.0)?, lp_norm_vertex(g, f, 2.0)?);
    let rhs = l2 * l2;
    let lhs = if l2 == 0.0 {
        0.0
    } else {
        let ph = phi(4.0 * l1 * l1 / (l2 * l2));
        32.0 * ctx.rho_sup * ph * ph * grad_lp_norm(g, f, 2.0)?.powi(2)
    };
    Ok(finish("gennash", lhs, rhs, ctx, Some(2.0), split, f))
}

/// The generalised Nash form with φ(x) = x^{1/ν}/I_ν, whose hypothesis is the
/// definition of I_ν.
pub fn gennash_check(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64]) -> Result<InequalityCheck> {
    let (nu, iso) = (ctx.nu, ctx.iso);
    gennash_check_with(g, ctx, f, &move |x: f64| x.powf(recip(nu)) / iso)
}

/// Which measure the Trudinger exponential is integrated against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrudingerMeasure {
    Vertex,
    Edge,
}

/// ∫(exp(γφ̃))^{ν'} ≤ V(G)(1−γ)^{−ν'} with φ̃ = φ I ρ_sup^{−1/ν'}/‖∇φ‖_ν,
/// for 0 ≤ γ < 1.
pub fn trudinger_check(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64], gamma: f64, measure: TrudingerMeasure) -> Result<InequalityCheck> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    if !(ctx.nu > 1.0) {
        return Err(Error::BadExponent(ctx.nu));
    }
    let split = require_hypothesis(g, ctx, f)?;
    let nuc = conjugate(ctx.nu);
    let grad = grad_lp_norm(g, f, ctx.nu)?;
    let scale = if grad == 0.0 { 0.0 } else { ctx.iso * ctx.rho_sup.powf(-recip(nuc)) / grad };
    let k = gamma * nuc;
    let tilde: Vec<f64> = f.iter().map(|x| x * scale).collect();
    let integral: f64 = match measure {
        TrudingerMeasure::Vertex => g
            .vertices()
            .iter()
            .zip(&tilde)
            .map(|(v, x)| v.measure * (k * x).exp())
            .sum(),
        TrudingerMeasure::Edge => g
            .edges()
            .iter()
            .map(|e| {
                let (b, d) = (tilde[e.u], tilde[e.v] - tilde[e.u]);
                let kd = k * d;
                let mean = if kd == 0.0 { (k * b).exp() } else { (k * b).exp() * kd.exp_m1() / kd };
                e.measure() * mean
            })
            .sum(),
    };
    let bound = ctx.total_measure * (1.0 - gamma).powf(-nuc);
    let name = match measure {
        TrudingerMeasure::Vertex => "trudinger",
        TrudingerMeasure::Edge => "trudinger_edge",
    };
    Ok(finish(name, bound, integral, ctx, Some(ctx.nu), split, f))
}

fn delta_of(p: f64, nu: f64) -> Result<(f64, f64, f64)> {
    let (pc, nuc) = (conjugate(p), conjugate(nu));
    let delta = nuc / pc;
    if !(p > nu && nu > 1.0 && delta > 1.0 && delta.is_finite()) {
        return Err(Error::BadExponent(nu));
    }
    Ok((pc, nuc, delta))
}

/// ln γ_i with γ_i = 1 + δ + ⋯ + δ^{i+1} = (δ^{i+2} − 1)/(δ − 1).
fn ln_gamma_i(delta: f64, i: usize) -> f64 {
    let x = (i as f64 + 2.0) * delta.ln();
    x + (-(-x).exp_m1()).ln() - (delta - 1.0).ln()
}

/// (c₁, c₂) with c₁ = γ₀γ₁^{1/δ}γ₂^{1/δ²}⋯ summed over the first `terms`
/// factors, c₂ = p'(ν'−p')/ν'², δ = ν'/p'.
pub fn iteration_constant_truncated(p: f64, nu: f64, terms: usize) -> Result<(f64, f64)> {
    let (pc, nuc, delta) = delta_of(p, nu)?;
    let ln_c1: f64 = (0..terms).map(|i| delta.powi(-(i as i32)) * ln_gamma_i(delta, i)).sum();
    Ok((ln_c1.exp(), pc * (nuc - pc) / (nuc * nuc)))
}

/// (c₁, c₂) with the product truncated once the remaining tail of ln c₁ is
/// below 1e-14.
pub fn iteration_constant(p: f64, nu: f64) -> Result<(f64, f64)> {
    let (pc, nuc, delta) = delta_of(p, nu)?;
    let ratio = 1.0 / delta;
    let peak = (2.0 / delta.ln()).ceil() as usize;
    let mut ln_c1 = 0.0;
    let mut weight = 1.0;
    for i in 0..50_000_000usize {
        let term = weight * ln_gamma_i(delta, i);
        ln_c1 += term;
        // Past the peak the terms decay at least geometrically with ratio
        // (i+3)/(i+2)/δ, so the tail is below term·q/(1−q).
        if i > peak {
            let q = ratio * (i as f64 + 3.0) / (i as f64 + 2.0);
            if q < 1.0 && term * q / (1.0 - q) < 1e-14 {
                return Ok((ln_c1.exp(), pc * (nuc - pc) / (nuc * nuc)));
            }
        }
        weight *= ratio;
    }
    Err(Error::Divergent("iteration constant did not converge".into()))
}

/// c*_{ν,p} = c₁^{−c₂}; equals 1 at ν = 1.
pub fn sup_embedding_constant(p: f64, nu: f64) -> Result<f64> {
    if nu == 1.0 && p > 1.0 {
        return Ok(1.0);
    }
    let (c1, c2) = iteration_constant(p, nu)?;
    Ok((-c2 * c1.ln()).exp())
}

/// ‖∇φ‖_p ≥ c*_{ν,p} V(G)^{1/p−1/ν} I ρ_sup^{−1/p'} ‖φ‖_∞ for p > ν ≥ 1.
pub fn sup_embedding_check(g: &WeightedGraph, ctx: &InequalityContext, f: &[f64], p: f64) -> Result<InequalityCheck> {
    let cstar = sup_embedding_constant(p, ctx.nu)?;
    let split = require_hypothesis(g, ctx, f)?;
    let pc = conjugate(p);
    let c = cstar * ctx.total_measure.powf(recip(p) - recip(ctx.nu)) * ctx.iso * ctx.rho_sup.powf(-recip(pc));
    let lhs = grad_lp_norm(g, f, p)?;
    let rhs = scaled(c, lp_norm_vertex(g, f, f64::INFINITY)?);
    Ok(finish("sup_embedding", lhs, rhs, ctx, Some(p), split, f))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessRow {
    pub nu: f64,
    pub m: usize,
    /// ‖∇f_m‖_p / ‖f_m‖_{pν/(ν−p)}.
    pub quotient: f64,
    /// quotient / (I_ν ρ_sup^{−1/p'}), an upper bound for c*_{ν,p}.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalRow {
    pub m: usize,
    /// ‖∇f_m‖_p / ‖f_m‖_∞ at ν = p.
    pub quotient: f64,
    /// quotient^p · (ln m)^{p−1}, which stays of order one.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessReport {
    pub n: usize,
    pub p: f64,
    pub rows: Vec<SharpnessRow>,
    /// (ν, I_ν) of each radial graph used.
    pub iso: Vec<(f64, f64)>,
    /// max over ν of min_m normalized · (ν−p)^{1−1/p}: the smallest C with
    /// c* ≤ C(ν−p)^{1/p−1} certified by the log functions.
    pub fitted_c: f64,
    /// max over ν of min_m normalized · (ν−p)^{1/p−1}: the smallest C with
    /// c* ≤ C(ν−p)^{1−1/p}.
    pub fitted_c_vanishing: f64,
    pub critical: Vec<CriticalRow>,
    /// Every critical row has scaled value in [1/2, 2].
    pub critical_within_factor_two: bool,
    /// For each ν the quotient decreases over the upper half of the m grid.
    pub monotone_tail: bool,
}

/// Sobolev quotients of f_m(i) = log(m/i) on radial graphs G_{n,ν} for ν
/// approaching p, plus the critical case ν = p against ‖f_m‖_∞.
pub fn sharpness_experiment(n: usize, p: f64, nu_grid: &[f64], m_grid: &[usize]) -> Result<SharpnessReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::BadExponent(p));
    }
    if let Some(&m) = m_grid.iter().find(|&&m| m > n || m < 2) {
        return Err(Error::InvalidParameter(format!("m = {m} outside 2..={n}")));
    }
    if nu_grid.iter().any(|&nu| !(nu > p)) {
        return Err(Error::InvalidParameter("every ν must exceed p".into()));
    }
    let pc = conjugate(p);
    let mut rows = Vec::new();
    let mut iso_list = Vec::new();
    let mut fitted_c: f64 = 0.0;
    let mut fitted_c_vanishing: f64 = 0.0;
    let mut monotone_tail = true;
    for &nu in nu_grid {
        let g = radial_graph(n, nu)?;
        let iso = iso_constant(&g, nu, Variant::Open, EnumOptions::forced())?.value;
        iso_list.push((nu, iso));
        let norm = iso * half_degrees(&g).rho_sup.powf(-recip(pc));
        let q = p * nu / (nu - p);
        let mut best = f64::INFINITY;
        let mut quotients = Vec::new();
        for &m in m_grid {
            let f = log_test_function(&g, m)?;
            let quotient = grad_lp_norm(&g, &f, p)? / lp_norm_vertex(&g, &f, q)?;
            best = best.min(quotient / norm);
            quotients.push(quotient);
            rows.push(SharpnessRow {
                nu,
                m,
                quotient,
                normalized: quotient / norm,
            });
        }
        let gap = nu - p;
        fitted_c = fitted_c.max(best * gap.powf(1.0 - recip(p)));
        fitted_c_vanishing = fitted_c_vanishing.max(best * gap.powf(recip(p) - 1.0));
        let tail = &quotients[quotients.len() / 2..];
        monotone_tail &= tail.windows(2).all(|w| w[1] <= w[0]);
    }
    let g = radial_graph(n, p)?;
    let mut critical = Vec::new();
    for &m in m_grid {
        let f = log_test_function(&g, m)?;
        let quotient = grad_lp_norm(&g, &f, p)? / lp_norm_vertex(&g, &f, f64::INFINITY)?;
        critical.push(CriticalRow {
            m,
            quotient,
            scaled: quotient.powf(p) * (m as f64).ln().powf(p - 1.0),
        });
    }
    let critical_within_factor_two = critical.iter().all(|r| (0.5..=2.0).contains(&r.scaled));
    Ok(SharpnessReport {
        n,
        p,
        rows,
        iso: iso_list,
        fitted_c,
        fitted_c_vanishing,
        critical,
        critical_within_factor_two,
        monotone_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, dirichlet_path, doubled_radial};

    fn ctx(g: &WeightedGraph, nu: f64, mode: Mode) -> InequalityContext {
        InequalityContext::new(g, nu, mode, EnumOptions::default()).unwrap()
    }

    #[test]
    fn general_f_with_identity_is_federer_fleming() {
        let g = dirichlet_path(6).unwrap();
        let c = ctx(&g, 3.0, Mode::Dirichlet);
        let f = [0.0, 1.0, -2.0, 0.5, 3.0, 0.0];
        let chk = general_f_check(&g, &c, &f, 1.0, 1.0).unwrap();
        // Reported on f/‖f‖_∞ = f/3.
        let grad = grad_lp_norm(&g, &f, 1.0).unwrap();
        assert!((3.0 * chk.lhs - grad).abs() < 1e-12 && chk.passed);
        let nuc = conjugate(3.0);
        assert!((3.0 * chk.rhs - c.iso * lp_norm_vertex(&g, &f, nuc).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn general_f_on_split_function_over_six_cycle() {
        let g = cycle(6).unwrap();
        let c = ctx(&g, 4.0, Mode::Closed);
        let f = shift_to_split(&g, &[0.3, 1.7, -0.2, 2.5, 0.9, -1.1]);
        assert!(general_f_check(&g, &c, &f, 2.0, 2.0).unwrap().passed);
        assert!(general_f_check(&g, &c, &f, 0.5, 2.0).is_err());
        assert!(general_f_check(&g, &c, &f, 1.2, 2.0).is_err());
    }

    #[test]
    fn sobolev_power_reproduces_general_f() {
        let g = dirichlet_path(7).unwrap();
        let (nu, p) = (3.0, 1.5);
        let c = ctx(&g, nu, Mode::Dirichlet);
        let f = [0.0, 0.4, 1.0, 1.3, 0.2, -0.7, 0.0];
        let r = p * (nu - 1.0) / (nu - p);
        assert!(general_f_check(&g, &c, &f, r, p).unwrap().passed);
        assert!(sobolev_check(&g, &c, &f, p).unwrap().passed);
    }

    #[test]
    fn sobolev_at_p_one_is_federer_fleming_at_nu_two() {
        let g = dirichlet_path(3).unwrap();
        let c = ctx(&g, 2.0, Mode::Dirichlet);
        assert!((sobolev_constant(c.iso, c.rho_sup, 2.0, 1.0) - c.iso).abs() < 1e-15);
        let f = [0.0, 1.0, 0.0];
        let chk = sobolev_check(&g, &c, &f, 1.0).unwrap();
        assert!(chk.passed);
        assert!((chk.rhs - c.iso * lp_norm_vertex(&g, &f, 2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn nash_on_mean_zero_cycle_function() {
        let g = cycle(6).unwrap();
        let c = ctx(&g, 3.0, Mode::Closed);
        let f = shift_to_mean_zero(&g, &[1.0, 4.0, 2.0, -1.0, 0.0, 3.0]);
        assert!(nash_check(&g, &c, &f).unwrap().passed);
        assert!(nash_check(&g, &c, &[1.0; 6]).is_err());
    }

    #[test]
    fn gennash_follows_from_the_power_profile() {
        let g = dirichlet_path(8).unwrap();
        let c = ctx(&g, 3.0, Mode::Dirichlet);
        let f = [0.0, 0.2, 1.0, 0.7, -0.4, 2.0, 0.1, 0.0];
        assert!(gennash_check(&g, &c, &f).unwrap().passed);
        assert!(nash_check(&g, &c, &f).unwrap().passed);
    }

    #[test]
    fn trudinger_at_zero_gamma_is_an_equality() {
        let g = cycle(6).unwrap().with_measures(&[1.0, 0.5, 2.0, 1.5, 1.0, 0.25]).unwrap();
        let c = ctx(&g, 3.0, Mode::Closed);
        let f = shift_to_split(&g, &[0.3, 1.7, -0.2, 2.5, 0.9, -1.1]);
        let chk = trudinger_check(&g, &c, &f, 0.0, TrudingerMeasure::Vertex).unwrap();
        assert_eq!(chk.lhs, chk.rhs);
        assert_eq!(chk.lhs, g.total_measure());
        for gamma in [0.1, 0.5, 0.9, 0.99] {
            assert!(trudinger_check(&g, &c, &f, gamma, TrudingerMeasure::Vertex).unwrap().passed);
        }
        let edge = trudinger_check(&g, &c, &f, 0.0, TrudingerMeasure::Edge).unwrap();
        assert!((edge.rhs - g.total_edge_measure()).abs() < 1e-12);
    }

    #[test]
    fn iteration_constant_examples() {
        let (_, c2) = iteration_constant(2.0, 1.5).unwrap();
        assert!((c2 - 2.0 / 9.0).abs() < 1e-15);
        // δ = 2: p' = 2, ν' = 4 (p = 2, ν = 4/3).
        let (a, _) = iteration_constant_truncated(2.0, 4.0 / 3.0, 64).unwrap();
        let (b, _) = iteration_constant_truncated(2.0, 4.0 / 3.0, 128).unwrap();
        let (c, _) = iteration_constant(2.0, 4.0 / 3.0).unwrap();
        assert!((a - b).abs() <= 1e-12 * b && (b - c).abs() <= 1e-12 * c);
        assert!(iteration_constant(2.0, 3.0).is_err());
        assert_eq!(sup_embedding_constant(3.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn sup_embedding_on_doubled_radial() {
        let (g, _) = doubled_radial(5, 1.5).unwrap();
        let c = ctx(&g, 1.5, Mode::Closed);
        let f = log_test_function(&g, 4).unwrap();
        assert!(is_split(&g, &f));
        for p in [2.0, 3.0, f64::INFINITY] {
            assert!(sup_embedding_check(&g, &c, &f, p).unwrap().passed);
        }
    }

    #[test]
    fn critical_log_quotient_decays_like_inverse_log() {
        let r = sharpness_experiment(64, 2.0, &[2.5], &[4, 8, 16, 32, 64]).unwrap();
        assert!(r.critical_within_factor_two, "{:?}", r.critical);
        assert!(r.critical.windows(2).all(|w| w[1].quotient < w[0].quotient));
    }
}
