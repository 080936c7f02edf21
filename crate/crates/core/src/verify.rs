//! Randomised verification suites over one graph: exact identities, the
//! co-area formula, Federer-Fleming, and the gradient inequalities. Trials are
//! independent, run in parallel, and are reproducible from the seed alone.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fnspace::{
    balance_point, coarea, conjugate, grad_lp_norm, integral_edge, integral_vertex, is_dirichlet, lp_norm_edge,
    lp_norm_vertex,
};
use crate::graph::{half_degrees, WeightedGraph};
use crate::isoperimetry::{characteristic_approx, iso_constant, sobolev_quotient, EnumOptions, Variant};
use crate::operators::{adjacency_form, degree_form, gradient, green_residual, inner_vertex, laplacian_apply, EdgeField, Mode};
use crate::sobolev::{
    gennash_check, general_f_check, nash_check, shift_to_mean_zero, shift_to_split, sobolev_check, sup_embedding_check,
    trudinger_check, InequalityCheck, InequalityContext, TrudingerMeasure, CHECK_TOL,
};

/// Tolerance for identities, relative to max(1, magnitude of the terms).
pub const IDENTITY_TOL: f64 = 1e-12;
/// Distance allowed between a characteristic approximant's quotient and I_ν.
pub const APPROXIMANT_TOL: f64 = 1e-6;
/// Ramp width of the characteristic approximants.
pub const APPROXIMANT_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Coarea,
    Ff,
    Green,
    Sobolev,
    Nash,
    Trudinger,
    Gennash,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Coarea,
        Suite::Ff,
        Suite::Green,
        Suite::Sobolev,
        Suite::Nash,
        Suite::Trudinger,
        Suite::Gennash,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Coarea => "coarea",
            Suite::Ff => "ff",
            Suite::Green => "green",
            Suite::Sobolev => "sobolev",
            Suite::Nash => "nash",
            Suite::Trudinger => "trudinger",
            Suite::Gennash => "gennash",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Dimension ν for the isoperimetric constant.
    pub nu: f64,
    pub enumeration: EnumOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            nu: 3.0,
            enumeration: EnumOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// `worst` is the largest relative residual; fails above the tolerance.
    Identity,
    /// `worst` is the smallest (lhs − rhs)/max(1, |rhs|); fails below −tolerance.
    Inequality,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteCheck {
    pub name: String,
    pub kind: CheckKind,
    pub evaluated: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureWitness {
    pub trial: usize,
    pub check: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub mode: Mode,
    pub nu: f64,
    pub iso: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
    pub first_failure: Option<FailureWitness>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn evaluated(&self) -> usize {
        self.checks.iter().map(|c| c.evaluated).sum()
    }
}

/// One evaluated check inside one trial.
struct Outcome {
    name: &'static str,
    kind: CheckKind,
    value: f64,
    tolerance: f64,
    values: Vec<f64>,
}

impl Outcome {
    fn identity(name: &'static str, residual: f64, scale: f64, f: &[f64]) -> Self {
        Self {
            name,
            kind: CheckKind::Identity,
            value: residual.abs() / scale.abs().max(1.0),
            tolerance: IDENTITY_TOL,
            values: f.to_vec(),
        }
    }

    fn inequality(c: &InequalityCheck, f: &[f64]) -> Self {
        Self::margin(c.name, c.lhs, c.rhs, f)
    }

    fn margin(name: &'static str, lhs: f64, rhs: f64, f: &[f64]) -> Self {
        let value = if lhs == rhs { 0.0 } else { (lhs - rhs) / rhs.abs().max(1.0) };
        Self {
            name,
            kind: CheckKind::Inequality,
            value,
            tolerance: CHECK_TOL,
            values: f.to_vec(),
        }
    }

    fn failed(&self) -> bool {
        match self.kind {
            CheckKind::Identity => !(self.value <= self.tolerance),
            CheckKind::Inequality => !(self.value >= -self.tolerance),
        }
    }
}

/// Random vertex values mixing several shapes (signed, nonnegative, small
/// integers with ties, sparse heavy-tailed); zero on the boundary when
/// `dirichlet`, and never identically zero on the interior.
pub fn random_function(g: &WeightedGraph, rng: &mut impl Rng, dirichlet: bool) -> Vec<f64> {
    let style = rng.gen_range(0..4);
    let mut f: Vec<f64> = (0..g.n())
        .map(|_| match style {
            0 => rng.gen_range(-1.0..1.0),
            1 => rng.gen_range(0.0..1.0),
            2 => rng.gen_range(-2i32..=2) as f64,
            _ => {
                if rng.gen_bool(0.5) {
                    0.0
                } else {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    sign * rng.gen_range(-3.0f64..3.0).exp()
                }
            }
        })
        .collect();
    if dirichlet {
        for v in g.boundary() {
            f[v] = 0.0;
        }
    }
    let interior = g.interior();
    if !interior.is_empty() && interior.iter().all(|&v| f[v] == 0.0) {
        f[interior[rng.gen_range(0..interior.len())]] = 1.0;
    }
    f
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn mode_of(g: &WeightedGraph) -> Mode {
    if g.is_closed() {
        Mode::Closed
    } else {
        Mode::Dirichlet
    }
}

fn is_nonzero(f: &[f64]) -> bool {
    f.iter().any(|&x| x != 0.0)
}

struct Setup<'a> {
    g: &'a WeightedGraph,
    mode: Mode,
    ctx: Option<InequalityContext>,
    /// Ĩ'_ν, used by the unrestricted closed Federer-Fleming form.
    iso_prime: Option<f64>,
    loop_free: bool,
    /// Used in place of random functions when present.
    fixed: Option<&'a [f64]>,
}

impl Setup<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, dirichlet: bool) -> Vec<f64> {
        match self.fixed {
            Some(f) => f.to_vec(),
            None => random_function(self.g, rng, dirichlet),
        }
    }

    fn ctx(&self) -> &InequalityContext {
        self.ctx.as_ref().expect("suite needs an isoperimetric context")
    }

    /// A random function satisfying the hypothesis of the current mode.
    fn admissible(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self.mode {
            Mode::Dirichlet => self.draw(rng, true),
            Mode::Closed => shift_to_split(self.g, &self.draw(rng, false)),
        }
    }
}

fn coarea_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let f = s.draw(rng, false);
    let grad = grad_lp_norm(s.g, &f, 1.0)?;
    out.push(Outcome::identity("coarea", coarea(s.g, &f).integral() - grad, grad, &f));
    Ok(())
}

fn green_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let g = s.g;
    let f = s.draw(rng, true);
    let h = s.draw(rng, true);
    let x = EdgeField {
        values: g.edges().iter().map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    let div_scale: f64 = g
        .edges()
        .iter()
        .zip(&x.values)
        .map(|(e, xe)| e.weight * (xe * (h[e.u].abs() + h[e.v].abs())).abs())
        .sum();
    out.push(Outcome::identity("green", green_residual(g, &x, &h), div_scale, &h));

    let (lf, lh) = (laplacian_apply(g, &f), laplacian_apply(g, &h));
    let a = inner_vertex(g, &lf, &h);
    let b = inner_vertex(g, &f, &lh);
    out.push(Outcome::identity("laplacian_symmetric", a - b, a.abs().max(b.abs()), &f));

    let energy = grad_lp_norm(g, &f, 2.0)?.powi(2);
    let form = inner_vertex(g, &lf, &f);
    out.push(Outcome::identity("laplacian_positive", form - energy, energy, &f));

    let (af, df) = (adjacency_form(g, &f), degree_form(g, &f));
    out.push(Outcome::margin("adjacency_bound", df, af.abs(), &f));

    if s.loop_free {
        let rho = half_degrees(g).rho;
        let weighted: Vec<f64> = f.iter().zip(&rho).map(|(x, r)| x * r).collect();
        let rhs = integral_vertex(g, &weighted);
        let lhs = integral_edge(g, &f);
        out.push(Outcome::identity("edge_integral", lhs - rhs, lhs.abs().max(rhs.abs()), &f));

        let sq: Vec<f64> = weighted.iter().zip(&f).map(|(w, x)| w * x).collect();
        let rho_f2 = integral_vertex(g, &sq);
        if g.has_unit_lengths() {
            let lhs = lp_norm_edge(g, &f, 2.0)?.powi(2) + energy / 6.0;
            out.push(Outcome::identity("mohar", lhs - rho_f2, rho_f2, &f));
        }
        let rho_sup = half_degrees(g).rho_sup;
        for p in [1.0, 2.0, 3.5] {
            let lhs = rho_sup.powf(1.0 / p) * lp_norm_vertex(g, &f, p)?;
            out.push(Outcome::margin("edge_norm_bound", lhs, lp_norm_edge(g, &f, p)?, &f));
        }
    }
    // Green's identity with the gradient field reproduces the Laplacian pairing.
    let grad = gradient(g, &f);
    out.push(Outcome::identity("green_gradient", green_residual(g, &grad, &h), energy.max(1.0), &h));
    Ok(())
}

fn ff_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let g = s.g;
    let ctx = s.ctx();
    let nuc = conjugate(ctx.nu);
    match s.mode {
        Mode::Dirichlet => {
            let f = s.draw(rng, true);
            out.push(Outcome::margin("federer_fleming", sobolev_quotient(g, &f, ctx.nu)?, ctx.iso, &f));
        }
        Mode::Closed => {
            let raw = s.draw(rng, false);
            let f = shift_to_split(g, &raw);
            if is_nonzero(&f) {
                let lhs = grad_lp_norm(g, &f, 1.0)?;
                let rhs = ctx.iso * lp_norm_vertex(g, &f, nuc)?;
                out.push(Outcome::margin("federer_fleming_split", lhs, rhs, &f));
            }
            let iso_prime = s.iso_prime.expect("closed ff needs the primed constant");
            let shift = if nuc == 1.0 {
                let (lo, hi) = crate::fnspace::l1_balance_interval(g, &raw);
                0.5 * (lo + hi)
            } else {
                balance_point(g, &raw, nuc)?
            };
            let shifted: Vec<f64> = raw.iter().map(|x| x - shift).collect();
            let lhs = grad_lp_norm(g, &raw, 1.0)?;
            let rhs = iso_prime * lp_norm_vertex(g, &shifted, nuc)?;
            out.push(Outcome::margin("federer_fleming_balanced", lhs, rhs, &raw));
        }
    }
    Ok(())
}

fn sobolev_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let (g, ctx) = (s.g, s.ctx());
    let f = s.admissible(rng);
    if !is_nonzero(&f) {
        return Ok(());
    }
    let nu = ctx.nu;
    if nu > 1.0 && nu.is_finite() {
        let p = rng.gen_range(1.0..nu);
        out.push(Outcome::inequality(&sobolev_check(g, ctx, &f, p)?, &f));
        let r = p * (nu - 1.0) / (nu - p);
        out.push(Outcome::inequality(&general_f_check(g, ctx, &f, r, p)?, &f));
    }
    // A convex power of the general F-inequality at a random p.
    let p = rng.gen_range(1.0..4.0);
    let pc = conjugate(p);
    let r = if rng.gen_bool(0.25) { 1.0 } else { 1.0 + 1.0 / pc + rng.gen_range(0.0..2.0) };
    out.push(Outcome::inequality(&general_f_check(g, ctx, &f, r, p)?, &f));
    if nu < 8.0 {
        let p = if rng.gen_bool(0.1) { f64::INFINITY } else { nu + rng.gen_range(0.05..4.0) };
        out.push(Outcome::inequality(&sup_embedding_check(g, ctx, &f, p)?, &f));
    }
    Ok(())
}

fn nash_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let (g, ctx) = (s.g, s.ctx());
    match s.mode {
        Mode::Dirichlet => {
            let f = s.draw(rng, true);
            out.push(Outcome::inequality(&nash_check(g, ctx, &f)?, &f));
        }
        Mode::Closed => {
            let raw = s.draw(rng, false);
            for f in [shift_to_mean_zero(g, &raw), shift_to_split(g, &raw)] {
                if is_nonzero(&f) {
                    out.push(Outcome::inequality(&nash_check(g, ctx, &f)?, &f));
                }
            }
        }
    }
    Ok(())
}

fn trudinger_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let (g, ctx) = (s.g, s.ctx());
    let f = s.admissible(rng);
    let at_zero = trudinger_check(g, ctx, &f, 0.0, TrudingerMeasure::Vertex)?;
    // Must be an exact equality, so any nonzero difference is a failure.
    out.push(Outcome {
        name: "trudinger_zero",
        kind: CheckKind::Identity,
        value: (at_zero.lhs - at_zero.rhs).abs(),
        tolerance: 0.0,
        values: f.clone(),
    });
    let gamma = if rng.gen_bool(0.2) { 1.0 - rng.gen_range(1e-6..1e-2) } else { rng.gen_range(0.0..1.0) };
    out.push(Outcome::inequality(&trudinger_check(g, ctx, &f, gamma, TrudingerMeasure::Vertex)?, &f));
    Ok(())
}

fn gennash_trial(s: &Setup, rng: &mut ChaCha8Rng, out: &mut Vec<Outcome>) -> Result<()> {
    let (g, ctx) = (s.g, s.ctx());
    let f = s.draw(rng, true);
    out.push(Outcome::inequality(&gennash_check(g, ctx, &f)?, &f));
    if ctx.nu > 2.0 {
        out.push(Outcome::inequality(&nash_check(g, ctx, &f)?, &f));
    }
    Ok(())
}

/// Runs `opts.trials` random trials of `suite` on `g`. Graphs with boundary
/// use Dirichlet functions and I_ν; closed graphs use split (or mean-zero)
/// functions and Ĩ_ν.
pub fn run_suite(g: &WeightedGraph, suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    run_suite_on(g, suite, opts, None)
}

/// As [`run_suite`], but every trial uses `function` (shifted as the mode
/// requires) while the auxiliary parameters stay random.
pub fn run_suite_on(g: &WeightedGraph, suite: Suite, opts: &VerifyOptions, function: Option<&[f64]>) -> Result<SuiteReport> {
    if let Some(f) = function {
        if f.len() != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                got: f.len(),
            });
        }
    }
    let mode = mode_of(g);
    if let Some(f) = function {
        if mode == Mode::Dirichlet && suite != Suite::Coarea && !is_dirichlet(g, f) {
            return Err(Error::InvalidParameter("function does not vanish on the boundary".into()));
        }
    }
    if mode == Mode::Dirichlet && g.interior().is_empty() {
        return Err(Error::EmptyInterior);
    }
    match suite {
        Suite::Nash if !(opts.nu > 2.0) => return Err(Error::BadExponent(opts.nu)),
        Suite::Trudinger if !(opts.nu > 1.0) => return Err(Error::BadExponent(opts.nu)),
        Suite::Gennash if mode == Mode::Closed => {
            return Err(Error::InvalidParameter("gennash needs a graph with boundary".into()))
        }
        _ => {}
    }
    let needs_iso = !matches!(suite, Suite::Coarea | Suite::Green);
    let ctx = if needs_iso {
        Some(InequalityContext::new(g, opts.nu, mode, opts.enumeration)?)
    } else {
        None
    };
    let iso_prime = if suite == Suite::Ff && mode == Mode::Closed {
        Some(iso_constant(g, opts.nu, Variant::TildePrime, opts.enumeration)?.value)
    } else {
        None
    };
    let setup = Setup {
        g,
        mode,
        ctx,
        iso_prime,
        loop_free: g.edges().iter().all(|e| !e.is_loop()),
        fixed: function,
    };
    let trial_fn = match suite {
        Suite::Coarea => coarea_trial,
        Suite::Ff => ff_trial,
        Suite::Green => green_trial,
        Suite::Sobolev => sobolev_trial,
        Suite::Nash => nash_trial,
        Suite::Trudinger => trudinger_trial,
        Suite::Gennash => gennash_trial,
    };
    let per_trial: Vec<Vec<Outcome>> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(opts.seed, trial);
            let mut out = Vec::new();
            trial_fn(&setup, &mut rng, &mut out).map(|()| out)
        })
        .collect::<Result<_>>()?;

    let mut checks: Vec<SuiteCheck> = Vec::new();
    let mut first_failure = None;
    let mut record = |trial: usize, o: &Outcome| {
        let idx = match checks.iter().position(|c| c.name == o.name) {
            Some(i) => i,
            None => {
                checks.push(SuiteCheck {
                    name: o.name.to_string(),
                    kind: o.kind,
                    evaluated: 0,
                    failures: 0,
                    worst: match o.kind {
                        CheckKind::Identity => 0.0,
                        CheckKind::Inequality => f64::INFINITY,
                    },
                    tolerance: o.tolerance,
                });
                checks.len() - 1
            }
        };
        let c = &mut checks[idx];
        c.evaluated += 1;
        c.worst = match o.kind {
            CheckKind::Identity => c.worst.max(o.value),
            CheckKind::Inequality => c.worst.min(o.value),
        };
        if o.failed() {
            c.failures += 1;
            if first_failure.is_none() {
                first_failure = Some(FailureWitness {
                    trial,
                    check: o.name.to_string(),
                    values: o.values.clone(),
                });
            }
        }
    };
    for (trial, outs) in per_trial.iter().enumerate() {
        for o in outs {
            record(trial, o);
        }
    }
    if suite == Suite::Ff && mode == Mode::Dirichlet {
        // The witness set's characteristic approximant nearly attains I_ν.
        let ctx = setup.ctx();
        let report = iso_constant(g, opts.nu, Variant::Open, opts.enumeration)?;
        if let Some(w) = report.witness {
            let (h, f) = characteristic_approx(g, &w.vertices, APPROXIMANT_EPS)?;
            let s = sobolev_quotient(&h, &f, ctx.nu)?;
            let gap = (s - ctx.iso).abs();
            let o = Outcome {
                name: "approximant_attains",
                kind: CheckKind::Identity,
                value: gap,
                tolerance: APPROXIMANT_TOL,
                values: f,
            };
            record(opts.trials, &o);
        }
    }
    Ok(SuiteReport {
        suite,
        mode,
        nu: opts.nu,
        iso: setup.ctx.map(|c| c.iso),
        trials: opts.trials,
        seed: opts.seed,
        checks,
        first_failure,
    })
}
