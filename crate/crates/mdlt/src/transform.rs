//! The n-dimensional Laplace integral in absolute, iterated-improper and
//! bounded-partial modes, convergence-region estimation, and the
//! antiderivative relation L f = λ₁·…·λₙ·L G.

use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::VectorFunction;
use crate::gamma::gamma;
use crate::quad::{
    adaptive_1d, improper_0_inf, integrate_box, max_norm, sub, AdaptiveOpts, ImproperOpts,
    QuadOutcome, Rule,
};

/// An n-tuple of complex frequencies (λ₁,…,λₙ).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacePoint {
    pub lambda: Vec<Complex64>,
}

impl LaplacePoint {
    pub fn new(lambda: Vec<Complex64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Domain("a Laplace point needs n >= 1 components".into()));
        }
        if lambda.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("Laplace point components must be finite".into()));
        }
        Ok(LaplacePoint { lambda })
    }

    pub fn real(parts: &[f64]) -> Self {
        LaplacePoint {
            lambda: parts.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dims(&self) -> usize {
        self.lambda.len()
    }

    /// Π_j λ_j
    pub fn product(&self) -> Complex64 {
        self.lambda.iter().product()
    }
}

/// Convergence mode of the Laplace integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Absolute,
    Iterated,
    BoundedPartial,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Absolute => write!(f, "absolute"),
            Mode::Iterated => write!(f, "iterated"),
            Mode::BoundedPartial => write!(f, "bounded_partial"),
        }
    }
}

/// Quadrature controls for [`laplace_nd`] and friends.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub mode: Mode,
    /// Per-axis truncation T_j. `None`: derived from the envelope in
    /// absolute mode, and the doubling base in iterated mode.
    pub truncation: Option<Vec<f64>>,
    /// Per-axis initial panel counts for the adaptive engine.
    pub panels: Vec<usize>,
    pub rule: Rule,
    pub rel_tol: f64,
}

impl QuadratureConfig {
    pub fn new(
        mode: Mode,
        truncation: Option<Vec<f64>>,
        panels: Vec<usize>,
        rule: Rule,
        rel_tol: f64,
    ) -> Result<Self> {
        if let Some(t) = &truncation {
            if t.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Configuration("truncation must be positive per axis".into()));
            }
        }
        if panels.iter().any(|&p| p == 0) {
            return Err(Error::Configuration("panel counts must be >= 1".into()));
        }
        if !(rel_tol > 0.0) {
            return Err(Error::Configuration("rel_tol must be > 0".into()));
        }
        Ok(QuadratureConfig {
            mode,
            truncation,
            panels,
            rule,
            rel_tol,
        })
    }

    pub fn default_for(mode: Mode, dims: usize) -> Self {
        QuadratureConfig {
            mode,
            truncation: None,
            panels: vec![1; dims],
            rule: Rule::GaussLegendre,
            rel_tol: 1e-8,
        }
    }

    fn adaptive_opts(&self) -> AdaptiveOpts {
        AdaptiveOpts {
            init_panels: self.panels.iter().copied().max().unwrap_or(1),
            ..AdaptiveOpts::default()
        }
    }
}

/// Value of a transform evaluation plus convergence diagnostics.
#[derive(Debug, Clone)]
pub struct TransformResult {
    pub value: Vec<Complex64>,
    pub mode_used: Mode,
    pub tail_estimate: Vec<f64>,
    pub converged: bool,
}

/// Membership verdict for a point against the convergence regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InOmegaAbs,
    InOmegaOnly,
    InOmegaB,
    Outside,
    Undetermined,
}

impl Verdict {
    /// True for verdicts compatible with membership in Ω ∪ Ω_b.
    pub fn at_least_bounded(self) -> bool {
        matches!(self, Verdict::InOmegaAbs | Verdict::InOmegaOnly | Verdict::InOmegaB)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::InOmegaAbs => "in_omega_abs",
            Verdict::InOmegaOnly => "in_omega_only",
            Verdict::InOmegaB => "in_omega_b",
            Verdict::Outside => "outside",
            Verdict::Undetermined => "undetermined",
        };
        write!(f, "{s}")
    }
}

/// Per-axis abscissa estimates plus membership verdicts at queried points.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub abs_abscissa: Vec<f64>,
    pub memberships: Vec<(LaplacePoint, Verdict)>,
}

// ---------------------------------------------------------------------------
// truncation from the envelope
// ---------------------------------------------------------------------------

// ∫_T^∞ t^p e^{-a t} dt, two-term asymptotic with a safety factor, valid for
// a T moderately above p.
fn poly_tail(p: f64, a: f64, t: f64) -> f64 {
    let at = a * t;
    if at <= p + 2.0 {
        return f64::INFINITY;
    }
    t.powf(p) * (-at).exp() / a * (1.0 + 2.0 * p.max(0.0) / (at - p)) * 3.0
}

fn axis_full(eta: f64, zeta: f64, a: f64) -> f64 {
    gamma(eta + 1.0) / a.powf(eta + 1.0) + gamma(zeta + 1.0) / a.powf(zeta + 1.0)
}

/// Choose per-axis truncations so the envelope-integrated relative tail per
/// axis is below `target`; returns (T_j, per-axis absolute tail bounds).
pub(crate) fn auto_truncation(
    env: &crate::function::Envelope,
    re_lambda: &[f64],
    target: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = env.dims();
    let mut t_out = Vec::with_capacity(n);
    let mut fulls = Vec::with_capacity(n);
    for j in 0..n {
        let a = re_lambda[j] - env.omega[j];
        if !(a > 0.0) {
            return Err(Error::Divergence {
                axis: j + 1,
                detail: format!(
                    "Re lambda = {} does not exceed envelope omega = {}",
                    re_lambda[j], env.omega[j]
                ),
            });
        }
        if env.eta[j] <= -1.0 || env.zeta[j] <= -1.0 {
            return Err(Error::Domain("envelope polynomial exponents must exceed -1".into()));
        }
        let full = axis_full(env.eta[j], env.zeta[j], a);
        let tail_rel = |t: f64| {
            (poly_tail(env.eta[j], a, t) + poly_tail(env.zeta[j], a, t)) / full
        };
        let mut lo = 1.0 / a;
        let mut hi = 4000.0 / a;
        if tail_rel(hi) > target {
            hi = 40_000.0 / a;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if tail_rel(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t_out.push(hi);
        fulls.push(full);
    }
    let tails: Vec<f64> = (0..n)
        .map(|j| {
            let a = re_lambda[j] - env.omega[j];
            let tj = poly_tail(env.eta[j], a, t_out[j]) + poly_tail(env.zeta[j], a, t_out[j]);
            let others: f64 = (0..n).filter(|&i| i != j).map(|i| fulls[i]).product();
            env.m * tj * others
        })
        .collect();
    Ok((t_out, tails))
}

// integrand e^{-λ·t} f(t)
fn kernel_eval(f: &VectorFunction, lambda: &[Complex64], t: &[f64], out: &mut [Complex64]) {
    f.eval_into(t, out);
    let mut ex = Complex64::new(0.0, 0.0);
    for (l, x) in lambda.iter().zip(t) {
        ex -= l * *x;
    }
    let w = ex.exp();
    for v in out.iter_mut() {
        *v *= w;
    }
}

// ---------------------------------------------------------------------------
// laplace_nd
// ---------------------------------------------------------------------------

/// The n-dimensional Laplace integral of `f` at `p` in the mode selected by
/// `cfg`.
///
/// * absolute: integrates over the envelope-truncated box (requires
///   Re λ_j > ω_j on every axis) and reports envelope tail bounds;
/// * iterated: nested one-dimensional improper integrals, innermost axis n,
///   each as a mollified doubling limit — `converged: false` with the
///   best-effort value when some level fails its Cauchy test;
/// * bounded_partial: the partial integral over [0,T₁]×…×[0,Tₙ]
///   (truncation required).
pub fn laplace_nd(
    f: &VectorFunction,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<TransformResult> {
    let n = f.dims();
    if p.dims() != n {
        return Err(Error::Configuration(format!(
            "point has {} components, function has {n} axes",
            p.dims()
        )));
    }
    match cfg.mode {
        Mode::Absolute => laplace_absolute(f, p, cfg),
        Mode::Iterated => laplace_iterated(f, p, cfg),
        Mode::BoundedPartial => {
            let t = cfg.truncation.clone().ok_or_else(|| {
                Error::Configuration("bounded_partial mode requires truncation".into())
            })?;
            if t.len() != n {
                return Err(Error::Configuration("truncation length must equal dims".into()));
            }
            let out = box_transform(f, &p.lambda, &t, cfg, cfg.rel_tol)?;
            Ok(TransformResult {
                value: out.value,
                mode_used: Mode::BoundedPartial,
                tail_estimate: vec![0.0; n],
                converged: out.converged,
            })
        }
    }
}

fn box_transform(
    f: &VectorFunction,
    lambda: &[Complex64],
    trunc: &[f64],
    cfg: &QuadratureConfig,
    rel_tol: f64,
) -> Result<QuadOutcome> {
    let codim = f.codim();
    let g = |t: &[f64], out: &mut [Complex64]| kernel_eval(f, lambda, t, out);
    // crude pass fixes the absolute tolerance scale for the refined pass
    let crude = integrate_box(
        &g,
        trunc,
        codim,
        0.05,
        cfg.rule,
        AdaptiveOpts {
            max_segments: 3000,
            parallel: f.dims() >= 2,
            ..cfg.adaptive_opts()
        },
    );
    let abs_tol = rel_tol * (1.0 + max_norm(&crude.value));
    Ok(integrate_box(
        &g,
        trunc,
        codim,
        abs_tol,
        cfg.rule,
        AdaptiveOpts {
            parallel: f.dims() >= 2,
            ..cfg.adaptive_opts()
        },
    ))
}

fn laplace_absolute(
    f: &VectorFunction,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<TransformResult> {
    let re: Vec<f64> = p.lambda.iter().map(|z| z.re).collect();
    let (trunc, tails) = match &cfg.truncation {
        Some(t) => {
            if t.len() != f.dims() {
                return Err(Error::Configuration("truncation length must equal dims".into()));
            }
            // still reject points the envelope proves divergent
            for j in 0..f.dims() {
                if re[j] <= f.envelope.omega[j] {
                    return Err(Error::Divergence {
                        axis: j + 1,
                        detail: format!(
                            "Re lambda = {} does not exceed envelope omega = {}",
                            re[j], f.envelope.omega[j]
                        ),
                    });
                }
            }
            (t.clone(), vec![0.0; f.dims()])
        }
        None => auto_truncation(&f.envelope, &re, cfg.rel_tol / 10.0)?,
    };
    let out = box_transform(f, &p.lambda, &trunc, cfg, cfg.rel_tol)?;
    Ok(TransformResult {
        value: out.value,
        mode_used: Mode::Absolute,
        tail_estimate: tails,
        converged: out.converged,
    })
}

fn laplace_iterated(
    f: &VectorFunction,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<TransformResult> {
    let n = f.dims();
    let codim = f.codim();
    let b0: Vec<f64> = match &cfg.truncation {
        Some(t) => t.clone(),
        None => vec![16.0; n],
    };
    let all_ok = AtomicBool::new(true);
    let level_err: Mutex<Vec<f64>> = Mutex::new(vec![0.0; n]);

    // recursion: integrate axis `k` with the prefix t_0..t_{k-1} fixed;
    // axis n-1 is the innermost integral, axis 0 the outermost
    fn level(
        f: &VectorFunction,
        lambda: &[Complex64],
        prefix: &[f64],
        k: usize,
        b0: &[f64],
        rel_tol: f64,
        opts: &AdaptiveOpts,
        all_ok: &AtomicBool,
        level_err: &Mutex<Vec<f64>>,
        out: &mut [Complex64],
    ) {
        let n = f.dims();
        let codim = f.codim();
        let g = |t: f64, buf: &mut [Complex64]| {
            let mut pt = Vec::with_capacity(n);
            pt.extend_from_slice(prefix);
            pt.push(t);
            if k + 1 == n {
                f.eval_into(&pt, buf);
            } else {
                level(
                    f,
                    lambda,
                    &pt,
                    k + 1,
                    b0,
                    rel_tol / 40.0,
                    &AdaptiveOpts { parallel: false, ..*opts },
                    all_ok,
                    level_err,
                    buf,
                );
            }
            let w = (-lambda[k] * t).exp();
            for v in buf.iter_mut() {
                *v *= w;
            }
        };
        let r = improper_0_inf(
            &g,
            codim,
            rel_tol,
            ImproperOpts {
                b0: b0[k],
                max_doublings: 6,
                adaptive: *opts,
            },
        );
        if !r.converged {
            all_ok.store(false, AtomicOrdering::Relaxed);
        }
        {
            let mut le = level_err.lock().unwrap();
            le[k] = le[k].max(r.err_est);
        }
        out.copy_from_slice(&r.value);
    }

    let mut value = vec![Complex64::new(0.0, 0.0); codim];
    let opts = AdaptiveOpts {
        max_segments: 30_000,
        parallel: n >= 2,
        ..cfg.adaptive_opts()
    };
    level(
        f,
        &p.lambda,
        &[],
        0,
        &b0,
        cfg.rel_tol,
        &opts,
        &all_ok,
        &level_err,
        &mut value,
    );
    let tails = level_err.into_inner().unwrap();
    Ok(TransformResult {
        value,
        mode_used: Mode::Iterated,
        tail_estimate: tails,
        converged: all_ok.load(AtomicOrdering::Relaxed),
    })
}

// ---------------------------------------------------------------------------
// antiderivative G and the L f = Πλ · L G relation
// ---------------------------------------------------------------------------

/// G(t) = ∫_0^{t_1}…∫_0^{t_n} f, the iterated box primitive.
pub fn antiderivative_g(
    f: &VectorFunction,
    t: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    if t.len() != f.dims() {
        return Err(Error::Configuration("point length must equal dims".into()));
    }
    if t.iter().any(|&x| x < 0.0) {
        return Err(Error::Domain("antiderivative needs t >= 0 componentwise".into()));
    }
    let g = |s: &[f64], out: &mut [Complex64]| f.eval_into(s, out);
    let crude = integrate_box(&g, t, f.codim(), 0.05, cfg.rule, AdaptiveOpts { max_segments: 2000, ..cfg.adaptive_opts() });
    let abs_tol = cfg.rel_tol * (1.0 + max_norm(&crude.value));
    let out = integrate_box(&g, t, f.codim(), abs_tol, cfg.rule, cfg.adaptive_opts());
    if !out.converged {
        return Err(Error::Quadrature(format!(
            "panel refinement cap hit for the box primitive: err {:.3e} > tol {:.3e}",
            out.err_est, abs_tol
        )));
    }
    Ok(out.value)
}

// --- Chebyshev helpers for the spectral route used by check_lg_relation ----

pub(crate) fn cheb_points(n: usize, a: f64, b: f64) -> Vec<f64> {
    // x_j = cos(jπ/n) mapped to [a,b], j = 0..=n (descending from b to a)
    (0..=n)
        .map(|j| {
            let c = (std::f64::consts::PI * j as f64 / n as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * c
        })
        .collect()
}

// type-I DCT (naive O(n^2)): values at cheb points -> series coefficients
pub(crate) fn cheb_coeffs(vals: &[Complex64]) -> Vec<Complex64> {
    let n = vals.len() - 1;
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = 0.5 * (vals[0] + if k % 2 == 0 { vals[n] } else { -vals[n] });
        for j in 1..n {
            s += vals[j] * (std::f64::consts::PI * (j * k) as f64 / n as f64).cos();
        }
        *ck = s * (2.0 / n as f64);
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    c
}

// coefficients of the antiderivative vanishing at the LEFT endpoint a,
// for a plain series Σ c_k T_k on [a,b] (half = (b-a)/2); the uniform
// B_k = (c_{k-1} - c_{k+1})/(2k) rule needs the T_0 coefficient doubled
fn cheb_antiderivative(c: &[Complex64], half: f64) -> Vec<Complex64> {
    let n = c.len() - 1;
    let mut b = vec![Complex64::new(0.0, 0.0); n + 2];
    for k in 1..=n + 1 {
        let prev = if k == 1 { 2.0 * c[0] } else { c[k - 1] };
        let next = if k + 1 <= n { c[k + 1] } else { Complex64::new(0.0, 0.0) };
        b[k] = (prev - next) * (half / (2.0 * k as f64));
    }
    // pin the value at x = a (cheb argument -1): Σ b_k (-1)^k = 0
    let mut at_a = Complex64::new(0.0, 0.0);
    for (k, bk) in b.iter().enumerate().skip(1) {
        at_a += bk * if k % 2 == 0 { 1.0 } else { -1.0 };
    }
    b[0] = -at_a;
    b
}

// ∫_{-1}^{1} Σ c_k T_k = Σ_{k even} c_k 2/(1-k²)
fn cheb_integral(c: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (k, ck) in c.iter().enumerate().step_by(2) {
        s += ck * (2.0 / (1.0 - (k * k) as f64));
    }
    s
}

/// Spectral evaluation of L G on a tensor Chebyshev grid: f is sampled on
/// the grid, the box primitive G is obtained by two spectral antiderivative
/// passes, and ∫ e^{-λ·t} G dt by Clenshaw-Curtis on the same grid.
/// 2D only (the relation check is exercised at n = 2).
fn lg_spectral_2d(
    f: &VectorFunction,
    lambda: &[Complex64],
    trunc: &[f64],
    n_grid: usize,
) -> Vec<Complex64> {
    let codim = f.codim();
    let (t1, t2) = (trunc[0], trunc[1]);
    let xs = cheb_points(n_grid, 0.0, t1);
    let ys = cheb_points(n_grid, 0.0, t2);
    let np = n_grid + 1;

    // sample f on the tensor grid per component
    let mut grid = vec![Complex64::new(0.0, 0.0); np * np * codim];
    let rows: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| {
            let mut row = vec![Complex64::new(0.0, 0.0); np * codim];
            let mut buf = vec![Complex64::new(0.0, 0.0); codim];
            for (j, &y) in ys.iter().enumerate() {
                f.eval_into(&[x, y], &mut buf);
                row[j * codim..(j + 1) * codim].copy_from_slice(&buf);
            }
            row
        })
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        grid[i * np * codim..(i + 1) * np * codim].copy_from_slice(&row);
    }

    // cumulative integral along axis 2 (y), then axis 1 (x), in value space
    let antider_line = |vals: &[Complex64], half: f64| -> Vec<Complex64> {
        let c = cheb_coeffs(vals);
        let b = cheb_antiderivative(&c, half);
        // evaluate back on the same grid (note: grid runs from +1 to -1,
        // i.e. from the right endpoint down; the primitive vanishes at a)
        let mut out = vec![Complex64::new(0.0, 0.0); vals.len()];
        let n = vals.len() - 1;
        for (j, o) in out.iter_mut().enumerate() {
            let x = (std::f64::consts::PI * j as f64 / n as f64).cos();
            let mut sum = Complex64::new(0.0, 0.0);
            let mut tkm1 = Complex64::new(1.0, 0.0);
            let mut tk = Complex64::new(x, 0.0);
            sum += b[0] * tkm1;
            if b.len() > 1 {
                sum += b[1] * tk;
            }
            for bk in b.iter().skip(2) {
                let tkp1 = 2.0 * x * tk - tkm1;
                sum += bk * tkp1;
                tkm1 = tk;
                tk = tkp1;
            }
            *o = sum;
        }
        out
    };

    let mut g_grid = grid;
    // axis 2: for each x-row and component, replace the y-line by its primitive
    for i in 0..np {
        for c0 in 0..codim {
            let line: Vec<Complex64> = (0..np).map(|j| g_grid[(i * np + j) * codim + c0]).collect();
            let newline = antider_line(&line, 0.5 * t2);
            for (j, v) in newline.into_iter().enumerate() {
                g_grid[(i * np + j) * codim + c0] = v;
            }
        }
    }
    // axis 1
    for j in 0..np {
        for c0 in 0..codim {
            let line: Vec<Complex64> = (0..np).map(|i| g_grid[(i * np + j) * codim + c0]).collect();
            let newline = antider_line(&line, 0.5 * t1);
            for (i, v) in newline.into_iter().enumerate() {
                g_grid[(i * np + j) * codim + c0] = v;
            }
        }
    }

    // multiply by the kernel and integrate with Clenshaw-Curtis per axis
    let mut out = vec![Complex64::new(0.0, 0.0); codim];
    for c0 in 0..codim {
        // inner CC along y for each x, then CC along x
        let mut per_x = vec![Complex64::new(0.0, 0.0); np];
        for i in 0..np {
            let line: Vec<Complex64> = (0..np)
                .map(|j| g_grid[(i * np + j) * codim + c0] * (-lambda[1] * ys[j]).exp())
                .collect();
            per_x[i] = cheb_integral(&cheb_coeffs(&line)) * (0.5 * t2);
        }
        let line: Vec<Complex64> = (0..np)
            .map(|i| per_x[i] * (-lambda[0] * xs[i]).exp())
            .collect();
        out[c0] = cheb_integral(&cheb_coeffs(&line)) * (0.5 * t1);
    }
    out
}

/// Residual of the relation L f = λ₁·…·λₙ·(L G) at p:
/// ‖L f − Πλ·L G‖ / (1 + ‖L f‖). L f comes from the adaptive path,
/// L G from an independent spectral route. Requires Re λ_j > max(ω_j, 0).
pub fn check_lg_relation(
    f: &VectorFunction,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = f.dims();
    if n != 2 {
        return Err(Error::Configuration("the LG relation check is implemented for n = 2".into()));
    }
    for j in 0..n {
        if p.lambda[j].re <= f.envelope.omega[j].max(0.0) {
            return Err(Error::Divergence {
                axis: j + 1,
                detail: "the relation needs Re lambda_j > max(omega_j, 0)".into(),
            });
        }
    }
    let lf = laplace_nd(f, p, &QuadratureConfig { mode: Mode::Absolute, ..cfg.clone() })?;

    // truncation from the antiderivative's envelope (G can grow)
    let g_env = f.envelope.antiderivative();
    let re: Vec<f64> = p.lambda.iter().map(|z| z.re).collect();
    let (trunc, _) = auto_truncation(&g_env, &re, cfg.rel_tol / 10.0)?;

    let mut n_grid = 48;
    let mut prev: Option<Vec<Complex64>> = None;
    let mut lg = vec![Complex64::new(0.0, 0.0); f.codim()];
    loop {
        lg = lg_spectral_2d(f, &p.lambda, &trunc, n_grid);
        if let Some(pv) = &prev {
            if max_norm(&sub(&lg, pv)) <= 0.25 * cfg.rel_tol * (1.0 + max_norm(&lg)) {
                break;
            }
        }
        if n_grid >= 1024 {
            break;
        }
        prev = Some(lg.clone());
        n_grid *= 2;
    }

    let prod = p.product();
    let rhs: Vec<Complex64> = lg.iter().map(|z| z * prod).collect();
    Ok(max_norm(&sub(&lf.value, &rhs)) / (1.0 + max_norm(&lf.value)))
}

// ---------------------------------------------------------------------------
// abscissa estimation and point classification
// ---------------------------------------------------------------------------

// 1D absolute convergence probe along one axis (other coordinates at 1).
fn axis_converges(f: &VectorFunction, axis: usize, sigma: f64) -> bool {
    let n = f.dims();
    let codim = f.codim();
    let g = |t: f64, out: &mut [Complex64]| {
        let mut pt = vec![1.0; n];
        pt[axis] = t;
        let mut buf = vec![Complex64::new(0.0, 0.0); codim];
        f.eval_into(&pt, &mut buf);
        out[0] = Complex64::new(max_norm(&buf) * (-sigma * t).exp(), 0.0);
    };
    let mut partials = Vec::new();
    let mut upto = 0.0f64;
    let mut acc = 0.0f64;
    for &b in &[8.0, 16.0, 32.0, 64.0, 128.0] {
        let w = adaptive_1d(&g, upto, b, 1, 1e-6 * (1.0 + acc), AdaptiveOpts { max_segments: 4000, ..Default::default() });
        acc += w.value[0].re;
        partials.push(acc);
        upto = b;
        if !acc.is_finite() || acc > 1e12 {
            return false;
        }
    }
    let k = partials.len();
    let d1 = (partials[k - 1] - partials[k - 2]).abs();
    let d2 = (partials[k - 2] - partials[k - 3]).abs();
    let gate = 1e-3 * (1.0 + partials[k - 1].abs());
    d1 <= gate && d2 <= gate.max(d1 * 20.0)
}

/// Smallest probe value σ for which the one-axis absolute integral of the
/// majorized |f| converges numerically at Re λ_axis = σ. Sentinels:
/// `+∞` when no probe converges, `-∞` when every probe does.
pub fn estimate_abscissa(f: &VectorFunction, axis: usize, probe_grid: &[f64]) -> Result<f64> {
    if axis >= f.dims() {
        return Err(Error::Configuration(format!("axis {axis} out of range")));
    }
    if probe_grid.len() < 3 {
        return Err(Error::Configuration("probe grid needs at least 3 points".into()));
    }
    if probe_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Configuration("probe grid must be sorted ascending".into()));
    }
    if !axis_converges(f, axis, *probe_grid.last().unwrap()) {
        return Ok(f64::INFINITY);
    }
    if axis_converges(f, axis, probe_grid[0]) {
        return Ok(f64::NEG_INFINITY);
    }
    // bisect the boundary: grid[lo] diverges, grid[hi] converges
    let mut lo = 0usize;
    let mut hi = probe_grid.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if axis_converges(f, axis, probe_grid[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(probe_grid[hi])
}

/// Classify p against the convergence regions of f.
///
/// Priority: absolute convergence (in_Ω_abs), then a stabilizing iterated
/// limit (in_Ω_only — in Ω but not Ω_abs), then bounded partial integrals
/// (in_Ω_b), then outside on clear growth, else undetermined.
pub fn classify_point(
    f: &VectorFunction,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<Verdict> {
    let n = f.dims();
    if p.dims() != n {
        return Err(Error::Configuration("dimension mismatch".into()));
    }
    let rel = cfg.rel_tol.max(1e-4);
    let codim = f.codim();
    let base: Vec<f64> = cfg.truncation.clone().unwrap_or_else(|| vec![8.0; n]);

    // absolute: Cauchy test on partial absolute integrals over doubling boxes
    let abs_f = |t: &[f64], out: &mut [Complex64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); codim];
        f.eval_into(t, &mut buf);
        let damping: f64 = p.lambda.iter().zip(t).map(|(l, x)| -l.re * x).sum();
        out[0] = Complex64::new(max_norm(&buf) * damping.exp(), 0.0);
    };
    let mut abs_partials = Vec::new();
    let mut abs_ok = true;
    for m in 0..4 {
        let boxv: Vec<f64> = base.iter().map(|b| b * (1 << m) as f64).collect();
        let out = integrate_box(
            &abs_f,
            &boxv,
            1,
            rel * 0.05 * (1.0 + abs_partials.last().map(|v: &f64| *v).unwrap_or(0.0)),
            cfg.rule,
            AdaptiveOpts { max_segments: 6000, parallel: n >= 2, ..Default::default() },
        );
        let v = out.value[0].re;
        abs_partials.push(v);
        if !v.is_finite() || v > 1e15 {
            abs_ok = false;
            break;
        }
    }
    if abs_ok {
        let k = abs_partials.len();
        let d1 = (abs_partials[k - 1] - abs_partials[k - 2]).abs();
        let d2 = (abs_partials[k - 2] - abs_partials[k - 3]).abs();
        let gate = rel * (1.0 + abs_partials[k - 1].abs());
        if d1 <= gate && d2 <= gate.max(20.0 * d1) {
            return Ok(Verdict::InOmegaAbs);
        }
    }

    // iterated limit
    let it = laplace_iterated(
        f,
        p,
        &QuadratureConfig { rel_tol: rel, truncation: Some(base.clone()), ..cfg.clone() },
    )?;
    if it.converged {
        return Ok(Verdict::InOmegaOnly);
    }

    // bounded partial integrals over the 4^n tensor boxes built from
    // {T, 2T, 4T, 8T} per axis: max norm < 1e3 x the value at the base box
    let mut boxes: Vec<Vec<f64>> = Vec::new();
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &combos {
            for m in 0..4usize {
                let mut c2 = c.clone();
                c2.push(m);
                next.push(c2);
            }
        }
        combos = next;
    }
    for c in &combos {
        boxes.push(
            c.iter()
                .zip(&base)
                .map(|(&m, &b)| b * (1 << m) as f64)
                .collect::<Vec<f64>>(),
        );
    }
    let part = |bx: &[f64]| -> Vec<Complex64> {
        let g = |t: &[f64], out: &mut [Complex64]| kernel_eval(f, &p.lambda, t, out);
        integrate_box(
            &g,
            bx,
            codim,
            rel * 0.05,
            cfg.rule,
            AdaptiveOpts { max_segments: 6000, parallel: n >= 2, ..Default::default() },
        )
        .value
    };
    let base_val = max_norm(&part(&base));
    let mut max_box = 0.0f64;
    let mut diag = Vec::new();
    for bx in &boxes {
        let v = max_norm(&part(bx));
        max_box = max_box.max(v);
        if bx.iter().zip(&boxes[0]).all(|(a, b)| (a / b - bx[0] / boxes[0][0]).abs() < 1e-12) {
            diag.push(v);
        }
        if !max_box.is_finite() {
            break;
        }
    }
    if max_box.is_finite() && max_box < 1e3 * (base_val + 1e-12) {
        return Ok(Verdict::InOmegaB);
    }
    // outside on clear growth along the diagonal boxes
    let growing = diag.windows(2).all(|w| w[1] > w[0]) && diag.len() >= 2;
    if !max_box.is_finite() || (growing && max_box >= 1e3 * (base_val + 1e-12)) {
        return Ok(Verdict::Outside);
    }
    Ok(Verdict::Undetermined)
}

/// Abscissa estimates plus verdicts for a probe list.
pub fn region_report(
    f: &VectorFunction,
    probes: &[LaplacePoint],
    cfg: &QuadratureConfig,
    abscissa_grid: &[f64],
) -> Result<ConvergenceReport> {
    let mut abs_abscissa = Vec::with_capacity(f.dims());
    for axis in 0..f.dims() {
        abs_abscissa.push(estimate_abscissa(f, axis, abscissa_grid)?);
    }
    let mut memberships = Vec::with_capacity(probes.len());
    for p in probes {
        let v = classify_point(f, p, cfg)?;
        memberships.push((p.clone(), v));
    }
    Ok(ConvergenceReport { abs_abscissa, memberships })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Envelope;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_2d() -> VectorFunction {
        VectorFunction::scalar(2, Envelope::exponential(1.0, vec![0.0, 0.0]), |_| c(1.0, 0.0)).unwrap()
    }

    fn exp_decay_2d() -> VectorFunction {
        VectorFunction::scalar(2, Envelope::exponential(1.0, vec![-1.0, -1.0]), |t| {
            c((-t[0] - t[1]).exp(), 0.0)
        })
        .unwrap()
    }

    fn cfg(mode: Mode) -> QuadratureConfig {
        QuadratureConfig { rel_tol: 1e-8, ..QuadratureConfig::default_for(mode, 2) }
    }

    #[test]
    fn absolute_mode_constants_and_exponentials() {
        let r = laplace_nd(&one_2d(), &LaplacePoint::real(&[1.0, 2.0]), &cfg(Mode::Absolute)).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value[0].re, 0.5, max_relative = 1e-7);
        assert!(r.tail_estimate.iter().all(|&t| t >= 0.0));

        let r = laplace_nd(&exp_decay_2d(), &LaplacePoint::real(&[1.0, 1.0]), &cfg(Mode::Absolute)).unwrap();
        assert_relative_eq!(r.value[0].re, 0.25, max_relative = 1e-7);
    }

    #[test]
    fn absolute_mode_ml_pair_product() {
        // t^{β-1} E_{α,β}(ω t^α) per axis with α = β = 1, ω = 1 is e^{t};
        // the transform at (2,2) is 1/(λ₁-1) · 1/(λ₂-1) = 1
        let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![1.0, 1.0]), |t| {
            c((t[0] + t[1]).exp(), 0.0)
        })
        .unwrap();
        let r = laplace_nd(&f, &LaplacePoint::real(&[2.0, 2.0]), &cfg(Mode::Absolute)).unwrap();
        assert_relative_eq!(r.value[0].re, 1.0, max_relative = 1e-7);
    }

    #[test]
    fn absolute_mode_rejects_divergent_point() {
        let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![1.0, 1.0]), |t| {
            c((t[0] + t[1]).exp(), 0.0)
        })
        .unwrap();
        let r = laplace_nd(&f, &LaplacePoint::real(&[0.5, 2.0]), &cfg(Mode::Absolute));
        assert!(matches!(r, Err(Error::Divergence { axis: 1, .. })));
    }

    #[test]
    fn bounded_partial_needs_truncation() {
        let r = laplace_nd(&one_2d(), &LaplacePoint::real(&[1.0, 1.0]), &cfg(Mode::BoundedPartial));
        assert!(matches!(r, Err(Error::Configuration(_))));
        let mut c2 = cfg(Mode::BoundedPartial);
        c2.truncation = Some(vec![2.0, 3.0]);
        let r = laplace_nd(&one_2d(), &LaplacePoint::real(&[0.0, 0.0]), &c2).unwrap();
        // ∫∫ 1 over [0,2]x[0,3] = 6
        assert_relative_eq!(r.value[0].re, 6.0, max_relative = 1e-8);
    }

    #[test]
    fn iterated_mode_fresnel_conditional_value() {
        // sin(t1²) sin(t2²) at λ = 0: the iterated limit is
        // (∫_0^∞ sin t² dt)² = π/8 (mpmath quadosc reference)
        let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![0.0, 0.0]), |t| {
            c((t[0] * t[0]).sin() * (t[1] * t[1]).sin(), 0.0)
        })
        .unwrap();
        let mut cf = cfg(Mode::Iterated);
        cf.rel_tol = 1e-5;
        let r = laplace_nd(&f, &LaplacePoint::real(&[0.0, 0.0]), &cf).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value[0].re, std::f64::consts::PI / 8.0, epsilon = 2e-4);
    }

    #[test]
    fn antiderivative_examples() {
        let q = cfg(Mode::Absolute);
        let v = antiderivative_g(&one_2d(), &[2.0, 3.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 6.0, max_relative = 1e-8);

        let v = antiderivative_g(&exp_decay_2d(), &[1.0, 1.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 0.399_576_400_893_728, max_relative = 1e-8);

        let f = VectorFunction::scalar(2, Envelope { m: 1.0, omega: vec![0.0, 0.0], eta: vec![1.0, 1.0], zeta: vec![1.0, 1.0] }, |t| {
            c(t[0] * t[1], 0.0)
        })
        .unwrap();
        let v = antiderivative_g(&f, &[2.0, 2.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 4.0, max_relative = 1e-8);
    }

    #[test]
    fn lg_relation_examples() {
        let q = QuadratureConfig { rel_tol: 1e-7, ..cfg(Mode::Absolute) };
        let r = check_lg_relation(&one_2d(), &LaplacePoint::real(&[1.0, 1.0]), &q).unwrap();
        assert!(r < 1e-7, "residual {r}");
        let r = check_lg_relation(&exp_decay_2d(), &LaplacePoint::real(&[2.0, 2.0]), &q).unwrap();
        assert!(r < 1e-6, "residual {r}");
        let f = VectorFunction::scalar(
            2,
            Envelope { m: 1.0, omega: vec![-1.0, -1.0], eta: vec![1.0, 1.0], zeta: vec![1.0, 1.0] },
            |t| c(t[0] * t[1] * (-t[0] - t[1]).exp(), 0.0),
        )
        .unwrap();
        let r = check_lg_relation(&f, &LaplacePoint::real(&[3.0, 1.0]), &q).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn abscissa_examples() {
        let grid: Vec<f64> = (-2..=10).map(|k| k as f64 * 0.5).collect();
        let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![3.0, 1.0]), |t| {
            c((3.0 * t[0] + t[1]).exp(), 0.0)
        })
        .unwrap();
        let a = estimate_abscissa(&f, 0, &grid).unwrap();
        assert!((a - 3.0).abs() <= 0.5 + 1e-12, "got {a}");

        let a = estimate_abscissa(&one_2d(), 1, &grid).unwrap();
        assert!((a - 0.0).abs() <= 0.5 + 1e-12, "got {a}");

        let g = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![0.0, 0.0]), |t| {
            c((-t[0] * t[0]).exp() * (1.0 + t[1]).recip(), 0.0)
        })
        .unwrap();
        let a = estimate_abscissa(&g, 0, &[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(a, f64::NEG_INFINITY);
    }

    #[test]
    fn abscissa_rejects_bad_grids() {
        assert!(estimate_abscissa(&one_2d(), 0, &[0.0, 1.0]).is_err());
        assert!(estimate_abscissa(&one_2d(), 0, &[1.0, 0.5, 2.0]).is_err());
        assert!(estimate_abscissa(&one_2d(), 5, &[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn classify_simple_points() {
        let q = QuadratureConfig { rel_tol: 1e-3, ..cfg(Mode::Absolute) };
        let v = classify_point(&exp_decay_2d(), &LaplacePoint::real(&[0.5, 0.5]), &q).unwrap();
        assert_eq!(v, Verdict::InOmegaAbs);

        let grow = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![1.0, 1.0]), |t| {
            c((t[0] + t[1]).exp(), 0.0)
        })
        .unwrap();
        let v = classify_point(&grow, &LaplacePoint::real(&[0.0, 0.0]), &q).unwrap();
        assert_eq!(v, Verdict::Outside);
    }
}
