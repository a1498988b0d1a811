//! Recovering f (or its box primitive G) from its transform: the
//! multidimensional Post-Widder formula, Bromwich-type contour quadrature,
//! Tauberian initial/final value extrapolation, and a uniqueness oracle.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::VectorFunction;
use crate::gamma::ln_gamma;
use crate::quad::{gauss_legendre, integrate_box, max_norm, sub, AdaptiveOpts, Rule};
use crate::transform::QuadratureConfig;

/// Declared decay majorant ‖F(λ)‖ ≤ M·Π_j |λ_j|^{−1−ε_j} on Re λ_j > ω_j.
#[derive(Debug, Clone)]
pub struct DecayBound {
    pub m: f64,
    pub omega: Vec<f64>,
    pub eps: Vec<f64>,
}

/// One axis factor of a separable transform F = Π_j φ_j(λ_j); `deriv`
/// returns the k-th derivative when analytically available.
#[derive(Clone)]
pub struct AxisFactor {
    pub eval: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    pub deriv: Option<Arc<dyn Fn(u32, Complex64) -> Complex64 + Send + Sync>>,
}

#[derive(Clone)]
enum Repr {
    General {
        eval: Arc<dyn Fn(&[Complex64], &mut [Complex64]) + Send + Sync>,
        derivs: Option<Arc<dyn Fn(&[u32], &[Complex64], &mut [Complex64]) + Send + Sync>>,
    },
    Separable {
        factors: Vec<AxisFactor>,
    },
}

/// A transform-domain function ℂ^n → ℂ^m with declared decay.
#[derive(Clone)]
pub struct TransformFunction {
    dims: usize,
    codim: usize,
    repr: Repr,
    pub decay: DecayBound,
}

impl std::fmt::Debug for TransformFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformFunction")
            .field("dims", &self.dims)
            .field("codim", &self.codim)
            .field("decay", &self.decay)
            .finish()
    }
}

impl TransformFunction {
    pub fn new(
        dims: usize,
        codim: usize,
        decay: DecayBound,
        eval: impl Fn(&[Complex64], &mut [Complex64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if dims == 0 || codim == 0 {
            return Err(Error::Domain("dims and codim must be >= 1".into()));
        }
        Ok(TransformFunction {
            dims,
            codim,
            repr: Repr::General { eval: Arc::new(eval), derivs: None },
            decay,
        })
    }

    pub fn with_derivatives(
        mut self,
        derivs: impl Fn(&[u32], &[Complex64], &mut [Complex64]) + Send + Sync + 'static,
    ) -> Self {
        if let Repr::General { derivs: d, .. } = &mut self.repr {
            *d = Some(Arc::new(derivs));
        }
        self
    }

    /// Scalar product-form transform F(λ) = Π_j φ_j(λ_j).
    pub fn separable(factors: Vec<AxisFactor>, decay: DecayBound) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("need at least one axis factor".into()));
        }
        Ok(TransformFunction {
            dims: factors.len(),
            codim: 1,
            repr: Repr::Separable { factors },
            decay,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn eval_into(&self, lambda: &[Complex64], out: &mut [Complex64]) {
        match &self.repr {
            Repr::General { eval, .. } => eval(lambda, out),
            Repr::Separable { factors } => {
                let mut v = Complex64::new(1.0, 0.0);
                for (f, l) in factors.iter().zip(lambda) {
                    v *= (f.eval)(*l);
                }
                out[0] = v;
            }
        }
    }

    pub fn eval(&self, lambda: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.codim];
        self.eval_into(lambda, &mut out);
        out
    }

    /// Exact mixed partial ∂^v F(λ) when analytically available.
    pub fn derivative(&self, v: &[u32], lambda: &[Complex64]) -> Result<Vec<Complex64>> {
        match &self.repr {
            Repr::General { derivs: Some(d), .. } => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.codim];
                d(v, lambda, &mut out);
                Ok(out)
            }
            Repr::General { derivs: None, .. } => Err(Error::Configuration(
                "transform carries no analytic derivative callback".into(),
            )),
            Repr::Separable { factors } => {
                let mut prod = Complex64::new(1.0, 0.0);
                for ((f, &k), l) in factors.iter().zip(v).zip(lambda) {
                    match (&f.deriv, k) {
                        (_, 0) => prod *= (f.eval)(*l),
                        (Some(d), k) => prod *= d(k, *l),
                        (None, _) => {
                            return Err(Error::Configuration(
                                "axis factor carries no derivative callback".into(),
                            ))
                        }
                    }
                }
                Ok(vec![prod])
            }
        }
    }

    /// F(λ)/ (λ₁·…·λₙ) — the transform of the box primitive G. Derivative
    /// support is preserved through the per-axis Leibniz rule, so the
    /// Post-Widder G-route stays analytic. Separable transforms only.
    pub fn divided_by_lambda(&self) -> Result<TransformFunction> {
        let factors = match &self.repr {
            Repr::Separable { factors } => factors.clone(),
            _ => {
                return Err(Error::Configuration(
                    "divided_by_lambda needs a separable transform".into(),
                ))
            }
        };
        let new_factors: Vec<AxisFactor> = factors
            .into_iter()
            .map(|f| {
                let fe = f.eval.clone();
                let fd = f.deriv.clone();
                let eval_new: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync> = {
                    let fe = fe.clone();
                    Arc::new(move |l: Complex64| fe(l) / l)
                };
                let deriv_new: Option<Arc<dyn Fn(u32, Complex64) -> Complex64 + Send + Sync>> =
                    fd.map(|d| {
                        let fe = fe.clone();
                        Arc::new(move |k: u32, l: Complex64| {
                            // ∂^k [φ/λ] = Σ_j C(k,j) φ^(j) (−1)^{k−j} (k−j)! λ^{−(k−j+1)}
                            // with C(k,j)(k−j)! = k!/j! computed in log space
                            let ln_l = l.norm().ln();
                            let arg_l = l.arg();
                            let mut acc = Complex64::new(0.0, 0.0);
                            for j in 0..=k {
                                let phi_j = if j == 0 { fe(l) } else { d(j, l) };
                                let q = (k - j) as f64;
                                let ln_mag = ln_gamma(k as f64 + 1.0)
                                    - ln_gamma(j as f64 + 1.0)
                                    - (q + 1.0) * ln_l;
                                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                                let phase = -(q + 1.0) * arg_l;
                                let w = sign
                                    * ln_mag.exp()
                                    * Complex64::new(phase.cos(), phase.sin());
                                acc += phi_j * w;
                            }
                            acc
                        }) as Arc<dyn Fn(u32, Complex64) -> Complex64 + Send + Sync>
                    });
                AxisFactor { eval: eval_new, deriv: deriv_new }
            })
            .collect();
        let mut decay = self.decay.clone();
        for e in decay.eps.iter_mut() {
            *e += 1.0;
        }
        TransformFunction::separable(new_factors, decay)
    }

    /// Max Cauchy-Riemann discrepancy of each axis at the given points, by
    /// central differences with step h — a cheap holomorphy spot-check.
    pub fn spot_check_holomorphic(&self, pts: &[Vec<Complex64>], h: f64) -> f64 {
        let mut worst = 0.0f64;
        for p in pts {
            for axis in 0..self.dims {
                let shifted = |d: Complex64| {
                    let mut q = p.clone();
                    q[axis] += d;
                    self.eval(&q)
                };
                let dre = sub(&shifted(Complex64::new(h, 0.0)), &shifted(Complex64::new(-h, 0.0)));
                let dim = sub(&shifted(Complex64::new(0.0, h)), &shifted(Complex64::new(0.0, -h)));
                // holomorphy: ∂F/∂(iy) = i ∂F/∂x
                let diff: Vec<Complex64> = dre
                    .iter()
                    .zip(&dim)
                    .map(|(a, b)| a - b * Complex64::new(0.0, -1.0))
                    .collect();
                let scale = 2.0 * h * (1.0 + max_norm(&shifted(Complex64::new(0.0, 0.0))));
                worst = worst.max(max_norm(&diff) / scale);
            }
        }
        worst
    }
}

/// How the mixed partials behind the Post-Widder kernel are obtained.
#[derive(Clone)]
pub enum DerivativeSource {
    /// exact per-axis derivative callbacks on the transform
    Analytic,
    /// the moment route ∂^v F = (−1)^{|v|} L[t^v/v!·f]·Πv_j!, which needs
    /// the underlying time-domain function (test-harness use)
    MomentQuadrature { f: VectorFunction, cfg: QuadratureConfig },
}

/// Post-Widder controls: per-axis orders and the derivative source.
#[derive(Clone)]
pub struct PostWidderConfig {
    pub k: Vec<u32>,
    pub derivative_source: DerivativeSource,
}

/// Post-Widder output; `low_order_warning` flags k_j < 4.
#[derive(Debug, Clone)]
pub struct PostWidderOutput {
    pub value: Vec<Complex64>,
    pub low_order_warning: bool,
}

/// One Post-Widder step: Π_j [(−1)^{k_j}/k_j!·(k_j/t_j)^{k_j+1}] applied to
/// ∂^{k} F at λ_j = k_j/t_j. Products are assembled in log space so the
/// prefactor never overflows on its own.
pub fn post_widder_invert(
    big_f: &TransformFunction,
    t: &[f64],
    cfg: &PostWidderConfig,
) -> Result<PostWidderOutput> {
    let n = big_f.dims();
    if t.len() != n || cfg.k.len() != n {
        return Err(Error::Configuration("point/order dimension mismatch".into()));
    }
    if t.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("Post-Widder needs t_j > 0".into()));
    }
    if cfg.k.iter().any(|&k| k < 1) {
        return Err(Error::Domain("Post-Widder orders must be >= 1".into()));
    }
    let low_order_warning = cfg.k.iter().any(|&k| k < 4);

    let lambda: Vec<Complex64> = cfg
        .k
        .iter()
        .zip(t)
        .map(|(&k, &tj)| Complex64::new(k as f64 / tj, 0.0))
        .collect();
    let mut ln_pref = 0.0f64;
    for (&k, &tj) in cfg.k.iter().zip(t) {
        let ratio = k as f64 / tj;
        if !ratio.is_finite() {
            return Err(Error::Overflow("k_j/t_j left the representable range".into()));
        }
        ln_pref += (k as f64 + 1.0) * ratio.ln() - ln_gamma(k as f64 + 1.0);
    }
    if ln_pref > 700.0 {
        return Err(Error::Overflow(format!(
            "Post-Widder prefactor exp({ln_pref:.1}) exceeds f64 range; lower k or raise t"
        )));
    }
    let total: u32 = cfg.k.iter().sum();
    let sign = if total % 2 == 0 { 1.0 } else { -1.0 };

    let value = match &cfg.derivative_source {
        DerivativeSource::Analytic => {
            let d = big_f.derivative(&cfg.k, &lambda)?;
            let scale = sign * ln_pref.exp();
            d.into_iter().map(|z| z * scale).collect::<Vec<Complex64>>()
        }
        DerivativeSource::MomentQuadrature { f, cfg: qcfg } => {
            // fold everything into one weight per axis:
            //   w_j(s) = exp[(k_j+1)ln(k_j/t_j) + k_j ln s − ln k_j! − (k_j/t_j) s]
            // which peaks at s_j = t_j; the (−1)^{k} signs cancel between the
            // prefactor and the moment identity
            if f.dims() != n {
                return Err(Error::Configuration("moment function dimension mismatch".into()));
            }
            let ks: Vec<f64> = cfg.k.iter().map(|&k| k as f64).collect();
            let rate: Vec<f64> = ks.iter().zip(t).map(|(k, tj)| k / tj).collect();
            // truncation: k·(x − ln x − 1) ≥ 40 past the peak, plus envelope growth
            let mut hi = Vec::with_capacity(n);
            for j in 0..n {
                let k = ks[j];
                let mut x = 2.0f64;
                while k * (x - x.ln() - 1.0) - f.envelope.omega[j].max(0.0) * t[j] * x < 40.0 && x < 1e5 {
                    x *= 1.3;
                }
                hi.push(t[j] * x);
            }
            let ln_base: f64 = (0..n)
                .map(|j| (ks[j] + 1.0) * rate[j].ln() - ln_gamma(ks[j] + 1.0))
                .collect::<Vec<f64>>()
                .iter()
                .sum();
            let g = |s: &[f64], out: &mut [Complex64]| {
                f.eval_into(s, out);
                let mut ln_w = ln_base;
                for j in 0..n {
                    if s[j] <= 0.0 {
                        out.fill(Complex64::new(0.0, 0.0));
                        return;
                    }
                    ln_w += ks[j] * s[j].ln() - rate[j] * s[j];
                }
                let w = ln_w.exp();
                for v in out.iter_mut() {
                    *v *= w;
                }
            };
            let crude = integrate_box(&g, &hi, f.codim(), 0.05, Rule::GaussLegendre, AdaptiveOpts { max_segments: 3000, ..Default::default() });
            let out = integrate_box(
                &g,
                &hi,
                f.codim(),
                qcfg.rel_tol * (1.0 + max_norm(&crude.value)),
                Rule::GaussLegendre,
                AdaptiveOpts { parallel: n >= 2, ..Default::default() },
            );
            out.value
        }
    };
    Ok(PostWidderOutput { value, low_order_warning })
}

/// Post-Widder for the box primitive: applies the same kernel to
/// F(λ)/Πλ_j, recovering G(t) = ∫_{[0,t]} f.
pub fn post_widder_invert_g(
    big_f: &TransformFunction,
    t: &[f64],
    cfg: &PostWidderConfig,
) -> Result<PostWidderOutput> {
    let divided = big_f.divided_by_lambda()?;
    post_widder_invert(&divided, t, cfg)
}

/// Contour geometry for [`bromwich_invert`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum ContourShape {
    VerticalLine,
    SectorRays { angles: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct ContourConfig {
    /// per-axis abscissa c_j of the line (or sector shift); must clear ω_j
    pub offsets: Vec<f64>,
    /// per-axis half-length of the vertical line
    pub half_length: Vec<f64>,
    /// per-axis node budget
    pub nodes: Vec<usize>,
    pub shape: ContourShape,
}

impl ContourConfig {
    pub fn validate(&self, decay: &DecayBound) -> Result<()> {
        let n = decay.omega.len();
        if self.offsets.len() != n || self.half_length.len() != n || self.nodes.len() != n {
            return Err(Error::Configuration("contour arrays must match dims".into()));
        }
        for j in 0..n {
            if self.offsets[j] <= decay.omega[j] {
                return Err(Error::Configuration(format!(
                    "contour offset {} on axis {} does not clear omega = {}",
                    self.offsets[j],
                    j + 1,
                    decay.omega[j]
                )));
            }
            if !(self.half_length[j] > 0.0) {
                return Err(Error::Configuration("half_length must be positive".into()));
            }
            if self.nodes[j] < 8 {
                return Err(Error::Configuration("need at least 8 nodes per axis".into()));
            }
        }
        if let ContourShape::SectorRays { angles } = &self.shape {
            if angles.len() != n || angles.iter().any(|&g| !(g > 0.0 && g < std::f64::consts::FRAC_PI_2)) {
                return Err(Error::Configuration("sector angles must lie in (0, π/2)".into()));
            }
        }
        Ok(())
    }

    /// Default vertical-line contour: c_j = ω_j + 1 + 1/t_j, with the node
    /// budget scaled to resolve e^{iyt} oscillation across [−L, L].
    pub fn auto(decay: &DecayBound, t_max: &[f64], half_length: f64) -> ContourConfig {
        let offsets: Vec<f64> = decay
            .omega
            .iter()
            .zip(t_max)
            .map(|(&w, &tj)| w + 1.0 + 1.0 / tj.max(1e-3))
            .collect();
        let nodes: Vec<usize> = t_max
            .iter()
            .map(|&tj| ((1.2 * tj.max(0.5) * half_length / 16.0).ceil() as usize * 16).clamp(512, 6144))
            .collect();
        ContourConfig {
            offsets,
            half_length: vec![half_length; decay.omega.len()],
            nodes,
            shape: ContourShape::VerticalLine,
        }
    }
}

/// Inversion output with the decay-based truncation bound.
#[derive(Debug, Clone)]
pub struct BromwichOutput {
    pub value: Vec<Complex64>,
    pub tail_bound: f64,
}

// per-axis contour as (λ node, combined weight dλ·w/(2πi))
fn axis_contour(cfg: &ContourConfig, axis: usize, t_axis: f64) -> Vec<(Complex64, Complex64)> {
    let c = cfg.offsets[axis];
    match &cfg.shape {
        ContourShape::VerticalLine => {
            let l = cfg.half_length[axis];
            let n = cfg.nodes[axis];
            let panels = (n / 16).max(1);
            let (xs, ws) = gauss_legendre(16);
            let mut out = Vec::with_capacity(panels * 16);
            for p in 0..panels {
                let y0 = -l + 2.0 * l * p as f64 / panels as f64;
                let y1 = -l + 2.0 * l * (p + 1) as f64 / panels as f64;
                let mid = 0.5 * (y0 + y1);
                let half = 0.5 * (y1 - y0);
                for (&x, &w) in xs.iter().zip(&ws) {
                    let y = mid + half * x;
                    // λ = c + iy, dλ = i dy ⇒ dλ/(2πi) = dy/(2π)
                    out.push((
                        Complex64::new(c, y),
                        Complex64::new(w * half / (2.0 * std::f64::consts::PI), 0.0),
                    ));
                }
            }
            out
        }
        ContourShape::SectorRays { angles } => {
            let gamma = angles[axis];
            let theta = gamma + std::f64::consts::FRAC_PI_2;
            let r = 1.0 / t_axis.max(1e-6);
            // ray length: e^{s cosθ t} below 1e-18
            let s_max = r + 42.0 / (t_axis.max(1e-6) * (-theta.cos()));
            let n = cfg.nodes[axis];
            let arc_n = (n / 4).max(8);
            let ray_n = (3 * n / 8).max(8);
            let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
            let mut out = Vec::new();
            // lower ray: λ = c + s e^{-iθ}, s from s_max down to r ⇒ −∫_r^{s_max}
            let (xs, ws) = gauss_legendre(16);
            let unit_lo = Complex64::from_polar(1.0, -theta);
            let unit_hi = Complex64::from_polar(1.0, theta);
            let panels = (ray_n / 16).max(1);
            for p in 0..panels {
                let s0 = r + (s_max - r) * p as f64 / panels as f64;
                let s1 = r + (s_max - r) * (p + 1) as f64 / panels as f64;
                let mid = 0.5 * (s0 + s1);
                let half = 0.5 * (s1 - s0);
                for (&x, &w) in xs.iter().zip(&ws) {
                    let s = mid + half * x;
                    // lower ray traversed from far in toward the arc: weight −e^{−iθ}
                    out.push((
                        Complex64::new(c, 0.0) + s * unit_lo,
                        -(w * half) * unit_lo / two_pi_i,
                    ));
                    // upper ray outward: weight +e^{+iθ}
                    out.push((
                        Complex64::new(c, 0.0) + s * unit_hi,
                        (w * half) * unit_hi / two_pi_i,
                    ));
                }
            }
            // arc: λ = c + r e^{iφ}, φ from −θ to θ, dλ = i r e^{iφ} dφ
            let arc_panels = (arc_n / 16).max(1);
            for p in 0..arc_panels {
                let f0 = -theta + 2.0 * theta * p as f64 / arc_panels as f64;
                let f1 = -theta + 2.0 * theta * (p + 1) as f64 / arc_panels as f64;
                let mid = 0.5 * (f0 + f1);
                let half = 0.5 * (f1 - f0);
                for (&x, &w) in xs.iter().zip(&ws) {
                    let phi = mid + half * x;
                    let e = Complex64::from_polar(r, phi);
                    out.push((
                        Complex64::new(c, 0.0) + e,
                        (w * half) * Complex64::new(0.0, 1.0) * e / two_pi_i,
                    ));
                }
            }
            out
        }
    }
}

fn decay_majorant(decay: &DecayBound, lambda: &[Complex64]) -> f64 {
    let mut m = decay.m;
    for (l, e) in lambda.iter().zip(&decay.eps) {
        m *= l.norm().powf(-1.0 - e);
    }
    m
}

fn vertical_tail_bound(decay: &DecayBound, cfg: &ContourConfig, t: &[f64]) -> f64 {
    let n = t.len();
    let mut exp_prod = 1.0;
    for j in 0..n {
        exp_prod *= (cfg.offsets[j] * t[j]).exp() / (2.0 * std::f64::consts::PI);
    }
    let mut total = 0.0;
    for j in 0..n {
        let mut b = 2.0 * cfg.half_length[j].powf(-decay.eps[j]) / decay.eps[j];
        for i in 0..n {
            if i != j {
                b *= 2.0 * cfg.offsets[i].powf(-decay.eps[i]) * (1.0 + 1.0 / decay.eps[i]);
            }
        }
        total += b;
    }
    decay.m * exp_prod * total
}

/// (2πi)^{−n} ∫_{Γ₁}…∫_{Γₙ} e^{λ·t} F(λ) dλ on truncated contours.
pub fn bromwich_invert(
    big_f: &TransformFunction,
    t: &[f64],
    cfg: &ContourConfig,
) -> Result<BromwichOutput> {
    cfg.validate(&big_f.decay)?;
    let n = big_f.dims();
    if t.len() != n {
        return Err(Error::Configuration("point dimension mismatch".into()));
    }
    if t.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("inversion needs t_j > 0".into()));
    }
    let contours: Vec<Vec<(Complex64, Complex64)>> =
        (0..n).map(|j| axis_contour(cfg, j, t[j])).collect();

    decay_check(big_f, &contours)?;

    // tensor sum over node tuples; n = 2 parallelises over the first axis
    let codim = big_f.codim();
    let value = if n == 2 {
        let rows: Vec<Vec<Complex64>> = contours[0]
            .par_iter()
            .map(|&(l0, w0)| {
                let e0 = (l0 * t[0]).exp() * w0;
                let mut acc = vec![Complex64::new(0.0, 0.0); codim];
                let mut buf = vec![Complex64::new(0.0, 0.0); codim];
                for &(l1, w1) in &contours[1] {
                    let e1 = (l1 * t[1]).exp() * w1;
                    big_f.eval_into(&[l0, l1], &mut buf);
                    for (a, v) in acc.iter_mut().zip(&buf) {
                        *a += e0 * e1 * v;
                    }
                }
                acc
            })
            .collect();
        let mut value = vec![Complex64::new(0.0, 0.0); codim];
        for r in rows {
            for (a, v) in value.iter_mut().zip(&r) {
                *a += v;
            }
        }
        value
    } else {
        let mut value = vec![Complex64::new(0.0, 0.0); codim];
        let mut idx = vec![0usize; n];
        let mut buf = vec![Complex64::new(0.0, 0.0); codim];
        let mut lam = vec![Complex64::new(0.0, 0.0); n];
        loop {
            let mut w = Complex64::new(1.0, 0.0);
            for j in 0..n {
                let (l, wj) = contours[j][idx[j]];
                lam[j] = l;
                w *= (l * t[j]).exp() * wj;
            }
            big_f.eval_into(&lam, &mut buf);
            for (a, v) in value.iter_mut().zip(&buf) {
                *a += w * v;
            }
            // odometer
            let mut j = 0;
            loop {
                idx[j] += 1;
                if idx[j] < contours[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == n {
                    return Ok(BromwichOutput {
                        value,
                        tail_bound: vertical_tail_bound(&big_f.decay, cfg, t),
                    });
                }
            }
        }
    };
    let tail_bound = match cfg.shape {
        ContourShape::VerticalLine => vertical_tail_bound(&big_f.decay, cfg, t),
        // ray truncation is chosen for e^{Re λ t} < 1e-18
        ContourShape::SectorRays { .. } => 1e-15 * (1.0 + max_norm(&value)),
    };
    Ok(BromwichOutput { value, tail_bound })
}

fn decay_check(big_f: &TransformFunction, contours: &[Vec<(Complex64, Complex64)>]) -> Result<()> {
    // sample a handful of diagonal-ish node tuples against 10x the majorant
    let n = contours.len();
    let samples = 12.min(contours.iter().map(|c| c.len()).min().unwrap_or(0));
    for s in 0..samples {
        let lam: Vec<Complex64> = (0..n)
            .map(|j| contours[j][s * contours[j].len() / samples.max(1)].0)
            .collect();
        let val = max_norm(&big_f.eval(&lam));
        let cap = 10.0 * decay_majorant(&big_f.decay, &lam);
        if val > cap && cap.is_finite() {
            return Err(Error::DecayViolation(format!(
                "sampled |F| = {val:.3e} exceeds 10x the declared majorant {cap:.3e}"
            )));
        }
    }
    Ok(())
}

/// Grid inversion sharing one contour and one pass of F evaluations
/// (n = 2 caches the weighted tensor of F values; higher n falls back to
/// per-point evaluation).
pub fn bromwich_invert_grid(
    big_f: &TransformFunction,
    t_grid: &[Vec<f64>],
    cfg: &ContourConfig,
) -> Result<Vec<BromwichOutput>> {
    cfg.validate(&big_f.decay)?;
    let n = big_f.dims();
    if n != 2 || t_grid.is_empty() {
        return t_grid.iter().map(|t| bromwich_invert(big_f, t, cfg)).collect();
    }
    let t_ref: Vec<f64> = (0..n)
        .map(|j| t_grid.iter().map(|t| t[j]).fold(0.0f64, f64::max))
        .collect();
    let c0 = axis_contour(cfg, 0, t_ref[0]);
    let c1 = axis_contour(cfg, 1, t_ref[1]);
    decay_check(big_f, &[c0.clone(), c1.clone()])?;
    let codim = big_f.codim();
    let (n0, n1) = (c0.len(), c1.len());
    // cached w_i w_j F(λ_i, μ_j), laid out row-major per component
    let cached: Vec<Vec<Complex64>> = c0
        .par_iter()
        .map(|&(l0, w0)| {
            let mut row = vec![Complex64::new(0.0, 0.0); n1 * codim];
            let mut buf = vec![Complex64::new(0.0, 0.0); codim];
            for (jj, &(l1, w1)) in c1.iter().enumerate() {
                big_f.eval_into(&[l0, l1], &mut buf);
                for (c, v) in buf.iter().enumerate() {
                    row[jj * codim + c] = w0 * w1 * v;
                }
            }
            row
        })
        .collect();

    let outputs: Vec<BromwichOutput> = t_grid
        .par_iter()
        .map(|t| {
            let e1: Vec<Complex64> = c1.iter().map(|&(l1, _)| (l1 * t[1]).exp()).collect();
            let mut value = vec![Complex64::new(0.0, 0.0); codim];
            for i in 0..n0 {
                let e0 = (c0[i].0 * t[0]).exp();
                let row = &cached[i];
                for c in 0..codim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (jj, e) in e1.iter().enumerate() {
                        acc += row[jj * codim + c] * e;
                    }
                    value[c] += e0 * acc;
                }
            }
            BromwichOutput {
                value,
                tail_bound: match cfg.shape {
                    ContourShape::VerticalLine => vertical_tail_bound(&big_f.decay, cfg, t),
                    ContourShape::SectorRays { .. } => 1e-15,
                },
            }
        })
        .collect();
    Ok(outputs)
}

/// Extrapolated limit output.
#[derive(Debug, Clone)]
pub struct TauberianOutput {
    pub value: Vec<Complex64>,
    pub err_estimate: f64,
    pub converged: bool,
}

fn aitken_accelerate(seq: &[Vec<Complex64>]) -> (Vec<Complex64>, f64) {
    let mut cur: Vec<Vec<Complex64>> = seq.to_vec();
    while cur.len() >= 3 {
        let mut next = Vec::with_capacity(cur.len() - 2);
        for w in cur.windows(3) {
            let out: Vec<Complex64> = (0..w[0].len())
                .map(|c| {
                    let (x0, x1, x2) = (w[0][c], w[1][c], w[2][c]);
                    let denom = x2 - 2.0 * x1 + x0;
                    if denom.norm() < 1e-300 {
                        x2
                    } else {
                        x2 - (x2 - x1) * (x2 - x1) / denom
                    }
                })
                .collect();
            next.push(out);
        }
        if next.len() < 3 {
            let k = next.len();
            let err = if k >= 2 {
                max_norm(&sub(&next[k - 1], &next[k - 2]))
            } else if !cur.is_empty() {
                max_norm(&sub(&next[0], cur.last().unwrap()))
            } else {
                f64::NAN
            };
            return (next.last().unwrap().clone(), err);
        }
        cur = next;
    }
    let k = cur.len();
    let err = if k >= 2 { max_norm(&sub(&cur[k - 1], &cur[k - 2])) } else { f64::NAN };
    (cur.last().unwrap().clone(), err)
}

fn tauberian_core(
    big_f: &TransformFunction,
    probe: &[f64],
) -> Result<TauberianOutput> {
    if probe.len() < 4 {
        return Err(Error::Configuration("tauberian probes need >= 4 points".into()));
    }
    let n = big_f.dims();
    let seq: Vec<Vec<Complex64>> = probe
        .iter()
        .map(|&s| {
            let lam = vec![Complex64::new(s, 0.0); n];
            let prod: Complex64 = lam.iter().product();
            big_f.eval(&lam).into_iter().map(|v| v * prod).collect()
        })
        .collect();
    // raw increments must shrink for the extrapolation to be trusted
    let incr: Vec<f64> = seq.windows(2).map(|w| max_norm(&sub(&w[1], &w[0]))).collect();
    let tailavg = |v: &[f64]| v.iter().rev().take(2).sum::<f64>() / 2.0;
    let headavg = |v: &[f64]| v.iter().take(2).sum::<f64>() / 2.0;
    let converged = tailavg(&incr) <= headavg(&incr) + 1e-12 * (1.0 + max_norm(&seq[0]));
    let (value, err_estimate) = aitken_accelerate(&seq);
    Ok(TauberianOutput { value, err_estimate, converged })
}

/// lim_{λ→+∞ diagonally} λ₁·…·λₙ·F(λ) — the initial value f(0,…,0).
pub fn tauberian_initial(big_f: &TransformFunction, probe: &[f64]) -> Result<TauberianOutput> {
    if probe.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Configuration("initial-value probes must increase".into()));
    }
    tauberian_core(big_f, probe)
}

/// lim_{λ→0⁺ diagonally} λ₁·…·λₙ·F(λ) — the value of f at infinity
/// (caller asserts the boundedness hypothesis ω = 0).
pub fn tauberian_final(big_f: &TransformFunction, probe: &[f64]) -> Result<TauberianOutput> {
    if probe.windows(2).any(|w| w[0] <= w[1]) || probe.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Configuration(
            "final-value probes must decrease through positive values".into(),
        ));
    }
    tauberian_core(big_f, probe)
}

/// Uniqueness gate + reconstruction-level discrepancy report.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub gate_passed: bool,
    pub max_transform_gap: f64,
    pub max_reconstruction_gap: f64,
}

/// If F₁ ≈ F₂ on the λ grid (gate `tol_in`), the reconstruction gap
/// max_t ‖PW(F₁) − PW(F₂)‖ is the discrepancy that uniqueness forces
/// toward zero. Both gaps are reported either way.
pub fn uniqueness_check(
    f1: &TransformFunction,
    f2: &TransformFunction,
    lambda_grid: &[Vec<f64>],
    t_grid: &[Vec<f64>],
    cfg: &PostWidderConfig,
    tol_in: f64,
) -> Result<UniquenessReport> {
    let n = f1.dims();
    if f2.dims() != n || f1.codim() != f2.codim() {
        return Err(Error::Configuration("transform shape mismatch".into()));
    }
    let mut max_transform_gap = 0.0f64;
    for row in lambda_grid {
        let lam: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        max_transform_gap = max_transform_gap.max(max_norm(&sub(&f1.eval(&lam), &f2.eval(&lam))));
    }
    let mut max_reconstruction_gap = 0.0f64;
    for t in t_grid {
        let a = post_widder_invert(f1, t, cfg)?;
        let b = post_widder_invert(f2, t, cfg)?;
        max_reconstruction_gap = max_reconstruction_gap.max(max_norm(&sub(&a.value, &b.value)));
    }
    Ok(UniquenessReport {
        gate_passed: max_transform_gap < tol_in,
        max_transform_gap,
        max_reconstruction_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // φ(λ) = (λ+a)^{-q}: φ^{(k)} = (−1)^k Γ(q+k)/Γ(q) (λ+a)^{−q−k}
    fn pole_factor(a: f64, q: u32) -> AxisFactor {
        AxisFactor {
            eval: Arc::new(move |l: Complex64| (l + a).powi(-(q as i32))),
            deriv: Some(Arc::new(move |k: u32, l: Complex64| {
                let qf = q as f64;
                let ln_mag = ln_gamma(qf + k as f64) - ln_gamma(qf);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let base = (l + a).powf(-(qf + k as f64));
                sign * ln_mag.exp() * base
            })),
        }
    }

    fn sep_shifted_pole() -> TransformFunction {
        TransformFunction::separable(
            vec![pole_factor(1.0, 1), pole_factor(1.0, 1)],
            DecayBound { m: 1.5, omega: vec![0.0, 0.0], eps: vec![0.9, 0.9] },
        )
        .unwrap()
    }

    fn sep_pole() -> TransformFunction {
        TransformFunction::separable(
            vec![pole_factor(0.0, 2), pole_factor(0.0, 2)],
            DecayBound { m: 1.5, omega: vec![0.0, 0.0], eps: vec![1.0, 1.0] },
        )
        .unwrap()
    }

    #[test]
    fn post_widder_constant_is_fixed_point() {
        // F = 1/(λ1 λ2) (f ≡ 1): exact at every order
        let f = TransformFunction::separable(
            vec![pole_factor(0.0, 1), pole_factor(0.0, 1)],
            DecayBound { m: 1.0, omega: vec![0.0, 0.0], eps: vec![0.1, 0.1] },
        )
        .unwrap();
        for &k in &[1u32, 5, 32] {
            let out = post_widder_invert(
                &f,
                &[1.0, 2.0],
                &PostWidderConfig { k: vec![k, k], derivative_source: DerivativeSource::Analytic },
            )
            .unwrap();
            assert_relative_eq!(out.value[0].re, 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn post_widder_exponential_convergence_order() {
        // target e^{-t1-t2} at (1,1): per-axis value (k/(k+1))^{k+1},
        // reference errors frozen from the closed form
        let f = sep_shifted_pole();
        let mut errs = Vec::new();
        for &k in &[8u32, 16, 32, 64] {
            let out = post_widder_invert(
                &f,
                &[1.0, 1.0],
                &PostWidderConfig { k: vec![k, k], derivative_source: DerivativeSource::Analytic },
            )
            .unwrap();
            let err = (out.value[0].re - (-2.0f64).exp()).abs();
            errs.push(err);
            let expect = ((k as f64 / (k as f64 + 1.0)).powi(2 * (k as i32 + 1)) - (-2.0f64).exp()).abs();
            assert_relative_eq!(err, expect, max_relative = 1e-6);
        }
        assert!(errs[2] <= 0.05, "k=32 error {}", errs[2]);
        for w in errs.windows(2) {
            assert!(w[1] <= 1.1 * w[0], "errors not non-increasing: {errs:?}");
        }
    }

    #[test]
    fn post_widder_polynomial_target_exact_form() {
        // F = 1/(λ1² λ2): f = t1; the k-th order value is exactly t1 (k+1)/k
        let f = TransformFunction::separable(
            vec![pole_factor(0.0, 2), pole_factor(0.0, 1)],
            DecayBound { m: 1.0, omega: vec![0.0, 0.0], eps: vec![1.0, 0.1] },
        )
        .unwrap();
        let out = post_widder_invert(
            &f,
            &[2.0, 1.0],
            &PostWidderConfig { k: vec![32, 32], derivative_source: DerivativeSource::Analytic },
        )
        .unwrap();
        assert_relative_eq!(out.value[0].re, 2.0 * 33.0 / 32.0, max_relative = 1e-9);
        // trend toward the target
        let out64 = post_widder_invert(
            &f,
            &[2.0, 1.0],
            &PostWidderConfig { k: vec![64, 64], derivative_source: DerivativeSource::Analytic },
        )
        .unwrap();
        assert!((out64.value[0].re - 2.0).abs() < (out.value[0].re - 2.0).abs());
    }

    #[test]
    fn post_widder_low_order_flag_and_guards() {
        let f = sep_shifted_pole();
        let out = post_widder_invert(
            &f,
            &[1.0, 1.0],
            &PostWidderConfig { k: vec![2, 2], derivative_source: DerivativeSource::Analytic },
        )
        .unwrap();
        assert!(out.low_order_warning);
        assert!(post_widder_invert(
            &f,
            &[0.0, 1.0],
            &PostWidderConfig { k: vec![4, 4], derivative_source: DerivativeSource::Analytic }
        )
        .is_err());
    }

    #[test]
    fn post_widder_g_route_matches_box_primitive() {
        // f ≡ 1: G(t) = t1 t2; PW on F/Πλ with F = 1/(λ1λ2) targets G
        let f = TransformFunction::separable(
            vec![pole_factor(0.0, 1), pole_factor(0.0, 1)],
            DecayBound { m: 1.0, omega: vec![0.0, 0.0], eps: vec![0.1, 0.1] },
        )
        .unwrap();
        let out = post_widder_invert_g(
            &f,
            &[1.0, 2.0],
            &PostWidderConfig { k: vec![64, 64], derivative_source: DerivativeSource::Analytic },
        )
        .unwrap();
        // target G = 2, kernel error ~ t(k+1)/k per axis
        assert_relative_eq!(out.value[0].re, 2.0 * (65.0f64 / 64.0).powi(2), max_relative = 1e-8);
    }

    #[test]
    fn bromwich_vertical_known_pairs() {
        let cfg = ContourConfig {
            offsets: vec![1.0, 1.0],
            half_length: vec![200.0, 200.0],
            nodes: vec![2048, 2048],
            shape: ContourShape::VerticalLine,
        };
        let out = bromwich_invert(&sep_pole(), &[2.0, 3.0], &cfg).unwrap();
        assert!((out.value[0].re - 6.0).abs() < 1e-4, "got {}", out.value[0].re);
        assert!(out.value[0].im.abs() < 1e-6);

        let out = bromwich_invert(&sep_shifted_pole(), &[1.0, 1.0], &cfg).unwrap();
        assert!((out.value[0].re - (-2.0f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn bromwich_sector_rays_exponential() {
        let cfg = ContourConfig {
            offsets: vec![0.1, 0.1],
            half_length: vec![50.0, 50.0],
            nodes: vec![512, 512],
            shape: ContourShape::SectorRays { angles: vec![0.7, 0.7] },
        };
        // poles at −1 lie outside the sector product; exponential decay on rays
        let out = bromwich_invert(&sep_shifted_pole(), &[1.0, 1.5], &cfg).unwrap();
        assert!(
            (out.value[0].re - (-2.5f64).exp()).abs() < 1e-7,
            "got {} want {}",
            out.value[0].re,
            (-2.5f64).exp()
        );
    }

    #[test]
    fn bromwich_decay_violation_detected() {
        // declare a wildly optimistic majorant: |F| must exceed 10x it
        let f = TransformFunction::separable(
            vec![pole_factor(1.0, 1), pole_factor(1.0, 1)],
            DecayBound { m: 1e-9, omega: vec![0.0, 0.0], eps: vec![0.9, 0.9] },
        )
        .unwrap();
        let cfg = ContourConfig {
            offsets: vec![1.0, 1.0],
            half_length: vec![50.0, 50.0],
            nodes: vec![256, 256],
            shape: ContourShape::VerticalLine,
        };
        assert!(matches!(
            bromwich_invert(&f, &[1.0, 1.0], &cfg),
            Err(Error::DecayViolation(_))
        ));
    }

    #[test]
    fn tauberian_examples() {
        let probes: Vec<f64> = (1..=8).map(|k| 4.0 * 2f64.powi(k)).collect();
        let out = tauberian_initial(&sep_shifted_pole(), &probes).unwrap();
        assert!((out.value[0].re - 1.0).abs() < 1e-3, "{}", out.value[0].re);

        let f_inv = TransformFunction::separable(
            vec![pole_factor(0.0, 1), pole_factor(0.0, 1)],
            DecayBound { m: 1.0, omega: vec![0.0, 0.0], eps: vec![0.1, 0.1] },
        )
        .unwrap();
        let out = tauberian_initial(&f_inv, &probes).unwrap();
        assert!((out.value[0].re - 1.0).abs() < 1e-9);

        let out = tauberian_initial(&sep_pole(), &probes).unwrap();
        assert!(out.value[0].norm() < 1e-6);

        let down: Vec<f64> = (1..=8).map(|k| 0.5f64.powi(k)).collect();
        let out = tauberian_final(&sep_shifted_pole(), &down).unwrap();
        assert!(out.value[0].norm() < 1e-3);
        let out = tauberian_final(&f_inv, &down).unwrap();
        assert!((out.value[0].re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniqueness_gate_and_reconstruction() {
        let f1 = TransformFunction::separable(
            vec![pole_factor(0.0, 1), pole_factor(0.0, 1)],
            DecayBound { m: 1.0, omega: vec![0.0, 0.0], eps: vec![0.1, 0.1] },
        )
        .unwrap();
        let lam_grid: Vec<Vec<f64>> = vec![vec![2.0, 2.0], vec![3.0, 5.0], vec![8.0, 4.0]];
        let t_grid: Vec<Vec<f64>> = vec![vec![1.0, 1.0], vec![0.5, 2.0]];
        let cfg = PostWidderConfig { k: vec![16, 16], derivative_source: DerivativeSource::Analytic };
        let rep = uniqueness_check(&f1, &f1.clone(), &lam_grid, &t_grid, &cfg, 1e-8).unwrap();
        assert!(rep.gate_passed);
        assert_eq!(rep.max_reconstruction_gap, 0.0);

        // shifted copy must fail the gate and show a large reconstruction gap
        let f2 = TransformFunction::new(
            2,
            1,
            f1.decay.clone(),
            |l: &[Complex64], out: &mut [Complex64]| {
                out[0] = (l[0] * l[1]).inv() + 0.1;
            },
        )
        .unwrap()
        .with_derivatives(|_v, _l, out| {
            out[0] = Complex64::new(f64::NAN, 0.0);
        });
        let rep = uniqueness_check(&f1, &f2, &lam_grid, &[], &cfg, 1e-8).unwrap();
        assert!(!rep.gate_passed);
        assert!(rep.max_transform_gap > 0.05);
    }

    #[test]
    fn holomorphy_spot_check() {
        let f = sep_shifted_pole();
        let pts = vec![vec![c(2.0, 0.3), c(1.5, -0.2)], vec![c(3.0, 1.0), c(2.0, 0.0)]];
        assert!(f.spot_check_holomorphic(&pts, 1e-4) < 1e-4);
    }
}
