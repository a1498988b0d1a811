//! Operational rules of the transform — shift, delay, damping,
//! derivative-of-transform, fractional integrals, Faltung convolution and
//! the 1D higher-derivative rule — each computable as two independent sides.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::VectorFunction;
use crate::gamma::recip_gamma;
use crate::quad::{adaptive_1d, max_norm, sub, tanh_sinh_integrate, AdaptiveOpts};
use crate::transform::{auto_truncation, laplace_nd, LaplacePoint, QuadratureConfig};

/// Nonnegative per-axis shift amounts.
#[derive(Debug, Clone)]
pub struct ShiftVector {
    pub h: Vec<f64>,
}

impl ShiftVector {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Domain("shift components must be finite and >= 0".into()));
        }
        Ok(ShiftVector { h })
    }
}

/// Per-axis complex damping exponents.
#[derive(Debug, Clone)]
pub struct DampingVector {
    pub z: Vec<Complex64>,
}

impl DampingVector {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("damping components must be finite".into()));
        }
        Ok(DampingVector { z })
    }
}

/// Multi-index of differentiation orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    pub v: Vec<u32>,
}

impl MultiIndex {
    pub fn new(v: Vec<u32>) -> Self {
        MultiIndex { v }
    }

    pub fn total(&self) -> u32 {
        self.v.iter().sum()
    }
}

fn dot(lambda: &[Complex64], h: &[f64]) -> Complex64 {
    lambda.iter().zip(h).map(|(l, x)| l * *x).sum()
}

/// Both sides of the shift rule for f_h(t) = f(t + h):
/// lhs = L f_h directly; rhs = e^{λ·h} L f − e^{λ·h} ∫_{[0,∞)^n \ H} e^{−λ·t} f,
/// the complement integral expanded by inclusion-exclusion over the 2^n − 1
/// sub-boxes with at least one coordinate below h_j.
pub fn shift_transform(
    f: &VectorFunction,
    h: &ShiftVector,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = f.dims();
    if h.h.len() != n || p.dims() != n {
        return Err(Error::Configuration("shift/point dimension mismatch".into()));
    }
    let lhs = laplace_nd(&f.shifted(h.h.clone()), p, cfg)?.value;

    let lf = laplace_nd(f, p, cfg)?.value;
    let re: Vec<f64> = p.lambda.iter().map(|z| z.re).collect();
    let (trunc, _) = auto_truncation(&f.envelope, &re, cfg.rel_tol / 10.0)?;

    // inclusion-exclusion over nonempty S ⊆ axes: box with t_j <= h_j on S
    let mut complement = vec![Complex64::new(0.0, 0.0); f.codim()];
    for mask in 1u32..(1 << n) {
        let hi: Vec<f64> = (0..n)
            .map(|j| if mask & (1 << j) != 0 { h.h[j] } else { trunc[j] })
            .collect();
        if hi.iter().any(|&x| x == 0.0) {
            continue;
        }
        let g = |t: &[f64], out: &mut [Complex64]| {
            f.eval_into(t, out);
            let w = (-dot(&p.lambda, t)).exp();
            for v in out.iter_mut() {
                *v *= w;
            }
        };
        let part = crate::quad::integrate_box(
            &g,
            &hi,
            f.codim(),
            cfg.rel_tol * 0.1 * (1.0 + max_norm(&lf)),
            cfg.rule,
            AdaptiveOpts::default(),
        );
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        for (c, v) in complement.iter_mut().zip(&part.value) {
            *c += sign * v;
        }
    }
    let scale = dot(&p.lambda, &h.h).exp();
    let rhs: Vec<Complex64> = lf
        .iter()
        .zip(&complement)
        .map(|(a, b)| scale * (a - b))
        .collect();
    Ok((lhs, rhs))
}

/// Delay rule: L f_{h−}(p) = e^{−λ·h} (L f)(p).
pub fn delay_transform(
    f: &VectorFunction,
    h: &ShiftVector,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    if h.h.len() != f.dims() {
        return Err(Error::Configuration("shift dimension mismatch".into()));
    }
    let lf = laplace_nd(f, p, cfg)?.value;
    let w = (-dot(&p.lambda, &h.h)).exp();
    Ok(lf.into_iter().map(|v| v * w).collect())
}

/// Damping rule: L[e^{−z·t} f](p) = (L f)(p + z).
pub fn damping_transform(
    f: &VectorFunction,
    z: &DampingVector,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    if z.z.len() != f.dims() {
        return Err(Error::Configuration("damping dimension mismatch".into()));
    }
    let shifted = LaplacePoint::new(
        p.lambda.iter().zip(&z.z).map(|(l, w)| l + w).collect(),
    )?;
    Ok(laplace_nd(f, &shifted, cfg)?.value)
}

/// Exact mixed partial ∂^v F(p) via the moment identity
/// ∂^v F = (−1)^{|v|} L[(Π t^{v_j}/v_j!) f] · Π v_j! — no numerical
/// differentiation anywhere.
pub fn transform_derivative(
    f: &VectorFunction,
    v: &MultiIndex,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    if v.v.len() != f.dims() {
        return Err(Error::Configuration("multi-index dimension mismatch".into()));
    }
    if v.total() == 0 {
        return Ok(laplace_nd(f, p, cfg)?.value);
    }
    let weighted = f.moment_weighted(v.v.clone());
    let lt = laplace_nd(&weighted, p, cfg)?.value;
    let mut fact = 1.0f64;
    for &vj in &v.v {
        for k in 2..=vj {
            fact *= k as f64;
        }
    }
    let sign = if v.total() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(lt.into_iter().map(|x| x * sign * fact).collect())
}

/// J^α along one axis: ∫_0^{t_axis} g_α(t_axis − s) f(…, s, …) ds with the
/// other coordinates held fixed. The kernel is weakly singular at s = t for
/// α < 1; tanh-sinh handles that without special casing.
pub fn fractional_integral(
    f: &VectorFunction,
    axis: usize,
    alpha: f64,
    t: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    if !(alpha > 0.0) {
        return Err(Error::Domain("fractional order must be > 0".into()));
    }
    if axis >= f.dims() || t.len() != f.dims() {
        return Err(Error::Configuration("axis/point dimension mismatch".into()));
    }
    if t.iter().any(|&x| x < 0.0) {
        return Err(Error::Domain("fractional integral needs t >= 0".into()));
    }
    let upper = t[axis];
    if upper == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); f.codim()]);
    }
    let rg = recip_gamma(alpha);
    let g = |s: f64, out: &mut [Complex64]| {
        let mut pt = t.to_vec();
        pt[axis] = s;
        f.eval_into(&pt, out);
        let k = (upper - s).powf(alpha - 1.0) * rg;
        for v in out.iter_mut() {
            *v *= k;
        }
    };
    if alpha >= 1.0 {
        adaptive_1d(&g, 0.0, upper, f.codim(), cfg.rel_tol * 0.1, AdaptiveOpts::default())
            .converged_value()
    } else {
        Ok(tanh_sinh_integrate(&g, 0.0, upper, f.codim(), 160))
    }
}

/// The Faltung convolution (a ∗₀ f)(t) = ∫_{[0,t]} a(t−s) f(s) ds for a
/// scalar kernel a, evaluated by tensor tanh-sinh (robust to g_α kernels).
pub fn faltung_convolve(
    a: &VectorFunction,
    f: &VectorFunction,
    t: &[f64],
    _cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    let conv = convolution_as_function(a, f)?;
    if t.len() != f.dims() {
        return Err(Error::Configuration("point dimension mismatch".into()));
    }
    if t.iter().any(|&x| x < 0.0) {
        return Err(Error::Domain("convolution needs t >= 0".into()));
    }
    Ok(conv.eval(t))
}

/// Wrap (a ∗₀ f) as a `VectorFunction` with the combined envelope.
pub fn convolution_as_function(a: &VectorFunction, f: &VectorFunction) -> Result<VectorFunction> {
    if a.codim() != 1 {
        return Err(Error::Domain("the Faltung kernel must be scalar-valued".into()));
    }
    if a.dims() != f.dims() {
        return Err(Error::Configuration("kernel/function dimension mismatch".into()));
    }
    let n = f.dims();
    let codim = f.codim();
    let (ac, fc) = (a.clone(), f.clone());
    let env = a.envelope.convolve(&f.envelope);

    // iterated tanh-sinh per axis, single fixed pass per level
    fn conv_level(
        a: &VectorFunction,
        f: &VectorFunction,
        t: &[f64],
        prefix: &[f64],
        out: &mut [Complex64],
    ) {
        let k = prefix.len();
        let inner = |s: f64, buf: &mut [Complex64]| {
            let mut pfx = prefix.to_vec();
            pfx.push(s);
            if pfx.len() == t.len() {
                // kernel argument t - s, function argument s
                let diff: Vec<f64> = t.iter().zip(&pfx).map(|(x, y)| x - y).collect();
                let mut av = [Complex64::new(0.0, 0.0)];
                a.eval_into(&diff, &mut av);
                f.eval_into(&pfx, buf);
                for v in buf.iter_mut() {
                    *v *= av[0];
                }
            } else {
                conv_level(a, f, t, &pfx, buf);
            }
        };
        let v = tanh_sinh_integrate(&inner, 0.0, t[k], f.codim(), 64);
        out.copy_from_slice(&v);
    }

    VectorFunction::new(n, codim, env, move |t: &[f64], out: &mut [Complex64]| {
        if t.iter().any(|&x| x <= 0.0) {
            out.fill(Complex64::new(0.0, 0.0));
            return;
        }
        conv_level(&ac, &fc, t, &[], out);
    })
}

/// Relative discrepancy between L(a ∗₀ f)(p) and (L a)(p)·(L f)(p).
pub fn convolution_theorem_check(
    a: &VectorFunction,
    f: &VectorFunction,
    p: &LaplacePoint,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let conv = convolution_as_function(a, f)?;
    let lhs = laplace_nd(&conv, p, cfg)?.value;
    let la = laplace_nd(a, p, cfg)?.value[0];
    let lf = laplace_nd(f, p, cfg)?.value;
    let rhs: Vec<Complex64> = lf.into_iter().map(|v| v * la).collect();
    Ok(max_norm(&sub(&lhs, &rhs)) / (1.0 + max_norm(&rhs)))
}

trait ConvergedValue {
    fn converged_value(self) -> Result<Vec<Complex64>>;
}

impl ConvergedValue for crate::quad::QuadOutcome {
    fn converged_value(self) -> Result<Vec<Complex64>> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature(format!("refinement budget exhausted, err {:.3e}", self.err_est)))
        }
    }
}

/// A one-variable function presented by its transform and the derivative
/// values f(0), f'(0), …, needed by the higher-derivative rule.
#[derive(Clone)]
pub struct Function1d {
    pub codim: usize,
    pub transform: Arc<dyn Fn(Complex64) -> Vec<Complex64> + Send + Sync>,
    /// derivs_at_zero[k] = f^{(k)}(0)
    pub derivs_at_zero: Vec<Vec<Complex64>>,
}

/// L[f^{(m)}](λ) from the right-hand side
/// λ^m F(λ) − λ^{m−1} f(0) − λ^{m−2} f'(0) − … − f^{(m−1)}(0).
pub fn higher_derivative_transform_1d(
    f: &Function1d,
    m: usize,
    lambda: Complex64,
) -> Result<Vec<Complex64>> {
    if m < 1 {
        return Err(Error::Domain("derivative order m must be >= 1".into()));
    }
    if f.derivs_at_zero.len() < m {
        return Err(Error::Configuration(format!(
            "need {m} initial derivative values, got {}",
            f.derivs_at_zero.len()
        )));
    }
    let fv = (f.transform)(lambda);
    let mut out: Vec<Complex64> = fv.into_iter().map(|v| v * lambda.powu(m as u32)).collect();
    for k in 0..m {
        let pw = lambda.powu((m - 1 - k) as u32);
        for (o, d) in out.iter_mut().zip(&f.derivs_at_zero[k]) {
            *o -= pw * d;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Envelope;
    use crate::transform::Mode;
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

    fn tt() -> VectorFunction {
        VectorFunction::scalar(
            2,
            Envelope { m: 1.0, omega: vec![0.0, 0.0], eta: vec![1.0, 1.0], zeta: vec![1.0, 1.0] },
            |t| c(t[0] * t[1], 0.0),
        )
        .unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig { rel_tol: 1e-8, ..QuadratureConfig::default_for(Mode::Absolute, 2) }
    }

    #[test]
    fn shift_rule_closes_for_constant() {
        let h = ShiftVector::new(vec![1.0, 1.0]).unwrap();
        let (lhs, rhs) = shift_transform(&one_2d(), &h, &LaplacePoint::real(&[1.0, 1.0]), &cfg()).unwrap();
        assert_relative_eq!(lhs[0].re, 1.0, max_relative = 1e-6);
        assert!((lhs[0] - rhs[0]).norm() < 1e-6);
    }

    #[test]
    fn shift_rule_separable_exponential() {
        let h = ShiftVector::new(vec![1.0, 0.0]).unwrap();
        let (lhs, rhs) = shift_transform(&exp_decay_2d(), &h, &LaplacePoint::real(&[1.0, 1.0]), &cfg()).unwrap();
        let expect = (-1.0f64).exp() / 4.0;
        assert_relative_eq!(lhs[0].re, expect, max_relative = 1e-6);
        assert!((lhs[0] - rhs[0]).norm() < 1e-6);
    }

    #[test]
    fn shift_rule_polynomial() {
        let h = ShiftVector::new(vec![1.0, 2.0]).unwrap();
        let (lhs, rhs) = shift_transform(&tt(), &h, &LaplacePoint::real(&[2.0, 2.0]), &cfg()).unwrap();
        assert!((lhs[0] - rhs[0]).norm() < 1e-6, "lhs {lhs:?} rhs {rhs:?}");
    }

    #[test]
    fn delay_examples() {
        let v = delay_transform(
            &one_2d(),
            &ShiftVector::new(vec![1.0, 2.0]).unwrap(),
            &LaplacePoint::real(&[1.0, 1.0]),
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(v[0].re, (-3.0f64).exp(), max_relative = 1e-6);

        let v = delay_transform(
            &exp_decay_2d(),
            &ShiftVector::new(vec![0.0, 0.0]).unwrap(),
            &LaplacePoint::real(&[1.0, 1.0]),
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(v[0].re, 0.25, max_relative = 1e-6);

        // f = t1: delayed by (1,1) at λ=(1,2): e^{-3}/2
        let f = VectorFunction::scalar(
            2,
            Envelope { m: 1.0, omega: vec![0.0, 0.0], eta: vec![1.0, 0.0], zeta: vec![1.0, 0.0] },
            |t| c(t[0], 0.0),
        )
        .unwrap();
        let v = delay_transform(
            &f,
            &ShiftVector::new(vec![1.0, 1.0]).unwrap(),
            &LaplacePoint::real(&[1.0, 2.0]),
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(v[0].re, (-3.0f64).exp() / 2.0, max_relative = 1e-6);

        // cross-check against direct quadrature of the delayed function
        let delayed = f.delayed(vec![1.0, 1.0]);
        let direct = laplace_nd(&delayed, &LaplacePoint::real(&[1.0, 2.0]), &cfg()).unwrap();
        assert!((direct.value[0] - v[0]).norm() < 1e-6);
    }

    #[test]
    fn damping_examples() {
        let v = damping_transform(
            &one_2d(),
            &DampingVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            &LaplacePoint::real(&[1.0, 1.0]),
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(v[0].re, 0.25, max_relative = 1e-6);

        let v = damping_transform(
            &exp_decay_2d(),
            &DampingVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            &LaplacePoint::real(&[1.0, 1.0]),
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(v[0].re, 1.0 / 9.0, max_relative = 1e-6);

        // identity case equals the plain transform
        let v = damping_transform(
            &one_2d(),
            &DampingVector::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap(),
            &LaplacePoint::real(&[2.0, 3.0]),
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(v[0].re, 1.0 / 6.0, max_relative = 1e-6);
    }

    #[test]
    fn transform_derivative_examples() {
        // ∂²/∂λ1∂λ2 [1/(λ1 λ2)] = 1/(λ1² λ2²) = 1 at (1,1)
        let v = transform_derivative(&one_2d(), &MultiIndex::new(vec![1, 1]), &LaplacePoint::real(&[1.0, 1.0]), &cfg()).unwrap();
        assert_relative_eq!(v[0].re, 1.0, max_relative = 1e-6);

        // v = 0 falls through to laplace_nd
        let v = transform_derivative(&one_2d(), &MultiIndex::new(vec![0, 0]), &LaplacePoint::real(&[2.0, 2.0]), &cfg()).unwrap();
        assert_relative_eq!(v[0].re, 0.25, max_relative = 1e-6);

        // ∂² of 1/((λ1+1)(λ2+1)) in λ1: 2/((λ1+1)³ (λ2+1)) = 0.125 at (1,1)
        let v = transform_derivative(&exp_decay_2d(), &MultiIndex::new(vec![2, 0]), &LaplacePoint::real(&[1.0, 1.0]), &cfg()).unwrap();
        assert_relative_eq!(v[0].re, 0.125, max_relative = 1e-6);
    }

    #[test]
    fn fractional_integral_examples() {
        let q = cfg();
        let v = fractional_integral(&one_2d(), 0, 1.0, &[2.0, 1.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 2.0, max_relative = 1e-8);

        let v = fractional_integral(&one_2d(), 0, 0.5, &[1.0, 1.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 1.128_379_167_095_512_6, max_relative = 1e-9);

        let v = fractional_integral(&one_2d(), 0, 2.0, &[3.0, 1.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 4.5, max_relative = 1e-8);
    }

    #[test]
    fn fractional_semigroup_property() {
        // J^α (J^β 1) = J^{α+β} 1 = t^{α+β}/Γ(α+β+1)
        let q = cfg();
        for &(al, be) in &[(0.5, 0.5), (1.0, 0.5), (0.3, 0.7)] {
            for &tp in &[0.5, 1.0, 1.7, 2.5, 3.0] {
                let inner = {
                    let q2 = q.clone();
                    VectorFunction::scalar(
                        2,
                        Envelope { m: 2.0, omega: vec![0.0, 0.0], eta: vec![be, 0.0], zeta: vec![0.0, 0.0] },
                        move |t| {
                            fractional_integral(&one_2d(), 0, be, t, &q2).map(|v| v[0]).unwrap_or(c(f64::NAN, 0.0))
                        },
                    )
                    .unwrap()
                };
                let lhs = fractional_integral(&inner, 0, al, &[tp, 1.0], &q).unwrap();
                let expect = tp.powf(al + be) * recip_gamma(al + be + 1.0);
                assert!(
                    (lhs[0].re - expect).abs() < 1e-6,
                    "alpha={al} beta={be} t={tp}: {} vs {expect}",
                    lhs[0].re
                );
            }
        }
    }

    #[test]
    fn faltung_examples() {
        let q = cfg();
        let v = faltung_convolve(&one_2d(), &one_2d(), &[2.0, 3.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 6.0, max_relative = 1e-9);

        let v = faltung_convolve(&one_2d(), &tt(), &[1.0, 1.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 0.25, max_relative = 1e-9);

        let v = faltung_convolve(&exp_decay_2d(), &one_2d(), &[1.0, 1.0], &q).unwrap();
        assert_relative_eq!(v[0].re, 0.399_576_400_893_728, max_relative = 1e-9);
    }

    #[test]
    fn faltung_commutativity() {
        let q = cfg();
        for &t in &[[0.5, 1.0], [1.0, 1.0], [2.0, 0.7]] {
            let ab = faltung_convolve(&exp_decay_2d(), &tt(), &t, &q).unwrap();
            let ba = faltung_convolve(&tt(), &exp_decay_2d(), &t, &q).unwrap();
            assert!((ab[0] - ba[0]).norm() < 1e-8);
        }
    }

    #[test]
    fn convolution_theorem_exactish_case() {
        let q = cfg();
        let r = convolution_theorem_check(&one_2d(), &one_2d(), &LaplacePoint::real(&[1.0, 1.0]), &q).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn higher_derivative_rule_1d() {
        // f = sin t, m = 2, λ = 2: λ²/(λ²+1) − 1 = −1/5
        let f = Function1d {
            codim: 1,
            transform: Arc::new(|l| vec![(l * l + 1.0).inv()]),
            derivs_at_zero: vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]],
        };
        let v = higher_derivative_transform_1d(&f, 2, c(2.0, 0.0)).unwrap();
        assert_relative_eq!(v[0].re, -0.2, max_relative = 1e-12);

        // f = e^t, m = 1, λ = 2: λ/(λ−1) − 1 = 1/(λ−1) = 1
        let f = Function1d {
            codim: 1,
            transform: Arc::new(|l| vec![(l - 1.0).inv()]),
            derivs_at_zero: vec![vec![c(1.0, 0.0)]],
        };
        let v = higher_derivative_transform_1d(&f, 1, c(2.0, 0.0)).unwrap();
        assert_relative_eq!(v[0].re, 1.0, max_relative = 1e-12);

        // f = t², m = 2, λ = 1: λ²·2/λ³ = 2
        let f = Function1d {
            codim: 1,
            transform: Arc::new(|l| vec![2.0 * (l * l * l).inv()]),
            derivs_at_zero: vec![vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]],
        };
        let v = higher_derivative_transform_1d(&f, 2, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(v[0].re, 2.0, max_relative = 1e-12);

        assert!(higher_derivative_transform_1d(&f, 0, c(1.0, 0.0)).is_err());
    }
}
