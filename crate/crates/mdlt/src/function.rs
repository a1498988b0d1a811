//! Time-domain functions [0,∞)^n → ℂ^m with declared polynomial-exponential
//! growth envelopes.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::max_norm;

/// Per-axis growth envelope: ‖f(t)‖ ≤ M · Π_j (t_j^{η_j} + t_j^{ζ_j}) e^{ω_j t_j}.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub m: f64,
    pub omega: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl Envelope {
    /// Pure exponential envelope M e^{Σ ω_j t_j} (η = ζ = 0).
    pub fn exponential(m: f64, omega: Vec<f64>) -> Self {
        let n = omega.len();
        Envelope {
            m,
            omega,
            eta: vec![0.0; n],
            zeta: vec![0.0; n],
        }
    }

    pub fn dims(&self) -> usize {
        self.omega.len()
    }

    /// Envelope majorant value at t.
    pub fn bound(&self, t: &[f64]) -> f64 {
        let mut v = self.m;
        for j in 0..self.dims() {
            let tj = t[j].max(0.0);
            let poly = if tj == 0.0 {
                powz(self.eta[j]) + powz(self.zeta[j])
            } else {
                tj.powf(self.eta[j]) + tj.powf(self.zeta[j])
            };
            v *= poly * (self.omega[j] * tj).exp();
        }
        v
    }

    /// Envelope of the box antiderivative G: per-axis e^{ωt} integrates to
    /// another exponential for ω > 0 and to a degree-raised polynomial at
    /// ω ≤ 0; poles of the poly exponents shift by +1.
    pub fn antiderivative(&self) -> Envelope {
        let n = self.dims();
        let mut out = self.clone();
        for j in 0..n {
            if self.omega[j] > 0.0 {
                out.m *= 2.0 / self.omega[j];
            } else {
                out.omega[j] = 0.0;
                out.eta[j] = self.eta[j].max(self.zeta[j]) + 1.0;
                out.zeta[j] = 0.0;
                out.m *= 2.0;
            }
        }
        out
    }

    /// Envelope valid for the Faltung convolution of two functions.
    pub fn convolve(&self, other: &Envelope) -> Envelope {
        let n = self.dims();
        let mut omega = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        for j in 0..n {
            omega.push(self.omega[j].max(other.omega[j]));
            eta.push(self.eta[j].max(self.zeta[j]) + other.eta[j].max(other.zeta[j]) + 1.0);
        }
        Envelope {
            m: self.m * other.m * 4.0,
            omega,
            eta: eta.clone(),
            zeta: vec![0.0; n],
        }
    }
}

// 0^p with the 0^+ convention used by the envelopes (0 for p > 0, 1 at p = 0)
fn powz(p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p > 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

type EvalFn = Arc<dyn Fn(&[f64], &mut [Complex64]) + Send + Sync>;

/// A callable t ∈ [0,∞)^n → ℂ^m with a declared growth envelope.
#[derive(Clone)]
pub struct VectorFunction {
    dims: usize,
    codim: usize,
    eval: EvalFn,
    pub envelope: Envelope,
}

impl std::fmt::Debug for VectorFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorFunction")
            .field("dims", &self.dims)
            .field("codim", &self.codim)
            .field("envelope", &self.envelope)
            .finish()
    }
}

impl VectorFunction {
    pub fn new(
        dims: usize,
        codim: usize,
        envelope: Envelope,
        eval: impl Fn(&[f64], &mut [Complex64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if dims == 0 || codim == 0 {
            return Err(Error::Domain("dims and codim must be >= 1".into()));
        }
        if envelope.dims() != dims {
            return Err(Error::Domain(format!(
                "envelope has {} axes but dims = {dims}",
                envelope.dims()
            )));
        }
        Ok(VectorFunction {
            dims,
            codim,
            eval: Arc::new(eval),
            envelope,
        })
    }

    /// Scalar-valued convenience constructor.
    pub fn scalar(
        dims: usize,
        envelope: Envelope,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(dims, 1, envelope, move |t, out| out[0] = f(t))
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn eval_into(&self, t: &[f64], out: &mut [Complex64]) {
        debug_assert_eq!(t.len(), self.dims);
        debug_assert_eq!(out.len(), self.codim);
        (self.eval)(t, out)
    }

    pub fn eval(&self, t: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.codim];
        self.eval_into(t, &mut out);
        out
    }

    /// Spot-check the declared envelope on sample points; returns the worst
    /// ratio ‖f‖/bound (≤ 1 means the envelope holds on the sample).
    pub fn envelope_slack(&self, samples: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for t in samples {
            let b = self.envelope.bound(t);
            if b.is_finite() && b > 0.0 {
                worst = worst.max(max_norm(&self.eval(t)) / b);
            }
        }
        worst
    }

    /// f_h(t) = f(t + h) (shift toward the origin).
    pub fn shifted(&self, h: Vec<f64>) -> VectorFunction {
        let inner = self.eval.clone();
        let mut env = self.envelope.clone();
        // e^{ω(t+h)} = e^{ωh} e^{ωt}; polynomial factors absorbed into M on [0,∞)
        for j in 0..self.dims {
            env.m *= (env.omega[j] * h[j]).exp().max(1.0) * (1.0 + h[j]).powf(env.eta[j].max(env.zeta[j]).max(0.0));
        }
        VectorFunction {
            dims: self.dims,
            codim: self.codim,
            envelope: env,
            eval: Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                let shifted: Vec<f64> = t.iter().zip(&h).map(|(a, b)| a + b).collect();
                inner(&shifted, out)
            }),
        }
    }

    /// f_{h-}(t) = f(t - h) on t ≥ h, 0 if any coordinate is below h_j.
    pub fn delayed(&self, h: Vec<f64>) -> VectorFunction {
        let inner = self.eval.clone();
        let env = self.envelope.clone();
        VectorFunction {
            dims: self.dims,
            codim: self.codim,
            envelope: env,
            eval: Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                if t.iter().zip(&h).any(|(a, b)| a < b) {
                    out.fill(Complex64::new(0.0, 0.0));
                } else {
                    let back: Vec<f64> = t.iter().zip(&h).map(|(a, b)| a - b).collect();
                    inner(&back, out)
                }
            }),
        }
    }

    /// e^{-z·t} f(t).
    pub fn damped(&self, z: Vec<Complex64>) -> VectorFunction {
        let inner = self.eval.clone();
        let mut env = self.envelope.clone();
        for j in 0..self.dims {
            env.omega[j] -= z[j].re;
        }
        VectorFunction {
            dims: self.dims,
            codim: self.codim,
            envelope: env,
            eval: Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                inner(t, out);
                let mut phase = Complex64::new(0.0, 0.0);
                for (zj, tj) in z.iter().zip(t) {
                    phase -= zj * tj;
                }
                let w = phase.exp();
                for v in out.iter_mut() {
                    *v *= w;
                }
            }),
        }
    }

    /// (Π_j t_j^{v_j} / v_j!) f(t), the moment weight behind the
    /// derivative-of-transform identity.
    pub fn moment_weighted(&self, v: Vec<u32>) -> VectorFunction {
        let inner = self.eval.clone();
        let mut env = self.envelope.clone();
        let mut ln_fact = 0.0;
        for j in 0..self.dims {
            env.eta[j] += v[j] as f64;
            env.zeta[j] += v[j] as f64;
            for k in 2..=v[j] {
                ln_fact += (k as f64).ln();
            }
        }
        env.m *= (-ln_fact).exp();
        VectorFunction {
            dims: self.dims,
            codim: self.codim,
            envelope: env,
            eval: Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                inner(t, out);
                let mut w = 1.0;
                for j in 0..t.len() {
                    let mut fact = 1.0;
                    for k in 2..=v[j] {
                        fact *= k as f64;
                    }
                    w *= t[j].powi(v[j] as i32) / fact;
                }
                for val in out.iter_mut() {
                    *val *= w;
                }
            }),
        }
    }

    /// a f + b g (same dims/codim).
    pub fn linear_combination(
        a: Complex64,
        f: &VectorFunction,
        b: Complex64,
        g: &VectorFunction,
    ) -> Result<VectorFunction> {
        if f.dims != g.dims || f.codim != g.codim {
            return Err(Error::Domain("linear combination needs matching shapes".into()));
        }
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let codim = f.codim;
        let mut env = f.envelope.clone();
        env.m = a.norm() * f.envelope.m + b.norm() * g.envelope.m;
        for j in 0..f.dims {
            env.omega[j] = f.envelope.omega[j].max(g.envelope.omega[j]);
            env.eta[j] = f.envelope.eta[j].max(g.envelope.eta[j]);
            env.zeta[j] = f.envelope.zeta[j].max(g.envelope.zeta[j]);
        }
        Ok(VectorFunction {
            dims: f.dims,
            codim,
            envelope: env,
            eval: Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                let mut buf = vec![Complex64::new(0.0, 0.0); codim];
                fe(t, out);
                for v in out.iter_mut() {
                    *v *= a;
                }
                ge(t, &mut buf);
                for (o, v) in out.iter_mut().zip(&buf) {
                    *o += b * v;
                }
            }),
        })
    }

    /// Componentwise matrix action (T f)(t) = T · f(t) for a codim×codim T
    /// given row-major.
    pub fn matrix_applied(&self, t_mat: Vec<Vec<Complex64>>) -> Result<VectorFunction> {
        let m = self.codim;
        if t_mat.len() != m || t_mat.iter().any(|r| r.len() != m) {
            return Err(Error::Domain("matrix shape must be codim x codim".into()));
        }
        let inner = self.eval.clone();
        let mut env = self.envelope.clone();
        let norm: f64 = t_mat
            .iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        env.m *= norm.max(1.0);
        Ok(VectorFunction {
            dims: self.dims,
            codim: m,
            envelope: env,
            eval: Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                inner(t, &mut buf);
                for (i, row) in t_mat.iter().enumerate() {
                    out[i] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
                }
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_2d() -> VectorFunction {
        VectorFunction::scalar(2, Envelope::exponential(1.0, vec![0.0, 0.0]), |_| {
            Complex64::new(1.0, 0.0)
        })
        .unwrap()
    }

    #[test]
    fn envelope_holds_on_samples() {
        let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![3.0, 1.0]), |t| {
            Complex64::new((3.0 * t[0] + t[1]).exp(), 0.0)
        })
        .unwrap();
        let samples: Vec<Vec<f64>> = vec![vec![0.1, 0.2], vec![1.0, 1.0], vec![4.0, 2.0]];
        assert!(f.envelope_slack(&samples) <= 1.0 + 1e-12);
    }

    #[test]
    fn shift_delay_damp_roundtrip() {
        let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![0.0, 0.0]), |t| {
            Complex64::new(t[0] + 2.0 * t[1], 0.0)
        })
        .unwrap();
        let sh = f.shifted(vec![1.0, 0.5]);
        assert_eq!(sh.eval(&[0.0, 0.0])[0].re, 1.0 + 1.0);
        let de = f.delayed(vec![1.0, 1.0]);
        assert_eq!(de.eval(&[0.5, 2.0])[0].re, 0.0);
        assert_eq!(de.eval(&[1.5, 2.0])[0].re, 0.5 + 2.0);
        let da = one_2d().damped(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((da.eval(&[1.0, 5.0])[0].re - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn moment_weight_matches_formula() {
        let f = one_2d().moment_weighted(vec![2, 1]);
        // t1^2/2! * t2
        assert!((f.eval(&[3.0, 2.0])[0].re - 9.0).abs() < 1e-13);
    }
}
