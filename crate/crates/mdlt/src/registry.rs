//! Named test functions with known envelopes (and closed-form transforms
//! where available), plus the transform-side registry used by the inversion
//! commands and the 1D data registry used by the solver configs.
//!
//! Function names: `one`, `exp_decay`, `fresnel2d`,
//! `ml_pair(alpha,beta,omega)`, `wright_pair(gamma,s)`,
//! `poly_exp(k1,..,kn,w1,..,wn)`, `g_kernel(zeta)`.
//! Transform names: `inv_lambda`, `sep_pole`, `sep_shifted_pole`,
//! `ml_pair(...)`, `wright_pair(...)`, `wright_g(gamma,s)`, `box_g(a1,..,an)`.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::{Envelope, VectorFunction};
use crate::gamma::{ln_gamma, recip_gamma};
use crate::inversion::{AxisFactor, DecayBound, TransformFunction};
use crate::solvers::Data1d;
use crate::special::{mittag_leffler, wright, MlParams, SeriesAccuracy, WrightParams};

/// A registry item: the time-domain function and, when known in closed
/// form, its transform.
#[derive(Clone)]
pub struct RegistryEntry {
    pub name: String,
    pub function: VectorFunction,
    pub transform: Option<TransformFunction>,
}

fn parse_call(name: &str) -> Result<(String, Vec<f64>)> {
    let name = name.trim();
    if let Some(open) = name.find('(') {
        if !name.ends_with(')') {
            return Err(Error::Schema(format!("malformed registry name '{name}'")));
        }
        let base = name[..open].to_string();
        let inner = &name[open + 1..name.len() - 1];
        let args = inner
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Schema(format!("bad numeric argument '{s}' in '{name}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((base, args))
    } else {
        Ok((name.to_string(), Vec::new()))
    }
}

/// Per-axis shifted pole factor φ(λ) = (λ + a)^{−q} with exact derivatives
/// φ^{(k)} = (−1)^k Γ(q+k)/Γ(q) (λ+a)^{−q−k}.
pub fn pole_factor(a: f64, q: u32) -> AxisFactor {
    AxisFactor {
        eval: Arc::new(move |l: Complex64| (l + a).powi(-(q as i32))),
        deriv: Some(Arc::new(move |k: u32, l: Complex64| {
            let qf = q as f64;
            let scale = (ln_gamma(qf + k as f64) - ln_gamma(qf)).exp();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * scale * (l + a).powf(-(qf + k as f64))
        })),
    }
}

// Wright series argument cutoff: beyond x_max(γ) the density sits under
// exp(−36) and the alternating series cancellation exceeds what the
// double-double accumulator certifies, so the density clamps to 0 there.
fn wright_x_max(gamma: f64) -> f64 {
    let b = (1.0 - gamma) * gamma.powf(gamma / (1.0 - gamma));
    (36.0 / b).powf(1.0 - gamma)
}

/// One axis of the stable-density pair: γ s t^{−1−γ} Φ_γ(s t^{−γ}).
pub fn wright_density_1d(gamma: f64, s: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = s * t.powf(-gamma);
    if x >= wright_x_max(gamma) {
        return 0.0;
    }
    let acc = SeriesAccuracy { rel_tol: 1e-11, max_terms: 4000 };
    match wright(WrightParams { gamma }, Complex64::new(x, 0.0), acc) {
        Ok(v) => gamma * s * t.powf(-1.0 - gamma) * v.re,
        // cancellation refusal can only fire in the sub-exp(−36) region
        Err(Error::NonConvergence(_)) => 0.0,
        Err(_) => f64::NAN,
    }
}

/// Look up a time-domain registry function for the requested number of axes.
pub fn lookup_function(name: &str, dims: usize) -> Result<RegistryEntry> {
    if dims == 0 {
        return Err(Error::Schema("dims must be >= 1".into()));
    }
    let (base, args) = parse_call(name)?;
    let entry = match base.as_str() {
        "one" => {
            let f = VectorFunction::scalar(dims, Envelope::exponential(1.0, vec![0.0; dims]), |_| {
                Complex64::new(1.0, 0.0)
            })?;
            let factors = (0..dims).map(|_| pole_factor(0.0, 1)).collect();
            let tf = TransformFunction::separable(
                factors,
                DecayBound { m: 1.5, omega: vec![0.0; dims], eps: vec![0.01; dims] },
            )?;
            RegistryEntry { name: name.into(), function: f, transform: Some(tf) }
        }
        "exp_decay" => {
            let f = VectorFunction::scalar(dims, Envelope::exponential(1.0, vec![-1.0; dims]), |t| {
                Complex64::new((-t.iter().sum::<f64>()).exp(), 0.0)
            })?;
            let factors = (0..dims).map(|_| pole_factor(1.0, 1)).collect();
            let tf = TransformFunction::separable(
                factors,
                DecayBound { m: 2.0, omega: vec![-0.5; dims], eps: vec![0.01; dims] },
            )?;
            RegistryEntry { name: name.into(), function: f, transform: Some(tf) }
        }
        "fresnel2d" => {
            if dims != 2 {
                return Err(Error::Schema("fresnel2d is a 2D function".into()));
            }
            let f = VectorFunction::scalar(2, Envelope::exponential(1.0, vec![0.0, 0.0]), |t| {
                Complex64::new((t[0] * t[0]).sin() * (t[1] * t[1]).sin(), 0.0)
            })?;
            RegistryEntry { name: name.into(), function: f, transform: None }
        }
        "ml_pair" => {
            if args.len() != 3 {
                return Err(Error::Schema("ml_pair needs (alpha, beta, omega)".into()));
            }
            let (alpha, beta, omega) = (args[0], args[1], args[2]);
            let p = MlParams::new(alpha, beta)?;
            if !(omega > 0.0) {
                return Err(Error::Schema("ml_pair needs omega > 0".into()));
            }
            let absc = omega.powf(1.0 / alpha);
            let env = Envelope {
                m: 6.0 * (1.0 + recip_gamma(beta).abs()),
                omega: vec![absc; dims],
                eta: vec![beta - 1.0; dims],
                zeta: vec![(beta - 1.0).max(0.0); dims],
            };
            let acc = SeriesAccuracy { rel_tol: 1e-11, max_terms: 4000 };
            let f = VectorFunction::scalar(dims, env, move |t| {
                let mut v = Complex64::new(1.0, 0.0);
                for &tj in t {
                    let z = Complex64::new(omega * tj.powf(alpha), 0.0);
                    match mittag_leffler(p, z, acc) {
                        Ok(e) => v *= tj.powf(beta - 1.0) * e,
                        Err(_) => return Complex64::new(f64::NAN, 0.0),
                    }
                }
                v
            })?;
            let factor = move || AxisFactor {
                eval: Arc::new(move |l: Complex64| {
                    l.powf(alpha - beta) / (l.powf(alpha) - omega)
                }),
                deriv: None,
            };
            let tf = TransformFunction::separable(
                (0..dims).map(|_| factor()).collect(),
                DecayBound { m: 4.0, omega: vec![absc; dims], eps: vec![(beta - 0.99).max(0.01).min(1.0); dims] },
            )?;
            RegistryEntry { name: name.into(), function: f, transform: Some(tf) }
        }
        "wright_pair" => {
            if args.len() != 2 {
                return Err(Error::Schema("wright_pair needs (gamma, s)".into()));
            }
            let (gamma, s) = (args[0], args[1]);
            WrightParams::new(gamma)?;
            if !(s > 0.0) {
                return Err(Error::Schema("wright_pair needs s > 0".into()));
            }
            let env = Envelope {
                m: 8.0 * (1.0 + s),
                omega: vec![0.0; dims],
                eta: vec![0.0; dims],
                zeta: vec![-gamma.min(0.9); dims],
            };
            let f = VectorFunction::scalar(dims, env, move |t| {
                let mut v = 1.0;
                for &tj in t {
                    v *= wright_density_1d(gamma, s, tj);
                }
                Complex64::new(v, 0.0)
            })?;
            let factor = move || AxisFactor {
                eval: Arc::new(move |l: Complex64| (-(l.powf(gamma)) * s).exp()),
                deriv: None,
            };
            let tf = TransformFunction::separable(
                (0..dims).map(|_| factor()).collect(),
                DecayBound { m: 2.0, omega: vec![0.0; dims], eps: vec![0.01; dims] },
            )?;
            RegistryEntry { name: name.into(), function: f, transform: Some(tf) }
        }
        "poly_exp" => {
            if args.len() != 2 * dims {
                return Err(Error::Schema(format!(
                    "poly_exp needs {dims} integer powers then {dims} rates"
                )));
            }
            let ks: Vec<u32> = args[..dims]
                .iter()
                .map(|&k| {
                    if k < 0.0 || k.fract() != 0.0 {
                        Err(Error::Schema("poly_exp powers must be nonnegative integers".into()))
                    } else {
                        Ok(k as u32)
                    }
                })
                .collect::<Result<_>>()?;
            let ws: Vec<f64> = args[dims..].to_vec();
            let env = Envelope {
                m: 1.0,
                omega: ws.clone(),
                eta: ks.iter().map(|&k| k as f64).collect(),
                zeta: ks.iter().map(|&k| k as f64).collect(),
            };
            let (ks2, ws2) = (ks.clone(), ws.clone());
            let f = VectorFunction::scalar(dims, env, move |t| {
                let mut v = 1.0;
                for j in 0..t.len() {
                    v *= t[j].powi(ks2[j] as i32) * (ws2[j] * t[j]).exp();
                }
                Complex64::new(v, 0.0)
            })?;
            let factors: Vec<AxisFactor> = ks
                .iter()
                .zip(&ws)
                .map(|(&k, &w)| {
                    // k!/(λ−w)^{k+1} = k! · shifted pole of order k+1
                    let base = pole_factor(-w, k + 1);
                    let fact: f64 = (1..=k).map(|i| i as f64).product::<f64>().max(1.0);
                    AxisFactor {
                        eval: {
                            let e = base.eval.clone();
                            Arc::new(move |l| fact * e(l))
                        },
                        deriv: base.deriv.map(|d| {
                            Arc::new(move |kk: u32, l: Complex64| fact * d(kk, l))
                                as Arc<dyn Fn(u32, Complex64) -> Complex64 + Send + Sync>
                        }),
                    }
                })
                .collect();
            let tf = TransformFunction::separable(
                factors,
                DecayBound {
                    m: 4.0 * ks.iter().map(|&k| (1..=k).map(|i| i as f64).product::<f64>().max(1.0)).product::<f64>(),
                    omega: ws.clone(),
                    eps: ks.iter().map(|&k| k as f64 + 0.01).collect(),
                },
            )?;
            RegistryEntry { name: name.into(), function: f, transform: Some(tf) }
        }
        "g_kernel" => {
            if args.len() != 1 {
                return Err(Error::Schema("g_kernel needs (zeta)".into()));
            }
            let zeta = args[0];
            if !(zeta > 0.0) {
                return Err(Error::Schema("g_kernel needs zeta > 0".into()));
            }
            let rg = recip_gamma(zeta);
            let env = Envelope {
                m: 2.0 * rg.abs().max(1.0),
                omega: vec![0.0; dims],
                eta: vec![zeta - 1.0; dims],
                zeta: vec![zeta - 1.0; dims],
            };
            let f = VectorFunction::scalar(dims, env, move |t| {
                let mut v = 1.0;
                for &tj in t {
                    if tj <= 0.0 {
                        return Complex64::new(if zeta >= 1.0 { 0.0 } else { f64::INFINITY }, 0.0);
                    }
                    v *= tj.powf(zeta - 1.0) * rg;
                }
                Complex64::new(v, 0.0)
            })?;
            // L g_ζ = λ^{−ζ}
            let factor = move || AxisFactor {
                eval: Arc::new(move |l: Complex64| l.powf(-zeta)),
                deriv: None,
            };
            let tf = TransformFunction::separable(
                (0..dims).map(|_| factor()).collect(),
                DecayBound { m: 2.0, omega: vec![0.0; dims], eps: vec![(zeta - 0.99).max(0.01); dims] },
            )?;
            RegistryEntry { name: name.into(), function: f, transform: Some(tf) }
        }
        other => {
            return Err(Error::Schema(format!(
                "unknown registry function '{other}' \
                 (known: one, exp_decay, fresnel2d, ml_pair, wright_pair, poly_exp, g_kernel)"
            )))
        }
    };
    Ok(entry)
}

/// Look up a transform-side registry entry by name.
pub fn lookup_transform(name: &str, dims: usize) -> Result<TransformFunction> {
    let (base, args) = parse_call(name)?;
    match base.as_str() {
        // 1/Πλ_j² — the pair of f = Π t_j
        "sep_pole" => TransformFunction::separable(
            (0..dims).map(|_| pole_factor(0.0, 2)).collect(),
            DecayBound { m: 1.5, omega: vec![0.0; dims], eps: vec![1.0; dims] },
        ),
        // Π 1/(λ_j+1) — the pair of f = e^{−Σ t_j}
        "sep_shifted_pole" => TransformFunction::separable(
            (0..dims).map(|_| pole_factor(1.0, 1)).collect(),
            DecayBound { m: 2.0, omega: vec![-0.5; dims], eps: vec![0.01; dims] },
        ),
        // Π 1/λ_j — the pair of f ≡ 1
        "inv_lambda" => TransformFunction::separable(
            (0..dims).map(|_| pole_factor(0.0, 1)).collect(),
            DecayBound { m: 1.5, omega: vec![0.0; dims], eps: vec![0.01; dims] },
        ),
        // Π (1−e^{−a_j λ})/λ² — the transform of G for the box indicator
        "box_g" => {
            if args.len() != dims {
                return Err(Error::Schema("box_g needs one edge length per axis".into()));
            }
            let factors: Vec<AxisFactor> = args
                .iter()
                .map(|&a| AxisFactor {
                    eval: Arc::new(move |l: Complex64| {
                        (1.0 - (-l * a).exp()) / (l * l)
                    }),
                    deriv: None,
                })
                .collect();
            TransformFunction::separable(
                factors,
                DecayBound { m: 2.0, omega: vec![0.0; dims], eps: vec![1.0; dims] },
            )
        }
        // Π e^{−λ^γ s}/λ — the antiderivative-trick composition of the pair
        "wright_g" => {
            if args.len() != 2 {
                return Err(Error::Schema("wright_g needs (gamma, s)".into()));
            }
            let (gamma, s) = (args[0], args[1]);
            WrightParams::new(gamma)?;
            let factor = move || AxisFactor {
                eval: Arc::new(move |l: Complex64| (-(l.powf(gamma)) * s).exp() / l),
                deriv: None,
            };
            TransformFunction::separable(
                (0..dims).map(|_| factor()).collect(),
                DecayBound { m: 2.0, omega: vec![0.0; dims], eps: vec![0.5; dims] },
            )
        }
        "ml_pair" | "wright_pair" => lookup_function(name, dims)?
            .transform
            .ok_or_else(|| Error::Schema("pair lacks a closed-form transform".into())),
        other => Err(Error::Schema(format!(
            "unknown registry transform '{other}' \
             (known: inv_lambda, sep_pole, sep_shifted_pole, box_g, wright_g, ml_pair, wright_pair)"
        ))),
    }
}

/// 1D data functions for solver configs: `zero`, `one`, `exp(a)`,
/// `scaled_exp(c,a)`, `poly(k)`, `sin`, `cos`.
pub fn lookup_data1d(name: &str) -> Result<Data1d> {
    let (base, args) = parse_call(name)?;
    let d = match base.as_str() {
        "zero" => Data1d::zero(1),
        "one" => Data1d::scalar(
            |l| l.inv(),
            Some(Arc::new(|_t| DVector::from_element(1, Complex64::new(1.0, 0.0)))),
        ),
        "exp" => {
            if args.len() != 1 {
                return Err(Error::Schema("exp needs (rate)".into()));
            }
            let a = args[0];
            Data1d::scalar(
                move |l| (l - a).inv(),
                Some(Arc::new(move |t| DVector::from_element(1, Complex64::new((a * t).exp(), 0.0)))),
            )
        }
        "scaled_exp" => {
            if args.len() != 2 {
                return Err(Error::Schema("scaled_exp needs (coefficient, rate)".into()));
            }
            let (c, a) = (args[0], args[1]);
            Data1d::scalar(
                move |l| c * (l - a).inv(),
                Some(Arc::new(move |t| {
                    DVector::from_element(1, Complex64::new(c * (a * t).exp(), 0.0))
                })),
            )
        }
        "poly" => {
            if args.len() != 1 || args[0] < 0.0 || args[0].fract() != 0.0 {
                return Err(Error::Schema("poly needs a nonnegative integer power".into()));
            }
            let k = args[0] as u32;
            let fact: f64 = (1..=k).map(|i| i as f64).product::<f64>().max(1.0);
            Data1d::scalar(
                move |l| fact * l.powi(-(k as i32 + 1)),
                Some(Arc::new(move |t| {
                    DVector::from_element(1, Complex64::new(t.powi(k as i32), 0.0))
                })),
            )
        }
        "sin" => Data1d::scalar(
            |l| (l * l + 1.0).inv(),
            Some(Arc::new(|t| DVector::from_element(1, Complex64::new(t.sin(), 0.0)))),
        ),
        "cos" => Data1d::scalar(
            |l| l / (l * l + 1.0),
            Some(Arc::new(|t| DVector::from_element(1, Complex64::new(t.cos(), 0.0)))),
        ),
        other => {
            return Err(Error::Schema(format!(
                "unknown 1D data function '{other}' (known: zero, one, exp, scaled_exp, poly, sin, cos)"
            )))
        }
    };
    Ok(d)
}
