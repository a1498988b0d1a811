//! Special functions feeding the transform pairs and fractional solvers:
//! the Gamma kernel g_ζ, the two-parameter Mittag-Leffler function and the
//! Wright function.
//!
//! Both series are summed with log-space terms (so factorial growth in the
//! Gamma arguments never overflows an intermediate) into a double-double
//! accumulator, with a cancellation guard that refuses to return digits the
//! accumulator cannot back up.

use num_complex::Complex64;

use crate::dd::DdComplex;
use crate::error::{Error, Result};
use crate::gamma::{recip_gamma, recip_gamma_ln};

/// Stopping control for the series evaluators.
#[derive(Debug, Clone, Copy)]
pub struct SeriesAccuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl SeriesAccuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::Domain("rel_tol must be > 0".into()));
        }
        if max_terms == 0 {
            return Err(Error::Domain("max_terms must be >= 1".into()));
        }
        Ok(SeriesAccuracy { rel_tol, max_terms })
    }
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        SeriesAccuracy {
            rel_tol: 1e-12,
            max_terms: 4000,
        }
    }
}

/// Parameters of E_{α,β}.
#[derive(Debug, Clone, Copy)]
pub struct MlParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
        }
        Ok(MlParams { alpha, beta })
    }
}

/// Parameter of the Wright function Φ_γ.
#[derive(Debug, Clone, Copy)]
pub struct WrightParams {
    pub gamma: f64,
}

impl WrightParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")));
        }
        Ok(WrightParams { gamma })
    }
}

/// Largest |z| the Mittag-Leffler evaluator accepts; beyond it the series
/// route is not validated and the call errors instead of degrading silently.
pub const ML_MAX_ABS_Z: f64 = 50.0;

/// g_ζ(t) = t^{ζ-1}/Γ(ζ), with 0^ζ := 0 (so g_ζ(0) = 0 for ζ > 1, g_1 ≡ 1).
pub fn gamma_kernel(zeta: f64, t: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::Domain(format!("gamma_kernel needs zeta > 0, got {zeta}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("gamma_kernel needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(if zeta > 1.0 {
            0.0
        } else if zeta == 1.0 {
            1.0
        } else {
            f64::INFINITY
        });
    }
    Ok(t.powf(zeta - 1.0) * recip_gamma(zeta))
}

/// Shared series core: sums Σ_k s_k · w^k · c_k where w is complex,
/// c_k = 1/Γ(arg(k)) in signed-log form and s_k an optional 1/k! factor.
fn sum_log_series(
    w: Complex64,
    gamma_arg: impl Fn(usize) -> f64,
    with_factorial: bool,
    acc: SeriesAccuracy,
    what: &str,
) -> Result<Complex64> {
    // w == 0: only the k = 0 term survives
    if w.norm() == 0.0 {
        return Ok(Complex64::new(recip_gamma(gamma_arg(0)), 0.0));
    }
    let ln_w = w.norm().ln();
    let arg_w = w.arg();

    let mut sum = DdComplex::ZERO;
    let mut max_term = 0.0f64;
    let mut small_streak = 0usize;
    let mut ln_fact = 0.0f64; // ln k!

    for k in 0..acc.max_terms {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let (ln_rg, sign) = recip_gamma_ln(gamma_arg(k));
        let term = if sign == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let mut ln_mag = (k as f64) * ln_w + ln_rg;
            if with_factorial {
                ln_mag -= ln_fact;
            }
            if ln_mag > 700.0 {
                return Err(Error::Overflow(format!(
                    "{what}: term magnitude exp({ln_mag:.1}) at k={k} exceeds f64 range"
                )));
            }
            let mag = sign * ln_mag.exp();
            let phase = (k as f64) * arg_w;
            Complex64::new(mag * phase.cos(), mag * phase.sin())
        };
        sum = sum.add(term);
        let t_abs = term.norm();
        max_term = max_term.max(t_abs);

        let s_abs = sum.value().norm();
        if k >= 2 && t_abs <= acc.rel_tol * s_abs {
            small_streak += 1;
            if small_streak >= 3 {
                // refuse digits the double-double headroom cannot certify
                let cancel_err = max_term * 2.5e-32;
                if cancel_err > acc.rel_tol * s_abs.max(f64::MIN_POSITIVE) {
                    return Err(Error::NonConvergence(format!(
                        "{what}: cancellation of {:.1} digits exceeds accumulator headroom",
                        (max_term / s_abs.max(f64::MIN_POSITIVE)).log10()
                    )));
                }
                return Ok(sum.value());
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::NonConvergence(format!(
        "{what}: {} terms without meeting rel_tol {}",
        acc.max_terms, acc.rel_tol
    )))
}

/// E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk + β), with 1/Γ := 0 at the poles of Γ.
pub fn mittag_leffler(p: MlParams, z: Complex64, acc: SeriesAccuracy) -> Result<Complex64> {
    if !z.norm().is_finite() {
        return Err(Error::Domain("mittag_leffler needs finite z".into()));
    }
    if z.norm() > ML_MAX_ABS_Z {
        return Err(Error::Domain(format!(
            "|z| = {:.3} outside the validated domain |z| <= {ML_MAX_ABS_Z}",
            z.norm()
        )));
    }
    sum_log_series(z, |k| p.alpha * k as f64 + p.beta, false, acc, "mittag_leffler")
}

/// Φ_γ(z) = Σ_{k≥0} (−z)^k / (k! Γ(1 − γ − γk)).
pub fn wright(p: WrightParams, z: Complex64, acc: SeriesAccuracy) -> Result<Complex64> {
    if !z.norm().is_finite() {
        return Err(Error::Domain("wright needs finite z".into()));
    }
    sum_log_series(-z, |k| 1.0 - p.gamma * (k as f64 + 1.0), true, acc, "wright")
}
