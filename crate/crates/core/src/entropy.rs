//! Generalized logarithms and the equivalence equation
//! `S(x) + ∫ f(x, y)·φ(f(x, y)) dy = 0` for the Gaussian family
//! `f(x, ·) = N(μ(x), σ(x)²)` on the real line.
//!
//! The Boltzmann constant is normalized to 1.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ghsurface;
use crate::monge::StatePoint;
use crate::numerics::{find_root_expanding, quad_entropy, QuadratureRule};

/// Densities below this are treated as zero in `f·φ(f)`.
pub const DENSITY_FLOOR: f64 = 1e-300;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Clone)]
pub enum GeneralizedLog {
    Natural,
    Tsallis { q: f64 },
    Kaniadakis { k: f64 },
    /// Caller-supplied logarithm; only residual evaluation is available.
    Custom {
        name: String,
        func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for GeneralizedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl GeneralizedLog {
    pub fn tsallis(q: f64) -> Result<Self> {
        if !q.is_finite() || q == 1.0 {
            return Err(Error::domain(format!("Tsallis parameter must be finite and != 1, got {q}")));
        }
        Ok(Self::Tsallis { q })
    }

    pub fn kaniadakis(k: f64) -> Result<Self> {
        if !(k > -1.0 && k < 1.0) || k == 0.0 {
            return Err(Error::domain(format!("Kaniadakis parameter must lie in (-1, 1) \\ {{0}}, got {k}")));
        }
        Ok(Self::Kaniadakis { k })
    }

    pub fn custom<F>(name: impl Into<String>, func: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::Custom {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Natural => "natural".into(),
            Self::Tsallis { q } => format!("tsallis(q={q})"),
            Self::Kaniadakis { k } => format!("kaniadakis(k={k})"),
            Self::Custom { name, .. } => format!("custom({name})"),
        }
    }

    fn eval(&self, z: f64) -> f64 {
        match self {
            Self::Natural => z.ln(),
            Self::Tsallis { q } => ((1.0 - q) * z.ln()).exp_m1() / (1.0 - q),
            Self::Kaniadakis { k } => (k * z.ln()).sinh() / k,
            Self::Custom { func, .. } => func(z),
        }
    }
}

/// `φ(z)` for `z > 0`.
pub fn glog(phi: &GeneralizedLog, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("generalized logarithm needs z > 0, got {z}")));
    }
    Ok(phi.eval(z))
}

type MeanFn = dyn Fn(&StatePoint) -> f64 + Send + Sync;
type SigmaFn = dyn Fn(&StatePoint) -> Result<f64> + Send + Sync;

/// `f(x, y) = exp(−½((y − μ(x))/σ(x))²) / (√(2π)·σ(x))`.
#[derive(Clone)]
pub struct GaussianFamily {
    mean: Arc<MeanFn>,
    sigma: Arc<SigmaFn>,
}

impl fmt::Debug for GaussianFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GaussianFamily")
    }
}

impl GaussianFamily {
    pub fn new<M, S>(mean: M, sigma: S) -> Self
    where
        M: Fn(&StatePoint) -> f64 + Send + Sync + 'static,
        S: Fn(&StatePoint) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            mean: Arc::new(mean),
            sigma: Arc::new(sigma),
        }
    }

    /// The family solving the equivalence equation for `phi`, with mean `mean`.
    pub fn solving<M>(phi: &GeneralizedLog, mean: M) -> Self
    where
        M: Fn(&StatePoint) -> f64 + Send + Sync + 'static,
    {
        let phi = phi.clone();
        Self::new(mean, move |x| sigma_closed(&phi, ghsurface::entropy(x)))
    }

    pub fn mean(&self, x: &StatePoint) -> f64 {
        (self.mean)(x)
    }

    pub fn sigma(&self, x: &StatePoint) -> Result<f64> {
        let s = (self.sigma)(x)?;
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("dispersion must be positive and finite, got {s} at {x}")));
        }
        Ok(s)
    }
}

fn normal_pdf(mu: f64, sigma: f64, y: f64) -> f64 {
    let z = (y - mu) / sigma;
    (-0.5 * z * z).exp() / (SQRT_2PI * sigma)
}

pub fn gaussian_pdf(family: &GaussianFamily, x: &StatePoint, y: f64) -> Result<f64> {
    Ok(normal_pdf(family.mean(x), family.sigma(x)?, y))
}

/// Dispersion `σ` that makes `N(μ, σ²)` solve the equivalence equation at
/// entropy level `s`.
pub fn sigma_closed(phi: &GeneralizedLog, s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::domain(format!("entropy value must be finite, got {s}")));
    }
    let sigma = match phi {
        GeneralizedLog::Natural => (s - 0.5).exp() / SQRT_2PI,
        GeneralizedLog::Tsallis { q } => {
            let q = *q;
            if q >= 2.0 {
                return Err(Error::domain(format!("Tsallis dispersion diverges for q >= 2 (q = {q})")));
            }
            let base = 1.0 + (q - 1.0) * s;
            if !(base > 0.0) {
                return Err(Error::domain(format!("Tsallis dispersion needs 1 + (q-1)S > 0 (q = {q}, S = {s})")));
            }
            let e = 1.0 / (q - 1.0);
            ((0.5 * e) * (2.0 - q).ln() + e * base.ln()).exp() / SQRT_2PI
        }
        GeneralizedLog::Kaniadakis { k } => {
            let k = *k;
            if !(k > -1.0 && k < 1.0) || k == 0.0 {
                return Err(Error::domain(format!("Kaniadakis parameter must lie in (-1, 1) \\ {{0}}, got {k}")));
            }
            // w = (σ√(2π))^k is the positive root of
            // w² − 2kS√(1−k)·w − √((1−k)/(1+k)) = 0
            let c = ((1.0 - k) / (1.0 + k)).sqrt();
            let b = k * s * (1.0 - k).sqrt();
            let disc = (b * b + c).sqrt();
            let w = if b >= 0.0 { b + disc } else { c / (disc - b) };
            (w.ln() / k).exp() / SQRT_2PI
        }
        GeneralizedLog::Custom { name, .. } => {
            return Err(Error::domain(format!("no closed-form dispersion for custom logarithm {name}")));
        }
    };
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("dispersion for {} at S = {s} is not representable", phi.label())));
    }
    Ok(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceResidual {
    pub point: StatePoint,
    pub entropy: f64,
    pub integral: f64,
    pub residual: f64,
    pub quad_error: f64,
}

/// `∫ f·φ(f) dy` for `f = N(μ, σ²)`, with its quadrature error estimate.
pub fn entropy_integral(phi: &GeneralizedLog, mu: f64, sigma: f64, rule: &QuadratureRule) -> Result<(f64, f64)> {
    if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() {
        return Err(Error::domain(format!("need finite mean and positive dispersion (mu {mu}, sigma {sigma})")));
    }
    let r = quad_entropy(
        |y| {
            let f = normal_pdf(mu, sigma, y);
            if f < DENSITY_FLOOR {
                0.0
            } else {
                f * phi.eval(f)
            }
        },
        mu,
        sigma,
        rule,
    )?;
    Ok((r.value, r.error))
}

/// `S(x) + ∫ f(x, y)·φ(f(x, y)) dy` with `S` the GH entropy.
pub fn equivalence_residual(
    phi: &GeneralizedLog,
    family: &GaussianFamily,
    x: &StatePoint,
    rule: &QuadratureRule,
) -> Result<EquivalenceResidual> {
    let s = ghsurface::entropy(x);
    let (integral, quad_error) = entropy_integral(phi, family.mean(x), family.sigma(x)?, rule)?;
    Ok(EquivalenceResidual {
        point: *x,
        entropy: s,
        integral,
        residual: s + integral,
        quad_error,
    })
}

/// Solves `S + ∫ f_σ·φ(f_σ) dy = 0` for `σ` by bracketing `ln σ` outwards
/// from `σ = 1`.
pub fn sigma_solve(phi: &GeneralizedLog, s: f64, tol: f64) -> Result<f64> {
    sigma_solve_with(phi, s, tol, &QuadratureRule::adaptive(1e-12))
}

pub fn sigma_solve_with(phi: &GeneralizedLog, s: f64, tol: f64, rule: &QuadratureRule) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::domain(format!("entropy value must be finite, got {s}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidSettings(format!("tolerance must be positive, got {tol}")));
    }
    let residual = |log_sigma: f64| match entropy_integral(phi, 0.0, log_sigma.exp(), rule) {
        Ok((integral, _)) => s + integral,
        Err(_) => f64::NAN,
    };
    // |ln σ| ≤ 64 keeps the density representable
    let log_sigma = find_root_expanding(residual, -1.0, 1.0, tol, 6)?;
    Ok(log_sigma.exp())
}

/// Spread (max − min) of the residual at entropy level `s` over the means
/// `mus`, with `σ` from [`sigma_closed`].
pub fn mu_independence_check(phi: &GeneralizedLog, s: f64, mus: &[f64]) -> Result<f64> {
    mu_independence_check_with(phi, s, mus, &QuadratureRule::default())
}

pub fn mu_independence_check_with(phi: &GeneralizedLog, s: f64, mus: &[f64], rule: &QuadratureRule) -> Result<f64> {
    let sigma = sigma_closed(phi, s)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &mu in mus {
        let r = s + entropy_integral(phi, mu, sigma, rule)?.0;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(if mus.is_empty() { 0.0 } else { hi - lo })
}

/// `∫ f^p dy = (2πσ²)^{(1−p)/2} / √p` for `f = N(μ, σ²)`, `p > 0`.
pub fn gaussian_power_integral(sigma: f64, p: f64) -> f64 {
    (2.0 * PI * sigma * sigma).powf(0.5 * (1.0 - p)) / p.sqrt()
}
