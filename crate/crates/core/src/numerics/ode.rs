//! Explicit Runge–Kutta integration: classic fixed-step RK4 and the
//! Dormand–Prince 5(4) embedded pair with step-size control.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OdeMethod {
    /// Classic fourth-order Runge–Kutta with a constant step.
    Rk4 { step: f64 },
    /// Dormand–Prince 5(4); every accepted step has scaled local error ≤ 1.
    DormandPrince { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSettings {
    pub method: OdeMethod,
    pub max_steps: usize,
    /// Upper bound on the adaptive step; also controls sample density.
    pub max_step: Option<f64>,
}

impl OdeSettings {
    pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

    pub fn adaptive(tol: f64) -> Self {
        Self {
            method: OdeMethod::DormandPrince {
                rtol: tol,
                atol: tol,
            },
            max_steps: Self::DEFAULT_MAX_STEPS,
            max_step: None,
        }
    }

    pub fn fixed(step: f64) -> Self {
        Self {
            method: OdeMethod::Rk4 { step },
            max_steps: Self::DEFAULT_MAX_STEPS,
            max_step: None,
        }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = Some(max_step);
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.method {
            OdeMethod::Rk4 { step } => step > 0.0 && step.is_finite(),
            OdeMethod::DormandPrince { rtol, atol } => {
                rtol > 0.0 && atol > 0.0 && rtol.is_finite() && atol.is_finite()
            }
        };
        if !ok {
            return Err(Error::InvalidSettings(format!("{:?}", self.method)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidSettings("max_steps must be positive".into()));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::InvalidSettings("max_step must be positive".into()));
            }
        }
        Ok(())
    }
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self::adaptive(1e-10)
    }
}

/// Sampled solution: `times[i]` ↦ `states[i]`, first sample is the initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (f64, [f64; N]) {
        (
            *self.times.last().expect("trajectory is never empty"),
            *self.states.last().expect("trajectory is never empty"),
        )
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(&[f64; N], f64)]) -> [f64; N] {
    let mut out = *y;
    for (k, c) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `y' = rhs(t, y)` over `t_span`, in either direction.
pub fn integrate_ode<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t_span: (f64, f64),
    settings: &OdeSettings,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    settings.validate()?;
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::InvalidSettings(format!(
            "degenerate time span [{t0}, {t1}]"
        )));
    }
    if !all_finite(&y0) {
        return Err(Error::NonFiniteState { t: t0 });
    }
    match settings.method {
        OdeMethod::Rk4 { step } => rk4(&rhs, y0, t0, t1, step, settings),
        OdeMethod::DormandPrince { rtol, atol } => dopri(&rhs, y0, t0, t1, rtol, atol, settings),
    }
}

fn rk4<const N: usize, F>(
    rhs: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    step: f64,
    settings: &OdeSettings,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let n = (span / step).ceil().max(1.0) as usize;
    if n > settings.max_steps {
        return Err(Error::StepLimitExceeded {
            max_steps: settings.max_steps,
            t: t0,
        });
    }
    let h = dir * span / n as f64;
    let mut out = Trajectory {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
    };
    out.times.push(t0);
    out.states.push(y0);
    let mut y = y0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &axpy(&y, h, &[(&k1, 0.5)]));
        let k3 = rhs(t + 0.5 * h, &axpy(&y, h, &[(&k2, 0.5)]));
        let k4 = rhs(t + h, &axpy(&y, h, &[(&k3, 1.0)]));
        y = axpy(
            &y,
            h,
            &[(&k1, 1.0 / 6.0), (&k2, 1.0 / 3.0), (&k3, 1.0 / 3.0), (&k4, 1.0 / 6.0)],
        );
        let t_next = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
        if !all_finite(&y) {
            return Err(Error::NonFiniteState { t: t_next });
        }
        out.times.push(t_next);
        out.states.push(y);
    }
    Ok(out)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn error_norm<const N: usize>(
    err: &[f64; N],
    y: &[f64; N],
    y_new: &[f64; N],
    rtol: f64,
    atol: f64,
) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        s += (err[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

fn dopri<const N: usize, F>(
    rhs: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
    settings: &OdeSettings,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let h_max = settings.max_step.unwrap_or(span).min(span);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if !all_finite(&k1) {
        return Err(Error::NonFiniteState { t });
    }

    // initial step from the derivative scale (Hairer–Wanner heuristic, simplified)
    let d0 = error_norm(&y, &y, &y, rtol, atol);
    let d1 = error_norm(&k1, &y, &y, rtol, atol);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(h_max).max(1e-12 * span);

    let mut out = Trajectory {
        times: vec![t0],
        states: vec![y0],
    };
    let mut steps = 0usize;
    let mut last_rejected = false;

    while (t1 - t) * dir > 0.0 {
        if steps >= settings.max_steps {
            return Err(Error::StepLimitExceeded {
                max_steps: settings.max_steps,
                t,
            });
        }
        steps += 1;

        let remaining = (t1 - t).abs();
        let finishing = h >= remaining;
        let hs = if finishing { remaining } else { h } * dir;

        let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(&k1, A21)]));
        let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(&k1, A31), (&k2, A32)]));
        let k4 = rhs(
            t + C4 * hs,
            &axpy(&y, hs, &[(&k1, A41), (&k2, A42), (&k3, A43)]),
        );
        let k5 = rhs(
            t + C5 * hs,
            &axpy(&y, hs, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]),
        );
        let k6 = rhs(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)],
            ),
        );
        let y_new = axpy(
            &y,
            hs,
            &[(&k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)],
        );
        let k7 = rhs(t + hs, &y_new);
        if ![&k2, &k3, &k4, &k5, &k6, &k7, &y_new]
            .iter()
            .all(|v| all_finite(v))
        {
            return Err(Error::NonFiniteState { t: t + hs });
        }
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, rtol, atol);

        if en <= 1.0 {
            t = if finishing { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            out.times.push(t);
            out.states.push(y);
            let mut fac = if en == 0.0 { 5.0 } else { 0.9 * en.powf(-0.2) };
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            let fac = (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
            last_rejected = true;
            if h < 1e-15 * span.max(t.abs()) {
                return Err(Error::StepLimitExceeded {
                    max_steps: settings.max_steps,
                    t,
                });
            }
        }
    }
    Ok(out)
}
