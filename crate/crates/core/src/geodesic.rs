//! Geodesics of graph hypersurfaces: initial-value integration, the
//! analytic diagonal family of the GH surface, arc length, and two-point
//! shooting.
//!
//! On a Monge patch the geodesic equation reduces to
//! `ẍ = −∇S · (ẋᵀ Hess S ẋ) / (1 + |∇S|²)`; for the GH field this is
//!
//! ```text
//! ẍ¹ = −(2x³/a²) ẋ¹ẋ³,   ẍ² = (2/a²) ẋ¹ẋ³,   ẍ³ = −(2x¹/a²) ẋ¹ẋ³.
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monge::{ScalarField, StatePoint};
use crate::numerics::{find_root_expanding, integrate_ode, solve3, OdeSettings};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub t: f64,
    pub position: StatePoint,
    pub velocity: [f64; 3],
}

impl GeodesicState {
    pub fn new(t: f64, position: StatePoint, velocity: [f64; 3]) -> Self {
        Self {
            t,
            position,
            velocity,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.position.is_finite() && self.velocity.iter().all(|v| v.is_finite())
    }

    fn to_vec(self) -> [f64; 6] {
        let p = self.position;
        let v = self.velocity;
        [p.x1, p.x2, p.x3, v[0], v[1], v[2]]
    }

    fn from_vec(t: f64, y: &[f64; 6]) -> Self {
        Self::new(t, StatePoint::new(y[0], y[1], y[2]), [y[3], y[4], y[5]])
    }
}

/// Coordinate acceleration on the GH surface.
pub fn geodesic_acceleration(x: &StatePoint, v: &[f64; 3]) -> [f64; 3] {
    let a2 = 2.0 + x.x1 * x.x1 + x.x3 * x.x3;
    let c = 2.0 * v[0] * v[2] / a2;
    [-x.x3 * c, c, -x.x1 * c]
}

/// Time derivative of `(x, ẋ)` on the GH surface.
pub fn geodesic_rhs(state: &GeodesicState) -> [f64; 6] {
    let acc = geodesic_acceleration(&state.position, &state.velocity);
    let v = state.velocity;
    [v[0], v[1], v[2], acc[0], acc[1], acc[2]]
}

/// `g(v, v) = |v|² + (∇S·v)²` on the GH surface.
pub fn metric_energy(x: &StatePoint, v: &[f64; 3]) -> f64 {
    let dot = x.x3 * v[0] - v[1] + x.x1 * v[2];
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + dot * dot
}

/// The surface a geodesic lives on.
#[derive(Debug, Clone, Default)]
pub enum Surface {
    /// The GH surface, closed-form right-hand side.
    #[default]
    Gh,
    /// Any graph surface, through the field's derivatives.
    Field(ScalarField),
}

impl Surface {
    fn acceleration(&self, x: &StatePoint, v: &[f64; 3]) -> [f64; 3] {
        match self {
            Surface::Gh => geodesic_acceleration(x, v),
            Surface::Field(field) => match field.derivatives(x) {
                Ok(d) => {
                    let grad = d.gradient;
                    let a2 = 1.0 + grad.iter().map(|g| g * g).sum::<f64>();
                    let c = d.hessian.quadratic_form(v) / a2;
                    [-grad[0] * c, -grad[1] * c, -grad[2] * c]
                }
                Err(_) => [f64::NAN; 3],
            },
        }
    }

    pub fn energy(&self, x: &StatePoint, v: &[f64; 3]) -> f64 {
        match self {
            Surface::Gh => metric_energy(x, v),
            Surface::Field(field) => match field.derivatives(x) {
                Ok(d) => {
                    let g = d.gradient;
                    let dot = g[0] * v[0] + g[1] * v[1] + g[2] * v[2];
                    v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + dot * dot
                }
                Err(_) => f64::NAN,
            },
        }
    }
}

/// A sampled geodesic with per-sample energy and cumulative arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicState>,
    pub energy: Vec<f64>,
    pub arc_length: Vec<f64>,
}

impl GeodesicPath {
    /// Builds the energy and arc-length columns for `samples` on `surface`.
    pub fn from_samples(samples: Vec<GeodesicState>, surface: &Surface) -> Self {
        let energy: Vec<f64> = samples
            .iter()
            .map(|s| surface.energy(&s.position, &s.velocity))
            .collect();
        let mut arc_length = Vec::with_capacity(samples.len());
        let mut acc = 0.0;
        for i in 0..samples.len() {
            if i > 0 {
                let dt = samples[i].t - samples[i - 1].t;
                acc += 0.5 * dt * (energy[i].max(0.0).sqrt() + energy[i - 1].max(0.0).sqrt());
            }
            arc_length.push(acc);
        }
        Self {
            samples,
            energy,
            arc_length,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &GeodesicState {
        &self.samples[0]
    }

    pub fn last(&self) -> &GeodesicState {
        &self.samples[self.samples.len() - 1]
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    /// The same curve traversed backwards over the same time interval.
    pub fn reversed(&self, surface: &Surface) -> Self {
        let (t0, t1) = (self.first().t, self.last().t);
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| {
                GeodesicState::new(
                    t0 + t1 - s.t,
                    s.position,
                    [-s.velocity[0], -s.velocity[1], -s.velocity[2]],
                )
            })
            .collect();
        Self::from_samples(samples, surface)
    }
}

/// Integrates the geodesic on the GH surface from `init` to `t_end`.
pub fn integrate_geodesic(init: &GeodesicState, t_end: f64, settings: &OdeSettings) -> Result<GeodesicPath> {
    integrate_geodesic_on(&Surface::Gh, init, t_end, settings)
}

pub fn integrate_geodesic_on(
    surface: &Surface,
    init: &GeodesicState,
    t_end: f64,
    settings: &OdeSettings,
) -> Result<GeodesicPath> {
    if !init.is_finite() {
        return Err(Error::domain("initial geodesic state must be finite"));
    }
    if !(t_end > init.t) || !t_end.is_finite() {
        return Err(Error::domain(format!(
            "geodesic end time {t_end} must exceed start time {}",
            init.t
        )));
    }
    let traj = integrate_ode(
        |_, y: &[f64; 6]| {
            let x = StatePoint::new(y[0], y[1], y[2]);
            let v = [y[3], y[4], y[5]];
            let a = surface.acceleration(&x, &v);
            [v[0], v[1], v[2], a[0], a[1], a[2]]
        },
        init.to_vec(),
        (init.t, t_end),
        settings,
    )?;
    let samples = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, y)| GeodesicState::from_vec(*t, y))
        .collect();
    Ok(GeodesicPath::from_samples(samples, surface))
}

fn endpoint(surface: &Surface, from: &StatePoint, v: &[f64; 3], settings: &OdeSettings) -> Result<StatePoint> {
    let traj = integrate_ode(
        |_, y: &[f64; 6]| {
            let x = StatePoint::new(y[0], y[1], y[2]);
            let vel = [y[3], y[4], y[5]];
            let a = surface.acceleration(&x, &vel);
            [vel[0], vel[1], vel[2], a[0], a[1], a[2]]
        },
        GeodesicState::new(0.0, *from, *v).to_vec(),
        (0.0, 1.0),
        settings,
    )?;
    let (_, y) = traj.last();
    Ok(StatePoint::new(y[0], y[1], y[2]))
}

/// `Φ(u) = u√(u² + 1) + asinh(u)`; affine in `t` along diagonal geodesics.
pub fn diagonal_phi(u: f64) -> f64 {
    u * (u * u + 1.0).sqrt() + u.asinh()
}

/// `x¹(t) = x³(t)` on the diagonal geodesic with `Φ(x¹(t)) = k₉t + k₁₀`.
pub fn diagonal_geodesic(k9: f64, k10: f64, t: f64) -> Result<f64> {
    let target = k9 * t + k10;
    if !target.is_finite() {
        return Err(Error::domain("diagonal geodesic constants must be finite"));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    // Φ(u) ≥ u² for |u| ≥ 1 and Φ(u) ≥ 2u on [0, 1]
    let bound = 1.0 + target.abs().sqrt();
    let tol = 1e-13 * bound;
    let u = find_root_expanding(|u| diagonal_phi(u) - target, -bound, bound, tol, 60)?;
    Ok(polish_diagonal(u, target))
}

fn polish_diagonal(mut u: f64, target: f64) -> f64 {
    for _ in 0..3 {
        let d = 2.0 * (u * u + 1.0).sqrt();
        let step = (diagonal_phi(u) - target) / d;
        if step == 0.0 || !step.is_finite() {
            break;
        }
        u -= step;
    }
    u
}

/// `∫√(g(γ̇, γ̇)) dt` over the sampled path (trapezoid rule).
pub fn arc_length(path: &GeodesicPath) -> f64 {
    path.arc_length.last().copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootSettings {
    pub ode: OdeSettings,
    pub max_iterations: usize,
    pub fd_step: f64,
    pub restarts: usize,
}

impl Default for ShootSettings {
    fn default() -> Self {
        Self {
            ode: OdeSettings::adaptive(1e-12),
            max_iterations: 50,
            fd_step: 1e-5,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    pub velocity: [f64; 3],
    pub miss: f64,
    pub iterations: usize,
    pub converged: bool,
    pub path: GeodesicPath,
}

impl ShootResult {
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                miss: self.miss,
            })
        }
    }
}

/// Initial velocity of the geodesic on the GH surface that reaches `to` at
/// `t = 1` from `from` at `t = 0`.
pub fn shoot(from: &StatePoint, to: &StatePoint, tol: f64) -> Result<ShootResult> {
    shoot_with(&Surface::Gh, from, to, tol, &ShootSettings::default())
}

struct Attempt {
    velocity: [f64; 3],
    miss: f64,
    iterations: usize,
}

fn distance(p: &StatePoint, q: &StatePoint) -> f64 {
    ((p.x1 - q.x1).powi(2) + (p.x2 - q.x2).powi(2) + (p.x3 - q.x3).powi(2)).sqrt()
}

fn newton(surface: &Surface, from: &StatePoint, to: &StatePoint, v0: [f64; 3], tol: f64, s: &ShootSettings) -> Attempt {
    let miss_of = |v: &[f64; 3]| -> (f64, [f64; 3]) {
        match endpoint(surface, from, v, &s.ode) {
            Ok(p) if p.is_finite() => (distance(&p, to), [to.x1 - p.x1, to.x2 - p.x2, to.x3 - p.x3]),
            _ => (f64::INFINITY, [f64::NAN; 3]),
        }
    };
    let mut v = v0;
    let (mut miss, mut residual) = miss_of(&v);
    let mut iterations = 0;
    while miss > tol && iterations < s.max_iterations {
        iterations += 1;
        let mut jac = [[0.0; 3]; 3];
        let mut ok = true;
        for j in 0..3 {
            let h = s.fd_step * v[j].abs().max(1.0);
            let mut vp = v;
            let mut vm = v;
            vp[j] += h;
            vm[j] -= h;
            match (endpoint(surface, from, &vp, &s.ode), endpoint(surface, from, &vm, &s.ode)) {
                (Ok(p), Ok(m)) => {
                    let (p, m) = (p.to_array(), m.to_array());
                    for i in 0..3 {
                        jac[i][j] = (p[i] - m[i]) / (2.0 * h);
                    }
                }
                _ => ok = false,
            }
        }
        let Some(dv) = ok.then(|| solve3(&jac, &residual)).flatten() else {
            break;
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = [v[0] + lambda * dv[0], v[1] + lambda * dv[1], v[2] + lambda * dv[2]];
            let (m, r) = miss_of(&trial);
            if m < miss {
                v = trial;
                miss = m;
                residual = r;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Attempt {
        velocity: v,
        miss,
        iterations,
    }
}

/// Damped Newton from the chord `to − from`; if that fails, restarts from
/// `settings.restarts` chords perturbed towards the cube corners (run in
/// parallel) and keeps the attempt with the smallest miss.
pub fn shoot_with(
    surface: &Surface,
    from: &StatePoint,
    to: &StatePoint,
    tol: f64,
    settings: &ShootSettings,
) -> Result<ShootResult> {
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::domain("shooting endpoints must be finite"));
    }
    if from == to {
        return Err(Error::domain("shooting endpoints must differ"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidSettings(format!("shooting tolerance must be positive, got {tol}")));
    }
    if !(settings.fd_step > 0.0) || settings.max_iterations == 0 {
        return Err(Error::InvalidSettings("shooting needs a positive step and iteration budget".into()));
    }
    settings.ode.validate()?;

    let chord = [to.x1 - from.x1, to.x2 - from.x2, to.x3 - from.x3];
    let mut best = newton(surface, from, to, chord, tol, settings);
    if best.miss > tol && settings.restarts > 0 {
        let scale = 0.25 * chord.iter().map(|c| c * c).sum::<f64>().sqrt().max(1.0);
        let restarts: Vec<Attempt> = (0..settings.restarts)
            .into_par_iter()
            .map(|r| {
                let corner = [r & 1, (r >> 1) & 1, (r >> 2) & 1].map(|b| if b == 1 { 1.0 } else { -1.0 });
                let grow = 1.0 + (r / 8) as f64;
                let v0 = [0, 1, 2].map(|i| chord[i] + grow * scale * corner[i]);
                newton(surface, from, to, v0, tol, settings)
            })
            .collect();
        let iterations_spent: usize = best.iterations + restarts.iter().map(|a| a.iterations).sum::<usize>();
        for a in restarts {
            if a.miss < best.miss {
                best = a;
            }
        }
        if best.miss > tol {
            best.iterations = iterations_spent;
        }
    }
    let path = integrate_geodesic_on(surface, &GeodesicState::new(0.0, *from, best.velocity), 1.0, &settings.ode)?;
    Ok(ShootResult {
        velocity: best.velocity,
        miss: best.miss,
        iterations: best.iterations,
        converged: best.miss <= tol,
        path,
    })
}
