//! The Gibbs–Helmholtz entropy hypersurface `S = x¹x³ − x²` in closed form,
//! its entropy / scalar-curvature level sets, and the ν-deformed family
//! `S⁽ᵛ⁾ = ν(x³)·x¹ − x²`.
//!
//! All geometric invariants here depend on `(x¹, x³)` only, through the
//! normalizer `a = √(2 + (x¹)² + (x³)²)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monge::{
    Christoffel, CurvatureReport, Derivatives, FundamentalForms, Riemann, ScalarField,
    ShapeSpectrum, StatePoint,
};
use crate::numerics::SymMatrix3;

/// A state point together with its normalizer `a(x¹, x³)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhPoint {
    pub x: StatePoint,
    pub a: f64,
}

impl GhPoint {
    pub fn new(x: StatePoint) -> Self {
        Self {
            x,
            a: normalizer(&x),
        }
    }

    pub fn a2(&self) -> f64 {
        2.0 + self.x.x1 * self.x.x1 + self.x.x3 * self.x.x3
    }
}

/// `a(x¹, x³) = √(2 + (x¹)² + (x³)²)`.
pub fn normalizer(x: &StatePoint) -> f64 {
    (2.0 + x.x1 * x.x1 + x.x3 * x.x3).sqrt()
}

/// `S(x) = x¹x³ − x²`.
pub fn entropy(x: &StatePoint) -> f64 {
    x.x1 * x.x3 - x.x2
}

/// The entropy as a [`ScalarField`] with exact derivatives.
pub fn gh_field() -> ScalarField {
    ScalarField::with_derivatives(|x| Ok(entropy(x)), |x| Ok(gh_derivatives(x)))
}

fn gh_derivatives(x: &StatePoint) -> Derivatives {
    Derivatives {
        gradient: [x.x3, -1.0, x.x1],
        hessian: SymMatrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
    }
}

/// First and second fundamental forms and the (downward) unit normal.
pub fn closed_forms(x: &StatePoint) -> FundamentalForms {
    let (p, v) = (x.x1, x.x3);
    let a = normalizer(x);
    FundamentalForms {
        g: SymMatrix3::new(1.0 + v * v, -v, p * v, 2.0, -p, 1.0 + p * p),
        h: SymMatrix3::new(0.0, 0.0, -1.0 / a, 0.0, 0.0, 0.0),
        normal: [v / a, -1.0 / a, p / a, -1.0 / a],
        a,
    }
}

/// `(λ₁, λ₂, λ₃)` with `λ₁ > 0 > λ₂` and `λ₃ = 0`.
pub fn principal_curvatures(x: &StatePoint) -> [f64; 3] {
    let (p, v) = (x.x1, x.x3);
    let a2 = 2.0 + p * p + v * v;
    let a3 = a2 * a2.sqrt();
    let root = ((2.0 + p * p) * (2.0 + v * v)).sqrt();
    let pv = p * v;
    // λ₁λ₂ = −2/a⁴ recovers the root that would suffer cancellation
    let (l1, l2) = if pv >= 0.0 {
        let l1 = (pv + root) / a3;
        (l1, -2.0 / (a2 * a2 * l1))
    } else {
        let l2 = (pv - root) / a3;
        (-2.0 / (a2 * a2 * l2), l2)
    };
    [l1, l2, 0.0]
}

pub fn closed_christoffel(x: &StatePoint) -> Christoffel {
    let a2 = GhPoint::new(*x).a2();
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, val) in [(0, x.x3 / a2), (1, -1.0 / a2), (2, x.x1 / a2)] {
        gamma[k][0][2] = val;
        gamma[k][2][0] = val;
    }
    Christoffel(gamma)
}

pub fn closed_riemann(x: &StatePoint) -> Riemann {
    let a2 = GhPoint::new(*x).a2();
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    r[0][2][0][2] = -1.0 / a2;
    r[0][2][2][0] = 1.0 / a2;
    r[2][0][0][2] = 1.0 / a2;
    r[2][0][2][0] = -1.0 / a2;
    Riemann(r)
}

pub fn closed_ricci(x: &StatePoint) -> SymMatrix3 {
    let a2 = GhPoint::new(*x).a2();
    let a4 = a2 * a2;
    SymMatrix3::new(
        -(2.0 + x.x3 * x.x3) / a4,
        0.0,
        -(x.x1 * x.x3) / a4,
        0.0,
        0.0,
        -(2.0 + x.x1 * x.x1) / a4,
    )
}

/// `ρ = −4/a⁴`.
pub fn scalar_curvature(x: &StatePoint) -> f64 {
    let a2 = GhPoint::new(*x).a2();
    -4.0 / (a2 * a2)
}

/// Closed-form mean curvatures `(H₁, H₂, H₃)` in the eigenvalue scaling
/// (`e₁/3, e₂/3, e₃`).
pub fn mean_curvatures(x: &StatePoint) -> [f64; 3] {
    let a2 = GhPoint::new(*x).a2();
    let a3 = a2 * a2.sqrt();
    [2.0 * x.x1 * x.x3 / (3.0 * a3), -2.0 / (3.0 * a2 * a2), 0.0]
}

/// `H₁ = 6x¹x³/a³`, `H₂ = −6/a⁴`, `H₃ = 0`.
pub fn mean_curvatures_paper(x: &StatePoint) -> [f64; 3] {
    let a2 = GhPoint::new(*x).a2();
    let a3 = a2 * a2.sqrt();
    [6.0 * x.x1 * x.x3 / a3, -6.0 / (a2 * a2), 0.0]
}

fn closed_shape_operator(x: &StatePoint) -> [[f64; 3]; 3] {
    // g⁻¹ = I − u uᵀ/a² with u = ∇S; h = −(e₁e₃ᵀ + e₃e₁ᵀ)/a
    let u = [x.x3, -1.0, x.x1];
    let gp = GhPoint::new(*x);
    let a2 = gp.a2();
    let ginv = |i: usize, k: usize| (if i == k { 1.0 } else { 0.0 }) - u[i] * u[k] / a2;
    let mut s = [[0.0; 3]; 3];
    for (i, row) in s.iter_mut().enumerate() {
        row[0] = -ginv(i, 2) / gp.a;
        row[2] = -ginv(i, 0) / gp.a;
    }
    s
}

/// Every invariant in closed form. `principal` is sorted descending, i.e.
/// `(λ₁, λ₃, λ₂)` in the labelling of [`principal_curvatures`].
pub fn closed_curvatures(x: &StatePoint) -> CurvatureReport {
    let [l1, l2, l3] = principal_curvatures(x);
    let mean = mean_curvatures(x);
    CurvatureReport {
        point: *x,
        forms: closed_forms(x),
        shape_operator: closed_shape_operator(x),
        spectrum: ShapeSpectrum {
            principal: [l1, l3, l2],
            mean,
            mean_paper: mean_curvatures_paper(x),
        },
        christoffel: closed_christoffel(x),
        riemann: closed_riemann(x),
        ricci: closed_ricci(x),
        scalar: scalar_curvature(x),
    }
}

/// Radius `R = √(−4/ρ − 2)` of the cylinder `(x¹)² + (x³)² = R²` labelled
/// by the level `ρ = −4/(R² + 2)`.
///
/// The label is the conventional one for these cylinders; the scalar
/// curvature actually attained there is [`cylinder_scalar_curvature`],
/// i.e. `−4/(R² + 2)²`.
pub fn rho_level_radius(rho_target: f64) -> Result<f64> {
    if !(-1.0..0.0).contains(&rho_target) {
        return Err(Error::OutOfRange {
            value: rho_target,
            expected: "scalar curvature level in [-1, 0)",
        });
    }
    Ok((-4.0 / rho_target - 2.0).max(0.0).sqrt())
}

/// `ρ` on the cylinder of radius `R`: `−4/(R² + 2)²`.
pub fn cylinder_scalar_curvature(radius: f64) -> f64 {
    let a2 = 2.0 + radius * radius;
    -4.0 / (a2 * a2)
}

/// Entropy level `c` intersected with the scalar-curvature cylinder of
/// radius `R`, sampled at `samples` angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSetSpec {
    pub level: f64,
    pub radius: f64,
    pub samples: usize,
}

impl LevelSetSpec {
    pub fn new(level: f64, radius: f64, samples: usize) -> Result<Self> {
        if !(radius >= std::f64::consts::SQRT_2) || !radius.is_finite() {
            return Err(Error::OutOfRange {
                value: radius,
                expected: "cylinder radius R >= sqrt(2)",
            });
        }
        if !level.is_finite() {
            return Err(Error::domain("entropy level must be finite"));
        }
        if samples < 2 {
            return Err(Error::OutOfRange {
                value: samples as f64,
                expected: "at least 2 samples",
            });
        }
        Ok(Self {
            level,
            radius,
            samples,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSample {
    pub theta: f64,
    pub point: StatePoint,
    /// Mate heat capacity `½R² cos 2θ`.
    pub mate: f64,
}

/// The point of the intersection curve at angle `θ ∈ (0, π)`.
pub fn intersection_at(level: f64, radius: f64, theta: f64) -> IntersectionSample {
    let r2 = radius * radius;
    IntersectionSample {
        theta,
        point: StatePoint::new(
            radius * theta.cos(),
            0.5 * r2 * (2.0 * theta).sin() - level,
            radius * theta.sin(),
        ),
        mate: 0.5 * r2 * (2.0 * theta).cos(),
    }
}

/// Samples on `θᵢ = π(i + ½)/n`, which excludes the endpoints 0 and π.
pub fn intersection_curve(spec: &LevelSetSpec) -> Vec<IntersectionSample> {
    let n = spec.samples as f64;
    (0..spec.samples)
        .map(|i| intersection_at(spec.level, spec.radius, PI * (i as f64 + 0.5) / n))
        .collect()
}

/// Scale function ν: (0, ∞) → (0, ∞) of the ν-deformed entropy.
#[derive(Clone)]
pub enum NuKind {
    /// ν(t) = t, valid on all of ℝ (recovers the undeformed surface).
    Identity,
    /// ν(t) = t^α, α > 0.
    Power { alpha: f64 },
    /// ν(t) = base^(t^exponent) − 1, base > 1, exponent > 0.
    ExpType { base: f64, exponent: f64 },
    /// A user-supplied strictly increasing function; derivatives by
    /// finite differences.
    Custom {
        name: String,
        func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for NuKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NuKind::Identity => write!(f, "Identity"),
            NuKind::Power { alpha } => write!(f, "Power {{ alpha: {alpha} }}"),
            NuKind::ExpType { base, exponent } => {
                write!(f, "ExpType {{ base: {base}, exponent: {exponent} }}")
            }
            NuKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NuFunction {
    kind: NuKind,
}

const NU_GRID_POINTS: usize = 64;
const NU_GRID_LO: f64 = 1e-8;
const NU_GRID_HI: f64 = 1e8;

impl NuFunction {
    pub fn identity() -> Self {
        Self {
            kind: NuKind::Identity,
        }
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("power exponent must be positive, got {alpha}")));
        }
        Ok(Self {
            kind: NuKind::Power { alpha },
        })
    }

    pub fn exp_type(base: f64, exponent: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) || !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::domain(format!(
                "exp-type scale needs base > 1 and exponent > 0, got base {base}, exponent {exponent}"
            )));
        }
        Ok(Self {
            kind: NuKind::ExpType { base, exponent },
        })
    }

    /// Checks positivity and strict increase on a 64-point log-spaced grid
    /// over `[1e−8, 1e8]`, and that the function at least halves towards
    /// 0⁺ and doubles towards ∞ relative to ν(1).
    pub fn custom<F>(name: impl Into<String>, func: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        let step = (NU_GRID_HI / NU_GRID_LO).ln() / (NU_GRID_POINTS - 1) as f64;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..NU_GRID_POINTS {
            let t = NU_GRID_LO * (step * i as f64).exp();
            let v = func(t);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name}: ν({t:e}) = {v} is not positive and finite")));
            }
            if !(v > prev) {
                return Err(Error::domain(format!("{name}: not strictly increasing at t = {t:e}")));
            }
            prev = v;
        }
        let (lo, one, hi) = (func(NU_GRID_LO), func(1.0), func(NU_GRID_HI));
        if !(lo <= 0.5 * one && hi >= 2.0 * one) {
            return Err(Error::domain(format!(
                "{name}: ν does not approach 0 at 0⁺ and ∞ at ∞ (ν(1e-8) = {lo}, ν(1) = {one}, ν(1e8) = {hi})"
            )));
        }
        Ok(Self {
            kind: NuKind::Custom {
                name,
                func: Arc::new(func),
            },
        })
    }

    pub fn kind(&self) -> &NuKind {
        &self.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, NuKind::Identity)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if self.is_identity() || t > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!("ν requires volume x3 > 0, got {t}")))
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match &self.kind {
            NuKind::Identity => t,
            NuKind::Power { alpha } => t.powf(*alpha),
            NuKind::ExpType { base, exponent } => (base.ln() * t.powf(*exponent)).exp_m1(),
            NuKind::Custom { func, .. } => func(t),
        })
    }

    /// `(ν(t), ν'(t), ν''(t))`.
    pub fn jet(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(t)?;
        Ok(match &self.kind {
            NuKind::Identity => (t, 1.0, 0.0),
            NuKind::Power { alpha } => {
                let al = *alpha;
                (t.powf(al), al * t.powf(al - 1.0), al * (al - 1.0) * t.powf(al - 2.0))
            }
            NuKind::ExpType { base, exponent } => {
                let (ln_a, b) = (base.ln(), *exponent);
                let tb = t.powf(b);
                let growth = (ln_a * tb).exp();
                let inner1 = ln_a * b * t.powf(b - 1.0);
                let inner2 = ln_a * b * (b - 1.0) * t.powf(b - 2.0);
                (growth - 1.0, growth * inner1, growth * (inner2 + inner1 * inner1))
            }
            NuKind::Custom { func, .. } => {
                let h = 1e-4 * t;
                let (fm, f0, fp) = (func(t - h), func(t), func(t + h));
                (f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
            }
        })
    }
}

/// `S⁽ᵛ⁾ = ν(x³)·x¹ − x²`.
pub fn nu_entropy(nu: &NuFunction, x: &StatePoint) -> Result<f64> {
    Ok(nu.eval(x.x3)? * x.x1 - x.x2)
}

/// The ν-deformed entropy as a [`ScalarField`] with derivatives
/// `∇ = (ν, −1, ν'x¹)`, `∂₁∂₃ = ν'`, `∂₃∂₃ = ν''x¹`.
pub fn nu_patch(nu: &NuFunction) -> ScalarField {
    let value_nu = nu.clone();
    let deriv_nu = nu.clone();
    ScalarField::with_derivatives(
        move |x| nu_entropy(&value_nu, x),
        move |x| {
            let (v, d1, d2) = deriv_nu.jet(x.x3)?;
            let h33 = if d2 == 0.0 { 0.0 } else { d2 * x.x1 };
            Ok(Derivatives {
                gradient: [v, -1.0, d1 * x.x1],
                hessian: SymMatrix3::new(0.0, 0.0, d1, 0.0, 0.0, h33),
            })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monge::{curvature_report, Orientation};
    use crate::numerics::solve_cubic;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&StatePoint::ORIGIN), 0.0);
        assert_eq!(entropy(&StatePoint::new(1.0, 0.0, 1.0)), 1.0);
        assert_eq!(entropy(&StatePoint::new(2.0, 3.0, 5.0)), 7.0);
    }

    #[test]
    fn closed_forms_at_origin() {
        let f = closed_forms(&StatePoint::ORIGIN);
        assert_eq!(f.g, SymMatrix3::diag(1.0, 2.0, 1.0));
        assert!((f.h.get(0, 2) + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.normal[1] + FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(f.normal[0], 0.0);
    }

    #[test]
    fn closed_forms_independent_of_heat_capacity() {
        let f = closed_forms(&StatePoint::new(1.0, 99.0, 1.0));
        assert_eq!(f.a, 2.0);
        assert_eq!(f.g.get(0, 0), 2.0);
        assert_eq!(f.g.get(2, 2), 2.0);
        assert_eq!(f.g.get(0, 2), 1.0);
        assert_eq!(f.g.get(0, 1), -1.0);
        assert_eq!(f.g.get(1, 2), -1.0);
        assert_eq!(f.h.get(0, 2), -0.5);
        let n: f64 = f.normal.iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_curvatures_at_origin() {
        let r = closed_curvatures(&StatePoint::ORIGIN);
        let [l1, l2, l3] = principal_curvatures(&StatePoint::ORIGIN);
        assert!((l1 - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((l2 + FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(l3, 0.0);
        assert_eq!(r.scalar, -1.0);
        assert_eq!(r.mean_paper()[1], -1.5);
    }

    #[test]
    fn closed_curvatures_at_unit_diagonal() {
        let x = StatePoint::new(1.0, 7.0, 1.0);
        let [l1, l2, _] = principal_curvatures(&x);
        assert!((l1 - 0.5).abs() < 1e-15);
        assert!((l2 + 0.25).abs() < 1e-15);
        assert_eq!(scalar_curvature(&x), -0.25);
    }

    #[test]
    fn pencil_cubic_matches_closed_principal_curvatures() {
        // det(h − t g) = det(g)·(−t³ + e₁t² − e₂t + e₃) with e_k from g⁻¹h
        let x = StatePoint::new(1.0, 0.0, 1.0);
        let r = closed_curvatures(&x);
        let s = r.shape_operator;
        let e1 = s[0][0] + s[1][1] + s[2][2];
        let e2 = s[0][0] * s[1][1] - s[0][1] * s[1][0] + s[0][0] * s[2][2]
            - s[0][2] * s[2][0]
            + s[1][1] * s[2][2]
            - s[1][2] * s[2][1];
        let e3 = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1])
            - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
            + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
        let roots = solve_cubic(-e1, e2, -e3).unwrap().roots();
        let [l1, l2, l3] = principal_curvatures(&x);
        for (r, e) in roots.iter().zip([l1, l3, l2]) {
            assert!((r - e).abs() < 1e-12, "{roots:?}");
        }
    }

    #[test]
    fn scalar_curvature_flattens_along_diagonal_rays() {
        let mut prev = scalar_curvature(&StatePoint::ORIGIN);
        for t in [1.0, 10.0, 100.0, 1000.0] {
            let rho = scalar_curvature(&StatePoint::new(t, 0.0, t));
            assert!(rho < 0.0 && rho > prev);
            prev = rho;
        }
        assert!(prev > -1e-11);
    }

    #[test]
    fn rho_radius_inverse() {
        assert!((rho_level_radius(-1.0).unwrap() - SQRT_2).abs() < 1e-15);
        assert!((rho_level_radius(-4.0 / 18.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((rho_level_radius(-0.25).unwrap() - 14f64.sqrt()).abs() < 1e-15);
        assert_eq!(rho_level_radius(0.0).unwrap_err().name(), "OutOfRange");
        assert!(rho_level_radius(-1.5).is_err());
        let r = 3.3;
        let x = StatePoint::new(r * 0.6, 0.0, r * 0.8);
        assert!((scalar_curvature(&x) - cylinder_scalar_curvature(r)).abs() < 1e-15);
        let label = -4.0 / (r * r + 2.0);
        assert!((rho_level_radius(label).unwrap() - r).abs() < 1e-13);
    }

    #[test]
    fn intersection_at_quarter_turn() {
        let s = intersection_at(0.0, SQRT_2, std::f64::consts::FRAC_PI_2);
        assert!(s.point.x1.abs() < 1e-15);
        assert!(s.point.x2.abs() < 1e-15);
        assert!((s.point.x3 - SQRT_2).abs() < 1e-15);
        assert!((s.mate + 1.0).abs() < 1e-15);
    }

    #[test]
    fn intersection_curve_invariants() {
        let spec = LevelSetSpec::new(-1.25, 3.0, 17).unwrap();
        let curve = intersection_curve(&spec);
        assert_eq!(curve.len(), 17);
        for s in &curve {
            assert!(s.theta > 0.0 && s.theta < PI);
            assert!((entropy(&s.point) - spec.level).abs() < 1e-12);
            assert!((s.point.x1.powi(2) + s.point.x3.powi(2) - 9.0).abs() < 1e-12);
            assert!(s.point.x3 > 0.0);
            let lhs = s.mate.powi(2) + (s.point.x2 + spec.level).powi(2);
            assert!((lhs - 81.0 / 4.0).abs() < 1e-12);
        }
        assert!(LevelSetSpec::new(0.0, 1.0, 10).is_err());
        assert!(LevelSetSpec::new(0.0, 2.0, 1).is_err());
    }

    #[test]
    fn nu_entropy_values() {
        let x = StatePoint::new(0.7, -1.2, 2.5);
        assert_eq!(nu_entropy(&NuFunction::identity(), &x).unwrap(), entropy(&x));
        let sq = NuFunction::power(2.0).unwrap();
        assert_eq!(nu_entropy(&sq, &StatePoint::new(1.0, 0.0, 2.0)).unwrap(), 4.0);
        let root = NuFunction::power(0.5).unwrap();
        assert_eq!(nu_entropy(&root, &StatePoint::new(2.0, 1.0, 4.0)).unwrap(), 3.0);
        let err = nu_entropy(&sq, &StatePoint::new(1.0, 0.0, 0.0)).unwrap_err();
        assert_eq!(err.name(), "DomainError");
    }

    #[test]
    fn nu_patch_derivatives_for_square() {
        let f = nu_patch(&NuFunction::power(2.0).unwrap());
        let d = f.derivatives(&StatePoint::new(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(d.gradient, [1.0, -1.0, 2.0]);
        assert_eq!(d.hessian.get(0, 2), 2.0);
        assert_eq!(d.hessian.get(2, 2), 2.0);
        assert_eq!(d.hessian.get(0, 0), 0.0);
        let dev = f.derivative_spot_check(&StatePoint::new(1.3, 0.4, 2.2)).unwrap().unwrap();
        assert!(dev < 1e-6);
    }

    #[test]
    fn exp_type_jet_matches_finite_differences() {
        let nu = NuFunction::exp_type(2.0, 1.5).unwrap();
        let t = 0.8;
        let (v, d1, d2) = nu.jet(t).unwrap();
        assert!((v - (2f64.powf(t.powf(1.5)) - 1.0)).abs() < 1e-14);
        let h = 1e-4;
        let f = |s: f64| nu.eval(s).unwrap();
        assert!((d1 - (f(t + h) - f(t - h)) / (2.0 * h)).abs() < 1e-7);
        assert!((d2 - (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)).abs() < 1e-5);
    }

    #[test]
    fn identity_patch_matches_closed_forms() {
        let f = nu_patch(&NuFunction::identity());
        for x in [
            StatePoint::new(0.0, 0.0, 0.0),
            StatePoint::new(-2.0, 1.0, 3.5),
            StatePoint::new(4.0, -3.0, -1.0),
        ] {
            let r = curvature_report(&f, &x, Orientation::Downward).unwrap();
            let c = closed_curvatures(&x);
            assert!(r.forms.g.max_abs_diff(&c.forms.g) < 1e-10);
            assert!(r.forms.h.max_abs_diff(&c.forms.h) < 1e-10);
            assert!((r.scalar - c.scalar).abs() < 1e-10);
        }
    }

    #[test]
    fn custom_nu_validation() {
        assert!(NuFunction::custom("cube", |t: f64| t.powi(3)).is_ok());
        assert!(NuFunction::custom("flat", |_: f64| 1.0).is_err());
        assert!(NuFunction::custom("bounded", |t: f64| 1.0 + t / (1.0 + t)).is_err());
        assert!(NuFunction::custom("decreasing", |t: f64| 1.0 / t).is_err());
        assert!(NuFunction::power(0.0).is_err());
        assert!(NuFunction::exp_type(1.0, 1.0).is_err());
        let cube = NuFunction::custom("cube", |t: f64| t.powi(3)).unwrap();
        let (_, d1, d2) = cube.jet(2.0).unwrap();
        assert!((d1 - 12.0).abs() < 1e-6);
        assert!((d2 - 12.0).abs() < 1e-4);
    }
}
