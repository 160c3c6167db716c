//! Intrinsic and extrinsic geometry of a graph hypersurface
//! `x ↦ (x, S(x))` in ℝ⁴, computed from the first and second derivatives
//! of the scalar field `S`.
//!
//! For a graph the induced quantities are
//!
//! ```text
//! g_ij   = δ_ij + ∂ᵢS ∂ⱼS
//! a      = √(1 + |∇S|²)
//! h_ij   = ε ∂ᵢ∂ⱼS / a
//! N      = ε (−∇S, 1) / a
//! Γᵏ_ij  = ∂ᵢ∂ⱼS ∂ₖS / a²
//! R_ijkl = h_ik h_jl − h_il h_jk
//! ```
//!
//! where `ε = ±1` is the [`Orientation`].

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{default_step, finite_diff, sym_pencil_eigen, SymMatrix3};

/// A point `(x¹, x², x³)` of the configuration space: thermal pressure
/// coefficient, heat capacity, volume.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StatePoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl StatePoint {
    pub const ORIGIN: StatePoint = StatePoint::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

impl From<[f64; 3]> for StatePoint {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for StatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

/// First and second derivatives of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivatives {
    pub gradient: [f64; 3],
    pub hessian: SymMatrix3,
}

impl Derivatives {
    pub fn is_finite(&self) -> bool {
        self.gradient.iter().all(|v| v.is_finite()) && self.hessian.is_finite()
    }
}

pub type ValueFn = dyn Fn(&StatePoint) -> Result<f64> + Send + Sync;
pub type DerivativesFn = dyn Fn(&StatePoint) -> Result<Derivatives> + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeSource {
    Analytic,
    FiniteDifferences,
}

/// A scalar field on an open subset of ℝ³ whose graph is the hypersurface.
#[derive(Clone)]
pub struct ScalarField {
    value: Arc<ValueFn>,
    analytic: Option<Arc<DerivativesFn>>,
    source: DerivativeSource,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("has_analytic", &self.analytic.is_some())
            .field("source", &self.source)
            .finish()
    }
}

impl ScalarField {
    /// A field whose derivatives come from central finite differences.
    pub fn new<F>(value: F) -> Self
    where
        F: Fn(&StatePoint) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            analytic: None,
            source: DerivativeSource::FiniteDifferences,
        }
    }

    pub fn with_derivatives<F, D>(value: F, derivatives: D) -> Self
    where
        F: Fn(&StatePoint) -> Result<f64> + Send + Sync + 'static,
        D: Fn(&StatePoint) -> Result<Derivatives> + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            analytic: Some(Arc::new(derivatives)),
            source: DerivativeSource::Analytic,
        }
    }

    /// Same field, derivatives forced through finite differences.
    pub fn finite_differences(&self) -> Self {
        Self {
            source: DerivativeSource::FiniteDifferences,
            ..self.clone()
        }
    }

    pub fn source(&self) -> DerivativeSource {
        self.source
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn value(&self, x: &StatePoint) -> Result<f64> {
        (self.value)(x)
    }

    pub fn finite_difference_derivatives(&self, x: &StatePoint) -> Result<Derivatives> {
        let p = x.to_array();
        let (gradient, hessian) = finite_diff(
            |q| (self.value)(&StatePoint::from(*q)).unwrap_or(f64::NAN),
            &p,
            default_step(&p),
        );
        Ok(Derivatives { gradient, hessian })
    }

    pub fn derivatives(&self, x: &StatePoint) -> Result<Derivatives> {
        let d = match (&self.analytic, self.source) {
            (Some(d), DerivativeSource::Analytic) => d(x)?,
            _ => self.finite_difference_derivatives(x)?,
        };
        if !d.is_finite() {
            return Err(Error::DerivativeFailure {
                x1: x.x1,
                x2: x.x2,
                x3: x.x3,
            });
        }
        Ok(d)
    }

    /// Largest deviation between analytic and finite-difference derivatives
    /// at `x`; `None` if the field has no analytic derivatives.
    pub fn derivative_spot_check(&self, x: &StatePoint) -> Result<Option<f64>> {
        let Some(analytic) = &self.analytic else {
            return Ok(None);
        };
        let a = analytic(x)?;
        let fd = self.finite_difference_derivatives(x)?;
        let dg = a
            .gradient
            .iter()
            .zip(fd.gradient)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        Ok(Some(dg.max(a.hessian.max_abs_diff(&fd.hessian))))
    }
}

/// Choice of unit normal. `Downward` (ε = −1) gives `N = (∇S, −1)/a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Downward,
    Upward,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Downward => -1.0,
            Orientation::Upward => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub g: SymMatrix3,
    pub h: SymMatrix3,
    pub normal: [f64; 4],
    /// `√(1 + |∇S|²)`
    pub a: f64,
}

/// `Γᵏ_ij`, indexed `[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Christoffel(pub [[[f64; 3]; 3]; 3]);

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0[k][i][j]
    }

    /// `−Γᵏ_ij vⁱ vʲ`, the geodesic acceleration.
    pub fn contract(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += self.0[k][i][j] * v[i] * v[j];
                }
            }
            *o = -s;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    m = m.max((self.0[k][i][j] - other.0[k][i][j]).abs());
                }
            }
        }
        m
    }
}

/// Covariant Riemann tensor `R_ijkl`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Riemann(pub [[[[f64; 3]; 3]; 3]; 3]);

impl Riemann {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[i][j][k][l]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m = m.max((self.0[i][j][k][l] - other.0[i][j][k][l]).abs());
                    }
                }
            }
        }
        m
    }

    /// Largest violation of `R_ijkl = −R_jikl = −R_ijlk = R_klij`.
    pub fn symmetry_defect(&self) -> f64 {
        let r = &self.0;
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = r[i][j][k][l];
                        m = m
                            .max((v + r[j][i][k][l]).abs())
                            .max((v + r[i][j][l][k]).abs())
                            .max((v - r[k][l][i][j]).abs());
                    }
                }
            }
        }
        m
    }
}

/// Principal curvatures and normalized mean curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpectrum {
    /// Eigenvalues of the shape operator, descending.
    pub principal: [f64; 3],
    /// `(e₁/3, e₂/3, e₃)` of the principal curvatures, matching
    /// `t³ − 3H₁t² + 3H₂t − H₃`.
    pub mean: [f64; 3],
    /// `(9H₁, 9H₂, H₃)`: the scaling in which the Gibbs–Helmholtz surface
    /// has `H₁ = 6x¹x³/a³` and `H₂ = −6/a⁴`.
    pub mean_paper: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub point: StatePoint,
    pub forms: FundamentalForms,
    /// `g⁻¹h`, row-major.
    pub shape_operator: [[f64; 3]; 3],
    pub spectrum: ShapeSpectrum,
    pub christoffel: Christoffel,
    pub riemann: Riemann,
    pub ricci: SymMatrix3,
    pub scalar: f64,
}

impl CurvatureReport {
    pub fn principal(&self) -> [f64; 3] {
        self.spectrum.principal
    }

    pub fn mean(&self) -> [f64; 3] {
        self.spectrum.mean
    }

    pub fn mean_paper(&self) -> [f64; 3] {
        self.spectrum.mean_paper
    }
}

fn forms_from(d: &Derivatives, orientation: Orientation) -> FundamentalForms {
    let grad = d.gradient;
    let a = (1.0 + grad.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let eps = orientation.sign();
    FundamentalForms {
        g: SymMatrix3::identity().add(&SymMatrix3::outer(&grad, 1.0)),
        h: d.hessian.scale(eps / a),
        normal: [-eps * grad[0] / a, -eps * grad[1] / a, -eps * grad[2] / a, eps / a],
        a,
    }
}

fn christoffel_from(d: &Derivatives) -> Christoffel {
    let grad = d.gradient;
    let a2 = 1.0 + grad.iter().map(|v| v * v).sum::<f64>();
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for (i, row) in gk.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = d.hessian.get(i, j) * grad[k] / a2;
            }
        }
    }
    Christoffel(gamma)
}

pub fn fundamental_forms(
    field: &ScalarField,
    x: &StatePoint,
    orientation: Orientation,
) -> Result<FundamentalForms> {
    Ok(forms_from(&field.derivatives(x)?, orientation))
}

pub fn shape_spectrum(forms: &FundamentalForms) -> Result<ShapeSpectrum> {
    let principal = sym_pencil_eigen(&forms.h, &forms.g)?.roots();
    let [l1, l2, l3] = principal;
    let e1 = l1 + l2 + l3;
    let e2 = l1 * l2 + l1 * l3 + l2 * l3;
    let e3 = l1 * l2 * l3;
    let mean = [e1 / 3.0, e2 / 3.0, e3];
    Ok(ShapeSpectrum {
        principal,
        mean,
        mean_paper: [9.0 * mean[0], 9.0 * mean[1], mean[2]],
    })
}

pub fn connection_coeffs(field: &ScalarField, x: &StatePoint) -> Result<Christoffel> {
    Ok(christoffel_from(&field.derivatives(x)?))
}

/// Riemann tensor from the Gauss equation, then `Ric_jl = g^{ik} R_ijkl`
/// and `ρ = g^{jl} Ric_jl`.
pub fn curvature_tensors(forms: &FundamentalForms) -> Result<(Riemann, SymMatrix3, f64)> {
    let h = &forms.h;
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for (i, ri) in r.iter_mut().enumerate() {
        for (j, rij) in ri.iter_mut().enumerate() {
            for (k, rijk) in rij.iter_mut().enumerate() {
                for (l, v) in rijk.iter_mut().enumerate() {
                    *v = h.get(i, k) * h.get(j, l) - h.get(i, l) * h.get(j, k);
                }
            }
        }
    }
    let ginv = forms.g.inverse()?;
    let mut ricci = SymMatrix3::zeros();
    for j in 0..3 {
        for l in j..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for k in 0..3 {
                    s += ginv.get(i, k) * r[i][j][k][l];
                }
            }
            ricci.set(j, l, s);
        }
    }
    let mut scalar = 0.0;
    for j in 0..3 {
        for l in 0..3 {
            scalar += ginv.get(j, l) * ricci.get(j, l);
        }
    }
    Ok((Riemann(r), ricci, scalar))
}

fn shape_operator(forms: &FundamentalForms) -> Result<[[f64; 3]; 3]> {
    let ginv = forms.g.inverse()?;
    let mut s = [[0.0; 3]; 3];
    for (i, row) in s.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| ginv.get(i, k) * forms.h.get(k, j)).sum();
        }
    }
    Ok(s)
}

/// Every pointwise invariant of the graph of `field` at `x`.
pub fn curvature_report(
    field: &ScalarField,
    x: &StatePoint,
    orientation: Orientation,
) -> Result<CurvatureReport> {
    let d = field.derivatives(x)?;
    let forms = forms_from(&d, orientation);
    let (riemann, ricci, scalar) = curvature_tensors(&forms)?;
    Ok(CurvatureReport {
        point: *x,
        shape_operator: shape_operator(&forms)?,
        spectrum: shape_spectrum(&forms)?,
        christoffel: christoffel_from(&d),
        forms,
        riemann,
        ricci,
        scalar,
    })
}

/// `min_c ‖h − c·g‖_F`; zero exactly at umbilical points.
pub fn umbilicity_defect(forms: &FundamentalForms) -> f64 {
    let mut hg = 0.0;
    let mut gg = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            hg += forms.h.get(i, j) * forms.g.get(i, j);
            gg += forms.g.get(i, j) * forms.g.get(i, j);
        }
    }
    let c = hg / gg;
    forms.h.sub(&forms.g.scale(c)).norm()
}
