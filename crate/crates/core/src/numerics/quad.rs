//! Quadrature over the real line for integrands with Gaussian-type tails.
//!
//! Two independent rules are provided: a globally adaptive Gauss–Kronrod
//! (7/15) rule on the truncated window `[center − 12·scale, center + 12·scale]`
//! and a fixed-node Gauss–Hermite rule on the whole line.

use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Half-width of the adaptive window, in units of `scale`.
pub const WINDOW_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_HERMITE_NODES: usize = 64;
pub const MIN_NODES: usize = 8;
/// Panels the adaptive rule may create before giving up.
pub const MAX_PANELS: usize = 4096;
const INITIAL_PANELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    AdaptiveInterval,
    GaussHermite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    /// Nodes per panel for the adaptive rule (fixed at 15), total nodes for
    /// the Hermite rule.
    pub nodes: usize,
    pub tol: f64,
}

impl QuadratureRule {
    pub fn adaptive(tol: f64) -> Self {
        Self {
            kind: QuadratureKind::AdaptiveInterval,
            nodes: 15,
            tol,
        }
    }

    pub fn hermite(nodes: usize) -> Self {
        Self {
            kind: QuadratureKind::GaussHermite,
            nodes,
            tol: DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < MIN_NODES {
            return Err(Error::InvalidSettings(format!(
                "quadrature needs at least {MIN_NODES} nodes, got {}",
                self.nodes
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "quadrature tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::adaptive(DEFAULT_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates `integrand` over ℝ. `center` and `scale` locate the bulk of
/// the mass (mean and standard deviation for a Gaussian family).
pub fn quad_entropy<F>(integrand: F, center: f64, scale: f64, rule: &QuadratureRule) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    rule.validate()?;
    if !(scale > 0.0 && scale.is_finite() && center.is_finite()) {
        return Err(Error::domain(format!(
            "quadrature window needs finite center and positive scale (center {center}, scale {scale})"
        )));
    }
    match rule.kind {
        QuadratureKind::AdaptiveInterval => {
            let half = WINDOW_HALF_WIDTH * scale;
            integrate_adaptive(integrand, center - half, center + half, rule.tol, MAX_PANELS)
        }
        QuadratureKind::GaussHermite => {
            let full = HermiteRule::new(rule.nodes);
            let value = full.integrate(&integrand, center, scale);
            let half = HermiteRule::new((rule.nodes / 2).max(MIN_NODES / 2));
            let coarse = half.integrate(&integrand, center, scale);
            Ok(QuadResult {
                value,
                error: (value - coarse).abs(),
                evaluations: full.nodes.len() + half.nodes.len(),
            })
        }
    }
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// weights of the embedded 7-point Gauss rule, at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod integration on `[a, b]`: the panel with
/// the largest error estimate is bisected until the summed estimate is
/// within `tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let mut heap = BinaryHeap::new();
    let width = (b - a) / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        heap.push(gk15(&f, lo, hi));
    }
    let mut evaluations = 15 * INITIAL_PANELS;
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonFiniteState { t: f64::NAN });
        }
        if error <= tol {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::ToleranceNotMet { tol, estimate: error });
        }
        let worst = heap.pop().expect("heap holds the initial panels");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::ToleranceNotMet { tol, estimate: error });
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
        evaluations += 30;
    }
}

/// Gauss–Hermite nodes and weights for `∫ e^{−u²} g(u) du`.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Newton iteration on the orthonormal Hermite recurrence, with the
    /// classic asymptotic starting guesses for the largest roots.
    pub fn new(n: usize) -> Self {
        const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        Self { nodes: x, weights: w }
    }

    /// `∫ g(y) dy` with `y = center + √2·scale·u`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: &F, center: f64, scale: f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * scale;
        let mut sum = 0.0;
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * (u * u).exp() * g(center + s * u);
        }
        s * sum
    }
}
