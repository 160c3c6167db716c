//! Real roots of monic cubics.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Roots closer than this are reported as one root of higher multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-9;

/// Three real roots sorted descending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    roots: [f64; 3],
}

impl CubicRoots {
    /// Sorts descending; the sort is stable so equal roots keep their order.
    pub fn from_unsorted(mut roots: [f64; 3]) -> Self {
        roots.sort_by(|a, b| b.total_cmp(a));
        Self { roots }
    }

    pub fn roots(&self) -> [f64; 3] {
        self.roots
    }

    /// Number of roots within [`MULTIPLICITY_TOL`] of root `i` (itself included).
    pub fn multiplicity(&self, i: usize) -> usize {
        let r = self.roots[i];
        self.roots
            .iter()
            .filter(|&&s| (s - r).abs() <= MULTIPLICITY_TOL * r.abs().max(1.0))
            .count()
    }

    /// `(e₁, e₂, e₃)`: sum, sum of pairwise products, product.
    pub fn elementary_symmetric(&self) -> [f64; 3] {
        let [a, b, c] = self.roots;
        [a + b + c, a * b + a * c + b * c, a * b * c]
    }
}

fn eval(c2: f64, c1: f64, c0: f64, t: f64) -> (f64, f64) {
    let p = ((t + c2) * t + c1) * t + c0;
    let dp = (3.0 * t + 2.0 * c2) * t + c1;
    (p, dp)
}

fn polish(c2: f64, c1: f64, c0: f64, mut t: f64) -> f64 {
    let (mut p, _) = eval(c2, c1, c0, t);
    for _ in 0..8 {
        let (_, dp) = eval(c2, c1, c0, t);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let next = t - p / dp;
        let (pn, _) = eval(c2, c1, c0, next);
        if !(pn.abs() < p.abs()) {
            break;
        }
        t = next;
        p = pn;
    }
    t
}

/// Real roots of `t³ + c2·t² + c1·t + c0 = 0` by the trigonometric method,
/// each root Newton-polished.
///
/// Only the three-real-root case is supported; a complex pair beyond
/// rounding noise yields [`Error::NonRealRoots`].
pub fn solve_cubic(c2: f64, c1: f64, c0: f64) -> Result<CubicRoots> {
    if !(c2.is_finite() && c1.is_finite() && c0.is_finite()) {
        return Err(Error::domain("cubic coefficients must be finite"));
    }
    let shift = c2 / 3.0;
    // depressed cubic s³ + p s + q with t = s − c2/3
    let p = c1 - c2 * shift;
    let q = 2.0 * shift * shift * shift - shift * c1 + c0;
    let scale = 1.0_f64
        .max(c2.abs())
        .max(c1.abs().sqrt())
        .max(c0.abs().cbrt());
    let disc = 4.0 * p * p * p + 27.0 * q * q;

    let depressed = if p.abs() <= 1e-14 * scale * scale {
        if q.abs() > 1e-12 * scale * scale * scale {
            return Err(Error::NonRealRoots { discriminant: -disc });
        }
        [0.0; 3]
    } else if p > 0.0 {
        return Err(Error::NonRealRoots { discriminant: -disc });
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = 3.0 * q / (p * m);
        if arg.abs() > 1.0 + 1e-8 {
            return Err(Error::NonRealRoots { discriminant: -disc });
        }
        let phi = arg.clamp(-1.0, 1.0).acos() / 3.0;
        [
            m * phi.cos(),
            m * (phi - 2.0 * PI / 3.0).cos(),
            m * (phi - 4.0 * PI / 3.0).cos(),
        ]
    };
    let roots = depressed.map(|s| polish(c2, c1, c0, s - shift));
    Ok(CubicRoots::from_unsorted(roots))
}
