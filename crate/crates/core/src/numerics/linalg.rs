//! Dense 3×3 symmetric linear algebra.

use serde::{Deserialize, Serialize};

use super::cubic::CubicRoots;
use crate::error::{Error, Result};

/// Smallest leading principal minor accepted as positive definite.
pub const MIN_LEADING_MINOR: f64 = 1e-12;

/// A real symmetric 3×3 matrix, stored as its upper triangle
/// `[a11, a12, a13, a22, a23, a33]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix3 {
    upper: [f64; 6],
}

#[inline]
fn slot(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => panic!("SymMatrix3 index ({i}, {j}) out of range"),
    }
}

impl SymMatrix3 {
    pub const fn new(a11: f64, a12: f64, a13: f64, a22: f64, a23: f64, a33: f64) -> Self {
        Self {
            upper: [a11, a12, a13, a22, a23, a33],
        }
    }

    pub const fn zeros() -> Self {
        Self { upper: [0.0; 6] }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)
    }

    pub const fn diag(d1: f64, d2: f64, d3: f64) -> Self {
        Self::new(d1, 0.0, 0.0, d2, 0.0, d3)
    }

    /// Builds from a full matrix, averaging the two off-diagonal halves.
    pub fn from_rows(m: &[[f64; 3]; 3]) -> Self {
        Self::new(
            m[0][0],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            m[1][1],
            0.5 * (m[1][2] + m[2][1]),
            m[2][2],
        )
    }

    /// `u uᵀ` scaled by `s`.
    pub fn outer(u: &[f64; 3], s: f64) -> Self {
        Self::new(
            s * u[0] * u[0],
            s * u[0] * u[1],
            s * u[0] * u[2],
            s * u[1] * u[1],
            s * u[1] * u[2],
            s * u[2] * u[2],
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[slot(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.upper[slot(i, j)] = v;
    }

    pub fn upper(&self) -> [f64; 6] {
        self.upper
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.upper.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for (v, w) in out.upper.iter_mut().zip(other.upper) {
            *v += w;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn trace(&self) -> f64 {
        self.upper[0] + self.upper[3] + self.upper[5]
    }

    pub fn det(&self) -> f64 {
        let [a, b, c, d, e, f] = self.upper;
        a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
    }

    /// Leading principal minors `(Δ₁, Δ₂, Δ₃)`.
    pub fn leading_minors(&self) -> [f64; 3] {
        let [a, b, _, d, _, _] = self.upper;
        [a, a * d - b * b, self.det()]
    }

    pub fn mul_vec(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.get(i, j) * v[j]).sum();
        }
        out
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[f64; 3]) -> f64 {
        let av = self.mul_vec(v);
        av[0] * v[0] + av[1] * v[1] + av[2] * v[2]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.upper
            .iter()
            .zip(other.upper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Inverse via the adjugate. Fails when the determinant vanishes.
    pub fn inverse(&self) -> Result<Self> {
        let [a, b, c, d, e, f] = self.upper;
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NotPositiveDefinite { minor: det });
        }
        let inv = 1.0 / det;
        Ok(Self::new(
            (d * f - e * e) * inv,
            (c * e - b * f) * inv,
            (b * e - c * d) * inv,
            (a * f - c * c) * inv,
            (b * c - a * e) * inv,
            (a * d - b * b) * inv,
        ))
    }

    /// Cholesky factor `L` (lower triangular, row-major) with `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<[[f64; 3]; 3]> {
        for minor in self.leading_minors() {
            if !(minor > MIN_LEADING_MINOR) {
                return Err(Error::NotPositiveDefinite { minor });
            }
        }
        let mut l = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let d = self.get(i, i) - s;
                    if !(d > 0.0) {
                        return Err(Error::NotPositiveDefinite { minor: d });
                    }
                    l[i][i] = d.sqrt();
                } else {
                    l[i][j] = (self.get(i, j) - s) / l[j][j];
                }
            }
        }
        Ok(l)
    }
}

/// Eigenvalues of a symmetric 3×3 matrix by cyclic Jacobi rotations,
/// sorted descending.
pub fn sym_eigenvalues(a: &SymMatrix3) -> [f64; 3] {
    let mut m = a.to_rows();
    for _sweep in 0..64 {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        let diag = m[0][0].abs() + m[1][1].abs() + m[2][2].abs();
        if off == 0.0 || off <= f64::EPSILON * 1e-3 * diag {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
        }
    }
    let mut ev = [m[0][0], m[1][1], m[2][2]];
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Eigenvalues of the pencil `det(h − t·g) = 0` for symmetric `h` and
/// positive definite `g`, via `g = L Lᵀ` and the symmetric matrix
/// `L⁻¹ h L⁻ᵀ`.
pub fn sym_pencil_eigen(h: &SymMatrix3, g: &SymMatrix3) -> Result<CubicRoots> {
    let l = g.cholesky()?;
    // forward substitution: columns of L⁻¹
    let mut linv = [[0.0; 3]; 3];
    for col in 0..3 {
        for i in 0..3 {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (0..i).map(|k| l[i][k] * linv[k][col]).sum();
            linv[i][col] = (rhs - s) / l[i][i];
        }
    }
    let hm = h.to_rows();
    let mut reduced = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                for m in 0..3 {
                    s += linv[i][k] * hm[k][m] * linv[j][m];
                }
            }
            reduced[i][j] = s;
        }
    }
    Ok(CubicRoots::from_unsorted(sym_eigenvalues(
        &SymMatrix3::from_rows(&reduced),
    )))
}

/// Solves the 3×3 system `A x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` for a singular matrix.
pub fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))?;
        if m[pivot][col] == 0.0 || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pencil_trivial_cases() {
        let r = sym_pencil_eigen(&SymMatrix3::zeros(), &SymMatrix3::identity()).unwrap();
        assert_eq!(r.roots(), [0.0, 0.0, 0.0]);
        let r = sym_pencil_eigen(&SymMatrix3::identity(), &SymMatrix3::identity()).unwrap();
        for v in r.roots() {
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert_eq!(r.multiplicity(0), 3);
    }

    #[test]
    fn pencil_at_origin_of_gh_surface() {
        let g = SymMatrix3::diag(1.0, 2.0, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = SymMatrix3::new(0.0, 0.0, -s, 0.0, 0.0, 0.0);
        let r = sym_pencil_eigen(&h, &g).unwrap().roots();
        assert!((r[0] - s).abs() < 1e-14);
        assert!(r[1].abs() < 1e-14);
        assert!((r[2] + s).abs() < 1e-14);
    }

    #[test]
    fn pencil_rejects_indefinite_metric() {
        let g = SymMatrix3::diag(1.0, -1.0, 1.0);
        let err = sym_pencil_eigen(&SymMatrix3::identity(), &g).unwrap_err();
        assert_eq!(err.name(), "NotPositiveDefinite");
        let g = SymMatrix3::diag(1.0, 1e-13, 1.0);
        assert!(sym_pencil_eigen(&SymMatrix3::identity(), &g).is_err());
    }

    #[test]
    fn cholesky_reconstructs() {
        let g = SymMatrix3::new(5.0, -2.0, 2.0, 2.0, -1.0, 2.0);
        let l = g.cholesky().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((s - g.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let g = SymMatrix3::new(5.0, -2.0, 2.0, 2.0, -1.0, 2.0);
        let gi = g.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| g.get(i, k) * gi.get(k, j)).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn solve3_matches_known_solution() {
        let a = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]];
        let x = solve3(&a, &[7.0, 3.0, 6.0]).unwrap();
        for (v, e) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!(solve3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], &[1.0; 3]).is_none());
    }
}
