//! Central finite differences for scalar fields on ℝ³.

use super::linalg::SymMatrix3;

/// `1e−4 · max(1, |x|∞)`.
pub fn default_step(x: &[f64; 3]) -> f64 {
    1e-4 * x.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Gradient and (symmetrized) Hessian by second-order central differences.
pub fn finite_diff<F>(field: F, x: &[f64; 3], h: f64) -> ([f64; 3], SymMatrix3)
where
    F: Fn(&[f64; 3]) -> f64,
{
    let at = |di: [f64; 3]| field(&[x[0] + di[0], x[1] + di[1], x[2] + di[2]]);
    let e = |i: usize, s: f64| {
        let mut v = [0.0; 3];
        v[i] = s;
        v
    };
    let f0 = field(x);
    let mut grad = [0.0; 3];
    let mut hess = SymMatrix3::zeros();
    for i in 0..3 {
        let fp = at(e(i, h));
        let fm = at(e(i, -h));
        grad[i] = (fp - fm) / (2.0 * h);
        hess.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let mut pp = [0.0; 3];
            let mut pm = [0.0; 3];
            let mut mp = [0.0; 3];
            let mut mm = [0.0; 3];
            pp[i] = h;
            pp[j] = h;
            pm[i] = h;
            pm[j] = -h;
            mp[i] = -h;
            mp[j] = h;
            mm[i] = -h;
            mm[j] = -h;
            let v = (at(pp) - at(pm) - at(mp) + at(mm)) / (4.0 * h * h);
            hess.set(i, j, v);
        }
    }
    (grad, hess)
}
