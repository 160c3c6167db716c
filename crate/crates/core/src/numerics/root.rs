//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Brent's method on `bracket`. Terminates when `|f(x)| ≤ tol` or the
/// bracket is narrower than `tol`; bisection steps keep it bounded.
pub fn find_root<F>(f: F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if fb.abs() <= tol || xm.abs() <= tol1 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFiniteState { t: b });
        }
    }
    Ok(b)
}

/// Grows `[lo, hi]` geometrically around its midpoint until `f` changes
/// sign, then solves. Gives up after `max_doublings`.
pub fn find_root_expanding<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_doublings: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    for _ in 0..=max_doublings {
        let (flo, fhi) = (f(lo), f(hi));
        if flo.is_finite() && fhi.is_finite() && (flo == 0.0 || fhi == 0.0 || flo.signum() != fhi.signum()) {
            return find_root(f, (lo, hi), tol);
        }
        let mid = 0.5 * (lo + hi);
        let half = hi - mid;
        lo = mid - 2.0 * half;
        hi = mid + 2.0 * half;
    }
    Err(Error::NoSignChange { lo, hi })
}
