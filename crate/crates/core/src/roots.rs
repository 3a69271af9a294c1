//! Bracketing and Brent-style refinement for scalar roots.

use crate::error::{Error, Result};

/// A sign-change interval `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Grow `hi` by doubling from `start` until `f` changes sign relative to `f(lo)`.
///
/// `lo` is kept at the last point with the sign of `f(origin)`.
pub fn bracket_by_doubling<F: Fn(f64) -> f64>(f: F, origin: f64, start: f64, max_doublings: usize) -> Result<Bracket> {
    let f0 = f(origin);
    if f0 == 0.0 {
        return Ok(Bracket { lo: origin, hi: origin });
    }
    let mut lo = origin;
    let mut hi = start;
    for _ in 0..max_doublings {
        let fh = f(hi);
        if fh == 0.0 || fh.signum() != f0.signum() {
            return Ok(Bracket { lo, hi });
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Root(format!("no sign change found up to {hi:e}")))
}

/// Brent's method on a sign-change bracket.
///
/// Stops when the bracket width falls below `xtol_rel * |x|` (plus a tiny
/// absolute floor) or the residual vanishes.
pub fn brent<F: Fn(f64) -> f64>(f: F, bracket: Bracket, xtol_rel: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root(format!("[{a}, {b}] does not bracket a root")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol_rel * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Root(format!("Brent iteration limit reached near {b}")))
}

/// Plain bisection, kept as an oracle independent of [`brent`].
pub fn bisect<F: Fn(f64) -> f64>(f: F, bracket: Bracket, xtol_rel: f64) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == f(hi).signum() {
        return Err(Error::Root(format!("[{lo}, {hi}] does not bracket a root")));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= xtol_rel * mid.abs() || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
