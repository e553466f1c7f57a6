//! Scalar root finding on bracketed, monotone functions.

/// Safeguarded Newton iteration for an increasing `f` with `f(lo) <= 0 <= f(hi)`.
/// `f` returns the value and derivative. Steps leaving the bracket, or not
/// shrinking it fast enough, fall back to bisection.
pub fn newton_bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    if f_lo >= 0.0 {
        return lo;
    }
    let (f_hi, _) = f(hi);
    if f_hi <= 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..200 {
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton_ok = dfx > 0.0 && {
            let next = x - fx / dfx;
            next > lo && next < hi && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() < tol * 1e-2 || hi - lo < tol * 1e-2 {
            return x;
        }
        let v = f(x);
        fx = v.0;
        dfx = v.1;
    }
    x
}

/// Illinois-modified regula falsi for a sign change on `[lo, hi]`.
/// Derivative free; used where an independent code path is wanted.
pub fn illinois<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(f_lo.signum() != f_hi.signum(), "illinois needs a sign change");
    let mut side = 0i8;
    for _ in 0..300 {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let x = if x > lo.min(hi) && x < lo.max(hi) { x } else { 0.5 * (lo + hi) };
        let fx = f(x);
        if fx == 0.0 || (hi - lo).abs() < tol {
            return x;
        }
        if fx.signum() == f_hi.signum() {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
        if (hi - lo).abs() < tol {
            return 0.5 * (lo + hi);
        }
    }
    0.5 * (lo + hi)
}

/// Plain bisection to machine resolution for `g(lo) < 0 <= g(hi)`.
/// Returns the smallest point where `g >= 0` up to resolution.
pub fn bisect_threshold<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Scans `points` for the first index where `g` turns non-negative and
/// refines the crossing by bisection. `None` when `g` stays negative.
pub fn first_crossing<G: Fn(f64) -> f64>(g: G, points: &[f64]) -> Option<f64> {
    let first = *points.first()?;
    if g(first) >= 0.0 {
        return Some(first);
    }
    points
        .windows(2)
        .find(|w| g(w[1]) >= 0.0)
        .map(|w| bisect_threshold(&g, w[0], w[1]))
}
