//! Bracketed scalar root finders.

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket.
pub(crate) fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
    context: &str,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            context: context.to_string(),
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
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
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

/// Newton iteration kept inside a sign bracket, falling back to bisection.
///
/// `f` returns the sign-carrying value and the Newton ratio f/f' evaluated
/// together; values from different calls need not share a scale.
pub(crate) fn newton_bracketed<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    lo: f64,
    hi: f64,
    guess: f64,
    xtol: f64,
    context: &str,
) -> Result<f64> {
    let (f_lo, _) = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let (f_hi, _) = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    newton_in_sign_bracket(f, lo, hi, f_lo, f_hi, guess, xtol, context)
}

/// As [`newton_bracketed`] with the endpoint values already known.
#[allow(clippy::too_many_arguments)]
pub(crate) fn newton_in_sign_bracket<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    guess: f64,
    xtol: f64,
    context: &str,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            context: context.to_string(),
        });
    }
    let lo_sign = f_lo.signum();
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    for _ in 0..200 {
        let (fx, ratio) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - ratio;
        let accept =
            ratio.is_finite() && newton > lo && newton < hi && 2.0 * ratio.abs() < dx_old.abs();
        dx_old = dx;
        if accept {
            dx = -ratio;
            x = newton;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        let tol = xtol + 4.0 * f64::EPSILON * x.abs();
        if dx.abs() < tol || hi - lo < tol {
            return Ok(x);
        }
    }
    if hi - lo < 1e3 * xtol {
        Ok(x)
    } else {
        Err(Error::Bracket {
            lo,
            hi,
            context: format!("{context}: no convergence"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, "cubic").unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_missing_bracket() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, "none"),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn newton_with_rescaled_values_converges() {
        // value scale changes per call; only the sign and ratio matter
        let mut calls = 0;
        let r = newton_bracketed(
            |x: f64| {
                calls += 1;
                let v = x.cos() - x;
                let d = -x.sin() - 1.0;
                (v * 10f64.powi(calls % 7), v / d)
            },
            0.0,
            1.0,
            0.3,
            1e-14,
            "cos",
        )
        .unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-13);
    }

    #[test]
    fn newton_survives_bad_ratio() {
        let r = newton_bracketed(|x| (x - 0.25, f64::NAN), 0.0, 1.0, 0.9, 1e-13, "nan").unwrap();
        assert!((r - 0.25).abs() < 1e-12);
    }
}
