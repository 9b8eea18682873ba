//! Gamma, log-gamma, digamma and the entire combinations 1/Γ and ψ/Γ.
//!
//! The entire forms are what the spectral code actually consumes: the
//! parabolic-cylinder boundary values at x = 0 are ratios with Γ in the
//! denominator, and their zeros are exactly the physical eigenvalues.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k) for k = 1..7, used by the digamma asymptotic series.
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// B_{2k} / (2k (2k - 1)) for k = 1..8, used by the Stirling series.
const STIRLING_COEF: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// sin(πx), exact zeros at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    let s = r.abs();
    let v = if s <= 0.25 {
        (PI * s).sin()
    } else if s < 0.75 {
        (PI * (s - 0.5)).cos()
    } else {
        (PI * (1.0 - s)).sin()
    };
    if r < 0.0 {
        -v
    } else {
        v
    }
}

/// cos(πx), exact zeros at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let s = (x - 2.0 * (0.5 * x).round()).abs();
    if s <= 0.25 {
        (PI * s).cos()
    } else if s < 0.75 {
        (PI * (0.5 - s)).sin()
    } else {
        -(PI * (1.0 - s)).cos()
    }
}

fn lanczos_sum(xm1: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (xm1 + i as f64);
    }
    acc
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    if x > 20.0 {
        return ln_gamma_stirling(x).exp();
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    // split the power so large arguments do not overflow before e^{-t}
    let half = t.powf(0.5 * (xm1 + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(xm1)
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING_COEF {
        series += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// Γ(x). Pole error at non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            function: "gamma",
            at: x,
        });
    }
    Ok(gamma_unchecked(x))
}

/// ln|Γ(x)|, finite away from the poles.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            function: "ln_gamma",
            at: x,
        });
    }
    Ok(ln_abs_gamma_unchecked(x))
}

pub(crate) fn ln_abs_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI.ln() - sin_pi(x).abs().ln() - ln_abs_gamma_unchecked(1.0 - x);
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    // shift into the Stirling region: Γ(x) = Γ(x + m) / (x (x+1) ... (x+m-1))
    let mut prod = 1.0;
    let mut y = x;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    ln_gamma_stirling(y) - prod.ln()
}

/// ψ(x) = d/dx ln Γ(x). Pole error at non-positive integers.
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            function: "digamma",
            at: x,
        });
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    if x < 0.0 {
        // ψ(x) = ψ(1 - x) - π cot(πx)
        return digamma_unchecked(1.0 - x) - PI * cos_pi(x) / sin_pi(x);
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut p = inv2;
    let mut series = 0.0;
    for c in DIGAMMA_ASYMP {
        series += c * p;
        p *= inv2;
    }
    acc + y.ln() - 0.5 / y - series
}

/// 1/Γ(x), entire; exactly zero at non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x >= 0.5 {
        1.0 / gamma_unchecked(x)
    } else {
        sin_pi(x) * gamma_unchecked(1.0 - x) / PI
    }
}

/// ψ(x)/Γ(x), entire. At x = -n the value is (-1)^{n+1} n!.
pub fn psi_over_gamma(x: f64) -> f64 {
    if x >= 0.5 {
        digamma_unchecked(x) / gamma_unchecked(x)
    } else {
        let y = 1.0 - x;
        gamma_unchecked(y) * (digamma_unchecked(y) * sin_pi(x) / PI - cos_pi(x))
    }
}

/// A real number stored as `mantissa * exp(ln_scale)`, so that ratios of
/// gamma functions far outside the f64 range can be carried around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn zero() -> Self {
        Scaled {
            mantissa: 0.0,
            ln_scale: f64::NEG_INFINITY,
        }
    }

    pub fn from_sign_ln(sign: f64, ln_abs: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            Self::zero()
        } else {
            Scaled {
                mantissa: sign,
                ln_scale: ln_abs,
            }
        }
    }

    pub fn mul_ln(self, ln_factor: f64) -> Self {
        Scaled {
            mantissa: self.mantissa,
            ln_scale: self.ln_scale + ln_factor,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Scaled {
            mantissa: self.mantissa * factor,
            ln_scale: self.ln_scale,
        }
    }

    /// Mantissa expressed relative to `exp(ln_ref)`.
    pub fn relative_to(self, ln_ref: f64) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * (self.ln_scale - ln_ref).exp()
        }
    }

    #[cfg(test)]
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * self.ln_scale.exp()
        }
    }

    pub fn add(self, other: Scaled) -> Scaled {
        let l = self.ln_scale.max(other.ln_scale);
        if l == f64::NEG_INFINITY {
            return Self::zero();
        }
        Scaled {
            mantissa: self.relative_to(l) + other.relative_to(l),
            ln_scale: l,
        }
    }
}

/// 1/Γ(x) in scaled form.
pub(crate) fn rgamma_scaled(x: f64) -> Scaled {
    if x >= 0.5 {
        Scaled::from_sign_ln(1.0, -ln_abs_gamma_unchecked(x))
    } else {
        let s = sin_pi(x);
        Scaled::from_sign_ln(
            s.signum() * (s != 0.0) as u8 as f64,
            s.abs().ln() + ln_abs_gamma_unchecked(1.0 - x) - PI.ln(),
        )
    }
}

/// ψ(x)/Γ(x) in scaled form.
pub(crate) fn psi_over_gamma_scaled(x: f64) -> Scaled {
    if x >= 0.5 {
        let psi = digamma_unchecked(x);
        Scaled::from_sign_ln(1.0, -ln_abs_gamma_unchecked(x)).scale(psi)
    } else {
        let y = 1.0 - x;
        let m = digamma_unchecked(y) * sin_pi(x) / PI - cos_pi(x);
        Scaled::from_sign_ln(1.0, ln_abs_gamma_unchecked(y)).scale(m)
    }
}
