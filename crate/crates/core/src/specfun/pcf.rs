//! Parabolic cylinder functions D_a(x) for real order and argument.
//!
//! D_a solves y'' = (x²/4 - a - 1/2) y. Its value and slope at the origin
//! are known in closed form through 1/Γ, so D_a(x) is obtained by stepping
//! the ODE outward from x = 0 with local Taylor series (the coefficients
//! obey a three-term recurrence because the potential is quadratic). Near
//! the origin one step is exactly the even/odd Kummer series. On the
//! decaying side beyond the turning point the solution is instead
//! integrated inward from far out and matched at the turning point.
//!
//! All internal state is carried with a separate log-scale so orders up to
//! `A_MAX` can be handled even where |D_a| leaves the f64 range.

use std::f64::consts::{LN_2, PI};

use super::gamma::{psi_over_gamma_scaled, rgamma, rgamma_scaled};
use crate::error::{Error, Result};

/// Largest |a| accepted by the public evaluators.
pub const A_MAX: f64 = 200.0;

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
const MAX_TERMS: usize = 400;
const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfValue {
    pub value: f64,
    pub abs_err_estimate: f64,
}

fn check_order(a: f64) -> Result<()> {
    if !a.is_finite() || a.abs() > A_MAX {
        return Err(Error::Domain(format!(
            "parabolic cylinder order a = {a} outside |a| <= {A_MAX}"
        )));
    }
    Ok(())
}

/// Value, slope, and their a-derivatives at the origin, with a shared scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OriginData {
    pub ln_scale: f64,
    pub d: f64,
    pub dp: f64,
    pub d_a: f64,
    pub dp_a: f64,
}

pub(crate) fn origin_data(a: f64) -> OriginData {
    let z = 0.5 * (1.0 - a);
    let w = -0.5 * a;
    let rz = rgamma_scaled(z);
    let rw = rgamma_scaled(w);
    let pz = psi_over_gamma_scaled(z);
    let pw = psi_over_gamma_scaled(w);

    // D_a(0)   =  2^{a/2} √π / Γ((1-a)/2)
    // D'_a(0)  = -2^{(1+a)/2} √π / Γ(-a/2)
    // ∂a D_a(0)  = 2^{a/2-1} √π [ln2/Γ(z) + ψ(z)/Γ(z)]
    // ∂a D'_a(0) = -2^{(1+a)/2} √π · ½ [ln2/Γ(w) + ψ(w)/Γ(w)]
    let pre_d = 0.5 * a * LN_2 + LN_SQRT_PI;
    let pre_dp = 0.5 * (1.0 + a) * LN_2 + LN_SQRT_PI;
    let d = rz.mul_ln(pre_d);
    let dp = rw.mul_ln(pre_dp).scale(-1.0);
    let d_a = rz.scale(LN_2).add(pz).mul_ln(pre_d - LN_2);
    let dp_a = rw.scale(LN_2).add(pw).mul_ln(pre_dp - LN_2).scale(-1.0);

    let ln_scale = [d, dp, d_a, dp_a]
        .iter()
        .map(|s| {
            if s.mantissa == 0.0 {
                f64::NEG_INFINITY
            } else {
                s.ln_scale
            }
        })
        .fold(f64::NEG_INFINITY, f64::max);
    OriginData {
        ln_scale,
        d: d.relative_to(ln_scale),
        dp: dp.relative_to(ln_scale),
        d_a: d_a.relative_to(ln_scale),
        dp_a: dp_a.relative_to(ln_scale),
    }
}

/// ODE state: y, y', and optionally ∂y/∂a, ∂y'/∂a, all relative to
/// `exp(ln_scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OdeState {
    pub x: f64,
    pub y: f64,
    pub yp: f64,
    pub ya: f64,
    pub yap: f64,
    pub ln_scale: f64,
    /// Absolute error bound for y, same scale.
    pub err: f64,
}

impl OdeState {
    fn rescale(&mut self) {
        let m = self.y.abs().max(self.yp.abs());
        if m > RESCALE_HI || (m < RESCALE_LO && m > 0.0) {
            self.y /= m;
            self.yp /= m;
            self.ya /= m;
            self.yap /= m;
            self.err /= m;
            self.ln_scale += m.ln();
        }
    }
}

fn step_size(c: f64, x: f64) -> f64 {
    let q_bound = c.abs() + 0.25 * (x.abs() + 0.5).powi(2);
    (1.0 / q_bound.sqrt()).min(0.5)
}

/// One Taylor step of length `h` for y'' = (x²/4 - c) y starting at `st.x`.
/// Returns the sum of absolute series terms (rounding scale).
fn taylor_step(c: f64, st: &mut OdeState, h: f64, with_sens: bool) -> f64 {
    let x = st.x;
    let q0 = 0.25 * x * x - c;
    let q1 = 0.5 * x;
    let q2 = 0.25;

    // (k+2)(k+1) b_{k+2} = q0 b_k + q1 b_{k-1} + q2 b_{k-2}
    // sensitivity coefficients d pick up -b_k since ∂q0/∂a = -1
    // window: (b_{k-2}, b_{k-1}, b_k, b_{k+1})
    let (mut b2, mut b1, mut b0, mut bn) = (0.0, 0.0, st.y, st.yp);
    let (mut d2, mut d1, mut d0, mut dn) = (0.0, 0.0, st.ya, st.yap);

    let mut y = st.y + st.yp * h;
    let mut yp = st.yp;
    let mut ya = st.ya + st.yap * h;
    let mut yap = st.yap;
    let mut abs_sum = st.y.abs() + (st.yp * h).abs();
    let mut abs_sum_d = st.ya.abs() + (st.yap * h).abs() + 1e-300;
    let mut hm1 = h; // h^{m-1} for the coefficient index m = k + 2

    let mut k = 0usize;
    let mut quiet = 0;
    loop {
        let m = k + 2;
        let denom = (m * (m - 1)) as f64;
        let bm = (q0 * b0 + q1 * b1 + q2 * b2) / denom;
        let dm = if with_sens {
            (q0 * d0 + q1 * d1 + q2 * d2 - b0) / denom
        } else {
            0.0
        };
        let t_slope = m as f64 * bm * hm1;
        hm1 *= h;
        let t = bm * hm1;
        y += t;
        yp += t_slope;
        abs_sum += t.abs();
        let mut small = t.abs() <= 1e-18 * y.abs().max(abs_sum)
            && t_slope.abs() * h.abs() <= 1e-18 * (yp.abs() * h.abs()).max(abs_sum);
        if with_sens {
            let s = dm * hm1;
            let s_slope = m as f64 * dm * hm1 / h;
            ya += s;
            yap += s_slope;
            abs_sum_d += s.abs();
            small = small
                && s.abs() <= 1e-18 * abs_sum_d
                && (s_slope * h).abs() <= 1e-18 * abs_sum_d.max((yap * h).abs());
        }

        b2 = b1;
        b1 = b0;
        b0 = bn;
        bn = bm;
        d2 = d1;
        d1 = d0;
        d0 = dn;
        dn = dm;

        // three consecutive negligible terms: the recurrence can produce an
        // isolated tiny coefficient before the series has converged
        quiet = if small { quiet + 1 } else { 0 };
        k += 1;
        if quiet >= 3 || k >= MAX_TERMS {
            break;
        }
    }
    st.x = x + h;
    st.y = y;
    st.yp = yp;
    st.ya = ya;
    st.yap = yap;
    abs_sum
}

/// Integrate from `st.x` to `target`, tracking an error bound.
fn integrate(c: f64, st: &mut OdeState, target: f64, with_sens: bool) {
    let dir = if target >= st.x { 1.0 } else { -1.0 };
    while (target - st.x) * dir > 0.0 {
        let h_mag = step_size(c, st.x).min((target - st.x).abs());
        let h = dir * h_mag;
        let x_end = st.x + h;
        let q_pos = (0.25 * st.x * st.x - c)
            .max(0.25 * x_end * x_end - c)
            .max(0.0);
        let growth = (h_mag * (q_pos.sqrt() + 0.5)).exp();
        let abs_sum = taylor_step(c, st, h, with_sens);
        if (target - st.x).abs() < 1e-15 * target.abs().max(1.0) {
            st.x = target;
        }
        st.err = st.err * growth + 8.0 * f64::EPSILON * abs_sum;
        st.rescale();
    }
}

fn forward_state(a: f64, x: f64, with_sens: bool) -> OdeState {
    let o = origin_data(a);
    let mut st = OdeState {
        x: 0.0,
        y: o.d,
        yp: o.dp,
        ya: o.d_a,
        yap: o.dp_a,
        ln_scale: o.ln_scale,
        err: 4.0 * f64::EPSILON * (o.d.abs() + o.dp.abs()),
    };
    integrate(a + 0.5, &mut st, x, with_sens);
    st
}

/// D_a(x), ∂x D_a(x) and ∂a D_a(x) sharing one scale; the sign of each
/// component is exact for root bracketing. Not restricted to `A_MAX`.
pub(crate) fn pcf_scaled_with_derivs(a: f64, x: f64) -> OdeState {
    forward_state(a, x, true)
}

/// D_a(x) with an error estimate.
pub fn pcf_d(a: f64, x: f64) -> Result<PcfValue> {
    check_order(a)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("argument x = {x} is not finite")));
    }
    let c = a + 0.5;
    let turning = if c > 0.0 { 2.0 * c.sqrt() } else { 0.0 };
    let x_match = turning.max(1.0);

    let (value, err) = if x <= x_match {
        let st = forward_state(a, x, false);
        (
            scaled_value(st.y, st.ln_scale),
            scaled_value(st.err, st.ln_scale),
        )
    } else {
        let fwd = forward_state(a, x_match, false);
        // start far enough out that the growing component has died away
        let x_far = (x * x + 80.0).sqrt();
        let mut back = OdeState {
            x: x_far,
            y: 1.0,
            yp: -0.5 * x_far + a / x_far,
            ya: 0.0,
            yap: 0.0,
            ln_scale: 0.0,
            err: 0.0,
        };
        integrate(c, &mut back, x, false);
        let (yx, ln_x) = (back.y, back.ln_scale);
        integrate(c, &mut back, x_match, false);
        let (ym, ypm) = (back.y, back.yp);
        // least-squares match of (y, y') at the turning point
        let s = (fwd.y * ym + fwd.yp * ypm) / (ym * ym + ypm * ypm);
        let ln_total = fwd.ln_scale - back.ln_scale + ln_x;
        let v = scaled_value(s * yx, ln_total);
        let rel_fwd = fwd.err / (fwd.y.abs() + fwd.yp.abs());
        (v, v.abs() * (rel_fwd + 1e-14))
    };
    if !value.is_finite() {
        return Err(Error::Domain(format!("D_{a}({x}) overflows f64")));
    }
    Ok(PcfValue {
        value,
        abs_err_estimate: err.abs(),
    })
}

fn scaled_value(m: f64, ln_scale: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m * ln_scale.exp()
    }
}

/// D_a(0) = 2^{a/2} √π / Γ((1-a)/2). Pole error at a = 1, 3, 5, ...
/// where the reciprocal gamma vanishes.
pub fn pcf_d0(a: f64) -> Result<f64> {
    check_order(a)?;
    let z = 0.5 * (1.0 - a);
    if z <= 0.0 && z == z.floor() {
        return Err(Error::Pole {
            function: "pcf_d0",
            at: a,
        });
    }
    Ok(2f64.powf(0.5 * a) * PI.sqrt() * rgamma(z))
}

/// D'_a(0) = -2^{(1+a)/2} √π / Γ(-a/2). At a = 0, 2, 4, ... Γ has a pole
/// and the value is the limit 0.
pub fn pcf_dprime0(a: f64) -> Result<f64> {
    check_order(a)?;
    Ok(-(2f64.powf(0.5 * (1.0 + a))) * PI.sqrt() * rgamma(-0.5 * a))
}

/// d/da D_a(0) = 2^{a/2-1} √π / Γ((1-a)/2) · (ln 2 + ψ((1-a)/2)), with the
/// Γ and ψ poles at a = 1, 3, 5, ... resolved through ψ/Γ.
pub fn pcf_da_at0(a: f64) -> Result<f64> {
    check_order(a)?;
    let z = 0.5 * (1.0 - a);
    let r = rgamma(z);
    let pr = super::gamma::psi_over_gamma(z);
    Ok(2f64.powf(0.5 * a - 1.0) * PI.sqrt() * (LN_2 * r + pr))
}

/// Norm factor N of the even barrier eigenfunction N·D_a(√2 q) (natural
/// units, normalized over the whole line):
/// N⁻² = (√π/2) [ψ((1-a)/2) - ψ(-a/2)] / Γ(-a).
/// Defined for non-integer a; at integer a the bracket and Γ(-a) are both
/// singular and a domain error is returned.
pub fn even_state_norm(a: f64) -> Result<f64> {
    check_order(a)?;
    if (a - a.round()).abs() < 1e-9 {
        return Err(Error::Domain(format!(
            "even-state normalization is singular at integer a = {a}"
        )));
    }
    let psi1 = super::gamma::digamma(0.5 * (1.0 - a))?;
    let psi2 = super::gamma::digamma(-0.5 * a)?;
    let inv_sq = 0.5 * PI.sqrt() * (psi1 - psi2) * rgamma(-a);
    if inv_sq <= 0.0 {
        return Err(Error::Domain(format!(
            "even-state normalization not positive at a = {a}"
        )));
    }
    Ok(inv_sq.powf(-0.5))
}
