//! Special functions for the barrier spectral problem.

mod gamma;
mod pcf;

pub use gamma::{cos_pi, digamma, gamma, ln_gamma, psi_over_gamma, rgamma, sin_pi};
pub use pcf::{even_state_norm, pcf_d, pcf_d0, pcf_da_at0, pcf_dprime0, PcfValue, A_MAX};

pub(crate) use gamma::ln_abs_gamma_unchecked;
pub(crate) use pcf::pcf_scaled_with_derivs;
