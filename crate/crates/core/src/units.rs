//! Physical constants and unit conversions.
//!
//! Internally energies are in eV and times in ps. Rates handed around in the
//! public API (Rabi frequencies, decay widths) are in s⁻¹ unless the name says
//! otherwise.

/// Reduced Planck constant in eV·ps.
pub const HBAR_EV_PS: f64 = 6.582119569e-4;
/// Reduced Planck constant in J·s.
pub const HBAR_J_S: f64 = 1.054571817e-34;
/// Elementary charge, J per eV.
pub const EV_TO_J: f64 = 1.602176634e-19;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.8541878128e-12;
/// Nuclear magneton in J/T.
pub const NUCLEAR_MAGNETON: f64 = 5.0507837461e-27;
/// One femtometre in metres.
pub const FERMI: f64 = 1e-15;

pub const PS_PER_S: f64 = 1e12;

#[inline]
pub fn s_to_ps(t: f64) -> f64 {
    t * PS_PER_S
}

#[inline]
pub fn ps_to_s(t: f64) -> f64 {
    t / PS_PER_S
}

/// Converts a rate in s⁻¹ to ps⁻¹.
#[inline]
pub fn per_s_to_per_ps(rate: f64) -> f64 {
    rate / PS_PER_S
}

/// Converts an energy flow in eV/ps to watts.
#[inline]
pub fn ev_per_ps_to_watt(p: f64) -> f64 {
    p * EV_TO_J * PS_PER_S
}
