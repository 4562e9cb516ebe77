use std::f64::consts::{LN_2, PI};

use super::types::{NuclideRecord, TransitionKind};
use crate::error::{Error, Result};
use crate::pulse::solve_resonance;
use crate::units::{EPSILON_0, EV_TO_J, FERMI, HBAR_J_S, NUCLEAR_MAGNETON, SPEED_OF_LIGHT};

/// Decay rate ln 2 / t½ in s⁻¹. `None` marks a stable level and yields 0.
pub fn linewidth_from_half_life(t_half: Option<f64>) -> Result<f64> {
    match t_half {
        None => Ok(0.0),
        Some(t) if t > 0.0 => Ok(LN_2 / t),
        Some(t) => Err(Error::Domain(format!("half-life must be positive, got {t}"))),
    }
}

/// Single-particle (Weisskopf) estimate of B(EL) in e²·fm^{2L}, or of B(ML)
/// in μ_N²·fm^{2L−2}.
pub fn weisskopf_unit(kind: TransitionKind, order: u32, mass_number: u32) -> Result<f64> {
    if order < 1 {
        return Err(Error::Domain(format!("multipolarity order must be ≥ 1, got {order}")));
    }
    if mass_number < 1 {
        return Err(Error::Domain("mass number must be ≥ 1".into()));
    }
    let l = f64::from(order);
    let radius = 1.2 * f64::from(mass_number).cbrt();
    let angular = (3.0 / (l + 3.0)).powi(2);
    Ok(match kind {
        TransitionKind::Electric => angular * radius.powi(2 * order as i32) / (4.0 * PI),
        TransitionKind::Magnetic => 10.0 / PI * angular * radius.powi(2 * order as i32 - 2),
    })
}

/// Converts a reduced transition probability from Weisskopf units to SI,
/// C²·m^{2L}. Magnetic values are expressed through B(ML)/c² so both kinds
/// share the electric unit.
pub fn weisskopf_to_si(b_wu: f64, kind: TransitionKind, order: u32, mass_number: u32) -> Result<f64> {
    if !(b_wu >= 0.0) {
        return Err(Error::Domain(format!("reduced transition probability must be ≥ 0, got {b_wu}")));
    }
    let unit = weisskopf_unit(kind, order, mass_number)?;
    let l = order as i32;
    let si_unit = match kind {
        TransitionKind::Electric => EV_TO_J.powi(2) * FERMI.powi(2 * l),
        TransitionKind::Magnetic => {
            (NUCLEAR_MAGNETON / SPEED_OF_LIGHT).powi(2) * FERMI.powi(2 * l - 2)
        }
    };
    Ok(b_wu * unit * si_unit)
}

fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(f64::from).product()
}

/// Rabi coefficient Ω₀ of transition `transition` (0: pump, 1: Stokes) in
/// s⁻¹·(W/cm²)^(-1/2), evaluated from the nuclear parameters with the
/// intensity factor divided out.
///
/// This is a cross-check of the tabulated coefficient; simulations always
/// use `record.omega0`. The prefactor convention of the underlying formula is
/// not unique, so agreement with the tables is only expected up to a
/// convention-dependent constant.
pub fn compute_omega0(record: &NuclideRecord, transition: usize) -> Result<f64> {
    let missing = |what: &str| Error::Domain(format!("{}: no {what} for transition {transition}", record.id));
    let mult = record.multipolarities.get(transition).ok_or_else(|| missing("multipolarity"))?;
    let b_wu = *record.reduced_b.get(transition).ok_or_else(|| missing("reduced_B"))?;
    let spin = record.spins.get(transition).ok_or_else(|| missing("spin"))?;
    let photon = *record.photon_energy.get(transition).ok_or_else(|| missing("photon energy"))?;
    let mass = record.mass_number.ok_or_else(|| missing("mass number"))?;
    if mult.order < 1 {
        return Err(Error::Domain(format!("multipolarity order must be ≥ 1, got {mult}")));
    }
    if !(b_wu > 0.0) {
        return Err(Error::Domain(format!("reduced_B must be positive, got {b_wu}")));
    }

    let transition_energy = record.transition_energy(transition);
    let kin = solve_resonance(transition_energy, photon)?;
    let b_si = weisskopf_to_si(b_wu, mult.kind, mult.order, mass)?;
    let l = f64::from(mult.order);
    // 1 W/cm² in W/m²
    let unit_intensity = 1e4;
    let wave_number = transition_energy * EV_TO_J / (HBAR_J_S * SPEED_OF_LIGHT);
    let radicand = kin.doppler.powi(2) * unit_intensity * (l + 1.0) * (2.0 * spin.j() + 1.0) * b_si
        / (SPEED_OF_LIGHT * EPSILON_0 * l);
    Ok(4.0 * PI.sqrt() / HBAR_J_S * radicand.sqrt() * wave_number.powi(mult.order as i32 - 1)
        / double_factorial(2 * mult.order + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nuclide_db::NuclideDb;

    #[test]
    fn linewidth_definition() {
        assert!((linewidth_from_half_life(Some(LN_2)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(linewidth_from_half_life(None).unwrap(), 0.0);
        // ln 2 / 1.54e-15 by hand
        let g = linewidth_from_half_life(Some(1.54e-15)).unwrap();
        assert!((g / 4.501e14 - 1.0).abs() < 1e-3, "{g}");
        assert!(linewidth_from_half_life(Some(0.0)).is_err());
        assert!(linewidth_from_half_life(Some(-1.0)).is_err());
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(3), 3.0);
        assert_eq!(double_factorial(9), 945.0);
        assert_eq!(double_factorial(11), 10395.0);
    }

    #[test]
    fn weisskopf_e1_a154_golden() {
        // (1/4π)(3/4)²(1.2·154^{1/3})² e²fm², times e²·fm² in SI; evaluated by hand.
        let v = weisskopf_to_si(1.0, TransitionKind::Electric, 1, 154).unwrap();
        let golden = 4.753_823_9e-68;
        assert!((v / golden - 1.0).abs() < 1e-6, "{v:e}");
        let nat = weisskopf_unit(TransitionKind::Electric, 1, 154).unwrap();
        assert!((nat / 1.851_920_3 - 1.0).abs() < 1e-6, "{nat}");
    }

    #[test]
    fn weisskopf_domain_errors() {
        assert!(weisskopf_to_si(1.0, TransitionKind::Electric, 0, 100).is_err());
        assert!(weisskopf_to_si(1.0, TransitionKind::Magnetic, 2, 0).is_err());
        assert!(weisskopf_to_si(-1.0, TransitionKind::Magnetic, 2, 10).is_err());
        assert_eq!(weisskopf_to_si(0.0, TransitionKind::Electric, 2, 10).unwrap(), 0.0);
    }

    #[test]
    fn weisskopf_linear_and_monotone() {
        for kind in [TransitionKind::Electric, TransitionKind::Magnetic] {
            for l in 1..=5 {
                let a = weisskopf_to_si(0.7, kind, l, 100).unwrap();
                let b = weisskopf_to_si(1.4, kind, l, 100).unwrap();
                assert!((b / a - 2.0).abs() < 1e-14);
                let heavier = weisskopf_to_si(0.7, kind, l, 101).unwrap();
                if kind == TransitionKind::Magnetic && l == 1 {
                    // B_W(M1) carries no radius dependence.
                    assert_eq!(heavier, a);
                } else {
                    assert!(heavier > a);
                }
            }
        }
    }

    #[test]
    fn omega0_sqrt_scaling_and_errors() {
        let db = NuclideDb::bundled().unwrap();
        let mut ir = db.get("193Ir").unwrap().clone();
        let base = compute_omega0(&ir, 0).unwrap();
        assert!(base > 0.0);
        ir.reduced_b[0] *= 2.0;
        let doubled = compute_omega0(&ir, 0).unwrap();
        assert!((doubled / base - 2f64.sqrt()).abs() < 1e-12);
        ir.peak_intensity[0] *= 10.0;
        assert_eq!(compute_omega0(&ir, 0).unwrap(), doubled);
        ir.reduced_b[0] = 0.0;
        assert!(compute_omega0(&ir, 0).is_err());
        assert!(compute_omega0(&ir, 1).is_err());
    }

    #[test]
    fn omega0_golden_values() {
        // Independent evaluation of the SI formula with the standard Weisskopf
        // estimates; the tabulated coefficients differ by a convention factor.
        let db = NuclideDb::bundled().unwrap();
        for (id, golden) in [("193Ir", 8.455472e-7), ("117Sn", 7.976610e-8)] {
            let v = compute_omega0(db.get(id).unwrap(), 0).unwrap();
            assert!((v / golden - 1.0).abs() < 1e-4, "{id}: {v:e}");
        }
    }
}
