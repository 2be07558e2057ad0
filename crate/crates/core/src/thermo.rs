//! Zeeman energy ladder and thermodynamic bookkeeping.
//!
//! Units: energies are temperatures in nK (E/k_B), magnetic fields in mG,
//! time in ms. With k_B = 1 all heats and works are plain nK values.

use crate::dynamics::{Direction, SpinDistribution};
use crate::error::{Error, Result};

/// Engine-atom level spacing per unit field, |g_F| μ_B / k_B in nK/mG.
/// Frozen at six significant digits so derived numbers are bit-stable.
pub const LAMBDA_NK_PER_MG: f64 = 16.7928;

/// Bath-atom quantum per unit field; the bath Landé factor is twice the
/// engine's, so exactly 2λ.
pub const KAPPA_NK_PER_MG: f64 = 2.0 * LAMBDA_NK_PER_MG;

/// Landé factor of the engine species' lower hyperfine manifold.
pub const G_F_ENGINE: f64 = -0.25;
/// Landé factor of the bath species' lower hyperfine manifold.
pub const G_F_BATH: f64 = -0.5;

/// A static magnetic field strength in mG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticField(f64);

impl MagneticField {
    pub fn new(mg: f64) -> Result<Self> {
        if !(mg > 0.0) || !mg.is_finite() {
            return Err(Error::Domain(format!(
                "magnetic field must be positive and finite, got {mg} mG"
            )));
        }
        Ok(MagneticField(mg))
    }

    pub fn mg(self) -> f64 {
        self.0
    }
}

/// Zeeman energies E_n = n λ B of the engine ladder at a fixed field.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLadder {
    energies: Vec<f64>,
    field: MagneticField,
}

impl EnergyLadder {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn field(&self) -> MagneticField {
        self.field
    }
}

/// Build the ladder E_n = n λ B for n = 0..N−1.
pub fn zeeman_ladder(field: MagneticField, levels: usize) -> Result<EnergyLadder> {
    if levels < 2 {
        return Err(Error::Domain(format!(
            "a ladder needs at least two levels, got {levels}"
        )));
    }
    let energies = (0..levels)
        .map(|n| n as f64 * LAMBDA_NK_PER_MG * field.mg())
        .collect();
    Ok(EnergyLadder { energies, field })
}

/// Heat exchanged with the bath when the populations move from `start` to
/// `end` at fixed field: Σ E_n Δp_n. Positive when the engine absorbs energy.
pub fn heat_exchanged(
    start: &SpinDistribution,
    end: &SpinDistribution,
    ladder: &EnergyLadder,
) -> Result<f64> {
    if start.levels() != ladder.levels() || end.levels() != ladder.levels() {
        return Err(Error::Dimension {
            expected: ladder.levels(),
            got: start.levels().max(end.levels()),
        });
    }
    Ok(ladder
        .energies()
        .iter()
        .zip(start.probabilities().iter().zip(end.probabilities()))
        .map(|(e, (ps, pe))| e * (pe - ps))
        .sum())
}

/// Work done on the engine by an adiabatic field ramp with frozen
/// populations: Σ p_n n λ (B_to − B_from). Negative on expansion of an
/// excited state (work is extracted).
pub fn stroke_work(p: &SpinDistribution, from: MagneticField, to: MagneticField) -> f64 {
    let db = to.mg() - from.mg();
    p.probabilities()
        .iter()
        .enumerate()
        .map(|(n, pn)| pn * n as f64 * LAMBDA_NK_PER_MG * db)
        .sum()
}

/// Mean power per cycle, (Q_H − |Q_C|)/τ_cycle in nK/ms.
pub fn cycle_power(q_h: f64, q_c: f64, tau_cycle_ms: f64) -> Result<f64> {
    if !(tau_cycle_ms > 0.0) {
        return Err(Error::Domain(format!(
            "cycle time must be positive, got {tau_cycle_ms} ms"
        )));
    }
    Ok((q_h - q_c.abs()) / tau_cycle_ms)
}

/// Shannon entropy −Σ p ln p in units of k_B, with 0·ln 0 ≡ 0.
pub fn shannon_entropy(p: &SpinDistribution) -> f64 {
    p.probabilities()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Otto efficiency 1 − B2/B1 of the two-field cycle.
pub fn otto_efficiency(b1: MagneticField, b2: MagneticField) -> Result<f64> {
    if b2.mg() > b1.mg() {
        return Err(Error::Domain(format!(
            "expansion must lower the field: B1 = {} mG < B2 = {} mG",
            b1.mg(),
            b2.mg()
        )));
    }
    Ok(1.0 - b2.mg() / b1.mg())
}

/// Energy quantum carried by one bath atom per collision, ±κB: positive
/// while heating (the bath feeds the engine), negative while cooling.
pub fn bath_quantum(field: MagneticField, direction: Direction) -> f64 {
    let q = KAPPA_NK_PER_MG * field.mg();
    match direction {
        Direction::Heating => q,
        Direction::Cooling => -q,
    }
}
