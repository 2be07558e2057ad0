//! Fit the dual-Boltzmann temperature model to hand-built populations:
//! a hot positive state, a population-inverted state, and a mixture.

use spin_otto::dynamics::SpinDistribution;
use spin_otto::tempfit::{boltzmann_distribution, fit_dual_boltzmann};
use spin_otto::thermo::{zeeman_ladder, MagneticField};
use spin_otto::Result;

fn show(label: &str, p: &SpinDistribution, ladder: &spin_otto::thermo::EnergyLadder) -> Result<()> {
    let fit = fit_dual_boltzmann(p, ladder)?;
    println!(
        "{label:<22} a = {:.4} ± {:.4}  beta+ = {:+.3e}  beta- = {:+.3e}  -> {}",
        fit.a, fit.delta_a, fit.beta_plus, fit.beta_minus, fit.regime
    );
    Ok(())
}

fn main() -> Result<()> {
    let ladder = zeeman_ladder(MagneticField::new(346.5).unwrap(), 7)?;

    let hot = boltzmann_distribution(1.0 / 3000.0, &ladder)?;
    show("thermal, T = 3 uK:", &hot, &ladder)?;

    let inverted = boltzmann_distribution(-1.0 / 3000.0, &ladder)?;
    show("inverted, T = -3 uK:", &inverted, &ladder)?;

    for w in [0.9, 0.5, 0.1] {
        let mixed: Vec<f64> = hot
            .probabilities()
            .iter()
            .zip(inverted.probabilities())
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect();
        let p = SpinDistribution::new(mixed)?;
        show(&format!("mixture, w = {w}:"), &p, &ladder)?;
    }

    let uniform = SpinDistribution::uniform(7)?;
    show("uniform (T -> inf):", &uniform, &ladder)?;
    Ok(())
}
