//! Fit the two-component Boltzmann model along a heating stroke and
//! print where the effective temperature flips sign.

use spin_otto::cycle::{run_heating, CycleConfig};
use spin_otto::tempfit::{temperature_trace, Regime};
use spin_otto::thermo::zeeman_ladder;
use spin_otto::Result;

fn main() -> Result<()> {
    let cfg = CycleConfig::calibrated_default();
    let stroke = run_heating(&cfg, 120.0)?;
    let ladder = zeeman_ladder(cfg.b1, cfg.levels)?;
    let fits = temperature_trace(&stroke.trajectory, &ladder)?;
    let times = stroke.trajectory.times();

    println!("{:>7} {:>7} {:>8} {:>12} {:>12}  regime", "t_ms", "a", "da", "T+ (nK)", "T- (nK)");
    let mut last = None;
    for (t, fit) in times.iter().zip(&fits) {
        let t_plus = if fit.beta_plus > 0.0 { 1.0 / fit.beta_plus } else { f64::INFINITY };
        let t_minus = if fit.beta_minus < 0.0 { 1.0 / fit.beta_minus } else { f64::NEG_INFINITY };
        // show every 4 ms plus any regime change
        let changed = last != Some(fit.regime);
        if changed || (t / 4.0).fract().abs() < 1e-9 {
            println!(
                "{t:>7.2} {:>7.4} {:>8.4} {:>12.1} {:>12.1}  {}{}",
                fit.a,
                fit.delta_a,
                t_plus,
                t_minus,
                fit.regime,
                if changed && last.is_some() { "  <-- change" } else { "" }
            );
        }
        last = Some(fit.regime);
    }

    let first_negative = times
        .iter()
        .zip(&fits)
        .find(|(_, f)| f.regime == Regime::Negative)
        .map(|(t, _)| *t);
    match first_negative {
        Some(t) => println!("\nfirst confidently negative temperature at t = {t} ms"),
        None => println!("\nno confidently negative window inside this stroke"),
    }
    Ok(())
}
