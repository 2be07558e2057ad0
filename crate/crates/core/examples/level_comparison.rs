//! Compare truncated N-level engines charged the reference 7-level
//! timing at equal exchanged heat, plus the effect of a slow final rate.

use spin_otto::cycle::CycleConfig;
use spin_otto::levels::{compare_n_levels, MappingMode};
use spin_otto::Result;

fn main() -> Result<()> {
    let grid: Vec<f64> = (1..=100).map(|k| 4.0 * k as f64).collect();
    let ns: Vec<usize> = (2..=7).collect();

    let reference = CycleConfig::calibrated_default();
    let curves = compare_n_levels(&reference, &ns, &grid, MappingMode::BothStrokes)?;

    println!("uniform rates:");
    println!("{:>3} {:>14} {:>12}", "N", "max P (nK/ms)", "max S (kB)");
    for c in &curves {
        println!("{:>3} {:>14.4} {:>12.4}", c.levels, c.max_power(), c.max_entropy());
    }

    // Same comparison with the final exchange slowed to 40 %: the top of
    // the ladder becomes a bottleneck and the 7-level engine loses more
    // power on the descending-entropy branch.
    let slow_top = CycleConfig::reduced_final_preset();
    let slow_curves = compare_n_levels(&slow_top, &ns, &grid, MappingMode::BothStrokes)?;
    println!("\nfinal rate reduced to 40 %:");
    println!("{:>3} {:>14} {:>12}", "N", "max P (nK/ms)", "max S (kB)");
    for c in &slow_curves {
        println!("{:>3} {:>14.4} {:>12.4}", c.levels, c.max_power(), c.max_entropy());
    }
    Ok(())
}
