//! Sweep the heating-stroke duration, build the power-vs-entropy curve,
//! and report the boost of the max-power point over the max-entropy point.
//!
//! Also writes the curve as an SVG chart to target/power_sweep.svg.

use spin_otto::cycle::{sweep_heating_time, CycleConfig};
use spin_otto::plot::power_vs_entropy;
use spin_otto::Result;

fn main() -> Result<()> {
    let cfg = CycleConfig::calibrated_default();
    let grid: Vec<f64> = (1..=200).map(|k| 2.0 * k as f64).collect();
    let sweep = sweep_heating_time(&cfg, &grid)?;

    let at_max_p = &sweep.records[sweep.max_power_index()];
    let at_max_s = &sweep.records[sweep.max_entropy_index()];

    println!(
        "max power:   tau_H = {:>6.1} ms  P = {:.4} nK/ms  S_B = {:.4} k_B  ({:.1} collisions)",
        at_max_p.tau_h_ms, at_max_p.power_nk_per_ms, at_max_p.s_b, at_max_p.collisions_total
    );
    println!(
        "max entropy: tau_H = {:>6.1} ms  P = {:.4} nK/ms  S_B = {:.4} k_B",
        at_max_s.tau_h_ms, at_max_s.power_nk_per_ms, at_max_s.s_b
    );
    println!(
        "boost at max power: {:+.1} % over the max-entropy operating point",
        100.0 * (at_max_p.power_nk_per_ms / at_max_s.power_nk_per_ms - 1.0)
    );
    println!(
        "entropy ratio S(max P) / S(max S) = {:.3}",
        at_max_p.s_b / at_max_s.s_b
    );

    let chart = power_vs_entropy(&sweep.curve());
    std::fs::create_dir_all("target")?;
    std::fs::write("target/power_sweep.svg", chart.render()?)?;
    println!("chart written to target/power_sweep.svg");
    Ok(())
}
