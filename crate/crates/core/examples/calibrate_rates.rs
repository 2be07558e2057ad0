//! Calibrate the uniform collision rate so the heating-stroke entropy
//! peaks at a chosen time, then verify the peak location and value.

use spin_otto::cycle::{
    calibrate_uniform_rate, heating_entropy_peak_time, run_heating, CycleConfig,
};
use spin_otto::dynamics::{Direction, RateProfile};
use spin_otto::Result;

fn main() -> Result<()> {
    let template = CycleConfig::calibrated_default();
    let target_ms = 58.0;

    let gamma = calibrate_uniform_rate(&template, target_ms)?;
    println!("calibrated rate: {gamma:.7} 1/ms  (target peak {target_ms} ms)");

    // Rebuild the cycle with the freshly calibrated rate and check the peak.
    let levels = template.levels;
    let cfg = CycleConfig::new(
        template.b1,
        template.b2,
        template.ramp_ms,
        RateProfile::uniform(Direction::Heating, gamma, levels)?,
        RateProfile::uniform(Direction::Cooling, gamma, levels)?,
        levels,
        template.epsilon,
        template.step_ms,
    )?;

    let peak = heating_entropy_peak_time(&cfg)?;
    let stroke = run_heating(&cfg, peak)?;
    let s_peak = stroke.entropy_trace.last().copied().unwrap_or(0.0);
    println!("entropy peak: t = {peak:.3} ms, S = {s_peak:.6} k_B (ln 7 = {:.6})", 7f64.ln());
    Ok(())
}
