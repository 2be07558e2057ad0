//! Truncated N-level engines.
//!
//! The reference 7-level rate system is cut down to its lowest N levels with
//! the per-transition rates left untouched. To compare engines at equal
//! heating velocity, each truncated cycle is assigned the durations the
//! 7-level engine would need to exchange the same heat: the heating time
//! from the inverted cumulative-heat curve of a long 7-level heating stroke,
//! and (optionally) the cooling time from the closure times of the 7-level
//! states along that same stroke.

use crate::cycle::{run_heating, solve_cooling_time, CycleConfig, StrokeRecord};
use crate::dynamics::{build_generator, expected_collisions, Direction, RateProfile};
use crate::error::{Error, Result};
use crate::thermo::{heat_exchanged, shannon_entropy, zeeman_ladder};

/// Reference engine restricted to its lowest `n` levels.
#[derive(Debug, Clone)]
pub struct TruncatedModel {
    pub levels: usize,
    pub config: CycleConfig,
}

/// Keep the lowest `n` levels and the first `n − 1` rates of both profiles.
pub fn truncate(reference: &CycleConfig, n: usize) -> Result<TruncatedModel> {
    if !(2..=reference.levels).contains(&n) {
        return Err(Error::Domain(format!(
            "truncation to {n} levels is outside 2..={}",
            reference.levels
        )));
    }
    let heating = RateProfile::new(
        Direction::Heating,
        reference.heating.rates()[..n - 1].to_vec(),
    )?;
    let cooling = RateProfile::new(
        Direction::Cooling,
        reference.cooling.rates()[..n - 1].to_vec(),
    )?;
    let config = CycleConfig::new(
        reference.b1,
        reference.b2,
        reference.ramp_ms,
        heating,
        cooling,
        n,
        reference.epsilon,
        reference.step_ms,
    )?;
    Ok(TruncatedModel { levels: n, config })
}

/// Lookup tables built from one long reference heating stroke: exchanged
/// heat at each sample, the sample time, and the closure (cooling) time of
/// the state reached there.
#[derive(Debug, Clone)]
pub struct HeatTimeMap {
    heats: Vec<f64>,
    heat_times: Vec<f64>,
    cool_times: Vec<f64>,
}

impl HeatTimeMap {
    pub fn max_heat(&self) -> f64 {
        *self.heats.last().expect("map is never empty")
    }

    fn lookup(&self, q: f64, values: &[f64]) -> Result<f64> {
        if !(q >= 0.0) {
            return Err(Error::OutOfRange(format!("negative heat {q} nK")));
        }
        let last = self.max_heat();
        if q > last {
            return Err(Error::OutOfRange(format!(
                "heat {q} nK exceeds the reference range {last} nK"
            )));
        }
        // Exact-node hits are common (same integrator, same grid) and keep
        // the identity truncation bitwise faithful; interpolate otherwise.
        match self
            .heats
            .binary_search_by(|h| h.partial_cmp(&q).expect("finite heats"))
        {
            Ok(i) => Ok(values[i]),
            Err(i) => {
                let (h0, h1) = (self.heats[i - 1], self.heats[i]);
                let (v0, v1) = (values[i - 1], values[i]);
                Ok(v0 + (v1 - v0) * (q - h0) / (h1 - h0))
            }
        }
    }

    /// Heating time at which the reference stroke had exchanged heat `q`.
    pub fn time_for_heat(&self, q: f64) -> Result<f64> {
        self.lookup(q, &self.heat_times)
    }

    /// Closure time of the reference state that had exchanged heat `q`.
    pub fn cooling_time_for_heat(&self, q: f64) -> Result<f64> {
        self.lookup(q, &self.cool_times)
    }
}

/// Invert the cumulative heat of a reference heating stroke and tabulate
/// the matching cooling times.
pub fn build_heat_time_map(reference: &CycleConfig, stroke: &StrokeRecord) -> Result<HeatTimeMap> {
    let ladder = zeeman_ladder(reference.b1, reference.levels)?;
    let traj = &stroke.trajectory;
    let initial = traj.initial();

    let mut heats = Vec::with_capacity(traj.len());
    let mut heat_times = Vec::with_capacity(traj.len());
    let mut cool_times = Vec::with_capacity(traj.len());
    for (t, state) in traj.times().iter().zip(traj.states()) {
        let q = heat_exchanged(initial, state, &ladder)?;
        if let Some(&prev) = heats.last() {
            if q <= prev {
                break; // saturation plateau: stop at the strictly increasing prefix
            }
        }
        heats.push(q);
        heat_times.push(*t);
        cool_times.push(solve_cooling_time(reference, state)?);
    }
    if heats.len() < 2 {
        return Err(Error::Construction(
            "reference stroke too short to invert".into(),
        ));
    }
    Ok(HeatTimeMap {
        heats,
        heat_times,
        cool_times,
    })
}

/// Whether only the heating duration or both stroke durations are taken
/// from the reference engine at equal exchanged heat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingMode {
    HeatingOnly,
    BothStrokes,
}

/// One truncated-sweep point with its mapped timing.
#[derive(Debug, Clone)]
pub struct LevelPoint {
    /// Heating duration actually run on the truncated chain, ms.
    pub tau_h_truncated_ms: f64,
    /// Heating duration charged to the cycle (reference time at equal Q_H).
    pub tau_h_ms: f64,
    /// Cooling duration charged to the cycle.
    pub tau_c_ms: f64,
    pub tau_cycle_ms: f64,
    pub q_h_nk: f64,
    pub q_c_nk: f64,
    pub s_b: f64,
    pub power_nk_per_ms: f64,
    pub collisions_total: f64,
}

/// Power and entropy curve of one truncated engine.
#[derive(Debug, Clone)]
pub struct LevelCurve {
    pub levels: usize,
    pub points: Vec<LevelPoint>,
}

impl LevelCurve {
    pub fn max_power(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.power_nk_per_ms)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_entropy(&self) -> f64 {
        self.points.iter().map(|p| p.s_b).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sweep each truncated engine over `grid` heating durations, charging each
/// point the reference-engine timing at equal exchanged heat.
pub fn compare_n_levels(
    reference: &CycleConfig,
    ns: &[usize],
    grid: &[f64],
    mode: MappingMode,
) -> Result<Vec<LevelCurve>> {
    if ns.is_empty() {
        return Err(Error::Domain("no level counts requested".into()));
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 {
        return Err(Error::Domain(
            "grid must be positive and strictly increasing".into(),
        ));
    }

    // One long reference stroke covers every heat value any truncation can
    // reach (the full ladder climb, minus an exponentially small tail).
    let horizon = 50.0 / reference.heating.min_rate();
    let stroke = run_heating(reference, horizon)?;
    let map = build_heat_time_map(reference, &stroke)?;

    let mut curves = Vec::with_capacity(ns.len());
    for &n in ns {
        let model = truncate(reference, n)?;
        let cfg = &model.config;
        let ladder_low = zeeman_ladder(cfg.b2, n)?;
        let gen_h = build_generator(&cfg.heating, n)?;
        let gen_c = build_generator(&cfg.cooling, n)?;

        let mut points = Vec::with_capacity(grid.len());
        for &tau in grid {
            let heating = run_heating(cfg, tau)?;
            let p_b = heating.trajectory.last().clone();
            let q_h = heating.heat_nk;
            let s_b = shannon_entropy(&p_b);

            let (own_tau_c, cool_traj) = {
                let tau_c = solve_cooling_time(cfg, &p_b)?;
                let gen = &gen_c;
                let traj = crate::dynamics::evolve(&p_b, gen, tau_c, cfg.step_ms)?;
                (tau_c, traj)
            };
            let q_c = heat_exchanged(cool_traj.initial(), cool_traj.last(), &ladder_low)?;

            let tau_h_mapped = map.time_for_heat(q_h)?;
            let tau_c_mapped = match mode {
                MappingMode::HeatingOnly => own_tau_c,
                MappingMode::BothStrokes => map.cooling_time_for_heat(q_h)?,
            };
            let tau_cycle = tau_h_mapped + tau_c_mapped + 2.0 * cfg.ramp_ms;
            let power = if tau_cycle > 0.0 {
                (q_h - q_c.abs()) / tau_cycle
            } else {
                0.0
            };
            let collisions = expected_collisions(&heating.trajectory, &gen_h)?
                + expected_collisions(&cool_traj, &gen_c)?;

            points.push(LevelPoint {
                tau_h_truncated_ms: tau,
                tau_h_ms: tau_h_mapped,
                tau_c_ms: tau_c_mapped,
                tau_cycle_ms: tau_cycle,
                q_h_nk: q_h,
                q_c_nk: q_c,
                s_b,
                power_nk_per_ms: power,
                collisions_total: collisions,
            });
        }
        curves.push(LevelCurve { levels: n, points });
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{sweep_heating_time, CycleConfig};

    #[test]
    fn truncation_construction() {
        let reference = CycleConfig::reduced_final_preset();
        let t4 = truncate(&reference, 4).unwrap();
        assert_eq!(t4.config.levels, 4);
        assert_eq!(
            t4.config.heating.rates(),
            &reference.heating.rates()[..3]
        );
        let t7 = truncate(&reference, 7).unwrap();
        assert_eq!(t7.config, reference);
        let t2 = truncate(&reference, 2).unwrap();
        assert_eq!(t2.config.heating.rates().len(), 1);
        assert!(truncate(&reference, 1).is_err());
        assert!(truncate(&reference, 8).is_err());
    }

    #[test]
    fn map_endpoints_and_midpoint() {
        let reference = CycleConfig::calibrated_default();
        let horizon = 50.0 / reference.heating.min_rate();
        let stroke = run_heating(&reference, horizon).unwrap();
        let map = build_heat_time_map(&reference, &stroke).unwrap();

        assert_eq!(map.time_for_heat(0.0).unwrap(), 0.0);
        assert_eq!(map.cooling_time_for_heat(0.0).unwrap(), 0.0);

        // Mean level 3 ⇒ half the full climb; the truncated-Poisson mean
        // lags Γt slightly, so this lands just before the entropy peak.
        let half = 3.0 * 16.7928 * 346.5;
        let t = map.time_for_heat(half).unwrap();
        assert!((t - 53.9).abs() < 3.0, "t = {t}");

        assert!(map.time_for_heat(map.max_heat() * 1.01).is_err());
        assert!(map.time_for_heat(-1.0).is_err());
    }

    #[test]
    fn identity_truncation_matches_sweep() {
        let reference = CycleConfig::calibrated_default();
        let grid: Vec<f64> = (1..=12).map(|k| 20.0 * k as f64).collect();
        let sweep = sweep_heating_time(&reference, &grid).unwrap();
        let curves =
            compare_n_levels(&reference, &[7], &grid, MappingMode::BothStrokes).unwrap();
        for (p, r) in curves[0].points.iter().zip(&sweep.records) {
            assert!((p.q_h_nk - r.q_h_nk).abs() <= 1e-12 * r.q_h_nk.abs().max(1.0));
            assert!((p.q_c_nk - r.q_c_nk).abs() <= 1e-12 * r.q_c_nk.abs().max(1.0));
            assert!((p.s_b - r.s_b).abs() <= 1e-12);
            assert!((p.tau_h_ms - r.tau_h_ms).abs() <= 1e-12);
            assert!((p.tau_c_ms - r.tau_c_ms).abs() <= 1e-12);
            assert!(
                (p.power_nk_per_ms - r.power_nk_per_ms).abs()
                    <= 1e-12 * r.power_nk_per_ms.abs().max(1.0)
            );
        }
    }

    #[test]
    fn max_entropy_tracks_level_count() {
        let reference = CycleConfig::calibrated_default();
        let grid: Vec<f64> = (1..=60).map(|k| 5.0 * k as f64).collect();
        let curves = compare_n_levels(
            &reference,
            &[2, 3, 4, 5, 6, 7],
            &grid,
            MappingMode::BothStrokes,
        )
        .unwrap();
        for c in &curves {
            let bound = (c.levels as f64).ln();
            assert!(
                (c.max_entropy() - bound).abs() < 0.25,
                "N = {}: S_max = {} vs ln N = {}",
                c.levels,
                c.max_entropy(),
                bound
            );
        }
    }
}
