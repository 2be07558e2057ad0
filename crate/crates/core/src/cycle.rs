//! The four-stroke Otto cycle: heating at high field, adiabatic expansion,
//! cooling at low field until the ground state is repopulated, adiabatic
//! compression. Also: heating-time sweeps for the power-vs-entropy curve
//! and calibration of the uniform rate to a target entropy-peak time.

use crate::dynamics::{
    self, build_generator, evolve, expected_collisions, Direction, RateProfile,
    SpinDistribution, Trajectory,
};
use crate::error::{Error, Result};
use crate::thermo::{
    cycle_power, heat_exchanged, shannon_entropy, stroke_work, zeeman_ladder,
    MagneticField,
};

/// Uniform transition rate (1/ms) placing the heating entropy peak of the
/// 7-level ladder at 58 ms; output of [`calibrate_uniform_rate`] with the
/// default anchor, frozen for reproducible defaults.
pub const CALIBRATED_GAMMA_PER_MS: f64 = 0.0566451;

pub const DEFAULT_B1_MG: f64 = 346.5;
pub const DEFAULT_B2_MG: f64 = 31.6;
pub const DEFAULT_RAMP_MS: f64 = 20.0;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_LEVELS: usize = 7;
/// Default entropy-peak anchor for calibration, ms.
pub const DEFAULT_PEAK_MS: f64 = 58.0;

/// Default integrator step: a quarter millisecond, shrunk if the fastest
/// rate makes that too coarse for the 1e−8 oracle budget.
pub fn default_step_ms(heating: &RateProfile, cooling: &RateProfile) -> f64 {
    let g = heating.max_rate().max(cooling.max_rate());
    (0.05 / g).min(0.25)
}

/// Full parameter set of one engine configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleConfig {
    pub b1: MagneticField,
    pub b2: MagneticField,
    /// Duration of each adiabatic ramp, ms.
    pub ramp_ms: f64,
    pub heating: RateProfile,
    pub cooling: RateProfile,
    pub levels: usize,
    /// Ground-state deficit tolerated at the end of cooling.
    pub epsilon: f64,
    pub step_ms: f64,
}

impl CycleConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        b1: MagneticField,
        b2: MagneticField,
        ramp_ms: f64,
        heating: RateProfile,
        cooling: RateProfile,
        levels: usize,
        epsilon: f64,
        step_ms: f64,
    ) -> Result<Self> {
        if b2.mg() >= b1.mg() {
            return Err(Error::Construction(format!(
                "need B1 > B2, got B1 = {} mG, B2 = {} mG",
                b1.mg(),
                b2.mg()
            )));
        }
        if !(ramp_ms >= 0.0) || !ramp_ms.is_finite() {
            return Err(Error::Construction(format!(
                "ramp time must be non-negative, got {ramp_ms} ms"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 0.1) {
            return Err(Error::Construction(format!(
                "closure epsilon must lie in (0, 0.1), got {epsilon}"
            )));
        }
        if !(step_ms > 0.0) || !step_ms.is_finite() {
            return Err(Error::Construction(format!(
                "step must be positive, got {step_ms} ms"
            )));
        }
        if levels < 2 {
            return Err(Error::Construction(format!(
                "need at least two levels, got {levels}"
            )));
        }
        if heating.levels() != levels || cooling.levels() != levels {
            return Err(Error::Construction(format!(
                "rate profiles cover {} / {} levels, expected {}",
                heating.levels(),
                cooling.levels(),
                levels
            )));
        }
        if heating.direction() != Direction::Heating
            || cooling.direction() != Direction::Cooling
        {
            return Err(Error::Construction(
                "profile directions are swapped".into(),
            ));
        }
        Ok(CycleConfig {
            b1,
            b2,
            ramp_ms,
            heating,
            cooling,
            levels,
            epsilon,
            step_ms,
        })
    }

    /// The calibrated default: uniform rates in both directions, fields and
    /// timing anchored to the 7-level experiment.
    pub fn calibrated_default() -> Self {
        let heating =
            RateProfile::uniform(Direction::Heating, CALIBRATED_GAMMA_PER_MS, DEFAULT_LEVELS)
                .expect("static profile");
        let cooling =
            RateProfile::uniform(Direction::Cooling, CALIBRATED_GAMMA_PER_MS, DEFAULT_LEVELS)
                .expect("static profile");
        let step = default_step_ms(&heating, &cooling);
        CycleConfig::new(
            MagneticField::new(DEFAULT_B1_MG).expect("static field"),
            MagneticField::new(DEFAULT_B2_MG).expect("static field"),
            DEFAULT_RAMP_MS,
            heating,
            cooling,
            DEFAULT_LEVELS,
            DEFAULT_EPSILON,
            step,
        )
        .expect("static config")
    }

    /// Like the calibrated default, but with the final transition (between
    /// the two topmost levels) slowed to 40% of the others in both
    /// directions — the weak-last-rate preset.
    pub fn reduced_final_preset() -> Self {
        let mut cfg = CycleConfig::calibrated_default();
        let mut hr = cfg.heating.rates().to_vec();
        let mut cr = cfg.cooling.rates().to_vec();
        let last = hr.len() - 1;
        hr[last] *= 0.4;
        cr[last] *= 0.4;
        cfg.heating = RateProfile::new(Direction::Heating, hr).expect("static profile");
        cfg.cooling = RateProfile::new(Direction::Cooling, cr).expect("static profile");
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrokeKind {
    Heating,
    Expansion,
    Cooling,
    Compression,
}

/// One stroke with its trajectory and energy bookkeeping. Heat strokes do
/// no work; ramps exchange no heat.
#[derive(Debug, Clone)]
pub struct StrokeRecord {
    pub kind: StrokeKind,
    pub duration_ms: f64,
    pub trajectory: Trajectory,
    pub heat_nk: f64,
    pub work_nk: f64,
    pub entropy_trace: Vec<f64>,
}

fn entropy_trace(traj: &Trajectory) -> Vec<f64> {
    traj.states().iter().map(shannon_entropy).collect()
}

/// Full accounting of one cycle A → B → C → D → A.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub strokes: Vec<StrokeRecord>,
    pub q_h_nk: f64,
    pub q_c_nk: f64,
    pub w_nk: f64,
    pub power_nk_per_ms: f64,
    pub tau_h_ms: f64,
    pub tau_c_ms: f64,
    pub tau_cycle_ms: f64,
    pub collisions_heating: f64,
    pub collisions_cooling: f64,
    pub collisions_total: f64,
    /// Shannon entropy at the end of the heating stroke.
    pub s_b: f64,
}

impl CycleRecord {
    /// Realized efficiency |W|/Q_H; zero for the idle cycle.
    pub fn efficiency(&self) -> f64 {
        if self.q_h_nk > 0.0 {
            self.w_nk.abs() / self.q_h_nk
        } else {
            0.0
        }
    }
}

/// Heating stroke at B1 from the ground state.
pub fn run_heating(config: &CycleConfig, tau_h_ms: f64) -> Result<StrokeRecord> {
    let initial = SpinDistribution::delta(0, config.levels)?;
    run_heating_from(config, tau_h_ms, &initial)
}

/// Heating stroke at B1 from an arbitrary initial state.
pub fn run_heating_from(
    config: &CycleConfig,
    tau_h_ms: f64,
    initial: &SpinDistribution,
) -> Result<StrokeRecord> {
    let gen = build_generator(&config.heating, config.levels)?;
    let traj = evolve(initial, &gen, tau_h_ms, config.step_ms)?;
    let ladder = zeeman_ladder(config.b1, config.levels)?;
    let heat = heat_exchanged(traj.initial(), traj.last(), &ladder)?;
    Ok(StrokeRecord {
        kind: StrokeKind::Heating,
        duration_ms: tau_h_ms,
        entropy_trace: entropy_trace(&traj),
        trajectory: traj,
        heat_nk: heat,
        work_nk: 0.0,
    })
}

fn ramp_stroke(
    kind: StrokeKind,
    p: &SpinDistribution,
    from: MagneticField,
    to: MagneticField,
    ramp_ms: f64,
) -> StrokeRecord {
    let (times, states) = if ramp_ms > 0.0 {
        (vec![0.0, ramp_ms], vec![p.clone(), p.clone()])
    } else {
        (vec![0.0], vec![p.clone()])
    };
    let traj = Trajectory::from_parts(times, states);
    StrokeRecord {
        kind,
        duration_ms: ramp_ms,
        entropy_trace: entropy_trace(&traj),
        trajectory: traj,
        heat_nk: 0.0,
        work_nk: stroke_work(p, from, to),
    }
}

/// March the cooling dynamics forward until p_0 ≥ 1 − ε, returning the
/// closure time (a multiple of the step) and the trajectory up to it.
fn cooling_march(config: &CycleConfig, p_c: &SpinDistribution) -> Result<(f64, Trajectory)> {
    let gen = build_generator(&config.cooling, config.levels)?;
    if p_c.levels() != config.levels {
        return Err(Error::Dimension {
            expected: config.levels,
            got: p_c.levels(),
        });
    }
    let target = 1.0 - config.epsilon;
    let step = config.step_ms;
    if p_c.probabilities()[0] >= target {
        return Ok((
            0.0,
            Trajectory::from_parts(vec![0.0], vec![p_c.clone()]),
        ));
    }
    let horizon = 50.0 / config.cooling.min_rate();
    let max_steps = (horizon / step).ceil() as usize;

    let mut times = vec![0.0];
    let mut states = vec![p_c.clone()];
    let mut p = p_c.probabilities().to_vec();
    for k in 1..=max_steps {
        dynamics::rk4_step(&gen, &mut p, step)?;
        times.push(k as f64 * step);
        states.push(SpinDistribution::from_raw(p.clone()));
        if p[0] >= target {
            return Ok((k as f64 * step, Trajectory::from_parts(times, states)));
        }
    }
    Err(Error::Closure {
        horizon_ms: horizon,
    })
}

/// Smallest sampled time at which cooling from `p_c` reaches p_0 ≥ 1 − ε,
/// with resolution equal to the integrator step.
pub fn solve_cooling_time(config: &CycleConfig, p_c: &SpinDistribution) -> Result<f64> {
    cooling_march(config, p_c).map(|(tau, _)| tau)
}

/// Run one full cycle with the given heating duration.
pub fn run_cycle(config: &CycleConfig, tau_h_ms: f64) -> Result<CycleRecord> {
    let ladder_low = zeeman_ladder(config.b2, config.levels)?;

    let heating = run_heating(config, tau_h_ms)?;
    let p_b = heating.trajectory.last().clone();
    let s_b = shannon_entropy(&p_b);

    let expansion = ramp_stroke(StrokeKind::Expansion, &p_b, config.b1, config.b2, config.ramp_ms);

    let (tau_c, cool_traj) = cooling_march(config, &p_b)?;
    let q_c = heat_exchanged(cool_traj.initial(), cool_traj.last(), &ladder_low)?;
    let p_d = cool_traj.last().clone();
    let cooling = StrokeRecord {
        kind: StrokeKind::Cooling,
        duration_ms: tau_c,
        entropy_trace: entropy_trace(&cool_traj),
        trajectory: cool_traj,
        heat_nk: q_c,
        work_nk: 0.0,
    };

    let compression =
        ramp_stroke(StrokeKind::Compression, &p_d, config.b2, config.b1, config.ramp_ms);

    let gen_h = build_generator(&config.heating, config.levels)?;
    let gen_c = build_generator(&config.cooling, config.levels)?;
    let collisions_heating = expected_collisions(&heating.trajectory, &gen_h)?;
    let collisions_cooling = expected_collisions(&cooling.trajectory, &gen_c)?;

    let q_h = heating.heat_nk;
    let w = expansion.work_nk + compression.work_nk;
    let tau_cycle = tau_h_ms + tau_c + 2.0 * config.ramp_ms;
    let power = if tau_cycle > 0.0 {
        cycle_power(q_h, q_c, tau_cycle)?
    } else {
        0.0
    };

    Ok(CycleRecord {
        strokes: vec![heating, expansion, cooling, compression],
        q_h_nk: q_h,
        q_c_nk: q_c,
        w_nk: w,
        power_nk_per_ms: power,
        tau_h_ms,
        tau_c_ms: tau_c,
        tau_cycle_ms: tau_cycle,
        collisions_heating,
        collisions_cooling,
        collisions_total: collisions_heating + collisions_cooling,
        s_b,
    })
}

/// Cycles over a grid of heating durations, in grid order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<CycleRecord>,
}

impl SweepResult {
    /// The (S_B, P) curve ordered by heating time.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .map(|r| (r.s_b, r.power_nk_per_ms))
            .collect()
    }

    pub fn max_power_index(&self) -> usize {
        let mut best = 0;
        for (i, r) in self.records.iter().enumerate() {
            if r.power_nk_per_ms > self.records[best].power_nk_per_ms {
                best = i;
            }
        }
        best
    }

    pub fn max_entropy_index(&self) -> usize {
        let mut best = 0;
        for (i, r) in self.records.iter().enumerate() {
            if r.s_b > self.records[best].s_b {
                best = i;
            }
        }
        best
    }
}

/// Run one cycle per grid point; the grid must be non-empty and increasing.
pub fn sweep_heating_time(config: &CycleConfig, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] < 0.0 {
        return Err(Error::Domain(
            "sweep grid must be non-negative and strictly increasing".into(),
        ));
    }
    let records = grid
        .iter()
        .map(|&tau| run_cycle(config, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { records })
}

fn golden_max(f: &mut dyn FnMut(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Heating time at which the end-of-stroke entropy is maximal, by golden
/// section over the (unimodal) entropy-vs-duration curve.
pub fn heating_entropy_peak_time(config: &CycleConfig) -> Result<f64> {
    let hi = 12.0 / config.heating.min_rate();
    let mut f = |tau: f64| -> Result<f64> {
        let stroke = run_heating(config, tau)?;
        Ok(*stroke.entropy_trace.last().expect("non-empty trace"))
    };
    golden_max(&mut f, 0.0, hi, 0.002)
}

/// Find the uniform rate Γ0 whose heating entropy peak sits at
/// `target_peak_ms`, by fixed-point iteration on the time-rescaling
/// symmetry: the peak time scales as 1/Γ.
pub fn calibrate_uniform_rate(template: &CycleConfig, target_peak_ms: f64) -> Result<f64> {
    if !(target_peak_ms > 0.0) || !target_peak_ms.is_finite() {
        return Err(Error::Domain(format!(
            "target peak time must be positive, got {target_peak_ms} ms"
        )));
    }
    let mut gamma = 3.0 / target_peak_ms;
    for _ in 0..60 {
        let heating = RateProfile::uniform(Direction::Heating, gamma, template.levels)?;
        let cooling = RateProfile::uniform(Direction::Cooling, gamma, template.levels)?;
        let step = default_step_ms(&heating, &cooling);
        let cfg = CycleConfig::new(
            template.b1,
            template.b2,
            template.ramp_ms,
            heating,
            cooling,
            template.levels,
            template.epsilon,
            step,
        )?;
        let peak = heating_entropy_peak_time(&cfg)?;
        if (peak - target_peak_ms).abs() <= 0.005 {
            return Ok(gamma);
        }
        gamma *= peak / target_peak_ms;
    }
    Err(Error::Domain(
        "rate calibration did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::analytic_uniform_populations;
    use crate::thermo::otto_efficiency;

    #[test]
    fn idle_cycle() {
        let cfg = CycleConfig::calibrated_default();
        let rec = run_cycle(&cfg, 0.0).unwrap();
        assert_eq!(rec.q_h_nk, 0.0);
        assert_eq!(rec.w_nk, 0.0);
        assert_eq!(rec.power_nk_per_ms, 0.0);
        assert_eq!(rec.tau_c_ms, 0.0);
        assert_eq!(rec.s_b, 0.0);
        assert_eq!(rec.tau_cycle_ms, 2.0 * cfg.ramp_ms);
    }

    #[test]
    fn saturated_cycle_work_and_efficiency() {
        // tight closure: at epsilon = 0.01 the leftover excited population
        // costs ~77 nK of compression work
        let mut cfg = CycleConfig::calibrated_default();
        cfg.epsilon = 1e-4;
        let tau = 25.0 / CALIBRATED_GAMMA_PER_MS;
        let rec = run_cycle(&cfg, tau).unwrap();
        assert!((rec.w_nk.abs() - 31728.31632).abs() < 1.0, "W = {}", rec.w_nk);
        let eta = otto_efficiency(cfg.b1, cfg.b2).unwrap();
        assert!((rec.efficiency() - eta).abs() < 1e-3);
    }

    #[test]
    fn stroke_sign_conventions() {
        let cfg = CycleConfig::calibrated_default();
        let rec = run_cycle(&cfg, 58.0).unwrap();
        assert!(rec.q_h_nk > 0.0);
        assert!(rec.q_c_nk < 0.0);
        assert!(rec.strokes[1].work_nk < 0.0); // expansion extracts work
        assert!(rec.strokes[3].work_nk > 0.0); // compression costs work
        assert!(rec.strokes.iter().all(|s| match s.kind {
            StrokeKind::Heating | StrokeKind::Cooling => s.work_nk == 0.0,
            _ => s.heat_nk == 0.0,
        }));
        assert!((rec.tau_cycle_ms
            - (rec.tau_h_ms + rec.tau_c_ms + 2.0 * cfg.ramp_ms))
            .abs()
            < 1e-12);
    }

    #[test]
    fn cycle_closes_within_epsilon() {
        let cfg = CycleConfig::calibrated_default();
        for tau in [10.0, 58.0, 200.0] {
            let rec = run_cycle(&cfg, tau).unwrap();
            let p_a = rec.strokes[3].trajectory.last();
            assert!(p_a.probabilities()[0] >= 1.0 - cfg.epsilon - 1e-9);
        }
    }

    #[test]
    fn ramps_freeze_populations() {
        let cfg = CycleConfig::calibrated_default();
        let rec = run_cycle(&cfg, 80.0).unwrap();
        for ramp in [&rec.strokes[1], &rec.strokes[3]] {
            assert_eq!(ramp.trajectory.initial(), ramp.trajectory.last());
        }
        // end of each stroke is the start of the next
        for pair in rec.strokes.windows(2) {
            assert_eq!(pair[0].trajectory.last(), pair[1].trajectory.initial());
        }
    }

    #[test]
    fn cooling_time_examples() {
        let cfg = CycleConfig::calibrated_default();
        let d0 = SpinDistribution::delta(0, 7).unwrap();
        assert_eq!(solve_cooling_time(&cfg, &d0).unwrap(), 0.0);

        // From the inverted state the closure condition is a Poisson tail of
        // the mirrored chain; compare against the analytic solution.
        let d6 = SpinDistribution::delta(6, 7).unwrap();
        let tau = solve_cooling_time(&cfg, &d6).unwrap();
        let gamma = CALIBRATED_GAMMA_PER_MS;
        let mut oracle = 0.0;
        let mut t = 0.0;
        loop {
            t += cfg.step_ms;
            let p = analytic_uniform_populations(gamma, t, 7).unwrap();
            if p.probabilities()[6] >= 1.0 - cfg.epsilon {
                oracle = t;
                break;
            }
        }
        assert!((tau - oracle).abs() <= cfg.step_ms, "tau {tau} oracle {oracle}");

        // Shrinking epsilon increases the closure time.
        let mut tight = cfg.clone();
        tight.epsilon = 0.001;
        assert!(solve_cooling_time(&tight, &d6).unwrap() > tau);
    }

    #[test]
    fn sweep_grid_validation() {
        let cfg = CycleConfig::calibrated_default();
        assert!(sweep_heating_time(&cfg, &[]).is_err());
        assert!(sweep_heating_time(&cfg, &[5.0, 5.0]).is_err());
        let one = sweep_heating_time(&cfg, &[30.0]).unwrap();
        assert_eq!(one.records.len(), 1);
    }

    #[test]
    fn calibration_round_trip() {
        let cfg = CycleConfig::calibrated_default();
        let gamma = calibrate_uniform_rate(&cfg, 58.0).unwrap();
        assert!(
            (gamma - CALIBRATED_GAMMA_PER_MS).abs() < 4e-4,
            "gamma {gamma}"
        );
        let peak = heating_entropy_peak_time(&cfg).unwrap();
        assert!((peak - 58.0).abs() < 1.0, "peak {peak}");
    }

    #[test]
    fn calibration_rescales_with_target() {
        let cfg = CycleConfig::calibrated_default();
        let g1 = calibrate_uniform_rate(&cfg, 29.0).unwrap();
        let g2 = calibrate_uniform_rate(&cfg, 58.0).unwrap();
        assert!((g1 / g2 - 2.0).abs() < 2e-2, "ratio {}", g1 / g2);
    }

    #[test]
    fn preset_slows_last_transition() {
        let cfg = CycleConfig::reduced_final_preset();
        let base = CycleConfig::calibrated_default();
        assert!((cfg.heating.rates()[5] - 0.4 * base.heating.rates()[5]).abs() < 1e-15);
        assert!((cfg.cooling.rates()[5] - 0.4 * base.cooling.rates()[5]).abs() < 1e-15);
        assert_eq!(&cfg.heating.rates()[..5], &base.heating.rates()[..5]);
    }
}
