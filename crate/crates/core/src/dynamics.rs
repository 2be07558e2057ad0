//! Spin-exchange rate generators and population dynamics.
//!
//! Collisions with the polarized bath move the engine by exactly one level
//! per event, always in the same direction for a given stroke, so each
//! stroke is a unidirectional birth–death chain with an absorbing terminal
//! level. The generator is a bidiagonal matrix whose columns sum to zero;
//! populations are integrated with a fixed-step fourth-order Runge–Kutta
//! scheme and checked against the exact truncated-Poisson solution when the
//! rates are uniform.

use crate::error::{Error, Result};

/// Slack allowed below zero for populations before clamping.
pub const POSITIVITY_SLACK: f64 = 1e-12;
/// Allowed deviation of a probability vector's sum from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Stroke direction: heating climbs the ladder, cooling descends it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Heating,
    Cooling,
}

/// Probability distribution over the N ladder levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDistribution {
    p: Vec<f64>,
}

impl SpinDistribution {
    /// Validate and wrap a probability vector. Entries may dip to
    /// −[`POSITIVITY_SLACK`] (they are clamped); the sum must be within
    /// [`NORMALIZATION_TOL`] of one.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::Domain(format!(
                "distribution needs at least two levels, got {}",
                p.len()
            )));
        }
        let mut q = p;
        for v in &mut q {
            if !v.is_finite() || *v < -POSITIVITY_SLACK {
                return Err(Error::Domain(format!("invalid population value {v}")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!(
                "populations sum to {sum}, expected 1"
            )));
        }
        Ok(SpinDistribution { p: q })
    }

    /// Like [`SpinDistribution::new`] but tolerant of rounded input (sum may
    /// deviate by up to 1e−6, e.g. populations read back from a table); the
    /// vector is renormalized.
    pub fn normalized(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::Domain(format!(
                "distribution needs at least two levels, got {}",
                p.len()
            )));
        }
        let mut q = p;
        for v in &mut q {
            if !v.is_finite() || *v < -1e-6 {
                return Err(Error::Domain(format!("invalid population value {v}")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Domain(format!(
                "populations sum to {sum}, expected 1 within 1e-6"
            )));
        }
        for v in &mut q {
            *v /= sum;
        }
        Ok(SpinDistribution { p: q })
    }

    /// δ-distribution concentrated on level `n`.
    pub fn delta(n: usize, levels: usize) -> Result<Self> {
        if levels < 2 || n >= levels {
            return Err(Error::Domain(format!(
                "delta level {n} out of range for {levels} levels"
            )));
        }
        let mut p = vec![0.0; levels];
        p[n] = 1.0;
        Ok(SpinDistribution { p })
    }

    /// Uniform distribution over all levels.
    pub fn uniform(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::Domain(format!(
                "distribution needs at least two levels, got {levels}"
            )));
        }
        Ok(SpinDistribution {
            p: vec![1.0 / levels as f64; levels],
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn levels(&self) -> usize {
        self.p.len()
    }

    /// Mean ladder index Σ n p_n.
    pub fn mean_level(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, v)| n as f64 * v).sum()
    }

    /// Level-reversed copy, p_n → p_{N−1−n}.
    pub fn reversed(&self) -> Self {
        let mut p = self.p.clone();
        p.reverse();
        SpinDistribution { p }
    }

    pub(crate) fn from_raw(p: Vec<f64>) -> Self {
        SpinDistribution { p }
    }
}

/// Per-transition spin-exchange rates for one stroke direction, in 1/ms.
///
/// Heating rates are indexed by the source level n = 0..N−2 (transition
/// n → n+1); cooling rates by source n = 1..N−1 stored at index n−1
/// (transition n → n−1).
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    direction: Direction,
    rates: Vec<f64>,
}

impl RateProfile {
    pub fn new(direction: Direction, rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::Construction("rate profile is empty".into()));
        }
        for (i, r) in rates.iter().enumerate() {
            if !(r > &0.0) || !r.is_finite() {
                return Err(Error::Construction(format!(
                    "rate {i} must be positive and finite, got {r}"
                )));
            }
        }
        Ok(RateProfile { direction, rates })
    }

    /// Equal rate Γ for every transition of an N-level ladder.
    pub fn uniform(direction: Direction, gamma: f64, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::Construction(format!(
                "need at least two levels, got {levels}"
            )));
        }
        RateProfile::new(direction, vec![gamma; levels - 1])
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn levels(&self) -> usize {
        self.rates.len() + 1
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_rate(&self) -> f64 {
        self.rates.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Physical ingredients of one transition rate: Γ = ⟨n⟩ σ v̄ with
/// v̄ = √(8 k_B T / π μ) the mean relative thermal speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePhysicalInputs {
    /// Density overlap ⟨n⟩ between the two clouds, 1/cm³.
    pub density_overlap: f64,
    /// Spin-exchange cross-section σ, cm².
    pub cross_section: f64,
    /// Bath kinetic temperature, μK.
    pub bath_kinetic_temperature: f64,
    /// Reduced mass of the colliding pair, atomic mass units.
    pub reduced_mass: f64,
}

const K_B_J_PER_K: f64 = 1.380_649e-23;
const AMU_KG: f64 = 1.660_539_066_60e-27;

/// Mean relative thermal speed √(8 k_B T / π μ) in cm/ms.
pub fn mean_thermal_speed(temperature_uk: f64, reduced_mass_amu: f64) -> Result<f64> {
    if !(temperature_uk > 0.0) || !(reduced_mass_amu > 0.0) {
        return Err(Error::Domain(format!(
            "temperature and reduced mass must be positive, got {temperature_uk} μK, {reduced_mass_amu} amu"
        )));
    }
    let v_m_per_s = (8.0 * K_B_J_PER_K * temperature_uk * 1e-6
        / (std::f64::consts::PI * reduced_mass_amu * AMU_KG))
        .sqrt();
    // 1 m/s = 0.1 cm/ms
    Ok(v_m_per_s * 0.1)
}

/// Transition rate Γ = ⟨n⟩ σ v̄ in 1/ms. A zero cross-section is allowed
/// (switched-off channel); the remaining inputs must be strictly positive.
pub fn rate_from_physical(inputs: RatePhysicalInputs) -> Result<f64> {
    if !(inputs.density_overlap > 0.0) {
        return Err(Error::Domain(format!(
            "density overlap must be positive, got {}",
            inputs.density_overlap
        )));
    }
    if !(inputs.cross_section >= 0.0) || !inputs.cross_section.is_finite() {
        return Err(Error::Domain(format!(
            "cross-section must be non-negative, got {}",
            inputs.cross_section
        )));
    }
    let v = mean_thermal_speed(inputs.bath_kinetic_temperature, inputs.reduced_mass)?;
    Ok(inputs.density_overlap * inputs.cross_section * v)
}

/// Dense N×N generator of the stroke master equation, units 1/ms.
/// Columns sum to zero; the terminal level of the chain is absorbing.
#[derive(Debug, Clone, PartialEq)]
pub struct RateGenerator {
    levels: usize,
    /// Row-major N×N matrix.
    matrix: Vec<f64>,
}

/// Assemble the bidiagonal generator for `profile` on an N-level ladder.
pub fn build_generator(profile: &RateProfile, levels: usize) -> Result<RateGenerator> {
    if profile.rates().len() != levels - 1 {
        return Err(Error::Construction(format!(
            "profile has {} rates, expected {} for {} levels",
            profile.rates().len(),
            levels - 1,
            levels
        )));
    }
    let mut m = vec![0.0; levels * levels];
    match profile.direction() {
        Direction::Heating => {
            for (src, &rate) in profile.rates().iter().enumerate() {
                m[src * levels + src] -= rate;
                m[(src + 1) * levels + src] += rate;
            }
        }
        Direction::Cooling => {
            for (i, &rate) in profile.rates().iter().enumerate() {
                let src = i + 1;
                m[src * levels + src] -= rate;
                m[(src - 1) * levels + src] += rate;
            }
        }
    }
    Ok(RateGenerator { levels, matrix: m })
}

impl RateGenerator {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.levels + col]
    }

    /// dp/dt = M p.
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        let n = self.levels;
        for i in 0..n {
            let row = &self.matrix[i * n..(i + 1) * n];
            out[i] = row.iter().zip(p).map(|(m, v)| m * v).sum();
        }
    }

    /// Instantaneous total collision flux Σ_{i≠j} M_ij p_j.
    pub fn total_flux(&self, p: &[f64]) -> f64 {
        let n = self.levels;
        let mut f = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    f += self.matrix[i * n + j] * p[j];
                }
            }
        }
        f
    }

    /// Smallest nonzero transition rate, useful for horizon estimates.
    pub fn min_rate(&self) -> f64 {
        let n = self.levels;
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix[i * n + j];
                if i != j && v > 0.0 && v < min {
                    min = v;
                }
            }
        }
        min
    }

    pub fn max_rate(&self) -> f64 {
        self.matrix.iter().cloned().fold(0.0, f64::max)
    }
}

/// Time-ordered sequence of sampled distributions along one stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SpinDistribution>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpinDistribution] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &SpinDistribution {
        &self.states[0]
    }

    pub fn last(&self) -> &SpinDistribution {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub(crate) fn from_parts(times: Vec<f64>, states: Vec<SpinDistribution>) -> Self {
        debug_assert_eq!(times.len(), states.len());
        Trajectory { times, states }
    }
}

pub(crate) fn rk4_step(gen: &RateGenerator, p: &mut [f64], h: f64) -> Result<()> {
    let n = p.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    gen.apply(p, &mut k1);
    for i in 0..n {
        tmp[i] = p[i] + 0.5 * h * k1[i];
    }
    gen.apply(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = p[i] + 0.5 * h * k2[i];
    }
    gen.apply(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = p[i] + h * k3[i];
    }
    gen.apply(&tmp, &mut k4);
    for i in 0..n {
        p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    // Roundoff may push a population marginally below zero; anything worse
    // signals a step size problem.
    let mut sum = 0.0;
    for v in p.iter_mut() {
        if *v < -POSITIVITY_SLACK {
            return Err(Error::Domain(format!(
                "population went negative ({v}); decrease the step size"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
        sum += *v;
    }
    for v in p.iter_mut() {
        *v /= sum;
    }
    Ok(())
}

/// Integrate dp/dt = M p with fixed-step RK4, sampling at every multiple of
/// `step` plus the endpoint.
pub fn evolve(
    initial: &SpinDistribution,
    gen: &RateGenerator,
    duration: f64,
    step: f64,
) -> Result<Trajectory> {
    if initial.levels() != gen.levels() {
        return Err(Error::Dimension {
            expected: gen.levels(),
            got: initial.levels(),
        });
    }
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::Domain(format!(
            "duration must be non-negative, got {duration} ms"
        )));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!(
            "step must be positive, got {step} ms"
        )));
    }

    let n_full = (duration / step + 1e-9).floor() as usize;
    let mut rem = duration - n_full as f64 * step;
    if rem < 1e-9 * step.max(1.0) {
        rem = 0.0;
    }

    let mut times = Vec::with_capacity(n_full + 2);
    let mut states = Vec::with_capacity(n_full + 2);
    times.push(0.0);
    states.push(initial.clone());

    let mut p = initial.probabilities().to_vec();
    for k in 1..=n_full {
        rk4_step(gen, &mut p, step)?;
        times.push(k as f64 * step);
        states.push(SpinDistribution::from_raw(p.clone()));
    }
    if rem > 0.0 {
        rk4_step(gen, &mut p, rem)?;
        times.push(duration);
        states.push(SpinDistribution::from_raw(p));
    }
    Ok(Trajectory::from_parts(times, states))
}

/// Exact solution of the uniform-rate heating chain started from δ(n = 0):
/// a Poisson distribution in the number of collisions, truncated with an
/// absorbing top level.
pub fn analytic_uniform_populations(
    gamma: f64,
    t: f64,
    levels: usize,
) -> Result<SpinDistribution> {
    if !(gamma > 0.0) || !(t >= 0.0) || levels < 2 {
        return Err(Error::Domain(format!(
            "need gamma > 0, t >= 0, levels >= 2; got {gamma}, {t}, {levels}"
        )));
    }
    let x = gamma * t;
    let mut p = vec![0.0; levels];
    let mut term = (-x).exp();
    let mut acc = 0.0;
    for (n, slot) in p.iter_mut().enumerate().take(levels - 1) {
        *slot = term;
        acc += term;
        term *= x / (n + 1) as f64;
    }
    p[levels - 1] = (1.0 - acc).max(0.0);
    SpinDistribution::new(p)
}

/// Expected number of spin-exchange collisions along a trajectory:
/// ∫ Σ Γ_k p_source(k) dt by trapezoidal quadrature. For a unidirectional
/// generator this equals the change in mean level.
pub fn expected_collisions(traj: &Trajectory, gen: &RateGenerator) -> Result<f64> {
    for s in traj.states() {
        if s.levels() != gen.levels() {
            return Err(Error::Dimension {
                expected: gen.levels(),
                got: s.levels(),
            });
        }
    }
    let flux: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| gen.total_flux(s.probabilities()))
        .collect();
    let times = traj.times();
    let mut total = 0.0;
    for i in 1..times.len() {
        total += 0.5 * (flux[i] + flux[i - 1]) * (times[i] - times[i - 1]);
    }
    Ok(total)
}
