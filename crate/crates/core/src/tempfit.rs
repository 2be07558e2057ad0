//! Effective spin temperature via a dual-Boltzmann mixture fit.
//!
//! Populations are modeled as P_n = a P⁺_n(β₊) + (1 − a) P⁻_n(β₋) with a
//! positive-temperature component (β₊ ≥ 0) and a negative-temperature one
//! (β₋ ≤ 0). Working in inverse temperature keeps the optimization smooth
//! through the T = ±∞ crossover, where β = 0. The mixture amplitude `a` and
//! its uncertainty classify the regime: mostly-positive, mostly-negative, or
//! the transition area in between.

use crate::dynamics::{SpinDistribution, Trajectory};
use crate::error::{Error, Result};
use crate::thermo::EnergyLadder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Positive,
    Negative,
    Transition,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Positive => write!(f, "positive"),
            Regime::Negative => write!(f, "negative"),
            Regime::Transition => write!(f, "transition"),
        }
    }
}

/// Result of a dual-Boltzmann fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureFit {
    /// Weight of the positive-temperature component, in [0, 1].
    pub a: f64,
    /// Inverse temperature of the positive component, 1/nK, ≥ 0.
    pub beta_plus: f64,
    /// Inverse temperature of the negative component, 1/nK, ≤ 0.
    pub beta_minus: f64,
    /// One-sigma uncertainty of `a` (Gauss–Newton estimate, capped at 1).
    pub delta_a: f64,
    /// Sum of squared deviations at the optimum.
    pub residual: f64,
    pub regime: Regime,
}

/// Boltzmann distribution p_n ∝ exp(−β E_n) over a ladder; β = 0 is uniform
/// and negative β weights high levels. Exponentials are shifted by their
/// maximum before normalization, so any finite β is safe.
pub fn boltzmann_distribution(beta: f64, ladder: &EnergyLadder) -> Result<SpinDistribution> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!(
            "inverse temperature must be finite, got {beta}"
        )));
    }
    let xs: Vec<f64> = ladder.energies().iter().map(|e| -beta * e).collect();
    let shift = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = xs.iter().map(|x| (x - shift).exp()).collect();
    let z: f64 = w.iter().sum();
    SpinDistribution::new(w.iter().map(|v| v / z).collect())
}

/// Classification rule on (a, Δa): the fit must be both one-sided and
/// confident to leave the transition area.
pub fn classify_regime(a: f64, delta_a: f64) -> Regime {
    if a >= 0.9 && delta_a <= 0.1 {
        Regime::Positive
    } else if a <= 0.1 && delta_a <= 0.1 {
        Regime::Negative
    } else {
        Regime::Transition
    }
}

// ---- model internals -------------------------------------------------------

fn boltzmann_raw(beta: f64, energies: &[f64]) -> Vec<f64> {
    let shift = energies
        .iter()
        .map(|e| -beta * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = energies.iter().map(|e| (-beta * e - shift).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|v| v / z).collect()
}

/// d p_n / dβ = p_n (⟨E⟩ − E_n) for a normalized Boltzmann vector.
fn boltzmann_grad(p: &[f64], energies: &[f64]) -> Vec<f64> {
    let mean_e: f64 = p.iter().zip(energies).map(|(pi, e)| pi * e).sum();
    p.iter()
        .zip(energies)
        .map(|(pi, e)| pi * (mean_e - e))
        .collect()
}

fn model(a: f64, bp: f64, bm: f64, energies: &[f64]) -> Vec<f64> {
    let plus = boltzmann_raw(bp, energies);
    let minus = boltzmann_raw(bm, energies);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| a * p + (1.0 - a) * m)
        .collect()
}

fn ssr(target: &[f64], m: &[f64]) -> f64 {
    target.iter().zip(m).map(|(t, v)| (t - v) * (t - v)).sum()
}

fn project(theta: &mut [f64; 3]) {
    theta[0] = theta[0].clamp(0.0, 1.0);
    theta[1] = theta[1].max(0.0);
    theta[2] = theta[2].min(0.0);
}

/// Columns of the model Jacobian ∂model/∂(a, β₊, β₋), row per level.
fn jacobian(a: f64, bp: f64, bm: f64, energies: &[f64]) -> [Vec<f64>; 3] {
    let plus = boltzmann_raw(bp, energies);
    let minus = boltzmann_raw(bm, energies);
    let dplus = boltzmann_grad(&plus, energies);
    let dminus = boltzmann_grad(&minus, energies);
    let col_a: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| p - m).collect();
    let col_bp: Vec<f64> = dplus.iter().map(|d| a * d).collect();
    let col_bm: Vec<f64> = dminus.iter().map(|d| (1.0 - a) * d).collect();
    [col_a, col_bp, col_bm]
}

/// Solve a 3×3 linear system by Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut s = b[col];
        for k in col + 1..3 {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

/// Jacobi eigendecomposition of a symmetric 3×3 matrix; returns
/// (eigenvalues, eigenvectors as columns).
fn eigen3(mut m: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[0.0; 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..64 {
        // largest off-diagonal element
        let (mut p, mut q, mut max) = (0, 1, 0.0);
        for i in 0..3 {
            for j in i + 1..3 {
                if m[i][j].abs() > max {
                    max = m[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if max < 1e-18 {
            break;
        }
        let theta = 0.5 * (2.0 * m[p][q]).atan2(m[p][p] - m[q][q]);
        let (s, c) = theta.sin_cos();
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        r[p][p] = c;
        r[q][q] = c;
        r[p][q] = s;
        r[q][p] = -s;
        // m ← Rᵀ m R, v ← v R
        let mut tmp = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                tmp[i][j] = (0..3).map(|k| m[i][k] * r[k][j]).sum();
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| r[k][i] * tmp[k][j]).sum();
            }
        }
        let mut vn = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                vn[i][j] = (0..3).map(|k| v[i][k] * r[k][j]).sum();
            }
        }
        v = vn;
    }
    ([m[0][0], m[1][1], m[2][2]], v)
}

fn levenberg_marquardt(
    target: &[f64],
    energies: &[f64],
    start: [f64; 3],
) -> ([f64; 3], f64) {
    let mut theta = start;
    project(&mut theta);
    let mut best = ssr(target, &model(theta[0], theta[1], theta[2], energies));
    let mut lm = 1e-3;
    for _ in 0..200 {
        let cols = jacobian(theta[0], theta[1], theta[2], energies);
        let m = model(theta[0], theta[1], theta[2], energies);
        let r: Vec<f64> = target.iter().zip(&m).map(|(t, v)| t - v).collect();
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                jtj[i][j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            }
            jtr[i] = cols[i].iter().zip(&r).map(|(a, b)| a * b).sum();
        }
        let mut damped = jtj;
        for i in 0..3 {
            damped[i][i] += lm * jtj[i][i].max(1e-12);
        }
        let Some(delta) = solve3(damped, jtr) else {
            break;
        };
        let mut cand = [
            theta[0] + delta[0],
            theta[1] + delta[1],
            theta[2] + delta[2],
        ];
        project(&mut cand);
        let cand_ssr = ssr(target, &model(cand[0], cand[1], cand[2], energies));
        if cand_ssr < best {
            let step: f64 = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
            let improvement = best - cand_ssr;
            theta = cand;
            best = cand_ssr;
            lm = (lm / 3.0).max(1e-12);
            if improvement < 1e-22 && step < 1e-12 {
                break;
            }
        } else {
            lm *= 4.0;
            if lm > 1e10 {
                break;
            }
        }
    }
    (theta, best)
}

/// Uncertainty of `a` from the scaled Gauss–Newton covariance at the
/// optimum. Directions in which the model is flat (degenerate mixtures)
/// make `a` unidentifiable; those return Δa = 1.
fn amplitude_uncertainty(theta: [f64; 3], target: &[f64], energies: &[f64]) -> f64 {
    let n = target.len();
    let dof = n.saturating_sub(3).max(1) as f64;
    let m = model(theta[0], theta[1], theta[2], energies);
    let sigma2 = ssr(target, &m) / dof;
    let cols = jacobian(theta[0], theta[1], theta[2], energies);

    // Column scaling keeps the eigen solve well conditioned: the β columns
    // carry 1/nK units and are numerically tiny next to the a column.
    let norms: [f64; 3] = [
        cols[0].iter().map(|v| v * v).sum::<f64>().sqrt(),
        cols[1].iter().map(|v| v * v).sum::<f64>().sqrt(),
        cols[2].iter().map(|v| v * v).sum::<f64>().sqrt(),
    ];
    if norms[0] < 1e-12 {
        return 1.0; // both components identical: a is pure gauge
    }
    let mut jtj = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let raw: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            let ni = norms[i].max(1e-300);
            let nj = norms[j].max(1e-300);
            jtj[i][j] = raw / (ni * nj);
        }
    }
    let (vals, vecs) = eigen3(jtj);
    let max_val = vals.iter().cloned().fold(0.0, f64::max);
    let mut caa_scaled = 0.0;
    for k in 0..3 {
        let va = vecs[0][k];
        if vals[k] <= 1e-10 * max_val {
            if va.abs() > 1e-6 {
                return 1.0; // a participates in a null direction
            }
            continue;
        }
        caa_scaled += va * va / vals[k];
    }
    let var = sigma2 * caa_scaled / (norms[0] * norms[0]);
    var.max(0.0).sqrt().min(1.0)
}

fn mean_energy(beta: f64, energies: &[f64]) -> f64 {
    boltzmann_raw(beta, energies)
        .iter()
        .zip(energies)
        .map(|(q, e)| q * e)
        .sum()
}

/// Solve ⟨E⟩(β) = m for β ≥ 0. ⟨E⟩ is strictly decreasing in β, so a
/// bracket plus bisection recovers β to machine precision even where the
/// probability-space residual is numerically flat (very cold states whose
/// excited populations are ~1e−50). The negative side is handled by the
/// caller via level reversal, which keeps the statistic anchored at E = 0
/// where f64 still resolves tiny admixtures.
fn match_mean_energy(m: f64, energies: &[f64]) -> Option<f64> {
    let e_max = energies.iter().cloned().fold(0.0, f64::max);
    if !(m > 0.0 && m < e_max) {
        return None;
    }
    let m0 = mean_energy(0.0, energies);
    if m >= m0 {
        return if m == m0 { Some(0.0) } else { None };
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / e_max;
    let mut guard = 0;
    while mean_energy(hi, energies) > m {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_energy(mid, energies) > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Deterministic multi-start grid covering both regimes and the degenerate
/// center.
const BETA_STARTS: [f64; 5] = [0.0, 1.0 / 5000.0, 1.0 / 1000.0, 1.0 / 300.0, 1.0 / 100.0];
const A_STARTS: [f64; 3] = [0.05, 0.5, 0.95];

/// Fit the dual-Boltzmann mixture to a distribution by box-constrained
/// least squares with deterministic multi-start; ties on the residual are
/// broken toward the smallest |β| pair.
pub fn fit_dual_boltzmann(
    p: &SpinDistribution,
    ladder: &EnergyLadder,
) -> Result<TemperatureFit> {
    if p.levels() != ladder.levels() {
        return Err(Error::Dimension {
            expected: ladder.levels(),
            got: p.levels(),
        });
    }
    let energies = ladder.energies();
    let target = p.probabilities();

    let mut best: Option<([f64; 3], f64)> = None;
    for &bp in &BETA_STARTS {
        for &bm in &BETA_STARTS {
            for &a in &A_STARTS {
                let (theta, res) = levenberg_marquardt(target, energies, [a, bp, -bm]);
                let better = match &best {
                    None => true,
                    Some((bt, br)) => {
                        res < br - 1e-15
                            || (res < br + 1e-15
                                && theta[1] * theta[1] + theta[2] * theta[2]
                                    < bt[1] * bt[1] + bt[2] * bt[2] - 1e-18)
                    }
                };
                if better {
                    best = Some((theta, res));
                }
            }
        }
    }
    let (mut theta, mut residual) = best.ok_or(Error::Fit {
        best_residual: f64::INFINITY,
    })?;
    if !residual.is_finite() {
        return Err(Error::Fit {
            best_residual: residual,
        });
    }

    // Pure single-component states (including very cold ones) admit an
    // exact closed-form alternative: β from the mean energy. Adopt it when
    // it does not worsen the residual. The negative side is matched on the
    // level-reversed populations (a reversed ladder state at −β is the
    // β-state of the original ladder).
    let target_mean: f64 = target.iter().zip(energies).map(|(p, e)| p * e).sum();
    let reversed_mean: f64 = target
        .iter()
        .rev()
        .zip(energies)
        .map(|(p, e)| p * e)
        .sum();
    let candidates = [
        match_mean_energy(target_mean, energies).map(|b| [1.0, b, 0.0]),
        match_mean_energy(reversed_mean, energies).map(|b| [0.0, 0.0, -b]),
    ];
    for cand in candidates.into_iter().flatten() {
        let s = ssr(target, &model(cand[0], cand[1], cand[2], energies));
        if s <= residual {
            theta = cand;
            residual = s;
        }
    }

    // A one-sided mixture leaves the inactive component's β free; pin it to
    // zero so results are canonical.
    if theta[0] >= 1.0 - 1e-9 {
        theta[0] = 1.0;
        theta[2] = 0.0;
    } else if theta[0] <= 1e-9 {
        theta[0] = 0.0;
        theta[1] = 0.0;
    }

    let delta_a = amplitude_uncertainty(theta, target, energies);
    let regime = classify_regime(theta[0], delta_a);
    Ok(TemperatureFit {
        a: theta[0],
        beta_plus: theta[1],
        beta_minus: theta[2],
        delta_a,
        residual,
        regime,
    })
}

/// One fit per sampled state of a trajectory.
pub fn temperature_trace(
    traj: &Trajectory,
    ladder: &EnergyLadder,
) -> Result<Vec<TemperatureFit>> {
    traj.states()
        .iter()
        .map(|s| fit_dual_boltzmann(s, ladder))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::{zeeman_ladder, MagneticField};

    fn ladder(mg: f64) -> EnergyLadder {
        zeeman_ladder(MagneticField::new(mg).unwrap(), 7).unwrap()
    }

    #[test]
    fn boltzmann_limits() {
        let l = ladder(31.6);
        let u = boltzmann_distribution(0.0, &l).unwrap();
        for v in u.probabilities() {
            assert!((v - 1.0 / 7.0).abs() < 1e-15);
        }
        let cold = boltzmann_distribution(1.0, &l).unwrap();
        assert!(cold.probabilities()[0] > 0.9999999);
        let inv = boltzmann_distribution(-1.0, &l).unwrap();
        assert!(inv.probabilities()[6] > 0.9999999);
        assert!(boltzmann_distribution(f64::INFINITY, &l).is_err());
    }

    #[test]
    fn boltzmann_hand_tabulated() {
        // p_n ∝ exp(−n · 16.7928 · 31.6 / 500) at the low field
        let l = ladder(31.6);
        let p = boltzmann_distribution(1.0 / 500.0, &l).unwrap();
        let spacing = 16.7928 * 31.6 / 500.0;
        let z: f64 = (0..7).map(|n| (-spacing * n as f64).exp()).sum();
        for (n, v) in p.probabilities().iter().enumerate() {
            let want = (-spacing * n as f64).exp() / z;
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify_regime(0.98, 0.02), Regime::Positive);
        assert_eq!(classify_regime(0.02, 0.02), Regime::Negative);
        assert_eq!(classify_regime(0.5, 0.4), Regime::Transition);
        // exact threshold values
        assert_eq!(classify_regime(0.9, 0.1), Regime::Positive);
        assert_eq!(classify_regime(0.1, 0.1), Regime::Negative);
        assert_eq!(classify_regime(0.9 - 1e-12, 0.1), Regime::Transition);
        assert_eq!(classify_regime(0.9, 0.1 + 1e-12), Regime::Transition);
    }

    #[test]
    fn positive_round_trip() {
        let l = ladder(346.5);
        let beta = 1.0 / 300.0;
        let p = boltzmann_distribution(beta, &l).unwrap();
        let fit = fit_dual_boltzmann(&p, &l).unwrap();
        assert!(fit.a >= 0.99, "a = {}", fit.a);
        assert!((fit.beta_plus - beta).abs() / beta < 1e-3);
        assert!(fit.residual <= 1e-12);
        assert_eq!(fit.regime, Regime::Positive);
    }

    #[test]
    fn negative_round_trip() {
        let l = ladder(346.5);
        let beta = -1.0 / 800.0;
        let p = boltzmann_distribution(beta, &l).unwrap();
        let fit = fit_dual_boltzmann(&p, &l).unwrap();
        assert!(fit.a <= 0.01, "a = {}", fit.a);
        assert!((fit.beta_minus - beta).abs() / beta.abs() < 1e-3);
        assert_eq!(fit.regime, Regime::Negative);
    }

    #[test]
    fn uniform_is_degenerate() {
        let l = ladder(346.5);
        let u = SpinDistribution::uniform(7).unwrap();
        let fit = fit_dual_boltzmann(&u, &l).unwrap();
        assert!(fit.residual < 1e-12);
        assert!(fit.beta_plus.abs() < 1e-6 && fit.beta_minus.abs() < 1e-6);
        assert!(fit.delta_a >= 0.3, "delta_a = {}", fit.delta_a);
        assert_eq!(fit.regime, Regime::Transition);
    }

    #[test]
    fn mixture_symmetry_under_reversal() {
        let l = ladder(346.5);
        let plus = boltzmann_distribution(1.0 / 400.0, &l).unwrap();
        let minus = boltzmann_distribution(-1.0 / 900.0, &l).unwrap();
        let a = 0.7;
        let mixed = SpinDistribution::new(
            plus.probabilities()
                .iter()
                .zip(minus.probabilities())
                .map(|(p, m)| a * p + (1.0 - a) * m)
                .collect(),
        )
        .unwrap();
        let f = fit_dual_boltzmann(&mixed, &l).unwrap();
        let g = fit_dual_boltzmann(&mixed.reversed(), &l).unwrap();
        assert!((f.a - (1.0 - g.a)).abs() < 1e-4, "a {} vs {}", f.a, g.a);
        assert!((f.beta_plus + g.beta_minus).abs() < 1e-7);
        assert!((f.beta_minus + g.beta_plus).abs() < 1e-7);
    }

    #[test]
    fn delta_states_are_confident() {
        let l = ladder(346.5);
        let d0 = SpinDistribution::delta(0, 7).unwrap();
        let f0 = fit_dual_boltzmann(&d0, &l).unwrap();
        assert_eq!(f0.regime, Regime::Positive);
        assert!(f0.beta_plus > 1e-3); // very cold

        let d6 = SpinDistribution::delta(6, 7).unwrap();
        let f6 = fit_dual_boltzmann(&d6, &l).unwrap();
        assert_eq!(f6.regime, Regime::Negative);
        assert!(f6.beta_minus < -1e-3);
    }
}
