//! Tabular output: CSV and JSON with pinned schemas and deterministic byte
//! layout. Numbers carry nine significant digits.

use crate::cycle::CycleRecord;
use crate::dynamics::{SpinDistribution, Trajectory};
use crate::error::{Error, Result};
use crate::levels::LevelCurve;
use crate::tempfit::TemperatureFit;
use crate::thermo::{heat_exchanged, shannon_entropy, EnergyLadder};

/// Format with nine significant digits: plain decimal notation while the
/// exponent is moderate, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        // not expected in any schema; keep it unambiguous
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("valid exponent");
    if (-4..9).contains(&exp) {
        let prec = (8 - exp) as usize;
        let fixed = format!("{:.*}", prec, x);
        let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

/// Header of the trajectory table for an N-level system.
pub fn trajectory_header(levels: usize) -> String {
    let mut cols = vec!["t_ms".to_string()];
    cols.extend((0..levels).map(|n| format!("p{n}")));
    cols.push("S_kB".to_string());
    cols.push("Q_cum_nK".to_string());
    csv_line(&cols)
}

fn trajectory_rows(traj: &Trajectory, ladder: &EnergyLadder) -> Result<Vec<Vec<String>>> {
    let initial = traj.initial();
    let mut rows = Vec::with_capacity(traj.len());
    for (t, state) in traj.times().iter().zip(traj.states()) {
        let mut row = vec![fmt_sig9(*t)];
        row.extend(state.probabilities().iter().map(|p| fmt_sig9(*p)));
        row.push(fmt_sig9(shannon_entropy(state)));
        row.push(fmt_sig9(heat_exchanged(initial, state, ladder)?));
        rows.push(row);
    }
    Ok(rows)
}

/// Trajectory as CSV: t_ms, p0..p{N−1}, S_kB, Q_cum_nK.
pub fn trajectory_csv(traj: &Trajectory, ladder: &EnergyLadder) -> Result<String> {
    let mut out = trajectory_header(ladder.levels());
    out.push('\n');
    for row in trajectory_rows(traj, ladder)? {
        out.push_str(&csv_line(&row));
        out.push('\n');
    }
    Ok(out)
}

/// Trajectory as JSON, mirroring the CSV fields row by row.
pub fn trajectory_json(traj: &Trajectory, ladder: &EnergyLadder) -> Result<String> {
    let header: Vec<String> = trajectory_header(ladder.levels())
        .split(',')
        .map(str::to_string)
        .collect();
    let mut out = String::from("[\n");
    let rows = trajectory_rows(traj, ladder)?;
    for (i, row) in rows.iter().enumerate() {
        out.push_str("  {");
        for (j, (key, value)) in header.iter().zip(row).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("\"{key}\": {value}"));
        }
        out.push('}');
        if i + 1 < rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    Ok(out)
}

pub const SWEEP_HEADER: &str = "tau_H_ms,tau_C_ms,tau_cycle_ms,S_B_kB,Q_H_nK,Q_C_nK,W_nK,P_nK_per_ms,collisions_total,efficiency";

fn sweep_row(r: &CycleRecord) -> Vec<String> {
    vec![
        fmt_sig9(r.tau_h_ms),
        fmt_sig9(r.tau_c_ms),
        fmt_sig9(r.tau_cycle_ms),
        fmt_sig9(r.s_b),
        fmt_sig9(r.q_h_nk),
        fmt_sig9(r.q_c_nk),
        fmt_sig9(r.w_nk),
        fmt_sig9(r.power_nk_per_ms),
        fmt_sig9(r.collisions_total),
        fmt_sig9(r.efficiency()),
    ]
}

/// Sweep (or single-cycle) summary as CSV, one row per cycle.
pub fn sweep_csv(records: &[CycleRecord]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_line(&sweep_row(r)));
        out.push('\n');
    }
    out
}

/// Sweep summary as JSON, mirroring the CSV fields.
pub fn sweep_json(records: &[CycleRecord]) -> String {
    let header: Vec<&str> = SWEEP_HEADER.split(',').collect();
    let mut out = String::from("[\n");
    for (i, r) in records.iter().enumerate() {
        out.push_str("  {");
        for (j, (key, value)) in header.iter().zip(sweep_row(r)).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("\"{key}\": {value}"));
        }
        out.push('}');
        if i + 1 < records.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

pub const FIT_HEADER: &str = "t_ms,a,delta_a,beta_plus_per_nK,beta_minus_per_nK,residual,regime";

fn fit_row(t: f64, f: &TemperatureFit) -> Vec<String> {
    vec![
        fmt_sig9(t),
        fmt_sig9(f.a),
        fmt_sig9(f.delta_a),
        fmt_sig9(f.beta_plus),
        fmt_sig9(f.beta_minus),
        fmt_sig9(f.residual),
        f.regime.to_string(),
    ]
}

/// Temperature-trace table as CSV.
pub fn fits_csv(times: &[f64], fits: &[TemperatureFit]) -> String {
    let mut out = String::from(FIT_HEADER);
    out.push('\n');
    for (t, f) in times.iter().zip(fits) {
        out.push_str(&csv_line(&fit_row(*t, f)));
        out.push('\n');
    }
    out
}

/// Temperature-trace table as JSON.
pub fn fits_json(times: &[f64], fits: &[TemperatureFit]) -> String {
    let header: Vec<&str> = FIT_HEADER.split(',').collect();
    let mut out = String::from("[\n");
    let n = times.len().min(fits.len());
    for (i, (t, f)) in times.iter().zip(fits).enumerate() {
        out.push_str("  {");
        for (j, (key, value)) in header.iter().zip(fit_row(*t, f)).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            if *key == "regime" {
                out.push_str(&format!("\"{key}\": \"{value}\""));
            } else {
                out.push_str(&format!("\"{key}\": {value}"));
            }
        }
        out.push('}');
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

pub const LEVELS_HEADER: &str =
    "n_levels,tau_H_truncated_ms,tau_H_ms,tau_C_ms,tau_cycle_ms,S_B_kB,Q_H_nK,Q_C_nK,P_nK_per_ms,collisions_total";

/// N-level comparison as CSV, one row per (N, grid point).
pub fn levels_csv(curves: &[LevelCurve]) -> String {
    let mut out = String::from(LEVELS_HEADER);
    out.push('\n');
    for c in curves {
        for p in &c.points {
            let row = vec![
                c.levels.to_string(),
                fmt_sig9(p.tau_h_truncated_ms),
                fmt_sig9(p.tau_h_ms),
                fmt_sig9(p.tau_c_ms),
                fmt_sig9(p.tau_cycle_ms),
                fmt_sig9(p.s_b),
                fmt_sig9(p.q_h_nk),
                fmt_sig9(p.q_c_nk),
                fmt_sig9(p.power_nk_per_ms),
                fmt_sig9(p.collisions_total),
            ];
            out.push_str(&csv_line(&row));
            out.push('\n');
        }
    }
    out
}

/// N-level comparison as JSON.
pub fn levels_json(curves: &[LevelCurve]) -> String {
    let mut out = String::from("[\n");
    let total: usize = curves.iter().map(|c| c.points.len()).sum();
    let mut k = 0;
    for c in curves {
        for p in &c.points {
            k += 1;
            out.push_str(&format!(
                "  {{\"n_levels\": {}, \"tau_H_truncated_ms\": {}, \"tau_H_ms\": {}, \"tau_C_ms\": {}, \"tau_cycle_ms\": {}, \"S_B_kB\": {}, \"Q_H_nK\": {}, \"Q_C_nK\": {}, \"P_nK_per_ms\": {}, \"collisions_total\": {}}}",
                c.levels,
                fmt_sig9(p.tau_h_truncated_ms),
                fmt_sig9(p.tau_h_ms),
                fmt_sig9(p.tau_c_ms),
                fmt_sig9(p.tau_cycle_ms),
                fmt_sig9(p.s_b),
                fmt_sig9(p.q_h_nk),
                fmt_sig9(p.q_c_nk),
                fmt_sig9(p.power_nk_per_ms),
                fmt_sig9(p.collisions_total),
            ));
            if k < total {
                out.push(',');
            }
            out.push('\n');
        }
    }
    out.push_str("]\n");
    out
}

/// Parse a population table (t_ms, p0..p{N−1}) from CSV text. Rows are
/// renormalized, forgiving the rounding of nine-digit output.
pub fn read_population_csv(text: &str) -> Result<Vec<(f64, SpinDistribution)>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Domain("empty population table".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t_ms") || cols.len() < 3 {
        return Err(Error::Domain(format!(
            "population table must start with t_ms,p0,...; got header \"{header}\""
        )));
    }
    let mut levels = 0;
    for (i, c) in cols[1..].iter().enumerate() {
        if *c == format!("p{i}") {
            levels = i + 1;
        } else {
            break;
        }
    }
    if levels < 2 {
        return Err(Error::Domain(format!(
            "population table needs p0..p{{N-1}} columns, got header \"{header}\""
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 1 + levels {
            return Err(Error::Domain(format!(
                "row {}: expected at least {} fields, got {}",
                lineno + 2,
                1 + levels,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Domain(format!("row {}: {e}", lineno + 2)))
        };
        let t = parse(fields[0])?;
        let p: Vec<f64> = fields[1..=levels]
            .iter()
            .map(|s| parse(s))
            .collect::<Result<_>>()?;
        rows.push((t, SpinDistribution::normalized(p)?));
    }
    Ok(rows)
}
