//! Self-contained SVG line charts for the standard views: entropy vs time,
//! power vs heating entropy, the N-level comparison, and the effective
//! temperature trace. Hand-rolled on purpose — the charts are simple and
//! the output must be byte-deterministic.

use crate::error::{Error, Result};
use crate::levels::LevelCurve;
use crate::tempfit::{Regime, TemperatureFit};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 58.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];
pub const POSITIVE_COLOR: &str = "#d62728";
pub const NEGATIVE_COLOR: &str = "#1f77b4";
pub const TRANSITION_COLOR: &str = "#7f7f7f";

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

/// Vertical shaded region between two x values.
#[derive(Debug, Clone)]
pub struct Band {
    pub x0: f64,
    pub x1: f64,
    pub color: String,
    pub class: String,
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub class: String,
    pub color: String,
}

#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
    pub markers: Vec<Marker>,
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    let s = if !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    };
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl LineChart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LineChart {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            bands: Vec::new(),
            markers: Vec::new(),
        }
    }

    fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut pts = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().cloned())
            .chain(self.markers.iter().map(|m| (m.x, m.y)))
            .peekable();
        pts.peek()?;
        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for (x, y) in pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if xmax == xmin {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if ymax == ymin {
            ymin -= 0.5;
            ymax += 0.5;
        }
        let dx = 0.04 * (xmax - xmin);
        let dy = 0.06 * (ymax - ymin);
        Some((xmin - dx, xmax + dx, ymin - dy, ymax + dy))
    }

    /// Render to a standalone SVG document.
    pub fn render(&self) -> Result<String> {
        let (xmin, xmax, ymin, ymax) = self.bounds().ok_or(Error::EmptyCurve)?;
        let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = |y: f64| HEIGHT - MARGIN_B - (y - ymin) / (ymax - ymin) * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

        for b in &self.bands {
            let x0 = px(b.x0.clamp(xmin, xmax));
            let x1 = px(b.x1.clamp(xmin, xmax));
            let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
            svg.push_str(&format!(
                "<rect class=\"{}\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\" fill-opacity=\"0.10\"/>\n",
                b.class,
                lo,
                MARGIN_T,
                hi - lo,
                HEIGHT - MARGIN_T - MARGIN_B,
                b.color
            ));
        }

        // axes and ticks
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            WIDTH - MARGIN_R,
            HEIGHT - MARGIN_B
        ));
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B
        ));
        for k in 0..=5 {
            let f = k as f64 / 5.0;
            let xv = xmin + f * (xmax - xmin);
            let yv = ymin + f * (ymax - ymin);
            let xp = px(xv);
            let yp = py(yv);
            svg.push_str(&format!(
                "<line x1=\"{xp:.2}\" y1=\"{:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{xp:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                HEIGHT - MARGIN_B + 18.0,
                fmt_tick(xv)
            ));
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{MARGIN_L}\" y2=\"{yp:.2}\" stroke=\"black\"/>\n",
                MARGIN_L - 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L - 8.0,
                yp + 4.0,
                fmt_tick(yv)
            ));
        }

        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            0.5 * WIDTH,
            self.title
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            0.5 * WIDTH,
            HEIGHT - 14.0,
            self.x_label
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
            0.5 * HEIGHT,
            0.5 * HEIGHT,
            self.y_label
        ));

        for (i, s) in self.series.iter().enumerate() {
            if s.points.is_empty() {
                continue;
            }
            if s.points.len() == 1 {
                let (x, y) = s.points[0];
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\"/>\n",
                    px(x),
                    py(y),
                    s.color
                ));
            } else {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
                    .collect();
                svg.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                    s.color,
                    pts.join(" ")
                ));
            }
            // legend entry
            let ly = MARGIN_T + 16.0 * i as f64 + 8.0;
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"3\"/>\n",
                WIDTH - MARGIN_R - 150.0,
                WIDTH - MARGIN_R - 126.0,
                s.color
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>\n",
                WIDTH - MARGIN_R - 120.0,
                ly + 4.0,
                s.label
            ));
        }

        for m in &self.markers {
            svg.push_str(&format!(
                "<circle class=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                m.class,
                px(m.x),
                py(m.y),
                m.color
            ));
        }

        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

/// Entropy trace S(t).
pub fn entropy_vs_time(times: &[f64], entropies: &[f64]) -> LineChart {
    let mut chart = LineChart::new("Entropy evolution", "t (ms)", "S (k_B)");
    chart.series.push(Series {
        label: "S".into(),
        color: PALETTE[0].into(),
        points: times.iter().cloned().zip(entropies.iter().cloned()).collect(),
    });
    chart
}

/// Power vs heating-stroke entropy. The curve splits at the entropy
/// maximum into a positive-temperature branch (rising τ_H) and a
/// negative-temperature branch beyond population inversion; the max-power
/// point is marked and tagged with its branch.
pub fn power_vs_entropy(curve: &[(f64, f64)]) -> LineChart {
    let mut chart = LineChart::new("Power vs heating entropy", "S_B (k_B)", "P (nK/ms)");
    if curve.is_empty() {
        return chart;
    }
    let mut i_smax = 0;
    let mut i_pmax = 0;
    for (i, (s, p)) in curve.iter().enumerate() {
        if *s > curve[i_smax].0 {
            i_smax = i;
        }
        if *p > curve[i_pmax].1 {
            i_pmax = i;
        }
    }
    let ascending = &curve[..=i_smax];
    let descending = &curve[i_smax..];
    chart.series.push(Series {
        label: "positive T".into(),
        color: POSITIVE_COLOR.into(),
        points: ascending.to_vec(),
    });
    if descending.len() > 1 {
        chart.series.push(Series {
            label: "negative T".into(),
            color: NEGATIVE_COLOR.into(),
            points: descending.to_vec(),
        });
        let s_lo = descending.iter().map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
        chart.bands.push(Band {
            x0: s_lo,
            x1: curve[i_smax].0,
            color: NEGATIVE_COLOR.into(),
            class: "negative-region".into(),
        });
    }
    let s_lo_asc = ascending.iter().map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
    chart.bands.push(Band {
        x0: s_lo_asc,
        x1: curve[i_smax].0,
        color: POSITIVE_COLOR.into(),
        class: "positive-region".into(),
    });
    let branch = if i_pmax >= i_smax { "negative" } else { "positive" };
    chart.markers.push(Marker {
        x: curve[i_pmax].0,
        y: curve[i_pmax].1,
        class: format!("max-power {branch}"),
        color: "black".into(),
    });
    chart
}

/// Power vs entropy curves of the truncated engines, one series per N.
pub fn n_level_comparison(curves: &[LevelCurve]) -> LineChart {
    let mut chart = LineChart::new("Truncated engines", "S_B (k_B)", "P (nK/ms)");
    for (i, c) in curves.iter().enumerate() {
        chart.series.push(Series {
            label: format!("N = {}", c.levels),
            color: PALETTE[i % PALETTE.len()].into(),
            points: c.points.iter().map(|p| (p.s_b, p.power_nk_per_ms)).collect(),
        });
    }
    chart
}

/// Mixture amplitude a(t) with the regime sequence shaded behind it.
pub fn temperature_trace_chart(times: &[f64], fits: &[TemperatureFit]) -> LineChart {
    let mut chart = LineChart::new(
        "Effective temperature regime",
        "t (ms)",
        "positive-component weight a",
    );
    chart.series.push(Series {
        label: "a".into(),
        color: "black".into(),
        points: times.iter().cloned().zip(fits.iter().map(|f| f.a)).collect(),
    });
    // contiguous regime bands
    let mut i = 0;
    while i < fits.len() {
        let regime = fits[i].regime;
        let mut j = i;
        while j + 1 < fits.len() && fits[j + 1].regime == regime {
            j += 1;
        }
        let (color, class) = match regime {
            Regime::Positive => (POSITIVE_COLOR, "positive"),
            Regime::Negative => (NEGATIVE_COLOR, "negative"),
            Regime::Transition => (TRANSITION_COLOR, "transition"),
        };
        chart.bands.push(Band {
            x0: times[i],
            x1: times[j],
            color: color.into(),
            class: class.into(),
        });
        i = j + 1;
    }
    chart
}
