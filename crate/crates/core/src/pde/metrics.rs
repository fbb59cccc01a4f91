use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::simulate::SpaceTimeRecord;
use crate::error::{Error, Result};

/// Amplitudes `a_m = (2/N) sum (u_i - mean) cos(m pi (i + 1/2) / N)` of the
/// Neumann cosine modes `m = 0..=m_max` (`a_0` is always 0).
pub fn cosine_amplitudes(u: &[f64], m_max: usize) -> Vec<f64> {
    let n = u.len();
    let mean = u.iter().sum::<f64>() / n as f64;
    (0..=m_max)
        .map(|m| {
            if m == 0 {
                return 0.0;
            }
            let w = m as f64 * PI / n as f64;
            2.0 / n as f64
                * u.iter()
                    .enumerate()
                    .map(|(i, v)| (v - mean) * (w * (i as f64 + 0.5)).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// Index of the largest cosine amplitude among `1..=N/2`, or 0 for a field
/// that is uniform to round-off.
pub fn dominant_mode(u: &[f64]) -> usize {
    let amps = cosine_amplitudes(u, u.len() / 2);
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let (m, a) = amps
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, 0.0f64), |(bm, ba), (m, a)| {
            if a.abs() > ba {
                (m, a.abs())
            } else {
                (bm, ba)
            }
        });
    if a <= 1e-13 * scale {
        0
    } else {
        m
    }
}

pub fn variance(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    let mean = u.iter().sum::<f64>() / n;
    u.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Mean over probe series of the highest autocorrelation reached after the
/// first zero crossing (0 for series with no crossing or negligible
/// variation). Periodic signals score close to 1, monotone drifts score 0.
pub fn oscillation_score(series: &[Vec<f64>]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let total: f64 = series.iter().map(|s| autocorrelation_peak(s)).sum();
    total / series.len() as f64
}

fn autocorrelation_peak(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let energy: f64 = d.iter().map(|v| v * v).sum();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if energy.sqrt() / (n as f64).sqrt() < 1e-9 * scale {
        return 0.0;
    }
    let ac = |lag: usize| {
        d[..n - lag]
            .iter()
            .zip(&d[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / energy
    };
    let max_lag = n / 2;
    let mut crossed = false;
    let mut peak = 0.0f64;
    for lag in 1..=max_lag {
        let r = ac(lag);
        if !crossed {
            crossed = r < 0.0;
        } else {
            peak = peak.max(r);
        }
    }
    peak
}

/// Decision thresholds for regime classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Minimum oscillation score for a window to count as oscillatory.
    pub oscillation_min: f64,
    /// Maximum late-time drift for the pattern to count as frozen.
    pub drift_max: f64,
    /// A pattern exists when the late-window spatial variance of `E`
    /// exceeds this multiple of the variance at the first snapshot after
    /// the start.
    pub variance_ratio: f64,
    /// Early window: this fraction of the run, starting after the initial
    /// transient fraction below.
    pub early_fraction: f64,
    /// Leading fraction of the run excluded from every window.
    pub transient_fraction: f64,
    /// Number of probe cells for the oscillation score.
    pub probes: usize,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            oscillation_min: 0.3,
            drift_max: 1e-3,
            variance_ratio: 10.0,
            early_fraction: 0.25,
            transient_fraction: 0.05,
            probes: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Homogeneous,
    /// Patterned and not frozen, with sustained oscillation after the
    /// transient (relapsing-remitting-like).
    OscillatoryPatterned,
    /// Oscillating early, frozen at the end (secondary-progressive-like).
    OscillatoryThenFrozen,
    /// Frozen without an oscillatory phase (primary-progressive-like).
    FrozenPatterned,
    /// Patterned, not frozen, not periodic.
    Irregular,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Homogeneous => "homogeneous",
            Regime::OscillatoryPatterned => "oscillatory-patterned",
            Regime::OscillatoryThenFrozen => "oscillatory-then-frozen",
            Regime::FrozenPatterned => "frozen-patterned",
            Regime::Irregular => "irregular",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub times: Vec<f64>,
    pub e_variance: Vec<f64>,
    pub e_dominant_mode: Vec<usize>,
    pub r_dominant_mode: Option<Vec<usize>>,
    /// Variance at the first snapshot after the start.
    pub initial_variance: f64,
    /// Largest variance over the late window (second half of the run).
    pub late_variance: f64,
    pub oscillation_score: f64,
    pub early_oscillation_score: f64,
    pub late_oscillation_score: f64,
    /// `max |E(t_end) - E(0.9 t_end)|`.
    pub late_drift: f64,
    pub thresholds: RegimeThresholds,
    pub regime: Regime,
}

pub fn pattern_metrics(record: &SpaceTimeRecord) -> Result<PatternMetrics> {
    pattern_metrics_with(record, &RegimeThresholds::default())
}

pub fn pattern_metrics_with(
    record: &SpaceTimeRecord,
    th: &RegimeThresholds,
) -> Result<PatternMetrics> {
    let times = &record.times;
    let e = record.e();
    if times.len() < 10 {
        return Err(Error::TooFewSnapshots {
            got: times.len(),
            need: 10,
        });
    }
    let n = e[0].len();
    let t0 = times[0];
    let t_end = *times.last().unwrap();
    let span = t_end - t0;
    let index_at = |t: f64| {
        times
            .iter()
            .position(|s| *s >= t - 1e-9)
            .unwrap_or(times.len() - 1)
    };

    let e_variance: Vec<f64> = e.iter().map(|row| variance(row)).collect();
    let e_dominant_mode: Vec<usize> = e.iter().map(|row| dominant_mode(row)).collect();
    let r_dominant_mode = record
        .field("R")
        .map(|rows| rows.iter().map(|r| dominant_mode(r)).collect());

    let probes: Vec<usize> = (0..th.probes)
        .map(|j| ((2 * j + 1) * n) / (2 * th.probes))
        .collect();
    let window = |lo: f64, hi: f64| {
        let (a, b) = (index_at(lo), index_at(hi));
        let series: Vec<Vec<f64>> = probes
            .iter()
            .map(|&i| e[a..=b].iter().map(|row| row[i]).collect())
            .collect();
        oscillation_score(&series)
    };
    let t_start = t0 + th.transient_fraction * span;
    let t_mid = t0 + 0.5 * span;
    let oscillation_score = window(t_start, t_end);
    let early_oscillation_score = window(t_start, t_start + th.early_fraction * span);
    let late_oscillation_score = window(t_mid, t_end);

    let i90 = index_at(t0 + 0.9 * span);
    let late_drift = e[i90]
        .iter()
        .zip(e.last().unwrap())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let initial_variance = e_variance[1];
    let late_variance = e_variance[index_at(t_mid)..]
        .iter()
        .cloned()
        .fold(0.0, f64::max);

    let patterned = late_variance > th.variance_ratio * initial_variance && late_variance > 1e-14;
    let regime = if !patterned {
        Regime::Homogeneous
    } else if late_drift < th.drift_max {
        if early_oscillation_score >= th.oscillation_min {
            Regime::OscillatoryThenFrozen
        } else {
            Regime::FrozenPatterned
        }
    } else if oscillation_score >= th.oscillation_min {
        // whole post-transient window: relapsing dynamics come in bursts
        Regime::OscillatoryPatterned
    } else {
        Regime::Irregular
    };

    Ok(PatternMetrics {
        times: times.clone(),
        e_variance,
        e_dominant_mode,
        r_dominant_mode,
        initial_variance,
        late_variance,
        oscillation_score,
        early_oscillation_score,
        late_oscillation_score,
        late_drift,
        thresholds: *th,
        regime,
    })
}

/// Exponential growth of one cosine mode of `R` in the linear regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub mode: usize,
    pub rate: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    /// `(t, |a_m|)` samples used in the fit.
    pub samples: Vec<(f64, f64)>,
}

/// Fits `ln |a_m(t)|` by least squares between `t_min` and the last
/// snapshot at which `max |R - r_eq| < amp_frac * r_eq`. The mode is the
/// largest one at the end of that window.
pub fn fit_linear_growth(
    times: &[f64],
    r_rows: &[Vec<f64>],
    r_eq: f64,
    t_min: f64,
    amp_frac: f64,
) -> Result<GrowthFit> {
    if times.len() != r_rows.len() {
        return Err(Error::GridMismatch(
            "times and snapshots differ in length".into(),
        ));
    }
    let mut last = None;
    for (k, row) in r_rows.iter().enumerate() {
        let dev = row.iter().map(|r| (r - r_eq).abs()).fold(0.0, f64::max);
        if dev < amp_frac * r_eq {
            last = Some(k);
        } else {
            break;
        }
    }
    let last = last
        .ok_or_else(|| Error::Invalid("initial data already outside the linear regime".into()))?;
    let first = times
        .iter()
        .position(|t| *t >= t_min)
        .unwrap_or(times.len());
    if first + 3 > last + 1 {
        return Err(Error::TooFewSnapshots {
            got: (last + 1).saturating_sub(first),
            need: 3,
        });
    }
    let m_max = r_rows[0].len() / 2;
    let end_amps = cosine_amplitudes(&r_rows[last], m_max);
    let mode = (1..=m_max)
        .max_by(|a, b| end_amps[*a].abs().total_cmp(&end_amps[*b].abs()))
        .unwrap();
    let samples: Vec<(f64, f64)> = (first..=last)
        .map(|k| (times[k], cosine_amplitudes(&r_rows[k], mode)[mode].abs()))
        .collect();
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|(t, a)| (*t, a.max(1e-300).ln()))
        .collect();
    let np = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / np;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / np;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Ok(GrowthFit {
        mode,
        rate: sxy / sxx,
        t_start: times[first],
        t_end: times[last],
        points: pts.len(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::pde::{Grid1D, RunMetadata, SimOptions};
    use std::collections::BTreeMap;

    fn record(times: Vec<f64>, e: Vec<Vec<f64>>) -> SpaceTimeRecord {
        let mut fields = BTreeMap::new();
        fields.insert("E".to_string(), e);
        SpaceTimeRecord {
            times,
            fields,
            metadata: RunMetadata {
                params: ModelParams::paper(),
                grid: Grid1D::reference(16).unwrap(),
                options: SimOptions::default(),
                steps: 0,
                dt_min: 0.0,
                dt_max: 0.0,
                clamp_events: 0,
                negative_events: 0,
                complete: true,
                wall_seconds: 0.0,
            },
        }
    }

    #[test]
    fn pure_cosine_mode_is_recovered() {
        let n = 64;
        let u: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.3 * (5.0 * PI * (i as f64 + 0.5) / n as f64).cos())
            .collect();
        let a = cosine_amplitudes(&u, 10);
        assert!((a[5] - 0.3).abs() < 1e-12);
        assert!(a.iter().enumerate().all(|(m, v)| m == 5 || v.abs() < 1e-12));
        assert_eq!(dominant_mode(&u), 5);
    }

    #[test]
    fn uniform_record() {
        let rec = record((0..20).map(|t| t as f64).collect(), vec![vec![0.5; 16]; 20]);
        let m = pattern_metrics(&rec).unwrap();
        assert!(m.e_variance.iter().all(|v| *v == 0.0));
        assert!(m.e_dominant_mode.iter().all(|v| *v == 0));
        assert_eq!(m.regime, Regime::Homogeneous);
    }

    #[test]
    fn too_few_snapshots() {
        let rec = record(vec![0.0, 1.0], vec![vec![0.0; 16]; 2]);
        assert!(matches!(
            pattern_metrics(&rec),
            Err(Error::TooFewSnapshots { got: 2, need: 10 })
        ));
    }

    fn synthetic(f: impl Fn(f64, usize) -> f64) -> SpaceTimeRecord {
        let times: Vec<f64> = (0..=400).map(|k| k as f64).collect();
        let e = times
            .iter()
            .map(|&t| {
                (0..16)
                    .map(|i| if t == 0.0 { 0.0 } else { f(t, i) })
                    .collect()
            })
            .collect();
        record(times, e)
    }

    #[test]
    fn regime_rules_on_synthetic_records() {
        let shape = |i: usize| (3.0 * PI * (i as f64 + 0.5) / 16.0).cos();
        // standing pattern whose amplitude oscillates with period 37
        let osc = synthetic(|t, i| {
            0.9 + 0.05
                * shape(i)
                * (1.0 - (-t / 5.0).exp())
                * (1.0 + 0.5 * (2.0 * PI * t / 37.0).sin())
        });
        assert_eq!(
            pattern_metrics(&osc).unwrap().regime,
            Regime::OscillatoryPatterned
        );

        let frozen = synthetic(|t, i| 0.9 + 0.05 * shape(i) * (1.0 - (-t / 5.0).exp()));
        assert_eq!(
            pattern_metrics(&frozen).unwrap().regime,
            Regime::FrozenPatterned
        );

        let mixed = synthetic(|t, i| {
            let wobble = if t < 200.0 {
                0.5 * (2.0 * PI * t / 25.0).sin()
            } else {
                0.0
            };
            0.9 + 0.05 * shape(i) * (1.0 - (-t / 5.0).exp()) * (1.0 + wobble)
        });
        assert_eq!(
            pattern_metrics(&mixed).unwrap().regime,
            Regime::OscillatoryThenFrozen
        );
    }

    #[test]
    fn growth_fit_on_synthetic_mode() {
        let n = 64;
        let times: Vec<f64> = (0..100).map(|k| k as f64 * 0.5).collect();
        let rows: Vec<Vec<f64>> = times
            .iter()
            .map(|&t| {
                (0..n)
                    .map(|i| {
                        let x = (i as f64 + 0.5) / n as f64;
                        0.3 + 1e-6 * (0.1 * t).exp() * (7.0 * PI * x).cos()
                            + 1e-6 * (0.05 * t).exp() * (3.0 * PI * x).cos()
                    })
                    .collect()
            })
            .collect();
        let fit = fit_linear_growth(&times, &rows, 0.3, 5.0, 0.01).unwrap();
        assert_eq!(fit.mode, 7);
        assert!((fit.rate - 0.1).abs() < 1e-9, "{}", fit.rate);
    }
}
