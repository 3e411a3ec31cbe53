use std::collections::VecDeque;

use super::elementwise::finite_or_nan;
use super::{check_shape, per_column, per_column2, OpError};
use crate::data::Panel;

/// Calls `f(window)` for every `t` whose trailing `d`-cell window is fully
/// present and stores the result at `out[t]`; other cells stay NaN.
fn full_windows(col: &[f64], d: usize, out: &mut [f64], mut f: impl FnMut(&[f64]) -> f64) {
    if d == 0 {
        return;
    }
    let mut last_nan: Option<usize> = None;
    for t in 0..col.len() {
        if col[t].is_nan() {
            last_nan = Some(t);
        }
        if t + 1 < d {
            continue;
        }
        if last_nan.is_none_or(|j| j + d <= t) {
            out[t] = finite_or_nan(f(&col[t + 1 - d..=t]));
        }
    }
}

/// Value of `x` exactly `d` days ago.
pub fn ts_delay(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| {
        if d < col.len() {
            out[d..].copy_from_slice(&col[..col.len() - d]);
        }
    })
}

/// `x[t] - x[t-d]`.
pub fn ts_delta(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| {
        for t in d..col.len() {
            out[t] = finite_or_nan(col[t] - col[t - d]);
        }
    })
}

pub fn ts_sum(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| full_windows(col, d, out, |w| w.iter().sum()))
}

/// Trailing arithmetic mean (used for `adv{d}`).
pub fn ts_mean(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| {
        full_windows(col, d, out, |w| w.iter().sum::<f64>() / d as f64)
    })
}

pub fn ts_product(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| full_windows(col, d, out, |w| w.iter().product()))
}

/// Sample standard deviation (denominator `d-1`); requires `d >= 2`.
pub fn ts_stddev(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| {
        if d < 2 {
            return;
        }
        full_windows(col, d, out, |w| {
            let (_, ss) = centered_moments(w);
            (ss / (d - 1) as f64).sqrt()
        })
    })
}

/// Mean and sum of squared deviations, computed on values shifted by the
/// oldest cell so that a constant window gives exactly zero.
fn centered_moments(w: &[f64]) -> (f64, f64) {
    let shift = w[0];
    let n = w.len() as f64;
    let mean = w.iter().map(|v| v - shift).sum::<f64>() / n;
    let ss = w
        .iter()
        .map(|v| {
            let dv = v - shift - mean;
            dv * dv
        })
        .sum();
    (mean + shift, ss)
}

#[derive(Clone, Copy)]
enum Extremum {
    Min,
    Max,
}

#[derive(Clone, Copy)]
enum Report {
    Value,
    DaysAgo,
}

/// Sliding extremum with a monotonic deque. Equal values evict older ones,
/// so ties resolve to the most recent occurrence.
fn sliding_extremum(col: &[f64], d: usize, out: &mut [f64], which: Extremum, report: Report) {
    if d == 0 {
        return;
    }
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(d);
    let mut last_nan: Option<usize> = None;
    for t in 0..col.len() {
        let v = col[t];
        if v.is_nan() {
            last_nan = Some(t);
            deque.clear();
            continue;
        }
        while let Some(&back) = deque.back() {
            let dominated = match which {
                Extremum::Max => col[back] <= v,
                Extremum::Min => col[back] >= v,
            };
            if !dominated {
                break;
            }
            deque.pop_back();
        }
        deque.push_back(t);
        while let Some(&front) = deque.front() {
            if front + d <= t {
                deque.pop_front();
            } else {
                break;
            }
        }
        if t + 1 >= d && last_nan.is_none_or(|j| j + d <= t) {
            let front = *deque.front().expect("window holds today");
            out[t] = match report {
                Report::Value => col[front],
                Report::DaysAgo => (t - front) as f64,
            };
        }
    }
}

pub fn ts_min(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| sliding_extremum(col, d, out, Extremum::Min, Report::Value))
}

pub fn ts_max(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| sliding_extremum(col, d, out, Extremum::Max, Report::Value))
}

/// Days since the window maximum: 0 is today, `d-1` the oldest day.
pub fn ts_argmax(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| sliding_extremum(col, d, out, Extremum::Max, Report::DaysAgo))
}

/// Days since the window minimum: 0 is today, `d-1` the oldest day.
pub fn ts_argmin(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| sliding_extremum(col, d, out, Extremum::Min, Report::DaysAgo))
}

/// Rank of today's value within its trailing window, `(r-1)/(d-1)` with
/// average ties; requires `d >= 2`.
pub fn ts_rank(x: &Panel, d: usize) -> Panel {
    per_column(x, |col, out| {
        if d < 2 {
            return;
        }
        full_windows(col, d, out, |w| {
            let today = w[d - 1];
            let (mut below, mut ties) = (0usize, 0usize);
            for &v in &w[..d - 1] {
                if v < today {
                    below += 1;
                } else if v == today {
                    ties += 1;
                }
            }
            (below as f64 + ties as f64 / 2.0) / (d - 1) as f64
        })
    })
}

/// Weighted moving average with weights `d, d-1, …, 1` (today heaviest),
/// normalized to sum to one.
pub fn decay_linear(x: &Panel, d: usize) -> Panel {
    let norm = (d * (d + 1)) as f64 / 2.0;
    per_column(x, |col, out| {
        full_windows(col, d, out, |w| {
            w.iter()
                .enumerate()
                .map(|(k, v)| (k + 1) as f64 * v)
                .sum::<f64>()
                / norm
        })
    })
}

fn paired_windows(
    a: &[f64],
    b: &[f64],
    d: usize,
    out: &mut [f64],
    mut f: impl FnMut(&[f64], &[f64]) -> f64,
) {
    if d == 0 {
        return;
    }
    let mut last_nan: Option<usize> = None;
    for t in 0..a.len() {
        if a[t].is_nan() || b[t].is_nan() {
            last_nan = Some(t);
        }
        if t + 1 >= d && last_nan.is_none_or(|j| j + d <= t) {
            let s = t + 1 - d;
            out[t] = finite_or_nan(f(&a[s..=t], &b[s..=t]));
        }
    }
}

/// Returns (Σ dx·dy, Σ dx², Σ dy²) about the window means.
fn co_moments(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (ma, _) = centered_moments(a);
    let (mb, _) = centered_moments(b);
    let (sa, sb) = (a[0], b[0]);
    let (ma, mb) = (ma - sa, mb - sb);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in a.iter().zip(b) {
        let dx = x - sa - ma;
        let dy = y - sb - mb;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy, sxx, syy)
}

/// Pearson correlation over trailing `d`-day windows. NaN when either
/// window's sample variance is below `variance_epsilon`; clamped to `[-1, 1]`.
pub fn ts_correlation(
    x: &Panel,
    y: &Panel,
    d: usize,
    variance_epsilon: f64,
) -> Result<Panel, OpError> {
    check_shape(x, y)?;
    Ok(per_column2(x, y, |a, b, out| {
        if d < 2 {
            return;
        }
        let dof = (d - 1) as f64;
        paired_windows(a, b, d, out, |wa, wb| {
            let (sxy, sxx, syy) = co_moments(wa, wb);
            if sxx / dof < variance_epsilon || syy / dof < variance_epsilon {
                return f64::NAN;
            }
            (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
        })
    }))
}

/// Sample covariance (denominator `d-1`) over trailing `d`-day windows.
pub fn ts_covariance(x: &Panel, y: &Panel, d: usize) -> Result<Panel, OpError> {
    check_shape(x, y)?;
    Ok(per_column2(x, y, |a, b, out| {
        if d < 2 {
            return;
        }
        paired_windows(a, b, d, out, |wa, wb| co_moments(wa, wb).0 / (d - 1) as f64)
    }))
}
