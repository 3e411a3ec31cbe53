//! Deliberately slow per-cell references for the panel kernels. Each one
//! recomputes its window from scratch with no shared state.

use alphaforge_core::Panel;

fn each_cell(x: &Panel, f: impl Fn(&[f64], usize) -> f64) -> Vec<f64> {
    let (rows, cols) = (x.rows(), x.cols());
    let mut out = vec![f64::NAN; rows * cols];
    for i in 0..cols {
        let col = x.column(i);
        for t in 0..rows {
            out[t * cols + i] = clean(f(&col, t));
        }
    }
    out
}

fn clean(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::NAN
    }
}

/// The `d` values ending at `t`, or `None` if the window is short or has a gap.
fn window(col: &[f64], t: usize, d: usize) -> Option<Vec<f64>> {
    if d == 0 || t + 1 < d {
        return None;
    }
    let w: Vec<f64> = col[t + 1 - d..=t].to_vec();
    if w.iter().any(|v| v.is_nan()) {
        None
    } else {
        Some(w)
    }
}

fn sample_variance(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    let m = w.iter().sum::<f64>() / n;
    w.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
}

pub fn delay(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| if t >= d { c[t - d] } else { f64::NAN })
}

pub fn delta(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| if t >= d { c[t] - c[t - d] } else { f64::NAN })
}

pub fn sum(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| window(c, t, d).map_or(f64::NAN, |w| w.iter().sum()))
}

pub fn product(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| w.iter().product())
    })
}

pub fn stddev(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| sample_variance(&w).sqrt())
    })
}

pub fn ts_min(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| w.iter().cloned().fold(f64::INFINITY, f64::min))
    })
}

pub fn ts_max(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| {
            w.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        })
    })
}

/// Days ago of the extreme value; among equal extremes the most recent wins.
fn arg_extreme(w: &[f64], better: impl Fn(f64, f64) -> bool) -> f64 {
    let d = w.len();
    let mut best_ago = 0;
    for ago in 1..d {
        if better(w[d - 1 - ago], w[d - 1 - best_ago]) {
            best_ago = ago;
        }
    }
    best_ago as f64
}

pub fn argmax(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| arg_extreme(&w, |a, b| a > b))
    })
}

pub fn argmin(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| arg_extreme(&w, |a, b| a < b))
    })
}

/// 0-based average rank of `v` among `values` (which must contain it).
fn average_position(values: &[f64], v: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let slots: Vec<usize> = (0..sorted.len()).filter(|&k| sorted[k] == v).collect();
    slots.iter().sum::<usize>() as f64 / slots.len() as f64
}

pub fn ts_rank(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| {
            average_position(&w, w[d - 1]) / (d as f64 - 1.0)
        })
    })
}

pub fn decay_linear(x: &Panel, d: usize) -> Vec<f64> {
    each_cell(x, |c, t| {
        window(c, t, d).map_or(f64::NAN, |w| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (k, v) in w.iter().enumerate() {
                let weight = (k + 1) as f64;
                num += weight * v;
                den += weight;
            }
            num / den
        })
    })
}

fn paired(x: &Panel, y: &Panel, d: usize, f: impl Fn(&[f64], &[f64]) -> f64) -> Vec<f64> {
    let (rows, cols) = (x.rows(), x.cols());
    let mut out = vec![f64::NAN; rows * cols];
    for i in 0..cols {
        let (a, b) = (x.column(i), y.column(i));
        for t in 0..rows {
            if let (Some(wa), Some(wb)) = (window(&a, t, d), window(&b, t, d)) {
                out[t * cols + i] = clean(f(&wa, &wb));
            }
        }
    }
    out
}

fn covariance_of(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}

pub fn covariance(x: &Panel, y: &Panel, d: usize) -> Vec<f64> {
    paired(x, y, d, covariance_of)
}

pub fn correlation(x: &Panel, y: &Panel, d: usize, epsilon: f64) -> Vec<f64> {
    paired(x, y, d, |a, b| {
        let (va, vb) = (sample_variance(a), sample_variance(b));
        if va < epsilon || vb < epsilon {
            return f64::NAN;
        }
        (covariance_of(a, b) / (va * vb).sqrt()).clamp(-1.0, 1.0)
    })
}

fn each_row(x: &Panel, f: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    (0..x.rows()).flat_map(|t| f(x.row(t))).collect()
}

pub fn rank(x: &Panel) -> Vec<f64> {
    each_row(x, |row| {
        let present: Vec<f64> = row.iter().cloned().filter(|v| !v.is_nan()).collect();
        row.iter()
            .map(|&v| {
                if v.is_nan() {
                    f64::NAN
                } else if present.len() == 1 {
                    0.5
                } else {
                    average_position(&present, v) / (present.len() as f64 - 1.0)
                }
            })
            .collect()
    })
}

pub fn scale(x: &Panel, a: f64) -> Vec<f64> {
    each_row(x, |row| {
        let gross: f64 = row.iter().filter(|v| !v.is_nan()).map(|v| v.abs()).sum();
        row.iter()
            .map(|&v| {
                if v.is_nan() {
                    f64::NAN
                } else if gross == 0.0 {
                    0.0
                } else {
                    a * v / gross
                }
            })
            .collect()
    })
}

pub fn indneutralize(x: &Panel, groups: &[usize]) -> Vec<f64> {
    each_row(x, |row| {
        row.iter()
            .enumerate()
            .map(|(i, &v)| {
                if v.is_nan() {
                    return f64::NAN;
                }
                let peers: Vec<f64> = (0..row.len())
                    .filter(|&j| groups[j] == groups[i] && !row[j].is_nan())
                    .map(|j| row[j])
                    .collect();
                v - peers.iter().sum::<f64>() / peers.len() as f64
            })
            .collect()
    })
}

pub fn map(x: &Panel, f: impl Fn(f64) -> f64) -> Vec<f64> {
    x.values().iter().map(|&v| clean(f(v))).collect()
}

pub fn signedpower(v: f64, a: f64) -> f64 {
    if v.is_nan() || a.is_nan() {
        f64::NAN
    } else if v == 0.0 {
        if a < 0.0 {
            f64::NAN
        } else {
            0.0
        }
    } else if v > 0.0 {
        v.powf(a)
    } else {
        -(-v).powf(a)
    }
}
