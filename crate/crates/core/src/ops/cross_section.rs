use rayon::prelude::*;

use super::{GroupVector, OpError};
use crate::data::Panel;

fn per_row(x: &Panel, f: impl Fn(&[f64], &mut [f64]) + Sync) -> Panel {
    let cols = x.cols();
    let mut out = vec![f64::NAN; x.values().len()];
    out.par_chunks_mut(cols)
        .zip(x.values().par_chunks(cols))
        .for_each(|(o, row)| f(row, o));
    x.with_values(out)
}

/// Cross-sectional rank in `[0, 1]`: `(r-1)/(n-1)` over the present cells of
/// each date, ties sharing their average rank. A lone present cell gets 0.5.
pub fn cs_rank(x: &Panel) -> Panel {
    per_row(x, |row, out| {
        let mut present: Vec<(f64, usize)> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .map(|(i, &v)| (v, i))
            .collect();
        let n = present.len();
        if n == 0 {
            return;
        }
        if n == 1 {
            out[present[0].1] = 0.5;
            return;
        }
        present.sort_by(|a, b| a.0.total_cmp(&b.0));
        let denom = (n - 1) as f64;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && present[end].0 == present[start].0 {
                end += 1;
            }
            // 0-based ranks start..end-1 share their mean
            let rank0 = (start + end - 1) as f64 / 2.0;
            for &(_, i) in &present[start..end] {
                out[i] = rank0 / denom;
            }
            start = end;
        }
    })
}

/// Rescale each date so that `Σ|x| = a` over present cells. An all-zero date
/// stays zero.
pub fn cs_scale(x: &Panel, a: f64) -> Panel {
    per_row(x, |row, out| {
        let gross: f64 = row.iter().filter(|v| !v.is_nan()).map(|v| v.abs()).sum();
        for (o, &v) in out.iter_mut().zip(row) {
            *o = if v.is_nan() {
                f64::NAN
            } else if gross == 0.0 {
                0.0
            } else {
                v * a / gross
            };
        }
    })
}

/// Demean each date within each group, over present cells.
pub fn cs_indneutralize(x: &Panel, groups: &GroupVector) -> Result<Panel, OpError> {
    if groups.len() != x.cols() {
        return Err(OpError::GroupCoverage {
            groups: groups.len(),
            cols: x.cols(),
        });
    }
    let k = groups.group_count();
    Ok(per_row(x, |row, out| {
        let mut sum = vec![0.0; k];
        let mut count = vec![0usize; k];
        for (i, &v) in row.iter().enumerate() {
            if !v.is_nan() {
                let g = groups.group_of(i);
                sum[g] += v;
                count[g] += 1;
            }
        }
        for (i, (&v, o)) in row.iter().zip(out.iter_mut()).enumerate() {
            let g = groups.group_of(i);
            *o = if v.is_nan() {
                f64::NAN
            } else if count[g] == 1 {
                0.0
            } else {
                v - sum[g] / count[g] as f64
            };
        }
    }))
}
