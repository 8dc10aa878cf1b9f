use super::{uniform_weights, StepKernel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cumulative boundaries `0 = c_0 < c_1 < ... < c_m = 1` of the interval layout.
fn boundaries<T: Scalar>(weights: &[T]) -> Vec<T> {
    let mut c = Vec::with_capacity(weights.len() + 1);
    let mut acc = T::zero();
    c.push(acc);
    for &w in weights {
        acc += w;
        c.push(acc);
    }
    // pin the right end so rounding in the cumulative sum cannot leave a gap
    *c.last_mut().unwrap() = T::one();
    c
}

/// Boundaries with every point within the weight tolerance of a multiple of
/// `1/m` moved onto it, so compatible layouts equalize without rounding noise.
fn grid_boundaries<T: Scalar>(weights: &[T], m: usize) -> Vec<T> {
    let mf = T::from_usize(m).unwrap();
    boundaries(weights)
        .into_iter()
        .map(|x| {
            let g = (x * mf).round() / mf;
            if (x - g).abs() <= T::weight_tol() {
                g
            } else {
                x
            }
        })
        .collect()
}

/// Part whose interval contains `x` (the last part for `x >= c_{m-1}`).
fn part_at<T: Scalar>(c: &[T], x: T) -> usize {
    let m = c.len() - 1;
    (0..m).find(|&i| c[i + 1] > x).unwrap_or(m - 1)
}

/// Lay the parts of `w` on `[0,1]` in index order and resample on the grid of
/// `m` equal cells, each cell taking the value of the part containing its
/// midpoint. Returns the `m`-part kernel and its exact L1 distance to `w`
/// (zero when every cumulative weight is a multiple of `1/m`).
pub fn equalize<T: Scalar>(w: &StepKernel<T>, m: usize) -> Result<(StepKernel<T>, T)> {
    if m < w.parts() {
        return Err(Error::InvalidArgument(format!(
            "grid of {m} cells is coarser than the kernel's {} parts",
            w.parts()
        )));
    }
    let c = grid_boundaries(w.weights(), m);
    let mf = T::from_usize(m).unwrap();
    let half = T::lit(0.5);
    let cell_part: Vec<usize> = (0..m)
        .map(|k| part_at(&c, (T::from_usize(k).unwrap() + half) / mf))
        .collect();

    let mut values = Vec::with_capacity(m * m);
    for &a in &cell_part {
        for &b in &cell_part {
            values.push(w.value(a, b));
        }
    }
    let out = StepKernel::from_flat(uniform_weights(m), values)?;

    // Common refinement of both layouts: each segment knows its original part
    // and its grid cell.
    let mut cuts: Vec<T> = c.clone();
    cuts.extend((1..m).map(|k| T::from_usize(k).unwrap() / mf));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let segments: Vec<(T, usize, usize)> = cuts
        .windows(2)
        .filter(|s| s[1] > s[0])
        .map(|s| {
            let mid = (s[0] + s[1]) * half;
            let cell = ((mid * mf).floor().to_usize().unwrap()).min(m - 1);
            (s[1] - s[0], part_at(&c, mid), cell_part[cell])
        })
        .collect();
    let mut err = T::zero();
    for &(la, pa, qa) in &segments {
        for &(lb, pb, qb) in &segments {
            if (pa, pb) != (qa, qb) {
                err += la * lb * (w.value(pa, pb) - w.value(qa, qb)).abs();
            }
        }
    }
    Ok((out, err))
}

/// Overlap lengths between the parts of `weights` (laid out in index order)
/// and the `m` equal grid cells: entry `[i][k]` is `|A_i ∩ I_k|`.
pub fn equalize_overlaps<T: Scalar>(weights: &[T], m: usize) -> Vec<Vec<T>> {
    let c = grid_boundaries(weights, m);
    let mf = T::from_usize(m).unwrap();
    (0..weights.len())
        .map(|i| {
            (0..m)
                .map(|k| {
                    let lo = T::from_usize(k).unwrap() / mf;
                    let hi = T::from_usize(k + 1).unwrap() / mf;
                    (c[i + 1].min(hi) - c[i].max(lo)).max(T::zero())
                })
                .collect()
        })
        .collect()
}
