//! Exhaustive vertex enumeration of the bilinear cut forms.
//!
//! Masks are visited in Gray-code order inside chunks of `2^CHUNK_BITS`; the
//! running state is rebuilt from scratch at the start of every chunk so
//! rounding drift stays bounded, and chunks run in parallel with a
//! deterministic reduction (largest score, then smallest mask).

use rayon::prelude::*;

use crate::scalar::Scalar;

const CHUNK_BITS: usize = 12;
const PARALLEL_FROM_BITS: usize = 16;

/// Scan all `2^bits` masks and return the best `(score, mask)`.
pub(crate) fn best_mask<T, S, I, F, E>(bits: usize, init: I, flip: F, eval: E) -> (T, u64)
where
    T: Scalar,
    S: Send,
    I: Fn(u64) -> S + Sync,
    F: Fn(&mut S, usize, bool) + Sync,
    E: Fn(&S, u64) -> T + Sync,
{
    assert!(bits < 63, "mask enumeration limited to 62 bits");
    let low = bits.min(CHUNK_BITS);
    let chunks = 1u64 << (bits - low);
    let run_chunk = |c: u64| -> (T, u64) {
        let base = c << low;
        let mut state = init(base);
        let mut best = (eval(&state, base), base);
        for k in 1u64..(1u64 << low) {
            let bit = k.trailing_zeros() as usize;
            let mask = base | (k ^ (k >> 1));
            flip(&mut state, bit, mask >> bit & 1 == 1);
            let s = eval(&state, mask);
            if s > best.0 || (s == best.0 && mask < best.1) {
                best = (s, mask);
            }
        }
        best
    };
    let pick = |a: (T, u64), b: (T, u64)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    if bits >= PARALLEL_FROM_BITS {
        (0..chunks)
            .into_par_iter()
            .map(run_chunk)
            .reduce(|| (T::neg_infinity(), u64::MAX), pick)
    } else {
        (0..chunks).map(run_chunk).fold((T::neg_infinity(), u64::MAX), pick)
    }
}

/// `r_j = sum_{i in mask} A_ij`.
pub(crate) fn masked_row_sum<T: Scalar>(a: &[T], m: usize, mask: u64) -> Vec<T> {
    let mut r = vec![T::zero(); m];
    for i in (0..m).filter(|&i| mask >> i & 1 == 1) {
        for (rj, &x) in r.iter_mut().zip(&a[i * m..(i + 1) * m]) {
            *rj += x;
        }
    }
    r
}

fn add_row<T: Scalar>(r: &mut [T], a: &[T], m: usize, i: usize, sign: T) {
    for (rj, &x) in r.iter_mut().zip(&a[i * m..(i + 1) * m]) {
        *rj += sign * x;
    }
}

/// Positive and negative parts of `sum_j r_j` restricted to `allowed` columns.
fn split_sums<T: Scalar>(r: &[T], allowed: impl Fn(usize) -> bool) -> (T, T) {
    let mut pos = T::zero();
    let mut neg = T::zero();
    for (j, &x) in r.iter().enumerate() {
        if allowed(j) {
            if x >= T::zero() {
                pos += x;
            } else {
                neg -= x;
            }
        }
    }
    (pos, neg)
}

/// Greedy column set for a fixed row set: columns whose sum has the chosen
/// sign (zero sums are included).
pub(crate) fn greedy_columns<T: Scalar>(r: &[T], positive: bool, allowed: impl Fn(usize) -> bool) -> Vec<T> {
    r.iter()
        .enumerate()
        .map(|(j, &x)| {
            let take = allowed(j) && if positive { x >= T::zero() } else { x <= T::zero() };
            if take {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect()
}

pub(crate) fn mask_to_indicator<T: Scalar>(mask: u64, m: usize) -> Vec<T> {
    (0..m)
        .map(|i| if mask >> i & 1 == 1 { T::one() } else { T::zero() })
        .collect()
}

/// Variant one: rows over all subsets, best column subset chosen greedily.
pub(crate) fn one<T: Scalar>(a: &[T], m: usize) -> (Vec<T>, Vec<T>) {
    let (_, mask) = best_mask(
        m,
        |mask| masked_row_sum(a, m, mask),
        |r, i, add| add_row(r, a, m, i, if add { T::one() } else { -T::one() }),
        |r, _| {
            let (p, n) = split_sums(r, |_| true);
            p.max(n)
        },
    );
    let r = masked_row_sum(a, m, mask);
    let (p, n) = split_sums(&r, |_| true);
    (mask_to_indicator(mask, m), greedy_columns(&r, p >= n, |_| true))
}

/// Variant two: rows over sign vectors with the last sign pinned to `+1`
/// (the form is odd in the row vector), columns by sign of the row sums.
pub(crate) fn two<T: Scalar>(a: &[T], m: usize) -> (Vec<T>, Vec<T>) {
    let signs = |mask: u64| -> Vec<T> {
        (0..m)
            .map(|i| if mask >> i & 1 == 1 { -T::one() } else { T::one() })
            .collect()
    };
    let row_sum = |mask: u64| -> Vec<T> {
        let s = signs(mask);
        (0..m)
            .map(|j| (0..m).map(|i| s[i] * a[i * m + j]).sum())
            .collect()
    };
    let two_ = T::lit(2.0);
    let (_, mask) = best_mask(
        m - 1,
        row_sum,
        |r, i, neg| add_row(r, a, m, i, if neg { -two_ } else { two_ }),
        |r: &Vec<T>, _| r.iter().map(|x| x.abs()).sum::<T>(),
    );
    let r = row_sum(mask);
    let col = r
        .iter()
        .map(|&x| if x >= T::zero() { T::one() } else { -T::one() })
        .collect();
    (signs(mask), col)
}

/// Variant three: `|a^T A a|` over indicator vectors.
pub(crate) fn three<T: Scalar>(a: &[T], m: usize) -> Vec<T> {
    // state: (A a, a^T A a)
    let init = |mask: u64| {
        let r = masked_row_sum(a, m, mask);
        let g = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| r[i]).sum();
        (r, g)
    };
    let two_ = T::lit(2.0);
    let (_, mask) = best_mask(
        m,
        init,
        |(r, g): &mut (Vec<T>, T), i, add| {
            let d = if add { T::one() } else { -T::one() };
            *g += two_ * d * r[i] + a[i * m + i];
            add_row(r, a, m, i, d);
        },
        |(_, g), _| g.abs(),
    );
    mask_to_indicator(mask, m)
}

/// Variant four on vertex sets: rows over subsets `S`, columns greedily from
/// the complement of `S`.
pub(crate) fn four<T: Scalar>(a: &[T], m: usize) -> (Vec<T>, Vec<T>) {
    let (_, mask) = best_mask(
        m,
        |mask| masked_row_sum(a, m, mask),
        |r, i, add| add_row(r, a, m, i, if add { T::one() } else { -T::one() }),
        |r, mask| {
            let (p, n) = split_sums(r, |j| mask >> j & 1 == 0);
            p.max(n)
        },
    );
    let r = masked_row_sum(a, m, mask);
    let outside = |j: usize| mask >> j & 1 == 0;
    let (p, n) = split_sums(&r, outside);
    (mask_to_indicator(mask, m), greedy_columns(&r, p >= n, outside))
}

/// Variant five on vertex sets: `|sum_{i in S, j notin S} A_ij|`.
pub(crate) fn five<T: Scalar>(a: &[T], m: usize) -> Vec<T> {
    let (_, mask) = best_mask(
        m,
        |mask| masked_row_sum(a, m, mask),
        |r, i, add| add_row(r, a, m, i, if add { T::one() } else { -T::one() }),
        |r, mask| {
            (0..m)
                .filter(|&j| mask >> j & 1 == 0)
                .map(|j| r[j])
                .sum::<T>()
                .abs()
        },
    );
    mask_to_indicator(mask, m)
}
