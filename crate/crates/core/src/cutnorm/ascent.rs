//! Local search used beyond the exhaustive size limit, and the fractional
//! coordinate ascent for variants three to five when the diagonal does not
//! vanish.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::exhaustive::greedy_columns;
use super::{bilinear, Variant};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 10_000;

fn col_sums<T: Scalar>(a: &[T], m: usize, x: &[T]) -> Vec<T> {
    (0..m)
        .map(|j| (0..m).map(|i| x[i] * a[i * m + j]).sum())
        .collect()
}

fn random_indicator<T: Scalar>(rng: &mut ChaCha8Rng, m: usize) -> Vec<T> {
    (0..m)
        .map(|_| if rng.gen::<bool>() { T::one() } else { T::zero() })
        .collect()
}

fn signed<T: Scalar>(x: &[T], s: T) -> Vec<T> {
    x.iter().map(|&v| v * s).collect()
}

/// Alternating greedy ascent for variants one, two and four over vertex
/// selectors, maximizing `sign * a^T A b`.
fn alternate<T: Scalar>(a_mat: &[T], m: usize, variant: Variant, sign: T, mut row: Vec<T>) -> (Vec<T>, Vec<T>) {
    let sa = signed(a_mat, sign);
    let pick = |r: &[T], other: &[T]| -> Vec<T> {
        match variant {
            Variant::Two => r
                .iter()
                .map(|&x| if x >= T::zero() { T::one() } else { -T::one() })
                .collect(),
            Variant::Four => greedy_columns(r, true, |j| other[j] == T::zero()),
            _ => greedy_columns(r, true, |_| true),
        }
    };
    let mut col = pick(&col_sums(&sa, m, &row), &row);
    let mut best = bilinear(&sa, m, &row, &col);
    for _ in 0..MAX_SWEEPS {
        // A is symmetric, so the best row for fixed columns uses the same sums.
        row = pick(&col_sums(&sa, m, &col), &col);
        col = pick(&col_sums(&sa, m, &row), &row);
        let v = bilinear(&sa, m, &row, &col);
        if v <= best {
            break;
        }
        best = v;
    }
    (row, col)
}

/// Single-flip best-improvement ascent on `sign * q(a)` for variants three
/// (`q = a^T A a`) and five (`q = a^T A (1 - a)`).
fn flip_ascent<T: Scalar>(a_mat: &[T], m: usize, variant: Variant, sign: T, mut x: Vec<T>) -> Vec<T> {
    let eval = |x: &[T]| -> T {
        let y: Vec<T> = match variant {
            Variant::Five => x.iter().map(|&v| T::one() - v).collect(),
            _ => x.to_vec(),
        };
        sign * bilinear(a_mat, m, x, &y)
    };
    let mut cur = eval(&x);
    for _ in 0..MAX_SWEEPS {
        let mut best = (cur, None);
        for i in 0..m {
            x[i] = T::one() - x[i];
            let v = eval(&x);
            if v > best.0 {
                best = (v, Some(i));
            }
            x[i] = T::one() - x[i];
        }
        match best.1 {
            Some(i) => {
                x[i] = T::one() - x[i];
                cur = best.0;
            }
            None => break,
        }
    }
    x
}

/// Multistart vertex heuristic. Returns the best selectors found.
pub(crate) fn vertex_search<T: Scalar>(
    a_mat: &[T],
    m: usize,
    variant: Variant,
    restarts: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<T>, Vec<T>) {
    let mut best: Option<(T, Vec<T>, Vec<T>)> = None;
    for _ in 0..restarts.max(1) {
        for sign in [T::one(), -T::one()] {
            let start = random_indicator::<T>(rng, m);
            let (row, col) = match variant {
                Variant::One | Variant::Four => alternate(a_mat, m, variant, sign, start),
                Variant::Two => {
                    let s = start.iter().map(|&v| v + v - T::one()).collect();
                    alternate(a_mat, m, variant, sign, s)
                }
                Variant::Three => {
                    let x = flip_ascent(a_mat, m, variant, sign, start);
                    (x.clone(), x)
                }
                Variant::Five => {
                    let x = flip_ascent(a_mat, m, variant, sign, start);
                    let y = x.iter().map(|&v| T::one() - v).collect();
                    (x, y)
                }
                Variant::Complex | Variant::Hilbert => unreachable!("not a vertex variant"),
            };
            let v = bilinear(a_mat, m, &row, &col).abs();
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, row, col));
            }
        }
    }
    let (_, row, col) = best.unwrap();
    (row, col)
}

/// Maximize `s*(alpha x + beta y + gamma x y)` over the triangle
/// `x, y >= 0, x + y <= 1`.
fn best_in_triangle<T: Scalar>(alpha: T, beta: T, gamma: T, s: T) -> (T, T) {
    let f = |x: T, y: T| s * (alpha * x + beta * y + gamma * x * y);
    let mut cands = vec![(T::zero(), T::zero()), (T::one(), T::zero()), (T::zero(), T::one())];
    // on x + y = 1: s*(beta + (alpha - beta + gamma) x - gamma x^2)
    if s * gamma > T::zero() {
        let x = (alpha - beta + gamma) / (gamma + gamma);
        if x > T::zero() && x < T::one() {
            cands.push((x, T::one() - x));
        }
    }
    cands
        .into_iter()
        .fold(None, |acc: Option<(T, T, T)>, (x, y)| {
            let v = f(x, y);
            match acc {
                Some(b) if b.0 >= v => Some(b),
                _ => Some((v, x, y)),
            }
        })
        .map(|(_, x, y)| (x, y))
        .unwrap()
}

/// Maximize `s*(lin x + quad x^2)` over `[0, 1]`.
fn best_in_interval<T: Scalar>(lin: T, quad: T, s: T) -> T {
    let f = |x: T| s * (lin * x + quad * x * x);
    let mut best = (f(T::zero()), T::zero());
    let v1 = f(T::one());
    if v1 > best.0 {
        best = (v1, T::one());
    }
    if s * quad < T::zero() {
        let x = -lin / (quad + quad);
        if x > T::zero() && x < T::one() && f(x) > best.0 {
            best = (f(x), x);
        }
    }
    best.1
}

/// Coordinate ascent over fractional part splits, starting from the given
/// selectors, for variants three, four and five. Each coordinate step solves
/// its one- or two-variable subproblem exactly, so the value never drops.
pub(crate) fn fractional_ascent<T: Scalar>(
    a_mat: &[T],
    m: usize,
    variant: Variant,
    row: Vec<T>,
    col: Vec<T>,
) -> (Vec<T>, Vec<T>) {
    let start = bilinear(a_mat, m, &row, &col);
    let sign = if start >= T::zero() { T::one() } else { -T::one() };
    let (mut x, mut y) = (row, col);
    let mut cur = sign * start;
    let diag = |i: usize| a_mat[i * m + i];
    let off = |i: usize, v: &[T]| -> T { (0..m).filter(|&j| j != i).map(|j| a_mat[i * m + j] * v[j]).sum() };
    for _ in 0..MAX_SWEEPS {
        for i in 0..m {
            match variant {
                Variant::Three => {
                    // q = A_ii x_i^2 + 2 x_i c_i + const
                    let c = off(i, &x);
                    x[i] = best_in_interval(c + c, diag(i), sign);
                    y[i] = x[i];
                }
                Variant::Four => {
                    let (xi, yi) = best_in_triangle(off(i, &y), off(i, &x), diag(i), sign);
                    x[i] = xi;
                    y[i] = yi;
                }
                Variant::Five => {
                    // terms in x_i: x_i (alpha - beta) + A_ii x_i (1 - x_i) + const
                    let alpha = off(i, &y);
                    let beta = off(i, &x);
                    x[i] = best_in_interval(alpha - beta + diag(i), -diag(i), sign);
                    y[i] = T::one() - x[i];
                }
                _ => unreachable!("fractional ascent only for variants three to five"),
            }
        }
        let v = sign * bilinear(a_mat, m, &x, &y);
        if v - cur <= T::lit(1e-15) * (T::one() + cur.abs()) {
            break;
        }
        cur = v;
    }
    (x, y)
}
