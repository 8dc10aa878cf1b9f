use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cut_norm, CutWitness, Selectors, Variant};
use crate::error::{Error, Result};
use crate::kernels::StepKernel;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 10_000;
const STOP: f64 = 1e-12;

type Vectors<T> = Vec<Vec<T>>;

pub(crate) fn form<T: Scalar>(a: &[T], m: usize, f: &[Vec<T>], g: &[Vec<T>]) -> T {
    let mut acc = T::zero();
    for i in 0..m {
        for j in 0..m {
            let dot: T = f[i].iter().zip(&g[j]).map(|(&x, &y)| x * y).sum();
            acc += a[i * m + j] * dot;
        }
    }
    acc
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// For fixed `g`, each `f_i` is the normalized vector `sum_j A_ij g_j`.
fn best_response<T: Scalar>(a: &[T], m: usize, g: &[Vec<T>], f: &mut [Vec<T>]) -> T {
    let d = g[0].len();
    let mut total = T::zero();
    for i in 0..m {
        let mut v = vec![T::zero(); d];
        for j in 0..m {
            for (vk, &gk) in v.iter_mut().zip(&g[j]) {
                *vk += a[i * m + j] * gk;
            }
        }
        let n = norm(&v);
        if n > T::zero() {
            f[i] = v.into_iter().map(|x| x / n).collect();
        }
        total += n;
    }
    total
}

fn polish<T: Scalar>(a: &[T], m: usize, mut f: Vectors<T>, mut g: Vectors<T>) -> (T, Vectors<T>, Vectors<T>) {
    let mut prev = form(a, m, &f, &g);
    for _ in 0..MAX_SWEEPS {
        best_response(a, m, &g, &mut f);
        let v = best_response(a, m, &f, &mut g);
        if v - prev < T::lit(STOP) {
            prev = prev.max(v);
            break;
        }
        prev = v;
    }
    (prev, f, g)
}

fn random_unit<T: Scalar>(rng: &mut ChaCha8Rng, d: usize) -> Vec<T> {
    loop {
        let v: Vec<T> = (0..d).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let n = norm(&v);
        if n > T::lit(1e-3) {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Lower bound on the Hilbert-space cut norm with unit vectors in `R^d`.
///
/// Dimensions are solved in sequence `1, 2, ..., d`; each level starts from
/// the previous level's optimum padded with a zero coordinate plus
/// `restarts` random starts, so the value is nondecreasing in `d`. Level one
/// starts from the real optimum of variant two.
pub fn cut_norm_hilbert<T: Scalar>(k: &StepKernel<T>, d: usize, restarts: usize, seed: u64) -> Result<CutWitness<T>> {
    let m = k.parts();
    if d < 1 || d > m {
        return Err(Error::InvalidArgument(format!("dimension {d} outside 1..={m}")));
    }
    let a = k.weighted_matrix();
    let real = cut_norm(k, Variant::Two);
    let Selectors::Real { row, col } = &real.selectors else {
        unreachable!("variant two yields real selectors")
    };
    let lift = |v: &Vec<T>| v.iter().map(|&x| vec![x]).collect::<Vectors<T>>();
    let mut best = polish(&a, m, lift(row), lift(col));

    for level in 1..=d {
        if level > 1 {
            let pad = |vs: &Vectors<T>| {
                vs.iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w.push(T::zero());
                        w
                    })
                    .collect::<Vectors<T>>()
            };
            best = polish(&a, m, pad(&best.1), pad(&best.2));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..restarts {
            let f = (0..m).map(|_| random_unit(&mut rng, level)).collect();
            let g = (0..m).map(|_| random_unit(&mut rng, level)).collect();
            let cand = polish(&a, m, f, g);
            if cand.0 > best.0 {
                best = cand;
            }
        }
    }
    let (_, row, col) = best;
    let value = form(&a, m, &row, &col).abs();
    Ok(CutWitness {
        variant: Variant::Hilbert,
        value,
        selectors: Selectors::Hilbert { row, col },
        exact: false,
        warning: None,
    })
}
