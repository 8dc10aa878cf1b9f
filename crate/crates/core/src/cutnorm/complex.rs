use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cut_norm, CutWitness, Selectors, Variant};
use crate::kernels::StepKernel;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 10_000;
const STOP: f64 = 1e-12;

/// `sum_{i,j} A_ij f_i g_j` (no conjugation).
pub(crate) fn form<T: Scalar>(a: &[T], m: usize, f: &[Complex<T>], g: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..m {
        let mut row = Complex::new(T::zero(), T::zero());
        for j in 0..m {
            row += g[j] * a[i * m + j];
        }
        acc += f[i] * row;
    }
    acc
}

/// For fixed `g`, each `f_i` is the unit conjugate phase of `(A g)_i`.
fn best_response<T: Scalar>(a: &[T], m: usize, g: &[Complex<T>], f: &mut [Complex<T>]) -> T {
    let mut total = T::zero();
    for i in 0..m {
        let mut r = Complex::new(T::zero(), T::zero());
        for j in 0..m {
            r += g[j] * a[i * m + j];
        }
        let n = r.norm();
        if n > T::zero() {
            f[i] = r.conj() / n;
        }
        total += n;
    }
    total
}

fn polish<T: Scalar>(a: &[T], m: usize, mut f: Vec<Complex<T>>, mut g: Vec<Complex<T>>) -> (T, Vec<Complex<T>>, Vec<Complex<T>>) {
    let mut prev = form(a, m, &f, &g).norm();
    for _ in 0..MAX_SWEEPS {
        best_response(a, m, &g, &mut f);
        // A is symmetric, so the column response uses the same rule.
        let v = best_response(a, m, &f, &mut g);
        if v - prev < T::lit(STOP) {
            prev = prev.max(v);
            break;
        }
        prev = v;
    }
    (prev, f, g)
}

/// Lower bound on the complex cut norm by alternating phase maximization.
///
/// One start is the real optimum of variant two, so the result is never
/// below the real cut norm; `restarts` further starts use random phases.
pub fn cut_norm_complex<T: Scalar>(k: &StepKernel<T>, restarts: usize, seed: u64) -> CutWitness<T> {
    let m = k.parts();
    let a = k.weighted_matrix();
    let real = cut_norm(k, Variant::Two);
    let to_c = |v: &Vec<T>| v.iter().map(|&x| Complex::new(x, T::zero())).collect::<Vec<_>>();
    let super::Selectors::Real { row, col } = &real.selectors else {
        unreachable!("variant two yields real selectors")
    };
    let mut best = polish(&a, m, to_c(row), to_c(col));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = T::lit(std::f64::consts::TAU);
    for _ in 0..restarts {
        let mut phases = |_| Complex::from_polar(T::one(), T::lit(rng.gen::<f64>()) * tau);
        let f: Vec<_> = (0..m).map(&mut phases).collect();
        let g: Vec<_> = (0..m).map(&mut phases).collect();
        let cand = polish(&a, m, f, g);
        if cand.0 > best.0 {
            best = cand;
        }
    }
    let (_, row, col) = best;
    let value = form(&a, m, &row, &col).norm();
    CutWitness {
        variant: Variant::Complex,
        value,
        selectors: Selectors::Complex { row, col },
        exact: false,
        warning: None,
    }
}
