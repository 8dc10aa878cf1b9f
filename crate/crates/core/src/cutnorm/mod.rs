//! Cut norms of step kernels.
//!
//! All variants maximize the absolute value of the bilinear form
//! `sum_{i,j} p_i p_j K_ij f_i g_j` over a class of selector vectors:
//!
//! | variant | selectors                                   |
//! |---------|---------------------------------------------|
//! | one     | `f, g` indicators of part sets               |
//! | two     | `f, g` with values `±1`                      |
//! | three   | `f = g` indicator                            |
//! | four    | `f, g` indicators with disjoint support      |
//! | five    | `g = 1 - f`                                  |
//! | complex | `f, g` unit complex numbers                  |
//! | hilbert | `f, g` unit vectors in `R^d`, inner product  |
//!
//! The form is affine in each coordinate for variants one and two, so
//! vertex enumeration is exact. Variants three to five are exact on vertex
//! sets when the diagonal vanishes; with a nonzero diagonal on an atomless
//! layout the optimum may split parts, and the result is a flagged
//! lower bound from fractional coordinate ascent.

mod ascent;
mod checks;
mod complex;
pub(crate) mod exhaustive;
mod hilbert;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use checks::{check_norm_inequalities, InequalityCheck, NormReport};
pub use complex::cut_norm_complex;
pub use hilbert::cut_norm_hilbert;

use crate::error::{Error, Result};
use crate::kernels::StepKernel;
use crate::scalar::Scalar;

/// Largest part count handled by exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    One,
    Two,
    Three,
    Four,
    Five,
    Complex,
    Hilbert,
}

impl Variant {
    pub const SET_VARIANTS: [Variant; 5] = [Variant::One, Variant::Two, Variant::Three, Variant::Four, Variant::Five];

    fn is_vertex(self) -> bool {
        !matches!(self, Variant::Complex | Variant::Hilbert)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::One => "1",
            Variant::Two => "2",
            Variant::Three => "3",
            Variant::Four => "4",
            Variant::Five => "5",
            Variant::Complex => "c",
            Variant::Hilbert => "h",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1" | "one" => Variant::One,
            "2" | "two" => Variant::Two,
            "3" | "three" => Variant::Three,
            "4" | "four" => Variant::Four,
            "5" | "five" => Variant::Five,
            "c" | "complex" => Variant::Complex,
            "h" | "hilbert" => Variant::Hilbert,
            other => return Err(Error::InvalidArgument(format!("unknown cut norm variant '{other}'"))),
        })
    }
}

/// How the parts are read when sets may split them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartModel {
    /// Parts are intervals of an atomless space and may be split.
    #[default]
    Atomless,
    /// Parts are atoms; sets are unions of whole parts.
    Atoms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutWarning {
    /// Variant three to five requested with a nonzero diagonal on an
    /// atomless layout; the value is a lower bound from fractional ascent.
    NonzeroDiagonal,
    /// Too many parts for exhaustive enumeration; local search was used.
    LocalSearch,
}

impl CutWarning {
    pub fn code(self) -> &'static str {
        match self {
            CutWarning::NonzeroDiagonal => "nonzero-diagonal",
            CutWarning::LocalSearch => "local-search",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selectors<T> {
    Real { row: Vec<T>, col: Vec<T> },
    Complex { row: Vec<Complex<T>>, col: Vec<Complex<T>> },
    /// One unit vector per part.
    Hilbert { row: Vec<Vec<T>>, col: Vec<Vec<T>> },
}

/// Optimizer certificate: the maximizing selectors and the value they attain.
#[derive(Debug, Clone, PartialEq)]
pub struct CutWitness<T> {
    pub variant: Variant,
    pub value: T,
    pub selectors: Selectors<T>,
    /// Produced by exhaustive enumeration (a true maximum).
    pub exact: bool,
    pub warning: Option<CutWarning>,
}

impl<T: Scalar> CutWitness<T> {
    /// Re-evaluate `|sum p_i p_j K_ij <f_i, g_j>|` at the stored selectors.
    pub fn replay(&self, k: &StepKernel<T>) -> T {
        let a = k.weighted_matrix();
        let m = k.parts();
        match &self.selectors {
            Selectors::Real { row, col } => bilinear(&a, m, row, col).abs(),
            Selectors::Complex { row, col } => complex::form(&a, m, row, col).norm(),
            Selectors::Hilbert { row, col } => hilbert::form(&a, m, row, col).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutOptions {
    /// Random restarts for local search and the complex/Hilbert optimizers.
    pub restarts: usize,
    pub seed: u64,
    pub model: PartModel,
    /// Dimension for [`Variant::Hilbert`].
    pub hilbert_dim: usize,
    pub exhaustive_limit: usize,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            model: PartModel::Atomless,
            hilbert_dim: 2,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
        }
    }
}

/// `sum_{i,j} A_ij x_i y_j` for a row-major `m x m` matrix.
pub(crate) fn bilinear<T: Scalar>(a: &[T], m: usize, x: &[T], y: &[T]) -> T {
    let mut acc = T::zero();
    for i in 0..m {
        if x[i] == T::zero() {
            continue;
        }
        let row: T = a[i * m..(i + 1) * m].iter().zip(y).map(|(&v, &w)| v * w).sum();
        acc += x[i] * row;
    }
    acc
}

/// Cut norm with default options.
pub fn cut_norm<T: Scalar>(k: &StepKernel<T>, variant: Variant) -> CutWitness<T> {
    cut_norm_with(k, variant, &CutOptions::default())
}

/// Cut norm of `k` in the requested variant.
pub fn cut_norm_with<T: Scalar>(k: &StepKernel<T>, variant: Variant, opts: &CutOptions) -> CutWitness<T> {
    match variant {
        Variant::Complex => return cut_norm_complex(k, opts.restarts, opts.seed),
        Variant::Hilbert => {
            let d = opts.hilbert_dim.clamp(1, k.parts());
            return cut_norm_hilbert(k, d, opts.restarts, opts.seed).expect("dimension clamped into range");
        }
        _ => {}
    }
    debug_assert!(variant.is_vertex());
    let m = k.parts();
    let a = k.weighted_matrix();
    let exhaustive = m <= opts.exhaustive_limit;

    let (mut row, mut col) = if exhaustive {
        match variant {
            Variant::One => exhaustive::one(&a, m),
            Variant::Two => exhaustive::two(&a, m),
            Variant::Three => {
                let x = exhaustive::three(&a, m);
                (x.clone(), x)
            }
            Variant::Four => exhaustive::four(&a, m),
            Variant::Five => {
                let x = exhaustive::five(&a, m);
                let y = x.iter().map(|&v| T::one() - v).collect();
                (x, y)
            }
            _ => unreachable!(),
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        ascent::vertex_search(&a, m, variant, opts.restarts, &mut rng)
    };
    let mut exact = exhaustive;
    let mut warning = (!exhaustive).then_some(CutWarning::LocalSearch);

    let splits_matter = matches!(variant, Variant::Three | Variant::Four | Variant::Five);
    if splits_matter && opts.model == PartModel::Atomless && !k.diagonal_vanishes() {
        (row, col) = ascent::fractional_ascent(&a, m, variant, row, col);
        exact = false;
        warning = Some(CutWarning::NonzeroDiagonal);
    }

    if variant == Variant::Two && bilinear(&a, m, &row, &col) < T::zero() {
        row.iter_mut().for_each(|v| *v = -*v);
    }
    let value = bilinear(&a, m, &row, &col).abs();
    CutWitness {
        variant,
        value,
        selectors: Selectors::Real { row, col },
        exact,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(rows: Vec<Vec<f64>>) -> StepKernel<f64> {
        StepKernel::uniform(rows).unwrap()
    }

    /// Independent oracle: literal enumeration of every selector pair,
    /// including all `3^m` disjoint pairs for variant four.
    fn brute(k: &StepKernel<f64>, variant: Variant) -> f64 {
        let m = k.parts();
        let a = k.weighted_matrix();
        let form = |x: &[f64], y: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..m {
                    s += a[i * m + j] * x[i] * y[j];
                }
            }
            s.abs()
        };
        let ind = |mask: usize| -> Vec<f64> { (0..m).map(|i| (mask >> i & 1) as f64).collect() };
        let mut best = 0.0f64;
        match variant {
            Variant::One | Variant::Two => {
                for s in 0..1usize << m {
                    for t in 0..1usize << m {
                        let (mut x, mut y) = (ind(s), ind(t));
                        if variant == Variant::Two {
                            x.iter_mut().for_each(|v| *v = 2.0 * *v - 1.0);
                            y.iter_mut().for_each(|v| *v = 2.0 * *v - 1.0);
                        }
                        best = best.max(form(&x, &y));
                    }
                }
            }
            Variant::Three => {
                for s in 0..1usize << m {
                    best = best.max(form(&ind(s), &ind(s)));
                }
            }
            Variant::Four => {
                let total = 3usize.pow(m as u32);
                for code in 0..total {
                    let (mut x, mut y) = (vec![0.0; m], vec![0.0; m]);
                    let mut c = code;
                    for i in 0..m {
                        match c % 3 {
                            1 => x[i] = 1.0,
                            2 => y[i] = 1.0,
                            _ => {}
                        }
                        c /= 3;
                    }
                    best = best.max(form(&x, &y));
                }
            }
            Variant::Five => {
                for s in 0..1usize << m {
                    let x = ind(s);
                    let y: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
                    best = best.max(form(&x, &y));
                }
            }
            _ => unreachable!(),
        }
        best
    }

    fn lcg_kernel(seed: u64, m: usize, zero_diag: bool) -> StepKernel<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut w: Vec<f64> = (0..m).map(|_| 0.2 + next()).collect();
        let tot: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= tot);
        let fix = 1.0 - w[..m - 1].iter().sum::<f64>();
        w[m - 1] = fix;
        let mut v = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let x = if zero_diag && i == j { 0.0 } else { 2.0 * next() - 1.0 };
                v[i][j] = x;
                v[j][i] = x;
            }
        }
        StepKernel::new(w, v).unwrap()
    }

    #[test]
    fn exhaustive_matches_literal_enumeration() {
        for seed in 0..30 {
            let m = 1 + (seed as usize % 6);
            let k = lcg_kernel(seed, m, false);
            let opts = CutOptions {
                model: PartModel::Atoms,
                ..CutOptions::default()
            };
            for v in Variant::SET_VARIANTS {
                let w = cut_norm_with(&k, v, &opts);
                let b = brute(&k, v);
                assert!((w.value - b).abs() < 1e-12, "seed {seed} variant {v}: {} vs {b}", w.value);
                assert!((w.replay(&k) - w.value).abs() < 1e-12);
                assert!(w.exact);
            }
        }
    }

    #[test]
    fn best_possible_constant_matrices() {
        let k = uniform(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert!((cut_norm(&k, Variant::One).value - 0.25).abs() < 1e-15);
        assert!((cut_norm(&k, Variant::Two).value - 1.0).abs() < 1e-15);

        let k = uniform(vec![vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, -1.0]]);
        assert!((cut_norm(&k, Variant::One).value - 2.0 / 9.0).abs() < 1e-15);
        assert!((cut_norm(&k, Variant::Three).value - 1.0 / 9.0).abs() < 1e-15);

        let k = uniform(vec![vec![0.0, 3.0, -1.0], vec![3.0, 0.0, -1.0], vec![-1.0, -1.0, 0.0]]);
        let four = cut_norm(&k, Variant::Four);
        let five = cut_norm(&k, Variant::Five);
        assert!(four.exact && five.exact);
        assert!((four.value - 1.0 / 3.0).abs() < 1e-15);
        assert!((five.value - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn selector_shapes() {
        let k = lcg_kernel(7, 5, true);
        for v in Variant::SET_VARIANTS {
            let w = cut_norm(&k, v);
            let Selectors::Real { row, col } = &w.selectors else { panic!() };
            match v {
                Variant::Two => assert!(row.iter().chain(col).all(|x| x.abs() == 1.0)),
                Variant::Three => assert_eq!(row, col),
                Variant::Four => assert!(row.iter().zip(col).all(|(a, b)| a * b == 0.0)),
                Variant::Five => assert!(row.iter().zip(col).all(|(a, b)| a + b == 1.0)),
                _ => assert!(row.iter().chain(col).all(|x| *x == 0.0 || *x == 1.0)),
            }
        }
    }

    #[test]
    fn nonzero_diagonal_is_flagged_and_never_below_vertex_value() {
        for seed in 0..20 {
            let k = lcg_kernel(100 + seed, 4, false);
            for v in [Variant::Three, Variant::Four, Variant::Five] {
                let frac = cut_norm(&k, v);
                let atoms = cut_norm_with(
                    &k,
                    v,
                    &CutOptions {
                        model: PartModel::Atoms,
                        ..CutOptions::default()
                    },
                );
                assert!(!frac.exact);
                assert_eq!(frac.warning, Some(CutWarning::NonzeroDiagonal));
                assert!(frac.value >= atoms.value - 1e-15);
                assert!((frac.replay(&k) - frac.value).abs() < 1e-12);
                // fractional selectors never beat variant one
                assert!(frac.value <= cut_norm(&k, Variant::One).value + 1e-12);
            }
        }
    }

    #[test]
    fn fractional_split_beats_atoms() {
        // One atom of mass 1 with K = 1: vertex sets give cn4 = 0, while
        // splitting the interval in halves gives 1/4.
        let k = StepKernel::constant(1.0f64);
        let atoms = cut_norm_with(
            &k,
            Variant::Four,
            &CutOptions {
                model: PartModel::Atoms,
                ..CutOptions::default()
            },
        );
        assert_eq!(atoms.value, 0.0);
        let frac = cut_norm(&k, Variant::Four);
        assert!((frac.value - 0.25).abs() < 1e-15);
        let five = cut_norm(&k, Variant::Five);
        assert!((five.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn local_search_beyond_limit() {
        let k = lcg_kernel(3, 10, true);
        let opts = CutOptions {
            exhaustive_limit: 4,
            restarts: 20,
            ..CutOptions::default()
        };
        for v in Variant::SET_VARIANTS {
            let h = cut_norm_with(&k, v, &opts);
            let e = cut_norm(&k, v);
            assert!(!h.exact);
            assert_eq!(h.warning, Some(CutWarning::LocalSearch));
            assert!(h.value <= e.value + 1e-12);
            assert!(h.value >= 0.5 * e.value, "variant {v}: {} vs {}", h.value, e.value);
            assert!((h.replay(&k) - h.value).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_iff_zero_kernel() {
        let z = StepKernel::zeros(vec![0.25f64; 4]).unwrap();
        assert_eq!(cut_norm(&z, Variant::One).value, 0.0);
        assert_eq!(cut_norm(&z, Variant::Two).value, 0.0);
        for seed in 0..20 {
            let k = lcg_kernel(seed + 500, 1 + seed as usize % 4, false);
            assert!(cut_norm(&k, Variant::One).value > 0.0);
        }
    }

    #[test]
    fn parse_variants() {
        assert_eq!("3".parse::<Variant>().unwrap(), Variant::Three);
        assert_eq!("h".parse::<Variant>().unwrap(), Variant::Hilbert);
        assert!("7".parse::<Variant>().is_err());
    }
}
