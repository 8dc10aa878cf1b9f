//! Cut and L1 distances between step kernels.
//!
//! Any coupling of the two part sets gives an upper bound through the
//! refined difference kernel. The searched bound equalizes both kernels onto
//! a grid of `m` equal cells and minimizes over cell permutations; the
//! equalization errors are added so the result bounds the true distance.
//! Lower bounds come from homomorphism densities.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cutnorm::{cut_norm, Variant};
use crate::error::{Error, Result};
use crate::homdensity::{default_probes, hom_density};
use crate::kernels::{equalize, equalize_overlaps, MultiGraph, StepKernel};
use crate::scalar::Scalar;

/// Largest grid searched over all `m!` permutations.
pub const EXHAUSTIVE_PERMUTATIONS: usize = 8;
/// Cap on the default grid size.
pub const DEFAULT_GRID_CAP: usize = 12;

const MARGINAL_TOL: f64 = 1e-10;

/// Nonnegative `rows x cols` matrix; a coupling of two weight vectors when
/// its row and column sums match them.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    rows: usize,
    cols: usize,
    mass: Vec<T>,
}

impl<T: Scalar> Coupling<T> {
    pub fn new(mass: Vec<Vec<T>>) -> Result<Self> {
        let rows = mass.len();
        let cols = mass.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || mass.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("coupling must be a nonempty rectangular matrix".into()));
        }
        if mass.iter().flatten().any(|c| !c.is_finite() || *c < T::zero()) {
            return Err(Error::InvalidInput("coupling entries must be finite and nonnegative".into()));
        }
        Ok(Self {
            rows,
            cols,
            mass: mass.into_iter().flatten().collect(),
        })
    }

    /// `diag(weights)`: every part coupled with itself.
    pub fn identity(weights: &[T]) -> Self {
        let m = weights.len();
        let mut mass = vec![T::zero(); m * m];
        for (i, &p) in weights.iter().enumerate() {
            mass[i * m + i] = p;
        }
        Self { rows: m, cols: m, mass }
    }

    /// Independent coupling `p_i q_j`.
    pub fn product(p: &[T], q: &[T]) -> Self {
        let mass = p.iter().flat_map(|&a| q.iter().map(move |&b| a * b)).collect();
        Self {
            rows: p.len(),
            cols: q.len(),
            mass,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.mass[i * self.cols + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.mass.chunks(self.cols).map(<[T]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.mass.chunks(self.cols).map(|r| r.iter().copied().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Checks the marginals against `p` (rows) and `q` (columns).
    pub fn check_marginals(&self, p: &[T], q: &[T]) -> Result<()> {
        if (self.rows, self.cols) != (p.len(), q.len()) {
            return Err(Error::MarginalMismatch(format!(
                "coupling is {}x{}, kernels have {} and {} parts",
                self.rows,
                self.cols,
                p.len(),
                q.len()
            )));
        }
        let tol = T::lit(MARGINAL_TOL);
        for (side, sums, target) in [("row", self.row_sums(), p), ("column", self.col_sums(), q)] {
            for (i, (a, b)) in sums.iter().zip(target).enumerate() {
                if (*a - *b).abs() > tol {
                    return Err(Error::MarginalMismatch(format!("{side} {i} sums to {a}, expected {b}")));
                }
            }
        }
        Ok(())
    }
}

/// Objective for coupling and permutation bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceNorm {
    Cut(Variant),
    L1,
}

impl Default for DistanceNorm {
    fn default() -> Self {
        DistanceNorm::Cut(Variant::One)
    }
}

fn norm_of<T: Scalar>(k: &StepKernel<T>, norm: DistanceNorm) -> T {
    match norm {
        DistanceNorm::Cut(v) => cut_norm(k, v).value,
        DistanceNorm::L1 => k.l1_norm(),
    }
}

/// The difference `W1(x,y) - W2(x',y')` read on the cells `(i, j)` of
/// positive coupling mass.
pub fn coupled_difference<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>, c: &Coupling<T>) -> Result<StepKernel<T>> {
    c.check_marginals(w1.weights(), w2.weights())?;
    let cells: Vec<(usize, usize)> = (0..c.rows)
        .flat_map(|i| (0..c.cols).map(move |j| (i, j)))
        .filter(|&(i, j)| c.get(i, j) > T::zero())
        .collect();
    let total: T = cells.iter().map(|&(i, j)| c.get(i, j)).sum();
    let weights = cells.iter().map(|&(i, j)| c.get(i, j) / total).collect();
    let mut values = Vec::with_capacity(cells.len() * cells.len());
    for &(i, j) in &cells {
        for &(k, l) in &cells {
            values.push(w1.value(i, k) - w2.value(j, l));
        }
    }
    StepKernel::from_flat(weights, values)
}

/// Norm of the difference of `w1` and `w2` under the coupling `c`.
pub fn coupling_cut_norm<T: Scalar>(
    w1: &StepKernel<T>,
    w2: &StepKernel<T>,
    c: &Coupling<T>,
    norm: DistanceNorm,
) -> Result<T> {
    Ok(norm_of(&coupled_difference(w1, w2, c)?, norm))
}

/// Lower and upper bounds on a distance, with the permutation of grid cells
/// that attains the upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBracket<T> {
    pub lower: T,
    pub upper: T,
    /// Grid size used for the permutation search.
    pub m: usize,
    /// Cell `a` of the first kernel's grid is matched with cell
    /// `permutation[a]` of the second's.
    pub permutation: Vec<usize>,
    pub equalize_errors: (T, T),
    /// Probe graph attaining the density lower bound, if it was positive.
    pub lower_probe: Option<MultiGraph>,
    /// Whether every permutation was tried.
    pub exhaustive: bool,
}

impl<T: Scalar> DistanceBracket<T> {
    /// The coupling of the original part sets induced by the grid layouts
    /// and the permutation.
    pub fn coupling(&self, w1: &StepKernel<T>, w2: &StepKernel<T>) -> Coupling<T> {
        let o1 = equalize_overlaps(w1.weights(), self.m);
        let o2 = equalize_overlaps(w2.weights(), self.m);
        let mf = T::from_usize(self.m).unwrap();
        let mut mass = vec![T::zero(); w1.parts() * w2.parts()];
        for i in 0..w1.parts() {
            for j in 0..w2.parts() {
                mass[i * w2.parts() + j] = (0..self.m)
                    .map(|a| o1[i][a] * o2[j][self.permutation[a]] * mf)
                    .sum();
            }
        }
        Coupling {
            rows: w1.parts(),
            cols: w2.parts(),
            mass,
        }
    }
}

/// Settings for [`cut_distance`] and [`l1_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOptions {
    /// Grid size; `None` picks [`default_grid`].
    pub m: Option<usize>,
    /// Random restarts of the transposition search beyond the exhaustive size.
    pub budget: usize,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            m: None,
            budget: 8,
            seed: 0,
            variant: Variant::One,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest grid in `max_parts..=12` on which both kernels equalize without
/// error, else `lcm` of the part counts capped at 12, never below the larger
/// part count.
pub fn default_grid<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>) -> usize {
    let lo = w1.parts().max(w2.parts());
    let exact = |m: usize| {
        [w1, w2]
            .iter()
            .all(|w| equalize(w, m).is_ok_and(|(_, e)| e == T::zero()))
    };
    if let Some(m) = (lo..=DEFAULT_GRID_CAP).find(|&m| exact(m)) {
        return m;
    }
    let (a, b) = (w1.parts(), w2.parts());
    (a / gcd(a, b) * b).min(DEFAULT_GRID_CAP).max(lo)
}

fn permuted_difference<T: Scalar>(a: &StepKernel<T>, b: &StepKernel<T>, perm: &[usize]) -> StepKernel<T> {
    let m = perm.len();
    let mut values = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            values.push(a.value(i, j) - b.value(perm[i], perm[j]));
        }
    }
    StepKernel::from_flat(a.weights().to_vec(), values).expect("same uniform grid")
}

fn better<T: Scalar>(x: &(T, Vec<usize>), y: &(T, Vec<usize>)) -> Ordering {
    x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal).then_with(|| x.1.cmp(&y.1))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn all_permutations<T: Scalar>(eval: &(impl Fn(&[usize]) -> T + Sync), m: usize) -> (T, Vec<usize>) {
    (0..m)
        .into_par_iter()
        .map(|first| {
            let mut p: Vec<usize> = std::iter::once(first).chain((0..m).filter(|&x| x != first)).collect();
            let mut best = (eval(&p), p.clone());
            while next_permutation(&mut p[1..]) {
                let cand = (eval(&p), p.clone());
                if better(&cand, &best) == Ordering::Less {
                    best = cand;
                }
            }
            best
        })
        .reduce_with(|a, b| if better(&b, &a) == Ordering::Less { b } else { a })
        .unwrap()
}

/// Best-improvement descent over transpositions.
fn descend<T: Scalar>(eval: &impl Fn(&[usize]) -> T, mut p: Vec<usize>) -> (T, Vec<usize>) {
    let m = p.len();
    let mut cur = eval(&p);
    loop {
        let mut best: Option<(T, usize, usize)> = None;
        for i in 0..m {
            for j in i + 1..m {
                p.swap(i, j);
                let v = eval(&p);
                p.swap(i, j);
                if v < cur && best.is_none_or(|b| v < b.0) {
                    best = Some((v, i, j));
                }
            }
        }
        match best {
            Some((v, i, j)) => {
                p.swap(i, j);
                cur = v;
            }
            None => return (cur, p),
        }
    }
}

fn local_permutations<T: Scalar>(eval: &(impl Fn(&[usize]) -> T + Sync), m: usize, budget: usize, seed: u64) -> (T, Vec<usize>) {
    (0..=budget as u64)
        .into_par_iter()
        .map(|r| {
            let mut p: Vec<usize> = (0..m).collect();
            if r > 0 {
                p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ r));
            }
            descend(eval, p)
        })
        .reduce_with(|a, b| if better(&b, &a) == Ordering::Less { b } else { a })
        .unwrap()
}

/// `max_F |t(F,W1) - t(F,W2)| / |E(F)|` over simple probes, with the probe
/// attaining it.
pub fn hom_lower_bound<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>, probes: &[MultiGraph]) -> Result<(T, MultiGraph)> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probe graphs given".into()));
    }
    if let Some(f) = probes.iter().find(|f| !f.is_simple()) {
        return Err(Error::InvalidArgument(format!(
            "probe with {} vertices has parallel edges; densities of multigraphs are not cut-continuous",
            f.vertex_count()
        )));
    }
    let mut best = (T::zero(), probes[0].clone());
    for f in probes.iter().filter(|f| f.edge_count() > 0) {
        let e = T::from_usize(f.edge_count()).unwrap();
        let gap = (hom_density(f, w1)? - hom_density(f, w2)?).abs() / e;
        if gap > best.0 {
            best = (gap, f.clone());
        }
    }
    Ok(best)
}

fn in_unit_interval<T: Scalar>(w: &StepKernel<T>) -> bool {
    w.values().iter().all(|&v| v >= T::zero() && v <= T::one())
}

fn bracket<T: Scalar>(
    w1: &StepKernel<T>,
    w2: &StepKernel<T>,
    opts: &DistanceOptions,
    norm: DistanceNorm,
    lower: (T, Option<MultiGraph>),
) -> Result<DistanceBracket<T>> {
    let m = opts.m.unwrap_or_else(|| default_grid(w1, w2));
    let (a, e1) = equalize(w1, m)?;
    let (b, e2) = equalize(w2, m)?;
    let eval = |p: &[usize]| norm_of(&permuted_difference(&a, &b, p), norm);
    let exhaustive = m <= EXHAUSTIVE_PERMUTATIONS;
    let (best, permutation) = if exhaustive {
        all_permutations(&eval, m)
    } else {
        local_permutations(&eval, m, opts.budget, opts.seed)
    };
    let upper = best + e1 + e2;
    let (lower, lower_probe) = lower;
    Ok(DistanceBracket {
        lower: lower.min(upper),
        upper,
        m,
        permutation,
        equalize_errors: (e1, e2),
        lower_probe,
        exhaustive,
    })
}

/// Bracket on the cut distance of `w1` and `w2`.
///
/// For kernels with values in `[0,1]` the lower bound uses all connected
/// probes on at most four vertices; otherwise only `|int W1 - int W2|`.
pub fn cut_distance<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>, opts: &DistanceOptions) -> Result<DistanceBracket<T>> {
    let probes = if in_unit_interval(w1) && in_unit_interval(w2) {
        default_probes()
    } else {
        vec![MultiGraph::parallel(1)]
    };
    let (lo, probe) = hom_lower_bound(w1, w2, &probes)?;
    let probe = (lo > T::zero()).then_some(probe);
    bracket(w1, w2, opts, DistanceNorm::Cut(opts.variant), (lo, probe))
}

/// Bracket on the L1 distance of `w1` and `w2`.
pub fn l1_distance<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>, opts: &DistanceOptions) -> Result<DistanceBracket<T>> {
    let lo = (w1.moment(1)? - w2.moment(1)?).abs();
    bracket(w1, w2, opts, DistanceNorm::L1, (lo, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{pullback, FiniteMPMap};

    fn bad_discrete() -> (StepKernel<f64>, StepKernel<f64>) {
        let p = vec![0.4, 0.6];
        let w1 = StepKernel::new(p.clone(), vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let w2 = StepKernel::new(p, vec![vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        (w1, w2)
    }

    fn lcg_uniform(seed: u64, m: usize) -> StepKernel<f64> {
        let mut s = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        StepKernel::uniform((0..m).map(|_| (0..m).map(|_| next()).collect()).collect()).unwrap()
    }

    #[test]
    fn two_point_coupling() {
        let (w1, w2) = bad_discrete();
        let c = Coupling::new(vec![vec![0.0, 0.4], vec![0.4, 0.2]]).unwrap();
        let cut = DistanceNorm::default();
        assert!((coupling_cut_norm(&w1, &w2, &c, cut).unwrap() - 0.2).abs() < 1e-12);
        let id = Coupling::identity(w1.weights());
        assert!((coupling_cut_norm(&w1, &w2, &id, cut).unwrap() - 0.36).abs() < 1e-12);
        let same = coupling_cut_norm(&w1, &w1, &id, cut).unwrap();
        assert_eq!(same, 0.0);
        let bad = Coupling::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(matches!(coupling_cut_norm(&w1, &w2, &bad, cut), Err(Error::MarginalMismatch(_))));
    }

    #[test]
    fn two_point_distance_on_ten_cells() {
        let (w1, w2) = bad_discrete();
        let opts = DistanceOptions {
            m: Some(10),
            ..Default::default()
        };
        let b = cut_distance(&w1, &w2, &opts).unwrap();
        assert!(b.upper <= 0.2 + 1e-9, "{}", b.upper);
        assert!(b.lower <= 0.2 + 1e-9);
        let c = b.coupling(&w1, &w2);
        c.check_marginals(w1.weights(), w2.weights()).unwrap();
        let via = coupling_cut_norm(&w1, &w2, &c, DistanceNorm::default()).unwrap();
        assert!(via <= b.upper + 1e-12);
    }

    #[test]
    fn constants() {
        let (p, q) = (StepKernel::constant(0.3f64), StepKernel::constant(0.8));
        let b = cut_distance(&p, &q, &DistanceOptions::default()).unwrap();
        assert!((b.lower - 0.5).abs() < 1e-12 && (b.upper - 0.5).abs() < 1e-12);
        let l = l1_distance(&p, &q, &DistanceOptions::default()).unwrap();
        assert!((l.lower - 0.5).abs() < 1e-12 && (l.upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pullbacks_are_at_distance_zero() {
        for seed in 0..5 {
            let w = lcg_uniform(seed, 3);
            let phi = FiniteMPMap::uniform_refinement(w.weights().to_vec(), 2).unwrap();
            let pb = pullback(&w, &phi).unwrap();
            let b = cut_distance(&w, &pb, &DistanceOptions::default()).unwrap();
            assert_eq!(b.m, 6);
            assert!(b.upper.abs() < 1e-12 && b.lower.abs() < 1e-12);
            let perm = FiniteMPMap::permutation(w.weights().to_vec(), vec![2, 0, 1]).unwrap();
            let shuffled = pullback(&w, &perm).unwrap();
            assert!(l1_distance(&w, &shuffled, &DistanceOptions::default()).unwrap().upper < 1e-12);
        }
    }

    #[test]
    fn hom_bound() {
        let (z, h) = (StepKernel::constant(0.0f64), StepKernel::constant(0.5));
        let (v, f) = hom_lower_bound(&z, &h, &[MultiGraph::parallel(1)]).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(f, MultiGraph::parallel(1));
        assert_eq!(hom_lower_bound(&h, &h, &default_probes()).unwrap().0, 0.0);
        assert!(hom_lower_bound(&z, &h, &[MultiGraph::parallel(2)]).is_err());
        assert!(hom_lower_bound(&z, &h, &[]).is_err());
    }

    #[test]
    fn default_grid_choice() {
        let (w1, w2) = bad_discrete();
        assert_eq!(default_grid(&w1, &w2), 5);
        let rows = vec![vec![1.0, 0.0], vec![0.0, 0.5]];
        let a = StepKernel::new(vec![1.0 / 3.0, 2.0 / 3.0], rows.clone()).unwrap();
        let b = StepKernel::new(vec![0.5, 0.5], rows.clone()).unwrap();
        assert_eq!(default_grid(&a, &b), 6);
        let c = StepKernel::new(vec![0.123, 0.877], rows).unwrap();
        assert_eq!(default_grid(&c, &StepKernel::constant(0.0)), 2);
    }

    #[test]
    fn rejects_coarse_grid() {
        let w = lcg_uniform(1, 4);
        let opts = DistanceOptions {
            m: Some(3),
            ..Default::default()
        };
        assert!(cut_distance(&w, &w, &opts).is_err());
    }

    #[test]
    fn permutation_enumeration_counts() {
        let mut p = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }
}
