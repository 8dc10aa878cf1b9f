//! Twins, purification and equivalence of step kernels, composition
//! `W o W`, and the row metrics `r_W`, `r_{W o W}`.
//!
//! With `tol > 0` twin classes come from a union-find closure, so merges at
//! the tolerance boundary depend on the input order and the purified kernel
//! is not canonical. With exactly repeated rows (any `tol` below the gap to
//! the nearest distinct row) it is.

use crate::error::{Error, Result};
use crate::kernels::{FiniteMPMap, StepKernel};
use crate::scalar::Scalar;

/// Default tolerance for twin detection and equivalence.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest purified size searched by [`equivalent`].
pub const EQUIVALENCE_LIMIT: usize = 12;

/// `sum_j p_j |W_ij - W_kj|`.
pub fn row_distance<T: Scalar>(w: &StepKernel<T>, i: usize, k: usize) -> T {
    w.weights()
        .iter()
        .zip(w.row(i).iter().zip(w.row(k)))
        .map(|(&p, (&a, &b))| p * (a - b).abs())
        .sum()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

/// Twin classes: transitive closure of `row_distance <= tol`, each class
/// sorted, classes ordered by their smallest part.
pub fn twins<T: Scalar>(w: &StepKernel<T>, tol: T) -> Vec<Vec<usize>> {
    let m = w.parts();
    let mut uf = UnionFind::new(m);
    for i in 0..m {
        for k in i + 1..m {
            if row_distance(w, i, k) <= tol {
                uf.union(i, k);
            }
        }
    }
    uf.classes()
}

/// Split a chained class so every part lies within `tol` of its leader.
fn split_wide<T: Scalar>(w: &StepKernel<T>, class: Vec<usize>, tol: T) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for x in class {
        match groups.iter_mut().find(|g| row_distance(w, g[0], x) <= tol) {
            Some(g) => g.push(x),
            None => groups.push(vec![x]),
        }
    }
    groups
}

fn quotient<T: Scalar>(w: &StepKernel<T>, classes: &[Vec<usize>]) -> Result<StepKernel<T>> {
    let weights: Vec<T> = classes.iter().map(|c| c.iter().map(|&i| w.weights()[i]).sum()).collect();
    let r = classes.len();
    let mut values = Vec::with_capacity(r * r);
    for (a, ca) in classes.iter().enumerate() {
        for (b, cb) in classes.iter().enumerate() {
            let first = w.value(ca[0], cb[0]);
            let constant = ca.iter().all(|&i| cb.iter().all(|&j| w.value(i, j) == first));
            values.push(if constant {
                first
            } else {
                let mass: T = ca
                    .iter()
                    .flat_map(|&i| cb.iter().map(move |&j| w.weights()[i] * w.weights()[j] * w.value(i, j)))
                    .sum();
                mass / (weights[a] * weights[b])
            });
        }
    }
    StepKernel::from_flat(weights, values)
}

/// A twin-free kernel equivalent to the input, with the map collapsing the
/// input parts onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification<T> {
    pub pure: StepKernel<T>,
    pub quotient_map: FiniteMPMap<T>,
    /// Input parts merged into each pure part.
    pub classes: Vec<Vec<usize>>,
}

/// Merge twin classes into single parts.
///
/// Block values are exact where the block is constant and weighted averages
/// otherwise. Classes whose closure chained parts further than `tol` apart
/// are split first; if averaging then brings two pure rows within `tol`,
/// those parts are merged in further rounds, so the output always has
/// pairwise row distances above `tol` and purifying it again is a no-op.
pub fn purify<T: Scalar>(w: &StepKernel<T>, tol: T) -> Result<Purification<T>> {
    let mut classes: Vec<Vec<usize>> = twins(w, tol)
        .into_iter()
        .flat_map(|c| split_wide(w, c, tol))
        .collect();
    classes.sort_by_key(|c| c[0]);
    let mut pure = quotient(w, &classes)?;
    loop {
        let merged = twins(&pure, tol);
        if merged.len() == classes.len() {
            break;
        }
        let mut next: Vec<Vec<usize>> = merged
            .iter()
            .map(|g| {
                let mut c: Vec<usize> = g.iter().flat_map(|&a| classes[a].iter().copied()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        next.sort_by_key(|c| c[0]);
        classes = next;
        pure = quotient(w, &classes)?;
    }
    let mut map = vec![0; w.parts()];
    for (a, c) in classes.iter().enumerate() {
        for &i in c {
            map[i] = a;
        }
    }
    let quotient_map = FiniteMPMap::new(w.weights().to_vec(), pure.weights().to_vec(), map)?;
    Ok(Purification {
        pure,
        quotient_map,
        classes,
    })
}

/// Why two kernels are not equivalent.
#[derive(Debug, Clone, PartialEq)]
pub enum Distinction<T> {
    /// `int W1^k != int W2^k`.
    Moment { k: u32, first: T, second: T },
    /// Sorted pure part weights differ.
    Weights { first: Vec<T>, second: Vec<T> },
    /// Same invariants, but no weight- and value-preserving bijection of the
    /// pure parts exists.
    NoBijection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Equivalence<T> {
    /// Pure part `i` of the first kernel corresponds to pure part
    /// `bijection[i]` of the second.
    Equivalent { bijection: Vec<usize> },
    Distinct(Distinction<T>),
    /// A purified kernel exceeds [`EQUIVALENCE_LIMIT`] parts.
    Undecided { parts: (usize, usize) },
}

impl<T> Equivalence<T> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

fn sorted<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn signature<T: Scalar>(w: &StepKernel<T>, i: usize) -> (T, Vec<T>) {
    (w.weights()[i], sorted(w.row(i).to_vec()))
}

fn close<T: Scalar>(a: &[T], b: &[T], tol: T) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= tol)
}

struct Search<'a, T> {
    a: &'a StepKernel<T>,
    b: &'a StepKernel<T>,
    candidates: Vec<Vec<usize>>,
    tol: T,
}

impl<T: Scalar> Search<'_, T> {
    fn extend(&self, pi: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = pi.len();
        if i == self.a.parts() {
            return true;
        }
        for &j in &self.candidates[i] {
            if used[j] {
                continue;
            }
            let fits = (self.a.value(i, i) - self.b.value(j, j)).abs() <= self.tol
                && (0..i).all(|k| (self.a.value(i, k) - self.b.value(j, pi[k])).abs() <= self.tol);
            if !fits {
                continue;
            }
            used[j] = true;
            pi.push(j);
            if self.extend(pi, used) {
                return true;
            }
            pi.pop();
            used[j] = false;
        }
        false
    }
}

/// Decide whether two kernels are equivalent: purify both and search for a
/// bijection of pure parts preserving weights and values within `tol`.
pub fn equivalent<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>, tol: T) -> Result<Equivalence<T>> {
    if !(tol >= T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be nonnegative")));
    }
    for k in 1..=4 {
        let (a, b) = (w1.moment(k)?, w2.moment(k)?);
        if (a - b).abs() > tol {
            return Ok(Equivalence::Distinct(Distinction::Moment { k, first: a, second: b }));
        }
    }
    let (p1, p2) = (purify(w1, tol)?.pure, purify(w2, tol)?.pure);
    let (s1, s2) = (sorted(p1.weights().to_vec()), sorted(p2.weights().to_vec()));
    if !close(&s1, &s2, tol) {
        return Ok(Equivalence::Distinct(Distinction::Weights { first: s1, second: s2 }));
    }
    let m = p1.parts();
    if m > EQUIVALENCE_LIMIT {
        return Ok(Equivalence::Undecided { parts: (m, p2.parts()) });
    }
    let sig2: Vec<_> = (0..m).map(|j| signature(&p2, j)).collect();
    let candidates = (0..m)
        .map(|i| {
            let (w, row) = signature(&p1, i);
            (0..m)
                .filter(|&j| (w - sig2[j].0).abs() <= tol && close(&row, &sig2[j].1, tol))
                .collect()
        })
        .collect();
    let search = Search {
        a: &p1,
        b: &p2,
        candidates,
        tol,
    };
    let mut pi = Vec::with_capacity(m);
    let mut used = vec![false; m];
    Ok(if search.extend(&mut pi, &mut used) {
        Equivalence::Equivalent { bijection: pi }
    } else {
        Equivalence::Distinct(Distinction::NoBijection)
    })
}

/// `(W o W)(x, y) = int W(x, u) W(u, y) du`: values `V D V`.
pub fn compose<T: Scalar>(w: &StepKernel<T>) -> StepKernel<T> {
    let m = w.parts();
    let p = w.weights();
    let mut values = vec![T::zero(); m * m];
    for i in 0..m {
        for k in 0..m {
            values[i * m + k] = (0..m).map(|j| w.value(i, j) * p[j] * w.value(j, k)).sum();
        }
    }
    StepKernel::from_flat(p.to_vec(), values).expect("same partition")
}

fn row_metric<T: Scalar>(w: &StepKernel<T>) -> Vec<Vec<T>> {
    let m = w.parts();
    (0..m).map(|i| (0..m).map(|k| row_distance(w, i, k)).collect()).collect()
}

/// The part-level row metrics `r_W` and `r_{W o W}`.
pub fn r_metrics<T: Scalar>(w: &StepKernel<T>) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    (row_metric(w), row_metric(&compose(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutdist::{coupling_cut_norm, Coupling, DistanceNorm};
    use crate::kernels::{builtin, graphon_from_graph, pullback, Builtin, Discretization, GraphFlavor, SimpleGraph};

    fn lcg_graphon(seed: u64, m: usize) -> StepKernel<f64> {
        let mut s = seed ^ 0x5555;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let w: Vec<f64> = (0..m).map(|_| 0.1 + next()).collect();
        let tot: f64 = w.iter().sum();
        let vals = (0..m).map(|_| (0..m).map(|_| next()).collect()).collect();
        StepKernel::new(w.iter().map(|x| x / tot).collect(), vals).unwrap()
    }

    fn quotient_coupling(w: &StepKernel<f64>, p: &Purification<f64>) -> Coupling<f64> {
        let mut c = vec![vec![0.0; p.pure.parts()]; w.parts()];
        for (i, &a) in p.quotient_map.map().iter().enumerate() {
            c[i][a] = w.weights()[i];
        }
        Coupling::new(c).unwrap()
    }

    #[test]
    fn twin_classes() {
        let w = lcg_graphon(1, 3);
        let phi = FiniteMPMap::uniform_refinement(w.weights().to_vec(), 2).unwrap();
        let pb = pullback(&w, &phi).unwrap();
        assert_eq!(twins(&pb, 0.0), vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        let k3 = graphon_from_graph::<f64>(&SimpleGraph::complete(3), GraphFlavor::Vertex).unwrap();
        assert_eq!(twins(&k3, 1e-9), vec![vec![0], vec![1], vec![2]]);
        let c = StepKernel::uniform(vec![vec![0.4; 4]; 4]).unwrap();
        assert_eq!(twins(&c, 0.0), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn purify_collapses_pullbacks() {
        let w = lcg_graphon(2, 3);
        let phi = FiniteMPMap::uniform_refinement(w.weights().to_vec(), 3).unwrap();
        let pb = pullback(&w, &phi).unwrap();
        let p = purify(&pb, 1e-9).unwrap();
        assert_eq!(p.pure.parts(), 3);
        assert_eq!(p.pure.to_rows(), w.to_rows());
        let back = pullback(&p.pure, &p.quotient_map).unwrap();
        assert_eq!(back.values(), pb.values());
        let c = quotient_coupling(&pb, &p);
        assert_eq!(coupling_cut_norm(&pb, &p.pure, &c, DistanceNorm::default()).unwrap(), 0.0);
        let again = purify(&p.pure, 1e-9).unwrap();
        assert_eq!(again.pure, p.pure);
    }

    #[test]
    fn chained_tolerance_classes_are_split() {
        // rows 0.0, 0.6, 1.2 apart by 0.6 each: the closure at tol 0.7 chains all three
        let w = StepKernel::uniform(vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]])
            .unwrap()
            .add(&StepKernel::uniform(vec![vec![0.0, 0.6, 1.2], vec![0.6, 0.6, 1.2], vec![1.2, 1.2, 1.2]]).unwrap())
            .unwrap();
        let tol = 0.5;
        assert_eq!(twins(&w, tol).len(), 1);
        let p = purify(&w, tol).unwrap();
        let (rw, _) = r_metrics(&p.pure);
        for i in 0..p.pure.parts() {
            for k in 0..i {
                assert!(rw[i][k] > tol);
            }
        }
        assert_eq!(purify(&p.pure, tol).unwrap().pure, p.pure);
    }

    #[test]
    fn equivalence_decisions() {
        let w = lcg_graphon(3, 4);
        let phi = FiniteMPMap::uniform_refinement(w.weights().to_vec(), 2).unwrap();
        let pb = pullback(&w, &phi).unwrap();
        let Equivalence::Equivalent { bijection } = equivalent(&w, &pb, 1e-9).unwrap() else {
            panic!("pull-back must be equivalent")
        };
        assert_eq!(bijection, vec![0, 1, 2, 3]);

        let half = StepKernel::constant(0.5f64);
        let bip = builtin::<f64>(Builtin::Bipartite, 2, Discretization::Midpoint).unwrap();
        match equivalent(&half, &bip, 1e-9).unwrap() {
            Equivalence::Distinct(Distinction::Moment { k: 2, first, second }) => {
                assert_eq!((first, second), (0.25, 0.5));
            }
            other => panic!("{other:?}"),
        }

        let mut rows = w.to_rows();
        rows[1][2] += 0.1;
        rows[2][1] += 0.1;
        let bumped = StepKernel::new(w.weights().to_vec(), rows).unwrap();
        assert!(!equivalent(&w, &bumped, 1e-9).unwrap().is_equivalent());

        let big = lcg_graphon(4, 13);
        assert_eq!(equivalent(&big, &big, 1e-9).unwrap(), Equivalence::Undecided { parts: (13, 13) });
    }

    #[test]
    fn same_invariants_without_bijection() {
        // two 0/1 graphs on 6 vertices with equal degree sequences, not isomorphic:
        // two triangles vs a 6-cycle
        let a = SimpleGraph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let b = SimpleGraph::cycle(6);
        let wa = graphon_from_graph::<f64>(&a, GraphFlavor::Vertex).unwrap();
        let wb = graphon_from_graph::<f64>(&b, GraphFlavor::Vertex).unwrap();
        assert_eq!(equivalent(&wa, &wb, 1e-9).unwrap(), Equivalence::Distinct(Distinction::NoBijection));
    }

    #[test]
    fn composition_and_metrics() {
        let c = compose(&StepKernel::constant(0.3f64));
        assert!((c.value(0, 0) - 0.09).abs() < 1e-15);
        let bip = builtin::<f64>(Builtin::Bipartite, 2, Discretization::Midpoint).unwrap();
        assert_eq!(compose(&bip).to_rows(), vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
        let (rw, rww) = r_metrics(&StepKernel::uniform(vec![vec![0.2; 3]; 3]).unwrap());
        assert!(rw.iter().chain(&rww).flatten().all(|&x| x == 0.0));
        for seed in 0..20 {
            let w = lcg_graphon(seed, 1 + seed as usize % 6);
            let m = w.parts();
            let (rw, rww) = r_metrics(&w);
            for i in 0..m {
                assert_eq!(rw[i][i], 0.0);
                for k in 0..m {
                    assert!(rww[i][k] <= rw[i][k] + 1e-12);
                    assert_eq!(rw[i][k], rw[k][i]);
                    for l in 0..m {
                        assert!(rw[i][k] <= rw[i][l] + rw[l][k] + 1e-12);
                        assert!(rww[i][k] <= rww[i][l] + rww[l][k] + 1e-12);
                    }
                }
            }
            // trace of (VD)^2 equals sum_i p_i (W o W)_ii
            let wow = compose(&w);
            let tr: f64 = (0..m).map(|i| w.weights()[i] * wow.value(i, i)).sum();
            assert!((tr - w.moment(2).unwrap()).abs() < 1e-12);
        }
    }
}
