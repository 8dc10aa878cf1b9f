//! Step kernels and step graphons on finite part sets.
//!
//! A [`StepKernel`] is a symmetric function that is constant on the blocks
//! `A_i x A_j` of a finite partition whose parts carry positive masses
//! summing to one. Every other module in the crate works on this type.

mod builtin;
mod equalize;
mod graph;
mod mpmap;

use std::ops::Deref;

pub use builtin::{builtin, Builtin, Discretization};
pub use equalize::{equalize, equalize_overlaps};
pub use graph::{MultiGraph, SimpleGraph};
pub use mpmap::{pullback, FiniteMPMap};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric real kernel constant on the blocks of a finite weighted partition.
///
/// Values are stored row-major. Construction symmetrizes the matrix and drops
/// parts of zero mass, so a stored kernel always satisfies `values[i][j] ==
/// values[j][i]` bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel<T> {
    weights: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> StepKernel<T> {
    /// Build a kernel from part masses and a square value matrix.
    pub fn new(weights: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        let m = weights.len();
        if values.len() != m || values.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput(format!(
                "value matrix must be {m}x{m} to match the weights"
            )));
        }
        Self::from_flat(weights, values.into_iter().flatten().collect())
    }

    /// Build a kernel from part masses and a row-major value matrix.
    pub fn from_flat(weights: Vec<T>, values: Vec<T>) -> Result<Self> {
        let m = weights.len();
        if m == 0 {
            return Err(Error::InvalidInput("kernel needs at least one part".into()));
        }
        if values.len() != m * m {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                m * m,
                values.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidInput(format!("part weight {w} is not a finite mass")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("kernel values must be finite".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::weight_tol() {
            return Err(Error::InvalidInput(format!("part weights sum to {total}, not 1")));
        }

        let keep: Vec<usize> = (0..m).filter(|&i| weights[i] > T::zero()).collect();
        let k = keep.len();
        let half = T::lit(0.5);
        let mut sym = Vec::with_capacity(k * k);
        for &i in &keep {
            for &j in &keep {
                let (a, b) = (values[i * m + j], values[j * m + i]);
                sym.push(if a == b { a } else { (a + b) * half });
            }
        }
        Ok(Self {
            weights: keep.iter().map(|&i| weights[i]).collect(),
            values: sym,
        })
    }

    /// Kernel on `m = values.len()` parts of mass `1/m` each.
    pub fn uniform(values: Vec<Vec<T>>) -> Result<Self> {
        let m = values.len();
        Self::new(uniform_weights(m), values)
    }

    pub fn constant(c: T) -> Self {
        Self {
            weights: vec![T::one()],
            values: vec![c],
        }
    }

    /// The zero kernel on the given partition.
    pub fn zeros(weights: Vec<T>) -> Result<Self> {
        let m = weights.len();
        Self::from_flat(weights, vec![T::zero(); m * m])
    }

    #[inline]
    pub fn parts(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[i * self.parts() + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        let m = self.parts();
        &self.values[i * m..(i + 1) * m]
    }

    /// Row-major value matrix.
    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.parts()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Apply `f` entrywise; symmetry is preserved because `f` is pointwise.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            weights: self.weights.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map_values(|v| v * c)
    }

    /// True when both kernels live on the same partition (weights equal to
    /// within the weight tolerance).
    pub fn same_partition(&self, other: &Self) -> bool {
        self.parts() == other.parts()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (*a - *b).abs() <= T::weight_tol())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if !self.same_partition(other) {
            return Err(Error::InvalidArgument(
                "kernels must share a partition for pointwise operations".into(),
            ));
        }
        Ok(Self {
            weights: self.weights.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Pointwise difference `self - other` on a common partition.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Sum of `p_i p_j f(values[i][j])` over all blocks.
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        let m = self.parts();
        let mut acc = T::zero();
        for i in 0..m {
            let mut row = T::zero();
            for j in 0..m {
                row += self.weights[j] * f(self.values[i * m + j]);
            }
            acc += self.weights[i] * row;
        }
        acc
    }

    /// Weighted L1 norm.
    pub fn l1_norm(&self) -> T {
        self.integrate(|v| v.abs())
    }

    /// Weighted L2 norm.
    pub fn l2_norm(&self) -> T {
        self.integrate(|v| v * v).sqrt()
    }

    /// `sum_{i,j} p_i p_j values[i][j]^k`.
    pub fn moment(&self, k: u32) -> Result<T> {
        if k < 1 {
            return Err(Error::InvalidArgument("moment order must be at least 1".into()));
        }
        Ok(self.integrate(|v| v.powi(k as i32)))
    }

    /// The (first) marginal `i -> sum_j p_j values[i][j]`.
    pub fn marginal(&self) -> Vec<T> {
        (0..self.parts())
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&self.weights)
                    .map(|(&v, &p)| p * v)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    pub fn diagonal_vanishes(&self) -> bool {
        (0..self.parts()).all(|i| self.value(i, i) == T::zero())
    }

    /// Row-major `p_i p_j values[i][j]`, the matrix of the bilinear cut forms.
    pub fn weighted_matrix(&self) -> Vec<T> {
        let m = self.parts();
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                out.push(self.weights[i] * self.weights[j] * self.values[i * m + j]);
            }
        }
        out
    }

    /// Cast to another scalar type.
    pub fn cast<U: Scalar>(&self) -> StepKernel<U> {
        let conv = |x: &T| U::from_f64(x.to_f64_lossy()).unwrap_or_else(U::nan);
        StepKernel {
            weights: self.weights.iter().map(conv).collect(),
            values: self.values.iter().map(conv).collect(),
        }
    }
}

/// `m` equal part masses summing to one.
pub fn uniform_weights<T: Scalar>(m: usize) -> Vec<T> {
    let w = T::one() / T::from_usize(m.max(1)).unwrap();
    vec![w; m]
}

/// A step kernel with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon<T>(StepKernel<T>);

impl<T: Scalar> StepGraphon<T> {
    pub fn new(weights: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        Self::try_from_kernel(StepKernel::new(weights, values)?)
    }

    pub fn uniform(values: Vec<Vec<T>>) -> Result<Self> {
        Self::try_from_kernel(StepKernel::uniform(values)?)
    }

    pub fn constant(p: T) -> Result<Self> {
        Self::try_from_kernel(StepKernel::constant(p))
    }

    pub fn try_from_kernel(kernel: StepKernel<T>) -> Result<Self> {
        if let Some(v) = kernel
            .values()
            .iter()
            .find(|v| **v < T::zero() || **v > T::one())
        {
            return Err(Error::InvalidInput(format!("graphon value {v} outside [0,1]")));
        }
        Ok(Self(kernel))
    }

    #[inline]
    pub fn kernel(&self) -> &StepKernel<T> {
        &self.0
    }

    pub fn into_kernel(self) -> StepKernel<T> {
        self.0
    }

    /// `sum p_i p_j v_ij (1 - v_ij) <= tol`: the kernel is {0,1}-valued up to `tol`.
    pub fn is_random_free(&self, tol: T) -> bool {
        self.0.integrate(|v| v * (T::one() - v)) <= tol
    }
}

impl<T> Deref for StepGraphon<T> {
    type Target = StepKernel<T>;
    fn deref(&self) -> &StepKernel<T> {
        &self.0
    }
}

impl<T> AsRef<StepKernel<T>> for StepGraphon<T> {
    fn as_ref(&self) -> &StepKernel<T> {
        &self.0
    }
}

/// How a graph's graphon is laid out. Both layouts are equivalent and yield
/// the same stored matrix; the flag only travels as metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphFlavor {
    /// Vertex set with the uniform measure.
    #[default]
    Vertex,
    /// `[0,1]` cut into `n` equal intervals.
    Interval,
}

/// The step graphon of a simple graph: uniform parts, adjacency values.
pub fn graphon_from_graph<T: Scalar>(g: &SimpleGraph, _flavor: GraphFlavor) -> Result<StepGraphon<T>> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidInput("graph has no vertices".into()));
    }
    let mut values = vec![T::zero(); n * n];
    for &(u, v) in g.edges() {
        values[u * n + v] = T::one();
        values[v * n + u] = T::one();
    }
    Ok(StepGraphon(StepKernel {
        weights: uniform_weights(n),
        values,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let k = StepKernel::<f64>::uniform(vec![vec![0.0, 1.0], vec![0.5, 0.2]]).unwrap();
        assert_eq!(k.value(0, 1), 0.75);
        assert_eq!(k.value(1, 0), 0.75);
    }

    #[test]
    fn zero_mass_parts_are_dropped() {
        let k = StepKernel::new(
            vec![0.5, 0.0, 0.5],
            vec![vec![1.0, 9.0, 2.0], vec![9.0, 9.0, 9.0], vec![2.0, 9.0, 3.0]],
        )
        .unwrap();
        assert_eq!(k.parts(), 2);
        assert_eq!(k.to_rows(), vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
    }

    #[test]
    fn rejects_bad_weights_and_values() {
        assert!(StepKernel::new(vec![0.5, 0.6], vec![vec![0.0; 2]; 2]).is_err());
        assert!(StepKernel::new(vec![1.5, -0.5], vec![vec![0.0; 2]; 2]).is_err());
        assert!(StepKernel::new(vec![1.0], vec![vec![f64::NAN]]).is_err());
        assert!(StepKernel::<f64>::new(vec![], vec![]).is_err());
        assert!(StepGraphon::constant(1.5f64).is_err());
    }

    #[test]
    fn graph_to_graphon() {
        let k3 = graphon_from_graph::<f64>(&SimpleGraph::complete(3), GraphFlavor::Vertex).unwrap();
        assert_eq!(k3.weights(), &[1.0 / 3.0; 3]);
        assert_eq!(
            k3.to_rows(),
            vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]
        );
        let single = graphon_from_graph::<f64>(&SimpleGraph::empty(1), GraphFlavor::Vertex).unwrap();
        assert_eq!(single.to_rows(), vec![vec![0.0]]);
        let p3 = graphon_from_graph::<f64>(&SimpleGraph::path(3), GraphFlavor::Interval).unwrap();
        assert_eq!(
            p3.to_rows(),
            vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]
        );
        let again = graphon_from_graph::<f64>(&SimpleGraph::path(3), GraphFlavor::Vertex).unwrap();
        assert_eq!(p3, again);
        assert!(graphon_from_graph::<f64>(&SimpleGraph::empty(0), GraphFlavor::Vertex).is_err());
    }

    #[test]
    fn moments_and_marginals() {
        let c = StepKernel::constant(0.3f64);
        assert!((c.moment(2).unwrap() - 0.09).abs() < 1e-15);
        assert!(c.moment(0).is_err());
        let bip = builtin::<f64>(Builtin::Bipartite, 2, Discretization::Midpoint).unwrap();
        assert_eq!(bip.moment(1).unwrap(), 0.5);
        assert_eq!(bip.marginal(), vec![0.5, 0.5]);
        let c4 = StepKernel::<f64>::uniform(vec![vec![0.25; 4]; 4]).unwrap();
        assert!(c4.marginal().iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn random_free_detection() {
        let k3 = graphon_from_graph::<f64>(&SimpleGraph::complete(3), GraphFlavor::Vertex).unwrap();
        assert!(k3.is_random_free(0.0));
        assert!(!StepGraphon::constant(0.5f64).unwrap().is_random_free(1e-12));
        let avg = builtin::<f64>(Builtin::Half, 4, Discretization::CellAverage).unwrap();
        assert!(!avg.is_random_free(1e-12));
        let mid = builtin::<f64>(Builtin::Half, 4, Discretization::Midpoint).unwrap();
        assert!(mid.is_random_free(0.0));
    }

    #[test]
    fn works_over_f32() {
        let k = StepKernel::<f32>::uniform(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(k.moment(1).unwrap(), 0.5);
        let back: StepKernel<f64> = k.cast();
        assert_eq!(back.value(0, 0), 1.0);
    }
}
