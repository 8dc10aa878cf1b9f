//! W-random graphs `G(n, W)`: seeded sampling, exact small-`n`
//! distributions and entropies, and convergence of sampled densities.
//!
//! Sampling uses ChaCha8 seeded from a `u64`. One draw
//! `u = (x >> 11) * 2^-53` is taken per vertex type (inverse CDF over the
//! part weights, in vertex order), then one per pair `i < j` in row-major
//! order; the pair is an edge iff `u < W(X_i, X_j)`. Every draw is consumed
//! whatever its outcome, so the stream layout is fixed.
//!
//! Labelled graphs on `n` vertices are keyed by integers whose bit `k` is the
//! `k`-th pair in row-major order. Logarithms are natural.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homdensity::{hom_density_in_graph, injective_density};
use crate::kernels::{MultiGraph, SimpleGraph, StepGraphon, StepKernel};
use crate::scalar::Scalar;

/// Largest `m^n * 2^(n(n-1)/2)` enumerated by [`exact_distribution`].
pub const DISTRIBUTION_BUDGET: f64 = 1e8;

/// A sampled graph together with the latent part of each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledGraph {
    pub graph: SimpleGraph,
    pub types: Vec<usize>,
    pub seed: u64,
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn draw_type<T: Scalar>(weights: &[T], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w.to_f64_lossy();
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// One draw of `G(n, W)`; the same `(W, n, seed)` always gives the same graph.
pub fn sample_graph<T: Scalar>(w: &StepGraphon<T>, n: usize, seed: u64) -> SampledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types: Vec<usize> = (0..n).map(|_| draw_type(w.weights(), unit(&mut rng))).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let u = unit(&mut rng);
            if u < w.value(types[i], types[j]).to_f64_lossy() {
                edges.push((i, j));
            }
        }
    }
    SampledGraph {
        graph: SimpleGraph::new(n, edges).expect("pairs are distinct and in range"),
        types,
        seed,
    }
}

/// Probability of every labelled graph on `n` vertices with positive mass.
pub fn exact_distribution<T: Scalar>(w: &StepGraphon<T>, n: usize) -> Result<BTreeMap<u64, T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let m = w.parts();
    let pairs = n * (n - 1) / 2;
    let needed = (m as f64).powi(n as i32) * 2f64.powi(pairs as i32);
    if needed > DISTRIBUTION_BUDGET || pairs > 40 {
        return Err(Error::BudgetExceeded {
            needed,
            limit: DISTRIBUTION_BUDGET,
            hint: "use sample_graph for larger n",
        });
    }
    let mut total = vec![T::zero(); 1 << pairs];
    let mut tau = vec![0usize; n];
    let mut scratch = Vec::with_capacity(1 << pairs);
    loop {
        let mass: T = tau.iter().map(|&i| w.weights()[i]).fold(T::one(), |a, b| a * b);
        scratch.clear();
        scratch.push(mass);
        for i in 0..n {
            for j in i + 1..n {
                let q = w.value(tau[i], tau[j]);
                let len = scratch.len();
                scratch.extend_from_within(..);
                for g in 0..len {
                    scratch[g + len] *= q;
                    scratch[g] *= T::one() - q;
                }
            }
        }
        for (t, s) in total.iter_mut().zip(&scratch) {
            *t += *s;
        }
        let mut d = 0;
        while d < n {
            tau[d] += 1;
            if tau[d] < m {
                break;
            }
            tau[d] = 0;
            d += 1;
        }
        if d == n {
            break;
        }
    }
    Ok(total
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > T::zero())
        .map(|(g, p)| (g as u64, p))
        .collect())
}

fn plogp<T: Scalar>(p: T) -> T {
    if p > T::zero() {
        p * p.ln()
    } else {
        T::zero()
    }
}

/// Shannon entropy of `G(n, W)`.
pub fn exact_entropy<T: Scalar>(w: &StepGraphon<T>, n: usize) -> Result<T> {
    Ok(-exact_distribution(w, n)?.into_values().map(plogp).sum::<T>())
}

/// Binary entropy `h(p)`, zero at both ends.
pub fn binary_entropy<T: Scalar>(p: T) -> T {
    -plogp(p) - plogp(T::one() - p)
}

/// `sum p_i p_j h(W_ij)`, the limit of `Ent(G(n,W)) / C(n,2)`.
pub fn entropy_rate<T: Scalar>(w: &StepGraphon<T>) -> T {
    let k: &StepKernel<T> = w;
    k.integrate(binary_entropy)
}

/// Density of the probe measured in each sampled graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityStatistic {
    /// Injective density, an unbiased estimate of `t(F, W)`.
    #[default]
    Injective,
    /// `t(F, G)`, which is low by `O(1/n)` for probes with two or more
    /// vertices.
    Homomorphism,
}

/// Mean and standard error of sampled densities at one graph size.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    pub n: usize,
    pub reps: usize,
    pub mean: T,
    pub stderr: T,
}

/// For each `n`, draws `reps` graphs with seeds `seed ^ rep` and reports
/// the probe's density in them as mean and standard error.
pub fn convergence_experiment<T: Scalar>(
    w: &StepGraphon<T>,
    f: &MultiGraph,
    ns: &[usize],
    reps: usize,
    seed: u64,
    statistic: DensityStatistic,
) -> Result<Vec<ConvergenceRow<T>>> {
    if !f.is_simple() {
        return Err(Error::InvalidArgument("probe must be a simple graph".into()));
    }
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be positive".into()));
    }
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("graph size must be positive".into()));
            }
            let ts = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let g = sample_graph(w, n, seed ^ r).graph;
                    match statistic {
                        DensityStatistic::Injective => injective_density(f, &g).map(T::lit),
                        DensityStatistic::Homomorphism => hom_density_in_graph::<T>(f, &g),
                    }
                })
                .collect::<Result<Vec<T>>>()?;
            let k = T::from_usize(reps).unwrap();
            let mean = ts.iter().copied().sum::<T>() / k;
            let stderr = if reps > 1 {
                let var = ts.iter().map(|&t| (t - mean) * (t - mean)).sum::<T>() / (k - T::one());
                (var / k).sqrt()
            } else {
                T::zero()
            };
            Ok(ConvergenceRow { n, reps, mean, stderr })
        })
        .collect()
}
