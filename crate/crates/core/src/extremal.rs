//! Extremal instances: Hadamard kernels, Paley graphs, `G(n, 1/2)`, the
//! random-free `L1` versus cut-norm inequalities, and the bipartite
//! sequence that converges weakly but not in cut distance.

use crate::cutdist::{cut_distance, DistanceOptions};
use crate::cutnorm::{cut_norm, cut_norm_with, CutOptions, PartModel, Variant};
use crate::error::{Error, Result};
use crate::homdensity::hom_density;
use crate::kernels::{
    builtin, graphon_from_graph, pullback, uniform_weights, Builtin, Discretization, FiniteMPMap, GraphFlavor,
    MultiGraph, SimpleGraph, StepGraphon, StepKernel,
};
use crate::sampling::sample_graph;
use crate::scalar::Scalar;

/// Sylvester's `2^k x 2^k` Hadamard matrix, the `k`-th tensor power of
/// `[[1, 1], [1, -1]]`. It is symmetric.
pub fn hadamard_matrix(k: u32) -> Result<Vec<Vec<i64>>> {
    if !(1..=5).contains(&k) {
        return Err(Error::InvalidArgument(format!("Hadamard order 2^{k} outside 2^1..=2^5")));
    }
    let n = 1usize << k;
    // entry (i, j) is (-1)^popcount(i & j)
    Ok((0..n)
        .map(|i| (0..n).map(|j| if (i & j).count_ones() % 2 == 0 { 1 } else { -1 }).collect())
        .collect())
}

/// The Hadamard matrix as a `+-1` kernel on `2^k` uniform parts.
pub fn hadamard_kernel<T: Scalar>(k: u32) -> Result<StepKernel<T>> {
    let h = hadamard_matrix(k)?;
    StepKernel::uniform(h.into_iter().map(|r| r.into_iter().map(|x| T::lit(x as f64)).collect()).collect())
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Paley graph on `Z_q`: `x ~ y` iff `x - y` is a nonzero square mod `q`.
pub fn paley_graph(q: u64) -> Result<SimpleGraph> {
    if !is_prime(q) || q % 4 != 1 || q > 101 {
        return Err(Error::InvalidArgument(format!(
            "{q} is not a prime congruent to 1 mod 4 and at most 101"
        )));
    }
    let mut square = vec![false; q as usize];
    for x in 1..q {
        square[(x * x % q) as usize] = true;
    }
    let n = q as usize;
    let edges = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).filter(|&(x, y)| square[y - x]);
    SimpleGraph::new(n, edges)
}

/// `W_G - 1/2` for a graph `G`, as a kernel with values `+-1/2`.
pub fn centered_graph_kernel<T: Scalar>(g: &SimpleGraph) -> Result<StepKernel<T>> {
    Ok(graphon_from_graph::<T>(g, GraphFlavor::Vertex)?.map_values(|v| v - T::lit(0.5)))
}

/// Variant four cut norm of `W_G - 1/2` with parts treated as atoms, i.e.
/// the maximum over disjoint vertex sets `S, T` of `|e(S,T) - |S||T|/2| / n^2`.
pub fn quasirandom_discrepancy<T: Scalar>(g: &SimpleGraph) -> Result<T> {
    let k = centered_graph_kernel::<T>(g)?;
    let opts = CutOptions {
        model: PartModel::Atoms,
        ..Default::default()
    };
    Ok(cut_norm_with(&k, Variant::Four, &opts).value)
}

/// Outcome of the `G(n, 1/2)` discrepancy check.
#[derive(Debug, Clone, PartialEq)]
pub struct GnpCheck<T> {
    pub n: usize,
    pub seed: u64,
    pub cn4: T,
    /// `n^-1/2`.
    pub bound: T,
    pub pass: bool,
    /// Upper bound `2 exp((log 3 - 8) n)` on the probability of failure.
    pub failure_probability: f64,
}

pub fn gnp_half_check<T: Scalar>(n: usize, seed: u64) -> Result<GnpCheck<T>> {
    let half = StepGraphon::<T>::constant(T::lit(0.5))?;
    let g = sample_graph(&half, n, seed).graph;
    let cn4 = quasirandom_discrepancy::<T>(&g)?;
    let bound = T::one() / T::from_usize(n).unwrap().sqrt();
    Ok(GnpCheck {
        n,
        seed,
        cn4,
        bound,
        pass: cn4 <= bound,
        failure_probability: 2.0 * ((3f64.ln() - 8.0) * n as f64).exp(),
    })
}

/// The two `L1` bounds for a `{0,1}`-valued `n`-part kernel `W1` and any
/// `W2` on the same partition.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFreeReport<T> {
    pub n: usize,
    pub l1: T,
    pub cn1: T,
    pub cn2: T,
    /// `n^2 cn1`.
    pub square_bound: T,
    /// `sqrt(2n) cn2`.
    pub root_bound: T,
    pub square_pass: bool,
    pub root_pass: bool,
}

pub fn random_free_inequality_check<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>) -> Result<RandomFreeReport<T>> {
    if w1.values().iter().any(|&v| v != T::zero() && v != T::one()) {
        return Err(Error::InvalidInput("first kernel must be {0,1}-valued".into()));
    }
    let d = w1.sub(w2)?;
    let n = w1.parts();
    let nf = T::from_usize(n).unwrap();
    let (l1, cn1, cn2) = (d.l1_norm(), cut_norm(&d, Variant::One).value, cut_norm(&d, Variant::Two).value);
    let square_bound = nf * nf * cn1;
    let root_bound = (T::lit(2.0) * nf).sqrt() * cn2;
    let slack = T::lit(1e-9);
    Ok(RandomFreeReport {
        n,
        l1,
        cn1,
        cn2,
        square_bound,
        root_bound,
        square_pass: l1 <= square_bound + slack,
        root_pass: l1 <= root_bound + slack,
    })
}

/// Splits the Hadamard kernel of order `2^k` as `H = W+ - W-` and checks
/// the random-free bounds for `W+ = (1 + H)/2` against the constant `1/2`.
/// Since `W+ - 1/2 = H/2`, the ratio `L1 / cn2` is at least `sqrt(n)`, so
/// the `sqrt(2n)` constant cannot be improved beyond a constant factor.
pub fn hadamard_split_report<T: Scalar>(k: u32) -> Result<RandomFreeReport<T>> {
    let h = hadamard_kernel::<T>(k)?;
    let half = T::lit(0.5);
    let plus = h.map_values(|v| (T::one() + v) * half);
    let flat = plus.map_values(|_| half);
    random_free_inequality_check(&plus, &flat)
}

/// `W_n`: the bipartite graphon pulled back to `2n` uniform parts by
/// `j -> j mod 2`, so the two sides interleave.
pub fn interleaved_bipartite<T: Scalar>(n: usize) -> Result<StepKernel<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let bip = builtin::<T>(Builtin::Bipartite, 2, Discretization::Midpoint)?;
    let phi = FiniteMPMap::new(uniform_weights(2 * n), bip.weights().to_vec(), (0..2 * n).map(|j| j % 2).collect())?;
    pullback(&bip, &phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakRow<T> {
    pub n: usize,
    pub triangle_density: T,
    pub edge_density: T,
    /// Upper bound on the cut distance from `W_1`.
    pub cut_distance_upper: T,
    /// Triangle density of the weak limit, the constant 1/2.
    pub limit_triangle_density: T,
}

/// For each `n`: `t(K3, W_n)`, `t(K2, W_n)` and the cut distance from
/// `W_1`, next to `t(K3, 1/2) = 1/8`.
pub fn weak_topology_demo<T: Scalar>(ns: &[usize]) -> Result<Vec<WeakRow<T>>> {
    let k3 = MultiGraph::from(SimpleGraph::complete(3));
    let k2 = MultiGraph::parallel(1);
    let w1 = interleaved_bipartite::<T>(1)?;
    let limit = hom_density(&k3, &StepKernel::constant(T::lit(0.5)))?;
    ns.iter()
        .map(|&n| {
            let wn = interleaved_bipartite::<T>(n)?;
            Ok(WeakRow {
                n,
                triangle_density: hom_density(&k3, &wn)?,
                edge_density: hom_density(&k2, &wn)?,
                cut_distance_upper: cut_distance(&wn, &w1, &DistanceOptions::default())?.upper,
                limit_triangle_density: limit,
            })
        })
        .collect()
}
