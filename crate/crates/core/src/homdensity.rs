//! Homomorphism densities `t(F, W)` of loopless multigraphs in step kernels,
//! cycle densities by traces, and the truncated `dt` distance.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{graphon_from_graph, GraphFlavor, MultiGraph, SimpleGraph, StepKernel};
use crate::scalar::Scalar;

/// Largest number of vertex maps `m^n` enumerated by [`hom_density`].
pub const MAP_BUDGET: f64 = 1e8;

struct Plan {
    // for each vertex v, edges (u, mult) to earlier vertices u < v
    back: Vec<Vec<(usize, i32)>>,
}

impl Plan {
    fn new(f: &MultiGraph) -> Self {
        let mut back = vec![Vec::new(); f.vertex_count()];
        for &(u, v, k) in f.edges() {
            back[u.max(v)].push((u.min(v), k as i32));
        }
        Self { back }
    }
}

fn extend<T: Scalar>(w: &StepKernel<T>, plan: &Plan, x: &mut Vec<usize>, acc: T) -> T {
    let v = x.len();
    if v == plan.back.len() {
        return acc;
    }
    let mut total = T::zero();
    for i in 0..w.parts() {
        let mut t = acc * w.weights()[i];
        for &(u, k) in &plan.back[v] {
            t *= w.value(x[u], i).powi(k);
        }
        if t == T::zero() {
            continue;
        }
        x.push(i);
        total += extend(w, plan, x, t);
        x.pop();
    }
    total
}

/// `t(F, W)` by summing over all maps `V(F) -> parts`.
///
/// Fails with a budget error when `m^|V(F)|` exceeds [`MAP_BUDGET`]; cycles
/// can use [`cycle_density`] instead.
pub fn hom_density<T: Scalar>(f: &MultiGraph, w: &StepKernel<T>) -> Result<T> {
    let n = f.vertex_count();
    if n == 0 {
        return Err(Error::InvalidInput("probe graph has no vertices".into()));
    }
    let needed = (w.parts() as f64).powi(n as i32);
    if needed > MAP_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            limit: MAP_BUDGET,
            hint: "use cycle_density for cycles or estimate by sampling",
        });
    }
    let plan = Plan::new(f);
    let parts: Vec<T> = (0..w.parts())
        .into_par_iter()
        .map(|i| {
            let mut x = Vec::with_capacity(n);
            x.push(i);
            extend(w, &plan, &mut x, w.weights()[i])
        })
        .collect();
    // summed in part order so the result does not depend on scheduling
    Ok(parts.into_iter().sum())
}

/// `t(F, G)` for a simple graph `G`, through its step graphon.
pub fn hom_density_in_graph<T: Scalar>(f: &MultiGraph, g: &SimpleGraph) -> Result<T> {
    hom_density(f, &graphon_from_graph::<T>(g, GraphFlavor::Vertex)?.into_kernel())
}

fn extend_injective(g: &SimpleGraph, back: &[Vec<(usize, i32)>], x: &mut Vec<usize>, used: &mut [bool]) -> u64 {
    let v = x.len();
    if v == back.len() {
        return 1;
    }
    let mut count = 0;
    for i in 0..g.vertex_count() {
        if used[i] || !back[v].iter().all(|&(u, _)| g.has_edge(x[u], i)) {
            continue;
        }
        used[i] = true;
        x.push(i);
        count += extend_injective(g, back, x, used);
        x.pop();
        used[i] = false;
    }
    count
}

/// Fraction of injective maps `V(F) -> V(G)` that are homomorphisms.
///
/// Unlike `t(F, G)` it has no bias from collapsed vertices: its mean over
/// `G(n, W)` is exactly `t(F, W)`.
pub fn injective_density(f: &MultiGraph, g: &SimpleGraph) -> Result<f64> {
    let (k, n) = (f.vertex_count(), g.vertex_count());
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= |V(F)| <= |V(G)|, got {k} and {n}"
        )));
    }
    let falling: f64 = (0..k).map(|i| (n - i) as f64).product();
    if falling > MAP_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: falling,
            limit: MAP_BUDGET,
            hint: "use a smaller probe or graph",
        });
    }
    let plan = Plan::new(f);
    let mut used = vec![false; n];
    let count = extend_injective(g, &plan.back, &mut Vec::with_capacity(k), &mut used);
    Ok(count as f64 / falling)
}

/// `t(C_k, W) = tr((V D)^k)` with `D = diag(weights)`.
///
/// `k = 2` is the doubled edge, whose density is the second moment.
pub fn cycle_density<T: Scalar>(k: usize, w: &StepKernel<T>) -> Result<T> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("cycle length {k} < 2")));
    }
    let m = w.parts();
    let vd: Vec<T> = (0..m * m).map(|ij| w.values()[ij] * w.weights()[ij % m]).collect();
    let mut pow = vd.clone();
    for _ in 1..k {
        let mut next = vec![T::zero(); m * m];
        for i in 0..m {
            for l in 0..m {
                let a = pow[i * m + l];
                if a == T::zero() {
                    continue;
                }
                for j in 0..m {
                    next[i * m + j] += a * vd[l * m + j];
                }
            }
        }
        pow = next;
    }
    Ok((0..m).map(|i| pow[i * m + i]).sum())
}

fn canonical_code(n: usize, code: u64) -> u64 {
    let g = SimpleGraph::from_code(n, code);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = code;
    let relabel = |perm: &[usize]| {
        SimpleGraph::new(n, g.edges().iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("relabelling keeps a simple graph")
            .code()
    };
    // Heap's algorithm over all n! relabellings
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(relabel(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn build_catalog() -> Vec<SimpleGraph> {
    let mut out = Vec::new();
    for n in 1..=5usize {
        let pairs = n * (n - 1) / 2;
        let mut codes: Vec<u64> = (0..1u64 << pairs).filter(|&c| canonical_code(n, c) == c).collect();
        codes.sort_by_key(|&c| (c.count_ones(), c));
        out.extend(codes.into_iter().map(|c| SimpleGraph::from_code(n, c)));
    }
    out
}

/// Every unlabelled simple graph on 1 to 5 vertices (1, 2, 4, 11 and 34
/// of them), ordered by vertex count, then edge count, then the minimal
/// upper-triangular bit code over all labellings.
pub fn graph_catalog() -> &'static [SimpleGraph] {
    static CATALOG: OnceLock<Vec<SimpleGraph>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

/// The catalog entries on at most `max_vertices` vertices.
pub fn graphs_up_to(max_vertices: usize) -> &'static [SimpleGraph] {
    let cat = graph_catalog();
    let end = cat.iter().position(|g| g.vertex_count() > max_vertices).unwrap_or(cat.len());
    &cat[..end]
}

/// Connected simple graphs with at least one edge on at most four
/// vertices, in catalog order.
pub fn default_probes() -> Vec<MultiGraph> {
    graphs_up_to(4)
        .iter()
        .filter(|g| g.edge_count() > 0 && g.is_connected())
        .map(MultiGraph::from)
        .collect()
}

/// `sum_n 2^-(n+1) |t(F_n, W1) - t(F_n, W2)|` over the catalog graphs with
/// at most `max_vertices` vertices, `n` counting from zero.
pub fn dt_distance<T: Scalar>(w1: &StepKernel<T>, w2: &StepKernel<T>, max_vertices: usize) -> Result<T> {
    if max_vertices > 5 {
        return Err(Error::InvalidArgument(format!("max vertices {max_vertices} > 5")));
    }
    let mut total = T::zero();
    let mut scale = T::one();
    for g in graphs_up_to(max_vertices) {
        scale *= T::lit(0.5);
        let f = MultiGraph::from(g);
        total += scale * (hom_density(&f, w1)? - hom_density(&f, w2)?).abs();
    }
    Ok(total)
}
