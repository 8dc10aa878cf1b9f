//! The `check` subcommand: library invariants on seeded random instances.

use graphonlab::cutdist::{coupling_cut_norm, cut_distance, l1_distance, Coupling, DistanceNorm, DistanceOptions};
use graphonlab::cutnorm::{check_norm_inequalities, cut_norm_with, CutOptions, Variant};
use graphonlab::extremal::{
    hadamard_kernel, paley_graph, quasirandom_discrepancy, random_free_inequality_check, weak_topology_demo,
};
use graphonlab::homdensity::{cycle_density, graphs_up_to, hom_density};
use graphonlab::sampling::{entropy_rate, exact_entropy, sample_graph};
use graphonlab::spectral::{schatten, spectral_checks, SANDWICH_EXPONENTS};
use graphonlab::structure::{equivalent, purify, DEFAULT_TOL};
use graphonlab::{pullback, MPMap, MultiGraph, StepGraphon, StepKernel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Row {
    pub name: &'static str,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl Row {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn weights(r: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| r.gen_range(0.05..1.0)).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

fn rows(r: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut v = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            v[i][j] = r.gen_range(lo..hi);
            v[j][i] = v[i][j];
        }
    }
    v
}

fn kernel(r: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> StepKernel {
    let w = weights(r, m);
    StepKernel::new(w, rows(r, m, lo, hi)).expect("valid random kernel")
}

/// Each part split into one to three random pieces, in shuffled order.
fn refinement(r: &mut ChaCha8Rng, k: &StepKernel) -> MPMap {
    let mut pieces = Vec::new();
    for (i, &p) in k.weights().iter().enumerate() {
        let count = r.gen_range(1..=3);
        pieces.extend(weights(r, count).into_iter().map(|x| (x * p, i)));
    }
    pieces.shuffle(r);
    let (src, map) = pieces.into_iter().unzip();
    MPMap::new(src, k.weights().to_vec(), map).expect("pieces cover the parts")
}

fn run(name: &'static str, n: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng, usize) -> Option<String>) -> Row {
    let failures = (0..n)
        .filter_map(|i| {
            let mut r = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            f(&mut r, i).map(|why| format!("instance {i}: {why}"))
        })
        .collect();
    Row { name, instances: n, failures }
}

fn fail_if(bad: bool, why: impl FnOnce() -> String) -> Option<String> {
    bad.then(why)
}

pub fn suite(seed: u64) -> Vec<Row> {
    let probes: Vec<MultiGraph> = graphs_up_to(4).iter().map(MultiGraph::from).collect();
    vec![
        run("cut-norm inequalities", 100, seed, |r, i| {
            let m = 1 + i % 6;
            let mut k = kernel(r, m, -1.0, 1.0);
            if i % 2 == 1 {
                let v = (0..m).map(|a| (0..m).map(|b| if a == b { 0.0 } else { k.value(a, b) }).collect()).collect();
                k = StepKernel::new(k.weights().to_vec(), v).unwrap();
            }
            check_norm_inequalities(&k).checks.into_iter().find(|c| !c.pass).map(|c| c.name.to_string())
        }),
        run("witness replay", 100, seed, |r, i| {
            let k = kernel(r, 1 + i % 6, -1.0, 1.0);
            let opts = CutOptions { seed: i as u64, ..Default::default() };
            Variant::SET_VARIANTS.into_iter().chain([Variant::Complex, Variant::Hilbert]).find_map(|v| {
                let w = cut_norm_with(&k, v, &opts);
                fail_if((w.replay(&k) - w.value).abs() > 1e-10, || format!("variant {v}"))
            })
        }),
        run("spectral sandwich", 100, seed, |r, i| {
            let m = 1 + i % 6;
            let w = weights(r, m);
            let a = StepKernel::new(w.clone(), rows(r, m, 0.0, 1.0)).unwrap();
            let b = StepKernel::new(w, rows(r, m, 0.0, 1.0)).unwrap();
            let ps = SANDWICH_EXPONENTS.to_vec();
            match spectral_checks(&a.sub(&b).unwrap(), &ps) {
                Ok(rep) => rep.checks.into_iter().find(|c| !c.pass).map(|c| c.name.to_string()),
                Err(e) => Some(e.to_string()),
            }
        }),
        run("cycle densities", 50, seed, |r, i| {
            let k = kernel(r, 1 + i % 5, -1.0, 1.0);
            let c4 = cycle_density(4, &k).unwrap();
            let brute = hom_density(&MultiGraph::from(graphonlab::SimpleGraph::cycle(4)), &k).unwrap();
            let s4 = schatten(&k, 4.0).unwrap().powi(4);
            fail_if((c4 - brute).abs() > 1e-10 || (s4 - c4).abs() > 1e-9, || format!("{c4} {brute} {s4}"))
        }),
        run("pull-back invariance", 50, seed, |r, i| {
            let k = kernel(r, 1 + i % 5, -1.0, 1.0);
            let p = pullback(&k, &refinement(r, &k)).unwrap();
            let mut gaps = vec![(p.l1_norm() - k.l1_norm()).abs()];
            gaps.extend((1..=4).map(|j| (p.moment(j).unwrap() - k.moment(j).unwrap()).abs()));
            gaps.extend(probes.iter().map(|f| (hom_density(f, &p).unwrap() - hom_density(f, &k).unwrap()).abs()));
            let g = gaps.into_iter().fold(0.0, f64::max);
            fail_if(g > 1e-12, || format!("moved by {g}"))
        }),
        run("distance brackets", 30, seed, |r, i| {
            let a = kernel(r, 1 + i % 4, 0.0, 1.0);
            let b = kernel(r, 1 + (i / 4) % 4, 0.0, 1.0);
            let opts = DistanceOptions { seed: i as u64, ..Default::default() };
            let c = cut_distance(&a, &b, &opts).unwrap();
            let l = l1_distance(&a, &b, &opts).unwrap();
            let prod = Coupling::product(a.weights(), b.weights());
            let any = coupling_cut_norm(&a, &b, &prod, DistanceNorm::default()).unwrap();
            fail_if(c.lower > c.upper + 1e-9 || c.upper > l.upper + 1e-12 || c.lower > any + 1e-9, || {
                format!("cut [{}, {}], l1 {}, product {any}", c.lower, c.upper, l.upper)
            })
        }),
        run("equivalence of refinements", 50, seed, |r, i| {
            let k = kernel(r, 1 + i % 4, 0.0, 1.0);
            let w = pullback(&k, &refinement(r, &k)).unwrap();
            match equivalent(&k, &w, DEFAULT_TOL) {
                Ok(e) if e.is_equivalent() => None,
                other => Some(format!("{other:?}")),
            }
        }),
        run("purification", 50, seed, |r, i| {
            let k = kernel(r, 1 + i % 5, 0.0, 1.0);
            let w = pullback(&k, &refinement(r, &k)).unwrap();
            let p = purify(&w, DEFAULT_TOL).unwrap();
            let again = purify(&p.pure, DEFAULT_TOL).unwrap().pure;
            fail_if(again != p.pure || p.pure.parts() != k.parts(), || format!("{} parts", p.pure.parts()))
        }),
        run("entropy sandwich", 30, seed, |r, i| {
            let w = StepGraphon::try_from_kernel(kernel(r, 1 + i % 3, 0.0, 1.0)).unwrap();
            let rate = entropy_rate(&w);
            (2..=4).find_map(|n| {
                let per = exact_entropy(&w, n).unwrap() / (n * (n - 1) / 2) as f64;
                fail_if(per < rate - 1e-9, || format!("n={n}: {per} < {rate}"))
            })
        }),
        run("random-free inequalities", 100, seed, |r, i| {
            let n = 1 + i % 6;
            let w = weights(r, n);
            let bits = rows(r, n, 0.0, 1.0)
                .into_iter()
                .map(|row| row.into_iter().map(|x| if x < 0.5 { 0.0 } else { 1.0 }).collect())
                .collect();
            let w1 = StepKernel::new(w.clone(), bits).unwrap();
            let w2 = StepKernel::new(w, rows(r, n, 0.0, 1.0)).unwrap();
            let rep = random_free_inequality_check(&w1, &w2).unwrap();
            fail_if(!(rep.square_pass && rep.root_pass), || format!("{rep:?}"))
        }),
        run("sampling replay", 20, seed, |r, i| {
            let w = StepGraphon::try_from_kernel(kernel(r, 1 + i % 4, 0.0, 1.0)).unwrap();
            fail_if(sample_graph(&w, 25, i as u64) != sample_graph(&w, 25, i as u64), || "differs".into())
        }),
        run("extremal instances", 1, seed, |_, _| {
            for k in 1..=4u32 {
                let h: StepKernel = hadamard_kernel(k).unwrap();
                let cn2 = cut_norm_with(&h, Variant::Two, &CutOptions::default()).value;
                if cn2 > 2f64.powf(-(k as f64) / 2.0) + 1e-9 || h.l1_norm() != 1.0 {
                    return Some(format!("hadamard k={k}"));
                }
            }
            for q in [13u64, 17] {
                let d: f64 = quasirandom_discrepancy(&paley_graph(q).unwrap()).unwrap();
                if d > 0.5 / (q as f64).sqrt() {
                    return Some(format!("paley q={q}: {d}"));
                }
            }
            weak_topology_demo::<f64>(&[1, 2, 3, 4]).unwrap().into_iter().find_map(|row| {
                fail_if(row.triangle_density != 0.0 || row.cut_distance_upper != 0.0, || format!("weak n={}", row.n))
            })
        }),
    ]
}
