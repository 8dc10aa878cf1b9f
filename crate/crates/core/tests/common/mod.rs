#![allow(dead_code)]

use graphonlab::{MPMap, MultiGraph, StepGraphon, StepKernel};
use proptest::prelude::*;

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

/// Symmetric kernel on `1..=max_m` parts with positive random weights and
/// values in `lo..hi`.
pub fn kernel(max_m: usize, lo: f64, hi: f64) -> impl Strategy<Value = StepKernel> {
    (1..=max_m).prop_flat_map(move |m| kernel_on(m, lo, hi))
}

pub fn kernel_on(m: usize, lo: f64, hi: f64) -> impl Strategy<Value = StepKernel> {
    (
        prop::collection::vec(0.05f64..1.0, m),
        prop::collection::vec(lo..hi, m * m),
    )
        .prop_map(move |(w, v)| symmetric(normalize(w), v))
}

pub fn uniform_kernel_on(m: usize, lo: f64, hi: f64) -> impl Strategy<Value = StepKernel> {
    prop::collection::vec(lo..hi, m * m).prop_map(move |v| symmetric(vec![1.0 / m as f64; m], v))
}

fn symmetric(w: Vec<f64>, v: Vec<f64>) -> StepKernel {
    let m = w.len();
    let rows = (0..m)
        .map(|i| (0..m).map(|j| v[i.min(j) * m + i.max(j)]).collect())
        .collect();
    StepKernel::new(w, rows).unwrap()
}

pub fn graphon(max_m: usize) -> impl Strategy<Value = StepGraphon> {
    kernel(max_m, 0.0, 1.0).prop_map(|k| StepGraphon::try_from_kernel(k).unwrap())
}

/// A kernel with a measure-preserving map onto its parts: every part is
/// split into one to three pieces, then the pieces are shuffled.
pub fn kernel_with_map(max_m: usize, lo: f64, hi: f64) -> impl Strategy<Value = (StepKernel, MPMap)> {
    kernel(max_m, lo, hi).prop_flat_map(|k| {
        let m = k.parts();
        (
            Just(k),
            prop::collection::vec(prop::collection::vec(0.1f64..1.0, 1..=3), m),
            any::<u64>(),
        )
            .prop_map(|(k, splits, shuffle)| {
                let mut pieces: Vec<(f64, usize)> = Vec::new();
                for (i, s) in splits.iter().enumerate() {
                    let tot: f64 = s.iter().sum();
                    pieces.extend(s.iter().map(|x| (k.weights()[i] * x / tot, i)));
                }
                let n = pieces.len();
                // deterministic Fisher-Yates from the drawn seed
                let mut state = shuffle | 1;
                for a in (1..n).rev() {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    pieces.swap(a, (state % (a as u64 + 1)) as usize);
                }
                let (src, map): (Vec<f64>, Vec<usize>) = pieces.into_iter().unzip();
                let phi = MPMap::new(src, k.weights().to_vec(), map).unwrap();
                (k, phi)
            })
    })
}

pub fn probes() -> Vec<MultiGraph> {
    graphonlab::homdensity::graphs_up_to(4)
        .iter()
        .map(MultiGraph::from)
        .collect()
}
