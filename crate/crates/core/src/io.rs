//! JSON forms of kernels, graphs and multigraphs.
//!
//! ```text
//! kernel:     {"weights": [..], "values": [[..], ..]}
//! graph:      {"n": N, "edges": [[u, v], ..]}
//! multigraph: {"n": N, "edges": [[u, v], ..], "mult": [..]}
//! ```
//!
//! Numbers are written with full `f64` precision so every emitted object
//! parses back to an equal value.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernels::{graphon_from_graph, GraphFlavor, MultiGraph, SimpleGraph, StepGraphon, StepKernel};
use crate::scalar::Scalar;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelJson {
    weights: Vec<f64>,
    values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flavor: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mult: Option<Vec<u32>>,
}

fn check_symmetric(values: &[Vec<f64>]) -> Result<()> {
    let m = values.len();
    for (i, row) in values.iter().enumerate() {
        if row.len() != m {
            return Err(Error::InvalidInput(format!("row {i} has {} entries, expected {m}", row.len())));
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (values[i][j], values[j][i]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInput("kernel values must be finite".into()));
            }
            if (a - b).abs() > f64::symmetry_tol() {
                return Err(Error::InvalidInput(format!(
                    "values[{i}][{j}] = {a} and values[{j}][{i}] = {b} differ by more than {}",
                    f64::symmetry_tol()
                )));
            }
        }
    }
    Ok(())
}

pub fn kernel_from_value<T: Scalar>(v: Value) -> Result<StepKernel<T>> {
    let k: KernelJson = serde_json::from_value(v)?;
    check_symmetric(&k.values)?;
    let kernel = StepKernel::<f64>::new(k.weights, k.values)?;
    Ok(kernel.cast())
}

pub fn parse_kernel<T: Scalar>(s: &str) -> Result<StepKernel<T>> {
    kernel_from_value(serde_json::from_str(s)?)
}

pub fn parse_graphon<T: Scalar>(s: &str) -> Result<StepGraphon<T>> {
    StepGraphon::try_from_kernel(parse_kernel(s)?)
}

pub fn kernel_to_value<T: Scalar>(k: &StepKernel<T>) -> Value {
    let k = k.cast::<f64>();
    serde_json::to_value(KernelJson {
        weights: k.weights().to_vec(),
        values: k.to_rows(),
        flavor: None,
    })
    .expect("kernel serializes")
}

pub fn kernel_to_string<T: Scalar>(k: &StepKernel<T>) -> String {
    kernel_to_value(k).to_string()
}

fn graph_from_value(v: Value) -> Result<GraphJson> {
    Ok(serde_json::from_value(v)?)
}

pub fn parse_graph(s: &str) -> Result<SimpleGraph> {
    let g = graph_from_value(serde_json::from_str(s)?)?;
    if g.mult.as_ref().is_some_and(|m| m.iter().any(|&k| k != 1)) {
        return Err(Error::InvalidInput("simple graph cannot carry multiplicities".into()));
    }
    SimpleGraph::new(g.n, g.edges.into_iter().map(|[u, v]| (u, v)))
}

pub fn parse_multigraph(s: &str) -> Result<MultiGraph> {
    let g = graph_from_value(serde_json::from_str(s)?)?;
    let mult = match g.mult {
        Some(m) if m.len() != g.edges.len() => {
            return Err(Error::InvalidInput(format!(
                "{} multiplicities for {} edges",
                m.len(),
                g.edges.len()
            )))
        }
        Some(m) => m,
        None => vec![1; g.edges.len()],
    };
    MultiGraph::new(g.n, g.edges.into_iter().zip(mult).map(|([u, v], k)| (u, v, k)))
}

pub fn graph_to_value(g: &SimpleGraph) -> Value {
    serde_json::to_value(GraphJson {
        n: g.vertex_count(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        mult: None,
    })
    .expect("graph serializes")
}

pub fn multigraph_to_value(g: &MultiGraph) -> Value {
    let simple = g.is_simple();
    serde_json::to_value(GraphJson {
        n: g.vertex_count(),
        edges: g.edges().iter().map(|&(u, v, _)| [u, v]).collect(),
        mult: (!simple).then(|| g.edges().iter().map(|e| e.2).collect()),
    })
    .expect("multigraph serializes")
}

/// A kernel file, or a graph file read as its step graphon.
pub fn parse_kernel_or_graph<T: Scalar>(s: &str) -> Result<StepKernel<T>> {
    let v: Value = serde_json::from_str(s)?;
    if v.get("n").is_some() {
        let g = parse_graph(s)?;
        Ok(graphon_from_graph::<T>(&g, GraphFlavor::Vertex)?.into_kernel())
    } else {
        kernel_from_value(v)
    }
}
