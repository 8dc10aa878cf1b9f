use super::StepKernel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Measure-preserving map from `source_weights.len()` parts onto
/// `target_weights.len()` parts: the source masses mapped onto each target
/// part sum to that part's mass.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMPMap<T> {
    source_weights: Vec<T>,
    target_weights: Vec<T>,
    map: Vec<usize>,
}

impl<T: Scalar> FiniteMPMap<T> {
    pub fn new(source_weights: Vec<T>, target_weights: Vec<T>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source_weights.len() {
            return Err(Error::InvalidMap(format!(
                "map has {} entries for {} source parts",
                map.len(),
                source_weights.len()
            )));
        }
        if source_weights.iter().any(|w| !w.is_finite() || *w <= T::zero()) {
            return Err(Error::InvalidMap("source weights must be positive".into()));
        }
        let mut pushed = vec![T::zero(); target_weights.len()];
        for (&j, &q) in map.iter().zip(&source_weights) {
            let slot = pushed
                .get_mut(j)
                .ok_or_else(|| Error::InvalidMap(format!("target part {j} out of range")))?;
            *slot += q;
        }
        for (i, (a, b)) in pushed.iter().zip(&target_weights).enumerate() {
            if (*a - *b).abs() > T::weight_tol() {
                return Err(Error::InvalidMap(format!(
                    "part {i}: preimage mass {a} differs from target mass {b}"
                )));
            }
        }
        Ok(Self {
            source_weights,
            target_weights,
            map,
        })
    }

    /// Split every target part into `factor` equal pieces; piece `j` maps to
    /// part `j / factor`.
    pub fn uniform_refinement(target_weights: Vec<T>, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("refinement factor must be positive".into()));
        }
        let f = T::from_usize(factor).unwrap();
        let source = target_weights
            .iter()
            .flat_map(|&p| std::iter::repeat_n(p / f, factor))
            .collect();
        let map = (0..target_weights.len() * factor).map(|j| j / factor).collect();
        Self::new(source, target_weights, map)
    }

    /// Relabelling: source part `j` is target part `perm[j]`.
    pub fn permutation(target_weights: Vec<T>, perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; target_weights.len()];
        for &j in &perm {
            match seen.get_mut(j) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::InvalidMap("not a permutation".into())),
            }
        }
        let source = perm.iter().map(|&j| target_weights[j]).collect();
        Self::new(source, target_weights, perm)
    }

    pub fn source_weights(&self) -> &[T] {
        &self.source_weights
    }

    pub fn target_weights(&self) -> &[T] {
        &self.target_weights
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Composition `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &FiniteMPMap<T>) -> Result<Self> {
        if inner.target_weights.len() != self.source_weights.len() {
            return Err(Error::InvalidMap("maps are not composable".into()));
        }
        let map = inner.map.iter().map(|&j| self.map[j]).collect();
        Self::new(inner.source_weights.clone(), self.target_weights.clone(), map)
    }
}

/// Pull-back `W^φ(x, y) = W(φ(x), φ(y))`.
pub fn pullback<T: Scalar>(w: &StepKernel<T>, phi: &FiniteMPMap<T>) -> Result<StepKernel<T>> {
    let m = w.parts();
    if phi.target_weights.len() != m
        || phi
            .target_weights
            .iter()
            .zip(w.weights())
            .any(|(a, b)| (*a - *b).abs() > T::weight_tol())
    {
        return Err(Error::InvalidMap(
            "map target weights do not match the kernel's parts".into(),
        ));
    }
    let k = phi.map.len();
    let mut values = Vec::with_capacity(k * k);
    for &a in &phi.map {
        for &b in &phi.map {
            values.push(w.value(a, b));
        }
    }
    StepKernel::from_flat(phi.source_weights.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_pullback() {
        let w = StepKernel::constant(0.7f64);
        let phi = FiniteMPMap::new(vec![0.5, 0.5], vec![1.0], vec![0, 0]).unwrap();
        let p = pullback(&w, &phi).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.5]);
        assert_eq!(p.to_rows(), vec![vec![0.7, 0.7], vec![0.7, 0.7]]);
    }

    #[test]
    fn doubling_map_pullback() {
        let w = StepKernel::uniform(vec![vec![1.0f64, 0.0], vec![0.0, 1.0]]).unwrap();
        let phi = FiniteMPMap::uniform_refinement(vec![0.5, 0.5], 2).unwrap();
        assert_eq!(phi.map(), &[0, 0, 1, 1]);
        let p = pullback(&w, &phi).unwrap();
        assert_eq!(
            p.to_rows(),
            vec![
                vec![1.0, 1.0, 0.0, 0.0],
                vec![1.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 1.0],
                vec![0.0, 0.0, 1.0, 1.0],
            ]
        );
    }

    #[test]
    fn rejects_non_measure_preserving() {
        assert!(FiniteMPMap::new(vec![0.25, 0.75], vec![0.5, 0.5], vec![0, 1]).is_err());
        assert!(FiniteMPMap::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![0, 2]).is_err());
        assert!(FiniteMPMap::permutation(vec![0.5, 0.5], vec![0, 0]).is_err());
        let w = StepKernel::uniform(vec![vec![1.0f64; 3]; 3]).unwrap();
        let phi = FiniteMPMap::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![1, 0]).unwrap();
        assert!(matches!(pullback(&w, &phi), Err(Error::InvalidMap(_))));
    }

    #[test]
    fn composition() {
        let outer = FiniteMPMap::uniform_refinement(vec![0.5f64, 0.5], 2).unwrap();
        let inner = FiniteMPMap::permutation(vec![0.25; 4], vec![3, 2, 1, 0]).unwrap();
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c.map(), &[1, 1, 0, 0]);
    }
}
