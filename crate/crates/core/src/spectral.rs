//! Spectrum of the integral operator of a step kernel.
//!
//! On the span of part indicators the operator acts as `V D` with
//! `D = diag(weights)`; it is similar to the symmetric `D^1/2 V D^1/2`, whose
//! eigenvalues are computed here. The operator vanishes off that span.

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use num_traits::Float;

use crate::cutnorm::{check_norm_inequalities, cut_norm, InequalityCheck, Variant};
use crate::error::{Error, Result};
use crate::homdensity::cycle_density;
use crate::kernels::StepKernel;
use crate::scalar::Scalar;

/// Schatten exponents used by [`spectral_checks`].
pub const SANDWICH_EXPONENTS: [f64; 3] = [3.0, 4.0, 6.0];

/// Eigenvalues sorted by decreasing absolute value.
pub fn eigenvalues<T: Scalar + RealField>(w: &StepKernel<T>) -> Vec<T> {
    let m = w.parts();
    let root: Vec<T> = w.weights().iter().map(|&p| Float::sqrt(p)).collect();
    let s = DMatrix::from_fn(m, m, |i, j| root[i] * root[j] * w.value(i, j));
    let mut ev: Vec<T> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| {
        Float::abs(*b)
            .partial_cmp(&Float::abs(*a))
            .unwrap()
            .then(b.partial_cmp(a).unwrap())
    });
    ev
}

/// `(sum |lambda_i|^p)^(1/p)`.
pub fn schatten<T: Scalar + RealField>(w: &StepKernel<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::InvalidArgument(format!("Schatten exponent {p} < 1")));
    }
    Ok(schatten_of(&eigenvalues(w), p))
}

fn schatten_of<T: Scalar>(ev: &[T], p: T) -> T {
    let top = ev.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    if top == T::zero() {
        return T::zero();
    }
    // scale by the largest modulus to keep powers in range
    let s: T = ev.iter().map(|&x| (x.abs() / top).powf(p)).sum();
    top * s.powf(T::one() / p)
}

/// The operator norm on `L2`, i.e. the largest `|lambda|`.
pub fn opnorm22<T: Scalar + RealField>(w: &StepKernel<T>) -> T {
    eigenvalues(w).first().map_or(T::zero(), |x| Float::abs(*x))
}

/// Values and outcomes of the spectral inequalities for a kernel bounded
/// by one in absolute value.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport<T> {
    pub eigenvalues: Vec<T>,
    pub cn2: T,
    pub opnorm22: T,
    /// `(p, ||W||_{S_p})` for each checked exponent.
    pub schatten: Vec<(T, T)>,
    pub c4_density: T,
    pub checks: Vec<InequalityCheck<T>>,
}

impl<T: Scalar> SpectralReport<T> {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// For each `p`, `cn2 <= ||T||_{2,2} <= ||W||_{S_p} <= sqrt2 cn2^(1/2-1/p)`,
/// then `t(C4)/4 <= cn2 <= t(C4)^(1/4)`.
pub fn spectral_checks<T: Scalar + RealField>(w: &StepKernel<T>, exponents: &[T]) -> Result<SpectralReport<T>> {
    if w.max_abs() > T::one() {
        return Err(Error::InvalidInput(format!(
            "kernel values reach {}, the inequalities need |W| <= 1",
            w.max_abs()
        )));
    }
    let slack = T::lit(1e-9);
    let ev = eigenvalues(w);
    let cn2 = cut_norm(w, Variant::Two).value;
    let op = ev.first().map_or(T::zero(), |x| Float::abs(*x));
    let mut checks = vec![InequalityCheck::new("cn2 <= op", cn2, op, slack)];
    let mut sp = Vec::new();
    let half = T::lit(0.5);
    for &p in exponents {
        if !(p >= T::lit(2.0)) {
            return Err(Error::InvalidArgument(format!("sandwich exponent {p} < 2")));
        }
        let s = schatten_of(&ev, p);
        checks.push(InequalityCheck::new("op <= S_p", op, s, slack));
        let bound = T::SQRT_2() * Float::powf(cn2, half - T::one() / p);
        checks.push(InequalityCheck::new("S_p <= sqrt2 cn2^(1/2-1/p)", s, bound, slack));
        sp.push((p, s));
    }
    let c4 = cycle_density(4, w)?;
    checks.push(InequalityCheck::new("t(C4)/4 <= cn2", c4 / T::lit(4.0), cn2, slack));
    checks.push(InequalityCheck::new("cn2 <= t(C4)^(1/4)", cn2, Float::powf(Float::max(c4, T::zero()), T::lit(0.25)), slack));
    Ok(SpectralReport {
        eigenvalues: ev,
        cn2,
        opnorm22: op,
        schatten: sp,
        c4_density: c4,
        checks,
    })
}

/// Runs both the cut-norm and spectral inequality families.
pub fn all_norm_checks<T: Scalar + RealField>(w: &StepKernel<T>) -> Result<Vec<InequalityCheck<T>>> {
    let mut out = check_norm_inequalities(w).checks;
    let ps: Vec<T> = SANDWICH_EXPONENTS.iter().map(|&p| T::lit(p)).collect();
    out.extend(spectral_checks(w, &ps)?.checks);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{builtin, pullback, Builtin, Discretization, FiniteMPMap};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    fn lcg_kernel(seed: u64, m: usize) -> StepKernel<f64> {
        let mut s = seed ^ 0xDEAD_BEEF;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let w: Vec<f64> = (0..m).map(|_| 0.1 + next()).collect();
        let tot: f64 = w.iter().sum();
        let vals = (0..m).map(|_| (0..m).map(|_| 2.0 * next() - 1.0).collect()).collect();
        StepKernel::new(w.iter().map(|x| x / tot).collect(), vals).unwrap()
    }

    #[test]
    fn small_spectra() {
        let c = StepKernel::uniform(vec![vec![0.3f64; 3]; 3]).unwrap();
        assert!(close(&eigenvalues(&c), &[0.3, 0.0, 0.0], 1e-12));
        let b = builtin::<f64>(Builtin::Bipartite, 2, Discretization::Midpoint).unwrap();
        assert!(close(&eigenvalues(&b), &[0.5, -0.5], 1e-12));
        assert!((opnorm22(&b) - 0.5).abs() < 1e-12);
        let h = StepKernel::uniform(vec![vec![1.0f64, 1.0], vec![1.0, -1.0]]).unwrap();
        let r = 2f64.sqrt() / 2.0;
        assert!(close(&eigenvalues(&h), &[r, -r], 1e-12));
    }

    #[test]
    fn schatten_identities() {
        assert!((schatten(&StepKernel::constant(-0.7f64), 3.0).unwrap() - 0.7).abs() < 1e-12);
        assert!(schatten(&StepKernel::constant(0.5f64), 0.5).is_err());
        for seed in 0..20 {
            let w = lcg_kernel(seed, 1 + seed as usize % 6);
            assert!((schatten(&w, 2.0).unwrap() - w.l2_norm()).abs() < 1e-9);
            for k in [2, 3] {
                let s = schatten(&w, 2.0 * k as f64).unwrap().powi(2 * k as i32);
                assert!((s - cycle_density(2 * k, &w).unwrap()).abs() < 1e-9);
            }
            let tr: f64 = eigenvalues(&w).iter().sum();
            let diag: f64 = (0..w.parts()).map(|i| w.weights()[i] * w.value(i, i)).sum();
            assert!((tr - diag).abs() < 1e-10);
            let s: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 8.0].iter().map(|&p| schatten(&w, p).unwrap()).collect();
            assert!(s.windows(2).all(|x| x[1] <= x[0] + 1e-12));
        }
    }

    #[test]
    fn refinement_pads_with_zeros() {
        let w = lcg_kernel(3, 3);
        let phi = FiniteMPMap::uniform_refinement(w.weights().to_vec(), 2).unwrap();
        let ev = eigenvalues(&pullback(&w, &phi).unwrap());
        let mut want = eigenvalues(&w);
        want.extend([0.0; 3]);
        assert!(close(&ev, &want, 1e-9), "{ev:?} vs {want:?}");
    }

    #[test]
    fn sandwich_passes() {
        for seed in 0..30 {
            let w = lcg_kernel(seed, 1 + seed as usize % 6);
            let r = spectral_checks(&w, &[3.0, 4.0, 6.0]).unwrap();
            assert!(r.all_pass(), "{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        }
        let z = spectral_checks(&StepKernel::zeros(vec![0.5f64, 0.5]).unwrap(), &[4.0]).unwrap();
        assert!(z.all_pass() && z.cn2 == 0.0 && z.opnorm22 == 0.0);
        assert!(spectral_checks(&StepKernel::constant(1.5f64), &[4.0]).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let b = builtin::<f32>(Builtin::Bipartite, 2, Discretization::Midpoint).unwrap();
        let ev = eigenvalues(&b);
        assert!((ev[0] - 0.5).abs() < 1e-6);
    }
}
