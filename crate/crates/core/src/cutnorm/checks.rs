use super::{cut_norm, Variant};
use crate::kernels::StepKernel;
use crate::scalar::Scalar;

/// One inequality `lhs <= rhs` with its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck<T> {
    pub name: &'static str,
    pub lhs: T,
    pub rhs: T,
    pub pass: bool,
}

impl<T: Scalar> InequalityCheck<T> {
    pub(crate) fn new(name: &'static str, lhs: T, rhs: T, slack: T) -> Self {
        Self {
            name,
            lhs,
            rhs,
            pass: lhs <= rhs + slack,
        }
    }
}

/// Values of the five set/sign variants and the equivalence inequalities
/// between them. Variants four and five are reported only for kernels with a
/// vanishing diagonal, where vertex enumeration is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport<T> {
    pub cn1: T,
    pub cn2: T,
    pub cn3: T,
    pub cn4: Option<T>,
    pub cn5: Option<T>,
    pub checks: Vec<InequalityCheck<T>>,
}

impl<T: Scalar> NormReport<T> {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn check_norm_inequalities<T: Scalar>(k: &StepKernel<T>) -> NormReport<T> {
    let slack = T::lit(1e-12);
    let cn = |v| cut_norm(k, v).value;
    let (cn1, cn2, cn3) = (cn(Variant::One), cn(Variant::Two), cn(Variant::Three));
    let four = T::lit(4.0);
    let half = T::lit(0.5);
    let mut checks = vec![
        InequalityCheck::new("cn1 <= cn2", cn1, cn2, slack),
        InequalityCheck::new("cn2 <= 4 cn1", cn2, four * cn1, slack),
        InequalityCheck::new("cn1/2 <= cn3", half * cn1, cn3, slack),
        InequalityCheck::new("cn3 <= cn1", cn3, cn1, slack),
        InequalityCheck::new("|int K| <= cn1", k.integrate(|v| v).abs(), cn1, slack),
        InequalityCheck::new("cn1 <= |K|_1", cn1, k.l1_norm(), slack),
    ];
    let (cn4, cn5) = if k.diagonal_vanishes() {
        let (c4, c5) = (cn(Variant::Four), cn(Variant::Five));
        checks.extend([
            InequalityCheck::new("cn1/4 <= cn4", cn1 / four, c4, slack),
            InequalityCheck::new("cn4 <= cn1", c4, cn1, slack),
            InequalityCheck::new("2 cn4/3 <= cn5", T::lit(2.0) * c4 / T::lit(3.0), c5, slack),
            InequalityCheck::new("cn5 <= cn4", c5, c4, slack),
        ]);
        (Some(c4), Some(c5))
    } else {
        (None, None)
    };
    NormReport {
        cn1,
        cn2,
        cn3,
        cn4,
        cn5,
        checks,
    }
}
