use super::{StepGraphon, StepKernel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Analytic graphon families available as `m`-part discretizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin<T> {
    /// `W = p`.
    Constant(T),
    /// `W(x, y) = x y`.
    Product,
    /// `W(x, y) = 1{x + y > 1}` with a strict inequality.
    Half,
    /// The complete bipartite graphon `[[0,1],[1,0]]` (requires `m = 2`).
    Bipartite,
}

impl<T: Scalar> Builtin<T> {
    /// Parse `constant:<p>`, `product`, `half` or `bipartite`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "product" => Ok(Self::Product),
            "half" => Ok(Self::Half),
            "bipartite" => Ok(Self::Bipartite),
            other => other
                .strip_prefix("constant:")
                .and_then(|p| p.parse::<f64>().ok())
                .map(|p| Self::Constant(T::lit(p)))
                .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin graphon '{other}'"))),
        }
    }
}

/// How a continuous family is sampled onto the grid of `m` equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discretization {
    /// Value at the cell midpoint.
    #[default]
    Midpoint,
    /// Average over the cell.
    CellAverage,
}

/// Fraction of the unit square `[0,1]^2` where `u + v > t`.
fn upper_area<T: Scalar>(t: T) -> T {
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    if t <= T::zero() {
        T::one()
    } else if t >= two {
        T::zero()
    } else if t <= T::one() {
        T::one() - t * t * half
    } else {
        (two - t) * (two - t) * half
    }
}

pub fn builtin<T: Scalar>(family: Builtin<T>, m: usize, mode: Discretization) -> Result<StepGraphon<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one part".into()));
    }
    let mf = T::from_usize(m).unwrap();
    let h = T::one() / mf;
    let half = T::lit(0.5);
    let mid = |i: usize| (T::from_usize(i).unwrap() + half) * h;
    let lo = |i: usize| T::from_usize(i).unwrap() * h;

    let rows: Vec<Vec<T>> = match family {
        Builtin::Constant(p) => vec![vec![p; m]; m],
        // The cell average of x*y factors into the product of midpoints, so
        // both modes agree.
        Builtin::Product => (0..m)
            .map(|i| (0..m).map(|j| mid(i) * mid(j)).collect())
            .collect(),
        Builtin::Half => (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| match mode {
                        Discretization::Midpoint => {
                            if mid(i) + mid(j) > T::one() {
                                T::one()
                            } else {
                                T::zero()
                            }
                        }
                        Discretization::CellAverage => upper_area((T::one() - lo(i) - lo(j)) / h),
                    })
                    .collect()
            })
            .collect(),
        Builtin::Bipartite => {
            if m != 2 {
                return Err(Error::InvalidArgument("bipartite graphon has exactly 2 parts".into()));
            }
            vec![vec![T::zero(), T::one()], vec![T::one(), T::zero()]]
        }
    };
    StepGraphon::try_from_kernel(StepKernel::uniform(rows)?)
}
