//! Partial dilatations of a rank-1 abelian group, modeled on `Z`.
//!
//! A partial dilatation with data `(p, q)` is the map `q*v -> p*v`, defined on
//! the subgroup `qZ`. Its rate `p/q` is independent of the representative
//! `(p, q)` and multiplies under composition, which is what makes it a
//! convenient oracle for holonomy products along cycles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDilatation {
    p: BigInt,
    q: BigInt,
}

impl PartialDilatation {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if p.is_zero() || q.is_zero() {
            return Err(Error::ZeroDilatationEntry);
        }
        Ok(PartialDilatation { p, q })
    }

    pub fn identity() -> Self {
        PartialDilatation {
            p: BigInt::one(),
            q: BigInt::one(),
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// Index of the guaranteed domain `qZ` in `Z`.
    pub fn domain_index(&self) -> BigInt {
        self.q.abs()
    }

    pub fn rate(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }

    /// `self ∘ other`: apply `other` first. Defined at least on `(q1*q2)Z`.
    pub fn compose(&self, other: &PartialDilatation) -> PartialDilatation {
        PartialDilatation {
            p: &self.p * &other.p,
            q: &self.q * &other.q,
        }
    }

    /// Applies the map to `v`, or `None` when `v` is outside `qZ`.
    pub fn apply(&self, v: &BigInt) -> Option<BigInt> {
        let (quot, rem) = v.div_rem(&self.q);
        rem.is_zero().then(|| quot * &self.p)
    }
}

/// Result of pushing a point through a chain of partial dilatations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionOutcome {
    Defined(BigInt),
    /// The point left the guaranteed domain before factor `step` (0-based).
    OutsideDomain {
        step: usize,
    },
}

impl ActionOutcome {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            ActionOutcome::Defined(v) => Some(v),
            ActionOutcome::OutsideDomain { .. } => None,
        }
    }
}

/// Runs `start` through `factors` in order, the first factor applied first.
pub fn simulate_partial_action(factors: &[PartialDilatation], start: &BigInt) -> ActionOutcome {
    let mut point = start.clone();
    for (step, f) in factors.iter().enumerate() {
        match f.apply(&point) {
            Some(next) => point = next,
            None => return ActionOutcome::OutsideDomain { step },
        }
    }
    ActionOutcome::Defined(point)
}

/// Composite of a chain, first factor applied first.
pub fn fold_chain<'a>(
    factors: impl IntoIterator<Item = &'a PartialDilatation>,
) -> PartialDilatation {
    factors
        .into_iter()
        .fold(PartialDilatation::identity(), |acc, f| f.compose(&acc))
}
