//! Valuations `v_{a,gamma}` on `K[X]` and `K(X)` given by pairs of
//! definition; equivalence of pairs, minimal-pair testing, extension
//! invariants and the transcendence-type classification.

use serde::{Deserialize, Serialize};

use num_rational::BigRational;
use num_traits::One;

use crate::algclose::{AlgElem, RefinePolicy};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::values::OrderedValue;

/// A pair `(a, gamma)` defining the valuation
/// `v_{a,gamma} f = min_i (v(c_i) + i*gamma)` over the expansion
/// `f = sum c_i (X - a)^i`.
#[derive(Clone, Debug)]
pub struct PairOfDefinition {
    pub center: AlgElem,
    pub gamma: OrderedValue,
}

/// Transcendence type of the extension defined by a pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PairClass {
    ValueTranscendental,
    ResidueTranscendental,
}

#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// A lower-degree element within `gamma` of the center, when one exists.
    pub witness: Option<AlgElem>,
}

impl PairOfDefinition {
    pub fn new(center: AlgElem, gamma: OrderedValue) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidValue);
        }
        if !center.is_exact() {
            return Err(Error::Invalid(
                "pair centers must be exact tower elements".into(),
            ));
        }
        Ok(PairOfDefinition { center, gamma })
    }

    fn lex_context(&self) -> bool {
        matches!(self.gamma, OrderedValue::LexFin(..))
    }

    /// Lift a plain value into the pair's group context.
    pub fn embed(&self, v: &OrderedValue) -> OrderedValue {
        if self.lex_context() {
            v.lex_lift()
        } else {
            v.clone()
        }
    }

    /// `v_{a,gamma} f` for a polynomial over the ground field or over a
    /// prefix level of the center's tower.
    pub fn pair_val(&self, f: &Poly) -> Result<OrderedValue> {
        if f.is_zero() {
            return Ok(OrderedValue::PosInf);
        }
        let tower = self.center.tower();
        let lifted = lift_poly_into(tower, f)?;
        let coeffs = lifted.taylor_shift(self.center.expr());
        let mut best: Option<OrderedValue> = None;
        for (i, c) in coeffs.iter().enumerate() {
            let vc = tower.val_top(c);
            if !vc.is_finite() {
                continue;
            }
            let term = self
                .embed(&vc)
                .checked_add(&self.gamma.int_scale(i as i64)?)?;
            best = Some(match best.take() {
                None => term,
                Some(b) => b.min_of(&term)?,
            });
        }
        Ok(best.unwrap_or(OrderedValue::PosInf))
    }

    /// `v_{a,gamma}(num/den) = v_{a,gamma} num - v_{a,gamma} den`.
    pub fn pair_val_fraction(&self, num: &Poly, den: &Poly) -> Result<OrderedValue> {
        if den.is_zero() {
            return Err(Error::ZeroElement);
        }
        let vn = self.pair_val(num)?;
        let vd = self.pair_val(den)?;
        vn.checked_sub(&vd)
    }

    /// `(a', gamma)` defines the same valuation iff `v(a - a') >= gamma`.
    pub fn same_valuation(&self, other: &PairOfDefinition, policy: &RefinePolicy) -> Result<bool> {
        if self.gamma != other.gamma {
            return Err(Error::GammaMismatch);
        }
        let cap = self.gamma.as_rational()?.clone() + BigRational::one();
        let d = self.center.dist_capped(&other.center, &cap, policy)?;
        Ok(self.embed(&d).compare(&self.gamma)? != std::cmp::Ordering::Less)
    }

    /// Minimal-pair test (MP2): no element of strictly smaller degree lies
    /// within `gamma` of the center. The search walks the center's best
    /// in-tower truncations, the strategy the tower shapes of this crate
    /// make certifiable.
    pub fn is_minimal(&self, policy: &RefinePolicy) -> Result<MinimalityReport> {
        let d = self.center.degree()?;
        if d == 1 {
            return Ok(MinimalityReport { minimal: true, witness: None });
        }
        let cap = self.gamma.as_rational()?.clone() + BigRational::one();
        let walk = self.center.truncation_walk(&cap)?;
        let mut witness: Option<(AlgElem, OrderedValue)> = None;
        for step in &walk {
            let trunc = self.center.truncation_elem(step);
            let deg = trunc.degree()?;
            if deg >= d {
                continue;
            }
            let gap = self.embed(&step.gap);
            if gap.compare(&self.gamma)? != std::cmp::Ordering::Less {
                let better = match &witness {
                    None => true,
                    Some((_, old)) => gap.compare(old)? == std::cmp::Ordering::Greater,
                };
                if better {
                    witness = Some((trunc, gap));
                }
            }
        }
        let _ = policy;
        match witness {
            Some((w, _)) => Ok(MinimalityReport { minimal: false, witness: Some(w) }),
            None => Ok(MinimalityReport { minimal: true, witness: None }),
        }
    }

    /// Value transcendental iff `gamma` falls outside the divisible hull of
    /// the ground value group — here, exactly the lexicographic values with
    /// a nonzero second coordinate.
    pub fn classify(&self) -> PairClass {
        match &self.gamma {
            OrderedValue::LexFin(_, k) if !num_traits::Zero::is_zero(k) => {
                PairClass::ValueTranscendental
            }
            _ => PairClass::ResidueTranscendental,
        }
    }
}

/// Extension invariants `(e, f)` of `K(a) | K`.
pub fn ext_invariants(a: &AlgElem, policy: &RefinePolicy) -> Result<(usize, usize)> {
    a.ext_invariants(policy)
}

/// Lift a polynomial over the ground field (or over a prefix level of the
/// tower) to the tower's top level.
pub(crate) fn lift_poly_into(
    tower: &std::sync::Arc<crate::algclose::Tower>,
    f: &Poly,
) -> Result<Poly> {
    if f.ring() == tower.top_field() {
        return Ok(f.clone());
    }
    if *f.ring() == tower.ground.element_field() {
        return Ok(tower.poly_from_ground(f));
    }
    for i in 0..=tower.num_steps() {
        if f.ring() == &tower.level(i).field {
            let coeffs: Vec<_> = f
                .coeffs()
                .iter()
                .map(|c| {
                    let mut cur = c.clone();
                    for j in i + 1..=tower.num_steps() {
                        cur = tower.level(j).field.lift_base(cur);
                    }
                    cur
                })
                .collect();
            return Ok(Poly::new(tower.top_field().clone(), coeffs));
        }
    }
    Err(Error::RingMismatch)
}
