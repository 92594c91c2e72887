//! Certified extension towers over a ground field. Every step is either
//! unramified (integral minimal polynomial with irreducible reduction) or
//! totally ramified (single Newton-polygon slope whose order in the value
//! group of the level below equals the step degree). For such steps no
//! cancellation can occur across monomials in the generator, so the
//! valuation of every tower element is the exact minimum over its
//! coefficients, and residues are computed recursively.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{poly_is_irreducible_finite, ExactField, FElem};
use crate::ground::GroundField;
use crate::poly::{raw, Poly};
use crate::values::OrderedValue;

use super::roots::newton_multiset;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepKind {
    Unramified,
    TotallyRamified,
}

#[derive(Clone, Debug)]
pub struct TowerStep {
    /// Monic minimal polynomial over the level below.
    pub minpoly: Vec<FElem>,
    pub kind: StepKind,
    /// Valuation of the generator, exact.
    pub gen_val: BigRational,
    /// Step degree.
    pub degree: usize,
}

impl PartialEq for TowerStep {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.kind == other.kind
    }
}

#[derive(Clone, Debug)]
pub struct LevelData {
    /// Element field of this level (nested quotient chain).
    pub field: ExactField,
    /// Residue field of this level.
    pub residue: ExactField,
    /// Ramification index over the ground field.
    pub e: usize,
    /// Residue degree over the ground residue field.
    pub f: usize,
}

/// A certified tower of adjunction steps over a ground field.
#[derive(Debug)]
pub struct Tower {
    pub ground: GroundField,
    steps: Vec<TowerStep>,
    levels: Vec<LevelData>,
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.steps == other.steps
    }
}

impl Tower {
    pub fn base(ground: GroundField) -> Arc<Tower> {
        let levels = vec![LevelData {
            field: ground.element_field(),
            residue: ground.residue_field(),
            e: 1,
            f: 1,
        }];
        Arc::new(Tower { ground, steps: vec![], levels })
    }

    pub fn steps(&self) -> &[TowerStep] {
        &self.steps
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn top_level(&self) -> &LevelData {
        self.levels.last().unwrap()
    }

    pub fn level(&self, i: usize) -> &LevelData {
        &self.levels[i]
    }

    pub fn top_field(&self) -> &ExactField {
        &self.top_level().field
    }

    /// Total degree over the ground field.
    pub fn degree(&self) -> usize {
        self.steps.iter().map(|s| s.degree).product()
    }

    /// Accumulated ramification index; the value group of the top level is
    /// `(1/e) Z`.
    pub fn e_total(&self) -> usize {
        self.top_level().e
    }

    pub fn f_total(&self) -> usize {
        self.top_level().f
    }

    /// Certify and append one adjunction step.
    pub fn extend(self: &Arc<Self>, minpoly: Vec<FElem>) -> Result<Arc<Tower>> {
        let minpoly = raw::trim(minpoly);
        let top = self.top_field().clone();
        let deg = match raw::deg(&minpoly) {
            Some(d) if d >= 2 => d,
            _ => {
                return Err(Error::Invalid(
                    "tower step needs a monic minimal polynomial of degree >= 2".into(),
                ))
            }
        };
        if !top.is_one(minpoly.last().unwrap()) {
            return Err(Error::Invalid("tower step minimal polynomial must be monic".into()));
        }
        if top.is_zero(&minpoly[0]) {
            return Err(Error::UnsupportedTower(
                "constant term vanishes: polynomial is reducible".into(),
            ));
        }
        let vals: Vec<OrderedValue> = minpoly.iter().map(|c| self.val_top(c)).collect();
        let multiset = newton_multiset(&vals)?;
        if multiset.len() != 1 {
            return Err(Error::UnsupportedTower(format!(
                "step minimal polynomial has {} distinct root valuations; it factors over the completion",
                multiset.len()
            )));
        }
        let (q, len) = multiset.into_iter().next().unwrap();
        debug_assert_eq!(len, deg);
        let e_here = self.e_total();
        let scaled = &q * BigRational::from_integer(BigInt::from(e_here as i64));
        let e_rel = scaled
            .denom()
            .to_usize()
            .ok_or_else(|| Error::Invalid("ramification index overflow".into()))?;
        let rchar = self.ground.residue_char();
        let (kind, new_level) = if e_rel == deg {
            if rchar > 0 && !self.ground.is_padic() && e_rel % (rchar as usize) == 0 {
                return Err(Error::UnsupportedTower(
                    "wildly ramified step over a t-adic ground field".into(),
                ));
            }
            let lvl = LevelData {
                field: ExactField::Rationals, // placeholder, fixed below
                residue: self.top_level().residue.clone(),
                e: self.e_total() * deg,
                f: self.f_total(),
            };
            (StepKind::TotallyRamified, lvl)
        } else if q.is_zero() && e_rel == 1 {
            // candidate unramified step: integral coefficients, irreducible reduction
            for v in &vals {
                if let OrderedValue::Fin(x) = v {
                    if x < &BigRational::zero() {
                        return Err(Error::UnsupportedTower(
                            "unramified step needs integral coefficients".into(),
                        ));
                    }
                }
            }
            let reduced: Result<Vec<FElem>> =
                minpoly.iter().map(|c| self.residue_top(c)).collect();
            let reduced = reduced?;
            let chain = &self.top_level().residue;
            if chain.is_finite() {
                if !poly_is_irreducible_finite(chain, &reduced) {
                    return Err(Error::UnsupportedTower(
                        "reduction of the step minimal polynomial is not irreducible".into(),
                    ));
                }
            } else {
                cheap_irreducibility_checks(chain, &reduced)?;
            }
            let new_res = ExactField::extension(chain.clone(), reduced)?;
            let lvl = LevelData {
                field: ExactField::Rationals, // placeholder, fixed below
                residue: new_res,
                e: self.e_total(),
                f: self.f_total() * deg,
            };
            (StepKind::Unramified, lvl)
        } else {
            return Err(Error::UnsupportedTower(format!(
                "step of degree {deg} with generator valuation {q} is neither unramified nor totally ramified"
            )));
        };
        let field = ExactField::extension(top, minpoly.clone())?;
        let mut levels = self.levels.clone();
        levels.push(LevelData { field, ..new_level });
        let mut steps = self.steps.clone();
        steps.push(TowerStep { minpoly, kind, gen_val: q, degree: deg });
        Ok(Arc::new(Tower { ground: self.ground.clone(), steps, levels }))
    }

    /// Append the radical step `X^e - w`.
    pub fn extend_radical(self: &Arc<Self>, w: &FElem, e: usize) -> Result<Arc<Tower>> {
        let top = self.top_field();
        let mut coeffs = vec![top.neg(w)];
        for _ in 1..e {
            coeffs.push(top.zero());
        }
        coeffs.push(top.one());
        self.extend(coeffs)
    }

    /// Append the unramified step lifting a monic irreducible polynomial
    /// over the residue chain.
    pub fn extend_unramified_lift(self: &Arc<Self>, res_poly: &[FElem]) -> Result<Arc<Tower>> {
        let lifted: Vec<FElem> = res_poly.iter().map(|c| self.lift_residue_top(c)).collect();
        self.extend(lifted)
    }

    /// Generator of the top step as a top-level element.
    pub fn top_generator(&self) -> FElem {
        assert!(!self.steps.is_empty());
        let below = &self.levels[self.levels.len() - 2].field;
        FElem::Ext(vec![below.zero(), below.one()])
    }

    /// Lift a ground element to the top level.
    pub fn elem_from_ground(&self, x: &FElem) -> FElem {
        let mut cur = x.clone();
        for lvl in &self.levels[1..] {
            cur = lvl.field.lift_base(cur);
        }
        cur
    }

    /// Lift a polynomial over the ground field to the top level.
    pub fn poly_from_ground(&self, f: &Poly) -> Poly {
        let coeffs: Vec<FElem> = f.coeffs().iter().map(|c| self.elem_from_ground(c)).collect();
        Poly::new(self.top_field().clone(), coeffs)
    }

    /// Valuation of a top-level element (exact).
    pub fn val_top(&self, x: &FElem) -> OrderedValue {
        self.val_at(self.levels.len() - 1, x)
    }

    pub fn val_at(&self, level: usize, x: &FElem) -> OrderedValue {
        if level == 0 {
            return self.ground.val(x);
        }
        let step = &self.steps[level - 1];
        let coeffs = match x {
            FElem::Ext(v) => v,
            _ => panic!("tower element at level {level} must be an extension element"),
        };
        let mut best: Option<BigRational> = None;
        for (i, c) in coeffs.iter().enumerate() {
            match self.val_at(level - 1, c) {
                OrderedValue::PosInf => continue,
                OrderedValue::Fin(v) => {
                    let total = v + &step.gen_val * BigRational::from_integer(BigInt::from(i as i64));
                    best = Some(match best.take() {
                        None => total,
                        Some(b) => b.min(total),
                    });
                }
                _ => unreachable!(),
            }
        }
        match best {
            None => OrderedValue::PosInf,
            Some(v) => OrderedValue::Fin(v),
        }
    }

    /// Residue of a top-level element with nonnegative valuation, as an
    /// element of the residue chain.
    pub fn residue_top(&self, x: &FElem) -> Result<FElem> {
        self.residue_at(self.levels.len() - 1, x)
    }

    fn residue_at(&self, level: usize, x: &FElem) -> Result<FElem> {
        if level == 0 {
            return self.ground.residue(x);
        }
        let step = &self.steps[level - 1];
        match self.val_at(level, x).compare(&OrderedValue::zero())? {
            std::cmp::Ordering::Less => return Err(Error::NegativeValue),
            std::cmp::Ordering::Greater => return Ok(self.level(level).residue.zero()),
            std::cmp::Ordering::Equal => {}
        }
        let coeffs = match x {
            FElem::Ext(v) => v.clone(),
            _ => panic!("tower element expected"),
        };
        match step.kind {
            StepKind::TotallyRamified => {
                // only the constant monomial can have valuation in the lower
                // value group, so the unit part sits there
                let c0 = coeffs.first().cloned().unwrap_or_else(|| {
                    self.level(level - 1).field.zero()
                });
                self.residue_at(level - 1, &c0)
            }
            StepKind::Unramified => {
                let mut res_coeffs = vec![];
                for c in &coeffs {
                    res_coeffs.push(self.residue_at(level - 1, c)?);
                }
                let chain = &self.level(level).residue;
                Ok(match chain {
                    ExactField::Ext(_) => {
                        let trimmed = raw::trim(res_coeffs);
                        FElem::Ext(trimmed)
                    }
                    _ => unreachable!("unramified level residue is an extension"),
                })
            }
        }
    }

    /// Canonical section of the residue map at the top level.
    pub fn lift_residue_top(&self, r: &FElem) -> FElem {
        self.lift_residue_at(self.levels.len() - 1, r)
    }

    fn lift_residue_at(&self, level: usize, r: &FElem) -> FElem {
        if level == 0 {
            return self.ground.lift(r);
        }
        let step = &self.steps[level - 1];
        match step.kind {
            StepKind::TotallyRamified => {
                let below = self.lift_residue_at(level - 1, r);
                self.level(level).field.lift_base(below)
            }
            StepKind::Unramified => {
                let coords = match r {
                    FElem::Ext(v) => v.clone(),
                    other => {
                        // element of a lower part of the chain
                        vec![other.clone()]
                    }
                };
                let lifted: Vec<FElem> =
                    coords.iter().map(|c| self.lift_residue_at(level - 1, c)).collect();
                FElem::Ext(raw::trim(lifted))
            }
        }
    }

    /// An exact monomial in the generators (and the ground uniformizer) of
    /// valuation `q`; errors when `q` is outside the value group.
    pub fn monomial_of_value(&self, q: &BigRational) -> Result<FElem> {
        let mut want = q.clone();
        let mut factors: Vec<(usize, usize)> = vec![]; // (level index, power)
        for (idx, step) in self.steps.iter().enumerate().rev() {
            if step.kind == StepKind::Unramified {
                continue;
            }
            let below_e = self.levels[idx].e;
            // pick 0 <= r < degree with want - r*gen_val in (1/below_e) Z
            let mut chosen = None;
            for r in 0..step.degree {
                let rem = &want
                    - &step.gen_val * BigRational::from_integer(BigInt::from(r as i64));
                let scaled = &rem * BigRational::from_integer(BigInt::from(below_e as i64));
                if scaled.denom().is_one() {
                    chosen = Some((r, rem));
                    break;
                }
            }
            match chosen {
                Some((r, rem)) => {
                    if r > 0 {
                        factors.push((idx + 1, r));
                    }
                    want = rem;
                }
                None => {
                    return Err(Error::Invalid(format!(
                        "value {q} is not in the value group of the tower"
                    )))
                }
            }
        }
        if !want.denom().is_one() {
            return Err(Error::Invalid(format!(
                "value {q} is not in the value group of the tower"
            )));
        }
        // assemble pi^want * prod gen_level^r
        let top = self.top_field();
        let mut acc = {
            let z = want.numer();
            let pi = self.elem_from_ground(&self.ground.uniformizer());
            let steps = z.magnitude().to_u64().expect("desk-scale power") as u32;
            let base = if z.is_negative() { top.inv(&pi)? } else { pi };
            top.pow_u64(&base, steps as u64)
        };
        for (level_idx, r) in factors {
            // generator of step level_idx as a top-level element
            let mut gen = {
                let below = &self.levels[level_idx - 1].field;
                FElem::Ext(vec![below.zero(), below.one()])
            };
            for lvl in &self.levels[level_idx + 1..] {
                gen = lvl.field.lift_base(gen);
            }
            acc = top.mul(&acc, &top.pow_u64(&gen, r as u64));
        }
        Ok(acc)
    }

    /// Is `self` an initial segment of `other` (same ground, same leading steps)?
    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        self.ground == other.ground
            && self.steps.len() <= other.steps.len()
            && self.steps.iter().zip(other.steps.iter()).all(|(a, b)| a == b)
    }

    /// Lift an element of a prefix tower into this tower.
    pub fn lift_from_prefix(&self, prefix: &Tower, x: &FElem) -> FElem {
        debug_assert!(prefix.is_prefix_of(self));
        let mut cur = x.clone();
        for lvl in &self.levels[prefix.levels.len()..] {
            cur = lvl.field.lift_base(cur);
        }
        cur
    }

    /// Minimal polynomial of a top-level element over the ground field,
    /// computed through the resultant cascade and a squarefree pass.
    pub fn minpoly_over_ground(&self, elem: &FElem) -> Result<Poly> {
        let char_poly = self.char_poly_over_ground(elem)?;
        let min = char_poly.squarefree_part()?;
        Ok(min)
    }

    fn char_poly_over_ground(&self, elem: &FElem) -> Result<Poly> {
        // X - elem, coefficients at the top level
        let mut px: Vec<FElem> = vec![self.top_field().neg(elem), self.top_field().one()];
        for level in (1..self.levels.len()).rev() {
            let low = &self.levels[level - 1].field;
            let step = &self.steps[level - 1];
            let du = step.degree;
            let dx = px.len() - 1;
            // bivariate coefficients b[l][i] at level-1: coefficient of u^l X^i
            let mut b: Vec<Vec<FElem>> = vec![vec![low.zero(); dx + 1]; du];
            for (i, c) in px.iter().enumerate() {
                let coords = match c {
                    FElem::Ext(v) => v.clone(),
                    _ => panic!("level element expected"),
                };
                for (l, coord) in coords.into_iter().enumerate() {
                    b[l][i] = coord;
                }
            }
            let dtotal = du * dx;
            let nodes = self.interpolation_nodes(level - 1, dtotal + 1);
            let mut samples = vec![];
            for x in nodes {
                // polynomial in u at X = x
                let mut pu: Vec<FElem> = vec![low.zero(); du];
                for (l, row) in b.iter().enumerate() {
                    pu[l] = raw::eval(low, row, &x);
                }
                let pu = raw::trim(pu);
                let value = if pu.is_empty() {
                    low.zero()
                } else {
                    raw::resultant(low, &step.minpoly, &pu)
                };
                samples.push((x, value));
            }
            px = raw::interpolate(low, &samples);
        }
        let ground_field = self.levels[0].field.clone();
        let poly = Poly::new(ground_field.clone(), px);
        if poly.is_zero() {
            return Err(Error::Invalid("characteristic polynomial vanished".into()));
        }
        // monic by construction of the cascade over monic step polynomials
        debug_assert!(poly.is_monic(), "characteristic polynomial should be monic");
        Ok(poly)
    }

    fn interpolation_nodes(&self, level: usize, n: usize) -> Vec<FElem> {
        let ground_field = self.ground.element_field();
        let rchar = self.ground.residue_char();
        let mut out = vec![];
        for j in 0..n {
            let g = match (&ground_field, rchar) {
                (ExactField::Rationals, _) => ground_field.from_i64(j as i64),
                (ExactField::RatFun(coeff), p) => {
                    // distinct nodes even when constants run out: base-p digits
                    // of j as coefficients of powers of t
                    let p = if p == 0 { u64::MAX } else { p };
                    let mut digits = vec![];
                    let mut rest = j as u64;
                    loop {
                        digits.push(coeff.from_i64((rest % p) as i64));
                        rest /= p;
                        if rest == 0 {
                            break;
                        }
                    }
                    ground_field
                        .fun_from_parts(digits, vec![coeff.one()])
                        .expect("node polynomial")
                }
                _ => unreachable!("ground element fields are Q or k(t)"),
            };
            let mut lifted = g;
            for lvl in &self.levels[1..=level] {
                lifted = lvl.field.lift_base(lifted);
            }
            out.push(lifted);
        }
        out
    }
}

fn cheap_irreducibility_checks(chain: &ExactField, poly: &[FElem]) -> Result<()> {
    // necessary conditions only: no roots among small rationals
    if let ExactField::Rationals = chain {
        for n in -12i64..=12 {
            for d in 1i64..=4 {
                let cand = FElem::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)));
                if chain.is_zero(&raw::eval(chain, poly, &cand)) {
                    return Err(Error::UnsupportedTower(
                        "reduction of the step minimal polynomial has a rational root".into(),
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt_tower(p: u64, c: i64) -> Arc<Tower> {
        // ground tower extended by X^2 - c
        let base = Tower::base(GroundField::padic(p).unwrap());
        let w = base.top_field().from_i64(c);
        base.extend_radical(&w, 2).unwrap()
    }

    #[test]
    fn ramified_step_certifies() {
        let t = sqrt_tower(2, -2); // sqrt(-2) over Q_2
        assert_eq!(t.steps()[0].kind, StepKind::TotallyRamified);
        assert_eq!(t.steps()[0].gen_val, rat(1, 2));
        assert_eq!(t.e_total(), 2);
        assert_eq!(t.f_total(), 1);
        let u = t.top_generator();
        assert_eq!(t.val_top(&u), OrderedValue::Fin(rat(1, 2)));
        // v(2u) = 3/2
        let two_u = t.top_field().mul(&t.elem_from_ground(&t.ground.parse_elem("2").unwrap()), &u);
        assert_eq!(t.val_top(&two_u), OrderedValue::Fin(rat(3, 2)));
    }

    #[test]
    fn unramified_step_certifies() {
        let t = sqrt_tower(5, -2); // sqrt(-2) over Q_5 is unramified
        assert_eq!(t.steps()[0].kind, StepKind::Unramified);
        assert_eq!(t.e_total(), 1);
        assert_eq!(t.f_total(), 2);
        let u = t.top_generator();
        assert_eq!(t.val_top(&u), OrderedValue::Fin(rat(0, 1)));
        // residue of the generator generates F_25
        let r = t.residue_top(&u).unwrap();
        let chain = &t.top_level().residue;
        assert!(matches!(chain, ExactField::Ext(_)));
        assert!(!chain.is_zero(&r));
    }

    #[test]
    fn mixed_step_rejected() {
        // X^4 - 25 = (X^2-5)(X^2+5) over Q: value 1/2 with degree 4 at p=5
        let base = Tower::base(GroundField::padic(5).unwrap());
        let w = base.top_field().from_i64(25);
        let err = base.extend_radical(&w, 4);
        assert!(matches!(err, Err(Error::UnsupportedTower(_))));
    }

    #[test]
    fn wild_tadic_rejected() {
        let base = Tower::base(GroundField::tadic(crate::ground::CoeffField::Prime(2)).unwrap());
        let t = base.ground.uniformizer();
        let err = base.extend_radical(&t, 2);
        assert!(matches!(err, Err(Error::UnsupportedTower(_))));
        // tame radical works
        let ok = base.extend_radical(&t, 3);
        assert!(ok.is_ok());
    }

    #[test]
    fn dyadic_chain_at_p5() {
        // u1 = 5^(1/2), u2 = u1^(1/2) = 5^(1/4)
        let base = Tower::base(GroundField::padic(5).unwrap());
        let five = base.top_field().from_i64(5);
        let t1 = base.extend_radical(&five, 2).unwrap();
        let u1 = t1.top_generator();
        let t2 = t1.extend_radical(&u1, 2).unwrap();
        assert_eq!(t2.e_total(), 4);
        assert_eq!(t2.degree(), 4);
        let u2 = t2.top_generator();
        assert_eq!(t2.val_top(&u2), OrderedValue::Fin(rat(1, 4)));
        // z2 = u2^2 + u2^3 has valuation 1/2
        let top = t2.top_field().clone();
        let z2 = top.add(&top.pow_u64(&u2, 2), &top.pow_u64(&u2, 3));
        assert_eq!(t2.val_top(&z2), OrderedValue::Fin(rat(1, 2)));
        // and t1 is a prefix of t2
        assert!(t1.is_prefix_of(&t2));
        let lifted_u1 = t2.lift_from_prefix(&t1, &u1);
        assert_eq!(t2.val_top(&lifted_u1), OrderedValue::Fin(rat(1, 2)));
    }

    #[test]
    fn minpoly_of_generator_and_element() {
        let t = sqrt_tower(2, -2);
        let u = t.top_generator();
        let m = t.minpoly_over_ground(&u).unwrap();
        let q = ExactField::Rationals;
        assert_eq!(m, Poly::from_i64_coeffs(q.clone(), &[2, 0, 1]));
        // minpoly of u + 1 is X^2 - 2X + 3
        let one = t.elem_from_ground(&t.ground.parse_elem("1").unwrap());
        let a = t.top_field().add(&u, &one);
        let m2 = t.minpoly_over_ground(&a).unwrap();
        assert_eq!(m2, Poly::from_i64_coeffs(q, &[3, -2, 1]));
    }

    #[test]
    fn minpoly_of_dyadic_stage_two() {
        // minpoly of 5^(1/2) + 5^(3/4) over Q has degree 4 and annihilates it
        let base = Tower::base(GroundField::padic(5).unwrap());
        let five = base.top_field().from_i64(5);
        let t1 = base.extend_radical(&five, 2).unwrap();
        let u1 = t1.top_generator();
        let t2 = t1.extend_radical(&u1, 2).unwrap();
        let u2 = t2.top_generator();
        let top = t2.top_field().clone();
        let z2 = top.add(&top.pow_u64(&u2, 2), &top.pow_u64(&u2, 3));
        let m = t2.minpoly_over_ground(&z2).unwrap();
        assert_eq!(m.degree(), Some(4));
        // evaluate back in the tower: must vanish exactly
        let lifted = t2.poly_from_ground(&m);
        let value = lifted.eval(&z2);
        assert!(top.is_zero(&value));
    }

    #[test]
    fn monomials_of_requested_value() {
        let base = Tower::base(GroundField::padic(5).unwrap());
        let five = base.top_field().from_i64(5);
        let t1 = base.extend_radical(&five, 2).unwrap();
        let u1 = t1.top_generator();
        let t2 = t1.extend_radical(&u1, 2).unwrap();
        for q in [rat(1, 4), rat(3, 4), rat(1, 2), rat(2, 1), rat(-1, 4), rat(7, 4)] {
            let m = t2.monomial_of_value(&q).unwrap();
            assert_eq!(t2.val_top(&m), OrderedValue::Fin(q.clone()), "monomial of value {q}");
        }
        assert!(t2.monomial_of_value(&rat(1, 3)).is_err());
    }

    #[test]
    fn residue_and_lift_round_trip() {
        let t = sqrt_tower(5, -2);
        let u = t.top_generator();
        let r = t.residue_top(&u).unwrap();
        let lifted = t.lift_residue_top(&r);
        // lifted - u has positive valuation (they share the residue)
        let diff = t.top_field().sub(&lifted, &u);
        match t.val_top(&diff) {
            OrderedValue::PosInf => {}
            OrderedValue::Fin(v) => assert!(v > BigRational::zero()),
            _ => panic!(),
        }
    }

    #[test]
    fn tadic_unramified_over_rational_coefficients() {
        // X^2 + 2 over Q(t): residue field extension of Q by sqrt(-2)
        let base = Tower::base(GroundField::tadic(crate::ground::CoeffField::Rationals).unwrap());
        let two = base.top_field().from_i64(2);
        let t = base.extend_radical(&two, 2);
        // X^2 - 2 reduces to X^2 - 2 over Q: no rational root, accepted as
        // unramified by the input contract
        let t = t.unwrap();
        assert_eq!(t.steps()[0].kind, StepKind::Unramified);
        assert_eq!(t.f_total(), 2);
    }
}
