//! Elements of a fixed algebraic closure of the completion of the ground
//! field. An [`AlgElem`] is either an exact expression in a certified tower
//! or a root of a polynomial pinned by an exact in-tower approximant with a
//! certified gap. Valuations, distances and conjugates are computed through
//! Newton polygons over the towers; every reported value is exact.

pub mod roots;
pub mod tower;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FElem;
use crate::ground::GroundField;
use crate::poly::Poly;
use crate::values::OrderedValue;

pub use roots::{monomial_walk, Cluster, NpData, RefinePolicy, WalkStep};
pub use tower::{StepKind, Tower, TowerStep};

/// Newton polygon of a polynomial over the ground field: segments of the
/// lower convex hull of `(i, v(coeff_i))`, listed with strictly decreasing
/// slopes. A segment of slope `-s` and length `m` certifies `m` roots of
/// valuation `s` in the algebraic closure of the completion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub segments: Vec<NpSegment>,
    /// Multiplicity of the root zero (`ord_X f`), not covered by segments.
    pub ord: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpSegment {
    pub slope: OrderedValue,
    pub length: usize,
}

/// Newton polygon of a nonzero polynomial over the ground field.
pub fn newton_polygon(ground: &GroundField, f: &Poly) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let vals: Vec<OrderedValue> = f.coeffs().iter().map(|c| ground.val(c)).collect();
    let np = roots::np_from_vals(&vals)?;
    let segments = np
        .finite
        .into_iter()
        .map(|(v, len)| NpSegment { slope: OrderedValue::Fin(-v), length: len })
        .collect();
    Ok(NewtonPolygon { segments, ord: np.zero_roots })
}

#[derive(Clone, Debug)]
enum ElemKind {
    /// The expression is the element.
    Exact,
    /// The element is the root `z` of `poly` with `v(z - expr) = gap`
    /// (exact); `size` roots share the approximant, `trail` records the
    /// digits that built it.
    Root {
        poly: Poly, // over the ground field
        gap: BigRational,
        size: usize,
        trail: Vec<(BigRational, String)>,
        /// Minimal polynomial when known (conjugate enumeration knows it).
        minpoly: Option<Poly>,
    },
}

/// Element of the algebraic closure of the completion.
#[derive(Debug)]
pub struct AlgElem {
    tower: Arc<Tower>,
    expr: FElem,
    kind: ElemKind,
    minpoly_cache: OnceLock<Poly>,
}

impl Clone for AlgElem {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(m) = self.minpoly_cache.get() {
            let _ = cache.set(m.clone());
        }
        AlgElem {
            tower: self.tower.clone(),
            expr: self.expr.clone(),
            kind: self.kind.clone(),
            minpoly_cache: cache,
        }
    }
}

impl AlgElem {
    pub fn from_ground(ground: &GroundField, x: FElem) -> AlgElem {
        let tower = Tower::base(ground.clone());
        AlgElem { tower, expr: x, kind: ElemKind::Exact, minpoly_cache: OnceLock::new() }
    }

    pub fn from_tower(tower: Arc<Tower>, expr: FElem) -> AlgElem {
        AlgElem { tower, expr, kind: ElemKind::Exact, minpoly_cache: OnceLock::new() }
    }

    fn from_cluster(ground_poly: &Poly, c: &Cluster, minpoly: Option<Poly>) -> AlgElem {
        match &c.gap {
            OrderedValue::PosInf => AlgElem {
                tower: c.tower.clone(),
                expr: c.approximant.clone(),
                kind: ElemKind::Exact,
                minpoly_cache: OnceLock::new(),
            },
            OrderedValue::Fin(g) => AlgElem {
                tower: c.tower.clone(),
                expr: c.approximant.clone(),
                kind: ElemKind::Root {
                    poly: ground_poly.clone(),
                    gap: g.clone(),
                    size: c.size,
                    trail: c.trail.clone(),
                    minpoly,
                },
                minpoly_cache: OnceLock::new(),
            },
            _ => unreachable!(),
        }
    }

    /// Root-backed element from an approach cluster; public for the modules
    /// that enumerate roots (delta, stage construction).
    pub fn root_from_cluster(ground_poly: &Poly, c: &Cluster) -> AlgElem {
        AlgElem::from_cluster(ground_poly, c, None)
    }

    pub fn ground(&self) -> &GroundField {
        &self.tower.ground
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn expr(&self) -> &FElem {
        &self.expr
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, ElemKind::Exact)
    }

    pub fn is_ground(&self) -> bool {
        self.tower.num_steps() == 0 && self.is_exact()
    }

    /// Digit trail of a root-backed element (empty for exact elements).
    pub fn trail(&self) -> &[(BigRational, String)] {
        match &self.kind {
            ElemKind::Exact => &[],
            ElemKind::Root { trail, .. } => trail,
        }
    }

    /// Valuation `v(a)`, exact. Root-backed elements refine as needed.
    pub fn val(&self, policy: &RefinePolicy) -> Result<OrderedValue> {
        match &self.kind {
            ElemKind::Exact => Ok(self.tower.val_top(&self.expr)),
            ElemKind::Root { gap, .. } => {
                let ve = self.tower.val_top(&self.expr);
                match &ve {
                    OrderedValue::PosInf => Ok(OrderedValue::Fin(gap.clone())),
                    OrderedValue::Fin(w) if w != gap => {
                        Ok(OrderedValue::Fin(w.clone().min(gap.clone())))
                    }
                    _ => {
                        let refined = self.refined_past(gap, policy)?;
                        refined.val(policy)
                    }
                }
            }
        }
    }

    /// Push a root-backed element's approximant strictly past `beyond`.
    fn refined_past(&self, beyond: &BigRational, policy: &RefinePolicy) -> Result<AlgElem> {
        let (poly, gap, minpoly) = match &self.kind {
            ElemKind::Exact => return Ok(self.clone()),
            ElemKind::Root { poly, gap, minpoly, .. } => {
                (poly.clone(), gap.clone(), minpoly.clone())
            }
        };
        if &gap > beyond {
            return Ok(self.clone());
        }
        if beyond >= &policy.max_precision {
            return Err(Error::NeedsRefinement(beyond.clone() + BigRational::one()));
        }
        if self.tower.degree() > policy.max_tower_degree {
            return Err(Error::NeedsRefinement(beyond.clone() + BigRational::one()));
        }
        let lifted = self.tower.poly_from_ground(&poly);
        let clusters = roots::approach_roots(
            &self.tower,
            &lifted,
            &self.expr,
            beyond,
            false,
            &[],
            policy.max_tower_degree,
        )?;
        // refinements of our cluster are those strictly beyond the current gap
        let chosen = clusters
            .iter()
            .find(|c| match &c.gap {
                OrderedValue::PosInf => true,
                OrderedValue::Fin(g) => g > &gap,
                _ => false,
            })
            .ok_or_else(|| Error::BadCertificate("approximant lost its root".into()))?;
        let mut out = AlgElem::from_cluster(&poly, chosen, minpoly);
        if let (ElemKind::Root { trail: new_trail, .. }, ElemKind::Root { trail: old_trail, .. }) =
            (&mut out.kind, &self.kind)
        {
            let mut t = old_trail.clone();
            t.extend(new_trail.iter().cloned());
            *new_trail = t;
        }
        Ok(out)
    }

    /// `v(a - b)`; `PosInf` when the elements are certified equal.
    pub fn dist(&self, other: &AlgElem, policy: &RefinePolicy) -> Result<OrderedValue> {
        dist_impl(self, other, None, policy)
    }

    /// `min(v(a - b), cap)`: exact below the cap, clamped (without further
    /// refinement) once the distance is certified to reach it. Use this for
    /// every comparison against a known bound — it cannot run into a wild
    /// approximation barrier beyond the cap.
    pub fn dist_capped(
        &self,
        other: &AlgElem,
        cap: &BigRational,
        policy: &RefinePolicy,
    ) -> Result<OrderedValue> {
        let d = dist_impl(self, other, Some(cap), policy)?;
        match &d {
            OrderedValue::Fin(v) if v > cap => Ok(OrderedValue::Fin(cap.clone())),
            OrderedValue::PosInf => Ok(OrderedValue::Fin(cap.clone())),
            _ => Ok(d),
        }
    }

    /// Decide `v(a - b) >= bound` for a finite bound.
    pub fn dist_at_least(
        &self,
        other: &AlgElem,
        bound: &OrderedValue,
        policy: &RefinePolicy,
    ) -> Result<bool> {
        let d = match bound.as_rational() {
            Ok(cap) => dist_impl(self, other, Some(cap), policy)?,
            Err(_) => dist_impl(self, other, None, policy)?,
        };
        Ok(d.compare(bound)? != std::cmp::Ordering::Less)
    }

    /// Minimal polynomial over the ground field (monic).
    pub fn minpoly(&self) -> Result<Poly> {
        if let Some(m) = self.minpoly_cache.get() {
            return Ok(m.clone());
        }
        let m = match &self.kind {
            ElemKind::Exact => self.tower.minpoly_over_ground(&self.expr)?,
            ElemKind::Root { minpoly: Some(m), .. } => m.clone(),
            ElemKind::Root { .. } => {
                return Err(Error::Invalid(
                    "minimal polynomial of an anonymous root is not available".into(),
                ))
            }
        };
        let _ = self.minpoly_cache.set(m.clone());
        Ok(m)
    }

    pub fn degree(&self) -> Result<usize> {
        Ok(self.minpoly()?.degree().expect("minimal polynomial is nonzero"))
    }

    /// All roots of the minimal polynomial, each pinned by a separating
    /// approximation; `self` appears exactly once, first.
    pub fn conjugates(&self, policy: &RefinePolicy) -> Result<Vec<AlgElem>> {
        let m = self.minpoly()?;
        let deg = m.degree().unwrap();
        if deg == 1 {
            return Ok(vec![self.clone()]);
        }
        if !self.is_exact() {
            return Err(Error::Invalid(
                "conjugates of an anonymous root are not enumerable".into(),
            ));
        }
        let lifted = self.tower.poly_from_ground(&m);
        let top = self.tower.top_field().clone();
        let sweep = vec![self.expr.clone(), top.neg(&self.expr)];
        let start_cap = BigRational::from_integer(BigInt::from(2));
        let clusters = policy.run(start_cap, |cap| {
            roots::approach_roots(
                &self.tower,
                &lifted,
                &top.zero(),
                cap,
                true,
                &sweep,
                policy.max_tower_degree,
            )
        })?;
        let total: usize = clusters.iter().map(|c| c.size).sum();
        if total != deg {
            return Err(Error::Invalid(format!(
                "conjugate enumeration found {total} roots of a degree {deg} polynomial"
            )));
        }
        let mut me = None;
        let mut others = vec![];
        for c in &clusters {
            let elem = AlgElem::from_cluster(&m, c, Some(m.clone()));
            if c.is_exact() && me.is_none() {
                if let Some(OrderedValue::PosInf) = self.tower_dist_exact(&elem) {
                    me = Some(self.clone());
                    continue;
                }
            }
            others.push(elem);
        }
        let me = me.ok_or_else(|| {
            Error::Invalid(
                "element did not appear among the roots of its minimal polynomial".into(),
            )
        })?;
        let mut out = vec![me];
        out.extend(others);
        Ok(out)
    }

    fn tower_dist_exact(&self, other: &AlgElem) -> Option<OrderedValue> {
        if !self.is_exact() || !other.is_exact() {
            return None;
        }
        let (a, b) = common_tower(self, other).ok()?;
        let top = a.tower.top_field().clone();
        Some(a.tower.val_top(&top.sub(&a.expr, &b.expr)))
    }

    /// Raise the approximation quality past `target`; exact elements return
    /// themselves (their precision is already infinite).
    pub fn refine(&self, target: &OrderedValue, policy: &RefinePolicy) -> Result<AlgElem> {
        match (&self.kind, target) {
            (ElemKind::Exact, _) => Ok(self.clone()),
            (_, OrderedValue::Fin(t)) => self.refined_past(t, policy),
            _ => Err(Error::InvalidValue),
        }
    }

    /// Precision of the approximation: `PosInf` for exact elements, the
    /// certified gap for root-backed ones.
    pub fn precision(&self) -> OrderedValue {
        match &self.kind {
            ElemKind::Exact => OrderedValue::PosInf,
            ElemKind::Root { gap, .. } => OrderedValue::Fin(gap.clone()),
        }
    }

    /// Ramification index and residue degree of `K(a) | K`, read off the
    /// jumps of the monomial walk and certified against the degree of the
    /// minimal polynomial.
    pub fn ext_invariants(&self, policy: &RefinePolicy) -> Result<(usize, usize)> {
        if !self.is_exact() {
            return Err(Error::Invalid(
                "extension invariants need an exact tower element".into(),
            ));
        }
        let d = self.degree()?;
        if d == 1 {
            return Ok((1, 1));
        }
        let walk = monomial_walk(&self.tower, &self.expr, &policy.max_precision)?;
        let last = walk.last().expect("walk has at least one step");
        if last.e_acc * last.f_acc == d {
            return Ok((last.e_acc, last.f_acc));
        }
        Err(Error::Invalid(format!(
            "monomial walk of a degree {d} element stalled at (e, f) = ({}, {})",
            last.e_acc, last.f_acc
        )))
    }

    /// Truncation walk used by the minimality search: in-tower approximants
    /// with strictly increasing gaps, capped.
    pub fn truncation_walk(&self, cap: &BigRational) -> Result<Vec<WalkStep>> {
        if !self.is_exact() {
            return Err(Error::Invalid(
                "truncation walk needs an exact tower element".into(),
            ));
        }
        monomial_walk(&self.tower, &self.expr, cap)
    }

    /// A truncation as an element of the same tower.
    pub fn truncation_elem(&self, step: &WalkStep) -> AlgElem {
        AlgElem::from_tower(self.tower.clone(), step.approx.clone())
    }

    pub fn negate(&self) -> AlgElem {
        let top = self.tower.top_field().clone();
        AlgElem {
            tower: self.tower.clone(),
            expr: top.neg(&self.expr),
            kind: self.kind.clone(),
            minpoly_cache: OnceLock::new(),
        }
    }
}

/// Bring two elements over the same ground field into one tower: one tower
/// must be a prefix of the other (ground elements embed everywhere).
pub(crate) fn common_tower(a: &AlgElem, b: &AlgElem) -> Result<(AlgElem, AlgElem)> {
    if a.tower.ground != b.tower.ground {
        return Err(Error::RingMismatch);
    }
    if Arc::ptr_eq(&a.tower, &b.tower) || a.tower == b.tower {
        return Ok((a.clone(), b.clone()));
    }
    if a.tower.is_prefix_of(&b.tower) {
        let lifted = b.tower.lift_from_prefix(&a.tower, &a.expr);
        let mut up = a.clone();
        up.tower = b.tower.clone();
        up.expr = lifted;
        return Ok((up, b.clone()));
    }
    if b.tower.is_prefix_of(&a.tower) {
        let lifted = a.tower.lift_from_prefix(&b.tower, &b.expr);
        let mut up = b.clone();
        up.tower = a.tower.clone();
        up.expr = lifted;
        return Ok((a.clone(), up));
    }
    Err(Error::UnsupportedTower(
        "elements live in unrelated towers; present them inside one tower".into(),
    ))
}

fn dist_impl(
    a: &AlgElem,
    b: &AlgElem,
    cap: Option<&BigRational>,
    policy: &RefinePolicy,
) -> Result<OrderedValue> {
    let (a, b) = common_tower(a, b)?;
    let top = a.tower.top_field().clone();
    match (&a.kind, &b.kind) {
        (ElemKind::Exact, ElemKind::Exact) => Ok(a.tower.val_top(&top.sub(&a.expr, &b.expr))),
        (ElemKind::Exact, ElemKind::Root { .. }) => dist_exact_root(&b, &a, cap, policy),
        (ElemKind::Root { .. }, ElemKind::Exact) => dist_exact_root(&a, &b, cap, policy),
        (ElemKind::Root { .. }, ElemKind::Root { .. }) => dist_root_root(&a, &b, cap, policy),
    }
}

fn dist_exact_root(
    root: &AlgElem,
    exact: &AlgElem,
    cap: Option<&BigRational>,
    policy: &RefinePolicy,
) -> Result<OrderedValue> {
    let mut current = root.clone();
    loop {
        let gap = match &current.kind {
            ElemKind::Root { gap, .. } => gap.clone(),
            ElemKind::Exact => {
                let (a, b) = common_tower(&current, exact)?;
                let top = a.tower.top_field().clone();
                return Ok(a.tower.val_top(&top.sub(&a.expr, &b.expr)));
            }
        };
        let (a, b) = common_tower(&current, exact)?;
        let top = a.tower.top_field().clone();
        let w = a.tower.val_top(&top.sub(&a.expr, &b.expr));
        match &w {
            OrderedValue::PosInf => return Ok(OrderedValue::Fin(gap)),
            OrderedValue::Fin(wv) if wv != &gap => {
                return Ok(OrderedValue::Fin(wv.clone().min(gap)));
            }
            _ => {
                // distance is at least gap; a cap at or below that settles it
                if let Some(c) = cap {
                    if &gap >= c {
                        return Ok(OrderedValue::Fin(gap));
                    }
                }
                current = current.refined_past(&gap, policy)?;
            }
        }
    }
}

fn dist_root_root(
    a: &AlgElem,
    b: &AlgElem,
    cap: Option<&BigRational>,
    policy: &RefinePolicy,
) -> Result<OrderedValue> {
    let mut x = a.clone();
    let mut y = b.clone();
    loop {
        match (&x.kind, &y.kind) {
            (ElemKind::Exact, _) => return dist_exact_root(&y, &x, cap, policy),
            (_, ElemKind::Exact) => return dist_exact_root(&x, &y, cap, policy),
            (ElemKind::Root { gap: g1, .. }, ElemKind::Root { gap: g2, .. }) => {
                let (cx, cy) = common_tower(&x, &y)?;
                let top = cx.tower.top_field().clone();
                let w = cx.tower.val_top(&top.sub(&cx.expr, &cy.expr));
                let gmin = g1.clone().min(g2.clone());
                match &w {
                    OrderedValue::Fin(wv) if wv < &gmin => return Ok(w),
                    OrderedValue::Fin(wv) if wv > &gmin => {
                        return Ok(OrderedValue::Fin(gmin));
                    }
                    _ => {
                        if let Some(c) = cap {
                            if &gmin >= c {
                                return Ok(OrderedValue::Fin(gmin));
                            }
                        }
                        if g1 <= g2 {
                            x = x.refined_past(&gmin, policy)?;
                        } else {
                            y = y.refined_past(&gmin, policy)?;
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExactField;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ov(n: i64, d: i64) -> OrderedValue {
        OrderedValue::Fin(rat(n, d))
    }

    fn sqrt_elem(p: u64, c: i64) -> AlgElem {
        let base = Tower::base(GroundField::padic(p).unwrap());
        let w = base.top_field().from_i64(c);
        let t = base.extend_radical(&w, 2).unwrap();
        let u = t.top_generator();
        AlgElem::from_tower(t, u)
    }

    fn quartic_root_of_5() -> AlgElem {
        let base = Tower::base(GroundField::padic(5).unwrap());
        let five = base.top_field().from_i64(5);
        let t1 = base.extend_radical(&five, 2).unwrap();
        let u1 = t1.top_generator();
        let t2 = t1.extend_radical(&u1, 2).unwrap();
        let u2 = t2.top_generator();
        AlgElem::from_tower(t2, u2)
    }

    #[test]
    fn newton_polygon_examples() {
        let g2 = GroundField::padic(2).unwrap();
        let q = ExactField::Rationals;
        let f = Poly::from_i64_coeffs(q.clone(), &[2, 0, 1]);
        let np = newton_polygon(&g2, &f).unwrap();
        assert_eq!(np.ord, 0);
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.segments[0].slope, OrderedValue::Fin(rat(-1, 2)));
        assert_eq!(np.segments[0].length, 2);

        let f2 = Poly::from_i64_coeffs(q.clone(), &[2, 1, 1]);
        let np2 = newton_polygon(&g2, &f2).unwrap();
        let root_vals: Vec<OrderedValue> = np2.segments.iter().map(|s| s.slope.neg()).collect();
        assert_eq!(root_vals, vec![ov(0, 1), ov(1, 1)]);

        let g5 = GroundField::padic(5).unwrap();
        let np3 = newton_polygon(&g5, &f).unwrap();
        assert_eq!(np3.segments.len(), 1);
        assert_eq!(np3.segments[0].slope, ov(0, 1));
        assert_eq!(np3.segments[0].length, 2);

        assert_eq!(newton_polygon(&g2, &Poly::zero(q)), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn elem_val_examples() {
        let policy = RefinePolicy::default();
        let a = sqrt_elem(2, -2);
        assert_eq!(a.val(&policy).unwrap(), ov(1, 2));
        let g = GroundField::padic(2).unwrap();
        let x = AlgElem::from_ground(&g, g.parse_elem("8/6").unwrap());
        assert_eq!(x.val(&policy).unwrap(), ov(2, 1));
        // 5^(1/2) + 5^(3/4) at p=5
        let q = quartic_root_of_5();
        let top = q.tower().top_field().clone();
        let z = top.add(&top.pow_u64(q.expr(), 2), &top.pow_u64(q.expr(), 3));
        let e = AlgElem::from_tower(q.tower().clone(), z);
        assert_eq!(e.val(&policy).unwrap(), ov(1, 2));
    }

    #[test]
    fn dist_examples() {
        let policy = RefinePolicy::default();
        let a = sqrt_elem(2, -2);
        let minus = a.negate();
        assert_eq!(a.dist(&minus, &policy).unwrap(), ov(3, 2));
        assert_eq!(a.dist(&a, &policy).unwrap(), OrderedValue::PosInf);
        let g = GroundField::padic(2).unwrap();
        let two = AlgElem::from_ground(&g, g.parse_elem("2").unwrap());
        let zero = AlgElem::from_ground(&g, g.parse_elem("0").unwrap());
        assert_eq!(two.dist(&zero, &policy).unwrap(), ov(1, 1));
    }

    #[test]
    fn conjugates_of_sqrt() {
        let policy = RefinePolicy::default();
        let a = sqrt_elem(2, -2);
        let conj = a.conjugates(&policy).unwrap();
        assert_eq!(conj.len(), 2);
        assert_eq!(a.dist(&conj[0], &policy).unwrap(), OrderedValue::PosInf);
        assert_eq!(a.dist(&conj[1], &policy).unwrap(), ov(3, 2));
        let g = GroundField::padic(2).unwrap();
        let three = AlgElem::from_ground(&g, g.parse_elem("3").unwrap());
        assert_eq!(three.conjugates(&policy).unwrap().len(), 1);
    }

    #[test]
    fn conjugates_of_quartic() {
        let policy = RefinePolicy::default();
        let a = quartic_root_of_5();
        let conj = a.conjugates(&policy).unwrap();
        assert_eq!(conj.len(), 4);
        for i in 0..4 {
            for j in 0..i {
                let d = conj[i].dist(&conj[j], &policy).unwrap();
                assert_eq!(d, ov(1, 4), "pair {i},{j}");
            }
        }
        // multiset of conjugate valuations matches the Newton polygon
        let m = a.minpoly().unwrap();
        let np = newton_polygon(a.ground(), &m).unwrap();
        let mut np_vals = vec![];
        for s in &np.segments {
            for _ in 0..s.length {
                np_vals.push(s.slope.neg());
            }
        }
        let mut conj_vals: Vec<OrderedValue> =
            conj.iter().map(|c| c.val(&policy).unwrap()).collect();
        conj_vals.sort_by(|x, y| x.compare(y).unwrap());
        np_vals.sort_by(|x, y| x.compare(y).unwrap());
        assert_eq!(conj_vals, np_vals);
    }

    #[test]
    fn refine_contract() {
        let policy = RefinePolicy::default();
        let a = sqrt_elem(2, -2);
        // exact elements refine to themselves with infinite precision
        let r = a.refine(&ov(7, 2), &policy).unwrap();
        assert_eq!(r.precision(), OrderedValue::PosInf);
        // ground rationals too
        let g = GroundField::padic(2).unwrap();
        let c = AlgElem::from_ground(&g, g.parse_elem("3/7").unwrap());
        assert_eq!(c.refine(&ov(100, 1), &policy).unwrap().precision(), OrderedValue::PosInf);
        // a root-backed conjugate can be pushed further
        let conj = a.conjugates(&policy).unwrap();
        for c in conj.iter().skip(1) {
            if c.is_exact() {
                continue;
            }
            let before = c.precision();
            let after = c.refine(&ov(5, 1), &policy).unwrap().precision();
            assert!(after.compare(&before).unwrap() != std::cmp::Ordering::Less);
            assert!(after.compare(&ov(5, 1)).unwrap() == std::cmp::Ordering::Greater);
        }
    }

    #[test]
    fn ext_invariants_examples() {
        let policy = RefinePolicy::default();
        assert_eq!(sqrt_elem(2, -2).ext_invariants(&policy).unwrap(), (2, 1));
        assert_eq!(sqrt_elem(5, -2).ext_invariants(&policy).unwrap(), (1, 2));
        assert_eq!(quartic_root_of_5().ext_invariants(&policy).unwrap(), (4, 1));
    }

    #[test]
    fn minpoly_via_resultants() {
        let a = sqrt_elem(2, -2);
        let m = a.minpoly().unwrap();
        assert_eq!(m, Poly::from_i64_coeffs(ExactField::Rationals, &[2, 0, 1]));
    }

    #[test]
    fn val_additive_on_products() {
        let policy = RefinePolicy::default();
        let a = quartic_root_of_5();
        let top = a.tower().top_field().clone();
        let g = a.ground().clone();
        let b = AlgElem::from_tower(
            a.tower().clone(),
            top.add(a.expr(), &a.tower().elem_from_ground(&g.parse_elem("5").unwrap())),
        );
        let prod = AlgElem::from_tower(a.tower().clone(), top.mul(a.expr(), b.expr()));
        let sum = a.val(&policy).unwrap().checked_add(&b.val(&policy).unwrap()).unwrap();
        assert_eq!(prod.val(&policy).unwrap(), sum);
    }

    #[test]
    fn isosceles_property() {
        let policy = RefinePolicy::default();
        let a = quartic_root_of_5();
        let conj = a.conjugates(&policy).unwrap();
        let d01 = conj[0].dist(&conj[1], &policy).unwrap();
        let d02 = conj[0].dist(&conj[2], &policy).unwrap();
        let d12 = conj[1].dist(&conj[2], &policy).unwrap();
        let mut ds = vec![d01, d02, d12];
        ds.sort_by(|x, y| x.compare(y).unwrap());
        assert_eq!(ds[0], ds[1]);
    }
}
