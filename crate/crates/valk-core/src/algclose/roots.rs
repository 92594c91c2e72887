//! Newton polygons over certified towers and the tower-relative root
//! approach. Roots of a polynomial are located by exact approximants living
//! in (extensions of) the tower: every distance the engine reports is an
//! exact rational read off a Newton polygon, never a float or a truncation
//! guess. Queries are capped; pushing a wildly ramified cluster past its tame
//! approximation barrier grows the tower instead of looping.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::field::{factor_finite, ExactField, FElem};
use crate::poly::{raw, Poly};
use crate::values::OrderedValue;

use super::tower::Tower;

/// Newton-polygon summary of a nonzero polynomial: `zero_roots` copies of
/// the root 0 and `finite` pairs (valuation, multiplicity) in increasing
/// valuation order.
#[derive(Clone, Debug, PartialEq)]
pub struct NpData {
    pub zero_roots: usize,
    pub finite: Vec<(BigRational, usize)>,
}

impl NpData {
    pub fn total(&self) -> usize {
        self.zero_roots + self.finite.iter().map(|(_, m)| m).sum::<usize>()
    }

    /// All entries as ordered values, zero roots contributing `PosInf`.
    pub fn values(&self) -> Vec<(OrderedValue, usize)> {
        let mut out: Vec<(OrderedValue, usize)> = self
            .finite
            .iter()
            .map(|(q, m)| (OrderedValue::Fin(q.clone()), *m))
            .collect();
        if self.zero_roots > 0 {
            out.push((OrderedValue::PosInf, self.zero_roots));
        }
        out
    }
}

/// Newton-polygon data from the coefficient valuations of a nonzero
/// polynomial (ascending coefficients; `PosInf` marks a zero coefficient).
pub fn np_from_vals(vals: &[OrderedValue]) -> Result<NpData> {
    let points: Vec<(usize, BigRational)> = vals
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match v {
            OrderedValue::Fin(q) => Some((i, q.clone())),
            _ => None,
        })
        .collect();
    if points.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let zero_roots = points[0].0;
    let mut hull: Vec<(usize, BigRational)> = vec![];
    for pt in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let lhs = (&b.1 - &a.1) * BigRational::from_integer(BigInt::from((pt.0 - a.0) as i64));
            let rhs = (&pt.1 - &a.1) * BigRational::from_integer(BigInt::from((b.0 - a.0) as i64));
            if lhs < rhs {
                break;
            }
            hull.pop();
        }
        hull.push(pt);
    }
    let mut finite = vec![];
    for w in hull.windows(2) {
        let dx = BigRational::from_integer(BigInt::from((w[1].0 - w[0].0) as i64));
        let slope = (&w[1].1 - &w[0].1) / dx;
        finite.push((-slope, w[1].0 - w[0].0));
    }
    finite.reverse(); // increasing root valuation
    Ok(NpData { zero_roots, finite })
}

/// Root-valuation multiset of a nonzero polynomial without zero roots,
/// as (valuation, multiplicity) in increasing order.
pub fn newton_multiset(vals: &[OrderedValue]) -> Result<Vec<(BigRational, usize)>> {
    let np = np_from_vals(vals)?;
    if np.zero_roots > 0 {
        return Err(Error::Invalid("polynomial has zero roots".into()));
    }
    Ok(np.finite)
}

/// Distances from `b` to the roots of `f` (coefficients at the top level of
/// the tower): the Newton-polygon data of `f(b + Y)`. `PosInf` entries count
/// the multiplicity of `b` itself as a root.
pub fn dist_multiset(tower: &Tower, f: &Poly, b: &FElem) -> Result<NpData> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let shifted = f.taylor_shift(b);
    let vals: Vec<OrderedValue> = shifted.iter().map(|c| tower.val_top(c)).collect();
    np_from_vals(&vals)
}

/// Bounded refinement driver: runs `f` with a growing cap, doubling on
/// `NeedsRefinement` up to the configured maximum. `max_tower_degree` stops
/// approximation towers from growing past desk scale — approaching a wildly
/// ramified root from a foreign tower doubles the tower degree per digit, so
/// uncapped queries across a wild barrier must fail instead of diverging.
#[derive(Clone, Debug)]
pub struct RefinePolicy {
    pub max_precision: BigRational,
    pub max_tower_degree: usize,
}

impl Default for RefinePolicy {
    fn default() -> Self {
        RefinePolicy {
            max_precision: BigRational::from_integer(BigInt::from(1024)),
            max_tower_degree: 256,
        }
    }
}

impl RefinePolicy {
    pub fn from_cap(cap: i64) -> Self {
        RefinePolicy {
            max_precision: BigRational::from_integer(BigInt::from(cap)),
            ..RefinePolicy::default()
        }
    }

    pub fn run<T>(&self, start: BigRational, mut f: impl FnMut(&BigRational) -> Result<T>) -> Result<T> {
        let mut cap = start.max(BigRational::one());
        loop {
            match f(&cap) {
                Err(Error::NeedsRefinement(need)) => {
                    if cap >= self.max_precision {
                        return Err(Error::NeedsRefinement(need));
                    }
                    let doubled = &cap * BigRational::from_integer(BigInt::from(2));
                    cap = doubled.max(need).min(self.max_precision.clone());
                }
                other => return other,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Monomial walk: best in-tower truncations of an exact element
// ---------------------------------------------------------------------------

/// One stop of the monomial walk toward `a`: the truncation `approx` agrees
/// with `a` up to valuation `gap` (exactly `v(a - approx) = gap`), and the
/// next digit sits at exponent `gap`.
#[derive(Clone, Debug)]
pub struct WalkStep {
    pub approx: FElem,
    /// `v(a - approx)`; `PosInf` when the walk has reached `a`.
    pub gap: OrderedValue,
    /// Exponent denominators accumulated so far (over the ground lattice).
    pub e_acc: usize,
    /// Residue degrees of the digits so far (over the ground residue field).
    pub f_acc: usize,
    /// Digit trail: exponent and rendered residue digit.
    pub trail: Vec<(BigRational, String)>,
}

/// Greedy leading-monomial decomposition of `a` inside its own tower: the
/// sequence of truncations `0 = a_0, a_1, ...` with strictly increasing
/// gaps. Stops once the gap exceeds `cap` (or the element is exhausted).
pub fn monomial_walk(tower: &Tower, a: &FElem, cap: &BigRational) -> Result<Vec<WalkStep>> {
    let top = tower.top_field().clone();
    let mut steps = vec![];
    let mut approx = top.zero();
    let mut e_acc = 1usize;
    let mut f_acc = 1usize;
    let mut trail: Vec<(BigRational, String)> = vec![];
    loop {
        let w = top.sub(a, &approx);
        let gap = tower.val_top(&w);
        steps.push(WalkStep {
            approx: approx.clone(),
            gap: gap.clone(),
            e_acc,
            f_acc,
            trail: trail.clone(),
        });
        let q = match &gap {
            OrderedValue::PosInf => break,
            OrderedValue::Fin(q) if q > cap => break,
            OrderedValue::Fin(q) => q.clone(),
            _ => unreachable!(),
        };
        let m = tower.monomial_of_value(&q)?;
        let unit = top.div(&w, &m)?;
        let digit = tower.residue_top(&unit)?;
        let chain = &tower.top_level().residue;
        debug_assert!(!chain.is_zero(&digit));
        let lifted = tower.lift_residue_top(&digit);
        approx = top.add(&approx, &top.mul(&lifted, &m));
        e_acc = lcm(e_acc, q.denom().try_into().map_err(|_| Error::Invalid("huge denominator".into()))?);
        f_acc = lcm(f_acc, residue_degree(chain, &digit, tower.ground.residue_char())?);
        trail.push((q.clone(), chain.render(&digit)));
    }
    Ok(steps)
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Degree of a residue-chain element over the bottom residue field. Finite
/// chains use the Frobenius orbit; characteristic-zero chains fall back to
/// the chain degree of the smallest level containing the element.
pub fn residue_degree(chain: &ExactField, elem: &FElem, p: u64) -> Result<usize> {
    if chain.is_finite() {
        let total = chain.ext_degree();
        let mut divisors: Vec<usize> = (1..=total).filter(|d| total % d == 0).collect();
        divisors.sort_unstable();
        for d in divisors {
            let mut frob = elem.clone();
            for _ in 0..d {
                frob = chain.pow_u64(&frob, p);
            }
            if frob == *elem {
                return Ok(d);
            }
        }
        Ok(total)
    } else {
        // characteristic zero: degree of the minimal sub-chain level that
        // already contains the element
        Ok(chain_level_degree(chain, elem))
    }
}

fn chain_level_degree(chain: &ExactField, elem: &FElem) -> usize {
    match (chain, elem) {
        (ExactField::Ext(e), FElem::Ext(v)) => {
            if v.len() <= 1 {
                match v.first() {
                    None => 1,
                    Some(inner) => chain_level_degree(&e.base, inner),
                }
            } else {
                chain.ext_degree()
            }
        }
        _ => 1,
    }
}

// ---------------------------------------------------------------------------
// Root approach: clusters of roots tracked by exact tower approximants
// ---------------------------------------------------------------------------

/// A cluster of roots of the input polynomial sharing an approximant.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub tower: Arc<Tower>,
    pub approximant: FElem,
    /// Exact common distance `v(z - approximant)` for the cluster's roots;
    /// `PosInf` when the approximant is a root.
    pub gap: OrderedValue,
    /// Number of distinct roots in the cluster.
    pub size: usize,
    /// Digit trail of the approximant (exponent, rendered residue digit).
    pub trail: Vec<(BigRational, String)>,
    pub e_acc: usize,
    pub f_acc: usize,
}

impl Cluster {
    pub fn is_exact(&self) -> bool {
        matches!(self.gap, OrderedValue::PosInf)
    }
}

struct State {
    tower: Arc<Tower>,
    f: Poly, // lifted to `tower`
    approx: FElem,
    gap: BigRational,
    size: usize,
    trail: Vec<(BigRational, String)>,
    e_acc: usize,
    f_acc: usize,
    depth: usize,
}

/// Approach all roots of `f` (over the top level of `tower`) from `start`.
/// The polynomial is replaced by its squarefree part, so cluster sizes count
/// distinct roots. Clusters are refined until their gap exceeds `cap`; with
/// `isolate` they are additionally split until singletons (or until the step
/// guard trips, which surfaces as `NeedsRefinement`).
#[allow(clippy::too_many_arguments)]
pub fn approach_roots(
    tower: &Arc<Tower>,
    f: &Poly,
    start: &FElem,
    cap: &BigRational,
    isolate: bool,
    sweep: &[FElem],
    max_degree: usize,
) -> Result<Vec<Cluster>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let top = tower.top_field().clone();
    let mut work = f.squarefree_part()?;
    if work.degree() == Some(0) {
        return Ok(vec![]);
    }
    // factor out exact roots offered by the sweep list
    let mut exact_roots: Vec<FElem> = vec![];
    for cand in sweep {
        if work.degree() == Some(0) {
            break;
        }
        if top.is_zero(&work.eval(cand)) {
            let lin = Poly::x_minus(top.clone(), cand);
            let (quot, rem) = work.divmod(&lin)?;
            debug_assert!(rem.is_zero());
            work = quot;
            exact_roots.push(cand.clone());
        }
    }
    let mut out: Vec<Cluster> = exact_roots
        .into_iter()
        .map(|r| Cluster {
            tower: tower.clone(),
            approximant: r,
            gap: OrderedValue::PosInf,
            size: 1,
            trail: vec![],
            e_acc: 1,
            f_acc: 1,
        })
        .collect();
    let mut stack: Vec<State> = vec![];
    seed_states(tower, &work, start, &mut out, &mut stack, vec![], 1, 1, 0)?;
    while let Some(st) = stack.pop() {
        let done = if isolate {
            st.size == 1 && &st.gap > cap
        } else {
            &st.gap > cap
        };
        if done {
            out.push(Cluster {
                tower: st.tower,
                approximant: st.approx,
                gap: OrderedValue::Fin(st.gap),
                size: st.size,
                trail: st.trail,
                e_acc: st.e_acc,
                f_acc: st.f_acc,
            });
            continue;
        }
        if st.depth > 48 || st.tower.degree() > max_degree {
            return Err(Error::NeedsRefinement(st.gap.clone() + BigRational::one()));
        }
        refine_state(st, &mut out, &mut stack, max_degree)?;
    }
    out.sort_by(|a, b| a.trail.len().cmp(&b.trail.len()).then_with(|| format!("{:?}", a.trail).cmp(&format!("{:?}", b.trail))));
    Ok(out)
}


#[allow(clippy::too_many_arguments)]
fn seed_states(
    tower: &Arc<Tower>,
    f: &Poly,
    start: &FElem,
    out: &mut Vec<Cluster>,
    stack: &mut Vec<State>,
    trail: Vec<(BigRational, String)>,
    e_acc: usize,
    f_acc: usize,
    depth: usize,
) -> Result<()> {
    if f.degree() == Some(0) {
        return Ok(());
    }
    let np = dist_multiset(tower, f, start)?;
    if np.zero_roots > 0 {
        debug_assert_eq!(np.zero_roots, 1, "squarefree polynomial");
        out.push(Cluster {
            tower: tower.clone(),
            approximant: start.clone(),
            gap: OrderedValue::PosInf,
            size: 1,
            trail: trail.clone(),
            e_acc,
            f_acc,
        });
    }
    for (q, len) in np.finite {
        stack.push(State {
            tower: tower.clone(),
            f: f.clone(),
            approx: start.clone(),
            gap: q,
            size: len,
            trail: trail.clone(),
            e_acc,
            f_acc,
            depth: depth + 1,
        });
    }
    Ok(())
}

fn refine_state(
    st: State,
    out: &mut Vec<Cluster>,
    stack: &mut Vec<State>,
    max_degree: usize,
) -> Result<()> {
    // ensure the digit exponent lies in the tower's value group
    let mut tower = st.tower.clone();
    let mut fpoly = st.f.clone();
    let mut approx = st.approx.clone();
    let e_total = tower.e_total();
    let scaled = &st.gap * BigRational::from_integer(BigInt::from(e_total as i64));
    if !scaled.denom().is_one() {
        let k: usize = scaled
            .denom()
            .try_into()
            .map_err(|_| Error::Invalid("ramification blow-up".into()))?;
        if tower.degree() * k > max_degree {
            return Err(Error::NeedsRefinement(st.gap.clone() + BigRational::one()));
        }
        let kq = &st.gap * BigRational::from_integer(BigInt::from(k as i64));
        let radicand = tower.monomial_of_value(&kq)?;
        let bigger = tower.extend_radical(&radicand, k)?;
        fpoly = lift_poly(&tower, &bigger, &fpoly);
        approx = bigger.lift_from_prefix(&tower, &approx);
        tower = bigger;
    }
    let top = tower.top_field().clone();
    let m = tower.monomial_of_value(&st.gap)?;
    // segment polynomial over the residue chain
    let shifted = fpoly.taylor_shift(&approx);
    let line_min: Option<BigRational> = shifted
        .iter()
        .enumerate()
        .filter_map(|(j, c)| match tower.val_top(c) {
            OrderedValue::Fin(v) => {
                Some(v + &st.gap * BigRational::from_integer(BigInt::from(j as i64)))
            }
            _ => None,
        })
        .min();
    let line_min = line_min.ok_or(Error::ZeroPolynomial)?;
    let m_norm = tower.monomial_of_value(&line_min)?;
    let m_norm_inv = top.inv(&m_norm)?;
    let chain = tower.top_level().residue.clone();
    let mut seg: Vec<FElem> = vec![];
    let mut mpow = top.one();
    for c in shifted.iter() {
        let scaled = top.mul(&top.mul(c, &mpow), &m_norm_inv);
        seg.push(tower.residue_top(&scaled)?);
        mpow = top.mul(&mpow, &m);
    }
    let seg = raw::trim(seg);
    // nonzero roots of the segment polynomial are the continuation digits
    let ord = seg
        .iter()
        .position(|c| !chain.is_zero(c))
        .expect("segment polynomial is nonzero");
    let seg_poly: Vec<FElem> = seg[ord..].to_vec();
    let digits = digit_roots(&tower, &chain, &seg_poly)?;
    let counted: usize = digits.iter().map(|(_, _, m)| m).sum();
    if counted != st.size {
        return Err(Error::Invalid(format!(
            "segment accounting: cluster of {} roots produced {} digits",
            st.size, counted
        )));
    }
    for (digit_tower, digit, mult) in digits {
        let (dt, df, da) = if Arc::ptr_eq(&digit_tower, &tower) {
            (tower.clone(), fpoly.clone(), approx.clone())
        } else {
            let lf = lift_poly(&tower, &digit_tower, &fpoly);
            let la = digit_tower.lift_from_prefix(&tower, &approx);
            (digit_tower.clone(), lf, la)
        };
        let dtop = dt.top_field().clone();
        let dchain = dt.top_level().residue.clone();
        let lifted_digit = dt.lift_residue_top(&digit);
        let dm = dt.monomial_of_value(&st.gap)?;
        let new_approx = dtop.add(&da, &dtop.mul(&lifted_digit, &dm));
        let mut trail = st.trail.clone();
        trail.push((st.gap.clone(), dchain.render(&digit)));
        let e_acc = lcm(st.e_acc, st.gap.denom().try_into().unwrap_or(usize::MAX));
        let f_acc = lcm(
            st.f_acc,
            residue_degree(&dchain, &digit, dt.ground.residue_char())?,
        );
        // sub-clusters: distances from the improved approximant, beyond gap
        let np = dist_multiset(&dt, &df, &new_approx)?;
        let mut accounted = 0usize;
        if np.zero_roots > 0 {
            debug_assert_eq!(np.zero_roots, 1);
            out.push(Cluster {
                tower: dt.clone(),
                approximant: new_approx.clone(),
                gap: OrderedValue::PosInf,
                size: 1,
                trail: trail.clone(),
                e_acc,
                f_acc,
            });
            accounted += 1;
        }
        for (q, len) in np.finite {
            if q <= st.gap {
                continue; // foreign roots that split off earlier
            }
            accounted += len;
            stack.push(State {
                tower: dt.clone(),
                f: df.clone(),
                approx: new_approx.clone(),
                gap: q,
                size: len,
                trail: trail.clone(),
                e_acc,
                f_acc,
                depth: st.depth + 1,
            });
        }
        if accounted != mult {
            return Err(Error::Invalid(format!(
                "cluster accounting: digit branch expected {mult} roots, found {accounted}"
            )));
        }
    }
    Ok(())
}

fn lift_poly(from: &Tower, to: &Tower, f: &Poly) -> Poly {
    let coeffs: Vec<FElem> = f
        .coeffs()
        .iter()
        .map(|c| to.lift_from_prefix(from, c))
        .collect();
    Poly::new(to.top_field().clone(), coeffs)
}

/// Roots of the segment polynomial over the residue chain, extending the
/// tower by a canonical unramified step when a digit needs a bigger residue
/// field. Returns `(tower, digit, multiplicity)` per digit, deterministic.
fn digit_roots(
    tower: &Arc<Tower>,
    chain: &ExactField,
    seg: &[FElem],
) -> Result<Vec<(Arc<Tower>, FElem, usize)>> {
    if chain.is_finite() {
        let mut out: Vec<(Arc<Tower>, FElem, usize)> = vec![];
        let factors = factor_finite(chain, seg);
        for (irr, mult) in factors {
            let d = irr.len() - 1;
            if d == 1 {
                let root = chain.neg(&irr[0]);
                if chain.is_zero(&root) {
                    continue;
                }
                out.push((tower.clone(), root, mult));
            } else {
                // adjoin the residue extension: the lift of the irreducible
                // factor is a certified unramified step
                let bigger = tower.extend_unramified_lift(&irr)?;
                let new_chain = bigger.top_level().residue.clone();
                // roots of irr in the new chain: the Frobenius orbit of the
                // adjoined generator
                let gen = match &new_chain {
                    ExactField::Ext(e) => FElem::Ext(vec![e.base.zero(), e.base.one()]),
                    _ => unreachable!(),
                };
                let p = bigger.ground.residue_char();
                let mut root = gen;
                for _ in 0..d {
                    out.push((bigger.clone(), root.clone(), mult));
                    for _ in 0..chain.ext_degree() {
                        root = new_chain.pow_u64(&root, p);
                    }
                }
            }
        }
        return Ok(out);
    }
    // characteristic-zero residue chain: rational roots only
    if let ExactField::Rationals = chain {
        let roots = small_rational_roots(chain, seg)?;
        return Ok(roots.into_iter().map(|(r, m)| (tower.clone(), r, m)).collect());
    }
    Err(Error::UnsupportedResidual(
        "residual factorisation over an extension of Q".into(),
    ))
}

fn small_rational_roots(q: &ExactField, seg: &[FElem]) -> Result<Vec<(FElem, usize)>> {
    let poly = Poly::new(q.clone(), seg.to_vec());
    let deg = poly.degree().unwrap_or(0);
    let mut out: Vec<(FElem, usize)> = vec![];
    let mut work = poly;
    'outer: while let Some(d) = work.degree() {
        if d == 0 {
            break;
        }
        if d == 1 {
            let c = work.coeffs();
            let r = q.div(&q.neg(&c[0]), &c[1])?;
            if !q.is_zero(&r) {
                push_mult(&mut out, r);
            }
            break;
        }
        if d == 2 {
            let c = work.coeffs();
            let disc = q.sub(&q.mul(&c[1], &c[1]), &q.mul(&q.from_i64(4), &q.mul(&c[2], &c[0])));
            let disc_rat = match &disc {
                FElem::Rat(r) => r.clone(),
                _ => unreachable!(),
            };
            if disc_rat.is_negative() {
                return Err(Error::UnsupportedResidual("irrational residual digit over Q".into()));
            }
            let ns = disc_rat.numer().sqrt();
            let ds = disc_rat.denom().sqrt();
            if &ns * &ns != *disc_rat.numer() || &ds * &ds != *disc_rat.denom() {
                return Err(Error::UnsupportedResidual("irrational residual digit over Q".into()));
            }
            let s = FElem::Rat(BigRational::new(ns, ds));
            let two_a = q.mul(&q.from_i64(2), &c[2]);
            for r in [
                q.div(&q.add(&q.neg(&c[1]), &s), &two_a)?,
                q.div(&q.sub(&q.neg(&c[1]), &s), &two_a)?,
            ] {
                if !q.is_zero(&r) {
                    push_mult(&mut out, r);
                }
            }
            break;
        }
        // peel small rational roots
        for n in -24i64..=24 {
            for den in 1i64..=6 {
                let cand = FElem::Rat(BigRational::new(BigInt::from(n), BigInt::from(den)));
                if q.is_zero(&cand) {
                    continue;
                }
                if q.is_zero(&work.eval(&cand)) {
                    push_mult(&mut out, cand.clone());
                    let lin = Poly::x_minus(q.clone(), &cand);
                    let (quot, rem) = work.divmod(&lin)?;
                    debug_assert!(rem.is_zero());
                    work = quot;
                    continue 'outer;
                }
            }
        }
        return Err(Error::UnsupportedResidual(format!(
            "residual polynomial of degree {deg} over Q"
        )));
    }
    Ok(out)
}

fn push_mult(out: &mut Vec<(FElem, usize)>, r: FElem) {
    for (e, m) in out.iter_mut() {
        if *e == r {
            *m += 1;
            return;
        }
    }
    out.push((r, 1));
}
