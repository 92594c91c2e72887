//! Ramification invariants of stage extensions, tame-part extraction
//! `b` with `K(b) = K(a) ∩ K^r`, and the implicit-constant-field sandwich
//! report. The tame part is computed structurally from the tower-step
//! classification; towers outside the supported step shapes are rejected,
//! never silently mishandled.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algclose::{AlgElem, RefinePolicy, StepKind, Tower};
use crate::error::{Error, Result};
use crate::field::FElem;
use crate::pcslimit::LimitValuation;
use crate::poly::raw;
use crate::values::OrderedValue;

/// Ramification data of `K(a) | K`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RamData {
    pub e: usize,
    pub f_res: usize,
    /// Prime-to-p part of `e`.
    pub e_tame: usize,
    /// True when the residue characteristic divides `e`.
    pub wild: bool,
}

/// `(e, f_res, e_tame, wild)` of a stage element.
pub fn local_invariants(a: &AlgElem, policy: &RefinePolicy) -> Result<RamData> {
    let (e, f_res) = a.ext_invariants(policy)?;
    let p = a.ground().residue_char() as usize;
    let mut e_tame = e;
    if p > 1 {
        while e_tame % p == 0 {
            e_tame /= p;
        }
    }
    Ok(RamData { e, f_res, e_tame, wild: e_tame != e })
}

/// Which tower generators (1-based step indices) appear in an expression.
fn gens_used(tower: &Tower, expr: &FElem, level: usize, out: &mut HashSet<usize>) {
    if level == 0 {
        return;
    }
    if let FElem::Ext(coeffs) = expr {
        if coeffs.len() > 1 {
            out.insert(level);
        }
        for c in coeffs {
            gens_used(tower, c, level - 1, out);
        }
    }
}

fn uses_only(tower: &Tower, expr: &FElem, kept: &HashSet<usize>) -> bool {
    let mut used = HashSet::new();
    gens_used(tower, expr, tower.num_steps(), &mut used);
    used.is_subset(kept)
}

/// The element `b` with `K(b) = K(a) ∩ K^r`, constructed inside `a`'s tower.
/// Supported step shapes: unramified over the kept subtower, tame totally
/// ramified radical, or wild radical of p-power degree. When no wild step
/// occurs the result is `a`'s own tower data (`b` generates the full tower).
pub fn tame_part(a: &AlgElem, policy: &RefinePolicy) -> Result<AlgElem> {
    if !a.is_exact() {
        return Err(Error::UnsupportedTower(
            "tame part needs an exact tower element".into(),
        ));
    }
    let tower = a.tower().clone();
    let p = tower.ground.residue_char() as usize;
    let top = tower.top_field().clone();
    let nsteps = tower.num_steps();
    // kept generators with the degree each contributes
    let mut kept_steps: HashSet<usize> = HashSet::new();
    let mut kept_gens: Vec<(FElem, usize)> = vec![];
    let mut any_wild = false;
    for (i, step) in tower.steps().iter().enumerate() {
        let level = i + 1;
        let gen = gen_at_top(&tower, level);
        match step.kind {
            StepKind::Unramified => {
                let coeff_ok = step.minpoly.iter().all(|c| {
                    let mut used = HashSet::new();
                    gens_used(&tower, c, level - 1, &mut used);
                    used.is_subset(&kept_steps)
                });
                if !coeff_ok {
                    return Err(Error::UnsupportedTower(format!(
                        "unramified step {level} references a dropped wild generator"
                    )));
                }
                kept_steps.insert(level);
                kept_gens.push((gen, step.degree));
            }
            StepKind::TotallyRamified => {
                if !is_radical(&tower, i) {
                    return Err(Error::UnsupportedTower(format!(
                        "totally ramified step {level} is not radical (X^e - w)"
                    )));
                }
                let e = step.degree;
                let wild_step = p > 1 && e % p == 0;
                if wild_step {
                    if !is_prime_power(e, p) {
                        return Err(Error::UnsupportedTower(format!(
                            "wild step {level} has degree {e}, not a power of {p}"
                        )));
                    }
                    any_wild = true;
                    continue; // contributes trivially to the tame part
                }
                // tame radical step: keep the generator, replacing it by a
                // power when its radicand involves dropped wild generators
                let radicand = radicand_at_top(&tower, i);
                if uses_only(&tower, &radicand, &kept_steps) {
                    kept_steps.insert(level);
                    kept_gens.push((gen, e));
                } else {
                    let mut y = gen.clone();
                    let mut w = radicand.clone();
                    let mut scaled = 1usize;
                    let mut ok = false;
                    for _ in 0..8 {
                        if uses_only(&tower, &w, &kept_steps) {
                            ok = true;
                            break;
                        }
                        y = top.pow_u64(&y, p as u64);
                        w = top.pow_u64(&w, p as u64);
                        scaled *= p;
                    }
                    let _ = scaled;
                    if !ok {
                        return Err(Error::UnsupportedTower(format!(
                            "tame step {level}: radicand cannot be freed of wild generators"
                        )));
                    }
                    kept_steps.insert(level);
                    kept_gens.push((y, e));
                }
            }
        }
    }
    let _ = nsteps;
    if !any_wild {
        return Ok(a.clone());
    }
    if kept_gens.is_empty() {
        let one = tower.elem_from_ground(&tower.ground.element_field().from_i64(1));
        return Ok(AlgElem::from_tower(tower, one));
    }
    // primitive element of the kept subtower
    let expected: usize = kept_gens.iter().map(|(_, d)| d).product();
    for attempt in 0..6 {
        let mut acc = top.zero();
        for (j, (g, _)) in kept_gens.iter().enumerate() {
            let c = top.from_i64(1 + (attempt * j) as i64);
            acc = top.add(&acc, &top.mul(&c, g));
        }
        let cand = AlgElem::from_tower(tower.clone(), acc);
        if cand.degree()? == expected {
            let _ = policy;
            return Ok(cand);
        }
    }
    Err(Error::Invalid(
        "no primitive element found for the tame subtower".into(),
    ))
}

fn gen_at_top(tower: &Tower, level: usize) -> FElem {
    let below = &tower.level(level - 1).field;
    let mut gen = FElem::Ext(vec![below.zero(), below.one()]);
    for l in level + 1..=tower.num_steps() {
        gen = tower.level(l).field.lift_base(gen);
    }
    gen
}

fn is_radical(tower: &Tower, step_idx: usize) -> bool {
    let step = &tower.steps()[step_idx];
    let low = &tower.level(step_idx).field;
    step.minpoly[1..step.degree].iter().all(|c| low.is_zero(c))
}

fn radicand_at_top(tower: &Tower, step_idx: usize) -> FElem {
    let step = &tower.steps()[step_idx];
    let low = &tower.level(step_idx).field;
    let w = low.neg(&step.minpoly[0]);
    let mut lifted = w;
    for l in step_idx + 1..=tower.num_steps() {
        lifted = tower.level(l).field.lift_base(lifted);
    }
    lifted
}

fn is_prime_power(mut e: usize, p: usize) -> bool {
    if e == 1 {
        return false;
    }
    while e % p == 0 {
        e /= p;
    }
    e == 1
}

/// Theorem-6.3-style sandwich report: per stage the upper generator `a_nu`
/// and the lower generator `b_nu = tame_part(a_nu)`, with ramification data,
/// and whether the two towers coincide.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub lower_gens: Vec<AlgElem>,
    pub upper_gens: Vec<AlgElem>,
    pub collapsed: bool,
    pub per_stage: Vec<StageRam>,
    /// Caveat: the collapsed report is finite-stage evidence; the tame-field
    /// hypothesis of the exact-equality corollary is not asserted.
    pub note: &'static str,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRam {
    pub stage: usize,
    pub upper: RamData,
    pub lower: RamData,
}

pub const SANDWICH_NOTE: &str = "collapsed=true is finite-stage evidence that both bounding towers agree; \
the tame-ground-field hypothesis of the exact-equality corollary is not verified";

/// Build the sandwich report for the first `stages` stages of a limit.
pub fn icf_sandwich(
    lv: &Arc<LimitValuation>,
    stages: usize,
    policy: &RefinePolicy,
) -> Result<SandwichReport> {
    let mut lower_gens = vec![];
    let mut upper_gens = vec![];
    let mut per_stage = vec![];
    let mut collapsed = true;
    for nu in 1..=stages {
        let st = lv.construct_stage(nu)?;
        let upper = st.a.clone();
        let lower = tame_part(&upper, policy)?;
        let upper_ram = local_invariants(&upper, policy)?;
        let lower_ram = local_invariants(&lower, policy)?;
        if lower.degree()? != upper.degree()? {
            collapsed = false;
        }
        per_stage.push(StageRam { stage: nu, upper: upper_ram, lower: lower_ram });
        lower_gens.push(lower);
        upper_gens.push(upper);
    }
    Ok(SandwichReport { lower_gens, upper_gens, collapsed, per_stage, note: SANDWICH_NOTE })
}

/// Invariants of the composite `K(b, c)` via a primitive element, for the
/// equality-of-invariants checks: both elements must live in one tower (or
/// nested towers).
pub fn composite_invariants(
    b: &AlgElem,
    c: &AlgElem,
    policy: &RefinePolicy,
) -> Result<(usize, usize)> {
    let (x, y) = crate::algclose::common_tower(b, c)?;
    let top = x.tower().top_field().clone();
    let mut best: Option<(usize, AlgElem)> = None;
    for k in 1..=4i64 {
        let expr = top.add(x.expr(), &top.mul(&top.from_i64(k), y.expr()));
        let cand = AlgElem::from_tower(x.tower().clone(), expr);
        let deg = cand.degree()?;
        let better = match &best {
            None => true,
            Some((d, _)) => deg > *d,
        };
        if better {
            best = Some((deg, cand));
        }
    }
    let (_, prim) = best.expect("at least one candidate");
    prim.ext_invariants(policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundField;
    use crate::pcslimit::StreamSpec;

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

    fn dyadic_limit(p: u64) -> Arc<LimitValuation> {
        LimitValuation::new(
            GroundField::padic(p).unwrap(),
            StreamSpec::Dyadic,
            6,
            RefinePolicy::default(),
        )
        .unwrap()
    }

    fn factorial_limit(p: u64) -> Arc<LimitValuation> {
        LimitValuation::new(
            GroundField::padic(p).unwrap(),
            StreamSpec::Factorial,
            8,
            RefinePolicy::default(),
        )
        .unwrap()
    }

    #[test]
    fn local_invariants_examples() {
        let policy = RefinePolicy::default();
        let r1 = local_invariants(&sqrt_elem(2, -2), &policy).unwrap();
        assert_eq!(r1, RamData { e: 2, f_res: 1, e_tame: 1, wild: true });
        let r2 = local_invariants(&sqrt_elem(5, -2), &policy).unwrap();
        assert_eq!(r2, RamData { e: 1, f_res: 2, e_tame: 1, wild: false });
        let r3 = local_invariants(&quartic_root_of_5(), &policy).unwrap();
        assert_eq!(r3, RamData { e: 4, f_res: 1, e_tame: 4, wild: false });
    }

    #[test]
    fn tame_part_examples() {
        let policy = RefinePolicy::default();
        // sqrt(-2) at p=2: wild, so the tame part is rational
        let b1 = tame_part(&sqrt_elem(2, -2), &policy).unwrap();
        assert_eq!(b1.degree().unwrap(), 1);
        // sqrt(-2) at p=5: unramified, contained in K^r
        let b2 = tame_part(&sqrt_elem(5, -2), &policy).unwrap();
        assert_eq!(b2.degree().unwrap(), 2);
        assert_eq!(
            sqrt_elem(5, -2).dist(&b2, &policy).unwrap(),
            OrderedValue::PosInf
        );
        // 5^(1/4) at p=5: tame totally ramified, kept whole
        let b3 = tame_part(&quartic_root_of_5(), &policy).unwrap();
        assert_eq!(b3.degree().unwrap(), 4);
    }

    #[test]
    fn tame_part_idempotent() {
        let policy = RefinePolicy::default();
        for a in [sqrt_elem(2, -2), sqrt_elem(5, -2), quartic_root_of_5()] {
            let b = tame_part(&a, &policy).unwrap();
            let bb = tame_part(&b, &policy).unwrap();
            assert_eq!(b.degree().unwrap(), bb.degree().unwrap());
        }
    }

    #[test]
    fn tame_part_preserves_tame_data() {
        let policy = RefinePolicy::default();
        for a in [sqrt_elem(2, -2), sqrt_elem(5, -2), quartic_root_of_5()] {
            let ra = local_invariants(&a, &policy).unwrap();
            let b = tame_part(&a, &policy).unwrap();
            let rb = local_invariants(&b, &policy).unwrap();
            assert_eq!(rb.e_tame, ra.e_tame, "tame ramification preserved");
            assert_eq!(rb.f_res, ra.f_res, "residue degree preserved");
            assert!(!rb.wild);
        }
    }

    #[test]
    fn wild_below_tame_power_fallback() {
        // tower [X^3 - 3][X^2 - u1] at p=3: u2 = 3^(1/6); the tame part is
        // 3^(1/2) = u2^3
        let policy = RefinePolicy::default();
        let base = Tower::base(GroundField::padic(3).unwrap());
        let three = base.top_field().from_i64(3);
        let t1 = base.extend_radical(&three, 3).unwrap();
        let u1 = t1.top_generator();
        let t2 = t1.extend_radical(&u1, 2).unwrap();
        let u2 = t2.top_generator();
        let a = AlgElem::from_tower(t2, u2);
        assert_eq!(a.degree().unwrap(), 6);
        let b = tame_part(&a, &policy).unwrap();
        assert_eq!(b.degree().unwrap(), 2);
        let rb = local_invariants(&b, &policy).unwrap();
        assert_eq!(rb.e, 2);
        assert!(!rb.wild);
    }

    #[test]
    fn sandwich_collapsed_for_tame_tower() {
        let policy = RefinePolicy::default();
        let lv = dyadic_limit(5);
        let rep = icf_sandwich(&lv, 2, &policy).unwrap();
        assert!(rep.collapsed);
        assert_eq!(rep.lower_gens.len(), 2);
        for (lo, up) in rep.lower_gens.iter().zip(rep.upper_gens.iter()) {
            assert_eq!(lo.degree().unwrap(), up.degree().unwrap());
        }
        assert_eq!(rep.per_stage[0].upper, RamData { e: 2, f_res: 1, e_tame: 2, wild: false });
        assert_eq!(rep.per_stage[1].upper, RamData { e: 4, f_res: 1, e_tame: 4, wild: false });
    }

    #[test]
    fn sandwich_splits_for_wild_tower() {
        let policy = RefinePolicy::default();
        let lv = dyadic_limit(2);
        let rep = icf_sandwich(&lv, 2, &policy).unwrap();
        assert!(!rep.collapsed);
        for lo in &rep.lower_gens {
            assert_eq!(lo.degree().unwrap(), 1, "lower generators are rational");
        }
        assert!(rep.per_stage.iter().all(|s| s.upper.wild));
    }

    #[test]
    fn sandwich_trivial_for_rational_stages() {
        let policy = RefinePolicy::default();
        let lv = factorial_limit(2);
        let rep = icf_sandwich(&lv, 3, &policy).unwrap();
        assert!(rep.collapsed);
        for (lo, up) in rep.lower_gens.iter().zip(rep.upper_gens.iter()) {
            assert_eq!(lo.degree().unwrap(), 1);
            assert_eq!(up.degree().unwrap(), 1);
        }
    }

    #[test]
    fn composite_invariants_lemma_6_2() {
        // b = tame_part(a_1); the composite K(b, a_mu) keeps the invariants
        // of K(a_mu)
        let policy = RefinePolicy::default();
        for p in [5u64, 2] {
            let lv = dyadic_limit(p);
            let s1 = lv.construct_stage(1).unwrap();
            let s2 = lv.construct_stage(2).unwrap();
            let b = tame_part(&s1.a, &policy).unwrap();
            let comp = composite_invariants(&b, &s2.a, &policy).unwrap();
            let direct = s2.a.ext_invariants(&policy).unwrap();
            assert_eq!(comp, direct, "p = {p}");
        }
    }

    #[test]
    fn multiplicative_along_steps() {
        let policy = RefinePolicy::default();
        let a = quartic_root_of_5();
        // whole-tower invariants equal the product over the steps
        let (e, f) = a.ext_invariants(&policy).unwrap();
        let steps = a.tower().steps();
        let prod_e: usize = steps
            .iter()
            .map(|s| if s.kind == StepKind::TotallyRamified { s.degree } else { 1 })
            .product();
        let prod_f: usize = steps
            .iter()
            .map(|s| if s.kind == StepKind::Unramified { s.degree } else { 1 })
            .product();
        assert_eq!((e, f), (prod_e, prod_f));
    }
}
