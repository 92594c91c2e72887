//! Pseudo-Cauchy sequences, limit-presented valuation-algebraic valuations,
//! the stage-wise construction of minimal pairs `(a_nu, gamma_nu)` along a
//! limit, and the complete key-polynomial sequence check.
//!
//! A limit valuation is presented by an approximant stream `(z_nu)` with
//! strictly increasing consecutive distances `gamma_nu`; values of
//! polynomials are certified by a Hasse-derivative bound that freezes
//! `v f(z_mu)` for all later stages.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algclose::{AlgElem, RefinePolicy, Tower};
use crate::error::{Error, Result};
use crate::ground::GroundField;
use crate::keypoly::{self, AmbientValuation};
use crate::pairdef::PairOfDefinition;
use crate::poly::Poly;
use crate::values::OrderedValue;

/// Built-in approximant streams or an explicit finite prefix.
#[derive(Clone, Debug)]
pub enum StreamSpec {
    /// `z_nu = sum_{n<=nu} p^(n!)`: rational approximants, degree-1 stages.
    Factorial,
    /// `z_nu = sum_{n<=nu} p^(1 - 2^-n)`: growing radical towers.
    Dyadic,
    Explicit(Vec<AlgElem>),
}

struct StreamState {
    /// Materialized prefix `z_1, z_2, ...`.
    elems: Vec<AlgElem>,
    /// `gamma_nu = v(z_nu - z_{nu+1})`, available once `z_{nu+1}` exists.
    gammas: Vec<OrderedValue>,
}

/// A valuation-algebraic valuation on `K(X)` presented by a pCs with the
/// declared contract that `X` is a limit and the `gamma_nu` are cofinal in
/// `v(X - \bar K)`.
pub struct LimitValuation {
    pub ground: GroundField,
    spec: StreamSpec,
    pub policy: RefinePolicy,
    pub stage_cap: usize,
    stream: Mutex<StreamState>,
    value_cache: Mutex<HashMap<String, (usize, OrderedValue)>>,
    stages: Mutex<Vec<StageData>>,
}

/// Data of one constructed stage: the minimal pair `(a_nu, gamma_nu)`, the
/// key polynomial `Q_nu` and the extension invariants of `K(a_nu)|K`.
#[derive(Clone, Debug)]
pub struct StageData {
    pub index: usize,
    pub a: AlgElem,
    pub gamma: OrderedValue,
    pub q_poly: Poly,
    pub invariants: (usize, usize),
    /// Stream index whose approximant seeded this stage.
    pub stream_index: usize,
}

/// Stabilization certificate: at `stage`, every Hasse quotient
/// `(v f(z) - v ∂_b f(z)) / b` stays strictly below `gamma_stage`, so the
/// value is frozen from this stage on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizationCert {
    pub stage: usize,
    pub value: OrderedValue,
    /// Largest Hasse quotient observed (None when f has no derivatives).
    pub bound: Option<OrderedValue>,
    pub gamma: OrderedValue,
}

/// Verdict of `classify_prefix`.
#[derive(Clone, Debug)]
pub enum Classification {
    Stabilized(StabilizationCert),
    /// Prefix-level verdict only: observed values kept increasing through
    /// the inspected stages.
    IncreasingSoFar { through_stage: usize, observed: Vec<OrderedValue> },
}

impl LimitValuation {
    pub fn new(
        ground: GroundField,
        spec: StreamSpec,
        stage_cap: usize,
        policy: RefinePolicy,
    ) -> Result<Arc<Self>> {
        if let StreamSpec::Dyadic = spec {
            // wild for p = 2 is accepted (p-adic ground); the tower layer
            // rejects it over t-adic ground fields
            if !ground.is_padic() {
                return Err(Error::UnsupportedTower(
                    "the dyadic stream needs a p-adic ground field".into(),
                ));
            }
        }
        if let StreamSpec::Factorial = spec {
            if !ground.is_padic() {
                return Err(Error::UnsupportedTower(
                    "the factorial stream needs a p-adic ground field".into(),
                ));
            }
        }
        let lv = LimitValuation {
            ground,
            spec,
            policy,
            stage_cap,
            stream: Mutex::new(StreamState { elems: vec![], gammas: vec![] }),
            value_cache: Mutex::new(HashMap::new()),
            stages: Mutex::new(vec![]),
        };
        Ok(Arc::new(lv))
    }

    /// The approximant `z_nu` (1-based) together with `gamma_nu`.
    pub fn stream_entry(&self, nu: usize) -> Result<(AlgElem, OrderedValue)> {
        assert!(nu >= 1);
        let mut st = self.stream.lock().unwrap();
        while st.elems.len() < nu + 1 {
            let next_index = st.elems.len() + 1;
            match self.materialize(next_index, &st.elems) {
                Some(z) => st.elems.push(z),
                None => {
                    return Err(Error::Unstabilized(st.elems.len().saturating_sub(1)));
                }
            }
        }
        while st.gammas.len() < nu {
            let k = st.gammas.len(); // gamma_{k+1} from z_{k+1}, z_{k+2}
            let d = st.elems[k].dist(&st.elems[k + 1], &self.policy)?;
            if let Some(last) = st.gammas.last() {
                if d.compare(last)? != std::cmp::Ordering::Greater {
                    return Err(Error::Invalid(
                        "stream is not a pseudo-Cauchy sequence: distances must strictly increase"
                            .into(),
                    ));
                }
            }
            st.gammas.push(d);
        }
        Ok((st.elems[nu - 1].clone(), st.gammas[nu - 1].clone()))
    }

    fn materialize(&self, index: usize, prefix: &[AlgElem]) -> Option<AlgElem> {
        match &self.spec {
            StreamSpec::Explicit(list) => list.get(index - 1).cloned(),
            StreamSpec::Factorial => {
                let p = self.ground.residue_char();
                let mut acc = BigInt::from(0);
                let mut fact: u64 = 1;
                for n in 1..=index as u64 {
                    fact *= n;
                    acc += BigInt::from(p).pow(fact as u32);
                }
                Some(AlgElem::from_ground(
                    &self.ground,
                    crate::field::FElem::Rat(BigRational::from_integer(acc)),
                ))
            }
            StreamSpec::Dyadic => {
                // z_index lives in the chain u_1^2 = p, u_{k+1}^2 = u_k;
                // p^(1 - 2^-n) = u_index^(2^index - 2^(index-n))
                let tower = match prefix.last() {
                    None => {
                        let base = Tower::base(self.ground.clone());
                        let p = base
                            .top_field()
                            .from_i64(self.ground.residue_char() as i64);
                        base.extend_radical(&p, 2).ok()?
                    }
                    Some(prev) => {
                        let t = prev.tower().clone();
                        let gen = t.top_generator();
                        t.extend_radical(&gen, 2).ok()?
                    }
                };
                let top = tower.top_field().clone();
                let u = tower.top_generator();
                let mut acc = top.zero();
                let two_idx: u64 = 1 << index;
                for n in 1..=index as u32 {
                    let e = two_idx - (1u64 << (index as u32 - n));
                    acc = top.add(&acc, &top.pow_u64(&u, e));
                }
                Some(AlgElem::from_tower(tower, acc))
            }
        }
    }

    /// Largest tower materialized so far (used as the reference tower for
    /// root enumeration against this limit).
    pub fn reference_tower(&self) -> Arc<Tower> {
        let st = self.stream.lock().unwrap();
        st.elems
            .last()
            .map(|z| z.tower().clone())
            .unwrap_or_else(|| Tower::base(self.ground.clone()))
    }

    /// `v(X - c)` under the limit: the first stage with
    /// `v(z_nu - c) < gamma_nu` freezes the distance; `c = z_nu` gives
    /// exactly `gamma_nu`.
    pub fn val_x_minus(&self, c: &AlgElem) -> Result<OrderedValue> {
        for nu in 1..=self.stage_cap {
            let (z, gamma) = self.stream_entry(nu)?;
            if z.dist(c, &self.policy).map(|d| d.is_pos_inf()).unwrap_or(false) {
                // c equals the approximant: v(X - z_nu) = gamma_nu
                return Ok(gamma);
            }
            let cap = gamma.as_rational()?.clone();
            let d = z.dist_capped(c, &cap, &self.policy)?;
            if d.compare(&gamma)? == std::cmp::Ordering::Less {
                return Ok(d);
            }
        }
        Err(Error::Unstabilized(self.stage_cap))
    }

    /// The certified value of `f(X)` under the limit valuation.
    pub fn limit_val(&self, f: &Poly) -> Result<(OrderedValue, StabilizationCert)> {
        if f.is_zero() {
            return Err(Error::ZeroElement);
        }
        let key = f.render();
        if let Some((stage, v)) = self.value_cache.lock().unwrap().get(&key) {
            let (_, gamma) = self.stream_entry(*stage)?;
            return Ok((
                v.clone(),
                StabilizationCert { stage: *stage, value: v.clone(), bound: None, gamma },
            ));
        }
        match self.classify_prefix(f, self.stage_cap)? {
            Classification::Stabilized(cert) => {
                self.value_cache
                    .lock()
                    .unwrap()
                    .insert(key, (cert.stage, cert.value.clone()));
                Ok((cert.value.clone(), cert))
            }
            Classification::IncreasingSoFar { through_stage, .. } => {
                Err(Error::Unstabilized(through_stage))
            }
        }
    }

    pub fn limit_val_fraction(&self, num: &Poly, den: &Poly) -> Result<OrderedValue> {
        if den.is_zero() {
            return Err(Error::ZeroElement);
        }
        let (vn, _) = self.limit_val(num)?;
        let (vd, _) = self.limit_val(den)?;
        vn.checked_sub(&vd)
    }

    /// Kaplansky dichotomy at prefix level: find a stage whose Hasse bound
    /// certifies stabilization, or report the values observed so far.
    pub fn classify_prefix(&self, f: &Poly, max_stage: usize) -> Result<Classification> {
        let mut observed = vec![];
        for nu in 1..=max_stage {
            let (z, gamma) = self.stream_entry(nu)?;
            let value = eval_at(f, &z)?;
            observed.push(value.clone());
            if !value.is_finite() {
                continue; // z_nu is a root of f: no certificate here
            }
            let mut bound: Option<OrderedValue> = None;
            let mut ok = true;
            let deg = f.degree().unwrap_or(0);
            for b in 1..=deg {
                let db = f.hasse_deriv(b);
                if db.is_zero() {
                    continue;
                }
                let vdb = eval_at(&db, &z)?;
                if !vdb.is_finite() {
                    continue;
                }
                let quot = value
                    .checked_sub(&vdb)?
                    .int_scale(1)?
                    .as_rational()?
                    .clone()
                    / BigRational::from_integer(BigInt::from(b as i64));
                let q = OrderedValue::Fin(quot);
                bound = Some(match bound.take() {
                    None => q.clone(),
                    Some(old) => old.max_of(&q)?,
                });
                if q.compare(&gamma)? != std::cmp::Ordering::Less {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Classification::Stabilized(StabilizationCert {
                    stage: nu,
                    value,
                    bound,
                    gamma,
                }));
            }
        }
        Ok(Classification::IncreasingSoFar { through_stage: max_stage, observed })
    }

    /// Construct stages 1..=nu of the minimal-pair sequence and return the
    /// nu-th.
    pub fn construct_stage(self: &Arc<Self>, nu: usize) -> Result<StageData> {
        assert!(nu >= 1);
        let mut stages = self.stages.lock().unwrap();
        while stages.len() < nu {
            let next = stages.len() + 1;
            let prev_gamma = stages.last().map(|s| s.gamma.clone());
            let stage = self.build_stage(next, prev_gamma)?;
            stages.push(stage);
        }
        Ok(stages[nu - 1].clone())
    }

    fn build_stage(
        self: &Arc<Self>,
        index: usize,
        prev_gamma: Option<OrderedValue>,
    ) -> Result<StageData> {
        // least stream index whose gamma exceeds the previous stage value
        let mut mu = 1;
        let (d, delta) = loop {
            let (z, gamma) = self.stream_entry(mu)?;
            let beats = match &prev_gamma {
                None => true,
                Some(pg) => gamma.compare(pg)? == std::cmp::Ordering::Greater,
            };
            if beats {
                break (z, gamma);
            }
            mu += 1;
            if mu > self.stage_cap {
                return Err(Error::Unstabilized(self.stage_cap));
            }
        };
        // minimal pair for v_{d, delta}: least-degree truncation of d within delta
        let delta_rat = delta.as_rational()?.clone();
        let walk = d.truncation_walk(&(delta_rat + BigRational::one()))?;
        let mut center = None;
        for step in &walk {
            if step.gap.compare(&delta)? != std::cmp::Ordering::Less {
                center = Some(d.truncation_elem(step));
                break;
            }
        }
        let mut a = center.ok_or_else(|| {
            Error::Invalid("no truncation reaches the stage distance".into())
        })?;
        let mut gamma = self.val_x_minus(&a)?;
        // conjugate dominance: replace a by a conjugate with larger v(X - .)
        let conjugates = a.conjugates(&self.policy)?;
        for sigma in conjugates.iter().skip(1) {
            let w = self.val_x_minus(sigma)?;
            if w.compare(&gamma)? == std::cmp::Ordering::Greater {
                if !sigma.is_exact() {
                    return Err(Error::UnsupportedTower(
                        "a dominating conjugate is not expressible in the stage tower".into(),
                    ));
                }
                a = sigma.clone();
                gamma = w;
            }
        }
        // stage invariants
        let pair = PairOfDefinition::new(a.clone(), gamma.clone())?;
        let min_report = pair.is_minimal(&self.policy)?;
        if !min_report.minimal {
            return Err(Error::Invalid(format!(
                "stage {index}: constructed pair is not minimal"
            )));
        }
        if let Some(pg) = &prev_gamma {
            if gamma.compare(pg)? != std::cmp::Ordering::Greater {
                return Err(Error::Invalid(format!(
                    "stage {index}: gamma did not strictly increase"
                )));
            }
        }
        let q_poly = a.minpoly()?;
        let invariants = a.ext_invariants(&self.policy)?;
        Ok(StageData { index, a, gamma, q_poly, invariants, stream_index: mu })
    }

    /// Per-stage extension invariants with the divisibility chain checked.
    pub fn invariants_union_stage(self: &Arc<Self>, nu: usize) -> Result<Vec<(usize, usize)>> {
        let mut out = vec![];
        for k in 1..=nu {
            let st = self.construct_stage(k)?;
            if let Some(&(pe, pf)) = out.last() {
                let (e, f) = st.invariants;
                if e % pe != 0 || f % pf != 0 {
                    return Err(Error::Invalid(format!(
                        "invariants chain broke at stage {k}: ({pe},{pf}) then ({e},{f})"
                    )));
                }
            }
            out.push(st.invariants);
        }
        Ok(out)
    }

    /// Lemma-level surrogate: a later approximant always beats `gamma_nu`.
    pub fn later_approximant_beats(&self, nu: usize) -> Result<bool> {
        let (_, gamma) = self.stream_entry(nu)?;
        let (znext, _) = self.stream_entry(nu + 1)?;
        let v = self.val_x_minus(&znext)?;
        Ok(v.compare(&gamma)? == std::cmp::Ordering::Greater)
    }

    /// Limit compatibility through stage `nu`: `v(z' - z_mu) = gamma_mu`
    /// for all `mu <= nu`.
    pub fn limit_compatible(&self, candidate: &AlgElem, nu: usize) -> Result<bool> {
        for mu in 1..=nu {
            let (z, gamma) = self.stream_entry(mu)?;
            let d = z.dist(candidate, &self.policy)?;
            if d.compare(&gamma)? != std::cmp::Ordering::Equal {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn eval_at(f: &Poly, z: &AlgElem) -> Result<OrderedValue> {
    let lifted = crate::pairdef::lift_poly_into(z.tower(), f)?;
    let value = lifted.eval(z.expr());
    Ok(z.tower().val_top(&value))
}

/// Strict-increase test on consecutive distances of a prefix (equivalent to
/// the three-index pCs condition by the ultrametric inequality).
pub fn is_pcs(prefix: &[AlgElem], policy: &RefinePolicy) -> Result<bool> {
    if prefix.len() < 3 {
        return Err(Error::Invalid("a pCs prefix needs at least three entries".into()));
    }
    let mut last: Option<OrderedValue> = None;
    for pair in prefix.windows(2) {
        let d = pair[0].dist(&pair[1], policy)?;
        if let Some(prev) = &last {
            if d.compare(prev)? != std::cmp::Ordering::Greater {
                return Ok(false);
            }
        }
        last = Some(d);
    }
    Ok(true)
}

/// Report of `complete_seq_check`: the least stage whose truncation
/// valuation already computes `vf`.
#[derive(Clone, Debug)]
pub struct CskpReport {
    pub stage: usize,
    pub value: OrderedValue,
}

/// CSKP3 at desk scale: find the least stage `nu <= max_stage` with
/// `vf = v_{Q_nu} f`, verifying on the way that each `Q_nu` is a key
/// polynomial and that the `delta(Q_nu)` strictly increase.
pub fn complete_seq_check(
    lv: &Arc<LimitValuation>,
    f: &Poly,
    max_stage: usize,
) -> Result<CskpReport> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    let ambient = AmbientValuation::ByLimit(lv.clone());
    let (vf, _) = lv.limit_val(f)?;
    let mut last_delta: Option<OrderedValue> = None;
    for nu in 1..=max_stage {
        let stage = lv.construct_stage(nu)?;
        let key = keypoly::is_key_poly(&stage.q_poly, &ambient, &lv.policy)?;
        if !key.is_key {
            return Err(Error::Invalid(format!(
                "stage {nu}: constructed stage polynomial is not a key polynomial"
            )));
        }
        if let Some(prev) = &last_delta {
            if key.delta.compare(prev)? != std::cmp::Ordering::Greater {
                return Err(Error::Invalid(format!(
                    "stage {nu}: delta(Q) did not strictly increase"
                )));
            }
        }
        last_delta = Some(key.delta.clone());
        let vq = keypoly::vq(&stage.q_poly, f, &ambient)?;
        if vq == vf {
            return Ok(CskpReport { stage: nu, value: vf });
        }
    }
    Err(Error::Unstabilized(max_stage))
}
