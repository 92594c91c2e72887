//! Exact coefficient fields: `Q`, prime fields `F_p`, rational function
//! fields `k(t)`, and simple algebraic extensions of any of these by a monic
//! irreducible polynomial. Tower levels, residue fields and expansion digit
//! fields are all instances of [`ExactField`], so the whole crate runs on one
//! arithmetic kernel. Inversion in extensions goes through extended Euclid,
//! exactly as quotient-ring arithmetic demands.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::raw;

/// A simple extension step: `base[y] / (modulus)`.
#[derive(Debug, PartialEq)]
pub struct ExtField {
    pub base: ExactField,
    /// Monic, coefficients in `base`, degree >= 2.
    pub modulus: Vec<FElem>,
}

/// Descriptor of an exact field. Cheap to clone; extensions share their
/// modulus through an `Arc`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactField {
    Rationals,
    Prime(u64),
    /// Rational function field `coeff(t)`; `coeff` is `Rationals` or `Prime`.
    RatFun(Box<ExactField>),
    Ext(Arc<ExtField>),
}

/// Element of an [`ExactField`]; the variant must match the field descriptor.
#[derive(Clone, PartialEq, Debug)]
pub enum FElem {
    Rat(BigRational),
    Mod(u64),
    Fun(Box<RatFunElem>),
    /// Dense ascending coefficients over the base field, trailing zeros
    /// trimmed, length < degree of the modulus.
    Ext(Vec<FElem>),
}

/// `num(t)/den(t)` in canonical form: `den` monic, `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunElem {
    pub num: Vec<FElem>,
    pub den: Vec<FElem>,
}

fn mod_add(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl ExactField {
    pub fn extension(base: ExactField, modulus: Vec<FElem>) -> Result<ExactField> {
        if modulus.len() < 3 {
            return Err(Error::Invalid("extension modulus must have degree >= 2".into()));
        }
        if !base.is_one(modulus.last().unwrap()) {
            return Err(Error::Invalid("extension modulus must be monic".into()));
        }
        Ok(ExactField::Ext(Arc::new(ExtField { base, modulus })))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            ExactField::Rationals => 0,
            ExactField::Prime(p) => *p,
            ExactField::RatFun(c) => c.characteristic(),
            ExactField::Ext(e) => e.base.characteristic(),
        }
    }

    /// Degree of this field over the bottom of its extension chain; 1 for
    /// non-extensions.
    pub fn ext_degree(&self) -> usize {
        match self {
            ExactField::Ext(e) => (e.modulus.len() - 1) * e.base.ext_degree(),
            _ => 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ExactField::Prime(_) => true,
            ExactField::Ext(e) => e.base.is_finite(),
            _ => false,
        }
    }

    /// Number of elements of a finite field.
    pub fn order(&self) -> Result<BigUint> {
        if !self.is_finite() {
            return Err(Error::Invalid("infinite field has no order".into()));
        }
        Ok(BigUint::from(self.characteristic()).pow(self.ext_degree() as u32))
    }

    pub fn zero(&self) -> FElem {
        match self {
            ExactField::Rationals => FElem::Rat(BigRational::zero()),
            ExactField::Prime(_) => FElem::Mod(0),
            ExactField::RatFun(c) => FElem::Fun(Box::new(RatFunElem {
                num: vec![],
                den: vec![c.one()],
            })),
            ExactField::Ext(_) => FElem::Ext(vec![]),
        }
    }

    pub fn one(&self) -> FElem {
        match self {
            ExactField::Rationals => FElem::Rat(BigRational::one()),
            ExactField::Prime(_) => FElem::Mod(1),
            ExactField::RatFun(c) => FElem::Fun(Box::new(RatFunElem {
                num: vec![c.one()],
                den: vec![c.one()],
            })),
            ExactField::Ext(e) => FElem::Ext(vec![e.base.one()]),
        }
    }

    pub fn is_zero(&self, a: &FElem) -> bool {
        match a {
            FElem::Rat(q) => q.is_zero(),
            FElem::Mod(r) => *r == 0,
            FElem::Fun(f) => f.num.is_empty(),
            FElem::Ext(v) => v.is_empty(),
        }
    }

    pub fn is_one(&self, a: &FElem) -> bool {
        match (self, a) {
            (_, FElem::Rat(q)) => q.is_one(),
            (_, FElem::Mod(r)) => *r == 1,
            (ExactField::RatFun(c), FElem::Fun(f)) => {
                f.num.len() == 1 && c.is_one(&f.num[0]) && f.den.len() == 1 && c.is_one(&f.den[0])
            }
            (ExactField::Ext(e), FElem::Ext(v)) => v.len() == 1 && e.base.is_one(&v[0]),
            _ => false,
        }
    }

    pub fn base(&self) -> Option<&ExactField> {
        match self {
            ExactField::Ext(e) => Some(&e.base),
            _ => None,
        }
    }

    /// Lift a base-field element into this extension.
    pub fn lift_base(&self, a: FElem) -> FElem {
        match self {
            ExactField::Ext(e) => {
                if e.base.is_zero(&a) {
                    FElem::Ext(vec![])
                } else {
                    FElem::Ext(vec![a])
                }
            }
            _ => a,
        }
    }

    pub fn add(&self, a: &FElem, b: &FElem) -> FElem {
        match (self, a, b) {
            (_, FElem::Rat(x), FElem::Rat(y)) => FElem::Rat(x + y),
            (ExactField::Prime(p), FElem::Mod(x), FElem::Mod(y)) => FElem::Mod(mod_add(*x, *y, *p)),
            (ExactField::RatFun(c), FElem::Fun(x), FElem::Fun(y)) => {
                // x.n/x.d + y.n/y.d = (x.n y.d + y.n x.d)/(x.d y.d)
                let n = raw::add(c, &raw::mul(c, &x.num, &y.den), &raw::mul(c, &y.num, &x.den));
                let d = raw::mul(c, &x.den, &y.den);
                self.make_fun(n, d)
            }
            (ExactField::Ext(e), FElem::Ext(x), FElem::Ext(y)) => FElem::Ext(raw::add(&e.base, x, y)),
            _ => panic!("field/element mismatch in add: {self:?} {a:?} {b:?}"),
        }
    }

    pub fn neg(&self, a: &FElem) -> FElem {
        match (self, a) {
            (_, FElem::Rat(x)) => FElem::Rat(-x),
            (ExactField::Prime(p), FElem::Mod(x)) => FElem::Mod(if *x == 0 { 0 } else { p - x }),
            (ExactField::RatFun(c), FElem::Fun(x)) => FElem::Fun(Box::new(RatFunElem {
                num: raw::neg(c, &x.num),
                den: x.den.clone(),
            })),
            (ExactField::Ext(e), FElem::Ext(x)) => FElem::Ext(raw::neg(&e.base, x)),
            _ => panic!("field/element mismatch in neg"),
        }
    }

    pub fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        match (self, a, b) {
            (_, FElem::Rat(x), FElem::Rat(y)) => FElem::Rat(x * y),
            (ExactField::Prime(p), FElem::Mod(x), FElem::Mod(y)) => FElem::Mod(mod_mul(*x, *y, *p)),
            (ExactField::RatFun(c), FElem::Fun(x), FElem::Fun(y)) => {
                let n = raw::mul(c, &x.num, &y.num);
                let d = raw::mul(c, &x.den, &y.den);
                self.make_fun(n, d)
            }
            (ExactField::Ext(e), FElem::Ext(x), FElem::Ext(y)) => {
                let prod = raw::mul(&e.base, x, y);
                FElem::Ext(raw::rem(&e.base, &prod, &e.modulus))
            }
            _ => panic!("field/element mismatch in mul"),
        }
    }

    pub fn inv(&self, a: &FElem) -> Result<FElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        Ok(match (self, a) {
            (_, FElem::Rat(x)) => FElem::Rat(x.recip()),
            (ExactField::Prime(p), FElem::Mod(x)) => FElem::Mod(mod_pow(*x, p - 2, *p)),
            (ExactField::RatFun(_), FElem::Fun(x)) => {
                self.make_fun(x.den.clone(), x.num.clone())
            }
            (ExactField::Ext(e), FElem::Ext(x)) => {
                // extended Euclid against the modulus
                let (g, s) = raw::half_ext_gcd(&e.base, x, &e.modulus);
                if raw::deg(&g) != Some(0) {
                    return Err(Error::Invalid(
                        "extension modulus is not irreducible: inverse does not exist".into(),
                    ));
                }
                let ginv = e.base.inv(&g[0])?;
                FElem::Ext(raw::scale(&e.base, &s, &ginv))
            }
            _ => panic!("field/element mismatch in inv"),
        })
    }

    pub fn div(&self, a: &FElem, b: &FElem) -> Result<FElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow_u64(&self, a: &FElem, mut e: u64) -> FElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn from_bigint(&self, n: &BigInt) -> FElem {
        match self {
            ExactField::Rationals => FElem::Rat(BigRational::from_integer(n.clone())),
            ExactField::Prime(p) => {
                let m = n.mod_floor_u64(*p);
                FElem::Mod(m)
            }
            ExactField::RatFun(c) => {
                let inner = c.from_bigint(n);
                if c.is_zero(&inner) {
                    self.zero()
                } else {
                    FElem::Fun(Box::new(RatFunElem {
                        num: vec![inner],
                        den: vec![c.one()],
                    }))
                }
            }
            ExactField::Ext(e) => self.lift_base(e.base.from_bigint(n)),
        }
    }

    pub fn from_i64(&self, n: i64) -> FElem {
        self.from_bigint(&BigInt::from(n))
    }

    /// Embed a rational; fails in positive characteristic when the
    /// denominator vanishes.
    pub fn from_rational(&self, q: &BigRational) -> Result<FElem> {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        self.div(&num, &den)
    }

    fn make_fun(&self, num: Vec<FElem>, den: Vec<FElem>) -> FElem {
        let c = match self {
            ExactField::RatFun(c) => c,
            _ => panic!("make_fun on non function field"),
        };
        assert!(raw::deg(&den).is_some(), "zero denominator in function field");
        if num.is_empty() {
            return self.zero();
        }
        let g = raw::gcd_monic(c, &num, &den);
        let (num, den) = if raw::deg(&g) == Some(0) {
            (num, den)
        } else {
            (
                raw::div_exact(c, &num, &g),
                raw::div_exact(c, &den, &g),
            )
        };
        // normalise to monic denominator
        let lead = den.last().unwrap().clone();
        let linv = c.inv(&lead).expect("nonzero leading coefficient");
        FElem::Fun(Box::new(RatFunElem {
            num: raw::scale(c, &num, &linv),
            den: raw::scale(c, &den, &linv),
        }))
    }

    /// Build a function-field element from numerator and denominator
    /// coefficient lists.
    pub fn fun_from_parts(&self, num: Vec<FElem>, den: Vec<FElem>) -> Result<FElem> {
        let num = raw::trim(num);
        let den = raw::trim(den);
        if den.is_empty() {
            return Err(Error::ZeroElement);
        }
        Ok(self.make_fun(num, den))
    }

    pub fn render(&self, a: &FElem) -> String {
        match (self, a) {
            (_, FElem::Rat(q)) => crate::values::render_rational(q),
            (_, FElem::Mod(r)) => r.to_string(),
            (ExactField::RatFun(c), FElem::Fun(f)) => {
                let num = render_coeff_list(c, &f.num);
                if raw::deg(&f.den) == Some(0) && c.is_one(&f.den[0]) {
                    num
                } else {
                    format!("{}/{}", num, render_coeff_list(c, &f.den))
                }
            }
            (ExactField::Ext(e), FElem::Ext(v)) => render_coeff_list(&e.base, v),
            _ => panic!("field/element mismatch in render"),
        }
    }
}

fn render_coeff_list(f: &ExactField, v: &[FElem]) -> String {
    if v.is_empty() {
        return "0".to_string();
    }
    v.iter().map(|c| f.render(c)).collect::<Vec<_>>().join(",")
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        let m = self.mod_floor(&BigInt::from(p));
        m.to_u64().expect("mod_floor result fits u64")
    }
}

// ---------------------------------------------------------------------------
// Canonical finite fields F_{p^m} and embeddings between them
// ---------------------------------------------------------------------------

type ModulusCache = Mutex<HashMap<(u64, usize), Arc<Vec<u64>>>>;
type EmbedCache = Mutex<HashMap<(u64, usize, usize), Vec<u64>>>;

fn modulus_cache() -> &'static ModulusCache {
    static CACHE: OnceLock<ModulusCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn embed_cache() -> &'static EmbedCache {
    static CACHE: OnceLock<EmbedCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The canonical field F_{p^m}: for m = 1 the prime field, otherwise
/// `F_p[y]/(phi)` with `phi` the canonical modulus of degree m (the monic
/// irreducible whose coefficient tuple `(c_0, .., c_{m-1})` is smallest in
/// the base-p numbering).
pub fn canonical_fp(p: u64, m: usize) -> ExactField {
    assert!(m >= 1);
    if m == 1 {
        return ExactField::Prime(p);
    }
    let modulus = canonical_modulus(p, m);
    let coeffs: Vec<FElem> = modulus.iter().map(|&c| FElem::Mod(c)).collect();
    ExactField::Ext(Arc::new(ExtField {
        base: ExactField::Prime(p),
        modulus: coeffs,
    }))
}

/// Canonical modulus of F_{p^m} as ascending u64 coefficients (monic, length m+1).
pub fn canonical_modulus(p: u64, m: usize) -> Arc<Vec<u64>> {
    if let Some(hit) = modulus_cache().lock().unwrap().get(&(p, m)) {
        return hit.clone();
    }
    let fp = ExactField::Prime(p);
    let mut counter = vec![0u64; m];
    let found = loop {
        let mut coeffs: Vec<FElem> = counter.iter().map(|&c| FElem::Mod(c)).collect();
        coeffs.push(FElem::Mod(1));
        if poly_is_irreducible_finite(&fp, &coeffs) {
            let mut out: Vec<u64> = counter.clone();
            out.push(1);
            break out;
        }
        // increment the coefficient tuple in base p
        let mut i = 0;
        loop {
            counter[i] += 1;
            if counter[i] < p {
                break;
            }
            counter[i] = 0;
            i += 1;
            assert!(i < m, "no irreducible of degree {m} over F_{p}?");
        }
    };
    let arc = Arc::new(found);
    modulus_cache()
        .lock()
        .unwrap()
        .insert((p, m), arc.clone());
    arc
}

/// Irreducibility over a finite field: f of degree n is irreducible iff
/// x^{q^n} = x mod f and gcd(x^{q^{n/r}} - x, f) = 1 for every prime r | n.
pub fn poly_is_irreducible_finite(field: &ExactField, f: &[FElem]) -> bool {
    let n = match raw::deg(f) {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let q = field.order().expect("finite field");
    let x = vec![field.zero(), field.one()];
    let xqn = raw::pow_mod_q(field, &x, &q.pow(n as u32), f);
    if raw::deg(&raw::sub(field, &xqn, &x)).is_some() {
        return false;
    }
    let mut primes = vec![];
    let mut rem = n;
    let mut d = 2;
    while d * d <= rem {
        if rem % d == 0 {
            primes.push(d);
            while rem % d == 0 {
                rem /= d;
            }
        }
        d += 1;
    }
    if rem > 1 {
        primes.push(rem);
    }
    for r in primes {
        let e = n / r;
        let xe = raw::pow_mod_q(field, &x, &q.pow(e as u32), f);
        let diff = raw::sub(field, &xe, &x);
        let g = raw::gcd_monic(field, &diff, f);
        if raw::deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Convert an element of canonical F_{p^a} to its coefficient vector over F_p.
pub fn fp_elem_coeffs(a: &FElem) -> Vec<u64> {
    match a {
        FElem::Mod(r) => vec![*r],
        FElem::Ext(v) => v
            .iter()
            .map(|c| match c {
                FElem::Mod(r) => *r,
                _ => panic!("canonical finite field element expected"),
            })
            .collect(),
        _ => panic!("canonical finite field element expected"),
    }
}

fn fp_elem_from_coeffs(field: &ExactField, coeffs: &[u64]) -> FElem {
    match field {
        ExactField::Prime(_) => FElem::Mod(coeffs.first().copied().unwrap_or(0)),
        ExactField::Ext(_) => {
            let mut v: Vec<FElem> = coeffs.iter().map(|&c| FElem::Mod(c)).collect();
            while v.last().map(|c| matches!(c, FElem::Mod(0))) == Some(true) {
                v.pop();
            }
            FElem::Ext(v)
        }
        _ => panic!("canonical finite field expected"),
    }
}

/// Embed an element of canonical F_{p^a} into canonical F_{p^b} (a | b).
/// The embedding sends the canonical generator of F_{p^a} to the least root
/// (in coefficient-tuple order) of its modulus inside F_{p^b}.
pub fn embed_canonical(p: u64, a_deg: usize, b_deg: usize, elem: &FElem) -> FElem {
    assert!(b_deg % a_deg == 0, "no embedding F_{{p^{a_deg}}} -> F_{{p^{b_deg}}}");
    let target = canonical_fp(p, b_deg);
    if a_deg == 1 {
        let c = fp_elem_coeffs(elem)[0];
        return target.lift_base(FElem::Mod(c));
    }
    if a_deg == b_deg {
        return elem.clone();
    }
    let key = (p, a_deg, b_deg);
    let gen_image = {
        let cached = embed_cache().lock().unwrap().get(&key).cloned();
        match cached {
            Some(img) => img,
            None => {
                let modulus = canonical_modulus(p, a_deg);
                let poly: Vec<FElem> = modulus
                    .iter()
                    .map(|&c| target.lift_base(FElem::Mod(c)))
                    .collect();
                let mut roots = roots_in_finite_field(&target, &poly);
                roots.sort_by_key(|r| {
                    let mut c = fp_elem_coeffs(r);
                    c.resize(b_deg, 0);
                    c.reverse(); // compare most significant coefficient first
                    c
                });
                let img = fp_elem_coeffs(roots.first().expect("modulus splits in extension"));
                embed_cache().lock().unwrap().insert(key, img.clone());
                img
            }
        }
    };
    let gen_elem = fp_elem_from_coeffs(&target, &gen_image);
    // evaluate elem's coefficient polynomial at the generator image
    let coeffs = fp_elem_coeffs(elem);
    let mut acc = target.zero();
    for &c in coeffs.iter().rev() {
        acc = target.mul(&acc, &gen_elem);
        acc = target.add(&acc, &target.lift_base(FElem::Mod(c)));
    }
    acc
}

// ---------------------------------------------------------------------------
// Factorisation over finite fields (squarefree + DDF + EDF)
// ---------------------------------------------------------------------------

/// Roots of `f` inside the finite field itself (no extension), with
/// multiplicity collapsed. Returned in deterministic order.
pub fn roots_in_finite_field(field: &ExactField, f: &[FElem]) -> Vec<FElem> {
    let mut out = vec![];
    for (g, _mult) in factor_finite(field, f) {
        if raw::deg(&g) == Some(1) {
            // monic x + c  =>  root -c
            let root = field.neg(&g[0]);
            out.push(root);
        }
    }
    out.sort_by_key(fp_sort_key);
    out.dedup();
    out
}

fn fp_sort_key(e: &FElem) -> Vec<u64> {
    let mut c = fp_elem_coeffs(e);
    c.reverse();
    c
}

/// Full factorisation of a nonzero polynomial over a finite field into monic
/// irreducibles with multiplicities, deterministic output order.
pub fn factor_finite(field: &ExactField, f: &[FElem]) -> Vec<(Vec<FElem>, usize)> {
    let f = raw::trim(f.to_vec());
    let n = raw::deg(&f).expect("nonzero polynomial");
    if n == 0 {
        return vec![];
    }
    let lead_inv = field.inv(f.last().unwrap()).unwrap();
    let f = raw::scale(field, &f, &lead_inv);
    let mut result: Vec<(Vec<FElem>, usize)> = vec![];
    for (sf, mult) in squarefree_decomposition_finite(field, &f) {
        if raw::deg(&sf) == Some(0) {
            continue;
        }
        for (d, product) in distinct_degree(field, &sf) {
            for irr in equal_degree(field, &product, d) {
                result.push((irr, mult));
            }
        }
    }
    result.sort_by(|a, b| {
        a.0.len()
            .cmp(&b.0.len())
            .then_with(|| poly_sort_key(field, &a.0).cmp(&poly_sort_key(field, &b.0)))
    });
    result
}

fn poly_sort_key(_field: &ExactField, f: &[FElem]) -> Vec<Vec<u64>> {
    f.iter().rev().map(fp_elem_coeffs).collect()
}

/// Yun-style squarefree decomposition, with the char-p descent through
/// f = g(x^p) handled by p-th roots (finite fields are perfect).
fn squarefree_decomposition_finite(field: &ExactField, f: &[FElem]) -> Vec<(Vec<FElem>, usize)> {
    let p = field.characteristic();
    let mut out: Vec<(Vec<FElem>, usize)> = vec![];
    squarefree_rec(field, f, 1, p, &mut out);
    out
}

fn squarefree_rec(
    field: &ExactField,
    f: &[FElem],
    outer_mult: usize,
    p: u64,
    out: &mut Vec<(Vec<FElem>, usize)>,
) {
    if raw::deg(f) == Some(0) {
        return;
    }
    let fp = raw::formal_derivative(field, f);
    if fp.is_empty() {
        // f = g(x^p): take p-th roots of coefficients
        let mut g = vec![];
        for (i, c) in f.iter().enumerate() {
            if i % p as usize == 0 {
                g.push(pth_root_finite(field, c));
            }
        }
        squarefree_rec(field, &raw::trim(g), outer_mult * p as usize, p, out);
        return;
    }
    let g = raw::gcd_monic(field, f, &fp);
    let sf = raw::div_exact(field, f, &g); // squarefree part (may still share factors with g)
    // peel multiplicities: standard iteration
    let mut c = g;
    let mut w = sf;
    let mut i = 1usize;
    while raw::deg(&w) != Some(0) {
        let y = raw::gcd_monic(field, &w, &c);
        let fac = raw::div_exact(field, &w, &y);
        if raw::deg(&fac) != Some(0) {
            out.push((fac, outer_mult * i));
        }
        w = y.clone();
        c = raw::div_exact(field, &c, &y);
        i += 1;
    }
    if raw::deg(&c) != Some(0) {
        // remaining part is a p-th power
        squarefree_rec(field, &c, outer_mult, p, out);
    }
}

fn pth_root_finite(field: &ExactField, a: &FElem) -> FElem {
    // x -> x^(q/p) is the inverse of Frobenius
    let q = field.order().expect("finite field");
    let p = BigUint::from(field.characteristic());
    let e = &q / &p;
    pow_biguint(field, a, &e)
}

fn pow_biguint(field: &ExactField, a: &FElem, e: &BigUint) -> FElem {
    let mut acc = field.one();
    let mut base = a.clone();
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            acc = field.mul(&acc, &base);
        }
        base = field.mul(&base, &base);
    }
    acc
}

/// Distinct-degree factorisation of a squarefree monic polynomial.
fn distinct_degree(field: &ExactField, f: &[FElem]) -> Vec<(usize, Vec<FElem>)> {
    let q = field.order().expect("finite field");
    let mut out = vec![];
    let mut rest = f.to_vec();
    let x = vec![field.zero(), field.one()];
    let mut h = raw::rem(field, &x, &rest);
    let mut d = 0usize;
    while let Some(n) = raw::deg(&rest) {
        if n == 0 {
            break;
        }
        d += 1;
        if n < 2 * d {
            // whatever is left is irreducible of degree n
            out.push((n, rest.clone()));
            break;
        }
        h = raw::pow_mod_q(field, &h, &q, &rest);
        let diff = raw::sub(field, &h, &x);
        let g = raw::gcd_monic(field, &diff, &rest);
        if raw::deg(&g) != Some(0) {
            out.push((d, g.clone()));
            rest = raw::div_exact(field, &rest, &g);
            h = raw::rem(field, &h, &rest);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting. The RNG is seeded with a fixed
/// constant so factorisations are reproducible run to run.
fn equal_degree(field: &ExactField, f: &[FElem], d: usize) -> Vec<Vec<FElem>> {
    let n = raw::deg(f).unwrap();
    if n == d {
        return vec![f.to_vec()];
    }
    let q = field.order().expect("finite field");
    let mut rng = ChaCha8Rng::seed_from_u64(0x56414c4b_u64 ^ (n as u64) << 8 ^ d as u64);
    loop {
        let a = random_poly(field, n, &mut rng);
        if raw::deg(&a).is_none() || raw::deg(&a) == Some(0) {
            continue;
        }
        let g = raw::gcd_monic(field, &a, f);
        let candidate = if raw::deg(&g) != Some(0) {
            g
        } else if field.characteristic() == 2 {
            // additive trace map over F_{2^k}
            let k = field.ext_degree() * d;
            let mut t = raw::rem(field, &a, f);
            let mut term = t.clone();
            for _ in 1..k {
                term = raw::pow_mod_q(field, &term, &BigUint::from(2u32), f);
                t = raw::add(field, &t, &term);
            }
            raw::gcd_monic(field, &t, f)
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let b = raw::pow_mod_q(field, &a, &e, f);
            let bm1 = raw::sub(field, &b, &[field.one()]);
            raw::gcd_monic(field, &bm1, f)
        };
        let dg = raw::deg(&candidate);
        if dg.is_some() && dg != Some(0) && dg != Some(n) {
            let rest = raw::div_exact(field, f, &candidate);
            let mut out = equal_degree(field, &candidate, d);
            out.extend(equal_degree(field, &rest, d));
            return out;
        }
    }
}

fn random_poly(field: &ExactField, below_deg: usize, rng: &mut ChaCha8Rng) -> Vec<FElem> {
    let p = field.characteristic();
    let m = field.ext_degree();
    let mut coeffs = vec![];
    for _ in 0..below_deg {
        let tuple: Vec<u64> = (0..m).map(|_| rng.gen_range(0..p)).collect();
        coeffs.push(fp_elem_from_coeffs(field, &tuple));
    }
    raw::trim(coeffs)
}

impl fmt::Display for ExactField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactField::Rationals => write!(f, "Q"),
            ExactField::Prime(p) => write!(f, "F{}", p),
            ExactField::RatFun(c) => write!(f, "{}(t)", c),
            ExactField::Ext(e) => write!(f, "{}[y]/(deg {})", e.base, e.modulus.len() - 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = ExactField::Prime(5);
        let a = FElem::Mod(3);
        let b = FElem::Mod(4);
        assert_eq!(f5.add(&a, &b), FElem::Mod(2));
        assert_eq!(f5.mul(&a, &b), FElem::Mod(2));
        assert_eq!(f5.inv(&a).unwrap(), FElem::Mod(2));
    }

    #[test]
    fn rational_function_field_normalises() {
        let k = ExactField::RatFun(Box::new(ExactField::Rationals));
        let q = ExactField::Rationals;
        // (t^2 - 1) / (t - 1) = t + 1
        let num = vec![q.from_i64(-1), q.from_i64(0), q.from_i64(1)];
        let den = vec![q.from_i64(-1), q.from_i64(1)];
        let e = k.fun_from_parts(num, den).unwrap();
        let expect = k
            .fun_from_parts(vec![q.from_i64(1), q.from_i64(1)], vec![q.from_i64(1)])
            .unwrap();
        assert_eq!(e, expect);
    }

    #[test]
    fn extension_inverse_via_euclid() {
        // Q[y]/(y^2 + 2), invert 1 + y: (1+y)(1-y)/(1 - y^2) = (1-y)/3
        let q = ExactField::Rationals;
        let modulus = vec![q.from_i64(2), q.from_i64(0), q.from_i64(1)];
        let f = ExactField::extension(q.clone(), modulus).unwrap();
        let a = FElem::Ext(vec![q.from_i64(1), q.from_i64(1)]);
        let inv = f.inv(&a).unwrap();
        assert!(f.is_one(&f.mul(&a, &inv)));
    }

    #[test]
    fn canonical_modulus_is_irreducible_and_stable() {
        let m1 = canonical_modulus(2, 2);
        assert_eq!(*m1, vec![1, 1, 1]); // y^2 + y + 1
        let m2 = canonical_modulus(5, 2);
        let fp = ExactField::Prime(5);
        let coeffs: Vec<FElem> = m2.iter().map(|&c| FElem::Mod(c)).collect();
        assert!(poly_is_irreducible_finite(&fp, &coeffs));
        assert_eq!(canonical_modulus(5, 2), m2);
    }

    #[test]
    fn factor_splits_y4_minus_1_over_f5() {
        let f5 = ExactField::Prime(5);
        // y^4 - 1 = (y-1)(y-2)(y-3)(y-4) over F_5
        let poly = vec![
            FElem::Mod(4),
            FElem::Mod(0),
            FElem::Mod(0),
            FElem::Mod(0),
            FElem::Mod(1),
        ];
        let roots = roots_in_finite_field(&f5, &poly);
        assert_eq!(
            roots,
            vec![FElem::Mod(1), FElem::Mod(2), FElem::Mod(3), FElem::Mod(4)]
        );
    }

    #[test]
    fn factor_over_extension_field() {
        let f4 = canonical_fp(2, 2);
        // y^2 + y + 1 splits over F_4 into two linears
        let poly = vec![f4.one(), f4.one(), f4.one()];
        let roots = roots_in_finite_field(&f4, &poly);
        assert_eq!(roots.len(), 2);
        for r in &roots {
            let val = f4.add(&f4.add(&f4.mul(r, r), r), &f4.one());
            assert!(f4.is_zero(&val));
        }
    }

    #[test]
    fn embeddings_are_ring_maps() {
        // F_4 -> F_16 (2 | 4)
        let f4 = canonical_fp(2, 2);
        let f16 = canonical_fp(2, 4);
        let gen4 = FElem::Ext(vec![FElem::Mod(0), FElem::Mod(1)]);
        let a = gen4.clone();
        let b = f4.add(&gen4, &f4.one());
        let ia = embed_canonical(2, 2, 4, &a);
        let ib = embed_canonical(2, 2, 4, &b);
        let iab = embed_canonical(2, 2, 4, &f4.mul(&a, &b));
        assert_eq!(f16.mul(&ia, &ib), iab);
        let iapb = embed_canonical(2, 2, 4, &f4.add(&a, &b));
        assert_eq!(f16.add(&ia, &ib), iapb);
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(5));
        assert!(is_prime_u64(2147483647));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561));
    }
}
