//! Exact valued ground fields `(K, v)`: the rationals with a p-adic valuation
//! and rational function fields `k(t)` with the t-adic valuation, for
//! `k ∈ {Q, F_p}`. Value groups are `Z`; residue fields are `F_p`, `Q` or
//! `F_p` respectively.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime_u64, ExactField, FElem};
use crate::values::OrderedValue;

/// Coefficient field of a t-adic function field.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoeffField {
    Rationals,
    Prime(u64),
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum GroundKind {
    PAdic { p: u64 },
    TAdic { coeff: CoeffField },
}

/// An exact valued field instance `(K, v)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroundField {
    kind: GroundKind,
}

impl GroundField {
    pub fn padic(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(GroundField { kind: GroundKind::PAdic { p } })
    }

    pub fn tadic(coeff: CoeffField) -> Result<Self> {
        if let CoeffField::Prime(p) = coeff {
            if !is_prime_u64(p) {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            if p > (1 << 31) {
                return Err(Error::Invalid("prime coefficient fields limited to p <= 2^31".into()));
            }
        }
        Ok(GroundField { kind: GroundKind::TAdic { coeff } })
    }

    pub fn is_padic(&self) -> bool {
        matches!(self.kind, GroundKind::PAdic { .. })
    }

    /// Residue characteristic: p for both `(Q, v_p)` and `(F_p(t), v_t)`,
    /// zero for `(Q(t), v_t)`.
    pub fn residue_char(&self) -> u64 {
        match &self.kind {
            GroundKind::PAdic { p } => *p,
            GroundKind::TAdic { coeff: CoeffField::Prime(p) } => *p,
            GroundKind::TAdic { coeff: CoeffField::Rationals } => 0,
        }
    }

    /// The underlying element field: `Q` or `k(t)`.
    pub fn element_field(&self) -> ExactField {
        match &self.kind {
            GroundKind::PAdic { .. } => ExactField::Rationals,
            GroundKind::TAdic { coeff } => ExactField::RatFun(Box::new(match coeff {
                CoeffField::Rationals => ExactField::Rationals,
                CoeffField::Prime(p) => ExactField::Prime(*p),
            })),
        }
    }

    pub fn residue_field(&self) -> ExactField {
        match &self.kind {
            GroundKind::PAdic { p } => ExactField::Prime(*p),
            GroundKind::TAdic { coeff: CoeffField::Rationals } => ExactField::Rationals,
            GroundKind::TAdic { coeff: CoeffField::Prime(p) } => ExactField::Prime(*p),
        }
    }

    pub fn uniformizer(&self) -> FElem {
        match &self.kind {
            GroundKind::PAdic { p } => FElem::Rat(BigRational::from_integer(BigInt::from(*p))),
            GroundKind::TAdic { .. } => {
                let f = self.element_field();
                let coeff = self.residue_field();
                f.fun_from_parts(vec![coeff.zero(), coeff.one()], vec![coeff.one()])
                    .expect("t is a valid element")
            }
        }
    }

    /// The valuation. `val(0) = PosInf`.
    pub fn val(&self, x: &FElem) -> OrderedValue {
        let field = self.element_field();
        if field.is_zero(x) {
            return OrderedValue::PosInf;
        }
        match (&self.kind, x) {
            (GroundKind::PAdic { p }, FElem::Rat(q)) => {
                let vn = padic_ord(q.numer(), *p);
                let vd = padic_ord(q.denom(), *p);
                OrderedValue::from_int(vn - vd)
            }
            (GroundKind::TAdic { .. }, FElem::Fun(f)) => {
                let on = t_ord(&f.num).expect("nonzero numerator");
                let od = t_ord(&f.den).expect("nonzero denominator");
                OrderedValue::from_int(on as i64 - od as i64)
            }
            _ => panic!("ground element does not match field"),
        }
    }

    /// Residue map on the valuation ring; errors on negative valuation.
    pub fn residue(&self, x: &FElem) -> Result<FElem> {
        let field = self.element_field();
        let res = self.residue_field();
        if field.is_zero(x) {
            return Ok(res.zero());
        }
        match self.val(x).compare(&OrderedValue::zero())? {
            std::cmp::Ordering::Less => Err(Error::NegativeValue),
            std::cmp::Ordering::Greater => Ok(res.zero()),
            std::cmp::Ordering::Equal => match (&self.kind, x) {
                (GroundKind::PAdic { .. }, FElem::Rat(q)) => {
                    let pn = res.from_bigint(q.numer());
                    let pd = res.from_bigint(q.denom());
                    res.div(&pn, &pd)
                }
                (GroundKind::TAdic { .. }, FElem::Fun(f)) => {
                    // valuation 0 and gcd(num, den) = 1 force ord 0 on both sides
                    res.div(&f.num[0], &f.den[0])
                }
                _ => panic!("ground element does not match field"),
            },
        }
    }

    /// Canonical section of the residue map.
    pub fn lift(&self, r: &FElem) -> FElem {
        match &self.kind {
            GroundKind::PAdic { .. } => match r {
                FElem::Mod(v) => FElem::Rat(BigRational::from_integer(BigInt::from(*v))),
                _ => panic!("residue element of F_p expected"),
            },
            GroundKind::TAdic { .. } => {
                let f = self.element_field();
                let coeff = self.residue_field();
                if coeff.is_zero(r) {
                    f.zero()
                } else {
                    f.fun_from_parts(vec![r.clone()], vec![coeff.one()])
                        .expect("constant lift")
                }
            }
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<FElem> {
        let s = s.trim();
        match &self.kind {
            GroundKind::PAdic { .. } => Ok(FElem::Rat(crate::values::parse_rational(s)?)),
            GroundKind::TAdic { .. } => {
                let field = self.element_field();
                let coeff = self.residue_field();
                let (ns, ds) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let parse_list = |part: &str| -> Result<Vec<FElem>> {
                    part.split(',')
                        .map(|c| {
                            let q = crate::values::parse_rational(c)?;
                            coeff.from_rational(&q)
                        })
                        .collect()
                };
                field.fun_from_parts(parse_list(ns)?, parse_list(ds)?)
            }
        }
    }

    pub fn render_elem(&self, x: &FElem) -> String {
        self.element_field().render(x)
    }

    /// JSON descriptor per the external interface.
    pub fn descriptor(&self) -> FieldDescriptor {
        match &self.kind {
            GroundKind::PAdic { p } => FieldDescriptor {
                kind: "padic".into(),
                p: Some(*p),
                coeff: None,
            },
            GroundKind::TAdic { coeff } => FieldDescriptor {
                kind: "tadic".into(),
                p: None,
                coeff: Some(match coeff {
                    CoeffField::Rationals => "Q".into(),
                    CoeffField::Prime(p) => format!("F{p}"),
                }),
            },
        }
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Self> {
        match d.kind.as_str() {
            "padic" => {
                let p = d.p.ok_or_else(|| Error::Invalid("padic field needs \"p\"".into()))?;
                GroundField::padic(p)
            }
            "tadic" => {
                let c = d
                    .coeff
                    .as_deref()
                    .ok_or_else(|| Error::Invalid("tadic field needs \"coeff\"".into()))?;
                let coeff = if c == "Q" {
                    CoeffField::Rationals
                } else if let Some(ps) = c.strip_prefix('F') {
                    CoeffField::Prime(
                        ps.parse()
                            .map_err(|_| Error::Invalid(format!("bad coefficient field {c:?}")))?,
                    )
                } else {
                    return Err(Error::Invalid(format!("bad coefficient field {c:?}")));
                };
                GroundField::tadic(coeff)
            }
            other => Err(Error::Invalid(format!("unknown field kind {other:?}"))),
        }
    }
}

/// Serialisable field descriptor: `{"kind":"padic","p":2}` or
/// `{"kind":"tadic","coeff":"F3"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff: Option<String>,
}

fn padic_ord(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0i64;
    loop {
        let (q, r) = n.div_rem(&p);
        if r.is_zero() {
            k += 1;
            n = q;
        } else {
            return k;
        }
    }
}

fn t_ord(poly: &[FElem]) -> Option<usize> {
    poly.iter().position(|c| match c {
        FElem::Rat(q) => !q.is_zero(),
        FElem::Mod(r) => *r != 0,
        _ => panic!("function-field coefficients live in the base field"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padic_val_examples() {
        let f = GroundField::padic(2).unwrap();
        let x = f.parse_elem("8/6").unwrap();
        assert_eq!(f.val(&x), OrderedValue::from_int(2));
        assert_eq!(f.val(&f.element_field().zero()), OrderedValue::PosInf);
    }

    #[test]
    fn padic_val_matches_factor_count_oracle() {
        // independent oracle: count factors of p in numerator and denominator
        let f = GroundField::padic(3).unwrap();
        for (num, den) in [(27i64, 2i64), (5, 9), (18, 12), (-81, 7)] {
            let x = FElem::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)));
            let count = |mut n: i64| {
                let mut c = 0;
                n = n.abs();
                while n % 3 == 0 {
                    n /= 3;
                    c += 1;
                }
                c
            };
            assert_eq!(f.val(&x), OrderedValue::from_int(count(num) - count(den)));
        }
    }

    #[test]
    fn tadic_val_example() {
        let f = GroundField::tadic(CoeffField::Prime(3)).unwrap();
        // t^2 + t^3
        let x = f.parse_elem("0,0,1,1").unwrap();
        assert_eq!(f.val(&x), OrderedValue::from_int(2));
    }

    #[test]
    fn residue_examples() {
        let f2 = GroundField::padic(2).unwrap();
        let x = f2.parse_elem("3/5").unwrap();
        assert_eq!(f2.residue(&x).unwrap(), FElem::Mod(1));

        let ft = GroundField::tadic(CoeffField::Rationals).unwrap();
        let y = ft.parse_elem("1,1").unwrap();
        assert_eq!(
            ft.residue(&y).unwrap(),
            ExactField::Rationals.from_i64(1)
        );

        let neg = f2.parse_elem("1/2").unwrap();
        assert_eq!(f2.residue(&neg), Err(Error::NegativeValue));
    }

    #[test]
    fn uniformizer_has_valuation_one() {
        for f in [
            GroundField::padic(2).unwrap(),
            GroundField::padic(5).unwrap(),
            GroundField::tadic(CoeffField::Rationals).unwrap(),
            GroundField::tadic(CoeffField::Prime(3)).unwrap(),
        ] {
            assert_eq!(f.val(&f.uniformizer()), OrderedValue::from_int(1));
        }
    }

    #[test]
    fn residue_is_multiplicative() {
        let f = GroundField::padic(5).unwrap();
        let pairs = [("3/2", "7/4"), ("1/3", "9/2"), ("10/3", "5/7")];
        let res_field = f.residue_field();
        for (a, b) in pairs {
            let x = f.parse_elem(a).unwrap();
            let y = f.parse_elem(b).unwrap();
            let prod = f.element_field().mul(&x, &y);
            if f.val(&x) >= OrderedValue::zero() && f.val(&y) >= OrderedValue::zero() {
                let lhs = f.residue(&prod).unwrap();
                let rhs = res_field.mul(&f.residue(&x).unwrap(), &f.residue(&y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn lift_section() {
        let f = GroundField::padic(7).unwrap();
        for r in 0..7u64 {
            let lifted = f.lift(&FElem::Mod(r));
            assert_eq!(f.residue(&lifted).unwrap(), FElem::Mod(r));
        }
        let ft = GroundField::tadic(CoeffField::Prime(3)).unwrap();
        let r = FElem::Mod(2);
        assert_eq!(ft.residue(&ft.lift(&r)).unwrap(), r);
    }

    #[test]
    fn descriptor_round_trip() {
        for f in [
            GroundField::padic(2).unwrap(),
            GroundField::tadic(CoeffField::Prime(3)).unwrap(),
            GroundField::tadic(CoeffField::Rationals).unwrap(),
        ] {
            let d = f.descriptor();
            let back = GroundField::from_descriptor(&d).unwrap();
            assert_eq!(back, f);
        }
        assert!(GroundField::padic(6).is_err());
    }

    #[test]
    fn valuation_axioms_sampled() {
        let f = GroundField::padic(3).unwrap();
        let field = f.element_field();
        let elems: Vec<FElem> = [
            "0", "1", "3", "9/2", "1/3", "-6", "5/27", "81", "-2/9", "7",
        ]
        .iter()
        .map(|s| f.parse_elem(s).unwrap())
        .collect();
        for x in &elems {
            for y in &elems {
                let vxy = f.val(&field.mul(x, y));
                let sum = f.val(x).checked_add(&f.val(y)).unwrap();
                assert_eq!(vxy, sum, "multiplicativity");
                let vadd = f.val(&field.add(x, y));
                let min = f.val(x).min_of(&f.val(y)).unwrap();
                assert!(vadd.compare(&min).unwrap() != std::cmp::Ordering::Less, "ultrametric");
            }
        }
    }
}
