//! Ordered abelian groups in which every valuation of the crate takes values:
//! the divisible hull `Q ∪ {±∞}` (rank 1) and the lexicographic product
//! `(Q ⊕ Z)_lex` used for the value-transcendental lift `alpha ↦ (alpha, 0)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Element of a value group: a rational, a lexicographic (rational, integer)
/// pair, or an infinite sentinel. `Fin` and `LexFin` never mix inside one
/// group context; operations across the two contexts fail with
/// `ContextMismatch` unless the caller lifts explicitly via [`OrderedValue::lex_lift`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrderedValue {
    Fin(BigRational),
    LexFin(BigRational, BigInt),
    PosInf,
    NegInf,
}

/// Subgroups against which torsion is tested: `Z` inside the rank-1 group,
/// `Z ⊕ {0}` inside the lexicographic one.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TorsionBase {
    Integers,
    IntegersLexZero,
}

impl OrderedValue {
    pub fn zero() -> Self {
        OrderedValue::Fin(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        OrderedValue::Fin(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        OrderedValue::Fin(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rat(q: BigRational) -> Self {
        OrderedValue::Fin(q)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OrderedValue::Fin(_) | OrderedValue::LexFin(..))
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, OrderedValue::PosInf)
    }

    /// First (rational) coordinate of a finite value.
    pub fn as_rational(&self) -> Result<&BigRational> {
        match self {
            OrderedValue::Fin(q) => Ok(q),
            OrderedValue::LexFin(q, _) => Ok(q),
            _ => Err(Error::InvalidValue),
        }
    }

    /// Embed a rank-1 value into the lexicographic group via `alpha ↦ (alpha, 0)`.
    pub fn lex_lift(&self) -> Self {
        match self {
            OrderedValue::Fin(q) => OrderedValue::LexFin(q.clone(), BigInt::zero()),
            other => other.clone(),
        }
    }

    fn same_context(&self, other: &Self) -> bool {
        !matches!(
            (self, other),
            (OrderedValue::Fin(_), OrderedValue::LexFin(..))
                | (OrderedValue::LexFin(..), OrderedValue::Fin(_))
        )
    }

    /// Componentwise sum. Infinite sentinels absorb; `PosInf + NegInf` is an error.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        use OrderedValue::*;
        if !self.same_context(other) {
            return Err(Error::ContextMismatch);
        }
        Ok(match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => return Err(Error::UndefinedSum),
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Fin(a), Fin(b)) => Fin(a + b),
            (LexFin(a, i), LexFin(b, j)) => LexFin(a + b, i + j),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        use OrderedValue::*;
        match self {
            Fin(q) => Fin(-q),
            LexFin(q, k) => LexFin(-q, -k),
            PosInf => NegInf,
            NegInf => PosInf,
        }
    }

    /// `n · u` for an integer `n`. Infinite values scale to themselves for
    /// `n > 0`, flip for `n < 0`, and `0 · ±∞` is rejected.
    pub fn int_scale(&self, n: i64) -> Result<Self> {
        use OrderedValue::*;
        let big = BigInt::from(n);
        Ok(match self {
            Fin(q) => Fin(q * BigRational::from_integer(big)),
            LexFin(q, k) => LexFin(q * BigRational::from_integer(big.clone()), k * big),
            PosInf | NegInf if n == 0 => return Err(Error::InvalidValue),
            PosInf => {
                if n > 0 {
                    PosInf
                } else {
                    NegInf
                }
            }
            NegInf => {
                if n > 0 {
                    NegInf
                } else {
                    PosInf
                }
            }
        })
    }

    /// Total-order comparison inside one group context. `PosInf` dominates
    /// every finite value, `NegInf` is below every finite value.
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        use OrderedValue::*;
        if !self.same_context(other) {
            return Err(Error::ContextMismatch);
        }
        Ok(match (self, other) {
            (PosInf, PosInf) | (NegInf, NegInf) => Ordering::Equal,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
            (LexFin(a, i), LexFin(b, j)) => a.cmp(b).then_with(|| i.cmp(j)),
            _ => unreachable!(),
        })
    }

    pub fn min_of(&self, other: &Self) -> Result<Self> {
        Ok(match self.compare(other)? {
            Ordering::Greater => other.clone(),
            _ => self.clone(),
        })
    }

    pub fn max_of(&self, other: &Self) -> Result<Self> {
        Ok(match self.compare(other)? {
            Ordering::Less => other.clone(),
            _ => self.clone(),
        })
    }

    /// True iff some positive integer multiple of `self` lies in `base`.
    /// Infinite values are rejected.
    pub fn is_torsion_mod(&self, base: TorsionBase) -> Result<bool> {
        match (self, base) {
            (OrderedValue::Fin(_), TorsionBase::Integers) => Ok(true),
            (OrderedValue::LexFin(_, k), TorsionBase::IntegersLexZero) => Ok(k.is_zero()),
            (OrderedValue::Fin(_), TorsionBase::IntegersLexZero)
            | (OrderedValue::LexFin(..), TorsionBase::Integers) => Err(Error::ContextMismatch),
            _ => Err(Error::InvalidValue),
        }
    }
}

impl PartialOrd for OrderedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for OrderedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderedValue::Fin(q) => fmt_rational(q, f),
            OrderedValue::LexFin(q, k) => {
                write!(f, "(")?;
                fmt_rational(q, f)?;
                write!(f, ", {})", k)
            }
            OrderedValue::PosInf => write!(f, "inf"),
            OrderedValue::NegInf => write!(f, "-inf"),
        }
    }
}

/// Parse "a/b" (b > 0 after normalisation) or "a".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {:?}", s));
    if let Some((n, d)) = s.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    } else {
        let num = BigInt::from_str(s).map_err(|_| bad())?;
        Ok(BigRational::from_integer(num))
    }
}

pub fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl FromStr for OrderedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "+inf" => return Ok(OrderedValue::PosInf),
            "-inf" => return Ok(OrderedValue::NegInf),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("bad lex value: {:?}", s)))?;
            let q = parse_rational(a)?;
            let k = BigInt::from_str(b.trim())
                .map_err(|_| Error::Invalid(format!("bad lex integer: {:?}", b)))?;
            return Ok(OrderedValue::LexFin(q, k));
        }
        Ok(OrderedValue::Fin(parse_rational(s)?))
    }
}

impl serde::Serialize for OrderedValue {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for OrderedValue {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(n: i64, d: i64) -> OrderedValue {
        OrderedValue::from_ratio(n, d)
    }

    fn lex(n: i64, d: i64, k: i64) -> OrderedValue {
        OrderedValue::LexFin(
            BigRational::new(BigInt::from(n), BigInt::from(d)),
            BigInt::from(k),
        )
    }

    #[test]
    fn rational_order() {
        assert_eq!(fin(1, 2).compare(&fin(2, 1)).unwrap(), Ordering::Less);
    }

    #[test]
    fn lexicographic_order_first_component_dominates() {
        assert_eq!(lex(1, 2, -1).compare(&lex(1, 2, 0)).unwrap(), Ordering::Less);
        assert_eq!(lex(0, 1, 5).compare(&lex(1, 2, -1)).unwrap(), Ordering::Less);
    }

    #[test]
    fn sentinels_dominate() {
        assert_eq!(
            OrderedValue::PosInf
                .compare(&OrderedValue::Fin(BigRational::from_integer(BigInt::from(
                    1_000_000_000i64
                ))))
                .unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            OrderedValue::NegInf.compare(&fin(-7, 1)).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn sum_and_scale() {
        assert_eq!(fin(1, 2).checked_add(&fin(1, 3)).unwrap(), fin(5, 6));
        assert_eq!(lex(1, 2, -1).int_scale(2).unwrap(), lex(1, 1, -2));
        assert_eq!(
            OrderedValue::PosInf.checked_add(&fin(3, 1)).unwrap(),
            OrderedValue::PosInf
        );
        assert_eq!(
            OrderedValue::PosInf.checked_add(&OrderedValue::NegInf),
            Err(Error::UndefinedSum)
        );
    }

    #[test]
    fn mixed_contexts_rejected() {
        assert_eq!(fin(1, 2).checked_add(&lex(1, 2, 0)), Err(Error::ContextMismatch));
        assert_eq!(fin(1, 2).compare(&lex(1, 2, 0)), Err(Error::ContextMismatch));
    }

    #[test]
    fn torsion_tests() {
        assert!(fin(1, 2).is_torsion_mod(TorsionBase::Integers).unwrap());
        assert!(fin(3, 1).is_torsion_mod(TorsionBase::Integers).unwrap());
        assert!(!lex(1, 2, -1)
            .is_torsion_mod(TorsionBase::IntegersLexZero)
            .unwrap());
        assert!(lex(1, 2, 0)
            .is_torsion_mod(TorsionBase::IntegersLexZero)
            .unwrap());
        assert_eq!(
            OrderedValue::PosInf.is_torsion_mod(TorsionBase::Integers),
            Err(Error::InvalidValue)
        );
    }

    #[test]
    fn display_and_parse_round_trip() {
        for v in [
            fin(1, 2),
            fin(-3, 1),
            lex(5, 4, -2),
            OrderedValue::PosInf,
            OrderedValue::NegInf,
        ] {
            let s = v.to_string();
            let back: OrderedValue = s.parse().unwrap();
            assert_eq!(back, v, "round trip of {s}");
        }
        assert_eq!(fin(1, 2).to_string(), "1/2");
        assert_eq!(fin(2, 1).to_string(), "2");
        assert_eq!(lex(1, 2, -1).to_string(), "(1/2, -1)");
    }
}
