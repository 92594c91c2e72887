//! Exact univariate polynomials over an [`ExactField`]: division, Taylor
//! shifts, Hasse derivatives, Q-expansions, resultants, squarefree parts.
//! Coefficients are ascending; the zero polynomial is the empty list.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{ExactField, FElem};

/// Slice-level kernels shared by the field tower and the public [`Poly`]
/// type. All polynomials here are plain `Vec<FElem>` with trailing zeros
/// trimmed.
pub(crate) mod raw {
    use super::*;

    pub fn trim(mut v: Vec<FElem>) -> Vec<FElem> {
        while v
            .last()
            .map(|c| match c {
                FElem::Rat(q) => q.is_zero(),
                FElem::Mod(r) => *r == 0,
                FElem::Fun(f) => f.num.is_empty(),
                FElem::Ext(e) => e.is_empty(),
            })
            .unwrap_or(false)
        {
            v.pop();
        }
        v
    }

    pub fn deg(v: &[FElem]) -> Option<usize> {
        if v.is_empty() {
            None
        } else {
            Some(v.len() - 1)
        }
    }

    pub fn add(f: &ExactField, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        let n = a.len().max(b.len());
        let zero = f.zero();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).unwrap_or(&zero);
            let y = b.get(i).unwrap_or(&zero);
            out.push(f.add(x, y));
        }
        trim(out)
    }

    pub fn neg(f: &ExactField, a: &[FElem]) -> Vec<FElem> {
        a.iter().map(|c| f.neg(c)).collect()
    }

    pub fn sub(f: &ExactField, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        add(f, a, &neg(f, b))
    }

    pub fn scale(f: &ExactField, a: &[FElem], c: &FElem) -> Vec<FElem> {
        trim(a.iter().map(|x| f.mul(x, c)).collect())
    }

    pub fn mul(f: &ExactField, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = f.mul(x, y);
                out[i + j] = f.add(&out[i + j], &t);
            }
        }
        trim(out)
    }

    /// Euclidean division; the divisor's leading coefficient must be invertible.
    pub fn divmod(f: &ExactField, a: &[FElem], b: &[FElem]) -> (Vec<FElem>, Vec<FElem>) {
        let db = deg(b).expect("division by zero polynomial");
        let lead_inv = f.inv(b.last().unwrap()).expect("invertible leading coefficient");
        let mut rem: Vec<FElem> = a.to_vec();
        if rem.len() < b.len() {
            return (vec![], trim(rem));
        }
        let mut quot = vec![f.zero(); rem.len() - db];
        while let Some(dr) = deg(&rem) {
            if dr < db {
                break;
            }
            let c = f.mul(rem.last().unwrap(), &lead_inv);
            let k = dr - db;
            quot[k] = c.clone();
            for (i, bc) in b.iter().enumerate() {
                let t = f.mul(bc, &c);
                rem[k + i] = f.sub(&rem[k + i], &t);
            }
            rem = trim(rem);
        }
        (trim(quot), rem)
    }

    pub fn rem(f: &ExactField, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        divmod(f, a, b).1
    }

    pub fn div_exact(f: &ExactField, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        let (q, r) = divmod(f, a, b);
        debug_assert!(r.is_empty(), "division was not exact");
        q
    }

    pub fn monic(f: &ExactField, a: &[FElem]) -> Vec<FElem> {
        match a.last() {
            None => vec![],
            Some(l) => {
                let inv = f.inv(l).expect("invertible leading coefficient");
                scale(f, a, &inv)
            }
        }
    }

    pub fn gcd_monic(f: &ExactField, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(f, &x, &y);
            x = y;
            y = r;
        }
        monic(f, &x)
    }

    /// Half extended Euclid: returns `(g, s)` with `s*a ≡ g (mod m)` and `g`
    /// the last nonzero remainder.
    pub fn half_ext_gcd(f: &ExactField, a: &[FElem], m: &[FElem]) -> (Vec<FElem>, Vec<FElem>) {
        let mut r0 = trim(m.to_vec());
        let mut r1 = trim(a.to_vec());
        let mut s0: Vec<FElem> = vec![];
        let mut s1 = vec![f.one()];
        while !r1.is_empty() {
            let (q, r) = divmod(f, &r0, &r1);
            let s = sub(f, &s0, &mul(f, &q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        (r0, s0)
    }

    pub fn eval(f: &ExactField, a: &[FElem], x: &FElem) -> FElem {
        let mut acc = f.zero();
        for c in a.iter().rev() {
            acc = f.mul(&acc, x);
            acc = f.add(&acc, c);
        }
        acc
    }

    pub fn formal_derivative(f: &ExactField, a: &[FElem]) -> Vec<FElem> {
        let mut out = vec![];
        for (i, c) in a.iter().enumerate().skip(1) {
            let k = f.from_i64(i as i64);
            out.push(f.mul(c, &k));
        }
        trim(out)
    }

    pub fn pow_mod_q(
        f: &ExactField,
        base: &[FElem],
        exp: &BigUint,
        modulus: &[FElem],
    ) -> Vec<FElem> {
        let mut acc = vec![f.one()];
        let mut b = rem(f, base, modulus);
        for i in 0..exp.bits() {
            if exp.bit(i) {
                acc = rem(f, &mul(f, &acc, &b), modulus);
            }
            b = rem(f, &mul(f, &b, &b), modulus);
        }
        acc
    }

    /// Coefficients `(c_0, .., c_n)` of `f(X) = sum c_i (X - a)^i` by repeated
    /// synthetic division.
    pub fn taylor(f: &ExactField, a: &[FElem], at: &FElem) -> Vec<FElem> {
        let mut work = a.to_vec();
        let mut out = Vec::with_capacity(a.len());
        for _ in 0..a.len() {
            // divide work by (X - at): remainder is work(at)
            let mut rem = f.zero();
            for c in work.iter_mut().rev() {
                let t = f.mul(&rem, at);
                let nc = f.add(c, &t);
                rem = nc.clone();
                *c = nc;
            }
            // after the loop, work[0] holds the remainder; quotient is work[1..]
            out.push(work[0].clone());
            work.remove(0);
            if work.is_empty() {
                break;
            }
        }
        out
    }

    /// Lagrange interpolation through distinct sample points.
    pub fn interpolate(f: &ExactField, points: &[(FElem, FElem)]) -> Vec<FElem> {
        let mut acc: Vec<FElem> = vec![];
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = vec![f.one()];
            let mut denom = f.one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = mul(f, &basis, &[f.neg(xj), f.one()]);
                denom = f.mul(&denom, &f.sub(xi, xj));
            }
            let c = f.div(yi, &denom).expect("distinct interpolation nodes");
            acc = add(f, &acc, &scale(f, &basis, &c));
        }
        acc
    }

    /// Resultant of two nonzero polynomials via the Euclidean remainder chain.
    pub fn resultant(f: &ExactField, a: &[FElem], b: &[FElem]) -> FElem {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        let mut acc = f.one();
        let mut negate = false;
        loop {
            let m = deg(&a).expect("nonzero polynomial");
            let n = deg(&b).expect("nonzero polynomial");
            if n == 0 {
                let c = f.pow_u64(&b[0], m as u64);
                acc = f.mul(&acc, &c);
                break;
            }
            let r = rem(f, &a, &b);
            match deg(&r) {
                None => {
                    acc = f.zero();
                    break;
                }
                Some(dr) => {
                    let c = f.pow_u64(b.last().unwrap(), (m - dr) as u64);
                    acc = f.mul(&acc, &c);
                    if m % 2 == 1 && n % 2 == 1 {
                        negate = !negate;
                    }
                    a = b;
                    b = r;
                }
            }
        }
        if negate {
            f.neg(&acc)
        } else {
            acc
        }
    }
}

/// Exact univariate polynomial with an explicit coefficient ring.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly {
    ring: ExactField,
    coeffs: Vec<FElem>,
}

impl Poly {
    pub fn new(ring: ExactField, coeffs: Vec<FElem>) -> Self {
        Poly {
            ring,
            coeffs: raw::trim(coeffs),
        }
    }

    pub fn zero(ring: ExactField) -> Self {
        Poly { ring, coeffs: vec![] }
    }

    pub fn constant(ring: ExactField, c: FElem) -> Self {
        Poly::new(ring, vec![c])
    }

    pub fn x(ring: ExactField) -> Self {
        let coeffs = vec![ring.zero(), ring.one()];
        Poly { ring, coeffs }
    }

    /// Monic `X - a`.
    pub fn x_minus(ring: ExactField, a: &FElem) -> Self {
        let coeffs = vec![ring.neg(a), ring.one()];
        Poly { ring, coeffs }
    }

    pub fn from_i64_coeffs(ring: ExactField, coeffs: &[i64]) -> Self {
        let cs = coeffs.iter().map(|&c| ring.from_i64(c)).collect();
        Poly::new(ring, cs)
    }

    pub fn ring(&self) -> &ExactField {
        &self.ring
    }

    pub fn coeffs(&self) -> &[FElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FElem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        raw::deg(&self.coeffs)
    }

    pub fn leading(&self) -> Option<&FElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|l| self.ring.is_one(l)).unwrap_or(false)
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(Poly {
            ring: self.ring.clone(),
            coeffs: raw::add(&self.ring, &self.coeffs, &other.coeffs),
        })
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(Poly {
            ring: self.ring.clone(),
            coeffs: raw::sub(&self.ring, &self.coeffs, &other.coeffs),
        })
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(Poly {
            ring: self.ring.clone(),
            coeffs: raw::mul(&self.ring, &self.coeffs, &other.coeffs),
        })
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            coeffs: raw::neg(&self.ring, &self.coeffs),
        }
    }

    pub fn scale(&self, c: &FElem) -> Poly {
        Poly {
            ring: self.ring.clone(),
            coeffs: raw::scale(&self.ring, &self.coeffs, c),
        }
    }

    pub fn eval(&self, x: &FElem) -> FElem {
        raw::eval(&self.ring, &self.coeffs, x)
    }

    /// Euclidean division `self = q * g + r` with `deg r < deg g`.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        self.check_ring(g)?;
        if g.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let (q, r) = raw::divmod(&self.ring, &self.coeffs, &g.coeffs);
        Ok((
            Poly { ring: self.ring.clone(), coeffs: q },
            Poly { ring: self.ring.clone(), coeffs: r },
        ))
    }

    /// Coefficients `(c_0, .., c_n)` of the expansion `f(X) = sum c_i (X-a)^i`.
    pub fn taylor_shift(&self, a: &FElem) -> Vec<FElem> {
        if self.is_zero() {
            return vec![self.ring.zero()];
        }
        raw::taylor(&self.ring, &self.coeffs, a)
    }

    /// b-th Hasse derivative: sends `X^n` to `C(n, b) X^{n-b}`.
    pub fn hasse_deriv(&self, b: usize) -> Poly {
        assert!(b >= 1, "hasse_deriv needs b >= 1");
        let mut out = vec![];
        for (n, c) in self.coeffs.iter().enumerate().skip(b) {
            let binom = binomial(n, b);
            let k = self.ring.from_bigint(&binom);
            out.push(self.ring.mul(c, &k));
        }
        Poly::new(self.ring.clone(), out)
    }

    pub fn derivative(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            coeffs: raw::formal_derivative(&self.ring, &self.coeffs),
        }
    }

    /// Expansion `f = sum f_i Q^i` with `deg f_i < deg Q`; returns `(f_0, .., f_r)`.
    pub fn q_expansion(&self, q: &Poly) -> Result<Vec<Poly>> {
        self.check_ring(q)?;
        if !q.is_monic() || q.degree() == Some(0) {
            return Err(Error::NonMonicKey);
        }
        let mut rest = self.clone();
        let mut out = vec![];
        loop {
            let (quot, rem) = rest.divmod(q)?;
            out.push(rem);
            if quot.is_zero() {
                break;
            }
            rest = quot;
        }
        Ok(out)
    }

    /// Resultant of two nonzero polynomials.
    pub fn resultant(&self, g: &Poly) -> Result<FElem> {
        self.check_ring(g)?;
        if self.is_zero() || g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(raw::resultant(&self.ring, &self.coeffs, &g.coeffs))
    }

    pub fn gcd(&self, g: &Poly) -> Result<Poly> {
        self.check_ring(g)?;
        Ok(Poly {
            ring: self.ring.clone(),
            coeffs: raw::gcd_monic(&self.ring, &self.coeffs, &g.coeffs),
        })
    }

    /// Monic product of the distinct irreducible factors. In characteristic p
    /// an inseparable input (`f = g(X^p)` over an imperfect coefficient
    /// field) is rejected.
    pub fn squarefree_part(&self) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == Some(0) {
            return Ok(Poly::constant(self.ring.clone(), self.ring.one()));
        }
        let deriv = self.derivative();
        if deriv.is_zero() {
            let p = self.ring.characteristic() as usize;
            debug_assert!(p > 0);
            if self.ring.is_finite() {
                // perfect field: take p-th roots of the X^p-expansion
                let q = self.ring.order().expect("finite");
                let e = &q / BigUint::from(p);
                let mut g = vec![];
                for (i, c) in self.coeffs.iter().enumerate() {
                    if i % p == 0 {
                        let mut acc = self.ring.one();
                        let mut base = c.clone();
                        for bit in 0..e.bits() {
                            if e.bit(bit) {
                                acc = self.ring.mul(&acc, &base);
                            }
                            base = self.ring.mul(&base, &base);
                        }
                        g.push(acc);
                    }
                }
                return Poly::new(self.ring.clone(), g).squarefree_part();
            }
            return Err(Error::Inseparable);
        }
        let g = self.gcd(&deriv)?;
        let (sf, r) = self.divmod(&g)?;
        debug_assert!(r.is_zero());
        let lead = sf.leading().expect("nonzero").clone();
        let inv = self.ring.inv(&lead)?;
        Ok(sf.scale(&inv))
    }

    /// Multiply by `X^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.ring.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { ring: self.ring.clone(), coeffs }
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "[]".to_string();
        }
        let items: Vec<String> = self.coeffs.iter().map(|c| self.ring.render(c)).collect();
        format!("[{}]", items.join(", "))
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::canonical_fp;

    fn qq() -> ExactField {
        ExactField::Rationals
    }

    fn qpoly(coeffs: &[i64]) -> Poly {
        Poly::from_i64_coeffs(qq(), coeffs)
    }

    #[test]
    fn divmod_examples() {
        // X^3 / (X^2 + 2) = (X, -2X)
        let f = qpoly(&[0, 0, 0, 1]);
        let g = qpoly(&[2, 0, 1]);
        let (q, r) = f.divmod(&g).unwrap();
        assert_eq!(q, qpoly(&[0, 1]));
        assert_eq!(r, qpoly(&[0, -2]));

        // deg f < deg g -> (0, f)
        let f2 = qpoly(&[1, 1]);
        let (q2, r2) = f2.divmod(&g).unwrap();
        assert!(q2.is_zero());
        assert_eq!(r2, f2);

        // self division
        let (q3, r3) = g.divmod(&g).unwrap();
        assert_eq!(q3, qpoly(&[1]));
        assert!(r3.is_zero());

        assert_eq!(f.divmod(&Poly::zero(qq())), Err(Error::DivisionByZeroPoly));
    }

    #[test]
    fn divmod_round_trip_matches_schoolbook() {
        // independent long-division oracle on a fixed sample
        let f = qpoly(&[3, -1, 4, 1, -5, 9, 2]);
        let g = qpoly(&[-2, 0, 7, 1]);
        let (q, r) = f.divmod(&g).unwrap();
        let back = q.mul(&g).unwrap().add(&r).unwrap();
        assert_eq!(back, f);
        assert!(r.degree().unwrap_or(0) < g.degree().unwrap());
    }

    #[test]
    fn taylor_shift_examples() {
        let f = qpoly(&[2, 0, 1]);
        // f(X) = (X-2)^2 + 4(X-2) + 6
        let c = f.taylor_shift(&qq().from_i64(2));
        assert_eq!(c, vec![qq().from_i64(6), qq().from_i64(4), qq().from_i64(1)]);
        let c0 = f.taylor_shift(&qq().from_i64(0));
        assert_eq!(c0, vec![qq().from_i64(2), qq().from_i64(0), qq().from_i64(1)]);
        let k = qpoly(&[7]);
        assert_eq!(k.taylor_shift(&qq().from_i64(5)), vec![qq().from_i64(7)]);
    }

    #[test]
    fn hasse_derivative_examples() {
        let f = qpoly(&[2, 0, 1]);
        assert_eq!(f.hasse_deriv(2), qpoly(&[1]));
        let c = qpoly(&[0, 0, 0, 1]);
        assert_eq!(c.hasse_deriv(1), qpoly(&[0, 0, 3]));
        // over F_2: Hasse ∂_2(X^2) = 1 while the iterated formal derivative vanishes
        let f2 = canonical_fp(2, 1);
        let g = Poly::from_i64_coeffs(f2.clone(), &[0, 0, 1]);
        assert_eq!(g.hasse_deriv(2), Poly::from_i64_coeffs(f2.clone(), &[1]));
        assert!(g.derivative().derivative().is_zero());
    }

    #[test]
    fn q_expansion_examples() {
        let f = qpoly(&[0, 0, 0, 1]);
        let q = qpoly(&[2, 0, 1]);
        let digits = f.q_expansion(&q).unwrap();
        assert_eq!(digits.len(), 2);
        assert_eq!(digits[0], qpoly(&[0, -2]));
        assert_eq!(digits[1], qpoly(&[0, 1]));

        let qq_digits = q.q_expansion(&q).unwrap();
        assert_eq!(qq_digits.len(), 2);
        assert!(qq_digits[0].is_zero());
        assert_eq!(qq_digits[1], qpoly(&[1]));

        let small = qpoly(&[5, 1]);
        assert_eq!(small.q_expansion(&q).unwrap(), vec![small.clone()]);

        let non_monic = qpoly(&[1, 0, 2]);
        assert_eq!(f.q_expansion(&non_monic), Err(Error::NonMonicKey));
    }

    #[test]
    fn q_expansion_round_trip() {
        let f = qpoly(&[1, -3, 0, 2, 5, -1, 0, 4]);
        let q = qpoly(&[1, 2, 1]);
        let digits = f.q_expansion(&q).unwrap();
        let mut acc = Poly::zero(qq());
        let mut qpow = qpoly(&[1]);
        for d in &digits {
            assert!(d.degree().unwrap_or(0) < q.degree().unwrap());
            acc = acc.add(&d.mul(&qpow).unwrap()).unwrap();
            qpow = qpow.mul(&q).unwrap();
        }
        assert_eq!(acc, f);
    }

    #[test]
    fn resultant_examples() {
        // res(X - a, X - b) = b - a
        let a = qpoly(&[-3, 1]);
        let b = qpoly(&[-7, 1]);
        assert_eq!(a.resultant(&b).unwrap(), qq().from_i64(-4)); // 7... res = b-a with a=3,b=7: -4? res(X-3, X-7) = (7-3)? sign checked below
        // cross-check against the product-of-root-differences definition:
        // res(f, g) = lc(f)^deg g * prod f(beta_j) over roots beta_j of g... for
        // f = X-3, g = X-7: res = f(7) = 4. Orientation: res(X-a, X-b) = b - a.
        let f = qpoly(&[-3, 1]);
        assert_eq!(f.eval(&qq().from_i64(7)), qq().from_i64(4));

        // minpoly of sqrt(-2) + 1 via Res_y(y^2 + 2, (X - 1) - y):
        // treat X as the outer variable by interpolation in the tower module;
        // here check the classical answer by direct evaluation instead.
        let m = qpoly(&[3, -2, 1]);
        // (sqrt(-2)+1) satisfies X^2 - 2X + 3: ((x-1)^2 = -2)
        let shifted = m.taylor_shift(&qq().from_i64(1));
        assert_eq!(shifted, vec![qq().from_i64(2), qq().from_i64(0), qq().from_i64(1)]);

        assert_eq!(
            Poly::zero(qq()).resultant(&a),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn resultant_orientation() {
        let a = qpoly(&[-3, 1]);
        let b = qpoly(&[-7, 1]);
        // res(X-a, X-b) = b - a = 7 - 3... with roots a=3 (of first), b=7 (of second):
        // res(f,g) = prod over roots alpha of f of g(alpha) = g(3) = 3 - 7 = -4
        assert_eq!(a.resultant(&b).unwrap(), qq().from_i64(-4));
        assert_eq!(b.resultant(&a).unwrap(), qq().from_i64(4));
    }

    #[test]
    fn squarefree_part_examples() {
        let x2 = qpoly(&[0, 0, 1]);
        assert_eq!(x2.squarefree_part().unwrap(), qpoly(&[0, 1]));
        let f = qpoly(&[2, 0, 1]).mul(&qpoly(&[2, 0, 1])).unwrap();
        assert_eq!(f.squarefree_part().unwrap(), qpoly(&[2, 0, 1]));
        assert_eq!(Poly::zero(qq()).squarefree_part(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn ring_mismatch_rejected() {
        let f = qpoly(&[1, 1]);
        let g = Poly::from_i64_coeffs(ExactField::Prime(5), &[1, 1]);
        assert_eq!(f.add(&g), Err(Error::RingMismatch));
        assert_eq!(f.mul(&g), Err(Error::RingMismatch));
    }

    #[test]
    fn hasse_product_rule_spot_check() {
        // ∂_b(fg) = sum_{i+j=b} ∂_i f ∂_j g with ∂_0 = id
        let f = qpoly(&[1, 2, 0, 1]);
        let g = qpoly(&[-1, 0, 3]);
        let prod = f.mul(&g).unwrap();
        for b in 1..=4usize {
            let lhs = prod.hasse_deriv(b);
            let mut rhs = Poly::zero(qq());
            for i in 0..=b {
                let j = b - i;
                let df = if i == 0 { f.clone() } else { f.hasse_deriv(i) };
                let dg = if j == 0 { g.clone() } else { g.hasse_deriv(j) };
                rhs = rhs.add(&df.mul(&dg).unwrap()).unwrap();
            }
            assert_eq!(lhs, rhs, "product rule at b={b}");
        }
    }
}
