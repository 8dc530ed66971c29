//! Dense univariate polynomials over a field given by context.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::prime_factors;
use crate::error::{Error, Result};
use crate::field::{Elem, FiniteField};

/// Dense coefficient list, lowest degree first, no trailing zeros.
///
/// A `Poly` does not carry its field; every operation takes the field it is
/// interpreted over. Base-field polynomials embed into a tower unchanged since
/// embedding preserves codes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_codes(codes: &[u32]) -> Self {
        Self::new(codes.iter().copied().map(Elem).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^e`.
    pub fn monomial(c: Elem, e: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Elem::ZERO; e + 1];
        coeffs[e] = c;
        Poly { coeffs }
    }

    pub fn x() -> Self {
        Self::monomial(Elem::ONE, 1)
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn codes(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Elem::ONE)
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, Elem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
    }

    pub fn add<F: FiniteField + ?Sized>(&self, field: &F, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| field.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg<F: FiniteField + ?Sized>(&self, field: &F) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn sub<F: FiniteField + ?Sized>(&self, field: &F, other: &Poly) -> Poly {
        self.add(field, &other.neg(field))
    }

    pub fn scale<F: FiniteField + ?Sized>(&self, field: &F, c: Elem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Elem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Schoolbook product over the nonzero terms of both operands.
    pub fn mul<F: FiniteField + ?Sized>(&self, field: &F, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        let rhs: Vec<(usize, Elem)> = other.terms().collect();
        for (i, a) in self.terms() {
            for &(j, b) in &rhs {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Remainder and quotient by a nonzero divisor.
    pub fn div_rem<F: FiniteField + ?Sized>(
        &self,
        field: &F,
        divisor: &Poly,
    ) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = field.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let t = field.mul(c, lead_inv);
            quot[i - dd] = t;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = field.sub(rem[k], field.mul(t, dc));
            }
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem<F: FiniteField + ?Sized>(&self, field: &F, divisor: &Poly) -> Result<Poly> {
        Ok(self.div_rem(field, divisor)?.1)
    }

    pub fn make_monic<F: FiniteField + ?Sized>(&self, field: &F) -> Poly {
        match self.leading() {
            Some(l) => self.scale(field, field.inv(l).expect("leading coefficient is nonzero")),
            None => Poly::zero(),
        }
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd<F: FiniteField + ?Sized>(&self, field: &F, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b).expect("divisor is nonzero");
            a = b;
            b = r;
        }
        a.make_monic(field)
    }

    /// `self^e mod modulus`.
    pub fn pow_mod<F: FiniteField + ?Sized>(
        &self,
        field: &F,
        mut e: u64,
        modulus: &Poly,
    ) -> Result<Poly> {
        let mut base = self.rem(field, modulus)?;
        let mut acc = Poly::constant(Elem::ONE).rem(field, modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base).rem(field, modulus)?;
            }
            base = base.mul(field, &base).rem(field, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Horner evaluation.
    pub fn eval<F: FiniteField + ?Sized>(&self, field: &F, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    /// Evaluation as a sum of `c_i * x^i` with each power computed separately.
    pub fn eval_naive<F: FiniteField + ?Sized>(&self, field: &F, x: Elem) -> Elem {
        self.terms().fold(Elem::ZERO, |acc, (i, c)| {
            field.add(acc, field.mul(c, field.pow(x, i as u64)))
        })
    }

    /// `self(inner(x))` by Horner's rule over polynomials.
    pub fn compose<F: FiniteField + ?Sized>(&self, field: &F, inner: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| {
            acc.mul(field, inner).add(field, &Poly::constant(c))
        })
    }

    /// Substitutes `x -> x^k`.
    pub fn inflate(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Elem::ZERO; (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.terms() {
            coeffs[i * k] = c;
        }
        Poly::new(coeffs)
    }

    /// Value table over all of `field`, indexed by code.
    pub fn table<F: FiniteField + ?Sized>(&self, field: &F) -> Vec<Elem> {
        field.elements().map(|x| self.eval(field, x)).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.0)?;
        }
        write!(f, "]")
    }
}

/// Irreducibility over `field`: root search up to degree 3, Rabin's test above.
pub fn is_irreducible<F: FiniteField + ?Sized>(field: &F, f: &Poly) -> bool {
    let Some(d) = f.degree() else { return false };
    match d {
        0 => false,
        1 => true,
        2 | 3 => field.elements().all(|x| !f.eval(field, x).is_zero()),
        _ => rabin_irreducible(field, f),
    }
}

/// `f` of degree `d` is irreducible iff `x^(q^d) = x mod f` and
/// `gcd(x^(q^(d/l)) - x, f) = 1` for each prime `l | d`.
pub fn rabin_irreducible<F: FiniteField + ?Sized>(field: &F, f: &Poly) -> bool {
    let Some(d) = f.degree() else { return false };
    if d == 0 {
        return false;
    }
    let q = field.order() as u64;
    let x = Poly::x().rem(field, f).expect("nonzero modulus");
    // frob[i] = x^(q^i) mod f
    let mut frob = vec![x.clone()];
    for i in 1..=d {
        let next = frob[i - 1].pow_mod(field, q, f).expect("nonzero modulus");
        frob.push(next);
    }
    if frob[d] != x {
        return false;
    }
    prime_factors(d as u64).into_iter().all(|l| {
        let g = frob[d / l as usize].sub(field, &x).gcd(field, f);
        g.degree() == Some(0)
    })
}

/// Smallest monic irreducible of degree `d`, scanning the lower coefficients
/// as a base-`q` counter with the constant term varying fastest.
pub fn canonical_irreducible<F: FiniteField + ?Sized>(field: &F, d: usize) -> Poly {
    let q = field.order() as u64;
    let mut m = 0u64;
    loop {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = m;
        for _ in 0..d {
            coeffs.push(Elem((rest % q) as u32));
            rest /= q;
        }
        coeffs.push(Elem::ONE);
        let cand = Poly::new(coeffs);
        if is_irreducible(field, &cand) {
            return cand;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desc::FieldDesc;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Monic polynomials of degree `d` over `field`, all of them.
    fn monics(q: u32, d: usize) -> Vec<Poly> {
        (0..q.pow(d as u32))
            .map(|m| {
                let mut c: Vec<u32> = (0..d).map(|i| m / q.pow(i as u32) % q).collect();
                c.push(1);
                Poly::from_codes(&c)
            })
            .collect()
    }

    #[test]
    fn rabin_matches_product_enumeration() {
        for (p, r, max_d) in [(2u64, 1u32, 6usize), (3, 1, 4), (2, 2, 3)] {
            let f = FieldDesc::extension(p, r, None).unwrap();
            let q = f.q();
            for d in 1..=max_d {
                // reducible = product of two monics of positive degree
                let mut reducible = HashSet::new();
                for a in 1..=d / 2 {
                    for x in monics(q, a) {
                        for y in monics(q, d - a) {
                            reducible.insert(x.mul(&f, &y));
                        }
                    }
                }
                for cand in monics(q, d) {
                    let expect = !reducible.contains(&cand);
                    assert_eq!(is_irreducible(&f, &cand), expect, "{cand} over F_{q}");
                    assert_eq!(rabin_irreducible(&f, &cand), expect, "{cand} over F_{q}");
                }
            }
        }
    }

    #[test]
    fn division_identity() {
        let f = FieldDesc::prime(7).unwrap();
        let a = Poly::from_codes(&[3, 0, 5, 1, 6, 2]);
        let b = Poly::from_codes(&[1, 4, 3]);
        let (quot, rem) = a.div_rem(&f, &b).unwrap();
        assert!(rem.degree() < b.degree());
        assert_eq!(quot.mul(&f, &b).add(&f, &rem), a);
        assert_eq!(a.div_rem(&f, &Poly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn compose_and_inflate() {
        let f = FieldDesc::prime(5).unwrap();
        let h = Poly::from_codes(&[1, 2, 3]);
        let g = Poly::from_codes(&[0, 0, 1]);
        assert_eq!(h.compose(&f, &g), h.inflate(2));
        for x in f.elements() {
            let gx = g.eval(&f, x);
            assert_eq!(h.compose(&f, &g).eval(&f, x), h.eval(&f, gx));
        }
        assert_eq!(Poly::from_codes(&[0, 0, 0]), Poly::zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    proptest! {
        #[test]
        fn horner_matches_power_sum(coeffs in prop::collection::vec(0u32..16, 0..12), x in 0u32..16) {
            let f = FieldDesc::extension(2, 4, None).unwrap();
            let poly = Poly::from_codes(&coeffs);
            prop_assert_eq!(poly.eval(&f, Elem(x)), poly.eval_naive(&f, Elem(x)));
        }

        #[test]
        fn product_evaluates_pointwise(
            a in prop::collection::vec(0u32..9, 0..6),
            b in prop::collection::vec(0u32..9, 0..6),
            x in 0u32..9,
        ) {
            let f = FieldDesc::extension(3, 2, None).unwrap();
            let (a, b) = (Poly::from_codes(&a), Poly::from_codes(&b));
            let x = Elem(x);
            prop_assert_eq!(a.mul(&f, &b).eval(&f, x), f.mul(a.eval(&f, x), b.eval(&f, x)));
            prop_assert_eq!(a.add(&f, &b).eval(&f, x), f.add(a.eval(&f, x), b.eval(&f, x)));
        }
    }
}
