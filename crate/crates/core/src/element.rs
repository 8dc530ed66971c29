//! Elements that remember their field, with checked mixed-field arithmetic.

use std::fmt;
use std::sync::Arc;

use crate::desc::{Field, TowerDesc};
use crate::error::{Error, Result};
use crate::field::{Elem, FiniteField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    home: Field,
    code: Elem,
}

impl FieldElement {
    /// `decode(home, k)`.
    pub fn decode(home: &Field, k: u64) -> Result<Self> {
        Ok(FieldElement {
            home: home.clone(),
            code: home.decode(k)?,
        })
    }

    pub fn home(&self) -> &Field {
        &self.home
    }

    pub fn elem(&self) -> Elem {
        self.code
    }

    pub fn encode(&self) -> u64 {
        self.code.0 as u64
    }

    /// Coefficient tuple over the level below.
    pub fn coeffs(&self) -> Vec<Elem> {
        self.home.coeffs(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code.is_zero()
    }

    /// Brings both operands into a common field. A base element meets its own
    /// tower by embedding.
    fn align(&self, other: &FieldElement) -> Result<(Field, Elem, Elem)> {
        if self.home == other.home {
            return Ok((self.home.clone(), self.code, other.code));
        }
        match (&self.home, &other.home) {
            (Field::Tower(t), Field::Base(b)) if **t.base() == **b => {
                Ok((self.home.clone(), self.code, t.embed(other.code)))
            }
            (Field::Base(b), Field::Tower(t)) if **t.base() == **b => {
                Ok((other.home.clone(), t.embed(self.code), other.code))
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    fn binary(&self, other: &FieldElement, op: impl Fn(&Field, Elem, Elem) -> Elem) -> Result<Self> {
        let (home, a, b) = self.align(other)?;
        let code = op(&home, a, b);
        Ok(FieldElement { home, code })
    }

    pub fn add(&self, other: &FieldElement) -> Result<Self> {
        self.binary(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<Self> {
        self.binary(other, |f, a, b| f.sub(a, b))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<Self> {
        self.binary(other, |f, a, b| f.mul(a, b))
    }

    pub fn neg(&self) -> Self {
        self.with(self.home.neg(self.code))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.home.inv(self.code)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.home.pow(self.code, e))
    }

    pub fn frobenius(&self, i: u64) -> Self {
        self.with(self.home.frobenius(self.code, i))
    }

    fn with(&self, code: Elem) -> Self {
        FieldElement {
            home: self.home.clone(),
            code,
        }
    }
}

/// Constant-coefficient image of a base element in `tower`.
pub fn embed(x: &FieldElement, tower: &Arc<TowerDesc>) -> Result<FieldElement> {
    match &x.home {
        Field::Base(b) if **b == **tower.base() => Ok(FieldElement {
            home: Field::Tower(tower.clone()),
            code: tower.embed(x.code),
        }),
        _ => Err(Error::FieldMismatch),
    }
}

/// All elements of `home` in encoding order.
pub fn enumerate(home: &Field) -> impl Iterator<Item = FieldElement> + '_ {
    home.elements().map(move |code| FieldElement {
        home: home.clone(),
        code,
    })
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desc::{tower, FieldDesc};

    fn f4() -> Field {
        FieldDesc::extension(2, 2, None).unwrap().into()
    }

    fn el(f: &Field, k: u64) -> FieldElement {
        FieldElement::decode(f, k).unwrap()
    }

    #[test]
    fn small_field_identities() {
        let f = f4();
        let w = el(&f, 2);
        assert_eq!(w.mul(&w).unwrap(), el(&f, 3));
        assert_eq!(w.pow(3), el(&f, 1));
        assert_eq!(w.frobenius(1), el(&f, 3));
        assert_eq!(w.frobenius(0), w);
        assert_eq!(w.coeffs(), [Elem(0), Elem(1)]);

        let f5: Field = FieldDesc::prime(5).unwrap().into();
        assert_eq!(el(&f5, 2).inv().unwrap(), el(&f5, 3));
        assert_eq!(el(&f5, 3).encode(), 3);
        assert_eq!(el(&f5, 0).inv(), Err(Error::DivisionByZero));
        assert_eq!(el(&f5, 1).sub(&el(&f5, 3)).unwrap(), el(&f5, 3));
        assert_eq!(el(&f5, 2).neg(), el(&f5, 3));
    }

    #[test]
    fn decode_bounds() {
        let f = f4();
        assert_eq!(
            FieldElement::decode(&f, 4),
            Err(Error::OutOfRange { code: 4, order: 4 })
        );
    }

    #[test]
    fn mixed_fields() {
        let f = f4();
        let f5: Field = FieldDesc::prime(5).unwrap().into();
        assert_eq!(el(&f, 1).add(&el(&f5, 1)), Err(Error::FieldMismatch));

        let t = tower(2, 2, 3).unwrap();
        let tf = Field::Tower(t.clone());
        let w = el(&f, 2);
        let x = el(&tf, 37);
        // base operands embed into their own tower
        let prod = x.mul(&w).unwrap();
        assert_eq!(prod.home(), &tf);
        assert_eq!(prod, x.mul(&embed(&w, &t).unwrap()).unwrap());
        assert_eq!(w.mul(&x).unwrap(), prod);
        assert_eq!(embed(&el(&f5, 1), &t), Err(Error::FieldMismatch));
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let f = f4();
        let t = tower(2, 2, 3).unwrap();
        assert_eq!(
            embed(&el(&f, 1), &t).unwrap(),
            FieldElement::decode(&Field::Tower(t.clone()), 1).unwrap()
        );
        let w = embed(&el(&f, 2), &t).unwrap();
        let lhs = w.pow(2).add(&w).unwrap().add(&w.pow(0)).unwrap();
        assert!(lhs.is_zero());
        for a in enumerate(&f) {
            for b in enumerate(&f) {
                let ea = embed(&a, &t).unwrap();
                let eb = embed(&b, &t).unwrap();
                assert_eq!(embed(&a.mul(&b).unwrap(), &t).unwrap(), ea.mul(&eb).unwrap());
                assert_eq!(embed(&a.add(&b).unwrap(), &t).unwrap(), ea.add(&eb).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_and_round_trip() {
        let f2: Field = FieldDesc::prime(2).unwrap().into();
        let codes: Vec<u64> = enumerate(&f2).map(|e| e.encode()).collect();
        assert_eq!(codes, [0, 1]);
        let f = f4();
        let codes: Vec<u64> = enumerate(&f).map(|e| e.encode()).collect();
        assert_eq!(codes, [0, 1, 2, 3]);

        let t = Field::Tower(tower(2, 2, 3).unwrap());
        let all: Vec<FieldElement> = enumerate(&t).collect();
        assert_eq!(all.len(), 64);
        let distinct: std::collections::HashSet<Vec<Elem>> = all.iter().map(|e| e.coeffs()).collect();
        assert_eq!(distinct.len(), 64);
        for (k, e) in all.iter().enumerate() {
            assert_eq!(e.encode(), k as u64);
            assert_eq!(FieldElement::decode(&t, e.encode()).unwrap(), *e);
            // positional code over the base
            let c = e.coeffs();
            assert_eq!(c[0].0 as u64 + 4 * c[1].0 as u64 + 16 * c[2].0 as u64, k as u64);
        }
    }
}
