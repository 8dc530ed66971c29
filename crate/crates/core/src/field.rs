//! Element codes and table-driven arithmetic shared by every field level.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::prime_factors;
use crate::error::{Error, Result};

/// Largest field order the constructors accept.
pub const MAX_ORDER: u64 = 1 << 20;

/// A field element by its canonical integer encoding.
///
/// The encoding is positional: an element with coefficient tuple
/// `(c_0, ..., c_{d-1})` over the level below has code `sum code(c_i) * q_below^i`.
/// Flattened all the way down, a code is the base-`p` number whose digits are
/// the prime-field coordinates, so base-field elements keep their code when
/// embedded into a tower.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exp/log tables over a generator of the multiplicative group, plus the
/// digit layout used for addition.
#[derive(Clone, Debug)]
pub struct Tables {
    p: u32,
    digits: u32,
    order: u32,
    generator: u32,
    // exp has length 2 * (order - 1) so a sum of two logs indexes directly.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Tables {
    /// Builds the tables from a reference multiplication on codes.
    pub(crate) fn build(p: u32, digits: u32, slow_mul: impl Fn(u32, u32) -> u32) -> Self {
        let order = p.pow(digits);
        let group = (order - 1) as u64;
        let slow_pow = |mut b: u32, mut e: u64| {
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            acc
        };
        let factors = prime_factors(group);
        let generator = (1..order)
            .find(|&g| factors.iter().all(|&l| slow_pow(g, group / l) != 1))
            .expect("multiplicative group of a field is cyclic");

        let m = group as usize;
        let mut exp = vec![0u32; 2 * m.max(1)];
        let mut log = vec![0u32; order as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().take(m).enumerate() {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, generator);
        }
        debug_assert_eq!(cur, 1);
        exp.copy_within(0..m, m);
        Tables {
            p,
            digits,
            order,
            generator,
            exp,
            log,
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        if p == 2 {
            return a ^ b;
        }
        if self.digits == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.digits {
            let s = a % p + b % p;
            out += if s >= p { s - p } else { s } * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let p = self.p;
        if p == 2 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.digits {
            let d = a % p;
            if d != 0 {
                out += (p - d) * place;
            }
            a /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let m = self.order - 1;
        Some(self.exp[((m - self.log[a as usize]) % m.max(1)) as usize])
    }

    /// Discrete log to the table generator; `None` for zero.
    #[inline]
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    #[inline]
    pub fn exp(&self, i: u32) -> u32 {
        self.exp[(i % (self.order - 1).max(1)) as usize]
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }
}

/// Arithmetic on canonical codes. Implemented by every field descriptor.
pub trait FiniteField {
    #[doc(hidden)]
    fn tables(&self) -> &Tables;

    fn characteristic(&self) -> u32 {
        self.tables().p
    }

    /// Number of elements.
    fn order(&self) -> u32 {
        self.tables().order
    }

    /// Absolute degree over the prime field.
    fn prime_degree(&self) -> u32 {
        self.tables().digits
    }

    fn zero(&self) -> Elem {
        Elem::ZERO
    }

    fn one(&self) -> Elem {
        Elem::ONE
    }

    #[inline]
    fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.tables().add(a.0, b.0))
    }

    #[inline]
    fn neg(&self, a: Elem) -> Elem {
        Elem(self.tables().neg(a.0))
    }

    #[inline]
    fn sub(&self, a: Elem, b: Elem) -> Elem {
        let t = self.tables();
        Elem(t.add(a.0, t.neg(b.0)))
    }

    #[inline]
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.tables().mul(a.0, b.0))
    }

    fn inv(&self, a: Elem) -> Result<Elem> {
        self.tables().inv(a.0).map(Elem).ok_or(Error::DivisionByZero)
    }

    fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply; `0^0 = 1`.
    fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^i)` by `i` successive p-th powers.
    fn frobenius(&self, a: Elem, i: u64) -> Elem {
        let p = self.characteristic() as u64;
        let mut x = a;
        for _ in 0..i % self.prime_degree() as u64 {
            x = self.pow(x, p);
        }
        x
    }

    /// The image of the integer `k` in the prime subfield.
    fn scalar(&self, k: i64) -> Elem {
        Elem(k.rem_euclid(self.characteristic() as i64) as u32)
    }

    fn minus_one(&self) -> Elem {
        self.neg(Elem::ONE)
    }

    fn decode(&self, k: u64) -> Result<Elem> {
        if k < self.order() as u64 {
            Ok(Elem(k as u32))
        } else {
            Err(Error::OutOfRange {
                code: k,
                order: self.order() as u64,
            })
        }
    }

    fn encode(&self, a: Elem) -> u64 {
        a.0 as u64
    }

    /// All elements in canonical encoding order.
    fn elements(&self) -> std::iter::Map<std::ops::Range<u32>, fn(u32) -> Elem> {
        (0..self.order()).map(Elem as fn(u32) -> Elem)
    }
}
