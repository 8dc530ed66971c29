//! Field descriptors: prime fields, extensions of a prime field, and
//! two-level towers `F_p -> F_q -> F_{q^n}`.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::field::{Elem, FiniteField, Tables, MAX_ORDER};
use crate::poly::{canonical_irreducible, is_irreducible, Poly};

/// `F_{p^r}` given by a monic irreducible modulus over `F_p`.
#[derive(Clone, Debug)]
pub struct FieldDesc {
    p: u32,
    r: u32,
    modulus: Poly,
    tables: Tables,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for FieldDesc {}

impl FieldDesc {
    /// The prime field `F_p`, with formal modulus `x`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > MAX_ORDER {
            return Err(Error::FieldTooLarge {
                order: p,
                max: MAX_ORDER,
            });
        }
        let p = p as u32;
        let tables = Tables::build(p, 1, |a, b| ((a as u64 * b as u64) % p as u64) as u32);
        Ok(FieldDesc {
            p,
            r: 1,
            modulus: Poly::x(),
            tables,
        })
    }

    /// `F_{p^r}`; the canonical modulus is used when `modulus` is `None`.
    pub fn extension(p: u64, r: u32, modulus: Option<Poly>) -> Result<Self> {
        let prime = Self::prime(p)?;
        if r == 0 {
            return Err(Error::BadModulus("extension degree must be at least 1".into()));
        }
        let order = p.checked_pow(r).filter(|&o| o <= MAX_ORDER);
        if order.is_none() {
            return Err(Error::FieldTooLarge {
                order: p.saturating_pow(r),
                max: MAX_ORDER,
            });
        }
        let modulus = match modulus {
            Some(m) => {
                validate_modulus(&prime, &m, r as usize)?;
                m
            }
            None => canonical_irreducible(&prime, r as usize),
        };
        if r == 1 {
            return Ok(FieldDesc { modulus, ..prime });
        }
        let p32 = prime.p;
        let tables = Tables::build(p32, r, |a, b| {
            let pa = Poly::new(digits(a, p32, r));
            let pb = Poly::new(digits(b, p32, r));
            let prod = pa.mul(&prime, &pb).rem(&prime, &modulus).expect("monic modulus");
            undigits(prod.coeffs(), p32)
        });
        Ok(FieldDesc {
            p: p32,
            r,
            modulus,
            tables,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.order()
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.r == 1
    }

    /// Coordinates over `F_p`, length `r`.
    pub fn coeffs(&self, a: Elem) -> Vec<Elem> {
        digits(a.0, self.p, self.r)
    }

    pub fn from_coeffs(&self, coeffs: &[Elem]) -> Result<Elem> {
        if coeffs.len() > self.r as usize || coeffs.iter().any(|c| c.0 >= self.p) {
            return Err(Error::BadModulus(format!(
                "{coeffs:?} is not a coordinate vector of F_{}",
                self.q()
            )));
        }
        Ok(Elem(undigits(coeffs, self.p)))
    }

    /// Reference product by polynomial multiplication modulo the modulus.
    pub fn mul_reference(&self, a: Elem, b: Elem) -> Elem {
        let prime = Self::prime(self.p as u64).expect("p was validated");
        let pa = Poly::new(self.coeffs(a));
        let pb = Poly::new(self.coeffs(b));
        let prod = pa.mul(&prime, &pb).rem(&prime, &self.modulus).expect("monic");
        Elem(undigits(prod.coeffs(), self.p))
    }
}

impl FiniteField for FieldDesc {
    fn tables(&self) -> &Tables {
        &self.tables
    }
}

/// The relative extension `F_{q^n} / F_q` over a base [`FieldDesc`].
#[derive(Debug)]
pub struct TowerDesc {
    base: Arc<FieldDesc>,
    n: u32,
    modulus: Poly,
    tables: Tables,
    pub(crate) trace_table: OnceLock<Vec<Elem>>,
    pub(crate) norm_table: OnceLock<Vec<Elem>>,
    pub(crate) kernel: OnceLock<Vec<Elem>>,
}

impl PartialEq for TowerDesc {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for TowerDesc {}

impl TowerDesc {
    pub fn new(base: Arc<FieldDesc>, n: u32, modulus: Option<Poly>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadModulus("relative degree must be at least 1".into()));
        }
        let q = base.q() as u64;
        let order = q.checked_pow(n).filter(|&o| o <= MAX_ORDER);
        if order.is_none() {
            return Err(Error::FieldTooLarge {
                order: q.saturating_pow(n),
                max: MAX_ORDER,
            });
        }
        let modulus = match modulus {
            Some(m) => {
                validate_modulus(&*base, &m, n as usize)?;
                m
            }
            None => canonical_irreducible(&*base, n as usize),
        };
        let tables = {
            let base = &*base;
            let q = base.q();
            Tables::build(base.p(), base.r() * n, |a, b| {
                let pa = Poly::new(digits(a, q, n));
                let pb = Poly::new(digits(b, q, n));
                let prod = pa.mul(base, &pb).rem(base, &modulus).expect("monic");
                undigits(prod.coeffs(), q)
            })
        };
        Ok(TowerDesc {
            base,
            n,
            modulus,
            tables,
            trace_table: OnceLock::new(),
            norm_table: OnceLock::new(),
            kernel: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &Arc<FieldDesc> {
        &self.base
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.base.q()
    }

    pub fn p(&self) -> u32 {
        self.base.p()
    }

    pub fn r(&self) -> u32 {
        self.base.r()
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Coordinates over `F_q`, length `n`.
    pub fn coeffs(&self, a: Elem) -> Vec<Elem> {
        digits(a.0, self.q(), self.n)
    }

    pub fn from_coeffs(&self, coeffs: &[Elem]) -> Result<Elem> {
        if coeffs.len() > self.n as usize || coeffs.iter().any(|c| c.0 >= self.q()) {
            return Err(Error::BadModulus(format!(
                "{coeffs:?} is not a coordinate vector over F_{}",
                self.q()
            )));
        }
        Ok(Elem(undigits(coeffs, self.q())))
    }

    /// Base-field element as a tower element. Codes are preserved.
    pub fn embed(&self, a: Elem) -> Elem {
        debug_assert!(a.0 < self.q());
        a
    }

    pub fn in_base(&self, a: Elem) -> bool {
        a.0 < self.q()
    }

    /// `(q^n - 1) / (q - 1)`.
    pub fn norm_exponent(&self) -> u64 {
        let q = self.q() as u64;
        (q.pow(self.n) - 1) / (q - 1)
    }

    /// Reference product by polynomial multiplication over the base.
    pub fn mul_reference(&self, a: Elem, b: Elem) -> Elem {
        let pa = Poly::new(self.coeffs(a));
        let pb = Poly::new(self.coeffs(b));
        let prod = pa
            .mul(&*self.base, &pb)
            .rem(&*self.base, &self.modulus)
            .expect("monic");
        Elem(undigits(prod.coeffs(), self.q()))
    }
}

impl FiniteField for TowerDesc {
    fn tables(&self) -> &Tables {
        &self.tables
    }
}

/// Either level of a two-level tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Base(Arc<FieldDesc>),
    Tower(Arc<TowerDesc>),
}

impl Field {
    pub fn as_tower(&self) -> Option<&Arc<TowerDesc>> {
        match self {
            Field::Tower(t) => Some(t),
            Field::Base(_) => None,
        }
    }

    pub fn as_base(&self) -> Option<&Arc<FieldDesc>> {
        match self {
            Field::Base(b) => Some(b),
            Field::Tower(_) => None,
        }
    }

    /// Coordinates over the level directly below.
    pub fn coeffs(&self, a: Elem) -> Vec<Elem> {
        match self {
            Field::Base(b) => b.coeffs(a),
            Field::Tower(t) => t.coeffs(a),
        }
    }
}

impl FiniteField for Field {
    fn tables(&self) -> &Tables {
        match self {
            Field::Base(b) => b.tables(),
            Field::Tower(t) => t.tables(),
        }
    }
}

impl From<FieldDesc> for Field {
    fn from(f: FieldDesc) -> Self {
        Field::Base(Arc::new(f))
    }
}

impl From<TowerDesc> for Field {
    fn from(t: TowerDesc) -> Self {
        Field::Tower(Arc::new(t))
    }
}

pub fn make_prime_field(p: u64) -> Result<FieldDesc> {
    FieldDesc::prime(p)
}

/// Extends a prime field to `F_{p^degree}`, or any other field to a tower.
pub fn make_extension(base: &Arc<FieldDesc>, degree: u32, modulus: Option<Poly>) -> Result<Field> {
    if base.is_prime_field() {
        FieldDesc::extension(base.p() as u64, degree, modulus).map(Field::from)
    } else {
        TowerDesc::new(base.clone(), degree, modulus).map(Field::from)
    }
}

/// Convenience: the canonical tower over the canonical `F_{p^r}`.
pub fn tower(p: u64, r: u32, n: u32) -> Result<Arc<TowerDesc>> {
    let base = Arc::new(FieldDesc::extension(p, r, None)?);
    Ok(Arc::new(TowerDesc::new(base, n, None)?))
}

fn validate_modulus<F: FiniteField + ?Sized>(field: &F, m: &Poly, degree: usize) -> Result<()> {
    if m.degree() != Some(degree) {
        return Err(Error::BadModulus(format!(
            "{m} does not have degree {degree}"
        )));
    }
    if !m.is_monic() {
        return Err(Error::BadModulus(format!("{m} is not monic")));
    }
    if m.coeffs().iter().any(|c| c.0 >= field.order()) {
        return Err(Error::BadModulus(format!(
            "{m} has coefficients outside the base field"
        )));
    }
    if !is_irreducible(field, m) {
        return Err(Error::NotIrreducible(m.to_string()));
    }
    Ok(())
}

fn digits(mut code: u32, radix: u32, len: u32) -> Vec<Elem> {
    (0..len)
        .map(|_| {
            let d = code % radix;
            code /= radix;
            Elem(d)
        })
        .collect()
}

fn undigits(coeffs: &[Elem], radix: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, c| acc * radix + c.0)
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<u32> = (0..=self.r as usize).map(|i| self.modulus.coeff(i).0).collect();
        write!(f, "p={};r={};mod={}", self.p, self.r, list(&m))
    }
}

impl fmt::Display for TowerDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = (0..=self.n as usize)
            .map(|i| {
                let c: Vec<u32> = self
                    .base
                    .coeffs(self.modulus.coeff(i))
                    .iter()
                    .map(|e| e.0)
                    .collect();
                list(&c)
            })
            .collect();
        write!(f, "{};n={};tmod=[{}]", self.base, self.n, t.join(","))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Base(b) => b.fmt(f),
            Field::Tower(t) => t.fmt(f),
        }
    }
}

fn list(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(","))
}

/// Raw descriptor fields before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub r: u32,
    pub modulus: Option<Vec<u32>>,
    pub n: Option<u32>,
    pub tower_modulus: Option<Vec<Vec<u32>>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<Field> {
        let modulus = self.modulus.as_ref().map(|m| Poly::from_codes(m));
        let base = FieldDesc::extension(self.p, self.r, modulus)?;
        let Some(n) = self.n else {
            if self.tower_modulus.is_some() {
                return Err(Error::BadModulus("tmod given without n".into()));
            }
            return Ok(base.into());
        };
        let tmod = match &self.tower_modulus {
            Some(rows) => {
                let coeffs = rows
                    .iter()
                    .map(|row| {
                        let row: Vec<Elem> = row.iter().copied().map(Elem).collect();
                        base.from_coeffs(&row)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(Poly::new(coeffs))
            }
            None => None,
        };
        Ok(TowerDesc::new(Arc::new(base), n, tmod)?.into())
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `p=<int>;r=<int>;mod=[...]` with optional `;n=<int>;tmod=[[...],...]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = FieldSpec {
            r: 1,
            ..Default::default()
        };
        let mut seen_p = false;
        let mut offset = 0;
        for part in s.split(';') {
            let here = offset;
            offset += part.len() + 1;
            let part_trim = part.trim();
            if part_trim.is_empty() {
                continue;
            }
            let (key, value) = part_trim.split_once('=').ok_or_else(|| Error::Parse {
                offset: here,
                msg: format!("expected key=value, found {part_trim:?}"),
            })?;
            let value_offset = here + part.find('=').unwrap_or(0) + 1;
            let int = |v: &str| {
                v.trim().parse::<u64>().map_err(|e| Error::Parse {
                    offset: value_offset,
                    msg: format!("{key}: {e}"),
                })
            };
            match key.trim() {
                "p" => {
                    spec.p = int(value)?;
                    seen_p = true;
                }
                "r" => spec.r = int(value)? as u32,
                "n" => spec.n = Some(int(value)? as u32),
                "mod" => spec.modulus = Some(parse_json(value, value_offset)?),
                "tmod" => spec.tower_modulus = Some(parse_json(value, value_offset)?),
                other => {
                    return Err(Error::Parse {
                        offset: here,
                        msg: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        if !seen_p {
            return Err(Error::Parse {
                offset: 0,
                msg: "missing p".into(),
            });
        }
        Ok(spec)
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<FieldSpec>()?.build()
    }
}

/// Parses a JSON array literal, reporting errors relative to `offset`.
pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(value: &str, offset: usize) -> Result<T> {
    serde_json::from_str(value.trim()).map_err(|e| Error::Parse {
        offset: offset + e.column().saturating_sub(1),
        msg: e.to_string(),
    })
}
