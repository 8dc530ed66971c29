//! Relative trace and norm of a tower, the trace kernel, and p-polynomials
//! with coefficients in the base field.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::arith::gcd;
use crate::desc::{parse_json, TowerDesc};
use crate::error::{precondition, Error, Result};
use crate::field::{Elem, FiniteField};
use crate::poly::Poly;

/// `tr(x) = sum_{i<n} x^(q^i)`, as a base-field element.
pub fn rel_trace(tower: &TowerDesc, x: Elem) -> Elem {
    let q = tower.q() as u64;
    let mut acc = Elem::ZERO;
    let mut term = x;
    for _ in 0..tower.n() {
        acc = tower.add(acc, term);
        term = tower.pow(term, q);
    }
    assert_eq!(tower.pow(acc, q), acc, "trace must be fixed by the q-th power");
    assert!(tower.in_base(acc));
    acc
}

/// `nor(x) = x^((q^n - 1)/(q - 1))`, as a base-field element.
pub fn rel_norm(tower: &TowerDesc, x: Elem) -> Elem {
    let v = tower.pow(x, tower.norm_exponent());
    assert!(tower.in_base(v), "norm must land in the base field");
    v
}

/// Trace of every element, indexed by code. Computed once per tower.
pub fn trace_table(tower: &TowerDesc) -> &[Elem] {
    tower
        .trace_table
        .get_or_init(|| tower.elements().map(|x| rel_trace(tower, x)).collect())
}

/// Norm of every element, indexed by code. Computed once per tower.
pub fn norm_table(tower: &TowerDesc) -> &[Elem] {
    tower
        .norm_table
        .get_or_init(|| tower.elements().map(|x| rel_norm(tower, x)).collect())
}

/// `ker(tr)` in encoding order; always `q^(n-1)` elements.
pub fn trace_kernel(tower: &TowerDesc) -> &[Elem] {
    tower.kernel.get_or_init(|| {
        let tr = trace_table(tower);
        tower.elements().filter(|x| tr[x.0 as usize].is_zero()).collect()
    })
}

/// `L(x) = sum a_i x^(p^i)` with every `a_i` in the base field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PPoly {
    terms: BTreeMap<u32, Elem>,
}

impl PPoly {
    /// Exponent indices range over `0..r*n`; zero coefficients are dropped.
    pub fn new(tower: &TowerDesc, terms: impl IntoIterator<Item = (u32, Elem)>) -> Result<Self> {
        let span = tower.r() * tower.n();
        let mut map = BTreeMap::new();
        for (i, a) in terms {
            if i >= span {
                return Err(precondition(format!(
                    "p-polynomial index {i} outside 0..{span}"
                )));
            }
            if !tower.in_base(a) {
                return Err(precondition(format!(
                    "p-polynomial coefficient {a} is not in F_{}",
                    tower.q()
                )));
            }
            if !a.is_zero() {
                let prev = map.get(&i).copied().unwrap_or(Elem::ZERO);
                map.insert(i, tower.add(prev, a));
            }
        }
        map.retain(|_, a| !a.is_zero());
        if map.is_empty() {
            return Err(precondition("p-polynomial must be nonzero"));
        }
        Ok(PPoly { terms: map })
    }

    /// `x^(p^k)`, with `k` reduced modulo `r*n`.
    pub fn frobenius_power(tower: &TowerDesc, k: u64) -> Self {
        let span = (tower.r() * tower.n()) as u64;
        Self::new(tower, [((k % span) as u32, Elem::ONE)]).expect("valid monomial")
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, Elem)> + '_ {
        self.terms.iter().map(|(&i, &a)| (i, a))
    }

    /// `a_0`, the coefficient of `x`.
    pub fn linear_coeff(&self) -> Elem {
        self.terms.get(&0).copied().unwrap_or(Elem::ZERO)
    }

    pub fn eval<F: FiniteField + ?Sized>(&self, field: &F, x: Elem) -> Elem {
        self.terms.iter().fold(Elem::ZERO, |acc, (&i, &a)| {
            field.add(acc, field.mul(a, field.frobenius(x, i as u64)))
        })
    }

    /// The ordinary polynomial `sum a_i x^(p^i)`.
    pub fn to_poly(&self, p: u32) -> Poly {
        self.terms
            .iter()
            .fold(Poly::zero(), |acc, (&i, &a)| {
                let e = (p as usize).pow(i);
                let mut c = acc.coeffs().to_vec();
                if c.len() <= e {
                    c.resize(e + 1, Elem::ZERO);
                }
                c[e] = a;
                Poly::new(c)
            })
    }

    /// `A(x) = L(x)/x = sum a_i x^(p^i - 1)`.
    pub fn quotient(&self, p: u32) -> Poly {
        let l = self.to_poly(p);
        Poly::new(l.coeffs()[1..].to_vec())
    }
}

impl fmt::Display for PPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, a)| format!("({i},{})", a.0))
            .collect();
        write!(f, "L=[{}]", parts.join(","))
    }
}

/// Unvalidated `(i, a_i)` list parsed from `L=[(i,a),...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPolyTerms(pub Vec<(u32, u32)>);

impl PPolyTerms {
    pub fn build(&self, tower: &TowerDesc) -> Result<PPoly> {
        PPoly::new(tower, self.0.iter().map(|&(i, a)| (i, Elem(a))))
    }
}

impl FromStr for PPolyTerms {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let (body, offset) = match body.strip_prefix("L=") {
            Some(rest) => (rest, 2),
            None => (body, 0),
        };
        let json = body.replace('(', "[").replace(')', "]");
        let pairs: Vec<(u32, u32)> = parse_json(&json, offset)?;
        Ok(PPolyTerms(pairs))
    }
}

/// `ppoly_permutes_kernel`: whether `x -> L(x) - shift*x` permutes `ker(tr)`.
pub fn ppoly_permutes_kernel(tower: &TowerDesc, l: &PPoly, shift: Elem) -> Result<bool> {
    let tr = trace_table(tower);
    let kernel = trace_kernel(tower);
    let mut seen = vec![false; tower.order() as usize];
    let mut injective = true;
    for &x in kernel {
        let y = tower.sub(l.eval(tower, x), tower.mul(shift, x));
        if !tr[y.0 as usize].is_zero() {
            return Err(Error::MapEscapesKernel { x: x.0, image: y.0 });
        }
        if std::mem::replace(&mut seen[y.0 as usize], true) {
            injective = false;
        }
    }
    Ok(injective)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelCase {
    Case1,
    Case2,
    NoCaseApplies,
}

/// Sufficient-condition verdict for `x^(p^k) - c x` permuting `ker(tr)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCriterionVerdict {
    pub case: KernelCase,
    pub predicted: Option<bool>,
    pub k: u64,
    pub c: Elem,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// Decides which sufficient case, if any, covers `x^(p^k) - c x`.
///
/// With `d = gcd(k, r)`, case 1 is `c^((q-1)/(p^d-1)) = 1` with `p` not
/// dividing `n`, case 2 is `c^(n(q-1)/(p^d-1)) != 1`. For `c = 0` the map is a
/// power of Frobenius and is reported under case 2.
pub fn binomial_kernel_criterion(k: u64, c: Elem, tower: &TowerDesc) -> Result<KernelCriterionVerdict> {
    let n = tower.n() as u64;
    if k == 0 || gcd(k, n) != 1 {
        return Err(precondition(format!("gcd(k, n) = gcd({k}, {n}) must be 1")));
    }
    if !tower.in_base(c) {
        return Err(precondition(format!("c = {c} is not in F_{}", tower.q())));
    }
    let p = tower.p() as u64;
    let q = tower.q() as u64;
    let d = gcd(k, tower.r() as u64) as u32;
    let e = (q - 1) / (p.pow(d) - 1);
    let verdict = |case, note: Option<&str>| KernelCriterionVerdict {
        case,
        predicted: (case != KernelCase::NoCaseApplies).then_some(true),
        k,
        c,
        note: note.map(str::to_owned),
    };
    if c.is_zero() {
        return Ok(verdict(KernelCase::Case2, Some("c = 0: pure Frobenius power")));
    }
    if tower.pow(c, e) == Elem::ONE && !n.is_multiple_of(p) {
        return Ok(verdict(KernelCase::Case1, None));
    }
    if tower.pow(c, n * e) != Elem::ONE {
        return Ok(verdict(KernelCase::Case2, None));
    }
    Ok(verdict(KernelCase::NoCaseApplies, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desc::tower;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hits(values: &[Elem], q: u32) -> Vec<usize> {
        let mut counts = vec![0; q as usize];
        for v in values {
            counts[v.0 as usize] += 1;
        }
        counts
    }

    #[test]
    fn quadratic_over_prime() {
        let t = tower(2, 1, 2).unwrap();
        let w = Elem(2);
        assert_eq!(rel_trace(&t, w), Elem::ONE);
        assert_eq!(rel_trace(&t, Elem::ZERO), Elem::ZERO);
        assert_eq!(rel_norm(&t, w), Elem::ONE);
        assert_eq!(rel_norm(&t, Elem::ONE), Elem::ONE);
        assert_eq!(trace_kernel(&t), [Elem(0), Elem(1)]);
    }

    #[test]
    fn trace_and_norm_fibres() {
        let t = tower(2, 2, 3).unwrap();
        assert_eq!(hits(trace_table(&t), 4), [16; 4]);
        assert_eq!(hits(&norm_table(&t)[1..], 4), [0, 21, 21, 21]);
        assert_eq!(trace_kernel(&t).len(), 16);

        let t = tower(3, 1, 3).unwrap();
        assert_eq!(trace_kernel(&t).len(), 9);
        for x in t.elements() {
            for y in t.elements().step_by(5) {
                let xy = t.mul(x, y);
                assert_eq!(rel_norm(&t, xy), t.mul(rel_norm(&t, x), rel_norm(&t, y)));
                assert_eq!(
                    rel_trace(&t, t.add(x, y)),
                    t.add(rel_trace(&t, x), rel_trace(&t, y))
                );
            }
        }
    }

    #[test]
    fn trace_on_the_base_is_multiplication_by_n() {
        for (p, r, n) in [(2, 2, 3), (2, 2, 2), (3, 1, 3), (3, 2, 2), (5, 1, 2), (7, 1, 3)] {
            let t = tower(p, r, n).unwrap();
            let base = t.base().clone();
            let n_elem = t.scalar(n as i64);
            for a in base.elements() {
                assert_eq!(rel_trace(&t, a), t.mul(n_elem, a));
            }
            let base_in_kernel = base.elements().all(|a| rel_trace(&t, a).is_zero());
            assert_eq!(base_in_kernel, (n as u64).is_multiple_of(p));
        }
    }

    #[test]
    fn base_lies_in_kernel_when_p_divides_n() {
        let t = tower(2, 2, 2).unwrap();
        let kernel = trace_kernel(&t);
        for a in 0..4 {
            assert!(kernel.contains(&Elem(a)));
        }
    }

    #[test]
    fn ppoly_evaluation() {
        let t = tower(2, 2, 3).unwrap();
        let sq = PPoly::frobenius_power(&t, 1);
        for x in t.elements() {
            assert_eq!(sq.eval(&*t, x), t.mul(x, x));
        }
        let l = PPoly::new(&t, [(1, Elem::ONE), (0, Elem(2))]).unwrap();
        assert_eq!(l.eval(&*t, Elem::ZERO), Elem::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (x, y) = (Elem(rng.gen_range(0..64)), Elem(rng.gen_range(0..64)));
            assert_eq!(l.eval(&*t, t.add(x, y)), t.add(l.eval(&*t, x), l.eval(&*t, y)));
        }
        // commutes with the trace since the coefficients are in F_q
        for x in t.elements() {
            assert_eq!(rel_trace(&t, l.eval(&*t, x)), l.eval(&*t, rel_trace(&t, x)));
        }
        assert_eq!(l.to_string(), "L=[(0,2),(1,1)]");
        let parsed: PPolyTerms = "L=[(0,2),(1,1)]".parse().unwrap();
        assert_eq!(parsed.build(&t).unwrap(), l);
    }

    #[test]
    fn ppoly_validation() {
        let t = tower(2, 2, 3).unwrap();
        assert!(PPoly::new(&t, [(6, Elem::ONE)]).is_err());
        assert!(PPoly::new(&t, [(0, Elem(4))]).is_err());
        assert!(PPoly::new(&t, [(0, Elem(1)), (0, Elem(1))]).is_err());
        assert_eq!(PPoly::frobenius_power(&t, 7), PPoly::frobenius_power(&t, 1));
    }

    #[test]
    fn quotient_times_x() {
        let t = tower(3, 1, 2).unwrap();
        let l = PPoly::frobenius_power(&t, 1);
        assert_eq!(l.quotient(3), Poly::from_codes(&[0, 0, 1]));
        let l = PPoly::new(&t, [(0, Elem(2))]).unwrap();
        assert_eq!(l.quotient(3), Poly::constant(Elem(2)));

        let t = tower(2, 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let terms: Vec<(u32, Elem)> = (0..6).map(|i| (i, Elem(rng.gen_range(0..4)))).collect();
            let Ok(l) = PPoly::new(&t, terms) else { continue };
            assert_eq!(l.quotient(2).shift(1), l.to_poly(2));
        }
    }

    #[test]
    fn kernel_permutation() {
        let t = tower(2, 2, 2).unwrap();
        let id = PPoly::new(&t, [(0, Elem::ONE)]).unwrap();
        assert!(ppoly_permutes_kernel(&t, &id, Elem::ZERO).unwrap());
        // x^2 + x sends both 0 and 1 to 0
        let sq = PPoly::frobenius_power(&t, 1);
        assert!(!ppoly_permutes_kernel(&t, &sq, Elem::ONE).unwrap());

        let t = tower(2, 2, 3).unwrap();
        let sq = PPoly::frobenius_power(&t, 1);
        for c in 1..4 {
            assert!(ppoly_permutes_kernel(&t, &sq, Elem(c)).unwrap());
        }
        // a shift outside F_q moves kernel elements off the kernel
        assert!(matches!(
            ppoly_permutes_kernel(&t, &sq, Elem(5)),
            Err(Error::MapEscapesKernel { .. })
        ));
    }

    #[test]
    fn criterion_cases() {
        let t3 = tower(2, 2, 3).unwrap();
        let v = binomial_kernel_criterion(1, Elem(2), &t3).unwrap();
        assert_eq!((v.case, v.predicted), (KernelCase::Case1, Some(true)));
        let v = binomial_kernel_criterion(1, Elem::ZERO, &t3).unwrap();
        assert_eq!((v.case, v.predicted), (KernelCase::Case2, Some(true)));
        assert!(v.note.is_some());

        let t2 = tower(2, 2, 2).unwrap();
        let v = binomial_kernel_criterion(1, Elem::ONE, &t2).unwrap();
        assert_eq!((v.case, v.predicted), (KernelCase::NoCaseApplies, None));
        assert!(binomial_kernel_criterion(2, Elem::ONE, &t2).is_err());
        assert!(binomial_kernel_criterion(1, Elem(7), &t3).is_err());
    }
}
