//! Exhaustive permutation tests and the fibre-wise bijectivity criterion
//! through a commuting square over the trace or norm.

use serde::{Deserialize, Serialize};

use crate::desc::TowerDesc;
use crate::error::{Error, Result};
use crate::field::{Elem, FiniteField};
use crate::maps::{norm_table, trace_table};
use crate::poly::Poly;

/// Largest field order an exhaustive routine will scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveCap(pub u64);

impl ExhaustiveCap {
    pub const DEFAULT: ExhaustiveCap = ExhaustiveCap(1 << 16);

    pub fn check(self, order: u32) -> Result<()> {
        if order as u64 > self.0 {
            Err(Error::OrderCapExceeded {
                order: order as u64,
                cap: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for ExhaustiveCap {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermVerdict {
    pub is_permutation: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<(Elem, Elem)>,
}

pub fn eval_poly<F: FiniteField + ?Sized>(field: &F, f: &Poly, x: Elem) -> Elem {
    f.eval(field, x)
}

/// Verdict for a value table. On failure the witness is the collision
/// `(x1, x2)`, `x1 < x2`, that is smallest in lexicographic order.
pub fn table_verdict(table: &[Elem]) -> PermVerdict {
    if is_bijective(table) {
        return PermVerdict {
            is_permutation: true,
            witness: None,
        };
    }
    const NONE: u32 = u32::MAX;
    let mut first = vec![NONE; table.len()];
    let mut best: Option<(Elem, Elem)> = None;
    for (x, &y) in table.iter().enumerate() {
        let slot = &mut first[y.0 as usize];
        if *slot == NONE {
            *slot = x as u32;
        } else if best.is_none_or(|(b1, _)| *slot < b1.0) {
            // second preimage of a value whose first preimage beats the current best
            best = Some((Elem(*slot), Elem(x as u32)));
        }
    }
    PermVerdict {
        is_permutation: false,
        witness: best,
    }
}

/// Bijectivity of a value table on `0..table.len()`, stopping at the first repeat.
pub fn is_bijective(table: &[Elem]) -> bool {
    let mut seen = vec![0u64; table.len().div_ceil(64)];
    for &y in table {
        let (w, b) = ((y.0 / 64) as usize, y.0 % 64);
        if seen[w] >> b & 1 == 1 {
            return false;
        }
        seen[w] |= 1 << b;
    }
    true
}

/// Bijectivity of `x -> table[x] + x`.
pub fn shifted_is_bijective<F: FiniteField + ?Sized>(field: &F, table: &[Elem]) -> bool {
    let mut seen = vec![0u64; table.len().div_ceil(64)];
    for (x, &y) in table.iter().enumerate() {
        let v = field.add(y, Elem(x as u32)).0;
        let (w, b) = ((v / 64) as usize, v % 64);
        if seen[w] >> b & 1 == 1 {
            return false;
        }
        seen[w] |= 1 << b;
    }
    true
}

/// Complete-mapping status of a value table.
pub fn table_is_cpp<F: FiniteField + ?Sized>(field: &F, table: &[Elem]) -> bool {
    is_bijective(table) && shifted_is_bijective(field, table)
}

pub fn is_permutation<F: FiniteField + ?Sized>(
    field: &F,
    f: &Poly,
    cap: ExhaustiveCap,
) -> Result<PermVerdict> {
    cap.check(field.order())?;
    Ok(table_verdict(&f.table(field)))
}

/// Verdicts for `f` and for `f + x`; `f` is complete iff both hold.
pub fn is_complete_permutation<F: FiniteField + ?Sized>(
    field: &F,
    f: &Poly,
    cap: ExhaustiveCap,
) -> Result<(PermVerdict, PermVerdict)> {
    cap.check(field.order())?;
    let table = f.table(field);
    let shifted: Vec<Elem> = table
        .iter()
        .enumerate()
        .map(|(x, &y)| field.add(y, Elem(x as u32)))
        .collect();
    Ok((table_verdict(&table), table_verdict(&shifted)))
}

pub fn is_cpp<F: FiniteField + ?Sized>(field: &F, f: &Poly, cap: ExhaustiveCap) -> Result<bool> {
    cap.check(field.order())?;
    Ok(table_is_cpp(field, &f.table(field)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaKind {
    Trace,
    Norm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgwReport {
    pub square_commutes: bool,
    pub lambda_surjective: bool,
    pub lambdabar_surjective: bool,
    pub h_bijective: bool,
    pub fibers_injective: bool,
    pub conclusion: bool,
    pub cross_check: bool,
}

impl AgwReport {
    /// Whether the equivalence is licensed: commuting square, both maps onto.
    pub fn applies(&self) -> bool {
        self.square_commutes && self.lambda_surjective && self.lambdabar_surjective
    }
}

/// `lambda = lambda_bar` over a tower, with its fibres grouped once.
pub struct AgwContext<'a> {
    tower: &'a TowerDesc,
    lambda: &'a [Elem],
    surjective: bool,
    // elements grouped by lambda value; fibre s is members[starts[s]..starts[s+1]]
    starts: Vec<usize>,
    members: Vec<u32>,
}

impl<'a> AgwContext<'a> {
    pub fn new(tower: &'a TowerDesc, kind: LambdaKind, cap: ExhaustiveCap) -> Result<Self> {
        cap.check(tower.order())?;
        let lambda = match kind {
            LambdaKind::Trace => trace_table(tower),
            LambdaKind::Norm => norm_table(tower),
        };
        let q = tower.q() as usize;
        let mut counts = vec![0usize; q + 1];
        for &s in lambda {
            counts[s.0 as usize + 1] += 1;
        }
        let surjective = counts[1..].iter().all(|&c| c > 0);
        for s in 0..q {
            counts[s + 1] += counts[s];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut members = vec![0u32; lambda.len()];
        for (x, &s) in lambda.iter().enumerate() {
            members[fill[s.0 as usize]] = x as u32;
            fill[s.0 as usize] += 1;
        }
        Ok(AgwContext {
            tower,
            lambda,
            surjective,
            starts,
            members,
        })
    }

    pub fn lambda(&self) -> &[Elem] {
        self.lambda
    }

    /// Checks `f` (table over the tower) against `h` (table over the base).
    pub fn verify(&self, f: &[Elem], h: &[Elem]) -> Result<AgwReport> {
        let order = self.tower.order() as usize;
        let q = self.tower.q() as usize;
        if f.len() != order {
            return Err(Error::BadTableLength {
                expected: order,
                got: f.len(),
            });
        }
        if h.len() != q {
            return Err(Error::BadTableLength {
                expected: q,
                got: h.len(),
            });
        }
        let lam = self.lambda;
        let square_commutes = f
            .iter()
            .zip(lam)
            .all(|(&fx, &lx)| lam[fx.0 as usize] == h[lx.0 as usize]);
        let h_bijective = is_bijective(h);

        let mut stamp = vec![u32::MAX; order];
        let mut fibers_injective = true;
        'fibres: for s in 0..q {
            for &x in &self.members[self.starts[s]..self.starts[s + 1]] {
                let slot = &mut stamp[f[x as usize].0 as usize];
                if *slot == s as u32 {
                    fibers_injective = false;
                    break 'fibres;
                }
                *slot = s as u32;
            }
        }
        Ok(AgwReport {
            square_commutes,
            lambda_surjective: self.surjective,
            lambdabar_surjective: self.surjective,
            h_bijective,
            fibers_injective,
            conclusion: h_bijective && fibers_injective,
            cross_check: is_bijective(f),
        })
    }

    /// The unique `h` with `lambda(f(x)) = h(lambda(x))`, if one exists.
    pub fn induced_h(&self, f: &[Elem]) -> Option<Vec<Elem>> {
        let q = self.tower.q() as usize;
        let mut h = vec![None; q];
        for (x, &fx) in f.iter().enumerate() {
            let s = self.lambda[x].0 as usize;
            let v = self.lambda[fx.0 as usize];
            match h[s] {
                None => h[s] = Some(v),
                Some(prev) if prev != v => return None,
                Some(_) => {}
            }
        }
        h.into_iter().collect()
    }
}

/// One-shot check of `f` and `h` given as value tables.
pub fn agw_verify(
    tower: &TowerDesc,
    f: &[Elem],
    h: &[Elem],
    kind: LambdaKind,
    cap: ExhaustiveCap,
) -> Result<AgwReport> {
    AgwContext::new(tower, kind, cap)?.verify(f, h)
}

/// As [`agw_verify`] with polynomial inputs: `f` over the tower, `h` over the base.
pub fn agw_verify_poly(
    tower: &TowerDesc,
    f: &Poly,
    h: &Poly,
    kind: LambdaKind,
    cap: ExhaustiveCap,
) -> Result<AgwReport> {
    cap.check(tower.order())?;
    agw_verify(tower, &f.table(tower), &h.table(&**tower.base()), kind, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desc::{tower, FieldDesc};
    use crate::maps::rel_trace;
    use proptest::prelude::*;

    const CAP: ExhaustiveCap = ExhaustiveCap::DEFAULT;

    #[test]
    fn permutation_verdicts() {
        let f3 = FieldDesc::prime(3).unwrap();
        let sq = Poly::from_codes(&[0, 0, 1]);
        assert_eq!(eval_poly(&f3, &sq, Elem(2)), Elem(1));
        let v = is_permutation(&f3, &sq, CAP).unwrap();
        assert_eq!(v.witness, Some((Elem(1), Elem(2))));
        assert!(!v.is_permutation);
        assert!(is_permutation(&f3, &Poly::x(), CAP).unwrap().is_permutation);

        let f8 = FieldDesc::extension(2, 3, None).unwrap();
        let cube = Poly::monomial(Elem::ONE, 3);
        assert!(is_permutation(&f8, &cube, CAP).unwrap().is_permutation);
        assert_eq!(
            is_permutation(&f8, &cube, ExhaustiveCap(4)),
            Err(Error::OrderCapExceeded { order: 8, cap: 4 })
        );
    }

    #[test]
    fn complete_verdicts() {
        let f4 = FieldDesc::extension(2, 2, None).unwrap();
        let (a, b) = is_complete_permutation(&f4, &Poly::monomial(Elem(2), 1), CAP).unwrap();
        assert!(a.is_permutation && b.is_permutation);

        let f2 = FieldDesc::prime(2).unwrap();
        let (a, b) = is_complete_permutation(&f2, &Poly::x(), CAP).unwrap();
        assert!(a.is_permutation && !b.is_permutation);
        assert_eq!(b.witness, Some((Elem(0), Elem(1))));

        let f7 = FieldDesc::prime(7).unwrap();
        assert!(is_cpp(&f7, &Poly::x(), CAP).unwrap());
        assert!(!is_cpp(&f7, &Poly::monomial(Elem(6), 1), CAP).unwrap());
    }

    #[test]
    fn agw_identity_and_scaling() {
        let t = tower(2, 2, 3).unwrap();
        let f: Vec<Elem> = t.elements().collect();
        let h: Vec<Elem> = (0..4).map(Elem).collect();
        let rep = agw_verify(&t, &f, &h, LambdaKind::Trace, CAP).unwrap();
        assert!(rep.applies() && rep.h_bijective && rep.fibers_injective);
        assert!(rep.conclusion && rep.cross_check);

        // 2x over F_25 is x*h(tr x) with h constant 2; square uses s -> 2s
        let t = tower(5, 1, 2).unwrap();
        let f = Poly::monomial(Elem(2), 1);
        let h = Poly::monomial(Elem(2), 1);
        let rep = agw_verify_poly(&t, &f, &h, LambdaKind::Trace, CAP).unwrap();
        assert!(rep.applies());
        assert!(rep.conclusion && rep.cross_check);
        let ctx = AgwContext::new(&t, LambdaKind::Trace, CAP).unwrap();
        assert_eq!(ctx.induced_h(&f.table(&*t)), Some(h.table(&**t.base())));
    }

    #[test]
    fn agw_broken_fibre() {
        let t = tower(2, 2, 3).unwrap();
        let mut f: Vec<Elem> = t.elements().collect();
        let s = rel_trace(&t, Elem(5));
        let twin = t.elements().find(|&y| y != Elem(5) && rel_trace(&t, y) == s).unwrap();
        f[twin.0 as usize] = Elem(5);
        let h: Vec<Elem> = (0..4).map(Elem).collect();
        let rep = agw_verify(&t, &f, &h, LambdaKind::Trace, CAP).unwrap();
        assert!(rep.square_commutes);
        assert!(!rep.fibers_injective);
        assert!(!rep.conclusion && !rep.cross_check);
    }

    #[test]
    fn agw_square_failure_is_reported() {
        let t = tower(3, 1, 3).unwrap();
        let f: Vec<Elem> = t.elements().map(|x| t.pow(x, 2)).collect();
        let h: Vec<Elem> = (0..3).map(Elem).collect();
        let rep = agw_verify(&t, &f, &h, LambdaKind::Norm, CAP).unwrap();
        assert!(!rep.square_commutes);
        assert!(agw_verify(&t, &f[1..], &h, LambdaKind::Norm, CAP).is_err());
    }

    proptest! {
        #[test]
        fn witnesses_are_collisions(coeffs in prop::collection::vec(0u32..9, 1..7)) {
            let f9 = FieldDesc::extension(3, 2, None).unwrap();
            let f = Poly::from_codes(&coeffs);
            let v = is_permutation(&f9, &f, CAP).unwrap();
            match v.witness {
                Some((a, b)) => {
                    prop_assert!(!v.is_permutation && a < b);
                    prop_assert_eq!(f.eval(&f9, a), f.eval(&f9, b));
                }
                None => prop_assert!(v.is_permutation),
            }
        }

        #[test]
        fn cpp_verdict_splits_into_shifted_pair(coeffs in prop::collection::vec(0u32..8, 1..6)) {
            let f8 = FieldDesc::extension(2, 3, None).unwrap();
            let f = Poly::from_codes(&coeffs);
            let g = f.add(&f8, &Poly::x());
            let (a, b) = is_complete_permutation(&f8, &f, CAP).unwrap();
            let both = is_permutation(&f8, &g, CAP).unwrap().is_permutation
                && is_permutation(&f8, &g.sub(&f8, &Poly::x()), CAP).unwrap().is_permutation;
            prop_assert_eq!(a.is_permutation && b.is_permutation, both);
            prop_assert_eq!(is_cpp(&f8, &f, CAP).unwrap(), both);
        }
    }
}
