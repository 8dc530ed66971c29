//! Complete mappings of small fields, their interpolants, and the `x h(x^n)`
//! rewriting consumed by the norm lift.

use serde::Serialize;

use crate::arith::{gcd, mod_inverse};
use crate::desc::FieldDesc;
use crate::error::{precondition, Error, Result};
use crate::field::{Elem, FiniteField};
use crate::perm::{is_cpp, ExhaustiveCap};
use crate::poly::Poly;

/// Default largest `q` for permutation enumeration.
pub const DEFAULT_SEARCH_CAP: u64 = 11;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompleteMapping {
    pub field: String,
    /// `table[i] = f(decode(i))`
    pub table: Vec<Elem>,
    #[serde(rename = "poly_coeffs")]
    pub poly: Poly,
    /// Interpolant is monic with zero constant term.
    pub normalized: bool,
}

/// Interpolation through distinct nodes: `sum y_i Z(x) / ((x - x_i) Z'(x_i))`
/// with `Z = prod (x - x_i)`.
pub fn interpolate<F: FiniteField + ?Sized>(field: &F, points: &[(Elem, Elem)]) -> Result<Poly> {
    let mut z = Poly::constant(Elem::ONE);
    for &(xi, _) in points {
        z = z.mul(field, &Poly::new(vec![field.neg(xi), Elem::ONE]));
    }
    let mut acc = vec![Elem::ZERO; points.len()];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        // synthetic division of z by (x - xi)
        let zc = z.coeffs();
        let mut basis = vec![Elem::ZERO; points.len()];
        let mut carry = Elem::ZERO;
        for j in (1..zc.len()).rev() {
            carry = field.add(zc[j], field.mul(carry, xi));
            basis[j - 1] = carry;
        }
        let denom = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Elem::ONE, |d, (_, &(xj, _))| field.mul(d, field.sub(xi, xj)));
        let scale = field.div(yi, denom)?;
        for (a, b) in acc.iter_mut().zip(basis) {
            *a = field.add(*a, field.mul(b, scale));
        }
    }
    Ok(Poly::new(acc))
}

/// The unique polynomial of degree `< q` with the given value table.
pub fn lagrange_interpolate<F: FiniteField + ?Sized>(field: &F, table: &[Elem]) -> Result<Poly> {
    let q = field.order() as usize;
    if table.len() != q {
        return Err(Error::BadTableLength {
            expected: q,
            got: table.len(),
        });
    }
    let points: Vec<(Elem, Elem)> = field.elements().zip(table.iter().copied()).collect();
    interpolate(field, &points)
}

fn is_normalized(poly: &Poly) -> bool {
    poly.is_monic() && poly.coeff(0).is_zero()
}

/// All complete mappings in lexicographic order of their value tables, by
/// depth-first assignment with pruning on both `f` and `f + x`. With
/// `normalized_only`, `f(0) = 0` is fixed.
pub fn enumerate_complete_mappings(
    field: &FieldDesc,
    normalized_only: bool,
    search_cap: u64,
) -> Result<Vec<CompleteMapping>> {
    let q = field.q() as usize;
    if q as u64 > search_cap {
        return Err(Error::SearchCapExceeded {
            q: q as u64,
            cap: search_cap,
        });
    }
    let mut out = Vec::new();
    let mut table = vec![Elem::ZERO; q];
    let mut used = vec![false; q];
    let mut used_sum = vec![false; q];
    let mut tables = Vec::new();
    let start = if normalized_only {
        used[0] = true;
        used_sum[0] = true;
        1
    } else {
        0
    };
    assign(field, start, &mut table, &mut used, &mut used_sum, &mut tables);
    for t in tables {
        out.push(complete_mapping(field, t)?);
    }
    Ok(out)
}

fn assign(
    field: &FieldDesc,
    x: usize,
    table: &mut [Elem],
    used: &mut [bool],
    used_sum: &mut [bool],
    out: &mut Vec<Vec<Elem>>,
) {
    let q = table.len();
    if x == q {
        out.push(table.to_vec());
        return;
    }
    for y in 0..q {
        if used[y] {
            continue;
        }
        let s = field.add(Elem(y as u32), Elem(x as u32)).0 as usize;
        if used_sum[s] {
            continue;
        }
        used[y] = true;
        used_sum[s] = true;
        table[x] = Elem(y as u32);
        assign(field, x + 1, table, used, used_sum, out);
        used[y] = false;
        used_sum[s] = false;
    }
}

fn complete_mapping(field: &FieldDesc, table: Vec<Elem>) -> Result<CompleteMapping> {
    let poly = lagrange_interpolate(field, &table)?;
    Ok(CompleteMapping {
        field: field.to_string(),
        normalized: is_normalized(&poly),
        table,
        poly,
    })
}

/// Second enumeration route: every permutation in lexicographic order, kept
/// when its interpolant passes the exhaustive CPP test.
pub fn enumerate_by_interpolation(
    field: &FieldDesc,
    normalized_only: bool,
    search_cap: u64,
) -> Result<Vec<CompleteMapping>> {
    let q = field.q() as usize;
    if q as u64 > search_cap {
        return Err(Error::SearchCapExceeded {
            q: q as u64,
            cap: search_cap,
        });
    }
    let mut perm: Vec<u32> = (0..q as u32).collect();
    let fixed = usize::from(normalized_only);
    let mut out = Vec::new();
    loop {
        let table: Vec<Elem> = perm.iter().copied().map(Elem).collect();
        let poly = lagrange_interpolate(field, &table)?;
        if is_cpp(field, &poly, ExhaustiveCap(q as u64))? {
            out.push(CompleteMapping {
                field: field.to_string(),
                normalized: is_normalized(&poly),
                table,
                poly,
            });
        }
        if !next_permutation(&mut perm[fixed..]) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Reduces exponents so the polynomial induces the same map with every
/// exponent in `1..=q-1` (plus a constant term).
pub fn reduce_exponents<F: FiniteField + ?Sized>(field: &F, f: &Poly) -> Poly {
    let q1 = field.order() as usize - 1;
    let mut coeffs = vec![Elem::ZERO; q1 + 1];
    for (m, c) in f.terms() {
        let e = if m == 0 { 0 } else { (m - 1) % q1 + 1 };
        coeffs[e] = field.add(coeffs[e], c);
    }
    Poly::new(coeffs)
}

/// `h` with `x h(x^n) = f` as maps on `F_q`, for `f(0) = 0` and
/// `gcd(n, q - 1) = 1`: a term `c x^m` of the reduced `f` contributes
/// `c x^((m-1) n' mod (q-1))`, `n n' = 1 mod (q-1)`.
pub fn to_h_form(field: &FieldDesc, f: &Poly, n: u64) -> Result<Poly> {
    let q1 = field.q() as u64 - 1;
    if n == 0 || gcd(n, q1) != 1 {
        return Err(precondition(format!("gcd(n, q - 1) = gcd({n}, {q1}) must be 1")));
    }
    if !f.eval(field, Elem::ZERO).is_zero() {
        return Err(precondition("f(0) must be 0"));
    }
    let n_inv = mod_inverse(n % q1.max(1), q1.max(1)).expect("unit");
    let reduced = reduce_exponents(field, f);
    let mut h = vec![Elem::ZERO; q1 as usize];
    for (m, c) in reduced.terms() {
        let e = ((m as u64 - 1) * n_inv % q1.max(1)) as usize;
        h[e] = field.add(h[e], c);
    }
    let h = Poly::new(h);
    let rebuilt = h.inflate(n as usize).shift(1);
    for x in field.elements() {
        if rebuilt.eval(field, x) != f.eval(field, x) {
            return Err(Error::ReconstructionMismatch { at: x.0 });
        }
    }
    Ok(h)
}
