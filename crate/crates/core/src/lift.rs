//! Builders for complete permutation polynomials of `F_{q^n}` lifted from
//! subfield polynomials through the norm or the trace.
//!
//! Each builder validates its hypotheses, keeps the lifted map in structured
//! form for fast evaluation (the dense polynomial is expanded on demand), and
//! predicts the lifted CPP status from an exhaustive test of the subfield
//! witness.

use serde::Serialize;
use serde_json::{json, Value};
use std::sync::{Arc, OnceLock};

use crate::arith::{gcd, mod_inverse};
use crate::desc::{FieldDesc, TowerDesc};
use crate::error::{precondition, Error, Result};
use crate::field::{Elem, FiniteField};
use crate::maps::{norm_table, ppoly_permutes_kernel, rel_trace, trace_table, PPoly};
use crate::perm::{is_bijective, is_cpp, table_is_cpp, ExhaustiveCap};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    NormLift,
    Monomial,
    Cppeg,
    TraceSimple,
    TraceGeneral,
    TraceBinomial,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::NormLift => "norm-lift",
            Construction::Monomial => "monomial",
            Construction::Cppeg => "cppeg",
            Construction::TraceSimple => "trace-simple",
            Construction::TraceGeneral => "trace-general",
            Construction::TraceBinomial => "trace-binomial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

impl Check {
    fn new(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            holds,
        }
    }
}

/// The lifted map in structured form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `x h(nor(x))`
    Norm { h: Poly },
    /// `alpha x^exponent`
    Monomial { alpha: Elem, exponent: u64 },
    /// `x h(tr(x))`
    Trace { h: Poly },
    /// `x (h(tr(x)) + a A(tr(x)) - a A(x))` with `A = L/x`
    TraceGeneral { h: Poly, l: PPoly, a: Elem },
}

impl Shape {
    /// Value table over the tower, using cached trace/norm tables.
    pub fn table(&self, tower: &TowerDesc) -> Vec<Elem> {
        let base = &**tower.base();
        match self {
            Shape::Norm { h } => {
                let hv = h.table(base);
                let nor = norm_table(tower);
                tower
                    .elements()
                    .map(|x| tower.mul(x, hv[nor[x.0 as usize].0 as usize]))
                    .collect()
            }
            Shape::Trace { h } => {
                let hv = h.table(base);
                let tr = trace_table(tower);
                tower
                    .elements()
                    .map(|x| tower.mul(x, hv[tr[x.0 as usize].0 as usize]))
                    .collect()
            }
            Shape::Monomial { alpha, exponent } => {
                let t = tower.tables();
                let m = tower.order() as u64 - 1;
                let e = exponent % m;
                let la = t.log(alpha.0);
                tower
                    .elements()
                    .map(|x| match (la, t.log(x.0)) {
                        (Some(la), Some(lx)) if *exponent > 0 => {
                            Elem(t.exp(((la as u64 + lx as u64 * e) % m) as u32))
                        }
                        _ => tower.mul(*alpha, tower.pow(x, *exponent)),
                    })
                    .collect()
            }
            Shape::TraceGeneral { h, l, a } => {
                // x H(x) = x (h(s) + a A(s)) - a L(x) with s = tr(x)
                let quotient = l.quotient(tower.p());
                let g: Vec<Elem> = base
                    .elements()
                    .map(|s| base.add(h.eval(base, s), base.mul(*a, quotient.eval(base, s))))
                    .collect();
                let tr = trace_table(tower);
                tower
                    .elements()
                    .map(|x| {
                        let lead = tower.mul(x, g[tr[x.0 as usize].0 as usize]);
                        tower.sub(lead, tower.mul(*a, l.eval(tower, x)))
                    })
                    .collect()
            }
        }
    }

    /// Dense expansion; no exponent reduction is applied.
    pub fn expand(&self, tower: &TowerDesc) -> Poly {
        match self {
            Shape::Norm { h } => h.inflate(tower.norm_exponent() as usize).shift(1),
            Shape::Monomial { alpha, exponent } => Poly::monomial(*alpha, *exponent as usize),
            Shape::Trace { h } => substitute_trace(tower, h).shift(1),
            Shape::TraceGeneral { h, l, a } => {
                let quotient = l.quotient(tower.p());
                let big_h = substitute_trace(tower, h)
                    .add(tower, &substitute_trace(tower, &quotient).scale(tower, *a))
                    .sub(tower, &quotient.scale(tower, *a));
                big_h.shift(1)
            }
        }
    }
}

/// The trace polynomial `sum_{i<n} x^(q^i)` raised to `e`, expanded through
/// the base-`p` digits of `e`: `T^(p^j)` is again an `n`-term polynomial.
pub fn trace_poly_pow(tower: &TowerDesc, e: u64) -> Poly {
    let p = tower.p() as u64;
    let q = tower.q() as u64;
    let mut acc = Poly::constant(Elem::ONE);
    let mut rest = e;
    let mut pj = 1u64;
    while rest > 0 {
        let digit = rest % p;
        if digit > 0 {
            let mut frob = Poly::zero();
            let mut qi = 1u64;
            for _ in 0..tower.n() {
                frob = frob.add(tower, &Poly::monomial(Elem::ONE, (qi * pj) as usize));
                qi *= q;
            }
            for _ in 0..digit {
                acc = acc.mul(tower, &frob);
            }
        }
        rest /= p;
        pj *= p;
    }
    acc
}

/// `h(T(x))` with `T` the trace polynomial.
pub fn substitute_trace(tower: &TowerDesc, h: &Poly) -> Poly {
    h.terms().fold(Poly::zero(), |acc, (j, c)| {
        acc.add(tower, &trace_poly_pow(tower, j as u64).scale(tower, c))
    })
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub construction: Construction,
    pub params: Value,
    pub tower: Arc<TowerDesc>,
    pub preconditions: Vec<Check>,
    pub identities: Vec<Check>,
    pub shape: Shape,
    lifted: OnceLock<Poly>,
    pub subfield_witness: Poly,
    pub predicted_cpp: Option<bool>,
}

impl LiftResult {
    /// Dense expansion of the lifted polynomial, computed on first use.
    pub fn lifted(&self) -> &Poly {
        self.lifted.get_or_init(|| self.shape.expand(&self.tower))
    }

    /// Exhaustive CPP status of the lifted map on the tower.
    pub fn verify(&self, cap: ExhaustiveCap) -> Result<bool> {
        cap.check(self.tower.order())?;
        Ok(table_is_cpp(&*self.tower, &self.shape.table(&self.tower)))
    }

    /// Same, through Horner evaluation of the dense expansion.
    pub fn verify_dense(&self, cap: ExhaustiveCap) -> Result<bool> {
        is_cpp(&*self.tower, self.lifted(), cap)
    }

    pub fn report(&self, verified_cpp: Option<bool>) -> Value {
        json!({
            "construction": self.construction,
            "field": self.tower.to_string(),
            "params": self.params,
            "preconditions": self.preconditions,
            "identities": self.identities,
            "subfield_witness": sparse_terms(&self.subfield_witness),
            "lifted": sparse_terms(self.lifted()),
            "predicted_cpp": self.predicted_cpp,
            "verified_cpp": verified_cpp,
        })
    }
}

/// `[[exponent, coefficient], ...]` over the nonzero terms.
pub fn sparse_terms(p: &Poly) -> Value {
    Value::Array(p.terms().map(|(e, c)| json!([e, c])).collect())
}

fn require(checks: &[Check]) -> Result<()> {
    match checks.iter().find(|c| !c.holds) {
        Some(c) => Err(Error::PreconditionViolated(c.name.clone())),
        None => Ok(()),
    }
}

fn require_base_poly(base: &FieldDesc, h: &Poly, name: &str) -> Result<()> {
    if h.coeffs().iter().any(|c| c.0 >= base.q()) {
        return Err(precondition(format!("{name} has coefficients outside F_{}", base.q())));
    }
    Ok(())
}

fn require_base_elem(tower: &TowerDesc, a: Elem, name: &str) -> Result<()> {
    if !tower.in_base(a) {
        return Err(precondition(format!("{name} = {a} is not in F_{}", tower.q())));
    }
    Ok(())
}

fn coprime_n_q1(tower: &TowerDesc) -> Check {
    Check::new(
        "gcd(n, q - 1) = 1",
        gcd(tower.n() as u64, tower.q() as u64 - 1) == 1,
    )
}

/// `x * h(x)` over the base field.
fn x_times(h: &Poly) -> Poly {
    h.shift(1)
}

/// Whether `x^exp_r h(x^((q^n-1)/(q-1)))` permutes `F_{q^n}`, decided on the
/// subfield: `gcd(exp_r, (q^n-1)/(q-1)) = 1` and `x^(exp_r n') h(x)` permutes
/// `F_q`, `n n' = 1 mod (q-1)`. The equivalent form `x^exp_r h(x^n)` is
/// evaluated as well and must agree.
pub fn zieve_permutation_criterion(
    exp_r: u64,
    h: &Poly,
    tower: &TowerDesc,
    cap: ExhaustiveCap,
) -> Result<bool> {
    let base = &**tower.base();
    require(&[coprime_n_q1(tower), Check::new("h != 0", !h.is_zero())])?;
    require_base_poly(base, h, "h")?;
    cap.check(base.q())?;
    let q1 = base.q() as u64 - 1;
    let n = tower.n() as u64;
    let n_inv = mod_inverse(n % q1.max(1), q1.max(1)).expect("n is a unit mod q - 1");
    let cond1 = gcd(exp_r, tower.norm_exponent()) == 1;

    let g = h.shift((exp_r * n_inv) as usize);
    let g_tilde = h.inflate(n as usize).shift(exp_r as usize);
    let cond2 = is_bijective(&g.table(base));
    let cond2_tilde = is_bijective(&g_tilde.table(base));
    assert_eq!(
        cond2, cond2_tilde,
        "x^(r n') h(x) and x^r h(x^n) must agree on F_q"
    );
    Ok(cond1 && cond2)
}

/// `x h(nor(x))`, CPP of `F_{q^n}` iff `x h(x^n)` is one of `F_q`.
pub fn norm_lift(h: &Poly, tower: &Arc<TowerDesc>, cap: ExhaustiveCap) -> Result<LiftResult> {
    let base = &**tower.base();
    let pre = vec![coprime_n_q1(tower)];
    require(&pre)?;
    require_base_poly(base, h, "h")?;
    let witness = x_times(&h.inflate(tower.n() as usize));
    let predicted = is_cpp(base, &witness, cap)?;
    let shape = Shape::Norm { h: h.clone() };
    Ok(LiftResult {
        construction: Construction::NormLift,
        params: json!({ "h": h }),
        tower: tower.clone(),
        preconditions: pre,
        identities: Vec::new(),
        lifted: OnceLock::new(),
        shape,
        subfield_witness: witness,
        predicted_cpp: Some(predicted),
    })
}

/// `alpha x^(1 + s (q^n-1)/(q-1))` against `alpha x^(1 + n s)`.
pub fn monomial_cpp_check(
    alpha: Elem,
    s: u64,
    tower: &Arc<TowerDesc>,
    cap: ExhaustiveCap,
) -> Result<LiftResult> {
    let base = &**tower.base();
    require_base_elem(tower, alpha, "alpha")?;
    let pre = vec![coprime_n_q1(tower), Check::new("alpha != 0", !alpha.is_zero())];
    require(&pre)?;
    let exponent = 1 + s * tower.norm_exponent();
    let witness = Poly::monomial(alpha, (1 + tower.n() as u64 * s) as usize);
    let predicted = is_cpp(base, &witness, cap)?;
    let shape = Shape::Monomial { alpha, exponent };
    Ok(LiftResult {
        construction: Construction::Monomial,
        params: json!({ "alpha": alpha, "s": s, "exponent": exponent }),
        tower: tower.clone(),
        preconditions: pre,
        identities: Vec::new(),
        lifted: OnceLock::new(),
        shape,
        subfield_witness: witness,
        predicted_cpp: Some(predicted),
    })
}

/// Whether `alpha` lies in `{y^m : y in F_q}`.
pub fn is_power_in(field: &FieldDesc, alpha: Elem, m: u64) -> bool {
    if alpha.is_zero() {
        return true;
    }
    let q1 = field.q() as u64 - 1;
    field.pow(alpha, q1 / gcd(m, q1)) == Elem::ONE
}

/// `alpha x^(1 + (r^k - 1)(q + 1) q / 2)` over `F_{q^2}`, `q = r^t = 2^(e t)`,
/// on the canonical tower.
pub fn cppeg_construct(e: u32, t: u32, k: u32, alpha: Elem, cap: ExhaustiveCap) -> Result<LiftResult> {
    cppeg_construct_in(&cppeg_tower(e, t)?, e, t, k, alpha, cap)
}

/// The canonical quadratic tower over `F_(2^(e t))`.
pub fn cppeg_tower(e: u32, t: u32) -> Result<Arc<TowerDesc>> {
    if e == 0 || t == 0 {
        return Err(precondition("e and t must be positive"));
    }
    let base = Arc::new(FieldDesc::extension(2, e * t, None)?);
    Ok(Arc::new(TowerDesc::new(base, 2, None)?))
}

/// As [`cppeg_construct`] on a caller-supplied quadratic tower over `F_(2^(e t))`.
pub fn cppeg_construct_in(
    tower: &Arc<TowerDesc>,
    e: u32,
    t: u32,
    k: u32,
    alpha: Elem,
    cap: ExhaustiveCap,
) -> Result<LiftResult> {
    if e == 0 || t == 0 || k == 0 {
        return Err(precondition("e, t and k must be positive"));
    }
    if tower.p() != 2 || tower.r() != e * t || tower.n() != 2 {
        return Err(precondition(format!(
            "tower must be F_(q^2) with q = 2^{}",
            e * t
        )));
    }
    let base = tower.base().clone();
    require_base_elem(tower, alpha, "alpha")?;
    let q = base.q() as u64;
    let rk = 1u64 << (e * k);
    let pre = vec![
        Check::new("k < t", k < t),
        Check::new(
            "gcd(k, t) != 1 when e = 1",
            e != 1 || gcd(k as u64, t as u64) != 1,
        ),
        Check::new("alpha != 0", !alpha.is_zero()),
        Check::new(
            "alpha not in (F_q)^(r^k - 1)",
            !is_power_in(&base, alpha, rk - 1),
        ),
    ];
    require(&pre)?;
    let exponent = 1 + (rk - 1) * (q + 1) * q / 2;
    // monomial reduction with n = 2, s = (r^k - 1) q / 2
    let s = (rk - 1) * q / 2;
    let reduced = Poly::monomial(alpha, (1 + 2 * s) as usize);
    let witness = Poly::monomial(alpha, rk as usize);
    let identities = vec![
        Check::new("gcd(1 + 2s, q - 1) = 1", gcd(1 + 2 * s, q - 1) == 1),
        Check::new(
            "alpha x^(1+2s) = alpha x^(r^k) on F_q",
            reduced.table(&*base) == witness.table(&*base),
        ),
    ];
    let predicted = is_cpp(&*base, &witness, cap)?;
    let shape = Shape::Monomial { alpha, exponent };
    Ok(LiftResult {
        construction: Construction::Cppeg,
        params: json!({ "e": e, "t": t, "k": k, "alpha": alpha, "q": q, "exponent": exponent }),
        lifted: OnceLock::new(),
        tower: tower.clone(),
        preconditions: pre,
        identities,
        shape,
        subfield_witness: witness,
        predicted_cpp: Some(predicted),
    })
}

/// `x h(tr(x))` for `h(0) != 0, -1`, against `x h(x)`.
pub fn trace_lift_simple(h: &Poly, tower: &Arc<TowerDesc>, cap: ExhaustiveCap) -> Result<LiftResult> {
    let base = &**tower.base();
    require_base_poly(base, h, "h")?;
    let h0 = h.coeff(0);
    let pre = vec![
        Check::new("h(0) != 0", !h0.is_zero()),
        Check::new("h(0) != -1", h0 != base.minus_one()),
    ];
    require(&pre)?;
    let witness = x_times(h);
    let predicted = is_cpp(base, &witness, cap)?;
    let shape = Shape::Trace { h: h.clone() };
    Ok(LiftResult {
        construction: Construction::TraceSimple,
        params: json!({ "h": h }),
        tower: tower.clone(),
        preconditions: pre,
        identities: Vec::new(),
        lifted: OnceLock::new(),
        shape,
        subfield_witness: witness,
        predicted_cpp: Some(predicted),
    })
}

/// `tr(x H(x)) = tr(x) h(tr(x))` for all `x`, with `H` evaluated from its
/// definition `h(tr(x)) + a A(tr(x)) - a A(x)`.
pub fn trace_identity_holds(h: &Poly, l: &PPoly, a: Elem, tower: &TowerDesc) -> bool {
    let quotient = l.quotient(tower.p());
    tower.elements().all(|x| {
        let t = rel_trace(tower, x);
        let big_h = tower.sub(
            tower.add(h.eval(tower, t), tower.mul(a, quotient.eval(tower, t))),
            tower.mul(a, quotient.eval(tower, x)),
        );
        let lhs = rel_trace(tower, tower.mul(x, big_h));
        let rhs = tower.mul(t, h.eval(tower, t));
        lhs == rhs
    })
}

/// Whether the p-polynomial `L` satisfies the narrow form with every
/// `a_i != 0` for `0 <= i < r` and no higher indices.
pub fn strict_form(l: &PPoly, tower: &TowerDesc) -> bool {
    let r = tower.r();
    let idx: Vec<u32> = l.terms().map(|(i, _)| i).collect();
    idx == (0..r).collect::<Vec<_>>()
}

/// `x H(x)` with `H(x) = h(tr(x)) + a A(tr(x)) - a A(x)`, `A = L/x`, valid when
/// for every `b` in `F_q` both `L(x) - (h(b)/a + A(b)) x` and
/// `L(x) - ((h(b)+1)/a + A(b)) x` permute `ker(tr)`.
pub fn trace_lift_general(
    h: &Poly,
    l: &PPoly,
    a: Elem,
    tower: &Arc<TowerDesc>,
    cap: ExhaustiveCap,
) -> Result<LiftResult> {
    let base = &**tower.base();
    require_base_poly(base, h, "h")?;
    require_base_elem(tower, a, "a")?;
    let pre = vec![Check::new("a != 0", !a.is_zero())];
    require(&pre)?;
    cap.check(tower.order())?;
    let quotient = l.quotient(tower.p());
    let a_inv = base.inv(a)?;
    for b in base.elements() {
        let hb = h.eval(base, b);
        let ab = quotient.eval(base, b);
        let shifts = [
            ("h(b)/a + A(b)", base.add(base.mul(hb, a_inv), ab)),
            (
                "(h(b)+1)/a + A(b)",
                base.add(base.mul(base.add(hb, Elem::ONE), a_inv), ab),
            ),
        ];
        for (which, theta) in shifts {
            if !ppoly_permutes_kernel(tower, l, theta)? {
                return Err(Error::HypothesisFails { b: b.0, which });
            }
        }
    }
    build_trace_general(Construction::TraceGeneral, h, l, a, tower, pre, json!({}), cap)
}

#[allow(clippy::too_many_arguments)]
fn build_trace_general(
    construction: Construction,
    h: &Poly,
    l: &PPoly,
    a: Elem,
    tower: &Arc<TowerDesc>,
    preconditions: Vec<Check>,
    extra: Value,
    cap: ExhaustiveCap,
) -> Result<LiftResult> {
    let base = &**tower.base();
    let witness = x_times(h);
    let predicted = is_cpp(base, &witness, cap)?;
    let identities = vec![Check::new(
        "tr(x H(x)) = tr(x) h(tr(x))",
        trace_identity_holds(h, l, a, tower),
    )];
    let mut params = json!({
        "h": h,
        "L": l.to_string(),
        "a": a,
        "l_strict_form": strict_form(l, tower),
    });
    if let (Value::Object(p), Value::Object(x)) = (&mut params, extra) {
        p.extend(x);
    }
    let shape = Shape::TraceGeneral {
        h: h.clone(),
        l: l.clone(),
        a,
    };
    Ok(LiftResult {
        construction,
        params,
        tower: tower.clone(),
        preconditions,
        identities,
        lifted: OnceLock::new(),
        shape,
        subfield_witness: witness,
        predicted_cpp: Some(predicted),
    })
}

/// `x (h(tr(x)) + a tr(x)^(p^k - 1) - a x^(p^k - 1))`, the general trace lift
/// with `L = x^(p^k)`.
pub fn trace_lift_binomial(
    h: &Poly,
    k: u64,
    a: Elem,
    tower: &Arc<TowerDesc>,
    cap: ExhaustiveCap,
) -> Result<LiftResult> {
    let base = &**tower.base();
    require_base_poly(base, h, "h")?;
    require_base_elem(tower, a, "a")?;
    let p = tower.p() as u64;
    let n = tower.n() as u64;
    let span = (tower.r() * tower.n()) as u64;
    let d = gcd(k, tower.r() as u64) as u32;
    let pre = vec![
        Check::new("k >= 1", k >= 1),
        Check::new("gcd(k, n) = 1", gcd(k, n) == 1),
        Check::new("p does not divide n", !n.is_multiple_of(p)),
        Check::new("gcd(n, p^gcd(k,r) - 1) = 1", gcd(n, p.pow(d) - 1) == 1),
        Check::new("a != 0", !a.is_zero()),
        Check::new("k is not a multiple of r n", !k.is_multiple_of(span)),
    ];
    require(&pre)?;
    let l = PPoly::frobenius_power(tower, k);
    build_trace_general(
        Construction::TraceBinomial,
        h,
        &l,
        a,
        tower,
        pre,
        json!({ "k": k }),
        cap,
    )
}
