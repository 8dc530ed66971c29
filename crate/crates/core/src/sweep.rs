//! Parameter-grid sweeps that test each lift as a biconditional: the lifted
//! map is a CPP of `F_{q^n}` exactly when the subfield witness is one of
//! `F_q`. Optional fibre-wise cross-checks run on every map touched.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::arith::{gcd, is_prime, prime_power};
use crate::desc::{tower, FieldDesc, TowerDesc};
use crate::error::{Error, Result};
use crate::field::{Elem, FiniteField};
use crate::lift::{
    cppeg_construct_in, cppeg_tower, is_power_in, monomial_cpp_check, norm_lift,
    trace_identity_holds, trace_lift_binomial, trace_lift_general, trace_lift_simple, LiftResult,
};
use crate::maps::{binomial_kernel_criterion, ppoly_permutes_kernel, KernelCase, PPoly};
use crate::perm::{is_bijective, table_is_cpp, AgwContext, ExhaustiveCap, LambdaKind};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    NormLift,
    Monomial,
    Cppeg,
    TraceSimple,
    TraceGeneral,
    TraceBinomial,
    KernelBinomial,
}

impl SweepKind {
    pub const ALL: [SweepKind; 7] = [
        SweepKind::NormLift,
        SweepKind::Monomial,
        SweepKind::Cppeg,
        SweepKind::TraceSimple,
        SweepKind::TraceGeneral,
        SweepKind::TraceBinomial,
        SweepKind::KernelBinomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::NormLift => "norm-lift",
            SweepKind::Monomial => "monomial",
            SweepKind::Cppeg => "cppeg",
            SweepKind::TraceSimple => "trace-simple",
            SweepKind::TraceGeneral => "trace-general",
            SweepKind::TraceBinomial => "trace-binomial",
            SweepKind::KernelBinomial => "kernel-binomial",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Largest tower order `q^n` visited.
    pub max_order: u32,
    /// Seeded random `h` of degree `< q` added per tower.
    pub random_h: usize,
    /// Exhaustive `deg h <= 2` grids are used while `q^3` stays below this;
    /// larger base fields fall back to `random_h` samples only. The norm-lift
    /// sweep always uses the full grid.
    pub full_h_grid_limit: u64,
    /// Random instances for the general trace lift.
    pub general_instances: usize,
    pub seed: u64,
    /// Run the fibre-wise criterion on every map as well.
    pub with_agw: bool,
    pub cap: ExhaustiveCap,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_order: 4096,
            random_h: 100,
            full_h_grid_limit: 4096,
            general_instances: 200,
            seed: 0x5eed,
            with_agw: false,
            cap: ExhaustiveCap::default(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub name: String,
    pub total: u64,
    pub agreements: u64,
    pub counterexamples: Vec<String>,
    pub agw_checked: u64,
    pub agw_agreements: u64,
    /// Construction-specific tallies.
    pub counts: BTreeMap<String, u64>,
}

impl SweepReport {
    fn new(kind: SweepKind) -> Self {
        SweepReport {
            name: kind.name().to_owned(),
            ..Default::default()
        }
    }

    fn record(&mut self, agree: bool, describe: impl FnOnce() -> String) {
        self.total += 1;
        if agree {
            self.agreements += 1;
        } else {
            self.counterexamples.push(describe());
        }
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_owned()).or_default() += 1;
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
            && self.agreements == self.total
            && self.agw_agreements == self.agw_checked
    }

    /// Fibre-wise check of `f` against `h`. The square must commute and the
    /// verdict must match the direct bijectivity test.
    fn agw(&mut self, ctx: &AgwContext<'_>, f: &[Elem], h: &[Elem], describe: impl Fn() -> String) -> Result<()> {
        let report = ctx.verify(f, h)?;
        self.agw_checked += 1;
        let direct = is_bijective(f);
        if report.applies() && report.conclusion == report.cross_check && report.cross_check == direct {
            self.agw_agreements += 1;
        } else {
            self.counterexamples
                .push(format!("fibre criterion disagrees: {} {report:?}", describe()));
        }
        Ok(())
    }
}

/// Every `(p, r, n)` with `n >= min_n` and `p^(r n) <= max_order`, ordered by `(q, n)`.
pub fn towers_up_to(max_order: u32, min_n: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for q in 2..=max_order as u64 {
        let Some((p, r)) = prime_power(q) else { continue };
        debug_assert!(is_prime(p));
        let mut n = min_n;
        while q.checked_pow(n).is_some_and(|o| o <= max_order as u64) {
            out.push((p as u32, r, n));
            n += 1;
        }
    }
    out
}

/// All `h` of degree at most 2 over `F_q`, in encoding order of `(c0, c1, c2)`.
pub fn quadratic_hs(q: u32) -> impl Iterator<Item = Poly> {
    (0..q * q * q).map(move |m| Poly::from_codes(&[m % q, m / q % q, m / (q * q)]))
}

pub fn random_poly(rng: &mut impl Rng, q: u32, len: usize) -> Poly {
    Poly::from_codes(&(0..len).map(|_| rng.gen_range(0..q)).collect::<Vec<_>>())
}

fn hs_for(base: &FieldDesc, opts: &SweepOptions, rng: &mut ChaCha8Rng, force_full: bool) -> Vec<Poly> {
    let q = base.q();
    let mut hs: Vec<Poly> = if force_full || (q as u64).pow(3) <= opts.full_h_grid_limit {
        quadratic_hs(q).collect()
    } else {
        Vec::new()
    };
    hs.extend((0..opts.random_h).map(|_| random_poly(rng, q, q as usize)));
    hs
}

/// Table of `s -> s * g(s)^n` on the base.
fn norm_h(base: &FieldDesc, g: impl Fn(Elem) -> Elem, n: u64) -> Vec<Elem> {
    base.elements().map(|s| base.mul(s, base.pow(g(s), n))).collect()
}

/// Table of `s -> s * g(s)` on the base.
fn trace_h(base: &FieldDesc, g: impl Fn(Elem) -> Elem) -> Vec<Elem> {
    base.elements().map(|s| base.mul(s, g(s))).collect()
}

fn shifted(tower: &TowerDesc, table: &[Elem]) -> Vec<Elem> {
    table
        .iter()
        .enumerate()
        .map(|(x, &y)| tower.add(y, Elem(x as u32)))
        .collect()
}

/// Records the biconditional for one lift and returns the lifted table.
fn check_lift(report: &mut SweepReport, res: &LiftResult, cap: ExhaustiveCap) -> Result<Vec<Elem>> {
    cap.check(res.tower.order())?;
    let table = res.shape.table(&res.tower);
    let verified = table_is_cpp(&*res.tower, &table);
    let predicted = res.predicted_cpp.expect("builders always predict");
    if verified {
        report.bump("cpp");
    }
    report.record(verified == predicted, || {
        format!(
            "{} on {}: predicted {predicted}, exhaustive {verified}, params {}",
            res.construction.name(),
            res.tower,
            res.params
        )
    });
    Ok(table)
}

pub fn run_sweep(kind: SweepKind, opts: &SweepOptions) -> Result<SweepReport> {
    let mut report = SweepReport::new(kind);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match kind {
        SweepKind::NormLift => {
            for (p, r, n) in towers_up_to(opts.max_order, 2) {
                let q = p.pow(r);
                if gcd(n as u64, q as u64 - 1) != 1 {
                    continue;
                }
                let t = tower(p as u64, r, n)?;
                let hs = hs_for(t.base(), opts, &mut rng, true);
                norm_lift_tower(&mut report, &t, &hs, opts)?;
            }
        }
        SweepKind::Monomial => {
            for (p, r, n) in towers_up_to(opts.max_order, 2) {
                let q = p.pow(r);
                if gcd(n as u64, q as u64 - 1) != 1 {
                    continue;
                }
                let t = tower(p as u64, r, n)?;
                let ctx = agw_context(&t, LambdaKind::Norm, opts)?;
                for alpha in 1..q {
                    for s in 0..q as u64 {
                        let res = monomial_cpp_check(Elem(alpha), s, &t, opts.cap)?;
                        let table = check_lift(&mut report, &res, opts.cap)?;
                        if let Some(ctx) = &ctx {
                            let g = Poly::monomial(Elem(alpha), s as usize);
                            agw_norm_pair(&mut report, ctx, &t, &table, &g, &res)?;
                        }
                    }
                }
            }
        }
        SweepKind::Cppeg => cppeg_sweep(&mut report, opts)?,
        SweepKind::TraceSimple => {
            for (p, r, n) in towers_up_to(opts.max_order, 2) {
                let t = tower(p as u64, r, n)?;
                let base = t.base().clone();
                let minus_one = base.minus_one();
                let ctx = agw_context(&t, LambdaKind::Trace, opts)?;
                for h in hs_for(&base, opts, &mut rng, false) {
                    let h0 = h.coeff(0);
                    if h0.is_zero() || h0 == minus_one {
                        continue;
                    }
                    let res = trace_lift_simple(&h, &t, opts.cap)?;
                    let table = check_lift(&mut report, &res, opts.cap)?;
                    if let Some(ctx) = &ctx {
                        agw_trace_pair(&mut report, ctx, &t, &table, &h, &res)?;
                    }
                }
            }
        }
        SweepKind::TraceBinomial => {
            for (p, r, n) in towers_up_to(opts.max_order, 2) {
                let (p64, n64) = (p as u64, n as u64);
                if n64 % p64 == 0 {
                    continue;
                }
                let t = tower(p64, r, n)?;
                let base = t.base().clone();
                let ctx = agw_context(&t, LambdaKind::Trace, opts)?;
                let hs = hs_for(&base, opts, &mut rng, false);
                for k in 1..(r * n) as u64 {
                    let d = gcd(k, r as u64) as u32;
                    if gcd(k, n64) != 1 || gcd(n64, p64.pow(d) - 1) != 1 {
                        continue;
                    }
                    for a in 1..base.q() {
                        for h in &hs {
                            let res = trace_lift_binomial(h, k, Elem(a), &t, opts.cap)?;
                            let table = check_lift(&mut report, &res, opts.cap)?;
                            if let Some(ctx) = &ctx {
                                agw_trace_pair(&mut report, ctx, &t, &table, h, &res)?;
                            }
                        }
                    }
                }
            }
        }
        SweepKind::TraceGeneral => trace_general_sweep(&mut report, opts, &mut rng)?,
        SweepKind::KernelBinomial => kernel_sweep(&mut report, opts)?,
    }
    Ok(report)
}

fn agw_context<'a>(
    t: &'a TowerDesc,
    kind: LambdaKind,
    opts: &SweepOptions,
) -> Result<Option<AgwContext<'a>>> {
    opts.with_agw
        .then(|| AgwContext::new(t, kind, opts.cap))
        .transpose()
}

/// Norm lifts over one tower, for every `h` in `hs`.
pub fn norm_lift_tower(
    report: &mut SweepReport,
    t: &Arc<TowerDesc>,
    hs: &[Poly],
    opts: &SweepOptions,
) -> Result<()> {
    let ctx = agw_context(t, LambdaKind::Norm, opts)?;
    for h in hs {
        let res = norm_lift(h, t, opts.cap)?;
        let table = check_lift(report, &res, opts.cap)?;
        if let Some(ctx) = &ctx {
            agw_norm_pair(report, ctx, t, &table, h, &res)?;
        }
    }
    Ok(())
}

/// `x g(nor x)` commutes with `s -> s g(s)^n`; its `+x` shift with `s (g(s)+1)^n`.
fn agw_norm_pair(
    report: &mut SweepReport,
    ctx: &AgwContext<'_>,
    t: &TowerDesc,
    table: &[Elem],
    g: &Poly,
    res: &LiftResult,
) -> Result<()> {
    let base = &**t.base();
    let n = t.n() as u64;
    let describe = || format!("{} {}", res.construction.name(), res.params);
    report.agw(ctx, table, &norm_h(base, |s| g.eval(base, s), n), describe)?;
    let plus = shifted(t, table);
    let h_plus = norm_h(base, |s| base.add(g.eval(base, s), Elem::ONE), n);
    report.agw(ctx, &plus, &h_plus, describe)
}

/// Trace-type lifts satisfy `tr(f(x)) = s h(s)` with `s = tr(x)`.
fn agw_trace_pair(
    report: &mut SweepReport,
    ctx: &AgwContext<'_>,
    t: &TowerDesc,
    table: &[Elem],
    h: &Poly,
    res: &LiftResult,
) -> Result<()> {
    let base = &**t.base();
    let describe = || format!("{} {}", res.construction.name(), res.params);
    report.agw(ctx, table, &trace_h(base, |s| h.eval(base, s)), describe)?;
    let plus = shifted(t, table);
    let h_plus = trace_h(base, |s| base.add(h.eval(base, s), Elem::ONE));
    report.agw(ctx, &plus, &h_plus, describe)
}

/// All `(e, t, k)` with `q^2 <= min(cap, 2^16)`, every admissible `alpha`.
/// The tower bound of the other sweeps does not apply here.
fn cppeg_sweep(report: &mut SweepReport, opts: &SweepOptions) -> Result<()> {
    let limit = (opts.cap.0).min(1 << 16);
    let mut towers: BTreeMap<u32, Arc<TowerDesc>> = BTreeMap::new();
    for et in 1..=16u32 {
        if (1u64 << (2 * et)) > limit {
            break;
        }
        for e in 1..=et {
            if et % e != 0 {
                continue;
            }
            let t_param = et / e;
            for k in 1..t_param {
                if e == 1 && gcd(k as u64, t_param as u64) == 1 {
                    continue;
                }
                let tw = match towers.get(&et) {
                    Some(tw) => tw.clone(),
                    None => {
                        let tw = cppeg_tower(e, t_param)?;
                        towers.insert(et, tw.clone());
                        tw
                    }
                };
                let base = tw.base().clone();
                let ctx = agw_context(&tw, LambdaKind::Norm, opts)?;
                let rk = 1u64 << (e * k);
                for alpha in 1..base.q() {
                    if is_power_in(&base, Elem(alpha), rk - 1) {
                        continue;
                    }
                    let res = cppeg_construct_in(&tw, e, t_param, k, Elem(alpha), opts.cap)?;
                    let table = check_lift(report, &res, opts.cap)?;
                    // unconditional claim: every admissible alpha gives a CPP
                    if res.predicted_cpp != Some(true) {
                        report
                            .counterexamples
                            .push(format!("witness not a CPP: {}", res.params));
                    }
                    if let Some(ctx) = &ctx {
                        let s = ((rk - 1) * base.q() as u64 / 2) as usize;
                        let g = Poly::monomial(Elem(alpha), s);
                        agw_norm_pair(report, ctx, &tw, &table, &g, &res)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// A random p-polynomial over the base with up to three terms.
pub fn random_ppoly(rng: &mut impl Rng, t: &TowerDesc) -> PPoly {
    let span = t.r() * t.n();
    let q = t.q();
    loop {
        let terms: Vec<(u32, Elem)> = (0..rng.gen_range(1..=3))
            .map(|_| (rng.gen_range(0..span), Elem(rng.gen_range(0..q))))
            .collect();
        if let Ok(l) = PPoly::new(t, terms) {
            return l;
        }
    }
}

fn trace_general_sweep(report: &mut SweepReport, opts: &SweepOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let towers: Vec<_> = towers_up_to(opts.max_order.min(1024), 2);
    if towers.is_empty() {
        return Ok(());
    }
    let mut built: BTreeMap<(u32, u32, u32), Arc<TowerDesc>> = BTreeMap::new();
    for _ in 0..opts.general_instances {
        let key = towers[rng.gen_range(0..towers.len())];
        let t = match built.get(&key) {
            Some(t) => t.clone(),
            None => {
                let t = tower(key.0 as u64, key.1, key.2)?;
                built.insert(key, t.clone());
                t
            }
        };
        let q = t.q();
        let h = random_poly(rng, q, 3);
        let l = random_ppoly(rng, &t);
        let a = Elem(rng.gen_range(1..q));
        report.bump("identity_checked");
        if trace_identity_holds(&h, &l, a, &t) {
            report.bump("identity_holds");
        } else {
            report
                .counterexamples
                .push(format!("trace identity fails on {t}: h={h} {l} a={a}"));
        }
        match trace_lift_general(&h, &l, a, &t, opts.cap) {
            Ok(res) => {
                report.bump("hypothesis_holds");
                let table = check_lift(report, &res, opts.cap)?;
                if opts.with_agw {
                    let ctx = AgwContext::new(&t, LambdaKind::Trace, opts.cap)?;
                    agw_trace_pair(report, &ctx, &t, &table, &h, &res)?;
                }
            }
            Err(Error::HypothesisFails { .. }) => report.bump("hypothesis_fails"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Every `(p, r, n, k, c)` with `gcd(k, n) = 1`: a predicted permutation of
/// `ker(tr)` must be confirmed, and when `c^((q-1)/(p^d-1)) = 1`, `c != 0`
/// with `p | n`, the map must fail to permute the kernel.
fn kernel_sweep(report: &mut SweepReport, opts: &SweepOptions) -> Result<()> {
    for (p, r, n) in towers_up_to(opts.max_order, 2) {
        let t = tower(p as u64, r, n)?;
        let base = t.base().clone();
        let q = base.q() as u64;
        let ctx = agw_context(&t, LambdaKind::Trace, opts)?;
        for k in 1..=(r * n) as u64 {
            if gcd(k, n as u64) != 1 || k % (r * n) as u64 == 0 {
                continue;
            }
            let l = PPoly::frobenius_power(&t, k);
            let d = gcd(k, r as u64) as u32;
            let e1 = (q - 1) / ((p as u64).pow(d) - 1);
            for c in base.elements() {
                let verdict = binomial_kernel_criterion(k, c, &t)?;
                let exhaustive = ppoly_permutes_kernel(&t, &l, c)?;
                match verdict.case {
                    KernelCase::Case1 => report.bump("case1"),
                    KernelCase::Case2 => report.bump("case2"),
                    KernelCase::NoCaseApplies => report.bump("no_case"),
                }
                if exhaustive {
                    report.bump("exhaustive_true");
                }
                if verdict.predicted == Some(true) {
                    report.record(exhaustive, || {
                        format!("false positive: p={p} r={r} n={n} k={k} c={c} {verdict:?}")
                    });
                }
                if !c.is_zero() && base.pow(c, e1) == Elem::ONE && n % p == 0 {
                    report.bump("necessity_checked");
                    if exhaustive {
                        report.counterexamples.push(format!(
                            "necessity fails: p={p} r={r} n={n} k={k} c={c} permutes ker(tr)"
                        ));
                    }
                }
                if let Some(ctx) = &ctx {
                    let f: Vec<Elem> = t
                        .elements()
                        .map(|x| t.sub(l.eval(&*t, x), t.mul(c, x)))
                        .collect();
                    let h: Vec<Elem> = base
                        .elements()
                        .map(|s| base.sub(l.eval(&*base, s), base.mul(c, s)))
                        .collect();
                    report.agw(ctx, &f, &h, || format!("kernel binomial p={p} r={r} n={n} k={k} c={c}"))?;
                }
            }
        }
    }
    Ok(())
}
