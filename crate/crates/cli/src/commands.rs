use cppforge::lift::{
    cppeg_construct, monomial_cpp_check, norm_lift, trace_lift_binomial, trace_lift_general,
    trace_lift_simple, LiftResult,
};
use cppforge::maps::PPolyTerms;
use cppforge::perm::AgwContext;
use cppforge::search::enumerate_complete_mappings;
use cppforge::{
    binomial_kernel_criterion, is_complete_permutation, ppoly_permutes_kernel, run_sweep, Elem,
    Error, ExhaustiveCap, FiniteField, PPoly, Poly, SweepOptions,
};
use serde_json::{json, Value};

use crate::args::{poly_arg, Command, Construct, GridArgs, KernelArgs, SearchArgs, VerifyArgs};

/// Records produced by one command, plus how to lay them out as CSV.
pub struct Report {
    pub records: Vec<Value>,
    pub columns: &'static [&'static str],
    /// One JSON document per line instead of a single document.
    pub json_lines: bool,
    pub counterexample: bool,
}

impl Report {
    fn single(record: Value, columns: &'static [&'static str]) -> Self {
        Report {
            records: vec![record],
            columns,
            json_lines: false,
            counterexample: false,
        }
    }
}

pub fn execute(command: &Command, cap: ExhaustiveCap) -> Result<Report, Error> {
    match command {
        Command::Verify(args) => verify(args, cap),
        Command::Construct(c) => construct(c, cap),
        Command::Search(args) => search(args),
        Command::KernelCheck(args) => kernel_check(args, cap),
        Command::Grid(args) => grid(args, cap),
    }
}

fn check_codes(poly: &Poly, order: u32, flag: &str) -> Result<(), Error> {
    match poly.coeffs().iter().find(|c| c.0 >= order) {
        Some(c) => Err(Error::PreconditionViolated(format!(
            "--{flag} coefficient {c} is not an element of a field of order {order}"
        ))),
        None => Ok(()),
    }
}

fn verify(args: &VerifyArgs, cap: ExhaustiveCap) -> Result<Report, Error> {
    let field = args.field.build()?;
    let f = poly_arg("poly", &args.poly)?;
    check_codes(&f, field.order(), "poly")?;
    let (plain, shifted) = is_complete_permutation(&field, &f, cap)?;
    let mut record = json!({
        "field": field.to_string(),
        "poly": f,
        "is_permutation": plain.is_permutation,
        "witness": plain.witness,
        "shifted_is_permutation": shifted.is_permutation,
        "shifted_witness": shifted.witness,
        "complete": plain.is_permutation && shifted.is_permutation,
    });
    if let Some(lambda) = args.lambda {
        let tower = field.as_tower().ok_or_else(|| {
            Error::PreconditionViolated("--lambda needs a tower; pass --n".into())
        })?;
        let ctx = AgwContext::new(tower, lambda.into(), cap)?;
        let table = f.table(&**tower);
        let agw = match ctx.induced_h(&table) {
            Some(h) => serde_json::to_value(ctx.verify(&table, &h)?).expect("plain struct"),
            None => json!({ "square_commutes": false }),
        };
        record["agw"] = agw;
    }
    Ok(Report::single(
        record,
        &["field", "poly", "is_permutation", "witness", "shifted_is_permutation", "shifted_witness", "complete"],
    ))
}

fn construct(c: &Construct, cap: ExhaustiveCap) -> Result<Report, Error> {
    let res: LiftResult = match c {
        Construct::NormLift { field, h } => norm_lift(&poly_arg("h", h)?, &field.tower()?, cap)?,
        Construct::Monomial { field, alpha, s } => {
            monomial_cpp_check(Elem(*alpha), *s, &field.tower()?, cap)?
        }
        Construct::Cppeg { e, t, k, alpha } => cppeg_construct(*e, *t, *k, Elem(*alpha), cap)?,
        Construct::TraceSimple { field, h } => trace_lift_simple(&poly_arg("h", h)?, &field.tower()?, cap)?,
        Construct::TraceGeneral { field, h, l, a } => {
            let tower = field.tower()?;
            let terms: PPolyTerms = l.parse()?;
            let l: PPoly = terms.build(&tower)?;
            trace_lift_general(&poly_arg("h", h)?, &l, Elem(*a), &tower, cap)?
        }
        Construct::TraceBinomial { field, h, k, a } => {
            trace_lift_binomial(&poly_arg("h", h)?, *k, Elem(*a), &field.tower()?, cap)?
        }
    };
    let verified = if res.tower.order() as u64 <= cap.0 {
        Some(res.verify(cap)?)
    } else {
        None
    };
    Ok(Report::single(
        res.report(verified),
        &["construction", "field", "predicted_cpp", "verified_cpp", "params"],
    ))
}

fn search(args: &SearchArgs) -> Result<Report, Error> {
    let field = args.field.base()?;
    let found = enumerate_complete_mappings(&field, !args.all, args.search_cap)?;
    Ok(Report {
        records: found
            .iter()
            .map(|m| serde_json::to_value(m).expect("plain struct"))
            .collect(),
        columns: &["field", "table", "poly_coeffs", "normalized"],
        json_lines: true,
        counterexample: false,
    })
}

fn kernel_check(args: &KernelArgs, cap: ExhaustiveCap) -> Result<Report, Error> {
    let tower = args.field.tower()?;
    let c = Elem(args.c);
    let verdict = binomial_kernel_criterion(args.k, c, &tower)?;
    cap.check(tower.order())?;
    let exhaustive = ppoly_permutes_kernel(&tower, &PPoly::frobenius_power(&tower, args.k), c)?;
    let record = json!({
        "field": tower.to_string(),
        "k": args.k,
        "c": c,
        "case": verdict.case,
        "predicted": verdict.predicted,
        "note": verdict.note,
        "exhaustive": exhaustive,
        "consistent": verdict.predicted.is_none_or(|p| p == exhaustive),
    });
    Ok(Report::single(record, &["field", "k", "c", "case", "predicted", "exhaustive"]))
}

fn grid(args: &GridArgs, cap: ExhaustiveCap) -> Result<Report, Error> {
    let opts = SweepOptions {
        max_order: args.max_order,
        random_h: args.random_h,
        general_instances: args.instances,
        seed: args.seed,
        with_agw: args.agw,
        cap,
        ..SweepOptions::default()
    };
    let report = run_sweep(args.name.into(), &opts)?;
    let passed = report.passed();
    let mut record = serde_json::to_value(&report).expect("plain struct");
    record["max_order"] = json!(args.max_order);
    record["passed"] = json!(passed);
    Ok(Report {
        records: vec![record],
        columns: &["name", "total", "agreements", "counterexamples", "agw_checked", "agw_agreements"],
        json_lines: false,
        counterexample: !passed,
    })
}
