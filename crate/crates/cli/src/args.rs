use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cppforge::{Elem, Error, Field, FieldDesc, LambdaKind, Poly, SweepKind, TowerDesc};
use serde_json::Value;

const CSV_COLUMNS: &str = "\
CSV columns:
  verify        field,poly,is_permutation,witness,shifted_is_permutation,shifted_witness,complete
  construct     construction,field,predicted_cpp,verified_cpp,params
  search        field,table,poly_coeffs,normalized
  kernel-check  field,k,c,case,predicted,exhaustive
  grid          name,total,agreements,counterexamples,agw_checked,agw_agreements

Polynomials are JSON lists of canonical element codes, lowest degree first.
Exit codes: 0 success, 2 precondition violation, 3 grid counterexample, 4 parse error.";

#[derive(Parser, Debug)]
#[command(name = "cppforge", version)]
#[command(about = "Complete permutation polynomials of F_(q^n) from subfield complete mappings")]
#[command(after_help = CSV_COLUMNS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report format; JSON is the source of truth
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Largest field order scanned exhaustively
    #[arg(long, global = true, env = "CPPFORGE_CAP", default_value_t = 1 << 16)]
    pub cap: u64,

    /// Omit the timestamp so identical runs produce identical bytes
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exhaustively test a polynomial for the permutation and complete-mapping properties
    Verify(VerifyArgs),
    /// Build a lifted polynomial, check its hypotheses and verify it
    #[command(subcommand)]
    Construct(Construct),
    /// Enumerate complete mappings of a small field as a JSON-lines catalog
    Search(SearchArgs),
    /// Classify x^(p^k) - c x on ker(tr) and check it exhaustively
    KernelCheck(KernelArgs),
    /// Run an equivalence sweep over a parameter grid
    Grid(GridArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Characteristic
    #[arg(long)]
    pub p: u64,

    /// Degree of the base field over F_p
    #[arg(long, default_value_t = 1)]
    pub r: u32,

    /// Relative degree of the tower over the base field
    #[arg(long)]
    pub n: Option<u32>,

    /// Base-field modulus over F_p, e.g. [1,1,1]
    #[arg(long = "mod", value_name = "CODES")]
    pub modulus: Option<String>,

    /// Tower modulus over the base field, as codes [2,0,0,1] or digit rows [[0,1],[0,0],...]
    #[arg(long, value_name = "CODES")]
    pub tmod: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Coefficient codes of f
    #[arg(long)]
    pub poly: String,

    /// Also run the fibre-wise criterion through the trace or the norm
    #[arg(long, value_enum)]
    pub lambda: Option<Lambda>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lambda {
    Trace,
    Norm,
}

impl From<Lambda> for LambdaKind {
    fn from(l: Lambda) -> Self {
        match l {
            Lambda::Trace => LambdaKind::Trace,
            Lambda::Norm => LambdaKind::Norm,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// x h(nor(x)) against x h(x^n)
    NormLift {
        #[command(flatten)]
        field: FieldArgs,
        /// Coefficient codes of h over the base field
        #[arg(long)]
        h: String,
    },
    /// alpha x^(1 + s (q^n-1)/(q-1)) against alpha x^(1 + n s)
    Monomial {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        s: u64,
    },
    /// alpha x^(1 + (r^k-1)(q+1)q/2) over F_(q^2) with q = 2^(e t)
    Cppeg {
        #[arg(long)]
        e: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        alpha: u32,
    },
    /// x h(tr(x)) against x h(x)
    TraceSimple {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        h: String,
    },
    /// x (h(tr x) + a A(tr x) - a A(x)) with A = L/x
    TraceGeneral {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        h: String,
        /// p-polynomial terms (i, a_i), e.g. [(1,1),(0,2)]
        #[arg(long)]
        l: String,
        #[arg(long)]
        a: u32,
    },
    /// x (h(tr x) + a tr(x)^(p^k-1) - a x^(p^k-1))
    TraceBinomial {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        a: u32,
    },
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Include mappings with f(0) != 0
    #[arg(long)]
    pub all: bool,

    /// Largest q for permutation enumeration
    #[arg(long, default_value_t = cppforge::search::DEFAULT_SEARCH_CAP)]
    pub search_cap: u64,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub k: u64,
    /// Code of c in the base field
    #[arg(long)]
    pub c: u32,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(value_enum)]
    pub name: Grid,

    /// Largest tower order visited
    #[arg(long, default_value_t = 4096)]
    pub max_order: u32,

    /// Seeded random h per tower
    #[arg(long, default_value_t = 100)]
    pub random_h: usize,

    /// Random instances for the general trace lift
    #[arg(long, default_value_t = 200)]
    pub instances: usize,

    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,

    /// Cross-check every map with the fibre-wise criterion
    #[arg(long)]
    pub agw: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    NormLift,
    Monomial,
    Cppeg,
    TraceSimple,
    TraceGeneral,
    TraceBinomial,
    KernelBinomial,
}

impl From<Grid> for SweepKind {
    fn from(g: Grid) -> Self {
        match g {
            Grid::NormLift => SweepKind::NormLift,
            Grid::Monomial => SweepKind::Monomial,
            Grid::Cppeg => SweepKind::Cppeg,
            Grid::TraceSimple => SweepKind::TraceSimple,
            Grid::TraceGeneral => SweepKind::TraceGeneral,
            Grid::TraceBinomial => SweepKind::TraceBinomial,
            Grid::KernelBinomial => SweepKind::KernelBinomial,
        }
    }
}

/// Parses a JSON argument, reporting failures as parse errors.
pub fn json_arg<T: serde::de::DeserializeOwned>(flag: &str, text: &str) -> Result<T, Error> {
    serde_json::from_str(text.trim()).map_err(|e| Error::Parse {
        offset: e.column().saturating_sub(1),
        msg: format!("--{flag}: {e}"),
    })
}

pub fn poly_arg(flag: &str, text: &str) -> Result<Poly, Error> {
    Ok(Poly::from_codes(&json_arg::<Vec<u32>>(flag, text)?))
}

impl FieldArgs {
    pub fn build(&self) -> Result<Field, Error> {
        let modulus = self
            .modulus
            .as_deref()
            .map(|m| poly_arg("mod", m))
            .transpose()?;
        let base = FieldDesc::extension(self.p, self.r, modulus)?;
        let Some(n) = self.n else {
            if self.tmod.is_some() {
                return Err(Error::BadModulus("--tmod needs --n".into()));
            }
            return Ok(base.into());
        };
        let tmod = match self.tmod.as_deref() {
            None => None,
            Some(text) => Some(match json_arg::<Value>("tmod", text)? {
                Value::Array(items) if items.iter().all(Value::is_array) => {
                    let rows: Vec<Vec<u32>> = json_arg("tmod", text)?;
                    let coeffs = rows
                        .iter()
                        .map(|row| base.from_coeffs(&row.iter().copied().map(Elem).collect::<Vec<_>>()))
                        .collect::<Result<Vec<_>, _>>()?;
                    Poly::new(coeffs)
                }
                _ => poly_arg("tmod", text)?,
            }),
        };
        Ok(TowerDesc::new(Arc::new(base), n, tmod)?.into())
    }

    pub fn tower(&self) -> Result<Arc<TowerDesc>, Error> {
        match self.build()? {
            Field::Tower(t) => Ok(t),
            Field::Base(_) => Err(Error::PreconditionViolated(
                "this command needs a tower; pass --n".into(),
            )),
        }
    }

    pub fn base(&self) -> Result<Arc<FieldDesc>, Error> {
        match self.build()? {
            Field::Base(b) => Ok(b),
            Field::Tower(_) => Err(Error::PreconditionViolated(
                "this command works on F_q; drop --n".into(),
            )),
        }
    }
}
