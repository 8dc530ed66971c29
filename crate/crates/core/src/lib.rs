//! Finite-field toolkit for building complete permutation polynomials of an
//! extension `F_{q^n}` out of complete mappings of the subfield `F_q`, and for
//! checking every such construction exhaustively.
//!
//! Fields are two-level towers `F_p -> F_q -> F_{q^n}`. Elements are plain
//! [`Elem`] codes interpreted by a field descriptor; [`FieldElement`] pairs a
//! code with its field for checked mixed arithmetic.

pub mod arith;
pub mod desc;
pub mod element;
pub mod error;
pub mod field;
pub mod lift;
pub mod maps;
pub mod perm;
pub mod poly;
pub mod search;
pub mod sweep;

pub use desc::{make_extension, make_prime_field, tower, Field, FieldDesc, FieldSpec, TowerDesc};
pub use element::{embed, enumerate, FieldElement};
pub use error::{Error, Result};
pub use field::{Elem, FiniteField, MAX_ORDER};
pub use lift::{Check, Construction, LiftResult, Shape};
pub use maps::{
    binomial_kernel_criterion, ppoly_permutes_kernel, rel_norm, rel_trace, trace_kernel,
    KernelCase, KernelCriterionVerdict, PPoly,
};
pub use perm::{
    agw_verify, is_complete_permutation, is_permutation, AgwReport, ExhaustiveCap, LambdaKind,
    PermVerdict,
};
pub use poly::Poly;
pub use search::{enumerate_complete_mappings, lagrange_interpolate, to_h_form, CompleteMapping};
pub use sweep::{run_sweep, SweepKind, SweepOptions, SweepReport};
