//! Fixtures shared by the benchmarks under `benches/`.

use std::sync::Arc;

use cppforge::{tower, Elem, FieldDesc, Poly, TowerDesc};

/// `F_4096` as a quadratic extension of `F_64`.
pub fn f4096() -> Arc<TowerDesc> {
    tower(2, 6, 2).expect("canonical tower")
}

/// `F_8`, the largest field the complete-mapping search bench walks.
pub fn f8() -> FieldDesc {
    FieldDesc::extension(2, 3, None).expect("canonical field")
}

/// A fixed dense polynomial with `len` coefficients below `q`.
pub fn dense_poly(q: u32, len: usize) -> Poly {
    Poly::new((0..len as u32).map(|i| Elem((i * 7 + 3) % q)).collect())
}
