//! Brute-force realizations of conformal algebras by truncated formal
//! distributions: differential operators over `Q[t]` and loop algebras.
//! Everything here is computed directly from the series and serves as an
//! independent check on the rewriting side.

pub mod checks;
pub mod diffop;
pub mod loopalg;
pub mod series;

use crate::terms::Rational;

/// Vector-space operations on coefficients.
pub trait LinElem: Sized {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_scaled(&mut self, other: &Self, c: &Rational);
}

pub use checks::{
    check_assconf, check_diffass, check_difflie, check_jacconf, check_quasisym, dong_bound_check, virasoro_check,
    DongBound, DongReport, VirasoroReport,
};
pub use diffop::{DiffOp, QPoly};
pub use loopalg::{LieAlgebra, LieAlgebraJson, LoopElem};
pub use series::{
    check_posproduct, check_product, check_reconstruction, circle_pos, locality_holds, locality_order, tilde_diff,
    tilde_loop, AlgebraTag, DiffAssoc, DiffLie, Loop, Realization, TruncSeries,
};
