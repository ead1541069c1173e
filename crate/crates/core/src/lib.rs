//! Numerical laboratory for escaping sets of finitely generated transcendental
//! semigroups.
//!
//! A semigroup `S = <f_1, ..., f_n>` is given by generator expressions in `z`.
//! The crate approximates the escaping set `I(S)` (points escaping under every
//! element of `S`) on pixel grids, builds the image/preimage towers whose
//! intersections describe the completely invariant escaping set `K(S)` and
//! `I(S)` itself, and runs invariance/containment/equality checks on the
//! resulting masks.
//!
//! All numerical code is generic over the scalar type (see [`Scalar`]); the
//! `*64` and `*32` aliases below fix it for the common cases.

pub mod error;
pub mod expr;
pub mod field;
pub mod imaging;
pub mod io;
pub mod orbit;
pub mod scalar;
pub mod scene;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use expr::{Evaluation, Expr, Generator};
pub use field::{EscapeField, Mask, Rectangle, SampleGrid, Tower, Verdict};
pub use orbit::{OrbitParams, OrbitResult, OrbitStatus, PointClass, PointVerdict, Word};
pub use verify::{MaskComparison, VerificationReport};

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type Expr64 = Expr<f64>;
pub type Expr32 = Expr<f32>;
pub type Generator64 = Generator<f64>;
pub type Generator32 = Generator<f32>;
pub type OrbitParams64 = OrbitParams<f64>;
pub type OrbitParams32 = OrbitParams<f32>;
pub type OrbitResult64 = OrbitResult<f64>;
pub type PointClass64 = PointClass<f64>;
pub type Rectangle64 = Rectangle<f64>;
pub type Rectangle32 = Rectangle<f32>;
pub type SampleGrid64 = SampleGrid<f64>;
pub type SampleGrid32 = SampleGrid<f32>;
pub type Mask64 = Mask<f64>;
pub type EscapeField64 = EscapeField<f64>;
pub type EscapeField32 = EscapeField<f32>;
pub type Tower64 = Tower<f64>;
