use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the engine computes with: `f32` or `f64`.
///
/// `Display`/`FromStr` are required so expression constants survive a
/// print/parse round trip without passing through another precision.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Converts a literal known to be representable (up to rounding).
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
