//! Scalar abstraction for the numeric core.
//!
//! All geometry and solver code is generic over [`Scalar`], which is any
//! real field nalgebra can factorize (`f32`, `f64`). Concrete aliases for
//! the common case live at the crate root.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable everywhere in the crate: nalgebra's `RealField`
/// plus num-traits conversions for counts and literals.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    /// Lossy conversion to `f64` for reporting and serialization.
    fn to_double(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }

    /// Conversion from an `f64` literal (tolerances, constants).
    fn from_double(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal converts to real scalar")
    }

    /// Conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to real scalar")
    }
}

impl<T> Scalar for T where T: RealField + FromPrimitive + ToPrimitive + Copy {}
