use num_traits::{Float, FromPrimitive};

/// Scalar type the whole crate is generic over.
///
/// Implemented for `f32` and `f64`. The blanket impl keeps the bound list in
/// one place; downstream code only ever writes `F: Real`.
pub trait Real:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64` (exact for `f64` itself).
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 must convert into a Real scalar")
    }

    /// Conversion to `f64` for reporting and error messages.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real scalar must convert to f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}
