//! Floating-point scalar abstraction for the numeric core.

/// Floating point scalar: f32 or f64.
pub trait Float:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + core::fmt::Debug
    + Send
    + Sync
    + 'static
{
    fn of(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x).expect("f64 converts to any Float")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("any Float converts to f64")
    }
}

impl Float for f32 {}
impl Float for f64 {}
