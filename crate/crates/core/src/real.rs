//! Scalar abstraction: every continuous quantity in this crate (poses, gains,
//! probabilities, densities, costs) is generic over a floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// ln(2π), used by Gaussian log-densities.
    fn ln_two_pi() -> Self {
        Self::from_f64(1.837_877_066_409_345_5).unwrap()
    }

    /// Lossless-enough round trip through f64 (exact for f32 and f64).
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap()
    }

    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).unwrap()
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Digamma function ψ(x), routed through f64.
pub fn digamma<F: Real>(x: F) -> F {
    F::of(statrs::function::gamma::digamma(x.to_f64_lossy()))
}

/// Natural log of the gamma function, routed through f64.
pub fn ln_gamma<F: Real>(x: F) -> F {
    F::of(statrs::function::gamma::ln_gamma(x.to_f64_lossy()))
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub fn ln_beta<F: Real>(a: F, b: F) -> F {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}
