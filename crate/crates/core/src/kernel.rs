//! Compactly supported smoothing kernels and bandwidth vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{num, Scalar};

/// Symmetric density kernels supported on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Epanechnikov,
    Quartic,
    Uniform,
}

impl Kernel {
    /// Kernel value `k(u)`; zero outside `[-1, 1]`.
    pub fn eval<T: Scalar>(self, u: T) -> T {
        let one = T::one();
        if u < -one || u > one {
            return T::zero();
        }
        match self {
            Kernel::Epanechnikov => num::<T>(0.75) * (one - u * u),
            Kernel::Quartic => {
                let w = one - u * u;
                num::<T>(15.0 / 16.0) * w * w
            }
            Kernel::Uniform => num(0.5),
        }
    }

    /// Antiderivative `int_{-1}^{u} k`, clamped to `[0, 1]` outside the support.
    pub fn cdf<T: Scalar>(self, u: T) -> T {
        let one = T::one();
        if u <= -one {
            return T::zero();
        }
        if u >= one {
            return one;
        }
        match self {
            Kernel::Epanechnikov => num::<T>(0.5) + num::<T>(0.75) * u - num::<T>(0.25) * u * u * u,
            Kernel::Quartic => {
                let u3 = u * u * u;
                let u5 = u3 * u * u;
                num::<T>(0.5)
                    + num::<T>(15.0 / 16.0) * (u - num::<T>(2.0 / 3.0) * u3 + num::<T>(0.2) * u5)
            }
            Kernel::Uniform => num::<T>(0.5) * (u + one),
        }
    }

    /// Kernel mass on `[lo, hi]`.
    pub fn mass<T: Scalar>(self, lo: T, hi: T) -> T {
        if hi <= lo {
            return T::zero();
        }
        self.cdf(hi) - self.cdf(lo)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Quartic => "quartic",
            Kernel::Uniform => "uniform",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "quartic" | "biweight" => Ok(Kernel::Quartic),
            "uniform" => Ok(Kernel::Uniform),
            other => Err(Error::invalid("kernel", format!("unknown kernel {other:?}"))),
        }
    }
}

/// Per-dimension positive bandwidths, in grid-cell units.
#[derive(Debug, Clone, PartialEq)]
pub struct Bandwidth<T> {
    components: Vec<T>,
}

impl<T: Scalar> Bandwidth<T> {
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("bandwidth", "needs at least one component"));
        }
        if components.iter().any(|b| !(*b > T::zero()) || !b.is_finite()) {
            return Err(Error::invalid(
                "bandwidth",
                format!("all components must be positive, got {components:?}"),
            ));
        }
        Ok(Self { components })
    }

    /// Two-dimensional bandwidth `(time, underwriting)`.
    pub fn pair(b0: T, b1: T) -> Result<Self> {
        Self::new(vec![b0, b1])
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn get(&self, axis: usize) -> T {
        self.components[axis]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}
