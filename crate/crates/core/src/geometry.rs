//! Dimension-dependent constants and the Coulomb kernel.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient dimension `d ≥ 2` of the space carrying the measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidConfig(format!("dimension must be at least 2, got {d}")));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn kernel_kind(self) -> KernelKind {
        if self.0 == 2 {
            KernelKind::Log
        } else {
            KernelKind::Newtonian
        }
    }

    /// `max(1, d − 2)`: the factor relating `r^{d−1} Q'(r)` to enclosed mass.
    pub fn flux_factor(self) -> f64 {
        (self.as_f64() - 2.0).max(1.0)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// `−log r`, used in the plane.
    Log,
    /// `r^{2−d}`, used for `d ≥ 3`.
    Newtonian,
}

/// Γ(n/2) for a positive integer `n`, by the half-integer recursion.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n > 0, "gamma_half requires n > 0");
    let (mut x, mut g) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = n as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area `|S^{n−1}| = 2π^{n/2} / Γ(n/2)` of the unit sphere in ℝⁿ, `n ≥ 1`.
pub fn sphere_area_raw(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `|S^{d−1}|`, the area of the unit sphere bounding the unit ball of ℝᵈ.
pub fn sphere_area(d: Dimension) -> f64 {
    sphere_area_raw(d.get())
}

/// Energy of the unit sphere `Sᵈ ⊂ ℝ^{d+1}` for the kernel `1/|x|^{d−2}`,
/// in the Gamma-ratio form `(4 / (d√π)) Γ((d+1)/2) / Γ(d/2)`.
pub fn sphere_energy(d: Dimension) -> f64 {
    let n = d.get();
    4.0 / (d.as_f64() * PI.sqrt()) * gamma_half(n + 1) / gamma_half(n)
}

/// The same energy in the area-ratio form `4|S^{d−1}| / (d|Sᵈ|)`.
pub fn sphere_energy_from_areas(d: Dimension) -> f64 {
    4.0 * sphere_area_raw(d.get()) / (d.as_f64() * sphere_area_raw(d.get() + 1))
}

/// Coulomb kernel `k(r)`: `−log r` for `d = 2`, `r^{2−d}` otherwise.
pub fn kernel(d: Dimension, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("kernel evaluated at r = {r}")));
    }
    Ok(kernel_unchecked(d, r))
}

/// Kernel without the domain check; callers guarantee `r > 0`.
#[inline]
pub(crate) fn kernel_unchecked(d: Dimension, r: f64) -> f64 {
    match d.get() {
        2 => -r.ln(),
        3 => 1.0 / r,
        4 => 1.0 / (r * r),
        n => r.powi(2 - n as i32),
    }
}

/// `k'(r)`: `−1/r` for `d = 2`, `−(d−2) r^{1−d}` otherwise.
#[inline]
pub(crate) fn kernel_derivative(d: Dimension, r: f64) -> f64 {
    match d.get() {
        2 => -1.0 / r,
        3 => -1.0 / (r * r),
        n => -((n - 2) as f64) * r.powi(1 - n as i32),
    }
}
