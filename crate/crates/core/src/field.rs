//! External field of the charge pair `γ₁` at height `h₁` (repellent) and
//! `−γ₂` at height `h₂` (attractive), seen from ℝᵈ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dimension;

/// Default equality band for the weakly admissible line `γ₂ − γ₁ = 1`.
pub const DEFAULT_ADMISSIBILITY_TOL: f64 = 1e-12;

/// A complete problem instance.
///
/// `gamma2` is stored positive; the attractive sign is applied in the
/// formulas. With `gamma1 = 0` the height `h1` is irrelevant but must still
/// be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChargeConfig")]
pub struct ChargeConfig {
    pub d: Dimension,
    pub gamma1: f64,
    pub gamma2: f64,
    pub h1: f64,
    pub h2: f64,
}

#[derive(Deserialize)]
struct RawChargeConfig {
    d: u32,
    gamma1: f64,
    gamma2: f64,
    h1: f64,
    h2: f64,
}

impl TryFrom<RawChargeConfig> for ChargeConfig {
    type Error = Error;
    fn try_from(raw: RawChargeConfig) -> Result<Self> {
        ChargeConfig::new(raw.d, raw.gamma1, raw.gamma2, raw.h1, raw.h2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Admissibility {
    /// `γ₂ − γ₁ > 1`: compact support.
    Admissible,
    /// `γ₂ − γ₁ = 1` within tolerance.
    WeaklyAdmissible,
    /// `γ₂ − γ₁ < 1`: no equilibrium measure.
    NotAdmissible,
}

impl ChargeConfig {
    pub fn new(d: u32, gamma1: f64, gamma2: f64, h1: f64, h2: f64) -> Result<Self> {
        let d = Dimension::new(d)?;
        let finite = [gamma1, gamma2, h1, h2].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("charges and heights must be finite".into()));
        }
        if !(gamma1 >= 0.0) {
            return Err(Error::InvalidConfig(format!("gamma1 must be >= 0, got {gamma1}")));
        }
        if !(gamma2 > 0.0) {
            return Err(Error::InvalidConfig(format!("gamma2 must be > 0, got {gamma2}")));
        }
        if !(h1 > 0.0 && h2 > 0.0) {
            return Err(Error::InvalidConfig(format!("heights must be > 0, got h1={h1}, h2={h2}")));
        }
        Ok(Self { d, gamma1, gamma2, h1, h2 })
    }

    /// A single attractive charge `−gamma` at height `h`.
    pub fn single_charge(d: u32, gamma: f64, h: f64) -> Result<Self> {
        Self::new(d, 0.0, gamma, h, h)
    }

    pub fn dim(&self) -> u32 {
        self.d.get()
    }

    /// `γ₂ − γ₁`, the net attracting charge seen from infinity.
    pub fn excess(&self) -> f64 {
        self.gamma2 - self.gamma1
    }

    /// Field value `Q` at any point with `|x| = r`.
    pub fn field(&self, r: f64) -> f64 {
        let r2 = r * r;
        let s1 = r2 + self.h1 * self.h1;
        let s2 = r2 + self.h2 * self.h2;
        match self.dim() {
            2 => 0.5 * (self.gamma2 * s2.ln() - self.gamma1 * s1.ln()),
            n => {
                let p = 2 - n as i32;
                self.gamma1 * s1.sqrt().powi(p) - self.gamma2 * s2.sqrt().powi(p)
            }
        }
    }

    /// Field at a point of ℝᵈ given by coordinates.
    pub fn field_at(&self, x: &[f64]) -> f64 {
        self.field(norm(x))
    }

    /// Radial derivative `Q'(r) = max(1, d−2) · r · (γ₂ s₂^{−d/2} − γ₁ s₁^{−d/2})`.
    pub fn field_derivative(&self, r: f64) -> f64 {
        let n = self.dim() as i32;
        let r2 = r * r;
        let t2 = self.gamma2 * (r2 + self.h2 * self.h2).sqrt().powi(-n);
        let t1 = self.gamma1 * (r2 + self.h1 * self.h1).sqrt().powi(-n);
        self.d.flux_factor() * r * (t2 - t1)
    }

    /// Second radial derivative `Q''(r)`.
    pub fn field_second_derivative(&self, r: f64) -> f64 {
        let n = self.dim() as i32;
        let nf = n as f64;
        let r2 = r * r;
        let term = |gamma: f64, h: f64| {
            let s = r2 + h * h;
            gamma * ((1.0 - nf) * r2 + h * h) * s.sqrt().powi(-(n + 2))
        };
        self.d.flux_factor() * (term(self.gamma2, self.h2) - term(self.gamma1, self.h1))
    }

    /// `(r^{d−1} Q'(r))' = max(1,d−2) · d · r^{d−1} · g_c(r)`.
    pub fn flux_derivative(&self, r: f64) -> f64 {
        self.d.flux_factor() * self.d.as_f64() * r.powi(self.dim() as i32 - 1) * crate::regime::g_c(self, r)
    }

    /// Admissibility class with equality band `tol` on `γ₂ − γ₁ − 1`.
    pub fn admissibility(&self, tol: f64) -> Admissibility {
        classify_admissibility(self, tol)
    }

    /// Whether `r^{d−1}Q'(r)` is nondecreasing on `(0, ∞)`:
    /// `(γ₁/γ₂)^{1/d} ≤ h₁/h₂ ≤ (γ₂/γ₁)^{1/2}`, trivially true when `γ₁ = 0`.
    pub fn radial_convexity_condition(&self) -> bool {
        radial_convexity_condition(self)
    }
}

pub fn classify_admissibility(cfg: &ChargeConfig, tol: f64) -> Admissibility {
    let gap = cfg.excess() - 1.0;
    if gap.abs() <= tol {
        Admissibility::WeaklyAdmissible
    } else if gap > 0.0 {
        Admissibility::Admissible
    } else {
        Admissibility::NotAdmissible
    }
}

pub fn radial_convexity_condition(cfg: &ChargeConfig) -> bool {
    if cfg.gamma1 == 0.0 {
        return true;
    }
    let ratio = cfg.h1 / cfg.h2;
    let lower = (cfg.gamma1 / cfg.gamma2).powf(1.0 / cfg.d.as_f64());
    let upper = (cfg.gamma2 / cfg.gamma1).sqrt();
    lower <= ratio && ratio <= upper
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
