//! Support classification: the density generator `g_c`, the sphere-mass
//! function `g_s`, their zeros, and the four-case taxonomy.
//!
//! For a ball `B_R` the signed equilibrium measure has continuous density
//! `d·g_c(|x|)/|S^{d−1}|` and a sphere part of mass `g_s(R)`. The outer
//! radius `R_s` is the zero of `g_s`, the inner radius `R₀` is the critical
//! point of `Q`, and `r_c` is where the density changes sign.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{classify_admissibility, Admissibility, ChargeConfig, DEFAULT_ADMISSIBILITY_TOL};
use crate::roots::{brent, bracket_by_doubling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    A1,
    A2,
    B,
    C,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::A1 => "A1",
            CaseTag::A2 => "A2",
            CaseTag::B => "B",
            CaseTag::C => "C",
        };
        f.write_str(s)
    }
}

/// A radius that may be infinite. Serialized as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn is_finite(self) -> bool {
        matches!(self, Radius::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Infinite => None,
        }
    }

    /// `r ≤ self`.
    pub fn contains(self, r: f64) -> bool {
        match self {
            Radius::Finite(b) => r <= b,
            Radius::Infinite => true,
        }
    }

    /// `min(r, self)`.
    pub fn clamp(self, r: f64) -> f64 {
        match self {
            Radius::Finite(b) => r.min(b),
            Radius::Infinite => r,
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Radius::Finite(r) => s.serialize_f64(*r),
            Radius::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct RadiusVisitor;
        impl Visitor<'_> for RadiusVisitor {
            type Value = Radius;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Radius, E> {
                Ok(Radius::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Radius, E> {
                Ok(Radius::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Radius, E> {
                Ok(Radius::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Radius, E> {
                if v == "inf" {
                    Ok(Radius::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(RadiusVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportKind {
    Ball,
    Shell,
    WholeSpace,
    ComplementOfBall,
}

/// Radially symmetric support `{inner ≤ |x| ≤ outer}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub inner: f64,
    pub outer: Radius,
}

impl SupportSpec {
    pub fn kind(&self) -> SupportKind {
        match (self.inner > 0.0, self.outer.is_finite()) {
            (false, true) => SupportKind::Ball,
            (true, true) => SupportKind::Shell,
            (false, false) => SupportKind::WholeSpace,
            (true, false) => SupportKind::ComplementOfBall,
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.inner && self.outer.contains(r)
    }
}

/// Classification of a configuration together with its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub case: CaseTag,
    pub admissibility: Admissibility,
    pub inner: f64,
    pub outer: Radius,
    pub r_c: Option<f64>,
}

impl Regime {
    pub fn support(&self) -> SupportSpec {
        SupportSpec { inner: self.inner, outer: self.outer }
    }

    pub fn support_kind(&self) -> SupportKind {
        self.support().kind()
    }
}

/// `g_c(r) = γ₂h₂²/(r²+h₂²)^{d/2+1} − γ₁h₁²/(r²+h₁²)^{d/2+1}`.
pub fn g_c(cfg: &ChargeConfig, r: f64) -> f64 {
    let p = -(cfg.dim() as i32 + 2);
    let r2 = r * r;
    let term = |gamma: f64, h: f64| {
        if gamma == 0.0 {
            0.0
        } else {
            gamma * h * h * (r2 + h * h).sqrt().powi(p)
        }
    };
    term(cfg.gamma2, cfg.h2) - term(cfg.gamma1, cfg.h1)
}

/// Mass of the continuous part on `B_r`:
/// `F(r) = γ₂ r^d/(r²+h₂²)^{d/2} − γ₁ r^d/(r²+h₁²)^{d/2}`.
///
/// `F = 1 − g_s` and `F(r) = r^{d−1}Q'(r)/max(1, d−2)`.
pub fn continuous_mass(cfg: &ChargeConfig, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let n = cfg.dim() as i32;
    let term = |gamma: f64, h: f64| {
        if gamma == 0.0 {
            0.0
        } else {
            gamma * (r / r.hypot(h)).powi(n)
        }
    };
    term(cfg.gamma2, cfg.h2) - term(cfg.gamma1, cfg.h1)
}

/// `g_s(R) = 1 − γ₂R^d/(R²+h₂²)^{d/2} + γ₁R^d/(R²+h₁²)^{d/2}`.
pub fn g_s(cfg: &ChargeConfig, r: f64) -> f64 {
    1.0 - continuous_mass(cfg, r)
}

/// The configuration with equal heights merged into one attracting charge.
pub fn effective_config(cfg: &ChargeConfig) -> ChargeConfig {
    if cfg.gamma1 > 0.0 && cfg.h1 == cfg.h2 {
        ChargeConfig { gamma1: 0.0, gamma2: cfg.gamma2 - cfg.gamma1, ..*cfg }
    } else {
        *cfg
    }
}

/// Case tag from the ratio `γ₂/γ₁` and the heights. Boundary ties resolve to
/// A2 and C; equal heights and `γ₁ = 0` behave as a single charge.
pub fn case_tag(cfg: &ChargeConfig) -> Result<CaseTag> {
    let eff = effective_config(cfg);
    if eff.gamma2 <= 0.0 {
        return Err(Error::NotAdmissible { excess: cfg.excess() });
    }
    if eff.gamma1 == 0.0 {
        return Ok(if eff.h2 > eff.h1 { CaseTag::C } else { CaseTag::A2 });
    }
    let ratio = eff.gamma2 / eff.gamma1;
    if ratio <= 1.0 {
        return Err(Error::NotAdmissible { excess: cfg.excess() });
    }
    if eff.h2 < eff.h1 {
        let bound = (eff.h1 / eff.h2).powi(2);
        Ok(if ratio < bound { CaseTag::A1 } else { CaseTag::A2 })
    } else {
        let bound = (eff.h2 / eff.h1).powi(cfg.dim() as i32);
        Ok(if ratio < bound { CaseTag::B } else { CaseTag::C })
    }
}

/// Outer radius `R_s` with the default weak-admissibility band.
pub fn solve_outer_radius(cfg: &ChargeConfig) -> Result<Radius> {
    solve_outer_radius_with_tol(cfg, DEFAULT_ADMISSIBILITY_TOL)
}

/// Unique positive zero of `g_s`, or `∞` when the weakly admissible support
/// is unbounded.
pub fn solve_outer_radius_with_tol(cfg: &ChargeConfig, tol: f64) -> Result<Radius> {
    let adm = classify_admissibility(cfg, tol);
    let case = match adm {
        Admissibility::NotAdmissible => return Err(Error::NotAdmissible { excess: cfg.excess() }),
        _ => case_tag(cfg)?,
    };
    if adm == Admissibility::WeaklyAdmissible && case != CaseTag::A1 {
        return Ok(Radius::Infinite);
    }
    let eff = effective_config(cfg);
    let f = |r: f64| g_s(&eff, r);
    let bracket = bracket_by_doubling(f, 0.0, 1.0, 1100)?;
    let root = brent(f, bracket, 1e-15, 500)?;
    Ok(Radius::Finite(root))
}

/// Inner radius `R₀² = (βh₂² − h₁²)/(1 − β)`, `β = (γ₁/γ₂)^{2/d}`, where `Q'(R₀) = 0`.
pub fn solve_inner_radius(cfg: &ChargeConfig) -> Result<f64> {
    if classify_admissibility(cfg, DEFAULT_ADMISSIBILITY_TOL) == Admissibility::NotAdmissible {
        return Err(Error::NotAdmissible { excess: cfg.excess() });
    }
    if case_tag(cfg)? != CaseTag::B {
        return Err(Error::NoInnerRadius);
    }
    let beta = (cfg.gamma1 / cfg.gamma2).powf(2.0 / cfg.d.as_f64());
    let r2 = (beta * cfg.h2 * cfg.h2 - cfg.h1 * cfg.h1) / (1.0 - beta);
    if !(r2 > 0.0) {
        return Err(Error::Invariant(format!("inner radius squared is {r2} in case B")));
    }
    Ok(r2.sqrt())
}

/// Positive zero `r_c` of `g_c` from `r_c² = (αh₁²−h₂²)/(1−α)`,
/// `α = (γ₂h₂²/(γ₁h₁²))^{2/(d+2)}`. Returns `Some(0.0)` when the zero sits at
/// the origin.
pub fn solve_density_zero(cfg: &ChargeConfig) -> Option<f64> {
    let eff = effective_config(cfg);
    if eff.gamma1 == 0.0 {
        return None;
    }
    let (h1s, h2s) = (eff.h1 * eff.h1, eff.h2 * eff.h2);
    let alpha = (eff.gamma2 * h2s / (eff.gamma1 * h1s)).powf(2.0 / (eff.d.as_f64() + 2.0));
    if alpha == 1.0 {
        return None;
    }
    let r2 = (alpha * h1s - h2s) / (1.0 - alpha);
    if r2 > 0.0 && r2.is_finite() {
        Some(r2.sqrt())
    } else if r2.abs() <= 1e-13 * (h1s + h2s) {
        Some(0.0)
    } else {
        None
    }
}

/// Classify the configuration and assemble its support.
pub fn classify(cfg: &ChargeConfig, tol: f64) -> Result<Regime> {
    let admissibility = classify_admissibility(cfg, tol);
    if admissibility == Admissibility::NotAdmissible {
        return Err(Error::NotAdmissible { excess: cfg.excess() });
    }
    let case = case_tag(cfg)?;
    let outer = solve_outer_radius_with_tol(cfg, tol)?;
    let inner = if case == CaseTag::B { solve_inner_radius(cfg)? } else { 0.0 };
    let r_c = solve_density_zero(cfg);

    match (case, outer, r_c) {
        (CaseTag::A1, Radius::Finite(rs), Some(rc)) if rs >= rc => {
            return Err(Error::Invariant(format!("case A1 requires R_s < r_c, got {rs} >= {rc}")));
        }
        (CaseTag::B, Radius::Finite(rs), Some(rc)) if rc >= rs => {
            return Err(Error::Invariant(format!("case B requires r_c < R_s, got {rc} >= {rs}")));
        }
        _ => {}
    }
    if let Radius::Finite(rs) = outer {
        if inner >= rs {
            return Err(Error::Invariant(format!("inner radius {inner} is not below outer radius {rs}")));
        }
    }
    Ok(Regime { case, admissibility, inner, outer, r_c })
}
