//! Signed equilibrium measures on balls, and balayage of point charges onto
//! ℝᵈ and onto spheres.
//!
//! All surface integrals here are zonal, so they reduce to one-dimensional
//! integrals over the polar angle with weight `sin^{d−2}θ·|S^{d−2}|/|S^{d−1}|`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ChargeConfig;
use crate::geometry::{kernel_unchecked, sphere_area, sphere_area_raw, sphere_energy, Dimension};
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::regime::{continuous_mass, g_c, g_s, Radius};
use crate::verify::RadialMeasure;

/// A signed multiple of the normalized surface measure on the sphere `S_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereMeasure {
    pub radius: f64,
    pub mass: f64,
}

impl SphereMeasure {
    pub fn new(radius: f64, mass: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Self { radius, mass })
    }
}

/// Signed equilibrium measure of the closed ball `B_R`: the continuous part
/// `d·g_c(|x|)/|S^{d−1}|` on `B_R` plus mass `g_s(R)` spread uniformly on `S_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedEquilibrium {
    pub cfg: ChargeConfig,
    pub radius: f64,
    pub sphere: SphereMeasure,
}

impl SignedEquilibrium {
    pub fn continuous_density(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.cfg.d.as_f64() / sphere_area(self.cfg.d) * g_c(&self.cfg, r)
        } else {
            0.0
        }
    }

    /// Mass of the continuous part, `F(R)`.
    pub fn continuous_mass(&self) -> f64 {
        continuous_mass(&self.cfg, self.radius)
    }

    pub fn singular_mass(&self) -> f64 {
        self.sphere.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.singular_mass()
    }

    pub fn to_radial_measure(&self) -> RadialMeasure<'static> {
        let cfg = self.cfg;
        let scale = cfg.d.as_f64() / sphere_area(cfg.d);
        RadialMeasure {
            d: cfg.d,
            density: Box::new(move |r| scale * g_c(&cfg, r)),
            inner: 0.0,
            outer: Radius::Finite(self.radius),
            spheres: vec![self.sphere],
            length_scale: cfg.h1.max(cfg.h2),
        }
    }
}

/// Signed equilibrium measure on `B_R` for the configuration's field.
pub fn signed_equilibrium_ball(cfg: &ChargeConfig, radius: f64) -> Result<SignedEquilibrium> {
    let sphere = SphereMeasure::new(radius, g_s(cfg, radius))?;
    Ok(SignedEquilibrium { cfg: *cfg, radius, sphere })
}

/// Lebesgue density on ℝᵈ of the weak balayage of `δ_(0,h)` onto ℝᵈ, at `|x| = r`.
pub fn bal_point_to_plane(d: Dimension, height: f64, x_radius: f64) -> Result<f64> {
    if height == 0.0 || !height.is_finite() {
        return Err(Error::Domain(format!("height must be nonzero, got {height}")));
    }
    let h2 = height * height;
    let s = x_radius * x_radius + h2;
    Ok(match d.get() {
        2 => h2 / (PI * s * s),
        n => n as f64 * h2 / (sphere_area(d) * s.sqrt().powi(n as i32 + 2)),
    })
}

/// The same density through the sphere-energy form `(2|h|)² / (|Sᵈ| W(Sᵈ) |x−y|^{d+2})`.
pub fn bal_point_to_plane_energy_form(d: Dimension, height: f64, x_radius: f64) -> f64 {
    let s = x_radius * x_radius + height * height;
    let top = (2.0 * height).powi(2);
    top / (sphere_area_raw(d.get() + 1) * sphere_energy(d) * s.sqrt().powi(d.get() as i32 + 2))
}

/// The weak balayage of `δ_(0,h)` onto ℝᵈ as a radial measure.
pub fn plane_balayage_measure(d: Dimension, height: f64) -> Result<RadialMeasure<'static>> {
    bal_point_to_plane(d, height, 0.0)?;
    Ok(RadialMeasure {
        d,
        density: Box::new(move |r| bal_point_to_plane(d, height, r).unwrap_or(0.0)),
        inner: 0.0,
        outer: Radius::Infinite,
        spheres: Vec::new(),
        length_scale: height.abs(),
    })
}

/// Surface density on `S_R`, w.r.t. `dσ_R`, of the balayage of `δ_u` onto
/// `B_R` (`|u| > R`) or onto the complement of `B_R` (`|u| < R`), at a point
/// `s` with `cos∠(u, s) = s_angle_cos`.
pub fn bal_point_to_ball_boundary(d: Dimension, u_radius: f64, radius: f64, s_angle_cos: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("sphere radius must be positive, got {radius}")));
    }
    if u_radius == radius {
        return Err(Error::Domain("point lies on the sphere".into()));
    }
    if !(-1.0..=1.0).contains(&s_angle_cos) {
        return Err(Error::Domain(format!("cosine out of range: {s_angle_cos}")));
    }
    let dist2 = u_radius * u_radius + radius * radius - 2.0 * u_radius * radius * s_angle_cos;
    let n = d.get() as i32;
    Ok((u_radius * u_radius - radius * radius).abs() / (radius * dist2.sqrt().powi(n) * sphere_area(d)))
}

/// Total mass of the balayage of a unit point mass at distance `u_radius`
/// from the center onto `S_R`: `(R/|u|)^{d−2}` from outside, 1 from inside.
pub fn ball_balayage_mass(d: Dimension, u_radius: f64, radius: f64) -> Result<f64> {
    if u_radius == radius {
        return Err(Error::Domain("point lies on the sphere".into()));
    }
    if u_radius < radius || d.get() == 2 {
        Ok(1.0)
    } else {
        Ok((radius / u_radius).powi(d.get() as i32 - 2))
    }
}

/// `(1/|S^{d−1}|) ∫_{S^{d−1}} f(⟨s, e₁⟩) dσ(s)` for a zonal integrand.
pub fn zonal_average<F: Fn(f64) -> f64>(d: Dimension, f: F, opts: QuadOptions) -> Result<f64> {
    let n = d.get();
    let weight = sphere_area_raw(n - 1) / sphere_area_raw(n);
    let p = n as i32 - 2;
    let r = integrate(|theta: f64| f(theta.cos()) * theta.sin().powi(p), 0.0, PI, opts)?;
    Ok(weight * r.value)
}

/// Closed form of `(1/|S^{d−1}|) ∫ |s − R e₁|^{−d} dσ(s)`:
/// `1/(R^{d−2}(R²−1))` for `R > 1`, `1/(1−R²)` for `R < 1`.
pub fn sphere_kernel_integral(d: Dimension, radius: f64) -> Result<f64> {
    if radius == 1.0 {
        return Err(Error::Domain("sphere kernel integral diverges at R = 1".into()));
    }
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!("radius must be nonnegative, got {radius}")));
    }
    if radius > 1.0 {
        Ok(1.0 / (radius.powi(d.get() as i32 - 2) * (radius * radius - 1.0)))
    } else {
        Ok(1.0 / (1.0 - radius * radius))
    }
}

/// The same average by polar-angle quadrature.
pub fn sphere_kernel_integral_quadrature(d: Dimension, radius: f64) -> Result<f64> {
    let n = d.get() as i32;
    zonal_average(
        d,
        |c| (1.0 - 2.0 * radius * c + radius * radius).sqrt().powi(-n),
        QuadOptions::with_tol(1e-15, 1e-13),
    )
}

/// Sphere mass produced by sweeping the part of the plane balayage inside
/// `B_R` out onto `S_R`: `R^d (γ₂(R²+h₂²)^{−d/2} − γ₁(R²+h₁²)^{−d/2})`.
/// It vanishes exactly at the inner radius `R₀`.
pub fn exterior_sweep_mass(cfg: &ChargeConfig, radius: f64) -> f64 {
    continuous_mass(cfg, radius)
}

/// Sphere mass from sweeping the part of the unit plane balayage of
/// `δ_(0,h)` outside `B_R` onto `S_R`: `h² R^{d−2} / (R² + h²)^{d/2}`.
/// For `d = 2` this is the full outside mass; for `d ≥ 3` part of it is lost.
pub fn interior_sweep_mass(d: Dimension, height: f64, radius: f64) -> f64 {
    let h2 = height * height;
    let n = d.get() as i32;
    h2 * radius.powi(n - 2) / (radius * radius + h2).sqrt().powi(n)
}

/// Potential at the on-axis point `t·û` of the swept measure on `S_R`
/// produced by [`bal_point_to_ball_boundary`] for `δ_u`.
pub fn ball_balayage_potential_on_axis(d: Dimension, u_radius: f64, radius: f64, t: f64) -> Result<f64> {
    let area = sphere_area(d);
    let avg = zonal_average(
        d,
        |c| {
            let dens = bal_point_to_ball_boundary(d, u_radius, radius, c.clamp(-1.0, 1.0)).unwrap_or(0.0);
            let dist = (t * t + radius * radius - 2.0 * t * radius * c).max(0.0).sqrt();
            kernel_unchecked(d, dist) * dens
        },
        QuadOptions::with_tol(1e-15, 1e-12),
    )?;
    // average over S^{d−1} times |S_R| = R^{d−1}|S^{d−1}|
    Ok(avg * area * radius.powi(d.get() as i32 - 1))
}

/// Quadrature of the plane balayage mass of `δ_(0,h)` over `[a, b]` in radius.
pub fn plane_balayage_mass_between(d: Dimension, height: f64, a: f64, b: Radius) -> Result<f64> {
    let area = sphere_area(d);
    let n = d.get() as i32;
    let f = |r: f64| area * r.powi(n - 1) * bal_point_to_plane(d, height, r).unwrap_or(0.0);
    let opts = QuadOptions::with_tol(1e-15, 1e-12);
    match b {
        Radius::Finite(b) => Ok(integrate(f, a, b, opts)?.value),
        Radius::Infinite => Ok(integrate_to_infinity(f, a, height.abs().max(a), opts)?.value),
    }
}
