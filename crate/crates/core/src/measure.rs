//! The equilibrium measure: closed-form radial density, radial mass
//! function, an independent quadrature mass check, and sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::field::ChargeConfig;
use crate::geometry::sphere_area;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::regime::{classify, continuous_mass, g_c, Radius, Regime, SupportSpec};
use crate::roots::{bisect, bracket_by_doubling, Bracket};

/// Radius tolerance of the inverse-CDF bisection used by [`EquilibriumMeasure::sample`].
pub const INVERSE_CDF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumMeasure {
    pub cfg: ChargeConfig,
    pub regime: Regime,
    density_scale: f64,
    /// Modified Robin constant, once estimated by [`crate::verify::certify`].
    pub equilibrium_constant: Option<f64>,
}

impl EquilibriumMeasure {
    pub fn new(cfg: ChargeConfig, tol: f64) -> Result<Self> {
        let regime = classify(&cfg, tol)?;
        Ok(Self::from_regime(cfg, regime))
    }

    pub fn from_regime(cfg: ChargeConfig, regime: Regime) -> Self {
        let density_scale = cfg.d.as_f64() / sphere_area(cfg.d);
        Self { cfg, regime, density_scale, equilibrium_constant: None }
    }

    pub fn support(&self) -> SupportSpec {
        self.regime.support()
    }

    /// Typical length of the problem: the largest of the heights and the inner radius.
    pub fn length_scale(&self) -> f64 {
        self.cfg.h1.max(self.cfg.h2).max(self.regime.inner)
    }

    /// Lebesgue density at `|x| = r`: `d·g_c(r)/|S^{d−1}|` on the support, 0 elsewhere.
    pub fn density(&self, r: f64) -> f64 {
        if self.support().contains(r) {
            self.density_scale * g_c(&self.cfg, r)
        } else {
            0.0
        }
    }

    /// Density formula without the support cutoff.
    pub fn unrestricted_density(&self, r: f64) -> f64 {
        self.density_scale * g_c(&self.cfg, r)
    }

    /// Radial mass density `M'(r) = d·r^{d−1}·g_c(r)` on the support.
    pub fn radial_mass_density(&self, r: f64) -> f64 {
        if self.support().contains(r) {
            self.cfg.d.as_f64() * r.powi(self.cfg.dim() as i32 - 1) * g_c(&self.cfg, r)
        } else {
            0.0
        }
    }

    /// `μ_Q({|x| ≤ r})` from the closed-form antiderivative.
    pub fn mass_function(&self, r: f64) -> f64 {
        let inner = self.regime.inner;
        if r <= inner {
            return 0.0;
        }
        let top = self.regime.outer.clamp(r);
        self.antiderivative(top) - self.antiderivative(inner)
    }

    /// Total mass `M(outer)` (equal to `γ₂ − γ₁ − F(inner)` for unbounded support).
    pub fn total_mass(&self) -> f64 {
        match self.regime.outer {
            Radius::Finite(r) => self.mass_function(r),
            Radius::Infinite => self.antiderivative(f64::INFINITY) - self.antiderivative(self.regime.inner),
        }
    }

    fn antiderivative(&self, r: f64) -> f64 {
        if r.is_infinite() {
            self.cfg.excess()
        } else {
            continuous_mass(&self.cfg, r)
        }
    }

    /// Total mass by adaptive quadrature of `|S^{d−1}| r^{d−1} · density`.
    pub fn quadrature_mass(&self) -> Result<f64> {
        let opts = QuadOptions::with_tol(1e-14, 1e-12);
        let inner = self.regime.inner;
        let integrand = |r: f64| self.cfg.d.as_f64() * r.powi(self.cfg.dim() as i32 - 1) * g_c(&self.cfg, r);
        let value = match self.regime.outer {
            Radius::Finite(outer) => integrate(integrand, inner, outer, opts)?.value,
            Radius::Infinite => {
                let scale = self.length_scale();
                let split = inner + scale;
                let head = integrate(integrand, inner, split, opts)?.value;
                let tail = integrate_to_infinity(integrand, split, scale, opts)?.value;
                head + tail
            }
        };
        Ok(value)
    }

    /// Smallest radius with `M(r) ≥ u`, by bisection to [`INVERSE_CDF_TOL`].
    pub fn inverse_mass(&self, u: f64) -> f64 {
        let inner = self.regime.inner;
        if u <= 0.0 {
            return inner;
        }
        let f = |r: f64| self.mass_function(r) - u;
        let bracket = match self.regime.outer {
            Radius::Finite(outer) => {
                if u >= 1.0 {
                    return outer;
                }
                Bracket { lo: inner, hi: outer }
            }
            Radius::Infinite => {
                if u >= self.total_mass() {
                    return f64::INFINITY;
                }
                let start = inner + self.length_scale();
                match bracket_by_doubling(f, inner, start, 2000) {
                    Ok(b) => b,
                    Err(_) => return f64::INFINITY,
                }
            }
        };
        let rel = INVERSE_CDF_TOL / bracket.hi.max(1.0);
        bisect(f, bracket, rel).unwrap_or(bracket.hi)
    }

    /// `n` i.i.d. points of ℝᵈ distributed by the measure.
    ///
    /// The radius is drawn by inverting the mass function, the direction by
    /// normalizing a standard Gaussian vector. Deterministic given `seed`.
    pub fn sample(&self, n: usize, seed: u64, exec: Execution) -> Vec<Vec<f64>> {
        let d = self.cfg.dim() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<(f64, Vec<f64>)> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let dir = random_direction(&mut rng, d);
                (u, dir)
            })
            .collect();
        exec.map_slice(&draws, |(u, dir)| {
            let r = self.inverse_mass(*u);
            dir.iter().map(|c| c * r).collect()
        })
    }
}

/// Uniform direction on `S^{d−1}`.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}
