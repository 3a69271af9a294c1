//! Potentials of radial measures and certification of equilibrium measures
//! through the Frostman conditions.
//!
//! Potentials use Newton's theorem for spheres: a uniform unit sphere of
//! radius `ρ` has potential `k(max(r, ρ))` at radius `r`, for both kernels.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{compensated_sum, Execution};
use crate::field::ChargeConfig;
use crate::geometry::{kernel_unchecked, sphere_area, Dimension};
use crate::measure::EquilibriumMeasure;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::regime::{Radius, SupportSpec};
use crate::signed_balayage::{signed_equilibrium_ball, SphereMeasure};

/// A finite combination of a radial Lebesgue density on `[inner, outer]`
/// and uniform sphere masses.
pub struct RadialMeasure<'a> {
    pub d: Dimension,
    /// Lebesgue density on ℝᵈ as a function of `|x|`; may be signed.
    pub density: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    pub inner: f64,
    pub outer: Radius,
    pub spheres: Vec<SphereMeasure>,
    /// Length used by the semi-infinite substitution.
    pub length_scale: f64,
}

impl<'a> RadialMeasure<'a> {
    pub fn from_equilibrium(m: &'a EquilibriumMeasure) -> Self {
        Self {
            d: m.cfg.d,
            density: Box::new(move |r| m.unrestricted_density(r)),
            inner: m.regime.inner,
            outer: m.regime.outer,
            spheres: Vec::new(),
            length_scale: m.length_scale(),
        }
    }

    /// The same measure with every mass multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> RadialMeasure<'a> {
        let density = self.density;
        RadialMeasure {
            density: Box::new(move |r| factor * density(r)),
            spheres: self.spheres.iter().map(|s| SphereMeasure { mass: factor * s.mass, ..*s }).collect(),
            ..self
        }
    }

    fn radial_weight(&self, rho: f64) -> f64 {
        sphere_area(self.d) * rho.powi(self.d.get() as i32 - 1) * (self.density)(rho)
    }

    /// Mass of the continuous part in `[a, b]`.
    fn mass_between(&self, a: f64, b: Radius, opts: QuadOptions) -> Result<f64> {
        let f = |rho: f64| self.radial_weight(rho);
        match b {
            Radius::Finite(b) => Ok(integrate(f, a, b, opts)?.value),
            Radius::Infinite => {
                let scale = self.length_scale.max(a);
                Ok(integrate_to_infinity(f, a, scale, opts)?.value)
            }
        }
    }

    /// Total mass by quadrature plus sphere masses.
    pub fn total_mass(&self) -> Result<f64> {
        let opts = potential_quad_options();
        let c = self.mass_between(self.inner, self.outer, opts)?;
        Ok(c + self.spheres.iter().map(|s| s.mass).sum::<f64>())
    }
}

fn potential_quad_options() -> QuadOptions {
    QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 }
}

/// `U^m(r) = ∫ k(max(r, ρ)) dm(ρ)` for a radial measure.
pub fn radial_potential(m: &RadialMeasure<'_>, r: f64) -> Result<f64> {
    let opts = potential_quad_options();
    let d = m.d;
    let mut parts = Vec::with_capacity(2 + m.spheres.len());

    // shells below r act as point masses at the origin
    let split = m.outer.clamp(r.max(m.inner));
    if r > 0.0 && split > m.inner {
        let inside = m.mass_between(m.inner, Radius::Finite(split), opts)?;
        parts.push(kernel_unchecked(d, r) * inside);
    }
    // shells above r contribute their own kernel value
    let start = r.max(m.inner);
    if m.outer.contains(start) {
        let f = |rho: f64| kernel_unchecked(d, rho) * m.radial_weight(rho);
        let outside = match m.outer {
            Radius::Finite(b) => integrate(f, start, b, opts)?.value,
            Radius::Infinite => {
                let scale = m.length_scale.max(start);
                integrate_to_infinity(f, start, scale, opts)?.value
            }
        };
        parts.push(outside);
    }
    for s in &m.spheres {
        parts.push(s.mass * kernel_unchecked(d, r.max(s.radius)));
    }
    Ok(compensated_sum(parts))
}

/// Evaluation grids for [`frostman_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Log-spaced radii on the support (plus the origin when it belongs to it).
    pub interior_points: usize,
    /// Log-spaced radii per off-support component.
    pub exterior_points: usize,
    /// The outer off-support grid runs to this multiple of the outer radius.
    pub exterior_factor: f64,
    /// Unbounded supports are sampled up to this multiple of the length scale.
    pub unbounded_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { interior_points: 200, exterior_points: 100, exterior_factor: 1e3, unbounded_factor: 1e4 }
    }
}

/// `n` log-spaced points from `a` to `b` inclusive (`0 < a < b`).
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![b];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

impl GridSpec {
    /// Radii inside the support.
    pub fn interior(&self, support: SupportSpec, length_scale: f64) -> Vec<f64> {
        let top = match support.outer {
            Radius::Finite(b) => b,
            Radius::Infinite => self.unbounded_factor * length_scale,
        };
        if support.inner > 0.0 {
            log_grid(support.inner, top, self.interior_points)
        } else {
            let mut g = vec![0.0];
            g.extend(log_grid(top * 1e-4, top, self.interior_points.saturating_sub(1).max(1)));
            g
        }
    }

    /// Radii outside the support: the central hole and the exterior.
    pub fn exterior(&self, support: SupportSpec) -> Vec<f64> {
        let mut g = Vec::new();
        if support.inner > 0.0 {
            let a = support.inner;
            g.push(0.0);
            g.extend(log_grid(a * 1e-3, a * (1.0 - 1e-9), self.exterior_points.saturating_sub(1).max(1)));
        }
        if let Radius::Finite(b) = support.outer {
            g.extend(log_grid(b * (1.0 + 1e-9), b * self.exterior_factor, self.exterior_points));
        }
        g
    }
}

/// One grid evaluation of the weighted potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub r: f64,
    pub u: f64,
    pub q: f64,
}

impl PotentialSample {
    pub fn u_plus_q(&self) -> f64 {
        self.u + self.q
    }
}

/// Outcome of a Frostman-inequality check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrostmanReport {
    /// Mean of `U + Q` over the interior grid.
    pub f_q: f64,
    pub max_dev_on_support: f64,
    /// Minimum of `U + Q − F_Q` off the support; `None` when the support is all of ℝᵈ.
    pub min_margin_off_support: Option<f64>,
    pub tol_eq: f64,
    pub passed: bool,
    pub grid: GridSpec,
    pub interior_points: usize,
    pub exterior_points: usize,
    #[serde(skip)]
    pub samples: Vec<PotentialSample>,
}

/// Evaluate `U^m + field` on the given radii.
pub fn potential_profile<F>(
    m: &RadialMeasure<'_>,
    field: &F,
    radii: &[f64],
    exec: Execution,
) -> Result<Vec<PotentialSample>>
where
    F: Fn(f64) -> f64 + Sync,
{
    exec.map_slice(radii, |&r| radial_potential(m, r).map(|u| PotentialSample { r, u, q: field(r) }))
        .into_iter()
        .collect()
}

/// Frostman check for an arbitrary radial measure, field and support.
pub fn frostman_check_with<F>(
    m: &RadialMeasure<'_>,
    field: &F,
    support: SupportSpec,
    tol_eq: f64,
    grid: &GridSpec,
    exec: Execution,
) -> Result<FrostmanReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    let interior = grid.interior(support, m.length_scale);
    let exterior = grid.exterior(support);
    let inside = potential_profile(m, field, &interior, exec)?;
    let outside = potential_profile(m, field, &exterior, exec)?;

    let f_q = compensated_sum(inside.iter().map(PotentialSample::u_plus_q)) / inside.len() as f64;
    let max_dev = inside.iter().map(|s| (s.u_plus_q() - f_q).abs()).fold(0.0, f64::max);
    let min_margin = outside.iter().map(|s| s.u_plus_q() - f_q).reduce(f64::min);
    let passed = max_dev <= tol_eq && min_margin.is_none_or(|v| v >= -tol_eq);

    let mut samples = inside;
    samples.extend(outside);
    samples.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(FrostmanReport {
        f_q,
        max_dev_on_support: max_dev,
        min_margin_off_support: min_margin,
        tol_eq,
        passed,
        grid: *grid,
        interior_points: interior.len(),
        exterior_points: exterior.len(),
        samples,
    })
}

/// Certify that `m` satisfies the Frostman inequalities within `tol_eq`.
pub fn frostman_check(m: &EquilibriumMeasure, tol_eq: f64, grid: &GridSpec, exec: Execution) -> Result<FrostmanReport> {
    let radial = RadialMeasure::from_equilibrium(m);
    let cfg = m.cfg;
    frostman_check_with(&radial, &|r| cfg.field(r), m.support(), tol_eq, grid, exec)
}

/// Run [`frostman_check`] and record the equilibrium constant on the measure.
pub fn certify(
    mut m: EquilibriumMeasure,
    tol_eq: f64,
    grid: &GridSpec,
    exec: Execution,
) -> Result<(EquilibriumMeasure, FrostmanReport)> {
    let report = frostman_check(&m, tol_eq, grid, exec)?;
    m.equilibrium_constant = Some(report.f_q);
    Ok((m, report))
}

/// Constancy of `U^η + Q` for the signed equilibrium measure on `B_R`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SignedConstancy {
    pub radius: f64,
    pub sphere_mass: f64,
    pub constant: f64,
    pub max_deviation: f64,
    pub passed: bool,
}

pub fn signed_constancy_check(cfg: &ChargeConfig, radius: f64, tol: f64, exec: Execution) -> Result<SignedConstancy> {
    let eta = signed_equilibrium_ball(cfg, radius)?;
    let radial = eta.to_radial_measure();
    let mut grid = vec![0.0];
    grid.extend(log_grid(radius * 1e-4, radius, 199));
    let samples = potential_profile(&radial, &|r| cfg.field(r), &grid, exec)?;
    let constant = compensated_sum(samples.iter().map(PotentialSample::u_plus_q)) / samples.len() as f64;
    let max_deviation = samples.iter().map(|s| (s.u_plus_q() - constant).abs()).fold(0.0, f64::max);
    Ok(SignedConstancy {
        radius,
        sphere_mass: eta.singular_mass(),
        constant,
        max_deviation,
        passed: max_deviation < tol,
    })
}

/// Energy bookkeeping of an equilibrium measure.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `I(μ) = ∬ k dμ dμ`.
    pub interaction: f64,
    /// `∫ Q dμ`.
    pub field_term: f64,
    /// `I(μ) + ∫ Q dμ`, which equals the equilibrium constant.
    pub robin_consistency: f64,
    /// `I(μ) + 2∫ Q dμ`, reported for the alternative field weighting.
    pub doubled_field_energy: f64,
}

/// Interaction and field energies of a radial measure under `field`.
pub fn weighted_energy_with<F>(m: &RadialMeasure<'_>, field: &F) -> Result<EnergyReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 2000 };
    let failure = std::cell::RefCell::new(None::<String>);
    let integrand = |rho: f64, with_potential: bool| -> f64 {
        let w = m.radial_weight(rho);
        if w == 0.0 {
            return 0.0;
        }
        let v = if with_potential {
            match radial_potential(m, rho) {
                Ok(u) => u,
                Err(e) => {
                    // surface the first inner failure after the outer pass
                    failure.borrow_mut().get_or_insert_with(|| e.to_string());
                    0.0
                }
            }
        } else {
            field(rho)
        };
        v * w
    };
    let outer_integral = |with_potential: bool| -> Result<f64> {
        let f = |rho: f64| integrand(rho, with_potential);
        match m.outer {
            Radius::Finite(b) => Ok(integrate(f, m.inner, b, opts)?.value),
            Radius::Infinite => {
                let split = m.inner + m.length_scale;
                let head = integrate(f, m.inner, split, opts)?.value;
                let tail = integrate_to_infinity(f, split, m.length_scale.max(split), opts)?.value;
                Ok(head + tail)
            }
        }
    };
    let field_term = outer_integral(false)?;
    let mut interaction = outer_integral(true)?;
    for s in &m.spheres {
        interaction += s.mass * radial_potential(m, s.radius)?;
    }
    if let Some(msg) = failure.into_inner() {
        return Err(crate::error::Error::Invariant(format!("inner potential quadrature failed: {msg}")));
    }
    Ok(EnergyReport {
        interaction,
        field_term,
        robin_consistency: interaction + field_term,
        doubled_field_energy: interaction + 2.0 * field_term,
    })
}

/// [`weighted_energy_with`] for an equilibrium measure and its own field.
pub fn weighted_energy(m: &EquilibriumMeasure) -> Result<EnergyReport> {
    let radial = RadialMeasure::from_equilibrium(m);
    let cfg = m.cfg;
    weighted_energy_with(&radial, &|r| cfg.field(r))
}
