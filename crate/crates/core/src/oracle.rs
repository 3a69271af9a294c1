//! Particle oracle: weighted Fekete points found by gradient descent, used
//! to cross-check the closed-form equilibrium measure without relying on it.
//!
//! The discrete energy is `E_N = Σ_{i<j} k(|x_i − x_j|) + (N−1) Σ_i Q(x_i)`.
//! With field weight `N−1`, stationarity of particle `i` reads
//! `∇(Û + Q)(x_i) = 0` where `Û = (1/(N−1)) Σ_{j≠i} k(|· − x_j|)`, the
//! discrete form of the Frostman conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{compensated_sum, Execution};
use crate::field::{norm, ChargeConfig, DEFAULT_ADMISSIBILITY_TOL};
use crate::geometry::{kernel_derivative, kernel_unchecked, Dimension};
use crate::measure::{ks_distance, random_direction, EquilibriumMeasure};

/// Descent schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Stop once `max_i |∇(Û+Q)(x_i)|` falls below this.
    pub gtol: f64,
    pub max_iters: usize,
    /// Largest particle displacement of a trial step, in units of
    /// `max(h₂, max_i |x_i|)`.
    pub max_step_factor: f64,
    /// Steps bringing two particles closer than this multiple of `h₂` are rejected.
    pub min_distance_factor: f64,
    /// A particle beyond this multiple of `max(h₁, h₂)` means the field does not confine.
    pub radius_guard_factor: f64,
    pub exec: Execution,
    /// Keep the energy after every accepted step.
    pub record_trace: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-5,
            max_iters: 20_000,
            max_step_factor: 0.1,
            min_distance_factor: 1e-9,
            radius_guard_factor: 1e2,
            exec: Execution::Parallel,
            record_trace: false,
        }
    }
}

/// `n` particles in ℝᵈ under the field of `cfg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystem {
    pub cfg: ChargeConfig,
    pub seed: u64,
    n: usize,
    /// Row-major `n × d` coordinates.
    points: Vec<f64>,
}

impl ParticleSystem {
    pub fn from_points(cfg: ChargeConfig, points: &[Vec<f64>], seed: u64) -> Result<Self> {
        let d = cfg.dim() as usize;
        if points.len() < 2 {
            return Err(Error::InvalidConfig("a particle system needs at least 2 points".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::InvalidConfig(format!("point {p:?} is not in dimension {d}")));
        }
        let flat = points.iter().flatten().copied().collect();
        Ok(Self { cfg, seed, n: points.len(), points: flat })
    }

    /// Uniform random start in the ball of radius `2h₂`.
    pub fn random(cfg: ChargeConfig, n: usize, seed: u64) -> Result<Self> {
        let d = cfg.dim() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let radius = 2.0 * cfg.h2;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
                random_direction(&mut rng, d).into_iter().map(|c| c * r).collect()
            })
            .collect();
        Self::from_points(cfg, &pts, seed)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.cfg.dim() as usize
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.points.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points.chunks(self.dim()).map(norm).collect()
    }

    /// `E_N`; errors when two points are closer than `min_distance`.
    pub fn energy(&self, min_distance: f64, exec: Execution) -> Result<f64> {
        let interaction = interaction_energy_flat(&self.points, self.cfg.d, min_distance, exec)?;
        let field = compensated_sum(self.points.chunks(self.dim()).map(|x| self.cfg.field_at(x)));
        Ok(interaction + (self.n - 1) as f64 * field)
    }

    /// `∇E_N`, flattened like the coordinates.
    pub fn gradient(&self, exec: Execution) -> Vec<f64> {
        let d = self.dim();
        let dim = self.cfg.d;
        let w = (self.n - 1) as f64;
        let rows = exec.map(self.n, |i| {
            let xi = self.point(i);
            let mut g = vec![0.0; d];
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                let xj = self.point(j);
                let r = dist(xi, xj);
                let s = kernel_derivative(dim, r) / r;
                for k in 0..d {
                    g[k] += s * (xi[k] - xj[k]);
                }
            }
            let ri = norm(xi);
            if ri > 0.0 {
                let s = w * self.cfg.field_derivative(ri) / ri;
                for k in 0..d {
                    g[k] += s * xi[k];
                }
            }
            g
        });
        rows.into_iter().flatten().collect()
    }

    /// `max_i |∇(Û + Q)(x_i)|`.
    pub fn local_frostman_residual(&self, exec: Execution) -> f64 {
        let g = self.gradient(exec);
        max_row_norm(&g, self.dim()) / (self.n - 1) as f64
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn radial_weights(ps: &ParticleSystem, scale: f64) -> Vec<f64> {
    ps.radii().into_iter().map(|r| (r / scale).max(1.0).powi(2)).collect()
}

fn max_row_norm(g: &[f64], d: usize) -> f64 {
    g.chunks(d).map(norm).fold(0.0, f64::max)
}

fn interaction_energy_flat(points: &[f64], d: Dimension, min_distance: f64, exec: Execution) -> Result<f64> {
    let dd = d.get() as usize;
    let n = points.len() / dd;
    let rows = exec.map(n, |i| {
        let xi = &points[i * dd..(i + 1) * dd];
        let mut terms = Vec::with_capacity(n - i);
        for j in i + 1..n {
            let r = dist(xi, &points[j * dd..(j + 1) * dd]);
            if !(r > min_distance) {
                return Err(Error::CoincidentPoints { i, j });
            }
            terms.push(kernel_unchecked(d, r));
        }
        Ok(compensated_sum(terms))
    });
    let rows: Vec<f64> = rows.into_iter().collect::<Result<_>>()?;
    Ok(compensated_sum(rows))
}

/// `Σ_{i<j} k(|x_i − x_j|)` with no external field.
pub fn interaction_energy(points: &[Vec<f64>], d: Dimension) -> Result<f64> {
    let flat: Vec<f64> = points.iter().flatten().copied().collect();
    interaction_energy_flat(&flat, d, 0.0, Execution::Serial)
}

/// `E_N` of a particle system, rejecting coincident points.
pub fn discrete_energy(ps: &ParticleSystem) -> Result<f64> {
    ps.energy(0.0, Execution::Serial)
}

/// Summary of an oracle run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub n: usize,
    pub seed: u64,
    pub final_energy: f64,
    /// Sorted particle radii.
    pub radii: Vec<f64>,
    /// Kolmogorov–Smirnov distance of the radii to the analytic mass function.
    pub ks_distance: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

/// A finished descent with its final configuration.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub result: OracleResult,
    pub system: ParticleSystem,
    /// Energies after each accepted step, when requested.
    pub trace: Vec<f64>,
}

/// Descend `E_N` from a random start; see [`descend`].
pub fn minimize(cfg: &ChargeConfig, n: usize, seed: u64, opts: &OracleOptions) -> Result<OracleRun> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 particles, got {n}")));
    }
    let start = ParticleSystem::random(*cfg, n, seed)?;
    descend(start, opts)
}

/// Gradient descent with backtracking on `E_N`.
///
/// Each trial step starts from the Barzilai–Borwein length (capped so no
/// particle moves more than `max_step_factor·max(h₂, max_i |x_i|)`) and is halved until the
/// energy strictly decreases. Particle `i` moves along `w_i ∇_i E_N` with
/// `w_i = max(1, |x_i|/max(h₁, h₂))²`, so far particles, whose forces decay
/// like `|x_i|^{1−d}`, still travel at a useful rate. The displacement cap
/// grows with the cloud for the same reason.
pub fn descend(mut ps: ParticleSystem, opts: &OracleOptions) -> Result<OracleRun> {
    let cfg = ps.cfg;
    let d = ps.dim();
    let exec = opts.exec;
    let min_dist = opts.min_distance_factor * cfg.h2;
    let guard = opts.radius_guard_factor * cfg.h1.max(cfg.h2);
    let w = (ps.n - 1) as f64;
    let scale = cfg.h1.max(cfg.h2);

    let mut energy = ps.energy(min_dist, exec)?;
    let mut grad = ps.gradient(exec);
    let mut trace = Vec::new();
    let mut alpha = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let gmax = max_row_norm(&grad, d);
        if gmax / w < opts.gtol {
            converged = true;
            break;
        }
        let weights = radial_weights(&ps, scale);
        let dir: Vec<f64> = grad.iter().enumerate().map(|(k, g)| weights[k / d] * g).collect();
        let dmax = max_row_norm(&dir, d);
        let rmax = ps.radii().into_iter().fold(0.0, f64::max);
        let max_step = opts.max_step_factor * cfg.h2.max(rmax);
        let mut step = alpha.min(max_step / dmax);
        let accepted = loop {
            let trial: Vec<f64> = ps.points.iter().zip(&dir).map(|(x, g)| x - step * g).collect();
            let candidate = ParticleSystem { points: trial, ..ps.clone() };
            match candidate.energy(min_dist, exec) {
                Ok(e) if e < energy => break Some((candidate, e)),
                _ => {}
            }
            step *= 0.5;
            if step * dmax < 1e-14 * cfg.h2 {
                break None;
            }
        };
        let Some((next, next_energy)) = accepted else {
            // no decrease available at machine resolution
            break;
        };
        assert!(next_energy < energy, "accepted step raised the energy");
        iterations += 1;

        let next_grad = next.gradient(exec);
        let (mut sps, mut sy) = (0.0, 0.0);
        for k in 0..next.points.len() {
            let s = next.points[k] - ps.points[k];
            let y = next_grad[k] - grad[k];
            sps += s * s / weights[k / d];
            sy += s * y;
        }
        alpha = if sy > 0.0 { sps / sy } else { 2.0 * step };

        ps = next;
        energy = next_energy;
        grad = next_grad;
        if opts.record_trace {
            trace.push(energy);
        }
        let rmax = ps.radii().into_iter().fold(0.0, f64::max);
        if rmax > guard {
            return Err(Error::NotConfining { radius: rmax, guard });
        }
    }

    let residual = max_row_norm(&grad, d) / w;
    let mut radii = ps.radii();
    radii.sort_by(f64::total_cmp);
    let measure = EquilibriumMeasure::new(cfg, DEFAULT_ADMISSIBILITY_TOL)?;
    let ks = ks_distance(&radii, |r| measure.mass_function(r));
    let result = OracleResult {
        n: ps.n,
        seed: ps.seed,
        final_energy: energy,
        min_radius: radii[0],
        max_radius: radii[radii.len() - 1],
        radii,
        ks_distance: ks,
        iterations,
        converged,
        residual,
    };
    Ok(OracleRun { result, system: ps, trace })
}
