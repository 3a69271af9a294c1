//! CSV output for plotting and regression diffs. Every number is written
//! with 17 significant digits so that it parses back to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::EquilibriumMeasure;
use crate::verify::{potential_profile, PotentialSample, RadialMeasure};

/// Header of the profile table.
pub const PROFILE_HEADER: &str = "r,density,mass,Q,U_plus_Q";

/// Round-trip formatting of a single number.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// One line of the profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub r: f64,
    pub density: f64,
    pub mass: f64,
    pub q: f64,
    pub u_plus_q: f64,
}

/// `n` equispaced radii on `[0, rmax]` together with the support boundaries
/// that fall inside, sorted and without duplicates.
pub fn profile_radii(m: &EquilibriumMeasure, rmax: f64, n: usize) -> Result<Vec<f64>> {
    if !(rmax > 0.0 && rmax.is_finite()) {
        return Err(Error::InvalidConfig(format!("rmax must be positive and finite, got {rmax}")));
    }
    if n < 2 {
        return Err(Error::InvalidConfig(format!("a profile needs at least 2 points, got {n}")));
    }
    let mut radii: Vec<f64> = (0..n).map(|i| rmax * i as f64 / (n - 1) as f64).collect();
    let support = m.support();
    let boundaries = [Some(support.inner), support.outer.finite()];
    radii.extend(boundaries.into_iter().flatten().filter(|&b| b > 0.0 && b <= rmax));
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    Ok(radii)
}

/// Density, mass function, field and total potential on [`profile_radii`].
pub fn profile(m: &EquilibriumMeasure, rmax: f64, n: usize, exec: Execution) -> Result<Vec<ProfileRow>> {
    let radii = profile_radii(m, rmax, n)?;
    let radial = RadialMeasure::from_equilibrium(m);
    let samples = potential_profile(&radial, &|r| m.cfg.field(r), &radii, exec)?;
    Ok(samples
        .into_iter()
        .map(|s| ProfileRow {
            r: s.r,
            density: m.density(s.r),
            mass: m.mass_function(s.r),
            q: s.q,
            u_plus_q: s.u_plus_q(),
        })
        .collect())
}

fn write_rows<W, I>(mut w: W, header: &str, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<f64>>,
{
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(format_number).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv<W: Write>(w: W, rows: &[ProfileRow]) -> Result<()> {
    write_rows(w, PROFILE_HEADER, rows.iter().map(|p| vec![p.r, p.density, p.mass, p.q, p.u_plus_q]))
}

/// Columns `r,density,mass`.
pub fn write_density_csv<W: Write>(w: W, m: &EquilibriumMeasure, radii: &[f64]) -> Result<()> {
    write_rows(w, "r,density,mass", radii.iter().map(|&r| vec![r, m.density(r), m.mass_function(r)]))
}

/// Columns `r,U,Q,U_plus_Q`.
pub fn write_potential_csv<W: Write>(w: W, samples: &[PotentialSample]) -> Result<()> {
    write_rows(w, "r,U,Q,U_plus_Q", samples.iter().map(|s| vec![s.r, s.u, s.q, s.u_plus_q()]))
}

/// Columns `x1,…,xd`, one point per line.
pub fn write_points_csv<W: Write>(w: W, points: &[Vec<f64>]) -> Result<()> {
    let d = points.first().map_or(0, Vec::len);
    let header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    write_rows(w, &header.join(","), points.iter().cloned())
}

/// Create `path` and hand a buffered writer to `body`.
pub fn to_file<P, F>(path: P, body: F) -> Result<()>
where
    P: AsRef<Path>,
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ChargeConfig;

    fn measure(d: u32, g1: f64, g2: f64, h1: f64, h2: f64) -> EquilibriumMeasure {
        EquilibriumMeasure::new(ChargeConfig::new(d, g1, g2, h1, h2).unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(format_number(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn profile_includes_support_boundaries() {
        let m = measure(3, 1.0, 3.0, 1.0, 2.0);
        let (inner, outer) = (m.support().inner, m.support().outer.finite().unwrap());
        let rows = profile(&m, 4.0, 41, Execution::Serial).unwrap();
        assert!(rows.windows(2).all(|w| w[0].r < w[1].r));
        let at = |r: f64| rows.iter().find(|p| p.r == r).unwrap();
        assert!(at(inner).density > 0.0);
        assert!(at(outer).density > 0.0);
        assert!(rows.iter().filter(|p| p.r < inner).all(|p| p.density == 0.0 && p.mass == 0.0));
        assert!((rows.last().unwrap().mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_csv_layout() {
        let m = measure(3, 0.0, 2.0, 1.0, 1.0);
        let rows = profile(&m, 3.0, 5, Execution::Serial).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(PROFILE_HEADER));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first.len(), 5);
        assert_eq!(first[0], 0.0);
        assert_eq!(first[1], rows[0].density);
        assert_eq!(text.lines().count(), rows.len() + 1);
    }

    #[test]
    fn points_csv_has_coordinate_header() {
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x1,x2\n"));
    }

    #[test]
    fn bad_profile_arguments() {
        let m = measure(3, 0.0, 2.0, 1.0, 1.0);
        assert!(profile_radii(&m, -1.0, 10).is_err());
        assert!(profile_radii(&m, 1.0, 1).is_err());
    }
}
