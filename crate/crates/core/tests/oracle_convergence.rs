use coulomb_equilibrium::exec::Execution;
use coulomb_equilibrium::field::ChargeConfig;
use coulomb_equilibrium::oracle::{minimize, OracleOptions};

fn shell() -> ChargeConfig {
    ChargeConfig::new(3, 1.0, 3.0, 1.0, 2.0).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn ks_distance_shrinks_with_particle_count() {
    let c = shell();
    let medians: Vec<f64> = [128, 256, 512]
        .into_iter()
        .map(|n| {
            median(
                (1..=5)
                    .map(|seed| minimize(&c, n, seed, &OracleOptions::default()).unwrap().result.ks_distance)
                    .collect(),
            )
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
}

#[test]
fn directions_are_isotropic() {
    for (c, n) in [(shell(), 256), (ChargeConfig::new(2, 1.0, 3.0, 2.0, 1.0).unwrap(), 256)] {
        let run = minimize(&c, n, 3, &OracleOptions::default()).unwrap();
        assert!(run.result.converged);
        let d = c.dim() as usize;
        let mut moment = vec![0.0; d * d];
        for p in run.system.points() {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            for a in 0..d {
                for b in 0..d {
                    moment[a * d + b] += p[a] * p[b] / (norm * norm) / n as f64;
                }
            }
        }
        let bound = 5.0 / (n as f64).sqrt();
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    assert!(moment[a * d + b].abs() < bound, "d={d} entry ({a},{b}) = {}", moment[a * d + b]);
                }
            }
        }
    }
}

#[test]
fn serial_and_parallel_runs_agree() {
    let c = ChargeConfig::new(3, 1.0, 3.0, 2.0, 1.0).unwrap();
    let serial = OracleOptions { exec: Execution::Serial, ..OracleOptions::default() };
    let parallel = OracleOptions { exec: Execution::Parallel, ..OracleOptions::default() };
    let a = minimize(&c, 128, 9, &serial).unwrap();
    let b = minimize(&c, 128, 9, &serial).unwrap();
    let p = minimize(&c, 128, 9, &parallel).unwrap();
    assert_eq!(a.result.final_energy.to_bits(), b.result.final_energy.to_bits());
    assert_eq!(a.system.points(), b.system.points());
    assert!((a.result.final_energy - p.result.final_energy).abs() < 1e-9);
}

#[test]
fn converged_run_certifies_discrete_equilibrium() {
    let c = ChargeConfig::new(3, 1.0, 3.0, 2.0, 1.0).unwrap();
    let opts = OracleOptions::default();
    let run = minimize(&c, 256, 1, &opts).unwrap();
    assert!(run.result.converged);
    assert!(run.system.local_frostman_residual(Execution::Parallel) < 10.0 * opts.gtol);
    assert!(run.result.max_radius < coulomb_equilibrium::regime::solve_outer_radius(&c).unwrap().finite().unwrap());
}
