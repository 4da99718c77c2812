//! End-to-end use of the public API: sample, run, read out, compare.

use std::f64::consts::TAU;

use tcollapse::analysis::{compare_to_reference, Target, TestFunction};
use tcollapse::initial::{pseudo_inverse_from_density, xi_from_pseudo_inverse};
use tcollapse::scheme::{entropy_descent, Theta};
use tcollapse::{
    reconstruct_eulerian, run, sample_initial_data, FourierSeries, SchemeConfig, Trajectory,
    Velocity,
};

fn heat_run(h: f64, frequency: usize, t: f64) -> (Trajectory, FourierSeries) {
    let rho0 = FourierSeries::constant(1.0).plus(&FourierSeries::cos_mode(1, 0.5));
    let w = pseudo_inverse_from_density(&rho0).unwrap();
    let xi0 = xi_from_pseudo_inverse(&w).unwrap();
    let zero = |_: f64| 0.0;
    let cfg = SchemeConfig::economy(h, 0.05, 0.0, frequency, t).unwrap();
    let init = sample_initial_data(&xi0, Velocity::Z(&zero), 2 * frequency, 0.0).unwrap();
    (run(&cfg, &init).unwrap(), rho0)
}

#[test]
fn entropy_descends_within_noise_tolerance() {
    let (traj, _) = heat_run(1e-3, 100, 0.1);
    let cfg = &traj.config;
    let tol = 2.0 * cfg.noise_amplitude() * cfg.cells as f64;
    let trace = entropy_descent(&traj, Theta::NegLog);
    assert!(trace.values.iter().all(|v| v.is_finite()));
    assert!(trace.max_increase <= tol, "{} > {tol}", trace.max_increase);
}

#[test]
fn every_step_conserves_weak_pushforward() {
    let h = 1e-3;
    let (traj, _) = heat_run(h, 100, 0.02);
    for w in traj.states.windows(2) {
        for g in TestFunction::ALL {
            let m = w[0].cells() as f64;
            let sum = |xs: &[f64]| xs.iter().map(|x| g.eval(*x).0).sum::<f64>() / m;
            // Recompute the predictor image of the earlier state.
            let (xihat, _) = tcollapse::predictor(&w[0], &traj.config, 0).unwrap();
            let hat: Vec<f64> = xihat
                .values()
                .iter()
                .enumerate()
                .map(|(k, v)| tcollapse::grid::cell_center(k, w[0].cells()) + v)
                .collect();
            assert!((sum(&hat) - sum(&w[1].x.positions())).abs() <= 1e-12);
        }
    }
}

#[test]
fn eulerian_read_out_tracks_the_heat_solution() {
    let (traj, rho0) = heat_run(2.5e-4, 400, 0.05);
    let last = traj.last();
    let f = reconstruct_eulerian(last, 0.0, 100);
    let mass: f64 = f.rho.iter().sum::<f64>() / 100.0;
    assert!((mass - 1.0).abs() < 1e-12);
    assert!(f.v.iter().all(|v| v.abs() < 1.0));
    let e = compare_to_reference(
        &traj,
        &Target::Heat {
            rho0: &rho0,
            epsilon: 0.05,
        },
        0.05,
        100,
    )
    .unwrap();
    assert!(e.u.l1 < 1e-2, "{}", e.u.l1);
    assert!(e.xi.linf < 2e-2, "{}", e.xi.linf);
}

#[test]
fn reruns_are_identical() {
    let cfg = SchemeConfig::economy(1e-3, 0.05, 1.0, 50, 0.05).unwrap();
    let xi0 = |a: f64| 0.1 * (TAU * a).sin();
    let z0 = |a: f64| 0.1 * (TAU * a).cos();
    let init = sample_initial_data(&xi0, Velocity::Z(&z0), 100, 1.0).unwrap();
    let a = run(&cfg, &init).unwrap();
    let b = std::thread::spawn(move || run(&cfg, &init).unwrap())
        .join()
        .unwrap();
    assert_eq!(a, b);
}
