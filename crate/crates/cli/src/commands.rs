//! One function per subcommand. Each writes its files into `out` and returns
//! the lines to print.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use tcollapse::analysis::{
    build_ladder, compare_to_reference, fixed_point_check, lipschitz_probe, run_ladder,
    stability_table, supnorm_probe, weak_residuals, ConvergenceReport, Field, Target, TestFunction,
};
use tcollapse::grid::cell_center;
use tcollapse::reference::{solve_coupled_parabolic, ParabolicConfig, ReferenceSolution};
use tcollapse::scheme::{entropy_descent, Theta};
use tcollapse::{
    reconstruct_eulerian, run, FourierSeries, NoiseSpec, Norm, SchemeConfig, Trajectory,
};

use crate::emit::{real, Manifest, Table};
use crate::error::{CliError, CliResult};
use crate::settings::{Settings, TargetKind};

/// Probe families for `probe --kind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProbeKind {
    All,
    Supnorm,
    Lipschitz,
    Weak,
    Entropy,
    Stability,
}

fn prepare(out: &Path, settings: &Settings, command: &str) -> CliResult<Manifest> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut m = Manifest::new(out, command);
    let cfg = &settings.scheme;
    m.set(
        "config",
        Value::Object(
            settings
                .resolved()
                .iter()
                .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
                .collect(),
        ),
    );
    m.set(
        "derived",
        json!({
            "r": cfg.r(),
            "delta": 1.0 / cfg.cells as f64,
            "noise_amplitude": cfg.noise_amplitude(),
            "amplitude_in_cells": cfg.amplitude_in_cells(),
            "integral_amplitude": cfg.integral_amplitude(),
            "steps": cfg.steps(),
            "growth_constant": cfg.growth_constant(),
        }),
    );
    fs::write(m.file("config.ini"), settings.to_ini())?;
    Ok(m)
}

fn simulate(settings: &Settings, cfg: &SchemeConfig) -> CliResult<Trajectory> {
    let init = settings.initial_state(cfg.cells)?;
    Ok(run(cfg, &init)?)
}

fn write_states(path: &Path, traj: &Trajectory) -> CliResult<()> {
    let mut t = Table::create(path, &["n", "t", "k", "a_k", "xi", "Z"])?;
    for (s, &n) in traj.states.iter().zip(&traj.steps) {
        let m = s.cells();
        for (k, (xi, z)) in s.xi().values().iter().zip(s.z().values()).enumerate() {
            t.row(&[
                n.to_string(),
                real(s.t),
                k.to_string(),
                real(cell_center(k, m)),
                real(*xi),
                real(*z),
            ])?;
        }
    }
    t.finish()
}

fn write_fields(path: &Path, traj: &Trajectory, j_cells: usize) -> CliResult<()> {
    let lambda = traj.config.lambda;
    let mut t = Table::create(path, &["n", "t", "j", "x_j", "rho", "v", "u"])?;
    for (s, &n) in traj.states.iter().zip(&traj.steps) {
        let f = reconstruct_eulerian(s, lambda, j_cells);
        for j in 0..j_cells {
            t.row(&[
                n.to_string(),
                real(s.t),
                j.to_string(),
                real(f.x[j]),
                real(f.rho[j]),
                real(f.v[j]),
                real(f.u[j]),
            ])?;
        }
    }
    t.finish()
}

pub fn cmd_run(settings: &Settings, out: &Path) -> CliResult<Vec<String>> {
    let mut man = prepare(out, settings, "run")?;
    let cfg = &settings.scheme;
    let start = Instant::now();
    let traj = simulate(settings, cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let j = settings.eulerian_cells(cfg.cells);
    write_states(&man.file("states.csv"), &traj)?;
    write_fields(&man.file("fields.csv"), &traj, j)?;
    man.set("timings", json!({ "run_seconds": secs }));
    man.set("saved_states", json!(traj.states.len()));
    man.write()?;
    Ok(vec![format!(
        "{} steps, {} saved states, t = {} ({secs:.3}s)",
        cfg.steps(),
        traj.states.len(),
        traj.final_time()
    )])
}

fn solve_reference(settings: &Settings) -> CliResult<ReferenceSolution> {
    let cfg = &settings.scheme;
    let w0 = settings.w0()?;
    let z0 = settings.z0()?;
    Ok(solve_coupled_parabolic(
        &*w0,
        &*z0,
        &ParabolicConfig {
            epsilon: cfg.epsilon,
            lambda: cfg.lambda,
            forcing: cfg.forcing.clone(),
            horizon: cfg.horizon,
            cells: settings.ref_cells,
            h_ref: settings.ref_h,
            save_every: settings.ref_save,
        },
    )?)
}

pub fn cmd_reference(settings: &Settings, out: &Path) -> CliResult<Vec<String>> {
    let mut man = prepare(out, settings, "reference")?;
    let start = Instant::now();
    let sol = solve_reference(settings)?;
    let secs = start.elapsed().as_secs_f64();
    let j_cells = sol.cells;
    let path = man.file("reference.csv");
    let mut t = Table::create(&path, &["n", "t", "j", "x_j", "u", "rho", "xi", "Z"])?;
    for &time in &sol.times {
        let n = (time / sol.h_ref).round() as usize;
        let u = sol.u_on(time, j_cells)?;
        let rho = sol.density_on(time, j_cells)?;
        let (xi, z) = sol.material_on(time, j_cells)?;
        for j in 0..j_cells {
            t.row(&[
                n.to_string(),
                real(time),
                j.to_string(),
                real(cell_center(j, j_cells)),
                real(u[j]),
                real(rho[j]),
                real(xi[j]),
                real(z[j]),
            ])?;
        }
    }
    t.finish()?;
    man.set(
        "reference",
        json!({ "J": sol.cells, "h_ref": sol.h_ref, "cfl": sol.cfl, "snapshots": sol.times.len() }),
    );
    man.set("timings", json!({ "reference_seconds": secs }));
    man.write()?;
    Ok(vec![format!(
        "reference J = {}, h = {:e}, CFL number {:.3}, {} snapshots ({secs:.3}s)",
        sol.cells,
        sol.h_ref,
        sol.cfl,
        sol.times.len()
    )])
}

enum Owned {
    Heat(FourierSeries),
    Reference(Box<ReferenceSolution>),
}

impl Owned {
    fn build(settings: &Settings) -> CliResult<Self> {
        match settings.target {
            TargetKind::Heat => {
                let cfg = &settings.scheme;
                if cfg.lambda != 0.0 || !cfg.forcing.is_none() {
                    return Err(CliError::config(
                        "target",
                        "the heat target needs lambda = 0 and forcing = none",
                    ));
                }
                let rho0 = settings.rho0().ok_or_else(|| {
                    CliError::config("target", "the heat target needs init_xi as rho: or u:")
                })?;
                Ok(Owned::Heat(rho0))
            }
            TargetKind::Reference => Ok(Owned::Reference(Box::new(solve_reference(settings)?))),
        }
    }

    fn target(&self, epsilon: f64) -> Target<'_> {
        match self {
            Owned::Heat(rho0) => Target::Heat { rho0, epsilon },
            Owned::Reference(sol) => Target::Coupled(sol),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Owned::Heat(_) => "heat",
            Owned::Reference(_) => "reference",
        }
    }
}

pub fn cmd_compare(settings: &Settings, out: &Path) -> CliResult<Vec<String>> {
    let mut man = prepare(out, settings, "compare")?;
    let cfg = &settings.scheme;
    let start = Instant::now();
    let owned = Owned::build(settings)?;
    let traj = simulate(settings, cfg)?;
    let target = owned.target(cfg.epsilon);
    let j = settings.eulerian_cells(cfg.cells);
    let path = man.file("compare.csv");
    let mut t = Table::create(&path, &["n", "t", "field", "L1", "L2", "Linf"])?;
    let mut last = None;
    for (s, &n) in traj.states.iter().zip(&traj.steps) {
        let e = compare_to_reference(&traj, &target, s.t, j)?;
        for (name, set) in [("rho", e.rho), ("u", e.u), ("xi", e.xi), ("Z", e.z)] {
            t.row(&[
                n.to_string(),
                real(s.t),
                name.to_string(),
                real(set.l1),
                real(set.l2),
                real(set.linf),
            ])?;
        }
        last = Some(e);
    }
    t.finish()?;
    let secs = start.elapsed().as_secs_f64();
    man.set("target", json!(owned.name()));
    man.set("timings", json!({ "compare_seconds": secs }));
    man.write()?;
    let e = last.expect("a trajectory holds at least one state");
    Ok(vec![format!(
        "t = {}: L1 errors rho {:.3e}, u {:.3e}, xi {:.3e} against {} on J = {j}",
        e.t,
        e.rho.l1,
        e.u.l1,
        e.xi.l1,
        owned.name()
    )])
}

pub fn cmd_converge(settings: &Settings, out: &Path) -> CliResult<Vec<String>> {
    let mut man = prepare(out, settings, "converge")?;
    let base = &settings.scheme;
    let levels = build_ladder(&settings.ladder, settings.r_factor)?;
    let owned = Owned::build(settings)?;
    let start = Instant::now();
    let runs = run_ladder(&levels, |l| {
        let noise = NoiseSpec::new(base.noise.kind().clone(), l.frequency)?;
        let cfg = SchemeConfig {
            h: l.h,
            cells: l.cells,
            noise,
            ..base.clone()
        };
        cfg.validate()?;
        let init = settings
            .initial_state(l.cells)
            .map_err(|e| tcollapse::Error::InitialData(e.to_string()))?;
        Ok((cfg, init))
    })?;
    let rep = ConvergenceReport::from_runs(
        &runs,
        &owned.target(base.epsilon),
        base.horizon,
        settings.j_cells,
    )?;
    let secs = start.elapsed().as_secs_f64();
    let rho = rep.series(Field::Rho, Norm::L1);
    let u = rep.series(Field::U, Norm::L1);
    let xi = rep.series(Field::Xi, Norm::L1);
    let local = rep.local_orders(Field::Rho, Norm::L1);
    let path = man.file("ladder.csv");
    let mut t = Table::create(
        &path,
        &[
            "level",
            "h",
            "r",
            "M",
            "err_rho_L1",
            "err_u_L1",
            "err_xi_L1",
            "order_est",
            "seconds",
        ],
    )?;
    for (i, l) in rep.levels.iter().enumerate() {
        t.row(&[
            i.to_string(),
            real(l.h),
            real(l.r),
            l.cells.to_string(),
            real(rho[i]),
            real(u[i]),
            real(xi[i]),
            local[i].map(real).unwrap_or_default(),
            real(rep.seconds[i]),
        ])?;
    }
    t.finish()?;
    let fitted = if rep.levels.len() >= 2 {
        Some(rep.order(Field::Rho, Norm::L1)?)
    } else {
        None
    };
    man.set("target", json!(owned.name()));
    man.set("J", json!(rep.j_cells));
    man.set("fitted_order_rho_L1", json!(fitted));
    man.set(
        "timings",
        json!({ "converge_seconds": secs, "levels": rep.seconds }),
    );
    man.write()?;
    let mut lines: Vec<String> = rep
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| format!("h = {:e}: L1 rho error {:.4e}", l.h, rho[i]))
        .collect();
    if let Some(p) = fitted {
        lines.push(format!("fitted order {p:.3}"));
    }
    Ok(lines)
}

pub fn cmd_fixedpoint(settings: &Settings, out: &Path) -> CliResult<Vec<String>> {
    let cfg = &settings.scheme;
    if cfg.noise.kind() != &tcollapse::NoiseKind::Binary {
        return Err(CliError::config(
            "noise",
            "the fixed-point check uses binary noise",
        ));
    }
    if cfg.noise.frequency() * 2 != cfg.cells {
        return Err(CliError::config("L", "the fixed-point check needs M = 2L"));
    }
    if cfg.lambda != 0.0 || !cfg.forcing.is_none() {
        return Err(CliError::config(
            "lambda",
            "the fixed-point check needs lambda = 0 and forcing = none",
        ));
    }
    let mut man = prepare(out, settings, "fixedpoint")?;
    let rep = fixed_point_check(cfg.epsilon, cfg.h, cfg.cells, cfg.steps())?;
    let mut t = Table::create(&man.file("drift.csv"), &["n", "t", "drift"])?;
    for &(n, d) in &rep.drift {
        t.row(&[n.to_string(), real(n as f64 * cfg.h), real(d)])?;
    }
    t.finish()?;
    let verdict = if rep.exact { "exact" } else { "inexact" };
    man.set("verdict", json!(verdict));
    man.set("max_drift", json!(rep.max_drift));
    man.write()?;
    Ok(vec![format!(
        "{verdict}: {} steps, amplitude {} cells (integral: {}), max drift {:e}",
        rep.drift.len() - 1,
        rep.amplitude_in_cells,
        rep.integral_amplitude,
        rep.max_drift
    )])
}

pub fn cmd_probe(settings: &Settings, out: &Path, kind: ProbeKind) -> CliResult<Vec<String>> {
    let mut man = prepare(out, settings, "probe")?;
    let want = |k: ProbeKind| kind == ProbeKind::All || kind == k;
    // Step-wise probes need every state.
    let cfg = settings.scheme.clone().with_save_stride(1);
    let mut lines = Vec::new();
    let needs_run = [
        ProbeKind::Supnorm,
        ProbeKind::Lipschitz,
        ProbeKind::Weak,
        ProbeKind::Entropy,
    ]
    .into_iter()
    .any(want);
    let traj = if needs_run {
        Some(simulate(settings, &cfg)?)
    } else {
        None
    };
    let h = cfg.h;

    if let (true, Some(traj)) = (want(ProbeKind::Supnorm), &traj) {
        let rep = supnorm_probe(traj)?;
        let mut t = Table::create(
            &man.file("supnorm.csv"),
            &["n", "t", "norm", "amplification", "envelope"],
        )?;
        for (i, &n) in traj.steps.iter().enumerate() {
            let amp = rep
                .amplification
                .get(i)
                .map(|a| real(*a))
                .unwrap_or_default();
            t.row(&[
                n.to_string(),
                real(n as f64 * h),
                real(rep.norms[i]),
                amp,
                real(rep.envelope[i]),
            ])?;
        }
        t.finish()?;
        lines.push(format!(
            "supnorm: max {:.4e}, max norm/envelope {:.4}, worst amplification excess {:.2e}",
            rep.max_norm(),
            rep.envelope_ratio(),
            rep.worst_amplification_excess(h)
        ));
    }

    if let (true, Some(traj)) = (want(ProbeKind::Lipschitz), &traj) {
        let rows = lipschitz_probe(traj, &settings.omegas, cfg.r());
        let mut t = Table::create(
            &man.file("lipschitz.csv"),
            &["n", "t", "omega", "modulus", "envelope"],
        )?;
        let mut worst = 0.0f64;
        for r in &rows {
            t.row(&[
                r.step.to_string(),
                real(r.t),
                real(r.omega),
                real(r.modulus),
                real(r.envelope),
            ])?;
            if r.envelope > 0.0 {
                worst = worst.max(r.modulus / r.envelope);
            }
        }
        t.finish()?;
        lines.push(format!("lipschitz: worst modulus/envelope {worst:.4}"));
    }

    if let (true, Some(traj)) = (want(ProbeKind::Weak), &traj) {
        let mut t = Table::create(&man.file("weak.csv"), &["n", "t", "G", "d"])?;
        let mut parts = Vec::new();
        for g in TestFunction::ALL {
            let d = weak_residuals(traj, g)?;
            for (i, v) in d.iter().enumerate() {
                let n = traj.steps[i];
                t.row(&[
                    n.to_string(),
                    real(n as f64 * h),
                    g.label().to_string(),
                    real(*v),
                ])?;
            }
            let max = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            parts.push(format!("{} {max:.3e}", g.label()));
        }
        t.finish()?;
        lines.push(format!("weak residual max: {}", parts.join(", ")));
    }

    if let (true, Some(traj)) = (want(ProbeKind::Entropy), &traj) {
        let a = entropy_descent(traj, Theta::NegLog);
        let b = entropy_descent(traj, Theta::TauLogTau);
        let mut t = Table::create(
            &man.file("entropy.csv"),
            &["n", "t", "neg_log", "tau_log_tau"],
        )?;
        for (i, &n) in traj.steps.iter().enumerate() {
            t.row(&[
                n.to_string(),
                real(n as f64 * h),
                real(a.values[i]),
                real(b.values[i]),
            ])?;
        }
        t.finish()?;
        lines.push(format!(
            "entropy: largest step increase {:.3e} (-log), {:.3e} (tau log tau)",
            a.max_increase, b.max_increase
        ));
    }

    if want(ProbeKind::Stability) {
        let a = settings.initial_state(cfg.cells)?;
        let b = settings.perturbed_state(cfg.cells)?;
        let table = stability_table(&cfg, &a, &b, Norm::L1, &settings.eps_list)?;
        let mut t = Table::create(
            &man.file("stability.csv"),
            &["epsilon", "ratio", "degenerate"],
        )?;
        for (eps, rep) in &table {
            t.row(&[real(*eps), real(rep.ratio), rep.degenerate.to_string()])?;
        }
        t.finish()?;
        let ratios: Vec<String> = table
            .iter()
            .map(|(e, r)| format!("{e}: {:.4}", r.ratio))
            .collect();
        lines.push(format!("stability L1 growth: {}", ratios.join(", ")));
    }

    man.set("probe", json!(format!("{kind:?}").to_lowercase()));
    man.write()?;
    Ok(lines)
}
