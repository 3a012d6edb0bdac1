//! One function per command, each returning a table plus derived quantities.

use std::f64::consts::PI;

use ffa_core::dynamics::{run_decay, run_wavepacket, RunOptions};
use ffa_core::model::{band_energy, spectral_density};
use ffa_core::resolvent::{find_poles_second_sheet, survival_asymptote, Asymptote, Pole};
use ffa_core::scattering::{reflectance, singularity_from_scattering_tol, Reflectance};
use ffa_core::selfenergy::{delta_shift, sigma, sigma_boundary, Side};
use ffa_core::spectrum::{
    biorthogonal_norm_factor, bound_states, find_singularities, reality_domain_scan, singularity_constraint_residual,
    spectrum_is_real, SingularityKind, SingularityReport,
};
use ffa_core::{Complex64, ModelParams};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::analysis::dominant_angular_frequency;
use crate::config::{CommandOptions, RunConfig};
use crate::output::{Cell, RunOutput, Table};
use crate::CliError;

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let p = &config.params;
    match &config.options {
        CommandOptions::Singularities { tol } => singularities(p, *tol),
        CommandOptions::DomainScan { re_ea_over_kappa0, im_points, kappa_points, kappa_max, im_max } => {
            domain_scan(*re_ea_over_kappa0, *im_points, *kappa_points, *kappa_max, *im_max)
        }
        CommandOptions::Reflectance { kpoints } => reflectance_sweep(p, *kpoints),
        CommandOptions::Wavepacket { spec, t_final, dt, snapshots } => {
            let run = run_wavepacket(p, spec, *t_final, &RunOptions { dt: Some(*dt), snapshots: *snapshots })?;
            let mut table = Table::new(vec!["t", "n", "reC", "imC", "abs2"]);
            for s in &run.snapshots {
                let rows = std::iter::once(s.c_a).chain(s.sites.iter().copied());
                for (n, c) in rows.enumerate() {
                    table.push(vec![Cell::Num(s.t), Cell::Int(n as i64), Cell::Num(c.re), Cell::Num(c.im), Cell::Num(c.norm_sqr())]);
                }
            }
            let mut derived = Map::new();
            derived.insert("lattice_size".into(), json!(run.snapshots[0].sites.len()));
            derived.insert("incident_norm".into(), json!(run.incident_norm));
            derived.insert("reflected_norm".into(), json!(run.reflected_norm));
            derived.insert("gain".into(), json!(run.gain));
            derived.insert("reflection_window".into(), json!([run.window.0, run.window.1]));
            derived.insert("impurity_row".into(), json!("n = 0 holds the impurity amplitude"));
            Ok(RunOutput { table, derived })
        }
        CommandOptions::Decay { t_final, dt, legacy_cn_init } => decay(p, *t_final, *dt, *legacy_cn_init),
        CommandOptions::Selfenergy { e_min, e_max, points } => selfenergy(p, *e_min, *e_max, *points),
        CommandOptions::Poles { region } => {
            let report = find_poles_second_sheet(p, *region)?;
            let mut table = Table::new(vec!["reZ", "imZ", "reResidue", "imResidue", "multiplicity"]);
            for pole in &report.poles {
                let (re, im) = match pole.residue {
                    Some(r) => (Cell::Num(r.re), Cell::Num(r.im)),
                    None => (Cell::Text("none".into()), Cell::Text("none".into())),
                };
                table.push(vec![Cell::Num(pole.z.re), Cell::Num(pole.z.im), re, im, Cell::Int(pole.multiplicity as i64)]);
            }
            let mut derived = Map::new();
            derived.insert("count".into(), json!(report.poles.len()));
            derived.insert("spectrum_is_real".into(), json!(spectrum_is_real(p)));
            if spectrum_is_real(p) {
                derived.insert("survival_asymptote".into(), asymptote_json(survival_asymptote(p)?.as_ref()));
            }
            Ok(RunOutput { table, derived })
        }
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn kind_name(kind: SingularityKind) -> &'static str {
    match kind {
        SingularityKind::Amplifying => "amplifying",
        SingularityKind::Absorbing => "absorbing",
    }
}

fn pole_json(pole: &Pole) -> Value {
    json!({
        "z": complex_json(pole.z),
        "residue": pole.residue.map(complex_json),
        "multiplicity": pole.multiplicity,
    })
}

fn asymptote_json(asymptote: Option<&Asymptote>) -> Value {
    match asymptote {
        None => json!({ "kind": "decay" }),
        Some(Asymptote::Plateau { level, pole }) => json!({ "kind": "plateau", "level": level, "pole": pole_json(pole) }),
        Some(Asymptote::Beating { mean, frequency, poles }) => json!({
            "kind": "beating",
            "mean": mean,
            "angular_frequency": frequency,
            "poles": [pole_json(&poles[0]), pole_json(&poles[1])],
        }),
        Some(Asymptote::Secular { pole }) => json!({ "kind": "secular", "pole": pole_json(pole) }),
    }
}

fn singularities(p: &ModelParams, tol: f64) -> Result<RunOutput, CliError> {
    let resolvent = find_singularities(p, tol)?;
    let scattering = singularity_from_scattering_tol(p, tol)?;
    let mut table = Table::new(vec!["route", "E0", "k0", "kind", "degenerate"]);
    let mut add = |route: &str, report: &SingularityReport| {
        for s in &report.singularities {
            table.push(vec![
                Cell::Text(route.into()),
                Cell::Num(s.energy),
                Cell::Num(s.momentum),
                Cell::Text(kind_name(s.kind).into()),
                Cell::Int(report.degenerate as i64),
            ]);
        }
    };
    add("resolvent", &resolvent);
    add("scattering", &scattering);

    let agree = resolvent.count() == scattering.count()
        && resolvent
            .singularities
            .iter()
            .zip(&scattering.singularities)
            .all(|(a, b)| (a.energy - b.energy).abs() <= 1e-9 && (a.momentum - b.momentum).abs() <= 1e-9);
    let mut fano = Vec::new();
    for s in &resolvent.singularities {
        if s.energy.abs() < p.band_edge() && spectral_density(p, s.energy) > 0.0 {
            let factor = biorthogonal_norm_factor(p, s.energy)?;
            fano.push(json!({ "E0": s.energy, "norm_factor": complex_json(factor) }));
        }
    }
    let bound = bound_states(p);
    let mut derived = Map::new();
    derived.insert("count".into(), json!(resolvent.count()));
    derived.insert("degenerate".into(), json!(resolvent.degenerate));
    derived.insert("routes_agree".into(), json!(agree));
    derived.insert("fano".into(), Value::Array(fano));
    derived.insert("spectrum_is_real".into(), json!(!bound.has_bound_states));
    derived.insert("xi".into(), json!([complex_json(bound.xi1), complex_json(bound.xi2)]));
    derived.insert("bound_energies".into(), Value::Array(bound.bound_energies.iter().map(|z| complex_json(*z)).collect()));
    if let Ok(residual) = singularity_constraint_residual(p) {
        derived.insert("constraint_residual".into(), json!(residual));
    }
    Ok(RunOutput { table, derived })
}

/// Thread pool honouring `FFA_THREADS`.
fn pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("FFA_THREADS") {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Invalid(format!("FFA_THREADS={v:?} is not a positive integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Io(e.to_string()))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

fn domain_scan(re: f64, im_points: usize, kappa_points: usize, kappa_max: f64, im_max: f64) -> Result<RunOutput, CliError> {
    let kappas = linspace(0.0, kappa_max, kappa_points);
    let ims = linspace(-im_max, im_max, im_points);
    let rows: Vec<Vec<bool>> = pool()?.install(|| {
        kappas
            .par_iter()
            .map(|&kr| reality_domain_scan(&[kr], &ims, re).map(|g| g.real))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut table = Table::new(vec!["kappaRatio", "imEa", "real"]);
    let mut real_count = 0usize;
    let mut widest_kappa: Option<f64> = None;
    for (&kr, row) in kappas.iter().zip(&rows) {
        for (&im, &real) in ims.iter().zip(row) {
            table.push(vec![Cell::Num(kr), Cell::Num(im), Cell::Int(real as i64)]);
            real_count += real as usize;
        }
        if row.iter().any(|r| *r) {
            widest_kappa = Some(kr);
        }
    }
    let mut derived = Map::new();
    derived.insert("kappa_points".into(), json!(kappa_points));
    derived.insert("im_points".into(), json!(im_points));
    derived.insert("real_count".into(), json!(real_count));
    derived.insert("largest_kappa_ratio_with_real_spectrum".into(), json!(widest_kappa));
    Ok(RunOutput { table, derived })
}

fn reflectance_sweep(p: &ModelParams, kpoints: usize) -> Result<RunOutput, CliError> {
    let ks: Vec<f64> = (1..=kpoints).map(|i| PI * i as f64 / (kpoints + 1) as f64).collect();
    let values: Vec<(f64, Reflectance)> = pool()?.install(|| {
        ks.par_iter()
            .map(|&k| Ok((band_energy(p, k)?, reflectance(p, k)?)))
            .collect::<Result<Vec<_>, ffa_core::FfaError>>()
    })?;
    let mut table = Table::new(vec!["k", "E", "R", "Rflag"]);
    let mut divergent = Vec::new();
    let (mut r_min, mut r_max) = (f64::INFINITY, 0.0f64);
    for (&k, &(e, r)) in ks.iter().zip(&values) {
        match r {
            Reflectance::Finite(x) => {
                r_min = r_min.min(x);
                r_max = r_max.max(x);
                table.push(vec![Cell::Num(k), Cell::Num(e), Cell::Num(x), Cell::Int(0)]);
            }
            Reflectance::Divergent(_) => {
                divergent.push(k);
                table.push(vec![Cell::Num(k), Cell::Num(e), Cell::Inf, Cell::Int(1)]);
            }
        }
    }
    let mut derived = Map::new();
    derived.insert("divergent_k".into(), json!(divergent));
    derived.insert("min_finite_R".into(), json!(r_min.is_finite().then_some(r_min)));
    derived.insert("max_finite_R".into(), json!(r_max));
    if !p.is_hermitian() {
        let s = singularity_from_scattering_tol(p, 1e-9)?;
        derived.insert(
            "singular_momenta".into(),
            Value::Array(s.singularities.iter().map(|s| json!({ "k0": s.momentum, "kind": kind_name(s.kind) })).collect()),
        );
    }
    Ok(RunOutput { table, derived })
}

fn decay(p: &ModelParams, t_final: f64, dt: f64, legacy: bool) -> Result<RunOutput, CliError> {
    let run = run_decay(p, t_final, Some(dt), legacy)?;
    let mut table = Table::new(vec!["t", "P", "reCa", "imCa"]);
    for s in &run.samples {
        table.push(vec![Cell::Num(s.t), Cell::Num(s.probability), Cell::Num(s.amplitude.re), Cell::Num(s.amplitude.im)]);
    }
    let probs: Vec<f64> = run.samples.iter().map(|s| s.probability).collect();
    let step = run.samples[1].t - run.samples[0].t;
    let late = &probs[probs.len() / 2..];
    let mut derived = Map::new();
    derived.insert("lattice_size".into(), json!(run.lattice_size));
    derived.insert("legacy_cn_init".into(), json!(legacy));
    derived.insert("final_probability".into(), json!(probs.last()));
    derived.insert("late_mean_probability".into(), json!(late.iter().sum::<f64>() / late.len() as f64));
    // Skip the initial transient when looking for the beat.
    derived.insert("dominant_angular_frequency".into(), json!(dominant_angular_frequency(&probs[probs.len() / 4..], step)));
    derived.insert("spectrum_is_real".into(), json!(spectrum_is_real(p)));
    if spectrum_is_real(p) {
        derived.insert("survival_asymptote".into(), asymptote_json(survival_asymptote(p)?.as_ref()));
    }
    Ok(RunOutput { table, derived })
}

fn selfenergy(p: &ModelParams, e_min: f64, e_max: f64, points: usize) -> Result<RunOutput, CliError> {
    let edge = p.band_edge();
    let mut table = Table::new(vec!["E", "reSigmaUpper", "imSigmaUpper", "reSigmaLower", "imSigmaLower", "Delta", "V"]);
    for e in linspace(e_min, e_max, points) {
        let (up, down) = if e.abs() < edge && p.kappa_a() > 0.0 {
            (sigma_boundary(p, e, Side::Upper)?, sigma_boundary(p, e, Side::Lower)?)
        } else if e.abs() > edge && p.kappa_a() > 0.0 {
            let s = sigma(p, Complex64::new(e, 0.0))?;
            (s, s)
        } else {
            let s = Complex64::new(delta_shift(p, e), 0.0);
            (s, s)
        };
        table.push(vec![
            Cell::Num(e),
            Cell::Num(up.re),
            Cell::Num(up.im),
            Cell::Num(down.re),
            Cell::Num(down.im),
            Cell::Num(delta_shift(p, e)),
            Cell::Num(spectral_density(p, e)),
        ]);
    }
    let mut derived = Map::new();
    derived.insert("band_edge".into(), json!(edge));
    derived.insert("coupling_weight".into(), json!(p.kappa_a() * p.kappa_a()));
    Ok(RunOutput { table, derived })
}
