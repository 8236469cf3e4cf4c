//! End-to-end checks against reference values, one line per criterion.
//!
//! Runs with its own harness so every criterion reports even when an
//! earlier one fails; the process exits non-zero if any did.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringtraffic::config::ExperimentKind;
use ringtraffic::lane_change::{
    frustration_update, per_step_attempt_probability, LaneChangeParams, AGGRESSIVE_VEHICLE,
    CONTROL_VEHICLE,
};
use ringtraffic::metrics::{
    cyclic_amplitudes, fit_growth_rate, flow_rate, imbalance_series, lane_change_counts,
    mean_velocity, CycleDetection,
};
use ringtraffic::model::{
    equilibrium_flow, fundamental_diagram_summary, per_hour, per_km, DEFAULT_RHO_RESOLUTION,
};
use ringtraffic::single_lane::ring_headway;
use ringtraffic::stability::{
    build_jacobian_dense, characteristic_roots, closed_form_eigenvalues, critical_reaction_time,
    max_growth_rate, ring_wave_period, BranchRange, JacobianSpec, TauSearch,
};
use ringtraffic::{
    run_scenario, run_single_lane, run_two_lane, ModelParams, ScenarioConfig, SingleLaneScenario,
    TrajectoryRecord, TwoLaneScenario,
};

type Check = Result<(bool, String), String>;

fn ok(pass: bool, detail: String) -> Check {
    Ok((pass, detail))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn fundamental_diagram() -> Check {
    let s = fundamental_diagram_summary(&ModelParams::default(), DEFAULT_RHO_RESOLUTION)
        .map_err(err)?;
    let (q, rho, jam) = (per_hour(s.q_star), per_km(s.rho_star), per_km(s.rho_jam));
    let pass = within(q, 2065.0, 0.01 * 2065.0)
        && within(rho, 34.0, 1.0)
        && within(jam, 400.0 / 3.0, 1e-9);
    ok(
        pass,
        format!("q* = {q:.2} veh/h, rho* = {rho:.3} veh/km, rho_jam = {jam:.4} veh/km"),
    )
}

fn equilibrium_flow_n50() -> Check {
    let q = equilibrium_flow(0.05, &ModelParams::default()).map_err(err)?;
    ok(
        (0.53..=0.54).contains(&q),
        format!("q(0.05/m) = {q:.5} veh/s"),
    )
}

fn eigenvalue_oracle() -> Check {
    let p = ModelParams::default();
    let mut worst: f64 = 0.0;
    let mut distinct = true;
    for n in 2..=12 {
        let j = build_jacobian_dense(n, &p).map_err(err)?;
        let numeric: Vec<Complex64> = DMatrix::from_row_slice(j.dim, j.dim, &j.entries)
            .complex_eigenvalues()
            .iter()
            .map(|z| Complex64::new(z.re, z.im))
            .collect();
        let closed = closed_form_eigenvalues(n, &p).map_err(err)?;
        if closed.len() != n - 1 || numeric.len() != n - 1 {
            return ok(false, format!("N={n}: expected {} eigenvalues", n - 1));
        }
        let mut used = vec![false; numeric.len()];
        for e in &closed {
            let (idx, dist) = numeric
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, (z - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("unmatched eigenvalue left");
            used[idx] = true;
            worst = worst.max(dist);
        }
        for (a, ea) in closed.iter().enumerate() {
            distinct &= closed[a + 1..].iter().all(|eb| (ea - eb).norm() > 1e-9);
        }
    }
    ok(
        worst < 1e-9 && distinct,
        format!("worst mismatch {worst:.2e} over N=2..12, distinct: {distinct}"),
    )
}

fn root_residuals() -> Check {
    let spec = JacobianSpec::new(50, &ModelParams::default()).map_err(err)?;
    let br = BranchRange { lo: -8, hi: 8 };
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in 0..=16 {
        let delay = 0.05 * k as f64;
        for &d in &spec.eigenvalues {
            for lam in characteristic_roots(d, delay, &br).map_err(err)? {
                let r = (lam - d * (-lam * delay).exp()).norm() / lam.norm().max(d.norm());
                worst = worst.max(r);
                count += 1;
            }
        }
    }
    ok(
        worst < 1e-10,
        format!("{count} roots, worst relative residual {worst:.2e}"),
    )
}

fn critical_time() -> Check {
    let p = ModelParams::default();
    let search = TauSearch::default();
    let ns = [10, 25, 50, 75, 100, 133];
    let taus: Vec<f64> = ns
        .iter()
        .map(|&n| critical_reaction_time(n, &p, &search))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let (t50, t133) = (taus[2], taus[5]);
    let mono = taus.windows(2).all(|w| w[1] <= w[0]);
    let pass = (0.65..=0.75).contains(&t50) && (0.48..=0.52).contains(&t133) && mono;
    let curve: Vec<String> = ns
        .iter()
        .zip(&taus)
        .map(|(n, t)| format!("{n}:{t:.4}"))
        .collect();
    ok(
        pass,
        format!(
            "tau(50) = {t50:.4} s, tau(133) = {t133:.4} s, nonincreasing: {mono} [{}]",
            curve.join(" ")
        ),
    )
}

const DT: f64 = 0.01;

fn growth_k(delay: f64) -> Result<(f64, TrajectoryRecord), String> {
    let p = ModelParams::default();
    let rec =
        run_single_lane(&SingleLaneScenario::perturbed_ring(delay, DT, 1200.0)).map_err(err)?;
    let period = ring_wave_period(50, &p).map_err(err)?;
    let det = CycleDetection::for_params(&p).with_separation((0.75 * period / DT).round() as usize);
    let v = &rec.probe(0).ok_or("vehicle 0 not probed")?.velocities;
    let fit = cyclic_amplitudes(v, p.ring_velocity(50), &det)
        .and_then(|f| fit_growth_rate(&f))
        .map_err(err)?;
    Ok((fit.k, rec))
}

fn nonlinear_growth() -> Check {
    let (k0, _) = growth_k(0.0)?;
    let (k5, _) = growth_k(0.5)?;
    let (k75, rec) = growth_k(0.75)?;
    let crash = rec
        .termination
        .is_collision()
        .then(|| rec.termination.time());
    let pass = within(k0, -1.073, 0.1)
        && within(k5, -0.79, 0.1)
        && within(k75, 0.443, 0.1)
        && crash.is_some_and(|t| within(t, 217.0, 10.0));
    let crash = crash.map_or("no crash".into(), |t| format!("crash at {t:.2} s"));
    ok(
        pass,
        format!("k(0) = {k0:+.3}, k(0.5) = {k5:+.3}, k(0.75) = {k75:+.3}, {crash}"),
    )
}

fn sign_agreement() -> Check {
    let p = ModelParams::default();
    let delays = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.65, 0.7, 0.75];
    let mut pass = true;
    let mut rows = Vec::new();
    for &d in &delays {
        let (k, _) = growth_k(d)?;
        let lsa = max_growth_rate(50, d, &p, &BranchRange::default())
            .map_err(err)?
            .max_real_part;
        pass &= (k > 0.0) == (lsa > 0.0);
        if d == 0.65 {
            pass &= k < 0.0 && lsa < 0.0;
        }
        if d == 0.75 {
            pass &= k > 0.0 && lsa > 0.0;
        }
        rows.push(format!("{d}:{k:+.3}/{lsa:+.1e}"));
    }
    ok(pass, format!("delay:k/maxRe {}", rows.join(" ")))
}

fn load_balancing() -> Check {
    let mut good = 0;
    let mut rows = Vec::new();
    for seed in 0..10 {
        let rec = run_two_lane(&TwoLaneScenario::load_balance(seed)).map_err(err)?;
        let imb = imbalance_series(&rec).map_err(err)?;
        let dn = imb[rec.sample_index_at(60.0).ok_or("run ended before 60 s")?].1;
        let qs: Vec<f64> = (60..=100)
            .map(|t| flow_rate(&rec, t as f64, 500.0, 5.0))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let q = qs.iter().sum::<f64>() / qs.len() as f64;
        if dn <= 10 && q >= 0.9 {
            good += 1;
        }
        rows.push(format!("{dn}/{q:.2}"));
    }
    ok(
        good >= 8,
        format!("{good}/10 seeds pass; dN(60)/mean Q [{}]", rows.join(" ")),
    )
}

fn aggressive_driver() -> Check {
    let (mut na, mut nc, mut adv) = (0.0, 0.0, 0.0);
    let replicas = 20;
    for seed in 0..replicas {
        let rec = run_two_lane(&TwoLaneScenario::aggressive(seed)).map_err(err)?;
        let counts = lane_change_counts(&rec);
        na += counts[AGGRESSIVE_VEHICLE] as f64;
        nc += counts[CONTROL_VEHICLE] as f64;
        let va = mean_velocity(rec.probe(AGGRESSIVE_VEHICLE).ok_or("not probed")?).map_err(err)?;
        let vc = mean_velocity(rec.probe(CONTROL_VEHICLE).ok_or("not probed")?).map_err(err)?;
        adv += va / vc - 1.0;
    }
    let n = replicas as f64;
    let (na, nc, adv) = (na / n, nc / n, adv / n);
    let ratio = na / nc;
    let pass = (2.5..=6.0).contains(&ratio) && adv < 0.03;
    ok(
        pass,
        format!(
            "changes {na:.2} vs {nc:.2} (ratio {ratio:.2}), velocity advantage {:.2}%",
            100.0 * adv
        ),
    )
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_owned()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).expect("readable output dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path
                    .strip_prefix(dir)
                    .expect("inside")
                    .display()
                    .to_string();
                out.insert(rel, fs::read(&path).expect("readable csv"));
            }
        }
    }
    out
}

fn determinism() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    for kind in [ExperimentKind::LoadBalance, ExperimentKind::Aggressive] {
        let cfg = ScenarioConfig::defaults(kind);
        let a = tempfile::tempdir().map_err(err)?;
        let b = tempfile::tempdir().map_err(err)?;
        run_scenario(&cfg, a.path(), 1).map_err(err)?;
        run_scenario(&cfg, b.path(), 4).map_err(err)?;
        let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
        let same = !fa.is_empty() && fa == fb;
        pass &= same;
        details.push(format!(
            "{kind}: {} CSVs {}",
            fa.len(),
            if same { "identical" } else { "differ" }
        ));
    }
    ok(pass, details.join(", "))
}

fn properties() -> Check {
    let mut failures = Vec::new();

    for delay in [0.0, 0.5] {
        let mut sc = SingleLaneScenario::perturbed_ring(delay, DT, 100.0);
        sc.perturbation = None;
        let rec = run_single_lane(&sc).map_err(err)?;
        let dev = rec
            .samples
            .iter()
            .flat_map(|s| {
                (0..50).map(move |j| (ring_headway(&s.positions, j, 1000.0) - 20.0).abs())
            })
            .fold(0.0, f64::max);
        if dev > 1e-9 {
            failures.push(format!("equilibrium drifts by {dev:e} at delay {delay}"));
        }
    }

    let rec = run_single_lane(&SingleLaneScenario::perturbed_ring(0.5, DT, 300.0)).map_err(err)?;
    for s in &rec.samples {
        let sum: f64 = (0..50).map(|j| ring_headway(&s.positions, j, 1000.0)).sum();
        if (sum - 1000.0).abs() > 1e-9 {
            failures.push(format!("headway sum {sum} at t = {}", s.time));
            break;
        }
    }

    let rec = run_two_lane(&TwoLaneScenario::load_balance(3)).map_err(err)?;
    if rec
        .samples
        .iter()
        .flat_map(|s| s.phi.iter().flatten())
        .any(|&phi| phi < 0.0)
    {
        failures.push("negative frustration".into());
    }
    let lp = LaneChangeParams {
        r: 0.1,
        p: 0.2,
        rng_seed: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let phi = rng.gen_range(0.0..5.0);
        let dt = rng.gen_range(1e-3..1.0);
        let one = per_step_attempt_probability(phi, dt);
        let two = per_step_attempt_probability(phi, 2.0 * dt);
        if (1.0 - (1.0 - one).powi(2) - two).abs() > 1e-12 {
            failures.push(format!(
                "probability composition fails at phi = {phi}, dt = {dt}"
            ));
            break;
        }
        let next = frustration_update(
            phi,
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.0..100.0),
            0,
            &lp,
            dt,
        );
        if next < 0.0 {
            failures.push("frustration update went negative".into());
            break;
        }
    }

    for (a, k) in [(0.3, -1.073), (0.05, 0.443), (2.0, -0.79)] {
        let f: Vec<f64> = (1..=8).map(|n| a * (k * n as f64).exp()).collect();
        let fit = fit_growth_rate(&f).map_err(err)?;
        if !within(fit.k, k, 1e-9) || !within(fit.a, a, 1e-9 * a) {
            failures.push(format!(
                "growth fit returned ({}, {}) for ({a}, {k})",
                fit.a, fit.k
            ));
        }
    }

    let pass = failures.is_empty();
    ok(
        pass,
        if pass {
            "equilibrium, headway sum, phi >= 0, composition, growth fit".into()
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("fundamental diagram", fundamental_diagram),
        ("equilibrium flow at N=50", equilibrium_flow_n50),
        ("eigenvalue oracle", eigenvalue_oracle),
        ("characteristic-root residuals", root_residuals),
        ("critical reaction time", critical_time),
        ("nonlinear growth rates and crash time", nonlinear_growth),
        ("linear/nonlinear sign agreement", sign_agreement),
        ("load balancing", load_balancing),
        ("aggressive driver", aggressive_driver),
        ("determinism", determinism),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
