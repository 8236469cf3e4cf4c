//! Run a resolved [`ScenarioConfig`] end to end and write its artifacts.
//!
//! Every run writes `config.toml` (the resolved config), CSV files with a
//! `#` metadata header, and `manifest.json` listing all of them. Replicas of
//! stochastic experiments run on a thread pool but are written in replica
//! order, so the bytes on disk depend only on the config.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{ExperimentKind, ScenarioConfig};
use crate::error::{Error, Result};
use crate::lane_change::{
    run_two_lane, LaneChangeParams, TwoLaneScenario, VehicleInit, CONTROL_VEHICLE,
};
use crate::metrics::{
    aggregate_monte_carlo, cyclic_amplitudes, fit_growth_rate, flow_field, flow_series,
    imbalance_series, lane_change_series, mean_velocity, CycleDetection, MonteCarloSummary,
};
use crate::model::{
    equilibrium_flow, fundamental_diagram_summary, fundamental_diagram_table, per_hour, per_km,
    DEFAULT_RHO_RESOLUTION,
};
use crate::single_lane::{run_single_lane, SingleLaneScenario};
use crate::stability::{
    critical_reaction_time, max_growth_rate, ring_wave_period, BranchRange, TauSearch,
};
use crate::trajectory::{CsvHeader, Recording, TrajectoryRecord};

pub const TOOL_VERSION: &str = concat!("ringtraffic ", env!("CARGO_PKG_VERSION"));

/// Spacing of the time grid for series and state snapshots on disk, s.
pub const SERIES_INTERVAL: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminationSummary {
    pub replica: usize,
    pub seed: Option<u64>,
    pub reason: String,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub kind: ExperimentKind,
    pub config: ScenarioConfig,
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    /// Paths relative to the output directory, in write order.
    pub artifacts: Vec<String>,
    pub terminations: Vec<TerminationSummary>,
    /// Headline numbers of the experiment.
    pub results: serde_json::Value,
    pub wall_clock_s: f64,
}

impl RunManifest {
    /// Whether any run stopped on a collision.
    pub fn collided(&self) -> bool {
        self.terminations.iter().any(|t| t.reason == "collision")
    }

    /// Process exit status for this outcome. A collision ends a single-lane
    /// run as a result, not a failure; for two-lane runs it is reported.
    pub fn exit_code(&self) -> i32 {
        if self.collided() && self.kind.is_two_lane() {
            4
        } else {
            0
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: Some(e.line()),
            message: e.to_string(),
        })
    }
}

struct Artifacts {
    root: PathBuf,
    written: Vec<String>,
    header: CsvHeader,
}

impl Artifacts {
    fn new(root: &Path, cfg: &ScenarioConfig) -> Result<Self> {
        fs::create_dir_all(root)?;
        let header = CsvHeader::new()
            .with("tool", TOOL_VERSION)
            .with("kind", cfg.kind)
            .with("config_sha256", cfg.hash());
        Ok(Artifacts {
            root: root.to_owned(),
            written: Vec::new(),
            header,
        })
    }

    fn header(&self, seed: Option<u64>, seeds: &[u64]) -> CsvHeader {
        let mut h = self.header.clone();
        match (seed, seeds) {
            (Some(s), _) => h.push("seed", s),
            (None, []) => h.push("seed", "none"),
            (None, s) => h.push("seeds", format!("{}..={}", s[0], s[s.len() - 1])),
        }
        h
    }

    fn create(&mut self, rel: &str) -> Result<BufWriter<File>> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        self.written.push(rel.to_owned());
        Ok(BufWriter::new(File::create(path)?))
    }

    fn csv(
        &mut self,
        rel: &str,
        header: &CsvHeader,
        columns: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<()> {
        let mut w = self.create(rel)?;
        header.write(&mut w)?;
        writeln!(w, "{columns}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Run `f(replica, seed)` for every replica on `workers` threads (0 = all
/// cores); results come back in replica order.
pub fn run_replicas<T, F>(seeds: &[u64], workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    let out: Vec<Result<T>> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &s)| f(i, s))
            .collect()
    });
    out.into_iter().collect()
}

/// Execute the configured experiment, writing into `out`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path, workers: usize) -> Result<RunManifest> {
    cfg.validate()?;
    let started = Instant::now();
    let mut art = Artifacts::new(out, cfg)?;
    {
        let mut w = art.create("config.toml")?;
        w.write_all(cfg.to_toml().as_bytes())?;
        w.flush()?;
    }
    log::info!("running {} into {}", cfg.kind, out.display());

    let (seeds, terminations, results) = match cfg.kind {
        ExperimentKind::FundamentalDiagram => (vec![], vec![], fundamental_diagram(cfg, &mut art)?),
        ExperimentKind::SingleLane => {
            let (t, r) = single_lane(cfg, &mut art)?;
            (vec![], vec![t], r)
        }
        ExperimentKind::Stability => (vec![], vec![], stability(cfg, &mut art)?),
        ExperimentKind::TauCurve => (vec![], vec![], tau_curve(cfg, &mut art)?),
        ExperimentKind::LoadBalance | ExperimentKind::Custom => {
            let (t, r) = lane_balance(cfg, &mut art, workers)?;
            (cfg.seeds(), t, r)
        }
        ExperimentKind::Aggressive => {
            let (t, r) = aggressive(cfg, &mut art, workers)?;
            (cfg.seeds(), t, r)
        }
    };

    let manifest = RunManifest {
        tool_version: TOOL_VERSION.into(),
        kind: cfg.kind,
        config: cfg.clone(),
        config_sha256: cfg.hash(),
        seeds,
        artifacts: art.written.clone(),
        terminations,
        results,
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(out.join("manifest.json"), text + "\n")?;
    log::info!("{} finished in {:.2} s", cfg.kind, manifest.wall_clock_s);
    Ok(manifest)
}

fn fundamental_diagram(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<serde_json::Value> {
    let p = &cfg.params;
    let table = fundamental_diagram_table(p, cfg.diagram_points)?;
    let h = art.header(None, &[]);
    art.csv(
        "fundamental_diagram.csv",
        &h,
        "rho_veh_per_km,v_eq_m_per_s,q_veh_per_hr",
        table
            .iter()
            .map(|d| format!("{},{},{}", per_km(d.rho), d.v_eq, per_hour(d.q))),
    )?;
    let s = fundamental_diagram_summary(p, DEFAULT_RHO_RESOLUTION)?;
    let rho_ring = cfg.n_vehicles as f64 / p.track_length;
    Ok(json!({
        "q_star_veh_per_h": per_hour(s.q_star),
        "rho_star_veh_per_km": per_km(s.rho_star),
        "rho_jam_veh_per_km": per_km(s.rho_jam),
        "ring_density_veh_per_km": per_km(rho_ring),
        "ring_flow_veh_per_s": equilibrium_flow(rho_ring, p)?,
    }))
}

/// Header for a state file: the CSV header plus parameters and how the run ended.
fn run_header(h: &CsvHeader, cfg: &ScenarioConfig, rec: &TrajectoryRecord) -> CsvHeader {
    let p = &cfg.params;
    let mut h = h.clone();
    h.push(
        "params",
        format!(
            "lambda={} v_max={} d_min={} car_size={} track_length={}",
            p.lambda_rate, p.v_max, p.d_min, p.car_size, p.track_length
        ),
    );
    h.push("delay_s", cfg.delay);
    h.push("dt_s", cfg.dt);
    h.push("termination", rec.termination.reason());
    h.push("end_time_s", rec.termination.time());
    h
}

fn summary(replica: usize, seed: Option<u64>, rec: &TrajectoryRecord) -> TerminationSummary {
    TerminationSummary {
        replica,
        seed,
        reason: rec.termination.reason().into(),
        time: rec.termination.time(),
    }
}

/// Minimum spacing of oscillation minima, in steps, from the config.
pub fn growth_separation(cfg: &ScenarioConfig) -> usize {
    match ring_wave_period(cfg.n_vehicles, &cfg.params) {
        Ok(period) => (cfg.growth.separation_periods * period / cfg.dt).round() as usize,
        Err(_) => 0,
    }
}

pub fn single_lane_scenario(cfg: &ScenarioConfig) -> SingleLaneScenario {
    let stride = match cfg.record_stride {
        0 => Recording::default_for(cfg.n_vehicles).stride,
        s => s,
    };
    SingleLaneScenario {
        params: cfg.params,
        n_vehicles: cfg.n_vehicles,
        delay: cfg.delay,
        dt: cfg.dt,
        t_end: cfg.t_end,
        perturbation: (cfg.perturbation.displacement != 0.0).then_some(cfg.perturbation),
        recording: Recording::every(stride).with_probes(vec![cfg.growth.vehicle]),
    }
}

fn single_lane(
    cfg: &ScenarioConfig,
    art: &mut Artifacts,
) -> Result<(TerminationSummary, serde_json::Value)> {
    let rec = run_single_lane(&single_lane_scenario(cfg))?;
    let h = art.header(None, &[]);
    {
        let mut w = art.create("state.csv")?;
        rec.thinned(SERIES_INTERVAL)
            .write_state_csv(&mut w, &run_header(&h, cfg, &rec))?;
        w.flush()?;
    }
    let probe = rec.probe(cfg.growth.vehicle).expect("probe recorded");
    art.csv(
        "probe.csv",
        &h,
        "t,vehicle,v",
        probe
            .velocities
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{},{},{}", i as f64 * cfg.dt, probe.vehicle, v)),
    )?;

    let det = CycleDetection {
        prominence_floor: cfg.growth.prominence_floor * cfg.params.v_max,
        min_separation: growth_separation(cfg),
    };
    let v_eq = cfg.params.ring_velocity(cfg.n_vehicles);
    let growth = cyclic_amplitudes(&probe.velocities, v_eq, &det).and_then(|f| fit_growth_rate(&f));
    let growth_json = match &growth {
        Ok(fit) => {
            let mut w = art.create("growth_fit.csv")?;
            fit.write_csv(&mut w, &h)?;
            w.flush()?;
            json!({ "k": fit.k, "a": fit.a, "cycles": fit.cycles.len(), "residual": fit.residual })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };

    let flow_json = match flow_field(&rec, cfg.flow.delta, cfg.flow.grid_t, cfg.flow.grid_x) {
        Ok(ff) => {
            let mut w = art.create("flow_field.csv")?;
            ff.write_csv(&mut w, &h)?;
            w.flush()?;
            json!({ "delta_s": ff.delta, "grid": [cfg.flow.grid_t, cfg.flow.grid_x] })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };

    let lsa = max_growth_rate(cfg.n_vehicles, cfg.delay, &cfg.params, &branches(cfg))?;
    let results = json!({
        "termination": rec.termination.reason(),
        "end_time_s": rec.termination.time(),
        "collision": rec.termination.is_collision(),
        "growth": growth_json,
        "flow_field": flow_json,
        "linear_max_real_part_per_s": lsa.max_real_part,
        "linear_stable": lsa.stable,
    });
    Ok((summary(0, None, &rec), results))
}

fn branches(cfg: &ScenarioConfig) -> BranchRange {
    BranchRange {
        lo: cfg.stability.branch_lo,
        hi: cfg.stability.branch_hi,
    }
}

fn stability(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<serde_json::Value> {
    let br = branches(cfg);
    let rows: Vec<(f64, f64)> = cfg
        .stability
        .delays
        .par_iter()
        .map(|&d| {
            Ok((
                d,
                max_growth_rate(cfg.n_vehicles, d, &cfg.params, &br)?.max_real_part,
            ))
        })
        .collect::<Result<_>>()?;
    let h = art.header(None, &[]);
    art.csv(
        "stability.csv",
        &h,
        "delta_s,max_re_per_s",
        rows.iter().map(|(d, m)| format!("{d},{m}")),
    )?;
    let search = TauSearch {
        tol: cfg.stability.tol,
        branches: br.clone(),
        ..TauSearch::default()
    };
    let tau = critical_reaction_time(cfg.n_vehicles, &cfg.params, &search)?;
    Ok(json!({ "n_vehicles": cfg.n_vehicles, "branch_count": br.count(), "tau_s": tau }))
}

fn tau_curve(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<serde_json::Value> {
    let search = TauSearch {
        tol: cfg.stability.tol,
        branches: branches(cfg),
        ..TauSearch::default()
    };
    let rows: Vec<(usize, f64)> = cfg
        .stability
        .n_list
        .par_iter()
        .map(|&n| Ok((n, critical_reaction_time(n, &cfg.params, &search)?)))
        .collect::<Result<_>>()?;
    let h = art.header(None, &[]);
    art.csv(
        "tau_curve.csv",
        &h,
        "n_vehicles,tau_s",
        rows.iter().map(|(n, t)| format!("{n},{t}")),
    )?;
    let nonincreasing = rows
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + cfg.stability.tol);
    Ok(json!({ "points": rows.len(), "nonincreasing": nonincreasing }))
}

fn lane_params(cfg: &ScenarioConfig, seed: u64) -> LaneChangeParams {
    LaneChangeParams {
        r: cfg.lane_change.r,
        p: cfg.lane_change.p,
        rng_seed: seed,
    }
}

/// Two-lane scenario for one replica of a `load-balance`, `aggressive` or `custom` config.
pub fn two_lane_scenario(cfg: &ScenarioConfig, seed: u64) -> TwoLaneScenario {
    let lp = lane_params(cfg, seed);
    let p = cfg.params;
    let mut sc = match cfg.kind {
        ExperimentKind::Aggressive => {
            TwoLaneScenario::with_aggressive_driver(p, cfg.n_vehicles / 2, lp, cfg.dt, cfg.t_end)
        }
        ExperimentKind::Custom if !cfg.vehicles.is_empty() => {
            let mut sc = TwoLaneScenario::one_lane_full(p, 2, lp, cfg.dt, cfg.t_end);
            sc.vehicles = cfg.vehicles.clone();
            sc
        }
        _ => TwoLaneScenario::one_lane_full(p, cfg.n_vehicles, lp, cfg.dt, cfg.t_end),
    };
    sc.delay = cfg.delay;
    sc.recording.stride = match cfg.record_stride {
        0 => Recording::default_for(sc.vehicles.len()).stride,
        s => s,
    };
    sc
}

fn grid(rec: &TrajectoryRecord) -> Vec<f64> {
    let end = rec.samples.last().map_or(0.0, |s| s.time);
    (0..)
        .map(|k| k as f64 * SERIES_INTERVAL)
        .take_while(|&t| t <= end + 1e-9)
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn mc_rows(times: &[f64], cols: &[&MonteCarloSummary]) -> Vec<String> {
    times
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = t.to_string();
            for c in cols {
                row.push_str(&format!(",{},{}", c.mean[i], c.std[i]));
            }
            row
        })
        .collect()
}

fn truncate_common(mut runs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    for r in &mut runs {
        r.truncate(len);
    }
    runs
}

fn write_replica(
    art: &mut Artifacts,
    dir: &str,
    h: &CsvHeader,
    cfg: &ScenarioConfig,
    rec: &TrajectoryRecord,
) -> Result<()> {
    let mut w = art.create(&format!("{dir}/state.csv"))?;
    rec.thinned(SERIES_INTERVAL)
        .write_state_csv(&mut w, &run_header(h, cfg, rec))?;
    w.flush()?;
    let mut w = art.create(&format!("{dir}/events.csv"))?;
    rec.write_events_csv(&mut w, h)?;
    w.flush()?;
    Ok(())
}

/// Lane-imbalance and detector-flow series, per replica and aggregated.
fn lane_balance(
    cfg: &ScenarioConfig,
    art: &mut Artifacts,
    workers: usize,
) -> Result<(Vec<TerminationSummary>, serde_json::Value)> {
    let seeds = cfg.seeds();
    let recs = run_replicas(&seeds, workers, |_, seed| {
        run_two_lane(&two_lane_scenario(cfg, seed))
    })?;
    let x = cfg.flow.position * cfg.params.track_length;
    let delta = cfg.flow.delta;

    let mut imb_runs = Vec::new();
    let mut flow_runs = Vec::new();
    let mut terms = Vec::new();
    for (i, (rec, &seed)) in recs.iter().zip(&seeds).enumerate() {
        terms.push(summary(i, Some(seed), rec));
        let times = grid(rec);
        let imb = imbalance_series(rec)?;
        let dn: Vec<f64> = times
            .iter()
            .map(|&t| imb[rec.sample_index_at(t).expect("grid inside run")].1 as f64)
            .collect();
        let flow_times: Vec<f64> = times
            .iter()
            .copied()
            .filter(|&t| t >= delta - 1e-9)
            .collect();
        let q = flow_series(rec, x, delta, &flow_times)?;
        let dir = format!("replica_{i:03}");
        let h = art.header(Some(seed), &seeds);
        write_replica(art, &dir, &h, cfg, rec)?;
        let offset = times.len() - flow_times.len();
        art.csv(
            &format!("{dir}/series.csv"),
            &h,
            "t,delta_n,q_veh_per_s",
            times.iter().enumerate().map(|(k, t)| {
                let qk = k.checked_sub(offset).map(|j| q[j]);
                format!("{t},{},{}", dn[k], fmt_opt(qk))
            }),
        )?;
        imb_runs.push(dn);
        flow_runs.push(q);
    }

    let imb = aggregate_monte_carlo(&truncate_common(imb_runs))?;
    let flow = aggregate_monte_carlo(&truncate_common(flow_runs))?;
    let t_imb: Vec<f64> = (0..imb.mean.len())
        .map(|k| k as f64 * SERIES_INTERVAL)
        .collect();
    let first_q = (delta / SERIES_INTERVAL - 1e-9).ceil();
    let t_flow: Vec<f64> = (0..flow.mean.len())
        .map(|k| (first_q + k as f64) * SERIES_INTERVAL)
        .collect();
    let mut h = art.header(None, &seeds);
    art.csv(
        "imbalance.csv",
        &h,
        "t,delta_n_mean,delta_n_std",
        mc_rows(&t_imb, &[&imb]),
    )?;
    h.push("detector_m", x);
    h.push("window_s", delta);
    art.csv(
        "flow.csv",
        &h,
        "t,q_mean_veh_per_s,q_std_veh_per_s",
        mc_rows(&t_flow, &[&flow]),
    )?;

    let tail = |v: &[f64]| {
        let half = &v[v.len() / 2..];
        half.iter().sum::<f64>() / half.len().max(1) as f64
    };
    Ok((
        terms,
        json!({
            "replicas": seeds.len(),
            "detector_position_m": x,
            "delta_n_final_mean": imb.mean.last(),
            "delta_n_second_half_mean": tail(&imb.mean),
            "flow_second_half_mean_veh_per_s": tail(&flow.mean),
        }),
    ))
}

/// Lane-change counts and distances of the aggressive and the control driver.
fn aggressive(
    cfg: &ScenarioConfig,
    art: &mut Artifacts,
    workers: usize,
) -> Result<(Vec<TerminationSummary>, serde_json::Value)> {
    let seeds = cfg.seeds();
    let aggr = cfg.n_vehicles / 2;
    let ctrl = CONTROL_VEHICLE;
    let recs = run_replicas(&seeds, workers, |_, seed| {
        run_two_lane(&two_lane_scenario(cfg, seed))
    })?;

    let mut cols: [Vec<Vec<f64>>; 4] = Default::default();
    let mut terms = Vec::new();
    let (mut v_aggr, mut v_ctrl, mut n_aggr, mut n_ctrl) = (0.0, 0.0, 0.0, 0.0);
    for (i, (rec, &seed)) in recs.iter().zip(&seeds).enumerate() {
        terms.push(summary(i, Some(seed), rec));
        let times = grid(rec);
        let dl_a = lane_change_series(rec, aggr, &times);
        let dl_c = lane_change_series(rec, ctrl, &times);
        let idx: Vec<usize> = times
            .iter()
            .map(|&t| rec.sample_index_at(t).expect("grid inside run"))
            .collect();
        let x0 = &rec.samples[0].positions;
        let dist = |v: usize| -> Vec<f64> {
            idx.iter()
                .map(|&k| rec.samples[k].positions[v] - x0[v])
                .collect()
        };
        let (d_a, d_c) = (dist(aggr), dist(ctrl));
        let dir = format!("replica_{i:03}");
        let h = art.header(Some(seed), &seeds);
        write_replica(art, &dir, &h, cfg, rec)?;
        art.csv(
            &format!("{dir}/series.csv"),
            &h,
            "t,lane_changes_aggressive,lane_changes_control,distance_aggressive_m,distance_control_m",
            (0..times.len()).map(|k| format!("{},{},{},{},{}", times[k], dl_a[k], dl_c[k], d_a[k], d_c[k])),
        )?;
        n_aggr += *dl_a.last().unwrap_or(&0) as f64;
        n_ctrl += *dl_c.last().unwrap_or(&0) as f64;
        v_aggr += mean_velocity(rec.probe(aggr).expect("probe recorded"))?;
        v_ctrl += mean_velocity(rec.probe(ctrl).expect("probe recorded"))?;
        cols[0].push(dl_a.iter().map(|&c| c as f64).collect());
        cols[1].push(dl_c.iter().map(|&c| c as f64).collect());
        cols[2].push(d_a);
        cols[3].push(d_c);
    }

    let aggs: Vec<MonteCarloSummary> = cols
        .into_iter()
        .map(|c| aggregate_monte_carlo(&truncate_common(c)))
        .collect::<Result<_>>()?;
    let times: Vec<f64> = (0..aggs[0].mean.len())
        .map(|k| k as f64 * SERIES_INTERVAL)
        .collect();
    let h = art.header(None, &seeds);
    art.csv(
        "aggressive.csv",
        &h,
        "t,lane_changes_aggressive_mean,lane_changes_aggressive_std,lane_changes_control_mean,\
         lane_changes_control_std,distance_aggressive_mean_m,distance_aggressive_std_m,\
         distance_control_mean_m,distance_control_std_m",
        mc_rows(&times, &aggs.iter().collect::<Vec<_>>()),
    )?;

    let n = seeds.len() as f64;
    let (n_aggr, n_ctrl) = (n_aggr / n, n_ctrl / n);
    Ok((
        terms,
        json!({
            "replicas": seeds.len(),
            "aggressive_vehicle": aggr,
            "control_vehicle": ctrl,
            "lane_changes_aggressive_mean": n_aggr,
            "lane_changes_control_mean": n_ctrl,
            "lane_change_ratio": if n_ctrl > 0.0 { json!(n_aggr / n_ctrl) } else { json!(null) },
            "velocity_advantage": v_aggr / v_ctrl - 1.0,
        }),
    ))
}

/// Vehicles of a `custom` config as they will be placed.
pub fn custom_layout(cfg: &ScenarioConfig) -> Vec<VehicleInit> {
    two_lane_scenario(cfg, cfg.base_seed).vehicles
}
