//! Observables computed from recorded trajectories: flow rate, cyclic growth
//! rate of velocity oscillations, lane statistics, and replica aggregation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::trajectory::{CsvHeader, EventKind, Probe, TrajectoryRecord};

const TIME_EPS: f64 = 1e-9;

/// Times at which any vehicle crosses `x` (or one of its images `x + mL`),
/// located by linear interpolation between recorded samples. Sorted.
pub fn crossing_times(rec: &TrajectoryRecord, x: f64) -> Vec<f64> {
    let l = rec.track_length;
    let mut out = Vec::new();
    for pair in rec.samples.windows(2) {
        let (s0, s1) = (&pair[0], &pair[1]);
        for (a, b) in s0.positions.iter().zip(&s1.positions) {
            if b <= a {
                continue;
            }
            // images x + mL with a < x + mL <= b
            let mut m = ((a - x) / l).floor() + 1.0;
            loop {
                let img = x + m * l;
                if img <= *a {
                    m += 1.0;
                    continue;
                }
                if img > *b {
                    break;
                }
                let frac = (img - a) / (b - a);
                out.push(s0.time + frac * (s1.time - s0.time));
                m += 1.0;
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn count_in(sorted: &[f64], lo: f64, hi: f64) -> usize {
    // crossings in (lo, hi]
    let a = sorted.partition_point(|&t| t <= lo);
    let b = sorted.partition_point(|&t| t <= hi);
    b - a
}

fn check_window(rec: &TrajectoryRecord, t: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(Error::param(format!(
            "averaging window must be > 0, got {delta}"
        )));
    }
    let (first, last) = match (rec.samples.first(), rec.samples.last()) {
        (Some(f), Some(l)) => (f.time, l.time),
        _ => return Err(Error::Range("trajectory has no samples".into())),
    };
    if t - delta < first - TIME_EPS || t > last + TIME_EPS {
        return Err(Error::Range(format!(
            "window ({}, {t}] not covered by trajectory [{first}, {last}]",
            t - delta
        )));
    }
    Ok(())
}

/// Vehicles crossing `x` during `(t - δ, t]`, per second, summed over lanes.
pub fn flow_rate(rec: &TrajectoryRecord, t: f64, x: f64, delta: f64) -> Result<f64> {
    if !(0.0..rec.track_length).contains(&x) {
        return Err(Error::Range(format!(
            "position {x} outside [0, {})",
            rec.track_length
        )));
    }
    check_window(rec, t, delta)?;
    let times = crossing_times(rec, x);
    Ok(count_in(&times, t - delta, t) as f64 / delta)
}

/// `Q(t, x)` at each of `times` for a fixed `x`.
pub fn flow_series(rec: &TrajectoryRecord, x: f64, delta: f64, times: &[f64]) -> Result<Vec<f64>> {
    if !(0.0..rec.track_length).contains(&x) {
        return Err(Error::Range(format!(
            "position {x} outside [0, {})",
            rec.track_length
        )));
    }
    let crossings = crossing_times(rec, x);
    times
        .iter()
        .map(|&t| {
            check_window(rec, t, delta)?;
            Ok(count_in(&crossings, t - delta, t) as f64 / delta)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowField {
    pub delta: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// `q[i][j]` is the flow at `times[i]`, `positions[j]`, vehicles/s.
    pub q: Vec<Vec<f64>>,
}

impl FlowField {
    pub fn write_csv<W: Write>(&self, mut w: W, header: &CsvHeader) -> Result<()> {
        header.write(&mut w)?;
        writeln!(w, "t,x,q_veh_per_s")?;
        for (t, row) in self.times.iter().zip(&self.q) {
            for (x, q) in self.positions.iter().zip(row) {
                writeln!(w, "{t},{x},{q}")?;
            }
        }
        Ok(())
    }
}

/// Flow on an `n_t x n_x` grid: times evenly spread over the part of the run
/// where a full window is available, positions `jL/n_x`.
pub fn flow_field(rec: &TrajectoryRecord, delta: f64, n_t: usize, n_x: usize) -> Result<FlowField> {
    if n_t == 0 || n_x == 0 {
        return Err(Error::param("flow field grid must be non-empty"));
    }
    let (first, last) = match (rec.samples.first(), rec.samples.last()) {
        (Some(f), Some(l)) => (f.time, l.time),
        _ => return Err(Error::Range("trajectory has no samples".into())),
    };
    let t0 = first + delta;
    if t0 > last + TIME_EPS {
        return Err(Error::Range(format!(
            "run of {} s is shorter than the window {delta} s",
            last - first
        )));
    }
    let times: Vec<f64> = if n_t == 1 {
        vec![last]
    } else {
        (0..n_t)
            .map(|i| t0 + (last - t0) * i as f64 / (n_t - 1) as f64)
            .collect()
    };
    let positions: Vec<f64> = (0..n_x)
        .map(|j| rec.track_length * j as f64 / n_x as f64)
        .collect();
    let columns: Vec<Vec<f64>> = positions
        .iter()
        .map(|&x| flow_series(rec, x, delta, &times))
        .collect::<Result<_>>()?;
    let q = (0..n_t)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    Ok(FlowField {
        delta,
        times,
        positions,
        q,
    })
}

/// How oscillation minima are picked out of a velocity series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleDetection {
    /// Smallest prominence, m/s, for a local minimum to count.
    pub prominence_floor: f64,
    /// Minimum spacing between reported minima, in samples; 0 disables it.
    /// Deeper minima win. The start of the series counts as taken.
    pub min_separation: usize,
}

impl CycleDetection {
    pub fn for_params(p: &ModelParams) -> Self {
        CycleDetection {
            prominence_floor: 1e-6 * p.v_max,
            min_separation: 0,
        }
    }

    pub fn with_separation(mut self, samples: usize) -> Self {
        self.min_separation = samples;
        self
    }
}

/// Depth of the minimum at `i` below the lower of the two highest points
/// separating it from deeper terrain on either side.
fn prominence(v: &[f64], i: usize) -> f64 {
    let x = v[i];
    let mut left_max = x;
    for &y in v[..i].iter().rev() {
        if y < x {
            break;
        }
        left_max = left_max.max(y);
    }
    let mut right_max = x;
    for &y in &v[i + 1..] {
        if y < x {
            break;
        }
        right_max = right_max.max(y);
    }
    left_max.min(right_max) - x
}

/// Indices of the strict local minima that survive the prominence floor and
/// the separation rule, in time order.
pub fn oscillation_minima(series: &[f64], det: &CycleDetection) -> Vec<usize> {
    let mut cand: Vec<usize> = (1..series.len().saturating_sub(1))
        .filter(|&i| series[i] < series[i - 1] && series[i] < series[i + 1])
        .filter(|&i| prominence(series, i) >= det.prominence_floor)
        .collect();
    if det.min_separation > 0 {
        cand.sort_by(|&a, &b| series[a].total_cmp(&series[b]).then(a.cmp(&b)));
        let mut taken = vec![0usize];
        for i in cand {
            if taken.iter().all(|&t| t.abs_diff(i) >= det.min_separation) {
                taken.push(i);
            }
        }
        cand = taken.split_off(1);
        cand.sort_unstable();
    }
    cand
}

/// `f(n) = v_eq - v_min,n` for successive oscillation minima.
pub fn cyclic_amplitudes(series: &[f64], v_eq: f64, det: &CycleDetection) -> Result<Vec<f64>> {
    let minima = oscillation_minima(series, det);
    if minima.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "found {} oscillation minima, need at least 3",
            minima.len()
        )));
    }
    Ok(minima.iter().map(|&i| v_eq - series[i]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Cycle numbers (from 1) kept in the fit.
    pub cycles: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub a: f64,
    /// Cyclic growth rate; negative means the oscillation dies out.
    pub k: f64,
    /// Sum of squared residuals of `ln f(n)`.
    pub residual: f64,
}

impl GrowthFit {
    pub fn write_csv<W: Write>(&self, mut w: W, header: &CsvHeader) -> Result<()> {
        header.write(&mut w)?;
        writeln!(w, "n,f_n,a,k,residual")?;
        for (n, f) in self.cycles.iter().zip(&self.amplitudes) {
            writeln!(w, "{n},{f},{},{},{}", self.a, self.k, self.residual)?;
        }
        Ok(())
    }
}

/// Least-squares fit of `ln f(n) = ln a + k n` over cycles `n = 1, 2, ...`;
/// non-positive amplitudes are dropped.
pub fn fit_growth_rate(f: &[f64]) -> Result<GrowthFit> {
    let (cycles, amplitudes): (Vec<usize>, Vec<f64>) = f
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(i, &v)| (i + 1, v))
        .unzip();
    if cycles.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} positive amplitudes, need at least 3",
            cycles.len()
        )));
    }
    let m = cycles.len() as f64;
    let xs: Vec<f64> = cycles.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = amplitudes.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let k = sxy / sxx;
    let ln_a = my - k * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - ln_a - k * x).powi(2))
        .sum();
    Ok(GrowthFit {
        cycles,
        amplitudes,
        a: ln_a.exp(),
        k,
        residual,
    })
}

pub fn lane_imbalance(lanes: &[u8]) -> usize {
    let in0 = lanes.iter().filter(|&&l| l == 0).count();
    in0.abs_diff(lanes.len() - in0)
}

/// `(t, ΔN)` at every recorded sample of a two-lane run.
pub fn imbalance_series(rec: &TrajectoryRecord) -> Result<Vec<(f64, usize)>> {
    rec.samples
        .iter()
        .map(|s| {
            s.lanes
                .as_ref()
                .map(|l| (s.time, lane_imbalance(l)))
                .ok_or_else(|| Error::Shape("trajectory has no lane channel".into()))
        })
        .collect()
}

/// Executed lane changes per vehicle.
pub fn lane_change_counts(rec: &TrajectoryRecord) -> Vec<u32> {
    let mut counts = vec![0; rec.n_vehicles];
    for e in rec
        .events
        .iter()
        .filter(|e| e.kind == EventKind::LaneChange)
    {
        counts[e.vehicle] += 1;
    }
    counts
}

/// Cumulative lane changes of `vehicle` up to and including each of `times`.
pub fn lane_change_series(rec: &TrajectoryRecord, vehicle: usize, times: &[f64]) -> Vec<u32> {
    let own: Vec<f64> = rec
        .events
        .iter()
        .filter(|e| e.kind == EventKind::LaneChange && e.vehicle == vehicle)
        .map(|e| e.time)
        .collect();
    times
        .iter()
        .map(|&t| own.partition_point(|&te| te <= t + TIME_EPS) as u32)
        .collect()
}

/// Distance driven by `vehicle` since the first sample, at every sample.
pub fn distance_series(rec: &TrajectoryRecord, vehicle: usize) -> Result<Vec<(f64, f64)>> {
    let first = rec
        .samples
        .first()
        .ok_or_else(|| Error::Range("no samples".into()))?;
    if vehicle >= first.positions.len() {
        return Err(Error::param(format!("vehicle {vehicle} out of range")));
    }
    let x0 = first.positions[vehicle];
    Ok(rec
        .samples
        .iter()
        .map(|s| (s.time, s.positions[vehicle] - x0))
        .collect())
}

/// Time-averaged velocity over a per-step probe series.
pub fn mean_velocity(probe: &Probe) -> Result<f64> {
    if probe.velocities.is_empty() {
        return Err(Error::InsufficientData("empty velocity probe".into()));
    }
    Ok(probe.velocities.iter().sum::<f64>() / probe.velocities.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub replicas: usize,
    pub mean: Vec<f64>,
    /// Sample (n - 1) standard deviation; zero for a single replica.
    pub std: Vec<f64>,
}

/// Pointwise mean and standard deviation over replicas sharing one grid.
pub fn aggregate_monte_carlo(runs: &[Vec<f64>]) -> Result<MonteCarloSummary> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Shape("no replicas to aggregate".into()))?;
    let len = first.len();
    if let Some((i, r)) = runs.iter().enumerate().find(|(_, r)| r.len() != len) {
        return Err(Error::Shape(format!(
            "replica {i} has {} points, replica 0 has {len}",
            r.len()
        )));
    }
    let n = runs.len() as f64;
    let mut mean = vec![0.0; len];
    let mut std = vec![0.0; len];
    for k in 0..len {
        // sorted so the result does not depend on replica order
        let mut col: Vec<f64> = runs.iter().map(|r| r[k]).collect();
        col.sort_by(f64::total_cmp);
        let m = col.iter().sum::<f64>() / n;
        mean[k] = m;
        if runs.len() > 1 {
            std[k] = (col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        }
    }
    Ok(MonteCarloSummary {
        replicas: runs.len(),
        mean,
        std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_lane::{run_single_lane, SingleLaneScenario};
    use crate::trajectory::{Recording, Sample, Termination};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(delay: f64, t_end: f64, stride: usize) -> TrajectoryRecord {
        let mut sc = SingleLaneScenario::perturbed_ring(delay, 0.01, t_end);
        sc.perturbation = None;
        sc.recording = Recording::every(stride);
        run_single_lane(&sc).unwrap()
    }

    fn still(n: usize) -> TrajectoryRecord {
        let s = |t| Sample {
            time: t,
            positions: (0..n).map(|j| j as f64 * 10.0).collect(),
            velocities: vec![0.0; n],
            lanes: None,
            phi: None,
        };
        TrajectoryRecord {
            track_length: 1000.0,
            dt: 1.0,
            n_vehicles: n,
            samples: (0..30).map(|k| s(k as f64)).collect(),
            probes: vec![],
            events: vec![],
            termination: Termination::EndTime { time: 29.0 },
        }
    }

    #[test]
    fn equilibrium_flow_rate() {
        let rec = ring(0.0, 40.0, 1);
        let expect = 50.0 * ModelParams::default().ring_velocity(50) / 1000.0;
        assert!((expect - 0.536_768_742_106_716_4).abs() < 1e-12);
        let delta = 18.63;
        for x in [0.0, 123.4, 500.0, 999.0] {
            let q = flow_rate(&rec, 40.0, x, delta).unwrap();
            assert!((q - expect).abs() <= 1.0 / delta + 1e-12, "x={x}: {q}");
        }
    }

    #[test]
    fn stride_does_not_change_counts() {
        let fine = ring(0.0, 30.0, 1);
        let coarse = ring(0.0, 30.0, 37);
        for x in [0.0, 250.0, 777.7] {
            assert_eq!(
                crossing_times(&fine, x).len(),
                crossing_times(&coarse, x).len()
            );
            let a = flow_rate(&fine, 30.0, x, 5.0).unwrap();
            let b = flow_rate(&coarse, 30.0, x, 5.0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn stationary_and_short_windows() {
        let rec = still(5);
        assert_eq!(flow_rate(&rec, 20.0, 5.0, 10.0).unwrap(), 0.0);
        assert!(flow_rate(&rec, 20.0, 5.0, 25.0).is_err());
        assert!(flow_rate(&rec, 40.0, 5.0, 1.0).is_err());
        assert!(flow_rate(&rec, 20.0, 1000.0, 1.0).is_err());
        // a window shorter than the headway time sees 0 or 1 vehicle
        let moving = ring(0.0, 10.0, 1);
        let q = flow_rate(&moving, 10.0, 500.0, 0.5).unwrap();
        assert!(q == 0.0 || q == 2.0);
    }

    #[test]
    fn flow_field_grid() {
        let rec = ring(0.0, 30.0, 1);
        let ff = flow_field(&rec, 5.0, 4, 5).unwrap();
        assert_eq!(ff.q.len(), 4);
        assert!(ff
            .q
            .iter()
            .flatten()
            .all(|&q| (0.0..=50.0 / 5.0).contains(&q)));
        let mut out = Vec::new();
        ff.write_csv(&mut out, &CsvHeader::new()).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("t,x,q_veh_per_s\n5,0,"));
        assert_eq!(text.lines().count(), 21);
    }

    #[test]
    fn exact_exponential_fit() {
        let f: Vec<f64> = (1..=8).map(|n| 2.0 * (-(n as f64)).exp()).collect();
        let fit = fit_growth_rate(&f).unwrap();
        assert!((fit.k + 1.0).abs() < 1e-12);
        assert!((fit.a - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-20);
    }

    #[test]
    fn fit_drops_non_positive_amplitudes() {
        let fit = fit_growth_rate(&[1.0, -0.5, 0.25, 0.0, 0.0625]).unwrap();
        assert_eq!(fit.cycles, vec![1, 3, 5]);
        assert!((fit.k - 0.5f64.ln()).abs() < 1e-12);
        assert!(fit_growth_rate(&[1.0, 0.0, 0.5]).is_err());
    }

    #[test]
    fn noisy_fit_recovers_growth_rate() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = -0.4;
            let f: Vec<f64> = (1..=10)
                .map(|n| 1.5 * (k * n as f64).exp() * (1.0 + 0.01 * (2.0 * rng.gen::<f64>() - 1.0)))
                .collect();
            let fit = fit_growth_rate(&f).unwrap();
            assert!((fit.k - k).abs() < 0.05, "seed {seed}: {}", fit.k);
        }
    }

    #[test]
    fn synthetic_decaying_oscillation() {
        let (v_eq, amp, tau, omega, dt) = (10.0, 2.0, 40.0, 2.0 * std::f64::consts::PI / 9.0, 0.01);
        let series: Vec<f64> = (0..=6000)
            .map(|i| {
                let t = i as f64 * dt;
                v_eq - amp * (-t / tau).exp() * (1.0 - (omega * t).cos()) / 2.0
            })
            .collect();
        let det = CycleDetection::for_params(&ModelParams::default());
        let f = cyclic_amplitudes(&series, v_eq, &det).unwrap();
        assert!(f.windows(2).all(|w| w[1] < w[0]));
        let fit = fit_growth_rate(&f).unwrap();
        let want = -2.0 * std::f64::consts::PI / (omega * tau);
        assert!((fit.k - want).abs() < 1e-3, "{} vs {want}", fit.k);
        // first minimum sits near the first trough of (1 - cos)
        assert!((f[0] - amp * (-4.5 / tau).exp()).abs() < 0.01);
    }

    #[test]
    fn constant_series_has_no_cycles() {
        let det = CycleDetection::for_params(&ModelParams::default());
        assert!(matches!(
            cyclic_amplitudes(&[3.0; 100], 3.0, &det),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn ripple_below_floor_is_ignored() {
        let mut s = vec![5.0; 30];
        s[5] = 5.0 - 1e-6;
        s[12] = 1.0;
        s[20] = 2.0;
        s[26] = 5.0 - 1e-5;
        let det = CycleDetection {
            prominence_floor: 1e-4,
            min_separation: 0,
        };
        assert_eq!(oscillation_minima(&s, &det), vec![12, 20]);
        let det = CycleDetection {
            prominence_floor: 0.0,
            min_separation: 0,
        };
        assert_eq!(oscillation_minima(&s, &det), vec![5, 12, 20, 26]);
    }

    #[test]
    fn separation_prefers_deeper_minima() {
        let s = [5.0, 4.0, 5.0, 1.0, 5.0, 2.0, 5.0, 5.0, 5.0, 5.0, 3.0, 5.0];
        let det = CycleDetection {
            prominence_floor: 0.0,
            min_separation: 3,
        };
        // index 1 is too close to the start, 5 too close to the deeper 3
        assert_eq!(oscillation_minima(&s, &det), vec![3, 10]);
        let det = CycleDetection {
            prominence_floor: 0.0,
            min_separation: 0,
        };
        assert_eq!(oscillation_minima(&s, &det), vec![1, 3, 5, 10]);
    }

    #[test]
    fn undelayed_ring_oscillation_decays() {
        let sc = SingleLaneScenario::perturbed_ring(0.0, 0.01, 400.0);
        let rec = run_single_lane(&sc).unwrap();
        let p = ModelParams::default();
        let det = CycleDetection::for_params(&p).with_separation(5138);
        let f = cyclic_amplitudes(&rec.probe(0).unwrap().velocities, p.ring_velocity(50), &det)
            .unwrap();
        assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
        assert!(fit_growth_rate(&f).unwrap().k < 0.0);
    }

    #[test]
    fn imbalance_cases() {
        assert_eq!(lane_imbalance(&[0; 50]), 50);
        let mut l = vec![0u8; 25];
        l.extend([1u8; 25]);
        assert_eq!(lane_imbalance(&l), 0);
        let mut l = vec![0u8; 27];
        l.extend([1u8; 23]);
        assert_eq!(lane_imbalance(&l), 4);
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate_monte_carlo(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!((a.mean, a.std), (vec![1.0, 2.0], vec![0.0, 0.0]));
        let b = aggregate_monte_carlo(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(b.mean, vec![1.0]);
        assert!((b.std[0] - 2f64.sqrt()).abs() < 1e-15);
        let single = aggregate_monte_carlo(&[vec![4.0]]).unwrap();
        assert_eq!(single.std, vec![0.0]);
        assert!(aggregate_monte_carlo(&[vec![0.0], vec![1.0, 2.0]]).is_err());
        assert!(aggregate_monte_carlo(&[]).is_err());
    }

    proptest! {
        #[test]
        fn imbalance_ignores_lane_labels(lanes in proptest::collection::vec(0u8..2, 0..80)) {
            let flipped: Vec<u8> = lanes.iter().map(|l| 1 - l).collect();
            prop_assert_eq!(lane_imbalance(&lanes), lane_imbalance(&flipped));
        }

        #[test]
        fn aggregate_is_order_invariant(
            runs in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 5), 1..8),
            rot in 0usize..8,
        ) {
            let mut shuffled = runs.clone();
            let r = rot % shuffled.len();
            shuffled.rotate_left(r);
            shuffled.reverse();
            let a = aggregate_monte_carlo(&runs).unwrap();
            let b = aggregate_monte_carlo(&shuffled).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn planted_growth_rate_recovered(a in 0.01f64..10.0, k in -2.0f64..2.0, n in 3usize..15) {
            let f: Vec<f64> = (1..=n).map(|i| a * (k * i as f64).exp()).collect();
            let fit = fit_growth_rate(&f).unwrap();
            prop_assert!((fit.k - k).abs() < 1e-12);
            prop_assert!((fit.a - a).abs() < 1e-12 * a.max(1.0));
        }
    }
}
