//! Single-lane ring road with a reaction-time delay.
//!
//! Vehicle `j + 1` leads vehicle `j`; vehicle `0` leads the last vehicle across
//! the periodic boundary. Positions are unwrapped (cumulative distance), so
//! the wrap only appears in the last vehicle's headway.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::HistoryBuffer;
use crate::model::{speed, ModelParams};
pub use crate::trajectory::CollisionReport;
use crate::trajectory::{Probe, Recording, Sample, Termination, TrajectoryRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct RingState {
    pub positions: Vec<f64>,
    pub time: f64,
}

impl RingState {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn headways(&self, track_length: f64) -> Vec<f64> {
        (0..self.len())
            .map(|j| ring_headway(&self.positions, j, track_length))
            .collect()
    }
}

/// Headway of vehicle `j` in a single ring, with the wrap for the last vehicle.
#[inline]
pub fn ring_headway(positions: &[f64], j: usize, track_length: f64) -> f64 {
    let n = positions.len();
    if j + 1 < n {
        positions[j + 1] - positions[j]
    } else {
        positions[0] + track_length - positions[j]
    }
}

/// `n_vehicles` equally spaced from the origin: `x_j = j L / N`.
pub fn init_ring_equilibrium(n_vehicles: usize, p: &ModelParams) -> Result<RingState> {
    p.validate()?;
    if n_vehicles < 2 {
        return Err(Error::config("a ring needs at least two vehicles"));
    }
    let spacing = p.track_length / n_vehicles as f64;
    if spacing <= p.car_size {
        return Err(Error::config(format!(
            "{n_vehicles} vehicles on {} m leave a headway of {spacing} m, not above the vehicle size {} m",
            p.track_length, p.car_size
        )));
    }
    if spacing <= p.d_min {
        log::warn!(
            "equilibrium headway {spacing} m is at or below d_min = {} m; all vehicles are stationary",
            p.d_min
        );
    }
    Ok(RingState {
        positions: (0..n_vehicles).map(|j| j as f64 * spacing).collect(),
        time: 0.0,
    })
}

/// Shift one vehicle downstream by `displacement` metres.
pub fn perturb(
    state: &RingState,
    vehicle_index: usize,
    displacement: f64,
    track_length: f64,
) -> Result<RingState> {
    let n = state.len();
    if vehicle_index >= n {
        return Err(Error::param(format!(
            "vehicle index {vehicle_index} out of range for {n} vehicles"
        )));
    }
    if !displacement.is_finite() {
        return Err(Error::param("displacement must be finite"));
    }
    let mut next = state.clone();
    next.positions[vehicle_index] += displacement;
    let follower = (vehicle_index + n - 1) % n;
    for j in [vehicle_index, follower] {
        let h = ring_headway(&next.positions, j, track_length);
        if h <= 0.0 {
            return Err(Error::param(format!(
                "displacing vehicle {vehicle_index} by {displacement} m gives vehicle {j} a headway of {h} m"
            )));
        }
    }
    Ok(next)
}

/// Headway of `follower_index` as it was `delay_steps` steps ago.
pub fn delayed_headway(
    hist: &HistoryBuffer,
    follower_index: usize,
    track_length: f64,
) -> Result<f64> {
    let snap = hist.delayed();
    if follower_index >= snap.len() {
        return Err(Error::History);
    }
    Ok(ring_headway(snap, follower_index, track_length))
}

/// Velocities the drivers apply now, from the delayed snapshot.
pub fn delayed_velocities(hist: &HistoryBuffer, p: &ModelParams, out: &mut Vec<f64>) {
    let snap = hist.delayed();
    out.clear();
    out.extend(
        (0..snap.len()).map(|j| speed(ring_headway(snap, j, p.track_length), p.lambda_rate, p)),
    );
}

/// Advance every vehicle by `dt * v(h(t - Δ))` and push the new snapshot.
///
/// `hist.current()` must hold `state.positions`.
pub fn euler_step(
    state: &RingState,
    hist: &mut HistoryBuffer,
    p: &ModelParams,
    dt: f64,
) -> RingState {
    let mut v = Vec::with_capacity(state.len());
    delayed_velocities(hist, p, &mut v);
    let positions: Vec<f64> = state
        .positions
        .iter()
        .zip(&v)
        .map(|(x, v)| x + dt * v)
        .collect();
    hist.push(&positions);
    RingState {
        positions,
        time: state.time + dt,
    }
}

/// One report per follower whose true headway is `<= car_size`.
pub fn detect_collisions(state: &RingState, p: &ModelParams) -> Vec<CollisionReport> {
    (0..state.len())
        .filter_map(|j| {
            let h = ring_headway(&state.positions, j, p.track_length);
            (h <= p.car_size).then_some(CollisionReport {
                time: state.time,
                follower_index: j,
                headway_at_collision: h,
                lane: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub vehicle: usize,
    /// Downstream displacement, m.
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleLaneScenario {
    pub params: ModelParams,
    pub n_vehicles: usize,
    /// Reaction time Δ, s.
    pub delay: f64,
    pub dt: f64,
    pub t_end: f64,
    pub perturbation: Option<Perturbation>,
    pub recording: Recording,
}

impl SingleLaneScenario {
    /// 50 vehicles, reference parameters, vehicle 0 displaced 1 m downstream.
    pub fn perturbed_ring(delay: f64, dt: f64, t_end: f64) -> Self {
        SingleLaneScenario {
            params: ModelParams::default(),
            n_vehicles: 50,
            delay,
            dt,
            t_end,
            perturbation: Some(Perturbation {
                vehicle: 0,
                displacement: 1.0,
            }),
            recording: Recording::default_for(50),
        }
    }
}

/// Integrate until `t_end` or the first collision.
pub fn run_single_lane(sc: &SingleLaneScenario) -> Result<TrajectoryRecord> {
    if !sc.t_end.is_finite() || sc.t_end < 0.0 {
        return Err(Error::param("t_end must be >= 0"));
    }
    let mut state = init_ring_equilibrium(sc.n_vehicles, &sc.params)?;
    if let Some(pert) = sc.perturbation {
        state = perturb(
            &state,
            pert.vehicle,
            pert.displacement,
            sc.params.track_length,
        )?;
    }
    let mut hist = HistoryBuffer::new(sc.delay, sc.dt, &state.positions)?;
    for &v in &sc.recording.probes {
        if v >= sc.n_vehicles {
            return Err(Error::param(format!("probe vehicle {v} out of range")));
        }
    }

    let stride = sc.recording.stride.max(1);
    let n_steps = (sc.t_end / sc.dt).round() as usize;
    let mut probes: Vec<Probe> = sc
        .recording
        .probes
        .iter()
        .map(|&vehicle| Probe {
            vehicle,
            velocities: Vec::with_capacity(n_steps + 1),
        })
        .collect();
    let mut samples = Vec::new();
    let mut velocities = Vec::with_capacity(sc.n_vehicles);
    let mut termination = None;

    for step in 0..=n_steps {
        state.time = step as f64 * sc.dt;
        let collisions = detect_collisions(&state, &sc.params);
        delayed_velocities(&hist, &sc.params, &mut velocities);
        if !collisions.is_empty() || step == n_steps || step % stride == 0 {
            samples.push(Sample {
                time: state.time,
                positions: state.positions.clone(),
                velocities: velocities.clone(),
                lanes: None,
                phi: None,
            });
        }
        if !collisions.is_empty() {
            termination = Some(Termination::Collision {
                time: state.time,
                reports: collisions,
            });
            break;
        }
        for probe in &mut probes {
            probe.velocities.push(velocities[probe.vehicle]);
        }
        if step == n_steps {
            break;
        }
        for (x, v) in state.positions.iter_mut().zip(&velocities) {
            *x += sc.dt * v;
        }
        hist.push(&state.positions);
    }

    Ok(TrajectoryRecord {
        track_length: sc.params.track_length,
        dt: sc.dt,
        n_vehicles: sc.n_vehicles,
        samples,
        probes,
        events: Vec::new(),
        termination: termination.unwrap_or(Termination::EndTime { time: state.time }),
    })
}
