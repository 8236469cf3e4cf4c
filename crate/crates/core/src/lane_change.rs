//! Two-lane ring with frustration-driven lane changes.
//!
//! Each driver carries a frustration level φ that ramps up while the
//! adjacent lane offers a longer headway, ramps down otherwise, jumps when the
//! driver is passed, and resets after a lane change. φ maps to a lane-change
//! attempt rate through `P(φ) = (2/π) atan φ`; an attempt succeeds when no
//! car in the other lane is within `d` of the driver.
//!
//! A step runs three stages: lane changing, collision detection, then the
//! same forward Euler move as the single-lane model.

use std::f64::consts::FRAC_2_PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::HistoryBuffer;
use crate::model::{speed, ModelParams};
use crate::trajectory::{
    CollisionReport, Event, EventKind, Probe, Recording, Sample, Termination, TrajectoryRecord,
};

/// Vehicle id of the aggressive driver in [`TwoLaneScenario::aggressive`].
pub const AGGRESSIVE_VEHICLE: usize = 25;
/// Vehicle id used as the reference driver in [`TwoLaneScenario::aggressive`].
pub const CONTROL_VEHICLE: usize = 0;
pub const AGGRESSIVE_LAMBDA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverState {
    pub frustration: f64,
    pub lane: u8,
    pub lambda_override: Option<f64>,
    pub lane_change_count: u32,
    pub passed_events: u32,
}

impl DriverState {
    pub fn new(lane: u8) -> Self {
        DriverState {
            frustration: 0.0,
            lane,
            lambda_override: None,
            lane_change_count: 0,
            passed_events: 0,
        }
    }

    pub fn lambda(&self, p: &ModelParams) -> f64 {
        self.lambda_override.unwrap_or(p.lambda_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    /// Unwrapped position, m.
    pub position: f64,
    pub driver: DriverState,
}

/// Vehicles indexed by id; lane membership lives in each driver's state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLaneState {
    pub vehicles: Vec<Vehicle>,
    pub time: f64,
    pub track_length: f64,
}

impl TwoLaneState {
    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }

    pub fn lane_of(&self, id: usize) -> u8 {
        self.vehicles[id].driver.lane
    }

    pub fn lane_count(&self, lane: u8) -> usize {
        self.vehicles
            .iter()
            .filter(|v| v.driver.lane == lane)
            .count()
    }

    /// Ids in `lane`, ordered by wrapped position (ties by id).
    pub fn lane_order(&self, lane: u8) -> Vec<usize> {
        let l = self.track_length;
        let mut ids: Vec<usize> = (0..self.len())
            .filter(|&i| self.lane_of(i) == lane)
            .collect();
        ids.sort_by(|&a, &b| {
            wrap(self.vehicles[a].position, l)
                .total_cmp(&wrap(self.vehicles[b].position, l))
                .then(a.cmp(&b))
        });
        ids
    }

    pub fn positions(&self) -> Vec<f64> {
        self.vehicles.iter().map(|v| v.position).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneChangeParams {
    /// Frustration ramp rate, 1/s.
    pub r: f64,
    /// Frustration jump per pass.
    pub p: f64,
    pub rng_seed: u64,
}

impl LaneChangeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::param(format!(
                "frustration rate r must be >= 0, got {}",
                self.r
            )));
        }
        if !(self.p.is_finite() && self.p >= 0.0) {
            return Err(Error::param(format!(
                "passing jump p must be >= 0, got {}",
                self.p
            )));
        }
        Ok(())
    }
}

fn wrap(x: f64, l: f64) -> f64 {
    let w = x.rem_euclid(l);
    if w >= l {
        w - l
    } else {
        w
    }
}

/// Distance travelled from `from` forward to `to` on a ring, in `[0, L)`.
pub fn forward_gap(from: f64, to: f64, track_length: f64) -> f64 {
    wrap(to - from, track_length)
}

/// Offset of `to` relative to `from`, folded into `(-L/2, L/2]`.
pub fn nearest_image_offset(from: f64, to: f64, track_length: f64) -> f64 {
    let o = forward_gap(from, to, track_length);
    if o > 0.5 * track_length {
        o - track_length
    } else {
        o
    }
}

/// Nearest vehicle strictly ahead of `id` in `lane`, with its forward gap.
fn leader_in(state: &TwoLaneState, id: usize, lane: u8) -> Option<(usize, f64)> {
    let l = state.track_length;
    let x = state.vehicles[id].position;
    state
        .vehicles
        .iter()
        .enumerate()
        .filter(|(i, v)| *i != id && v.driver.lane == lane)
        .map(|(i, v)| {
            let g = forward_gap(x, v.position, l);
            (i, if g == 0.0 { l } else { g })
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

/// True headway in the vehicle's own lane; a vehicle alone sees its own image at `L`.
pub fn own_headway(state: &TwoLaneState, id: usize) -> f64 {
    leader_in(state, id, state.lane_of(id)).map_or(state.track_length, |(_, g)| g)
}

/// Distance to the nearest vehicle strictly ahead in the other lane, or
/// infinity if that lane is empty.
pub fn adjacent_headway(state: &TwoLaneState, id: usize) -> f64 {
    leader_in(state, id, 1 - state.lane_of(id)).map_or(f64::INFINITY, |(_, g)| g)
}

/// Headway as perceived through the delay: the gap to the current leader,
/// corrected by how far both vehicles moved during the last `Δ` seconds.
fn perceived(state: &TwoLaneState, hist: &HistoryBuffer, id: usize, lane: u8, empty: f64) -> f64 {
    match leader_in(state, id, lane) {
        None => empty,
        Some((leader, gap)) => {
            let past = hist.delayed();
            let moved = |i: usize| state.vehicles[i].position - past[i];
            gap - (moved(leader) - moved(id))
        }
    }
}

/// Rules 1-3: ramp by `±r dt`, jump by `p` per pass, clamp at zero.
pub fn frustration_update(
    phi: f64,
    own_h: f64,
    adj_h: f64,
    passes: u32,
    lp: &LaneChangeParams,
    dt: f64,
) -> f64 {
    let ramp = if own_h < adj_h { lp.r } else { -lp.r };
    (phi + ramp * dt + lp.p * passes as f64).max(0.0)
}

/// Lane-change attempt probability per second.
pub fn attempt_probability(phi: f64) -> f64 {
    FRAC_2_PI * phi.max(0.0).atan()
}

/// Attempt probability over one step of length `dt`: `1 - (1 - P)^dt`.
pub fn per_step_attempt_probability(phi: f64, dt: f64) -> f64 {
    let p = attempt_probability(phi);
    -(dt * (-p).ln_1p()).exp_m1()
}

/// No vehicle of the other lane within `[x - d, x + d]`.
pub fn safety_gap_check(state: &TwoLaneState, id: usize, p: &ModelParams) -> bool {
    let l = state.track_length;
    let x = state.vehicles[id].position;
    let other = 1 - state.lane_of(id);
    state
        .vehicles
        .iter()
        .filter(|v| v.driver.lane == other)
        .all(|v| nearest_image_offset(x, v.position, l).abs() > p.d_min)
}

/// Number of times each vehicle was overtaken by an adjacent-lane vehicle
/// between two consecutive states. Vehicles whose lane differs between the
/// two states take no part.
pub fn detect_passes(prev: &TwoLaneState, next: &TwoLaneState) -> Vec<u32> {
    let l = next.track_length;
    let n = next.len();
    let steady: Vec<bool> = (0..n).map(|i| prev.lane_of(i) == next.lane_of(i)).collect();
    let mut counts = vec![0; n];
    for j in (0..n).filter(|&j| steady[j]) {
        for i in (0..n).filter(|&i| steady[i] && next.lane_of(i) != next.lane_of(j)) {
            let before =
                nearest_image_offset(prev.vehicles[j].position, prev.vehicles[i].position, l);
            let after =
                nearest_image_offset(next.vehicles[j].position, next.vehicles[i].position, l);
            // a jump of half a lap is the fold of the offset, not a pass
            if before <= 0.0 && after > 0.0 && after - before < 0.5 * l {
                counts[j] += 1;
            }
        }
    }
    counts
}

/// One report per follower whose true headway in its lane is `<= C`.
pub fn detect_two_lane_collisions(state: &TwoLaneState, p: &ModelParams) -> Vec<CollisionReport> {
    let l = state.track_length;
    let mut out = Vec::new();
    for lane in 0..2u8 {
        let order = state.lane_order(lane);
        if order.len() < 2 {
            continue;
        }
        for (k, &id) in order.iter().enumerate() {
            let leader = order[(k + 1) % order.len()];
            let h = forward_gap(
                state.vehicles[id].position,
                state.vehicles[leader].position,
                l,
            );
            let h = if k + 1 == order.len() && h == 0.0 {
                l
            } else {
                h
            };
            if h <= p.car_size {
                out.push(CollisionReport {
                    time: state.time,
                    follower_index: id,
                    headway_at_collision: h,
                    lane: Some(lane),
                });
            }
        }
    }
    out
}

/// Mutable per-run bookkeeping carried between steps.
#[derive(Debug, Clone)]
pub struct StepContext {
    pub rng: ChaCha8Rng,
    /// Passes detected during the previous step, credited at the next update.
    pub pending_passes: Vec<u32>,
    pub delay_steps: usize,
}

impl StepContext {
    pub fn new(seed: u64, n_vehicles: usize, delay_steps: usize) -> Self {
        StepContext {
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending_passes: vec![0; n_vehicles],
            delay_steps,
        }
    }
}

/// Stage 1: frustration updates and lane changes, in scan order, with
/// occupancy updated as soon as a change executes. Returns the events.
pub fn lane_change_stage(
    state: &mut TwoLaneState,
    hist: &HistoryBuffer,
    ctx: &mut StepContext,
    lp: &LaneChangeParams,
    p: &ModelParams,
    dt: f64,
) -> Vec<Event> {
    let mut scan = state.lane_order(0);
    scan.extend(state.lane_order(1));
    let mut events = Vec::new();
    for id in scan {
        let lane = state.lane_of(id);
        let (own_h, adj_h) = if ctx.delay_steps == 0 {
            (own_headway(state, id), adjacent_headway(state, id))
        } else {
            (
                perceived(state, hist, id, lane, state.track_length),
                perceived(state, hist, id, 1 - lane, f64::INFINITY),
            )
        };
        let passes = std::mem::take(&mut ctx.pending_passes[id]);
        let drv = &mut state.vehicles[id].driver;
        drv.frustration = frustration_update(drv.frustration, own_h, adj_h, passes, lp, dt);
        let u: f64 = ctx.rng.gen();
        if u < per_step_attempt_probability(drv.frustration, dt) && safety_gap_check(state, id, p) {
            let drv = &mut state.vehicles[id].driver;
            events.push(Event {
                time: state.time,
                vehicle: id,
                kind: EventKind::LaneChange,
                from_lane: Some(lane),
                to_lane: Some(1 - lane),
                phi_before: Some(drv.frustration),
            });
            drv.lane = 1 - lane;
            drv.frustration = 0.0;
            drv.lane_change_count += 1;
        }
    }
    events
}

/// Velocity each driver applies now, from perceived headways in the current lanes.
pub fn two_lane_velocities(
    state: &TwoLaneState,
    hist: &HistoryBuffer,
    p: &ModelParams,
) -> Vec<f64> {
    (0..state.len())
        .map(|id| {
            let h = perceived(state, hist, id, state.lane_of(id), state.track_length);
            speed(h, state.vehicles[id].driver.lambda(p), p)
        })
        .collect()
}

/// Stage 3 plus pass detection: move every vehicle, push the new snapshot,
/// and queue the passes for the next step's frustration update.
fn forward_stage(
    start: &TwoLaneState,
    state: &mut TwoLaneState,
    velocities: &[f64],
    hist: &mut HistoryBuffer,
    ctx: &mut StepContext,
    dt: f64,
) -> Vec<Event> {
    for (v, vel) in state.vehicles.iter_mut().zip(velocities) {
        v.position += dt * vel;
    }
    state.time += dt;
    hist.push(&state.positions());
    let passes = detect_passes(start, state);
    let mut events = Vec::new();
    for (id, &n) in passes.iter().enumerate() {
        if n > 0 {
            ctx.pending_passes[id] += n;
            state.vehicles[id].driver.passed_events += n;
            for _ in 0..n {
                events.push(Event {
                    time: state.time,
                    vehicle: id,
                    kind: EventKind::Pass,
                    from_lane: None,
                    to_lane: Some(state.lane_of(id)),
                    phi_before: None,
                });
            }
        }
    }
    events
}

/// Outcome of a single [`two_lane_step`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Advanced {
        events: Vec<Event>,
    },
    Collided {
        events: Vec<Event>,
        reports: Vec<CollisionReport>,
    },
}

/// Lane changing, collision detection, forward move. The state is left
/// unmoved when a collision is found.
pub fn two_lane_step(
    state: &mut TwoLaneState,
    hist: &mut HistoryBuffer,
    ctx: &mut StepContext,
    lp: &LaneChangeParams,
    p: &ModelParams,
    dt: f64,
) -> StepOutcome {
    let start = state.clone();
    let mut events = lane_change_stage(state, hist, ctx, lp, p, dt);
    let reports = detect_two_lane_collisions(state, p);
    if !reports.is_empty() {
        return StepOutcome::Collided { events, reports };
    }
    let v = two_lane_velocities(state, hist, p);
    events.extend(forward_stage(&start, state, &v, hist, ctx, dt));
    StepOutcome::Advanced { events }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleInit {
    pub position: f64,
    pub lane: u8,
    #[serde(default)]
    pub lambda_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLaneScenario {
    pub params: ModelParams,
    pub lane_change: LaneChangeParams,
    pub delay: f64,
    pub dt: f64,
    pub t_end: f64,
    pub vehicles: Vec<VehicleInit>,
    pub recording: Recording,
}

impl TwoLaneScenario {
    /// `n` vehicles equally spaced in lane 0, lane 1 empty.
    pub fn one_lane_full(
        p: ModelParams,
        n: usize,
        lp: LaneChangeParams,
        dt: f64,
        t_end: f64,
    ) -> Self {
        let s = p.track_length / n as f64;
        TwoLaneScenario {
            params: p,
            lane_change: lp,
            delay: 0.0,
            dt,
            t_end,
            vehicles: (0..n)
                .map(|j| VehicleInit {
                    position: j as f64 * s,
                    lane: 0,
                    lambda_override: None,
                })
                .collect(),
            recording: Recording::every(1).with_probes(vec![0]),
        }
    }

    /// 50 vehicles in one lane, `r = 0.1`, `p = 0.2`, `dt = 0.05`, 100 s.
    pub fn load_balance(seed: u64) -> Self {
        let lp = LaneChangeParams {
            r: 0.1,
            p: 0.2,
            rng_seed: seed,
        };
        Self::one_lane_full(ModelParams::default(), 50, lp, 0.05, 100.0)
    }

    /// `n_per_lane` equally spaced vehicles per lane, lane 1 shifted
    /// downstream by `shift`. Ids run through lane 0 first.
    pub fn staggered(
        p: ModelParams,
        n_per_lane: usize,
        shift: f64,
        lp: LaneChangeParams,
        dt: f64,
        t_end: f64,
    ) -> Self {
        let s = p.track_length / n_per_lane as f64;
        let mut vehicles = Vec::with_capacity(2 * n_per_lane);
        for lane in 0..2u8 {
            let offset = if lane == 0 { 0.0 } else { shift };
            for j in 0..n_per_lane {
                vehicles.push(VehicleInit {
                    position: offset + j as f64 * s,
                    lane,
                    lambda_override: None,
                });
            }
        }
        TwoLaneScenario {
            params: p,
            lane_change: lp,
            delay: 0.0,
            dt,
            t_end,
            vehicles,
            recording: Recording::every(20).with_probes(vec![0]),
        }
    }

    /// Staggered lanes (shift `L/50`) of `n_per_lane` cars each; the first
    /// car of lane 1 (id `n_per_lane`) drives with `λ = 2`, and vehicle 0,
    /// just behind it in the other lane, serves as control.
    pub fn with_aggressive_driver(
        p: ModelParams,
        n_per_lane: usize,
        lp: LaneChangeParams,
        dt: f64,
        t_end: f64,
    ) -> Self {
        let shift = p.track_length / 50.0;
        let mut sc = Self::staggered(p, n_per_lane, shift, lp, dt, t_end);
        sc.vehicles[n_per_lane].lambda_override = Some(AGGRESSIVE_LAMBDA);
        sc.recording = Recording::every(20).with_probes(vec![CONTROL_VEHICLE, n_per_lane]);
        sc
    }

    /// 25 + 25 cars, `r = 0.1`, `p = 0.1`, `dt = 0.05`, 500 s.
    pub fn aggressive(seed: u64) -> Self {
        let lp = LaneChangeParams {
            r: 0.1,
            p: 0.1,
            rng_seed: seed,
        };
        Self::with_aggressive_driver(ModelParams::default(), 25, lp, 0.05, 500.0)
    }

    pub fn initial_state(&self) -> Result<TwoLaneState> {
        self.params.validate()?;
        self.lane_change.validate()?;
        if self.vehicles.is_empty() {
            return Err(Error::config("two-lane scenario has no vehicles"));
        }
        let l = self.params.track_length;
        let mut vehicles = Vec::with_capacity(self.vehicles.len());
        for (id, v) in self.vehicles.iter().enumerate() {
            if v.lane > 1 {
                return Err(Error::config(format!(
                    "vehicle {id}: lane must be 0 or 1, got {}",
                    v.lane
                )));
            }
            if !v.position.is_finite() {
                return Err(Error::config(format!("vehicle {id}: non-finite position")));
            }
            if let Some(lam) = v.lambda_override {
                if !(lam.is_finite() && lam > 0.0) {
                    return Err(Error::config(format!(
                        "vehicle {id}: lambda must be > 0, got {lam}"
                    )));
                }
            }
            let mut driver = DriverState::new(v.lane);
            driver.lambda_override = v.lambda_override;
            vehicles.push(Vehicle {
                position: wrap(v.position, l),
                driver,
            });
        }
        let state = TwoLaneState {
            vehicles,
            time: 0.0,
            track_length: l,
        };
        if let Some(c) = detect_two_lane_collisions(&state, &self.params).first() {
            return Err(Error::config(format!(
                "vehicle {} starts with headway {} m <= car size",
                c.follower_index, c.headway_at_collision
            )));
        }
        Ok(state)
    }
}

fn sample(state: &TwoLaneState, velocities: &[f64]) -> Sample {
    Sample {
        time: state.time,
        positions: state.positions(),
        velocities: velocities.to_vec(),
        lanes: Some(state.vehicles.iter().map(|v| v.driver.lane).collect()),
        phi: Some(
            state
                .vehicles
                .iter()
                .map(|v| v.driver.frustration)
                .collect(),
        ),
    }
}

/// Integrate until `t_end` or the first collision. Lane changes and passes
/// are logged as events; samples carry lanes and frustration levels.
pub fn run_two_lane(sc: &TwoLaneScenario) -> Result<TrajectoryRecord> {
    if !sc.t_end.is_finite() || sc.t_end < 0.0 {
        return Err(Error::param("t_end must be >= 0"));
    }
    let mut state = sc.initial_state()?;
    let n = state.len();
    let mut hist = HistoryBuffer::new(sc.delay, sc.dt, &state.positions())?;
    for &v in &sc.recording.probes {
        if v >= n {
            return Err(Error::param(format!("probe vehicle {v} out of range")));
        }
    }
    let mut ctx = StepContext::new(sc.lane_change.rng_seed, n, hist.delay_steps());
    let (lp, p, dt) = (&sc.lane_change, &sc.params, sc.dt);

    let stride = sc.recording.stride.max(1);
    let n_steps = (sc.t_end / dt).round() as usize;
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
    let mut events = Vec::new();
    let mut termination = None;

    for step in 0..=n_steps {
        state.time = step as f64 * dt;
        let start = state.clone();
        if step < n_steps {
            events.extend(lane_change_stage(&mut state, &hist, &mut ctx, lp, p, dt));
        }
        let reports = detect_two_lane_collisions(&state, p);
        let velocities = two_lane_velocities(&state, &hist, p);
        if !reports.is_empty() || step == n_steps || step % stride == 0 {
            samples.push(sample(&state, &velocities));
        }
        if !reports.is_empty() {
            for r in &reports {
                events.push(Event {
                    time: r.time,
                    vehicle: r.follower_index,
                    kind: EventKind::Collision,
                    from_lane: None,
                    to_lane: r.lane,
                    phi_before: None,
                });
            }
            termination = Some(Termination::Collision {
                time: state.time,
                reports,
            });
            break;
        }
        for probe in &mut probes {
            probe.velocities.push(velocities[probe.vehicle]);
        }
        if step == n_steps {
            break;
        }
        events.extend(forward_stage(
            &start,
            &mut state,
            &velocities,
            &mut hist,
            &mut ctx,
            dt,
        ));
    }

    Ok(TrajectoryRecord {
        track_length: p.track_length,
        dt,
        n_vehicles: n,
        samples,
        probes,
        events,
        termination: termination.unwrap_or(Termination::EndTime { time: state.time }),
    })
}
