//! Recorded simulation output and its CSV serialization.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A follower whose true headway fell to the vehicle size or below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub time: f64,
    pub follower_index: usize,
    pub headway_at_collision: f64,
    /// Lane of the pair, for multi-lane runs.
    pub lane: Option<u8>,
}

/// What to keep while a simulation runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    /// Keep a full snapshot every `stride` steps (the final state is always kept).
    pub stride: usize,
    /// Vehicles whose velocity is kept at every step regardless of `stride`.
    pub probes: Vec<usize>,
}

impl Recording {
    /// Every step for small fleets, every tenth step otherwise.
    pub fn default_for(n_vehicles: usize) -> Self {
        Recording {
            stride: if n_vehicles <= 100 { 1 } else { 10 },
            probes: vec![0],
        }
    }

    pub fn every(stride: usize) -> Self {
        Recording {
            stride: stride.max(1),
            probes: Vec::new(),
        }
    }

    pub fn with_probes(mut self, probes: Vec<usize>) -> Self {
        self.probes = probes;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub lanes: Option<Vec<u8>>,
    pub phi: Option<Vec<f64>>,
}

/// Per-step velocity of one vehicle; entry `i` is the velocity at `i * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub vehicle: usize,
    pub velocities: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    LaneChange,
    Pass,
    Collision,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::LaneChange => "lane_change",
            EventKind::Pass => "pass",
            EventKind::Collision => "collision",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub vehicle: usize,
    pub kind: EventKind,
    pub from_lane: Option<u8>,
    pub to_lane: Option<u8>,
    pub phi_before: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    EndTime {
        time: f64,
    },
    Collision {
        time: f64,
        reports: Vec<CollisionReport>,
    },
}

impl Termination {
    pub fn time(&self) -> f64 {
        match self {
            Termination::EndTime { time } | Termination::Collision { time, .. } => *time,
        }
    }

    pub fn is_collision(&self) -> bool {
        matches!(self, Termination::Collision { .. })
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Termination::EndTime { .. } => "end_time",
            Termination::Collision { .. } => "collision",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub track_length: f64,
    pub dt: f64,
    pub n_vehicles: usize,
    pub samples: Vec<Sample>,
    pub probes: Vec<Probe>,
    pub events: Vec<Event>,
    pub termination: Termination,
}

impl TrajectoryRecord {
    pub fn probe(&self, vehicle: usize) -> Option<&Probe> {
        self.probes.iter().find(|p| p.vehicle == vehicle)
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    /// Index of the first sample at or after `t`.
    pub fn sample_index_at(&self, t: f64) -> Option<usize> {
        let i = self.samples.partition_point(|s| s.time < t - 1e-9);
        (i < self.samples.len()).then_some(i)
    }

    /// Copy keeping only the first sample at or after each multiple of `interval`.
    pub fn thinned(&self, interval: f64) -> TrajectoryRecord {
        let mut keep = Vec::new();
        if let Some(last) = self.samples.last() {
            let mut k = 0usize;
            loop {
                let t = k as f64 * interval;
                if t > last.time + 1e-9 {
                    break;
                }
                if let Some(i) = self.sample_index_at(t) {
                    if keep.last() != Some(&i) {
                        keep.push(i);
                    }
                }
                k += 1;
            }
        }
        TrajectoryRecord {
            samples: keep.into_iter().map(|i| self.samples[i].clone()).collect(),
            probes: self.probes.clone(),
            events: self.events.clone(),
            termination: self.termination.clone(),
            ..*self
        }
    }

    pub fn is_multi_lane(&self) -> bool {
        self.samples.first().is_some_and(|s| s.lanes.is_some())
    }

    /// Rows `t, vehicle, x_unwrapped, v` (plus `lane, phi` for two-lane runs).
    pub fn write_state_csv<W: Write>(&self, mut w: W, header: &CsvHeader) -> Result<()> {
        header.write(&mut w)?;
        let lanes = self.is_multi_lane();
        if lanes {
            writeln!(w, "t,vehicle,x_unwrapped,v,lane,phi")?;
        } else {
            writeln!(w, "t,vehicle,x_unwrapped,v")?;
        }
        for s in &self.samples {
            for (j, (x, v)) in s.positions.iter().zip(&s.velocities).enumerate() {
                if lanes {
                    let lane = s.lanes.as_ref().map_or(0, |l| l[j]);
                    let phi = s.phi.as_ref().map_or(0.0, |p| p[j]);
                    writeln!(w, "{},{},{},{},{},{}", s.time, j, x, v, lane, phi)?;
                } else {
                    writeln!(w, "{},{},{},{}", s.time, j, x, v)?;
                }
            }
        }
        Ok(())
    }

    /// Rows `t, vehicle, event, from_lane, to_lane, phi_before`.
    pub fn write_events_csv<W: Write>(&self, mut w: W, header: &CsvHeader) -> Result<()> {
        header.write(&mut w)?;
        writeln!(w, "t,vehicle,event,from_lane,to_lane,phi_before")?;
        for e in &self.events {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.time,
                e.vehicle,
                e.kind.as_str(),
                opt(e.from_lane),
                opt(e.to_lane),
                opt(e.phi_before)
            )?;
        }
        Ok(())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `#`-prefixed `key: value` lines written above a CSV body.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvHeader {
    entries: Vec<(String, String)>,
}

impl CsvHeader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }
}

/// Strip `#` metadata lines, leaving the CSV body.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> TrajectoryRecord {
        TrajectoryRecord {
            track_length: 10.0,
            dt: 0.5,
            n_vehicles: 2,
            samples: vec![Sample {
                time: 0.0,
                positions: vec![0.0, 5.0],
                velocities: vec![1.0, 1.5],
                lanes: None,
                phi: None,
            }],
            probes: vec![],
            events: vec![Event {
                time: 0.5,
                vehicle: 1,
                kind: EventKind::LaneChange,
                from_lane: Some(0),
                to_lane: Some(1),
                phi_before: Some(0.25),
            }],
            termination: Termination::EndTime { time: 0.5 },
        }
    }

    #[test]
    fn state_csv_layout() {
        let mut out = Vec::new();
        let h = CsvHeader::new().with("seed", 7);
        tiny().write_state_csv(&mut out, &h).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "# seed: 7\nt,vehicle,x_unwrapped,v\n0,0,0,1\n0,1,5,1.5\n"
        );
        assert_eq!(
            csv_body(&text),
            "t,vehicle,x_unwrapped,v\n0,0,0,1\n0,1,5,1.5\n"
        );
    }

    #[test]
    fn thinning_keeps_grid_samples() {
        let mut rec = tiny();
        rec.samples = (0..10)
            .map(|k| Sample {
                time: k as f64 * 0.5,
                ..rec.samples[0].clone()
            })
            .collect();
        let t = rec.thinned(2.0);
        assert_eq!(t.times(), vec![0.0, 2.0, 4.0]);
        assert_eq!(rec.sample_index_at(1.2), Some(3));
        assert_eq!(rec.sample_index_at(9.0), None);
    }

    #[test]
    fn events_csv_layout() {
        let mut out = Vec::new();
        tiny()
            .write_events_csv(&mut out, &CsvHeader::new())
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "t,vehicle,event,from_lane,to_lane,phi_before\n0.5,1,lane_change,0,1,0.25\n"
        );
    }
}
