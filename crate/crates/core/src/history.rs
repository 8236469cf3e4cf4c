//! Fixed-lag position history for delayed headway lookups.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Number of integration steps spanned by `delay`, rejecting delays that are
/// not an integer multiple of `dt`.
pub fn delay_steps(delay: f64, dt: f64) -> Result<usize> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::param(format!("time step must be > 0, got {dt}")));
    }
    if !delay.is_finite() || delay < 0.0 {
        return Err(Error::param(format!(
            "reaction time must be >= 0, got {delay}"
        )));
    }
    let ratio = delay / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::config(format!(
            "reaction time {delay} s is not an integer multiple of the time step {dt} s"
        )));
    }
    Ok(steps as usize)
}

/// Ring of the last `delay_steps + 1` position snapshots.
///
/// The newest snapshot is the current state; the oldest is the state exactly
/// `delay_steps` steps earlier. Times before the start of the run see the
/// initial snapshot, held constant.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    snapshots: VecDeque<Vec<f64>>,
    delay_steps: usize,
}

impl HistoryBuffer {
    pub fn new(delay: f64, dt: f64, initial: &[f64]) -> Result<Self> {
        let delay_steps = delay_steps(delay, dt)?;
        Ok(Self::with_steps(delay_steps, initial))
    }

    pub fn with_steps(delay_steps: usize, initial: &[f64]) -> Self {
        let snapshots = std::iter::repeat_with(|| initial.to_vec())
            .take(delay_steps + 1)
            .collect();
        HistoryBuffer {
            snapshots,
            delay_steps,
        }
    }

    pub fn delay_steps(&self) -> usize {
        self.delay_steps
    }

    /// Snapshot recorded `delay_steps` steps ago.
    pub fn delayed(&self) -> &[f64] {
        &self.snapshots[0]
    }

    /// Snapshot recorded `lag` steps ago, `lag <= delay_steps`.
    pub fn lagged(&self, lag: usize) -> Result<&[f64]> {
        if lag > self.delay_steps {
            return Err(Error::History);
        }
        Ok(&self.snapshots[self.delay_steps - lag])
    }

    pub fn current(&self) -> &[f64] {
        &self.snapshots[self.delay_steps]
    }

    /// Append a new current snapshot, discarding the oldest one.
    pub fn push(&mut self, positions: &[f64]) {
        let mut buf = self.snapshots.pop_front().unwrap_or_default();
        buf.clear();
        buf.extend_from_slice(positions);
        self.snapshots.push_back(buf);
    }
}
