//! Linear stability of the single-lane ring.
//!
//! Linearizing the delayed car-following law around the equally spaced state
//! gives `ẋ(t) = J x(t - Δ)` in the N-1 relative coordinates. `J` is a scaled
//! circulant-like matrix whose spectrum is known in closed form, so each mode
//! reduces to the scalar equation `λ = d e^{-λΔ}`, solved with Lambert W.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::lambert_w;
use crate::model::ModelParams;

const DENSE_MAX_N: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianSpec {
    /// `c = -λ exp(-(λ/V)(L/N - d))`, always negative.
    pub scale_c: f64,
    pub n_vehicles: usize,
    /// `c (1 - e^{2πik/N})` for `k = 1..N-1`.
    pub eigenvalues: Vec<Complex64>,
}

impl JacobianSpec {
    pub fn new(n_vehicles: usize, p: &ModelParams) -> Result<Self> {
        let scale_c = jacobian_scale(n_vehicles, p)?;
        let eigenvalues = unit_modes(n_vehicles).map(|m| scale_c * m).collect();
        Ok(JacobianSpec {
            scale_c,
            n_vehicles,
            eigenvalues,
        })
    }
}

fn unit_modes(n: usize) -> impl Iterator<Item = Complex64> {
    (1..n).map(move |k| {
        let theta = 2.0 * PI * k as f64 / n as f64;
        Complex64::new(1.0 - theta.cos(), -theta.sin())
    })
}

pub fn jacobian_scale(n_vehicles: usize, p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if n_vehicles < 2 {
        return Err(Error::param(format!(
            "need at least 2 vehicles, got {n_vehicles}"
        )));
    }
    let spacing = p.track_length / n_vehicles as f64;
    Ok(-p.lambda_rate * (-(p.lambda_rate / p.v_max) * (spacing - p.d_min)).exp())
}

/// Row-major `(N-1) x (N-1)` Jacobian, built entry by entry. Only meant as a
/// brute-force check on the closed form, hence the size cap.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseJacobian {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl DenseJacobian {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }
}

pub fn build_jacobian_dense(n_vehicles: usize, p: &ModelParams) -> Result<DenseJacobian> {
    if n_vehicles > DENSE_MAX_N {
        return Err(Error::param(format!(
            "dense Jacobian limited to N <= {DENSE_MAX_N}, got {n_vehicles}"
        )));
    }
    let c = jacobian_scale(n_vehicles, p)?;
    let dim = n_vehicles - 1;
    let mut entries = vec![0.0; dim * dim];
    for j in 0..dim {
        // identity, minus the superdiagonal, plus the first column
        entries[j * dim + j] += c;
        if j + 1 < dim {
            entries[j * dim + j + 1] -= c;
        }
        entries[j * dim] += c;
    }
    Ok(DenseJacobian { dim, entries })
}

pub fn closed_form_eigenvalues(n_vehicles: usize, p: &ModelParams) -> Result<Vec<Complex64>> {
    Ok(JacobianSpec::new(n_vehicles, p)?.eigenvalues)
}

/// Lambert W branches scanned for characteristic roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRange {
    pub lo: i32,
    pub hi: i32,
}

impl Default for BranchRange {
    fn default() -> Self {
        BranchRange { lo: -8, hi: 8 }
    }
}

impl BranchRange {
    pub fn iter(&self) -> RangeInclusive<i32> {
        self.lo..=self.hi
    }

    pub fn count(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }
}

/// Roots of `λ = d e^{-λΔ}`: `W_b(dΔ)/Δ` for each branch, or `d` itself when
/// there is no delay.
pub fn characteristic_roots(
    d: Complex64,
    delay: f64,
    branches: &BranchRange,
) -> Result<Vec<Complex64>> {
    if !delay.is_finite() || delay < 0.0 {
        return Err(Error::param(format!(
            "reaction time must be >= 0, got {delay}"
        )));
    }
    if delay == 0.0 {
        return Ok(vec![d]);
    }
    if d.norm() == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0)]);
    }
    let z = d * delay;
    let scale = d.norm().max(1.0);
    let mut roots = Vec::with_capacity(branches.count());
    for b in branches.iter() {
        let root = lambert_w(z, b)? / delay;
        let residual = (root - d * (-root * delay).exp()).norm();
        if !(residual < 1e-10 * scale) {
            return Err(Error::Numerical(format!(
                "characteristic root on branch {b} for d = {d}, delay {delay} has residual {residual:e}"
            )));
        }
        roots.push(root);
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub max_real_part: f64,
    pub stable: bool,
    /// Number of Lambert W branches scanned per eigenvalue.
    pub branch_count: usize,
}

pub fn max_growth_rate(
    n_vehicles: usize,
    delay: f64,
    p: &ModelParams,
    branches: &BranchRange,
) -> Result<StabilityVerdict> {
    let spec = JacobianSpec::new(n_vehicles, p)?;
    let mut max_re = f64::NEG_INFINITY;
    for &d in &spec.eigenvalues {
        for r in characteristic_roots(d, delay, branches)? {
            max_re = max_re.max(r.re);
        }
    }
    Ok(StabilityVerdict {
        max_real_part: max_re,
        stable: max_re < 0.0,
        branch_count: if delay == 0.0 { 1 } else { branches.count() },
    })
}

/// Bisection settings for the critical reaction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSearch {
    pub tol: f64,
    /// Initial upper end of the bracket `[0, bracket_hi]`.
    pub bracket_hi: f64,
    /// The upper end is doubled while the system is still stable there, up to this bound.
    pub max_bracket: f64,
    pub branches: BranchRange,
}

impl Default for TauSearch {
    fn default() -> Self {
        TauSearch {
            tol: 1e-3,
            bracket_hi: 2.0,
            max_bracket: 32.0,
            branches: BranchRange::default(),
        }
    }
}

/// Smallest delay (to within `tol`) at which the ring loses linear stability.
pub fn critical_reaction_time(
    n_vehicles: usize,
    p: &ModelParams,
    search: &TauSearch,
) -> Result<f64> {
    if !(search.tol > 0.0) {
        return Err(Error::param(format!(
            "tolerance must be > 0, got {}",
            search.tol
        )));
    }
    let unstable = |delay: f64| -> Result<bool> {
        Ok(!max_growth_rate(n_vehicles, delay, p, &search.branches)?.stable)
    };
    let mut lo = 0.0;
    if unstable(lo)? {
        return Err(Error::Bracket {
            lo,
            hi: search.bracket_hi,
        });
    }
    let mut hi = search.bracket_hi;
    while !unstable(hi)? {
        if hi >= search.max_bracket {
            return Err(Error::Bracket { lo, hi });
        }
        lo = hi;
        hi = (hi * 2.0).min(search.max_bracket);
    }
    while hi - lo > search.tol {
        let mid = 0.5 * (lo + hi);
        if unstable(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Period of the slowest travelling mode of the undelayed linear system, in seconds.
pub fn ring_wave_period(n_vehicles: usize, p: &ModelParams) -> Result<f64> {
    let c = jacobian_scale(n_vehicles, p)?;
    if n_vehicles < 3 {
        return Err(Error::param("two vehicles have no travelling mode"));
    }
    let omega = c.abs() * (2.0 * PI / n_vehicles as f64).sin();
    Ok(2.0 * PI / omega)
}
