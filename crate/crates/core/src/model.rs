//! Physical parameters, the headway-to-velocity law, and equilibrium
//! (fundamental diagram) quantities.
//!
//! Everything here is in SI units: metres, seconds, vehicles per metre and
//! vehicles per second. Conversions to the customary per-kilometre and
//! per-hour figures happen only at the output boundary via [`per_km`] and
//! [`per_hour`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density scan step used by [`fundamental_diagram_summary`] by default (0.1 veh/km).
pub const DEFAULT_RHO_RESOLUTION: f64 = 1.0e-4;

/// Golden-section refinement tolerance on density, vehicles per metre.
const REFINE_TOL: f64 = 1.0e-6;

/// Constants of the car-following law and the track.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Velocity change rate at `h = d_min`, 1/s.
    pub lambda_rate: f64,
    /// Maximal velocity, m/s.
    pub v_max: f64,
    /// Minimal headway for a nonzero velocity, m.
    pub d_min: f64,
    /// Vehicle length, m. Headways at or below this are collisions.
    pub car_size: f64,
    /// Length of the periodic track, m.
    pub track_length: f64,
}

impl Default for ModelParams {
    /// Reference parameter set: λ = 1/s, V = 40 m/s, d = 7.5 m, C = 5 m, L = 1000 m.
    fn default() -> Self {
        ModelParams {
            lambda_rate: 1.0,
            v_max: 40.0,
            d_min: 7.5,
            car_size: 5.0,
            track_length: 1000.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_rate", self.lambda_rate),
            ("v_max", self.v_max),
            ("d_min", self.d_min),
            ("car_size", self.car_size),
            ("track_length", self.track_length),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::param(format!("{name} must be finite, got {value}")));
            }
        }
        if self.lambda_rate <= 0.0 {
            return Err(Error::param("lambda_rate must be > 0"));
        }
        if self.v_max <= 0.0 {
            return Err(Error::param("v_max must be > 0"));
        }
        if self.track_length <= 0.0 {
            return Err(Error::param("track_length must be > 0"));
        }
        if self.car_size < 0.0 {
            return Err(Error::param("car_size must be >= 0"));
        }
        if self.d_min <= self.car_size {
            return Err(Error::param(format!(
                "d_min ({}) must exceed car_size ({})",
                self.d_min, self.car_size
            )));
        }
        Ok(())
    }

    /// Jam density `1/d_min`: the smallest density at which the flow vanishes.
    pub fn rho_jam(&self) -> f64 {
        1.0 / self.d_min
    }

    /// Equilibrium velocity of a uniform ring of `n` vehicles.
    pub fn ring_velocity(&self, n_vehicles: usize) -> f64 {
        speed(
            self.track_length / n_vehicles as f64,
            self.lambda_rate,
            self,
        )
    }
}

/// The velocity law without argument checks, for simulator inner loops.
///
/// `lambda_rate` is passed separately so drivers can carry their own rate.
#[inline]
pub fn speed(headway: f64, lambda_rate: f64, p: &ModelParams) -> f64 {
    let v = p.v_max - p.v_max * (-(lambda_rate / p.v_max) * (headway - p.d_min)).exp();
    v.max(0.0)
}

/// `max(V - V exp(-(λ/V)(h - d)), 0)`.
///
/// Headways below `d_min` are allowed and give zero velocity.
pub fn velocity_from_headway(headway: f64, p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if !headway.is_finite() || headway < 0.0 {
        return Err(Error::param(format!(
            "headway must be finite and nonnegative, got {headway}"
        )));
    }
    Ok(speed(headway, p.lambda_rate, p))
}

/// Equilibrium flow `q = ρ v(1/ρ)` in vehicles per second.
pub fn equilibrium_flow(rho: f64, p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::param(format!("density must be > 0, got {rho}")));
    }
    Ok(flow_unchecked(rho, p))
}

fn flow_unchecked(rho: f64, p: &ModelParams) -> f64 {
    rho * speed(1.0 / rho, p.lambda_rate, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalDiagramSummary {
    /// Maximal equilibrium flow, vehicles/s.
    pub q_star: f64,
    /// Density at which `q_star` is attained, vehicles/m.
    pub rho_star: f64,
    /// Jam density, vehicles/m (exactly `1/d_min`).
    pub rho_jam: f64,
}

/// Locate the capacity point of the fundamental diagram.
///
/// A uniform scan over `(0, ρ_jam)` at `rho_resolution` brackets the maximum,
/// which golden-section search then refines.
pub fn fundamental_diagram_summary(
    p: &ModelParams,
    rho_resolution: f64,
) -> Result<FundamentalDiagramSummary> {
    p.validate()?;
    if !rho_resolution.is_finite() || rho_resolution <= 0.0 {
        return Err(Error::param("rho_resolution must be > 0"));
    }
    let rho_jam = p.rho_jam();
    let steps = (rho_jam / rho_resolution).floor() as usize;
    if steps < 2 {
        return Err(Error::param(
            "rho_resolution is coarser than the jam density",
        ));
    }

    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 1..steps {
        let q = flow_unchecked(i as f64 * rho_resolution, p);
        if q > best.1 {
            best = (i, q);
        }
    }
    let lo = (best.0 - 1).max(1) as f64 * rho_resolution;
    let hi = ((best.0 + 1) as f64 * rho_resolution).min(rho_jam);
    let rho_star = golden_section_max(|r| flow_unchecked(r, p), lo, hi, REFINE_TOL);

    Ok(FundamentalDiagramSummary {
        q_star: flow_unchecked(rho_star, p),
        rho_star,
        rho_jam,
    })
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// One row of the tabulated fundamental diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub rho: f64,
    pub v_eq: f64,
    pub q: f64,
}

/// Tabulate `v_eq(ρ)` and `q(ρ)` on `n_points` evenly spaced densities in `(0, ρ_jam]`.
pub fn fundamental_diagram_table(p: &ModelParams, n_points: usize) -> Result<Vec<DiagramPoint>> {
    p.validate()?;
    if n_points == 0 {
        return Err(Error::param("n_points must be >= 1"));
    }
    let rho_jam = p.rho_jam();
    Ok((1..=n_points)
        .map(|i| {
            let rho = rho_jam * i as f64 / n_points as f64;
            let v_eq = speed(1.0 / rho, p.lambda_rate, p);
            DiagramPoint {
                rho,
                v_eq,
                q: rho * v_eq,
            }
        })
        .collect())
}

/// Vehicles per metre to vehicles per kilometre.
pub fn per_km(rho: f64) -> f64 {
    rho * 1000.0
}

/// Vehicles per second to vehicles per hour.
pub fn per_hour(q: f64) -> f64 {
    q * 3600.0
}
