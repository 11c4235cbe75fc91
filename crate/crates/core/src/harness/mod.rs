//! Explicit finite-difference scalar-wave simulators closed by a boundary
//! operator, used to measure how much of an outgoing wave comes back.
//!
//! The harness is `f64` only. All schemes are second-order leapfrog in the
//! interior. Absorbing boundaries advance the resolved form
//! `u_t - p1 u_n + p0 u + q0 u_tau = 0` with a box scheme centred half a cell
//! inside the boundary and half a step ahead in time.

mod disk;
mod line;
mod plane;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::models::{build_scalar_wave, Geometry, ModelError, ScalarWave};
use crate::operator::{derive_operator, TtbcOperator};

pub use disk::run_2d_disk;
pub use line::run_1d;
pub use plane::run_2d_plane_reflection;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("run became unstable at step {step}: energy grew by a factor {growth:e}")]
    UnstableRun { step: usize, growth: f64 },
    #[error("pole treatment diverged at step {step}")]
    PoleSingularity { step: usize },
    #[error("mode fit residual {residual:.3} exceeds 10% of the probe signal")]
    FitFailure { residual: f64 },
    #[error("{0} window is empty or out of range")]
    EmptyWindow(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    /// `[0, length]`.
    Interval { length: f64 },
    /// `[0, lx] x [0, ly]`, periodic in `y`, closed at `x = 0` and `x = lx`.
    Rectangle { lx: f64, ly: f64 },
    /// Disk of the given radius on a polar grid with `angular_cells` sectors.
    Disk { radius: f64, angular_cells: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    /// Gaussian `amplitude * exp(-|x - center|^2 / (2 width^2))`. Right-moving
    /// in 1D, initially at rest on the disk.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// Plane-wave packet hitting `x = lx` at `angle` (radians) from the
    /// normal, carrier frequency close to `omega`.
    PlaneWave { angle: f64, omega: f64 },
    /// Zero initial data.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "operator", rename_all = "snake_case")]
pub enum Boundary {
    Ttbc(TtbcOperator<f64>),
    /// Uses only `p1` of the operator.
    CharacteristicOnly(TtbcOperator<f64>),
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub domain: Domain,
    /// Wave speed.
    pub c: f64,
    /// Grid spacing (radial spacing on the disk).
    pub h: f64,
    /// Courant number `c dt / h`; on the disk, the fraction of the stencil's
    /// stability bound.
    pub cfl: f64,
    pub duration: f64,
    pub source: Source,
    pub boundary: Boundary,
}

impl SimulationConfig {
    /// Right-moving Gaussian of width 0.05 on `[0, 1]`, `c = 1`, `T = 1`.
    pub fn interval_pulse(cells: usize, boundary: Boundary) -> Self {
        Self {
            domain: Domain::Interval { length: 1.0 },
            c: 1.0,
            h: 1.0 / cells as f64,
            cfl: 0.9,
            duration: 1.0,
            source: Source::Gaussian {
                center: vec![0.5],
                width: 0.05,
                amplitude: 1.0,
            },
            boundary,
        }
    }

    /// Unit square with `cells` cells per side, carrier wavelength 0.1 (40
    /// cells at 400 cells per side), TTBC closure for `c = 1`.
    pub fn plane_reflection(theta: f64, cells: usize) -> Result<Self, ModelError> {
        let h = 1.0 / cells as f64;
        let travel = 2.25 / theta.cos().max(1e-3);
        Ok(Self {
            domain: Domain::Rectangle { lx: 1.0, ly: 1.0 },
            c: 1.0,
            h,
            cfl: 0.45,
            duration: travel.min(12.0),
            source: Source::PlaneWave {
                angle: theta,
                omega: 2.0 * std::f64::consts::PI / 0.1,
            },
            boundary: Boundary::Ttbc(scalar_ttbc(1.0, Geometry::Plane, None)?),
        })
    }

    /// Unit disk, `c = 1`, `T = 3`, radial spacing 0.01, 128 sectors, TTBC
    /// closure including the curvature term.
    pub fn disk_pulse(center: [f64; 2], width: f64) -> Result<Self, ModelError> {
        Ok(Self {
            domain: Domain::Disk {
                radius: 1.0,
                angular_cells: 128,
            },
            c: 1.0,
            h: 0.01,
            cfl: 0.9,
            duration: 3.0,
            source: Source::Gaussian {
                center: center.to_vec(),
                width,
                amplitude: 1.0,
            },
            boundary: Boundary::Ttbc(scalar_ttbc(1.0, Geometry::Circle, Some(1.0))?),
        })
    }

    fn check_common(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.to_string()));
        if !(self.c.is_finite() && self.c > 0.0) {
            return bad("wave speed must be positive");
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad("grid spacing must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad("cfl must lie in (0, 1)");
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return bad("duration must be non-negative");
        }
        Ok(())
    }
}

/// TTBC of the scalar wave equation with speed `c` for the given geometry.
pub fn scalar_ttbc(
    c: f64,
    geometry: Geometry,
    r: Option<f64>,
) -> Result<TtbcOperator<f64>, ModelError> {
    let dim = if geometry == Geometry::Sphere { 3 } else { 2 };
    let coeffs = build_scalar_wave(&ScalarWave {
        c,
        dim,
        geometry,
        r,
    })?;
    Ok(derive_operator(&coeffs)?)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    /// Discrete `1/2 (|u_t|^2 + c^2 |grad u|^2)` integrated over the grid.
    pub energies: Vec<f64>,
}

impl EnergyTrace {
    pub fn last(&self) -> f64 {
        self.energies.last().copied().unwrap_or(0.0)
    }

    fn push(&mut self, t: f64, e: f64) {
        self.times.push(t);
        self.energies.push(e);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionReport {
    /// Angle of incidence from the boundary normal, radians.
    pub angle: f64,
    pub incident_amplitude: f64,
    pub reflected_amplitude: f64,
    pub measured_ratio: f64,
    pub analytic_ratio: f64,
    /// `|measured - analytic| / analytic`, or the absolute difference when
    /// the analytic ratio is zero.
    pub relative_error: f64,
}

impl ReflectionReport {
    fn new(angle: f64, incident: f64, reflected: f64, analytic: f64) -> Self {
        let measured = if incident > 0.0 {
            reflected / incident
        } else {
            0.0
        };
        let diff = (measured - analytic).abs();
        let relative_error = if analytic > 0.0 {
            diff / analytic
        } else {
            diff
        };
        Self {
            angle,
            incident_amplitude: incident,
            reflected_amplitude: reflected,
            measured_ratio: measured,
            analytic_ratio: analytic,
            relative_error,
        }
    }
}

/// Plane-wave reflection coefficient of `u_t + c u_n = 0`.
pub fn analytic_plane_ratio(theta: f64) -> f64 {
    let c = theta.cos();
    (1.0 - c).abs() / (1.0 + c).abs()
}

/// Ratio of the peak absolute values of `probe` in two disjoint windows.
pub fn measure_reflection(
    probe: &[f64],
    incident_window: Range<usize>,
    reflected_window: Range<usize>,
) -> Result<f64, HarnessError> {
    let peak = |w: &Range<usize>, name| {
        if w.is_empty() || w.end > probe.len() {
            return Err(HarnessError::EmptyWindow(name));
        }
        Ok(probe[w.clone()].iter().fold(0.0_f64, |m, x| m.max(x.abs())))
    };
    if incident_window.start < reflected_window.end && reflected_window.start < incident_window.end
    {
        return Err(HarnessError::InvalidConfig(
            "incident and reflected windows overlap".into(),
        ));
    }
    let incident = peak(&incident_window, "incident")?;
    let reflected = peak(&reflected_window, "reflected")?;
    if incident == 0.0 {
        return Err(HarnessError::EmptyWindow("incident"));
    }
    Ok(reflected / incident)
}

/// Resolved boundary coefficients of a 1x1 operator.
#[derive(Debug, Clone, Copy)]
struct Closure {
    /// `-p1`, the outgoing speed.
    speed: f64,
    p0: f64,
    q0: f64,
}

impl Closure {
    fn from_boundary(b: &Boundary) -> Result<Option<Self>, HarnessError> {
        let (op, full) = match b {
            Boundary::Dirichlet => return Ok(None),
            Boundary::Ttbc(op) => (op, true),
            Boundary::CharacteristicOnly(op) => (op, false),
        };
        if op.dim() != 1 {
            return Err(HarnessError::InvalidConfig(format!(
                "scalar harness needs a 1x1 operator, got {0}x{0}",
                op.dim()
            )));
        }
        let q0 = op.resolved_q().first().map_or(0.0, |q| q[(0, 0)]);
        Ok(Some(Self {
            speed: -op.resolved_p1()[(0, 0)],
            p0: if full {
                op.resolved_p_alg()[(0, 0)]
            } else {
                0.0
            },
            q0: if full { q0 } else { 0.0 },
        }))
    }

    fn without_p0(self) -> Self {
        Self {
            p0: 0.0,
            q0: 0.0,
            ..self
        }
    }
}

/// Box-scheme update of one boundary value.
///
/// The resolved form is centred at the midpoint between the boundary node
/// `b` and its inner neighbour `i`, between time levels `n` and `n + 1`.
/// `tangential` is the already-averaged `q0 u_tau` term.
#[derive(Debug, Clone, Copy)]
struct BoxScheme {
    a: f64,
    b: f64,
    q: f64,
}

impl BoxScheme {
    fn new(closure: Closure, dt: f64, h: f64) -> Self {
        Self {
            a: 0.5 / dt,
            b: 0.5 * closure.speed / h,
            q: 0.25 * closure.p0,
        }
    }

    #[inline]
    fn update(&self, inner_new: f64, bnd_old: f64, inner_old: f64, tangential: f64) -> f64 {
        let Self { a, b, q } = *self;
        -(a * (inner_new - bnd_old - inner_old)
            + b * (bnd_old - inner_new - inner_old)
            + q * (inner_new + bnd_old + inner_old)
            + tangential)
            / (a + b + q)
    }
}

fn check_growth(step: usize, e: f64, e0: f64) -> Result<(), HarnessError> {
    if !e.is_finite() || (e0 > 0.0 && e > 10.0 * e0) {
        return Err(HarnessError::UnstableRun {
            step,
            growth: if e0 > 0.0 { e / e0 } else { f64::INFINITY },
        });
    }
    Ok(())
}
