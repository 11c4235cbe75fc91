use std::f64::consts::PI;

use super::{
    check_growth, BoxScheme, Closure, Domain, EnergyTrace, HarnessError, SimulationConfig, Source,
};

/// Polar-grid solver on a disk, run twice from the same initial data: once
/// with the full operator and once with `p` and `q` dropped.
///
/// Rings sit at `r_i = (i + 1/2) hr` with the last ring on the boundary, so
/// the pole is never a grid point. The Laplacian is in flux form, which makes
/// the interior operator symmetric in the `r dr dtheta` inner product; `dt`
/// is `cfl` times the Gershgorin stability bound.
pub fn run_2d_disk(config: &SimulationConfig) -> Result<(EnergyTrace, EnergyTrace), HarnessError> {
    config.check_common()?;
    let Domain::Disk {
        radius,
        angular_cells,
    } = config.domain
    else {
        return Err(HarnessError::InvalidConfig(
            "run_2d_disk needs a disk domain".into(),
        ));
    };
    if !(radius > 0.0) || angular_cells < 4 {
        return Err(HarnessError::InvalidConfig(
            "disk needs radius > 0 and at least 4 sectors".into(),
        ));
    }
    let Some(closure) = Closure::from_boundary(&config.boundary)? else {
        return Err(HarnessError::InvalidConfig(
            "disk comparison needs an absorbing operator".into(),
        ));
    };
    let grid = PolarGrid::new(
        radius,
        config.h,
        angular_cells,
        config.c,
        config.cfl,
        config.duration,
    )?;
    let initial = grid.initial(&config.source)?;
    let full = grid.run(&initial, closure)?;
    let plain = grid.run(&initial, closure.without_p0())?;
    Ok((full, plain))
}

struct PolarGrid {
    nr: usize,
    nt: usize,
    hr: f64,
    ht: f64,
    r: Vec<f64>,
    /// `r_{i+1/2}` for `i = 0..nr-1`.
    faces: Vec<f64>,
    c: f64,
    dt: f64,
    steps: usize,
}

impl PolarGrid {
    fn new(
        radius: f64,
        h: f64,
        nt: usize,
        c: f64,
        cfl: f64,
        duration: f64,
    ) -> Result<Self, HarnessError> {
        let nr = (radius / h + 0.5).round() as usize;
        if nr < 4 {
            return Err(HarnessError::InvalidConfig(
                "disk needs at least 4 rings".into(),
            ));
        }
        let hr = radius / (nr as f64 - 0.5);
        let ht = 2.0 * PI / nt as f64;
        let r: Vec<f64> = (0..nr).map(|i| (i as f64 + 0.5) * hr).collect();
        let faces: Vec<f64> = (0..nr - 1).map(|i| (i as f64 + 1.0) * hr).collect();
        let mut diag_max: f64 = 0.0;
        for i in 0..nr {
            let inner = if i == 0 { 0.0 } else { faces[i - 1] };
            let outer = if i + 1 == nr { faces[nr - 2] } else { faces[i] };
            let d = c * c * ((inner + outer) / (r[i] * hr * hr) + 2.0 / (r[i] * r[i] * ht * ht));
            diag_max = diag_max.max(d);
        }
        let bound = 2.0 / (2.0 * diag_max).sqrt();
        let steps = (duration / (cfl * bound)).ceil() as usize;
        let dt = if steps > 0 {
            duration / steps as f64
        } else {
            cfl * bound
        };
        Ok(Self {
            nr,
            nt,
            hr,
            ht,
            r,
            faces,
            c,
            dt,
            steps,
        })
    }

    fn initial(&self, source: &Source) -> Result<Vec<f64>, HarnessError> {
        let mut u = vec![0.0; self.nr * self.nt];
        match source {
            Source::None => {}
            Source::Gaussian {
                center,
                width,
                amplitude,
            } => {
                if center.len() != 2 || !(*width > 0.0) {
                    return Err(HarnessError::InvalidConfig(
                        "disk pulse needs a 2D center and width > 0".into(),
                    ));
                }
                for i in 0..self.nr {
                    for j in 0..self.nt {
                        let th = j as f64 * self.ht;
                        let (x, y) = (self.r[i] * th.cos(), self.r[i] * th.sin());
                        let d2 = (x - center[0]).powi(2) + (y - center[1]).powi(2);
                        u[i * self.nt + j] = amplitude * (-0.5 * d2 / (width * width)).exp();
                    }
                }
            }
            Source::PlaneWave { .. } => {
                return Err(HarnessError::InvalidConfig(
                    "plane waves need a rectangle".into(),
                ));
            }
        }
        Ok(u)
    }

    /// `c^2 Laplace(u)` at every ring except the boundary ring.
    fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let (nr, nt) = (self.nr, self.nt);
        let c2 = self.c * self.c;
        for i in 0..nr - 1 {
            let radial = 1.0 / (self.r[i] * self.hr * self.hr);
            let angular = 1.0 / (self.r[i] * self.r[i] * self.ht * self.ht);
            let outer = self.faces[i];
            let inner = if i == 0 { 0.0 } else { self.faces[i - 1] };
            for j in 0..nt {
                let k = i * nt + j;
                let jp = if j + 1 == nt { i * nt } else { k + 1 };
                let jm = if j == 0 { i * nt + nt - 1 } else { k - 1 };
                let flux_out = outer * (u[k + nt] - u[k]);
                let flux_in = if i == 0 {
                    0.0
                } else {
                    inner * (u[k] - u[k - nt])
                };
                out[k] =
                    c2 * ((flux_out - flux_in) * radial + (u[jp] - 2.0 * u[k] + u[jm]) * angular);
            }
        }
    }

    fn energy(&self, new: &[f64], old: &[f64]) -> f64 {
        let (nr, nt) = (self.nr, self.nt);
        let mut kin = 0.0;
        let mut rad = 0.0;
        let mut ang = 0.0;
        for i in 0..nr {
            let w = self.r[i] * self.hr * self.ht;
            for j in 0..nt {
                let k = i * nt + j;
                let jp = if j + 1 == nt { i * nt } else { k + 1 };
                kin += w * ((new[k] - old[k]) / self.dt).powi(2);
                ang += self.hr / (self.r[i] * self.ht) * (new[jp] - new[k]) * (old[jp] - old[k]);
                if i + 1 < nr {
                    rad += self.faces[i] * self.ht / self.hr
                        * (new[k + nt] - new[k])
                        * (old[k + nt] - old[k]);
                }
            }
        }
        0.5 * kin + 0.5 * self.c * self.c * (rad + ang)
    }

    fn run(&self, initial: &[f64], closure: Closure) -> Result<EnergyTrace, HarnessError> {
        let (nr, nt) = (self.nr, self.nt);
        let dt2 = self.dt * self.dt;
        let mut lap = vec![0.0; nr * nt];
        let mut um = initial.to_vec();
        self.laplacian(&um, &mut lap);
        let mut u: Vec<f64> = um
            .iter()
            .zip(&lap)
            .map(|(v, l)| v + 0.5 * dt2 * l)
            .collect();
        let scheme = BoxScheme::new(closure, self.dt, self.hr);
        let rb = self.r[nr - 1];
        let q_avg = 0.25 * closure.q0 / (2.0 * self.ht * rb);
        // First step from rest: the boundary ring follows the closure too.
        let (b, ib) = ((nr - 1) * nt, (nr - 2) * nt);
        let start = um.clone();
        for j in 0..nt {
            u[b + j] = scheme.update(u[ib + j], start[b + j], start[ib + j], 0.0);
        }
        let mut un = vec![0.0; nr * nt];

        let mut trace = EnergyTrace::default();
        let e0 = self.energy(&u, &um);
        trace.push(0.5 * self.dt, e0);
        for n in 1..self.steps {
            self.laplacian(&u, &mut lap);
            for k in 0..(nr - 1) * nt {
                un[k] = 2.0 * u[k] - um[k] + dt2 * lap[k];
            }
            for j in 0..nt {
                let jp = if j + 1 == nt { 0 } else { j + 1 };
                let jm = if j == 0 { nt - 1 } else { j - 1 };
                let d = |v: &[f64], r: usize| v[r + jp] - v[r + jm];
                let tang = q_avg * (d(&un, ib) + d(&u, ib) + 2.0 * d(&u, b));
                un[b + j] = scheme.update(un[ib + j], u[b + j], u[ib + j], tang);
            }
            std::mem::swap(&mut um, &mut u);
            std::mem::swap(&mut u, &mut un);
            let e = self.energy(&u, &um);
            if let Err(err) = check_growth(n, e, e0) {
                let pole = (0..nt).any(|j| !u[j].is_finite())
                    || u[..nt].iter().fold(0.0_f64, |m, v| m.max(v.abs()))
                        >= u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                return Err(if pole {
                    HarnessError::PoleSingularity { step: n }
                } else {
                    err
                });
            }
            trace.push((n as f64 + 0.5) * self.dt, e);
        }
        Ok(trace)
    }
}
