use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    analytic_plane_ratio, check_growth, BoxScheme, Closure, Domain, HarnessError, ReflectionReport,
    SimulationConfig, Source,
};

/// Packet geometry as fractions of `lx`.
const PACKET_CENTER: f64 = 0.27;
const PACKET_WIDTH: f64 = 0.065;
const PROBE_CENTER: f64 = 0.55;
const PROBE_LINES: usize = 9;
/// Share of the record over which the cosine taper runs.
const TAPER: f64 = 0.25;

/// Oblique plane-wave packet on a rectangle periodic in `y`, both `x` faces
/// closed by the boundary.
///
/// The packet has a single `y` wavenumber `ky = 2 pi m / ly`, and the carrier
/// angle is kept exact by adjusting the frequency to `c ky / sin(angle)`. The
/// initial data is an exact right-going solution of the discrete scheme. On a
/// group of probe lines around `0.55 lx` the `ky` mode is recorded, Fourier
/// transformed at the carrier frequency over the tapered record and fitted with
/// `I exp(i kx x) + R exp(-i kx x)`; the measured ratio is `|R| / |I|`.
pub fn run_2d_plane_reflection(
    config: &SimulationConfig,
) -> Result<ReflectionReport, HarnessError> {
    config.check_common()?;
    let Domain::Rectangle { lx, ly } = config.domain else {
        return Err(HarnessError::InvalidConfig(
            "plane reflection needs a rectangle".into(),
        ));
    };
    let Source::PlaneWave { angle, omega } = config.source else {
        return Err(HarnessError::InvalidConfig(
            "plane reflection needs a plane-wave source".into(),
        ));
    };
    if !(0.0..PI / 2.0).contains(&angle) {
        return Err(HarnessError::InvalidConfig(
            "angle must lie in [0, pi/2)".into(),
        ));
    }
    if !(omega > 0.0) {
        return Err(HarnessError::InvalidConfig("omega must be positive".into()));
    }
    let closure = Closure::from_boundary(&config.boundary)?;
    let c = config.c;
    let nx = (lx / config.h).round() as usize;
    let ny = (ly / config.h).round() as usize;
    if nx < 8 || ny < 4 {
        return Err(HarnessError::InvalidConfig("grid too coarse".into()));
    }
    let h = lx / nx as f64;
    let ly = ny as f64 * h;
    if config.cfl >= std::f64::consts::FRAC_1_SQRT_2 {
        return Err(HarnessError::InvalidConfig(
            "2D leapfrog needs cfl < 1/sqrt(2)".into(),
        ));
    }
    let dt = config.cfl * h / c;
    let steps = (config.duration / dt).ceil() as usize;
    let lam2 = (c * dt / h).powi(2);

    let k_target = omega / c;
    let (ky, k0) = if angle == 0.0 {
        (0.0, k_target)
    } else {
        let m = (k_target * angle.sin() * ly / (2.0 * PI)).round().max(1.0);
        let ky = 2.0 * PI * m / ly;
        (ky, ky / angle.sin())
    };
    let kx0 = k0 * angle.cos();
    let omega0 = c * k0;
    let lam = c * dt / h;
    let discrete_omega = |kx: f64| {
        let s = lam * ((kx * h / 2.0).sin().powi(2) + (ky * h / 2.0).sin().powi(2)).sqrt();
        2.0 / dt * s.min(1.0).asin()
    };
    let s2 = ((omega0 * dt / 2.0).sin() / lam).powi(2) - (ky * h / 2.0).sin().powi(2);
    if !(s2 > 0.0 && s2 < 1.0) {
        return Err(HarnessError::InvalidConfig(
            "carrier is not resolved by the grid".into(),
        ));
    }
    let kx = 2.0 / h * s2.sqrt().asin();

    // Right-going packet: superposition of discrete plane waves with kx > 0.
    let sigma = PACKET_WIDTH * lx;
    let xc = PACKET_CENTER * lx;
    let quad = 2001;
    let k_lo = (kx0 - 8.0 / sigma).max(1e-9);
    let k_hi = kx0 + 8.0 / sigma;
    let dk = (k_hi - k_lo) / (quad - 1) as f64;
    let spectrum: Vec<(f64, f64, Complex64)> = (0..quad)
        .map(|q| {
            let k = k_lo + q as f64 * dk;
            let amp = sigma * (2.0 * PI).sqrt() * (-0.5 * (sigma * (k - kx0)).powi(2)).exp();
            (
                k,
                discrete_omega(k),
                Complex64::from_polar(amp * dk / (2.0 * PI), -(k - kx0) * xc),
            )
        })
        .collect();
    let packet = |x: f64, t: f64| -> Complex64 {
        spectrum
            .iter()
            .map(|&(k, w, a)| a * Complex64::from_polar(1.0, k * x - w * t))
            .sum()
    };
    let phase_y: Vec<Complex64> = (0..ny)
        .map(|j| Complex64::from_polar(1.0, ky * j as f64 * h))
        .collect();
    let field = |t: f64| -> Vec<f64> {
        let mut out = Vec::with_capacity((nx + 1) * ny);
        for i in 0..=nx {
            let f = packet(i as f64 * h, t);
            out.extend(phase_y.iter().map(|e| (f * e).re));
        }
        out
    };
    let mut um = field(0.0);
    let mut u = field(dt);
    let mut un = vec![0.0; (nx + 1) * ny];

    let lamx = 2.0 * PI / kx;
    let half_span = 0.25 * lamx;
    let centre = PROBE_CENTER * lx;
    let mut lines: Vec<usize> = (0..PROBE_LINES)
        .map(|l| {
            let x = centre - half_span + 2.0 * half_span * l as f64 / (PROBE_LINES - 1) as f64;
            ((x / h).round() as usize).clamp(1, nx - 1)
        })
        .collect();
    lines.dedup();
    if lines.len() < 3 {
        return Err(HarnessError::InvalidConfig(
            "probe lines collapse onto each other".into(),
        ));
    }

    let fold = if ky == 0.0 { 1.0 } else { 2.0 };
    let total = steps + 1;
    let taper_len = ((TAPER * total as f64) as usize).max(1);
    let mut dft = vec![Complex64::new(0.0, 0.0); lines.len()];
    let (mut misfit, mut power) = (0.0, 0.0);
    let mut record = |u: &[f64], n: usize| {
        let t = n as f64 * dt;
        let w = if n + taper_len >= total {
            let k = (n + taper_len - total) as f64;
            0.5 * (1.0 + (PI * k / taper_len as f64).cos())
        } else {
            1.0
        };
        let kernel = Complex64::from_polar(w * dt, omega0 * t);
        for (slot, &i) in dft.iter_mut().zip(&lines) {
            let row = &u[i * ny..(i + 1) * ny];
            let amp: Complex64 = row
                .iter()
                .zip(&phase_y)
                .map(|(v, e)| e.conj() * *v)
                .sum::<Complex64>()
                * (fold / ny as f64);
            for (v, e) in row.iter().zip(&phase_y) {
                misfit += (v - (amp * e).re).powi(2);
                power += v * v;
            }
            *slot += amp * kernel;
        }
    };
    record(&um, 0);
    record(&u, 1);

    let scheme = closure.map(|cl| BoxScheme::new(cl, dt, h));
    let q_avg = closure.map_or(0.0, |cl| 0.25 * cl.q0 / (2.0 * h));
    let e0 = energy_proxy(&u);
    for n in 1..steps {
        for i in 1..nx {
            let row = i * ny;
            for j in 0..ny {
                let jp = if j + 1 == ny { 0 } else { j + 1 };
                let jm = if j == 0 { ny - 1 } else { j - 1 };
                let k = row + j;
                un[k] = 2.0 * u[k] - um[k]
                    + lam2 * (u[k + ny] + u[k - ny] + u[row + jp] + u[row + jm] - 4.0 * u[k]);
            }
        }
        for (b, inner) in [(nx, nx - 1), (0, 1)] {
            let (rb, ri) = (b * ny, inner * ny);
            for j in 0..ny {
                un[rb + j] = match scheme {
                    Some(s) => {
                        let jp = if j + 1 == ny { 0 } else { j + 1 };
                        let jm = if j == 0 { ny - 1 } else { j - 1 };
                        let d = |v: &[f64], r: usize| v[r + jp] - v[r + jm];
                        let tang = q_avg * (d(&un, ri) + d(&u, ri) + 2.0 * d(&u, rb));
                        s.update(un[ri + j], u[rb + j], u[ri + j], tang)
                    }
                    None => 0.0,
                };
            }
        }
        std::mem::swap(&mut um, &mut u);
        std::mem::swap(&mut u, &mut un);
        record(&u, n + 1);
        if n % 64 == 0 {
            check_growth(n, energy_proxy(&u), e0)?;
        }
    }

    let xs: Vec<f64> = lines.iter().map(|&i| i as f64 * h).collect();
    let (incident, reflected, residual) = fit_two_waves(&xs, &dft, kx);
    let mode_residual = if power > 0.0 {
        (misfit / power).sqrt()
    } else {
        0.0
    };
    let residual = residual.max(mode_residual);
    if !(residual <= 0.1) {
        return Err(HarnessError::FitFailure { residual });
    }
    Ok(ReflectionReport::new(
        angle,
        incident,
        reflected,
        analytic_plane_ratio(angle),
    ))
}

fn energy_proxy(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum()
}

/// Least-squares fit of `d(x) = I exp(i k x) + R exp(-i k x)`; returns
/// `|I|`, `|R|` and the relative residual.
fn fit_two_waves(xs: &[f64], d: &[Complex64], k: f64) -> (f64, f64, f64) {
    let cols: Vec<(Complex64, Complex64)> = xs
        .iter()
        .map(|&x| {
            (
                Complex64::from_polar(1.0, k * x),
                Complex64::from_polar(1.0, -k * x),
            )
        })
        .collect();
    let (mut g11, mut g12, mut g22) = (0.0, Complex64::new(0.0, 0.0), 0.0);
    let (mut r1, mut r2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (&(a, b), &v) in cols.iter().zip(d) {
        g11 += a.norm_sqr();
        g22 += b.norm_sqr();
        g12 += a.conj() * b;
        r1 += a.conj() * v;
        r2 += b.conj() * v;
    }
    let det = g11 * g22 - g12.norm_sqr();
    let inc = (r1 * g22 - g12 * r2) / det;
    let refl = (r2 * g11 - g12.conj() * r1) / det;
    let norm: f64 = d.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let miss: f64 = cols
        .iter()
        .zip(d)
        .map(|(&(a, b), &v)| (a * inc + b * refl - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let residual = if norm > 0.0 { miss / norm } else { 0.0 };
    (inc.norm(), refl.norm(), residual)
}
