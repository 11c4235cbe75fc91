use super::{
    check_growth, BoxScheme, Closure, Domain, EnergyTrace, HarnessError, ReflectionReport,
    SimulationConfig, Source,
};

/// Leapfrog on `[0, L]` with both ends closed by the configured boundary.
///
/// The Gaussian source is launched as an exact right-moving pulse. The
/// measured ratio is `max |u|` at the final time over the pulse amplitude;
/// the analytic ratio is 1 for a Dirichlet wall and 0 otherwise.
pub fn run_1d(config: &SimulationConfig) -> Result<(EnergyTrace, ReflectionReport), HarnessError> {
    config.check_common()?;
    let Domain::Interval { length } = config.domain else {
        return Err(HarnessError::InvalidConfig(
            "run_1d needs an interval domain".into(),
        ));
    };
    if !(length > 0.0) {
        return Err(HarnessError::InvalidConfig(
            "interval length must be positive".into(),
        ));
    }
    let closure = Closure::from_boundary(&config.boundary)?;
    let cells = (length / config.h).round().max(2.0) as usize;
    let h = length / cells as f64;
    let c = config.c;
    let steps = (config.duration / (config.cfl * h / c)).ceil() as usize;
    let dt = if steps > 0 {
        config.duration / steps as f64
    } else {
        config.cfl * h / c
    };
    let lam2 = (c * dt / h).powi(2);

    let initial: Box<dyn Fn(f64) -> f64> = match &config.source {
        Source::Gaussian {
            center,
            width,
            amplitude,
        } => {
            let (x0, w, amp) = (
                *center.first().unwrap_or(&(0.5 * length)),
                *width,
                *amplitude,
            );
            if !(w > 0.0) {
                return Err(HarnessError::InvalidConfig(
                    "pulse width must be positive".into(),
                ));
            }
            Box::new(move |x: f64| amp * (-0.5 * ((x - x0) / w).powi(2)).exp())
        }
        Source::None => Box::new(|_| 0.0),
        Source::PlaneWave { .. } => {
            return Err(HarnessError::InvalidConfig(
                "plane waves need a rectangle".into(),
            ))
        }
    };
    let amplitude = match &config.source {
        Source::Gaussian { amplitude, .. } => amplitude.abs(),
        _ => 0.0,
    };

    let x = |i: usize| i as f64 * h;
    let mut um: Vec<f64> = (0..=cells).map(|i| initial(x(i))).collect();
    let mut u: Vec<f64> = (0..=cells).map(|i| initial(x(i) - c * dt)).collect();
    let mut un = vec![0.0; cells + 1];
    let scheme = closure.map(|cl| BoxScheme::new(cl, dt, h));

    let energy = |new: &[f64], old: &[f64]| {
        let mut kin = 0.0;
        for i in 0..=cells {
            let w = if i == 0 || i == cells { 0.5 } else { 1.0 };
            kin += w * ((new[i] - old[i]) / dt).powi(2);
        }
        let pot: f64 = (0..cells)
            .map(|i| (new[i + 1] - new[i]) * (old[i + 1] - old[i]))
            .sum();
        0.5 * kin * h + 0.5 * c * c * pot / h
    };

    let mut trace = EnergyTrace::default();
    let e0 = energy(&u, &um);
    trace.push(0.5 * dt, e0);
    for n in 1..steps {
        for i in 1..cells {
            un[i] = 2.0 * u[i] - um[i] + lam2 * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
        }
        match scheme {
            Some(s) => {
                un[cells] = s.update(un[cells - 1], u[cells], u[cells - 1], 0.0);
                un[0] = s.update(un[1], u[0], u[1], 0.0);
            }
            None => {
                un[0] = 0.0;
                un[cells] = 0.0;
            }
        }
        std::mem::swap(&mut um, &mut u);
        std::mem::swap(&mut u, &mut un);
        let e = energy(&u, &um);
        check_growth(n, e, e0)?;
        trace.push((n as f64 + 0.5) * dt, e);
    }

    let reflected = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let analytic = if closure.is_none() { 1.0 } else { 0.0 };
    Ok((
        trace,
        ReflectionReport::new(0.0, amplitude, reflected, analytic),
    ))
}
