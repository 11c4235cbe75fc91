use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::anyhow;
use ttbc_core::harness::{
    analytic_plane_ratio, run_1d, run_2d_disk, run_2d_plane_reflection, Domain, EnergyTrace,
    HarnessError, ReflectionReport, SimulationConfig,
};

use crate::input::{check_output, load, write, ReflectionInput, SimulateInput};
use crate::Outcome;

/// Runs the configured simulation. Intervals write `t,energy`, disks write
/// `t,full,characteristic_only`, rectangles write one reflection row.
pub(crate) fn run_simulation(input: &Path, output: &Path) -> Outcome {
    check_output(output)?;
    let cfg = load::<SimulateInput>(input)?.value.simulation;
    let mut out = csv::Writer::from_writer(Vec::new());
    match cfg.domain {
        Domain::Interval { .. } => {
            let (trace, _) = run_1d(&cfg)?;
            out.write_record(["t", "energy"])?;
            write_traces(&mut out, &[&trace])?;
        }
        Domain::Disk { .. } => {
            let (full, plain) = run_2d_disk(&cfg)?;
            out.write_record(["t", "full", "characteristic_only"])?;
            write_traces(&mut out, &[&full, &plain])?;
        }
        Domain::Rectangle { .. } => {
            let report = run_2d_plane_reflection(&cfg)?;
            out.write_record(REFLECTION_HEADER)?;
            out.write_record(reflection_row(report.angle.to_degrees(), Ok(&report)))?;
        }
    }
    write(output, &out.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    Ok(())
}

fn write_traces(out: &mut csv::Writer<Vec<u8>>, traces: &[&EnergyTrace]) -> anyhow::Result<()> {
    for (k, t) in traces[0].times.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(traces.iter().map(|tr| tr.energies[k].to_string()));
        out.write_record(&row)?;
    }
    Ok(())
}

const REFLECTION_HEADER: [&str; 5] = ["theta_deg", "measured", "analytic", "rel_error", "error"];

fn reflection_row(theta_deg: f64, result: Result<&ReflectionReport, &HarnessError>) -> Vec<String> {
    let analytic = analytic_plane_ratio(theta_deg.to_radians()).to_string();
    let deg = theta_deg.to_string();
    match result {
        Ok(r) => vec![
            deg,
            r.measured_ratio.to_string(),
            analytic,
            r.relative_error.to_string(),
            String::new(),
        ],
        Err(e) => vec![deg, String::new(), analytic, String::new(), e.to_string()],
    }
}

/// Plane-wave reflection at every listed angle, in parallel. Succeeds when at
/// least one angle produced a measurement.
pub(crate) fn run_sweep(input: &Path, output: &Path) -> Outcome {
    check_output(output)?;
    let cfg = load::<ReflectionInput>(input)?.value;
    if !(!cfg.angles_deg.is_empty()) {
        return Err(anyhow!("angle list is empty").into());
    }
    for &a in &cfg.angles_deg {
        if !((0.0..90.0).contains(&a)) {
            return Err(anyhow!("angle {a} outside [0, 90) degrees").into());
        }
    }
    let angles: Vec<f64> = cfg.angles_deg.iter().map(|a| a.to_radians()).collect();
    let results = sweep(&angles, cfg.cells);

    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(REFLECTION_HEADER)?;
    for (&deg, result) in cfg.angles_deg.iter().zip(&results) {
        out.write_record(reflection_row(deg, result.as_ref()))?;
    }
    write(output, &out.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    if !(results.iter().any(Result::is_ok)) {
        return Err(anyhow!("every angle failed").into());
    }
    Ok(())
}

fn sweep(angles: &[f64], cells: usize) -> Vec<Result<ReflectionReport, HarnessError>> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(angles.len());
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<ReflectionReport, HarnessError>>>> =
        Mutex::new(vec![None; angles.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&theta) = angles.get(k) else { break };
                let result = SimulationConfig::plane_reflection(theta, cells)
                    .map_err(|e| HarnessError::InvalidConfig(e.to_string()))
                    .and_then(|c| run_2d_plane_reflection(&c));
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[k] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every angle ran"))
        .collect()
}
