use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use ttbc_core::linalg::{solve_sylvester_sym, spd_sqrt, sylvester_residual};
use ttbc_core::{
    build_biot, build_scalar_wave, derive_operator, reduce_degenerate, validate_hyperbolicity,
    BiotCartesian, Geometry, Matrix64, ModelSpec64, ScalarWave, SystemCoefficients64,
    TtbcOperator64,
};

use crate::input::{check_output, write, SCHEMA_VERSION};
use crate::{tolerance_scale, Failure, Outcome, EXIT_VERIFY};

const BUNDLED_FIXTURE: &str = include_str!("../fixtures/ortho_oracle.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Pipeline output against the closed-form operators stored in the fixture.
    Oracle,
    /// Scalar waves on circles and spheres against the local condition.
    CrossCheck,
    /// Square-root, Sylvester and resolved-form residuals on random systems.
    Residuals,
    /// Reduced poroelastic operator.
    Biot,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Oracle,
        Suite::CrossCheck,
        Suite::Residuals,
        Suite::Biot,
    ];

    pub fn parse(name: &str) -> anyhow::Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.to_string() == name)
            .ok_or_else(|| {
                anyhow!(
                    "unknown suite {name:?}; known suites: oracle, cross-check, residuals, biot"
                )
            })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Oracle => "oracle",
            Suite::CrossCheck => "cross-check",
            Suite::Residuals => "residuals",
            Suite::Biot => "biot",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Worst observed error.
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixture {
    schema_version: u32,
    cases: Vec<FixtureCase>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureCase {
    name: String,
    model: ModelSpec64,
    expected: TtbcOperator64,
}

pub(crate) fn run(
    suites: Option<Vec<String>>,
    fixture: Option<&Path>,
    output: Option<&Path>,
) -> Outcome {
    if let Some(out) = output {
        check_output(out)?;
    }
    let suites: Vec<Suite> = match suites {
        None => Suite::ALL.to_vec(),
        Some(names) => names
            .iter()
            .filter(|n| !n.trim().is_empty())
            .map(|n| Suite::parse(n.trim()))
            .collect::<Result<_, _>>()?,
    };
    if suites.is_empty() {
        return Err(anyhow!("no suite selected; nothing to verify").into());
    }
    let fixture = load_fixture(fixture)?;
    let scale = tolerance_scale()?;

    let mut checks = Vec::new();
    for suite in suites {
        match suite {
            Suite::Oracle => oracle(&fixture, scale, &mut checks)?,
            Suite::CrossCheck => cross_check(scale, &mut checks)?,
            Suite::Residuals => residuals(scale, &mut checks)?,
            Suite::Biot => biot(scale, &mut checks)?,
        }
    }
    if checks.is_empty() {
        return Err(anyhow!("the selected suites contain no checks; nothing to verify").into());
    }
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
    text.push('\n');
    match output {
        Some(path) => write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    match report.checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(Failure::new(
            EXIT_VERIFY,
            anyhow!(
                "check {} failed: error {:e} exceeds {:e}",
                c.name,
                c.value,
                c.tolerance
            ),
        )),
    }
}

fn load_fixture(path: Option<&Path>) -> anyhow::Result<Fixture> {
    let text = match path {
        Some(p) => {
            std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?
        }
        None => BUNDLED_FIXTURE.to_string(),
    };
    let fixture: Fixture = serde_json::from_str(&text).context("malformed fixture")?;
    if fixture.schema_version != SCHEMA_VERSION {
        bail!(
            "unsupported fixture schema_version {}",
            fixture.schema_version
        );
    }
    Ok(fixture)
}

fn push(checks: &mut Vec<Check>, suite: Suite, name: String, value: f64, tolerance: f64) {
    checks.push(Check {
        suite,
        name,
        passed: value <= tolerance,
        value,
        tolerance,
    });
}

fn oracle(fixture: &Fixture, scale: f64, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    for case in &fixture.cases {
        let derived = derive_operator(&case.model.build()?)
            .with_context(|| format!("fixture case {}", case.name))?;
        let value = if derived.dim() == case.expected.dim()
            && derived.q().len() == case.expected.q().len()
        {
            derived.max_abs_difference(&case.expected)
        } else {
            f64::INFINITY
        };
        push(
            checks,
            Suite::Oracle,
            format!("oracle/{}", case.name),
            value,
            1e-10 * scale,
        );
    }
    Ok(())
}

fn cross_check(scale: f64, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    for (geometry, dim) in [(Geometry::Circle, 2usize), (Geometry::Sphere, 3)] {
        let mut worst: f64 = 0.0;
        for c in [1.0, 2.0, 340.0] {
            for r in [0.5, 1.0, 10.0] {
                let op = derive_operator(&build_scalar_wave(&ScalarWave {
                    c,
                    dim,
                    geometry,
                    r: Some(r),
                })?)?;
                let damping = (dim as f64 - 1.0) / 2.0 * c / r;
                worst = worst.max((-op.resolved_p1()[(0, 0)] - c).abs() / c);
                worst = worst.max((op.resolved_p_alg()[(0, 0)] - damping).abs() / damping);
            }
        }
        let name = format!("cross-check/{}", if dim == 2 { "circle" } else { "sphere" });
        push(checks, Suite::CrossCheck, name, worst, 1e-12 * scale);
    }
    Ok(())
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix64 {
    let g = Matrix64::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let mut m = (&g * &g.transpose()).symmetric_part();
    for i in 0..n {
        m[(i, i)] += 0.1;
    }
    m
}

fn residuals(scale: f64, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut root, mut sylv, mut resolved): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let a = random_spd(&mut rng, n);
        let s = spd_sqrt(&a)?;
        root = root.max((&s * &s).relative_distance(&a, 1e-300));

        let b = Matrix64::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let c0 = Matrix64::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let coeffs = SystemCoefficients64::new(a.clone(), vec![b.clone()], c0.clone())?;
        let op = derive_operator(&coeffs)?;
        let l = -op.p1();
        let a_inv = a.inverse()?;
        sylv = sylv.max(sylvester_residual(
            &l,
            &l,
            &-&(&(&a_inv * &b) * &l),
            &op.q()[0],
        ));
        sylv = sylv.max(sylvester_residual(
            &l,
            &l,
            &-&(&(&a_inv * &c0) * &l),
            op.p_alg(),
        ));

        // resolved coefficients straight from their own Sylvester equations
        let rq = solve_sylvester_sym(&l, &(&(&l * &b) * &l))?;
        let rp = solve_sylvester_sym(&l, &(&(&l * &c0) * &l))?;
        resolved = resolved.max(op.resolved_q()[0].relative_distance(&rq, 1e-300));
        resolved = resolved.max(op.resolved_p_alg().relative_distance(&rp, 1e-300));
    }
    push(
        checks,
        Suite::Residuals,
        "residuals/square-root".into(),
        root,
        1e-10 * scale,
    );
    push(
        checks,
        Suite::Residuals,
        "residuals/sylvester".into(),
        sylv,
        1e-10 * scale,
    );
    push(
        checks,
        Suite::Residuals,
        "residuals/resolved-form".into(),
        resolved,
        1e-8 * scale,
    );
    Ok(())
}

fn biot(scale: f64, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    let spec = BiotCartesian {
        lambda: 1.0,
        mu: 1.0,
        alpha: 1.0,
        m_biot: 1.0,
        rho: 1.0,
        rho_f: 0.5,
        m_eff: 2.0,
        normal_axis: 1,
    };
    let (coeffs, _) = reduce_degenerate(&build_biot(&spec)?);
    let report = validate_hyperbolicity(&coeffs);
    let spectrum = if report.ok { 0.0 } else { f64::INFINITY };
    push(
        checks,
        Suite::Biot,
        "biot/positive-spectrum".into(),
        spectrum,
        0.0,
    );
    let op = derive_operator(&coeffs)?;
    let j = coeffs
        .mass()
        .ok_or_else(|| anyhow!("poroelastic model lost its mass matrix"))?;
    let target = &j.inverse()? * coeffs.a();
    let n = coeffs.dim();
    let square = (&(op.p1() * op.p1()) * &target).relative_distance(&Matrix64::identity(n), 1.0);
    push(
        checks,
        Suite::Biot,
        "biot/root".into(),
        square,
        1e-9 * scale,
    );
    let l = -op.p1();
    let a_inv = coeffs.a().inverse()?;
    let mut worst: f64 = 0.0;
    for (b, q) in coeffs.b().iter().zip(op.q()) {
        worst = worst.max(sylvester_residual(&l, &l, &-&(&(&a_inv * b) * &l), q));
    }
    let mut rhs = -&(&(&a_inv * coeffs.c0()) * &l);
    for ((b, d), q) in coeffs.b().iter().zip(coeffs.d_tau()).zip(op.q()) {
        rhs = &(&rhs - &(&a_inv * &(b * d))) - &(q * d);
    }
    worst = worst.max(sylvester_residual(&l, &l, &rhs, op.p_alg()));
    push(
        checks,
        Suite::Biot,
        "biot/sylvester".into(),
        worst,
        1e-9 * scale,
    );
    Ok(())
}
