use std::fmt::Write as _;
use std::path::Path;

use anyhow::anyhow;
use serde::{Deserialize, Serialize};
use ttbc_core::operator::validate_hyperbolicity_with;
use ttbc_core::{
    derive_operator_with, reduce_degenerate, BiotCartesian, DeriveError, Geometry,
    HyperbolicityReport64, ModelError, ModelSpec64, OrthoCylElastic, ScalarWave, TtbcOperator64,
};

use crate::input::{check_output, load, write, DeriveInput, SCHEMA_VERSION};
use crate::{tolerance_scale, Failure, Outcome, EXIT_INPUT, EXIT_NOT_HYPERBOLIC};

/// Document written by `derive`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveOutput {
    pub schema_version: u32,
    /// Model name, absent for raw coefficients.
    pub model: Option<String>,
    /// Components dropped because they carry no normal second derivative.
    pub excluded_components: Vec<usize>,
    pub operator: TtbcOperator64,
    pub hyperbolicity: HyperbolicityReport64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub input_sha256: String,
    pub tool: String,
    pub version: String,
}

pub(crate) fn run(input: &Path, output: &Path) -> Outcome {
    check_output(output)?;
    let loaded = load::<DeriveInput>(input)?;
    let scale = tolerance_scale()?;
    let cfg = loaded.value;
    let mut tol = cfg.tolerances.unwrap_or_default();
    tol.residual *= scale;

    let (coeffs, model) = match (cfg.model, cfg.coefficients) {
        (Some(m), None) => (m.build().map_err(model_failure)?, Some(m)),
        (None, Some(c)) => (c, None),
        (Some(_), Some(_)) => {
            return Err(anyhow!("\"model\" and \"coefficients\" are mutually exclusive").into())
        }
        (None, None) => {
            return Err(anyhow!("input needs a \"model\" or a \"coefficients\" key").into())
        }
    };
    let (coeffs, excluded) = match model {
        Some(_) => reduce_degenerate(&coeffs),
        None => (coeffs, Vec::new()),
    };
    let report = validate_hyperbolicity_with(&coeffs, &tol);
    if !report.ok {
        return Err(not_hyperbolic(&report));
    }
    let operator = derive_operator_with(&coeffs, &tol).map_err(derive_failure)?;
    let doc = DeriveOutput {
        schema_version: SCHEMA_VERSION,
        model: model.map(|m| m.name().to_string()),
        excluded_components: excluded,
        operator,
        hyperbolicity: report,
        provenance: Provenance {
            input_sha256: loaded.sha256,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(anyhow::Error::from)?;
    text.push('\n');
    write(output, text.as_bytes())?;
    Ok(())
}

fn not_hyperbolic(report: &HyperbolicityReport64) -> Failure {
    let json = serde_json::to_string_pretty(report).unwrap_or_default();
    eprintln!("{json}");
    Failure::new(
        EXIT_NOT_HYPERBOLIC,
        anyhow!("system is not hyperbolic: {}", report.message),
    )
}

fn derive_failure(err: DeriveError) -> Failure {
    match err {
        DeriveError::NotHyperbolic { .. } => Failure::new(EXIT_NOT_HYPERBOLIC, err),
        other => Failure::new(EXIT_INPUT, other),
    }
}

fn model_failure(err: ModelError) -> Failure {
    match err {
        ModelError::Derive(inner) => derive_failure(inner),
        other => Failure::new(EXIT_INPUT, other),
    }
}

pub(crate) fn model_listing() -> String {
    let examples = [
        ModelSpec64::ScalarWave(ScalarWave {
            c: 2.0,
            dim: 2,
            geometry: Geometry::Circle,
            r: Some(1.0),
        }),
        ModelSpec64::OrthoCylElastic(OrthoCylElastic {
            rho: 1.0,
            a11: 4.0,
            a12: 1.0,
            a13: 1.0,
            a22: 4.0,
            a23: 1.0,
            a33: 4.0,
            a44: 1.0,
            a55: 1.0,
            a66: 1.0,
            r: 1.0,
            vti: false,
        }),
        ModelSpec64::BiotCartesian(BiotCartesian {
            lambda: 1.0,
            mu: 1.0,
            alpha: 1.0,
            m_biot: 1.0,
            rho: 1.0,
            rho_f: 0.5,
            m_eff: 2.0,
            normal_axis: 1,
        }),
    ];
    let mut out = String::new();
    for m in &examples {
        let example = serde_json::json!({ "schema_version": SCHEMA_VERSION, "model": m });
        let _ = writeln!(out, "{}\n  {}", m.name(), example);
    }
    out
}
