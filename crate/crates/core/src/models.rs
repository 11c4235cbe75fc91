//! Coefficient builders for concrete physical models.

use serde::{Deserialize, Serialize};

use crate::linalg::{Matrix, ToleranceConfig};
use crate::operator::{validate_hyperbolicity_with, DeriveError, SystemCoefficients, TtbcOperator};
use crate::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("a boundary radius r > 0 is required for {0:?} geometry")]
    MissingRadius(Geometry),
    #[error("invalid stiffness: {0}")]
    InvalidStiffness(String),
    #[error(
        "VTI constraint a66 = (a11 - a12)/2 violated: a66 = {a66}, (a11 - a12)/2 = {expected}"
    )]
    VtiConstraint { a66: f64, expected: f64 },
    #[error("invalid moduli: {0}")]
    InvalidModuli(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Derive(#[from] DeriveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Plane,
    Circle,
    Sphere,
}

/// Scalar wave equation `u_tt = c^2 Laplace(u)` near a plane, circular or
/// spherical boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct ScalarWave<T: Real> {
    pub c: T,
    pub dim: usize,
    pub geometry: Geometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<T>,
}

/// Cylindrically orthotropic elasticity on the side surface `r = const`.
/// Unknowns are `(u_r, u_theta, u_z)`, tangential coordinates `(theta, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct OrthoCylElastic<T: Real> {
    pub rho: T,
    pub a11: T,
    pub a12: T,
    pub a13: T,
    pub a22: T,
    pub a23: T,
    pub a33: T,
    pub a44: T,
    pub a55: T,
    pub a66: T,
    pub r: T,
    #[serde(default)]
    pub vti: bool,
}

/// Isotropic inviscid Biot poroelasticity in Cartesian coordinates with a
/// boundary `x_k = const`, `k = normal_axis`. Unknowns are
/// `(u_1, u_2, u_3, w_1, w_2, w_3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct BiotCartesian<T: Real> {
    pub lambda: T,
    pub mu: T,
    pub alpha: T,
    pub m_biot: T,
    pub rho: T,
    pub rho_f: T,
    pub m_eff: T,
    pub normal_axis: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub enum ModelSpec<T: Real> {
    ScalarWave(ScalarWave<T>),
    OrthoCylElastic(OrthoCylElastic<T>),
    BiotCartesian(BiotCartesian<T>),
}

impl<T: Real> ModelSpec<T> {
    pub fn build(&self) -> Result<SystemCoefficients<T>, ModelError> {
        match self {
            ModelSpec::ScalarWave(s) => build_scalar_wave(s),
            ModelSpec::OrthoCylElastic(s) => build_ortho_cyl(s),
            ModelSpec::BiotCartesian(s) => build_biot(s),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::ScalarWave(_) => "scalar_wave",
            ModelSpec::OrthoCylElastic(_) => "ortho_cyl_elastic",
            ModelSpec::BiotCartesian(_) => "biot_cartesian",
        }
    }
}

fn positive<T: Real>(x: T) -> bool {
    x.is_finite() && x > T::zero()
}

/// `a = [c^2]`, `c0 = [(d - 1) c^2 / r]` on curved boundaries.
pub fn build_scalar_wave<T: Real>(
    spec: &ScalarWave<T>,
) -> Result<SystemCoefficients<T>, ModelError> {
    if !positive(spec.c) {
        return Err(ModelError::InvalidModel(format!(
            "wave speed must be positive, got {}",
            spec.c
        )));
    }
    if !(2..=3).contains(&spec.dim) {
        return Err(ModelError::InvalidModel(format!(
            "dim must be 2 or 3, got {}",
            spec.dim
        )));
    }
    let required = match spec.geometry {
        Geometry::Plane => spec.dim,
        Geometry::Circle => 2,
        Geometry::Sphere => 3,
    };
    if required != spec.dim {
        return Err(ModelError::InvalidModel(format!(
            "{:?} geometry needs dim = {required}",
            spec.geometry
        )));
    }
    let c2 = spec.c * spec.c;
    let c0 = match spec.geometry {
        Geometry::Plane => T::zero(),
        curved => match spec.r {
            Some(r) if positive(r) => T::lit((spec.dim - 1) as f64) * c2 / r,
            _ => return Err(ModelError::MissingRadius(curved)),
        },
    };
    let b = vec![Matrix::zeros(1); spec.dim - 1];
    Ok(SystemCoefficients::new(
        Matrix::from_diag(&[c2]),
        b,
        Matrix::from_diag(&[c0]),
    )?)
}

fn check_ortho<T: Real>(spec: &OrthoCylElastic<T>) -> Result<(), ModelError> {
    let named = [
        ("rho", spec.rho),
        ("a11", spec.a11),
        ("a12", spec.a12),
        ("a13", spec.a13),
        ("a22", spec.a22),
        ("a23", spec.a23),
        ("a33", spec.a33),
        ("a44", spec.a44),
        ("a55", spec.a55),
        ("a66", spec.a66),
        ("r", spec.r),
    ];
    if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
        return Err(ModelError::InvalidStiffness(format!(
            "{name} is not finite"
        )));
    }
    for (name, v) in [
        ("rho", spec.rho),
        ("a11", spec.a11),
        ("a55", spec.a55),
        ("a66", spec.a66),
        ("r", spec.r),
    ] {
        if !(v > T::zero()) {
            return Err(ModelError::InvalidStiffness(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    if spec.vti {
        let expected = (spec.a11 - spec.a12) / T::lit(2.0);
        let scale = spec.a11.abs().max(spec.a12.abs()).max(spec.a66.abs());
        if (spec.a66 - expected).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * scale {
            return Err(ModelError::VtiConstraint {
                a66: spec.a66.to_f64_lossy(),
                expected: expected.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// `a = diag(A11, A66, A55)/rho`, `c0 = a/r`, mixed terms `(A12 + A66)/(rho r)`
/// at `(r, theta)` and `(A13 + A55)/rho` at `(r, z)`.
pub fn build_ortho_cyl<T: Real>(
    spec: &OrthoCylElastic<T>,
) -> Result<SystemCoefficients<T>, ModelError> {
    check_ortho(spec)?;
    let inv_rho = T::one() / spec.rho;
    let a = Matrix::from_diag(&[spec.a11, spec.a66, spec.a55]).scale(inv_rho);
    let c0 = a.scale(T::one() / spec.r);
    let mut b_theta = Matrix::zeros(3);
    let bt = (spec.a12 + spec.a66) * inv_rho / spec.r;
    b_theta[(0, 1)] = bt;
    b_theta[(1, 0)] = bt;
    let mut b_z = Matrix::zeros(3);
    let bz = (spec.a13 + spec.a55) * inv_rho;
    b_z[(0, 2)] = bz;
    b_z[(2, 0)] = bz;
    Ok(SystemCoefficients::new(a, vec![b_theta, b_z], c0)?)
}

/// The orthotropic operator written out entry by entry.
pub fn closed_form_ortho_operator<T: Real>(
    spec: &OrthoCylElastic<T>,
) -> Result<TtbcOperator<T>, ModelError> {
    check_ortho(spec)?;
    let two = T::lit(2.0);
    let (r, sr) = (spec.r, spec.rho.sqrt());
    let (s11, s66, s55) = (spec.a11.sqrt(), spec.a66.sqrt(), spec.a55.sqrt());
    let (n12, n13) = (spec.a12 + spec.a66, spec.a13 + spec.a55);

    let p1 = Matrix::from_diag(&[-sr / s11, -sr / s66, -sr / s55]);
    let p = Matrix::identity(3).scale(-T::one() / (two * r));
    let mut q_theta = Matrix::zeros(3);
    q_theta[(0, 1)] = -n12 / ((s11 * s66 + spec.a11) * r);
    q_theta[(1, 0)] = -n12 / ((s11 * s66 + spec.a66) * r);
    let mut q_z = Matrix::zeros(3);
    q_z[(0, 2)] = -n13 / (s11 * s55 + spec.a11);
    q_z[(2, 0)] = -n13 / (s11 * s55 + spec.a55);

    let resolved_p1 = Matrix::from_diag(&[-s11 / sr, -s66 / sr, -s55 / sr]);
    let resolved_p = Matrix::from_diag(&[s11, s66, s55]).scale(T::one() / (two * r * sr));
    let mut rq_theta = Matrix::zeros(3);
    let rt = n12 / ((s11 + s66) * sr * r);
    rq_theta[(0, 1)] = rt;
    rq_theta[(1, 0)] = rt;
    let mut rq_z = Matrix::zeros(3);
    let rz = n13 / ((s11 + s55) * sr);
    rq_z[(0, 2)] = rz;
    rq_z[(2, 0)] = rz;

    Ok(TtbcOperator::from_all_parts(
        p1,
        p,
        vec![q_theta, q_z],
        resolved_p1,
        resolved_p,
        vec![rq_theta, rq_z],
    )?)
}

fn check_biot<T: Real>(spec: &BiotCartesian<T>) -> Result<(), ModelError> {
    let named = [
        ("lambda", spec.lambda),
        ("mu", spec.mu),
        ("alpha", spec.alpha),
        ("m_biot", spec.m_biot),
        ("rho", spec.rho),
        ("rho_f", spec.rho_f),
        ("m_eff", spec.m_eff),
    ];
    if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
        return Err(ModelError::InvalidModuli(format!("{name} is not finite")));
    }
    for (name, v) in [
        ("mu", spec.mu),
        ("m_biot", spec.m_biot),
        ("rho", spec.rho),
        ("m_eff", spec.m_eff),
    ] {
        if !(v > T::zero()) {
            return Err(ModelError::InvalidModuli(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    if !(spec.lambda + T::lit(2.0) * spec.mu > T::zero()) {
        return Err(ModelError::InvalidModuli(
            "lambda + 2 mu must be positive".into(),
        ));
    }
    if spec.rho_f < T::zero() {
        return Err(ModelError::InvalidModuli(format!(
            "rho_f must be non-negative, got {}",
            spec.rho_f
        )));
    }
    if !(spec.m_eff * spec.rho > spec.rho_f * spec.rho_f) {
        return Err(ModelError::InvalidModuli(
            "mass matrix is not positive definite: need m_eff > rho_f^2 / rho".into(),
        ));
    }
    if !(1..=3).contains(&spec.normal_axis) {
        return Err(ModelError::InvalidModuli(format!(
            "normal_axis must be 1, 2 or 3, got {}",
            spec.normal_axis
        )));
    }
    Ok(())
}

/// Six-component system `(u, w)` for a boundary normal to `normal_axis`.
///
/// Second-order operator of the isotropic law with `zeta = -div w`:
/// `u_i`: `(lambda + mu + alpha^2 M) d_i div u + mu Laplace(u_i) - alpha M d_i div w`,
/// `w_i`: `-alpha M d_i div u + M d_i div w`.
pub fn build_biot<T: Real>(spec: &BiotCartesian<T>) -> Result<SystemCoefficients<T>, ModelError> {
    check_biot(spec)?;
    let nrm = spec.normal_axis - 1;
    let tangential: Vec<usize> = (0..3).filter(|&k| k != nrm).collect();
    let grad_div = spec.lambda + spec.mu + spec.alpha * spec.alpha * spec.m_biot;
    let coupling = -spec.alpha * spec.m_biot;
    let mm = spec.m_biot;

    // Coefficient of d_x d_y acting on component j in equation i, before
    // symmetrisation over (x, y).
    let second = |i: usize, j: usize, x: usize, y: usize| -> T {
        let (bi, ci) = (i / 3, i % 3);
        let (bj, cj) = (j / 3, j % 3);
        let pair = if ci == x && cj == y {
            T::one()
        } else {
            T::zero()
        };
        match (bi, bj) {
            (0, 0) => {
                grad_div * pair
                    + if ci == cj && x == y {
                        spec.mu
                    } else {
                        T::zero()
                    }
            }
            (0, 1) | (1, 0) => coupling * pair,
            _ => mm * pair,
        }
    };
    let a = Matrix::from_fn(6, |i, j| second(i, j, nrm, nrm));
    let b = tangential
        .iter()
        .map(|&t| Matrix::from_fn(6, |i, j| second(i, j, nrm, t) + second(i, j, t, nrm)))
        .collect();
    let jm = Matrix::from_fn(6, |i, j| match (i / 3, j / 3, i % 3 == j % 3) {
        (_, _, false) => T::zero(),
        (0, 0, true) => spec.rho,
        (1, 1, true) => spec.m_eff,
        _ => spec.rho_f,
    });
    Ok(SystemCoefficients::with_parts(
        a,
        b,
        Matrix::zeros(6),
        Some(jm),
        None,
        &ToleranceConfig::default(),
    )?)
}

/// Removes components whose row and column of `a` vanish and returns the
/// removed indices. When nothing would remain the system is returned as is,
/// with every index listed, so that hyperbolicity validation rejects it.
pub fn reduce_degenerate<T: Real>(
    coeffs: &SystemCoefficients<T>,
) -> (SystemCoefficients<T>, Vec<usize>) {
    let report = validate_hyperbolicity_with(coeffs, &ToleranceConfig::default());
    let excluded = report.degenerate_indices;
    if excluded.is_empty() || excluded.len() == coeffs.dim() {
        return (coeffs.clone(), excluded);
    }
    let keep: Vec<usize> = (0..coeffs.dim())
        .filter(|i| !excluded.contains(i))
        .collect();
    (coeffs.restrict(&keep), excluded)
}
