use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which dispersive equation is being solved.
///
/// * mKdV: `u_t + u_xxx + μ u² u_x = 0`, real `u`, `μ = ±1`.
/// * tNLS: `v_t + iα v_xx + β v_xxx + iγ|v|²v = 0`, complex `v`, `β ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EquationSpec {
    Mkdv { mu: f64 },
    Tnls { alpha: f64, beta: f64, gamma: f64 },
}

impl EquationSpec {
    pub fn mkdv(mu: f64) -> Result<Self> {
        if mu != 1.0 && mu != -1.0 {
            return Err(Error::InvalidParameter(format!(
                "mKdV mu = {mu} must be +1 or -1"
            )));
        }
        Ok(Self::Mkdv { mu })
    }

    pub fn defocusing_mkdv() -> Self {
        Self::Mkdv { mu: -1.0 }
    }

    pub fn focusing_mkdv() -> Self {
        Self::Mkdv { mu: 1.0 }
    }

    pub fn tnls(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "tNLS requires beta != 0 (third-order dispersion)".into(),
            ));
        }
        if !alpha.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParameter(
                "tNLS coefficients must be finite".into(),
            ));
        }
        Ok(Self::Tnls { alpha, beta, gamma })
    }

    /// Dispersion relation of the linear part: `ξ³` or `αξ² + βξ³`.
    #[inline]
    pub fn phase(&self, xi: f64) -> f64 {
        match *self {
            Self::Mkdv { .. } => xi * xi * xi,
            Self::Tnls { alpha, beta, .. } => alpha * xi * xi + beta * xi * xi * xi,
        }
    }

    pub fn is_mkdv(&self) -> bool {
        matches!(self, Self::Mkdv { .. })
    }

    /// mKdV states are real in physical space.
    pub fn real_valued(&self) -> bool {
        self.is_mkdv()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mkdv { .. } => "mkdv",
            Self::Tnls { .. } => "tnls",
        }
    }
}

pub fn phase_symbol(eq: &EquationSpec, xi: f64) -> f64 {
    eq.phase(xi)
}
