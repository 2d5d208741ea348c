use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{max_abs, settled_time, OdeError, OdeSystem};

/// Residual bound every reported equilibrium satisfies.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;
/// Largest residual accepted by [`classify_stability`].
pub const NEAR_EQUILIBRIUM_TOL: f64 = 1e-6;
/// Eigenvalues with `|Re| <= STABILITY_MARGIN` count as marginal.
pub const STABILITY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn from_real_parts(re: &[f64]) -> Self {
        if re.iter().any(|r| *r > STABILITY_MARGIN) {
            Self::Unstable
        } else if re.iter().all(|r| *r < -STABILITY_MARGIN) {
            Self::Stable
        } else {
            Self::Marginal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
            Self::Marginal => "marginal",
        }
    }

    pub fn is_stable(self) -> bool {
        self == Self::Stable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub point: Vec<f64>,
    /// `|rhs|_inf` at `point`.
    pub residual: f64,
    pub stability: Stability,
    /// Real parts of the Jacobian eigenvalues, ascending.
    pub eigen_real_parts: Vec<f64>,
}

/// Central finite-difference Jacobian, row-major.
///
/// Column `j` uses the step `max(1e-6, 1e-6 |x_j|)`.
pub fn jacobian<S: OdeSystem + ?Sized>(system: &S, t: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut jac = vec![0.0; n * n];
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for j in 0..n {
        let h = 1e-6_f64.max(1e-6 * libm::fabs(x[j]));
        xp[j] = x[j] + h;
        system.rhs(t, &xp, &mut fp);
        xp[j] = x[j] - h;
        system.rhs(t, &xp, &mut fm);
        xp[j] = x[j];
        for i in 0..n {
            jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

pub(crate) fn eigen_real_parts(jac: &[f64], n: usize) -> Vec<f64> {
    let mut re: Vec<f64> = if n == 1 {
        vec![jac[0]]
    } else {
        DMatrix::from_row_slice(n, n, jac)
            .complex_eigenvalues()
            .iter()
            .map(|c| c.re)
            .collect()
    };
    re.sort_by(f64::total_cmp);
    re
}

/// Classifies `point` at time `t`.
pub fn classify_stability_at<S: OdeSystem + ?Sized>(
    system: &S,
    point: &[f64],
    t: f64,
) -> Result<Equilibrium, OdeError> {
    let n = system.dim();
    if point.len() != n {
        return Err(OdeError::DimensionMismatch {
            expected: n,
            found: point.len(),
        });
    }
    let residual = max_abs(&system.eval(t, point));
    if !(residual <= NEAR_EQUILIBRIUM_TOL) {
        return Err(OdeError::NotAnEquilibrium { residual });
    }
    let jac = jacobian(system, t, point);
    let eigen_real_parts = eigen_real_parts(&jac, n);
    Ok(Equilibrium {
        point: point.to_vec(),
        residual,
        stability: Stability::from_real_parts(&eigen_real_parts),
        eigen_real_parts,
    })
}

/// Linear stability of a near-equilibrium, evaluated once all
/// piecewise-constant inputs have switched for the last time.
pub fn classify_stability<S: OdeSystem + ?Sized>(
    system: &S,
    point: &[f64],
) -> Result<Equilibrium, OdeError> {
    classify_stability_at(system, point, settled_time(system))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::FnSystem;

    #[test]
    fn linear_decay_is_stable() {
        let sys = FnSystem::new(&["x"], |_, x, dx| dx[0] = -x[0]);
        let eq = classify_stability(&sys, &[0.0]).unwrap();
        assert_eq!(eq.stability, Stability::Stable);
        assert!((eq.eigen_real_parts[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn logistic_origin_is_unstable() {
        let sys = FnSystem::new(&["x"], |_, x, dx| dx[0] = x[0] * (1.0 - x[0]));
        let eq = classify_stability(&sys, &[0.0]).unwrap();
        assert_eq!(eq.stability, Stability::Unstable);
        assert!((eq.eigen_real_parts[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_equilibrium() {
        let sys = FnSystem::new(&["x"], |_, x, dx| dx[0] = 1.0 - x[0]);
        assert!(matches!(
            classify_stability(&sys, &[0.5]),
            Err(OdeError::NotAnEquilibrium { .. })
        ));
    }

    #[test]
    fn center_is_marginal() {
        let sys = FnSystem::new(&["x", "y"], |_, x, dx| {
            dx[0] = x[1];
            dx[1] = -x[0];
        });
        let eq = classify_stability(&sys, &[0.0, 0.0]).unwrap();
        assert_eq!(eq.stability, Stability::Marginal);
    }

    #[test]
    fn triangular_jacobian_signs_match_diagonal() {
        // x' = -2x, y' = x + 3y: eigenvalues are the diagonal entries
        let sys = FnSystem::new(&["x", "y"], |_, x, dx| {
            dx[0] = -2.0 * x[0];
            dx[1] = x[0] + 3.0 * x[1];
        });
        let eq = classify_stability(&sys, &[0.0, 0.0]).unwrap();
        assert_eq!(eq.stability, Stability::Unstable);
        assert!((eq.eigen_real_parts[0] + 2.0).abs() < 1e-8);
        assert!((eq.eigen_real_parts[1] - 3.0).abs() < 1e-8);
    }
}
