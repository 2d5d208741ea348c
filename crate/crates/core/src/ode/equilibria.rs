use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{
    classify_stability_at, jacobian, max_abs, settled_time, Equilibrium, OdeError, OdeSystem,
    EQUILIBRIUM_TOL, MAX_DIM,
};

/// Two equilibria closer than this (relative to their magnitude) are merged.
pub const DEDUP_RELATIVE_TOL: f64 = 1e-6;

const PRIMES: [u64; MAX_DIM] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
const MAX_NEWTON_ITER: usize = 100;
const MAX_BACKTRACK: usize = 40;

/// Radical inverse of `index` in each of the first `dim` prime bases.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    PRIMES[..dim]
        .iter()
        .map(|&base| {
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Damped Newton iteration on `rhs(t, x) = 0` with backtracking on `|rhs|^2`.
///
/// Returns the final point whenever its residual is within
/// [`EQUILIBRIUM_TOL`], `None` otherwise.
pub fn newton_refine<S: OdeSystem + ?Sized>(system: &S, t: f64, x0: &[f64]) -> Option<Vec<f64>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut f = system.eval(t, &x);
    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    for _ in 0..MAX_NEWTON_ITER {
        let res = max_abs(&f);
        if !res.is_finite() {
            return None;
        }
        if res <= 1e-13 {
            break;
        }
        let jac = DMatrix::from_row_slice(n, n, &jacobian(system, t, &x));
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs)?;
        if step.iter().any(|s| !s.is_finite()) {
            return None;
        }
        let f2 = norm2(&f);
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..MAX_BACKTRACK {
            for i in 0..n {
                trial[i] = x[i] + lambda * step[i];
            }
            system.rhs(t, &trial, &mut f_trial);
            let g2 = norm2(&f_trial);
            if g2.is_finite() && g2 <= (1.0 - 1e-4 * lambda) * f2 {
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
        let moved = max_abs(&step.as_slice().iter().map(|s| lambda * s).collect::<Vec<_>>());
        x.copy_from_slice(&trial);
        f.copy_from_slice(&f_trial);
        if moved <= 1e-15 * (1.0 + max_abs(&x)) {
            break;
        }
    }
    (max_abs(&f) <= EQUILIBRIUM_TOL).then_some(x)
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| libm::fabs(x - y))
        .fold(0.0, f64::max);
    diff <= DEDUP_RELATIVE_TOL * max_abs(a).max(max_abs(b)).max(1.0)
}

/// Multi-start search for equilibria inside `bounds` (one `(lo, hi)` per
/// coordinate).
///
/// Seeds are the first `n_starts` points of a Halton sequence scaled to the
/// box. Each is refined by damped Newton; converged points outside the box
/// are dropped, near-duplicates merged, and the survivors classified and
/// returned in lexicographic order.
pub fn find_equilibria<S: OdeSystem + ?Sized>(
    system: &S,
    bounds: &[(f64, f64)],
    n_starts: usize,
) -> Result<Vec<Equilibrium>, OdeError> {
    let n = system.dim();
    if bounds.len() != n {
        return Err(OdeError::DimensionMismatch {
            expected: n,
            found: bounds.len(),
        });
    }
    if n == 0 || n > MAX_DIM {
        return Err(OdeError::InvalidInput("dimension must be between 1 and 10"));
    }
    if bounds
        .iter()
        .any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
    {
        return Err(OdeError::InvalidInput("box bounds must be finite with lo < hi"));
    }
    if n_starts == 0 {
        return Err(OdeError::InvalidInput("n_starts must be at least 1"));
    }
    let t = settled_time(system);
    let inside = |x: &[f64]| {
        x.iter().zip(bounds).all(|(v, (lo, hi))| {
            let slack = 1e-9 * (hi - lo);
            *v >= lo - slack && *v <= hi + slack
        })
    };

    let mut found: Vec<Equilibrium> = Vec::new();
    for k in 1..=n_starts as u64 {
        let seed: Vec<f64> = halton(k, n)
            .iter()
            .zip(bounds)
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect();
        let Some(x) = newton_refine(system, t, &seed) else {
            continue;
        };
        if !inside(&x) {
            continue;
        }
        let Ok(eq) = classify_stability_at(system, &x, t) else {
            continue;
        };
        match found.iter_mut().find(|e| same_point(&e.point, &eq.point)) {
            Some(existing) => {
                if eq.residual < existing.residual {
                    *existing = eq;
                }
            }
            None => found.push(eq),
        }
    }
    found.sort_by(|a, b| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(found)
}
