use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// A smooth autonomous-or-switched ODE `x' = f(t, x)`.
///
/// Implementations must write exactly `dim()` entries into `dx` and be
/// deterministic. Time dependence is allowed only through piecewise-constant
/// inputs whose switch times are reported by [`breakpoints`](Self::breakpoints),
/// plus the flagged continuous signals of the model catalog.
pub trait OdeSystem: Send + Sync {
    fn dim(&self) -> usize;

    /// Coordinate labels, `dim()` of them.
    fn names(&self) -> &[&'static str];

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]);

    /// Times at which the right-hand side is discontinuous.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Convenience wrapper that allocates the derivative.
    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut dx = alloc::vec![0.0; self.dim()];
        self.rhs(t, x, &mut dx);
        dx
    }
}

/// First time after which all piecewise-constant inputs are frozen.
pub fn settled_time<S: OdeSystem + ?Sized>(system: &S) -> f64 {
    system
        .breakpoints()
        .into_iter()
        .fold(0.0_f64, f64::max)
}

impl<S: OdeSystem + ?Sized> OdeSystem for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn names(&self) -> &[&'static str] {
        (**self).names()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).rhs(t, x, dx)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<S: OdeSystem + ?Sized> OdeSystem for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn names(&self) -> &[&'static str] {
        (**self).names()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).rhs(t, x, dx)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<S: OdeSystem + ?Sized> OdeSystem for Arc<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn names(&self) -> &[&'static str] {
        (**self).names()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).rhs(t, x, dx)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// An [`OdeSystem`] backed by a closure, for ad-hoc and test systems.
pub struct FnSystem<F> {
    names: Vec<&'static str>,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(names: &[&'static str], f: F) -> Self {
        Self {
            names: names.to_vec(),
            f,
        }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.names.len()
    }
    fn names(&self) -> &[&'static str] {
        &self.names
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.f)(t, x, dx)
    }
}
