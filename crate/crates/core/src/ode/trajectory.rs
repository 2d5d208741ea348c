use alloc::vec::Vec;

/// Time series of states produced by the integrator.
///
/// States are stored row-major in one flat buffer; `times` is strictly
/// increasing and `times[0]` is the initial time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    names: Vec<&'static str>,
    times: Vec<f64>,
    data: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn new(names: &[&'static str]) -> Self {
        Self {
            names: names.to_vec(),
            times: Vec::new(),
            data: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, x: &[f64]) {
        debug_assert_eq!(x.len(), self.names.len());
        if let Some(&last) = self.times.last() {
            if t <= last {
                return;
            }
        }
        self.times.push(t);
        self.data.extend_from_slice(x);
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim().max(1))
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Values of coordinate `j` over time.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.states().map(|x| x[j]).collect()
    }

    /// Index of the coordinate called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    /// Linear interpolation of the state at `t`, clamped to the time range.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let n = self.len();
        if t <= self.times[0] {
            return self.state(0).to_vec();
        }
        if t >= self.times[n - 1] {
            return self.final_state().to_vec();
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        self.state(i)
            .iter()
            .zip(self.state(i + 1))
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// Appends `other`, whose first time must not precede our last.
    pub fn append(&mut self, other: &Trajectory) {
        for (t, x) in other.times.iter().zip(other.states()) {
            self.push(*t, x);
        }
    }
}
