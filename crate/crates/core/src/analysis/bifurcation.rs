use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::AnalysisError;
use crate::models::ModelFamily;
use crate::ode::{find_equilibria, Equilibrium, Stability};

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub grid_index: usize,
    pub point: Vec<f64>,
    pub stability: Stability,
}

/// Equilibria linked across consecutive grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
}

/// Grid interval over which the number of stable equilibria changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationEvent {
    pub lower: f64,
    pub upper: f64,
    pub stable_before: usize,
    pub stable_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    pub param_name: String,
    pub grid: Vec<f64>,
    /// Equilibria at each grid value, as returned by the search.
    pub equilibria: Vec<Vec<Equilibrium>>,
    pub branches: Vec<Branch>,
    pub events: Vec<BifurcationEvent>,
}

impl BifurcationDiagram {
    pub fn stable_counts(&self) -> Vec<usize> {
        self.equilibria
            .iter()
            .map(|eqs| eqs.iter().filter(|e| e.stability.is_stable()).count())
            .collect()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
}

/// Equilibria and their stability over a parameter grid.
///
/// `bounds` of `None` uses the family's own search box at every grid value.
pub fn bifurcation_sweep<F: ModelFamily>(
    family: &F,
    param_name: &str,
    grid: &[f64],
    bounds: Option<&[(f64, f64)]>,
    n_starts: usize,
) -> Result<BifurcationDiagram, AnalysisError> {
    if grid.is_empty() {
        return Err(AnalysisError::InvalidGrid("grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::InvalidGrid("grid must be finite and strictly increasing"));
    }
    if family.parameter(param_name).is_none() {
        // Probe settability so unknown names fail before any work.
        family.clone().set_parameter(param_name, grid[0])?;
    }

    let mut equilibria = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut f = family.clone();
        f.set_parameter(param_name, value)?;
        let system = f.build()?;
        let search = match bounds {
            Some(b) => b.to_vec(),
            None => f.search_box(),
        };
        let eqs = find_equilibria(&system, &search, n_starts)?;
        if eqs.is_empty() {
            return Err(AnalysisError::NoEquilibria { value });
        }
        equilibria.push(eqs);
    }

    let branches = link_branches(&equilibria);
    let counts: Vec<usize> = equilibria
        .iter()
        .map(|eqs| eqs.iter().filter(|e| e.stability.is_stable()).count())
        .collect();
    let events = counts
        .windows(2)
        .enumerate()
        .filter(|(_, c)| c[0] != c[1])
        .map(|(k, c)| BifurcationEvent {
            lower: grid[k],
            upper: grid[k + 1],
            stable_before: c[0],
            stable_after: c[1],
        })
        .collect();

    Ok(BifurcationDiagram {
        param_name: param_name.to_string(),
        grid: grid.to_vec(),
        equilibria,
        branches,
        events,
    })
}

/// Greedy nearest-neighbour matching between consecutive grid values. Pairs
/// are taken in order of increasing distance; leftovers end or start a branch.
fn link_branches(equilibria: &[Vec<Equilibrium>]) -> Vec<Branch> {
    let mut branches: Vec<Branch> = Vec::new();
    // Indices into `branches` of the branches alive at the previous grid value,
    // parallel to that value's equilibria.
    let mut live: Vec<usize> = Vec::new();
    for (k, eqs) in equilibria.iter().enumerate() {
        let mut next = alloc::vec![usize::MAX; eqs.len()];
        if k > 0 {
            let prev = &equilibria[k - 1];
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (i, a) in prev.iter().enumerate() {
                for (j, b) in eqs.iter().enumerate() {
                    pairs.push((distance(&a.point, &b.point), i, j));
                }
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut used_prev = alloc::vec![false; prev.len()];
            for (_, i, j) in pairs {
                if used_prev[i] || next[j] != usize::MAX {
                    continue;
                }
                used_prev[i] = true;
                next[j] = live[i];
            }
        }
        for (j, e) in eqs.iter().enumerate() {
            if next[j] == usize::MAX {
                branches.push(Branch { points: Vec::new() });
                next[j] = branches.len() - 1;
            }
            branches[next[j]].points.push(BranchPoint {
                grid_index: k,
                point: e.point.clone(),
                stability: e.stability,
            });
        }
        live = next;
    }
    branches
}
