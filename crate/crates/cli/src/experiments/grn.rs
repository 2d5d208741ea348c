//! Pluripotency network scenarios: the overexpression bifurcation diagram and
//! the high-gain envelope.

use biocircuit_core::analysis::bifurcation_sweep;
use biocircuit_core::models::reference::grn_tristable;
use biocircuit_core::models::{build_grn, highgain_envelope, Grn, GrnInput, GrnParams, Model, ParamKeys};
use biocircuit_core::ode::{find_equilibria, integrate, Equilibrium, IntegratorConfig};
use biocircuit_core::OdeSystem;

use super::{err, table_from_columns, Outputs, Params};
use crate::csv::CsvTable;
use crate::svg::{emit_svg, PlotStyle, Series};

fn network_defaults() -> Vec<(&'static str, f64)> {
    let g = grn_tristable();
    GrnParams::KEYS.iter().map(|k| (*k, g.get(k).expect("key"))).collect()
}

pub fn network(p: &Params) -> GrnParams {
    let mut g = grn_tristable();
    for (k, v) in p.iter() {
        let _ = g.set(k, v);
    }
    g
}

pub fn bifurcation_defaults() -> Vec<(&'static str, f64)> {
    let mut v = network_defaults();
    v.extend([("u_max", 5.0), ("points", 51.0), ("n_starts", 400.0), ("u_large", 20.0), ("grid_cells", 200.0)]);
    v
}

pub fn highgain_defaults() -> Vec<(&'static str, f64)> {
    let mut v = network_defaults();
    v.extend([("x_star", 2.5), ("t_end", 5.0), ("sample_dt", 0.001)]);
    v
}

/// Equilibrium located by the grid oracle, with its stability from the
/// trace and determinant of a finite-difference Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRoot {
    pub point: [f64; 2],
    pub stable: bool,
}

fn signs_straddle(values: &[f64]) -> bool {
    values.iter().any(|v| *v <= 0.0) && values.iter().any(|v| *v >= 0.0)
}

fn corners<S: OdeSystem>(sys: &S, x0: f64, x1: f64, y0: f64, y1: f64) -> [[f64; 2]; 4] {
    let f = |x: f64, y: f64| {
        let d = sys.eval(0.0, &[x, y]);
        [d[0], d[1]]
    };
    [f(x0, y0), f(x1, y0), f(x0, y1), f(x1, y1)]
}

fn both_change<S: OdeSystem>(sys: &S, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
    let c = corners(sys, x0, x1, y0, y1);
    signs_straddle(&c.map(|v| v[0])) && signs_straddle(&c.map(|v| v[1]))
}

fn refine<S: OdeSystem>(sys: &S, cell: [f64; 4], depth: u32, leaves: &mut Vec<[f64; 2]>) {
    let [x0, x1, y0, y1] = cell;
    if depth == 0 {
        leaves.push([0.5 * (x0 + x1), 0.5 * (y0 + y1)]);
        return;
    }
    let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    for sub in [[x0, xm, y0, ym], [xm, x1, y0, ym], [x0, xm, ym, y1], [xm, x1, ym, y1]] {
        if leaves.len() > 4096 {
            return;
        }
        if both_change(sys, sub[0], sub[1], sub[2], sub[3]) {
            refine(sys, sub, depth - 1, leaves);
        }
    }
}

/// Nullcline-intersection count on a `cells x cells` grid: cells where both
/// rate components change sign are bisected down to ~1e-9 of their size.
pub fn grid_oracle<S: OdeSystem>(sys: &S, bounds: [(f64, f64); 2], cells: usize) -> Vec<GridRoot> {
    let [bx, by] = bounds;
    let hx = (bx.1 - bx.0) / cells as f64;
    let hy = (by.1 - by.0) / cells as f64;
    let mut grid = vec![[0.0; 2]; (cells + 1) * (cells + 1)];
    for i in 0..=cells {
        for j in 0..=cells {
            let d = sys.eval(0.0, &[bx.0 + hx * i as f64, by.0 + hy * j as f64]);
            grid[i * (cells + 1) + j] = [d[0], d[1]];
        }
    }
    let at = |i: usize, j: usize| grid[i * (cells + 1) + j];
    let mut leaves = Vec::new();
    for i in 0..cells {
        for j in 0..cells {
            let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if signs_straddle(&c.map(|v| v[0])) && signs_straddle(&c.map(|v| v[1])) {
                let cell = [bx.0 + hx * i as f64, bx.0 + hx * (i + 1) as f64, by.0 + hy * j as f64, by.0 + hy * (j + 1) as f64];
                refine(sys, cell, 30, &mut leaves);
            }
        }
    }
    let merge = 1e-4 * (hx.max(hy));
    let mut roots: Vec<[f64; 2]> = Vec::new();
    for leaf in leaves {
        if !roots.iter().any(|r| (r[0] - leaf[0]).abs() <= merge && (r[1] - leaf[1]).abs() <= merge) {
            roots.push(leaf);
        }
    }
    roots.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    roots
        .into_iter()
        .map(|point| {
            let mut jac = [[0.0; 2]; 2];
            for c in 0..2 {
                let h = 1e-6 * point[c].abs().max(1.0);
                let mut plus = point;
                let mut minus = point;
                plus[c] += h;
                minus[c] -= h;
                let (fp, fm) = (sys.eval(0.0, &plus), sys.eval(0.0, &minus));
                for r in 0..2 {
                    jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
                }
            }
            let trace = jac[0][0] + jac[1][1];
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            GridRoot {
                point,
                stable: trace < 0.0 && det > 0.0,
            }
        })
        .collect()
}

fn stable(eqs: &[Equilibrium]) -> Vec<&Equilibrium> {
    eqs.iter().filter(|e| e.stability.is_stable()).collect()
}

fn open(g: GrnParams, u_i: f64) -> Result<Grn, String> {
    build_grn(g, GrnInput::Open { u_i }).map_err(err)
}

fn box_of(g: &GrnParams, u_i: f64) -> [(f64, f64); 2] {
    // Pad the certified box slightly so boundary roots fall inside a cell.
    let [a, b] = g.invariant_box(u_i);
    [(a.0, a.1 * 1.05), (b.0, b.1 * 1.05)]
}

/// Three stable states at zero input, one high/high state under strong
/// overexpression, and a stable count that only falls along the sweep.
pub fn tristability(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let g = network(p);
        let n_starts = p.usize("n_starts");
        let cells = p.usize("grid_cells");
        let sys0 = open(g, 0.0)?;
        let eq0 = find_equilibria(&sys0, &box_of(&g, 0.0), n_starts).map_err(err)?;
        let st0 = stable(&eq0);
        let oracle0 = grid_oracle(&sys0, box_of(&g, 0.0), cells);
        let oracle0_stable = oracle0.iter().filter(|r| r.stable).count();

        let mut table = CsvTable::new(["x_o", "x_n", "stable", "source"]).map_err(err)?;
        for e in &eq0 {
            table.push(vec![e.point[0], e.point[1], f64::from(u8::from(e.stability.is_stable())), 0.0]).map_err(err)?;
        }
        for r in &oracle0 {
            table.push(vec![r.point[0], r.point[1], f64::from(u8::from(r.stable)), 1.0]).map_err(err)?;
        }
        out.table("equilibria_u0.csv", table);

        let ordered = st0.len() == 3 && {
            let (l, m, h) = (&st0[0].point, &st0[1].point, &st0[2].point);
            l[0] < m[0] && m[0] < h[0] && m[1] > h[1] && h[1] > l[1] && m[1] > l[1]
        };

        let u_large = p.get("u_large");
        let sys_l = open(g, u_large)?;
        let eql = find_equilibria(&sys_l, &box_of(&g, u_large), n_starts).map_err(err)?;
        let stl = stable(&eql);
        let oracle_l = grid_oracle(&sys_l, box_of(&g, u_large), cells).iter().filter(|r| r.stable).count();
        let high_high = stl.len() == 1 && st0.len() == 3 && stl[0].point[0] > st0[2].point[0] && stl[0].point[1] > 10.0 * st0[0].point[1];

        let points = p.usize("points").max(2);
        let u_max = p.get("u_max");
        let grid: Vec<f64> = (0..points).map(|i| u_max * i as f64 / (points - 1) as f64).collect();
        let family = Model::Grn {
            params: g,
            input: GrnInput::Open { u_i: 0.0 },
        };
        let diag = bifurcation_sweep(&family, "u_i", &grid, None, n_starts).map_err(err)?;
        let counts = diag.stable_counts();
        let monotone = counts.windows(2).all(|w| w[1] <= w[0]);
        // The low branch is the stable branch with the smallest x_O at u_i = 0.
        let low_branch_end = diag
            .branches
            .iter()
            .filter(|b| b.points[0].grid_index == 0 && b.points[0].stability.is_stable())
            .min_by(|a, b| a.points[0].point[0].total_cmp(&b.points[0].point[0]))
            .and_then(|b| b.points.iter().rev().find(|q| q.stability.is_stable()))
            .map(|q| q.grid_index);
        let low_vanishes = low_branch_end.is_some_and(|k| k + 1 < grid.len());

        let mut bt = CsvTable::new(["u_i", "branch", "stable", "x_o", "x_n"]).map_err(err)?;
        let mut series = Vec::new();
        for (bi, b) in diag.branches.iter().enumerate() {
            let mut run: Vec<(f64, f64)> = Vec::new();
            let mut run_stable = b.points[0].stability.is_stable();
            for q in &b.points {
                let s = q.stability.is_stable();
                bt.push(vec![grid[q.grid_index], bi as f64, f64::from(u8::from(s)), q.point[0], q.point[1]]).map_err(err)?;
                if s != run_stable && !run.is_empty() {
                    series.push(branch_series(bi, run_stable, std::mem::take(&mut run)));
                    run_stable = s;
                }
                run.push((grid[q.grid_index], q.point[0]));
            }
            series.push(branch_series(bi, run_stable, run));
        }
        out.table("bifurcation.csv", bt);
        out.figure(
            "bifurcation.svg",
            emit_svg(&series, &PlotStyle::new("Equilibria versus overexpression", "u_i", "x_O")),
        );
        let events: Vec<String> = diag
            .events
            .iter()
            .map(|e| format!("({}, {}] {}->{}", e.lower, e.upper, e.stable_before, e.stable_after))
            .collect();

        let ok = ordered
            && oracle0_stable == 3
            && high_high
            && oracle_l == 1
            && counts.first() == Some(&3)
            && counts.last() == Some(&1)
            && monotone
            && low_vanishes;
        Ok((
            ok,
            format!(
                "u_i = 0: {} stable by Newton ({}), {} by {cells}x{cells} grid oracle; u_i = {u_large}: {} stable by Newton, {} by grid ({}); sweep counts {} -> {}, non-increasing: {monotone}, low branch vanishes: {low_vanishes}; events {}",
                st0.len(),
                if ordered { "low/low < mid-x_O/high-x_N < high/high" } else { "ordering NOT as expected" },
                oracle0_stable,
                stl.len(),
                oracle_l,
                if high_high { "high/high" } else { "NOT high/high" },
                counts.first().copied().unwrap_or(0),
                counts.last().copied().unwrap_or(0),
                events.join(", ")
            ),
        ))
    })();
    out.verdict("grn_tristability", outcome);
}

fn branch_series(index: usize, stable: bool, points: Vec<(f64, f64)>) -> Series {
    let s = Series::new(format!("branch {index} {}", if stable { "stable" } else { "unstable" }), points);
    if stable {
        s
    } else {
        s.dashed()
    }
}

pub fn run_bifurcation(p: &Params, out: &mut Outputs) {
    tristability(p, out);
}

/// x_O(t) from the origin under `G (x_star - x_O)` stays inside the
/// analytic envelope for G = 100 and G = 1000.
pub fn envelope(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let g = network(p);
        let x_star = p.get("x_star");
        let d = g.d_bound();
        let cfg = IntegratorConfig::default().with_sample_dt(p.get("sample_dt"));
        let mut worst = f64::NEG_INFINITY;
        let mut samples = 0;
        let mut series = Vec::new();
        for gain in [100.0, 1000.0] {
            let sys = build_grn(g, GrnInput::HighGain { gain, x_star }).map_err(err)?;
            let traj = integrate(&sys, &[0.0, 0.0], (0.0, p.get("t_end")), &cfg).map_err(err)?;
            let t = traj.times().to_vec();
            let xo = traj.column(0);
            let mut lo = Vec::with_capacity(t.len());
            let mut hi = Vec::with_capacity(t.len());
            for (ti, xi) in t.iter().zip(&xo) {
                let (l, h) = highgain_envelope(*ti, gain, g.gamma, x_star, d);
                let tol = 1e-6 + 1e-4 * h;
                // Positive excess means the sample left the envelope.
                worst = worst.max((l - tol - xi).max(xi - h - tol));
                lo.push(l);
                hi.push(h);
            }
            samples += t.len();
            out.table(&format!("envelope_g{gain}.csv"), table_from_columns(&["t", "x_o", "lower", "upper"], &[&t, &xo, &lo, &hi]));
            let pts = |v: &[f64]| t.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
            series.push(Series::new(format!("x_O, G = {gain}"), pts(&xo)));
            series.push(Series::new(format!("bounds, G = {gain}"), pts(&hi)).dashed());
            series.push(Series::new(format!("lower, G = {gain}"), pts(&lo)).dashed());
        }
        out.figure("envelope.svg", emit_svg(&series, &PlotStyle::new("High-gain feedback envelope", "time", "x_O")));
        Ok((
            worst <= 0.0,
            format!("{samples} samples, largest excursion beyond the tolerance-padded envelope {worst:.3e} (must be <= 0), D = {d}"),
        ))
    })();
    out.verdict("grn_envelope", outcome);
}

pub fn run_highgain(p: &Params, out: &mut Outputs) {
    envelope(p, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use biocircuit_core::ode::FnSystem;

    #[test]
    fn oracle_finds_a_saddle_and_a_sink() {
        // x' = x - x^3 style pair: roots at (0, 0) saddle and (1, 0) sink
        // in the box; the y equation decays.
        let sys = FnSystem::new(&["x", "y"], |_t, x: &[f64], dx: &mut [f64]| {
            dx[0] = x[0] * (1.0 - x[0]);
            dx[1] = -x[1];
        });
        let roots = grid_oracle(&sys, [(-0.5, 2.0), (-1.0, 1.0)], 40);
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!(!roots[0].stable && roots[1].stable);
        assert!((roots[1].point[0] - 1.0).abs() < 1e-6);
    }
}
