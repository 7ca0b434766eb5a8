//! Grid-refinement study on nested grids.

use serde::Serialize;

use super::grid::Grid;
use super::history::FieldHistory;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub grids: Vec<Grid>,
    /// Refinement factor per axis between successive grids (z, t').
    pub ratio: (usize, usize),
    /// Transmitted ∫(|R₁|² + |R₃|²) dt' at the exit, one per grid.
    pub transmitted_norms: Vec<f64>,
    /// Max-norm of the exit-field change between successive grids, sampled on the coarsest nodes.
    pub differences: Vec<f64>,
    /// log(dₖ / dₖ₊₁) / log(r) for each consecutive pair of differences.
    pub orders: Vec<f64>,
    /// Order from the two finest differences.
    pub observed_order: f64,
    /// Richardson extrapolation of the transmitted norm.
    pub extrapolated_norm: f64,
}

fn ratio_of(coarse: &Grid, fine: &Grid) -> Result<(usize, usize)> {
    let same_extent = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !same_extent(coarse.length, fine.length) || !same_extent(coarse.t_max, fine.t_max) {
        return Err(Error::Config("convergence grids must share length and t_max".into()));
    }
    let (cz, ct, fz, ft) = (coarse.nz - 1, coarse.nt - 1, fine.nz - 1, fine.nt - 1);
    if fz % cz != 0 || ft % ct != 0 {
        return Err(Error::Config(format!(
            "grid {}x{} is not nested in {}x{}",
            coarse.nz, coarse.nt, fine.nz, fine.nt
        )));
    }
    let r = (fz / cz, ft / ct);
    if r.0 < 2 && r.1 < 2 {
        return Err(Error::Config("convergence grids must be strictly refined".into()));
    }
    Ok(r)
}

/// Checks that the grids are nested with one constant refinement ratio.
pub fn check_nested(grids: &[Grid]) -> Result<(usize, usize)> {
    if grids.len() < 3 {
        return Err(Error::Config(format!("need at least 3 grids, got {}", grids.len())));
    }
    let r = ratio_of(&grids[0], &grids[1])?;
    for w in grids.windows(2).skip(1) {
        if ratio_of(&w[0], &w[1])? != r {
            return Err(Error::Config("refinement ratio must be the same between all grids".into()));
        }
    }
    Ok(r)
}

/// Runs `run` on each grid (coarse to fine) and estimates the observed order.
pub fn convergence_report<F>(grids: &[Grid], mut run: F) -> Result<ConvergenceReport>
where
    F: FnMut(&Grid) -> Result<FieldHistory>,
{
    let ratio = check_nested(grids)?;
    let base = grids[0];
    let mut exits = Vec::with_capacity(grids.len());
    let mut transmitted_norms = Vec::with_capacity(grids.len());
    for g in grids {
        let h = run(g)?;
        let exit = h.exit();
        transmitted_norms.push(exit.energy(g.dt()));
        // resample on the coarsest local-time nodes
        let stride = (g.nt - 1) / (base.nt - 1);
        let sampled: Vec<[f64; 4]> = (0..base.nt)
            .map(|i| {
                let k = i * stride;
                [exit.r1[k].re, exit.r1[k].im, exit.r3[k].re, exit.r3[k].im]
            })
            .collect();
        exits.push(sampled);
    }
    let differences: Vec<f64> = exits
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        })
        .collect();
    let r = ratio.0.max(ratio.1) as f64;
    let orders: Vec<f64> = differences.windows(2).map(|d| (d[0] / d[1]).ln() / r.ln()).collect();
    let observed_order = *orders.last().expect("three grids give at least one order");
    let n = transmitted_norms.len();
    let (n1, n2) = (transmitted_norms[n - 2], transmitted_norms[n - 1]);
    let factor = r.powf(observed_order) - 1.0;
    let extrapolated_norm = if observed_order.is_finite() && factor > 0.0 { n2 + (n2 - n1) / factor } else { n2 };
    Ok(ConvergenceReport {
        grids: grids.to_vec(),
        ratio,
        transmitted_norms,
        differences,
        orders,
        observed_order,
        extrapolated_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nesting_rules() {
        let g = Grid::new(11, 21, 1.0, 2.0).unwrap();
        assert_eq!(check_nested(&[g, g.refined(2, 2), g.refined(4, 4)]).unwrap(), (2, 2));
        assert!(check_nested(&[g, g, g]).is_err());
        assert!(check_nested(&[g, g.refined(2, 2)]).is_err());
        assert!(check_nested(&[g, g.refined(2, 2), g.refined(6, 6)]).is_err());
        let other = Grid::new(21, 41, 2.0, 2.0).unwrap();
        assert!(check_nested(&[g, other, g.refined(4, 4)]).is_err());
        let odd = Grid::new(16, 21, 1.0, 2.0).unwrap();
        assert!(check_nested(&[g, odd, g.refined(4, 4)]).is_err());
    }
}
