use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points per Rabi period demanded by [`Grid::check_resolution`].
pub const POINTS_PER_RABI_PERIOD: f64 = 20.0;

/// Uniform grid over depth `z ∈ [0, length]` and local time `t' ∈ [0, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nz: usize,
    pub nt: usize,
    pub length: f64,
    pub t_max: f64,
}

impl Grid {
    pub fn new(nz: usize, nt: usize, length: f64, t_max: f64) -> Result<Self> {
        let g = Grid { nz, nt, length, t_max };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nz < 2 || self.nt < 2 {
            return Err(Error::Config(format!(
                "grid needs at least two points per axis (nz = {}, nt = {})",
                self.nz, self.nt
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite() && self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "grid extents must be positive (length = {}, t_max = {})",
                self.length, self.t_max
            )));
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        self.length / (self.nz - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.nt - 1) as f64
    }

    pub fn z(&self, iz: usize) -> f64 {
        iz as f64 * self.dz()
    }

    pub fn t(&self, it: usize) -> f64 {
        it as f64 * self.dt()
    }

    pub fn t_axis(&self) -> Vec<f64> {
        (0..self.nt).map(|i| self.t(i)).collect()
    }

    pub fn z_axis(&self) -> Vec<f64> {
        (0..self.nz).map(|i| self.z(i)).collect()
    }

    /// Index of the depth closest to `z`.
    pub fn nearest_z(&self, z: f64) -> usize {
        ((z / self.dz()).round().max(0.0) as usize).min(self.nz - 1)
    }

    /// Rejects time steps coarser than a twentieth of the Rabi period set by the
    /// largest effective control strength `sqrt(|Ω₂|² + |Ω₄|²)`.
    pub fn check_resolution(&self, rabi_max: f64) -> Result<()> {
        if rabi_max <= 0.0 {
            return Ok(());
        }
        let limit = TAU / rabi_max / POINTS_PER_RABI_PERIOD;
        if self.dt() > limit {
            return Err(Error::Config(format!(
                "time step {:e} exceeds 1/{} of the Rabi period ({limit:e}); raise nt to at least {}",
                self.dt(),
                POINTS_PER_RABI_PERIOD,
                (self.t_max / limit).ceil() as usize + 1
            )));
        }
        Ok(())
    }

    /// Same extents with both axes refined by integer factors.
    pub fn refined(&self, rz: usize, rt: usize) -> Grid {
        Grid { nz: (self.nz - 1) * rz + 1, nt: (self.nt - 1) * rt + 1, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_and_axes() {
        let g = Grid::new(5, 11, 8.0, 20.0).unwrap();
        assert_eq!(g.dz(), 2.0);
        assert_eq!(g.dt(), 2.0);
        assert_eq!(g.z_axis(), vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(g.nearest_z(4.9), 2);
        assert_eq!(g.nearest_z(100.0), 4);
        assert_eq!(g.refined(2, 3), Grid::new(9, 31, 8.0, 20.0).unwrap());
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(Grid::new(1, 10, 1.0, 1.0).is_err());
        assert!(Grid::new(10, 10, 0.0, 1.0).is_err());
    }

    #[test]
    fn resolution_guard() {
        let g = Grid::new(10, 101, 1.0, 100.0).unwrap();
        assert!(g.check_resolution(0.0).is_ok());
        assert!(g.check_resolution(TAU / 20.0).is_ok());
        assert!(matches!(g.check_resolution(TAU / 19.0), Err(Error::Config(_))));
    }
}
