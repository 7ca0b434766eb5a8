//! The spatial march in co-moving coordinates (z, t' = t − z/c).
//!
//! At fixed t' the fields obey c ∂_z R = S. Each depth step is implicit and
//! second order (BDF2, with one backward-Euler start-up step); the implicit
//! relation R_new = G + β·S_new is resolved node by node while the atomic
//! equations are integrated along t' with the trapezoidal rule. Both rules are
//! A-stable, and BDF2 also damps the stiff bright components, which the
//! resonant medium turns over on length scales far below any practical dz.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::grid::Grid;
use super::model::AtomicModel;
use crate::error::{Error, Result};

type C64 = Complex64;

/// One depth slice: fields and atomic amplitudes over all local times.
#[derive(Clone, Debug)]
pub struct SliceState {
    pub iz: usize,
    pub z: f64,
    pub r: Vec<[C64; 2]>,
    pub y: Vec<Vector3<C64>>,
}

/// Integrates the atomic equations along t' at depth `z`, with the fields tied
/// to the atoms by `R_n = g_n + β·C·y_n`. With `β = 0` the fields are simply `g`.
pub fn sweep<M: AtomicModel + ?Sized>(
    model: &M,
    z: f64,
    c: f64,
    grid: &Grid,
    g: &[[C64; 2]],
    beta: f64,
    r_out: &mut [[C64; 2]],
    y_out: &mut [Vector3<C64>],
) {
    let nt = grid.nt;
    debug_assert!(g.len() == nt && r_out.len() == nt && y_out.len() == nt);
    let h = C64::from(0.5 * grid.dt());
    let b = model.drive();
    let cm = model.source();
    let bc = b * cm * C64::from(beta);
    let ident = Matrix3::<C64>::identity();
    let retard = z / c;

    y_out[0] = Vector3::zeros();
    r_out[0] = g[0];
    let mut a_prev = model.dynamics(grid.t(0) + retard);
    for n in 1..nt {
        let a = model.dynamics(grid.t(n) + retard);
        let y_prev = y_out[n - 1];
        let r_prev = nalgebra::Vector2::new(r_out[n - 1][0], r_out[n - 1][1]);
        let gn = nalgebra::Vector2::new(g[n][0], g[n][1]);
        let rhs = y_prev + (a_prev * y_prev + b * (r_prev + gn)) * h;
        let lhs = ident - (a + bc) * h;
        let y = solve3(&lhs, &rhs);
        let s = cm * y;
        y_out[n] = y;
        r_out[n] = [g[n][0] + s[0] * beta, g[n][1] + s[1] * beta];
        a_prev = a;
    }
}

#[inline]
fn solve3(m: &Matrix3<C64>, v: &Vector3<C64>) -> Vector3<C64> {
    // Cramer's rule is accurate enough here: the matrix is I plus a small
    // perturbation of order dt·(κ²dz/c + |Ω|), far from singular.
    let c0 = m.column(0);
    let c1 = m.column(1);
    let c2 = m.column(2);
    let det = c0.dot(&c1.cross(&c2));
    let x0 = v.dot(&c1.cross(&c2));
    let x1 = c0.dot(&v.cross(&c2));
    let x2 = c0.dot(&c1.cross(v));
    Vector3::new(x0 / det, x1 / det, x2 / det)
}

/// Marches the fields through the medium one depth step at a time.
pub struct Marcher<'a, M: AtomicModel + ?Sized> {
    model: &'a M,
    grid: Grid,
    c: f64,
    current: SliceState,
    previous_r: Option<Vec<[C64; 2]>>,
    scratch_g: Vec<[C64; 2]>,
}

impl<'a, M: AtomicModel + ?Sized> Marcher<'a, M> {
    /// Starts at z = 0 with the injected normalised fields `input` sampled on
    /// the local-time axis of `grid`.
    pub fn new(model: &'a M, grid: Grid, c: f64, input: Vec<[C64; 2]>) -> Result<Self> {
        grid.validate()?;
        if input.len() != grid.nt {
            return Err(Error::Usage(format!(
                "input has {} samples but the grid has nt = {}",
                input.len(),
                grid.nt
            )));
        }
        let mut r = vec![[C64::default(); 2]; grid.nt];
        let mut y = vec![Vector3::zeros(); grid.nt];
        sweep(model, 0.0, c, &grid, &input, 0.0, &mut r, &mut y);
        let current = SliceState { iz: 0, z: 0.0, r, y };
        check_finite(&current, &grid)?;
        Ok(Marcher { model, grid, c, current, previous_r: None, scratch_g: vec![[C64::default(); 2]; grid.nt] })
    }

    pub fn state(&self) -> &SliceState {
        &self.current
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_done(&self) -> bool {
        self.current.iz + 1 >= self.grid.nz
    }

    /// Advances by one depth step.
    pub fn step(&mut self) -> Result<&SliceState> {
        if self.is_done() {
            return Err(Error::Usage("march already reached the end of the medium".into()));
        }
        let dz = self.grid.dz();
        let beta = match &self.previous_r {
            None => {
                self.scratch_g.copy_from_slice(&self.current.r);
                dz / self.c
            }
            Some(prev) => {
                for ((g, r), p) in self.scratch_g.iter_mut().zip(&self.current.r).zip(prev) {
                    *g = [
                        (r[0] * 4.0 - p[0]) / 3.0,
                        (r[1] * 4.0 - p[1]) / 3.0,
                    ];
                }
                2.0 * dz / (3.0 * self.c)
            }
        };
        let iz = self.current.iz + 1;
        let z = self.grid.z(iz);
        let mut r = self.previous_r.take().unwrap_or_else(|| vec![[C64::default(); 2]; self.grid.nt]);
        let mut y = vec![Vector3::zeros(); self.grid.nt];
        sweep(self.model, z, self.c, &self.grid, &self.scratch_g, beta, &mut r, &mut y);
        let old = std::mem::replace(&mut self.current, SliceState { iz, z, r, y });
        self.previous_r = Some(old.r);
        check_finite(&self.current, &self.grid)?;
        Ok(&self.current)
    }
}

fn check_finite(s: &SliceState, grid: &Grid) -> Result<()> {
    for (it, (r, y)) in s.r.iter().zip(&s.y).enumerate() {
        let bad = if !(r[0].is_finite() && r[1].is_finite()) {
            Some("field")
        } else if !y.iter().all(|v| v.is_finite()) {
            Some("atomic amplitude")
        } else {
            None
        };
        if let Some(quantity) = bad {
            return Err(Error::NonFinite { quantity, iz: s.iz, it, z: s.z, t: grid.t(it) });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::model::{AtomicModel, ReducedModel};
    use crate::model::{reference_scheme, DoubleLambda, PhysicalConstants};
    use crate::pulse::ControlSchedule;
    use approx::assert_relative_eq;

    fn system() -> DoubleLambda {
        let k = PhysicalConstants::atomic();
        DoubleLambda::new(k, reference_scheme(&k).unwrap(), 3e-13, 1e7).unwrap()
    }

    #[test]
    fn cramer_matches_lu() {
        let m = Matrix3::new(
            C64::new(1.0, 0.2), C64::new(0.1, -0.3), C64::new(0.0, 0.5),
            C64::new(-0.4, 0.0), C64::new(2.0, 1.0), C64::new(0.3, 0.3),
            C64::new(0.2, -0.1), C64::new(0.0, 0.7), C64::new(1.5, -0.2),
        );
        let v = Vector3::new(C64::new(1.0, 2.0), C64::new(-1.0, 0.5), C64::new(0.3, -0.7));
        let x = solve3(&m, &v);
        let x_lu = m.lu().solve(&v).unwrap();
        assert!((x - x_lu).norm() < 1e-14);
    }

    #[test]
    fn constant_field_without_controls_grows_linearly() {
        let sys = system();
        let model = ReducedModel::new(&sys, &[ControlSchedule::constant(0.0, 0.0); 2]);
        let grid = Grid::new(2, 101, 1e7, 1e9).unwrap();
        let r0 = C64::new(1e-4, -2e-5);
        let g = vec![[r0, C64::default()]; grid.nt];
        let mut r = vec![[C64::default(); 2]; grid.nt];
        let mut y = vec![Vector3::zeros(); grid.nt];
        sweep(&model, 0.0, sys.constants.c, &grid, &g, 0.0, &mut r, &mut y);
        let k2 = sys.medium.kappa1.powi(2);
        for n in [1, 17, 100] {
            let expect = -r0 * k2 * grid.t(n);
            assert_relative_eq!((y[n][0] - expect).norm(), 0.0, epsilon = 1e-12 * expect.norm());
            assert_eq!(y[n][2], C64::default());
        }
        assert_eq!(model.observables(&y[3])[0], y[3][0]);
    }

    #[test]
    fn zero_fields_stay_zero() {
        let sys = system();
        let model = ReducedModel::new(&sys, &[ControlSchedule::constant(1.2e-9, 0.0); 2]);
        let grid = Grid::new(4, 50, 1e7, 1e10).unwrap();
        let mut m = Marcher::new(&model, grid, sys.constants.c, vec![[C64::default(); 2]; grid.nt]).unwrap();
        let s = m.step().unwrap();
        assert!(s.r.iter().all(|r| r[0] == C64::default() && r[1] == C64::default()));
        assert!(s.y.iter().all(|y| y.iter().all(|v| *v == C64::default())));
    }

    #[test]
    fn marching_past_the_end_is_an_error() {
        let sys = system();
        let model = ReducedModel::new(&sys, &[ControlSchedule::constant(0.0, 0.0); 2]);
        let grid = Grid::new(2, 10, 1.0, 1.0).unwrap();
        let mut m = Marcher::new(&model, grid, sys.constants.c, vec![[C64::default(); 2]; 10]).unwrap();
        m.step().unwrap();
        assert!(m.is_done());
        assert!(matches!(m.step(), Err(Error::Usage(_))));
    }

    #[test]
    fn non_finite_input_is_located() {
        let sys = system();
        let model = ReducedModel::new(&sys, &[ControlSchedule::constant(0.0, 0.0); 2]);
        let grid = Grid::new(3, 10, 1.0, 1.0).unwrap();
        let mut input = vec![[C64::default(); 2]; 10];
        input[6][1] = C64::new(f64::NAN, 0.0);
        match Marcher::new(&model, grid, sys.constants.c, input) {
            Err(Error::NonFinite { iz: 0, it: 6, .. }) => {}
            other => panic!("unexpected {:?}", other.err()),
        }
    }
}
