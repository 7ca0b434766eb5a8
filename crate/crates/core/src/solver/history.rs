use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::march::SliceState;
use super::model::AtomicModel;
use crate::error::Result;

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Reduced,
    Full,
}

/// Which depth slices keep their full local-time record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recording {
    /// Every slice (memory grows as nz·nt).
    All,
    /// The slices nearest to these depths.
    Depths(Vec<f64>),
    /// Every k-th slice.
    Every(usize),
}

impl Default for Recording {
    fn default() -> Self {
        Recording::Depths(Vec::new())
    }
}

impl Recording {
    pub(crate) fn selected(&self, grid: &Grid) -> Vec<bool> {
        let mut keep = vec![false; grid.nz];
        keep[0] = true;
        keep[grid.nz - 1] = true;
        match self {
            Recording::All => keep.iter_mut().for_each(|k| *k = true),
            Recording::Depths(depths) => {
                for &z in depths {
                    keep[grid.nearest_z(z)] = true;
                }
            }
            Recording::Every(k) => {
                for iz in (0..grid.nz).step_by((*k).max(1)) {
                    keep[iz] = true;
                }
            }
        }
        keep
    }
}

/// Complete local-time record at one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceRecord {
    pub iz: usize,
    pub z: f64,
    pub r1: Vec<C64>,
    pub r3: Vec<C64>,
    pub s1: Vec<C64>,
    pub s3: Vec<C64>,
    pub sigma_bc: Vec<C64>,
}

impl SliceRecord {
    pub(crate) fn capture<M: AtomicModel + ?Sized>(model: &M, s: &SliceState) -> Self {
        let nt = s.r.len();
        let mut rec = SliceRecord {
            iz: s.iz,
            z: s.z,
            r1: Vec::with_capacity(nt),
            r3: Vec::with_capacity(nt),
            s1: Vec::with_capacity(nt),
            s3: Vec::with_capacity(nt),
            sigma_bc: Vec::with_capacity(nt),
        };
        for (r, y) in s.r.iter().zip(&s.y) {
            let [s1, s3, sbc] = model.observables(y);
            rec.r1.push(r[0]);
            rec.r3.push(r[1]);
            rec.s1.push(s1);
            rec.s3.push(s3);
            rec.sigma_bc.push(sbc);
        }
        rec
    }

    /// ∫(|R₁|² + |R₃|²) dt' by the trapezoidal rule.
    pub fn energy(&self, dt: f64) -> f64 {
        let f: Vec<f64> = self.r1.iter().zip(&self.r3).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        trapezoid(&f, dt)
    }

    pub fn write_csv(&self, path: &Path, t_prime: &[f64], header: &[String]) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for line in header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "# z = {:e}", self.z)?;
        writeln!(w, "t_prime,re_r1,im_r1,re_r3,im_r3,re_sigma_bc,im_sigma_bc")?;
        for (i, t) in t_prime.iter().enumerate() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                t,
                self.r1[i].re,
                self.r1[i].im,
                self.r3[i].re,
                self.r3[i].im,
                self.sigma_bc[i].re,
                self.sigma_bc[i].im
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => h * (f[1..n - 1].iter().sum::<f64>() + 0.5 * (f[0] + f[n - 1])),
    }
}

/// Every variable at the last local time, for every depth.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FinalProfile {
    pub z: Vec<f64>,
    pub r1: Vec<C64>,
    pub r3: Vec<C64>,
    pub s1: Vec<C64>,
    pub s3: Vec<C64>,
    pub sigma_bc: Vec<C64>,
}

impl FinalProfile {
    pub(crate) fn push<M: AtomicModel + ?Sized>(&mut self, model: &M, s: &SliceState) {
        let last = s.r.len() - 1;
        let [s1, s3, sbc] = model.observables(&s.y[last]);
        self.z.push(s.z);
        self.r1.push(s.r[last][0]);
        self.r3.push(s.r[last][1]);
        self.s1.push(s1);
        self.s3.push(s3);
        self.sigma_bc.push(sbc);
    }
}

/// Output of a propagation run.
#[derive(Clone, Debug)]
pub struct FieldHistory {
    pub grid: Grid,
    pub mode: Mode,
    pub t_prime: Vec<f64>,
    /// Recorded slices in increasing depth; always includes the entrance and exit.
    pub slices: Vec<SliceRecord>,
    pub final_profile: FinalProfile,
}

impl FieldHistory {
    pub fn entrance(&self) -> &SliceRecord {
        &self.slices[0]
    }

    pub fn exit(&self) -> &SliceRecord {
        self.slices.last().expect("history always holds the exit slice")
    }

    /// The recorded slice nearest to depth `z`.
    pub fn slice_near(&self, z: f64) -> &SliceRecord {
        self.slices
            .iter()
            .min_by(|a, b| (a.z - z).abs().total_cmp(&(b.z - z).abs()))
            .expect("history is never empty")
    }

    pub fn slice_at_index(&self, iz: usize) -> Option<&SliceRecord> {
        self.slices.iter().find(|s| s.iz == iz)
    }

    pub fn is_finite(&self) -> bool {
        let ok = |v: &[C64]| v.iter().all(|x| x.is_finite());
        self.slices.iter().all(|s| ok(&s.r1) && ok(&s.r3) && ok(&s.s1) && ok(&s.s3) && ok(&s.sigma_bc))
            && ok(&self.final_profile.sigma_bc)
    }
}
