use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{self, Direction, Grid1D, PhaseGrid};

/// Sampled complex function of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D {
    pub grid: Grid1D,
    pub values: Vec<C64>,
}

impl ComplexField1D {
    pub fn new(grid: Grid1D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} values for {} points", values.len(), grid.n)));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl FnMut(f64) -> C64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n] }
    }

    pub fn spectrum(&self) -> Vec<C64> {
        grid::forward(&self.grid, &self.values)
    }

    pub fn from_spectrum(grid: Grid1D, spectrum: &[C64]) -> Self {
        Self { grid, values: grid::inverse(&grid, spectrum) }
    }

    pub fn integral(&self) -> C64 {
        grid::quadrature(&self.values, self.grid.spacing())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    /// ⟨self, other⟩ = ∫ self · conj(other).
    pub fn inner(&self, other: &Self) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * self.grid.spacing()
    }

    pub fn sup(&self) -> f64 {
        grid::sup_abs(&self.values)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.require_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }

    pub fn check_decay(&self, what: &str) -> Result<()> {
        grid::check_decay(&self.values, what)
    }

    /// Sup distance to `other`, relative to sup of `other` (absolute if that vanishes).
    pub fn rel_sup_err(&self, other: &Self) -> f64 {
        rel_sup(&self.values, &other.values)
    }

    /// Multiply the spectrum pointwise.
    pub fn fourier_multiply(&self, m: impl Fn(f64) -> C64) -> Self {
        let mut s = self.spectrum();
        let d = self.grid.dual();
        for (j, v) in s.iter_mut().enumerate() {
            *v *= m(d.point(j));
        }
        Self::from_spectrum(self.grid, &s)
    }

    /// Spectral derivative of order `m`.
    pub fn derivative(&self, m: u32) -> Self {
        if m == 0 {
            return self.clone();
        }
        let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
        self.fourier_multiply(|xx| (two_pi_i * xx).powu(m))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

pub(crate) fn rel_sup(a: &[C64], b: &[C64]) -> f64 {
    let d = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()));
    let s = grid::sup_abs(b);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

pub(crate) fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let s: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if s > 0.0 {
        (d / s).sqrt()
    } else {
        d.sqrt()
    }
}

/// Sampled complex function on (x, k), row-major in x then k.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub grid: PhaseGrid,
    pub values: Vec<C64>,
    pub real: bool,
}

/// Relative level of imaginary parts tolerated before a field is called real.
pub const REALNESS_TOL: f64 = 1e-9;

impl PhaseField {
    pub fn new(grid: PhaseGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} points", values.len(), grid.len())));
        }
        Ok(Self { grid, values, real: false })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()], real: true }
    }

    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> C64) -> Self {
        let xs = grid.x.points();
        let ks = grid.k.points();
        let mut values = Vec::with_capacity(grid.len());
        for &x in &xs {
            for &k in &ks {
                values.push(f(x, k));
            }
        }
        Self { grid, values, real: false }
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.k.n + j]
    }

    pub fn sup(&self) -> f64 {
        grid::sup_abs(&self.values)
    }

    pub fn integral(&self) -> C64 {
        self.values.iter().sum::<C64>() * self.grid.cell()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn max_real(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.re.abs()))
    }

    /// Certify realness and drop the imaginary part; errors otherwise.
    pub fn certify_real(mut self) -> Result<Self> {
        let im = self.max_imag();
        let re = self.max_real();
        if im > REALNESS_TOL * re && im > 1e-300 {
            return Err(Error::Realness { im, re });
        }
        for v in &mut self.values {
            v.im = 0.0;
        }
        self.real = true;
        Ok(self)
    }

    pub fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("phase grids differ".into()))
        }
    }

    pub fn spectrum(&self) -> Vec<C64> {
        grid::forward_2d(&self.grid, &self.values)
    }

    pub fn from_spectrum(grid: PhaseGrid, spectrum: &[C64]) -> Self {
        Self { grid, values: grid::inverse_2d(&grid, spectrum), real: false }
    }

    pub fn mixed_x(&self) -> Vec<C64> {
        grid::along_x(&self.grid, &self.values, Direction::Forward)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * a).collect(),
            real: self.real && a.im == 0.0,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            real: self.real && other.real,
        })
    }

    pub fn axpy(&mut self, a: C64, other: &Self) {
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += a * o;
        }
        self.real = self.real && other.real && a.im == 0.0;
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect(), real: self.real }
    }

    pub fn real_part(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| C64::new(v.re, 0.0)).collect(),
            real: true,
        }
    }

    pub fn rel_sup_err(&self, reference: &Self) -> f64 {
        rel_sup(&self.values, &reference.values)
    }

    pub fn rel_l2_err(&self, reference: &Self) -> f64 {
        rel_l2(&self.values, &reference.values)
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.re))
    }

    /// Boundary decay along both axes.
    pub fn check_decay(&self, what: &str) -> Result<()> {
        let (nx, nk) = (self.grid.x.n, self.grid.k.n);
        let mut xprof = vec![C64::new(0.0, 0.0); nx];
        let mut kprof = vec![C64::new(0.0, 0.0); nk];
        for i in 0..nx {
            for j in 0..nk {
                let a = self.values[i * nk + j].norm();
                if a > xprof[i].re {
                    xprof[i] = C64::new(a, 0.0);
                }
                if a > kprof[j].re {
                    kprof[j] = C64::new(a, 0.0);
                }
            }
        }
        grid::check_decay(&xprof, &format!("{what} (x)"))?;
        grid::check_decay(&kprof, &format!("{what} (k)"))
    }
}
