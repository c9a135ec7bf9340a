//! Periodic centred grids and the discrete Fourier transform
//! f̂(X) = ∫ e^{-2πiXx} f(x) dx with its inverse.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Fraction of the domain at each end in which fields must have decayed.
pub const DECAY_MARGIN: f64 = 0.1;
/// Relative level a field must fall below inside the margin.
pub const DECAY_LEVEL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub length: f64,
    pub center: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64, center: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two >= 8")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length = {length} must be positive")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidGrid("center must be finite".into()));
        }
        Ok(Self { n, length, center })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn start(&self) -> f64 {
        self.center - 0.5 * self.length
    }

    pub fn point(&self, j: usize) -> f64 {
        self.start() + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Conjugate grid: spacing 1/length, length 1/spacing, centred at zero.
    pub fn dual(&self) -> Grid1D {
        Grid1D { n: self.n, length: 1.0 / self.spacing(), center: 0.0 }
    }

    pub fn is_conjugate_to(&self, other: &Grid1D) -> bool {
        self.n == other.n && ((self.spacing() * other.length) - 1.0).abs() < 1e-12
    }

    /// Nyquist frequency of this grid.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.spacing()
    }

    /// Same domain, every `stride`-th sample.
    pub fn decimate(&self, stride: usize) -> Result<Grid1D> {
        if stride == 0 || self.n % stride != 0 {
            return Err(Error::InvalidGrid(format!("stride {stride} does not divide {}", self.n)));
        }
        Grid1D::new(self.n / stride, self.length, self.center)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n == other.n
            && (self.length - other.length).abs() <= 1e-12 * self.length
            && (self.center - other.center).abs() <= 1e-12 * self.length.max(1.0)
    }
}

/// Position/wavenumber grid pair with their duals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub x: Grid1D,
    pub k: Grid1D,
}

impl PhaseGrid {
    pub fn new(x: Grid1D, k: Grid1D) -> Self {
        Self { x, k }
    }
    pub fn xx(&self) -> Grid1D {
        self.x.dual()
    }
    pub fn kk(&self) -> Grid1D {
        self.k.dual()
    }
    pub fn len(&self) -> usize {
        self.x.n * self.k.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn cell(&self) -> f64 {
        self.x.spacing() * self.k.spacing()
    }
    pub fn same_as(&self, other: &PhaseGrid) -> bool {
        self.x.same_as(&other.x) && self.k.same_as(&other.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, dir))
}

fn turn(t: f64) -> C64 {
    let r = t - t.round();
    let (s, c) = (2.0 * PI * r).sin_cos();
    C64::new(c, s)
}

/// Precomputed continuous-convention transform between two conjugate grids.
/// Forward carries e^{-2πiXx} and the source spacing; inverse carries
/// e^{+2πiXx} and the dual spacing.
pub struct Transform {
    n: usize,
    pre: Vec<C64>,
    post: Vec<C64>,
    fft: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(from: &Grid1D, to: &Grid1D, dir: Direction) -> Result<Self> {
        if !from.is_conjugate_to(to) {
            return Err(Error::GridMismatch(format!(
                "grids are not conjugate: n {} vs {}, spacing*length = {}",
                from.n,
                to.n,
                from.spacing() * to.length
            )));
        }
        let n = from.n;
        let s = match dir {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let h = from.spacing();
        let a = from.start();
        let pre = (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                turn(s * to.center * j as f64 * h) * sign
            })
            .collect();
        let post = (0..n).map(|m| turn(s * to.point(m) * a) * h).collect();
        let fft = plan(
            n,
            match dir {
                Direction::Forward => FftDirection::Forward,
                Direction::Inverse => FftDirection::Inverse,
            },
        );
        Ok(Self { n, pre, post, fft })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transform every length-n chunk of `buf` in place.
    pub fn apply(&self, buf: &mut [C64]) {
        assert_eq!(buf.len() % self.n, 0);
        for chunk in buf.chunks_mut(self.n) {
            for (v, p) in chunk.iter_mut().zip(&self.pre) {
                *v *= p;
            }
        }
        let mut scratch = vec![C64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(buf, &mut scratch);
        for chunk in buf.chunks_mut(self.n) {
            for (v, p) in chunk.iter_mut().zip(&self.post) {
                *v *= p;
            }
        }
    }
}

/// Forward transform of samples on `grid`, landing on `grid.dual()`.
pub fn forward(grid: &Grid1D, values: &[C64]) -> Vec<C64> {
    let t = Transform::new(grid, &grid.dual(), Direction::Forward).expect("dual is conjugate");
    let mut out = values.to_vec();
    t.apply(&mut out);
    out
}

/// Inverse transform of samples on `grid.dual()`, landing on `grid`.
pub fn inverse(grid: &Grid1D, spectrum: &[C64]) -> Vec<C64> {
    let t = Transform::new(&grid.dual(), grid, Direction::Inverse).expect("dual is conjugate");
    let mut out = spectrum.to_vec();
    t.apply(&mut out);
    out
}

/// Rectangle rule Σ f_j h.
pub fn quadrature(values: &[C64], spacing: f64) -> C64 {
    values.iter().sum::<C64>() * spacing
}

pub fn sup_abs(values: &[C64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
}

/// Errors unless the outer `DECAY_MARGIN` of the samples sits below
/// `DECAY_LEVEL` times the supremum.
pub fn check_decay(values: &[C64], what: &str) -> Result<()> {
    let n = values.len();
    let sup = sup_abs(values);
    if sup == 0.0 {
        return Ok(());
    }
    let band = ((n as f64) * DECAY_MARGIN).floor() as usize;
    let edge = values[..band]
        .iter()
        .chain(&values[n - band..])
        .fold(0.0_f64, |m, v| m.max(v.norm()));
    if edge > DECAY_LEVEL * sup {
        return Err(Error::Decay(format!(
            "{what}: boundary level {:.3e} of sup exceeds {DECAY_LEVEL:e}",
            edge / sup
        )));
    }
    Ok(())
}

pub fn transpose(src: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); src.len()];
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    out[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
    out
}

/// Row-major (x, k) samples to (X, K) spectrum.
pub fn forward_2d(g: &PhaseGrid, values: &[C64]) -> Vec<C64> {
    transform_2d(g, values, Direction::Forward)
}

/// (X, K) spectrum back to row-major (x, k) samples.
pub fn inverse_2d(g: &PhaseGrid, values: &[C64]) -> Vec<C64> {
    transform_2d(g, values, Direction::Inverse)
}

fn transform_2d(g: &PhaseGrid, values: &[C64], dir: Direction) -> Vec<C64> {
    let (tx, tk) = match dir {
        Direction::Forward => (
            Transform::new(&g.x, &g.xx(), dir).unwrap(),
            Transform::new(&g.k, &g.kk(), dir).unwrap(),
        ),
        Direction::Inverse => (
            Transform::new(&g.xx(), &g.x, dir).unwrap(),
            Transform::new(&g.kk(), &g.k, dir).unwrap(),
        ),
    };
    let mut rows = values.to_vec();
    tk.apply(&mut rows);
    let mut cols = transpose(&rows, g.x.n, g.k.n);
    tx.apply(&mut cols);
    transpose(&cols, g.k.n, g.x.n)
}

/// Transform along x only: (x, k) to (X, k) and back.
pub fn along_x(g: &PhaseGrid, values: &[C64], dir: Direction) -> Vec<C64> {
    let t = match dir {
        Direction::Forward => Transform::new(&g.x, &g.xx(), dir).unwrap(),
        Direction::Inverse => Transform::new(&g.xx(), &g.x, dir).unwrap(),
    };
    let mut cols = transpose(values, g.x.n, g.k.n);
    t.apply(&mut cols);
    transpose(&cols, g.k.n, g.x.n)
}

/// Transform along k only: (·, k) to (·, K) and back.
pub fn along_k(g: &PhaseGrid, values: &[C64], dir: Direction) -> Vec<C64> {
    let t = match dir {
        Direction::Forward => Transform::new(&g.k, &g.kk(), dir).unwrap(),
        Direction::Inverse => Transform::new(&g.kk(), &g.k, dir).unwrap(),
    };
    let mut out = values.to_vec();
    t.apply(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(g: &Grid1D) -> Vec<C64> {
        g.points().iter().map(|&x| C64::new((-2.0 * PI * x * x).exp(), 0.0)).collect()
    }

    #[test]
    fn gaussian_pair() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        let fh = forward(&g, &gauss(&g));
        let d = g.dual();
        let err = (0..g.n)
            .map(|m| {
                let xx = d.point(m);
                (fh[m] - C64::new((-PI * xx * xx / 2.0).exp() / 2f64.sqrt(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn off_centre_grid_pair() {
        // shifted domain and a shifted Gaussian: f̂ = e^{-2πiXc} (1/√2) e^{-πX²/2}
        let g = Grid1D::new(128, 12.0, 1.5).unwrap();
        let c = 1.25;
        let f: Vec<C64> =
            g.points().iter().map(|&x| C64::new((-2.0 * PI * (x - c).powi(2)).exp(), 0.0)).collect();
        let fh = forward(&g, &f);
        let d = g.dual();
        for m in 0..g.n {
            let xx = d.point(m);
            let want = C64::from_polar((-PI * xx * xx / 2.0).exp() / 2f64.sqrt(), -2.0 * PI * xx * c);
            assert!((fh[m] - want).norm() < 1e-11);
        }
    }

    #[test]
    fn constant_goes_to_zero_bin() {
        let g = Grid1D::new(64, 8.0, 0.0).unwrap();
        let fh = forward(&g, &vec![C64::new(1.0, 0.0); 64]);
        let zero = g.n / 2;
        assert!((fh[zero].re - 8.0).abs() < 1e-12);
        for (m, v) in fh.iter().enumerate() {
            if m != zero {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_examples() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        let q = quadrature(&gauss(&g), g.spacing());
        assert!((q.re - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        let m = 3.0;
        let w: Vec<C64> =
            g.points().iter().map(|&x| C64::from_polar(1.0, 2.0 * PI * x * m / g.length)).collect();
        assert!(quadrature(&w, g.spacing()).norm() < 1e-12);
        assert_eq!(quadrature(&vec![C64::new(0.0, 0.0); 8], 0.5), C64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_grid_exact() {
        let g = Grid1D::new(512, 32.0, 0.0).unwrap();
        assert_eq!(g.dual().spacing() * g.length, 1.0);
        assert_eq!(g.dual().length * g.spacing(), 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(6, 1.0, 0.0).is_err());
        assert!(Grid1D::new(96, 1.0, 0.0).is_err());
        assert!(Grid1D::new(64, 0.0, 0.0).is_err());
    }

    #[test]
    fn decay_guard() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        assert!(check_decay(&gauss(&g), "g").is_ok());
        assert!(check_decay(&vec![C64::new(1.0, 0.0); 256], "c").is_err());
    }

    #[test]
    fn two_d_round_trip() {
        let pg = PhaseGrid::new(Grid1D::new(16, 4.0, 0.5).unwrap(), Grid1D::new(32, 8.0, 0.0).unwrap());
        let v: Vec<C64> = (0..pg.len()).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let back = inverse_2d(&pg, &forward_2d(&pg, &v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        let bx = along_x(&pg, &along_x(&pg, &v, Direction::Forward), Direction::Inverse);
        for (a, b) in v.iter().zip(&bx) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
