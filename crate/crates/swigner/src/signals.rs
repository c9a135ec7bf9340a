//! Test wavefunctions: Gaussian packets, WKB states and superpositions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::ComplexField1D;
use crate::grid::Grid1D;

/// Default number of samples per local wavelength demanded of WKB data.
pub const POINTS_PER_WAVELENGTH: f64 = 8.0;

/// e^{-2π(x-x0)²/a²} e^{2πi k0 x}.
pub fn gaussian_packet(grid: Grid1D, x0: f64, k0: f64, a: f64) -> Result<ComplexField1D> {
    if !(a > 0.0) {
        return Err(Error::InvalidParam(format!("packet width {a} must be positive")));
    }
    let f = ComplexField1D::from_fn(grid, |x| {
        C64::from_polar((-2.0 * PI * (x - x0).powi(2) / (a * a)).exp(), 2.0 * PI * k0 * x)
    });
    f.check_decay("gaussian packet")?;
    Ok(f)
}

/// Real amplitude profile with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Amplitude {
    /// height · e^{-2π(x-center)²/width²}
    Gaussian { height: f64, center: f64, width: f64 },
}

impl Amplitude {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Amplitude::Gaussian { height, center, width } => {
                height * (-2.0 * PI * (x - center).powi(2) / (width * width)).exp()
            }
        }
    }
}

/// Real phase S(x) = Σ c_p x^p.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub coeffs: Vec<f64>,
}

impl Phase {
    pub fn linear(k0: f64) -> Self {
        Self { coeffs: vec![0.0, k0] }
    }
    /// S = κ x²/2 + k0 x.
    pub fn quadratic(kappa: f64, k0: f64) -> Self {
        Self { coeffs: vec![0.0, k0, 0.5 * kappa] }
    }
    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }
    fn eval_deriv(&self, x: f64, d: usize) -> f64 {
        let mut acc = 0.0;
        for (p, &c) in self.coeffs.iter().enumerate().skip(d) {
            let falling: f64 = ((p - d + 1)..=p).map(|v| v as f64).product();
            acc += c * falling * x.powi((p - d) as i32);
        }
        acc
    }
    pub fn s(&self, x: f64) -> f64 {
        self.eval_deriv(x, 0)
    }
    /// ∇S
    pub fn ds(&self, x: f64) -> f64 {
        self.eval_deriv(x, 1)
    }
    /// D²S
    pub fn d2s(&self, x: f64) -> f64 {
        self.eval_deriv(x, 2)
    }
}

/// f^ε(x) = A(x) e^{2πi S(x)/ε}.
#[derive(Debug, Clone, PartialEq)]
pub struct WkbSpec {
    pub amplitude: Amplitude,
    pub phase: Phase,
    pub epsilon: f64,
}

impl WkbSpec {
    pub fn eval(&self, x: f64) -> C64 {
        C64::from_polar(self.amplitude.eval(x), 2.0 * PI * self.phase.s(x) / self.epsilon)
    }
}

/// Sampled WKB state with the default resolution requirement.
pub fn wkb(spec: &WkbSpec, grid: Grid1D) -> Result<ComplexField1D> {
    wkb_with_resolution(spec, grid, POINTS_PER_WAVELENGTH)
}

pub fn wkb_with_resolution(spec: &WkbSpec, grid: Grid1D, points_per_wavelength: f64) -> Result<ComplexField1D> {
    if !(spec.epsilon > 0.0 && spec.epsilon <= 1.0) {
        return Err(Error::InvalidParam(format!("epsilon = {} outside (0, 1]", spec.epsilon)));
    }
    let xs = grid.points();
    let amp: Vec<f64> = xs.iter().map(|&x| spec.amplitude.eval(x).abs()).collect();
    let amax = amp.iter().cloned().fold(0.0, f64::max);
    let h = grid.spacing();
    for (&x, &a) in xs.iter().zip(&amp) {
        if a > 1e-10 * amax {
            let kloc = spec.phase.ds(x).abs();
            if kloc > 0.0 && h > spec.epsilon / (kloc * points_per_wavelength) {
                return Err(Error::UnderResolved(format!(
                    "spacing {h:.3e} exceeds local wavelength/{points_per_wavelength} = {:.3e} at x = {x:.3}",
                    spec.epsilon / (kloc * points_per_wavelength)
                )));
            }
        }
    }
    let f = ComplexField1D::from_fn(grid, |x| spec.eval(x));
    f.check_decay("wkb amplitude")?;
    Ok(f)
}

/// Σ w_i f_i on a shared grid.
pub fn superpose(fields: &[ComplexField1D], weights: &[C64]) -> Result<ComplexField1D> {
    if fields.is_empty() || fields.len() != weights.len() {
        return Err(Error::InvalidParam("need one weight per field".into()));
    }
    let mut out = ComplexField1D::zeros(fields[0].grid);
    for (f, w) in fields.iter().zip(weights) {
        out.require_same_grid(f)?;
        for (o, v) in out.values.iter_mut().zip(&f.values) {
            *o += w * v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::new(256, 16.0, 0.0).unwrap()
    }

    #[test]
    fn packet_peak_and_norm() {
        let f = gaussian_packet(grid(), 0.0, 0.0, 1.0).unwrap();
        assert!((f.values[128].re - 1.0).abs() < 1e-15);
        for a in [0.7, 1.0, 1.6] {
            let f = gaussian_packet(grid(), 0.5, 1.5, a).unwrap();
            assert!((f.norm_sq() - a / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn packet_spectral_peak() {
        let g = grid();
        let f = gaussian_packet(g, 2.0, 3.0, 1.0).unwrap();
        let s = f.spectrum();
        let imax = (0..g.n).max_by(|&a, &b| s[a].norm().partial_cmp(&s[b].norm()).unwrap()).unwrap();
        assert!((g.dual().point(imax) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn packet_must_fit() {
        assert!(gaussian_packet(grid(), 7.0, 0.0, 1.0).is_err());
        assert!(gaussian_packet(grid(), 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn wkb_modulus_and_zero_phase() {
        let g = Grid1D::new(8192, 8.0, 0.0).unwrap();
        let amp = Amplitude::Gaussian { height: 1.0, center: 0.0, width: 1.0 };
        let spec = WkbSpec { amplitude: amp.clone(), phase: Phase::quadratic(1.0, 0.0), epsilon: 1.0 / 64.0 };
        let f = wkb(&spec, g).unwrap();
        for (x, v) in g.points().iter().zip(&f.values) {
            assert!((v.norm() - amp.eval(*x)).abs() < 1e-14);
        }
        let flat = WkbSpec { amplitude: amp.clone(), phase: Phase::zero(), epsilon: 0.01 };
        let f0 = wkb(&flat, g).unwrap();
        for (x, v) in g.points().iter().zip(&f0.values) {
            assert_eq!(v.re, amp.eval(*x));
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn wkb_resolution_guard() {
        let g = Grid1D::new(256, 8.0, 0.0).unwrap();
        let spec = WkbSpec {
            amplitude: Amplitude::Gaussian { height: 1.0, center: 0.0, width: 1.0 },
            phase: Phase::quadratic(1.0, 0.0),
            epsilon: 1.0 / 64.0,
        };
        assert!(matches!(wkb(&spec, g), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn wkb_matches_packet_modulation() {
        let g = grid();
        let spec = WkbSpec {
            amplitude: Amplitude::Gaussian { height: 1.0, center: 0.3, width: 1.2 },
            phase: Phase::linear(1.5),
            epsilon: 1.0,
        };
        let a = wkb(&spec, g).unwrap();
        let b = gaussian_packet(g, 0.3, 1.5, 1.2).unwrap();
        assert!(a.rel_sup_err(&b) < 1e-13);
    }

    #[test]
    fn wkb_local_wavenumber() {
        // windowed spectral peak sits at S'/ε over the window centre, pulled toward the amplitude peak
        let eps = 1.0 / 64.0;
        let g = Grid1D::new(8192, 8.0, 0.0).unwrap();
        let spec = WkbSpec {
            amplitude: Amplitude::Gaussian { height: 1.0, center: 0.0, width: 1.0 },
            phase: Phase::quadratic(1.0, 0.0),
            epsilon: eps,
        };
        let f = wkb(&spec, g).unwrap();
        for x0 in [-0.4, 0.25, 0.5] {
            let win = f.map(|v| v).zip_with(
                &ComplexField1D::from_real_fn(g, |x| (-2.0 * PI * (x - x0).powi(2) / 0.01).exp()),
                |a, b| a * b,
            ).unwrap();
            let s = win.spectrum();
            let d = g.dual();
            let imax = (0..g.n).max_by(|&a, &b| s[a].norm().partial_cmp(&s[b].norm()).unwrap()).unwrap();
            let xc = x0 / 1.01;
            assert!((d.point(imax) - xc / eps).abs() <= 2.0 * d.spacing(), "{x0}");
        }
    }
}
