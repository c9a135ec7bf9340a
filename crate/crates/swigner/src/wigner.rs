//! Wigner and smoothed Wigner transforms, phase-space smoothing, marginals
//! and the critical-smoothing spectrogram.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ComplexField1D, PhaseField};
use crate::grid::{self, Direction, Grid1D, PhaseGrid, Transform};

/// Smoothing scales σx², σk² and the semiclassical parameter ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    pub sigma_x2: f64,
    pub sigma_k2: f64,
    pub epsilon: f64,
}

impl SmoothingParams {
    pub fn new(sigma_x2: f64, sigma_k2: f64, epsilon: f64) -> Result<Self> {
        let p = Self { sigma_x2, sigma_k2, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_x2 > 0.0 && self.sigma_k2 > 0.0) {
            return Err(Error::InvalidParam("smoothing scales must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParam(format!("epsilon = {} outside (0, 1]", self.epsilon)));
        }
        if self.strength() > 1.0 + 1e-12 {
            return Err(Error::InvalidParam(format!(
                "smoothing strength σxσk = {} exceeds critical value 1",
                self.strength()
            )));
        }
        Ok(())
    }

    pub fn strength(&self) -> f64 {
        (self.sigma_x2 * self.sigma_k2).sqrt()
    }

    pub fn is_critical(&self) -> bool {
        (self.strength() - 1.0).abs() <= 1e-12
    }

    /// Effective position variance parameter εσx².
    pub fn ax(&self) -> f64 {
        self.epsilon * self.sigma_x2
    }

    /// Effective wavenumber variance parameter εσk².
    pub fn ak(&self) -> f64 {
        self.epsilon * self.sigma_k2
    }

    /// Phase-space multiplier e^{-(π/2)(εσx²X² + εσk²K²)}.
    pub fn multiplier(&self, xx: f64, kk: f64) -> f64 {
        (-0.5 * PI * (self.ax() * xx * xx + self.ak() * kk * kk)).exp()
    }
}

/// How the (x, k) grid is cut out of the wavefunction grid.
///
/// Largest spectral level, relative to the sup, that x-decimation may discard.
pub const DECIMATION_LEVEL: f64 = 1e-12;

/// The y-samples of the defining integral are spaced `y_step·h/ε`, so that
/// x ± εy/2 lands on the doubled grid; the k-grid has `nk` points and length
/// ε/(y_step·h). `x_stride` keeps every stride-th x-row (smoothed transforms only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub nk: usize,
    pub y_step: usize,
    pub x_stride: usize,
}

impl Layout {
    pub fn square(n: usize) -> Self {
        Self { nk: n, y_step: 1, x_stride: 1 }
    }

    pub fn phase_grid(&self, xgrid: &Grid1D, epsilon: f64) -> Result<PhaseGrid> {
        if self.y_step == 0 {
            return Err(Error::InvalidParam("y_step must be >= 1".into()));
        }
        let x = xgrid.decimate(self.x_stride)?;
        let k = Grid1D::new(self.nk, epsilon / (self.y_step as f64 * xgrid.spacing()), 0.0)?;
        Ok(PhaseGrid::new(x, k))
    }
}

/// Fourier interpolation onto the grid of half spacing.
fn doubled(f: &ComplexField1D) -> Vec<C64> {
    let n = f.grid.n;
    let g2 = Grid1D { n: 2 * n, length: f.grid.length, center: f.grid.center };
    let s = f.spectrum();
    let mut s2 = vec![C64::new(0.0, 0.0); 2 * n];
    let off = n / 2;
    for (m, v) in s.iter().enumerate().skip(1) {
        s2[m + off] = *v;
    }
    s2[off] = 0.5 * s[0];
    s2[off + n] = 0.5 * s[0];
    grid::inverse(&g2, &s2)
}

fn check_band(f: &ComplexField1D, y_step: usize) -> Result<()> {
    if y_step == 1 {
        return Ok(());
    }
    let s = f.spectrum();
    let d = f.grid.dual();
    let band = 0.9 * f.grid.nyquist() / y_step as f64;
    let sup = grid::sup_abs(&s);
    let out = (0..d.n).filter(|&m| d.point(m).abs() > band).fold(0.0_f64, |m, i| m.max(s[i].norm()));
    if out > grid::DECAY_LEVEL * sup {
        return Err(Error::UnderResolved(format!(
            "spectrum exceeds the k-band of y_step {y_step} (level {:.2e})",
            out / sup.max(1e-300)
        )));
    }
    Ok(())
}

/// Shared kernel for W^ε and Φ W^ε. `smoothing` carries (εσx², εσk²).
fn wigner_core(
    f: &ComplexField1D,
    g: &ComplexField1D,
    epsilon: f64,
    layout: Layout,
    smoothing: Option<(f64, f64)>,
) -> Result<PhaseField> {
    f.require_same_grid(g)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParam(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    let pg = layout.phase_grid(&f.grid, epsilon)?;
    check_band(f, layout.y_step)?;
    check_band(g, layout.y_step)?;
    let n = f.grid.n;
    let h = f.grid.spacing();
    let nk = layout.nk;
    let j = layout.y_step as i64;
    let dy = layout.y_step as f64 * h / epsilon;
    let (ax, ak) = smoothing.unwrap_or((0.0, 0.0));
    if layout.x_stride > 1 && ax <= 0.0 {
        return Err(Error::InvalidParam("x_stride > 1 needs x-smoothing".into()));
    }
    let f2 = doubled(f);
    let g2 = doubled(g);
    let xfull = f.grid;
    let xout = pg.x;
    let nout = xout.n;
    let need_x = ax > 0.0 || layout.x_stride > 1;
    let tx = Transform::new(&xfull, &xfull.dual(), Direction::Forward)?;
    let txi = Transform::new(&xout.dual(), &xout, Direction::Inverse)?;
    let xdual = xfull.dual();
    let band_off = (n - nout) / 2;
    let xmult: Vec<f64> = (0..n).map(|m| (-0.5 * PI * ax * xdual.point(m).powi(2)).exp()).collect();

    // per column: values, spectral sup kept, spectral sup discarded by decimation
    let columns: Vec<(Vec<C64>, f64, f64)> = (0..nk)
        .into_par_iter()
        .map(|l| {
            let c = l as i64 - (nk / 2) as i64;
            let y = c as f64 * dy;
            let damp = (-0.5 * PI * ak * y * y).exp();
            if damp < 1e-300 {
                return (vec![C64::new(0.0, 0.0); nout], 0.0, 0.0);
            }
            let o = c * j;
            let mut col: Vec<C64> = (0..n as i64)
                .map(|i| {
                    let a = 2 * i + o;
                    let b = 2 * i - o;
                    if a < 0 || b < 0 || a >= 2 * n as i64 || b >= 2 * n as i64 {
                        C64::new(0.0, 0.0)
                    } else {
                        f2[a as usize] * g2[b as usize].conj() * damp
                    }
                })
                .collect();
            if !need_x {
                return (col, 0.0, 0.0);
            }
            tx.apply(&mut col);
            let lost = (0..n)
                .filter(|&m| m < band_off + 1 || m >= band_off + nout)
                .fold(0.0_f64, |a, m| a.max((col[m] * xmult[m]).norm()));
            let mut out: Vec<C64> = (0..nout).map(|m| col[m + band_off] * xmult[m + band_off]).collect();
            let kept = grid::sup_abs(&out);
            out[0] = C64::new(0.0, 0.0);
            txi.apply(&mut out);
            (out, kept, lost)
        })
        .collect();
    if layout.x_stride > 1 {
        let kept = columns.iter().fold(0.0_f64, |a, c| a.max(c.1));
        let lost = columns.iter().fold(0.0_f64, |a, c| a.max(c.2));
        if lost > DECIMATION_LEVEL * kept {
            return Err(Error::UnderResolved(format!(
                "x_stride {} discards smoothed content at level {:.2e}",
                layout.x_stride,
                lost / kept
            )));
        }
    }
    let columns: Vec<Vec<C64>> = columns.into_iter().map(|c| c.0).collect();

    if smoothing.is_none() {
        // the discarded separations must carry no weight
        let sup = columns.iter().flat_map(|c| c.iter()).fold(0.0_f64, |m, v| m.max(v.norm()));
        let edge = columns[0].iter().chain(&columns[nk - 1]).fold(0.0_f64, |m, v| m.max(v.norm()));
        if sup > 0.0 && edge > grid::DECAY_LEVEL * sup {
            return Err(Error::Decay(format!(
                "separation range of {nk} y-samples truncates the correlation (level {:.2e})",
                edge / sup
            )));
        }
    }

    let ygrid = Grid1D { n: nk, length: nk as f64 * dy, center: 0.0 };
    let ty = Transform::new(&ygrid, &pg.k, Direction::Forward)?;
    let mut values = vec![C64::new(0.0, 0.0); nout * nk];
    values.par_chunks_mut(nk).enumerate().for_each(|(i, row)| {
        for l in 0..nk {
            row[l] = columns[l][i];
        }
        ty.apply(row);
    });
    let mut w = PhaseField::new(pg, values)?;
    if std::ptr::eq(f, g) || f.values == g.values {
        w = w.certify_real()?;
    }
    Ok(w)
}

/// W^ε[f,g](x,k) = ∫ e^{-2πiky} f(x+εy/2) ḡ(x-εy/2) dy.
pub fn wigner_transform(f: &ComplexField1D, g: &ComplexField1D, epsilon: f64) -> Result<PhaseField> {
    wigner_transform_with(f, g, epsilon, Layout::square(f.grid.n))
}

pub fn wigner_transform_with(
    f: &ComplexField1D,
    g: &ComplexField1D,
    epsilon: f64,
    layout: Layout,
) -> Result<PhaseField> {
    if layout.x_stride != 1 {
        return Err(Error::InvalidParam("unsmoothed transform cannot decimate x".into()));
    }
    wigner_core(f, g, epsilon, layout, None)
}

/// Φ with multiplier e^{-(π/2)(εσx²X² + εσk²K²)}.
pub fn smooth_phase(w: &PhaseField, p: &SmoothingParams) -> PhaseField {
    let mut s = w.spectrum();
    apply_multiplier(&w.grid, &mut s, |xx, kk| C64::new(p.multiplier(xx, kk), 0.0));
    let mut out = PhaseField::from_spectrum(w.grid, &s);
    if w.real {
        for v in &mut out.values {
            v.im = 0.0;
        }
        out.real = true;
    }
    out
}

pub(crate) fn apply_multiplier(g: &PhaseGrid, s: &mut [C64], m: impl Fn(f64, f64) -> C64 + Sync) {
    let xx = g.xx();
    let kk = g.kk();
    let kpts = kk.points();
    s.par_chunks_mut(g.k.n).enumerate().for_each(|(i, row)| {
        let x = xx.point(i);
        for (v, &k) in row.iter_mut().zip(&kpts) {
            *v *= m(x, k);
        }
    });
}

/// W̃^ε[f,g] = Φ_{√εσx,√εσk} W^ε[f,g] on the square layout.
pub fn swt(f: &ComplexField1D, g: &ComplexField1D, p: &SmoothingParams) -> Result<PhaseField> {
    swt_with(f, g, p, Layout::square(f.grid.n))
}

pub fn swt_with(f: &ComplexField1D, g: &ComplexField1D, p: &SmoothingParams, layout: Layout) -> Result<PhaseField> {
    p.validate()?;
    wigner_core(f, g, p.epsilon, layout, Some((p.ax(), p.ak())))
}

/// ∫ w dk as a function of x.
pub fn marginal_k(w: &PhaseField) -> ComplexField1D {
    let nk = w.grid.k.n;
    let dk = w.grid.k.spacing();
    let values = w.values.chunks(nk).map(|r| r.iter().sum::<C64>() * dk).collect();
    ComplexField1D { grid: w.grid.x, values }
}

/// ∫ w dx as a function of k.
pub fn marginal_x(w: &PhaseField) -> ComplexField1D {
    let nk = w.grid.k.n;
    let dx = w.grid.x.spacing();
    let mut values = vec![C64::new(0.0, 0.0); nk];
    for row in w.values.chunks(nk) {
        for (v, r) in values.iter_mut().zip(row) {
            *v += r;
        }
    }
    for v in &mut values {
        *v *= dx;
    }
    ComplexField1D { grid: w.grid.k, values }
}

/// Critical-smoothing transform (1/ε)(2/(εσx²))^{1/2} |∫ e^{-2πiyk/ε - π(x-y)²/(εσx²)} u(y) dy|².
pub fn spectrogram(u: &ComplexField1D, p: &SmoothingParams) -> Result<PhaseField> {
    spectrogram_with(u, p, Layout::square(u.grid.n))
}

pub fn spectrogram_with(u: &ComplexField1D, p: &SmoothingParams, layout: Layout) -> Result<PhaseField> {
    p.validate()?;
    if !p.is_critical() {
        return Err(Error::InvalidParam(format!(
            "spectrogram needs critical smoothing, σxσk = {}",
            p.strength()
        )));
    }
    let pg = layout.phase_grid(&u.grid, p.epsilon)?;
    let nk = layout.nk;
    let j = layout.y_step as i64;
    let h = u.grid.spacing();
    let step = layout.y_step as f64 * h;
    let half = 0.5 * nk as f64 * step;
    if (-PI * half * half / p.ax()).exp() > 1e-16 {
        return Err(Error::UnderResolved("window wider than the y-range".into()));
    }
    let win: Vec<f64> =
        (0..nk).map(|l| (-PI * ((l as f64 - (nk / 2) as f64) * step).powi(2) / p.ax()).exp()).collect();
    let ygrid = Grid1D { n: nk, length: nk as f64 * step, center: 0.0 };
    let kappa = Grid1D { n: nk, length: 1.0 / step, center: 0.0 };
    let ty = Transform::new(&ygrid, &kappa, Direction::Forward)?;
    let norm = (2.0 / p.ax()).sqrt() / p.epsilon;
    let n = u.grid.n as i64;
    let s = layout.x_stride as i64;
    let mut values = vec![C64::new(0.0, 0.0); pg.len()];
    values.par_chunks_mut(nk).enumerate().for_each(|(i, row)| {
        let base = i as i64 * s;
        for l in 0..nk {
            let idx = base + (l as i64 - (nk / 2) as i64) * j;
            row[l] = if idx < 0 || idx >= n { C64::new(0.0, 0.0) } else { u.values[idx as usize] * win[l] };
        }
        ty.apply(row);
        for v in row.iter_mut() {
            *v = C64::new(norm * v.norm_sqr(), 0.0);
        }
    });
    let mut w = PhaseField::new(pg, values)?;
    w.real = true;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::gaussian_packet;

    fn g256() -> Grid1D {
        Grid1D::new(128, 16.0, 0.0).unwrap()
    }

    fn packet() -> ComplexField1D {
        // e^{-πx²}: width a = √2
        gaussian_packet(g256(), 0.0, 0.0, 2f64.sqrt()).unwrap()
    }

    #[test]
    fn gaussian_wigner_closed_form() {
        let f = packet();
        let w = wigner_transform(&f, &f, 1.0).unwrap();
        assert!(w.real);
        let want = PhaseField::from_fn(w.grid, |x, k| C64::new(2f64.sqrt() * (-2.0 * PI * (x * x + k * k)).exp(), 0.0));
        assert!(w.rel_sup_err(&want) * want.sup() < 1e-8);
    }

    #[test]
    fn smoothing_closed_form() {
        let f = packet();
        let w = wigner_transform(&f, &f, 1.0).unwrap();
        for s in [0.25, 0.5, 1.0] {
            let p = SmoothingParams::new(s, s, 1.0).unwrap();
            let ws = smooth_phase(&w, &p);
            let want = PhaseField::from_fn(w.grid, |x, k| {
                C64::new(2f64.sqrt() / (1.0 + s) * (-2.0 * PI * (x * x + k * k) / (1.0 + s)).exp(), 0.0)
            });
            assert!(ws.values.iter().zip(&want.values).all(|(a, b)| (a - b).norm() < 1e-8));
            assert!((ws.integral() - w.integral()).norm() < 1e-12 * w.integral().norm());
        }
        let tiny = SmoothingParams::new(1e-12, 1e-12, 1.0).unwrap();
        assert!(smooth_phase(&w, &tiny).rel_sup_err(&w) < 1e-8);
    }

    #[test]
    fn swt_closed_form_and_equivalence() {
        let f = packet();
        let p = SmoothingParams::new(1.0, 1.0, 1.0).unwrap();
        let ws = swt(&f, &f, &p).unwrap();
        let want = PhaseField::from_fn(ws.grid, |x, k| {
            C64::new(2f64.sqrt() / 2.0 * (-PI * (x * x + k * k)).exp(), 0.0)
        });
        assert!(ws.values.iter().zip(&want.values).all(|(a, b)| (a - b).norm() < 1e-8));
        let two_step = smooth_phase(&wigner_transform(&f, &f, 1.0).unwrap(), &p);
        assert!(ws.rel_sup_err(&two_step) < 1e-12);
    }

    #[test]
    fn marginals_of_wigner() {
        let g = g256();
        let f = gaussian_packet(g, 0.7, 1.1, 1.3).unwrap();
        let w = wigner_transform(&f, &f, 1.0).unwrap();
        let m = marginal_k(&w);
        let dens = f.map(|v| C64::new(v.norm_sqr(), 0.0));
        assert!(m.values.iter().zip(&dens.values).all(|(a, b)| (a - b).norm() < 1e-9));
    }

    #[test]
    fn cross_term_midpoint() {
        let g = Grid1D::new(128, 16.0, 0.0).unwrap();
        let f = gaussian_packet(g, -2.0, 0.0, 1.0).unwrap();
        let h = gaussian_packet(g, 2.0, 0.0, 1.0).unwrap();
        let w = wigner_transform(&f, &h, 1.0).unwrap();
        let (mut best, mut bi) = (0.0, 0);
        for i in 0..g.n {
            for j in 0..g.n {
                if w.at(i, j).norm() > best {
                    best = w.at(i, j).norm();
                    bi = i;
                }
            }
        }
        assert!(w.grid.x.point(bi).abs() <= w.grid.x.spacing());
    }

    #[test]
    fn spectrogram_equals_critical_swt() {
        let g = g256();
        let f = gaussian_packet(g, 0.5, 0.8, 1.0).unwrap();
        let h = gaussian_packet(g, -1.5, -0.4, 0.8).unwrap();
        let u = crate::signals::superpose(&[f, h], &[C64::new(1.0, 0.0), C64::new(0.3, 0.7)]).unwrap();
        for (sx2, eps) in [(1.0, 1.0), (0.5, 1.0), (2.0, 1.0), (1.0, 0.5)] {
            let p = SmoothingParams::new(sx2, 1.0 / sx2, eps).unwrap();
            let a = spectrogram(&u, &p).unwrap();
            let b = swt(&u, &u, &p).unwrap();
            assert!(a.rel_sup_err(&b) < 1e-8, "{sx2} {eps}: {}", a.rel_sup_err(&b));
        }
    }

    #[test]
    fn spectrogram_rejects_subcritical() {
        let p = SmoothingParams::new(0.5, 0.5, 1.0).unwrap();
        assert!(spectrogram(&packet(), &p).is_err());
        assert!(SmoothingParams::new(1.5, 1.5, 1.0).is_err());
    }

    #[test]
    fn decimated_swt_matches_full() {
        let g = Grid1D::new(512, 16.0, 0.0).unwrap();
        let f = gaussian_packet(g, 0.5, 0.5, 1.5).unwrap();
        let p = SmoothingParams::new(1.0, 1.0, 1.0).unwrap();
        let full = swt_with(&f, &f, &p, Layout { nk: 128, y_step: 4, x_stride: 1 }).unwrap();
        let dec = swt_with(&f, &f, &p, Layout { nk: 128, y_step: 4, x_stride: 2 }).unwrap();
        for i in 0..dec.grid.x.n {
            for j in 0..128 {
                assert!((dec.at(i, j) - full.at(2 * i, j)).norm() < 1e-12);
            }
        }
    }
}
