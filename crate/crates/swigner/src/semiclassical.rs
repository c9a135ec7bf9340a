//! Finite-order semiclassical expansion of the smoothed potential term,
//! WKB asymptotics of the SWT and the uniform decay estimates.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::calculus::{smooth, Coef, DEFAULT_FLOOR};
use crate::error::{Error, Result};
use crate::field::{ComplexField1D, PhaseField};
use crate::grid::{self, Direction, Grid1D, PhaseGrid};
use crate::signals::{wkb, WkbSpec};
use crate::swcalc::{self, on_grid, potential_term, ScatteringConfig};
use crate::wigner::{swt_with, wigner_transform, Layout, SmoothingParams};

pub const MAX_ORDER: usize = 6;
/// Residuals below this multiple of machine epsilon (relative) are left out of slope fits.
pub const PLATEAU: f64 = 10.0 * f64::EPSILON;
/// Largest (σx/σk)|S''| for which the WKB closed form is evaluated.
pub const CURVATURE_MAX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionConfig {
    pub order: usize,
    pub epsilon_ladder: Vec<f64>,
}

impl ExpansionConfig {
    pub fn new(order: usize, epsilon_ladder: Vec<f64>) -> Result<Self> {
        let c = Self { order, epsilon_ladder };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::InvalidParam(format!("expansion order {} exceeds {MAX_ORDER}", self.order)));
        }
        let l = &self.epsilon_ladder;
        if l.is_empty() || l.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::InvalidParam("epsilon ladder must be non-empty and inside (0, 1]".into()));
        }
        if l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParam("epsilon ladder must be strictly decreasing".into()));
        }
        Ok(())
    }
}

fn require_real(v: &ComplexField1D, what: &str) -> Result<()> {
    if v.max_imag() > 1e-12 * v.sup().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParam(format!("{what} must be real")));
    }
    Ok(())
}

/// Ṽ = Φ_{√ε σx} V.
pub fn smoothed_potential(v: &ComplexField1D, epsilon: f64, sigma_x: f64) -> Result<ComplexField1D> {
    require_real(v, "potential")?;
    Ok(smooth(v, (epsilon * sigma_x * sigma_x).sqrt()))
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, v| a * v as f64)
}

/// Spectral ∂x^a ∂k^b of a phase-space field given its 2-D spectrum.
fn mixed_derivative(g: &PhaseGrid, spec: &[C64], a: usize, b: usize) -> Vec<C64> {
    let (xx, kk) = (g.xx(), g.kk());
    let nk = g.k.n;
    let tpi = C64::new(0.0, 2.0 * PI);
    let mut s = spec.to_vec();
    s.par_chunks_mut(nk).enumerate().for_each(|(r, row)| {
        let fx = (tpi * xx.point(r)).powu(a as u32);
        for (j, v) in row.iter_mut().enumerate() {
            *v *= fx * (tpi * kk.point(j)).powu(b as u32);
        }
    });
    grid::inverse_2d(g, &s)
}

/// Σ_{m≤N} (ε/4πi)^m Σ_l (iσx²)^l (-1)^{m-l} ∂^mṼ/(l!(m-l)!) ∂x^l ∂k^{m-l} w̃.
pub fn expansion_apply(v: &ComplexField1D, w: &PhaseField, order: usize, p: &SmoothingParams) -> Result<PhaseField> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParam(format!("expansion order {order} exceeds {MAX_ORDER}")));
    }
    p.validate()?;
    swcalc::certify(w, p, DEFAULT_FLOOR)?;
    let vt = smoothed_potential(v, p.epsilon, p.sigma_x2.sqrt())?;
    let g = w.grid;
    let nk = g.k.n;
    let spec = w.spectrum();
    let mut out = vec![C64::new(0.0, 0.0); g.len()];
    let step = C64::new(p.epsilon, 0.0) / C64::new(0.0, 4.0 * PI);
    let isx = C64::new(0.0, p.sigma_x2);
    for m in 0..=order {
        let dv = on_grid(&vt.derivative(m as u32), &g.x)?;
        let pre = step.powu(m as u32);
        for l in 0..=m {
            let c = pre * isx.powu(l as u32) * if (m - l) % 2 == 0 { 1.0 } else { -1.0 } / (factorial(l) * factorial(m - l));
            let d = mixed_derivative(&g, &spec, l, m - l);
            out.par_chunks_mut(nk).zip(d.par_chunks(nk)).enumerate().for_each(|(r, (o, dr))| {
                let f = c * dv.values[r];
                for (a, b) in o.iter_mut().zip(dr) {
                    *a += f * b;
                }
            });
        }
    }
    PhaseField::new(g, out)
}

/// Recipe for the grids used at each ε of a ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderGrid {
    pub length: f64,
    pub center: f64,
    /// Phase-space x points after decimation.
    pub nx: usize,
    /// Minimum number of k points.
    pub nk: usize,
}

/// The sampled WKB state at `spec.epsilon` and its SWT on a decimated layout.
pub fn ladder_swt(spec: &WkbSpec, p: &SmoothingParams, lg: &LadderGrid) -> Result<(ComplexField1D, PhaseField)> {
    let eps = spec.epsilon;
    let mut n = lg.nx;
    let f = loop {
        let g = Grid1D::new(n, lg.length, lg.center)?;
        match wkb(spec, g) {
            Ok(f) => break f,
            Err(Error::UnderResolved(_)) if n < 1 << 20 => n *= 2,
            Err(e) => return Err(e),
        }
    };
    let h = f.grid.spacing();
    let amax = f.values.iter().fold(0.0_f64, |a, v| a.max(v.norm()));
    let (mut kmax, mut curv) = (0.0_f64, 0.0_f64);
    for (x, v) in f.grid.points().into_iter().zip(&f.values) {
        if v.norm() > 1e-10 * amax {
            kmax = kmax.max(spec.phase.ds(x).abs());
            curv = curv.max(spec.phase.d2s(x).abs());
        }
    }
    let sk = (p.ak() / (4.0 * PI)).sqrt();
    let cover = kmax + 10.0 * sk * (1.0 + (p.sigma_x2 / p.sigma_k2).sqrt() * curv);
    let ymax = (2.0 * 37.0 / (PI * p.ak())).sqrt();
    let mut j = ((eps / (2.0 * h * cover)).floor() as usize).max(1);
    loop {
        let dy = j as f64 * h / eps;
        let nk = lg.nk.max((2.0 * ymax / dy).ceil() as usize).next_power_of_two();
        let layout = Layout { nk, y_step: j, x_stride: (f.grid.n / lg.nx).max(1) };
        match swt_with(&f, &f, p, layout) {
            Ok(w) => return Ok((f, w)),
            Err(Error::UnderResolved(m)) if m.contains("k-band") && j > 1 => j -= 1,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub epsilon: f64,
    pub order: usize,
    /// sup |potential term − expansion| over phase space.
    pub sup_error: f64,
    /// `sup_error` divided by sup |w̃|.
    pub rel_error: f64,
}

/// Least-squares fitted Gaussian decay rate c of |V̂(S)| ~ e^{-cS²}, from the
/// bins above 1e-14 of the peak.
pub fn spectral_decay_rate(v: &ComplexField1D) -> f64 {
    let s = v.spectrum();
    let d = v.grid.dual();
    let top = grid::sup_abs(&s);
    let pts: Vec<(f64, f64)> = s
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-14 * top)
        .map(|(m, z)| (d.point(m).powi(2), (z.norm() / top).ln()))
        .collect();
    -slope(&pts).unwrap_or(0.0)
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Log-log slope of `err` against `eps`, skipping round-off plateaus
/// (values at or below `PLATEAU · scale`).
pub fn order_fit(eps: &[f64], err: &[f64], scale: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(err)
        .zip(scale)
        .filter(|((_, e), s)| **e > PLATEAU * **s)
        .map(|((x, e), _)| (x.ln(), e.ln()))
        .collect();
    slope(&pts)
}

/// Residual of the order-N expansion against the exact potential term, on the
/// WKB state `spec` re-sampled at every ladder ε.
pub fn expansion_residual(
    v: &Coef,
    spec: &WkbSpec,
    cfg: &ExpansionConfig,
    sigma: (f64, f64),
    lg: &LadderGrid,
) -> Result<Vec<ResidualRow>> {
    cfg.validate()?;
    if sigma.0 > 2.0 {
        return Err(Error::Hypothesis(format!("σx² = {} exceeds 2", sigma.0)));
    }
    cfg.epsilon_ladder
        .iter()
        .map(|&eps| {
            let p = SmoothingParams::new(sigma.0, sigma.1, eps)?;
            let s = WkbSpec { epsilon: eps, ..spec.clone() };
            let (f, w) = ladder_swt(&s, &p, lg)?;
            let vf = match v {
                Coef::Sampled(c) => on_grid(c, &f.grid)?,
                c => c.sample(f.grid)?,
            };
            let top = grid::sup_abs(&vf.spectrum());
            let d = f.grid.dual();
            let tail = vf
                .spectrum()
                .iter()
                .enumerate()
                .filter(|(m, _)| d.point(*m).abs() > 0.8 * f.grid.nyquist())
                .fold(0.0_f64, |a, (_, z)| a.max(z.norm()));
            if top > 0.0 && tail > 1e-10 * top {
                return Err(Error::Hypothesis("potential spectrum does not decay on the grid".into()));
            }
            let vx = on_grid(&vf, &w.grid.x)?;
            let exact = potential_term(&vx, &w, &p, &ScatteringConfig::default())?;
            let approx = expansion_apply(&vf, &w, cfg.order, &p)?;
            let sup_error = exact.values.iter().zip(&approx.values).fold(0.0_f64, |a, (x, y)| a.max((x - y).norm()));
            Ok(ResidualRow { epsilon: eps, order: cfg.order, sup_error, rel_error: sup_error / w.sup() })
        })
        .collect()
}

/// Axis-aligned phase-space box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x: (f64, f64),
    pub k: (f64, f64),
}

impl Window {
    pub fn contains(&self, x: f64, k: f64) -> bool {
        x >= self.x.0 && x <= self.x.1 && k >= self.k.0 && k <= self.k.1
    }
}

/// Leading-order SWT of A e^{2πiS/ε}:
/// |A|²/√((εσk²/2)(1+a²)) · exp(-(2π/(εσk²))(k-S')²/(1+a²)), a = (σx/σk)S''.
/// Points outside the window are set to zero.
pub fn wkb_swt_closed_form(spec: &WkbSpec, p: &SmoothingParams, g: &PhaseGrid, window: &Window) -> Result<PhaseField> {
    p.validate()?;
    let ratio = (p.sigma_x2 / p.sigma_k2).sqrt();
    let xs = g.x.points();
    for &x in xs.iter().filter(|&&x| x >= window.x.0 && x <= window.x.1) {
        let a = ratio * spec.phase.d2s(x);
        if a.abs() > CURVATURE_MAX {
            return Err(Error::InvalidParam(format!("curvature (σx/σk)S'' = {a:.2} at x = {x:.3} exceeds {CURVATURE_MAX}")));
        }
    }
    let ak = p.ak();
    Ok(PhaseField::from_fn(*g, |x, k| {
        if !window.contains(x, k) {
            return C64::new(0.0, 0.0);
        }
        let a2 = 1.0 + (ratio * spec.phase.d2s(x)).powi(2);
        let amp = spec.amplitude.eval(x).powi(2);
        let u = k - spec.phase.ds(x);
        C64::new(amp / (0.5 * ak * a2).sqrt() * (-2.0 * PI * u * u / (ak * a2)).exp(), 0.0)
    })
    .real_part())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbComparison {
    pub epsilon: f64,
    pub sup_error: f64,
    pub sup_closed_form: f64,
    /// Largest |k_peak − S'(x)| in units of the k spacing, over window rows
    /// whose amplitude is at least 1e-3 of the maximum.
    pub peak_offset_cells: f64,
}

/// Closed form against the numerically computed SWT over `window`.
pub fn wkb_comparison(spec: &WkbSpec, p: &SmoothingParams, lg: &LadderGrid, window: &Window) -> Result<WkbComparison> {
    let (_, w) = ladder_swt(spec, p, lg)?;
    let cf = wkb_swt_closed_form(spec, p, &w.grid, window)?;
    let g = w.grid;
    let nk = g.k.n;
    let ks = g.k.points();
    let amax = g.x.points().iter().map(|&x| spec.amplitude.eval(x).powi(2)).fold(0.0, f64::max);
    let mut sup_error = 0.0_f64;
    let mut peak = 0.0_f64;
    for (r, x) in g.x.points().into_iter().enumerate() {
        if x < window.x.0 || x > window.x.1 {
            continue;
        }
        let row = &w.values[r * nk..(r + 1) * nk];
        for (j, &k) in ks.iter().enumerate() {
            if window.contains(x, k) {
                sup_error = sup_error.max((row[j] - cf.values[r * nk + j]).norm());
            }
        }
        if spec.amplitude.eval(x).powi(2) >= 1e-3 * amax {
            let jmax = (0..nk).max_by(|&a, &b| row[a].re.total_cmp(&row[b].re)).unwrap_or(0);
            peak = peak.max((ks[jmax] - spec.phase.ds(x)).abs() / g.k.spacing());
        }
    }
    Ok(WkbComparison { epsilon: spec.epsilon, sup_error, sup_closed_form: cf.sup(), peak_offset_cells: peak })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    /// min over bins of (bound − |F w|)/‖f‖².
    pub fourier_margin: f64,
    /// min over sampled translations of (bound − sup|w(x+iy,k+iz)|)/bound.
    pub translation_margin: f64,
}

impl DecayReport {
    pub fn holds(&self) -> bool {
        self.fourier_margin >= 0.0 && self.translation_margin >= 0.0
    }
}

/// Checks |F w| ≤ ‖f‖²G(1+1e-6) + 1e-9‖f‖² and
/// |w(x+iy,k+iz)| ≤ 2‖f‖²/(εσxσk)·exp((2π/ε)(y²/σx²+z²/σk²)) for y, z ∈ {0, ±√ε/2, ±√ε}.
pub fn decay_certificate(w: &PhaseField, f_norm: f64, p: &SmoothingParams) -> DecayReport {
    let g = w.grid;
    let (xx, kk) = (g.xx(), g.kk());
    let nk = g.k.n;
    let n2 = f_norm * f_norm;
    let spec = w.spectrum();
    if n2 == 0.0 {
        let zero = grid::sup_abs(&spec) == 0.0;
        let m = if zero { 0.0 } else { -f64::INFINITY };
        return DecayReport { fourier_margin: m, translation_margin: m };
    }
    let fourier_margin = spec
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let gm = p.multiplier(xx.point(i / nk), kk.point(i % nk));
            (n2 * gm * (1.0 + 1e-6) + 1e-9 * n2 - v.norm()) / n2
        })
        .reduce(|| f64::INFINITY, f64::min);
    let range = crate::dynamics::RANGE_FLOOR;
    let r = p.epsilon.sqrt();
    let shifts = [-r, -0.5 * r, 0.0, 0.5 * r, r];
    let base = 2.0 * n2 / (p.epsilon * (p.sigma_x2 * p.sigma_k2).sqrt());
    let mut translation_margin = f64::INFINITY;
    for &y in &shifts {
        for &z in &shifts {
            let mut s = spec.clone();
            s.par_chunks_mut(nk).enumerate().for_each(|(i, row)| {
                let a = xx.point(i);
                for (j, v) in row.iter_mut().enumerate() {
                    let b = kk.point(j);
                    *v = if p.multiplier(a, b) < range {
                        C64::new(0.0, 0.0)
                    } else {
                        *v * (-2.0 * PI * (a * y + b * z)).exp()
                    };
                }
            });
            let sup = grid::sup_abs(&grid::inverse_2d(&g, &s));
            let bound = base * (2.0 * PI / p.epsilon * (y * y / p.sigma_x2 + z * z / p.sigma_k2)).exp();
            translation_margin = translation_margin.min((bound - sup) / bound);
        }
    }
    DecayReport { fourier_margin, translation_margin }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderReport {
    pub epsilon: f64,
    pub sup_residual: f64,
    pub weak_residual: f64,
    pub sup_wigner: f64,
}

/// Gaussian test function e^{-π((x-x0)² + (k-k0)²)/s²} for weak pairings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub x0: f64,
    pub k0: f64,
    pub width: f64,
}

impl TestFunction {
    pub fn eval(&self, x: f64, k: f64) -> f64 {
        (-PI * ((x - self.x0).powi(2) + (k - self.k0).powi(2)) / (self.width * self.width)).exp()
    }
}

/// Unsmoothed residual W[Vf,f] − V·W + (ε/4πi)V'·∂kW, in sup norm and paired
/// against `phi`.
pub fn first_order_wigner_comparison(v: &Coef, f: &ComplexField1D, epsilon: f64, phi: &TestFunction) -> Result<FirstOrderReport> {
    let vf = match v {
        Coef::Sampled(c) => on_grid(c, &f.grid)?,
        c => c.sample(f.grid)?,
    };
    require_real(&vf, "potential")?;
    let w = wigner_transform(f, f, epsilon)?;
    let wv = wigner_transform(&vf.zip_with(f, |a, b| a * b)?, f, epsilon)?;
    let g = w.grid;
    let nk = g.k.n;
    let mut s = grid::along_k(&g, &w.values, Direction::Forward);
    let kk = g.kk();
    let tpi = C64::new(0.0, 2.0 * PI);
    s.par_chunks_mut(nk).for_each(|row| {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= tpi * kk.point(j);
        }
    });
    let dkw = grid::along_k(&g, &s, Direction::Inverse);
    let vx = on_grid(&vf, &g.x)?;
    let dvx = on_grid(&vf.derivative(1), &g.x)?;
    let c1 = C64::new(epsilon, 0.0) / C64::new(0.0, 4.0 * PI);
    let ks = g.k.points();
    let xs = g.x.points();
    let mut sup = 0.0_f64;
    let mut pair = C64::new(0.0, 0.0);
    for r in 0..g.x.n {
        for j in 0..nk {
            let i = r * nk + j;
            let res = wv.values[i] - vx.values[r] * w.values[i] + c1 * dvx.values[r] * dkw[i];
            sup = sup.max(res.norm());
            pair += res * phi.eval(xs[r], ks[j]);
        }
    }
    Ok(FirstOrderReport { epsilon, sup_residual: sup, weak_residual: (pair * g.cell()).norm(), sup_wigner: w.sup() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{gaussian_packet, Amplitude, Phase};
    use crate::wigner::swt;

    fn gauss(g: Grid1D, c: f64, a: f64) -> ComplexField1D {
        ComplexField1D::from_real_fn(g, |x| (-2.0 * PI * (x - c).powi(2) / (a * a)).exp())
    }

    #[test]
    fn smoothed_gaussian_widens() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        let (eps, sx) = (0.25, 0.9_f64);
        let vt = smoothed_potential(&gauss(g, 0.5, 1.2), eps, sx).unwrap();
        let s2 = 1.44 + eps * sx * sx;
        let want = ComplexField1D::from_real_fn(g, |x| 1.2 / s2.sqrt() * (-2.0 * PI * (x - 0.5).powi(2) / s2).exp());
        assert!(vt.rel_sup_err(&want) < 1e-10);
        let v = gauss(g, 0.5, 1.2);
        assert!((vt.integral() - v.integral()).norm() < 1e-12 * v.integral().norm());
        let a = smoothed_potential(&v, eps, sx).unwrap().derivative(1);
        let b = smooth(&v.derivative(1), (eps * sx * sx).sqrt());
        assert!(a.rel_sup_err(&b) < 1e-10);
    }

    #[test]
    fn smoothed_potential_converges_monotonically() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        let v = ComplexField1D::from_real_fn(g, |x| (-PI * x * x).exp() * (2.0 * PI * x).cos());
        let errs: Vec<f64> = (1..6)
            .map(|p| smoothed_potential(&v, 2f64.powi(-p), 1.0).unwrap().rel_sup_err(&v))
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn complex_potential_is_rejected() {
        let g = Grid1D::new(64, 8.0, 0.0).unwrap();
        let v = ComplexField1D::from_fn(g, |x| C64::new(0.0, (-x * x).exp()));
        assert!(smoothed_potential(&v, 0.5, 1.0).is_err());
    }

    fn packet_swt(eps: f64) -> (ComplexField1D, PhaseField, SmoothingParams) {
        let g = Grid1D::new(128, 8.0, 0.0).unwrap();
        let p = SmoothingParams::new(0.8, 0.8, eps).unwrap();
        let u = gaussian_packet(g, 0.2, 0.3, 1.0).unwrap();
        let w = swt(&u, &u, &p).unwrap();
        (gauss(g, 0.4, 1.5), w, p)
    }

    #[test]
    fn zeroth_order_is_multiplication() {
        let (v, w, p) = packet_swt(0.5);
        let e = expansion_apply(&v, &w, 0, &p).unwrap();
        let vt = smoothed_potential(&v, p.epsilon, p.sigma_x2.sqrt()).unwrap();
        let want = PhaseField::from_fn(w.grid, |_, _| C64::new(0.0, 0.0));
        let mut want = want;
        let nk = w.grid.k.n;
        for (i, v) in want.values.iter_mut().enumerate() {
            *v = vt.values[i / nk] * w.values[i];
        }
        assert!(e.rel_sup_err(&want) < 1e-12);
    }

    #[test]
    fn constant_potential_has_no_residual() {
        let (v, w, p) = packet_swt(0.5);
        let c = ComplexField1D::from_real_fn(v.grid, |_| 1.5);
        let exact = potential_term(&c, &w, &p, &ScatteringConfig::default()).unwrap();
        for n in 0..=MAX_ORDER {
            let e = expansion_apply(&c, &w, n, &p).unwrap();
            assert!(e.rel_sup_err(&exact) < 1e-12, "order {n}");
        }
    }

    #[test]
    fn expansion_is_linear_in_potential() {
        let (v, w, p) = packet_swt(0.5);
        let v2 = ComplexField1D::from_real_fn(v.grid, |x| (-PI * x * x).exp());
        let sum = v.zip_with(&v2, |a, b| 2.0 * a - b).unwrap();
        let a = expansion_apply(&sum, &w, 3, &p).unwrap();
        let mut b = expansion_apply(&v, &w, 3, &p).unwrap().scale(C64::new(2.0, 0.0));
        b.axpy(C64::new(-1.0, 0.0), &expansion_apply(&v2, &w, 3, &p).unwrap());
        assert!(a.rel_sup_err(&b) < 1e-12);
    }

    #[test]
    fn expansion_converges_to_potential_term() {
        let (v, w, p) = packet_swt(1.0 / 16.0);
        let v = ComplexField1D::from_real_fn(v.grid, |x| (0.5 * PI * x).cos());
        let exact = potential_term(&v, &w, &p, &ScatteringConfig::default()).unwrap();
        let errs: Vec<f64> = (0..=MAX_ORDER).map(|n| expansion_apply(&v, &w, n, &p).unwrap().rel_sup_err(&exact)).collect();
        assert!(errs.iter().any(|e| *e < 1e-6), "{errs:?}");
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn order_out_of_range() {
        let (v, w, p) = packet_swt(0.5);
        assert!(expansion_apply(&v, &w, MAX_ORDER + 1, &p).is_err());
        assert!(ExpansionConfig::new(2, vec![0.1, 0.2]).is_err());
        assert!(ExpansionConfig::new(2, vec![]).is_err());
        assert!(ExpansionConfig::new(2, vec![0.1, 0.05]).is_ok());
    }

    #[test]
    fn order_fit_recovers_power_and_skips_plateau() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let err: Vec<f64> = eps.iter().map(|e: &f64| 3.0 * e.powf(1.5)).collect();
        assert!((order_fit(&eps, &err, &[1.0; 4]).unwrap() - 1.5).abs() < 1e-12);
        let mut flat = err.clone();
        flat[3] = 1e-17;
        assert!((order_fit(&eps, &flat, &[1.0; 4]).unwrap() - 1.5).abs() < 1e-12);
    }

    fn linear_wkb(eps: f64) -> WkbSpec {
        WkbSpec {
            amplitude: Amplitude::Gaussian { height: 1.0, center: 0.0, width: 1.0 },
            phase: Phase::linear(0.25),
            epsilon: eps,
        }
    }

    #[test]
    fn linear_phase_closed_form_carries_density() {
        let p = SmoothingParams::new(1.0, 1.0, 0.05).unwrap();
        let pg = PhaseGrid::new(Grid1D::new(64, 4.0, 0.0).unwrap(), Grid1D::new(256, 2.0, 0.0).unwrap());
        let win = Window { x: (-2.0, 2.0), k: (-1.0, 1.0) };
        let cf = wkb_swt_closed_form(&linear_wkb(0.05), &p, &pg, &win).unwrap();
        let m = crate::wigner::marginal_k(&cf);
        for (x, v) in pg.x.points().into_iter().zip(&m.values) {
            let a = (-2.0 * PI * x * x).exp().powi(2);
            assert!((v.re - a).abs() < 1e-10, "{x}: {} vs {a}", v.re);
        }
    }

    #[test]
    fn closed_form_rejects_steep_curvature() {
        let p = SmoothingParams::new(1.0, 1.0, 0.05).unwrap();
        let pg = PhaseGrid::new(Grid1D::new(64, 4.0, 0.0).unwrap(), Grid1D::new(64, 2.0, 0.0).unwrap());
        let spec = WkbSpec { phase: Phase::quadratic(20.0, 0.0), ..linear_wkb(0.05) };
        let win = Window { x: (-1.0, 1.0), k: (-1.0, 1.0) };
        assert!(wkb_swt_closed_form(&spec, &p, &pg, &win).is_err());
    }

    #[test]
    fn wkb_peak_on_the_ridge() {
        let p = SmoothingParams::new(1.0, 1.0, 1.0 / 64.0).unwrap();
        let lg = LadderGrid { length: 8.0, center: 0.0, nx: 256, nk: 256 };
        let win = Window { x: (-1.0, 1.0), k: (-1.0, 1.5) };
        let r = wkb_comparison(&linear_wkb(1.0 / 64.0), &p, &lg, &win).unwrap();
        assert!(r.peak_offset_cells <= 1.0);
        assert!(r.sup_error < 0.05 * r.sup_closed_form);
    }

    #[test]
    fn decay_bounds_hold_for_unit_gaussian() {
        let g = Grid1D::new(128, 16.0, 0.0).unwrap();
        let p = SmoothingParams::new(0.8, 0.8, 1.0).unwrap();
        let u = gaussian_packet(g, 0.5, 0.5, 1.0).unwrap();
        let n = u.norm_sq().sqrt();
        let u = u.map(|v| v / n);
        let w = swt(&u, &u, &p).unwrap();
        let r = decay_certificate(&w, 1.0, &p);
        assert!(r.holds(), "{r:?}");
        let z = PhaseField::zeros(w.grid);
        assert!(decay_certificate(&z, 0.0, &p).holds());
        // a field far above the bound is flagged
        let big = w.scale(C64::new(100.0, 0.0));
        assert!(!decay_certificate(&big, 1.0, &p).holds());
    }

    #[test]
    fn first_order_residual_vanishes_without_potential() {
        let g = Grid1D::new(128, 8.0, 0.0).unwrap();
        let f = crate::signals::wkb(&linear_wkb(0.25), g).unwrap();
        let phi = TestFunction { x0: 0.0, k0: 0.25, width: 1.0 };
        let r = first_order_wigner_comparison(&Coef::constant(0.0), &f, 0.25, &phi).unwrap();
        assert_eq!(r.sup_residual, 0.0);
        let r = first_order_wigner_comparison(&Coef::Gaussian { height: 1.0, center: 0.3, width: 1.0 }, &f, 0.25, &phi).unwrap();
        assert!(r.weak_residual < r.sup_residual);
    }
}
