//! Smoothed Wigner dynamics for the Schrödinger, cubic NLS and Hartree
//! equations, and an independent split-step wavefunction solver.
//!
//! Time is measured so that the wavefunction obeys
//! u_t = (iε/2)u'' - (i/ε)V u, i.e. the Weyl symbol (1/ε)(2π²k² + V) times i.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::calculus::{smooth, Coef, WeylSymbol, DEFAULT_FLOOR, GROWTH_CAP};
use crate::error::{Error, Result};
use crate::field::{ComplexField1D, PhaseField};
use crate::grid::{self, Direction};
use crate::swcalc::{self, apply_swigner, on_grid, potential_term_smoothed, ScatteringConfig};
use crate::wigner::{marginal_k, swt_with, Layout, SmoothingParams};

/// Relative imaginary residue a real field may pick up in one step.
pub const STEP_REALNESS_TOL: f64 = 1e-8;
/// Spectral bins with G(X,K) below this are outside the smoothed range
/// (|F W̃| ≤ ‖f‖²G) and are cleared at every free half-step.
pub const RANGE_FLOOR: f64 = 1e-13;
/// Source bins with G below this are not transported: the shear multiplies
/// them by up to 1/G, which would lift round-off above 1e-9.
pub const SOURCE_FLOOR: f64 = 1e-6;
/// Fraction of the imaginary-axis stability interval of RK4 (2√2) used per substep.
const RK4_REACH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    /// External potential V₁.
    pub potential: Coef,
    /// Cubic or Hartree coupling; 0 gives the linear equation.
    pub beta: f64,
    /// Hartree kernel V₀; `None` with β ≠ 0 selects cubic NLS.
    pub hartree_kernel: Option<ComplexField1D>,
    pub smoothing: SmoothingParams,
    pub scattering: ScatteringConfig,
    pub layout: Layout,
    /// Store a snapshot every this many steps.
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Linear,
    Cubic,
    Hartree,
}

impl EvolutionConfig {
    pub fn model(&self) -> Model {
        match (self.beta != 0.0, self.hartree_kernel.is_some()) {
            (_, true) => Model::Hartree,
            (true, false) => Model::Cubic,
            (false, false) => Model::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_final >= self.dt) {
            return Err(Error::InvalidParam(format!("need dt > 0 and t_final >= dt, got {} and {}", self.dt, self.t_final)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParam("snapshot_every must be >= 1".into()));
        }
        if self.hartree_kernel.is_some() && self.beta == 0.0 {
            return Err(Error::InvalidParam("hartree kernel given with zero coupling".into()));
        }
        WeylSymbol::Potential(self.potential.clone()).validate()?;
        self.smoothing.validate()?;
        self.scattering.validate()
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Sampled snapshots and their times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<T>,
}

/// Exact free transport W̃ ↦ Φ[(Φ⁻¹W̃)(x - 2πtk, k)] via the sheared spectrum
/// G(X,K)/G(X,K+2πtX)·Ŵ̃(X,K+2πtX).
///
/// For real fields each bin is then clipped to the disk |Ŵ̃| ≤ ‖f‖²G(X,K).
/// The exact solution lies inside it, so the clip never moves a bin away from
/// the truth; it stops round-off from growing in the backward-parabolic
/// directions of the scattering stage.
pub fn free_step(w: &PhaseField, t: f64, p: &SmoothingParams) -> Result<PhaseField> {
    if t == 0.0 {
        return Ok(w.clone());
    }
    let g = w.grid;
    let nk = g.k.n;
    let (xx, kk) = (g.xx(), g.kk());
    let ks = g.k.points();
    let kmax = kk.nyquist();
    let ak = p.ak();
    let noise = -SOURCE_FLOOR.ln();
    let range = -RANGE_FLOOR.ln();
    // real fields are auto-transforms, so |FW̃| ≤ ‖f‖²G bounds every bin
    let bound = if w.real { w.integral().re.abs() } else { f64::INFINITY };
    let mut mixed = grid::along_x(&g, &w.values, Direction::Forward);
    let tk = grid::Transform::new(&g.k, &kk, Direction::Forward)?;
    mixed.par_chunks_mut(nk).enumerate().for_each(|(r, row)| {
        let c = 2.0 * PI * t * xx.point(r);
        for (v, &k) in row.iter_mut().zip(&ks) {
            *v *= C64::from_polar(1.0, -2.0 * PI * c * k);
        }
        tk.apply(row);
        for (j, v) in row.iter_mut().enumerate() {
            let b = kk.point(j);
            let base = 0.5 * PI * p.ax() * xx.point(r).powi(2);
            let target = base + 0.5 * PI * ak * b * b;
            let source = base + 0.5 * PI * ak * (b + c).powi(2);
            if r == 0 || j == 0 || (b + c).abs() >= kmax || source > noise || target > range {
                *v = C64::new(0.0, 0.0);
            } else {
                *v *= (source - target).exp();
                let lim = bound * (-target).exp();
                if v.norm() > lim {
                    *v *= lim / v.norm();
                }
            }
        }
    });
    let mut out = PhaseField::from_spectrum(g, &mixed);
    if w.real {
        let (im, re) = (out.max_imag(), out.max_real());
        if im > STEP_REALNESS_TOL * re {
            return Err(Error::Realness { im, re });
        }
        out = out.real_part();
    }
    Ok(out)
}

fn smoothed_nonlinear(w: &PhaseField, cfg: &EvolutionConfig) -> Result<Option<ComplexField1D>> {
    if cfg.beta == 0.0 {
        return Ok(None);
    }
    let m = marginal_k(w).map(|v| C64::new(v.re, 0.0));
    let f = match &cfg.hartree_kernel {
        None => m.map(|v| v * cfg.beta),
        Some(k0) => {
            let k0 = on_grid(k0, &m.grid)?;
            let s: Vec<C64> = k0.spectrum().iter().zip(m.spectrum()).map(|(a, b)| a * b * cfg.beta).collect();
            ComplexField1D::from_spectrum(m.grid, &s).map(|v| C64::new(v.re, 0.0))
        }
    };
    Ok(Some(f))
}

/// F = Ṽ₁ + (smoothed nonlinear potential), sampled on the phase-space x grid.
pub fn smoothed_forcing(w: &PhaseField, cfg: &EvolutionConfig) -> Result<ComplexField1D> {
    let sx = cfg.smoothing.ax().sqrt();
    let v1 = match &cfg.potential {
        Coef::Poly(c) => {
            // Φ maps polynomials to polynomials: Φ x^p = Σ E[(x+Z)^p], Z ~ N(0, σ²/(4π))
            let var = sx * sx / (4.0 * PI);
            let mut moments = vec![1.0];
            for j in 1..c.len() {
                moments.push(if j % 2 == 1 { 0.0 } else { moments[j - 2] * (j - 1) as f64 * var });
            }
            ComplexField1D::from_fn(w.grid.x, |x| {
                c.iter()
                    .enumerate()
                    .map(|(pw, a)| {
                        (0..=pw)
                            .map(|j| a * crate::calculus::binom(pw, j) * x.powi((pw - j) as i32) * moments[j])
                            .sum::<C64>()
                    })
                    .sum()
            })
        }
        other => {
            let v = match other {
                Coef::Sampled(f) => on_grid(f, &w.grid.x)?,
                c => c.sample(w.grid.x)?,
            };
            smooth(&v, sx)
        }
    };
    Ok(match smoothed_nonlinear(w, cfg)? {
        Some(f) => v1.zip_with(&f, |a, b| a + b)?,
        None => v1,
    })
}

/// -(2/ε) Re(i · PT) for a smoothed potential F.
pub fn scattering_rhs(w: &PhaseField, f: &ComplexField1D, p: &SmoothingParams, cfg: &ScatteringConfig) -> Result<PhaseField> {
    let pt = potential_term_smoothed(f, w, p, cfg)?;
    Ok(hermitian_rhs(&pt, p.epsilon))
}

fn hermitian_rhs(pt: &PhaseField, epsilon: f64) -> PhaseField {
    let s = -2.0 / epsilon;
    PhaseField {
        grid: pt.grid,
        values: pt.values.iter().map(|v| C64::new(-v.im * s, 0.0)).collect(),
        real: true,
    }
}

fn rhs(w: &PhaseField, cfg: &EvolutionConfig) -> Result<PhaseField> {
    let p = &cfg.smoothing;
    let mut pt = match &cfg.potential {
        Coef::Poly(c) if c.iter().all(|v| *v == C64::new(0.0, 0.0)) => PhaseField::zeros(w.grid),
        v1 => apply_swigner(&WeylSymbol::Potential(v1.clone()), w, p, &cfg.scattering)?,
    };
    if let Some(f) = smoothed_nonlinear(w, cfg)? {
        let nl = potential_term_smoothed(&f, w, p, &cfg.scattering)?;
        pt.axpy(C64::new(1.0, 0.0), &nl);
    }
    Ok(range_mask(&hermitian_rhs(&pt, p.epsilon), p))
}

/// Zero the spectral bins where G(X,K) < RANGE_FLOOR. Products with
/// non-periodic polynomials leak boundary round-off into every bin.
fn range_mask(w: &PhaseField, p: &SmoothingParams) -> PhaseField {
    let g = w.grid;
    let (xx, kk) = (g.xx(), g.kk());
    let nk = g.k.n;
    let range = -RANGE_FLOOR.ln();
    let mut s = w.spectrum();
    s.par_chunks_mut(nk).enumerate().for_each(|(r, row)| {
        let base = 0.5 * PI * p.ax() * xx.point(r).powi(2);
        for (j, v) in row.iter_mut().enumerate() {
            if r == 0 || j == 0 || base + 0.5 * PI * p.ak() * kk.point(j).powi(2) > range {
                *v = C64::new(0.0, 0.0);
            }
        }
    });
    let out = PhaseField::from_spectrum(g, &s);
    if w.real { out.real_part() } else { out }
}

fn combo(w: &PhaseField, a: f64, k: &PhaseField) -> PhaseField {
    let mut out = w.clone();
    out.axpy(C64::new(a, 0.0), k);
    out.real = true;
    out
}

/// Upper bound on the rate of the scattering stage over the whole grid.
///
/// The potential term is V(x + s) applied to w̃ with the Fourier-side shift
/// s = (ε/2)(iσx²X - K). Two bounds are taken and the smaller one kept:
///
/// - in the sup norm of the spectrum, mode e^{2πiSx} of V contributes at most
///   min(e^{2π|S||s|} - 1, e^{2π|S| Im s} + 1), with |X|, |K| capped by the
///   smoothed range and the factor capped by GROWTH_CAP like the term itself;
/// - in the norm sup|ŵ|/G the growth e^{-πa_x SX} cancels against G, so mode
///   S contributes |V̂(S)|, or |F̂(S)|e^{(π/2)a_x S²} for an already smoothed F.
///
/// Modes below the truncation tolerance are skipped, as in the term.
pub fn scattering_rate_bound(w: &PhaseField, cfg: &EvolutionConfig) -> Result<f64> {
    let p = &cfg.smoothing;
    let g = w.grid;
    let reach = |a: f64, nyq: f64| if a > 0.0 { nyq.min((2.0 * -RANGE_FLOOR.ln() / (PI * a)).sqrt()) } else { nyq };
    let (xr, kr) = (reach(p.ax(), g.xx().nyquist()), reach(p.ak(), g.kk().nyquist()));
    let imag = 0.5 * p.epsilon * p.sigma_x2 * xr;
    let delta = 0.5 * p.epsilon * (p.sigma_x2 * xr + kr);
    let xs = g.x.points();
    let tol = cfg.scattering.s_truncation_tol;
    let spectral = |f: &ComplexField1D, smoothed: bool| -> f64 {
        let s = f.spectrum();
        let d = f.grid.dual();
        let sup = grid::sup_abs(&s);
        let (mut plain, mut weighted) = (0.0, 0.0);
        for (m, v) in s.iter().enumerate() {
            let xx = d.point(m);
            if v.norm() <= tol * sup || xx == 0.0 {
                continue;
            }
            let u = 2.0 * PI * xx.abs();
            plain += v.norm() * ((u * delta).exp() - 1.0).min((u * imag).exp().min(GROWTH_CAP) + 1.0);
            weighted += v.norm() * if smoothed { (0.5 * PI * p.ax() * xx * xx).exp() } else { 1.0 };
        }
        d.spacing() * plain.min(weighted)
    };
    let mut rate = match &cfg.potential {
        Coef::Poly(c) => {
            let mut acc = 0.0;
            let mut deriv: Vec<C64> = c.clone();
            let mut fact = 1.0;
            for m in 1..c.len() {
                deriv = deriv.iter().enumerate().skip(1).map(|(j, a)| a * j as f64).collect();
                fact *= m as f64;
                let sup = xs.iter().map(|&x| crate::calculus::horner(&deriv, C64::new(x, 0.0)).norm()).fold(0.0, f64::max);
                acc += sup * delta.powi(m as i32) / fact;
            }
            acc
        }
        Coef::Sampled(f) => spectral(&on_grid(f, &g.x)?, false),
        c => spectral(&c.sample(g.x)?, false),
    };
    if let Some(f) = smoothed_nonlinear(w, cfg)? {
        rate += spectral(&f, true);
    }
    Ok(2.0 / p.epsilon * rate)
}

/// RK4 substeps of the scattering stage, sized from the rate bound.
fn scatter(w: &PhaseField, dt: f64, cfg: &EvolutionConfig) -> Result<PhaseField> {
    let lambda = scattering_rate_bound(w, cfg)?;
    let n = ((dt * lambda / RK4_REACH).ceil() as usize).max(1);
    let h = dt / n as f64;
    let mut out = w.clone();
    for _ in 0..n {
        out = scatter_rk4(&out, h, cfg)?;
    }
    Ok(out)
}

fn scatter_rk4(w: &PhaseField, dt: f64, cfg: &EvolutionConfig) -> Result<PhaseField> {
    let k1 = rhs(w, cfg)?;
    let k2 = rhs(&combo(w, 0.5 * dt, &k1), cfg)?;
    let k3 = rhs(&combo(w, 0.5 * dt, &k2), cfg)?;
    let k4 = rhs(&combo(w, dt, &k3), cfg)?;
    let mut out = w.clone();
    for (i, v) in out.values.iter_mut().enumerate() {
        let inc = k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i];
        *v = C64::new(v.re + dt / 6.0 * inc.re, 0.0);
    }
    out.real = true;
    Ok(out)
}

fn is_free(cfg: &EvolutionConfig) -> bool {
    cfg.beta == 0.0 && matches!(&cfg.potential, Coef::Poly(c) if c.iter().all(|v| *v == C64::new(0.0, 0.0)))
}

/// Strang splitting: half free flow, RK4 scattering, half free flow.
pub fn evolve(w0: &PhaseField, cfg: &EvolutionConfig) -> Result<Trajectory<PhaseField>> {
    cfg.validate()?;
    if !w0.real {
        return Err(Error::InvalidParam("initial field must be real".into()));
    }
    let p = cfg.smoothing;
    swcalc::certify(w0, &p, DEFAULT_FLOOR)?;
    let steps = cfg.steps();
    let dt = cfg.dt;
    let mut w = w0.clone();
    let mut traj = Trajectory { times: vec![0.0], states: vec![w.clone()] };
    let mass0 = w0.integral().re;
    for n in 1..=steps {
        if is_free(cfg) {
            w = free_step(&w, dt, &p)?;
        } else {
            w = free_step(&w, 0.5 * dt, &p)?;
            w = scatter(&w, dt, cfg)?;
            w = free_step(&w, 0.5 * dt, &p)?;
        }
        let t = n as f64 * dt;
        if n % cfg.snapshot_every == 0 || n == steps {
            let residual = swcalc::certificate_residual(&w, &p, cfg.scattering.floor);
            let mass = w.integral().re;
            if !(residual <= 1.0 / cfg.scattering.floor) || !mass.is_finite() {
                return Err(Error::Instability { t, detail: format!("certificate residual {residual:e}, mass {mass:e}") });
            }
            if (mass - mass0).abs() > 1e-3 * mass0.abs() {
                return Err(Error::Instability { t, detail: format!("mass drift {:e}", (mass - mass0) / mass0) });
            }
            traj.times.push(t);
            traj.states.push(w.clone());
        }
    }
    Ok(traj)
}

/// V_eff on the wavefunction grid.
fn oracle_potential(u: &ComplexField1D, v1: &ComplexField1D, cfg: &EvolutionConfig) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = v1.values.iter().map(|c| c.re).collect();
    if cfg.beta != 0.0 {
        let dens = u.map(|c| C64::new(c.norm_sqr(), 0.0));
        let nl = match &cfg.hartree_kernel {
            None => dens,
            Some(k0) => {
                k0.require_same_grid(u)?;
                let s: Vec<C64> = k0.spectrum().iter().zip(dens.spectrum()).map(|(a, b)| a * b).collect();
                ComplexField1D::from_spectrum(u.grid, &s)
            }
        };
        for (a, b) in v.iter_mut().zip(&nl.values) {
            *a += cfg.beta * b.re;
        }
    }
    Ok(v)
}

/// Strang split-step Fourier solver for u_t = (iε/2)u'' - (i/ε)V_eff u.
pub fn splitstep_oracle(u0: &ComplexField1D, cfg: &EvolutionConfig) -> Result<Trajectory<ComplexField1D>> {
    cfg.validate()?;
    let eps = cfg.smoothing.epsilon;
    let g = u0.grid;
    let spec = u0.spectrum();
    let d = g.dual();
    let top = (0..g.n).filter(|&m| d.point(m).abs() > 0.8 * g.nyquist()).fold(0.0_f64, |a, m| a.max(spec[m].norm()));
    if top > 1e-10 * grid::sup_abs(&spec) {
        return Err(Error::UnderResolved("initial spectrum reaches the Nyquist band".into()));
    }
    let v1 = match &cfg.potential {
        Coef::Sampled(f) => {
            f.require_same_grid(u0)?;
            f.clone()
        }
        c => c.sample(g)?,
    };
    let dt = cfg.dt;
    let kin: Vec<C64> = (0..g.n).map(|m| C64::from_polar(1.0, -2.0 * PI * PI * eps * d.point(m).powi(2) * dt)).collect();
    let mut u = u0.clone();
    let mut traj = Trajectory { times: vec![0.0], states: vec![u.clone()] };
    let half = |u: &mut ComplexField1D| -> Result<()> {
        let v = oracle_potential(u, &v1, cfg)?;
        for (c, vv) in u.values.iter_mut().zip(v) {
            *c *= C64::from_polar(1.0, -vv * 0.5 * dt / eps);
        }
        Ok(())
    };
    let steps = cfg.steps();
    for n in 1..=steps {
        half(&mut u)?;
        let s: Vec<C64> = u.spectrum().iter().zip(&kin).map(|(a, b)| a * b).collect();
        u = ComplexField1D::from_spectrum(g, &s);
        half(&mut u)?;
        if n % cfg.snapshot_every == 0 || n == steps {
            traj.times.push(n as f64 * dt);
            traj.states.push(u.clone());
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub rel_l2: f64,
    pub rel_sup: f64,
}

/// Per-snapshot distance between the phase-space trajectory and the SWT of the oracle.
pub fn compare(
    w_traj: &Trajectory<PhaseField>,
    u_traj: &Trajectory<ComplexField1D>,
    p: &SmoothingParams,
    layout: Layout,
) -> Result<Vec<CompareRow>> {
    if w_traj.times.len() != u_traj.times.len()
        || w_traj.times.iter().zip(&u_traj.times).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::InvalidParam("trajectories sampled at different times".into()));
    }
    w_traj
        .states
        .iter()
        .zip(&u_traj.states)
        .zip(&w_traj.times)
        .map(|((w, u), &t)| {
            let r = swt_with(u, u, p, layout)?;
            Ok(CompareRow { t, rel_l2: w.rel_l2_err(&r), rel_sup: w.rel_sup_err(&r) })
        })
        .collect()
}

/// Free Gaussian solution of u_t = (iε/2)u'' from e^{-2π(x-x0)²/a²}e^{2πik0x/ε}.
pub fn free_gaussian(grid: crate::grid::Grid1D, x0: f64, k0: f64, a: f64, eps: f64, t: f64) -> ComplexField1D {
    // spectrum of the initial datum in the variable X, evolved by e^{-2π²iεX²t}
    let c = a * a / 2.0;
    let xi0 = k0 / eps;
    ComplexField1D::from_fn(grid, |x| {
        // ∫ √c e^{-πc(X-ξ0)²} e^{-2πiX x0} e^{-2π²iεtX²} e^{2πiXx} dX
        let alpha = C64::new(PI * c, 2.0 * PI * PI * eps * t);
        let beta = C64::new(2.0 * PI * c * xi0, 2.0 * PI * (x - x0));
        let gamma = C64::new(-PI * c * xi0 * xi0, 2.0 * PI * xi0 * x0);
        let pre = c.sqrt() * (PI / alpha).sqrt();
        pre * (beta * beta / (4.0 * alpha) + gamma).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::signals::gaussian_packet;
    use crate::wigner::swt;

    fn params() -> SmoothingParams {
        SmoothingParams::new(0.8, 0.8, 1.0).unwrap()
    }

    fn cfg(potential: Coef, beta: f64, dt: f64, t_final: f64) -> EvolutionConfig {
        EvolutionConfig {
            dt,
            t_final,
            potential,
            beta,
            hartree_kernel: None,
            smoothing: params(),
            scattering: ScatteringConfig::default(),
            layout: Layout::square(128),
            snapshot_every: 1,
        }
    }

    #[test]
    fn free_gaussian_matches_packet_at_zero() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        let a = free_gaussian(g, 0.5, 1.0, 1.2, 1.0, 0.0);
        let b = gaussian_packet(g, 0.5, 1.0, 1.2).unwrap();
        assert!(a.rel_sup_err(&b) < 1e-12);
    }

    #[test]
    fn oracle_free_dispersion() {
        let g = Grid1D::new(512, 32.0, 0.0).unwrap();
        let u0 = gaussian_packet(g, -1.0, 0.5, 1.0).unwrap();
        let c = cfg(Coef::constant(0.0), 0.0, 0.01, 0.5);
        let tr = splitstep_oracle(&u0, &c).unwrap();
        let last = tr.states.last().unwrap();
        let want = free_gaussian(g, -1.0, 0.5, 1.0, 1.0, 0.5);
        assert!(last.rel_sup_err(&want) < 1e-8);
    }

    #[test]
    fn free_step_matches_swt_of_evolution() {
        // the packet spreads to width ~8 by t = 1, so the box must be wide
        let g = Grid1D::new(512, 64.0, 0.0).unwrap();
        let p = params();
        let u0 = gaussian_packet(g, -1.0, 0.5, 1.0).unwrap();
        let w0 = swt(&u0, &u0, &p).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let want = swt(&free_gaussian(g, -1.0, 0.5, 1.0, 1.0, t), &free_gaussian(g, -1.0, 0.5, 1.0, 1.0, t), &p).unwrap();
            let got = free_step(&w0, t, &p).unwrap();
            assert!(got.rel_sup_err(&want) < 1e-7, "{t}: {}", got.rel_sup_err(&want));
        }
        let a = free_step(&free_step(&w0, 0.2, &p).unwrap(), 0.3, &p).unwrap();
        let b = free_step(&w0, 0.5, &p).unwrap();
        assert!(a.rel_sup_err(&b) < 1e-7, "{}", a.rel_sup_err(&b));
        assert_eq!(free_step(&w0, 0.0, &p).unwrap(), w0);
    }

    #[test]
    fn scattering_constant_and_mass() {
        let g = Grid1D::new(128, 16.0, 0.0).unwrap();
        let p = params();
        let u0 = gaussian_packet(g, 0.3, 0.5, 1.0).unwrap();
        let w0 = swt(&u0, &u0, &p).unwrap();
        let c = ComplexField1D::from_real_fn(g, |_| 2.0);
        let r = scattering_rhs(&w0, &c, &p, &ScatteringConfig::default()).unwrap();
        assert!(r.sup() < 1e-12 * w0.sup());
        let v = smooth(&ComplexField1D::from_real_fn(g, |x| (2.0 * PI * x).cos()), p.ax().sqrt());
        let r = scattering_rhs(&w0, &v, &p, &ScatteringConfig::default()).unwrap();
        assert!(r.integral().norm() < 1e-9 * r.sup());
    }

    #[test]
    fn harmonic_closure() {
        let g = Grid1D::new(256, 16.0, 0.0).unwrap();
        let p = params();
        let u0 = gaussian_packet(g, 1.0, 0.0, 1.0).unwrap();
        let w0 = swt(&u0, &u0, &p).unwrap();
        let c = cfg(Coef::Poly(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0)]), 0.0, 0.01, 0.3);
        let c = EvolutionConfig { snapshot_every: 10, layout: Layout::square(256), ..c };
        let wt = evolve(&w0, &c).unwrap();
        let ut = splitstep_oracle(&u0, &c).unwrap();
        let rows = compare(&wt, &ut, &p, Layout::square(256)).unwrap();
        for r in &rows {
            assert!(r.rel_l2 < 1e-3, "{r:?}");
        }
        let m0 = wt.states[0].integral().re;
        let m1 = wt.states.last().unwrap().integral().re;
        assert!((m1 - m0).abs() < 1e-6 * m0);
    }
}
