//! Smoothed Wigner operators L̃ acting on phase-space fields, the potential
//! scattering term and the smoothed trace formula.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::calculus::{binom, hermite, horner, Coef, WeylSymbol, DEFAULT_FLOOR, GROWTH_CAP};
use crate::error::{Error, Result};
use crate::field::{ComplexField1D, PhaseField};
use crate::grid::{self, Grid1D};
use crate::wigner::SmoothingParams;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringConfig {
    /// |V̂(S)| below this fraction of sup|V̂| is skipped.
    pub s_truncation_tol: f64,
    /// Certificate floor for the input field.
    pub floor: f64,
    pub cross_check: bool,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        Self { s_truncation_tol: 1e-14, floor: DEFAULT_FLOOR, cross_check: false }
    }
}

impl ScatteringConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1e-6).contains(&self.s_truncation_tol) {
            return Err(Error::InvalidParam(format!(
                "s_truncation_tol = {} outside [0, 1e-6]",
                self.s_truncation_tol
            )));
        }
        Ok(())
    }
}

/// max |ŵ(X,K)| / (sup|ŵ| G(X,K)) over bins above `floor`·sup.
pub fn certificate_residual(w: &PhaseField, p: &SmoothingParams, floor: f64) -> f64 {
    residual_of(&w.grid, &w.spectrum(), p, floor)
}

fn residual_of(g: &crate::grid::PhaseGrid, s: &[C64], p: &SmoothingParams, floor: f64) -> f64 {
    let sup = grid::sup_abs(s);
    if sup == 0.0 {
        return 0.0;
    }
    let (xx, kk) = (g.xx(), g.kk());
    let nk = g.k.n;
    s.par_iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > floor * sup)
        .map(|(i, v)| {
            let (a, b) = (xx.point(i / nk), kk.point(i % nk));
            (v.norm().ln() - sup.ln() + 0.5 * PI * (p.ax() * a * a + p.ak() * b * b)).exp()
        })
        .reduce(|| 0.0, f64::max)
}

pub fn certify(w: &PhaseField, p: &SmoothingParams, floor: f64) -> Result<()> {
    let residual = certificate_residual(w, p, floor);
    if !(residual <= 1.0 / floor) {
        return Err(Error::Certificate { residual, limit: 1.0 / floor });
    }
    Ok(())
}

/// Spectral data shared by all terms of one application.
struct Ctx<'a> {
    w: &'a PhaseField,
    p: SmoothingParams,
    spec: Vec<C64>,
    xx: Grid1D,
    kk: Grid1D,
    bx: f64,
    bk: f64,
    cache: HashMap<(usize, usize), Vec<C64>>,
}

impl<'a> Ctx<'a> {
    fn new(w: &'a PhaseField, p: &SmoothingParams) -> Self {
        Self {
            w,
            p: *p,
            spec: w.spectrum(),
            xx: w.grid.xx(),
            kk: w.grid.kk(),
            bx: 0.5 * PI * p.ax(),
            bk: 0.5 * PI * p.ak(),
            cache: HashMap::new(),
        }
    }

    fn beta_s(&self, a: f64, b: f64) -> C64 {
        C64::new(-PI * self.p.ax() * a, -PI * self.p.epsilon * b)
    }

    fn beta_t(&self, a: f64, b: f64) -> C64 {
        C64::new(-PI * self.p.ak() * b, PI * self.p.epsilon * a)
    }

    /// IFFT2[β_S^i β_T^j ŵ]
    fn moment(&mut self, i: usize, j: usize) -> &Vec<C64> {
        if !self.cache.contains_key(&(i, j)) {
            let nk = self.w.grid.k.n;
            let mut s = self.spec.clone();
            let (xx, kk) = (self.xx, self.kk);
            let this = &*self;
            s.par_chunks_mut(nk).enumerate().for_each(|(r, row)| {
                let a = xx.point(r);
                for (c, v) in row.iter_mut().enumerate() {
                    let b = kk.point(c);
                    *v *= this.beta_s(a, b).powu(i as u32) * this.beta_t(a, b).powu(j as u32);
                }
            });
            let out = grid::inverse_2d(&self.w.grid, &s);
            self.cache.insert((i, j), out);
        }
        &self.cache[&(i, j)]
    }
}

fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

/// Bring a coefficient sampled elsewhere onto the phase-space x grid.
pub(crate) fn on_grid(f: &ComplexField1D, target: &Grid1D) -> Result<ComplexField1D> {
    if f.grid.same_as(target) {
        return Ok(f.clone());
    }
    let same_domain = (f.grid.length - target.length).abs() <= 1e-12 * target.length
        && (f.grid.center - target.center).abs() <= 1e-12 * target.length.max(1.0);
    if same_domain && f.grid.n > target.n && f.grid.n % target.n == 0 {
        let s = f.grid.n / target.n;
        return ComplexField1D::new(*target, f.values.iter().step_by(s).cloned().collect());
    }
    Err(Error::GridMismatch("coefficient grid does not align with the phase-space x grid".into()))
}

fn coef_on(c: &Coef, target: &Grid1D) -> Result<ComplexField1D> {
    match c {
        Coef::Sampled(f) => on_grid(f, target),
        other => other.sample(*target),
    }
}

/// x^p k^m part: (2πi)^{-(p+m)} ∂_S^p ∂_T^m Ψ at 0.
fn monomial(ctx: &mut Ctx, p: usize, m: usize, out: &mut [C64]) {
    let nk = ctx.w.grid.k.n;
    let xs = ctx.w.grid.x.points();
    let ks = ctx.w.grid.k.points();
    let pre = two_pi_i().powi(-((p + m) as i32));
    for a in 0..=p {
        for b in 0..=m {
            let (bx, bk) = (ctx.bx, ctx.bk);
            let ca = binom(p, a) * binom(m, b);
            let mom = ctx.moment(p - a, m - b);
            let hx: Vec<C64> = xs.iter().map(|&x| hermite(a, two_pi_i() * x, bx)).collect();
            let hk: Vec<C64> = ks.iter().map(|&k| hermite(b, two_pi_i() * k, bk)).collect();
            out.par_chunks_mut(nk).zip(mom.par_chunks(nk)).enumerate().for_each(|(r, (o, mr))| {
                for c in 0..nk {
                    o[c] += pre * ca * hx[r] * hk[c] * mr[c];
                }
            });
        }
    }
}

/// Convolution over on-grid S for c(x)k^m. `chat` multiplies ŵ as
/// chat(S)·e^{-b_x(s2·S² + 2SX)}; s2 = 0 when the Gaussian in S is already in chat.
fn sampled_term(
    ctx: &Ctx,
    chat: &[C64],
    s2: f64,
    m: usize,
    tol: f64,
    out: &mut [C64],
) {
    let g = ctx.w.grid;
    let (nx, nk) = (g.x.n, g.k.n);
    let ds = ctx.xx.spacing();
    let csup = grid::sup_abs(chat);
    if csup == 0.0 {
        return;
    }
    let retained: Vec<usize> = (0..nx).filter(|&i| chat[i].norm() > tol * csup).collect();
    let kpts = ctx.kk.points();
    let xpts = ctx.xx.points();
    let eps = ctx.p.epsilon;
    let cap = GROWTH_CAP.ln();
    // β_T^q ŵ for q = 0..m
    let powers: Vec<Vec<C64>> = (0..=m)
        .map(|q| {
            let mut s = ctx.spec.clone();
            if q > 0 {
                s.par_chunks_mut(nk).enumerate().for_each(|(r, row)| {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v *= ctx.beta_t(xpts[r], kpts[c]).powu(q as u32);
                    }
                });
            }
            s
        })
        .collect();
    let phases: Vec<Vec<C64>> = retained
        .iter()
        .map(|&si| {
            let sv = xpts[si];
            kpts.iter().map(|&b| C64::from_polar(1.0, -PI * eps * b * sv)).collect()
        })
        .collect();
    let half = (nx / 2) as i64;
    let accs: Vec<Vec<C64>> = powers
        .iter()
        .map(|pw| {
            let mut acc = vec![ZERO; nx * nk];
            acc.par_chunks_mut(nk).enumerate().for_each(|(t, row)| {
                for (ri, &si) in retained.iter().enumerate() {
                    let src = t as i64 - (si as i64 - half);
                    if src < 0 || src >= nx as i64 {
                        continue;
                    }
                    let src = src as usize;
                    let sv = xpts[si];
                    let e = -ctx.bx * (s2 * sv * sv + 2.0 * sv * xpts[src]);
                    if e > cap {
                        continue;
                    }
                    let wgt = chat[si] * ds * e.exp();
                    let srow = &pw[src * nk..(src + 1) * nk];
                    let ph = &phases[ri];
                    for c in 0..nk {
                        row[c] += wgt * ph[c] * srow[c];
                    }
                }
            });
            grid::inverse_2d(&g, &acc)
        })
        .collect();
    let ks = g.k.points();
    let pre = two_pi_i().powi(-(m as i32));
    for r in 0..=m {
        let hk: Vec<C64> = ks.iter().map(|&k| hermite(r, two_pi_i() * k, ctx.bk)).collect();
        let acc = &accs[m - r];
        let cr = binom(m, r);
        out.par_chunks_mut(nk).zip(acc.par_chunks(nk)).for_each(|(o, a)| {
            for c in 0..nk {
                o[c] += pre * cr * hk[c] * a[c];
            }
        });
    }
}

fn bandlimited_term(ctx: &Ctx, u: f64, poly: &[C64], rate: C64, out: &mut [C64]) {
    let g = ctx.w.grid;
    let nk = g.k.n;
    let t0 = rate / two_pi_i();
    let (bx, bk) = (ctx.bx, ctx.bk);
    let cap = GROWTH_CAP.ln();
    let xpts = ctx.xx.points();
    let kpts = ctx.kk.points();
    let xs = g.x.points();
    let ks = g.k.points();
    let deg = poly.len().saturating_sub(1);
    let moments: Vec<Vec<C64>> = (0..=deg)
        .map(|q| {
            let mut s = ctx.spec.clone();
            s.par_chunks_mut(nk).enumerate().for_each(|(r, row)| {
                for (c, v) in row.iter_mut().enumerate() {
                    let (a, b) = (xpts[r], kpts[c]);
                    let bt = ctx.beta_t(a, b);
                    let e = u * ctx.beta_s(a, b) - bx * u * u + t0 * bt;
                    *v = if e.re > cap { ZERO } else { *v * e.exp() * bt.powu(q as u32) };
                }
            });
            grid::inverse_2d(&g, &s)
        })
        .collect();
    for (m, &pm) in poly.iter().enumerate() {
        if pm == ZERO {
            continue;
        }
        let pre = pm * two_pi_i().powi(-(m as i32));
        for r in 0..=m {
            let hk: Vec<C64> = ks
                .iter()
                .map(|&k| {
                    hermite(r, two_pi_i() * k - 2.0 * bk * t0, bk) * (two_pi_i() * t0 * k - bk * t0 * t0).exp()
                })
                .collect();
            let cr = binom(m, r);
            let mom = &moments[m - r];
            out.par_chunks_mut(nk).zip(mom.par_chunks(nk)).enumerate().for_each(|(i, (o, mr))| {
                let ex = C64::from_polar(1.0, 2.0 * PI * u * xs[i]);
                for c in 0..nk {
                    o[c] += pre * cr * ex * hk[c] * mr[c];
                }
            });
        }
    }
}

/// L̃w for the ε-scaled smoothed Wigner calculus: L̃ W̃[f,g] = W̃[Lf, g].
pub fn apply_swigner(l: &WeylSymbol, w: &PhaseField, p: &SmoothingParams, cfg: &ScatteringConfig) -> Result<PhaseField> {
    l.validate()?;
    p.validate()?;
    cfg.validate()?;
    certify(w, p, cfg.floor)?;
    let mut ctx = Ctx::new(w, p);
    let mut out = vec![ZERO; w.grid.len()];
    match l {
        WeylSymbol::Bandlimited { modes, support } => {
            if *support >= w.grid.x.nyquist() {
                return Err(Error::UnderResolved("symbol support beyond the x Nyquist bound".into()));
            }
            for mode in modes {
                if mode.profile.gauss != 0.0 {
                    return Err(Error::UnsupportedSymbol(
                        "phase-space application needs k-profiles of polynomial-exponential type".into(),
                    ));
                }
                bandlimited_term(&ctx, mode.u, &mode.profile.poly, mode.profile.rate, &mut out);
            }
        }
        _ => {
            let cs = l.k_coefs().unwrap();
            for (m, c) in cs.iter().enumerate() {
                match c {
                    Coef::Poly(a) => {
                        for (pw, &ap) in a.iter().enumerate() {
                            if ap == ZERO {
                                continue;
                            }
                            let mut part = vec![ZERO; out.len()];
                            monomial(&mut ctx, pw, m, &mut part);
                            for (o, v) in out.iter_mut().zip(&part) {
                                *o += ap * v;
                            }
                        }
                    }
                    other => {
                        let chat = coef_on(other, &w.grid.x)?.spectrum();
                        sampled_term(&ctx, &chat, 1.0, m, cfg.s_truncation_tol, &mut out);
                    }
                }
            }
        }
    }
    PhaseField::new(w.grid, out)
}

/// ∫V̂(S)e^{2πiSx-(επ/2)σx²S²} w(x + iεσx²S/2, k - εS/2) dS.
pub fn potential_term(v: &ComplexField1D, w: &PhaseField, p: &SmoothingParams, cfg: &ScatteringConfig) -> Result<PhaseField> {
    p.validate()?;
    cfg.validate()?;
    certify(w, p, cfg.floor)?;
    let ctx = Ctx::new(w, p);
    let chat = on_grid(v, &w.grid.x)?.spectrum();
    let mut out = vec![ZERO; w.grid.len()];
    sampled_term(&ctx, &chat, 1.0, 0, cfg.s_truncation_tol, &mut out);
    PhaseField::new(w.grid, out)
}

/// Same term driven by the already smoothed potential F = Φ_{√εσx}V.
pub fn potential_term_smoothed(
    f: &ComplexField1D,
    w: &PhaseField,
    p: &SmoothingParams,
    cfg: &ScatteringConfig,
) -> Result<PhaseField> {
    p.validate()?;
    cfg.validate()?;
    let ctx = Ctx::new(w, p);
    let chat = on_grid(f, &w.grid.x)?.spectrum();
    let mut out = vec![ZERO; w.grid.len()];
    sampled_term(&ctx, &chat, 0.0, 0, cfg.s_truncation_tol, &mut out);
    PhaseField::new(w.grid, out)
}

fn require_observable(m: &WeylSymbol) -> Result<()> {
    match m {
        WeylSymbol::Potential(_) | WeylSymbol::PolyK(_) => Ok(()),
        _ => Err(Error::UnsupportedSymbol("observables take potential or k-polynomial symbols".into())),
    }
}

/// ∫∫ M̃ W̃ dx dk.
pub fn smoothed_observable(m: &WeylSymbol, w: &PhaseField, p: &SmoothingParams) -> Result<C64> {
    require_observable(m)?;
    Ok(apply_swigner(m, w, p, &ScatteringConfig::default())?.integral())
}

/// Hermitian part of M̃W̃, the phase-space resolved observable.
pub fn observable_density(m: &WeylSymbol, w: &PhaseField, p: &SmoothingParams) -> Result<PhaseField> {
    require_observable(m)?;
    Ok(apply_swigner(m, w, p, &ScatteringConfig::default())?.real_part())
}

/// Evaluate a polynomial coefficient at x (used by observables on wavefunctions).
pub fn eval_poly(c: &[C64], x: f64) -> C64 {
    horner(c, C64::new(x, 0.0))
}
