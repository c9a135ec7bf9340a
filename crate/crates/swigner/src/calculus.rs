//! Weyl symbols, the smoothing operator Φ and its certified inverse, Weyl
//! application and the smoothed (conjugated) operator ΦLΦ⁻¹.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::ComplexField1D;
use crate::grid::{self, Grid1D};

/// Default spectral floor below which Fourier samples are not inverted.
pub const DEFAULT_FLOOR: f64 = 1e-12;
/// Largest Gaussian ratio G(target)/G(source) a single term may carry.
pub const GROWTH_CAP: f64 = 1e6;
pub const MAX_DEGREE: usize = 8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// x-dependent coefficient of a symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Coef {
    /// Σ c_p x^p
    Poly(Vec<C64>),
    /// height · e^{-2π(x-center)²/width²}
    Gaussian { height: f64, center: f64, width: f64 },
    Sampled(ComplexField1D),
}

impl Coef {
    pub fn constant(c: f64) -> Self {
        Coef::Poly(vec![C64::new(c, 0.0)])
    }

    pub fn is_poly(&self) -> bool {
        matches!(self, Coef::Poly(_))
    }

    pub fn sample(&self, grid: Grid1D) -> Result<ComplexField1D> {
        match self {
            Coef::Poly(c) => Ok(ComplexField1D::from_fn(grid, |x| horner(c, C64::new(x, 0.0)))),
            Coef::Gaussian { height, center, width } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidParam("gaussian coefficient width must be positive".into()));
                }
                let f = ComplexField1D::from_real_fn(grid, |x| {
                    height * (-2.0 * PI * (x - center).powi(2) / (width * width)).exp()
                });
                f.check_decay("gaussian coefficient")?;
                Ok(f)
            }
            Coef::Sampled(f) => {
                if !f.grid.same_as(&grid) {
                    return Err(Error::GridMismatch("sampled coefficient lives on another grid".into()));
                }
                Ok(f.clone())
            }
        }
    }

    /// D^r c with D = ∂/(2πi).
    pub fn derivative_sampled(&self, r: usize, grid: Grid1D) -> Result<ComplexField1D> {
        match self {
            Coef::Poly(c) => Coef::Poly(poly_d(c, r)).sample(grid),
            _ => {
                let c = self.sample(grid)?;
                Ok(if r == 0 { c } else { c.fourier_multiply(|xx| C64::new(xx.powi(r as i32), 0.0)) })
            }
        }
    }

    fn is_real(&self) -> bool {
        match self {
            Coef::Poly(c) => c.iter().all(|v| v.im == 0.0),
            Coef::Gaussian { .. } => true,
            Coef::Sampled(f) => f.max_imag() <= 1e-12 * f.sup().max(1e-300),
        }
    }
}

/// k-profile poly(k)·e^{-γk² + rate·k} of a band-limited mode.
#[derive(Debug, Clone, PartialEq)]
pub struct KProfile {
    pub poly: Vec<C64>,
    pub gauss: f64,
    pub rate: C64,
}

impl KProfile {
    pub fn constant(c: C64) -> Self {
        Self { poly: vec![c], gauss: 0.0, rate: ZERO }
    }

    pub fn eval(&self, k: f64) -> C64 {
        horner(&self.poly, C64::new(k, 0.0)) * (self.rate * k - self.gauss * k * k).exp()
    }
}

/// One term e^{2πiux} a(k).
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub u: f64,
    pub profile: KProfile,
}

/// Weyl symbol L(x, k).
#[derive(Debug, Clone, PartialEq)]
pub enum WeylSymbol {
    /// V(x), real valued.
    Potential(Coef),
    /// Σ_m c_m(x) k^m.
    PolyK(Vec<Coef>),
    /// Σ e^{2πiux} a_u(k) with every |u| ≤ support.
    Bandlimited { modes: Vec<Mode>, support: f64 },
}

impl WeylSymbol {
    pub fn constant(c: f64) -> Self {
        WeylSymbol::Potential(Coef::constant(c))
    }
    pub fn x() -> Self {
        WeylSymbol::PolyK(vec![Coef::Poly(vec![ZERO, ONE])])
    }
    pub fn x2() -> Self {
        WeylSymbol::PolyK(vec![Coef::Poly(vec![ZERO, ZERO, ONE])])
    }
    pub fn k() -> Self {
        WeylSymbol::PolyK(vec![Coef::constant(0.0), Coef::constant(1.0)])
    }
    pub fn k2() -> Self {
        WeylSymbol::PolyK(vec![Coef::constant(0.0), Coef::constant(0.0), Coef::constant(1.0)])
    }
    pub fn xk() -> Self {
        WeylSymbol::PolyK(vec![Coef::constant(0.0), Coef::Poly(vec![ZERO, ONE])])
    }
    /// amp·cos(2π freq x)
    pub fn cosine(amp: f64, freq: f64) -> Self {
        let half = KProfile::constant(C64::new(0.5 * amp, 0.0));
        WeylSymbol::Bandlimited {
            modes: vec![Mode { u: freq, profile: half.clone() }, Mode { u: -freq, profile: half }],
            support: freq.abs(),
        }
    }
    pub fn gaussian_x(height: f64, center: f64, width: f64) -> Self {
        WeylSymbol::Potential(Coef::Gaussian { height, center, width })
    }

    /// Coefficients c_m(x) of the k-polynomial view, if any.
    pub fn k_coefs(&self) -> Option<Vec<Coef>> {
        match self {
            WeylSymbol::Potential(c) => Some(vec![c.clone()]),
            WeylSymbol::PolyK(cs) => Some(cs.clone()),
            WeylSymbol::Bandlimited { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeylSymbol::Potential(c) => {
                if !c.is_real() {
                    return Err(Error::UnsupportedSymbol("potential must be real valued".into()));
                }
            }
            WeylSymbol::PolyK(cs) => {
                if cs.is_empty() || cs.len() > MAX_DEGREE + 1 {
                    return Err(Error::UnsupportedSymbol(format!(
                        "k-degree {} outside 0..={MAX_DEGREE}",
                        cs.len() as i64 - 1
                    )));
                }
                for c in cs {
                    if let Coef::Poly(p) = c {
                        if p.len() > MAX_DEGREE + 1 {
                            return Err(Error::UnsupportedSymbol(format!("x-degree above {MAX_DEGREE}")));
                        }
                    }
                }
            }
            WeylSymbol::Bandlimited { modes, support } => {
                if !(support.is_finite() && *support >= 0.0) {
                    return Err(Error::UnsupportedSymbol("support bound must be finite".into()));
                }
                for m in modes {
                    if m.u.abs() > *support + 1e-12 {
                        return Err(Error::UnsupportedSymbol(format!(
                            "mode at u = {} outside declared support {support}",
                            m.u
                        )));
                    }
                    if m.profile.gauss < 0.0 || m.profile.poly.len() > MAX_DEGREE + 1 {
                        return Err(Error::UnsupportedSymbol("mode profile must decay and have degree ≤ 8".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn horner(c: &[C64], x: C64) -> C64 {
    c.iter().rev().fold(ZERO, |acc, &a| acc * x + a)
}

/// Coefficients of D^r p for D = ∂/(2πi).
fn poly_d(c: &[C64], r: usize) -> Vec<C64> {
    let mut p = c.to_vec();
    let s = C64::new(0.0, -1.0 / (2.0 * PI));
    for _ in 0..r {
        if p.len() <= 1 {
            return vec![ZERO];
        }
        p = p.iter().enumerate().skip(1).map(|(j, &a)| a * j as f64 * s).collect();
    }
    p
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// H_r(a, b) = d^r/dτ^r e^{aτ - bτ²} at τ = 0.
pub(crate) fn hermite(r: usize, a: C64, b: f64) -> C64 {
    let mut acc = ZERO;
    let mut j = 0;
    while 2 * j <= r {
        let coef = factorial(r) / (factorial(j) * factorial(r - 2 * j));
        acc += a.powu((r - 2 * j) as u32) * coef * (-b).powi(j as i32);
        j += 1;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, v| a * v as f64)
}

/// Φ_σ: multiplier e^{-(π/2)σ²X²}.
pub fn smooth(f: &ComplexField1D, sigma: f64) -> ComplexField1D {
    if sigma == 0.0 {
        return f.clone();
    }
    let s2 = sigma * sigma;
    f.fourier_multiply(|xx| C64::new((-0.5 * PI * s2 * xx * xx).exp(), 0.0))
}

/// Φ_σ by direct kernel quadrature with (√2/σ)e^{-2π(x-x')²/σ²}. O(n²).
pub fn smooth_kernel(f: &ComplexField1D, sigma: f64) -> ComplexField1D {
    if sigma == 0.0 {
        return f.clone();
    }
    let h = f.grid.spacing();
    let xs = f.grid.points();
    let norm = 2f64.sqrt() / sigma * h;
    ComplexField1D::from_fn(f.grid, |x| {
        xs.iter()
            .zip(&f.values)
            .map(|(&y, v)| v * (-2.0 * PI * (x - y).powi(2) / (sigma * sigma)).exp())
            .sum::<C64>()
            * norm
    })
}

/// Membership residual max |f̂(X)|e^{(π/2)σ²X²}/sup|f̂| over retained X.
pub fn certificate_residual(f: &ComplexField1D, sigma: f64, floor: f64) -> f64 {
    let s = f.spectrum();
    let d = f.grid.dual();
    let sup = grid::sup_abs(&s);
    if sup == 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    s.iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > floor * sup)
        .map(|(m, v)| (v.norm().ln() + 0.5 * PI * s2 * d.point(m).powi(2) - sup.ln()).exp())
        .fold(0.0, f64::max)
}

/// Errors unless `f` lies numerically in the range of Φ_σ.
pub fn certify(f: &ComplexField1D, sigma: f64, floor: f64) -> Result<()> {
    let residual = certificate_residual(f, sigma, floor);
    let limit = 1.0 / floor;
    if !(residual <= limit) {
        return Err(Error::Certificate { residual, limit });
    }
    Ok(())
}

/// Regularized Φ_σ⁻¹: multiplier e^{+(π/2)σ²X²} on bins above `floor`·sup, zero elsewhere.
pub fn desmooth(f: &ComplexField1D, sigma: f64, floor: f64) -> Result<ComplexField1D> {
    if sigma == 0.0 {
        return Ok(f.clone());
    }
    certify(f, sigma, floor)?;
    let mut s = f.spectrum();
    let sup = grid::sup_abs(&s);
    let d = f.grid.dual();
    let s2 = sigma * sigma;
    for (m, v) in s.iter_mut().enumerate() {
        if v.norm() > floor * sup {
            *v *= (0.5 * PI * s2 * d.point(m).powi(2)).exp();
        } else {
            *v = ZERO;
        }
    }
    Ok(ComplexField1D::from_spectrum(f.grid, &s))
}

fn check_support(l: &WeylSymbol, grid: &Grid1D) -> Result<()> {
    if let WeylSymbol::Bandlimited { support, .. } = l {
        if *support >= grid.nyquist() {
            return Err(Error::UnderResolved(format!(
                "symbol support {support} reaches the Nyquist bound {}",
                grid.nyquist()
            )));
        }
    }
    Ok(())
}

/// Lf for the ε-scaled Weyl quantization (k ↦ εD).
pub fn weyl_apply(l: &WeylSymbol, f: &ComplexField1D, epsilon: f64) -> Result<ComplexField1D> {
    l.validate()?;
    check_support(l, &f.grid)?;
    let g = f.grid;
    let mut out = ComplexField1D::zeros(g);
    match l {
        WeylSymbol::Bandlimited { modes, .. } => {
            let spec = f.spectrum();
            let d = g.dual();
            for mode in modes {
                let u = mode.u;
                let s: Vec<C64> =
                    spec.iter().enumerate().map(|(m, v)| v * mode.profile.eval(epsilon * (d.point(m) + 0.5 * u))).collect();
                let part = ComplexField1D::from_spectrum(g, &s);
                for ((o, v), x) in out.values.iter_mut().zip(&part.values).zip(g.points()) {
                    *o += v * C64::from_polar(1.0, 2.0 * PI * u * x);
                }
            }
        }
        _ => {
            // Weyl(c(x)k^m) = Σ_r C(m,r)(ε/2)^r (D^r c)(x)·(εD)^{m-r}
            let cs = l.k_coefs().unwrap();
            for (m, c) in cs.iter().enumerate() {
                for r in 0..=m {
                    let dc = c.derivative_sampled(r, g)?;
                    let j = (m - r) as i32;
                    let df = if j == 0 {
                        f.clone()
                    } else {
                        f.fourier_multiply(|xx| C64::new((epsilon * xx).powi(j), 0.0))
                    };
                    let w = binom(m, r) * (0.5 * epsilon).powi(r as i32);
                    for ((o, a), b) in out.values.iter_mut().zip(&dc.values).zip(&df.values) {
                        *o += a * b * w;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A g = x g + σ²/(4π) ∂g, the conjugate ΦxΦ⁻¹.
fn apply_a(g: &ComplexField1D, sigma: f64) -> ComplexField1D {
    let dg = g.derivative(1);
    let c = sigma * sigma / (4.0 * PI);
    let xs = g.grid.points();
    ComplexField1D {
        grid: g.grid,
        values: g.values.iter().zip(&dg.values).zip(xs).map(|((v, d), x)| v * x + d * c).collect(),
    }
}

fn poly_of_a(p: &[C64], g: &ComplexField1D, sigma: f64) -> ComplexField1D {
    let mut acc = ComplexField1D::zeros(g.grid);
    for &a in p.iter().rev() {
        acc = apply_a(&acc, sigma);
        for (o, v) in acc.values.iter_mut().zip(&g.values) {
            *o += a * v;
        }
    }
    acc
}

/// e^{-πσ²(uX + u²/2)} = G(X+u)/G(X), or None beyond the growth cap.
fn ratio(sigma2: f64, u: f64, xx: f64) -> Option<f64> {
    let e = -PI * sigma2 * (u * xx + 0.5 * u * u);
    if e > GROWTH_CAP.ln() {
        None
    } else {
        Some(e.exp())
    }
}

/// ΦLΦ⁻¹w evaluated without deconvolution.
pub fn smoothed_apply(l: &WeylSymbol, w: &ComplexField1D, sigma: f64) -> Result<ComplexField1D> {
    smoothed_apply_with(l, w, sigma, DEFAULT_FLOOR)
}

pub fn smoothed_apply_with(l: &WeylSymbol, w: &ComplexField1D, sigma: f64, floor: f64) -> Result<ComplexField1D> {
    l.validate()?;
    check_support(l, &w.grid)?;
    certify(w, sigma, floor)?;
    let g = w.grid;
    let d = g.dual();
    let s2 = sigma * sigma;
    let spec = w.spectrum();
    let mut out = ComplexField1D::zeros(g);
    match l {
        WeylSymbol::Bandlimited { modes, .. } => {
            for mode in modes {
                let u = mode.u;
                let s: Vec<C64> = spec
                    .iter()
                    .enumerate()
                    .map(|(m, v)| {
                        let xx = d.point(m);
                        match ratio(s2, u, xx) {
                            Some(r) => v * mode.profile.eval(xx + 0.5 * u) * r,
                            None => ZERO,
                        }
                    })
                    .collect();
                let part = ComplexField1D::from_spectrum(g, &s);
                for ((o, v), x) in out.values.iter_mut().zip(&part.values).zip(g.points()) {
                    *o += v * C64::from_polar(1.0, 2.0 * PI * u * x);
                }
            }
        }
        _ => {
            let cs = l.k_coefs().unwrap();
            let mut acc = vec![ZERO; g.n];
            let mut any_sampled = false;
            for (m, c) in cs.iter().enumerate() {
                if let Coef::Poly(p) = c {
                    for r in 0..=m {
                        let j = (m - r) as i32;
                        let dw = if j == 0 {
                            w.clone()
                        } else {
                            w.fourier_multiply(|xx| C64::new(xx.powi(j), 0.0))
                        };
                        let t = poly_of_a(&poly_d(p, r), &dw, sigma);
                        let wt = binom(m, r) * 0.5f64.powi(r as i32);
                        for (o, v) in out.values.iter_mut().zip(&t.values) {
                            *o += v * wt;
                        }
                    }
                    continue;
                }
                // on-grid modes S of ĉ: out̂(X+S) += ĉ(S)ΔS (X+S/2)^m G(X+S)/G(X) ŵ(X)
                any_sampled = true;
                let ch = c.sample(g)?.spectrum();
                let csup = grid::sup_abs(&ch);
                let ds = d.spacing();
                let n = g.n as i64;
                for (si, cv) in ch.iter().enumerate() {
                    if cv.norm() <= 1e-17 * csup {
                        continue;
                    }
                    let shift = si as i64 - n / 2;
                    let sv = d.point(si);
                    for (xi, wv) in spec.iter().enumerate() {
                        let ti = xi as i64 + shift;
                        if ti < 0 || ti >= n {
                            continue;
                        }
                        let xx = d.point(xi);
                        if let Some(r) = ratio(s2, sv, xx) {
                            acc[ti as usize] += cv * ds * r * (xx + 0.5 * sv).powi(m as i32) * wv;
                        }
                    }
                }
            }
            if any_sampled {
                let part = ComplexField1D::from_spectrum(g, &acc);
                for (o, v) in out.values.iter_mut().zip(&part.values) {
                    *o += v;
                }
            }
        }
    }
    Ok(out)
}

/// L(x + iσ²k/2, k) for a band-limited symbol.
pub fn shifted_weyl_symbol(l: &WeylSymbol, sigma: f64) -> Result<WeylSymbol> {
    l.validate()?;
    match l {
        WeylSymbol::Bandlimited { modes, support } => {
            let s2 = sigma * sigma;
            let modes = modes
                .iter()
                .map(|m| Mode {
                    u: m.u,
                    profile: KProfile { rate: m.profile.rate - PI * s2 * m.u, ..m.profile.clone() },
                })
                .collect();
            Ok(WeylSymbol::Bandlimited { modes, support: *support })
        }
        _ => Err(Error::UnsupportedSymbol("shifted symbol needs a band-limited symbol".into())),
    }
}
