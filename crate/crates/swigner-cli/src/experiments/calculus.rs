use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use swigner::calculus::{shifted_weyl_symbol, smooth, smoothed_apply, weyl_apply, KProfile, Mode, WeylSymbol};
use swigner::swcalc::{apply_swigner, ScatteringConfig};
use swigner::wigner::{swt, SmoothingParams};
use swigner::ComplexField1D;

use super::common::{grid, max_diff, seeded_signals};
use crate::{Config, Report, RunError, Table};

/// {x, x², k, k², xk, cos(2πx), Gaussian in x}
fn symbol_set() -> Vec<(&'static str, WeylSymbol)> {
    vec![
        ("x", WeylSymbol::x()),
        ("x2", WeylSymbol::x2()),
        ("k", WeylSymbol::k()),
        ("k2", WeylSymbol::k2()),
        ("xk", WeylSymbol::xk()),
        ("cos", WeylSymbol::cosine(1.0, 1.0)),
        ("gauss", WeylSymbol::gaussian_x(1.0, 0.3, 1.5)),
    ]
}

fn rel_sup(a: &ComplexField1D, b: &ComplexField1D) -> f64 {
    max_diff(&a.values, &b.values) / b.sup()
}

pub fn calculus_consistency(cfg: &Config, seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let sigma = cfg.f64("calculus.sigma")?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let lemma_tol = cfg.f64("acceptance.lemma_tolerance")?;
    let limit_tol = cfg.f64("acceptance.limit_tolerance")?;
    let tiny = cfg.f64("calculus.small_sigma")?;
    let signals = seeded_signals(g, seed, cfg.usize("signals.count")?)?;
    let symbols = symbol_set();

    let mut master = Table::new("master_identity", &["signal", "symbol", "rel_sup_err", "rel_sup_err_small_sigma"]).log();
    let (mut worst, mut worst_limit, mut worst_lemma) = (0.0_f64, 0.0_f64, 0.0_f64);
    let c = sigma * sigma / (4.0 * PI);
    for (i, (_, f)) in signals.iter().enumerate() {
        let w = smooth(f, sigma);
        for (j, (_, l)) in symbols.iter().enumerate() {
            // ΦLf = L̃Φf
            let lhs = smooth(&weyl_apply(l, f, 1.0)?, sigma);
            let e = rel_sup(&smoothed_apply(l, &w, sigma)?, &lhs);
            // σ → 0 recovers L
            let el = rel_sup(&smoothed_apply(l, f, tiny)?, &weyl_apply(l, f, 1.0)?);
            worst = worst.max(e);
            worst_limit = worst_limit.max(el);
            master.push(vec![i as f64, j as f64, e, el]);
        }
        // Φ(xf) = xΦf + σ²/(4π)(Φf)',  Φ(Df) = DΦf
        let xs = g.points();
        let xf = ComplexField1D::new(g, f.values.iter().zip(&xs).map(|(v, x)| v * x).collect())?;
        let dw = w.derivative(1);
        let want = ComplexField1D::new(g, w.values.iter().zip(&dw.values).zip(&xs).map(|((v, d), x)| v * x + d * c).collect())?;
        worst_lemma = worst_lemma.max(rel_sup(&smooth(&xf, sigma), &want));
        worst_lemma = worst_lemma.max(rel_sup(&smooth(&f.derivative(1), sigma), &dw));
    }

    // smoothed Wigner intertwining L̃ W̃[f,h] = W̃[Lf,h]
    let pg = grid_for(cfg, "swigner")?;
    let pairs = cfg.usize("swigner.pairs")?;
    let sw_tol = cfg.f64("acceptance.swigner_tolerance")?;
    let sw_signals = seeded_signals(pg, seed.wrapping_add(1), 2 * pairs)?;
    let mut inter = Table::new("intertwining", &["epsilon", "pair", "symbol", "rel_sup_err"]).log();
    let mut worst_sw = 0.0_f64;
    for eps in cfg.list("swigner.epsilons")? {
        let p = SmoothingParams::new(cfg.f64("swigner.sigma_x2")?, cfg.f64("swigner.sigma_k2")?, eps)?;
        for q in 0..pairs {
            let (f, h) = (&sw_signals[2 * q].1, &sw_signals[2 * q + 1].1);
            let w = swt(f, h, &p)?;
            for (j, (_, l)) in symbols.iter().enumerate() {
                let want = swt(&weyl_apply(l, f, eps)?, h, &p)?;
                let got = apply_swigner(l, &w, &p, &ScatteringConfig::default())?;
                let e = max_diff(&got.values, &want.values) / want.sup();
                worst_sw = worst_sw.max(e);
                inter.push(vec![eps, q as f64, j as f64, e]);
            }
        }
    }

    let mut r = Report::default();
    r.check(
        "3",
        worst <= tol && worst_lemma <= lemma_tol && worst_limit <= limit_tol,
        format!(
            "master identity {worst:.3e} (tol {tol:e}), polynomial lemma {worst_lemma:.3e} (tol {lemma_tol:e}), small-σ limit {worst_limit:.3e} (tol {limit_tol:e})"
        ),
    );
    r.check("5", worst_sw <= sw_tol, format!("intertwining {worst_sw:.3e} (tol {sw_tol:e})"));
    r.note(format!("symbol index: {}", symbols.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")));
    r.tables.push(master);
    r.tables.push(inter);
    Ok(r)
}

fn grid_for(cfg: &Config, section: &str) -> Result<swigner::Grid1D, RunError> {
    Ok(swigner::Grid1D::new(cfg.usize(&format!("{section}.n"))?, cfg.f64(&format!("{section}.length"))?, 0.0)?)
}

/// Band-limited symbols for the shifted-symbol check.
fn bandlimited_set() -> Vec<(&'static str, WeylSymbol)> {
    let one = C64::new(1.0, 0.0);
    let half = C64::new(0.5, 0.0);
    vec![
        ("cos", WeylSymbol::cosine(1.0, 1.0)),
        (
            "cos_k2",
            WeylSymbol::Bandlimited {
                modes: [0.5, -0.5]
                    .iter()
                    .map(|&u| Mode { u, profile: KProfile { poly: vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), half], gauss: 0.0, rate: C64::new(0.0, 0.0) } })
                    .collect(),
                support: 0.5,
            },
        ),
        (
            "wave_gauss_k",
            WeylSymbol::Bandlimited {
                modes: vec![Mode { u: 0.5, profile: KProfile { poly: vec![one, half], gauss: 0.3, rate: C64::new(0.0, 0.0) } }],
                support: 0.5,
            },
        ),
        (
            "chirp",
            WeylSymbol::Bandlimited {
                modes: vec![Mode { u: -0.25, profile: KProfile { poly: vec![one], gauss: 0.0, rate: C64::new(0.0, 0.4) } }],
                support: 0.25,
            },
        ),
    ]
}

pub fn sandwich_symbols(cfg: &Config, seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let sigma = cfg.f64("calculus.sigma")?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let symbols = bandlimited_set();
    let mut table = Table::new("shifted_symbol", &["signal", "symbol", "rel_sup_err"]).log();
    let mut worst = 0.0_f64;
    for (i, (_, f)) in seeded_signals(g, seed, cfg.usize("signals.count")?)?.iter().enumerate() {
        let w = smooth(f, sigma);
        for (j, (_, l)) in symbols.iter().enumerate() {
            // operator of L(x + iσ²k/2, k) applied to Φf against the sandwich ΦLΦ⁻¹
            let shifted = shifted_weyl_symbol(l, sigma)?;
            let a = weyl_apply(&shifted, &w, 1.0)?;
            let b = smoothed_apply(l, &w, sigma)?;
            let e = rel_sup(&a, &b);
            worst = worst.max(e);
            table.push(vec![i as f64, j as f64, e]);
        }
    }
    let mut r = Report::default();
    r.check("4", worst <= tol, format!("shifted symbol vs sandwich {worst:.3e} (tol {tol:e})"));
    r.note(format!("symbol index: {}", symbols.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")));
    r.tables.push(table);
    Ok(r)
}
