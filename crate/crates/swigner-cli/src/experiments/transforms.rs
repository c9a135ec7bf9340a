use num_complex::Complex64 as C64;
use swigner::calculus::smooth;
use swigner::wigner::{marginal_k, marginal_x, spectrogram, swt};
use swigner::ComplexField1D;

use super::common::{grid, max_diff, rel_l2, seeded_signals, smoothing};
use crate::{Config, Report, RunError, Table};

pub fn marginals(cfg: &Config, seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let p = smoothing(cfg)?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let mut table = Table::new("marginals", &["signal", "kind", "err_k_marginal", "err_x_marginal"]).log();
    let mut worst = 0.0_f64;
    for (i, (kind, u)) in seeded_signals(g, seed, cfg.usize("signals.count")?)?.into_iter().enumerate() {
        let w = swt(&u, &u, &p)?;
        // ∫W̃ dk = Φ_{√ax}|u|²
        let dens = u.map(|v| C64::new(v.norm_sqr(), 0.0));
        let want_x = smooth(&dens, p.ax().sqrt());
        let ek = rel_l2(&marginal_k(&w).values, &want_x.values);
        // ∫W̃ dx = Φ_{√ak} of (1/ε)|û(k/ε)|², sampled on the k grid
        let kg = w.grid.k;
        if kg.n != g.n || (kg.spacing() - p.epsilon * g.dual().spacing()).abs() > 1e-12 * kg.spacing() {
            return Err(RunError::Config("marginals needs a square layout (k = εX on the same grid)".into()));
        }
        let spec = u.spectrum();
        let rho = ComplexField1D::new(kg, spec.iter().map(|v| C64::new(v.norm_sqr() / p.epsilon, 0.0)).collect())?;
        let want_k = smooth(&rho, p.ak().sqrt());
        let ex = rel_l2(&marginal_x(&w).values, &want_k.values);
        worst = worst.max(ek).max(ex);
        let kind_id = match kind {
            "packet" => 0.0,
            "wkb" => 1.0,
            _ => 2.0,
        };
        table.push(vec![i as f64, kind_id, ek, ex]);
    }
    let mut r = Report::default();
    r.check("1", worst <= tol, format!("max relative L2 marginal error {worst:.3e} (tolerance {tol:e})"));
    r.tables.push(table);
    Ok(r)
}

pub fn husimi(cfg: &Config, seed: u64) -> Result<Report, RunError> {
    let (sx2, sk2) = (cfg.f64("smoothing.sigma_x2")?, cfg.f64("smoothing.sigma_k2")?);
    let product = (sx2 * sk2).sqrt();
    if (product - 1.0).abs() > 1e-12 {
        return Err(RunError::Config(format!("husimi needs critical smoothing σxσk = 1, got {product}")));
    }
    let g = grid(cfg)?;
    let p = smoothing(cfg)?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let floor = cfg.f64("acceptance.negativity")?;
    let mut table = Table::new("husimi", &["signal", "rel_sup_diff", "min_over_sup"]).log();
    let (mut worst, mut lowest) = (0.0_f64, f64::INFINITY);
    for (i, (_, u)) in seeded_signals(g, seed, cfg.usize("signals.count")?)?.into_iter().enumerate() {
        let a = swt(&u, &u, &p)?;
        let b = spectrogram(&u, &p)?;
        let sup = b.sup();
        let d = max_diff(&a.values, &b.values) / sup;
        let m = a.min_real() / sup;
        worst = worst.max(d);
        lowest = lowest.min(m);
        table.push(vec![i as f64, d, m]);
    }
    let mut r = Report::default();
    r.check(
        "2",
        worst <= tol && lowest >= -floor,
        format!("max |SWT - spectrogram|/sup = {worst:.3e} (tolerance {tol:e}), min SWT/sup = {lowest:.3e} (floor -{floor:e})"),
    );
    r.tables.push(table);
    Ok(r)
}
