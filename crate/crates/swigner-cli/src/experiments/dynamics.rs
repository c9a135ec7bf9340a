use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use swigner::calculus::{Coef, WeylSymbol};
use swigner::dynamics::{compare, evolve, free_gaussian, free_step, splitstep_oracle, EvolutionConfig, Trajectory};
use swigner::semiclassical::decay_certificate;
use swigner::signals::gaussian_packet;
use swigner::swcalc::{smoothed_observable, ScatteringConfig};
use swigner::wigner::{swt_with, Layout};
use swigner::{ComplexField1D, Grid1D, PhaseField};

use super::common::{grid, max_diff, rel_l2, smoothing};
use crate::{Config, Report, RunError, Table};

fn packet(cfg: &Config, g: Grid1D) -> Result<ComplexField1D, RunError> {
    Ok(gaussian_packet(g, cfg.f64("packet.x0")?, cfg.f64("packet.k0")?, cfg.f64("packet.width")?)?)
}

fn layout(g: Grid1D) -> Layout {
    Layout::square(g.n)
}

pub fn free_flow(cfg: &Config, _seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let p = smoothing(cfg)?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let (x0, k0, a) = (cfg.f64("packet.x0")?, cfg.f64("packet.k0")?, cfg.f64("packet.width")?);
    let u0 = gaussian_packet(g, x0, k0, a)?;
    let w0 = swt_with(&u0, &u0, &p, layout(g))?;
    let mut table = Table::new("free_flow", &["t", "rel_sup_err"]).log();
    let mut worst = 0.0_f64;
    for t in cfg.list("times")? {
        let ut = free_gaussian(g, x0, k0, a, p.epsilon, t);
        let want = swt_with(&ut, &ut, &p, layout(g))?;
        let got = free_step(&w0, t, &p)?;
        let e = max_diff(&got.values, &want.values) / want.sup();
        worst = worst.max(e);
        table.push(vec![t, e]);
    }
    let mut r = Report::default();
    r.check("6", worst <= tol, format!("free propagator vs SWT of free evolution {worst:.3e} (tol {tol:e})"));
    r.tables.push(table);
    Ok(r)
}

fn evolution(cfg: &Config, g: Grid1D, potential: Coef, beta: f64, kernel: Option<ComplexField1D>, dt: f64, t_final: f64) -> Result<EvolutionConfig, RunError> {
    Ok(EvolutionConfig {
        dt,
        t_final,
        potential,
        beta,
        hartree_kernel: kernel,
        smoothing: smoothing(cfg)?,
        scattering: ScatteringConfig::default(),
        layout: layout(g),
        snapshot_every: cfg.usize("evolution.snapshot_every")?,
    })
}

struct Closure {
    rows: Vec<(f64, f64, f64)>,
    drift: f64,
}

fn closure(u0: &ComplexField1D, c: &EvolutionConfig) -> Result<Closure, RunError> {
    let w0 = swt_with(u0, u0, &c.smoothing, c.layout)?;
    let wt = evolve(&w0, c)?;
    let ut = splitstep_oracle(u0, c)?;
    let rows = compare(&wt, &ut, &c.smoothing, c.layout)?.into_iter().map(|r| (r.t, r.rel_l2, r.rel_sup)).collect();
    let m0 = wt.states[0].integral().re;
    let drift = wt.states.iter().map(|w| (w.integral().re - m0).abs() / m0).fold(0.0, f64::max);
    Ok(Closure { rows, drift })
}

fn potentials(cfg: &Config, g: Grid1D) -> Result<Vec<(&'static str, Coef)>, RunError> {
    let c2 = cfg.f64("potential.harmonic")?;
    let (amp, freq) = (cfg.f64("potential.cosine_amplitude")?, cfg.f64("potential.cosine_frequency")?);
    Ok(vec![
        ("harmonic", Coef::Poly(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(c2, 0.0)])),
        ("cosine", Coef::Sampled(ComplexField1D::from_real_fn(g, |x| amp * (2.0 * PI * freq * x).cos()))),
    ])
}

pub fn schrodinger(cfg: &Config, _seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let u0 = packet(cfg, g)?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let drift_tol = cfg.f64("acceptance.mass_drift")?;
    let (slope_want, slope_band) = (cfg.f64("acceptance.slope")?, cfg.f64("acceptance.slope_band")?);
    let dt = cfg.f64("evolution.dt")?;
    let t_final = cfg.f64("evolution.t_final")?;
    let conv_dts = cfg.list("convergence.dts")?;
    let conv_t = cfg.f64("convergence.t_final")?;
    if conv_dts.len() < 3 || conv_dts.windows(2).any(|w| (w[0] / w[1] - 2.0).abs() > 1e-12) {
        return Err(RunError::Config("convergence.dts must be at least three values, each half the previous".into()));
    }
    let mut closure_t = Table::new("closure", &["potential", "t", "rel_l2", "rel_sup"]).log();
    let mut conv = Table::new("self_convergence", &["potential", "dt", "rel_l2_to_half_step"]).log();
    let mut r = Report::default();
    let (mut worst, mut drift, mut slopes) = (0.0_f64, 0.0_f64, Vec::new());
    for (j, (name, v)) in potentials(cfg, g)?.into_iter().enumerate() {
        let c = evolution(cfg, g, v.clone(), 0.0, None, dt, t_final)?;
        let out = closure(&u0, &c)?;
        for (t, l2, sup) in &out.rows {
            closure_t.push(vec![j as f64, *t, *l2, *sup]);
            worst = worst.max(*l2);
        }
        drift = drift.max(out.drift);
        // dt self-convergence: distances between successive halvings
        let w0 = swt_with(&u0, &u0, &c.smoothing, c.layout)?;
        let finals: Vec<PhaseField> = conv_dts
            .iter()
            .map(|&h| {
                let c = evolution(cfg, g, v.clone(), 0.0, None, h, conv_t)?;
                let c = EvolutionConfig { snapshot_every: usize::MAX, ..c };
                Ok(evolve(&w0, &c)?.states.pop().unwrap())
            })
            .collect::<Result<_, RunError>>()?;
        let d: Vec<f64> = finals.windows(2).map(|w| rel_l2(&w[0].values, &w[1].values)).collect();
        for (h, e) in conv_dts.iter().zip(&d) {
            conv.push(vec![j as f64, *h, *e]);
        }
        let s = (d[0] / d[d.len() - 1]).log2() / (d.len() - 1) as f64;
        r.note(format!("{name}: dt self-convergence slope {s:.3}, distances {d:?}"));
        slopes.push((name, s));
    }
    let slopes_ok = slopes.iter().all(|(_, s)| (s - slope_want).abs() <= slope_band);
    r.check(
        "7",
        worst <= tol && drift <= drift_tol && slopes_ok,
        format!(
            "max rel L2 {worst:.3e} (tol {tol:e}), mass drift {drift:.1e} (tol {drift_tol:e}), dt slopes {} (want {slope_want} ± {slope_band})",
            slopes.iter().map(|(n, s)| format!("{n} {s:.3}")).collect::<Vec<_>>().join(", ")
        ),
    );
    r.tables.push(closure_t);
    r.tables.push(conv);
    Ok(r)
}

fn nonlinear(cfg: &Config, id: &str, kernel: Option<ComplexField1D>) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let u0 = packet(cfg, g)?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let c = evolution(cfg, g, Coef::constant(0.0), cfg.f64("evolution.beta")?, kernel, cfg.f64("evolution.dt")?, cfg.f64("evolution.t_final")?)?;
    let out = closure(&u0, &c)?;
    let mut table = Table::new("closure", &["t", "rel_l2", "rel_sup"]).log();
    let mut worst = 0.0_f64;
    for (t, l2, sup) in &out.rows {
        table.push(vec![*t, *l2, *sup]);
        worst = worst.max(*l2);
    }
    let mut r = Report::default();
    r.check(id, worst <= tol, format!("max rel L2 {worst:.3e} (tol {tol:e}), mass drift {:.1e}", out.drift));
    r.tables.push(table);
    Ok(r)
}

pub fn nls(cfg: &Config, _seed: u64) -> Result<Report, RunError> {
    nonlinear(cfg, "8-nls", None)
}

pub fn hartree(cfg: &Config, _seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let (h, w) = (cfg.f64("kernel.height")?, cfg.f64("kernel.width")?);
    let k0 = Coef::Gaussian { height: h, center: 0.0, width: w }.sample(g)?;
    nonlinear(cfg, "8-hartree", Some(k0))
}

/// (name, symbol, direct ⟨u, Mu⟩ by quadrature on x or on the spectrum)
fn observables(u: &ComplexField1D, eps: f64) -> Vec<(&'static str, WeylSymbol, f64)> {
    let h = u.grid.spacing();
    let xs = u.grid.points();
    let s = u.spectrum();
    let d = u.grid.dual();
    let mass = u.norm_sq();
    let x2: f64 = u.values.iter().zip(&xs).map(|(v, x)| x * x * v.norm_sqr()).sum::<f64>() * h;
    let moment = |p: i32| -> f64 { s.iter().enumerate().map(|(m, v)| (eps * d.point(m)).powi(p) * v.norm_sqr()).sum::<f64>() * d.spacing() };
    let kinetic = WeylSymbol::PolyK(vec![Coef::constant(0.0), Coef::constant(0.0), Coef::constant(2.0 * PI * PI)]);
    vec![
        ("mass", WeylSymbol::constant(1.0), mass),
        ("momentum", WeylSymbol::k(), moment(1)),
        ("kinetic", kinetic, 2.0 * PI * PI * moment(2)),
        ("x2", WeylSymbol::x2(), x2),
    ]
}

pub fn trace_observables(cfg: &Config, _seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let p = smoothing(cfg)?;
    let u0 = packet(cfg, g)?;
    let tol = cfg.f64("acceptance.tolerance")?;
    let v = potentials(cfg, g)?.remove(0).1;
    let c = evolution(cfg, g, v, 0.0, None, cfg.f64("evolution.dt")?, cfg.f64("evolution.t_final")?)?;
    let ut = splitstep_oracle(&u0, &c)?;
    let wt = evolve(&swt_with(&u0, &u0, &p, c.layout)?, &c)?;
    let mut table = Table::new("observables", &["t", "observable", "direct", "trace_formula", "rel_err"]).log();
    let mut worst = 0.0_f64;
    let Trajectory { times, states } = ut;
    for (t, u) in [(times[0], &states[0]), (*times.last().unwrap(), states.last().unwrap())] {
        let w = swt_with(u, u, &p, c.layout)?;
        for (j, (_, m, direct)) in observables(u, p.epsilon).into_iter().enumerate() {
            let got = smoothed_observable(&m, &w, &p)?;
            let e = (got.re - direct).abs() / direct.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(e).max(got.im.abs() / direct.abs().max(f64::MIN_POSITIVE));
            table.push(vec![t, j as f64, direct, got.re, e]);
        }
    }
    let m0 = wt.states[0].integral().re;
    let drift = wt.states.iter().map(|w| (w.integral().re - m0).abs() / m0).fold(0.0, f64::max);
    let mut r = Report::default();
    r.check("9", worst <= tol, format!("max relative trace-formula error {worst:.3e} (tol {tol:e})"));
    r.note(format!("phase-space mass drift along the evolution {drift:.1e}"));
    r.note("observable index: mass, momentum, kinetic, x2".into());
    r.tables.push(table);
    Ok(r)
}

pub fn decay_certificates(cfg: &Config, _seed: u64) -> Result<Report, RunError> {
    let g = grid(cfg)?;
    let p = smoothing(cfg)?;
    let u0 = packet(cfg, g)?;
    let norm = u0.norm_sq().sqrt();
    let dt = cfg.f64("evolution.dt")?;
    let t = cfg.f64("evolution.t_final")?;
    let (kh, kw) = (cfg.f64("kernel.height")?, cfg.f64("kernel.width")?);
    let beta = cfg.f64("evolution.beta")?;
    let mut runs = potentials(cfg, g)?
        .into_iter()
        .map(|(n, v)| Ok((n, evolution(cfg, g, v, 0.0, None, dt, t)?)))
        .collect::<Result<Vec<_>, RunError>>()?;
    runs.push(("nls", evolution(cfg, g, Coef::constant(0.0), beta, None, dt, t)?));
    let kernel = Coef::Gaussian { height: kh, center: 0.0, width: kw }.sample(g)?;
    runs.push(("hartree", evolution(cfg, g, Coef::constant(0.0), beta, Some(kernel), dt, t)?));
    let mut table = Table::new("margins", &["model", "t", "fourier_margin", "translation_margin"]);
    let (mut fm, mut tm) = (f64::INFINITY, f64::INFINITY);
    let mut snapshots = 0;
    for (j, (_, c)) in runs.iter().enumerate() {
        let traj = evolve(&swt_with(&u0, &u0, &p, c.layout)?, c)?;
        for (t, w) in traj.times.iter().zip(&traj.states) {
            let d = decay_certificate(w, norm, &p);
            fm = fm.min(d.fourier_margin);
            tm = tm.min(d.translation_margin);
            snapshots += 1;
            table.push(vec![j as f64, *t, d.fourier_margin, d.translation_margin]);
        }
    }
    let mut r = Report::default();
    r.check(
        "12",
        fm >= 0.0 && tm >= 0.0,
        format!("over {snapshots} snapshots: min Fourier margin {fm:.3e}, min translation margin {tm:.3e} (both must be >= 0)"),
    );
    r.note(format!("model index: {}", runs.iter().map(|r| r.0).collect::<Vec<_>>().join(", ")));
    r.tables.push(table);
    Ok(r)
}

