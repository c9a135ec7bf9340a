use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swigner::signals::{gaussian_packet, superpose, wkb, Amplitude, Phase, WkbSpec};
use swigner::wigner::SmoothingParams;
use swigner::{ComplexField1D, Grid1D};

use crate::{Config, RunError};

pub fn grid(cfg: &Config) -> Result<Grid1D, RunError> {
    Ok(Grid1D::new(cfg.usize("grid.n")?, cfg.f64("grid.length")?, 0.0)?)
}

pub fn smoothing(cfg: &Config) -> Result<SmoothingParams, RunError> {
    Ok(SmoothingParams::new(cfg.f64("smoothing.sigma_x2")?, cfg.f64("smoothing.sigma_k2")?, cfg.f64("smoothing.epsilon")?)?)
}

pub fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Seeded test signals cycling through packets, WKB states and superpositions.
/// Wavenumbers stay within an eighth of the Nyquist bound so every draw is resolved.
pub fn seeded_signals(g: Grid1D, seed: u64, count: usize) -> Result<Vec<(&'static str, ComplexField1D)>, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = g.nyquist() / 8.0;
    let xmax = g.length / 10.0;
    let packet = |rng: &mut ChaCha8Rng| {
        gaussian_packet(g, rng.gen_range(-xmax..xmax), rng.gen_range(-kmax..kmax), rng.gen_range(1.2..1.6))
    };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = match i % 3 {
            0 => ("packet", packet(&mut rng)?),
            1 => {
                let spec = WkbSpec {
                    amplitude: Amplitude::Gaussian {
                        height: 1.0,
                        center: rng.gen_range(-xmax..xmax),
                        width: rng.gen_range(1.2..1.5),
                    },
                    phase: Phase::quadratic(rng.gen_range(-0.2..0.2), rng.gen_range(-0.5 * kmax..0.5 * kmax)),
                    epsilon: 1.0,
                };
                ("wkb", wkb(&spec, g)?)
            }
            _ => {
                let a = packet(&mut rng)?;
                let b = packet(&mut rng)?;
                let wgt = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                ("superposition", superpose(&[a, b], &[C64::new(1.0, 0.0), wgt])?)
            }
        };
        out.push(s);
    }
    Ok(out)
}
