use crate::experiments as ex;
use crate::{Config, Report, RunError};

pub type RunFn = fn(&Config, u64) -> Result<Report, RunError>;

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    /// The mathematical statement the experiment exercises.
    pub anchor: &'static str,
    pub criteria: &'static [&'static str],
    pub defaults: &'static str,
    pub run: RunFn,
}

impl Experiment {
    pub fn default_config(&self) -> Result<Config, RunError> {
        Config::parse(self.defaults)
    }
}

macro_rules! entry {
    ($name:literal, $desc:literal, $anchor:literal, [$($c:literal),*], $run:path) => {
        Experiment {
            name: $name,
            description: $desc,
            anchor: $anchor,
            criteria: &[$($c),*],
            defaults: include_str!(concat!("../configs/", $name, ".conf")),
            run: $run,
        }
    };
}

pub static REGISTRY: [Experiment; 13] = [
    entry!("marginals", "SWT marginals against smoothed position and spectral densities", "smoothed trace formula: marginals", ["1"], ex::marginals),
    entry!("husimi", "SWT against the spectrogram at critical smoothing", "critical smoothing: SWT is a Husimi function", ["2"], ex::husimi),
    entry!(
        "calculus-consistency",
        "smoothed symbol calculus and phase-space intertwining on seeded signals",
        "convolution-deconvolution sandwich and smoothed Wigner calculus",
        ["3", "5"],
        ex::calculus_consistency
    ),
    entry!("sandwich-symbols", "imaginary-shifted Weyl symbol against the sandwich", "Weyl symbol of the smoothed operator", ["4"], ex::sandwich_symbols),
    entry!("free-flow", "phase-space free propagator against evolved Gaussians", "free Schrödinger flow as a phase-space shear", ["6"], ex::free_flow),
    entry!("schrodinger", "linear closure, harmonic and cosine potentials", "smoothed Wigner equation with external potential", ["7"], ex::schrodinger),
    entry!("nls", "cubic NLS closure", "self-consistent smoothed Wigner equation, local nonlinearity", ["8-nls"], ex::nls),
    entry!("hartree", "Hartree closure with a Gaussian kernel", "self-consistent smoothed Wigner equation, convolution kernel", ["8-hartree"], ex::hartree),
    entry!("trace-observables", "quadratic observables from the SWT before and after evolution", "smoothed trace formula", ["9"], ex::trace_observables),
    entry!("semiclassical-order", "finite-order expansion residual rates on WKB data", "semiclassical finite-order expansion of the potential term", ["10"], ex::semiclassical_order),
    entry!("wkb-asymptotics", "closed-form SWT of WKB states", "asymptotic SWT of a WKB function", ["11"], ex::wkb_asymptotics),
    entry!("decay-certificates", "Fourier and imaginary-translation bounds on evolved fields", "uniform semiclassical estimates for smoothed Wigner distributions", ["12"], ex::decay_certificates),
    entry!("wigner-vs-swt", "weak versus uniform first-order residual of the plain Wigner calculus", "first-order Moyal expansion of the Wigner calculus", ["13"], ex::wigner_vs_swt),
];

pub fn find(name: &str) -> Result<&'static Experiment, RunError> {
    if let Some(e) = REGISTRY.iter().find(|e| e.name == name) {
        return Ok(e);
    }
    let best = REGISTRY
        .iter()
        .map(|e| (strsim::damerau_levenshtein(name, e.name), e.name))
        .min()
        .filter(|(d, _)| *d <= 4);
    let hint = best.map(|(_, n)| format!(", did you mean '{n}'?")).unwrap_or_default();
    Err(RunError::Config(format!("unknown experiment '{name}'{hint}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse() {
        for e in &REGISTRY {
            e.default_config().unwrap_or_else(|err| panic!("{}: {err}", e.name));
        }
    }

    #[test]
    fn each_criterion_has_one_owner() {
        let mut all: Vec<&str> = REGISTRY.iter().flat_map(|e| e.criteria.iter().copied()).collect();
        all.sort();
        let n = all.len();
        all.dedup();
        assert_eq!(n, all.len());
        assert_eq!(n, 14);
    }

    #[test]
    fn suggestion() {
        let msg = find("husimy").err().unwrap().to_string();
        assert!(msg.contains("husimi"), "{msg}");
        assert!(find("zzzzzzzzzzzz").err().unwrap().to_string().contains("unknown"));
    }
}
