//! Experiment bodies. Each takes the resolved config and a seed.

mod calculus;
mod common;
mod dynamics;
mod semiclassical;
mod transforms;

pub use calculus::{calculus_consistency, sandwich_symbols};
pub use dynamics::{decay_certificates, free_flow, hartree, nls, schrodinger, trace_observables};
pub use semiclassical::{semiclassical_order, wigner_vs_swt, wkb_asymptotics};
pub use transforms::{husimi, marginals};
