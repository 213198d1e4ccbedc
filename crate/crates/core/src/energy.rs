use serde::{Deserialize, Serialize};

/// Energy per unit surface split into its terms. `tsallis` is the
/// `π Tr(G²)` penalty of the reduced Hartree-Fock model and zero for
/// Thomas-Fermi.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub tsallis: f64,
    pub hartree: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, tsallis: f64, hartree: f64) -> Self {
        Self {
            kinetic,
            tsallis,
            hartree,
            total: kinetic + tsallis + hartree,
        }
    }
}
