//! Figures of merit derived from simulated or reconstructed states.

mod assembly;
mod bloch;
mod fidelity;
mod rates;
mod report;

pub use assembly::{assemble_two_mode, entanglement_bound, AssembledState, ConditionalTomogramSet, EntanglementBound};
pub use bloch::{
    bloch_average, bloch_grid, bloch_input, mean_bloch_fidelity, mean_bloch_fidelity_with_origin, BlochPoint,
    BlochSummary,
};
pub use fidelity::{fidelity, fidelity_pure, fidelity_with_pure, fit_cat_amplitude, fit_coherent, AmplitudeFit};
pub use rates::{rates, RateParams, Rates};
pub use report::{write_bloch_csv, AnalysisReport};
