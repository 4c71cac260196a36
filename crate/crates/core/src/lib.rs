//! Simulator of an imperfect photonic CNOT gate built from a quantum-dot spin
//! in a double-sided microcavity.
//!
//! States are sparse maps from basis labels to complex amplitudes together
//! with a real global weight that carries probabilistic losses (switches,
//! cloner). Optical elements are [`ModeMap`]s acting on a subset of the
//! tensor factors.

pub mod cavity;
pub mod circuits;
pub mod config;
pub mod devices;
pub mod error;
pub mod fidelity;
pub mod reproduce;
pub mod state;
pub mod sweep;

pub use cavity::{cavity_coeffs, is_strong_coupling, qd_interact, CavityCoeffs, CavityParams};
pub use circuits::{
    baseline_cnot, eta1_as_printed, eta1_closed_form, eta_closed_form, optimized_cnot, Circuit,
    CnotInputs, DeviceErrorConfig, EtaCoefficients,
};
pub use config::{load_config, SimConfig, SweepGrid};
pub use devices::{
    clone_photon, switch_route, ClonerConfig, CpbsError, HwpError, SwitchCoeffs, F_UC,
};
pub use error::{Error, Result};
pub use fidelity::{
    average_fidelity, cnot_target, fidelity_single, success_probability, BranchConvention,
    EnsembleKind, FidelityMode, FidelityReport, InputEnsemble,
};
pub use reproduce::{reproduce, ReproduceReport, Target};
pub use state::{
    apply_mode_map, inner_product, make_state, project_spin, tensor, Amplitude, BasisLabel,
    CloneSlot, Dir, Factor, FactorSet, JointState, ModeMap, Photon, Pol, Spin,
};
pub use sweep::{run_sweep, sweep_coupling, sweep_err_psw, write_csv, SweepTable};
