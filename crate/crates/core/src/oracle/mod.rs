//! Independent references for the closed-form transfer function: a direct
//! linearized Maxwell–Bloch integration of the comb and a frequency-domain
//! z-ODE integration of the retrieval equations.

pub mod maxwell_bloch;
pub mod zode;

pub use maxwell_bloch::{
    backward_protocol, empirical_gamma, fourier_sum, simulate_backward_retrieval, simulate_storage, AtomGrid,
    EmpiricalGamma, EnergyBudget, FieldRecord, InputPulse, Retrieval,
};
pub use zode::{zode_gamma, zode_gamma_closed, ZODE_STEPS};
