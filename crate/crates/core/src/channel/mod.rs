//! Link-level Monte-Carlo harness.

mod lfsr;
mod link;
mod sim;

pub use lfsr::LfsrSource;
pub use link::{awgn, bpsk_map, ebno_to_sigma2, q_function, uncoded_ber};
pub use sim::{
    frame_rng, gather_llr_stats, reference_profile, run_montecarlo, run_montecarlo_with, simulate_uncoded, sweep_step,
    ErrorStats, PointStats, QuantMode, SimConfig, StepPoint, PROFILE_EBNO_DB, PROFILE_LOSS_BUDGET,
};
