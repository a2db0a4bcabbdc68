use serde::{Deserialize, Serialize};

use super::schedule::PipelineSchedule;
use crate::construct::ResourceCensus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub block_len: usize,
    pub depth: usize,
    pub llr_buffer_bits: usize,
    pub psul_bits: usize,
    pub f2: usize,
    pub g2: usize,
    pub xor: usize,
    pub f_clk_hz: f64,
    /// Coded bits per second: one frame per clock.
    pub throughput_bps: f64,
    pub latency_cycles: usize,
    pub latency_s: f64,
    pub power_w: Option<f64>,
    pub energy_per_bit_j: Option<f64>,
}

pub fn cost_report(
    schedule: &PipelineSchedule,
    census: &ResourceCensus,
    block_len: usize,
    f_clk_hz: f64,
    power_w: Option<f64>,
) -> CostReport {
    let t = census.total();
    let throughput = block_len as f64 * f_clk_hz;
    CostReport {
        block_len,
        depth: schedule.depth(),
        llr_buffer_bits: schedule.llr_buffer_bits(),
        psul_bits: schedule.psul_bits(),
        f2: t.f2,
        g2: t.g2,
        xor: t.xor,
        f_clk_hz,
        throughput_bps: throughput,
        latency_cycles: schedule.depth(),
        latency_s: schedule.depth() as f64 / f_clk_hz,
        power_w,
        energy_per_bit_j: power_w.map(|p| p / throughput),
    }
}
