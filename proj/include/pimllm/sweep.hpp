#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pimllm/cost.hpp"
#include "pimllm/engine.hpp"
#include "pimllm/hardware.hpp"
#include "pimllm/metrics.hpp"
#include "pimllm/systolic.hpp"
#include "pimllm/workload.hpp"

namespace pimllm::sweep {

/// One (model, context length, mode) result row.
struct RunRecord {
    metrics::SimReport report;
    systolic::Dataflow dataflow = systolic::Dataflow::OS;
    CostResult cost;
};

/// Simulates one tuple; the model's context_len is used as-is.
RunRecord run_one(const workload::ModelSpec& model, const HardwareSpec& hw, engine::ArchMode mode);

/// Cartesian product in (model, context length, mode) order of the inputs,
/// independent of `threads` (0 = hardware concurrency). A failing tuple aborts
/// the sweep with a std::runtime_error naming it.
std::vector<RunRecord> run_sweep(const std::vector<workload::ModelSpec>& models,
                                 const HardwareSpec& hw, const std::vector<std::int64_t>& ctx_lens,
                                 const std::vector<engine::ArchMode>& modes, unsigned threads = 0);

struct DataflowRow {
    systolic::Dataflow dataflow = systolic::Dataflow::OS;
    std::int64_t compute_cycles = 0;
    std::int64_t stall_cycles = 0;
    std::int64_t sram_bytes = 0;

    std::int64_t total_cycles() const { return compute_cycles + stall_cycles; }
};

/// TpuOnly cycles of one decode step under each of OS, WS and IS.
std::vector<DataflowRow> compare_dataflows(workload::ModelSpec model, const HardwareSpec& hw,
                                           std::int64_t context_len);

} // namespace pimllm::sweep
