#pragma once

#include <cstdint>
#include <map>
#include <string_view>

#include "pimllm/cost.hpp"
#include "pimllm/hardware.hpp"
#include "pimllm/workload.hpp"

namespace pimllm::engine {

enum class ArchMode { Hybrid, TpuOnly };

std::string_view to_string(ArchMode mode);
ArchMode parse_mode(std::string_view text);

/// One decode step split by the part of the model that produced the cost.
struct TokenCost {
    CostResult attention;   // score/context MVMs and softmax, always on the array
    CostResult projections; // Q/K/V/X and FF MVMs (PIM or array) plus their weight traffic
    CostResult other;       // GELU/LayerNorm, PIM<->TPU transfers, KV-cache appends

    CostResult total() const;
};

/// Layers run one after another and PIM/TPU phases never overlap, so every
/// category simply accumulates. In TpuOnly mode all projection weights are
/// streamed from DRAM once per token: they cannot stay resident in SRAM.
TokenCost simulate_token_detailed(const workload::ModelSpec& model, const HardwareSpec& hw,
                                  ArchMode mode);

CostResult simulate_token(const workload::ModelSpec& model, const HardwareSpec& hw, ArchMode mode);

/// Systolic-array cycles and traffic of one TpuOnly decode step; NFU cycles for
/// softmax/GELU/LayerNorm are folded into compute_cycles.
systolic::TileCost tpu_only_tile_cost(const workload::ModelSpec& model,
                                      const systolic::TPUSpec& tpu);

/// tpu_only_tile_cost(...).total_cycles()
std::int64_t tpu_only_systolic_cycles(const workload::ModelSpec& model,
                                      const systolic::TPUSpec& tpu);

/// TpuOnly latency over Hybrid latency at context length `context_len`.
double speedup(workload::ModelSpec model, const HardwareSpec& hw, std::int64_t context_len);

/// Latency share of each category in percent. Throws std::domain_error when the
/// total latency is zero.
std::map<Category, double> breakdown_percentages(const CostResult& cost);

struct PimCapacity {
    std::int64_t crossbars_needed = 0;
    std::int64_t crossbars_available = 0;

    bool fits() const { return crossbars_needed <= crossbars_available; }
};

/// Crossbars needed to hold every projection weight of the model.
PimCapacity pim_capacity(const workload::ModelSpec& model, const pim::PIMSpec& pim);

} // namespace pimllm::engine
