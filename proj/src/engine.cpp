#include "pimllm/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pimllm/pim.hpp"
#include "pimllm/systolic.hpp"

namespace pimllm {

void validate(const SystemSpec& system) {
    if (!(system.battery_joules > 0.0) || !(system.tokens_per_word > 0.0)) {
        throw std::invalid_argument("system: battery_joules and tokens_per_word must be > 0");
    }
    if (!(system.lpddr_bw_bytes_per_ns > 0.0)) {
        throw std::invalid_argument("system: lpddr_bw_bytes_per_ns must be > 0");
    }
    if (!(system.lpddr_energy_pj_per_byte >= 0.0)) {
        throw std::invalid_argument("system: lpddr_energy_pj_per_byte must be >= 0");
    }
    if (!(system.ops_per_mac > 0.0)) {
        throw std::invalid_argument("system: ops_per_mac must be > 0");
    }
}

void validate(const HardwareSpec& hw) {
    systolic::validate(hw.tpu);
    pim::validate(hw.pim);
    validate(hw.system);
}

} // namespace pimllm

namespace pimllm::engine {

using workload::MatMulOp;
using workload::NonlinearKind;
using workload::NonlinearOp;
using workload::Op;

namespace {

constexpr double kNs = 1e-9;
constexpr double kPj = 1e-12;

struct LayerOps {
    std::vector<MatMulOp> projections;
    std::vector<Op> attention; // score/context MVMs and softmax
    double post_elements = 0;  // GELU + LayerNorm elements
};

LayerOps split_layer(const workload::OpGraph& graph) {
    LayerOps out;
    for (const auto& op : graph.layer(0)) {
        if (const auto* mm = std::get_if<MatMulOp>(&op)) {
            if (workload::is_projection(mm->role)) {
                out.projections.push_back(*mm);
            } else {
                out.attention.push_back(op);
            }
        } else {
            const auto& nl = std::get<NonlinearOp>(op);
            if (nl.kind == NonlinearKind::Softmax) {
                out.attention.push_back(op);
            } else {
                out.post_elements += static_cast<double>(nl.element_count);
            }
        }
    }
    return out;
}

double cycles_to_seconds(std::int64_t cycles, const systolic::TPUSpec& tpu) {
    return static_cast<double>(cycles) / tpu.freq_hz;
}

std::int64_t nfu_cycles(double elements, const systolic::TPUSpec& tpu) {
    return static_cast<std::int64_t>(std::ceil(tpu.nfu_cycles_per_element * elements));
}

CostResult attention_layer_cost(const LayerOps& ops, const systolic::TPUSpec& tpu) {
    const auto att = systolic::attention_block_cost(ops.attention, tpu);
    const auto e = systolic::tile_energy(att.tile, att.macs, tpu);
    CostResult cost;
    cost.add(Category::Systolic, cycles_to_seconds(att.tile.total_cycles(), tpu), e.mac_pj * kPj);
    cost.add_energy(Category::Buffer, e.sram_pj * kPj);
    return cost;
}

struct TpuProjection {
    std::int64_t cycles = 0;
    CostResult cost;
};

TpuProjection tpu_projection_cost(const MatMulOp& op, const systolic::TPUSpec& tpu) {
    const auto tile = systolic::analytic_cycles(systolic::tpu_gemm(op), tpu);
    const auto e = systolic::tile_energy(tile, op.macs(), tpu);
    TpuProjection out;
    out.cycles = tile.total_cycles();
    out.cost.add(Category::Systolic, cycles_to_seconds(out.cycles, tpu), e.mac_pj * kPj);
    out.cost.add_energy(Category::Buffer, e.sram_pj * kPj);
    // The whole weight matrix comes in from DRAM every step.
    const double weight_bytes = static_cast<double>(op.m * op.k);
    out.cost.add(Category::Communication, weight_bytes / tpu.dram_bw_bytes_per_cycle / tpu.freq_hz,
                 weight_bytes * tpu.dram_energy_pj_per_byte * kPj);
    return out;
}

// Appending this step's K and V rows to the cache in weight SRAM.
CostResult kv_append_cost(const workload::ModelSpec& model, const systolic::TPUSpec& tpu) {
    const auto bytes = 2 * model.d;
    const auto cycles = (bytes + tpu.sram_bw_bytes_per_cycle - 1) / tpu.sram_bw_bytes_per_cycle;
    CostResult cost;
    cost.add(Category::Buffer, cycles_to_seconds(cycles, tpu),
             static_cast<double>(bytes) * tpu.sram_energy_pj_per_byte * kPj);
    return cost;
}

} // namespace

std::string_view to_string(ArchMode mode) {
    return mode == ArchMode::Hybrid ? "Hybrid" : "TpuOnly";
}

ArchMode parse_mode(std::string_view text) {
    if (text == "Hybrid" || text == "hybrid") return ArchMode::Hybrid;
    if (text == "TpuOnly" || text == "tpu-only" || text == "tpuonly") return ArchMode::TpuOnly;
    throw std::invalid_argument("unknown mode '" + std::string(text) +
                                "' (expected Hybrid or TpuOnly)");
}

CostResult TokenCost::total() const {
    CostResult sum = attention;
    sum += projections;
    sum += other;
    return sum;
}

TokenCost simulate_token_detailed(const workload::ModelSpec& model, const HardwareSpec& hw,
                                  ArchMode mode) {
    validate(hw);
    const auto graph = workload::build_op_graph(model);
    const auto ops = split_layer(graph);
    const auto& tpu = hw.tpu;

    TokenCost layer;
    layer.attention = attention_layer_cost(ops, tpu);
    layer.other += kv_append_cost(model, tpu);

    if (mode == ArchMode::Hybrid) {
        for (const auto& op : ops.projections) {
            layer.projections += pim::pim_layer_cost(op, hw.pim).cost;
        }
        layer.other.add(Category::Peripheral, ops.post_elements * hw.pim.peripheral_ns_per_element * kNs,
                        ops.post_elements * hw.pim.peripheral_pj_per_element * kPj);
        // Query to the array, attention output back to PIM, both through LPDDR.
        const double transfer_bytes = 2.0 * static_cast<double>(model.d);
        layer.other.add(Category::Communication,
                        transfer_bytes / hw.system.lpddr_bw_bytes_per_ns * kNs,
                        transfer_bytes * hw.system.lpddr_energy_pj_per_byte * kPj);
    } else {
        for (const auto& op : ops.projections) {
            layer.projections += tpu_projection_cost(op, tpu).cost;
        }
        layer.other.add_latency(Category::Systolic,
                                cycles_to_seconds(nfu_cycles(ops.post_elements, tpu), tpu));
    }

    TokenCost total;
    for (std::int64_t i = 0; i < model.n_layers; ++i) {
        total.attention += layer.attention;
        total.projections += layer.projections;
        total.other += layer.other;
    }
    return total;
}

CostResult simulate_token(const workload::ModelSpec& model, const HardwareSpec& hw, ArchMode mode) {
    return simulate_token_detailed(model, hw, mode).total();
}

systolic::TileCost tpu_only_tile_cost(const workload::ModelSpec& model,
                                      const systolic::TPUSpec& tpu) {
    systolic::validate(tpu);
    const auto ops = split_layer(workload::build_op_graph(model));
    auto per_layer = systolic::attention_block_cost(ops.attention, tpu).tile;
    for (const auto& op : ops.projections) {
        per_layer += systolic::analytic_cycles(systolic::tpu_gemm(op), tpu);
    }
    per_layer.compute_cycles += nfu_cycles(ops.post_elements, tpu);

    systolic::TileCost total;
    for (std::int64_t i = 0; i < model.n_layers; ++i) total += per_layer;
    return total;
}

std::int64_t tpu_only_systolic_cycles(const workload::ModelSpec& model,
                                      const systolic::TPUSpec& tpu) {
    return tpu_only_tile_cost(model, tpu).total_cycles();
}

double speedup(workload::ModelSpec model, const HardwareSpec& hw, std::int64_t context_len) {
    model.context_len = context_len;
    const auto baseline = simulate_token(model, hw, ArchMode::TpuOnly).total_latency();
    const auto hybrid = simulate_token(model, hw, ArchMode::Hybrid).total_latency();
    return baseline / hybrid;
}

std::map<Category, double> breakdown_percentages(const CostResult& cost) {
    const double total = cost.total_latency();
    if (!(total > 0.0)) {
        throw std::domain_error("breakdown_percentages: total latency is zero");
    }
    std::map<Category, double> shares;
    for (auto c : kAllCategories) {
        shares[c] = 100.0 * cost.latency(c) / total;
    }
    return shares;
}

PimCapacity pim_capacity(const workload::ModelSpec& model, const pim::PIMSpec& pim) {
    const auto ops = split_layer(workload::build_op_graph(model));
    PimCapacity cap;
    for (const auto& op : ops.projections) {
        cap.crossbars_needed += pim::plan_mapping(op.k, op.m, pim).total_tiles;
    }
    cap.crossbars_needed *= model.n_layers;
    cap.crossbars_available = pim.crossbar_capacity();
    return cap;
}

} // namespace pimllm::engine
