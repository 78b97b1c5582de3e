#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "pimllm/workload.hpp"

namespace pimllm::systolic {

enum class Dataflow { OS, WS, IS };

std::string_view to_string(Dataflow dataflow);
Dataflow parse_dataflow(std::string_view text);

struct SramBytes {
    std::uint64_t input = 2ull << 20;
    std::uint64_t weight = 4ull << 20;
    std::uint64_t output = 2ull << 20;

    std::uint64_t total() const { return input + weight + output; }
};

/// R x C array of 8-bit MAC PEs.
struct TPUSpec {
    std::int64_t rows = 32;
    std::int64_t cols = 32;
    double freq_hz = 1e8;
    Dataflow dataflow = Dataflow::OS;
    SramBytes sram;
    std::int64_t sram_bw_bytes_per_cycle = 64;
    double dram_bw_bytes_per_cycle = 128.0;
    double mac_energy_pj = 0.25;
    double sram_energy_pj_per_byte = 1.0;
    double dram_energy_pj_per_byte = 20.0;
    double nfu_cycles_per_element = 0.0;
};

void validate(const TPUSpec& hw);

/// Output is M x N; A (M x K) is the streamed input, B (K x N) the weight
/// operand that stays pinned in WS.
struct GemmShape {
    std::int64_t m = 1;
    std::int64_t k = 1;
    std::int64_t n = 1;

    std::uint64_t macs() const {
        return static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k) *
               static_cast<std::uint64_t>(n);
    }
};

/// Decode-step MVM y = W x as a GEMM on the array: the activation vector is a
/// single input row (M = 1) and the matrix operand sits in weight memory.
GemmShape tpu_gemm(const workload::MatMulOp& op);

struct TileCost {
    std::int64_t compute_cycles = 0;
    std::int64_t stall_cycles = 0;
    std::int64_t sram_reads_bytes = 0;
    std::int64_t sram_writes_bytes = 0;
    std::int64_t dram_reads_bytes = 0;

    std::int64_t total_cycles() const { return compute_cycles + stall_cycles; }

    TileCost& operator+=(const TileCost& other);
    bool operator==(const TileCost&) const = default;
};

/// Number of array folds (tiles) for a shape under the given dataflow.
std::int64_t fold_count(const GemmShape& shape, const TPUSpec& hw);

/// Closed-form cycles and SRAM/DRAM traffic. Partial folds are charged as full
/// folds; stall is the shortfall of SRAM bandwidth against compute.
TileCost analytic_cycles(const GemmShape& shape, const TPUSpec& hw);

inline constexpr std::uint64_t kOracleMacLimit = 1ull << 24;

struct CycleSimResult {
    TileCost cost;
    std::uint64_t macs_executed = 0;
};

/// Steps an R x C grid of PEs cycle by cycle with skewed operand injection.
/// Folds run back to back on a fixed fold period (unused lanes carry
/// bubbles); compute_cycles is the cycle of the last MAC. The product is
/// checked against a direct matmul and the MAC count against M*K*N.
/// Throws std::length_error above kOracleMacLimit MACs.
CycleSimResult cycle_accurate_sim(const GemmShape& shape, const TPUSpec& hw);

struct TileEnergy {
    double mac_pj = 0.0;
    double sram_pj = 0.0;
    double dram_pj = 0.0;

    double total_pj() const { return mac_pj + sram_pj + dram_pj; }
};

TileEnergy tile_energy(const TileCost& cost, std::uint64_t macs, const TPUSpec& hw);

struct AttentionCost {
    TileCost tile;
    std::uint64_t macs = 0;
};

/// Cost of the score/context MVMs and softmax of one layer. Heads run one after
/// another on the single array; K/V are read from weight SRAM every step.
/// Throws std::invalid_argument if `layer_ops` holds a projection or GELU/LayerNorm.
AttentionCost attention_block_cost(std::span<const workload::Op> layer_ops, const TPUSpec& hw);

} // namespace pimllm::systolic
