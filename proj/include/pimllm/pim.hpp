#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pimllm/cost.hpp"
#include "pimllm/workload.hpp"

namespace pimllm::pim {

/// Crossbar geometry, converter timing/energy and the bank/tile/PE hierarchy.
/// Crossbar dimensions count ternary cells (one differential device pair each).
struct PIMSpec {
    std::int64_t xbar_rows = 256;
    std::int64_t xbar_cols = 256;
    int adc_bits = 8;
    int act_bits = 8;
    std::int64_t adcs_per_xbar = 32;
    double t_dac_ns = 1.0;
    double t_xbar_ns = 1.0;
    double t_adc_ns = 1.0;
    double e_dac_pj = 0.05;
    double e_xbar_pj_per_row = 0.02;
    double e_adc_pj = 2.0;
    std::int64_t xbars_per_pe = 4;
    std::int64_t pes_per_tile = 16;
    std::int64_t tiles_per_bank = 64;
    std::int64_t banks = 64;
    double noc_bw_bytes_per_ns = 32.0;
    double noc_energy_pj_per_byte = 1.0;
    double buffer_bw_bytes_per_ns = 64.0;
    double buffer_energy_pj_per_byte = 0.5;
    double peripheral_ns_per_element = 0.0;
    double peripheral_pj_per_element = 0.0;

    std::int64_t crossbar_capacity() const {
        return xbars_per_pe * pes_per_tile * tiles_per_bank * banks;
    }
};

void validate(const PIMSpec& hw);

struct CrossbarTilePlan {
    std::int64_t weight_rows = 0;
    std::int64_t weight_cols = 0;
    std::int64_t tiles_r = 0;
    std::int64_t tiles_c = 0;
    std::int64_t total_tiles = 0;

    /// Rows/columns of the weight matrix held by tile (tr, tc).
    std::int64_t rows_in(std::int64_t tr, const PIMSpec& hw) const;
    std::int64_t cols_in(std::int64_t tc, const PIMSpec& hw) const;
};

/// Tiles a (weight_rows x weight_cols) matrix over crossbars, row-major.
CrossbarTilePlan plan_mapping(std::int64_t weight_rows, std::int64_t weight_cols, const PIMSpec& hw);

/// Dense matrix of ternary weights in {-1, 0, +1}, rows = input length.
class TernaryMatrix {
public:
    TernaryMatrix(std::int64_t rows, std::int64_t cols);
    TernaryMatrix(std::int64_t rows, std::int64_t cols, std::vector<std::int8_t> values);

    static TernaryMatrix identity(std::int64_t n);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    std::int8_t at(std::int64_t r, std::int64_t c) const {
        return values_[static_cast<std::size_t>(r * cols_ + c)];
    }
    void set(std::int64_t r, std::int64_t c, std::int8_t value);

private:
    std::int64_t rows_;
    std::int64_t cols_;
    std::vector<std::int8_t> values_;
};

/// Conductance states of a differential device pair, 1 = G_on, 0 = G_off.
struct DevicePair {
    int positive = 0;
    int negative = 0;
};

DevicePair encode_ternary(std::int8_t weight);

enum class AdcMode { Ideal, Quantized };

/// Bit-serial crossbar MVM: y[c] = sum_r W[r][c] * x[r].
/// Each activation bit phase drives the rows of every tile; column currents are
/// the positive-minus-negative device sums, digitized per tile and phase
/// (clamped to the signed adc_bits range in Quantized mode), then shift-added.
/// Throws std::invalid_argument on shape mismatch or x outside act_bits.
std::vector<std::int64_t> functional_mvm(const TernaryMatrix& weights,
                                         std::span<const std::int32_t> x, const PIMSpec& hw,
                                         AdcMode mode);

struct TileEnergyPj {
    double dac = 0.0;
    double xbar = 0.0;
    double adc = 0.0;

    double total() const { return dac + xbar + adc; }
};

/// Energy of one MVM on a single crossbar with the given occupied rows/columns.
TileEnergyPj tile_energy(std::int64_t rows_used, std::int64_t cols_used, const PIMSpec& hw);

struct PimOpCost {
    CostResult cost;
    CrossbarTilePlan plan;
    std::uint64_t crossbar_writes = 0; // weights are programmed once at configuration
};

/// Latency/energy of one W1A8 MVM with every tile of the plan firing in parallel.
/// Throws std::invalid_argument for W8A8 ops.
PimOpCost pim_layer_cost(const workload::MatMulOp& op, const PIMSpec& hw);

} // namespace pimllm::pim
