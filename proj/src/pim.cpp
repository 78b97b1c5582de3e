#include "pimllm/pim.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pimllm::pim {

namespace {

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

} // namespace

void validate(const PIMSpec& hw) {
    if (hw.xbar_rows < 1 || hw.xbar_cols < 1) {
        throw std::invalid_argument("pim: xbar_rows and xbar_cols must be >= 1");
    }
    if (hw.adc_bits < 2 || hw.adc_bits > 32) {
        throw std::invalid_argument("pim: adc_bits must be in [2, 32]");
    }
    if (hw.act_bits < 1 || hw.act_bits > 16) {
        throw std::invalid_argument("pim: act_bits must be in [1, 16]");
    }
    if (hw.adcs_per_xbar < 1 || hw.adcs_per_xbar > hw.xbar_cols) {
        throw std::invalid_argument("pim: adcs_per_xbar must be in [1, xbar_cols]");
    }
    if (hw.xbars_per_pe < 1 || hw.pes_per_tile < 1 || hw.tiles_per_bank < 1 || hw.banks < 1) {
        throw std::invalid_argument("pim: hierarchy counts must be >= 1");
    }
    if (!(hw.noc_bw_bytes_per_ns > 0.0) || !(hw.buffer_bw_bytes_per_ns > 0.0)) {
        throw std::invalid_argument("pim: noc and buffer bandwidths must be > 0");
    }
    for (double v : {hw.t_dac_ns, hw.t_xbar_ns, hw.t_adc_ns, hw.e_dac_pj, hw.e_xbar_pj_per_row,
                     hw.e_adc_pj, hw.noc_energy_pj_per_byte, hw.buffer_energy_pj_per_byte,
                     hw.peripheral_ns_per_element, hw.peripheral_pj_per_element}) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("pim: timing and energy parameters must be >= 0");
        }
    }
}

std::int64_t CrossbarTilePlan::rows_in(std::int64_t tr, const PIMSpec& hw) const {
    return std::min(hw.xbar_rows, weight_rows - tr * hw.xbar_rows);
}

std::int64_t CrossbarTilePlan::cols_in(std::int64_t tc, const PIMSpec& hw) const {
    return std::min(hw.xbar_cols, weight_cols - tc * hw.xbar_cols);
}

CrossbarTilePlan plan_mapping(std::int64_t weight_rows, std::int64_t weight_cols,
                              const PIMSpec& hw) {
    if (weight_rows < 1 || weight_cols < 1) {
        throw std::invalid_argument("plan_mapping: weight dimensions must be >= 1");
    }
    validate(hw);
    CrossbarTilePlan plan;
    plan.weight_rows = weight_rows;
    plan.weight_cols = weight_cols;
    plan.tiles_r = ceil_div(weight_rows, hw.xbar_rows);
    plan.tiles_c = ceil_div(weight_cols, hw.xbar_cols);
    plan.total_tiles = plan.tiles_r * plan.tiles_c;
    return plan;
}

TernaryMatrix::TernaryMatrix(std::int64_t rows, std::int64_t cols)
    : TernaryMatrix(rows, cols, std::vector<std::int8_t>(static_cast<std::size_t>(rows * cols))) {}

TernaryMatrix::TernaryMatrix(std::int64_t rows, std::int64_t cols, std::vector<std::int8_t> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("TernaryMatrix: dimensions must be >= 1");
    }
    if (values_.size() != static_cast<std::size_t>(rows * cols)) {
        throw std::invalid_argument("TernaryMatrix: value count does not match shape");
    }
    for (auto v : values_) {
        if (v < -1 || v > 1) {
            throw std::invalid_argument("TernaryMatrix: weight " + std::to_string(v) +
                                        " is not ternary");
        }
    }
}

TernaryMatrix TernaryMatrix::identity(std::int64_t n) {
    TernaryMatrix m(n, n);
    for (std::int64_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

void TernaryMatrix::set(std::int64_t r, std::int64_t c, std::int8_t value) {
    if (value < -1 || value > 1) {
        throw std::invalid_argument("TernaryMatrix: weight " + std::to_string(value) +
                                    " is not ternary");
    }
    values_[static_cast<std::size_t>(r * cols_ + c)] = value;
}

DevicePair encode_ternary(std::int8_t weight) {
    switch (weight) {
    case 1: return {1, 0};
    case -1: return {0, 1};
    case 0: return {0, 0};
    default: throw std::invalid_argument("encode_ternary: weight is not ternary");
    }
}

std::vector<std::int64_t> functional_mvm(const TernaryMatrix& weights,
                                         std::span<const std::int32_t> x, const PIMSpec& hw,
                                         AdcMode mode) {
    validate(hw);
    if (static_cast<std::int64_t>(x.size()) != weights.rows()) {
        throw std::invalid_argument("functional_mvm: input length " + std::to_string(x.size()) +
                                    " does not match weight rows " +
                                    std::to_string(weights.rows()));
    }
    const std::int32_t x_min = -(1 << (hw.act_bits - 1));
    const std::int32_t x_max = (1 << (hw.act_bits - 1)) - 1;
    for (auto v : x) {
        if (v < x_min || v > x_max) {
            throw std::invalid_argument("functional_mvm: activation " + std::to_string(v) +
                                        " outside the signed " + std::to_string(hw.act_bits) +
                                        "-bit range");
        }
    }

    const std::int64_t adc_min = -(std::int64_t{1} << (hw.adc_bits - 1));
    const std::int64_t adc_max = (std::int64_t{1} << (hw.adc_bits - 1)) - 1;
    const std::uint32_t bit_mask = (1u << hw.act_bits) - 1u;

    const auto plan = plan_mapping(weights.rows(), weights.cols(), hw);
    std::vector<std::int64_t> out(static_cast<std::size_t>(weights.cols()), 0);
    std::vector<std::int64_t> pos_current(static_cast<std::size_t>(hw.xbar_cols));
    std::vector<std::int64_t> neg_current(static_cast<std::size_t>(hw.xbar_cols));

    for (std::int64_t tr = 0; tr < plan.tiles_r; ++tr) {
        const auto r0 = tr * hw.xbar_rows;
        const auto rows = plan.rows_in(tr, hw);
        for (std::int64_t tc = 0; tc < plan.tiles_c; ++tc) {
            const auto c0 = tc * hw.xbar_cols;
            const auto cols = plan.cols_in(tc, hw);
            for (int bit = 0; bit < hw.act_bits; ++bit) {
                std::fill(pos_current.begin(), pos_current.end(), 0);
                std::fill(neg_current.begin(), neg_current.end(), 0);
                for (std::int64_t r = 0; r < rows; ++r) {
                    const auto pattern = static_cast<std::uint32_t>(x[static_cast<std::size_t>(r0 + r)]) & bit_mask;
                    if (((pattern >> bit) & 1u) == 0) continue; // 1-bit DAC drives 0 V
                    for (std::int64_t c = 0; c < cols; ++c) {
                        const auto pair = encode_ternary(weights.at(r0 + r, c0 + c));
                        pos_current[static_cast<std::size_t>(c)] += pair.positive;
                        neg_current[static_cast<std::size_t>(c)] += pair.negative;
                    }
                }
                // Two's complement: the top bit carries negative weight.
                const std::int64_t place = bit == hw.act_bits - 1 ? -(std::int64_t{1} << bit)
                                                                  : (std::int64_t{1} << bit);
                for (std::int64_t c = 0; c < cols; ++c) {
                    auto sample = pos_current[static_cast<std::size_t>(c)] -
                                  neg_current[static_cast<std::size_t>(c)];
                    if (mode == AdcMode::Quantized) {
                        sample = std::clamp(sample, adc_min, adc_max);
                    }
                    out[static_cast<std::size_t>(c0 + c)] += place * sample;
                }
            }
        }
    }
    return out;
}

TileEnergyPj tile_energy(std::int64_t rows_used, std::int64_t cols_used, const PIMSpec& hw) {
    const double phases = hw.act_bits;
    const double rows = static_cast<double>(rows_used);
    const auto adc_rounds = ceil_div(cols_used, hw.adcs_per_xbar);
    TileEnergyPj e;
    e.dac = phases * hw.e_dac_pj * rows;
    e.xbar = phases * hw.e_xbar_pj_per_row * rows;
    e.adc = phases * hw.e_adc_pj * static_cast<double>(adc_rounds * hw.adcs_per_xbar);
    return e;
}

PimOpCost pim_layer_cost(const workload::MatMulOp& op, const PIMSpec& hw) {
    if (op.precision != workload::Precision::W1A8 || !workload::is_projection(op.role)) {
        throw std::invalid_argument("pim_layer_cost: " + std::string(workload::to_string(op.role)) +
                                    " is a W8A8 op and runs on the systolic array");
    }
    validate(hw);

    constexpr double kNs = 1e-9;
    constexpr double kPj = 1e-12;

    // Stationary weights are k x m: k input rows, m output columns.
    PimOpCost result;
    result.plan = plan_mapping(op.k, op.m, hw);

    const double phases = hw.act_bits;
    const auto adc_rounds = ceil_div(std::min(hw.xbar_cols, op.m), hw.adcs_per_xbar);

    TileEnergyPj energy;
    for (std::int64_t tr = 0; tr < result.plan.tiles_r; ++tr) {
        for (std::int64_t tc = 0; tc < result.plan.tiles_c; ++tc) {
            const auto e = tile_energy(result.plan.rows_in(tr, hw), result.plan.cols_in(tc, hw), hw);
            energy.dac += e.dac;
            energy.xbar += e.xbar;
            energy.adc += e.adc;
        }
    }

    auto& cost = result.cost;
    cost.add(Category::DAC, phases * hw.t_dac_ns * kNs, energy.dac * kPj);
    cost.add(Category::Xbar, phases * hw.t_xbar_ns * kNs, energy.xbar * kPj);
    cost.add(Category::ADC, phases * static_cast<double>(adc_rounds) * hw.t_adc_ns * kNs,
             energy.adc * kPj);

    const double io_bytes = static_cast<double>(op.k + op.m);
    cost.add(Category::Communication, io_bytes / hw.noc_bw_bytes_per_ns * kNs,
             io_bytes * hw.noc_energy_pj_per_byte * kPj);
    cost.add(Category::Buffer, io_bytes / hw.buffer_bw_bytes_per_ns * kNs,
             io_bytes * hw.buffer_energy_pj_per_byte * kPj);

    const double outputs = static_cast<double>(op.m);
    cost.add(Category::Peripheral, outputs * hw.peripheral_ns_per_element * kNs,
             outputs * hw.peripheral_pj_per_element * kPj);
    return result;
}

} // namespace pimllm::pim
